//! False positive / false negative rates and confusion quantities at a fixed
//! threshold, measured either by counting segments (point) or by summing
//! misclassified duration (range).
//!
//! Conventions are frozen: spoof is positive, higher score means more likely
//! bona fide, a bona fide item counts as a false positive when its score is
//! strictly below the threshold, and a spoof item counts as a false negative
//! when its score is greater than or equal to it. Tie behavior changes the
//! EER, so the strict/inclusive pair is not configurable.
//!
//! Rates are pooled over the whole dataset with global normalizers, and all
//! sums run in a fixed order (trials in input order, ranges in time order) so
//! repeated runs produce bit-identical results.

use crate::error::{Error, Result};
use crate::par;
use crate::timeline::{
    duration_totals, overlap_duration, require_valid, segment_reference, DurationTotals, Label,
    LabelRule, ScoreTrack, SegmentLabels, Trial,
};

/// `(P_FP, P_FN)` at a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub p_fp: f64,
    pub p_fn: f64,
    pub tau: f64,
}

/// Whether a quantity was measured by counting segments or by duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    Point,
    Range,
}

/// All four confusion cells at a threshold: counts in point mode, seconds in
/// range mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfusionTotals {
    pub true_positive: f64,
    pub false_negative: f64,
    pub false_positive: f64,
    pub true_negative: f64,
    pub mode: MeasureMode,
}

fn point_error_counts(labels: &SegmentLabels, scores: &[f64], tau: f64) -> Result<(usize, usize, usize, usize)> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            labels: labels.len(),
            scores: scores.len(),
        });
    }
    let mut negatives = 0usize;
    let mut positives = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (label, &score) in labels.labels.iter().zip(scores) {
        match label {
            Label::BonaFide => {
                negatives += 1;
                if score < tau {
                    fp += 1;
                }
            }
            Label::Spoof => {
                positives += 1;
                if score >= tau {
                    fn_ += 1;
                }
            }
        }
    }
    if negatives == 0 {
        return Err(Error::EmptyClass { missing: "bona fide" });
    }
    if positives == 0 {
        return Err(Error::EmptyClass { missing: "spoof" });
    }
    Ok((fp, fn_, negatives, positives))
}

/// Point-based rates: the fraction of bona fide segments scored strictly
/// below `tau` and the fraction of spoof segments scored at or above it.
pub fn point_rates(labels: &SegmentLabels, scores: &[f64], tau: f64) -> Result<RatePair> {
    let (fp, fn_, negatives, positives) = point_error_counts(labels, scores, tau)?;
    Ok(RatePair {
        p_fp: fp as f64 / negatives as f64,
        p_fn: fn_ as f64 / positives as f64,
        tau,
    })
}

/// Point-based confusion cells, as segment counts.
pub fn point_confusion(labels: &SegmentLabels, scores: &[f64], tau: f64) -> Result<ConfusionTotals> {
    let (fp, fn_, negatives, positives) = point_error_counts(labels, scores, tau)?;
    Ok(ConfusionTotals {
        true_positive: (positives - fn_) as f64,
        false_negative: fn_ as f64,
        false_positive: fp as f64,
        true_negative: (negatives - fp) as f64,
        mode: MeasureMode::Point,
    })
}

/// Misclassified duration of one trial at `tau`: (false-positive seconds,
/// false-negative seconds).
///
/// Hypothesis ranges are intersected with the reference span; anything beyond
/// it is ignored with a warning since score dumps often pad the last frame.
fn trial_error_durations(trial: &Trial, tau: f64) -> (f64, f64) {
    let span_end = trial.span_end();
    let mut fp = 0.0;
    let mut fn_ = 0.0;
    let mut ignored = 0.0;

    // Both lists are sorted in time, so a moving cursor into the reference
    // makes the double sum of the rate definition linear.
    let mut ref_idx = 0usize;
    for hyp in trial.hypothesis.iter_ranges() {
        if hyp.start >= span_end {
            ignored += hyp.end - hyp.start;
            continue;
        }
        let hyp_end = hyp.end.min(span_end);
        if hyp.end > span_end {
            ignored += hyp.end - span_end;
        }

        while ref_idx < trial.reference.len() && trial.reference[ref_idx].end <= hyp.start {
            ref_idx += 1;
        }
        let mut i = ref_idx;
        while i < trial.reference.len() && trial.reference[i].start < hyp_end {
            let r = &trial.reference[i];
            let ov = overlap_duration((hyp.start, hyp_end), (r.start, r.end));
            match r.label {
                Label::BonaFide => {
                    if hyp.score < tau {
                        fp += ov;
                    }
                }
                Label::Spoof => {
                    if hyp.score >= tau {
                        fn_ += ov;
                    }
                }
            }
            i += 1;
        }
    }

    if ignored > 0.0 {
        log::warn!(
            "trial {}: ignoring {ignored} s of hypothesis outside the reference span",
            trial.trial_id
        );
    }

    (fp, fn_)
}

fn range_error_sums(trials: &[Trial], tau: f64, workers: usize) -> Result<(f64, f64, DurationTotals)> {
    for trial in trials {
        require_valid(trial)?;
    }
    let totals = duration_totals(trials)?;

    // At an infinite threshold the indicator is constant and the double sum
    // telescopes to a class total exactly; summing the overlaps instead
    // would reproduce it only up to summation order.
    if tau == f64::NEG_INFINITY {
        return Ok((0.0, totals.d_positive, totals));
    }
    if tau == f64::INFINITY {
        return Ok((totals.d_negative, 0.0, totals));
    }

    // Per-trial partials are computed independently (possibly on worker
    // threads) and folded in trial order, so the sums do not depend on the
    // worker count.
    let partials = par::map_trials(trials, workers, |t| trial_error_durations(t, tau));
    let mut fp = 0.0;
    let mut fn_ = 0.0;
    for (trial_fp, trial_fn) in partials {
        fp += trial_fp;
        fn_ += trial_fn;
    }
    Ok((fp, fn_, totals))
}

/// Range-based rates pooled over the dataset: misclassified bona fide
/// duration over `D_N` and misclassified spoof duration over `D_P`.
pub fn range_rates(trials: &[Trial], tau: f64) -> Result<RatePair> {
    range_rates_with_workers(trials, tau, 1)
}

/// [`range_rates`] with per-trial sums computed on `workers` threads. The
/// result is bit-identical for any worker count.
pub fn range_rates_with_workers(trials: &[Trial], tau: f64, workers: usize) -> Result<RatePair> {
    let (fp, fn_, totals) = range_error_sums(trials, tau, workers)?;
    // Near-complete misclassification can overshoot a class total by a few
    // ulp of float summation; the mathematical value is always a fraction.
    Ok(RatePair {
        p_fp: (fp / totals.d_negative).clamp(0.0, 1.0),
        p_fn: (fn_ / totals.d_positive).clamp(0.0, 1.0),
        tau,
    })
}

/// Pool a dataset for point-based evaluation: segment every reference at
/// `resolution`, label the segments by `rule`, and line the labels up with
/// the uniform hypothesis scores, trial by trial in input order.
///
/// Every hypothesis must be a uniform track at exactly `resolution`; scores
/// beyond the reference span (padded last frames) are dropped with a warning.
pub fn pool_segments(
    trials: &[Trial],
    resolution: f64,
    rule: LabelRule,
) -> Result<(SegmentLabels, Vec<f64>)> {
    let mut labels = Vec::new();
    let mut pooled_scores = Vec::new();
    for trial in trials {
        require_valid(trial)?;
        let scores = match &trial.hypothesis {
            ScoreTrack::Uniform { resolution: d, scores } if *d == resolution => scores,
            ScoreTrack::Uniform { resolution: d, .. } => {
                return Err(Error::ResolutionMismatch {
                    track: *d,
                    expected: resolution,
                })
            }
            ScoreTrack::Ranged { .. } => {
                return Err(Error::InvalidTrial {
                    trial_id: trial.trial_id.clone(),
                    violation: "point-based evaluation needs a uniform score track".into(),
                })
            }
        };
        let segs = segment_reference(&trial.reference, resolution, rule);
        if scores.len() < segs.len() {
            return Err(Error::LengthMismatch {
                labels: segs.len(),
                scores: scores.len(),
            });
        }
        if scores.len() > segs.len() {
            log::warn!(
                "trial {}: dropping {} hypothesis segment(s) outside the reference span",
                trial.trial_id,
                scores.len() - segs.len()
            );
        }
        pooled_scores.extend_from_slice(&scores[..segs.len()]);
        labels.extend(segs.labels);
    }
    Ok((SegmentLabels { resolution, labels }, pooled_scores))
}

/// Range-based confusion cells, in seconds.
pub fn range_confusion(trials: &[Trial], tau: f64) -> Result<ConfusionTotals> {
    let (fp, fn_, totals) = range_error_sums(trials, tau, 1)?;
    Ok(ConfusionTotals {
        true_positive: (totals.d_positive - fn_).max(0.0),
        false_negative: fn_,
        false_positive: fp,
        true_negative: (totals.d_negative - fp).max(0.0),
        mode: MeasureMode::Range,
    })
}
