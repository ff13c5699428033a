//! Deterministic generator of partially spoofed trials.
//!
//! Each utterance is partitioned into alternating bona fide / spoof ranges
//! whose boundaries sit on the hypothesis score grid, then scored per
//! segment from two class-conditional normal distributions. With the
//! boundaries on the grid, a noiseless separated score model classifies
//! every instant correctly, so range-based EER is exactly zero; lowering the
//! separation or raising the noise dials in any error level a test needs.
//!
//! All randomness for trial `i` comes from a counter-based stream derived
//! from `(seed, i)`, so datasets are bit-identical across runs and trials
//! can be generated in any order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp, Normal};

use crate::error::{Error, Result};
use crate::timeline::{segment_reference, Label, LabeledRange, LabelRule, ScoreTrack, Trial};

/// Class-conditional score model: bona fide segments center at
/// `+separation/2`, spoof segments at `-separation/2`, both with
/// `noise_sd` normal noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreModel {
    pub separation: f64,
    pub noise_sd: f64,
}

/// Everything the generator needs; identical specs produce bit-identical
/// datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_trials: usize,
    /// Utterance length range in seconds, sampled uniformly.
    pub utterance_seconds: (f64, f64),
    /// Mean labeled-range length in seconds (exponential draws, truncated to
    /// [0.1 s, utterance length] and snapped to the score grid).
    pub mean_range_seconds: f64,
    /// Long-run fraction of spoof duration, in (0, 1).
    pub spoof_fraction: f64,
    pub score_model: ScoreModel,
    pub hypothesis_resolution: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            n_trials: 100,
            utterance_seconds: (2.0, 8.0),
            mean_range_seconds: 2.0,
            spoof_fraction: 0.5,
            score_model: ScoreModel {
                separation: 2.0,
                noise_sd: 1.0,
            },
            hypothesis_resolution: 0.02,
        }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidSpec(msg));
        if self.n_trials == 0 {
            return fail("n_trials must be at least 1".into());
        }
        let (lo, hi) = self.utterance_seconds;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return fail(format!("utterance_seconds ({lo}, {hi}) must satisfy 0 < min <= max"));
        }
        if !(self.mean_range_seconds > 0.0 && self.mean_range_seconds.is_finite()) {
            return fail(format!("mean_range_seconds {} must be positive", self.mean_range_seconds));
        }
        if !(self.spoof_fraction > 0.0 && self.spoof_fraction < 1.0) {
            return fail(format!("spoof_fraction {} must lie in (0, 1)", self.spoof_fraction));
        }
        if !(self.score_model.separation >= 0.0 && self.score_model.separation.is_finite()) {
            return fail(format!("separation {} must be non-negative", self.score_model.separation));
        }
        if !(self.score_model.noise_sd >= 0.0 && self.score_model.noise_sd.is_finite()) {
            return fail(format!("noise_sd {} must be non-negative", self.score_model.noise_sd));
        }
        if !(self.hypothesis_resolution > 0.0 && self.hypothesis_resolution.is_finite()) {
            return fail(format!(
                "hypothesis_resolution {} must be positive",
                self.hypothesis_resolution
            ));
        }
        Ok(())
    }
}

fn trial_rng(seed: u64, trial_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn generate_trial(spec: &SynthSpec, index: usize) -> Trial {
    let mut rng = trial_rng(spec.seed, index as u64);
    let d = spec.hypothesis_resolution;

    let (lo, hi) = spec.utterance_seconds;
    let utt_raw: f64 = rng.random_range(lo..=hi);
    let n_segments = ((utt_raw / d).round() as usize).max(1);

    // At least 0.1 s per range, in whole grid segments.
    let min_segments = ((0.1 / d).ceil() as usize).max(1);

    let mut label = if rng.random_bool(spec.spoof_fraction) {
        Label::Spoof
    } else {
        Label::BonaFide
    };

    // Per-class mean lengths chosen so alternation realizes the requested
    // spoof fraction in the long run while keeping the overall mean range
    // length at mean_range_seconds.
    let mean_for = |label: Label| match label {
        Label::Spoof => 2.0 * spec.mean_range_seconds * spec.spoof_fraction,
        Label::BonaFide => 2.0 * spec.mean_range_seconds * (1.0 - spec.spoof_fraction),
    };

    let mut reference = Vec::new();
    let mut cursor = 0usize;
    while cursor < n_segments {
        let remaining = n_segments - cursor;
        let exp = Exp::new(1.0 / mean_for(label)).expect("positive mean");
        let drawn: f64 = exp.sample(&mut rng);
        let clamped = drawn.clamp(0.1, utt_raw);
        // Utterances shorter than the minimum range collapse to one range.
        let floor = min_segments.min(remaining);
        let mut segments = ((clamped / d).round() as usize).clamp(floor, remaining);
        // Absorb a tail too short to stand on its own.
        if remaining - segments < min_segments {
            segments = remaining;
        }
        reference.push(LabeledRange::new(
            cursor as f64 * d,
            (cursor + segments) as f64 * d,
            label,
        ));
        cursor += segments;
        label = label.opposite();
    }

    let segment_labels = segment_reference(&reference, d, LabelRule::AnySpoof);
    let noise = if spec.score_model.noise_sd > 0.0 {
        Some(Normal::new(0.0, spec.score_model.noise_sd).expect("finite sd"))
    } else {
        None
    };
    let half = spec.score_model.separation / 2.0;
    let scores = segment_labels
        .labels
        .iter()
        .map(|l| {
            let center = match l {
                Label::BonaFide => half,
                Label::Spoof => -half,
            };
            match &noise {
                Some(n) => center + n.sample(&mut rng),
                None => center,
            }
        })
        .collect();

    Trial::new(
        format!("synth-{index:06}"),
        reference,
        ScoreTrack::uniform(d, scores),
    )
}

/// Generate `spec.n_trials` trials. Every generated trial passes
/// [`crate::timeline::validate_trial`].
pub fn generate(spec: &SynthSpec) -> Result<Vec<Trial>> {
    spec.validate()?;
    Ok((0..spec.n_trials).map(|i| generate_trial(spec, i)).collect())
}

/// Negate the score of every uniform segment whose midpoint lies within
/// `window` seconds of an interior reference boundary.
///
/// This plants classification errors exactly where real localizers make
/// them, at class transitions, which is the substrate for studying how
/// point-based EER reacts to the measurement resolution.
pub fn flip_boundary_scores(trials: &mut [Trial], window: f64) {
    assert!(window >= 0.0, "window must be non-negative");
    for trial in trials.iter_mut() {
        let boundaries: Vec<f64> = trial.reference.iter().skip(1).map(|r| r.start).collect();
        if boundaries.is_empty() {
            continue;
        }
        if let ScoreTrack::Uniform { resolution, scores } = &mut trial.hypothesis {
            let d = *resolution;
            let mut b_idx = 0usize;
            for (m, score) in scores.iter_mut().enumerate() {
                let mid = (m as f64 + 0.5) * d;
                while b_idx + 1 < boundaries.len() && boundaries[b_idx + 1] <= mid {
                    b_idx += 1;
                }
                let mut dist = (mid - boundaries[b_idx]).abs();
                if b_idx + 1 < boundaries.len() {
                    dist = dist.min((boundaries[b_idx + 1] - mid).abs());
                }
                if dist < window {
                    *score = -*score;
                }
            }
        }
    }
}
