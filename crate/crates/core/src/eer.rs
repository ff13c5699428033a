//! Equal error rate computation.
//!
//! Point-based EER is computed exactly by sweeping every threshold at which
//! the rate step functions can change. Range-based EER is estimated by a
//! binary search over score quantiles, with an exhaustive sweep
//! ([`brute_force_range_eer`]) kept as the exact oracle it is checked
//! against.

use crate::error::{Error, Result};
use crate::metrics::{pool_segments, point_rates, range_rates_with_workers, RatePair};
use crate::timeline::{duration_totals, overlap_duration, require_valid, LabelRule, SegmentLabels, Trial};

/// How the binary search picks the next quantile midpoint.
///
/// `RealValued` keeps the midpoint exact, which guarantees the quantile
/// interval keeps moving. `IntegerFloor` floors it, which is kept for
/// fidelity experiments: once the interval width drops to one the midpoint
/// freezes and the search can only stop via the stall guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantileMode {
    #[default]
    RealValued,
    IntegerFloor,
}

/// Settings for [`range_eer_binary_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Stop once `|P_FP - P_FN|` drops below this.
    pub prec: f64,
    /// Hard cap on loop iterations.
    pub max_iterations: u32,
    pub quantile_mode: QuantileMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            prec: 1e-5,
            max_iterations: 200,
            quantile_mode: QuantileMode::RealValued,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if !self.prec.is_finite() || self.prec <= 0.0 {
            return Err(Error::InvalidSpec(format!("prec must be positive, got {}", self.prec)));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidSpec("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// An EER estimate: the equal error rate, the operating threshold, the rates
/// there, and how the search ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EerResult {
    /// `(P_FP + P_FN) / 2` at `threshold`.
    pub eer: f64,
    pub threshold: f64,
    pub rates_at_threshold: RatePair,
    pub iterations: u32,
    /// True when `|P_FP - P_FN| < prec` at `threshold`. Exhaustive sweeps
    /// always converge; the binary search reports `false` when it stalled or
    /// hit the iteration cap first.
    pub converged: bool,
    /// Quantile of `threshold` in the pooled score list, in `[0, 100]`.
    pub quantile: f64,
}

/// Which measurement the dataset-level operations use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    Range,
    Point { resolution: f64, rule: LabelRule },
}

/// Linear-interpolation percentile of an ascending-sorted, non-empty list.
pub fn percentile(sorted_scores: &[f64], q: f64) -> Result<f64> {
    if sorted_scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if q.is_nan() || !(0.0..=100.0).contains(&q) {
        return Err(Error::QuantileDomain(q));
    }
    let n = sorted_scores.len();
    let pos = q / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 || lo + 1 >= n {
        return Ok(sorted_scores[lo.min(n - 1)]);
    }
    Ok(sorted_scores[lo] + frac * (sorted_scores[lo + 1] - sorted_scores[lo]))
}

/// Quantile of `value` within an ascending-sorted list: the inverse of
/// [`percentile`], clamped to `[0, 100]`.
fn inverse_percentile(sorted_scores: &[f64], value: f64) -> f64 {
    let n = sorted_scores.len();
    if n <= 1 || value <= sorted_scores[0] {
        return 0.0;
    }
    if value >= sorted_scores[n - 1] {
        return 100.0;
    }
    let hi = sorted_scores.partition_point(|s| *s <= value);
    let k = hi - 1;
    let s_k = sorted_scores[k];
    let s_next = sorted_scores[hi];
    let frac = if s_next > s_k { (value - s_k) / (s_next - s_k) } else { 0.0 };
    ((k as f64 + frac) / (n - 1) as f64 * 100.0).clamp(0.0, 100.0)
}

/// Pooled scores with per-score class weights, sorted ascending.
///
/// Rates at any threshold come from two prefix sums, which makes threshold
/// sweeps and the binary search cheap. In range mode the weights are overlap
/// durations against each reference class; in point mode they are segment
/// counts, so the computed rates match the plain counting path bit for bit.
pub(crate) struct ScoreIndex {
    /// Every pooled score, duplicates kept, sorted ascending.
    pooled: Vec<f64>,
    /// Distinct scores, ascending.
    distinct: Vec<f64>,
    /// `below_*[k]` = total weight of scores strictly below `distinct[k]`;
    /// the final entry holds the total weight. Length `distinct.len() + 1`.
    below_negative: Vec<f64>,
    below_positive: Vec<f64>,
    d_negative: f64,
    d_positive: f64,
}

impl ScoreIndex {
    fn from_items(mut items: Vec<(f64, f64, f64)>, d_negative: f64, d_positive: f64) -> Self {
        // Stable sort: equal scores keep input (trial, time) order so the
        // prefix sums are reproducible.
        items.sort_by(|a, b| a.0.total_cmp(&b.0));

        let pooled: Vec<f64> = items.iter().map(|it| it.0).collect();
        let mut distinct = Vec::new();
        let mut below_negative = vec![0.0];
        let mut below_positive = vec![0.0];
        let mut cum_neg = 0.0;
        let mut cum_pos = 0.0;
        let mut i = 0;
        while i < items.len() {
            let score = items[i].0;
            distinct.push(score);
            below_negative.push(0.0); // patched after the group is summed
            below_positive.push(0.0);
            while i < items.len() && items[i].0 == score {
                cum_neg += items[i].1;
                cum_pos += items[i].2;
                i += 1;
            }
            *below_negative.last_mut().expect("non-empty") = cum_neg;
            *below_positive.last_mut().expect("non-empty") = cum_pos;
        }

        ScoreIndex {
            pooled,
            distinct,
            below_negative,
            below_positive,
            d_negative,
            d_positive,
        }
    }

    /// Index over a dataset in range mode: one entry per hypothesis range,
    /// weighted by its overlap with each reference class. Per-trial item
    /// lists may be built on `workers` threads; they are concatenated in
    /// trial order, so the index is identical for any worker count.
    pub(crate) fn from_trials(trials: &[Trial], workers: usize) -> Result<Self> {
        for trial in trials {
            require_valid(trial)?;
        }
        let totals = duration_totals(trials)?;

        let per_trial = crate::par::map_trials(trials, workers, |trial| {
            let span_end = trial.span_end();
            let mut items = Vec::with_capacity(trial.hypothesis.len());
            let mut ref_idx = 0usize;
            for hyp in trial.hypothesis.iter_ranges() {
                if hyp.start >= span_end {
                    continue;
                }
                let hyp_end = hyp.end.min(span_end);
                while ref_idx < trial.reference.len() && trial.reference[ref_idx].end <= hyp.start {
                    ref_idx += 1;
                }
                let mut bona = 0.0;
                let mut spoof = 0.0;
                let mut i = ref_idx;
                while i < trial.reference.len() && trial.reference[i].start < hyp_end {
                    let r = &trial.reference[i];
                    let ov = overlap_duration((hyp.start, hyp_end), (r.start, r.end));
                    match r.label {
                        crate::timeline::Label::BonaFide => bona += ov,
                        crate::timeline::Label::Spoof => spoof += ov,
                    }
                    i += 1;
                }
                items.push((hyp.score, bona, spoof));
            }
            items
        });
        let items: Vec<(f64, f64, f64)> = per_trial.into_iter().flatten().collect();

        Ok(Self::from_items(items, totals.d_negative, totals.d_positive))
    }

    /// Index over pooled segment labels and scores in point mode.
    pub(crate) fn from_labels(labels: &SegmentLabels, scores: &[f64]) -> Result<Self> {
        if labels.len() != scores.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                scores: scores.len(),
            });
        }
        let mut items = Vec::with_capacity(scores.len());
        let mut negatives = 0.0;
        let mut positives = 0.0;
        for (label, &score) in labels.labels.iter().zip(scores) {
            if label.is_positive() {
                positives += 1.0;
                items.push((score, 0.0, 1.0));
            } else {
                negatives += 1.0;
                items.push((score, 1.0, 0.0));
            }
        }
        if negatives == 0.0 {
            return Err(Error::EmptyClass { missing: "bona fide" });
        }
        if positives == 0.0 {
            return Err(Error::EmptyClass { missing: "spoof" });
        }
        Ok(Self::from_items(items, negatives, positives))
    }

    pub(crate) fn pooled_sorted(&self) -> &[f64] {
        &self.pooled
    }

    fn rates_from_below(&self, below_neg: f64, below_pos: f64, tau: f64) -> RatePair {
        let total_pos = *self.below_positive.last().expect("non-empty prefix");
        // Partial sums can drift past the class totals by a few ulp; the
        // mathematical value is always a fraction.
        RatePair {
            p_fp: (below_neg / self.d_negative).clamp(0.0, 1.0),
            p_fn: ((total_pos - below_pos) / self.d_positive).clamp(0.0, 1.0),
            tau,
        }
    }

    /// Rates at an arbitrary threshold.
    pub(crate) fn rates(&self, tau: f64) -> RatePair {
        // With a hypothesis that covers the reference, the indicator at -inf
        // (nothing below) and +inf (everything below) makes the double sum
        // telescope to 0 or the class total exactly.
        if tau == f64::NEG_INFINITY {
            return RatePair { p_fp: 0.0, p_fn: 1.0, tau };
        }
        if tau == f64::INFINITY {
            return RatePair { p_fp: 1.0, p_fn: 0.0, tau };
        }
        let idx = self.distinct.partition_point(|s| *s < tau);
        self.rates_from_below(self.below_negative[idx], self.below_positive[idx], tau)
    }

    /// Exhaustive sweep over every threshold at which the step functions can
    /// change: -inf, each distinct score, the midpoints between adjacent
    /// distinct scores, and +inf. Returns the threshold minimizing
    /// `|P_FP - P_FN|` (ties keep the smallest) and the number of candidates
    /// evaluated.
    fn sweep(&self) -> (f64, RatePair, u32) {
        let mut best = Best {
            abs: f64::INFINITY,
            tau: f64::NEG_INFINITY,
            rates: self.rates(f64::NEG_INFINITY),
        };
        best.abs = (best.rates.p_fp - best.rates.p_fn).abs();
        let mut evaluated = 1u32;

        for k in 0..self.distinct.len() {
            let tau = self.distinct[k];
            best.consider(
                tau,
                self.rates_from_below(self.below_negative[k], self.below_positive[k], tau),
            );
            evaluated += 1;

            if k + 1 < self.distinct.len() {
                let mid = (self.distinct[k] + self.distinct[k + 1]) / 2.0;
                // The midpoint addresses the plateau above distinct[k]; when
                // adjacent floats make it round onto an endpoint the score
                // candidates still cover that plateau.
                let idx = if mid > self.distinct[k] { k + 1 } else { k };
                best.consider(
                    mid,
                    self.rates_from_below(self.below_negative[idx], self.below_positive[idx], mid),
                );
                evaluated += 1;
            }
        }

        best.consider(f64::INFINITY, self.rates(f64::INFINITY));
        evaluated += 1;

        (best.tau, best.rates, evaluated)
    }
}

/// Running argmin of the rate gap; ties keep the first (smallest) threshold.
struct Best {
    abs: f64,
    tau: f64,
    rates: RatePair,
}

impl Best {
    fn consider(&mut self, tau: f64, rates: RatePair) {
        let abs = (rates.p_fp - rates.p_fn).abs();
        if abs < self.abs {
            self.abs = abs;
            self.tau = tau;
            self.rates = rates;
        }
    }
}

fn eer_from_rates(rates: RatePair) -> f64 {
    (rates.p_fp + rates.p_fn) / 2.0
}

/// Exact point-based EER by exhaustive threshold sweep.
pub fn point_eer(labels: &SegmentLabels, scores: &[f64]) -> Result<EerResult> {
    let index = ScoreIndex::from_labels(labels, scores)?;
    let (tau, _, evaluated) = index.sweep();
    let rates = point_rates(labels, scores, tau)?;
    Ok(EerResult {
        eer: eer_from_rates(rates),
        threshold: tau,
        rates_at_threshold: rates,
        iterations: evaluated,
        converged: true,
        quantile: inverse_percentile(index.pooled_sorted(), tau),
    })
}

/// Exact range-based EER by exhaustive threshold sweep.
///
/// The rates are step functions of the threshold, so evaluating every
/// distinct score, the midpoints between them, and both infinities visits
/// every value the rate pair can take; the result is exact and serves as the
/// oracle for [`range_eer_binary_search`].
pub fn brute_force_range_eer(trials: &[Trial]) -> Result<EerResult> {
    brute_force_range_eer_with_workers(trials, 1)
}

/// [`brute_force_range_eer`] with per-trial work spread over `workers`
/// threads; bit-identical for any worker count.
pub fn brute_force_range_eer_with_workers(trials: &[Trial], workers: usize) -> Result<EerResult> {
    let index = ScoreIndex::from_trials(trials, workers)?;
    let (tau, _, evaluated) = index.sweep();
    let rates = range_rates_with_workers(trials, tau, workers)?;
    Ok(EerResult {
        eer: eer_from_rates(rates),
        threshold: tau,
        rates_at_threshold: rates,
        iterations: evaluated,
        converged: true,
        quantile: inverse_percentile(index.pooled_sorted(), tau),
    })
}

/// Estimate range-based EER by bisecting score quantiles.
///
/// The search brackets the rate crossing: it keeps the signed rate gap at
/// the left edge non-positive, splits at the quantile midpoint, and moves
/// whichever edge keeps the sign change inside the bracket. It stops once
/// the gap at the midpoint drops below `prec`, the midpoint threshold stops
/// changing (stall), or `max_iterations` is hit; the last two report
/// `converged = false` rather than failing.
pub fn range_eer_binary_search(trials: &[Trial], config: &SearchConfig) -> Result<EerResult> {
    range_eer_binary_search_with_workers(trials, config, 1)
}

/// [`range_eer_binary_search`] with per-trial work spread over `workers`
/// threads; bit-identical for any worker count.
pub fn range_eer_binary_search_with_workers(
    trials: &[Trial],
    config: &SearchConfig,
    workers: usize,
) -> Result<EerResult> {
    config.validate()?;
    let index = ScoreIndex::from_trials(trials, workers)?;
    let scores = index.pooled_sorted();
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut q_l: f64 = 0.0;
    let mut q_r: f64 = 100.0;
    let mut tau_l = percentile(scores, q_l)?;
    let tau_r_init = percentile(scores, q_r)?;
    let mut tau_r = tau_r_init;
    let mut q_m = (q_l + q_r) / 2.0;
    if config.quantile_mode == QuantileMode::IntegerFloor {
        q_m = q_m.floor();
    }
    let mut tau_m = percentile(scores, q_m)?;

    let mut rates_l = index.rates(tau_l);
    let mut rates_m = index.rates(tau_m);
    let mut iterations = 0u32;

    while tau_l <= tau_r && (rates_m.p_fp - rates_m.p_fn).abs() >= config.prec {
        if iterations >= config.max_iterations {
            break;
        }
        let gap_l = rates_l.p_fp - rates_l.p_fn;
        let gap_m = rates_m.p_fp - rates_m.p_fn;
        if gap_l * gap_m <= 0.0 {
            // The crossing lies in [tau_l, tau_m].
            tau_r = tau_m;
            q_r = q_m;
        } else {
            tau_l = tau_m;
            q_l = q_m;
            rates_l = rates_m;
        }

        let mut next_q = (q_l + q_r) / 2.0;
        if config.quantile_mode == QuantileMode::IntegerFloor {
            next_q = next_q.floor();
        }
        let next_tau = percentile(scores, next_q)?;
        if next_tau == tau_m {
            // The quantile interval no longer moves the threshold; rates
            // cannot change either, so the loop would spin forever.
            q_m = next_q;
            break;
        }
        q_m = next_q;
        tau_m = next_tau;
        rates_m = index.rates(tau_m);
        iterations += 1;
    }

    let rates = range_rates_with_workers(trials, tau_m, workers)?;
    let converged = (rates.p_fp - rates.p_fn).abs() < config.prec;
    Ok(EerResult {
        eer: eer_from_rates(rates),
        threshold: tau_m,
        rates_at_threshold: rates,
        iterations,
        converged,
        quantile: q_m,
    })
}

/// Rate pairs at `n_points` thresholds spread over evenly spaced score
/// quantiles, with the `-inf` and `+inf` endpoints included, sorted by
/// threshold. Feed the output to external plotting.
pub fn det_sweep(trials: &[Trial], mode: EvalMode, n_points: usize) -> Result<Vec<RatePair>> {
    if n_points < 2 {
        return Err(Error::InvalidSpec(format!(
            "det sweep needs at least 2 points, got {n_points}"
        )));
    }

    let index = match mode {
        EvalMode::Range => ScoreIndex::from_trials(trials, 1)?,
        EvalMode::Point { resolution, rule } => {
            let (labels, scores) = pool_segments(trials, resolution, rule)?;
            ScoreIndex::from_labels(&labels, &scores)?
        }
    };

    let mut out = Vec::with_capacity(n_points);
    out.push(index.rates(f64::NEG_INFINITY));
    for k in 1..n_points - 1 {
        let q = 100.0 * k as f64 / (n_points - 1) as f64;
        let tau = percentile(index.pooled_sorted(), q)?;
        out.push(index.rates(tau));
    }
    out.push(index.rates(f64::INFINITY));
    Ok(out)
}
