//! Browser bindings for the spoof-localization metrics.
//!
//! Three entry points, each taking and returning JSON strings so the page
//! needs no generated type glue:
//!
//! - [`evaluate`]: generate a synthetic dataset and report range-based EER
//!   (binary search + exhaustive oracle), point-based EER, DET sweeps for
//!   both measurement styles, and per-class score histograms.
//! - [`resolution_sweep`]: plant errors at class boundaries, then measure
//!   point-based EER at 1x/2x/4x/8x the score resolution next to the
//!   resolution-free range-based EER.
//! - [`resample_scores`]: convert a score list between resolutions by
//!   duplication or minimum-pooling.
//!
//! On bad input every function returns `{"error": "..."}` instead of
//! throwing.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use rangeer::eer::{brute_force_range_eer, det_sweep, point_eer, range_eer_binary_search, EerResult, EvalMode, SearchConfig};
use rangeer::metrics::pool_segments;
use rangeer::resample::{downsample, upsample, ResampleSpec};
use rangeer::synth::{flip_boundary_scores, generate, ScoreModel, SynthSpec};
use rangeer::timeline::duration_totals;
use rangeer::{Label, LabelRule, ScoreTrack, Trial};

fn error_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn respond<T: Serialize>(result: Result<T, rangeer::Error>) -> String {
    match result {
        Ok(out) => serde_json::to_string(&out).unwrap_or_else(error_json),
        Err(e) => error_json(e),
    }
}

#[derive(Deserialize)]
#[serde(default)]
struct EvaluateParams {
    seed: u64,
    n_trials: usize,
    utterance_min: f64,
    utterance_max: f64,
    mean_range: f64,
    spoof_fraction: f64,
    separation: f64,
    noise_sd: f64,
    resolution: f64,
    det_points: usize,
}

impl Default for EvaluateParams {
    fn default() -> Self {
        Self {
            seed: 42,
            n_trials: 40,
            utterance_min: 2.0,
            utterance_max: 8.0,
            mean_range: 1.5,
            spoof_fraction: 0.5,
            separation: 2.0,
            noise_sd: 1.0,
            resolution: 0.02,
            det_points: 120,
        }
    }
}

impl EvaluateParams {
    fn spec(&self) -> SynthSpec {
        SynthSpec {
            seed: self.seed,
            n_trials: self.n_trials,
            utterance_seconds: (self.utterance_min, self.utterance_max),
            mean_range_seconds: self.mean_range,
            spoof_fraction: self.spoof_fraction,
            score_model: ScoreModel {
                separation: self.separation,
                noise_sd: self.noise_sd,
            },
            hypothesis_resolution: self.resolution,
        }
    }
}

#[derive(Serialize)]
struct EerOut {
    eer: f64,
    threshold: Option<f64>,
    p_fp: f64,
    p_fn: f64,
    iterations: u32,
    converged: bool,
}

impl From<EerResult> for EerOut {
    fn from(r: EerResult) -> Self {
        Self {
            eer: r.eer,
            threshold: r.threshold.is_finite().then_some(r.threshold),
            p_fp: r.rates_at_threshold.p_fp,
            p_fn: r.rates_at_threshold.p_fn,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

/// `[tau (null when infinite), p_fp, p_fn]` per sweep point.
type DetPoint = (Option<f64>, f64, f64);

#[derive(Serialize)]
struct Histogram {
    lo: f64,
    bin_width: f64,
    bona_fide: Vec<u32>,
    spoof: Vec<u32>,
}

#[derive(Serialize)]
struct EvaluateOut {
    range: EerOut,
    oracle: EerOut,
    point: EerOut,
    det_range: Vec<DetPoint>,
    det_point: Vec<DetPoint>,
    histogram: Histogram,
    d_negative: f64,
    d_positive: f64,
    trial_count: usize,
    segment_count: usize,
}

fn det_points(trials: &[Trial], mode: EvalMode, n: usize) -> Result<Vec<DetPoint>, rangeer::Error> {
    Ok(det_sweep(trials, mode, n)?
        .into_iter()
        .map(|r| (r.tau.is_finite().then_some(r.tau), r.p_fp, r.p_fn))
        .collect())
}

fn histogram(labels: &[Label], scores: &[f64], bins: usize) -> Histogram {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &s in scores {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if !lo.is_finite() || lo == hi {
        hi = lo + 1.0;
    }
    let bin_width = (hi - lo) / bins as f64;
    let mut out = Histogram {
        lo,
        bin_width,
        bona_fide: vec![0; bins],
        spoof: vec![0; bins],
    };
    for (label, &s) in labels.iter().zip(scores) {
        let k = (((s - lo) / bin_width) as usize).min(bins - 1);
        match label {
            Label::BonaFide => out.bona_fide[k] += 1,
            Label::Spoof => out.spoof[k] += 1,
        }
    }
    out
}

fn run_evaluate(params: EvaluateParams) -> Result<EvaluateOut, rangeer::Error> {
    let trials = generate(&params.spec())?;
    let totals = duration_totals(&trials)?;
    let (labels, scores) = pool_segments(&trials, params.resolution, LabelRule::AnySpoof)?;
    let det_n = params.det_points.clamp(2, 2000);

    Ok(EvaluateOut {
        range: range_eer_binary_search(&trials, &SearchConfig::default())?.into(),
        oracle: brute_force_range_eer(&trials)?.into(),
        point: point_eer(&labels, &scores)?.into(),
        det_range: det_points(&trials, EvalMode::Range, det_n)?,
        det_point: det_points(
            &trials,
            EvalMode::Point {
                resolution: params.resolution,
                rule: LabelRule::AnySpoof,
            },
            det_n,
        )?,
        histogram: histogram(&labels.labels, &scores, 48),
        d_negative: totals.d_negative,
        d_positive: totals.d_positive,
        trial_count: trials.len(),
        segment_count: scores.len(),
    })
}

/// Generate a synthetic dataset and evaluate it both ways. JSON in, JSON out.
#[wasm_bindgen]
pub fn evaluate(params_json: &str) -> String {
    match serde_json::from_str::<EvaluateParams>(params_json) {
        Ok(params) => respond(run_evaluate(params)),
        Err(e) => error_json(e),
    }
}

#[derive(Deserialize)]
#[serde(default)]
struct SweepParams {
    seed: u64,
    n_trials: usize,
    separation: f64,
    noise_sd: f64,
    resolution: f64,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            seed: 42,
            n_trials: 40,
            separation: 4.0,
            noise_sd: 0.5,
            resolution: 0.02,
        }
    }
}

#[derive(Serialize)]
struct SweepOut {
    factors: Vec<usize>,
    measurement_resolutions: Vec<f64>,
    point_eers: Vec<f64>,
    range_eer: f64,
}

fn run_resolution_sweep(params: SweepParams) -> Result<SweepOut, rangeer::Error> {
    let spec = SynthSpec {
        seed: params.seed,
        n_trials: params.n_trials,
        utterance_seconds: (4.0, 8.0),
        mean_range_seconds: 0.8,
        spoof_fraction: 0.5,
        score_model: ScoreModel {
            separation: params.separation,
            noise_sd: params.noise_sd,
        },
        hypothesis_resolution: params.resolution,
    };
    let mut trials = generate(&spec)?;
    flip_boundary_scores(&mut trials, params.resolution);

    let factors = vec![1usize, 2, 4, 8];
    let mut point_eers = Vec::new();
    let mut resolutions = Vec::new();
    for &factor in &factors {
        let coarse = params.resolution * factor as f64;
        let coarse_trials: Vec<Trial> = trials
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.hypothesis =
                    downsample(&t.hypothesis, &ResampleSpec::new(params.resolution, coarse))?;
                Ok(t)
            })
            .collect::<Result<_, rangeer::Error>>()?;
        let (labels, scores) = pool_segments(&coarse_trials, coarse, LabelRule::AnySpoof)?;
        point_eers.push(point_eer(&labels, &scores)?.eer);
        resolutions.push(coarse);
    }

    Ok(SweepOut {
        factors,
        measurement_resolutions: resolutions,
        point_eers,
        range_eer: brute_force_range_eer(&trials)?.eer,
    })
}

/// Boundary-error resolution study: point-based EER at coarser and coarser
/// measurement grids against the resolution-free range-based EER.
#[wasm_bindgen]
pub fn resolution_sweep(params_json: &str) -> String {
    match serde_json::from_str::<SweepParams>(params_json) {
        Ok(params) => respond(run_resolution_sweep(params)),
        Err(e) => error_json(e),
    }
}

#[derive(Deserialize)]
struct ResampleParams {
    scores: Vec<f64>,
    from: f64,
    to: f64,
}

#[derive(Serialize)]
struct ResampleOut {
    direction: &'static str,
    factor: usize,
    scores: Vec<f64>,
}

fn run_resample(params: ResampleParams) -> Result<ResampleOut, rangeer::Error> {
    let track = ScoreTrack::uniform(params.from, params.scores);
    let spec = ResampleSpec::new(params.from, params.to);
    let (direction, converted) = if params.from >= params.to {
        ("upsample", upsample(&track, &spec)?)
    } else {
        ("downsample", downsample(&track, &spec)?)
    };
    let factor = if params.from >= params.to {
        spec.upsample_factor()?
    } else {
        spec.downsample_factor()?
    };
    Ok(ResampleOut {
        direction,
        factor,
        scores: converted.scores().collect(),
    })
}

/// Convert a uniform score list between resolutions.
#[wasm_bindgen]
pub fn resample_scores(params_json: &str) -> String {
    match serde_json::from_str::<ResampleParams>(params_json) {
        Ok(params) => respond(run_resample(params)),
        Err(e) => error_json(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_returns_consistent_report() {
        let out = evaluate("{}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        let range = v["range"]["eer"].as_f64().unwrap();
        let oracle = v["oracle"]["eer"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&range));
        if v["range"]["converged"].as_bool().unwrap() {
            assert!((range - oracle).abs() <= 1e-5);
        }
        assert_eq!(v["det_range"][0][1].as_f64(), Some(0.0));
        assert_eq!(v["det_range"][0][2].as_f64(), Some(1.0));
    }

    #[test]
    fn evaluate_is_deterministic() {
        let params = r#"{"seed": 7, "n_trials": 10}"#;
        assert_eq!(evaluate(params), evaluate(params));
    }

    #[test]
    fn sweep_reports_four_point_eers() {
        let out = resolution_sweep("{}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["point_eers"].as_array().unwrap().len(), 4);
        assert!(v["range_eer"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn resample_roundtrip_through_json() {
        let out = resample_scores(r#"{"scores": [0.6, 0.2], "from": 0.64, "to": 0.32}"#);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["direction"], "upsample");
        assert_eq!(v["scores"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn bad_input_reports_error_instead_of_panicking() {
        let out = evaluate("{\"spoof_fraction\": 2.0}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
        let out = resample_scores("not json");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_some());
    }
}
