//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with the measured numbers (run with `--nocapture` to see them).
//!
//! Criteria 1 and 4 share a pinned family of 200 synthetic datasets spanning
//! 10-2000 trials and 20-640 ms resolutions. Utterance lengths are scaled so
//! every dataset pools roughly 400k scored segments: the rate step functions
//! move in increments of about 2/(pooled segments), so this is what makes a
//! 1e-5 rate-gap precision reachable at every trial count and resolution.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use rangeer::eer::{
    brute_force_range_eer, det_sweep, point_eer, range_eer_binary_search, EvalMode, SearchConfig,
};
use rangeer::metrics::{point_rates, pool_segments, range_rates};
use rangeer::resample::{downsample, upsample, ResampleSpec};
use rangeer::synth::{flip_boundary_scores, generate, ScoreModel, SynthSpec};
use rangeer::{LabelRule, ScoreTrack, Trial};

const PREC: f64 = 1e-5;
const RESOLUTIONS_MS: [f64; 6] = [0.02, 0.04, 0.08, 0.16, 0.32, 0.64];

/// Pinned dataset family for criteria 1 and 4.
fn oracle_family_dataset(i: usize) -> Vec<Trial> {
    let resolution = RESOLUTIONS_MS[i % RESOLUTIONS_MS.len()];
    // Trial counts log-spaced over [10, 2000].
    let t = i as f64 / 199.0;
    let n_trials = (10.0 * 200.0f64.powf(t)).round() as usize;
    let target_segments = 400_000.0;
    let utterance = (target_segments * resolution / n_trials as f64).max(4.0 * resolution);
    let spec = SynthSpec {
        seed: 1000 + i as u64,
        n_trials,
        utterance_seconds: (0.9 * utterance, 1.1 * utterance),
        mean_range_seconds: (10.0 * resolution).max(2.0),
        spoof_fraction: [0.35, 0.5, 0.65][i % 3],
        score_model: ScoreModel {
            separation: [0.5, 1.0, 1.5, 2.0][i % 4],
            noise_sd: 1.0,
        },
        hypothesis_resolution: resolution,
    };
    generate(&spec).expect("valid spec")
}

/// Small mixed-parameter dataset for the cheaper criteria.
fn small_dataset(seed: u64, resolution: f64) -> Vec<Trial> {
    let spec = SynthSpec {
        seed,
        n_trials: 10 + (seed % 7) as usize,
        utterance_seconds: (2.0, 6.0),
        mean_range_seconds: 1.0f64.max(4.0 * resolution),
        spoof_fraction: 0.3 + 0.05 * (seed % 9) as f64,
        score_model: ScoreModel {
            separation: 0.4 * (seed % 5) as f64,
            noise_sd: 1.0,
        },
        hypothesis_resolution: resolution,
    };
    generate(&spec).expect("valid spec")
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let config = SearchConfig::default();
    let mut converged = 0usize;
    let mut worst_gap = 0.0f64;
    const DATASETS: usize = 200;

    for i in 0..DATASETS {
        let trials = oracle_family_dataset(i);
        let search = range_eer_binary_search(&trials, &config).expect("search runs");
        let oracle = brute_force_range_eer(&trials).expect("oracle runs");
        if search.converged {
            converged += 1;
            let gap = (search.eer - oracle.eer).abs();
            worst_gap = worst_gap.max(gap);
            assert!(
                gap <= PREC,
                "dataset {i}: converged but |search - oracle| = {gap} > {PREC}"
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(
        converged * 100 >= DATASETS * 99,
        "only {converged}/{DATASETS} runs converged"
    );
    assert!(
        elapsed.as_secs_f64() <= 60.0,
        "criterion took {:.1} s, budget is 60 s",
        elapsed.as_secs_f64()
    );
    println!(
        "[PASS] criterion 1: oracle equivalence on {DATASETS} datasets, {converged} converged, \
         worst gap {worst_gap:.2e}, {:.1} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_2_point_range_reduction() {
    // Dyadic resolutions keep every duration sum exactly representable, so
    // counting segments and weighting durations must agree bit for bit.
    let dyadic = [1.0 / 64.0, 1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0];
    let mut worst = 0.0f64;
    for i in 0..50usize {
        let resolution = dyadic[i % dyadic.len()];
        let spec = SynthSpec {
            seed: 2000 + i as u64,
            n_trials: 20 + 2 * i,
            hypothesis_resolution: resolution,
            score_model: ScoreModel {
                separation: 0.5 + 0.03 * i as f64,
                noise_sd: 1.0,
            },
            ..SynthSpec::default()
        };
        let trials = generate(&spec).expect("valid spec");
        let (labels, scores) = pool_segments(&trials, resolution, LabelRule::AnySpoof).unwrap();
        let point = point_eer(&labels, &scores).unwrap();
        let oracle = brute_force_range_eer(&trials).unwrap();
        let gap = (point.eer - oracle.eer).abs();
        worst = worst.max(gap);
        assert!(gap <= 1e-12, "dataset {i}: |point - range| = {gap}");
    }
    println!(
        "[PASS] criterion 2: point/range reduction on 50 grid-aligned datasets, worst gap {worst:.2e}"
    );
}

#[test]
fn criterion_3_monotonicity_suite() {
    for i in 0..100usize {
        let resolution = RESOLUTIONS_MS[i % RESOLUTIONS_MS.len()];
        let trials = small_dataset(3000 + i as u64, resolution);
        let (labels, scores) = pool_segments(&trials, resolution, LabelRule::AnySpoof).unwrap();

        // Endpoint exactness in both modes.
        for (tau, fp, fnr) in [(f64::NEG_INFINITY, 0.0, 1.0), (f64::INFINITY, 1.0, 0.0)] {
            let r = range_rates(&trials, tau).unwrap();
            assert_eq!((r.p_fp, r.p_fn), (fp, fnr), "range endpoint at {tau}");
            let p = point_rates(&labels, &scores, tau).unwrap();
            assert_eq!((p.p_fp, p.p_fn), (fp, fnr), "point endpoint at {tau}");
        }

        // 50 thresholds spread over the score range, sorted ascending.
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        let lo = sorted[0] - 0.5;
        let hi = sorted[sorted.len() - 1] + 0.5;
        let taus: Vec<f64> = (0..50).map(|k| lo + (hi - lo) * k as f64 / 49.0).collect();

        let mut last_range = range_rates(&trials, f64::NEG_INFINITY).unwrap();
        let mut last_point = point_rates(&labels, &scores, f64::NEG_INFINITY).unwrap();
        for &tau in &taus {
            let r = range_rates(&trials, tau).unwrap();
            assert!(r.p_fp >= last_range.p_fp, "dataset {i}: range p_fp fell at {tau}");
            assert!(r.p_fn <= last_range.p_fn, "dataset {i}: range p_fn rose at {tau}");
            last_range = r;
            let p = point_rates(&labels, &scores, tau).unwrap();
            assert!(p.p_fp >= last_point.p_fp, "dataset {i}: point p_fp fell at {tau}");
            assert!(p.p_fn <= last_point.p_fn, "dataset {i}: point p_fn rose at {tau}");
            last_point = p;
        }
    }
    println!("[PASS] criterion 3: rates monotone over 100 datasets x 50 thresholds, endpoints exact");
}

#[test]
fn criterion_4_crossing_theorem() {
    const DATASETS: usize = 200;
    for i in 0..DATASETS {
        let trials = oracle_family_dataset(i);
        let oracle = brute_force_range_eer(&trials).expect("oracle runs");
        let sweep = det_sweep(&trials, EvalMode::Range, 201).expect("sweep runs");
        let at_threshold = oracle.rates_at_threshold;
        for point in sweep {
            if point.tau == oracle.threshold
                || (point.p_fp == at_threshold.p_fp && point.p_fn == at_threshold.p_fn)
            {
                // Same plateau as the operating point: carries no sign
                // information about either side of the crossing.
                continue;
            }
            let gap = point.p_fp - point.p_fn;
            if point.tau < oracle.threshold {
                assert!(
                    gap <= 1e-12,
                    "dataset {i}: gap {gap} > 0 at tau {} below the threshold",
                    point.tau
                );
            } else {
                assert!(
                    gap >= -1e-12,
                    "dataset {i}: gap {gap} < 0 at tau {} above the threshold",
                    point.tau
                );
            }
        }
    }
    println!(
        "[PASS] criterion 4: rate-gap sign fixed on both sides of the oracle threshold \
         ({DATASETS} datasets)"
    );
}

type Transform = (&'static str, fn(f64) -> f64);

#[test]
fn criterion_5_monotone_transform_invariance() {
    let transforms: [Transform; 2] = [("2x+1", |x| 2.0 * x + 1.0), ("tanh", f64::tanh)];
    let mut worst = 0.0f64;
    for i in 0..20usize {
        let resolution = RESOLUTIONS_MS[i % RESOLUTIONS_MS.len()];
        let trials = small_dataset(5000 + i as u64, resolution);
        let (labels, scores) = pool_segments(&trials, resolution, LabelRule::AnySpoof).unwrap();
        let base_point = point_eer(&labels, &scores).unwrap().eer;
        let base_range = brute_force_range_eer(&trials).unwrap().eer;

        for (name, transform) in transforms {
            let mapped_trials: Vec<Trial> = trials
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    if let ScoreTrack::Uniform { scores, .. } = &mut t.hypothesis {
                        for s in scores.iter_mut() {
                            *s = transform(*s);
                        }
                    }
                    t
                })
                .collect();
            let mapped_scores: Vec<f64> = scores.iter().map(|s| transform(*s)).collect();

            let point = point_eer(&labels, &mapped_scores).unwrap().eer;
            let range = brute_force_range_eer(&mapped_trials).unwrap().eer;
            let gap = (point - base_point).abs().max((range - base_range).abs());
            worst = worst.max(gap);
            assert!(gap <= 1e-12, "dataset {i}: transform {name} moved EER by {gap}");
        }
    }
    println!("[PASS] criterion 5: EER invariant under 2x+1 and tanh, worst drift {worst:.2e}");
}

#[test]
fn criterion_6_resampling_identities() {
    let mut rng = ChaCha12Rng::seed_from_u64(6000);
    for case in 0..1000usize {
        let k = rng.random_range(1..=8usize);
        let len = rng.random_range(1..=400usize);
        let coarse = [0.04, 0.08, 0.16, 0.32, 0.64][case % 5];
        let fine = coarse / k as f64;
        let scores: Vec<f64> = (0..len).map(|_| rng.random_range(-5.0..5.0)).collect();
        let track = ScoreTrack::uniform(coarse, scores.clone());

        // Up then down is the identity, exactly.
        let up = upsample(&track, &ResampleSpec::new(coarse, fine)).unwrap();
        let back = downsample(&up, &ResampleSpec::new(fine, coarse)).unwrap();
        assert_eq!(back, track, "case {case}: round trip changed the track");

        // Down-sampling is the exact elementwise group minimum.
        let down = downsample(&track, &ResampleSpec::new(coarse, coarse * k as f64)).unwrap();
        let got: Vec<f64> = down.scores().collect();
        let expected: Vec<f64> = scores
            .chunks(k)
            .map(|g| g.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        assert_eq!(got, expected, "case {case}: group minima differ");
    }
    println!("[PASS] criterion 6: resampling identities hold exactly on 1000 random tracks");
}

#[test]
fn criterion_7_resolution_mismatch_pattern() {
    // Train-free proxy for the resolution study: plant errors only at class
    // boundaries, then measure point-based EER at 1x, 2x, 4x, 8x the score
    // resolution. Coarser references absorb the boundary neighborhood into
    // the segment that already counts as spoof, so the measured error must
    // not grow; the range-based EER has no resolution to vary.
    let d = 0.02;
    let mut monotone_runs = 0usize;
    const RUNS: usize = 100;
    for run in 0..RUNS {
        let spec = SynthSpec {
            seed: 7000 + run as u64,
            n_trials: 60,
            utterance_seconds: (4.0, 8.0),
            mean_range_seconds: 0.8,
            spoof_fraction: 0.5,
            score_model: ScoreModel {
                separation: 4.0,
                noise_sd: 0.5,
            },
            hypothesis_resolution: d,
        };
        let mut trials = generate(&spec).expect("valid spec");
        flip_boundary_scores(&mut trials, d);

        let mut eers = Vec::new();
        for factor in [1usize, 2, 4, 8] {
            let coarse = d * factor as f64;
            let coarse_trials: Vec<Trial> = trials
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t.hypothesis = downsample(&t.hypothesis, &ResampleSpec::new(d, coarse)).unwrap();
                    t
                })
                .collect();
            let (labels, scores) =
                pool_segments(&coarse_trials, coarse, LabelRule::AnySpoof).unwrap();
            eers.push(point_eer(&labels, &scores).unwrap().eer);
        }

        // Range-based measurement has no resolution parameter; representing
        // the same track as explicit ranges cannot move it.
        let range_eer = brute_force_range_eer(&trials).unwrap().eer;
        let ranged: Vec<Trial> = trials
            .iter()
            .map(|t| {
                let mut t = t.clone();
                t.hypothesis = ScoreTrack::Ranged {
                    ranges: t.hypothesis.iter_ranges().collect(),
                };
                t
            })
            .collect();
        assert_eq!(brute_force_range_eer(&ranged).unwrap().eer, range_eer);

        if eers.windows(2).all(|w| w[1] <= w[0]) {
            monotone_runs += 1;
        }
    }
    assert!(
        monotone_runs * 100 >= RUNS * 95,
        "only {monotone_runs}/{RUNS} runs were monotone"
    );
    println!(
        "[PASS] criterion 7: point EER non-increasing with coarser measurement in \
         {monotone_runs}/{RUNS} runs; range EER resolution-free by construction"
    );
}

#[test]
fn criterion_8_convergence_cost() {
    // One dataset with a pooled score list of one million entries.
    let spec = SynthSpec {
        seed: 8000,
        n_trials: 250,
        utterance_seconds: (78.0, 82.0),
        mean_range_seconds: 2.0,
        spoof_fraction: 0.5,
        score_model: ScoreModel {
            separation: 1.0,
            noise_sd: 1.0,
        },
        hypothesis_resolution: 0.02,
    };
    let trials = generate(&spec).expect("valid spec");
    let pooled: usize = trials.iter().map(|t| t.hypothesis.len()).sum();
    assert!(pooled >= 1_000_000, "pooled only {pooled} scores");

    let start = Instant::now();
    let search = range_eer_binary_search(&trials, &SearchConfig::default()).unwrap();
    let elapsed = start.elapsed();

    // Rate evaluations: two at initialization (left edge and midpoint), one
    // per loop iteration, and the final canonical evaluation of the result.
    let rate_evaluations = search.iterations + 3;
    assert!(
        rate_evaluations <= 40,
        "search used {rate_evaluations} rate evaluations"
    );
    assert!(
        elapsed.as_secs_f64() <= 5.0,
        "search took {:.2} s, budget is 5 s",
        elapsed.as_secs_f64()
    );

    // The exhaustive oracle completes on the same data.
    let oracle = brute_force_range_eer(&trials).unwrap();
    assert!(oracle.eer.is_finite());
    if search.converged {
        assert!((search.eer - oracle.eer).abs() <= PREC);
    }
    println!(
        "[PASS] criterion 8: {pooled} pooled scores, {rate_evaluations} rate evaluations, \
         search {:.2} s, converged={}",
        elapsed.as_secs_f64(),
        search.converged
    );
}

#[test]
fn criterion_9_deterministic_reports() {
    let fixture = |name: &str| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(name)
    };
    let tmp = |name: &str| {
        std::env::temp_dir().join(format!("rangeer-acceptance-{}-{name}", std::process::id()))
    };
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_rangeer"))
            .args(args)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };

    // Fixture set: the bundled demo trial plus a generated 60-trial dataset.
    let ref_path = tmp("det.ref.tsv");
    let score_path = tmp("det.scores.tsv");
    run(&[
        "synth",
        "--seed",
        "9000",
        "--n-trials",
        "60",
        "--out-ref",
        ref_path.to_str().unwrap(),
        "--out-scores",
        score_path.to_str().unwrap(),
    ]);

    let jobs: Vec<Vec<String>> = vec![
        vec![
            "eval".into(),
            fixture("demo.ref.tsv").display().to_string(),
            fixture("demo.scores.tsv").display().to_string(),
            "--mode".into(),
            "range".into(),
            "--oracle".into(),
        ],
        vec![
            "eval".into(),
            ref_path.display().to_string(),
            score_path.display().to_string(),
            "--mode".into(),
            "range".into(),
        ],
        vec![
            "eval".into(),
            ref_path.display().to_string(),
            score_path.display().to_string(),
            "--mode".into(),
            "point".into(),
            "--resolution".into(),
            "0.02".into(),
        ],
    ];

    for job in &jobs {
        let args: Vec<&str> = job.iter().map(String::as_str).collect();
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first, second, "repeated runs differ for {args:?}");

        let with_workers = |n: &str| {
            let mut extended = args.clone();
            extended.extend(["--workers", n]);
            String::from_utf8(run(&extended)).unwrap()
        };
        // The worker count is echoed in the report config; everything else
        // must match byte for byte.
        let one = with_workers("1").replace("\"workers\":1", "\"workers\":N");
        let eight = with_workers("8").replace("\"workers\":8", "\"workers\":N");
        assert_eq!(one, eight, "worker counts changed the report for {args:?}");
    }

    std::fs::remove_file(&ref_path).ok();
    std::fs::remove_file(&score_path).ok();
    println!("[PASS] criterion 9: reports byte-identical across runs and worker counts");
}
