//! `rangeer`: evaluate spoof-localization score dumps against reference
//! timelines.
//!
//! Subcommands: `eval` (EER report as JSON), `det` (threshold sweep as TSV),
//! `resample` (convert uniform score files between resolutions), and `synth`
//! (generate a deterministic synthetic dataset).
//!
//! Exit codes: 2 parse/invalid input, 3 trial-id mismatch between files,
//! 4 single-class reference, 5 non-integer resolution ratio, 1 anything
//! else.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rangeer::eer::{
    brute_force_range_eer_with_workers, det_sweep, point_eer, range_eer_binary_search_with_workers,
    EerResult, EvalMode, QuantileMode, SearchConfig,
};
use rangeer::formats::{assemble_trials, dataset_to_files, ReferenceFile, ScoreFile};
use rangeer::metrics::pool_segments;
use rangeer::report::{OracleCheck, ReportConfig, ResultReport};
use rangeer::resample::{downsample, upsample, ResampleSpec};
use rangeer::synth::{generate, ScoreModel, SynthSpec};
use rangeer::timeline::duration_totals;
use rangeer::{Error, LabelRule, ScoreTrack, Trial};

#[derive(Parser)]
#[command(name = "rangeer", version, about = "Point- and range-based EER for spoof localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate scores against a reference and print a JSON EER report
    Eval(EvalArgs),
    /// Print a (tau, p_fp, p_fn) threshold sweep as TSV
    Det(DetArgs),
    /// Convert a uniform score file to another resolution (TSV on stdout)
    Resample(ResampleArgs),
    /// Generate a synthetic dataset and write reference/score files
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Point,
    Range,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LabelRuleArg {
    AnySpoof,
    Majority,
}

impl From<LabelRuleArg> for LabelRule {
    fn from(value: LabelRuleArg) -> Self {
        match value {
            LabelRuleArg::AnySpoof => LabelRule::AnySpoof,
            LabelRuleArg::Majority => LabelRule::MajorityDuration,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuantileArg {
    Real,
    Integer,
}

impl From<QuantileArg> for QuantileMode {
    fn from(value: QuantileArg) -> Self {
        match value {
            QuantileArg::Real => QuantileMode::RealValued,
            QuantileArg::Integer => QuantileMode::IntegerFloor,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Reference TSV: `trial_id<TAB>start<TAB>end<TAB>label`
    ref_path: PathBuf,
    /// Score TSV, ranged or uniform
    score_path: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Range)]
    mode: ModeArg,
    /// Segment resolution in seconds; required in point mode
    #[arg(long)]
    resolution: Option<f64>,
    /// How segments overlapping both classes are labeled (point mode)
    #[arg(long, value_enum, default_value_t = LabelRuleArg::AnySpoof)]
    label_rule: LabelRuleArg,
    /// Convergence precision of the binary search
    #[arg(long, default_value_t = 1e-5)]
    prec: f64,
    /// Iteration cap of the binary search
    #[arg(long = "max-iter", default_value_t = 200)]
    max_iter: u32,
    /// Quantile midpoint arithmetic of the binary search
    #[arg(long, value_enum, default_value_t = QuantileArg::Real)]
    quantile_mode: QuantileArg,
    /// Cross-check the range-based search against the exhaustive sweep
    #[arg(long)]
    oracle: bool,
    /// Worker threads for per-trial sums (output is identical for any count)
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct DetArgs {
    ref_path: PathBuf,
    score_path: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Range)]
    mode: ModeArg,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long, value_enum, default_value_t = LabelRuleArg::AnySpoof)]
    label_rule: LabelRuleArg,
    /// Number of sweep points, including the two infinite endpoints
    #[arg(long, default_value_t = 100)]
    points: usize,
}

#[derive(Args)]
struct ResampleArgs {
    /// Uniform score TSV
    score_path: PathBuf,
    /// Resolution of the input file, seconds
    #[arg(long)]
    from: f64,
    /// Resolution to convert to, seconds
    #[arg(long)]
    to: f64,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "n-trials", default_value_t = 100)]
    n_trials: usize,
    #[arg(long = "utt-min", default_value_t = 2.0)]
    utt_min: f64,
    #[arg(long = "utt-max", default_value_t = 8.0)]
    utt_max: f64,
    /// Mean labeled-range length in seconds
    #[arg(long = "mean-range", default_value_t = 2.0)]
    mean_range: f64,
    #[arg(long = "spoof-fraction", default_value_t = 0.5)]
    spoof_fraction: f64,
    /// Gap between the class-conditional score means
    #[arg(long, default_value_t = 2.0)]
    separation: f64,
    #[arg(long = "noise-sd", default_value_t = 1.0)]
    noise_sd: f64,
    /// Uniform hypothesis resolution in seconds
    #[arg(long, default_value_t = 0.02)]
    resolution: f64,
    #[arg(long = "out-ref")]
    out_ref: PathBuf,
    #[arg(long = "out-scores")]
    out_scores: PathBuf,
}

#[derive(Serialize)]
struct SynthSummary {
    trial_count: usize,
    d_negative: f64,
    d_positive: f64,
    realized_spoof_fraction: f64,
    seed: u64,
    resolution: f64,
    out_ref: String,
    out_scores: String,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::InvalidTrial { .. }
        | Error::InvalidSpec(_)
        | Error::LengthMismatch { .. }
        | Error::ResolutionMismatch { .. } => 2,
        Error::TrialMismatch { .. } => 3,
        Error::EmptyClass { .. } => 4,
        Error::NonIntegerRatio { .. } => 5,
        Error::EmptyInput | Error::QuantileDomain(_) => 1,
    }
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse {
        file: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}

fn load_trials(ref_path: &Path, score_path: &Path) -> Result<Vec<Trial>, Error> {
    let reference = ReferenceFile::parse(&read_file(ref_path)?, &ref_path.display().to_string())?;
    let scores = ScoreFile::parse(&read_file(score_path)?, &score_path.display().to_string())?;
    assemble_trials(&reference, &scores)
}

fn require_resolution(resolution: Option<f64>) -> Result<f64, Error> {
    resolution.ok_or_else(|| Error::InvalidSpec("point mode requires --resolution".into()))
}

fn quantile_mode_name(mode: QuantileMode) -> &'static str {
    match mode {
        QuantileMode::RealValued => "real-valued",
        QuantileMode::IntegerFloor => "integer-floor",
    }
}

fn label_rule_name(rule: LabelRule) -> &'static str {
    match rule {
        LabelRule::AnySpoof => "any-spoof",
        LabelRule::MajorityDuration => "majority",
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Error> {
    let trials = load_trials(&args.ref_path, &args.score_path)?;
    let config = SearchConfig {
        prec: args.prec,
        max_iterations: args.max_iter,
        quantile_mode: args.quantile_mode.into(),
    };

    let (mode_name, result, resolution, rule): (&str, EerResult, Option<f64>, Option<LabelRule>) =
        match args.mode {
            ModeArg::Range => {
                let result = range_eer_binary_search_with_workers(&trials, &config, args.workers)?;
                ("range", result, None, None)
            }
            ModeArg::Point => {
                let resolution = require_resolution(args.resolution)?;
                let rule: LabelRule = args.label_rule.into();
                let (labels, scores) = pool_segments(&trials, resolution, rule)?;
                let result = point_eer(&labels, &scores)?;
                ("point", result, Some(resolution), Some(rule))
            }
        };

    let oracle = if args.oracle {
        if args.mode == ModeArg::Range {
            let exact = brute_force_range_eer_with_workers(&trials, args.workers)?;
            Some(OracleCheck {
                eer: exact.eer,
                threshold: exact.threshold,
                abs_difference: (exact.eer - result.eer).abs(),
            })
        } else {
            log::warn!("--oracle applies to range mode only; the point sweep is already exact");
            None
        }
    } else {
        None
    };

    let totals = duration_totals(&trials)?;
    let report = ResultReport {
        mode: mode_name.to_string(),
        eer: result.eer,
        threshold: result.threshold,
        p_fp: result.rates_at_threshold.p_fp,
        p_fn: result.rates_at_threshold.p_fn,
        quantile: result.quantile,
        iterations: result.iterations,
        converged: result.converged,
        d_negative: totals.d_negative,
        d_positive: totals.d_positive,
        trial_count: trials.len(),
        config: ReportConfig {
            prec: args.prec,
            max_iterations: args.max_iter,
            quantile_mode: quantile_mode_name(config.quantile_mode).to_string(),
            resolution,
            label_rule: rule.map(|r| label_rule_name(r).to_string()),
            workers: args.workers,
        },
        oracle,
    };
    println!("{}", report.to_json());
    Ok(())
}

fn cmd_det(args: &DetArgs) -> Result<(), Error> {
    let trials = load_trials(&args.ref_path, &args.score_path)?;
    let mode = match args.mode {
        ModeArg::Range => EvalMode::Range,
        ModeArg::Point => EvalMode::Point {
            resolution: require_resolution(args.resolution)?,
            rule: args.label_rule.into(),
        },
    };
    let rates = det_sweep(&trials, mode, args.points)?;
    let mut out = String::from("tau\tp_fp\tp_fn\n");
    for r in rates {
        out.push_str(&format!("{}\t{}\t{}\n", r.tau, r.p_fp, r.p_fn));
    }
    print!("{out}");
    Ok(())
}

fn cmd_resample(args: &ResampleArgs) -> Result<(), Error> {
    let path = args.score_path.display().to_string();
    let scores = ScoreFile::parse(&read_file(&args.score_path)?, &path)?;
    let spec = ResampleSpec::new(args.from, args.to);

    let mut tracks = Vec::with_capacity(scores.tracks.len());
    for (id, track) in &scores.tracks {
        match track {
            ScoreTrack::Uniform { resolution, .. } if *resolution == args.from => {}
            ScoreTrack::Uniform { resolution, .. } => {
                return Err(Error::Parse {
                    file: path,
                    line: 0,
                    message: format!(
                        "trial {id} has resolution {resolution}, but --from is {}",
                        args.from
                    ),
                });
            }
            ScoreTrack::Ranged { .. } => {
                return Err(Error::Parse {
                    file: path,
                    line: 0,
                    message: "resample needs a uniform score file".into(),
                });
            }
        }
        let converted = if args.from >= args.to {
            upsample(track, &spec)?
        } else {
            downsample(track, &spec)?
        };
        tracks.push((id.clone(), converted));
    }

    print!("{}", ScoreFile { tracks }.to_tsv());
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<(), Error> {
    let spec = SynthSpec {
        seed: args.seed,
        n_trials: args.n_trials,
        utterance_seconds: (args.utt_min, args.utt_max),
        mean_range_seconds: args.mean_range,
        spoof_fraction: args.spoof_fraction,
        score_model: ScoreModel {
            separation: args.separation,
            noise_sd: args.noise_sd,
        },
        hypothesis_resolution: args.resolution,
    };
    let trials = generate(&spec)?;
    let (reference, scores) = dataset_to_files(&trials);

    let write = |path: &Path, text: String| {
        fs::write(path, text).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })
    };
    write(&args.out_ref, reference.to_tsv())?;
    write(&args.out_scores, scores.to_tsv())?;

    let totals = duration_totals(&trials)?;
    let summary = SynthSummary {
        trial_count: trials.len(),
        d_negative: totals.d_negative,
        d_positive: totals.d_positive,
        realized_spoof_fraction: totals.d_positive / (totals.d_positive + totals.d_negative),
        seed: args.seed,
        resolution: args.resolution,
        out_ref: args.out_ref.display().to_string(),
        out_scores: args.out_scores.display().to_string(),
    };
    println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Det(args) => cmd_det(args),
        Command::Resample(args) => cmd_resample(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
