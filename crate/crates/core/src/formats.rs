//! TSV file formats for references and score dumps, and assembly of the two
//! into trials.
//!
//! Reference files carry one labeled range per row:
//!
//! ```text
//! trial_id<TAB>start_seconds<TAB>end_seconds<TAB>label     # label: bonafide | spoof
//! ```
//!
//! Score files are either ranged, one scored range per row:
//!
//! ```text
//! trial_id<TAB>start_seconds<TAB>end_seconds<TAB>score
//! ```
//!
//! or uniform, one row per trial:
//!
//! ```text
//! trial_id<TAB>resolution_seconds<TAB>score score score ...
//! ```
//!
//! Lines starting with `#` and blank lines are skipped. Times are decimal
//! seconds and are parsed exactly as written, never rounded. Higher scores
//! mean more likely bona fide.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::timeline::{Label, LabeledRange, ScoredRange, ScoreTrack, Trial};

/// Parsed reference annotations, trials in first-appearance order, ranges
/// sorted by start.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFile {
    pub trials: Vec<(String, Vec<LabeledRange>)>,
}

/// Parsed score tracks, trials in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFile {
    pub tracks: Vec<(String, ScoreTrack)>,
}

fn parse_err(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_finite(field: &str, what: &str, file: &str, line: usize) -> Result<f64> {
    let value: f64 = field
        .parse()
        .map_err(|_| parse_err(file, line, format!("cannot parse {what} from {field:?}")))?;
    if !value.is_finite() {
        return Err(parse_err(file, line, format!("{what} {field:?} is not finite")));
    }
    Ok(value)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

impl ReferenceFile {
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut by_id: HashMap<String, usize> = HashMap::new();
        let mut trials: Vec<(String, Vec<LabeledRange>)> = Vec::new();
        for (line_no, line) in data_lines(text) {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(parse_err(
                    file,
                    line_no,
                    format!("expected 4 tab-separated fields, got {}", fields.len()),
                ));
            }
            let start = parse_finite(fields[1], "start", file, line_no)?;
            let end = parse_finite(fields[2], "end", file, line_no)?;
            let label = match fields[3] {
                "bonafide" => Label::BonaFide,
                "spoof" => Label::Spoof,
                other => {
                    return Err(parse_err(
                        file,
                        line_no,
                        format!("unknown label {other:?}, expected bonafide or spoof"),
                    ))
                }
            };
            let id = fields[0].to_string();
            let idx = *by_id.entry(id.clone()).or_insert_with(|| {
                trials.push((id, Vec::new()));
                trials.len() - 1
            });
            trials[idx].1.push(LabeledRange::new(start, end, label));
        }

        for (_, ranges) in trials.iter_mut() {
            ranges.sort_by(|a, b| a.start.total_cmp(&b.start));
        }
        Ok(ReferenceFile { trials })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, ranges) in &self.trials {
            for r in ranges {
                out.push_str(&format!("{id}\t{}\t{}\t{}\n", r.start, r.end, r.label));
            }
        }
        out
    }
}

impl ScoreFile {
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        enum Kind {
            Uniform,
            Ranged,
        }
        let mut kind: Option<Kind> = None;

        let mut by_id: HashMap<String, usize> = HashMap::new();
        let mut uniform: Vec<(String, f64, Vec<f64>)> = Vec::new();
        let mut ranged: Vec<(String, Vec<ScoredRange>)> = Vec::new();

        for (line_no, line) in data_lines(text) {
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.len() {
                3 => {
                    if matches!(kind, Some(Kind::Ranged)) {
                        return Err(parse_err(file, line_no, "uniform row in a ranged score file"));
                    }
                    kind = Some(Kind::Uniform);
                    let id = fields[0].to_string();
                    if by_id.contains_key(&id) {
                        return Err(parse_err(
                            file,
                            line_no,
                            format!("duplicate uniform score row for trial {id}"),
                        ));
                    }
                    let resolution = parse_finite(fields[1], "resolution", file, line_no)?;
                    if resolution <= 0.0 {
                        return Err(parse_err(file, line_no, "resolution must be positive"));
                    }
                    let mut scores = Vec::new();
                    for token in fields[2].split_whitespace() {
                        scores.push(parse_finite(token, "score", file, line_no)?);
                    }
                    if scores.is_empty() {
                        return Err(parse_err(file, line_no, "uniform row carries no scores"));
                    }
                    by_id.insert(id.clone(), uniform.len());
                    uniform.push((id, resolution, scores));
                }
                4 => {
                    if matches!(kind, Some(Kind::Uniform)) {
                        return Err(parse_err(file, line_no, "ranged row in a uniform score file"));
                    }
                    kind = Some(Kind::Ranged);
                    let id = fields[0].to_string();
                    let start = parse_finite(fields[1], "start", file, line_no)?;
                    let end = parse_finite(fields[2], "end", file, line_no)?;
                    let score = parse_finite(fields[3], "score", file, line_no)?;
                    let idx = *by_id.entry(id.clone()).or_insert_with(|| {
                        ranged.push((id, Vec::new()));
                        ranged.len() - 1
                    });
                    ranged[idx].1.push(ScoredRange { start, end, score });
                }
                n => {
                    return Err(parse_err(
                        file,
                        line_no,
                        format!("expected 3 (uniform) or 4 (ranged) tab-separated fields, got {n}"),
                    ))
                }
            }
        }

        let tracks = match kind {
            None => Vec::new(),
            Some(Kind::Uniform) => uniform
                .into_iter()
                .map(|(id, resolution, scores)| (id, ScoreTrack::Uniform { resolution, scores }))
                .collect(),
            Some(Kind::Ranged) => ranged
                .into_iter()
                .map(|(id, mut ranges)| {
                    ranges.sort_by(|a, b| a.start.total_cmp(&b.start));
                    (id, ScoreTrack::Ranged { ranges })
                })
                .collect(),
        };
        Ok(ScoreFile { tracks })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (id, track) in &self.tracks {
            match track {
                ScoreTrack::Uniform { resolution, scores } => {
                    let joined = scores
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    out.push_str(&format!("{id}\t{resolution}\t{joined}\n"));
                }
                ScoreTrack::Ranged { ranges } => {
                    for r in ranges {
                        out.push_str(&format!("{id}\t{}\t{}\t{}\n", r.start, r.end, r.score));
                    }
                }
            }
        }
        out
    }
}

/// Serialize a dataset into the reference and uniform-score file pair.
pub fn dataset_to_files(trials: &[Trial]) -> (ReferenceFile, ScoreFile) {
    let reference = ReferenceFile {
        trials: trials
            .iter()
            .map(|t| (t.trial_id.clone(), t.reference.clone()))
            .collect(),
    };
    let scores = ScoreFile {
        tracks: trials
            .iter()
            .map(|t| (t.trial_id.clone(), t.hypothesis.clone()))
            .collect(),
    };
    (reference, scores)
}

/// Join parsed reference and score files into trials, in reference-file
/// order. Every trial must appear in both files; anything unmatched is a
/// hard error because silently dropping trials changes the duration totals.
pub fn assemble_trials(reference: &ReferenceFile, scores: &ScoreFile) -> Result<Vec<Trial>> {
    let mut track_by_id: HashMap<&str, &ScoreTrack> = HashMap::new();
    for (id, track) in &scores.tracks {
        track_by_id.insert(id.as_str(), track);
    }

    let mut trials = Vec::with_capacity(reference.trials.len());
    for (id, ranges) in &reference.trials {
        let track = track_by_id.remove(id.as_str()).ok_or_else(|| Error::TrialMismatch {
            trial_id: id.clone(),
            detail: "present in the reference file but missing from the score file".into(),
        })?;
        trials.push(Trial::new(id.clone(), ranges.clone(), track.clone()));
    }
    if let Some((id, _)) = track_by_id.into_iter().next() {
        return Err(Error::TrialMismatch {
            trial_id: id.to_string(),
            detail: "present in the score file but missing from the reference file".into(),
        });
    }
    Ok(trials)
}

#[cfg(test)]
mod tests {
    use super::*;

    const REF: &str = "# demo reference\n\
                       demo-0001\t0\t2\tbonafide\n\
                       demo-0001\t2\t5\tspoof\n";
    const UNIFORM: &str = "demo-0001\t1\t0.9 0.4 0.3 0.8 0.2\n";
    const RANGED: &str = "demo-0001\t0\t2\t0.9\ndemo-0001\t2\t5\t0.3\n";

    #[test]
    fn parse_reference_sorts_and_orders() {
        let parsed = ReferenceFile::parse(REF, "ref.tsv").unwrap();
        assert_eq!(parsed.trials.len(), 1);
        let (id, ranges) = &parsed.trials[0];
        assert_eq!(id, "demo-0001");
        assert_eq!(ranges.len(), 2);
        assert_eq!(ranges[0].label, Label::BonaFide);
        assert_eq!(ranges[1].end, 5.0);
    }

    #[test]
    fn parse_uniform_scores() {
        let parsed = ScoreFile::parse(UNIFORM, "scores.tsv").unwrap();
        let (_, track) = &parsed.tracks[0];
        assert_eq!(track.len(), 5);
        assert_eq!(track.end(), 5.0);
    }

    #[test]
    fn parse_ranged_scores() {
        let parsed = ScoreFile::parse(RANGED, "scores.tsv").unwrap();
        let (_, track) = &parsed.tracks[0];
        assert!(matches!(track, ScoreTrack::Ranged { .. }));
        assert_eq!(track.len(), 2);
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let text = format!("{UNIFORM}{RANGED}");
        let err = ScoreFile::parse(&text, "scores.tsv").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn parse_errors_carry_file_and_line() {
        let err = ReferenceFile::parse("demo\t0\t1\tgenuine\n", "ref.tsv").unwrap_err();
        match err {
            Error::Parse { file, line, .. } => {
                assert_eq!(file, "ref.tsv");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_finite_scores_are_rejected() {
        assert!(ScoreFile::parse("t\t1\t0.5 NaN\n", "s.tsv").is_err());
        assert!(ScoreFile::parse("t\t1\t0.5 inf\n", "s.tsv").is_err());
    }

    #[test]
    fn roundtrip_is_identity() {
        let reference = ReferenceFile::parse(REF, "ref.tsv").unwrap();
        assert_eq!(
            ReferenceFile::parse(&reference.to_tsv(), "ref.tsv").unwrap(),
            reference
        );
        for text in [UNIFORM, RANGED] {
            let scores = ScoreFile::parse(text, "s.tsv").unwrap();
            assert_eq!(ScoreFile::parse(&scores.to_tsv(), "s.tsv").unwrap(), scores);
        }
    }

    #[test]
    fn assemble_matches_by_id() {
        let reference = ReferenceFile::parse(REF, "ref.tsv").unwrap();
        let scores = ScoreFile::parse(UNIFORM, "s.tsv").unwrap();
        let trials = assemble_trials(&reference, &scores).unwrap();
        assert_eq!(trials.len(), 1);
        assert_eq!(trials[0].trial_id, "demo-0001");
    }

    #[test]
    fn assemble_rejects_missing_scores() {
        let reference = ReferenceFile::parse(REF, "ref.tsv").unwrap();
        let scores = ScoreFile::parse("other\t1\t0.5\n", "s.tsv").unwrap();
        assert!(matches!(
            assemble_trials(&reference, &scores),
            Err(Error::TrialMismatch { .. })
        ));
    }

    #[test]
    fn assemble_rejects_extra_scores() {
        let reference = ReferenceFile::parse(REF, "ref.tsv").unwrap();
        let text = format!("{UNIFORM}extra\t1\t0.5\n");
        let scores = ScoreFile::parse(&text, "s.tsv").unwrap();
        assert!(matches!(
            assemble_trials(&reference, &scores),
            Err(Error::TrialMismatch { .. })
        ));
    }
}
