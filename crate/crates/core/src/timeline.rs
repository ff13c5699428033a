//! Domain types for partially spoofed audio timelines: labeled time ranges,
//! score tracks, trial validation, duration totals, and reference
//! pre-segmentation.
//!
//! All intervals are half-open `[start, end)` in seconds, so adjacent ranges
//! partition time exactly and a shared boundary contributes zero overlap.
//! Boundary comparisons are exact f64 equality; nothing in this module
//! rounds or snaps times.

use std::fmt;

use crate::error::{Error, Result};

/// Segment class. Spoof is the positive class, bona fide the negative one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Spoof,
    BonaFide,
}

impl Label {
    /// True for the positive class (spoof).
    pub fn is_positive(self) -> bool {
        matches!(self, Label::Spoof)
    }

    pub fn opposite(self) -> Label {
        match self {
            Label::Spoof => Label::BonaFide,
            Label::BonaFide => Label::Spoof,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Spoof => write!(f, "spoof"),
            Label::BonaFide => write!(f, "bonafide"),
        }
    }
}

/// A half-open time interval `[start, end)` with a class label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledRange {
    pub start: f64,
    pub end: f64,
    pub label: Label,
}

impl LabeledRange {
    pub fn new(start: f64, end: f64, label: Label) -> Self {
        Self { start, end, label }
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// A half-open time interval `[start, end)` carrying a hypothesis score.
///
/// Higher scores mean "more likely bona fide"; a low score flags spoof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredRange {
    pub start: f64,
    pub end: f64,
    pub score: f64,
}

/// Per-trial hypothesis scores, either on a uniform grid or as explicit
/// variable-length ranges.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreTrack {
    /// Score `m` covers the implied range `[m*resolution, (m+1)*resolution)`.
    Uniform { resolution: f64, scores: Vec<f64> },
    /// Explicit ranges, non-overlapping and sorted by start.
    Ranged { ranges: Vec<ScoredRange> },
}

impl ScoreTrack {
    pub fn uniform(resolution: f64, scores: Vec<f64>) -> Self {
        ScoreTrack::Uniform { resolution, scores }
    }

    pub fn len(&self) -> usize {
        match self {
            ScoreTrack::Uniform { scores, .. } => scores.len(),
            ScoreTrack::Ranged { ranges } => ranges.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// End of the covered span (start is always 0 for uniform tracks).
    pub fn end(&self) -> f64 {
        match self {
            ScoreTrack::Uniform { resolution, scores } => scores.len() as f64 * resolution,
            ScoreTrack::Ranged { ranges } => ranges.last().map_or(0.0, |r| r.end),
        }
    }

    /// Iterate the track as scored ranges, materializing the implied grid
    /// for uniform tracks.
    pub fn iter_ranges(&self) -> Box<dyn Iterator<Item = ScoredRange> + '_> {
        match self {
            ScoreTrack::Uniform { resolution, scores } => {
                let d = *resolution;
                Box::new(scores.iter().enumerate().map(move |(m, &score)| ScoredRange {
                    start: m as f64 * d,
                    end: (m + 1) as f64 * d,
                    score,
                }))
            }
            ScoreTrack::Ranged { ranges } => Box::new(ranges.iter().copied()),
        }
    }

    pub fn scores(&self) -> Box<dyn Iterator<Item = f64> + '_> {
        match self {
            ScoreTrack::Uniform { scores, .. } => Box::new(scores.iter().copied()),
            ScoreTrack::Ranged { ranges } => Box::new(ranges.iter().map(|r| r.score)),
        }
    }
}

/// One utterance: a reference annotation plus a hypothesis score track.
///
/// A valid reference partitions `[0, total)` with non-overlapping sorted
/// ranges, and the hypothesis covers at least that span.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub trial_id: String,
    pub reference: Vec<LabeledRange>,
    pub hypothesis: ScoreTrack,
}

impl Trial {
    pub fn new(trial_id: impl Into<String>, reference: Vec<LabeledRange>, hypothesis: ScoreTrack) -> Self {
        Self {
            trial_id: trial_id.into(),
            reference,
            hypothesis,
        }
    }

    /// End of the reference span; 0 for an empty reference.
    pub fn span_end(&self) -> f64 {
        self.reference.last().map_or(0.0, |r| r.end)
    }
}

/// Total bona fide (negative) and spoof (positive) reference duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationTotals {
    pub d_negative: f64,
    pub d_positive: f64,
}

/// Point-based reference: one label per uniform segment of `resolution`
/// seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentLabels {
    pub resolution: f64,
    pub labels: Vec<Label>,
}

impl SegmentLabels {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// How a uniform segment overlapping both classes receives its single label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelRule {
    /// Spoof if the segment contains any spoof duration at all.
    #[default]
    AnySpoof,
    /// The class with the larger overlap wins; ties go to spoof.
    MajorityDuration,
}

impl LabelRule {
    fn decide(self, bona_overlap: f64, spoof_overlap: f64) -> Label {
        match self {
            LabelRule::AnySpoof => {
                if spoof_overlap > 0.0 {
                    Label::Spoof
                } else {
                    Label::BonaFide
                }
            }
            LabelRule::MajorityDuration => {
                if spoof_overlap >= bona_overlap {
                    Label::Spoof
                } else {
                    Label::BonaFide
                }
            }
        }
    }
}

/// Overlapped duration of two half-open ranges:
/// `max(0, min(a_end, b_end) - max(a_start, b_start))`.
pub fn overlap_duration(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

/// A single problem found while validating a trial.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyReference,
    NonPositiveRange { start: f64, end: f64 },
    UnsortedReference { index: usize },
    OverlappingReference { index: usize },
    GapInReference { index: usize, from: f64, to: f64 },
    ReferenceStartsAfterZero { start: f64 },
    HypothesisDoesNotCoverSpan { hypothesis_end: f64, span_end: f64 },
    NonPositiveResolution { resolution: f64 },
    MalformedHypothesisRange { index: usize },
    NonFiniteScore { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyReference => write!(f, "empty reference"),
            Violation::NonPositiveRange { start, end } => {
                write!(f, "non-positive range [{start}, {end})")
            }
            Violation::UnsortedReference { index } => {
                write!(f, "reference ranges not sorted by start at index {index}")
            }
            Violation::OverlappingReference { index } => {
                write!(f, "overlapping reference ranges at index {index}")
            }
            Violation::GapInReference { index, from, to } => {
                write!(f, "gap in reference before index {index}: [{from}, {to})")
            }
            Violation::ReferenceStartsAfterZero { start } => {
                write!(f, "reference starts at {start}, expected 0")
            }
            Violation::HypothesisDoesNotCoverSpan {
                hypothesis_end,
                span_end,
            } => write!(
                f,
                "hypothesis ends at {hypothesis_end} but the reference span ends at {span_end}"
            ),
            Violation::NonPositiveResolution { resolution } => {
                write!(f, "non-positive hypothesis resolution {resolution}")
            }
            Violation::MalformedHypothesisRange { index } => {
                write!(f, "malformed hypothesis range at index {index}")
            }
            Violation::NonFiniteScore { index } => {
                write!(f, "non-finite score at index {index}")
            }
        }
    }
}

/// Outcome of [`validate_trial`]: empty means the trial is usable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check a trial against the structural invariants the evaluation operations
/// rely on. Returns every violation found rather than stopping at the first.
pub fn validate_trial(trial: &Trial) -> ValidationReport {
    let mut violations = Vec::new();

    if trial.reference.is_empty() {
        violations.push(Violation::EmptyReference);
    }

    for r in &trial.reference {
        if !r.start.is_finite() || !r.end.is_finite() || r.start >= r.end {
            violations.push(Violation::NonPositiveRange {
                start: r.start,
                end: r.end,
            });
        }
    }

    if let Some(first) = trial.reference.first() {
        if first.start != 0.0 {
            violations.push(Violation::ReferenceStartsAfterZero { start: first.start });
        }
    }

    for i in 1..trial.reference.len() {
        let prev = &trial.reference[i - 1];
        let cur = &trial.reference[i];
        if cur.start < prev.start {
            violations.push(Violation::UnsortedReference { index: i });
        } else if cur.start < prev.end {
            violations.push(Violation::OverlappingReference { index: i });
        } else if cur.start > prev.end {
            violations.push(Violation::GapInReference {
                index: i,
                from: prev.end,
                to: cur.start,
            });
        }
    }

    let span_end = trial.span_end();
    match &trial.hypothesis {
        ScoreTrack::Uniform { resolution, scores } => {
            if !resolution.is_finite() || *resolution <= 0.0 {
                violations.push(Violation::NonPositiveResolution {
                    resolution: *resolution,
                });
            } else {
                let end = scores.len() as f64 * resolution;
                if end < span_end {
                    violations.push(Violation::HypothesisDoesNotCoverSpan {
                        hypothesis_end: end,
                        span_end,
                    });
                }
            }
            for (i, s) in scores.iter().enumerate() {
                if !s.is_finite() {
                    violations.push(Violation::NonFiniteScore { index: i });
                }
            }
        }
        ScoreTrack::Ranged { ranges } => {
            let mut cursor = 0.0;
            for (i, r) in ranges.iter().enumerate() {
                if !r.start.is_finite() || !r.end.is_finite() || r.start >= r.end {
                    violations.push(Violation::MalformedHypothesisRange { index: i });
                } else if r.start != cursor {
                    // Contiguity from 0: a gap in the hypothesis leaves
                    // reference duration unscored.
                    violations.push(Violation::MalformedHypothesisRange { index: i });
                }
                if !r.score.is_finite() {
                    violations.push(Violation::NonFiniteScore { index: i });
                }
                cursor = r.end;
            }
            if cursor < span_end {
                violations.push(Violation::HypothesisDoesNotCoverSpan {
                    hypothesis_end: cursor,
                    span_end,
                });
            }
        }
    }

    ValidationReport { violations }
}

pub(crate) fn require_valid(trial: &Trial) -> Result<()> {
    let report = validate_trial(trial);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidTrial {
            trial_id: trial.trial_id.clone(),
            violation: v.to_string(),
        }),
    }
}

/// Pooled bona fide and spoof reference duration over a whole dataset.
///
/// `D_N` and `D_P` are the global normalizers of the range-based rates, so
/// they are summed trial by trial in input order, ranges in time order.
pub fn duration_totals(trials: &[Trial]) -> Result<DurationTotals> {
    let mut d_negative = 0.0;
    let mut d_positive = 0.0;
    for trial in trials {
        require_valid(trial)?;
        for r in &trial.reference {
            match r.label {
                Label::BonaFide => d_negative += r.duration(),
                Label::Spoof => d_positive += r.duration(),
            }
        }
    }
    if d_negative == 0.0 {
        return Err(Error::EmptyClass { missing: "bona fide" });
    }
    if d_positive == 0.0 {
        return Err(Error::EmptyClass { missing: "spoof" });
    }
    Ok(DurationTotals {
        d_negative,
        d_positive,
    })
}

/// Split a reference into uniform segments of `resolution` seconds and give
/// each exactly one label.
///
/// Segments overlapping both classes are resolved by `rule`; a trailing
/// partial segment is kept and labeled by the same rule over its actual
/// extent. Segment boundaries are computed as `m * resolution` so they match
/// the implied ranges of a uniform score track at the same resolution.
pub fn segment_reference(reference: &[LabeledRange], resolution: f64, rule: LabelRule) -> SegmentLabels {
    assert!(resolution > 0.0, "resolution must be positive");
    assert!(!reference.is_empty(), "reference must be non-empty");

    let total = reference.last().expect("non-empty").end;
    let mut n = (total / resolution).ceil() as usize;
    // Float spill can manufacture an empty trailing segment; drop it.
    while n > 1 && (n as f64 - 1.0) * resolution >= total {
        n -= 1;
    }

    let mut labels = Vec::with_capacity(n);
    let mut ref_idx = 0usize;
    for m in 0..n {
        let seg_start = m as f64 * resolution;
        let seg_end = ((m + 1) as f64 * resolution).min(total);

        // Reference ranges are sorted; skip the ones that end at or before
        // this segment.
        while ref_idx < reference.len() && reference[ref_idx].end <= seg_start {
            ref_idx += 1;
        }

        let mut bona = 0.0;
        let mut spoof = 0.0;
        let mut i = ref_idx;
        while i < reference.len() && reference[i].start < seg_end {
            let ov = overlap_duration((seg_start, seg_end), (reference[i].start, reference[i].end));
            match reference[i].label {
                Label::BonaFide => bona += ov,
                Label::Spoof => spoof += ov,
            }
            i += 1;
        }

        labels.push(rule.decide(bona, spoof));
    }

    SegmentLabels { resolution, labels }
}
