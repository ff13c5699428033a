//! Convert uniform score tracks between temporal resolutions.
//!
//! Up-sampling to a finer grid duplicates each score; down-sampling to a
//! coarser grid takes the minimum of each group, because a lower score is
//! the stronger spoof claim. No mean aggregator is offered: averaging would
//! silently soften spoof evidence and drift the metrics.

use crate::error::{Error, Result};
use crate::timeline::ScoreTrack;

/// A source/target resolution pair. One resolution must be an integer
/// multiple of the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleSpec {
    pub source_resolution: f64,
    pub target_resolution: f64,
}

impl ResampleSpec {
    pub fn new(source_resolution: f64, target_resolution: f64) -> Self {
        Self {
            source_resolution,
            target_resolution,
        }
    }

    /// The integer factor between the two resolutions, or `NonIntegerRatio`.
    ///
    /// Resolutions come from decimal text (0.02, 0.64, ...) whose f64 images
    /// divide inexactly, so the ratio is accepted when it is within 1e-9 of
    /// an integer.
    fn factor(ratio: f64, from: f64, to: f64) -> Result<usize> {
        let rounded = ratio.round();
        if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * rounded {
            Ok(rounded as usize)
        } else {
            Err(Error::NonIntegerRatio { from, to })
        }
    }

    /// Factor for up-sampling: source = k * target.
    pub fn upsample_factor(&self) -> Result<usize> {
        Self::factor(
            self.source_resolution / self.target_resolution,
            self.source_resolution,
            self.target_resolution,
        )
    }

    /// Factor for down-sampling: target = k * source.
    pub fn downsample_factor(&self) -> Result<usize> {
        Self::factor(
            self.target_resolution / self.source_resolution,
            self.source_resolution,
            self.target_resolution,
        )
    }
}

fn uniform_parts(track: &ScoreTrack, spec: &ResampleSpec) -> Result<Vec<f64>> {
    match track {
        ScoreTrack::Uniform { resolution, scores } => {
            if *resolution != spec.source_resolution {
                return Err(Error::ResolutionMismatch {
                    track: *resolution,
                    expected: spec.source_resolution,
                });
            }
            Ok(scores.clone())
        }
        ScoreTrack::Ranged { .. } => Err(Error::InvalidSpec(
            "resampling applies to uniform score tracks only".into(),
        )),
    }
}

/// Repeat each score `k` times to reach a finer resolution.
pub fn upsample(track: &ScoreTrack, spec: &ResampleSpec) -> Result<ScoreTrack> {
    let scores = uniform_parts(track, spec)?;
    let k = spec.upsample_factor()?;
    let mut out = Vec::with_capacity(scores.len() * k);
    for s in scores {
        for _ in 0..k {
            out.push(s);
        }
    }
    Ok(ScoreTrack::Uniform {
        resolution: spec.target_resolution,
        scores: out,
    })
}

/// Replace each group of `k` consecutive scores with its minimum to reach a
/// coarser resolution. A trailing partial group aggregates whatever scores
/// are present rather than being dropped.
pub fn downsample(track: &ScoreTrack, spec: &ResampleSpec) -> Result<ScoreTrack> {
    let scores = uniform_parts(track, spec)?;
    let k = spec.downsample_factor()?;
    let out = scores
        .chunks(k)
        .map(|group| group.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    Ok(ScoreTrack::Uniform {
        resolution: spec.target_resolution,
        scores: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(resolution: f64, scores: &[f64]) -> ScoreTrack {
        ScoreTrack::uniform(resolution, scores.to_vec())
    }

    fn scores(track: &ScoreTrack) -> Vec<f64> {
        track.scores().collect()
    }

    #[test]
    fn upsample_duplicates() {
        let track = uniform(0.64, &[0.6, 0.2]);
        let up = upsample(&track, &ResampleSpec::new(0.64, 0.32)).unwrap();
        assert_eq!(scores(&up), vec![0.6, 0.6, 0.2, 0.2]);
    }

    #[test]
    fn upsample_identity_when_equal() {
        let track = uniform(0.02, &[0.5, 0.7]);
        let up = upsample(&track, &ResampleSpec::new(0.02, 0.02)).unwrap();
        assert_eq!(up, track);
    }

    #[test]
    fn upsample_single_by_four() {
        let track = uniform(0.08, &[0.5]);
        let up = upsample(&track, &ResampleSpec::new(0.08, 0.02)).unwrap();
        assert_eq!(scores(&up), vec![0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn downsample_takes_minimum() {
        let track = uniform(0.02, &[0.6, 0.2, 0.7, 0.5]);
        let down = downsample(&track, &ResampleSpec::new(0.02, 0.04)).unwrap();
        assert_eq!(scores(&down), vec![0.2, 0.5]);
    }

    #[test]
    fn downsample_identity_when_equal() {
        let track = uniform(0.02, &[0.6, 0.2]);
        let down = downsample(&track, &ResampleSpec::new(0.02, 0.02)).unwrap();
        assert_eq!(down, track);
    }

    #[test]
    fn downsample_trailing_partial_group() {
        let track = uniform(0.02, &[0.9, 0.1, 0.8]);
        let down = downsample(&track, &ResampleSpec::new(0.02, 0.04)).unwrap();
        assert_eq!(scores(&down), vec![0.1, 0.8]);
    }

    #[test]
    fn non_integer_ratio_is_rejected() {
        let track = uniform(0.03, &[0.5, 0.5]);
        assert!(matches!(
            downsample(&track, &ResampleSpec::new(0.03, 0.02)),
            Err(Error::NonIntegerRatio { .. })
        ));
        assert!(matches!(
            upsample(&track, &ResampleSpec::new(0.03, 0.02)),
            Err(Error::NonIntegerRatio { .. })
        ));
    }

    #[test]
    fn decimal_resolutions_divide() {
        // 0.64 / 0.32 and 0.64 / 0.02 are not exact in binary but must be
        // accepted as integer ratios.
        assert_eq!(ResampleSpec::new(0.64, 0.32).upsample_factor().unwrap(), 2);
        assert_eq!(ResampleSpec::new(0.64, 0.02).upsample_factor().unwrap(), 32);
        assert_eq!(ResampleSpec::new(0.02, 0.64).downsample_factor().unwrap(), 32);
    }

    #[test]
    fn round_trip_is_identity() {
        let track = uniform(0.64, &[0.6, 0.2, -0.4, 1.3]);
        let up = upsample(&track, &ResampleSpec::new(0.64, 0.16)).unwrap();
        let back = downsample(&up, &ResampleSpec::new(0.16, 0.64)).unwrap();
        assert_eq!(back, track);
    }

    #[test]
    fn track_resolution_must_match_spec() {
        let track = uniform(0.04, &[0.5]);
        assert!(matches!(
            upsample(&track, &ResampleSpec::new(0.08, 0.02)),
            Err(Error::ResolutionMismatch { .. })
        ));
    }
}
