//! Self-describing JSON evaluation report.
//!
//! Everything that influenced the number is echoed back (mode, precision,
//! label rule, worker count), the field order is fixed, and floats use the
//! shortest round-trip encoding, so identical inputs serialize to identical
//! bytes and reports parse back losslessly. Thresholds can legitimately be
//! infinite, which JSON numbers cannot carry, so they encode as the strings
//! `"inf"` / `"-inf"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation settings echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub prec: f64,
    pub max_iterations: u32,
    pub quantile_mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resolution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label_rule: Option<String>,
    pub workers: usize,
}

/// Exhaustive-sweep cross-check attached when requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub eer: f64,
    #[serde(with = "float_or_inf")]
    pub threshold: f64,
    pub abs_difference: f64,
}

/// One evaluation run: the EER, the operating point, dataset totals, and the
/// configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultReport {
    pub mode: String,
    pub eer: f64,
    #[serde(with = "float_or_inf")]
    pub threshold: f64,
    pub p_fp: f64,
    pub p_fn: f64,
    pub quantile: f64,
    pub iterations: u32,
    pub converged: bool,
    pub d_negative: f64,
    pub d_positive: f64,
    pub trial_count: usize,
    pub config: ReportConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleCheck>,
}

impl ResultReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            file: "<report>".into(),
            line: e.line(),
            message: e.to_string(),
        })
    }
}

mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => other.parse().map_err(serde::de::Error::custom),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(threshold: f64) -> ResultReport {
        ResultReport {
            mode: "range".into(),
            eer: 5.0 / 12.0,
            threshold,
            p_fp: 0.5,
            p_fn: 1.0 / 3.0,
            quantile: 43.75,
            iterations: 17,
            converged: false,
            d_negative: 2.0,
            d_positive: 3.0,
            trial_count: 1,
            config: ReportConfig {
                prec: 1e-5,
                max_iterations: 200,
                quantile_mode: "real-valued".into(),
                resolution: None,
                label_rule: None,
                workers: 1,
            },
            oracle: None,
        }
    }

    #[test]
    fn json_roundtrip_is_lossless() {
        for threshold in [0.6, f64::INFINITY, f64::NEG_INFINITY, 1e-300] {
            let report = sample(threshold);
            let json = report.to_json();
            assert_eq!(ResultReport::from_json(&json).unwrap(), report);
        }
    }

    #[test]
    fn serialization_is_deterministic() {
        assert_eq!(sample(0.6).to_json(), sample(0.6).to_json());
    }

    #[test]
    fn eer_keeps_full_precision() {
        let json = sample(0.6).to_json();
        assert!(json.contains("0.4166666666666667"));
    }
}
