//! Runnable verifications producing ratio tables and trend verdicts.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub mod comparison;
pub mod dilation;
pub mod domination;
pub mod example51;
pub mod opnorm;
pub mod sharpness;

pub use comparison::{check_comparison, comparison_suite, one_sidedness};
pub use dilation::{check_1d_identity, check_1d_laplacian};
pub use domination::{check_domination, default_rho};
pub use example51::{keystone_check, Example51};
pub use opnorm::{example51_opnorm_ladder, opnorm_ratio, opnorm_scan};
pub use sharpness::{sharpness_scan, witness_membership};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Diverges,
    Converges,
}

impl Status {
    /// Whether the CLI treats this outcome as success.
    pub fn is_success(self) -> bool {
        matches!(self, Status::Pass | Status::Diverges | Status::Converges)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Diverges => "DIVERGES",
            Status::Converges => "CONVERGES",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub criterion: String,
}

impl Verdict {
    pub fn new(status: Status, criterion: impl Into<String>) -> Self {
        Self {
            status,
            criterion: criterion.into(),
        }
    }

    pub fn pass_if(ok: bool, criterion: impl Into<String>) -> Self {
        Self::new(if ok { Status::Pass } else { Status::Fail }, criterion)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub point: BTreeMap<String, f64>,
    pub value: f64,
}

impl Sample {
    pub fn new<const K: usize>(point: [(&str, f64); K], value: f64) -> Self {
        Self {
            point: point.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub samples: Vec<Sample>,
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
}

impl ExperimentResult {
    /// First 12 hex digits of the SHA-256 of the canonical parameter JSON.
    pub fn params_hash(&self) -> String {
        let canonical = serde_json::to_vec(&self.params).expect("parameter maps always serialize");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..6])
    }

    /// `<experiment>-<hash-of-params>.<ext>`.
    pub fn file_name(&self, ext: &str) -> String {
        format!("{}-{}.{ext}", self.name, self.params_hash())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }

    /// One row per sample, then one row per ratio; the sample point keys become
    /// columns.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut keys: Vec<String> = Vec::new();
        for s in &self.samples {
            for k in s.point.keys() {
                if !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["name".to_string(), "kind".to_string()];
        header.extend(keys.iter().cloned());
        header.push("value".into());
        w.write_record(&header)?;
        for s in &self.samples {
            let mut row = vec![self.name.clone(), "sample".into()];
            row.extend(keys.iter().map(|k| s.point.get(k).map(|v| fmt_num(*v)).unwrap_or_default()));
            row.push(fmt_num(s.value));
            w.write_record(&row)?;
        }
        for (i, r) in self.ratios.iter().enumerate() {
            let mut row = vec![self.name.clone(), format!("ratio{i}")];
            row.extend(keys.iter().map(|_| String::new()));
            row.push(fmt_num(*r));
            w.write_record(&row)?;
        }
        let mut row = vec![self.name.clone(), "verdict".into()];
        row.extend(keys.iter().map(|_| String::new()));
        row.push(self.verdict.status.to_string());
        w.write_record(&row)?;
        w.flush()?;
        Ok(())
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.17e}")
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample_result() -> ExperimentResult {
        ExperimentResult {
            name: "demo".into(),
            params: BTreeMap::from([("alpha".to_string(), json!(0.25))]),
            samples: vec![Sample::new([("R", 16.0)], 1.5), Sample::new([("R", 32.0)], 1.75)],
            ratios: vec![1.0 / 3.0],
            verdict: Verdict::new(Status::Converges, "demo"),
        }
    }

    #[test]
    fn file_name_depends_on_params_only() {
        let a = sample_result();
        let mut b = sample_result();
        b.samples.clear();
        assert_eq!(a.file_name("json"), b.file_name("json"));
        b.params.insert("beta".into(), json!(0.6));
        assert_ne!(a.file_name("json"), b.file_name("json"));
        assert!(a.file_name("json").starts_with("demo-"));
        assert_eq!(a.file_name("json").len(), "demo-".len() + 12 + ".json".len());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample_result().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "name,kind,R,value");
        assert_eq!(lines.len(), 5);
        assert!(lines[4].ends_with("CONVERGES"));
    }

    #[test]
    fn json_roundtrip() {
        let r = sample_result();
        let mut buf = Vec::new();
        r.write_json(&mut buf).unwrap();
        let back: ExperimentResult = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 2.0).collect();
        assert!((fit_slope(&xs, &ys) - 0.5).abs() < 1e-14);
    }
}
