//! Per-check report records, serialized one JSON object per line.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// At most this many witnesses are kept verbatim; the total is recorded separately.
const MAX_WITNESSES: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    #[serde(rename = "disks")]
    Disks,
    #[serde(rename = "4cycle")]
    FourCycle,
    #[serde(rename = "eigen")]
    Eigen,
    #[serde(rename = "poly1")]
    Poly1,
    #[serde(rename = "poly2")]
    Poly2,
    #[serde(rename = "bound1")]
    Bound1,
    #[serde(rename = "bound2")]
    Bound2,
    #[serde(rename = "faithful1")]
    Faithful1,
    #[serde(rename = "weil")]
    Weil,
    #[serde(rename = "theorem1")]
    Theorem1,
}

impl LemmaId {
    pub const ALL: [LemmaId; 10] = [
        LemmaId::Disks,
        LemmaId::FourCycle,
        LemmaId::Eigen,
        LemmaId::Poly1,
        LemmaId::Poly2,
        LemmaId::Bound1,
        LemmaId::Bound2,
        LemmaId::Faithful1,
        LemmaId::Weil,
        LemmaId::Theorem1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::Disks => "disks",
            LemmaId::FourCycle => "4cycle",
            LemmaId::Eigen => "eigen",
            LemmaId::Poly1 => "poly1",
            LemmaId::Poly2 => "poly2",
            LemmaId::Bound1 => "bound1",
            LemmaId::Bound2 => "bound2",
            LemmaId::Faithful1 => "faithful1",
            LemmaId::Weil => "weil",
            LemmaId::Theorem1 => "theorem1",
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LemmaId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown lemma `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Failed,
    /// The check ran, but the parameters lie outside the range the claim is made for.
    OutOfStatedRange,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Failed => "failed",
            Status::OutOfStatedRange => "out-of-stated-range",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub q: u32,
    pub status: Status,
    pub witnesses: Vec<String>,
    pub millis: u64,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub measurements: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl LemmaReport {
    pub fn is_failure(&self) -> bool {
        self.status == Status::Failed
    }

    pub fn measurement(&self, key: &str) -> Option<&Value> {
        self.measurements.get(key)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub struct ReportBuilder {
    lemma: LemmaId,
    q: u32,
    in_range: bool,
    start: Instant,
    witnesses: Vec<String>,
    witness_total: usize,
    measurements: Map<String, Value>,
    seed: Option<u64>,
}

impl ReportBuilder {
    pub fn new(lemma: LemmaId, q: u32, in_range: bool) -> Self {
        ReportBuilder {
            lemma,
            q,
            in_range,
            start: Instant::now(),
            witnesses: Vec::new(),
            witness_total: 0,
            measurements: Map::new(),
            seed: None,
        }
    }

    pub fn witness(&mut self, w: impl Into<String>) {
        self.witness_total += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w.into());
        }
    }

    pub fn measure(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("measurement serializes");
        self.measurements.insert(key.to_owned(), value);
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// `holds` is the outcome of the check; outside the stated range it is recorded, not asserted.
    pub fn finish(mut self, holds: bool) -> LemmaReport {
        self.measure("holds", holds);
        if self.witness_total > self.witnesses.len() {
            self.measure("witness_total", self.witness_total);
        }
        let status = if !self.in_range {
            Status::OutOfStatedRange
        } else if holds {
            Status::Verified
        } else {
            Status::Failed
        };
        if status == Status::Failed && self.witnesses.is_empty() {
            self.witnesses.push("check failed without a specific counterexample".into());
        }
        LemmaReport {
            lemma: self.lemma,
            q: self.q,
            status,
            witnesses: self.witnesses,
            millis: self.start.elapsed().as_millis() as u64,
            measurements: self.measurements,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_reports_carry_a_witness() {
        let r = ReportBuilder::new(LemmaId::Bound1, 73, true).finish(false);
        assert_eq!(r.status, Status::Failed);
        assert!(!r.witnesses.is_empty());
    }

    #[test]
    fn out_of_range_is_never_failed() {
        let r = ReportBuilder::new(LemmaId::Theorem1, 5, false).finish(false);
        assert_eq!(r.status, Status::OutOfStatedRange);
        assert_eq!(r.measurement("holds"), Some(&Value::Bool(false)));
    }

    #[test]
    fn json_shape() {
        let mut b = ReportBuilder::new(LemmaId::FourCycle, 7, true);
        b.measure("max_common", 1);
        let line = b.finish(true).to_json_line();
        let v: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["lemma"], "4cycle");
        assert_eq!(v["status"], "verified");
        assert_eq!(v["q"], 7);
        assert!(v["millis"].is_u64());
        let back: LemmaReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back.lemma, LemmaId::FourCycle);
    }

    #[test]
    fn lemma_names_roundtrip() {
        for l in LemmaId::ALL {
            assert_eq!(l.as_str().parse::<LemmaId>().unwrap(), l);
        }
        assert!("nope".parse::<LemmaId>().is_err());
    }
}
