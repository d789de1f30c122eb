//! Rendering of report records as JSON lines, CSV or text.

use std::io::Write;

use cig_core::LemmaReport;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Human,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    lemma: &'a str,
    q: u32,
    status: &'a str,
    millis: u64,
    seed: Option<u64>,
    witnesses: String,
    measurements: String,
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) if a.len() > 8 => format!("[{} items]", a.len()),
        other => other.to_string(),
    }
}

pub fn write_reports<W: Write>(mut out: W, format: Format, reports: &[LemmaReport]) -> Result<()> {
    match format {
        Format::Json => {
            for r in reports {
                writeln!(out, "{}", r.to_json_line())?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in reports {
                w.serialize(CsvRow {
                    lemma: r.lemma.as_str(),
                    q: r.q,
                    status: r.status.as_str(),
                    millis: r.millis,
                    seed: r.seed,
                    witnesses: r.witnesses.join(" | "),
                    measurements: Value::Object(r.measurements.clone()).to_string(),
                })?;
            }
            w.flush()?;
        }
        Format::Human => {
            for r in reports {
                writeln!(out, "q = {:<4} {:<10} {:<20} {:>7} ms", r.q, r.lemma.as_str(), r.status.as_str(), r.millis)?;
                let fields: Vec<String> = r
                    .measurements
                    .iter()
                    .filter(|(k, _)| k.as_str() != "holds")
                    .map(|(k, v)| format!("{k}={}", compact(v)))
                    .collect();
                if !fields.is_empty() {
                    writeln!(out, "    {}", fields.join(", "))?;
                }
                for w in &r.witnesses {
                    writeln!(out, "    witness: {w}")?;
                }
            }
        }
    }
    Ok(())
}

/// Result of auditing one user-supplied polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRecord {
    pub q: u32,
    /// Coefficient encodings, constant term first.
    pub poly: Vec<u32>,
    /// `holds`, `violated` or `hypothesis-violation`.
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation_sq: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_sq: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl AuditRecord {
    pub fn is_failure(&self) -> bool {
        self.outcome != "holds"
    }
}

pub fn write_audits<W: Write>(mut out: W, format: Format, audits: &[AuditRecord]) -> Result<()> {
    match format {
        Format::Json => {
            for a in audits {
                writeln!(out, "{}", serde_json::to_string(a).expect("record serializes"))?;
            }
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().from_writer(out);
            w.write_record(["q", "poly", "outcome", "n", "d", "deviation_sq", "bound_sq", "reason"])?;
            for a in audits {
                let opt = |v: Option<String>| v.unwrap_or_default();
                w.write_record([
                    a.q.to_string(),
                    a.poly.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
                    a.outcome.clone(),
                    opt(a.n.map(|n| n.to_string())),
                    opt(a.d.map(|d| d.to_string())),
                    opt(a.deviation_sq.clone()),
                    opt(a.bound_sq.clone()),
                    opt(a.reason.clone()),
                ])?;
            }
            w.flush()?;
        }
        Format::Human => {
            for a in audits {
                match &a.reason {
                    Some(why) => writeln!(out, "q = {:<4} {:?}: {} ({why})", a.q, a.poly, a.outcome)?,
                    None => writeln!(
                        out,
                        "q = {:<4} {:?}: {} (N = {}, d = {}, (N−q)² = {} vs {})",
                        a.q,
                        a.poly,
                        a.outcome,
                        a.n.unwrap_or_default(),
                        a.d.unwrap_or_default(),
                        a.deviation_sq.as_deref().unwrap_or(""),
                        a.bound_sq.as_deref().unwrap_or("")
                    )?,
                }
            }
        }
    }
    Ok(())
}
