//! The work behind each subcommand.

use std::io::Write;

use cig_core::verify::{applies, run_check, CheckOptions};
use cig_core::weil::{audit_weil_bound, verify_weil};
use cig_core::{Error, FieldSpec, InvolutionGraph, LemmaId, LemmaReport, Poly, ReportBuilder};
use rayon::prelude::*;

use crate::cache::{obtain_graph, GraphCache};
use crate::error::{CliError, Result};
use crate::output::AuditRecord;

/// A failed record standing in for a check that could not run.
pub fn error_report(lemma: LemmaId, q: u32, err: &dyn std::fmt::Display) -> LemmaReport {
    let mut rep = ReportBuilder::new(lemma, q, true);
    rep.witness(format!("error: {err}"));
    rep.measure("error", err.to_string());
    rep.finish(false)
}

fn with_pool<T: Send>(jobs: usize, work: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(work))
}

fn needs_graph(lemma: LemmaId) -> bool {
    lemma != LemmaId::Weil
}

fn verify_one(q: u32, lemmas: &[LemmaId], opts: &CheckOptions, cache: Option<&GraphCache>) -> Vec<LemmaReport> {
    let selected: Vec<LemmaId> = lemmas.iter().copied().filter(|&l| applies(l, q)).collect();
    let mut graph: Option<std::result::Result<InvolutionGraph, String>> = None;
    let mut out = Vec::new();
    for lemma in selected {
        let report = if needs_graph(lemma) {
            let g = graph.get_or_insert_with(|| obtain_graph(cache, q).map_err(|e| e.to_string()));
            match g {
                Ok(g) => run_check(g, lemma, opts).unwrap_or_else(|e| error_report(lemma, q, &e)),
                Err(e) => error_report(lemma, q, e),
            }
        } else {
            FieldSpec::from_order(q as u64)
                .and_then(|k| verify_weil(&k, opts.samples, opts.seed))
                .unwrap_or_else(|e| error_report(lemma, q, &e))
        };
        out.push(report);
    }
    out
}

/// Runs every selected lemma that applies at each q; records come back in (q, lemma) order.
pub fn run_verify(
    qs: &[u32],
    lemmas: &[LemmaId],
    opts: &CheckOptions,
    cache: Option<&GraphCache>,
    jobs: usize,
) -> Result<Vec<LemmaReport>> {
    for &q in qs {
        let skipped: Vec<&str> = lemmas.iter().filter(|&&l| !applies(l, q)).map(|l| l.as_str()).collect();
        if !skipped.is_empty() && lemmas.len() < LemmaId::ALL.len() {
            eprintln!("q = {q}: not applicable: {}", skipped.join(", "));
        }
    }
    let per_q: Vec<Vec<LemmaReport>> =
        with_pool(jobs, || qs.par_iter().map(|&q| verify_one(q, lemmas, opts, cache)).collect())?;
    Ok(per_q.into_iter().flatten().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Bound1,
    Bound2,
}

/// Point-count audits over the family matching each q's class mod 4.
pub fn run_weil(qs: &[u32], family: Option<Family>, samples: usize, seed: u64, jobs: usize) -> Result<Vec<LemmaReport>> {
    for &q in qs {
        if q % 2 == 0 {
            return Err(CliError::Usage(format!("q = {q}: the audit needs odd q")));
        }
        let natural = if q % 4 == 1 { Family::Bound1 } else { Family::Bound2 };
        if let Some(f) = family.filter(|&f| f != natural) {
            let (name, residue) = match f {
                Family::Bound1 => ("bound1", 1),
                Family::Bound2 => ("bound2", 3),
            };
            return Err(CliError::Usage(format!("q = {q}: family {name} needs q ≡ {residue} mod 4")));
        }
    }
    with_pool(jobs, || {
        qs.par_iter()
            .map(|&q| {
                FieldSpec::from_order(q as u64)
                    .and_then(|k| verify_weil(&k, samples, seed))
                    .unwrap_or_else(|e| error_report(LemmaId::Weil, q, &e))
            })
            .collect()
    })
}

/// Parses `c0,c1,...` as coefficient encodings.
pub fn parse_poly(k: &FieldSpec, s: &str) -> Result<Poly> {
    let coeffs = s
        .split(',')
        .map(|c| {
            let v: u32 = c.trim().parse().map_err(|_| CliError::Usage(format!("bad coefficient `{c}`")))?;
            k.element(v).ok_or_else(|| CliError::Usage(format!("coefficient {v} is not below q = {}", k.q())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(coeffs))
}

/// Audits `y² = f(x)` for one polynomial, reporting refused hypotheses as such.
pub fn audit_poly(k: &FieldSpec, f: &Poly) -> AuditRecord {
    let mut rec = AuditRecord {
        q: k.q(),
        poly: f.coeffs().iter().map(|c| c.enc()).collect(),
        outcome: String::new(),
        n: None,
        d: None,
        deviation_sq: None,
        bound_sq: None,
        reason: None,
    };
    match audit_weil_bound(k, f) {
        Ok(a) => {
            rec.outcome = if a.holds { "holds" } else { "violated" }.into();
            rec.n = Some(a.instance.n);
            rec.d = Some(a.instance.d);
            rec.deviation_sq = Some(a.deviation_sq.to_string());
            rec.bound_sq = Some(a.bound_sq.to_string());
        }
        Err(e @ (Error::PerfectSquare | Error::Domain(_) | Error::ZeroPolynomial)) => {
            rec.outcome = "hypothesis-violation".into();
            rec.reason = Some(e.to_string());
        }
        Err(e) => {
            rec.outcome = "error".into();
            rec.reason = Some(e.to_string());
        }
    }
    rec
}

pub fn run_export<W: Write>(q: u32, cache: Option<&GraphCache>, out: W) -> Result<()> {
    let g = obtain_graph(cache, q)?;
    g.graph().write_dimacs(out)?;
    Ok(())
}
