//! Field-order selection shared by every subcommand.

use cig_core::field::{is_prime, prime_power};
use cig_core::LemmaId;

use crate::error::{CliError, Result};

/// Parses `a..b` or `a..=b`; both ends are included.
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let bad = || CliError::BadQ(format!("`{s}` is not a range like 7..31"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let lo: u32 = a.trim().parse().map_err(|_| bad())?;
    let hi: u32 = b.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn check_q(q: u64) -> Result<u32> {
    if prime_power(q).is_none() {
        return Err(CliError::BadQ(format!("{q} is not a prime power")));
    }
    if q <= 3 {
        return Err(CliError::BadQ(format!("q = {q} is too small (need q > 3)")));
    }
    u32::try_from(q).map_err(|_| CliError::BadQ(format!("q = {q} is too large")))
}

/// The sorted, deduplicated list of field orders selected by the flags.
///
/// Explicit orders must be prime powers above 3; a range silently keeps only those.
pub fn resolve_qs(qs: &[u64], range: Option<&str>, p: Option<u64>, f: Option<u32>) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for &q in qs {
        out.push(check_q(q)?);
    }
    if let Some(r) = range {
        let (lo, hi) = parse_range(r)?;
        out.extend((lo.max(4)..=hi).filter(|&q| prime_power(q as u64).is_some()));
    }
    match (p, f) {
        (Some(p), f) => {
            if !is_prime(p) {
                return Err(CliError::BadQ(format!("{p} is not a prime")));
            }
            let f = f.unwrap_or(1);
            let q = p
                .checked_pow(f)
                .filter(|&q| f > 0 && q <= u32::MAX as u64)
                .ok_or_else(|| CliError::BadQ(format!("{p}^{f} is not a usable field order")))?;
            out.push(check_q(q)?);
        }
        (None, Some(_)) => return Err(CliError::Usage("--f needs --p".into())),
        (None, None) => {}
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Usage("no field orders selected; use --q, --q-range or --p/--f".into()));
    }
    Ok(out)
}

/// A `--lemma` value: one check, or `all`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaSel {
    All,
    One(LemmaId),
}

pub fn parse_lemma(s: &str) -> std::result::Result<LemmaSel, String> {
    match s {
        "all" => Ok(LemmaSel::All),
        "eigenvalues" => Ok(LemmaSel::One(LemmaId::Eigen)),
        _ => s.parse().map(LemmaSel::One),
    }
}

/// Expands a selection to concrete lemmas in report order.
pub fn expand_lemmas(sel: &[LemmaSel]) -> Vec<LemmaId> {
    if sel.is_empty() || sel.contains(&LemmaSel::All) {
        return LemmaId::ALL.to_vec();
    }
    LemmaId::ALL
        .into_iter()
        .filter(|l| sel.contains(&LemmaSel::One(*l)))
        .collect()
}
