//! E-set fingerprints `E_v = Δ₂(v) ∩ Δ₁(t)` and their collision structure.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::field::Fe;
use crate::psl2::{self, Mat2};
use crate::report::{LemmaId, LemmaReport, ReportBuilder};

use super::{conic_points, le2_by_trace, LemmaContext};

/// Owners whose masks are compared against BFS in each spot check.
const SPOT_CHECK_OWNERS: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub owner: u32,
    /// Bit `i` is set when the `i`-th vertex of `Δ₁(t)` (ascending ids) lies in `Δ₂(owner)`.
    pub mask: FixedBitSet,
}

/// Fingerprints of the given owners, by the trace criterion.
pub fn fingerprints_of(ctx: &LemmaContext<'_>, owners: &[u32]) -> Result<Vec<Fingerprint>> {
    let k = ctx.field();
    let nbrs = ctx.discs.disc(1);
    let g = ctx.graph.graph();
    owners
        .par_iter()
        .map(|&v| {
            let mut mask = FixedBitSet::with_capacity(nbrs.len());
            for (i, &w) in nbrs.iter().enumerate() {
                if w != v && !g.has_edge(v, w) && le2_by_trace(k, ctx.rep(v), ctx.rep(w))? {
                    mask.insert(i);
                }
            }
            Ok(Fingerprint { owner: v, mask })
        })
        .collect()
}

/// Fingerprints of `Δ₂(t)` (q ≡ 1 mod 4) or `Δ₃(t)` (q ≡ 3 mod 4).
pub fn fingerprint_all(ctx: &LemmaContext<'_>) -> Result<Vec<Fingerprint>> {
    let disc = if ctx.q() % 4 == 1 { 2 } else { 3 };
    fingerprints_of(ctx, ctx.discs.disc(disc))
}

/// Recomputes the masks of up to 40 seeded-random fingerprints by BFS.
/// Returns the number of `(owner, w)` pairs compared and the mismatching ones.
pub fn spot_check_fingerprints(
    ctx: &LemmaContext<'_>,
    fps: &[Fingerprint],
    seed: u64,
) -> (usize, Vec<(u32, u32)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = index::sample(&mut rng, fps.len(), SPOT_CHECK_OWNERS.min(fps.len()));
    let nbrs = ctx.discs.disc(1);
    let mut compared = 0;
    let mut bad = Vec::new();
    for i in picks {
        let fp = &fps[i];
        let dist = ctx.graph.graph().distances(fp.owner);
        for (j, &w) in nbrs.iter().enumerate() {
            compared += 1;
            if fp.mask.contains(j) != (dist[w as usize] == 2) {
                bad.push((fp.owner, w));
            }
        }
    }
    (compared, bad)
}

struct Collisions {
    classes: usize,
    max_class: usize,
    t_fixed: usize,
    bad: Vec<String>,
}

/// Groups equal masks; every class should be the `⟨t⟩`-orbit `{v, v^t}`.
fn collisions(ctx: &LemmaContext<'_>, fps: &[Fingerprint]) -> Result<Collisions> {
    let mut groups: HashMap<&FixedBitSet, Vec<u32>> = HashMap::new();
    for fp in fps {
        groups.entry(&fp.mask).or_default().push(fp.owner);
    }
    let mut classes: Vec<Vec<u32>> = groups.into_values().collect();
    classes.iter_mut().for_each(|c| c.sort_unstable());
    classes.sort_unstable();
    let mut out = Collisions { classes: classes.len(), max_class: 0, t_fixed: 0, bad: Vec::new() };
    for class in &classes {
        out.max_class = out.max_class.max(class.len());
        let v = class[0];
        let vt = ctx.conjugate_by_t(v)?;
        if v == vt {
            out.t_fixed += 1;
        }
        let mut orbit = vec![v, vt];
        orbit.sort_unstable();
        orbit.dedup();
        if *class != orbit {
            out.bad.push(format!("class {class:?} is not the orbit {orbit:?}"));
        }
    }
    Ok(out)
}

fn check_t_invariance(ctx: &LemmaContext<'_>, fps: &[Fingerprint]) -> Result<Vec<u32>> {
    let by_owner: HashMap<u32, &FixedBitSet> = fps.iter().map(|f| (f.owner, &f.mask)).collect();
    let mut bad = Vec::new();
    for fp in fps {
        let vt = ctx.conjugate_by_t(fp.owner)?;
        match by_owner.get(&vt) {
            Some(m) if **m == fp.mask => {}
            _ => bad.push(fp.owner),
        }
    }
    Ok(bad)
}

fn collision_report(
    ctx: &LemmaContext<'_>,
    mut rep: ReportBuilder,
    owners: &[u32],
    seed: u64,
) -> Result<LemmaReport> {
    let fps = fingerprints_of(ctx, owners)?;
    let (compared, spot_bad) = spot_check_fingerprints(ctx, &fps, seed);
    let t_bad = check_t_invariance(ctx, &fps)?;
    let col = collisions(ctx, &fps)?;
    for (v, w) in &spot_bad {
        rep.witness(format!("fingerprint of {v} disagrees with BFS at {w}"));
    }
    for v in &t_bad {
        rep.witness(format!("fingerprint of {v} differs from that of its t-conjugate"));
    }
    for b in &col.bad {
        rep.witness(b.clone());
    }
    rep.seed(seed);
    rep.measure("owners", owners.len());
    rep.measure("mask_width", ctx.discs.disc(1).len());
    rep.measure("classes", col.classes);
    rep.measure("max_class_size", col.max_class);
    rep.measure("t_fixed_owners", col.t_fixed);
    rep.measure("bad_classes", col.bad.len());
    rep.measure("spot_checked_pairs", compared);
    let holds = spot_bad.is_empty() && t_bad.is_empty() && col.bad.is_empty() && col.max_class <= 2;
    Ok(rep.finish(holds))
}

/// Fingerprint collisions on `Δ₁(s) ∩ Δ₂(t)`, `s = [[0,1],[−1,0]]` (q ≡ 1 mod 4).
pub fn verify_bound1(ctx: &LemmaContext<'_>, seed: u64) -> Result<LemmaReport> {
    ctx.require_class(1)?;
    let k = ctx.field();
    let mut rep = ReportBuilder::new(LemmaId::Bound1, k.q(), k.q() >= 73);
    let s = ctx.id(&Mat2::from_ints(k, 0, 1, -1, 0))?;
    let owners: Vec<u32> = ctx
        .graph
        .graph()
        .neighbors(s)
        .iter()
        .copied()
        .filter(|&v| ctx.dist_t[v as usize] == 2)
        .collect();
    // the owners are exactly the s_{σ,τ} with σ, τ ≠ 0
    let mut shown: Vec<u32> = conic_points(k)
        .into_iter()
        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
        .map(|(a, b)| ctx.id(&psl2::s_sigma_tau(k, a, b)))
        .collect::<Result<_>>()?;
    shown.sort_unstable();
    shown.dedup();
    if shown != owners {
        rep.witness("Δ₁(s) ∩ Δ₂(t) differs from the s_{σ,τ} with σ, τ ≠ 0");
        return Ok(rep.finish(false));
    }
    collision_report(ctx, rep, &owners, seed)
}

/// Fingerprint collisions on all of `Δ₃(t)` (q ≡ 3 mod 4).
pub fn verify_bound2(ctx: &LemmaContext<'_>, seed: u64) -> Result<LemmaReport> {
    ctx.require_class(3)?;
    let rep = ReportBuilder::new(LemmaId::Bound2, ctx.q(), ctx.q() >= 67);
    let owners = ctx.discs.disc(3).to_vec();
    collision_report(ctx, rep, &owners, seed)
}

/// `|Δ₁(u) ∩ Δ₂(t)| = (q−5)/4` for every `u = [[ι, α], [0, −ι]]`, α ≠ 0.
pub fn verify_faithful1_count(ctx: &LemmaContext<'_>) -> Result<LemmaReport> {
    ctx.require_class(1)?;
    let k = ctx.field();
    let q = k.q();
    let mut rep = ReportBuilder::new(LemmaId::Faithful1, q, q >= 17);
    let iota = psl2::imaginary_unit(k)?;
    let expected = (q as usize - 5) / 4;
    let mut counts = Vec::new();
    let mut holds = true;
    for alpha in k.nonzero() {
        let u = ctx.id(&Mat2::new(iota, alpha, Fe::ZERO, k.neg(iota)))?;
        if ctx.dist_t[u as usize] != 3 {
            holds = false;
            rep.witness(format!("u at α = {alpha} is at distance {} from t", ctx.dist_t[u as usize]));
        }
        let count = ctx
            .graph
            .graph()
            .neighbors(u)
            .iter()
            .filter(|&&v| ctx.dist_t[v as usize] == 2)
            .count();
        if count != expected {
            holds = false;
            rep.witness(format!("α = {alpha}: |Δ₁(u) ∩ Δ₂(t)| = {count}, expected {expected}"));
        }
        counts.push(count);
    }
    counts.sort_unstable();
    counts.dedup();
    rep.measure("expected", expected);
    rep.measure("distinct_counts", counts);
    Ok(rep.finish(holds))
}
