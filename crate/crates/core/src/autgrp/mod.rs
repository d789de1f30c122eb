//! Automorphism groups of graphs and the comparison with PΓL(2,q).

pub mod partition;
pub mod schreier;
pub mod search;

use std::time::Duration;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::Result;
use crate::graph::{InvolutionGraph, SimpleGraph};
use crate::perm::Perm;
use crate::psl2;
use crate::report::{LemmaId, LemmaReport, ReportBuilder};

pub use partition::{is_equitable, refine, OrderedPartition};
pub use schreier::{group_order, StabilizerChain};
pub use search::{SearchOptions, SearchStats};

/// Vertex counts above which the even-q direct search is skipped.
pub const EVEN_SEARCH_MAX_VERTICES: usize = 60;

/// A permutation group given by generators, with a stabilizer chain for exact order.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    generators: Vec<Perm>,
    chain: StabilizerChain,
}

#[derive(Serialize)]
struct GroupJson<'a> {
    degree: usize,
    order: String,
    base: Vec<u32>,
    generators: Vec<&'a [u32]>,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        Self::with_base(degree, generators, &[])
    }

    pub fn with_base(degree: usize, generators: Vec<Perm>, base: &[u32]) -> Result<Self> {
        let chain = StabilizerChain::new(degree, &generators, base)?;
        Ok(PermutationGroup { generators, chain })
    }

    pub fn degree(&self) -> usize {
        self.chain.degree()
    }

    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.chain.base()
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain.contains(g)
    }

    /// Orbit of `point`, sorted.
    pub fn orbit(&self, point: u32) -> Vec<u32> {
        let mut seen = vec![false; self.degree()];
        seen[point as usize] = true;
        let mut orbit = vec![point];
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head];
            head += 1;
            for g in &self.generators {
                let y = g.apply(x);
                if !std::mem::replace(&mut seen[y as usize], true) {
                    orbit.push(y);
                }
            }
        }
        orbit.sort_unstable();
        orbit
    }

    pub fn is_transitive(&self) -> bool {
        self.degree() == 0 || self.orbit(0).len() == self.degree()
    }

    /// Order of the stabilizer of `point`, from a chain based at `point`.
    pub fn stabilizer_order(&self, point: u32) -> Result<BigUint> {
        let chain = StabilizerChain::new(self.degree(), &self.generators, &[point])?;
        let orbit = chain.basic_orbit(0).len();
        Ok(chain.order() / BigUint::from(orbit))
    }

    /// `{"degree", "order" (decimal string), "base", "generators" (image arrays)}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GroupJson {
            degree: self.degree(),
            order: self.order().to_string(),
            base: self.base(),
            generators: self.generators.iter().map(|g| g.images()).collect(),
        })
        .expect("group serializes")
    }
}

/// Full automorphism group of `g`.
pub fn automorphism_group(g: &SimpleGraph, opts: &SearchOptions) -> Result<PermutationGroup> {
    Ok(automorphism_group_with_stats(g, opts)?.0)
}

pub fn automorphism_group_with_stats(
    g: &SimpleGraph,
    opts: &SearchOptions,
) -> Result<(PermutationGroup, SearchStats)> {
    let out = search::search(g, opts)?;
    let group = PermutationGroup { generators: out.generators, chain: out.chain };
    Ok((group, out.stats))
}

/// f·q·(q² − 1).
pub fn pgammal_order(p: u32, f: u32) -> BigUint {
    let q = BigUint::from(p).pow(f);
    BigUint::from(f) * &q * (&q * &q - 1u32)
}

/// ((q−1)!)^(q+1) · (q+1)!.
pub fn wreath_order(q: u32) -> BigUint {
    let fact = |m: u32| (1..=m).fold(BigUint::from(1u32), |acc, i| acc * i);
    fact(q - 1).pow(q + 1) * fact(q + 1)
}

/// Permutations of the vertex set induced by the PΓL(2,q) generators.
pub fn pgammal_permutations(g: &InvolutionGraph) -> Result<Vec<Perm>> {
    psl2::pgammal_generators(g.field())
        .iter()
        .map(|a| a.permutation(g.field(), g.table()))
        .collect()
}

/// Compares Aut(C(L,X)) with PΓL(2,q) (odd q) or with the wreath product
/// Sym(q−1) ≀ Sym(q+1) (even q).
pub fn verify_theorem1(g: &InvolutionGraph, timeout: Option<Duration>) -> Result<LemmaReport> {
    if g.field().is_odd() {
        theorem1_odd(g, timeout)
    } else {
        theorem1_even(g, timeout)
    }
}

fn theorem1_odd(g: &InvolutionGraph, timeout: Option<Duration>) -> Result<LemmaReport> {
    let k = g.field();
    let q = k.q();
    let n = g.n();
    let mut rep = ReportBuilder::new(LemmaId::Theorem1, q, q >= 7);
    let mut holds = true;

    let perms = pgammal_permutations(g)?;
    for (i, pi) in perms.iter().enumerate() {
        if !g.graph().is_automorphism(pi) {
            holds = false;
            rep.witness(format!("PΓL generator {i} does not preserve adjacency"));
        }
    }
    let expected = pgammal_order(k.p(), k.f());
    let embedded = group_order(n, &perms)?;
    if embedded != expected {
        holds = false;
        rep.witness(format!("PΓL image has order {embedded}, expected {expected}"));
    }

    let l_perms = psl2::sl2_generators(k)
        .iter()
        .map(|a| a.permutation(k, g.table()))
        .collect::<Result<Vec<_>>>()?;
    let l_transitive = PermutationGroup::new(n, l_perms)?.is_transitive();
    if !l_transitive {
        holds = false;
        rep.witness("PSL(2,q) is not transitive on the involution class");
    }

    // the seed is only trusted if every generator is an automorphism
    let seed = if holds { perms } else { Vec::new() };
    let aut = automorphism_group(g.graph(), &SearchOptions { timeout, seed })?;
    let order = aut.order();
    if order != expected {
        holds = false;
        rep.witness(format!("|Aut| = {order}, |PΓL(2,{q})| = {expected}"));
    }
    let t = g.id_of(psl2::base_vertex(k)?.rep())?;
    let stab = aut.stabilizer_order(t)?;
    let orbit = aut.orbit(t).len();
    if BigUint::from(orbit) * &stab != order || orbit != n {
        holds = false;
        rep.witness(format!("|A| = {order} but |t^A| = {orbit}, |A_t| = {stab}"));
    }

    rep.measure("vertices", n);
    rep.measure("aut_order", order.to_string());
    rep.measure("pgammal_order", expected.to_string());
    rep.measure("stabilizer_order", stab.to_string());
    rep.measure("l_transitive", l_transitive);
    rep.measure("aut_equals_pgammal", order == expected);
    Ok(rep.finish(holds))
}

fn theorem1_even(g: &InvolutionGraph, timeout: Option<Duration>) -> Result<LemmaReport> {
    let q = g.field().q();
    let mut rep = ReportBuilder::new(LemmaId::Theorem1, q, true);
    let mut holds = true;
    let comps = g.graph().components();
    if comps.len() != q as usize + 1 {
        holds = false;
        rep.witness(format!("{} components, expected {}", comps.len(), q + 1));
    }
    for c in &comps {
        if c.len() != q as usize - 1 || !g.graph().is_clique(c) {
            holds = false;
            rep.witness(format!("component containing {} is not K_{}", c[0], q - 1));
        }
    }
    let expected = wreath_order(q);
    rep.measure("components", comps.len());
    rep.measure("wreath_order", expected.to_string());
    if g.n() <= EVEN_SEARCH_MAX_VERTICES {
        let seed = pgammal_permutations(g)?;
        let aut = automorphism_group(g.graph(), &SearchOptions { timeout, seed })?;
        let order = aut.order();
        if order != expected {
            holds = false;
            rep.witness(format!("|Aut| = {order}, expected {expected}"));
        }
        rep.measure("aut_order", order.to_string());
    }
    Ok(rep.finish(holds))
}
