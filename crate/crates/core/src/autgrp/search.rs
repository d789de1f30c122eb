//! Individualization–refinement search for the full automorphism group.
//!
//! A first path is descended from the root by individualizing the least
//! vertex of the target cell until the partition is discrete. Working from the
//! deepest level up, for every other vertex `v` of the level's target cell the
//! subtree below `v` is searched for a leaf whose matching with the first leaf
//! is an automorphism. Vertices already known to lie in the orbit of the base
//! point (under automorphisms found so far that fix the earlier base points)
//! are skipped, as are vertices in the orbit of one already shown not to be.
//! When the loop finishes, the found automorphisms generate the whole group
//! and the stabilizer chain along the first-path base yields its order.

use std::time::{Duration, Instant};

use crate::autgrp::partition::OrderedPartition;
use crate::autgrp::schreier::StabilizerChain;
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::perm::Perm;

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub timeout: Option<Duration>,
    /// Known automorphisms, used for orbit pruning.
    pub seed: Vec<Perm>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub subtrees_without_automorphism: u64,
}

pub(crate) struct SearchOutcome {
    pub generators: Vec<Perm>,
    pub chain: StabilizerChain,
    pub stats: SearchStats,
}

struct Searcher<'a> {
    g: &'a SimpleGraph,
    first: Vec<OrderedPartition>,
    traces: Vec<u64>,
    targets: Vec<(u32, u32)>,
    base: Vec<u32>,
    leaf: Vec<u32>,
    started: Instant,
    timeout: Option<Duration>,
    stats: SearchStats,
}

pub(crate) fn search(g: &SimpleGraph, opts: &SearchOptions) -> Result<SearchOutcome> {
    let n = g.n();
    for s in &opts.seed {
        if s.degree() != n || !g.is_automorphism(s) {
            return Err(Error::BadSeed);
        }
    }
    let mut root = OrderedPartition::unit(n);
    let root_trace = if n > 0 { root.refine_with(g, &[0]) } else { 0 };
    let mut s = Searcher {
        g,
        first: vec![root],
        traces: vec![root_trace],
        targets: Vec::new(),
        base: Vec::new(),
        leaf: Vec::new(),
        started: Instant::now(),
        timeout: opts.timeout,
        stats: SearchStats::default(),
    };
    loop {
        let node = s.first.last().expect("root");
        let Some((start, len)) = node.target_cell() else { break };
        let b = *node.cell_at(start).iter().min().expect("nonempty cell");
        let mut child = node.clone();
        let single = child.individualize(b);
        let t = child.refine_with(g, &[single]);
        s.targets.push((start, len));
        s.base.push(b);
        s.traces.push(t);
        s.first.push(child);
    }
    s.leaf = s.first.last().expect("root").lab().to_vec();

    let mut gens: Vec<Perm> = opts.seed.iter().filter(|p| !p.is_identity()).cloned().collect();
    let mut chain = StabilizerChain::new(n, &gens, &s.base)?;
    for depth in (0..s.base.len()).rev() {
        let (start, _) = s.targets[depth];
        let mut cell = s.first[depth].cell_at(start).to_vec();
        cell.sort_unstable();
        let mut failed: Vec<u32> = Vec::new();
        let mut orbits = OrbitPartition::new(n, chain.level_generators(depth));
        for v in cell {
            if v == s.base[depth] || chain.in_basic_orbit(depth, v) {
                continue;
            }
            if failed.iter().any(|&w| orbits.same(v, w)) {
                continue;
            }
            match s.subtree(depth, v)? {
                Some(gamma) => {
                    gens.push(gamma);
                    chain = StabilizerChain::new(n, &gens, &s.base)?;
                    orbits = OrbitPartition::new(n, chain.level_generators(depth));
                }
                None => {
                    s.stats.subtrees_without_automorphism += 1;
                    failed.push(v);
                }
            }
        }
    }
    if chain.depth() > s.base.len() {
        return Err(Error::Invariant("automorphisms fixing the whole base were found".into()));
    }
    Ok(SearchOutcome { generators: gens, chain, stats: s.stats })
}

impl Searcher<'_> {
    fn check_time(&self) -> Result<()> {
        match self.timeout {
            Some(limit) if self.started.elapsed() > limit => Err(Error::Timeout(limit)),
            _ => Ok(()),
        }
    }

    /// Searches below the first-path node at `depth` with `v` individualized.
    fn subtree(&mut self, depth: usize, v: u32) -> Result<Option<Perm>> {
        self.check_time()?;
        let mut child = self.first[depth].clone();
        let single = child.individualize(v);
        let t = child.refine_with(self.g, &[single]);
        self.stats.nodes += 1;
        if t != self.traces[depth + 1] {
            return Ok(None);
        }
        self.dfs(&child, depth + 1)
    }

    fn dfs(&mut self, node: &OrderedPartition, depth: usize) -> Result<Option<Perm>> {
        self.check_time()?;
        if node.is_discrete() {
            self.stats.leaves += 1;
            if depth != self.leaf_depth() {
                return Ok(None);
            }
            let mut images = vec![0u32; node.len()];
            for (&from, &to) in self.leaf.iter().zip(node.lab()) {
                images[from as usize] = to;
            }
            let gamma = Perm::from_images_unchecked(images);
            return Ok(self.g.is_automorphism(&gamma).then_some(gamma));
        }
        if depth >= self.targets.len() || node.target_cell() != Some(self.targets[depth]) {
            return Ok(None);
        }
        let (start, _) = self.targets[depth];
        let mut cell = node.cell_at(start).to_vec();
        cell.sort_unstable();
        for w in cell {
            let mut child = node.clone();
            let single = child.individualize(w);
            let t = child.refine_with(self.g, &[single]);
            self.stats.nodes += 1;
            if t != self.traces[depth + 1] {
                continue;
            }
            if let Some(gamma) = self.dfs(&child, depth + 1)? {
                return Ok(Some(gamma));
            }
        }
        Ok(None)
    }

    fn leaf_depth(&self) -> usize {
        self.base.len()
    }
}

/// Orbits of a set of permutations, by union–find.
struct OrbitPartition {
    parent: Vec<u32>,
}

impl OrbitPartition {
    fn new(n: usize, gens: &[Perm]) -> Self {
        let mut uf = OrbitPartition { parent: (0..n as u32).collect() };
        for g in gens {
            for x in 0..n as u32 {
                uf.union(x, g.apply(x));
            }
        }
        uf
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }

    fn same(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }
}
