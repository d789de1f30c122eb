//! Simple undirected graphs with bitset rows, and the commuting involution graph.

use std::collections::VecDeque;
use std::io::{self, Write};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::perm::Perm;
use crate::psl2::{self, Involution, VertexTable};

/// Distance value for vertices in another component.
pub const UNREACHABLE: u32 = u32::MAX;

/// Symmetric, irreflexive adjacency on `0..n`.
#[derive(Clone, Debug)]
pub struct SimpleGraph {
    adj: Vec<Vec<u32>>,
    rows: Vec<FixedBitSet>,
}

impl PartialEq for SimpleGraph {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}

impl Eq for SimpleGraph {}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut rows = vec![FixedBitSet::with_capacity(n); n];
        for (u, v) in edges {
            let (ui, vi) = (u as usize, v as usize);
            if ui >= n || vi >= n {
                return Err(Error::VertexOutOfRange(ui.max(vi)));
            }
            if u == v {
                return Err(Error::Invariant(format!("loop at vertex {u}")));
            }
            rows[ui].insert(vi);
            rows[vi].insert(ui);
        }
        Ok(Self::from_rows(rows))
    }

    fn from_rows(rows: Vec<FixedBitSet>) -> Self {
        let adj = rows.iter().map(|r| r.ones().map(|x| x as u32).collect()).collect();
        SimpleGraph { adj, rows }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("valid edges")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn row(&self, v: u32) -> &FixedBitSet {
        &self.rows[v as usize]
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.rows[u as usize].contains(v as usize)
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| v > u as u32).map(move |&v| (u as u32, v)))
    }

    /// Full symmetric/irreflexive check of the adjacency structure.
    pub fn check_simple(&self) -> Result<()> {
        for u in 0..self.n() as u32 {
            if self.has_edge(u, u) {
                return Err(Error::Invariant(format!("loop at vertex {u}")));
            }
            for &v in self.neighbors(u) {
                if !self.has_edge(v, u) {
                    return Err(Error::Invariant(format!("asymmetric edge {u} -> {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_automorphism(&self, g: &Perm) -> bool {
        g.degree() == self.n()
            && (0..self.n() as u32).all(|u| {
                let gu = g.apply(u);
                self.degree(gu) == self.degree(u)
                    && self.neighbors(u).iter().all(|&v| self.has_edge(gu, g.apply(v)))
            })
    }

    /// The graph with vertex `v` renamed to `r(v)`.
    pub fn relabel(&self, r: &Perm) -> Result<Self> {
        if r.degree() != self.n() {
            return Err(Error::DegreeMismatch(self.n(), r.degree()));
        }
        Self::from_edges(self.n(), self.edges().map(|(u, v)| (r.apply(u), r.apply(v))))
    }

    /// BFS distances from `center`; [`UNREACHABLE`] for other components.
    pub fn distances(&self, center: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.n()];
        let mut queue = VecDeque::new();
        dist[center as usize] = 0;
        queue.push_back(center);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in self.neighbors(u) {
                if dist[v as usize] == UNREACHABLE {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn bfs_discs(&self, center: u32) -> Result<DiscDecomposition> {
        if center as usize >= self.n() {
            return Err(Error::VertexOutOfRange(center as usize));
        }
        Ok(DiscDecomposition::from_distances(center, &self.distances(center)))
    }

    /// All-pairs distances, one BFS per source, computed in parallel.
    pub fn all_distances(&self) -> Vec<Vec<u32>> {
        (0..self.n() as u32).into_par_iter().map(|v| self.distances(v)).collect()
    }

    /// Largest finite eccentricity over all vertices, or `None` if disconnected.
    pub fn diameter(&self) -> Option<u32> {
        let d = (0..self.n() as u32)
            .into_par_iter()
            .map(|v| self.distances(v).into_iter().max().unwrap_or(0))
            .reduce(|| 0, u32::max);
        (d != UNREACHABLE).then_some(d)
    }

    pub fn common_neighbors(&self, x: u32, y: u32) -> Result<Vec<u32>> {
        if x == y {
            return Err(Error::SameVertex);
        }
        let mut row = self.row(x).clone();
        row.intersect_with(self.row(y));
        Ok(row.ones().map(|v| v as u32).collect())
    }

    /// Scans all pairs for two or more common neighbours.
    pub fn check_four_cycle_free(&self) -> FourCycleCheck {
        let n = self.n() as u32;
        let per_vertex: Vec<(usize, Option<[u32; 4]>)> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut best = 0;
                let mut witness = None;
                for y in x + 1..n {
                    let c = self.row(x).intersection_count(self.row(y));
                    best = best.max(c);
                    if c >= 2 && witness.is_none() {
                        let common = self.common_neighbors(x, y).expect("distinct");
                        witness = Some([x, common[0], y, common[1]]);
                    }
                }
                (best, witness)
            })
            .collect();
        let max_common = per_vertex.iter().map(|p| p.0).max().unwrap_or(0);
        let witness = per_vertex.into_iter().find_map(|p| p.1);
        FourCycleCheck { free: witness.is_none(), max_common, witness }
    }

    /// Connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() as u32 {
            if seen[s as usize] {
                continue;
            }
            let mut comp = vec![s];
            seen[s as usize] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &v in self.neighbors(u) {
                    if !std::mem::replace(&mut seen[v as usize], true) {
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_clique(&self, vertices: &[u32]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| vertices[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    /// DIMACS: `p edge n m` followed by 1-indexed `e u v` lines with `u < v`.
    pub fn write_dimacs<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "p edge {} {}", self.n(), self.edge_count())?;
        for (u, v) in self.edges() {
            writeln!(out, "e {} {}", u + 1, v + 1)?;
        }
        Ok(())
    }

    pub fn to_dimacs(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourCycleCheck {
    pub free: bool,
    pub max_common: usize,
    /// `x, a, y, b` with `a, b` common neighbours of `x, y`.
    pub witness: Option<[u32; 4]>,
}

/// Distance partition around a center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscDecomposition {
    pub center: u32,
    /// `discs[i]` holds the vertices at distance exactly `i`, sorted.
    pub discs: Vec<Vec<u32>>,
    pub unreachable: Vec<u32>,
}

impl DiscDecomposition {
    pub fn from_distances(center: u32, dist: &[u32]) -> Self {
        let ecc = dist.iter().copied().filter(|&d| d != UNREACHABLE).max().unwrap_or(0);
        let mut discs = vec![Vec::new(); ecc as usize + 1];
        let mut unreachable = Vec::new();
        for (v, &d) in dist.iter().enumerate() {
            if d == UNREACHABLE {
                unreachable.push(v as u32);
            } else {
                discs[d as usize].push(v as u32);
            }
        }
        DiscDecomposition { center, discs, unreachable }
    }

    pub fn eccentricity(&self) -> u32 {
        self.discs.len() as u32 - 1
    }

    pub fn disc(&self, i: usize) -> &[u32] {
        self.discs.get(i).map_or(&[], Vec::as_slice)
    }
}

/// The commuting involution graph of PSL(2,q).
#[derive(Clone, Debug)]
pub struct InvolutionGraph {
    field: Arc<FieldSpec>,
    table: VertexTable,
    graph: SimpleGraph,
}

impl InvolutionGraph {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<FieldSpec> {
        Arc::clone(&self.field)
    }

    pub fn table(&self) -> &VertexTable {
        &self.table
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn vertex(&self, id: u32) -> &Involution {
        self.table.get(id)
    }

    pub fn id_of(&self, m: &psl2::Mat2) -> Result<u32> {
        self.table.id_of(&self.field, m)
    }

    /// Reassembles a graph from a previously built adjacency, rechecking it.
    pub fn from_parts(field: Arc<FieldSpec>, graph: SimpleGraph) -> Result<Self> {
        let table = VertexTable::new(vertex_class(&field)?);
        if table.len() != graph.n() {
            return Err(Error::Invariant(format!(
                "adjacency has {} vertices, class has {}",
                graph.n(),
                table.len()
            )));
        }
        graph.check_simple()?;
        let out = InvolutionGraph { field, table, graph };
        out.check_degree()?;
        Ok(out)
    }

    fn check_degree(&self) -> Result<()> {
        let q = self.field.q();
        let expected = match q % 4 {
            1 => (q as usize - 1) / 2,
            3 => (q as usize + 1) / 2,
            _ => q as usize - 2,
        };
        match (0..self.n() as u32).find(|&v| self.graph.degree(v) != expected) {
            Some(v) => Err(Error::Invariant(format!(
                "vertex {v} has degree {}, expected {expected}",
                self.graph.degree(v)
            ))),
            None => Ok(()),
        }
    }
}

fn vertex_class(k: &FieldSpec) -> Result<Vec<Involution>> {
    if k.is_odd() {
        psl2::enumerate_involutions(k)
    } else {
        psl2::enumerate_unipotent_involutions(k)
    }
}

/// Builds C(L, X) for L = PSL(2,q), q > 3.
pub fn build_graph(field: Arc<FieldSpec>) -> Result<InvolutionGraph> {
    let vertices = vertex_class(&field)?;
    let k = &*field;
    let n = vertices.len();
    let rows: Vec<FixedBitSet> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(n);
            let x = vertices[i].rep();
            for (j, y) in vertices.iter().enumerate() {
                if i != j && psl2::trace_pairing(k, x, y.rep()).is_zero() {
                    row.insert(j);
                }
            }
            row
        })
        .collect();
    let graph = SimpleGraph::from_rows(rows);
    graph.check_simple()?;
    let out = InvolutionGraph { table: VertexTable::new(vertices), graph, field };
    out.check_degree()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(q: u64) -> InvolutionGraph {
        build_graph(Arc::new(FieldSpec::from_order(q).unwrap())).unwrap()
    }

    #[test]
    fn sizes_and_degrees() {
        let g = build(7);
        assert_eq!(g.n(), 21);
        assert!((0..21).all(|v| g.graph().degree(v) == 4));
        let g = build(13);
        assert_eq!(g.n(), 91);
        assert!((0..91).all(|v| g.graph().degree(v) == 6));
    }

    #[test]
    fn brute_force_adjacency_q7() {
        let g = build(7);
        let k = g.field();
        for u in 0..21u32 {
            for v in 0..21u32 {
                if u == v {
                    continue;
                }
                let x = g.vertex(u).rep();
                let y = g.vertex(v).rep();
                let anti = x.mul(k, y) == y.mul(k, x).neg(k);
                assert_eq!(g.graph().has_edge(u, v), anti);
            }
        }
    }

    #[test]
    fn even_q_components_are_cliques() {
        for (q, comps, size) in [(4u64, 5usize, 3usize), (8, 9, 7)] {
            let g = build(q);
            let c = g.graph().components();
            assert_eq!(c.len(), comps);
            assert!(c.iter().all(|comp| comp.len() == size && g.graph().is_clique(comp)));
        }
    }

    #[test]
    fn q13_is_connected() {
        assert_eq!(build(13).graph().components().len(), 1);
    }

    #[test]
    fn discs_of_base_vertex() {
        for q in [7u64, 17] {
            let g = build(q);
            let t = g.id_of(psl2::base_vertex(g.field()).unwrap().rep()).unwrap();
            let d = g.graph().bfs_discs(t).unwrap();
            assert_eq!(d.eccentricity(), 3);
            assert_eq!(d.disc(0), &[t]);
            assert!(d.unreachable.is_empty());
        }
    }

    #[test]
    fn common_neighbour_edge_cases() {
        let g = build(7);
        let gr = g.graph();
        let t = g.id_of(psl2::base_vertex(g.field()).unwrap().rep()).unwrap();
        assert_eq!(gr.common_neighbors(t, t), Err(Error::SameVertex));
        let d = gr.bfs_discs(t).unwrap();
        for &v in d.disc(2) {
            assert_eq!(gr.common_neighbors(t, v).unwrap().len(), 1);
        }
        // adjacent x, y always share exactly the neighbour xy
        for (u, v) in gr.edges() {
            let xy = g.vertex(u).rep().mul(g.field(), g.vertex(v).rep());
            assert_eq!(gr.common_neighbors(u, v).unwrap(), vec![g.id_of(&xy).unwrap()]);
        }
    }

    #[test]
    fn four_cycles() {
        assert!(build(7).graph().check_four_cycle_free().free);
        let k4 = SimpleGraph::complete(4);
        let check = k4.check_four_cycle_free();
        assert!(!check.free);
        assert_eq!(check.max_common, 2);
        let [x, a, y, b] = check.witness.unwrap();
        for (u, v) in [(x, a), (a, y), (y, b), (b, x)] {
            assert!(k4.has_edge(u, v));
        }
    }

    #[test]
    fn dimacs_header() {
        let text = build(7).graph().to_dimacs();
        assert!(text.starts_with("p edge 21 42\n"));
        assert_eq!(text.lines().count(), 43);
        assert!(build(13).graph().to_dimacs().starts_with("p edge 91 273\n"));
    }

    #[test]
    fn invalid_edges() {
        assert!(SimpleGraph::from_edges(3, [(0, 3)]).is_err());
        assert!(SimpleGraph::from_edges(3, [(1, 1)]).is_err());
    }

    #[test]
    fn too_small_q() {
        let k = Arc::new(FieldSpec::from_order(3).unwrap());
        assert_eq!(build_graph(k).unwrap_err(), Error::QTooSmall(3));
    }
}
