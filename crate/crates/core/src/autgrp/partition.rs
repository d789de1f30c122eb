//! Ordered partitions and equitable (1-dimensional Weisfeiler–Leman) refinement.
//!
//! Cells are contiguous ranges of `lab` and are named by their start
//! position, which depends only on the structure of the partition and never
//! on vertex labels. Refinement therefore commutes with graph isomorphisms,
//! and the trace it returns is an isomorphism invariant of the node.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedPartition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    /// Start of the cell holding each position.
    cell_of_pos: Vec<u32>,
    /// One past the end of the cell starting at each position; meaningful at cell starts only.
    end: Vec<u32>,
    cells: usize,
}

impl OrderedPartition {
    pub fn unit(n: usize) -> Self {
        let mut end = vec![0; n];
        if n > 0 {
            end[0] = n as u32;
        }
        OrderedPartition {
            lab: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
            cell_of_pos: vec![0; n],
            end,
            cells: usize::from(n > 0),
        }
    }

    /// An ordered partition from explicit cells, which must partition `0..n`.
    pub fn from_cells(n: usize, cells: &[Vec<u32>]) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut lab = Vec::with_capacity(n);
        let mut cell_of_pos = vec![0; n];
        let mut end = vec![0; n];
        for cell in cells {
            if cell.is_empty() {
                return Err(Error::Domain("empty cell".into()));
            }
            let start = lab.len() as u32;
            for &v in cell {
                if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
                    return Err(Error::Domain(format!("cells do not partition 0..{n}")));
                }
                cell_of_pos[lab.len()] = start;
                lab.push(v);
            }
            end[start as usize] = lab.len() as u32;
        }
        if lab.len() != n {
            return Err(Error::Domain(format!("cells do not cover 0..{n}")));
        }
        let mut pos = vec![0; n];
        for (i, &v) in lab.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        Ok(OrderedPartition { lab, pos, cell_of_pos, end, cells: cells.len() })
    }

    pub fn len(&self) -> usize {
        self.lab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lab.is_empty()
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }

    pub fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    pub fn lab(&self) -> &[u32] {
        &self.lab
    }

    fn starts(&self) -> impl Iterator<Item = u32> + '_ {
        let mut s = 0u32;
        std::iter::from_fn(move || {
            if (s as usize) < self.lab.len() {
                let cur = s;
                s = self.end[s as usize];
                Some(cur)
            } else {
                None
            }
        })
    }

    /// Cells in order, each sorted.
    pub fn cells(&self) -> Vec<Vec<u32>> {
        self.starts()
            .map(|s| {
                let mut c = self.cell_at(s).to_vec();
                c.sort_unstable();
                c
            })
            .collect()
    }

    pub fn cell_at(&self, start: u32) -> &[u32] {
        &self.lab[start as usize..self.end[start as usize] as usize]
    }

    pub fn cell_start_of(&self, v: u32) -> u32 {
        self.cell_of_pos[self.pos[v as usize] as usize]
    }

    /// First smallest non-singleton cell as `(start, size)`.
    pub fn target_cell(&self) -> Option<(u32, u32)> {
        self.starts()
            .map(|s| (s, self.end[s as usize] - s))
            .filter(|&(_, len)| len > 1)
            .min_by_key(|&(s, len)| (len, s))
    }

    /// Splits `v` off the front of its cell; returns the start of the new singleton.
    pub fn individualize(&mut self, v: u32) -> u32 {
        let s = self.cell_start_of(v);
        let e = self.end[s as usize];
        if e - s == 1 {
            return s;
        }
        let pv = self.pos[v as usize];
        let w = self.lab[s as usize];
        self.lab.swap(s as usize, pv as usize);
        self.pos[v as usize] = s;
        self.pos[w as usize] = pv;
        self.end[s as usize] = s + 1;
        self.end[s as usize + 1] = e;
        for p in s + 1..e {
            self.cell_of_pos[p as usize] = s + 1;
        }
        self.cells += 1;
        s
    }

    /// Refines to the coarsest equitable partition below `self`, using the
    /// cells starting at `splitters` as the initial splitting queue. Returns
    /// a hash of the splitting trace.
    pub(crate) fn refine_with(&mut self, g: &SimpleGraph, splitters: &[u32]) -> u64 {
        let n = self.lab.len();
        let mut count = vec![0u32; n];
        let mut in_queue = vec![false; n];
        let mut cell_mark = vec![false; n];
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &s in splitters {
            if !in_queue[s as usize] {
                in_queue[s as usize] = true;
                queue.push_back(s);
            }
        }
        let mut trace = Trace::default();
        let mut touched: Vec<u32> = Vec::new();
        let mut touched_cells: Vec<u32> = Vec::new();
        let mut pieces: Vec<(u32, u32, u32)> = Vec::new();

        while let Some(w) = queue.pop_front() {
            in_queue[w as usize] = false;
            let we = self.end[w as usize];
            for p in w..we {
                for &x in g.neighbors(self.lab[p as usize]) {
                    if count[x as usize] == 0 {
                        touched.push(x);
                    }
                    count[x as usize] += 1;
                }
            }
            for &x in &touched {
                let cs = self.cell_start_of(x);
                if !std::mem::replace(&mut cell_mark[cs as usize], true) {
                    touched_cells.push(cs);
                }
            }
            touched_cells.sort_unstable();
            for &cs in &touched_cells {
                cell_mark[cs as usize] = false;
                let ce = self.end[cs as usize];
                let slice = &mut self.lab[cs as usize..ce as usize];
                let c0 = count[slice[0] as usize];
                if slice.iter().all(|&v| count[v as usize] == c0) {
                    continue;
                }
                slice.sort_unstable_by_key(|&v| (count[v as usize], v));
                pieces.clear();
                let mut ps = cs;
                for p in cs + 1..=ce {
                    if p == ce
                        || count[self.lab[p as usize] as usize] != count[self.lab[ps as usize] as usize]
                    {
                        pieces.push((ps, p, count[self.lab[ps as usize] as usize]));
                        ps = p;
                    }
                }
                trace.mix(w as u64);
                trace.mix(cs as u64);
                for &(ps, pe, c) in &pieces {
                    trace.mix(((pe - ps) as u64) << 32 | c as u64);
                    self.end[ps as usize] = pe;
                    for p in ps..pe {
                        self.cell_of_pos[p as usize] = ps;
                        self.pos[self.lab[p as usize] as usize] = p;
                    }
                }
                self.cells += pieces.len() - 1;
                if in_queue[cs as usize] {
                    for &(ps, _, _) in &pieces[1..] {
                        in_queue[ps as usize] = true;
                        queue.push_back(ps);
                    }
                } else {
                    let largest = pieces
                        .iter()
                        .enumerate()
                        .max_by_key(|(i, &(ps, pe, _))| (pe - ps, std::cmp::Reverse(*i)))
                        .map(|(i, _)| i)
                        .expect("at least two pieces");
                    for (i, &(ps, _, _)) in pieces.iter().enumerate() {
                        if i != largest {
                            in_queue[ps as usize] = true;
                            queue.push_back(ps);
                        }
                    }
                }
            }
            for &x in &touched {
                count[x as usize] = 0;
            }
            touched.clear();
            touched_cells.clear();
        }
        trace.mix(self.cells as u64);
        trace.0
    }
}

/// Coarsest equitable refinement of `p`.
pub fn refine(g: &SimpleGraph, p: &OrderedPartition) -> Result<OrderedPartition> {
    if p.len() != g.n() {
        return Err(Error::DegreeMismatch(g.n(), p.len()));
    }
    let mut out = p.clone();
    let starts: Vec<u32> = out.starts().collect();
    out.refine_with(g, &starts);
    Ok(out)
}

/// Whether every vertex of each cell has the same number of neighbours in every cell.
pub fn is_equitable(g: &SimpleGraph, p: &OrderedPartition) -> bool {
    let cells = p.cells();
    let mut cell_index = vec![0usize; g.n()];
    for (i, c) in cells.iter().enumerate() {
        for &v in c {
            cell_index[v as usize] = i;
        }
    }
    let profile = |v: u32| {
        let mut counts = vec![0u32; cells.len()];
        for &x in g.neighbors(v) {
            counts[cell_index[x as usize]] += 1;
        }
        counts
    };
    cells.iter().all(|c| {
        let first = profile(c[0]);
        c[1..].iter().all(|&v| profile(v) == first)
    })
}

#[derive(Default)]
struct Trace(u64);

impl Trace {
    fn mix(&mut self, x: u64) {
        // FNV-1a over the 8 bytes of x
        let mut h = if self.0 == 0 { 0xcbf2_9ce4_8422_2325 } else { self.0 };
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        self.0 = h;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (0..n as u32 - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn regular_graph_keeps_unit_partition() {
        let cycle = SimpleGraph::from_edges(6, (0..6u32).map(|i| (i, (i + 1) % 6))).unwrap();
        let p = refine(&cycle, &OrderedPartition::unit(6)).unwrap();
        assert_eq!(p.num_cells(), 1);
    }

    #[test]
    fn path_splits_by_degree_and_position() {
        let g = path(5);
        let p = refine(&g, &OrderedPartition::unit(5)).unwrap();
        assert!(is_equitable(&g, &p));
        let mut cells = p.cells();
        cells.sort();
        assert_eq!(cells, vec![vec![0, 4], vec![1, 3], vec![2]]);
    }

    #[test]
    fn individualize_then_refine_is_discrete_on_a_path() {
        let g = path(5);
        let mut p = refine(&g, &OrderedPartition::unit(5)).unwrap();
        let s = p.individualize(0);
        p.refine_with(&g, &[s]);
        assert!(p.is_discrete());
        assert!(is_equitable(&g, &p));
    }

    #[test]
    fn target_cell_is_first_smallest() {
        let p = OrderedPartition::from_cells(6, &[vec![0, 1, 2], vec![3], vec![4, 5]]).unwrap();
        assert_eq!(p.target_cell(), Some((4, 2)));
        assert!(OrderedPartition::from_cells(3, &[vec![0, 1]]).is_err());
        assert!(OrderedPartition::from_cells(3, &[vec![0, 1], vec![1, 2]]).is_err());
    }
}
