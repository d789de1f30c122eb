//! Deterministic Schreier–Sims.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::perm::Perm;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Level {
    base_point: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// Index into `reps` for points of the orbit, `NONE` elsewhere.
    slot: Vec<u32>,
    /// `reps[slot[x]]` maps the base point to `x`.
    reps: Vec<Perm>,
    reps_inv: Vec<Perm>,
}

impl Level {
    fn new(degree: usize, base_point: u32) -> Self {
        let mut level = Level {
            base_point,
            gens: Vec::new(),
            orbit: Vec::new(),
            slot: vec![NONE; degree],
            reps: Vec::new(),
            reps_inv: Vec::new(),
        };
        level.rebuild_orbit(degree);
        level
    }

    fn rebuild_orbit(&mut self, degree: usize) {
        self.slot.iter_mut().for_each(|s| *s = NONE);
        self.orbit.clear();
        self.reps.clear();
        self.reps_inv.clear();
        let id = Perm::identity(degree);
        self.slot[self.base_point as usize] = 0;
        self.orbit.push(self.base_point);
        self.reps_inv.push(id.clone());
        self.reps.push(id);
        let mut head = 0;
        while head < self.orbit.len() {
            let beta = self.orbit[head];
            let u = self.reps[head].clone();
            head += 1;
            for s in &self.gens {
                let gamma = s.apply(beta);
                if self.slot[gamma as usize] == NONE {
                    let rep = u.then(s);
                    self.slot[gamma as usize] = self.reps.len() as u32;
                    self.orbit.push(gamma);
                    self.reps_inv.push(rep.inverse());
                    self.reps.push(rep);
                }
            }
        }
    }

    fn rep_inv(&self, x: u32) -> Option<&Perm> {
        match self.slot[x as usize] {
            NONE => None,
            i => Some(&self.reps_inv[i as usize]),
        }
    }
}

/// Base and strong generating set of a permutation group.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    /// Builds a chain whose base starts with `base_prefix`.
    pub fn new(degree: usize, gens: &[Perm], base_prefix: &[u32]) -> Result<Self> {
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<u32> = Vec::new();
        for &b in base_prefix {
            if (b as usize) >= degree {
                return Err(Error::VertexOutOfRange(b as usize));
            }
            if !base.contains(&b) {
                base.push(b);
            }
        }
        for g in &gens {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(g.first_moved().expect("non-identity"));
            }
        }
        let mut chain = StabilizerChain {
            degree,
            levels: base.iter().map(|&b| Level::new(degree, b)).collect(),
        };
        for (i, level) in chain.levels.iter_mut().enumerate() {
            level.gens = gens
                .iter()
                .filter(|g| base[..i].iter().all(|&b| g.apply(b) == b))
                .cloned()
                .collect();
            level.rebuild_orbit(degree);
        }
        chain.complete();
        Ok(chain)
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            match self.find_missing_schreier_generator(lvl) {
                Some((residue, j)) => {
                    if j == self.levels.len() {
                        let b = residue.first_moved().expect("non-identity residue");
                        self.levels.push(Level::new(self.degree, b));
                    }
                    for l in lvl + 1..=j {
                        self.levels[l].gens.push(residue.clone());
                        self.levels[l].rebuild_orbit(self.degree);
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    fn find_missing_schreier_generator(&self, lvl: usize) -> Option<(Perm, usize)> {
        let level = &self.levels[lvl];
        for (k, &beta) in level.orbit.iter().enumerate() {
            let u = &level.reps[k];
            for s in &level.gens {
                let target = s.apply(beta);
                let h = u.then(s).then(level.rep_inv(target).expect("orbit is closed"));
                if h.is_identity() {
                    continue;
                }
                let (residue, j) = self.strip(h, lvl + 1);
                if j < self.levels.len() || !residue.is_identity() {
                    return Some((residue, j));
                }
            }
        }
        None
    }

    /// Sifts `g` from level `from`; returns the residue and the level where sifting stopped.
    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let beta = g.apply(level.base_point);
            match level.rep_inv(beta) {
                Some(ui) => g = g.then(ui),
                None => return (g, l),
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (residue, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && residue.is_identity()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn basic_orbit(&self, level: usize) -> &[u32] {
        &self.levels[level].orbit
    }

    pub fn in_basic_orbit(&self, level: usize, x: u32) -> bool {
        self.levels
            .get(level)
            .is_some_and(|l| l.slot[x as usize] != NONE)
    }

    /// Strong generators of the pointwise stabilizer of the first `level` base points.
    pub fn level_generators(&self, level: usize) -> &[Perm] {
        self.levels.get(level).map_or(&[], |l| &l.gens)
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        let mut out: Vec<Perm> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }
}

/// Exact order of the group generated by `gens`.
pub fn group_order(degree: usize, gens: &[Perm]) -> Result<BigUint> {
    Ok(StabilizerChain::new(degree, gens, &[])?.order())
}
