//! 2x2 matrices over GF(q), the involution class of PSL(2,q) and the
//! PΓL(2,q) action on it.
//!
//! Involutions of PSL(2,q) are represented by trace-zero determinant-one
//! matrices of SL(2,q) taken modulo ±I. The canonical representative is the
//! sign for which the first nonzero entry `e` (scanning `a, b, c, d`) has
//! `enc(e) < enc(-e)`. In characteristic 2 the sign is irrelevant and the
//! class consists of the q² − 1 nontrivial unipotent elements.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};
use crate::perm::Perm;

/// `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Fe,
}

impl Mat2 {
    pub const fn new(a: Fe, b: Fe, c: Fe, d: Fe) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_ints(k: &FieldSpec, a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(k.from_int(a), k.from_int(b), k.from_int(c), k.from_int(d))
    }

    pub const fn identity() -> Self {
        Mat2::new(Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ONE)
    }

    pub fn entries(&self) -> [Fe; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn mul(&self, k: &FieldSpec, o: &Mat2) -> Mat2 {
        let dot = |x, y, z, w| k.add(k.mul(x, y), k.mul(z, w));
        Mat2::new(
            dot(self.a, o.a, self.b, o.c),
            dot(self.a, o.b, self.b, o.d),
            dot(self.c, o.a, self.d, o.c),
            dot(self.c, o.b, self.d, o.d),
        )
    }

    pub fn det(&self, k: &FieldSpec) -> Fe {
        k.sub(k.mul(self.a, self.d), k.mul(self.b, self.c))
    }

    pub fn trace(&self, k: &FieldSpec) -> Fe {
        k.add(self.a, self.d)
    }

    pub fn neg(&self, k: &FieldSpec) -> Mat2 {
        self.map(|x| k.neg(x))
    }

    pub fn scale(&self, k: &FieldSpec, s: Fe) -> Mat2 {
        self.map(|x| k.mul(s, x))
    }

    pub fn map(&self, f: impl Fn(Fe) -> Fe) -> Mat2 {
        Mat2::new(f(self.a), f(self.b), f(self.c), f(self.d))
    }

    pub fn inverse(&self, k: &FieldSpec) -> Result<Mat2> {
        let di = k.inv(self.det(k))?;
        Ok(Mat2::new(self.d, k.neg(self.b), k.neg(self.c), self.a).scale(k, di))
    }

    /// `g^-1 * self * g`.
    pub fn conjugate_by(&self, k: &FieldSpec, g: &Mat2) -> Result<Mat2> {
        Ok(g.inverse(k)?.mul(k, self).mul(k, g))
    }
}

/// Sign-canonical representative of `±m`.
pub fn canonicalize(k: &FieldSpec, m: &Mat2) -> Mat2 {
    match m.entries().into_iter().find(|e| !e.is_zero()) {
        Some(e) if k.neg(e).enc() < e.enc() => m.neg(k),
        _ => *m,
    }
}

/// A vertex of the commuting involution graph: a canonical representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Involution(Mat2);

impl Involution {
    /// Canonicalizes `m` after checking it is a trace-zero SL(2,q) element other than ±I.
    pub fn new(k: &FieldSpec, m: Mat2) -> Result<Self> {
        if !m.trace(k).is_zero() || m.det(k) != Fe::ONE || m == Mat2::identity() {
            return Err(Error::NotAnInvolution);
        }
        Ok(Involution(canonicalize(k, &m)))
    }

    pub fn rep(&self) -> &Mat2 {
        &self.0
    }
}

fn check_q(k: &FieldSpec) -> Result<()> {
    if k.q() <= 3 {
        return Err(Error::QTooSmall(k.q()));
    }
    Ok(())
}

fn trace_zero_class(k: &FieldSpec) -> Vec<Involution> {
    // a^2 + bc = -1 (odd q) or a^2 + bc = 1 (even q; the same equation since -1 = 1)
    let minus_one = k.neg(Fe::ONE);
    let mut out = Vec::new();
    for a in k.elements() {
        let rhs = k.sub(minus_one, k.square(a));
        for b in k.nonzero() {
            let c = k.div(rhs, b).expect("b is nonzero");
            out.push(Mat2::new(a, b, c, k.neg(a)));
        }
        if rhs.is_zero() {
            for c in k.elements() {
                out.push(Mat2::new(a, Fe::ZERO, c, k.neg(a)));
            }
        }
    }
    let mut out: Vec<Involution> = out
        .into_iter()
        .filter(|m| *m != Mat2::identity())
        .map(|m| Involution(canonicalize(k, &m)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// All involutions of PSL(2,q), q odd, in canonical order.
pub fn enumerate_involutions(k: &FieldSpec) -> Result<Vec<Involution>> {
    check_q(k)?;
    if !k.is_odd() {
        return Err(Error::Domain(
            "even q: use enumerate_unipotent_involutions".into(),
        ));
    }
    Ok(trace_zero_class(k))
}

/// All involutions of SL(2,q) = PSL(2,q), q even.
pub fn enumerate_unipotent_involutions(k: &FieldSpec) -> Result<Vec<Involution>> {
    check_q(k)?;
    if k.is_odd() {
        return Err(Error::Domain("odd q: use enumerate_involutions".into()));
    }
    Ok(trace_zero_class(k))
}

/// Expected size of the involution class.
pub fn class_size(q: u32) -> usize {
    let q = q as usize;
    match q % 4 {
        1 => q * (q + 1) / 2,
        3 => q * (q - 1) / 2,
        _ => q * q - 1,
    }
}

/// The distinguished vertex `t`: `diag(ι, −ι)` for q ≡ 1 mod 4, `[[0,1],[−1,0]]` for q ≡ 3 mod 4.
pub fn base_vertex(k: &FieldSpec) -> Result<Involution> {
    if !k.is_odd() {
        return Err(Error::EvenCharacteristic);
    }
    let m = if k.q() % 4 == 1 {
        let iota = imaginary_unit(k)?;
        Mat2::new(iota, Fe::ZERO, Fe::ZERO, k.neg(iota))
    } else {
        Mat2::from_ints(k, 0, 1, -1, 0)
    };
    Involution::new(k, m)
}

/// The square root of −1 with smaller encoding (q ≡ 1 mod 4).
pub fn imaginary_unit(k: &FieldSpec) -> Result<Fe> {
    k.sqrt(k.neg(Fe::ONE))
}

/// `[[0, ω], [−1/ω, 0]]`.
pub fn t_omega(k: &FieldSpec, omega: Fe) -> Result<Mat2> {
    Ok(Mat2::new(Fe::ZERO, omega, k.neg(k.inv(omega)?), Fe::ZERO))
}

/// `[[σ, τ], [τ, −σ]]`.
pub fn s_sigma_tau(k: &FieldSpec, sigma: Fe, tau: Fe) -> Mat2 {
    Mat2::new(sigma, tau, tau, k.neg(sigma))
}

/// Whether two involutions commute in PSL(2,q).
///
/// For trace-zero matrices `xy + yx = tr(xy)·I`, so `xy = −yx` holds exactly
/// when `tr(xy) = 0`; in characteristic 2 this is `xy = yx`.
pub fn commutes_in_l(k: &FieldSpec, x: &Involution, y: &Involution) -> Result<bool> {
    if x == y {
        return Err(Error::SameVertex);
    }
    Ok(trace_pairing(k, x.rep(), y.rep()).is_zero())
}

/// `tr(xy)` for trace-zero `x`, `y`.
#[inline]
pub fn trace_pairing(k: &FieldSpec, x: &Mat2, y: &Mat2) -> Fe {
    let ae = k.mul(x.a, y.a);
    k.add(k.add(ae, ae), k.add(k.mul(x.b, y.c), k.mul(x.c, y.b)))
}

/// Vertex ids for canonical representatives.
#[derive(Clone, Debug)]
pub struct VertexTable {
    vertices: Vec<Involution>,
    index: HashMap<Mat2, u32>,
}

impl VertexTable {
    pub fn new(vertices: Vec<Involution>) -> Self {
        let index = vertices.iter().enumerate().map(|(i, v)| (*v.rep(), i as u32)).collect();
        VertexTable { vertices, index }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Involution] {
        &self.vertices
    }

    pub fn get(&self, id: u32) -> &Involution {
        &self.vertices[id as usize]
    }

    /// Id of the vertex `±m`.
    pub fn id_of(&self, k: &FieldSpec, m: &Mat2) -> Result<u32> {
        self.index.get(&canonicalize(k, m)).copied().ok_or(Error::UnknownVertex)
    }
}

/// An element of PΓL(2,q) acting on the involution class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjAction {
    /// `x ↦ g⁻¹ x g` for `g` in GL(2,q).
    Conjugate(Mat2),
    /// Entrywise `x ↦ x^(p^k)`.
    Frobenius(u32),
}

impl ProjAction {
    pub fn apply(&self, k: &FieldSpec, m: &Mat2) -> Result<Mat2> {
        let image = match self {
            ProjAction::Conjugate(g) => m.conjugate_by(k, g)?,
            ProjAction::Frobenius(e) => {
                let mut image = *m;
                for _ in 0..*e {
                    image = image.map(|x| k.frobenius(x));
                }
                image
            }
        };
        Ok(canonicalize(k, &image))
    }

    /// The induced permutation of the vertex table.
    pub fn permutation(&self, k: &FieldSpec, table: &VertexTable) -> Result<Perm> {
        let images = table
            .vertices()
            .iter()
            .map(|v| table.id_of(k, &self.apply(k, v.rep())?))
            .collect::<Result<Vec<u32>>>()?;
        Perm::from_images(images)
    }
}

/// Generators of PΓL(2,q): `diag(ν, 1)` and `[[−1, 1], [−1, 0]]` generate
/// PGL(2,q) (ν primitive), plus the Frobenius when f > 1.
pub fn pgammal_generators(k: &FieldSpec) -> Vec<ProjAction> {
    let mut gens = vec![
        ProjAction::Conjugate(Mat2::new(k.primitive(), Fe::ZERO, Fe::ZERO, Fe::ONE)),
        ProjAction::Conjugate(Mat2::from_ints(k, -1, 1, -1, 0)),
    ];
    if k.f() > 1 {
        gens.push(ProjAction::Frobenius(1));
    }
    gens
}

/// Transvections `[[1, ν^i], [0, 1]]`, `[[1, 0], [ν^i, 1]]`, `i < f`, which generate SL(2,q).
pub fn sl2_generators(k: &FieldSpec) -> Vec<ProjAction> {
    let mut gens = Vec::new();
    let mut x = Fe::ONE;
    for _ in 0..k.f() {
        gens.push(ProjAction::Conjugate(Mat2::new(Fe::ONE, x, Fe::ZERO, Fe::ONE)));
        gens.push(ProjAction::Conjugate(Mat2::new(Fe::ONE, Fe::ZERO, x, Fe::ONE)));
        x = k.mul(x, k.primitive());
    }
    gens
}

/// `g_α = [[1, α], [−α, 1]]`, centralizing `t` for q ≡ 3 mod 4.
pub fn g_alpha(k: &FieldSpec, alpha: Fe) -> Mat2 {
    Mat2::new(Fe::ONE, alpha, k.neg(alpha), Fe::ONE)
}

/// `h_α = [[α, 1], [1, −α]]`, inverting `t` for q ≡ 3 mod 4.
pub fn h_alpha(k: &FieldSpec, alpha: Fe) -> Mat2 {
    Mat2::new(alpha, Fe::ONE, Fe::ONE, k.neg(alpha))
}

/// One `(ω, t_ω)` per class `{±ω, ±1/ω}` of `ω ≠ 0, ±1`, ω the least encoding in its class.
pub fn gt_orbit_reps_delta3(k: &FieldSpec) -> Result<Vec<(Fe, Involution)>> {
    if !k.is_odd() || k.q() % 4 != 3 {
        return Err(Error::WrongCongruence { q: k.q(), expected: 3 });
    }
    let minus_one = k.neg(Fe::ONE);
    let mut seen = vec![false; k.q() as usize];
    let mut reps = Vec::new();
    for w in k.nonzero().filter(|&w| w != Fe::ONE && w != minus_one) {
        if seen[w.enc() as usize] {
            continue;
        }
        let wi = k.inv(w)?;
        for x in [w, k.neg(w), wi, k.neg(wi)] {
            seen[x.enc() as usize] = true;
        }
        reps.push((w, Involution::new(k, t_omega(k, w)?)?));
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    /// Brute force: count order-2 elements of PSL(2,q) by walking SL(2,q).
    fn brute_force_involution_count(k: &FieldSpec) -> usize {
        let minus_i = Mat2::identity().neg(k);
        let mut count = 0;
        for a in k.elements() {
            for b in k.elements() {
                for c in k.elements() {
                    for d in k.elements() {
                        let m = Mat2::new(a, b, c, d);
                        if m.det(k) != Fe::ONE {
                            continue;
                        }
                        let sq = m.mul(k, &m);
                        if m != Mat2::identity() && m != minus_i && (sq == Mat2::identity() || sq == minus_i) {
                            count += 1;
                        }
                    }
                }
            }
        }
        // each projective class counted once per sign
        if k.is_odd() { count / 2 } else { count }
    }

    #[test]
    fn involution_counts_match_brute_force() {
        for q in [5u64, 7, 13] {
            let k = gf(q);
            let x = enumerate_involutions(&k).unwrap();
            assert_eq!(x.len(), brute_force_involution_count(&k), "q = {q}");
            assert_eq!(x.len(), class_size(q as u32));
        }
        assert_eq!(enumerate_involutions(&gf(13)).unwrap().len(), 91);
        assert_eq!(enumerate_involutions(&gf(7)).unwrap().len(), 21);
        assert_eq!(enumerate_involutions(&gf(5)).unwrap().len(), 15);
        let k4 = gf(4);
        assert_eq!(enumerate_unipotent_involutions(&k4).unwrap().len(), brute_force_involution_count(&k4));
    }

    #[test]
    fn enumeration_is_sorted_and_canonical() {
        let k = gf(9);
        let x = enumerate_involutions(&k).unwrap();
        assert!(x.windows(2).all(|w| w[0] < w[1]));
        for v in &x {
            assert_eq!(canonicalize(&k, v.rep()), *v.rep());
            assert_eq!(canonicalize(&k, &v.rep().neg(&k)), *v.rep());
        }
    }

    #[test]
    fn class_size_by_congruence() {
        for q in [5u64, 7, 9, 11, 17, 19, 25, 27] {
            assert_eq!(enumerate_involutions(&gf(q)).unwrap().len(), class_size(q as u32));
        }
        for q in [4u64, 8, 16] {
            assert_eq!(enumerate_unipotent_involutions(&gf(q)).unwrap().len(), class_size(q as u32));
        }
    }

    #[test]
    fn small_q_and_parity_errors() {
        assert_eq!(enumerate_involutions(&gf(3)).unwrap_err(), Error::QTooSmall(3));
        assert!(enumerate_involutions(&gf(8)).is_err());
        assert!(enumerate_unipotent_involutions(&gf(7)).is_err());
    }

    #[test]
    fn base_vertices() {
        let k = gf(13);
        let t = base_vertex(&k).unwrap();
        assert_eq!(*t.rep(), Mat2::from_ints(&k, 5, 0, 0, -5));
        let k7 = gf(7);
        let t7 = base_vertex(&k7).unwrap();
        assert_eq!(*t7.rep(), Mat2::from_ints(&k7, 0, 1, -1, 0));
        assert_eq!(Involution::new(&k7, t7.rep().neg(&k7)).unwrap(), t7);
    }

    #[test]
    fn commuting_matches_matrix_products() {
        for q in [7u64, 9, 8] {
            let k = gf(q);
            let x = trace_zero_class(&k);
            for u in &x {
                for v in &x {
                    if u == v {
                        assert_eq!(commutes_in_l(&k, u, v), Err(Error::SameVertex));
                        continue;
                    }
                    let uv = u.rep().mul(&k, v.rep());
                    let vu = v.rep().mul(&k, u.rep());
                    assert_eq!(commutes_in_l(&k, u, v).unwrap(), uv == vu.neg(&k));
                }
            }
        }
    }

    #[test]
    fn displayed_neighbours_of_t_commute() {
        let k = gf(13);
        let t = base_vertex(&k).unwrap();
        for w in k.nonzero() {
            let tw = Involution::new(&k, t_omega(&k, w).unwrap()).unwrap();
            assert!(commutes_in_l(&k, &t, &tw).unwrap());
        }
        let k = gf(7);
        let t = base_vertex(&k).unwrap();
        let m1 = k.neg(Fe::ONE);
        let mut found = 0;
        for s in k.elements() {
            for u in k.elements() {
                if k.add(k.square(s), k.square(u)) == m1 {
                    let x = Involution::new(&k, s_sigma_tau(&k, s, u)).unwrap();
                    assert!(commutes_in_l(&k, &t, &x).unwrap());
                    found += 1;
                }
            }
        }
        assert_eq!(found, 8);
    }

    #[test]
    fn generator_counts() {
        assert_eq!(pgammal_generators(&gf(9)).len(), 3);
        assert_eq!(pgammal_generators(&gf(7)).len(), 2);
    }

    #[test]
    fn delta3_orbit_representatives() {
        // Oracle: classes {±w, ±1/w} in GF(q)* \ {±1} by brute force over integers mod p.
        for p in [7u32, 11, 19] {
            let inv = |w: u32| (1..p).find(|x| x * w % p == 1).unwrap();
            let mut classes: Vec<Vec<u32>> = Vec::new();
            for w in 2..p - 1 {
                let mut c = vec![w, p - w, inv(w), p - inv(w)];
                c.sort();
                c.dedup();
                if !classes.contains(&c) {
                    classes.push(c);
                }
            }
            let k = gf(p as u64);
            let reps = gt_orbit_reps_delta3(&k).unwrap();
            let got: Vec<u32> = reps.iter().map(|(w, _)| w.enc()).collect();
            let want: Vec<u32> = classes.iter().map(|c| c[0]).collect();
            assert_eq!(got, want);
            assert_eq!(reps.len() as u32, (p - 3) / 4);
        }
        assert_eq!(gt_orbit_reps_delta3(&gf(7)).unwrap().len(), 1);
        assert_eq!(gt_orbit_reps_delta3(&gf(11)).unwrap().len(), 2);
        assert!(gt_orbit_reps_delta3(&gf(13)).is_err());
    }

    #[test]
    fn actions_permute_the_class() {
        for q in [7u64, 9, 25] {
            let k = gf(q);
            let table = VertexTable::new(enumerate_involutions(&k).unwrap());
            for a in pgammal_generators(&k).iter().chain(sl2_generators(&k).iter()) {
                let p = a.permutation(&k, &table).unwrap();
                assert_eq!(p.degree(), table.len());
            }
        }
    }
}
