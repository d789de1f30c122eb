//! Property checks shared by the `properties` tests and the acceptance harness.
#![allow(dead_code)]

use std::sync::Arc;

use cig_core::autgrp::{self, is_equitable, refine, OrderedPartition};
use cig_core::field::prime_power;
use cig_core::weil::{self, count_solutions, count_solutions_brute_force, is_perfect_square};
use cig_core::{build_graph, Fe, FieldSpec, InvolutionGraph, Perm, Poly, QuadraticClass, SearchOptions};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn gf(q: u32) -> Arc<FieldSpec> {
    Arc::new(FieldSpec::from_order(q as u64).expect("prime power"))
}

pub fn build(q: u32) -> InvolutionGraph {
    build_graph(gf(q)).expect("graph builds")
}

pub fn prime_powers(lo: u32, hi: u32) -> Vec<u32> {
    (lo..=hi).filter(|&q| prime_power(q as u64).is_some()).collect()
}

pub fn odd_prime_powers(lo: u32, hi: u32) -> Vec<u32> {
    prime_powers(lo, hi).into_iter().filter(|q| q % 2 == 1).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Schoolbook product of coefficient vectors reduced by the monic modulus.
fn naive_mul(k: &FieldSpec, a: Fe, b: Fe) -> Vec<u32> {
    let (p, f) = (k.p() as u64, k.f() as usize);
    let (x, y) = (k.coeffs(a), k.coeffs(b));
    let mut prod = vec![0u64; 2 * f];
    for i in 0..f {
        for j in 0..f {
            prod[i + j] = (prod[i + j] + x[i] as u64 * y[j] as u64) % p;
        }
    }
    let m = k.modulus();
    for top in (f..2 * f).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for i in 0..=f {
            let sub = c * m[i] as u64 % p;
            prod[top - f + i] = (prod[top - f + i] + p - sub) % p;
        }
    }
    prod[..f].iter().map(|&c| c as u32).collect()
}

/// Exhaustive field axioms, multiplication against a schoolbook oracle,
/// Frobenius, and the quadratic character against the set of squares.
pub fn field_axioms(q: u32) -> Check {
    let k = gf(q);
    let els: Vec<Fe> = k.elements().collect();
    ensure(els.len() == q as usize, || format!("GF({q}) has {} elements", els.len()))?;
    let m = k.modulus();
    ensure(m.len() == k.f() as usize + 1 && m[k.f() as usize] == 1, || format!("modulus {m:?} is not monic"))?;
    for &a in &els {
        ensure(k.from_coeffs(&k.coeffs(a)) == Ok(a), || format!("coefficient round trip fails at {a}"))?;
        ensure(k.add(a, k.neg(a)) == Fe::ZERO && k.add(a, Fe::ZERO) == a, || format!("additive identity/inverse at {a}"))?;
        ensure(k.mul(a, Fe::ONE) == a && k.mul(a, Fe::ZERO) == Fe::ZERO, || format!("multiplicative identity at {a}"))?;
        if !a.is_zero() {
            let inv = k.inv(a).map_err(|e| e.to_string())?;
            ensure(k.mul(a, inv) == Fe::ONE, || format!("inverse of {a}"))?;
        }
        for &b in &els {
            ensure(k.add(a, b) == k.add(b, a), || format!("a + b ≠ b + a at {a}, {b}"))?;
            ensure(k.mul(a, b) == k.mul(b, a), || format!("ab ≠ ba at {a}, {b}"))?;
            let naive = naive_mul(&k, a, b);
            ensure(k.coeffs(k.mul(a, b)) == naive, || format!("{a}·{b} disagrees with the schoolbook product"))?;
            ensure(k.sub(k.add(a, b), b) == a, || format!("(a + b) − b ≠ a at {a}, {b}"))?;
        }
    }
    // associativity and distributivity on all triples
    for &a in &els {
        for &b in &els {
            let ab = k.mul(a, b);
            let a_plus_b = k.add(a, b);
            for &c in &els {
                if k.mul(ab, c) != k.mul(a, k.mul(b, c)) || k.add(a_plus_b, c) != k.add(a, k.add(b, c)) {
                    return Err(format!("associativity fails at {a}, {b}, {c}"));
                }
                if k.mul(a, k.add(b, c)) != k.add(ab, k.mul(a, c)) {
                    return Err(format!("distributivity fails at {a}, {b}, {c}"));
                }
            }
        }
    }
    // the primitive element generates the multiplicative group
    let g = k.primitive();
    let mut x = Fe::ONE;
    let mut order = 0;
    loop {
        x = k.mul(x, g);
        order += 1;
        if x == Fe::ONE {
            break;
        }
    }
    ensure(order == q - 1, || format!("primitive element has order {order}"))?;
    // Frobenius is a field automorphism of order f fixing exactly the prime field
    let mut fixed = 0;
    for &a in &els {
        let fa = k.frobenius(a);
        if fa == a {
            fixed += 1;
        }
        let mut y = a;
        for _ in 0..k.f() {
            y = k.frobenius(y);
        }
        ensure(y == a, || format!("Frobenius^f moves {a}"))?;
        for &b in els.iter().step_by(7) {
            ensure(k.frobenius(k.add(a, b)) == k.add(fa, k.frobenius(b)), || format!("Frobenius not additive at {a}, {b}"))?;
            ensure(k.frobenius(k.mul(a, b)) == k.mul(fa, k.frobenius(b)), || format!("Frobenius not multiplicative at {a}, {b}"))?;
        }
    }
    ensure(fixed == k.p(), || format!("Frobenius fixes {fixed} elements"))?;
    if k.is_odd() {
        let mut squares = vec![false; q as usize];
        for &a in &els {
            squares[k.square(a).enc() as usize] = true;
        }
        for &a in &els {
            let class = k.is_square(a).map_err(|e| e.to_string())?;
            let expected = if a.is_zero() {
                QuadraticClass::Zero
            } else if squares[a.enc() as usize] {
                QuadraticClass::NonzeroSquare
            } else {
                QuadraticClass::NonSquare
            };
            ensure(class == expected, || format!("quadratic class of {a}"))?;
            match k.sqrt(a) {
                Ok(r) => {
                    ensure(k.square(r) == a && r.enc() <= k.neg(r).enc(), || format!("sqrt({a}) = {r}"))?;
                }
                Err(_) => ensure(expected == QuadraticClass::NonSquare, || format!("sqrt({a}) refused"))?,
            }
        }
    }
    Ok(())
}

/// `refine` reaches an equitable fixed point from several starting partitions.
pub fn refinement_idempotent(q: u32) -> Check {
    let g = build(q);
    let sg = g.graph();
    let n = sg.n();
    let mut starts = vec![OrderedPartition::unit(n)];
    for v in [0, n as u32 / 2, n as u32 - 1] {
        let mut p = refine(sg, &OrderedPartition::unit(n)).map_err(|e| e.to_string())?;
        p.individualize(v);
        starts.push(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut rng);
    let cut = n / 3;
    starts.push(OrderedPartition::from_cells(n, &[order[..cut].to_vec(), order[cut..].to_vec()]).map_err(|e| e.to_string())?);
    for (i, p) in starts.iter().enumerate() {
        let once = refine(sg, p).map_err(|e| e.to_string())?;
        let twice = refine(sg, &once).map_err(|e| e.to_string())?;
        ensure(is_equitable(sg, &once), || format!("q = {q}: start {i} refines to a non-equitable partition"))?;
        ensure(once.cells() == twice.cells(), || format!("q = {q}: refinement of start {i} is not idempotent"))?;
    }
    Ok(())
}

/// Unseeded search on a randomly relabelled copy finds a group of the same order.
pub fn relabel_invariant(q: u32, seed: u64) -> Check {
    let g = build(q);
    let sg = g.graph();
    let base = autgrp::automorphism_group(sg, &SearchOptions::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images: Vec<u32> = (0..sg.n() as u32).collect();
    images.shuffle(&mut rng);
    let r = Perm::from_images(images).map_err(|e| e.to_string())?;
    let h = sg.relabel(&r).map_err(|e| e.to_string())?;
    let relabelled = autgrp::automorphism_group(&h, &SearchOptions::default()).map_err(|e| e.to_string())?;
    ensure(base.order() == relabelled.order(), || {
        format!("q = {q}: |Aut| = {} but {} after relabelling", base.order(), relabelled.order())
    })?;
    ensure(relabelled.generators().iter().all(|p| h.is_automorphism(p)), || format!("q = {q}: bad generator"))?;
    let expected = autgrp::pgammal_order(g.field().p(), g.field().f());
    ensure(base.order() == expected, || format!("q = {q}: |Aut| = {}, expected {expected}", base.order()))
}

/// Seeding the search with the PΓL(2,q) generators does not change the group.
pub fn seeded_unseeded_agree(q: u32) -> Check {
    let g = build(q);
    let seed = autgrp::pgammal_permutations(&g).map_err(|e| e.to_string())?;
    let plain = autgrp::automorphism_group(g.graph(), &SearchOptions::default()).map_err(|e| e.to_string())?;
    let seeded = autgrp::automorphism_group(g.graph(), &SearchOptions { timeout: None, seed }).map_err(|e| e.to_string())?;
    ensure(plain.order() == seeded.order(), || {
        format!("q = {q}: unseeded {} vs seeded {}", plain.order(), seeded.order())
    })?;
    ensure(plain.generators().iter().all(|p| seeded.contains(p)), || format!("q = {q}: groups differ"))?;
    ensure(seeded.generators().iter().all(|p| plain.contains(p)), || format!("q = {q}: groups differ"))
}

/// `|A| = |X|·|A_t|` at every vertex.
pub fn orbit_stabilizer(q: u32) -> Check {
    let g = build(q);
    let seed = autgrp::pgammal_permutations(&g).map_err(|e| e.to_string())?;
    let a = autgrp::automorphism_group(g.graph(), &SearchOptions { timeout: None, seed }).map_err(|e| e.to_string())?;
    ensure(a.is_transitive(), || format!("q = {q}: not vertex-transitive"))?;
    let n = BigUint::from(g.n());
    for v in 0..g.n() as u32 {
        let stab = a.stabilizer_order(v).map_err(|e| e.to_string())?;
        ensure(&n * &stab == a.order(), || format!("q = {q}: |A| ≠ |X|·|A_v| at v = {v}"))?;
    }
    Ok(())
}

fn random_poly(k: &FieldSpec, rng: &mut ChaCha8Rng, max_degree: usize) -> Poly {
    let deg = rng.gen_range(0..=max_degree);
    let coeffs = (0..=deg).map(|_| k.element(rng.gen_range(0..k.q())).expect("< q")).collect();
    Poly::new(coeffs)
}

/// The character-sum count equals direct enumeration of `(x, y)` pairs.
pub fn counts_match_brute_force(q: u32, polys: usize, seed: u64) -> Check {
    let k = gf(q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ q as u64);
    for i in 0..polys {
        let f = random_poly(&k, &mut rng, 8);
        let fast = count_solutions(&k, &f).map_err(|e| e.to_string())?.n;
        let slow = count_solutions_brute_force(&k, &f);
        ensure(fast == slow, || format!("q = {q}, polynomial {i} ({:?}): {fast} vs {slow}", f.coeffs()))?;
    }
    Ok(())
}

/// `c·g²` is a square over the closure; multiplying in a new simple root breaks that.
pub fn perfect_square_oracle(q: u32, trials: usize, seed: u64) -> Check {
    let k = gf(q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (q as u64) << 8);
    for _ in 0..trials {
        let mut g = random_poly(&k, &mut rng, 4);
        if g.is_zero() {
            g = Poly::constant(Fe::ONE);
        }
        let c = k.element(rng.gen_range(1..q)).expect("< q");
        let sq = g.mul(&k, &g).scale(&k, c);
        ensure(is_perfect_square(&k, &sq) == Ok(true), || format!("q = {q}: c·g² not recognised, g = {:?}", g.coeffs()))?;
        // a root of multiplicity exactly one makes the product a non-square
        let r = k.elements().find(|&r| !g.eval(&k, r).is_zero());
        if let Some(r) = r {
            let broken = sq.mul(&k, &Poly::linear(&k, r));
            ensure(is_perfect_square(&k, &broken) == Ok(false), || format!("q = {q}: (x − {r})·c·g² called a square"))?;
        }
        let d = weil::squarefree_part_degree(&k, &sq).map_err(|e| e.to_string())?;
        let roots_in_k = k.elements().filter(|&x| g.eval(&k, x).is_zero()).count();
        ensure(d >= roots_in_k, || format!("q = {q}: {d} distinct roots but {roots_in_k} in GF(q)"))?;
    }
    Ok(())
}
