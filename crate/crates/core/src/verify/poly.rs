//! Membership predicates for the E-sets, checked against graph distances.

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec, QuadraticClass};
use crate::psl2;
use crate::report::{LemmaId, LemmaReport, ReportBuilder};

use super::discs::delta3_display;
use super::{conic_points, fmt_dist, DistanceCache, LemmaContext};

fn require(k: &FieldSpec, residue: u32) -> Result<()> {
    if !k.is_odd() || k.q() % 4 != residue {
        return Err(Error::WrongCongruence { q: k.q(), expected: residue });
    }
    Ok(())
}

/// `ω⁴ − (2 + 4/τ²)ω² + 1`.
fn poly1_quartic(k: &FieldSpec, tau: Fe, omega: Fe) -> Result<Fe> {
    let w2 = k.square(omega);
    let mid = k.add(k.from_int(2), k.div(k.from_int(4), k.square(tau))?);
    Ok(k.add(k.sub(k.square(w2), k.mul(mid, w2)), Fe::ONE))
}

/// Whether `t_ω ∈ E_{σ,τ}` (q ≡ 1 mod 4): the quartic is a nonzero square.
pub fn poly1_membership(k: &FieldSpec, tau: Fe, omega: Fe) -> Result<bool> {
    require(k, 1)?;
    if tau.is_zero() || omega.is_zero() {
        return Err(Error::Domain("τ and ω must be nonzero".into()));
    }
    Ok(k.is_square(poly1_quartic(k, tau, omega)?)? == QuadraticClass::NonzeroSquare)
}

/// The discriminant expression for `(1+α²)·z·s_{α,ω}`, `z = [[σ, τ], [τ, −σ]]`.
pub fn poly2_expression(k: &FieldSpec, alpha: Fe, omega: Fe, sigma: Fe, tau: Fe) -> Result<Fe> {
    let a2 = k.square(alpha);
    let a4 = k.square(a2);
    let w2 = k.square(omega);
    let wm2 = k.inv(w2)?;
    let c = k.sub(k.add(w2, wm2), k.from_int(2));
    let first = k.mul(
        k.mul(k.mul(k.from_int(4), alpha), k.sub(a2, Fe::ONE)),
        k.mul(c, k.mul(sigma, tau)),
    );
    let second = k.mul(
        k.add(k.sub(a4, k.mul(k.from_int(6), a2)), Fe::ONE),
        k.mul(c, k.square(tau)),
    );
    let inner = k.add(k.add(a4, k.mul(a2, w2)), k.add(k.mul(a2, wm2), Fe::ONE));
    Ok(k.sub(k.add(first, second), k.mul(k.from_int(4), inner)))
}

/// Whether `z = [[σ, τ], [τ, −σ]] ∈ E_{α,ω}` (q ≡ 3 mod 4): the expression is zero or a non-square.
pub fn poly2_membership(k: &FieldSpec, alpha: Fe, omega: Fe, sigma: Fe, tau: Fe) -> Result<bool> {
    require(k, 3)?;
    let minus_one = k.neg(Fe::ONE);
    if omega.is_zero() || omega == Fe::ONE || omega == minus_one {
        return Err(Error::Domain("ω must differ from 0, ±1".into()));
    }
    if k.add(k.square(sigma), k.square(tau)) != minus_one {
        return Err(Error::Domain("(σ, τ) is not on σ² + τ² = −1".into()));
    }
    Ok(k.is_square(poly2_expression(k, alpha, omega, sigma, tau)?)? != QuadraticClass::NonzeroSquare)
}

/// Compares the poly1 predicate with `d(t_ω, s_{σ,τ}) = 2` for every valid `(σ, τ, ω)`.
///
/// At `ω = ±1`, `t_ω` is `s` itself, which is adjacent to every `s_{σ,τ}`;
/// there the predicate holds and the distance is 1.
pub fn verify_poly1(ctx: &LemmaContext<'_>) -> Result<LemmaReport> {
    ctx.require_class(1)?;
    let k = ctx.field();
    let mut rep = ReportBuilder::new(LemmaId::Poly1, k.q(), true);
    let mut cache = DistanceCache::new(ctx.graph);
    let minus_one = k.neg(Fe::ONE);
    let (mut tuples, mut mismatches, mut identity_failures) = (0u64, 0u64, 0u64);
    for (sigma, tau) in conic_points(k) {
        if sigma.is_zero() || tau.is_zero() {
            continue;
        }
        let v = ctx.id(&psl2::s_sigma_tau(k, sigma, tau))?;
        if ctx.dist_t[v as usize] != 2 {
            mismatches += 1;
            rep.witness(format!("s_({sigma},{tau}) is not in the second disc of t"));
            continue;
        }
        let dist = cache.get(v).to_vec();
        for omega in k.nonzero() {
            tuples += 1;
            let tw = psl2::t_omega(k, omega)?;
            let d = dist[ctx.id(&tw)? as usize];
            let predicted = poly1_membership(k, tau, omega)?;
            let expected_d = if omega == Fe::ONE || omega == minus_one { 1 } else { 2 };
            let actual = if expected_d == 1 { d == 1 } else { d == 2 };
            let agree = if expected_d == 1 { predicted && actual } else { predicted == actual };
            if !agree {
                mismatches += 1;
                rep.witness(format!(
                    "σ = {sigma}, τ = {tau}, ω = {omega}: predicate {predicted}, distance {}",
                    fmt_dist(d)
                ));
            }
            // ω²/τ² · (τ²(ω⁻¹ − ω)² − 4) equals the quartic, and the bracket is tr(t_ω s)² − 4
            let tr = psl2::trace_pairing(k, &tw, &psl2::s_sigma_tau(k, sigma, tau));
            let phi = k.sub(k.square(tr), k.from_int(4));
            let phi_closed = k.sub(
                k.mul(k.square(tau), k.square(k.sub(k.inv(omega)?, omega))),
                k.from_int(4),
            );
            let scaled = k.mul(k.div(k.square(omega), k.square(tau))?, phi);
            if phi != phi_closed || scaled != poly1_quartic(k, tau, omega)? {
                identity_failures += 1;
                rep.witness(format!("discriminant identity fails at τ = {tau}, ω = {omega}"));
            }
        }
    }
    rep.measure("tuples", tuples);
    rep.measure("mismatches", mismatches);
    rep.measure("identity_failures", identity_failures);
    Ok(rep.finish(mismatches == 0 && identity_failures == 0))
}

/// Compares the poly2 predicate with `d(z, s_{α,ω}) = 2` for every valid
/// `(α, ω, σ, τ)`, and the displayed expression with the discriminant
/// `tr(M)² − 4 det(M)` of `M = (1+α²)·z·s_{α,ω}` computed from the matrices.
pub fn verify_poly2(ctx: &LemmaContext<'_>) -> Result<LemmaReport> {
    ctx.require_class(3)?;
    let k = ctx.field();
    let mut rep = ReportBuilder::new(LemmaId::Poly2, k.q(), true);
    let mut cache = DistanceCache::new(ctx.graph);
    let conic = conic_points(k);
    let minus_one = k.neg(Fe::ONE);
    let (mut tuples, mut mismatches, mut expression_mismatches) = (0u64, 0u64, 0u64);
    for alpha in k.elements() {
        let scale = k.add(Fe::ONE, k.square(alpha));
        for omega in k.nonzero().filter(|&w| w != Fe::ONE && w != minus_one) {
            let s = delta3_display(k, alpha, omega)?;
            let unscaled = s.scale(k, scale);
            let sid = ctx.id(&s)?;
            let dist = cache.get(sid).to_vec();
            for &(sigma, tau) in &conic {
                tuples += 1;
                let z = psl2::s_sigma_tau(k, sigma, tau);
                let d = dist[ctx.id(&z)? as usize];
                let predicted = poly2_membership(k, alpha, omega, sigma, tau)?;
                if predicted != (d == 2) {
                    mismatches += 1;
                    rep.witness(format!(
                        "α = {alpha}, ω = {omega}, σ = {sigma}, τ = {tau}: predicate {predicted}, distance {}",
                        fmt_dist(d)
                    ));
                }
                let m = z.mul(k, &unscaled);
                let direct = k.sub(k.square(m.trace(k)), k.mul(k.from_int(4), m.det(k)));
                if direct != poly2_expression(k, alpha, omega, sigma, tau)? {
                    expression_mismatches += 1;
                    rep.witness(format!(
                        "displayed discriminant differs from tr² − 4det at α = {alpha}, ω = {omega}, σ = {sigma}, τ = {tau}"
                    ));
                }
            }
        }
    }
    rep.measure("tuples", tuples);
    rep.measure("mismatches", mismatches);
    rep.measure("expression_mismatches", expression_mismatches);
    Ok(rep.finish(mismatches == 0 && expression_mismatches == 0))
}
