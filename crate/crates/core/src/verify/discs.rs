//! The explicit disc sets around `t`, materialized and compared with BFS.

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec, QuadraticClass};
use crate::psl2::{self, Involution, Mat2};
use crate::report::{LemmaId, LemmaReport, ReportBuilder};

use super::{conic_points, LemmaContext};

/// Above this many vertices the diameter is read off the eccentricity of `t`
/// (the graph is vertex-transitive).
const FULL_DIAMETER_MAX_VERTICES: usize = 1000;

/// Disc sets produced by the closed-form descriptions, as sorted vertex ids.
#[derive(Clone, Debug, Default)]
pub struct DiscDisplays {
    pub discs: [Vec<u32>; 4],
    /// Δ₃ rebuilt as a union of `G_t`-orbits of the `t_ω` (q ≡ 3 mod 4 only).
    pub delta3_orbits: Option<Vec<u32>>,
    /// Displayed matrices that are not vertices.
    pub non_vertices: Vec<String>,
    /// The q ≡ 3 mod 4 description of Δ₂ also produces `t` itself (β = −γ = ±1);
    /// `t` is removed from `discs[2]` and this flag records that it was there.
    pub delta2_display_contains_t: bool,
}

struct Collector<'c, 'a> {
    ctx: &'c LemmaContext<'a>,
    bad: Vec<String>,
}

impl Collector<'_, '_> {
    fn set(&mut self, mats: impl IntoIterator<Item = Mat2>) -> Vec<u32> {
        let k = self.ctx.field();
        let mut ids = Vec::new();
        for m in mats {
            match Involution::new(k, m).and_then(|v| self.ctx.id(v.rep())) {
                Ok(id) => ids.push(id),
                Err(e) => self.bad.push(format!("{m:?}: {e}")),
            }
        }
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// `(1/(1+α²))·[[α(ω⁻¹−ω), α²ω⁻¹+ω], [−α²ω−ω⁻¹, −α(ω⁻¹−ω)]]`, i.e. `t_ω` conjugated by `g_α`.
pub(crate) fn delta3_display(k: &FieldSpec, alpha: Fe, omega: Fe) -> Result<Mat2> {
    let scale = k.add(Fe::ONE, k.square(alpha));
    if scale.is_zero() {
        // −1 is a non-square when q ≡ 3 mod 4
        return Err(Error::Invariant(format!("1 + α² = 0 at α = {alpha}")));
    }
    let wi = k.inv(omega)?;
    let a2 = k.square(alpha);
    let diff = k.sub(wi, omega);
    let m = Mat2::new(
        k.mul(alpha, diff),
        k.add(k.mul(a2, wi), omega),
        k.neg(k.add(k.mul(a2, omega), wi)),
        k.neg(k.mul(alpha, diff)),
    );
    Ok(m.scale(k, k.inv(scale)?))
}

/// `(1/(1+α²))·[[α(ω−ω⁻¹), −α²ω−ω⁻¹], [α²ω⁻¹+ω, −α(ω−ω⁻¹)]]`, i.e. `t_ω` conjugated by `h_α`.
fn h_display(k: &FieldSpec, alpha: Fe, omega: Fe) -> Result<Mat2> {
    let scale = k.add(Fe::ONE, k.square(alpha));
    let wi = k.inv(omega)?;
    let a2 = k.square(alpha);
    let diff = k.sub(omega, wi);
    let m = Mat2::new(
        k.mul(alpha, diff),
        k.neg(k.add(k.mul(a2, omega), wi)),
        k.add(k.mul(a2, wi), omega),
        k.neg(k.mul(alpha, diff)),
    );
    Ok(m.scale(k, k.inv(scale)?))
}

fn omegas(k: &FieldSpec) -> impl Iterator<Item = Fe> + '_ {
    let minus_one = k.neg(Fe::ONE);
    k.nonzero().filter(move |&w| w != Fe::ONE && w != minus_one)
}

/// Builds the displayed disc sets for the congruence class of q.
pub fn disc_displays(ctx: &LemmaContext<'_>) -> Result<DiscDisplays> {
    let k = ctx.field();
    if !k.is_odd() {
        return Err(Error::EvenCharacteristic);
    }
    let mut c = Collector { ctx, bad: Vec::new() };
    let mut out = DiscDisplays::default();
    out.discs[0] = vec![ctx.t];
    let minus_one = k.neg(Fe::ONE);
    if k.q() % 4 == 1 {
        let iota = psl2::imaginary_unit(k)?;
        out.discs[1] = c.set(k.nonzero().map(|w| psl2::t_omega(k, w).expect("w ≠ 0")));
        let mut d2 = Vec::new();
        let mut d3 = Vec::new();
        for s in k.nonzero() {
            for tau in k.nonzero() {
                for mu in k.nonzero() {
                    let mu2 = k.square(mu);
                    if k.add(k.square(s), k.mul(mu2, k.square(tau))) == minus_one {
                        d2.push(Mat2::new(s, k.mul(mu2, tau), tau, k.neg(s)));
                    }
                    if k.is_square(mu)? == QuadraticClass::NonSquare
                        && k.add(k.square(s), k.mul(mu, k.square(tau))) == minus_one
                    {
                        d3.push(Mat2::new(s, k.mul(mu, tau), tau, k.neg(s)));
                    }
                }
            }
        }
        for a in k.nonzero() {
            d3.push(Mat2::new(iota, a, Fe::ZERO, k.neg(iota)));
            d3.push(Mat2::new(iota, Fe::ZERO, a, k.neg(iota)));
        }
        out.discs[2] = c.set(d2);
        out.discs[3] = c.set(d3);
    } else {
        let conic = conic_points(k);
        out.discs[1] = c.set(conic.iter().map(|&(s, t)| psl2::s_sigma_tau(k, s, t)));
        let mut d2 = Vec::new();
        let two = k.from_int(2);
        for &(s, tau) in &conic {
            // σ ≠ 0 on this conic: σ = 0 would need τ² = −1
            let coef = k.div(tau, k.mul(two, s))?;
            for beta in k.elements() {
                for gamma in k.elements().filter(|&g| g != beta) {
                    let a = k.mul(k.add(beta, gamma), coef);
                    if k.add(k.square(a), k.mul(beta, gamma)) == minus_one {
                        d2.push(Mat2::new(k.neg(a), beta, gamma, a));
                    }
                }
            }
        }
        out.discs[2] = c.set(d2);
        out.delta2_display_contains_t = out.discs[2].contains(&ctx.t);
        out.discs[2].retain(|&v| v != ctx.t);
        let mut d3 = Vec::new();
        for a in k.elements() {
            for w in omegas(k) {
                d3.push(delta3_display(k, a, w)?);
            }
        }
        out.discs[3] = c.set(d3);
        let mut orbits = Vec::new();
        for (w, _) in psl2::gt_orbit_reps_delta3(k)? {
            orbits.push(Mat2::new(Fe::ZERO, k.neg(k.inv(w)?), w, Fe::ZERO));
            for a in k.elements() {
                orbits.push(delta3_display(k, a, w)?);
            }
        }
        out.delta3_orbits = Some(c.set(orbits));
    }
    out.non_vertices = c.bad;
    Ok(out)
}

fn compare(rep: &mut ReportBuilder, label: &str, displayed: &[u32], actual: &[u32]) -> bool {
    let missing: Vec<u32> = actual.iter().copied().filter(|v| displayed.binary_search(v).is_err()).collect();
    let extra: Vec<u32> = displayed.iter().copied().filter(|v| actual.binary_search(v).is_err()).collect();
    for v in &missing {
        rep.witness(format!("{label}: vertex {v} is in the BFS disc but not the display"));
    }
    for v in &extra {
        rep.witness(format!("{label}: vertex {v} is displayed but not in the BFS disc"));
    }
    missing.is_empty() && extra.is_empty()
}

/// Conjugation by `g_α`, `h_α` agrees with the closed forms, and the `G_t`-orbit
/// of `t_ω` contains `t_λ` exactly for `λ ∈ {±ω, ±1/ω}`.
fn check_orbit_formulas(ctx: &LemmaContext<'_>, rep: &mut ReportBuilder) -> Result<bool> {
    let k = ctx.field();
    let mut ok = true;
    for w in omegas(k) {
        let tw = psl2::t_omega(k, w)?;
        let mut orbit = Vec::new();
        for a in k.elements() {
            let by_g = ctx.id(&tw.conjugate_by(k, &psl2::g_alpha(k, a))?)?;
            let by_h = ctx.id(&tw.conjugate_by(k, &psl2::h_alpha(k, a))?)?;
            if by_g != ctx.id(&delta3_display(k, a, w)?)? || by_h != ctx.id(&h_display(k, a, w)?)? {
                ok = false;
                rep.witness(format!("conjugation formula fails at α = {a}, ω = {w}"));
            }
            orbit.push(by_g);
            orbit.push(by_h);
        }
        let wi = k.inv(w)?;
        let fused = [w, k.neg(w), wi, k.neg(wi)];
        for l in omegas(k) {
            let tl = ctx.id(&psl2::t_omega(k, l)?)?;
            if orbit.contains(&tl) != fused.contains(&l) {
                ok = false;
                rep.witness(format!("orbit fusion of t_{w} and t_{l} is wrong"));
            }
        }
    }
    Ok(ok)
}

/// Checks the explicit disc descriptions and diameter 3.
pub fn verify_disc_formulas(ctx: &LemmaContext<'_>) -> Result<LemmaReport> {
    let k = ctx.field();
    let q = k.q();
    let in_range = k.is_odd() && ((q % 4 == 1 && q >= 17) || (q % 4 == 3 && q > 3));
    let mut rep = ReportBuilder::new(LemmaId::Disks, q, in_range);
    let shown = disc_displays(ctx)?;
    let mut holds = shown.non_vertices.is_empty();
    for m in &shown.non_vertices {
        rep.witness(format!("displayed matrix is not a vertex: {m}"));
    }
    for i in 0..4 {
        holds &= compare(&mut rep, &format!("disc {i}"), &shown.discs[i], ctx.discs.disc(i));
    }
    if let Some(orbits) = &shown.delta3_orbits {
        holds &= compare(&mut rep, "disc 3 (orbit union)", orbits, ctx.discs.disc(3));
        holds &= check_orbit_formulas(ctx, &mut rep)?;
        let reps = psl2::gt_orbit_reps_delta3(k)?.len();
        rep.measure("delta3_orbit_representatives", reps);
        rep.measure("delta2_display_contains_t", shown.delta2_display_contains_t);
    }
    if !ctx.discs.unreachable.is_empty() {
        holds = false;
        rep.witness(format!("{} vertices unreachable from t", ctx.discs.unreachable.len()));
    }
    let diameter = if ctx.graph.n() <= FULL_DIAMETER_MAX_VERTICES {
        ctx.graph.graph().diameter()
    } else if ctx.discs.unreachable.is_empty() {
        Some(ctx.discs.eccentricity())
    } else {
        None
    };
    if diameter != Some(3) {
        holds = false;
        rep.witness(format!("diameter is {diameter:?}, not 3"));
    }
    rep.measure("diameter", diameter);
    rep.measure(
        "disc_sizes",
        ctx.discs.discs.iter().map(Vec::len).collect::<Vec<_>>(),
    );
    Ok(rep.finish(holds))
}
