//! Scalar side of the solution: Q-polynomials, boundary kernels, the
//! inhomogeneous T−Q relation for `Λ(u)`, the nested `Λ̂(λ)`, Bethe equation
//! residuals and the energy.
//!
//! Level-1 quantities take `u`; nested ones take `λ = u + η/2`. Level-2 roots
//! are stored as `ν`, with `w = ν + η/2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{Complex, ONE, ZERO};
use crate::kernels::{principal_sqrt, ModelParams, RelationReport};

/// Level-1 roots `u` (`M` of them) and level-2 roots `ν` (`M₂ ≤ M`).
///
/// Off-diagonal boundaries force `M₂ = M`; with `h = 0` level-2 roots may
/// sit at infinity, which is expressed by dropping them.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BetheRootSet {
    pub u: Vec<Complex>,
    pub nu: Vec<Complex>,
}

impl BetheRootSet {
    pub fn new(u: Vec<Complex>, nu: Vec<Complex>) -> Result<Self> {
        if nu.len() > u.len() {
            return Err(Error::Parameter(format!("{} level-1 roots but {} level-2 roots", u.len(), nu.len())));
        }
        Ok(Self { u, nu })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }

    /// Number of finite level-2 roots.
    pub fn m2(&self) -> usize {
        self.nu.len()
    }

    /// `λ_j = u_j + η/2`
    pub fn lambdas(&self, eta: Complex) -> Vec<Complex> {
        self.u.iter().map(|&x| x + eta / 2.0).collect()
    }

    /// `w_j = ν_j + η/2`
    pub fn w(&self, eta: Complex) -> Vec<Complex> {
        self.nu.iter().map(|&x| x + eta / 2.0).collect()
    }

    /// Flattened `(u, ν)` vector used by the solver.
    pub fn to_vec(&self) -> Vec<Complex> {
        self.u.iter().chain(&self.nu).copied().collect()
    }

    /// Inverse of [`BetheRootSet::to_vec`]; the first `m` entries are `u`.
    pub fn from_vec(x: &[Complex], m: usize) -> Self {
        Self { u: x[..m].to_vec(), nu: x[m..].to_vec() }
    }
}

/// Parameters plus the branch-fixed square roots and `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TQContext {
    pub params: ModelParams,
    /// `√(1 + 4(c² − c))`
    pub root_minus: Complex,
    /// `√(1 + 4(c'² − c'))`
    pub root_plus: Complex,
    pub h: Complex,
}

impl TQContext {
    pub fn new(params: &ModelParams) -> Self {
        let (m, p) = (&params.minus, &params.plus);
        let root_minus = principal_sqrt(ONE + (m.c * m.c - m.c) * 4.0);
        let root_plus = principal_sqrt(ONE + (p.c * p.c - p.c) * 4.0);
        let h = h_from_roots(params, root_minus, root_plus);
        Self { params: params.clone(), root_minus, root_plus, h }
    }

    pub fn eta(&self) -> Complex {
        self.params.eta
    }
}

fn h_from_roots(p: &ModelParams, root_minus: Complex, root_plus: Complex) -> Complex {
    let (m, q) = (&p.minus, &p.plus);
    if m.is_diagonal() && q.is_diagonal() {
        return ZERO;
    }
    (-ONE - (q.c1 * m.c2 + q.c2 * m.c1) * 2.0 + root_plus * root_minus) / 2.0
}

/// `h = ½(−1 − 2(c₁'c₂ + c₂'c₁) + √(1+4c₁'c₂')√(1+4c₁c₂))`, exactly zero for
/// diagonal boundaries.
pub fn h_const(ctx: &TQContext) -> Complex {
    ctx.h
}

/// `Q⁽¹⁾(u) = ∏(u − u_i)(u + u_i + η)`
pub fn q1(u: Complex, roots: &BetheRootSet, eta: Complex) -> Complex {
    roots.u.iter().map(|&x| (u - x) * (u + x + eta)).product()
}

/// `Q⁽²⁾(λ) = ∏(λ − ν_j − η/2)(λ + ν_j − η/2)`
pub fn q2(lambda: Complex, roots: &BetheRootSet, eta: Complex) -> Complex {
    roots.nu.iter().map(|&x| (lambda - x - eta / 2.0) * (lambda + x - eta / 2.0)).product()
}

/// `b₀(u) = ∏(u − θ_j)(u + θ_j)`
pub fn b0(u: Complex, p: &ModelParams) -> Complex {
    p.theta.iter().map(|&t| (u - t) * (u + t)).product()
}

/// `a₀(u) = b₀(u + η)`
pub fn a0(u: Complex, p: &ModelParams) -> Complex {
    b0(u + p.eta, p)
}

/// `ā(λ) = ∏(λ + λ_j − η)(λ − λ_j − η)`
pub fn abar(lambda: Complex, lambdas: &[Complex], eta: Complex) -> Complex {
    lambdas.iter().map(|&l| (lambda + l - eta) * (lambda - l - eta)).product()
}

/// `d̄(λ) = ∏(λ − λ_j)(λ + λ_j)`
pub fn dbar(lambda: Complex, lambdas: &[Complex]) -> Complex {
    lambdas.iter().map(|&l| (lambda - l) * (lambda + l)).product()
}

/// `K⁽¹⁾(u)`
pub fn kernel1(u: Complex, ctx: &TQContext) -> Complex {
    let (m, p, eta) = (&ctx.params.minus, &ctx.params.plus, ctx.eta());
    let left = (ONE * 2.0 - p.c * 4.0) * u * u + p.zeta * u * 2.0 - eta * p.zeta - eta * eta / 2.0 + eta * eta * p.c;
    left * (m.zeta + (m.c * 2.0 - 1.0) * u)
}

/// `K⁽²⁾(λ)`
pub fn kernel2(lambda: Complex, ctx: &TQContext) -> Complex {
    let (m, p, eta) = (&ctx.params.minus, &ctx.params.plus, ctx.eta());
    (-ctx.root_plus * lambda + p.zeta) * (ctx.root_minus * lambda + m.zeta + eta / 2.0 - m.c * eta)
}

/// `K⁽³⁾(λ) = K⁽²⁾(−λ + η)`
pub fn kernel3(lambda: Complex, ctx: &TQContext) -> Complex {
    kernel2(-lambda + ctx.eta(), ctx)
}

pub fn kernels(lambda_or_u: Complex, ctx: &TQContext) -> (Complex, Complex, Complex) {
    (kernel1(lambda_or_u, ctx), kernel2(lambda_or_u, ctx), kernel3(lambda_or_u, ctx))
}

/// Distance below which a point counts as sitting on a pole.
pub const POLE_RADIUS: f64 = 1e-6;
/// Radius of the 4-point averaging stencil (exact through cubic order).
const STENCIL: f64 = 1e-4;

/// Evaluates `f` at `x`, or — within [`POLE_RADIUS`] of a listed pole — as the
/// mean over `x + r·iᵏ`. A regular point has a stencil spread growing with
/// `r`; an uncancelled pole has one shrinking like `1/r`, which is reported.
fn regularized(x: Complex, poles: &[Complex], what: &str, f: impl Fn(Complex) -> Complex) -> Result<Complex> {
    if poles.iter().all(|&p| (x - p).norm() > POLE_RADIUS) {
        return Ok(f(x));
    }
    let dirs = [ONE, Complex::new(0.0, 1.0), -ONE, Complex::new(0.0, -1.0)];
    let stencil = |r: f64| {
        let vals: Vec<Complex> = dirs.iter().map(|&d| f(x + d * r)).collect();
        let mean = vals.iter().sum::<Complex>() / 4.0;
        let spread = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        (mean, spread)
    };
    let (mean, spread) = stencil(STENCIL);
    let (_, wide) = stencil(2.0 * STENCIL);
    let scale = mean.norm().max(1.0);
    if !mean.is_finite() || spread > 10.0 * scale || (spread > 1.5 * wide && spread > 1e-6 * scale) {
        return Err(Error::Pole(format!("{what} at {x}: residue does not cancel (spread {spread:e})")));
    }
    Ok(mean)
}

fn raw_lambda_tq(u: Complex, roots: &BetheRootSet, ctx: &TQContext) -> Complex {
    let p = &ctx.params;
    let eta = p.eta;
    let l = u + eta / 2.0;
    let two_u = u * 2.0;
    let (q1u, q1m) = (q1(u, roots, eta), q1(u - eta, roots, eta));
    let q2l = q2(l, roots, eta);
    let (b, a) = (b0(u, p), a0(u, p));
    kernel1(u, ctx) * a * q1m / ((two_u + eta) * q1u)
        - (two_u - eta) / (two_u + eta) * kernel2(l, ctx) * b * q1m * q2(l + eta, roots, eta) / (q1u * q2l)
        - kernel3(l, ctx) * b * q2(l - eta, roots, eta) / q2l
        - two_u * (two_u - eta) * b * ctx.h * q1m / q2l
}

fn tq_poles(roots: &BetheRootSet, eta: Complex) -> Vec<Complex> {
    let mut poles = vec![-eta / 2.0];
    for &x in &roots.u {
        poles.push(x);
        poles.push(-x - eta);
    }
    for &x in &roots.nu {
        poles.push(x);
        poles.push(-x);
    }
    poles
}

/// Transfer-matrix eigenvalue `Λ(u)` from the inhomogeneous T−Q relation.
pub fn lambda_tq(u: Complex, roots: &BetheRootSet, ctx: &TQContext) -> Result<Complex> {
    regularized(u, &tq_poles(roots, ctx.eta()), "Λ(u)", |x| raw_lambda_tq(x, roots, ctx))
}

fn raw_lambda_hat(l: Complex, roots: &BetheRootSet, ctx: &TQContext) -> Complex {
    let eta = ctx.eta();
    let ls = roots.lambdas(eta);
    let q = q2(l, roots, eta);
    let ab = abar(l, &ls, eta);
    (l * 2.0 - eta * 2.0) / (l * 2.0) * kernel2(l, ctx) * ab * q2(l + eta, roots, eta) / q
        + kernel3(l, ctx) * dbar(l, &ls) * q2(l - eta, roots, eta) / q
        + (l * 2.0 - eta) * (l * 2.0 - eta * 2.0) * ab * abar(-l + eta, &ls, eta) * ctx.h / q
}

fn nested_poles(roots: &BetheRootSet, eta: Complex) -> Vec<Complex> {
    let mut poles = vec![ZERO];
    for w in roots.w(eta) {
        poles.push(w);
        poles.push(-w + eta);
    }
    poles
}

/// Nested eigenvalue `Λ̂(λ) = (2λ−η)/(2λ)·Λ̄(λ)` from its T−Q form.
pub fn lambda_nested(lambda: Complex, roots: &BetheRootSet, ctx: &TQContext) -> Result<Complex> {
    if roots.m() == 0 {
        return Err(Error::Parameter("nested eigenvalue needs M >= 1".into()));
    }
    regularized(lambda, &nested_poles(roots, ctx.eta()), "Λ̂(λ)", |x| raw_lambda_hat(x, roots, ctx))
}

/// `Λ̄(λ) = 2λ/(2λ−η)·Λ̂(λ)`, a polynomial of degree `2M + 2`.
pub fn lambda_bar(lambda: Complex, roots: &BetheRootSet, ctx: &TQContext) -> Result<Complex> {
    let eta = ctx.eta();
    let mut poles = nested_poles(roots, eta);
    poles.push(eta / 2.0);
    regularized(lambda, &poles, "Λ̄(λ)", |x| raw_lambda_hat(x, roots, ctx) * (x * 2.0) / (x * 2.0 - eta))
}

/// `Λ(u)` assembled from the level-1 eigenvalue formula and `Λ̂` instead of
/// the closed T−Q form.
pub fn lambda_two_level(u: Complex, roots: &BetheRootSet, ctx: &TQContext) -> Result<Complex> {
    let p = &ctx.params;
    let eta = p.eta;
    let kp = p.plus.k_entries(-u + eta / 2.0);
    let km = p.minus.k_entries(u);
    let mut first = (kp[0][0] - eta / (u * 2.0 + eta) * (kp[1][1] + kp[2][2])) * km[0][0] * a0(u, p);
    let mut denom = ONE;
    for &x in &roots.u {
        first *= (u - x - eta) / (u - x) * (u + x) / (u + x + eta);
        denom *= (u - x) * (u + x + eta);
    }
    let hat = if roots.m() == 0 {
        let kbp = crate::kernels::pregauge_k_plus(u, p).into_matrix();
        let kbm = crate::kernels::pregauge_k_minus(u, p)?.into_matrix();
        (kbp * kbm).trace() * (u * 2.0 / (u * 2.0 + eta))
    } else {
        lambda_nested(u + eta / 2.0, roots, ctx)?
    };
    Ok(first - b0(u, p) / denom * hat)
}

/// Bethe-equation residuals in the printed forms, plus the equivalent
/// level-1 and nested-residue forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaeResiduals {
    /// Level-2 equations: left side minus right side at each `ν_l`.
    pub level2: Vec<Complex>,
    /// Level-1 equations: `1 − RHS` at each `u_k`.
    pub level1: Vec<Complex>,
    /// Level-1 equations written through `Λ̂`: `1 − RHS`.
    pub level1_via_nested: Vec<Complex>,
    /// Residue form at `w_j`, divided by `2w K⁽³⁾(w) d̄(w) Q⁽²⁾(w−η)`.
    pub nested_residue: Vec<Complex>,
}

impl BaeResiduals {
    /// Largest modulus over the two printed systems.
    pub fn max(&self) -> f64 {
        self.level2.iter().chain(&self.level1).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Printed residuals, level-2 first.
    pub fn vector(&self) -> Vec<Complex> {
        self.level2.iter().chain(&self.level1).copied().collect()
    }
}

fn check_distinct(xs: &[Complex], what: &str) -> Result<()> {
    for i in 0..xs.len() {
        for j in 0..i {
            if (xs[i] - xs[j]).norm() < 1e-12 {
                return Err(Error::DegenerateRoots(format!("{what}[{j}] = {what}[{i}] = {}", xs[i])));
            }
        }
    }
    Ok(())
}

/// Level-2 and level-1 residuals only (what the solver needs).
pub fn bae_vector(roots: &BetheRootSet, ctx: &TQContext) -> Result<Vec<Complex>> {
    if roots.m2() != roots.m() && ctx.h != ZERO {
        return Err(Error::Parameter(format!(
            "h ≠ 0 requires M₂ = M, got M = {} and M₂ = {}",
            roots.m(),
            roots.m2()
        )));
    }
    check_distinct(&roots.u, "u")?;
    check_distinct(&roots.nu, "ν")?;
    let (p, eta) = (&ctx.params, ctx.eta());
    let mut out = Vec::with_capacity(roots.m() + roots.m2());
    for &v in &roots.nu {
        let k3 = kernel3(v + eta / 2.0, ctx);
        let q2m = q2(v - eta / 2.0, roots, eta);
        let q1m = q1(v - eta, roots, eta);
        let lhs = ONE
            + (v * 2.0 - eta) * kernel2(v + eta / 2.0, ctx) * q1m * q2(v + eta * 1.5, roots, eta)
                / ((v * 2.0 + eta) * k3 * q1(v, roots, eta) * q2m);
        let rhs = -ctx.h * (v * 2.0) * (v * 2.0 - eta) * q1m / (k3 * q2m);
        out.push(lhs - rhs);
    }
    for &x in &roots.u {
        let rhs = (x * 2.0 - eta) * kernel2(x + eta / 2.0, ctx) * b0(x, p) * q2(x + eta * 1.5, roots, eta)
            / (kernel1(x, ctx) * a0(x, p) * q2(x + eta / 2.0, roots, eta));
        out.push(ONE - rhs);
    }
    Ok(out)
}

pub fn bae_residuals(roots: &BetheRootSet, ctx: &TQContext) -> Result<BaeResiduals> {
    let (m, m2) = (roots.m(), roots.m2());
    let v = bae_vector(roots, ctx)?;
    let (p, eta) = (&ctx.params, ctx.eta());
    let ls = roots.lambdas(eta);
    let mut level1_via_nested = Vec::with_capacity(m);
    for &x in &roots.u {
        let hat = raw_lambda_hat(x + eta / 2.0, roots, ctx);
        let rhs = kernel1(x, ctx) * a0(x, p) * q1(x - eta, roots, eta) / ((x * 2.0 + eta) * b0(x, p) * hat);
        level1_via_nested.push(ONE - rhs);
    }
    let mut nested_residue = Vec::with_capacity(m);
    for w in roots.w(eta) {
        let k3 = kernel3(w, ctx);
        let d = dbar(w, &ls);
        let qm = q2(w - eta, roots, eta);
        let ab = abar(w, &ls, eta);
        let full = (w * 2.0 - eta * 2.0) * kernel2(w, ctx) * ab * q2(w + eta, roots, eta)
            + w * 2.0 * k3 * d * qm
            + w * 2.0 * (w * 2.0 - eta) * (w * 2.0 - eta * 2.0) * ab * abar(-w + eta, &ls, eta) * ctx.h;
        nested_residue.push(full / (w * 2.0 * k3 * d * qm));
    }
    Ok(BaeResiduals { level2: v[..m2].to_vec(), level1: v[m2..].to_vec(), level1_via_nested, nested_residue })
}

/// `E = −Σ η²/(u_k(u_k+η)) − μM`
pub fn energy(roots: &BetheRootSet, ctx: &TQContext) -> Result<Complex> {
    let (eta, mu) = (ctx.eta(), ctx.params.mu);
    let mut e = -mu * roots.m() as f64;
    for &x in &roots.u {
        let den = x * (x + eta);
        if den.norm() < 1e-14 {
            return Err(Error::Pole(format!("energy summand at u = {x}")));
        }
        e -= eta * eta / den;
    }
    Ok(e)
}

/// `Δ_q(λ)` with `ζ, ζ'` in place of the printed `ξ, ξ'`.
pub fn delta_q(lambda: Complex, roots: &BetheRootSet, ctx: &TQContext) -> Complex {
    let (m, p, eta) = (&ctx.params.minus, &ctx.params.plus, ctx.eta());
    let ls = roots.lambdas(eta);
    let base = m.zeta + eta / 2.0 - m.c * eta;
    let mut out = (eta * 2.0 + lambda * 2.0) * (eta * 2.0 - lambda * 2.0);
    out *= p.zeta * p.zeta - (ONE + p.c1 * p.c2 * 4.0) * lambda * lambda;
    out *= base * base - (ONE + m.c1 * m.c2 * 4.0) * lambda * lambda;
    for &l in &ls {
        out *= (lambda + l - eta) * (lambda - l - eta) * (lambda - l + eta) * (lambda + l + eta);
    }
    out
}

/// Asymptotic coefficient `−2 − 4c₁c₂' − 4c₁'c₂`.
pub fn asymptotic_coefficient(ctx: &TQContext) -> Complex {
    let (m, p) = (&ctx.params.minus, &ctx.params.plus);
    -ONE * 2.0 - m.c1 * p.c2 * 4.0 - p.c1 * m.c2 * 4.0
}

/// Closed-form `Λ̄(0)` and `Λ̄(η)`.
pub fn special_values(roots: &BetheRootSet, ctx: &TQContext) -> (Complex, Complex) {
    let (m, p, eta) = (&ctx.params.minus, &ctx.params.plus, ctx.eta());
    let ls = roots.lambdas(eta);
    let rho1: Complex = ls.iter().map(|&l| -(l - eta) * (l + eta)).product();
    let rho2: Complex = ls.iter().map(|&l| -(l + eta) * (l + eta - eta * 2.0)).product();
    let base = m.zeta + eta / 2.0 - m.c * eta;
    // tr K̄⁺(0) = 2ζ', K̄⁻(0) = base·id; tr K̄⁻(η) = 2·base, K̄⁺(η) = ζ'·id
    let at0 = rho1 * p.zeta * 2.0 * base;
    let at_eta = rho2 * base * 2.0 * p.zeta;
    (at0, at_eta)
}

/// Tolerances for [`functional_checks`].
#[derive(Debug, Clone, Copy)]
pub struct FunctionalTolerances {
    pub crossing: f64,
    pub asymptotic: f64,
    pub product: f64,
    pub special: f64,
}

impl Default for FunctionalTolerances {
    fn default() -> Self {
        Self { crossing: 1e-8, asymptotic: 1e-6, product: 1e-7, special: 1e-8 }
    }
}

/// Crossing, asymptotics, product identity and special values of `Λ̄`.
/// Crossing and special values are relative to the magnitude of `Λ̄`. The
/// asymptotic coefficient is only fixed for `M₂ = M`; otherwise that report
/// is left out.
pub fn functional_checks(roots: &BetheRootSet, ctx: &TQContext, tol: FunctionalTolerances) -> Result<Vec<RelationReport>> {
    let eta = ctx.eta();
    let m = roots.m();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc055);
    let rel = |a: Complex, b: Complex| (a - b).norm() / a.norm().max(b.norm()).max(1e-300);

    let mut crossing = Vec::new();
    for _ in 0..10 {
        let l = Complex::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let (a, b) = (lambda_bar(l, roots, ctx)?, lambda_bar(-l + eta, roots, ctx)?);
        let r = rel(a, b);
        crossing.push((r, r));
    }

    // expansion variable λ − η/2 makes the subleading power vanish
    let coef = asymptotic_coefficient(ctx);
    let mut asym = Vec::new();
    for k in 0..if roots.m2() == m { 4 } else { 0 } {
        let dir = Complex::from_polar(1.0, 0.3 + k as f64 * std::f64::consts::FRAC_PI_2);
        let l = dir * 1e4;
        let val = lambda_bar(l, roots, ctx)? / (l - eta / 2.0).powu(2 * m as u32 + 2);
        let r = rel(val, coef);
        asym.push((r, r));
    }

    let mut product = Vec::new();
    for l in roots.lambdas(eta) {
        let lhs = lambda_bar(l, roots, ctx)? * lambda_bar(l + eta, roots, ctx)?;
        let rhs = delta_q(l, roots, ctx) / ((eta - l * 2.0) * (eta + l * 2.0));
        let r = rel(lhs, rhs);
        product.push((r, r));
    }

    let (s0, se) = special_values(roots, ctx);
    let special = [(lambda_bar(ZERO, roots, ctx)?, s0), (lambda_bar(eta, roots, ctx)?, se)]
        .iter()
        .map(|&(a, b)| {
            let r = rel(a, b);
            (r, r)
        })
        .collect::<Vec<_>>();

    let mut out = vec![RelationReport::from_residuals("crossing", tol.crossing, &crossing)];
    if !asym.is_empty() {
        out.push(RelationReport::from_residuals("asymptotics", tol.asymptotic, &asym));
    }
    out.extend([
        RelationReport::from_residuals("product_identity", tol.product, &product),
        RelationReport::from_residuals("special_values", tol.special, &special),
    ]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::c;

    fn ctx() -> TQContext {
        TQContext::new(&ModelParams::table(2))
    }

    #[test]
    fn table_square_roots_and_h() {
        let t = ctx();
        assert!((t.root_minus - c(0.8)).norm() < 1e-14);
        assert!((t.root_plus - c(1.6)).norm() < 1e-14);
        let expect = 0.5 * (-1.0 - 2.0 * (-0.126 + 0.39 / 0.7 * 0.5) + 1.28);
        assert!((t.h - c(expect)).norm() < 1e-12, "{}", t.h);
    }

    #[test]
    fn homogeneous_b0() {
        let p = ModelParams::table(3);
        let u = Complex::new(0.3, 0.2);
        assert!((b0(u, &p) - u.powu(6)).norm() < 1e-15);
        assert!((a0(u, &p) - (u + p.eta).powu(6)).norm() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        let t = ctx();
        let r = BetheRootSet::new(vec![c(0.1005)], vec![Complex::new(0.0, 3.307)]).unwrap();
        assert!((energy(&r, &t).unwrap().re + 3.32504).abs() < 2e-3);
        assert_eq!(energy(&BetheRootSet::empty(), &t).unwrap(), ZERO);
        let r9 = BetheRootSet::new(vec![Complex::new(-0.1, -0.0999)], vec![c(-0.1496)]).unwrap();
        assert!((energy(&r9, &t).unwrap().re - 0.001822).abs() < 2e-3);
    }

    #[test]
    fn empty_root_set_has_no_residuals() {
        let r = bae_residuals(&BetheRootSet::empty(), &ctx()).unwrap();
        assert!(r.level1.is_empty() && r.level2.is_empty());
    }

    #[test]
    fn coincident_roots_rejected() {
        let r = BetheRootSet::new(vec![c(0.2), c(0.2)], vec![c(1.0), c(2.0)]).unwrap();
        assert!(matches!(bae_vector(&r, &ctx()), Err(Error::DegenerateRoots(_))));
    }

    #[test]
    fn kernel_crossing() {
        let t = ctx();
        let l = Complex::new(0.4, -0.7);
        assert!((kernel3(l, &t) - kernel2(-l + t.eta(), &t)).norm() < 1e-15);
    }

    #[test]
    fn more_level_two_roots_rejected() {
        assert!(BetheRootSet::new(vec![c(0.1)], vec![c(0.2), c(0.3)]).is_err());
        assert!(BetheRootSet::new(vec![c(0.1)], vec![]).is_ok());
    }
}
