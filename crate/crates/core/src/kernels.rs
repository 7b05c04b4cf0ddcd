//! R-matrix, nested r-matrix, boundary K-matrices, gauge matrices and a
//! residual engine for the algebraic relations they obey.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{
    c, embed, graded_permutation, max_abs, plain_permutation, super_transpose, Complex, GradedOperator,
    GradedSpace, Matrix, TensorSpace, TransposeMode, ONE, ZERO,
};

/// Default seed for relation sample points.
pub const SAMPLE_SEED: u64 = 0x5eed_7a11;

/// Principal square root, with a negative real radicand mapped to `+i√|x|`.
pub fn principal_sqrt(z: Complex) -> Complex {
    if z.im == 0.0 && z.re < 0.0 {
        Complex::new(0.0, (-z.re).sqrt())
    } else {
        z.sqrt()
    }
}

/// Parameters of one boundary K-matrix, with `c^2 = c1 c2 + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    pub zeta: Complex,
    pub c: Complex,
    pub c1: Complex,
    pub c2: Complex,
}

impl BoundaryParams {
    /// Solves the constraint for `c2`. With `c1 = 0` the constraint forces
    /// `c ∈ {0, 1}` and `c2` is taken to be zero.
    pub fn new(zeta: Complex, c: Complex, c1: Complex) -> Result<Self> {
        if c1 != ZERO {
            return Ok(Self { zeta, c, c1, c2: (c * c - c) / c1 });
        }
        Self::with_c2(zeta, c, c1, ZERO)
    }

    /// Takes all four parameters and validates the constraint.
    pub fn with_c2(zeta: Complex, c: Complex, c1: Complex, c2: Complex) -> Result<Self> {
        let p = Self { zeta, c, c1, c2 };
        let lhs = c * c;
        let rhs = c1 * c2 + c;
        if (lhs - rhs).norm() > 1e-12 * (1.0 + lhs.norm().max(rhs.norm())) {
            return Err(Error::Constraint { lhs: lhs.to_string(), rhs: rhs.to_string() });
        }
        Ok(p)
    }

    pub fn diagonal(zeta: Complex, c: Complex) -> Result<Self> {
        Self::with_c2(zeta, c, ZERO, ZERO)
    }

    pub fn is_diagonal(&self) -> bool {
        self.c1 == ZERO && self.c2 == ZERO
    }

    /// `√(1 + 4 c1 c2)` on the principal branch.
    pub fn root(&self) -> Complex {
        principal_sqrt(ONE + self.c1 * self.c2 * 4.0)
    }

    /// The 3×3 matrix `diag-block(ζ+(2c−1)u; [[ζ−u, 2c1 u],[2c2 u, ζ+u]])`.
    pub fn k_entries(&self, u: Complex) -> [[Complex; 3]; 3] {
        [
            [self.zeta + (self.c * 2.0 - 1.0) * u, ZERO, ZERO],
            [ZERO, self.zeta - u, self.c1 * u * 2.0],
            [ZERO, self.c2 * u * 2.0, self.zeta + u],
        ]
    }
}

/// Couplings of the open chain: bulk `η`, boundaries `K⁻`/`K⁺`, chemical
/// potential and inhomogeneities (one per site).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub eta: Complex,
    pub minus: BoundaryParams,
    pub plus: BoundaryParams,
    pub mu: Complex,
    pub theta: Vec<Complex>,
}

impl ModelParams {
    pub fn new(eta: Complex, minus: BoundaryParams, plus: BoundaryParams, mu: Complex, theta: Vec<Complex>) -> Result<Self> {
        if eta == ZERO {
            return Err(Error::Parameter("eta must be non-zero".into()));
        }
        if theta.is_empty() {
            return Err(Error::Parameter("chain needs at least one site".into()));
        }
        Ok(Self { eta, minus, plus, mu, theta })
    }

    /// Homogeneous chain of `len` sites from real intake values
    /// `(η, ζ, c, c1, ζ', c', c1', μ)`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_real(eta: f64, zeta: f64, cc: f64, c1: f64, zeta_p: f64, cp: f64, c1p: f64, mu: f64, len: usize) -> Result<Self> {
        let minus = BoundaryParams::new(c(zeta), c(cc), c(c1))?;
        let plus = BoundaryParams::new(c(zeta_p), c(cp), c(c1p))?;
        Self::new(c(eta), minus, plus, c(mu), vec![ZERO; len])
    }

    /// Couplings of the published L = 2 and L = 3 spectra.
    pub fn table(len: usize) -> Self {
        Self::from_real(0.2, 0.1, 0.1, -0.5, -0.5, -0.3, -0.7, 2.0, len).expect("table parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn homogeneous(&self) -> Self {
        Self { theta: vec![ZERO; self.theta.len()], ..self.clone() }
    }

    pub fn with_theta(&self, theta: Vec<Complex>) -> Self {
        Self { theta, ..self.clone() }
    }

    /// Random constrained parameters (real couplings), homogeneous chain.
    pub fn random(rng: &mut impl Rng, len: usize) -> Self {
        loop {
            let mut draw = |lo: f64, hi: f64| rng.gen_range(lo..hi);
            let eta = draw(0.1, 0.8) * if draw(0.0, 1.0) < 0.5 { 1.0 } else { -1.0 };
            let res = Self::from_real(
                eta,
                draw(-1.0, 1.0),
                draw(-0.8, 0.8),
                draw(0.2, 1.0) * if draw(0.0, 1.0) < 0.5 { 1.0 } else { -1.0 },
                draw(-1.0, 1.0),
                draw(-0.8, 0.8),
                draw(0.2, 1.0) * if draw(0.0, 1.0) < 0.5 { 1.0 } else { -1.0 },
                draw(0.0, 3.0),
                len,
            );
            if let Ok(p) = res {
                if p.minus.zeta.norm() > 0.05 && p.plus.zeta.norm() > 0.05 {
                    return p;
                }
            }
        }
    }
}

pub fn bff() -> GradedSpace {
    GradedSpace::bff()
}

/// Local space of the reduced (nested) chain; ordinary tensor products.
pub fn nested_space() -> GradedSpace {
    GradedSpace::bosonic(2)
}

fn single(space: GradedSpace, entries: &[&[Complex]]) -> GradedOperator {
    GradedOperator::from_fn(TensorSpace::single(space), |r, col| entries[r][col])
}

/// `R(u) = u·id + η·P` on BFF ⊗ BFF, `P` the graded permutation.
pub fn r_matrix(u: Complex, eta: Complex) -> GradedOperator {
    let p = graded_permutation(&bff());
    let id = GradedOperator::identity(p.space().clone());
    id.scale(u).add(&p.scale(eta)).expect("same space")
}

/// Nested r-matrix `r(λ) = λ·id + η·ℙ` with ℙ the graded permutation at
/// parity (1,1), i.e. `λ·id − η·P̄`. Acts on the ungraded nested space.
pub fn r_nested(lambda: Complex, eta: Complex) -> GradedOperator {
    let gp = graded_permutation(&GradedSpace::fermionic(2));
    GradedOperator::from_fn(TensorSpace::power(&nested_space(), 2), |r, col| {
        let id = if r == col { lambda } else { ZERO };
        id + gp.matrix()[(r, col)] * eta
    })
}

fn k_op(entries: [[Complex; 3]; 3]) -> GradedOperator {
    GradedOperator::from_fn(TensorSpace::single(bff()), |r, col| entries[r][col])
}

pub fn k_minus(u: Complex, p: &ModelParams) -> GradedOperator {
    k_op(p.minus.k_entries(u))
}

/// `K⁺(u) = K⁻(−u + η/2)` with the primed boundary parameters.
pub fn k_plus(u: Complex, p: &ModelParams) -> GradedOperator {
    k_op(p.plus.k_entries(-u + p.eta / 2.0))
}

/// Nested `K̄⁻(λ)`.
pub fn nested_k_minus(lambda: Complex, p: &ModelParams) -> GradedOperator {
    let b = &p.minus;
    let base = p.eta / 2.0 + b.zeta - b.c * p.eta;
    single(
        nested_space(),
        &[&[-lambda + base, b.c1 * lambda * 2.0], &[b.c2 * lambda * 2.0, lambda + base]],
    )
}

/// Nested `K̄⁺(λ)`.
pub fn nested_k_plus(lambda: Complex, p: &ModelParams) -> GradedOperator {
    let b = &p.plus;
    let s = -lambda + p.eta;
    single(
        nested_space(),
        &[&[b.zeta + lambda - p.eta, b.c1 * s * 2.0], &[b.c2 * s * 2.0, b.zeta - lambda + p.eta]],
    )
}

/// Lower-right block of `K⁺(u)` (spectral parameter `u`, before the shift to λ).
pub fn pregauge_k_plus(u: Complex, p: &ModelParams) -> GradedOperator {
    let k = p.plus.k_entries(-u + p.eta / 2.0);
    single(nested_space(), &[&[k[1][1], k[1][2]], &[k[2][1], k[2][2]]])
}

/// `(2u+η)/(2u) · (lower-right block of K⁻(u) − η/(2u+η) k⁻₁₁(u))`.
pub fn pregauge_k_minus(u: Complex, p: &ModelParams) -> Result<GradedOperator> {
    if u == ZERO {
        return Err(Error::Pole("pre-gauge K̄⁻(u) at u = 0".into()));
    }
    let k = p.minus.k_entries(u);
    let two_u_eta = u * 2.0 + p.eta;
    let shift = p.eta / two_u_eta * k[0][0];
    let pref = two_u_eta / (u * 2.0);
    Ok(single(
        nested_space(),
        &[&[(k[1][1] - shift) * pref, k[1][2] * pref], &[k[2][1] * pref, (k[2][2] - shift) * pref]],
    ))
}

/// Constant gauge matrices diagonalizing the nested boundary matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Gauges {
    pub g_minus: Matrix,
    pub g_plus: Matrix,
    pub m: Complex,
    pub n: Complex,
    /// `√(1 + mn)`, principal branch.
    pub root_mn: Complex,
}

impl Gauges {
    pub fn g_minus_inv(&self) -> Matrix {
        inverse2(&self.g_minus)
    }

    pub fn g_plus_inv(&self) -> Matrix {
        inverse2(&self.g_plus)
    }
}

fn inverse2(m: &Matrix) -> Matrix {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    Matrix::from_row_slice(2, 2, &[m[(1, 1)] / det, -m[(0, 1)] / det, -m[(1, 0)] / det, m[(0, 0)] / det])
}

fn det2(m: &Matrix) -> Complex {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Gauge matrices `g⁻`, `g⁺` and the constants `m`, `n`.
///
/// With all four off-diagonal boundary couplings zero the closed forms are
/// 0/0; the nested K-matrices are then already diagonal up to ordering and
/// the gauges reduce to a swap (`g⁻`) and the identity (`g⁺`), `m = n = 0`.
pub fn build_gauges(p: &ModelParams) -> Result<Gauges> {
    let (c1, c2) = (p.minus.c1, p.minus.c2);
    let (c1p, c2p) = (p.plus.c1, p.plus.c2);
    if p.minus.is_diagonal() && p.plus.is_diagonal() {
        return Ok(Gauges {
            g_minus: Matrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            g_plus: Matrix::identity(2, 2),
            m: ZERO,
            n: ZERO,
            root_mn: ONE,
        });
    }
    let s = p.minus.root();
    let one_minus = ONE - s;
    let one_plus = ONE + s;
    if one_minus.norm() < 1e-14 {
        return Err(Error::SingularGauge("1 - sqrt(1+4 c1 c2)".into()));
    }
    if one_plus.norm() < 1e-14 {
        return Err(Error::SingularGauge("1 + sqrt(1+4 c1 c2)".into()));
    }
    let g_minus = Matrix::from_row_slice(2, 2, &[-ONE, c1 * 2.0 / one_minus, ONE, -c1 * 2.0 / one_plus]);
    let mix = ONE + c1 * c2p * 2.0 + c1p * c2 * 2.0;
    if mix.norm() < 1e-14 {
        return Err(Error::SingularGauge("1 + 2 c1 c2' + 2 c1' c2".into()));
    }
    let m = (-c1 * c2 * 4.0 - (c1 * c2p * 2.0 - c1p * c2 * 2.0) * s + c1 * c2p * 2.0 + c1p * c2 * 2.0) / (mix * one_plus);
    let n = (-c1 * c2 * 4.0 - (c1p * c2 * 2.0 - c1 * c2p * 2.0) * s + c1p * c2 * 2.0 + c1 * c2p * 2.0) / (mix * (-one_minus));
    let root_mn = principal_sqrt(ONE + m * n);
    let g_plus = Matrix::from_row_slice(2, 2, &[-m, root_mn - ONE, -m, -root_mn - ONE]);
    if det2(&g_minus).norm() < 1e-14 {
        return Err(Error::SingularGauge("det g-".into()));
    }
    if det2(&g_plus).norm() < 1e-14 {
        return Err(Error::SingularGauge("det g+ = 2 m sqrt(1+mn)".into()));
    }
    Ok(Gauges { g_minus, g_plus, m, n, root_mn })
}

/// Expected diagonal forms of the gauged nested K-matrices at `λ`:
/// `(g⁻ K̄⁻ g⁻⁻¹, g⁺ g⁻ K̄⁺ g⁻⁻¹ g⁺⁻¹)`.
pub fn gauged_k_diagonals(lambda: Complex, p: &ModelParams, g: &Gauges) -> ([Complex; 2], [Complex; 2]) {
    let s = p.minus.root();
    let base = p.eta / 2.0 + p.minus.zeta - p.minus.c * p.eta;
    let minus = [base + lambda * s, base - lambda * s];
    let zp = p.plus.zeta;
    let plus = if p.minus.is_diagonal() && p.plus.is_diagonal() {
        [zp - (lambda - p.eta), zp + (lambda - p.eta)]
    } else {
        let mix = ONE + p.minus.c1 * p.plus.c2 * 2.0 + p.plus.c1 * p.minus.c2 * 2.0;
        let pref = -mix / s;
        let shift = s / mix * zp;
        [pref * (g.root_mn * (lambda - p.eta) - shift), pref * (-g.root_mn * (lambda - p.eta) - shift)]
    };
    (minus, plus)
}

/// Algebraic relations certified by [`check_relation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Graded Yang–Baxter equation, operator and entrywise forms.
    Qybe,
    /// Graded reflection equation for `K⁻`.
    Reflection,
    /// Dual reflection equation for `K⁺`.
    DualReflection,
    Unitarity,
    CrossingUnitarity,
    /// Ordinary reflection equations for the nested `K̄⁻` and `K̄⁺`.
    NestedReflection,
    /// Initial condition, unitarity, crossing unitarity and PT symmetry of `r`.
    NestedProperties,
    /// Diagonalization of the nested K-matrices by the gauges.
    Gauge,
}

impl Relation {
    pub const ALL: [Relation; 8] = [
        Relation::Qybe,
        Relation::Reflection,
        Relation::DualReflection,
        Relation::Unitarity,
        Relation::CrossingUnitarity,
        Relation::NestedReflection,
        Relation::NestedProperties,
        Relation::Gauge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Qybe => "qybe",
            Relation::Reflection => "reflection",
            Relation::DualReflection => "dual_reflection",
            Relation::Unitarity => "unitarity",
            Relation::CrossingUnitarity => "crossing_unitarity",
            Relation::NestedReflection => "nested_reflection",
            Relation::NestedProperties => "nested_properties",
            Relation::Gauge => "gauge",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: String,
    pub tol: f64,
    /// Largest entrywise residual over all points.
    pub max_residual: f64,
    /// Largest Frobenius residual over all points.
    pub frobenius: f64,
    pub points: usize,
    pub pass: bool,
}

impl RelationReport {
    pub fn from_residuals(relation: &str, tol: f64, residuals: &[(f64, f64)]) -> Self {
        let max_residual = residuals.iter().map(|r| r.0).fold(0.0, f64::max);
        let frobenius = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
        let pass = residuals.iter().all(|r| r.0.is_finite()) && max_residual <= tol;
        Self { relation: relation.to_string(), tol, max_residual, frobenius, points: residuals.len(), pass }
    }
}

/// Sample pairs of spectral parameters: the structured points
/// `{0, ±η, ±η/2}` paired with each other, then seeded random complex
/// points of modulus ≤ 2, up to `count` pairs.
pub fn sample_pairs(eta: Complex, count: usize, seed: u64) -> Vec<(Complex, Complex)> {
    let structured = [ZERO, eta, -eta, eta / 2.0, -eta / 2.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = || {
        let r = 2.0 * rng.gen::<f64>().sqrt();
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        Complex::from_polar(r, phi)
    };
    let mut out = Vec::with_capacity(count);
    for (i, &a) in structured.iter().enumerate() {
        out.push((a, structured[(i + 1) % structured.len()]));
        out.push((a, random()));
    }
    while out.len() < count {
        out.push((random(), random()));
    }
    out.truncate(count);
    out
}

fn residual(lhs: &Matrix, rhs: &Matrix) -> (f64, f64) {
    let d = lhs - rhs;
    (max_abs(&d), d.norm())
}

fn scaled_identity(space: TensorSpace, s: Complex) -> Matrix {
    GradedOperator::identity(space).into_matrix() * s
}

/// Evaluate one relation at `points` and compare the residual with `tol`.
pub fn check_relation(relation: Relation, p: &ModelParams, points: &[(Complex, Complex)], tol: f64) -> RelationReport {
    let res: Vec<(f64, f64)> = points
        .iter()
        .map(|&(u, v)| relation_residual(relation, p, u, v).unwrap_or((f64::INFINITY, f64::INFINITY)))
        .collect();
    RelationReport::from_residuals(relation.name(), tol, &res)
}

/// Check every relation with the default sample set.
pub fn check_all(p: &ModelParams, count: usize, tol: f64) -> Vec<RelationReport> {
    let pts = sample_pairs(p.eta, count, SAMPLE_SEED);
    Relation::ALL.iter().map(|&r| check_relation(r, p, &pts, tol)).collect()
}

fn relation_residual(relation: Relation, p: &ModelParams, u: Complex, v: Complex) -> Result<(f64, f64)> {
    let eta = p.eta;
    match relation {
        Relation::Qybe => {
            let op = qybe_operator_residual(u, v, eta)?;
            let ent = qybe_entrywise_residual(u, v, eta);
            Ok((op.0.max(ent.0), op.1.max(ent.1)))
        }
        Relation::Reflection => {
            let two = TensorSpace::power(&bff(), 2);
            let k1 = embed(&k_minus(u, p), &[0], &two)?;
            let k2 = embed(&k_minus(v, p), &[1], &two)?;
            let r12 = |x| embed(&r_matrix(x, eta), &[0, 1], &two);
            let r21 = |x| embed(&r_matrix(x, eta), &[1, 0], &two);
            let lhs = r12(u - v)?.compose(&k1)?.compose(&r21(u + v)?)?.compose(&k2)?;
            let rhs = k2.compose(&r12(u + v)?)?.compose(&k1)?.compose(&r21(u - v)?)?;
            Ok(residual(lhs.matrix(), rhs.matrix()))
        }
        Relation::DualReflection => {
            let two = TensorSpace::power(&bff(), 2);
            let k1 = embed(&k_plus(u, p), &[0], &two)?;
            let k2 = embed(&k_plus(v, p), &[1], &two)?;
            let r12 = |x| embed(&r_matrix(x, eta), &[0, 1], &two);
            let r21 = |x| embed(&r_matrix(x, eta), &[1, 0], &two);
            let lhs = r12(v - u)?.compose(&k1)?.compose(&r21(-u - v + eta)?)?.compose(&k2)?;
            let rhs = k2.compose(&r12(-u - v + eta)?)?.compose(&k1)?.compose(&r21(v - u)?)?;
            Ok(residual(lhs.matrix(), rhs.matrix()))
        }
        Relation::Unitarity => {
            let two = TensorSpace::power(&bff(), 2);
            let lhs = embed(&r_matrix(u, eta), &[0, 1], &two)?.compose(&embed(&r_matrix(-u, eta), &[1, 0], &two)?)?;
            let rho1 = -(u - eta) * (u + eta);
            Ok(residual(lhs.matrix(), &scaled_identity(two, rho1)))
        }
        Relation::CrossingUnitarity => {
            let two = TensorSpace::power(&bff(), 2);
            let a = super_transpose(&embed(&r_matrix(-u + eta, eta), &[0, 1], &two)?, 0, TransposeMode::Super)?;
            let b = super_transpose(&embed(&r_matrix(u, eta), &[1, 0], &two)?, 0, TransposeMode::Super)?;
            let rho2 = -u * (u - eta);
            Ok(residual(a.compose(&b)?.matrix(), &scaled_identity(two, rho2)))
        }
        Relation::NestedReflection => {
            let two = TensorSpace::power(&nested_space(), 2);
            let r12 = |x| embed(&r_nested(x, eta), &[0, 1], &two);
            let r21 = |x| embed(&r_nested(x, eta), &[1, 0], &two);
            let k1 = embed(&nested_k_minus(u, p), &[0], &two)?;
            let k2 = embed(&nested_k_minus(v, p), &[1], &two)?;
            let lhs = r12(u - v)?.compose(&k1)?.compose(&r21(u + v)?)?.compose(&k2)?;
            let rhs = k2.compose(&r12(u + v)?)?.compose(&k1)?.compose(&r21(u - v)?)?;
            let a = residual(lhs.matrix(), rhs.matrix());
            // dual equation for K̄⁺; crossing shift 2η as in the r-matrix crossing unitarity
            let k1 = embed(&nested_k_plus(u, p), &[0], &two)?;
            let k2 = embed(&nested_k_plus(v, p), &[1], &two)?;
            let shift = -u - v + eta * 2.0;
            let lhs = r12(v - u)?.compose(&k1)?.compose(&r21(shift)?)?.compose(&k2)?;
            let rhs = k2.compose(&r12(shift)?)?.compose(&k1)?.compose(&r21(v - u)?)?;
            let b = residual(lhs.matrix(), rhs.matrix());
            Ok((a.0.max(b.0), a.1.max(b.1)))
        }
        Relation::NestedProperties => {
            let two = TensorSpace::power(&nested_space(), 2);
            let pbar = plain_permutation(&nested_space());
            let init = residual(r_nested(ZERO, eta).matrix(), &(pbar.matrix() * -eta));
            let r12 = |x| embed(&r_nested(x, eta), &[0, 1], &two);
            let r21 = |x| embed(&r_nested(x, eta), &[1, 0], &two);
            let unit = residual(
                r12(u)?.compose(&r21(-u)?)?.matrix(),
                &scaled_identity(two.clone(), -(u - eta) * (u + eta)),
            );
            let a = super_transpose(&r12(u)?, 0, TransposeMode::Plain)?;
            let b = super_transpose(&r21(-u + eta * 2.0)?, 0, TransposeMode::Plain)?;
            let cross = residual(a.compose(&b)?.matrix(), &scaled_identity(two.clone(), -u * (u - eta * 2.0)));
            let t12 = super_transpose(&super_transpose(&r12(v)?, 0, TransposeMode::Plain)?, 1, TransposeMode::Plain)?;
            let pt = residual(r21(v)?.matrix(), t12.matrix());
            let all = [init, unit, cross, pt];
            Ok((all.iter().map(|x| x.0).fold(0.0, f64::max), all.iter().map(|x| x.1).fold(0.0, f64::max)))
        }
        Relation::Gauge => {
            let g = build_gauges(p)?;
            let gm_inv = g.g_minus_inv();
            let gp_inv = g.g_plus_inv();
            let (dm, dp) = gauged_k_diagonals(u, p, &g);
            let km = &g.g_minus * nested_k_minus(u, p).matrix() * &gm_inv;
            let kp = &g.g_plus * (&g.g_minus * nested_k_plus(u, p).matrix() * &gm_inv) * &gp_inv;
            let em = Matrix::from_row_slice(2, 2, &[dm[0], ZERO, ZERO, dm[1]]);
            let ep = Matrix::from_row_slice(2, 2, &[dp[0], ZERO, ZERO, dp[1]]);
            let a = residual(&km, &em);
            let b = residual(&kp, &ep);
            Ok((a.0.max(b.0), a.1.max(b.1)))
        }
    }
}

fn qybe_operator_residual(u: Complex, v: Complex, eta: Complex) -> Result<(f64, f64)> {
    let three = TensorSpace::power(&bff(), 3);
    let r = |x, s: [usize; 2]| embed(&r_matrix(x, eta), &s, &three);
    let lhs = r(u - v, [0, 1])?.compose(&r(u, [0, 2])?)?.compose(&r(v, [1, 2])?)?;
    let rhs = r(v, [1, 2])?.compose(&r(u, [0, 2])?)?.compose(&r(u - v, [0, 1])?)?;
    Ok(residual(lhs.matrix(), rhs.matrix()))
}

/// Entrywise graded Yang–Baxter equation with explicit parity signs,
/// `R(λ−u) R(λ) R(u) (−1)^{(p(β1)+p(γ1))p(β2)} = R(u) R(λ) R(λ−u) (−1)^{(p(α1)+p(β1))p(β2)}`.
fn qybe_entrywise_residual(lambda: Complex, u: Complex, eta: Complex) -> (f64, f64) {
    let sp = bff();
    let p = |i: usize| sp.parity(i) as usize;
    let a = r_matrix(lambda - u, eta);
    let b = r_matrix(lambda, eta);
    let cc = r_matrix(u, eta);
    let e = |m: &GradedOperator, r1: usize, r2: usize, c1: usize, c2: usize| m.matrix()[(r1 * 3 + r2, c1 * 3 + c2)];
    let sgn = |x: usize| if x.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut max = 0.0_f64;
    let mut fro = 0.0_f64;
    for a1 in 0..3 {
        for a2 in 0..3 {
            for a3 in 0..3 {
                for g1 in 0..3 {
                    for g2 in 0..3 {
                        for g3 in 0..3 {
                            let mut lhs = ZERO;
                            let mut rhs = ZERO;
                            for b1 in 0..3 {
                                for b2 in 0..3 {
                                    for b3 in 0..3 {
                                        lhs += e(&a, a1, a2, b1, b2) * e(&b, b1, a3, g1, b3) * e(&cc, b2, b3, g2, g3)
                                            * sgn((p(b1) + p(g1)) * p(b2));
                                        rhs += e(&cc, a2, a3, b2, b3) * e(&b, a1, b3, b1, g3) * e(&a, b1, b2, g1, g2)
                                            * sgn((p(a1) + p(b1)) * p(b2));
                                    }
                                }
                            }
                            let d = (lhs - rhs).norm();
                            max = max.max(d);
                            fro += d * d;
                        }
                    }
                }
            }
        }
    }
    (max, fro.sqrt())
}
