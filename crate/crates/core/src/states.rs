//! Nested Bethe states: level-2 vectors from the gauged monodromy matrix,
//! level-1 assembly with the creation operators `B₁, B₂`, and eigenvector
//! certificates.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{c, embed, Complex, GradedOperator, Matrix, TensorSpace, ONE, ZERO};
use crate::kernels::{build_gauges, nested_k_minus, nested_space, r_nested, Gauges, ModelParams};
use crate::tq::{BetheRootSet, TQContext};
use crate::transfer::{build_nested_transfer, DoubleRowBlocks, TransferFamily};

pub type Vector = DVector<Complex>;

/// Amplitudes `F^{a₁…a_M}` on `(ℂ²)^{⊗M}`, site 1 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedState {
    pub m: usize,
    pub amplitudes: Vector,
}

/// State of the `L`-site chain in the lexicographic product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub len: usize,
    pub amplitudes: Vector,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Self {
        Self { len: self.len, amplitudes: &self.amplitudes / c(self.norm()) }
    }
}

fn unit_vector(dim: usize) -> Vector {
    Vector::from_fn(dim, |i, _| if i == 0 { ONE } else { ZERO })
}

/// `|Ψ₀⟩ = ⊗(1,0,0)ᵀ`
pub fn reference_state(len: usize) -> StateVector {
    StateVector { len, amplitudes: unit_vector(3usize.pow(len as u32)) }
}

/// `|0⟩ = ⊗(1,0)ᵀ`; for `M = 0` the scalar 1.
pub fn nested_reference(m: usize) -> NestedState {
    NestedState { m, amplitudes: unit_vector(1 << m) }
}

/// Blocks of the gauged monodromy matrix `𝕌(λ)`, acting on `(ℂ²)^{⊗M}`.
#[derive(Debug, Clone)]
pub struct GaugedMonodromy {
    pub a: GradedOperator,
    pub b: GradedOperator,
    pub c: GradedOperator,
    pub d: GradedOperator,
}

fn local2(m: &Matrix) -> GradedOperator {
    GradedOperator::new(TensorSpace::single(nested_space()), m.clone()).expect("2x2")
}

/// `𝕌(λ) = g⁺ T̄(λ) (g⁻ K̄⁻(λ) g⁻⁻¹) T̄̂(λ) g⁺⁻¹` with nested inhomogeneities
/// `λ_j`.
pub fn gauged_monodromy(lambda: Complex, lambdas: &[Complex], p: &ModelParams, g: &Gauges) -> Result<GaugedMonodromy> {
    let m = lambdas.len();
    let target = TensorSpace::power(&nested_space(), m + 1);
    let km = nested_k_minus(lambda, p).into_matrix();
    let gauged_k = &g.g_minus * km * g.g_minus_inv();
    let mut factors: Vec<(GradedOperator, Vec<usize>)> = vec![(local2(&g.g_plus), vec![0])];
    for (j, &l) in lambdas.iter().enumerate() {
        factors.push((r_nested(lambda + l, p.eta), vec![0, j + 1]));
    }
    factors.push((local2(&gauged_k), vec![0]));
    for (j, &l) in lambdas.iter().enumerate().rev() {
        factors.push((r_nested(lambda - l, p.eta), vec![j + 1, 0]));
    }
    factors.push((local2(&g.g_plus_inv()), vec![0]));
    let mut acc = GradedOperator::identity(target.clone());
    for (op, sites) in &factors {
        acc = acc.compose(&embed(op, sites, &target)?)?;
    }
    Ok(GaugedMonodromy { a: acc.block(0, 0)?, b: acc.block(0, 1)?, c: acc.block(1, 0)?, d: acc.block(1, 1)? })
}

/// Zero-norm threshold relative to the largest intermediate amplitude.
pub const NULL_THRESHOLD: f64 = 1e-10;

fn track(v: &Vector, peak: &mut f64) {
    *peak = peak.max(v.camax());
}

fn check_null(v: &Vector, peak: f64, context: &str) -> Result<()> {
    let n = v.norm();
    if !n.is_finite() || n <= NULL_THRESHOLD * peak.max(f64::MIN_POSITIVE) {
        return Err(Error::NullState { norm: n / peak.max(f64::MIN_POSITIVE), context: context.into() });
    }
    Ok(())
}

/// `|F⟩ = ⊗(g⁻)⁻¹ 𝔹(w₁)⋯𝔹(w_M)|0⟩`.
pub fn build_nested_state(roots: &BetheRootSet, ctx: &TQContext) -> Result<NestedState> {
    let m = roots.m();
    if m == 0 {
        return Ok(nested_reference(0));
    }
    let p = &ctx.params;
    let g = build_gauges(p)?;
    let lambdas = roots.lambdas(p.eta);
    let mut v = nested_reference(m).amplitudes;
    let mut peak: f64 = 0.0;
    for &w in roots.w(p.eta).iter().rev() {
        let b = gauged_monodromy(w, &lambdas, p, &g)?.b;
        v = b.matrix() * v;
        track(&v, &mut peak);
    }
    let ginv = local2(&g.g_minus_inv());
    let space = TensorSpace::power(&nested_space(), m);
    for j in 0..m {
        v = embed(&ginv, &[j], &space)?.matrix() * v;
    }
    check_null(&v, peak, "nested state")?;
    Ok(NestedState { m, amplitudes: v })
}

/// `Σ F^{a₁…a_M} B_{a₁}(u₁)⋯B_{a_M}(u_M)|Ψ₀⟩`.
pub fn assemble_state(roots: &BetheRootSet, nested: &NestedState, p: &ModelParams) -> Result<StateVector> {
    let m = roots.m();
    if nested.m != m {
        return Err(Error::Dimension(format!("nested state has {} sites for {m} roots", nested.m)));
    }
    let len = p.len();
    let bs: Vec<[Matrix; 2]> = roots
        .u
        .iter()
        .map(|&u| DoubleRowBlocks::at(u, p).map(|blk| [blk.b[0].matrix().clone(), blk.b[1].matrix().clone()]))
        .collect::<Result<_>>()?;
    let psi0 = reference_state(len).amplitudes;
    let mut total = Vector::zeros(psi0.len());
    let mut peak: f64 = 0.0;
    for idx in 0..(1usize << m) {
        let f = nested.amplitudes[idx];
        if f == ZERO {
            continue;
        }
        let mut v = psi0.clone();
        // a_M acts first
        for j in (0..m).rev() {
            let a = (idx >> (m - 1 - j)) & 1;
            v = &bs[j][a] * v;
        }
        v *= f;
        track(&v, &mut peak);
        total += v;
    }
    check_null(&total, peak, "assembled state")?;
    Ok(StateVector { len, amplitudes: total })
}

/// Full pipeline: nested state, then level-1 assembly.
pub fn bethe_state(roots: &BetheRootSet, ctx: &TQContext) -> Result<StateVector> {
    let nested = build_nested_state(roots, ctx)?;
    assemble_state(roots, &nested, &ctx.params)
}

/// `‖A v − λ v‖ / ‖v‖`
pub fn eigen_residual(a: &Matrix, v: &Vector, lambda: Complex) -> f64 {
    (a * v - v * lambda).norm() / v.norm()
}

/// Relative residuals `‖t(u)Ψ − Λ(u)Ψ‖ / (‖Ψ‖·max(|Λ(u)|, 1))` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub points: Vec<Complex>,
    pub residuals: Vec<f64>,
    pub max: f64,
}

pub fn verify_eigenstate(
    state: &StateVector,
    family: &TransferFamily,
    lambda: impl Fn(Complex) -> Result<Complex>,
    points: &[Complex],
) -> Result<EigenReport> {
    if state.norm() == 0.0 {
        return Err(Error::NullState { norm: 0.0, context: "verify_eigenstate".into() });
    }
    let mut residuals = Vec::with_capacity(points.len());
    for &u in points {
        let l = lambda(u)?;
        let r = eigen_residual(family.eval(u).matrix(), &state.amplitudes, l) / l.norm().max(1.0);
        residuals.push(r);
    }
    let max = residuals.iter().copied().fold(0.0, f64::max);
    Ok(EigenReport { points: points.to_vec(), residuals, max })
}

/// Nested eigen-residual `‖t̂(λ)F − Λ̂(λ)F‖ / (‖F‖·max(|Λ̂|, 1))` at the given `λ`.
pub fn verify_nested_state(state: &NestedState, roots: &BetheRootSet, ctx: &TQContext, lambdas: &[Complex]) -> Result<f64> {
    let eta = ctx.eta();
    let ls = roots.lambdas(eta);
    let mut worst: f64 = 0.0;
    for &l in lambdas {
        let t = build_nested_transfer(l, &ls, &ctx.params)?;
        let lam = crate::tq::lambda_nested(l, roots, ctx)?;
        worst = worst.max(eigen_residual(t.matrix(), &state.amplitudes, lam) / lam.norm().max(1.0));
    }
    Ok(worst)
}

/// Singular values of the matrix whose columns are the normalized states,
/// largest first; rank counts values above `tol·σ_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub rank: usize,
    pub condition: f64,
    pub singular_values: Vec<f64>,
}

pub fn gram_report(states: &[StateVector], tol: f64) -> GramReport {
    if states.is_empty() {
        return GramReport { rank: 0, condition: f64::INFINITY, singular_values: Vec::new() };
    }
    let d = states[0].amplitudes.len();
    let mut m = Matrix::zeros(d, states.len());
    for (k, s) in states.iter().enumerate() {
        m.set_column(k, &s.normalized().amplitudes);
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > tol * top).count();
    let condition = if rank == sv.len() { top / sv[sv.len() - 1] } else { f64::INFINITY };
    GramReport { rank, condition, singular_values: sv }
}

/// JSON export with basis metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    #[serde(rename = "L")]
    pub len: usize,
    pub basis: String,
    pub amplitudes: Vec<[f64; 2]>,
}

pub const BASIS_DESCRIPTION: &str =
    "lexicographic product basis, site 1 most significant; local 0 = empty (bosonic), 1 = spin down, 2 = spin up";

impl StateRecord {
    pub fn from_state(s: &StateVector) -> Self {
        Self {
            len: s.len,
            basis: BASIS_DESCRIPTION.into(),
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        let d = 3usize.pow(self.len as u32);
        if self.amplitudes.len() != d {
            return Err(Error::Dimension(format!("{} amplitudes for L = {}", self.amplitudes.len(), self.len)));
        }
        Ok(StateVector { len: self.len, amplitudes: Vector::from_iterator(d, self.amplitudes.iter().map(|p| Complex::new(p[0], p[1]))) })
    }
}
