//! Monodromy and transfer matrices, the nested (reduced) transfer matrix, the
//! Hamiltonian built two ways, and dense exact diagonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{
    c, chebyshev_nodes, embed, embed_sparse, max_abs, plain_trace, poly_interpolate, super_trace, Complex,
    GradedOperator, GradedSpace, Matrix, OperatorPoly, TensorSpace, ONE, ZERO,
};
use crate::kernels::{bff, k_minus, k_plus, nested_k_minus, nested_k_plus, nested_space, pregauge_k_minus, pregauge_k_plus, r_matrix, r_nested, ModelParams};

/// Largest chain handled by the dense routines.
pub const MAX_DENSE_SITES: usize = 8;

/// Quantum space `V^{⊗L}` with BFF grading.
pub fn chain_space(len: usize) -> TensorSpace {
    TensorSpace::power(&bff(), len)
}

/// Auxiliary factor 0 followed by the `L` quantum factors.
pub fn aux_chain_space(len: usize) -> TensorSpace {
    TensorSpace::power(&bff(), len + 1)
}

fn check_len(p: &ModelParams) -> Result<()> {
    if p.len() > MAX_DENSE_SITES {
        return Err(Error::Parameter(format!("L = {} exceeds the dense cap {MAX_DENSE_SITES}", p.len())));
    }
    Ok(())
}

/// Applies local factors right-to-left: returns `F_0 F_1 ⋯ F_k` as a dense
/// matrix. Each factor is `(local op, target sites)`.
fn ordered_product(factors: &[(GradedOperator, Vec<usize>)], target: &TensorSpace) -> Result<Matrix> {
    let mut acc: Option<Matrix> = None;
    for (op, sites) in factors.iter().rev() {
        let sp = embed_sparse(op, sites, target)?;
        acc = Some(match acc {
            None => sp.to_dense().into_matrix(),
            Some(m) => sp.mul_dense(&m),
        });
    }
    Ok(acc.unwrap_or_else(|| Matrix::identity(target.dim(), target.dim())))
}

fn row_factors(u: Complex, p: &ModelParams, aux: usize, sites: &[usize]) -> Vec<(GradedOperator, Vec<usize>)> {
    // R_{0L}(u−θ_L) ⋯ R_{01}(u−θ_1)
    (0..sites.len())
        .rev()
        .map(|j| (r_matrix(u - p.theta[j], p.eta), vec![aux, sites[j]]))
        .collect()
}

fn hat_factors(u: Complex, p: &ModelParams, aux: usize, sites: &[usize]) -> Vec<(GradedOperator, Vec<usize>)> {
    // R_{10}(u+θ_1) ⋯ R_{L0}(u+θ_L)
    (0..sites.len())
        .map(|j| (r_matrix(u + p.theta[j], p.eta), vec![sites[j], aux]))
        .collect()
}

/// Row-to-row monodromies `(T₀(u), T̂₀(u))` on aux ⊗ chain.
pub fn build_monodromies(u: Complex, p: &ModelParams) -> Result<(GradedOperator, GradedOperator)> {
    check_len(p)?;
    let target = aux_chain_space(p.len());
    let sites: Vec<usize> = (1..=p.len()).collect();
    let t = ordered_product(&row_factors(u, p, 0, &sites), &target)?;
    let th = ordered_product(&hat_factors(u, p, 0, &sites), &target)?;
    Ok((GradedOperator::new(target.clone(), t)?, GradedOperator::new(target, th)?))
}

/// `𝕋(u) = T(u) K⁻(u) T̂(u)` with auxiliary factor `aux` and quantum sites
/// `sites` of an arbitrary target space.
pub fn double_row_on(u: Complex, p: &ModelParams, target: &TensorSpace, aux: usize, sites: &[usize]) -> Result<GradedOperator> {
    if sites.len() != p.len() {
        return Err(Error::InvalidSites { sites: sites.to_vec(), len: target.len() });
    }
    let mut factors = row_factors(u, p, aux, sites);
    factors.push((k_minus(u, p), vec![aux]));
    factors.extend(hat_factors(u, p, aux, sites));
    GradedOperator::new(target.clone(), ordered_product(&factors, target)?)
}

/// Double-row monodromy on aux ⊗ chain.
pub fn build_double_row(u: Complex, p: &ModelParams) -> Result<GradedOperator> {
    check_len(p)?;
    let sites: Vec<usize> = (1..=p.len()).collect();
    double_row_on(u, p, &aux_chain_space(p.len()), 0, &sites)
}

/// Auxiliary-space blocks of the double-row monodromy:
///
/// ```text
/// 𝕋 = | A   B₁  B₂  |
///     | C₁  D₁₁ D₁₂ |
///     | C₂  D₂₁ D₂₂ |
/// ```
/// Indices of `b`, `c`, `d` are zero-based.
#[derive(Debug, Clone)]
pub struct DoubleRowBlocks {
    pub a: GradedOperator,
    pub b: [GradedOperator; 2],
    pub c: [GradedOperator; 2],
    pub d: [[GradedOperator; 2]; 2],
}

impl DoubleRowBlocks {
    pub fn from_double_row(t: &GradedOperator) -> Result<Self> {
        let blk = |i, j| t.block(i, j);
        Ok(Self {
            a: blk(0, 0)?,
            b: [blk(0, 1)?, blk(0, 2)?],
            c: [blk(1, 0)?, blk(2, 0)?],
            d: [[blk(1, 1)?, blk(1, 2)?], [blk(2, 1)?, blk(2, 2)?]],
        })
    }

    pub fn at(u: Complex, p: &ModelParams) -> Result<Self> {
        Self::from_double_row(&build_double_row(u, p)?)
    }
}

/// `t(u) = str₀ K₀⁺(u) 𝕋₀(u)`, assembled as a full operator product.
pub fn transfer_supertrace(u: Complex, p: &ModelParams) -> Result<GradedOperator> {
    let dr = build_double_row(u, p)?;
    let kp = embed(&k_plus(u, p), &[0], dr.space())?;
    super_trace(&kp.compose(&dr)?, 0)
}

/// `t(u) = k⁺₁₁ A − Σ k⁺_{i+1,j+1} D_{ji}`, assembled from blocks.
pub fn transfer_from_blocks(u: Complex, p: &ModelParams) -> Result<GradedOperator> {
    let blocks = DoubleRowBlocks::at(u, p)?;
    let kp = k_plus(u, p);
    let k = kp.matrix();
    let mut m = blocks.a.matrix() * k[(0, 0)];
    for i in 0..2 {
        for j in 0..2 {
            m -= blocks.d[j][i].matrix() * k[(i + 1, j + 1)];
        }
    }
    GradedOperator::new(blocks.a.space().clone(), m)
}

/// Exact polynomial representation of `u ↦ t(u)` (degree `2L + 2`).
#[derive(Debug, Clone)]
pub struct TransferFamily {
    pub params: ModelParams,
    pub t_poly: OperatorPoly,
    /// Interpolation nodes and the transfer matrices evaluated there.
    pub samples: Vec<(Complex, GradedOperator)>,
}

impl TransferFamily {
    pub fn degree(&self) -> usize {
        self.t_poly.degree()
    }

    pub fn eval(&self, u: Complex) -> GradedOperator {
        self.t_poly.eval(u)
    }

    pub fn derivative(&self, u: Complex) -> GradedOperator {
        self.t_poly.derivative().eval(u)
    }
}

/// Point used to confirm that the interpolant reproduces `t(u)` off-node.
const HOLDOUT: Complex = Complex::new(0.37, 0.21);

/// Samples `t(u)` at `2L + 3` Chebyshev nodes (in parallel) and interpolates.
pub fn build_transfer(p: &ModelParams) -> Result<TransferFamily> {
    check_len(p)?;
    let degree = 2 * p.len() + 2;
    let nodes = chebyshev_nodes(degree + 1, 1.0);
    let samples: Vec<(Complex, GradedOperator)> = nodes
        .par_iter()
        .map(|&u| transfer_from_blocks(u, p).map(|t| (u, t)))
        .collect::<Result<_>>()?;
    let t_poly = poly_interpolate(&samples, degree)?;
    let direct = transfer_from_blocks(HOLDOUT, p)?;
    let scale = max_abs(direct.matrix()).max(1e-300);
    let err = t_poly.eval(HOLDOUT).max_abs_diff(&direct) / scale;
    if err > 1e-9 {
        return Err(Error::Interpolation(format!("degree check failed: holdout error {err:e}")));
    }
    Ok(TransferFamily { params: p.clone(), t_poly, samples })
}

/// `t̄(λ) = Tr₀ K̄⁺(λ) T̄(λ) K̄⁻(λ) T̄̂(λ)` on `(ℂ²)^{⊗M}`, with
/// `T̄ = r₀₁(λ+λ₁)⋯r₀M(λ+λ_M)`, `T̄̂ = r_M0(λ−λ_M)⋯r₁₀(λ−λ₁)`.
pub fn nested_transfer_bar(lambda: Complex, lambdas: &[Complex], p: &ModelParams) -> Result<GradedOperator> {
    nested_trace(nested_k_plus(lambda, p), nested_k_minus(lambda, p), lambda, lambdas, p.eta, ZERO)
}

fn nested_trace(
    kp: GradedOperator,
    km: GradedOperator,
    x: Complex,
    xs: &[Complex],
    eta: Complex,
    shift: Complex,
) -> Result<GradedOperator> {
    let m = xs.len();
    if m == 0 {
        return Err(Error::Parameter("nested transfer matrix needs M >= 1".into()));
    }
    let target = TensorSpace::power(&nested_space(), m + 1);
    let mut factors = vec![(kp, vec![0])];
    for (j, &xj) in xs.iter().enumerate() {
        factors.push((r_nested(x + xj + shift, eta), vec![0, j + 1]));
    }
    factors.push((km, vec![0]));
    for (j, &xj) in xs.iter().enumerate().rev() {
        factors.push((r_nested(x - xj, eta), vec![j + 1, 0]));
    }
    let op = GradedOperator::new(target, ordered_product(&factors, &TensorSpace::power(&nested_space(), m + 1))?)?;
    plain_trace(&op, 0)
}

/// `t̂(λ) = (2λ−η)/(2λ) · t̄(λ)`.
pub fn build_nested_transfer(lambda: Complex, lambdas: &[Complex], p: &ModelParams) -> Result<GradedOperator> {
    if lambda == ZERO {
        return Err(Error::Pole("nested transfer prefactor at λ = 0; use nested_transfer_bar".into()));
    }
    let pref = (lambda * 2.0 - p.eta) / (lambda * 2.0);
    Ok(nested_transfer_bar(lambda, lambdas, p)?.scale(pref))
}

/// The same operator in the level-1 variables: `2u/(2u+η) · tr K̄⁺(u)
/// r₀₁(u+u₁+η)⋯ K̄⁻(u) ⋯ r₁₀(u−u₁)` with the pre-gauge boundary blocks.
pub fn nested_transfer_direct(u: Complex, us: &[Complex], p: &ModelParams) -> Result<GradedOperator> {
    let km = pregauge_k_minus(u, p)?;
    let t = nested_trace(pregauge_k_plus(u, p), km, u, us, p.eta, p.eta)?;
    Ok(t.scale(u * 2.0 / (u * 2.0 + p.eta)))
}

/// Electron number `N̂`: diagonal count of non-empty sites.
pub fn number_operator(len: usize) -> GradedOperator {
    let sp = chain_space(len);
    let counts: Vec<f64> = (0..sp.dim()).map(|i| sp.digits(i).iter().filter(|&&x| x != 0).count() as f64).collect();
    GradedOperator::from_fn(sp, |r, col| if r == col { c(counts[r]) } else { ZERO })
}

fn hamiltonian_constant(p: &ModelParams) -> Result<Complex> {
    let (zeta, cc) = (p.minus.zeta, p.minus.c);
    let denom = (p.plus.c - 0.5) * p.eta - p.plus.zeta;
    if zeta == ZERO || denom == ZERO {
        return Err(Error::Pole("boundary constant: ζ or (c'−1/2)η − ζ' vanishes".into()));
    }
    Ok(p.eta * (cc * 2.0 - 1.0) / (zeta * 2.0) + p.plus.zeta / denom + c(p.len() as f64 - 1.0))
}

/// `H = −(η/2) t'(0) t(0)⁻¹ + const − μN̂` at the homogeneous point.
pub fn hamiltonian_from_transfer(p: &ModelParams) -> Result<GradedOperator> {
    let hp = p.homogeneous();
    let fam = build_transfer(&hp)?;
    let t0 = fam.eval(ZERO).into_matrix();
    let dt0 = fam.derivative(ZERO).into_matrix();
    // X t0 = dt0  ⟺  t0ᵀ Xᵀ = dt0ᵀ
    let x_t = t0
        .transpose()
        .lu()
        .solve(&dt0.transpose())
        .ok_or_else(|| {
            let sv = t0.singular_values();
            let cond = sv.max() / sv.min();
            Error::Singular(format!("t(0), condition number {cond:e}"))
        })?;
    let log_der = x_t.transpose();
    let d = log_der.nrows();
    let konst = hamiltonian_constant(&hp)?;
    let n = number_operator(hp.len()).into_matrix();
    let h = log_der * (-hp.eta / 2.0) + Matrix::identity(d, d) * konst - n * hp.mu;
    GradedOperator::new(chain_space(hp.len()), h)
}

/// Local code index of spin `σ = −1` and `σ = +1` electrons.
const DOWN: usize = 1;
const UP: usize = 2;

fn local_unit(row: usize, col: usize) -> GradedOperator {
    GradedOperator::from_fn(TensorSpace::single(bff()), |r, cc| if r == row && cc == col { ONE } else { ZERO })
}

/// The t-J Hamiltonian at `J = 2t = 2` with the boundary fields of the
/// integrable parameter map, built from Jordan–Wigner fermions.
pub fn hamiltonian_direct(p: &ModelParams) -> Result<GradedOperator> {
    check_len(p)?;
    let len = p.len();
    let sp = chain_space(len);
    let d = sp.dim();
    let op = |row: usize, col: usize, site: usize| -> Result<Matrix> {
        Ok(embed(&local_unit(row, col), &[site], &sp)?.into_matrix())
    };
    let mut h = Matrix::zeros(d, d);
    for j in 0..len.saturating_sub(1) {
        let k = j + 1;
        for s in [DOWN, UP] {
            // c†_{j,σ} = |σ⟩⟨0|, c_{j,σ} = |0⟩⟨σ| with the string from `embed`
            h -= op(s, 0, j)? * op(0, s, k)? + op(s, 0, k)? * op(0, s, j)?;
        }
        let nz = |site| -> Result<(Matrix, Matrix)> {
            let up = op(UP, UP, site)?;
            let dn = op(DOWN, DOWN, site)?;
            Ok((&up + &dn, (&up - &dn) * c(0.5)))
        };
        let (nj, szj) = nz(j)?;
        let (nk, szk) = nz(k)?;
        let flip = op(UP, DOWN, j)? * op(DOWN, UP, k)? + op(DOWN, UP, j)? * op(UP, DOWN, k)?;
        let ss = &szj * &szk + flip * c(0.5);
        h += (ss - &nj * &nk * c(0.25)) * c(2.0);
        h += nj + nk;
    }
    // boundary fields: ξ n + 2h^z S^z + 2h⁻ S⁻ + 2h⁺ S⁺, with S⁻ = |↑⟩⟨↓|
    let mut boundary = |site: usize, xi: Complex, hz: Complex, hm: Complex, hp_: Complex| -> Result<()> {
        h += op(UP, UP, site)? * (xi + hz) + op(DOWN, DOWN, site)? * (xi - hz);
        h += op(UP, DOWN, site)? * (hm * 2.0) + op(DOWN, UP, site)? * (hp_ * 2.0);
        Ok(())
    };
    let eta = p.eta;
    let (zeta, cc, c1, c2) = (p.minus.zeta, p.minus.c, p.minus.c1, p.minus.c2);
    if zeta == ZERO {
        return Err(Error::Pole("boundary field with ζ = 0".into()));
    }
    let f = -eta / (zeta * 2.0);
    boundary(0, f * (ONE - cc * 2.0), f, f * c2, f * c1)?;
    let denom = (p.plus.c - 0.5) * eta - p.plus.zeta;
    if denom == ZERO {
        return Err(Error::Pole("boundary field with (c'−1/2)η − ζ' = 0".into()));
    }
    let g = -eta / 2.0 / denom;
    boundary(len - 1, (p.plus.c - 0.5) * eta / denom, g, g * p.plus.c2, g * p.plus.c1)?;
    h -= number_operator(len).into_matrix() * p.mu;
    GradedOperator::new(sp, h)
}

/// Which operator a spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    HamiltonianDirect,
    HamiltonianTransfer,
    TransferAtU,
}

impl SpectrumSource {
    pub fn name(self) -> &'static str {
        match self {
            Self::HamiltonianDirect => "hamiltonian_direct",
            Self::HamiltonianTransfer => "hamiltonian_transfer",
            Self::TransferAtU => "transfer_at_u",
        }
    }
}

/// Full spectrum of a dense operator, sorted by (Re, Im) with real parts
/// within [`BUCKET`] treated as equal.
#[derive(Debug, Clone)]
pub struct SpectrumED {
    pub eigenvalues: Vec<Complex>,
    /// Column `k` is a unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Option<Matrix>,
    /// `‖Av − Ev‖/‖v‖` per pair; empty without vectors.
    pub residuals: Vec<f64>,
    pub source: SpectrumSource,
}

/// Tolerance for grouping (near-)equal real parts when sorting.
pub const BUCKET: f64 = 1e-7;

/// Sorts by real part, then by imaginary part inside runs of real parts
/// closer than [`BUCKET`].
pub fn sort_spectrum(values: &mut [Complex]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end].re - values[end - 1].re <= BUCKET {
            end += 1;
        }
        values[start..end].sort_by(|a, b| a.im.total_cmp(&b.im));
        start = end;
    }
}

impl SpectrumED {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with columns `n,re,im,residual,source` (n is one-based).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,re,im,residual,source\n");
        for (k, e) in self.eigenvalues.iter().enumerate() {
            let res = self.residuals.get(k).map(|r| format!("{r:.3e}")).unwrap_or_default();
            s.push_str(&format!("{},{:.10},{:.10},{},{}\n", k + 1, e.re, e.im, res, self.source.name()));
        }
        s
    }
}

/// Dense diagonalization via complex Schur; eigenvectors (if requested) by
/// inverse iteration with a residual certificate.
pub fn diagonalize(op: &GradedOperator, source: SpectrumSource, keep_vectors: bool) -> Result<SpectrumED> {
    let d = op.dim();
    if d > 3usize.pow(MAX_DENSE_SITES as u32) {
        return Err(Error::Parameter(format!("dimension {d} exceeds the dense cap")));
    }
    let m = op.matrix();
    let schur = m
        .clone()
        .try_schur(1e-15, 10_000 * d.max(1))
        .ok_or_else(|| Error::Eigen(format!("Schur iteration did not converge (dim {d})")))?;
    let mut values: Vec<Complex> = schur
        .eigenvalues()
        .ok_or_else(|| Error::Eigen("Schur form not triangular".into()))?
        .iter()
        .copied()
        .collect();
    sort_spectrum(&mut values);
    if !keep_vectors {
        return Ok(SpectrumED { eigenvalues: values, eigenvectors: None, residuals: Vec::new(), source });
    }
    let scale = max_abs(m).max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0xed);
    let mut vecs = Matrix::zeros(d, d);
    let mut residuals = Vec::with_capacity(d);
    for (k, &e) in values.iter().enumerate() {
        let v = inverse_iteration(m, e, scale, &mut rng)?;
        let r = (m * &v - &v * e).norm() / v.norm();
        residuals.push(r);
        vecs.set_column(k, &v);
    }
    Ok(SpectrumED { eigenvalues: values, eigenvectors: Some(vecs), residuals, source })
}

fn inverse_iteration(m: &Matrix, e: Complex, scale: f64, rng: &mut impl Rng) -> Result<nalgebra::DVector<Complex>> {
    let d = m.nrows();
    let shift = e + Complex::new(1.0, 0.7) * (scale * 1e-10);
    let a = m - Matrix::identity(d, d) * shift;
    let lu = a.lu();
    let mut v = nalgebra::DVector::from_fn(d, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    for _ in 0..3 {
        let w = lu.solve(&v).ok_or_else(|| Error::Eigen(format!("inverse iteration singular at {e}")))?;
        let n = w.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::Eigen(format!("inverse iteration diverged at {e}")));
        }
        v = w / c(n);
    }
    Ok(v)
}

/// Nested space of `m` sites, ungraded.
pub fn nested_chain_space(m: usize) -> TensorSpace {
    TensorSpace::power(&GradedSpace::bosonic(2), m)
}
