//! Z2-graded linear algebra on tensor powers of small graded spaces.
//!
//! Basis convention: a tensor space `V_0 ⊗ V_1 ⊗ … ⊗ V_{n-1}` is ordered
//! lexicographically with factor 0 most significant. The auxiliary space of
//! every monodromy is factor 0, the chain sites follow in order. All parity
//! signs are materialized into the dense matrices at construction time, so
//! downstream code only uses ordinary matrix products.
//!
//! Embedding of a k-site operator into a larger graded tensor space follows
//! the site-ordered sign rule: moving an operator component of parity `q`
//! past a spectator site in state `x` costs `(-1)^(q p(x))`. For a product of
//! two-site factors this reproduces the explicit sign string of the graded
//! row-to-row monodromy.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;
pub type Matrix = DMatrix<Complex64>;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);

#[inline]
pub fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

#[inline]
fn sign(exponent: usize) -> f64 {
    if exponent.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A finite-dimensional Z2-graded vector space, described by the parity of
/// each basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    parity: Vec<u8>,
}

impl GradedSpace {
    pub fn new(parity: Vec<u8>) -> Result<Self> {
        if parity.is_empty() {
            return Err(Error::Dimension("graded space must be non-empty".into()));
        }
        if parity.iter().any(|&p| p > 1) {
            return Err(Error::Dimension(format!("parities must be 0 or 1, got {parity:?}")));
        }
        Ok(Self { parity })
    }

    /// The local space of the t-J chain: one bosonic (empty) state followed by
    /// two fermionic (electron) states.
    pub fn bff() -> Self {
        Self { parity: vec![0, 1, 1] }
    }

    pub fn bosonic(dim: usize) -> Self {
        Self { parity: vec![0; dim.max(1)] }
    }

    pub fn fermionic(dim: usize) -> Self {
        Self { parity: vec![1; dim.max(1)] }
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn parity(&self, index: usize) -> u8 {
        self.parity[index]
    }

    pub fn parities(&self) -> &[u8] {
        &self.parity
    }
}

/// Ordered tensor product of graded spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    factors: Vec<GradedSpace>,
}

impl TensorSpace {
    pub fn new(factors: Vec<GradedSpace>) -> Self {
        Self { factors }
    }

    pub fn single(space: GradedSpace) -> Self {
        Self { factors: vec![space] }
    }

    pub fn power(space: &GradedSpace, n: usize) -> Self {
        Self { factors: vec![space.clone(); n] }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factor(&self, i: usize) -> &GradedSpace {
        &self.factors[i]
    }

    pub fn factors(&self) -> &[GradedSpace] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(GradedSpace::dim).product()
    }

    pub fn concat(&self, other: &TensorSpace) -> TensorSpace {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        TensorSpace { factors }
    }

    pub fn without(&self, factor: usize) -> TensorSpace {
        let mut factors = self.factors.clone();
        factors.remove(factor);
        TensorSpace { factors }
    }

    /// Per-factor digits of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % f.dim();
            index /= f.dim();
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&d, f)| acc * f.dim() + d)
    }

    /// Total parity of a basis state.
    pub fn state_parity(&self, index: usize) -> u8 {
        let digits = self.digits(index);
        let total: usize = digits
            .iter()
            .zip(&self.factors)
            .map(|(&d, f)| f.parity(d) as usize)
            .sum();
        (total % 2) as u8
    }
}

/// Dense operator on a graded tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedOperator {
    space: TensorSpace,
    matrix: Matrix,
}

impl GradedOperator {
    pub fn new(space: TensorSpace, matrix: Matrix) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "operator is {}x{} but space has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn from_fn(space: TensorSpace, f: impl FnMut(usize, usize) -> Complex) -> Self {
        let d = space.dim();
        Self { matrix: Matrix::from_fn(d, d, f), space }
    }

    pub fn identity(space: TensorSpace) -> Self {
        let d = space.dim();
        Self { matrix: Matrix::identity(d, d), space }
    }

    pub fn zeros(space: TensorSpace) -> Self {
        let d = space.dim();
        Self { matrix: Matrix::zeros(d, d), space }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self { space: self.space.clone(), matrix: &self.matrix * s }
    }

    pub fn compose(&self, rhs: &GradedOperator) -> Result<Self> {
        self.check_same_space(rhs)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix * &rhs.matrix })
    }

    pub fn add(&self, rhs: &GradedOperator) -> Result<Self> {
        self.check_same_space(rhs)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix })
    }

    pub fn sub(&self, rhs: &GradedOperator) -> Result<Self> {
        self.check_same_space(rhs)?;
        Ok(Self { space: self.space.clone(), matrix: &self.matrix - &rhs.matrix })
    }

    fn check_same_space(&self, rhs: &GradedOperator) -> Result<()> {
        if self.space != rhs.space {
            return Err(Error::Dimension("operators act on different graded spaces".into()));
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &GradedOperator) -> f64 {
        max_abs_diff(&self.matrix, &rhs.matrix)
    }

    /// True when every entry connecting states of different total parity is
    /// zero (to `tol`).
    pub fn is_even(&self, tol: f64) -> bool {
        let d = self.dim();
        let par: Vec<u8> = (0..d).map(|i| self.space.state_parity(i)).collect();
        (0..d).all(|r| (0..d).all(|c| par[r] == par[c] || self.matrix[(r, c)].norm() <= tol))
    }

    /// Block `(row, col)` of the leftmost factor, as an operator on the rest.
    pub fn block(&self, row: usize, col: usize) -> Result<GradedOperator> {
        if self.space.is_empty() {
            return Err(Error::InvalidFactor { factor: 0, count: 0 });
        }
        let lead = self.space.factor(0).dim();
        if row >= lead || col >= lead {
            return Err(Error::Dimension(format!("block ({row},{col}) outside {lead}x{lead}")));
        }
        let rest = self.space.without(0);
        let d = rest.dim();
        let m = self.matrix.view((row * d, col * d), (d, d)).into_owned();
        Ok(GradedOperator { space: rest, matrix: m })
    }
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Graded permutation on `space ⊗ space`:
/// `P^{a1 a2}_{b1 b2} = (-1)^{p(a1) p(a2)} δ_{a1 b2} δ_{b1 a2}`.
pub fn graded_permutation(space: &GradedSpace) -> GradedOperator {
    let d = space.dim();
    let ts = TensorSpace::power(space, 2);
    let mut m = Matrix::zeros(d * d, d * d);
    for a1 in 0..d {
        for a2 in 0..d {
            let s = sign(space.parity(a1) as usize * space.parity(a2) as usize);
            m[(a1 * d + a2, a2 * d + a1)] = c(s);
        }
    }
    GradedOperator { space: ts, matrix: m }
}

/// Ungraded permutation `δ_{a1 b2} δ_{b1 a2}` on `space ⊗ space` (parities ignored).
pub fn plain_permutation(space: &GradedSpace) -> GradedOperator {
    let d = space.dim();
    let mut m = Matrix::zeros(d * d, d * d);
    for a1 in 0..d {
        for a2 in 0..d {
            m[(a1 * d + a2, a2 * d + a1)] = ONE;
        }
    }
    GradedOperator { space: TensorSpace::power(space, 2), matrix: m }
}

/// Super tensor product with the sign `(-1)^{[p(α)+p(β)] p(γ)}` on
/// `(A⊗B)^{αγ}_{βδ} = A^α_β B^γ_δ`.
pub fn super_tensor(a: &GradedOperator, b: &GradedOperator) -> GradedOperator {
    let da = a.dim();
    let db = b.dim();
    let pa: Vec<usize> = (0..da).map(|i| a.space.state_parity(i) as usize).collect();
    let pb: Vec<usize> = (0..db).map(|i| b.space.state_parity(i) as usize).collect();
    let mut m = Matrix::zeros(da * db, da * db);
    for alpha in 0..da {
        for beta in 0..da {
            let x = a.matrix[(alpha, beta)];
            if x == ZERO {
                continue;
            }
            for gamma in 0..db {
                let s = sign((pa[alpha] + pa[beta]) * pb[gamma]);
                for delta in 0..db {
                    m[(alpha * db + gamma, beta * db + delta)] = x * b.matrix[(gamma, delta)] * s;
                }
            }
        }
    }
    GradedOperator { space: a.space.concat(&b.space), matrix: m }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransposeMode {
    /// `(A^st)_{ij} = A_{ji} (-1)^{p(i)[p(i)+p(j)]}`
    Super,
    /// Inverse of [`TransposeMode::Super`].
    InverseSuper,
    /// Plain partial transpose, no signs.
    Plain,
}

/// Partial (super) transpose in one tensor factor.
pub fn super_transpose(a: &GradedOperator, factor: usize, mode: TransposeMode) -> Result<GradedOperator> {
    let n = a.space.len();
    if factor >= n {
        return Err(Error::InvalidFactor { factor, count: n });
    }
    let sp = a.space.factor(factor).clone();
    let d = a.dim();
    let mut m = Matrix::zeros(d, d);
    for r in 0..d {
        let mut rd = a.space.digits(r);
        let i = rd[factor];
        for col in 0..d {
            let mut cd = a.space.digits(col);
            let j = cd[factor];
            let (pi, pj) = (sp.parity(i) as usize, sp.parity(j) as usize);
            let s = match mode {
                TransposeMode::Super => sign(pi * (pi + pj)),
                TransposeMode::InverseSuper => sign(pj * (pi + pj)),
                TransposeMode::Plain => 1.0,
            };
            rd[factor] = j;
            cd[factor] = i;
            let src = a.matrix[(a.space.index(&rd), a.space.index(&cd))];
            rd[factor] = i;
            m[(r, col)] = src * s;
        }
    }
    Ok(GradedOperator { space: a.space.clone(), matrix: m })
}

/// Partial super trace `Σ_α (-1)^{p(α)} [A]_{αα}` over one factor.
pub fn super_trace(a: &GradedOperator, factor: usize) -> Result<GradedOperator> {
    partial_trace(a, factor, true)
}

/// Partial ordinary trace over one factor.
pub fn plain_trace(a: &GradedOperator, factor: usize) -> Result<GradedOperator> {
    partial_trace(a, factor, false)
}

fn partial_trace(a: &GradedOperator, factor: usize, graded: bool) -> Result<GradedOperator> {
    let n = a.space.len();
    if factor >= n {
        return Err(Error::InvalidFactor { factor, count: n });
    }
    let sp = a.space.factor(factor).clone();
    let rest = a.space.without(factor);
    let dr = rest.dim();
    let mut m = Matrix::zeros(dr, dr);
    for r in 0..dr {
        let rd = rest.digits(r);
        for col in 0..dr {
            let cd = rest.digits(col);
            let mut acc = ZERO;
            for alpha in 0..sp.dim() {
                let mut full_r = rd.clone();
                full_r.insert(factor, alpha);
                let mut full_c = cd.clone();
                full_c.insert(factor, alpha);
                let s = if graded { sign(sp.parity(alpha) as usize) } else { 1.0 };
                acc += a.matrix[(a.space.index(&full_r), a.space.index(&full_c))] * s;
            }
            m[(r, col)] = acc;
        }
    }
    Ok(GradedOperator { space: rest, matrix: m })
}

/// Reorder the tensor factors of an operator: factor `m` of the result is
/// factor `order[m]` of the input. Basis vectors pick up the fermionic sign
/// of the induced permutation.
fn reorder_factors(a: &GradedOperator, order: &[usize]) -> GradedOperator {
    let k = order.len();
    let new_space = TensorSpace::new(order.iter().map(|&o| a.space.factor(o).clone()).collect());
    let d = a.dim();
    // map: old basis index -> (new index, sign)
    let map: Vec<(usize, f64)> = (0..d)
        .map(|idx| {
            let x = a.space.digits(idx);
            let y: Vec<usize> = order.iter().map(|&o| x[o]).collect();
            let mut inv = 0usize;
            for m1 in 0..k {
                for m2 in (m1 + 1)..k {
                    // new positions m1 < m2 hold old factors order[m1], order[m2]
                    if order[m1] > order[m2] {
                        let p1 = a.space.factor(order[m1]).parity(y[m1]) as usize;
                        let p2 = a.space.factor(order[m2]).parity(y[m2]) as usize;
                        inv += p1 * p2;
                    }
                }
            }
            (new_space.index(&y), sign(inv))
        })
        .collect();
    let mut m = Matrix::zeros(d, d);
    for r in 0..d {
        for col in 0..d {
            let v = a.matrix[(r, col)];
            if v != ZERO {
                let (nr, sr) = map[r];
                let (nc, sc) = map[col];
                m[(nr, nc)] = v * (sr * sc);
            }
        }
    }
    GradedOperator { space: new_space, matrix: m }
}

/// Embed a k-factor operator into `target`, with local factor `m` acting on
/// target factor `sites[m]` and identity elsewhere. Sites need not be sorted:
/// `embed(R, [j, 0])` is `R_{j0} = P R_{0j} P` in the graded sense.
pub fn embed(a: &GradedOperator, sites: &[usize], target: &TensorSpace) -> Result<GradedOperator> {
    Ok(embed_sparse(a, sites, target)?.to_dense())
}

/// Row-compressed operator, used for products of embedded local factors.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    space: TensorSpace,
    rows: Vec<Vec<(usize, Complex)>>,
}

impl SparseOperator {
    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn to_dense(&self) -> GradedOperator {
        let d = self.rows.len();
        let mut m = Matrix::zeros(d, d);
        for (r, row) in self.rows.iter().enumerate() {
            for &(col, v) in row {
                m[(r, col)] += v;
            }
        }
        GradedOperator { space: self.space.clone(), matrix: m }
    }

    /// `self · rhs`
    pub fn mul_dense(&self, rhs: &Matrix) -> Matrix {
        let d = self.rows.len();
        let nc = rhs.ncols();
        let mut out = Matrix::zeros(d, nc);
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, v) in row {
                for j in 0..nc {
                    out[(r, j)] += v * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Sparse form of [`embed`].
pub fn embed_sparse(a: &GradedOperator, sites: &[usize], target: &TensorSpace) -> Result<SparseOperator> {
    let n = target.len();
    let k = a.space.len();
    let bad = || Error::InvalidSites { sites: sites.to_vec(), len: n };
    if sites.len() != k || k == 0 {
        return Err(bad());
    }
    for (m, &s) in sites.iter().enumerate() {
        if s >= n || sites[..m].contains(&s) {
            return Err(bad());
        }
        if target.factor(s) != a.space.factor(m) {
            return Err(Error::Dimension(format!("factor {m} does not match target site {s}")));
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&m| sites[m]);
    let local = if order.iter().enumerate().all(|(i, &o)| i == o) {
        a.clone()
    } else {
        reorder_factors(a, &order)
    };
    let sorted: Vec<usize> = order.iter().map(|&m| sites[m]).collect();

    let spectators: Vec<usize> = (0..n).filter(|s| !sorted.contains(s)).collect();
    let spec_space = TensorSpace::new(spectators.iter().map(|&s| target.factor(s).clone()).collect());
    let dl = local.dim();
    let ld: Vec<Vec<usize>> = (0..dl).map(|i| local.space.digits(i)).collect();
    let lp: Vec<Vec<usize>> = ld
        .iter()
        .map(|dig| dig.iter().enumerate().map(|(m, &x)| local.space.factor(m).parity(x) as usize).collect())
        .collect();
    let nz: Vec<(usize, usize, Complex)> = (0..dl)
        .flat_map(|r| (0..dl).map(move |col| (r, col)))
        .filter_map(|(r, col)| {
            let v = local.matrix[(r, col)];
            (v != ZERO).then_some((r, col, v))
        })
        .collect();

    let dt = target.dim();
    let mut rows: Vec<Vec<(usize, Complex)>> = vec![Vec::new(); dt];
    let mut full = vec![0usize; n];
    let n_spec = if spectators.is_empty() { 1 } else { spec_space.dim() };
    for sidx in 0..n_spec {
        let sd = if spectators.is_empty() { Vec::new() } else { spec_space.digits(sidx) };
        for (&s, &x) in spectators.iter().zip(&sd) {
            full[s] = x;
        }
        // fermionic spectators strictly left of each active site
        let left: Vec<usize> = sorted
            .iter()
            .map(|&t| {
                spectators
                    .iter()
                    .zip(&sd)
                    .filter(|(&s, _)| s < t)
                    .map(|(&s, &x)| target.factor(s).parity(x) as usize)
                    .sum()
            })
            .collect();
        for &(r, col, v) in &nz {
            let mut e = 0usize;
            for mm in 0..k {
                e += (lp[r][mm] + lp[col][mm]) * left[mm];
            }
            for (mm, &t) in sorted.iter().enumerate() {
                full[t] = ld[r][mm];
            }
            let ri = target.index(&full);
            for (mm, &t) in sorted.iter().enumerate() {
                full[t] = ld[col][mm];
            }
            let ci = target.index(&full);
            rows[ri].push((ci, v * sign(e)));
        }
    }
    Ok(SparseOperator { space: target.clone(), rows })
}

/// Operator-valued polynomial `Σ_k C_k u^k` with exact (interpolated)
/// matrix coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPoly {
    space: TensorSpace,
    coeffs: Vec<Matrix>,
}

impl OperatorPoly {
    pub fn new(space: TensorSpace, coeffs: Vec<Matrix>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Interpolation("polynomial needs at least one coefficient".into()));
        }
        let d = space.dim();
        if coeffs.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::Dimension("coefficient shape does not match space".into()));
        }
        Ok(Self { space, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn coefficients(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn eval(&self, u: Complex) -> GradedOperator {
        let mut acc = self.coeffs.last().cloned().unwrap();
        for cm in self.coeffs.iter().rev().skip(1) {
            acc *= u;
            acc += cm;
        }
        GradedOperator { space: self.space.clone(), matrix: acc }
    }

    pub fn derivative(&self) -> OperatorPoly {
        let d = self.space.dim();
        let coeffs = if self.coeffs.len() == 1 {
            vec![Matrix::zeros(d, d)]
        } else {
            self.coeffs.iter().enumerate().skip(1).map(|(k, m)| m * c(k as f64)).collect()
        };
        OperatorPoly { space: self.space.clone(), coeffs }
    }
}

/// Chebyshev points of the first kind scaled to `[-scale, scale]`.
pub fn chebyshev_nodes(n: usize, scale: f64) -> Vec<Complex> {
    (0..n)
        .map(|k| {
            let x = (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64).cos();
            c(scale * x)
        })
        .collect()
}

/// Entrywise interpolation of sampled operators by a polynomial of the stated
/// degree. Extra samples beyond `degree + 1` are fitted in least squares.
pub fn poly_interpolate(samples: &[(Complex, GradedOperator)], degree: usize) -> Result<OperatorPoly> {
    let n = samples.len();
    if n < degree + 1 {
        return Err(Error::Interpolation(format!("{n} samples for degree {degree}")));
    }
    for i in 0..n {
        for j in 0..i {
            if (samples[i].0 - samples[j].0).norm() < 1e-14 {
                return Err(Error::Interpolation(format!("repeated point {}", samples[i].0)));
            }
        }
    }
    let space = samples[0].1.space.clone();
    if samples.iter().any(|(_, op)| op.space != space) {
        return Err(Error::Dimension("samples act on different spaces".into()));
    }
    let d = space.dim();
    let vander = Matrix::from_fn(n, degree + 1, |i, k| samples[i].0.powu(k as u32));
    // rows: sample points, columns: flattened matrix entries
    let rhs = Matrix::from_fn(n, d * d, |i, e| samples[i].1.matrix[e]);
    let sol = if n == degree + 1 {
        vander
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Interpolation("singular Vandermonde system".into()))?
    } else {
        vander
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::Interpolation(e.to_string()))?
    };
    let coeffs = (0..=degree)
        .map(|k| Matrix::from_iterator(d, d, sol.row(k).iter().copied()))
        .collect();
    Ok(OperatorPoly { space, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(space: TensorSpace, rng: &mut impl Rng) -> GradedOperator {
        GradedOperator::from_fn(space, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn unit(space: &GradedSpace, a: usize, b: usize) -> GradedOperator {
        GradedOperator::from_fn(TensorSpace::single(space.clone()), |r, col| if r == a && col == b { ONE } else { ZERO })
    }

    #[test]
    #[allow(clippy::identity_op, clippy::erasing_op)]
    fn bff_permutation_signs() {
        let p = graded_permutation(&GradedSpace::bff());
        let m = p.matrix();
        // P^{11}_{11}, P^{23}_{32}, P^{12}_{21} in 1-based notation
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m[(1 * 3 + 2, 2 * 3 + 1)], c(-1.0));
        assert_eq!(m[(0 * 3 + 1, 1 * 3 + 0)], ONE);
        assert_eq!(m[(1 * 3 + 1, 1 * 3 + 1)], c(-1.0));
    }

    #[test]
    fn permutation_is_involution() {
        for sp in [GradedSpace::bff(), GradedSpace::fermionic(2), GradedSpace::bosonic(3)] {
            let p = graded_permutation(&sp);
            let pp = p.compose(&p).unwrap();
            assert!(pp.max_abs_diff(&GradedOperator::identity(p.space().clone())) < 1e-15);
        }
    }

    #[test]
    fn fermionic_permutation_is_minus_plain() {
        let f = GradedSpace::fermionic(2);
        let g = graded_permutation(&f);
        let p = plain_permutation(&f);
        // enumerate all 16 entries
        for r in 0..4 {
            for col in 0..4 {
                assert_eq!(g.matrix()[(r, col)], -p.matrix()[(r, col)]);
            }
        }
    }

    #[test]
    fn super_tensor_of_bosonic_blocks_is_kronecker() {
        let sp = GradedSpace::bff();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = unit(&sp, 0, 0).scale(Complex::new(rng.gen(), rng.gen()));
        let b = unit(&sp, 0, 0).scale(Complex::new(rng.gen(), rng.gen()));
        let t = super_tensor(&a, &b);
        let k = a.matrix().kronecker(b.matrix());
        assert!(max_abs_diff(t.matrix(), &k) < 1e-15);
        let id = GradedOperator::identity(TensorSpace::single(sp.clone()));
        let ii = super_tensor(&id, &id);
        assert!(ii.max_abs_diff(&GradedOperator::identity(ii.space().clone())) < 1e-15);
    }

    #[test]
    fn super_tensor_builds_graded_permutation() {
        let sp = GradedSpace::bff();
        let mut acc = GradedOperator::zeros(TensorSpace::power(&sp, 2));
        for a in 0..3 {
            for b in 0..3 {
                let term = super_tensor(&unit(&sp, a, b), &unit(&sp, b, a)).scale(c(sign(sp.parity(b) as usize)));
                acc = acc.add(&term).unwrap();
            }
        }
        assert!(acc.max_abs_diff(&graded_permutation(&sp)) < 1e-15);
    }

    #[test]
    fn super_tensor_is_associative() {
        let sp = GradedSpace::bff();
        let one = TensorSpace::single(sp.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let a = random_op(one.clone(), &mut rng);
            let b = random_op(one.clone(), &mut rng);
            let cc = random_op(TensorSpace::single(GradedSpace::fermionic(2)), &mut rng);
            let left = super_tensor(&super_tensor(&a, &b), &cc);
            let right = super_tensor(&a, &super_tensor(&b, &cc));
            assert!(left.max_abs_diff(&right) < 1e-12);
        }
    }

    #[test]
    fn transpose_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sp = TensorSpace::new(vec![GradedSpace::bff(), GradedSpace::fermionic(2)]);
        let a = random_op(sp, &mut rng);
        for f in 0..2 {
            let st = super_transpose(&a, f, TransposeMode::Super).unwrap();
            let back = super_transpose(&st, f, TransposeMode::InverseSuper).unwrap();
            assert!(back.max_abs_diff(&a) < 1e-15);
            let ist = super_transpose(&a, f, TransposeMode::InverseSuper).unwrap();
            let back = super_transpose(&ist, f, TransposeMode::Super).unwrap();
            assert!(back.max_abs_diff(&a) < 1e-15);
        }
        assert!(super_transpose(&a, 2, TransposeMode::Super).is_err());

        let bos = random_op(TensorSpace::single(GradedSpace::bosonic(3)), &mut rng);
        let st = super_transpose(&bos, 0, TransposeMode::Super).unwrap();
        assert!(max_abs_diff(st.matrix(), &bos.matrix().transpose()) < 1e-15);
    }

    #[test]
    fn double_super_transpose_on_fermionic_plane() {
        // All-odd 2-dim space: st(st(A))_{ij} = A_{ij} (-1)^{p(i)+p(j)} ... enumerate.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sp = TensorSpace::single(GradedSpace::new(vec![0, 1]).unwrap());
        let a = random_op(sp, &mut rng);
        let twice = super_transpose(&super_transpose(&a, 0, TransposeMode::Super).unwrap(), 0, TransposeMode::Super).unwrap();
        let par = [0usize, 1];
        for i in 0..2 {
            for j in 0..2 {
                let s = sign(par[i] * (par[i] + par[j]) + par[j] * (par[i] + par[j]));
                assert!((twice.matrix()[(i, j)] - a.matrix()[(i, j)] * s).norm() < 1e-15);
            }
        }
        // on the even-odd space st^2 flips the off-diagonal entries
        assert!((twice.matrix()[(0, 1)] + a.matrix()[(0, 1)]).norm() < 1e-15);
        assert!((twice.matrix()[(0, 0)] - a.matrix()[(0, 0)]).norm() < 1e-15);

        // all-odd plane: the signs of the two applications cancel entrywise
        let f = random_op(TensorSpace::single(GradedSpace::fermionic(2)), &mut rng);
        let once = super_transpose(&f, 0, TransposeMode::Super).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(once.matrix()[(i, j)], f.matrix()[(j, i)]);
            }
        }
        let twice = super_transpose(&once, 0, TransposeMode::Super).unwrap();
        assert!(twice.max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn supertrace_values() {
        let sp = GradedSpace::bff();
        let id = GradedOperator::identity(TensorSpace::single(sp.clone()));
        let s = super_trace(&id, 0).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.matrix()[(0, 0)], c(-1.0));
        let dg = GradedOperator::from_fn(TensorSpace::single(sp), |r, col| if r == col { c([2.0, 3.0, 7.0][r]) } else { ZERO });
        assert_eq!(super_trace(&dg, 0).unwrap().matrix()[(0, 0)], c(2.0 - 3.0 - 7.0));
        assert!(super_trace(&dg, 1).is_err());
    }

    #[test]
    fn supertrace_is_cyclic_on_even_operators() {
        let sp = GradedSpace::bff();
        let ts = TensorSpace::single(sp);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let even = |rng: &mut ChaCha8Rng| {
            let o = random_op(ts.clone(), rng);
            GradedOperator::from_fn(ts.clone(), |r, col| {
                if ts.state_parity(r) == ts.state_parity(col) {
                    o.matrix()[(r, col)]
                } else {
                    ZERO
                }
            })
        };
        let a = even(&mut rng);
        let b = even(&mut rng);
        let ab = super_trace(&a.compose(&b).unwrap(), 0).unwrap().matrix()[(0, 0)];
        let ba = super_trace(&b.compose(&a).unwrap(), 0).unwrap().matrix()[(0, 0)];
        assert!((ab - ba).norm() < 1e-13);
    }

    #[test]
    fn embed_identity_and_errors() {
        let sp = GradedSpace::bff();
        let target = TensorSpace::power(&sp, 3);
        let id = GradedOperator::identity(TensorSpace::single(sp.clone()));
        for s in 0..3 {
            let e = embed(&id, &[s], &target).unwrap();
            assert!(e.max_abs_diff(&GradedOperator::identity(target.clone())) < 1e-15);
        }
        let p = graded_permutation(&sp);
        assert!(embed(&p, &[0, 0], &target).is_err());
        assert!(embed(&p, &[0, 3], &target).is_err());
        assert!(embed(&p, &[1], &target).is_err());
    }

    #[test]
    fn embedded_permutations_satisfy_braid_relation() {
        let sp = GradedSpace::bff();
        let target = TensorSpace::power(&sp, 3);
        let p = graded_permutation(&sp);
        let p01 = embed(&p, &[0, 1], &target).unwrap();
        let p12 = embed(&p, &[1, 2], &target).unwrap();
        let p02 = embed(&p, &[0, 2], &target).unwrap();
        let l = p01.compose(&p12).unwrap().compose(&p01).unwrap();
        assert!(l.max_abs_diff(&p02) < 1e-15);
        // reversed site order of a symmetric operator
        let p10 = embed(&p, &[1, 0], &target).unwrap();
        assert!(p10.max_abs_diff(&p01) < 1e-15);
    }

    #[test]
    fn disjoint_even_embeddings_commute() {
        let sp = GradedSpace::bff();
        let target = TensorSpace::power(&sp, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ts = TensorSpace::single(sp.clone());
        let blockish = |rng: &mut ChaCha8Rng| {
            let o = random_op(ts.clone(), rng);
            GradedOperator::from_fn(ts.clone(), |r, col| {
                if (r == 0) == (col == 0) {
                    o.matrix()[(r, col)]
                } else {
                    ZERO
                }
            })
        };
        let a = embed(&blockish(&mut rng), &[0], &target).unwrap();
        let b = embed(&blockish(&mut rng), &[2], &target).unwrap();
        let ab = a.compose(&b).unwrap();
        let ba = b.compose(&a).unwrap();
        assert!(ab.max_abs_diff(&ba) < 1e-14);
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let sp = TensorSpace::single(GradedSpace::bff());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c0 = random_op(sp.clone(), &mut rng);
        let c1 = random_op(sp.clone(), &mut rng);
        let f = |u: Complex| c0.add(&c1.scale(u)).unwrap();
        let nodes = chebyshev_nodes(2, 1.0);
        let samples: Vec<_> = nodes.iter().map(|&u| (u, f(u))).collect();
        let poly = poly_interpolate(&samples, 1).unwrap();
        let probe = Complex::new(0.37, -1.2);
        assert!(poly.eval(probe).max_abs_diff(&f(probe)) < 1e-12);

        let constant: Vec<_> = nodes.iter().map(|&u| (u, c0.clone())).collect();
        let p0 = poly_interpolate(&constant, 0).unwrap();
        assert_eq!(p0.degree(), 0);
        assert!(p0.eval(c(5.0)).max_abs_diff(&c0) < 1e-12);

        let dup = vec![(c(0.5), c0.clone()), (c(0.5), c1.clone())];
        assert!(poly_interpolate(&dup, 1).is_err());
        assert!(poly_interpolate(&samples[..1], 1).is_err());
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let sp = TensorSpace::single(GradedSpace::bff());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let coeffs: Vec<Matrix> = (0..5).map(|_| random_op(sp.clone(), &mut rng).into_matrix()).collect();
        let poly = OperatorPoly::new(sp, coeffs).unwrap();
        let der = poly.derivative();
        assert_eq!(der.degree(), 3);
        let u = Complex::new(0.3, 0.2);
        let h = 1e-5;
        let fd = (poly.eval(u + h).matrix() - poly.eval(u - h).matrix()) / c(2.0 * h);
        let exact = der.eval(u).into_matrix();
        assert!(max_abs_diff(&fd, &exact) / max_abs(&exact) < 1e-6);
    }
}
