//! Numerical solution of the coupled Bethe equations: damped Newton with a
//! finite-difference Jacobian, symmetry canonicalization, multi-start search
//! and matching against an exact-diagonalization spectrum.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{Complex, Matrix, ZERO};
use crate::tables;
use crate::tq::{bae_vector, energy, lambda_tq, BetheRootSet, TQContext};
use crate::transfer::{number_operator, SpectrumED, TransferFamily};

/// Where multi-start seeds come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPool {
    /// Use the published roots when the couplings match.
    pub table: bool,
    /// Number of random seeds per `M`.
    pub random: usize,
    /// Random box `|Re| ≤ box_re`, `|Im| ≤ box_im`.
    pub box_re: f64,
    pub box_im: f64,
    /// Extra user-provided seeds.
    pub extra: Vec<BetheRootSet>,
}

impl Default for SeedPool {
    fn default() -> Self {
        Self { table: true, random: 200, box_re: 3.0, box_im: 6.0, extra: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub max_iter: usize,
    /// Initial Newton step fraction (1 = full step).
    pub damping: f64,
    pub tol: f64,
    pub dedupe_radius: f64,
    /// Relative finite-difference step for the Jacobian.
    pub fd_step: f64,
    pub seeds: SeedPool,
    pub rng_seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iter: 60,
            damping: 1.0,
            tol: 1e-11,
            dedupe_radius: 1e-6,
            fd_step: 1e-7,
            seeds: SeedPool::default(),
            rng_seed: DEFAULT_SEED,
        }
    }
}

/// Seed recorded in every artifact unless overridden.
pub const DEFAULT_SEED: u64 = 20_170_526;

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.dedupe_radius > 0.0 && self.fd_step > 0.0 && self.damping > 0.0) {
            return Err(Error::Parameter("solver tolerances must be positive".into()));
        }
        if self.dedupe_radius <= self.tol {
            return Err(Error::Parameter("dedupe radius must exceed the residual tolerance".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSolution {
    pub roots: BetheRootSet,
    /// Max modulus of the printed residuals.
    pub residual: f64,
    pub energy: Complex,
    pub converged: bool,
    pub iterations: usize,
}

fn max_norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn two_norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn residual_vec(x: &[Complex], m: usize, ctx: &TQContext) -> Result<Vec<Complex>> {
    let r = bae_vector(&BetheRootSet::from_vec(x, m), ctx)?;
    if r.iter().all(|z| z.is_finite()) {
        Ok(r)
    } else {
        Err(Error::Solver("non-finite residual".into()))
    }
}

fn jacobian(x: &[Complex], m: usize, ctx: &TQContext, step: f64) -> Result<Matrix> {
    let n = x.len();
    let mut j = Matrix::zeros(n, n);
    for k in 0..n {
        let h = step * x[k].norm().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (fp, fm) = (residual_vec(&xp, m, ctx)?, residual_vec(&xm, m, ctx)?);
        for i in 0..n {
            j[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// Damped Newton on the `2M` printed residuals. The step is halved until
/// the residual 2-norm decreases, so accepted iterates never get worse.
pub fn newton_refine(seed: &BetheRootSet, ctx: &TQContext, cfg: &SolveConfig) -> Result<RootSolution> {
    let mut x = seed.to_vec();
    let m = seed.m();
    let finish = |x: &[Complex], res: f64, it: usize, conv: bool| -> Result<RootSolution> {
        let roots = BetheRootSet::from_vec(x, m);
        let e = energy(&roots, ctx)?;
        Ok(RootSolution { roots, residual: res, energy: e, converged: conv, iterations: it })
    };
    if x.is_empty() {
        return finish(&x, 0.0, 0, true);
    }
    let mut f = residual_vec(&x, m, ctx)?;
    let mut fn2 = two_norm(&f);
    for it in 0..cfg.max_iter {
        let res = max_norm(&f);
        if res <= cfg.tol {
            return finish(&x, res, it, true);
        }
        let j = jacobian(&x, m, ctx, cfg.fd_step)?;
        let rhs = -DVector::from_vec(f.clone());
        let dx = j.lu().solve(&rhs).ok_or_else(|| Error::Solver("singular Jacobian".into()))?;
        let mut alpha = cfg.damping.min(1.0);
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Complex> = x.iter().zip(dx.iter()).map(|(a, d)| a + d * alpha).collect();
            if let Ok(ft) = residual_vec(&trial, m, ctx) {
                let n2 = two_norm(&ft);
                if n2 < fn2 {
                    x = trial;
                    f = ft;
                    fn2 = n2;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            let res = max_norm(&f);
            if res <= cfg.tol * 10.0 {
                // floating-point floor just above tolerance
                return finish(&x, res, it, false);
            }
            return Err(Error::Solver(format!("line search stalled at residual {res:e}")));
        }
        if x.iter().any(|z| z.norm() > 1e6) {
            return Err(Error::Solver("divergence: roots escaped to infinity".into()));
        }
    }
    let res = max_norm(&f);
    if res <= cfg.tol {
        return finish(&x, res, cfg.max_iter, true);
    }
    Err(Error::Solver(format!("max iterations exceeded, residual {res:e}")))
}

/// Real parts this close to zero count as ties.
const TIE: f64 = 1e-9;

fn representative(z: Complex) -> Complex {
    if z.re > TIE || (z.re.abs() <= TIE && z.im >= 0.0) {
        z
    } else {
        -z
    }
}

fn lex(a: &Complex, b: &Complex) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Maps each `u_k` to the representative of `{u_k, −u_k−η}` (via
/// `x = u + η/2`, `x ↔ −x`) and each `ν_l` to that of `{ν_l, −ν_l}`; the
/// representative has `Re > 0`, ties broken by `Im ≥ 0`. Roots are sorted.
pub fn canonicalize(roots: &BetheRootSet, eta: Complex) -> BetheRootSet {
    let half = eta / 2.0;
    let mut u: Vec<Complex> = roots.u.iter().map(|&x| representative(x + half) - half).collect();
    let mut nu: Vec<Complex> = roots.nu.iter().map(|&x| representative(x)).collect();
    u.sort_by(lex);
    nu.sort_by(lex);
    BetheRootSet { u, nu }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn set_distance(a: &[Complex], b: &[Complex]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    permutations(a.len())
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| (a[i] - b[j]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Order-independent distance between two canonical root sets.
pub fn root_distance(a: &BetheRootSet, b: &BetheRootSet) -> f64 {
    set_distance(&a.u, &b.u).max(set_distance(&a.nu, &b.nu))
}

const PROBES: [Complex; 3] = [Complex::new(0.31, 0.17), Complex::new(-0.43, 0.29), Complex::new(0.12, -0.51)];

fn same_eigenvalue(a: &BetheRootSet, b: &BetheRootSet, ctx: &TQContext) -> bool {
    PROBES.iter().all(|&u| match (lambda_tq(u, a, ctx), lambda_tq(u, b, ctx)) {
        (Ok(x), Ok(y)) => (x - y).norm() <= 1e-8 * x.norm().max(1.0),
        _ => false,
    })
}

/// Canonicalizes and drops duplicates: two solutions are identified when
/// their canonical roots agree within the radius and `Λ(u)` agrees at three
/// probe points.
pub fn dedupe(solutions: Vec<RootSolution>, ctx: &TQContext, radius: f64) -> Vec<RootSolution> {
    let eta = ctx.eta();
    let mut out: Vec<RootSolution> = Vec::new();
    for mut s in solutions {
        s.roots = canonicalize(&s.roots, eta);
        let dup = out
            .iter()
            .any(|o| root_distance(&o.roots, &s.roots) <= radius && same_eigenvalue(&o.roots, &s.roots, ctx));
        if !dup {
            out.push(s);
        }
    }
    out
}

/// Excludes root sets where the Bethe equations degenerate: coincident
/// roots up to the reflection symmetries, roots on kernel singularities, or
/// roots pinned to a symmetry fixed point (`u = −η/2`, `ν = 0`), which solve
/// the equations without belonging to any level.
fn admissible(roots: &BetheRootSet, eta: Complex) -> bool {
    let sep = 1e-5;
    for (i, &u) in roots.u.iter().enumerate() {
        if u.norm() < sep || (u + eta).norm() < sep || (u + eta / 2.0).norm() < sep {
            return false;
        }
        if roots.u[..i].iter().any(|&uj| (u - uj).norm() < sep || (u + uj + eta).norm() < sep) {
            return false;
        }
    }
    // near ν = 0 pairs of level-2 roots can drift along flat directions
    let fixed = 1e-3;
    for (i, &v) in roots.nu.iter().enumerate() {
        if v.norm() < fixed || roots.nu[..i].iter().any(|&vj| (v - vj).norm() < sep || (v + vj).norm() < sep) {
            return false;
        }
    }
    roots.u.iter().chain(&roots.nu).all(|z| z.is_finite() && z.norm() < 1e3)
}

fn random_seed(m: usize, m2: usize, rng: &mut impl Rng, pool: &SeedPool, eta: Complex) -> BetheRootSet {
    let mut draw = |structured: bool, level1: bool| -> Complex {
        let (re, im) = (rng.gen_range(-pool.box_re..pool.box_re), rng.gen_range(-pool.box_im..pool.box_im));
        if !structured {
            return Complex::new(re, im);
        }
        // roots cluster on the lines fixed by the reflection symmetries
        match (level1, rng.gen_range(0..3)) {
            (true, 0) => Complex::new(-eta.re / 2.0, im),
            (true, 1) => Complex::new(re.abs() * 0.5, 0.0),
            (false, 0) => Complex::new(0.0, im),
            (false, 1) => Complex::new(re.abs() * 0.3, 0.0),
            _ => Complex::new(re * 0.5, im),
        }
    };
    let structured = m > 0;
    let u = (0..m).map(|_| draw(structured, true)).collect();
    let nu = (0..m2).map(|_| draw(structured, false)).collect();
    BetheRootSet { u, nu }
}

/// Newton from table seeds (if the couplings match), random boxes and
/// perturbations of found solutions; returns canonical, deduplicated,
/// admissible solutions for the given `M`. With `h = 0` every `M₂ ≤ M` is
/// searched, each with the full random budget.
pub fn multistart_search(m: usize, ctx: &TQContext, cfg: &SolveConfig) -> Result<Vec<RootSolution>> {
    cfg.validate()?;
    let p = &ctx.params;
    if m > p.len() {
        return Err(Error::Parameter(format!("M = {m} exceeds L = {}", p.len())));
    }
    let eta = ctx.eta();
    if m == 0 {
        return Ok(vec![newton_refine(&BetheRootSet::empty(), ctx, cfg)?]);
    }
    let mut seeds: Vec<BetheRootSet> = cfg.seeds.extra.iter().filter(|s| s.m() == m).cloned().collect();
    if cfg.seeds.table && tables::is_table_params(p) {
        if let Some(rows) = tables::printed_rows(p.len()) {
            seeds.extend(rows.iter().filter(|r| r.m() == m).map(|r| r.roots()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ (m as u64).wrapping_mul(0x9e37_79b9));
    let sectors: Vec<usize> = if ctx.h == ZERO { (0..=m).rev().collect() } else { vec![m] };
    for &m2 in &sectors {
        for _ in 0..cfg.seeds.random {
            seeds.push(random_seed(m, m2, &mut rng, &cfg.seeds, eta));
        }
    }
    let run = |seeds: &[BetheRootSet]| -> Vec<RootSolution> {
        seeds
            .par_iter()
            .filter_map(|s| newton_refine(s, ctx, cfg).ok())
            .filter(|s| s.converged && admissible(&s.roots, eta))
            .collect()
    };
    let found = dedupe(run(&seeds), ctx, cfg.dedupe_radius);
    // perturbation round around each distinct solution
    let mut more = Vec::new();
    for s in &found {
        for _ in 0..4 {
            let jitter = |z: &Complex, rng: &mut ChaCha8Rng| z + Complex::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
            let u = s.roots.u.iter().map(|z| jitter(z, &mut rng)).collect();
            let nu = s.roots.nu.iter().map(|z| jitter(z, &mut rng)).collect();
            more.push(BetheRootSet { u, nu });
        }
    }
    let mut all = found;
    all.extend(run(&more));
    Ok(dedupe(all, ctx, cfg.dedupe_radius))
}

/// One ED level and what was matched to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMatch {
    /// Zero-based index into the ED spectrum.
    pub level: usize,
    pub energy_ed: Complex,
    pub solution: Option<RootSolution>,
    pub energy_error: Option<f64>,
    /// Max relative |Λ(u) − t(u)-eigenvalue| over the probe points.
    pub lambda_error: Option<f64>,
    /// Electron number of the ED eigenvector.
    pub electron_number: Option<f64>,
    /// Another ED level lies within tolerance of the same T−Q energy.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub levels: Vec<LevelMatch>,
    pub coverage: f64,
    pub energy_tol: f64,
    pub lambda_tol: f64,
}

impl MatchReport {
    pub fn matched(&self) -> usize {
        self.levels.iter().filter(|l| l.solution.is_some()).count()
    }

    /// Every level matched, with energy and Λ certificates inside tolerance.
    pub fn all_certified(&self) -> bool {
        self.levels.iter().all(|l| {
            l.solution.is_some()
                && l.energy_error.is_some_and(|e| e <= self.energy_tol)
                && l.lambda_error.is_none_or(|e| e <= self.lambda_tol)
        })
    }
}

/// Rayleigh quotient `v†Av / v†v`.
pub fn rayleigh(a: &Matrix, v: &DVector<Complex>) -> Complex {
    v.dotc(&(a * v)) / v.dotc(v)
}

/// Orthonormal basis of the span of the columns.
fn orthonormal_basis(cols: &Matrix) -> Matrix {
    cols.clone().qr().q()
}

/// Eigenvalues of `A` compressed to the invariant subspace spanned by the
/// orthonormal columns of `q`.
fn compressed_eigenvalues(a: &Matrix, q: &Matrix) -> Vec<Complex> {
    let c = q.adjoint() * a * q;
    if c.nrows() == 1 {
        return vec![c[(0, 0)]];
    }
    let (_, t) = c.schur().unpack();
    t.diagonal().iter().copied().collect()
}

fn nearest(values: &[Complex], target: Complex) -> Complex {
    values
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .unwrap_or(Complex::new(f64::NAN, 0.0))
}

/// Random probe points for the Λ certificate.
pub fn probe_points(count: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Complex::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8))).collect()
}

/// Greedy nearest-energy matching of T−Q solutions to ED levels (tolerance
/// `energy_tol`), with a second certificate comparing `Λ(u)` to the
/// eigenvalues of `t(u)` on the matched ED eigenspace at 5 random `u`.
pub fn match_spectrum(
    solutions: &[RootSolution],
    ed: &SpectrumED,
    ctx: &TQContext,
    family: Option<&TransferFamily>,
    energy_tol: f64,
) -> MatchReport {
    let lambda_tol = 1e-6;
    let n_levels = ed.len();
    let number = ed.eigenvectors.as_ref().map(|_| {
        let len = (n_levels as f64).log(3.0).round() as usize;
        number_operator(len).into_matrix()
    });
    let mut levels: Vec<LevelMatch> = ed
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &e)| LevelMatch {
            level: k,
            energy_ed: e,
            solution: None,
            energy_error: None,
            lambda_error: None,
            electron_number: None,
            ambiguous: false,
        })
        .collect();
    let mut order: Vec<&RootSolution> = solutions.iter().collect();
    order.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let probes = probe_points(5, 0x7a11);
    for s in order {
        let mut cands: Vec<(usize, f64)> = levels
            .iter()
            .filter(|l| l.solution.is_none())
            .map(|l| (l.level, (l.energy_ed - s.energy).norm()))
            .collect();
        cands.sort_by(|a, b| a.1.total_cmp(&b.1));
        let Some(&(k, err)) = cands.first() else { break };
        if err > energy_tol {
            continue;
        }
        let ambiguous = cands.get(1).is_some_and(|c| c.1 <= energy_tol);
        let lv = &mut levels[k];
        lv.solution = Some(s.clone());
        lv.energy_error = Some(err);
        lv.ambiguous = ambiguous;
        if let Some(vecs) = ed.eigenvectors.as_ref() {
            // degenerate ED levels: certify on the whole eigenspace, where
            // t(u) and N act; a single H-eigenvector need not diagonalize t(u)
            let cluster: Vec<usize> =
                (0..n_levels).filter(|&j| (ed.eigenvalues[j] - ed.eigenvalues[k]).norm() <= energy_tol).collect();
            let mut cols = Matrix::zeros(vecs.nrows(), cluster.len());
            for (c, &j) in cluster.iter().enumerate() {
                cols.set_column(c, &vecs.column(j));
            }
            let q = orthonormal_basis(&cols);
            if let Some(n) = &number {
                lv.electron_number = Some(nearest(&compressed_eigenvalues(n, &q), Complex::new(s.roots.m() as f64, 0.0)).re);
            }
            if let Some(fam) = family {
                let mut worst: f64 = 0.0;
                for &u in &probes {
                    let lam = lambda_tq(u, &s.roots, ctx).unwrap_or(Complex::new(f64::NAN, 0.0));
                    let ev = nearest(&compressed_eigenvalues(fam.eval(u).matrix(), &q), lam);
                    let r = (lam - ev).norm() / ev.norm().max(1e-300);
                    worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
                }
                lv.lambda_error = Some(worst);
            }
        }
        if ambiguous {
            // record the competing level as well
            if let Some(&(k2, err2)) = cands.get(1) {
                let l2 = &mut levels[k2];
                l2.ambiguous = true;
                l2.energy_error.get_or_insert(err2);
            }
        }
    }
    let matched = levels.iter().filter(|l| l.solution.is_some()).count();
    let coverage = if n_levels == 0 { 0.0 } else { matched as f64 / n_levels as f64 };
    MatchReport { levels, coverage, energy_tol, lambda_tol }
}

/// JSON record `{M, u, nu, residual, energy}` with complex numbers as
/// `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    #[serde(rename = "M")]
    pub m: usize,
    pub u: Vec<[f64; 2]>,
    pub nu: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<[f64; 2]>,
}

fn pairs(v: &[Complex]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl SolutionRecord {
    pub fn from_roots(roots: &BetheRootSet) -> Self {
        Self { m: roots.m(), u: pairs(&roots.u), nu: pairs(&roots.nu), residual: None, energy: None }
    }

    pub fn from_solution(s: &RootSolution) -> Self {
        Self { residual: Some(s.residual), energy: Some([s.energy.re, s.energy.im]), ..Self::from_roots(&s.roots) }
    }

    pub fn roots(&self) -> Result<BetheRootSet> {
        let cv = |v: &[[f64; 2]]| v.iter().map(|p| Complex::new(p[0], p[1])).collect::<Vec<_>>();
        let r = BetheRootSet::new(cv(&self.u), cv(&self.nu))?;
        if r.m() != self.m {
            return Err(Error::Parameter(format!("record says M = {} but lists {} roots", self.m, r.m())));
        }
        Ok(r)
    }
}

/// Reads seeds from the JSON record format (a list of records).
pub fn seeds_from_json(text: &str) -> Result<Vec<BetheRootSet>> {
    let recs: Vec<SolutionRecord> =
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("seed file: {e}")))?;
    recs.iter().map(|r| r.roots()).collect()
}

/// The identity used when comparing energies that should be real.
pub fn is_real(z: Complex, tol: f64) -> bool {
    z.im.abs() <= tol
}
