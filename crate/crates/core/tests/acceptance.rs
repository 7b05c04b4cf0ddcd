//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a gating criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use bethe_tj::graded::{c, max_abs, Complex};
use bethe_tj::kernels::{check_all, BoundaryParams, ModelParams};
use bethe_tj::roots::*;
use bethe_tj::states::{bethe_state, eigen_residual, gram_report, verify_eigenstate};
use bethe_tj::tables::printed_rows;
use bethe_tj::tq::*;
use bethe_tj::transfer::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

/// Number, name, whether it gates, check.
type Criterion = (usize, &'static str, bool, fn() -> Outcome);

fn random_sets(count: usize, len: usize, seed: u64) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| ModelParams::random(&mut rng, len)).collect()
}

fn commutator(fam: &TransferFamily, seed: u64) -> f64 {
    let pts = probe_points(20, seed);
    pts.chunks(2)
        .map(|uv| {
            let (a, b) = (fam.eval(uv[0]).into_matrix(), fam.eval(uv[1]).into_matrix());
            max_abs(&(&a * &b - &b * &a)) / (max_abs(&a).max(1.0) * max_abs(&b).max(1.0))
        })
        .fold(0.0, f64::max)
}

fn routes(p: &ModelParams) -> f64 {
    let a = diagonalize(&hamiltonian_direct(p).unwrap(), SpectrumSource::HamiltonianDirect, false).unwrap();
    let b = diagonalize(&hamiltonian_from_transfer(p).unwrap(), SpectrumSource::HamiltonianTransfer, false).unwrap();
    a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn refined(len: usize) -> Vec<(usize, f64, RootSolution)> {
    let ctx = TQContext::new(&ModelParams::table(len));
    printed_rows(len)
        .unwrap()
        .iter()
        .map(|r| (r.n, r.energy, newton_refine(&r.roots(), &ctx, &SolveConfig::default()).unwrap()))
        .collect()
}

fn relations() -> Outcome {
    let mut sets = vec![ModelParams::table(2)];
    sets.extend(random_sets(10, 2, 1));
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for (k, p) in sets.iter().enumerate() {
        for r in check_all(p, 20, 1e-10) {
            worst = worst.max(r.max_residual);
            if !r.pass {
                failed.push(format!("set {k} {}", r.relation));
            }
        }
    }
    (failed.is_empty(), format!("{} parameter sets, max residual {worst:.2e} {failed:?}", sets.len()))
}

fn commutativity() -> Outcome {
    let mut worst: f64 = 0.0;
    for len in [2, 3] {
        let mut sets = vec![ModelParams::table(len)];
        sets.extend(random_sets(2, len, 2));
        for p in &sets {
            worst = worst.max(commutator(&build_transfer(p).unwrap(), 3));
        }
    }
    (worst <= 1e-9, format!("max relative commutator {worst:.2e} over 10 pairs per set, L = 2, 3"))
}

fn hamiltonian_routes() -> Outcome {
    let mut worst: f64 = 0.0;
    for len in [2, 3] {
        let mut sets = vec![ModelParams::table(len)];
        sets.extend(random_sets(3, len, 3));
        for p in &sets {
            worst = worst.max(routes(p));
        }
    }
    (worst <= 1e-8, format!("max sorted-spectrum difference {worst:.2e}"))
}

fn table(len: usize) -> Outcome {
    let p = ModelParams::table(len);
    let ed = diagonalize(&hamiltonian_direct(&p).unwrap(), SpectrumSource::HamiltonianDirect, false).unwrap();
    let rows = refined(len);
    let mut ed_err: f64 = 0.0;
    let mut res: f64 = 0.0;
    let mut vs_ed: f64 = 0.0;
    let mut vs_printed: f64 = 0.0;
    for (n, printed, s) in &rows {
        let e_ed = ed.eigenvalues[n - 1];
        ed_err = ed_err.max((e_ed.re - printed).abs()).max(e_ed.im.abs());
        res = res.max(if s.converged { s.residual } else { f64::INFINITY });
        vs_ed = vs_ed.max((s.energy - e_ed).norm());
        vs_printed = vs_printed.max((s.energy.re - printed).abs());
    }
    let pass = ed.len() == rows.len() && ed_err <= 1e-5 && res <= 1e-11 && vs_ed <= 1e-8 && vs_printed <= 2e-3;
    (
        pass,
        format!(
            "L = {len}: {} ED levels vs printed {ed_err:.1e}; BAE residual {res:.1e}; refined vs ED {vs_ed:.1e}; vs printed {vs_printed:.1e}",
            ed.len()
        ),
    )
}

fn lambda_certificate() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut levels = 0;
    for len in [2, 3] {
        let p = ModelParams::table(len);
        let ctx = TQContext::new(&p);
        let ed = diagonalize(&hamiltonian_direct(&p).unwrap(), SpectrumSource::HamiltonianDirect, true).unwrap();
        let fam = build_transfer(&p).unwrap();
        let sols: Vec<RootSolution> = refined(len).into_iter().map(|r| r.2).collect();
        let rep = match_spectrum(&sols, &ed, &ctx, Some(&fam), 1e-8);
        for l in &rep.levels {
            levels += 1;
            worst = worst.max(l.lambda_error.unwrap_or(f64::INFINITY));
        }
    }
    (worst <= 1e-6, format!("{levels} levels, max relative |Λ − eig t(u)| {worst:.2e} at 5 random u"))
}

fn functional() -> Outcome {
    let ctx = TQContext::new(&ModelParams::table(2));
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for (n, _, s) in refined(2) {
        for r in functional_checks(&s.roots, &ctx, FunctionalTolerances::default()).unwrap() {
            worst = worst.max(r.max_residual / r.tol);
            if !r.pass {
                failed.push(format!("n{n} {}", r.relation));
            }
        }
    }
    (failed.is_empty(), format!("crossing, asymptotics, product identity, special values; worst residual/tol {worst:.2e} {failed:?}"))
}

fn states() -> Outcome {
    let pts = probe_points(5, 0x5747e);
    let mut detail = Vec::new();
    let mut pass = true;
    for (len, max_m) in [(2, 2), (3, 2)] {
        let p = ModelParams::table(len);
        let ctx = TQContext::new(&p);
        let fam = build_transfer(&p).unwrap();
        let h = hamiltonian_direct(&p).unwrap();
        let (mut wt, mut wh): (f64, f64) = (0.0, 0.0);
        let mut built = Vec::new();
        for (_, _, s) in refined(len).into_iter().filter(|r| r.2.roots.m() <= max_m) {
            match bethe_state(&s.roots, &ctx) {
                Ok(state) => {
                    let t = verify_eigenstate(&state, &fam, |u| lambda_tq(u, &s.roots, &ctx), &pts).unwrap().max;
                    wt = wt.max(t);
                    wh = wh.max(eigen_residual(h.matrix(), &state.amplitudes, s.energy));
                    built.push(state);
                }
                Err(_) => {
                    wt = f64::INFINITY;
                }
            }
        }
        let gram = gram_report(&built, 1e-10);
        let full = if len == 2 { gram.rank == 9 } else { gram.rank == built.len() };
        pass &= wt <= 1e-7 && wh <= 1e-6 && full;
        detail.push(format!("L = {len} (M ≤ {max_m}): {} states, t {wt:.1e}, H {wh:.1e}, Gram rank {}", built.len(), gram.rank));
    }
    (pass, detail.join("; "))
}

fn diagonal_params(cm: f64, cp: f64, len: usize) -> ModelParams {
    let minus = BoundaryParams::diagonal(c(0.1), c(cm)).unwrap();
    let plus = BoundaryParams::diagonal(c(-0.5), c(cp)).unwrap();
    ModelParams::new(c(0.2), minus, plus, c(2.0), vec![c(0.0); len]).unwrap()
}

fn diagonal_limit() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let mut cfg = SolveConfig::default();
    cfg.seeds.random = 2000;
    cfg.seeds.box_im = 3.0;
    for (cm, cp) in [(0.0, 1.0), (1.0, 0.0), (0.0, 0.0), (1.0, 1.0)] {
        let mut comm: f64 = 0.0;
        let mut route: f64 = 0.0;
        for len in [2, 3] {
            let p = diagonal_params(cm, cp, len);
            comm = comm.max(commutator(&build_transfer(&p).unwrap(), 4));
            route = route.max(routes(&p));
        }
        let p = diagonal_params(cm, cp, 2);
        let ctx = TQContext::new(&p);
        let h_zero = h_const(&ctx) == c(0.0) && ctx.h == c(0.0);
        let mut forced = ctx.clone();
        forced.h = c(1.0);
        let roots = BetheRootSet::new(vec![Complex::new(0.2, 0.1)], vec![Complex::new(0.3, -0.4)]).unwrap();
        let u = Complex::new(0.41, 0.13);
        // with h = 0 the inhomogeneous term drops out entirely: Λ differs
        // from an h = 1 evaluation by exactly that term
        let inhomogeneous = (lambda_tq(u, &roots, &forced).unwrap() - lambda_tq(u, &roots, &ctx).unwrap()).norm() > 0.0;
        let ed = diagonalize(&hamiltonian_direct(&p).unwrap(), SpectrumSource::HamiltonianDirect, true).unwrap();
        let fam = build_transfer(&p).unwrap();
        let sols: Vec<RootSolution> = (0..=2).flat_map(|m| multistart_search(m, &ctx, &cfg).unwrap()).collect();
        let rep = match_spectrum(&sols, &ed, &ctx, Some(&fam), 1e-8);
        let sound = rep.matched() == sols.len()
            && rep.levels.iter().filter(|l| l.solution.is_some()).all(|l| l.lambda_error.is_some_and(|e| e <= 1e-6));
        let complete_required = (cm, cp) == (0.0, 1.0);
        let ok = h_zero
            && inhomogeneous
            && comm <= 1e-9
            && route <= 1e-8
            && sound
            && (!complete_required || rep.matched() == 9);
        pass &= ok;
        detail.push(format!("(c, c') = ({cm}, {cp}): h = 0 {h_zero}, comm {comm:.0e}, routes {route:.0e}, {} solutions all sound {sound}, coverage {}/9", sols.len(), rep.matched()));
    }
    (pass, detail.join("; "))
}

fn blind_search() -> Outcome {
    let p = ModelParams::table(2);
    let ctx = TQContext::new(&p);
    let mut cfg = SolveConfig::default();
    cfg.seeds.table = false;
    let sols: Vec<RootSolution> = (0..=2).flat_map(|m| multistart_search(m, &ctx, &cfg).unwrap()).collect();
    let ed = diagonalize(&hamiltonian_direct(&p).unwrap(), SpectrumSource::HamiltonianDirect, true).unwrap();
    let rep = match_spectrum(&sols, &ed, &ctx, Some(&build_transfer(&p).unwrap()), 1e-8);
    (
        rep.matched() >= 7,
        format!("{}/9 levels without table seeds ({} random seeds per sector)", rep.matched(), cfg.seeds.random),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "relation suite", true, relations),
        (2, "commutativity", true, commutativity),
        (3, "Hamiltonian cross-check", true, hamiltonian_routes),
        (4, "two-site table reproduction", true, || table(2)),
        (5, "three-site table reproduction", true, || table(3)),
        (6, "T-Q certificate", true, lambda_certificate),
        (7, "functional relations", true, functional),
        (8, "Bethe states", true, states),
        (9, "diagonal limit", true, diagonal_limit),
        (10, "blind search (non-gating)", false, blind_search),
    ];
    let mut gating_failures = 0;
    for (k, name, gating, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = check();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {k} ({name}): {detail} [{secs:.1}s]", if pass { "PASS" } else { "FAIL" });
        if gating && !pass {
            gating_failures += 1;
        }
    }
    if gating_failures == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{gating_failures} gating criteria failed");
        ExitCode::FAILURE
    }
}
