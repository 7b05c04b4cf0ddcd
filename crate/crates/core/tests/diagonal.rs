use bethe_tj::graded::{c, max_abs, Complex};
use bethe_tj::kernels::{BoundaryParams, ModelParams};
use bethe_tj::roots::*;
use bethe_tj::tq::*;
use bethe_tj::transfer::*;
use proptest::prelude::*;

fn diagonal(zeta: f64, cm: f64, zeta_p: f64, cp: f64, len: usize) -> ModelParams {
    let minus = BoundaryParams::diagonal(c(zeta), c(cm)).unwrap();
    let plus = BoundaryParams::diagonal(c(zeta_p), c(cp)).unwrap();
    ModelParams::new(c(0.2), minus, plus, c(2.0), vec![c(0.0); len]).unwrap()
}

fn search(ctx: &TQContext, random: usize) -> Vec<RootSolution> {
    let mut cfg = SolveConfig::default();
    cfg.seeds.random = random;
    cfg.seeds.box_im = 3.0;
    (0..=ctx.params.len()).flat_map(|m| multistart_search(m, ctx, &cfg).unwrap()).collect()
}

#[test]
fn generic_diagonal_point_is_complete_at_two_sites() {
    let p = diagonal(0.1, 0.0, -0.5, 1.0, 2);
    let ctx = TQContext::new(&p);
    assert_eq!(ctx.h, c(0.0));
    let ed = diagonalize(&hamiltonian_direct(&p).unwrap(), SpectrumSource::HamiltonianDirect, true).unwrap();
    let fam = build_transfer(&p).unwrap();
    let rep = match_spectrum(&search(&ctx, 2000), &ed, &ctx, Some(&fam), 1e-8);
    assert_eq!(rep.matched(), 9);
    assert!(rep.all_certified());
    // some levels need level-2 roots at infinity
    assert!(rep.levels.iter().any(|l| l.solution.as_ref().is_some_and(|s| s.roots.m2() < s.roots.m())));
}

#[test]
fn inhomogeneous_term_is_absent() {
    let p = diagonal(0.3, 1.0, 0.7, 0.0, 2);
    let ctx = TQContext::new(&p);
    let roots = BetheRootSet::new(vec![Complex::new(0.2, 0.1)], vec![Complex::new(0.3, -0.4)]).unwrap();
    let mut forced = ctx.clone();
    forced.h = c(0.0);
    let u = Complex::new(0.41, 0.13);
    assert_eq!(lambda_tq(u, &roots, &ctx).unwrap(), lambda_tq(u, &roots, &forced).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn diagonal_limit_properties(
        zeta in 0.05..1.0f64,
        zeta_p in -1.0..-0.05f64,
        cm in 0u8..2,
        cp in 0u8..2,
    ) {
        let p = diagonal(zeta, cm as f64, zeta_p, cp as f64, 2);
        let ctx = TQContext::new(&p);
        prop_assert_eq!(h_const(&ctx), c(0.0));

        let (hd, ht) = (hamiltonian_direct(&p).unwrap(), hamiltonian_from_transfer(&p).unwrap());
        prop_assert!(hd.max_abs_diff(&ht) < 1e-8);

        let fam = build_transfer(&p).unwrap();
        let (a, b) = (fam.eval(Complex::new(0.3, 0.1)), fam.eval(Complex::new(-0.2, 0.5)));
        let comm = a.matrix() * b.matrix() - b.matrix() * a.matrix();
        prop_assert!(max_abs(&comm) <= 1e-9 * max_abs(a.matrix()).max(1.0) * max_abs(b.matrix()).max(1.0));

        // every converged solution is a level, certified by Λ
        let ed = diagonalize(&hd, SpectrumSource::HamiltonianDirect, true).unwrap();
        let sols = search(&ctx, 150);
        let rep = match_spectrum(&sols, &ed, &ctx, Some(&fam), 1e-8);
        prop_assert_eq!(rep.matched(), sols.len());
        for l in rep.levels.iter().filter(|l| l.solution.is_some()) {
            prop_assert!(l.lambda_error.unwrap() <= 1e-6, "{:?}", l.lambda_error);
        }
    }
}
