use bethe_tj::graded::{c, Complex};
use bethe_tj::kernels::{BoundaryParams, ModelParams};
use bethe_tj::roots::{newton_refine, SolveConfig};
use bethe_tj::tables::printed_rows;
use bethe_tj::tq::*;
use bethe_tj::Error;
use proptest::prelude::*;

fn refined(len: usize) -> Vec<(usize, BetheRootSet, f64)> {
    let ctx = TQContext::new(&ModelParams::table(len));
    let cfg = SolveConfig::default();
    printed_rows(len)
        .unwrap()
        .iter()
        .map(|row| (row.n, newton_refine(&row.roots(), &ctx, &cfg).unwrap().roots, row.energy))
        .collect()
}

fn probes() -> [Complex; 5] {
    [
        Complex::new(0.37, 0.11),
        Complex::new(-0.23, 0.45),
        Complex::new(0.61, -0.32),
        Complex::new(-0.05, -0.71),
        Complex::new(1.3, 0.2),
    ]
}

#[test]
fn h_at_table_parameters() {
    // c2 = 0.18, c2' = -0.39/0.7; roots 0.8 and 1.6
    let c2p = -0.39 / 0.7;
    let expected = 0.5 * (-1.0 - 2.0 * (-0.7 * 0.18 + c2p * -0.5) + 0.8 * 1.6);
    let ctx = TQContext::new(&ModelParams::table(2));
    assert!((h_const(&ctx) - c(expected)).norm() < 1e-14);
    assert!((ctx.root_minus - c(0.8)).norm() < 1e-14);
    assert!((ctx.root_plus - c(1.6)).norm() < 1e-14);
}

#[test]
fn h_vanishes_exactly_for_diagonal_boundaries() {
    let minus = BoundaryParams::diagonal(c(0.3), c(0.0)).unwrap();
    let plus = BoundaryParams::diagonal(c(-0.4), c(1.0)).unwrap();
    let p = ModelParams::new(c(0.2), minus, plus, c(2.0), vec![c(0.0); 2]).unwrap();
    assert_eq!(h_const(&TQContext::new(&p)), c(0.0));
}

#[test]
fn asymptotic_coefficient_at_table_parameters() {
    let c2p = -0.39 / 0.7;
    let expected = -2.0 - 4.0 * (-0.5) * c2p - 4.0 * (-0.7) * 0.18;
    let ctx = TQContext::new(&ModelParams::table(2));
    assert!((asymptotic_coefficient(&ctx) - c(expected)).norm() < 1e-14);
}

#[test]
fn refined_energies_match_printed_values() {
    for len in [2, 3] {
        let ctx = TQContext::new(&ModelParams::table(len));
        for (n, roots, printed) in refined(len) {
            let e = energy(&roots, &ctx).unwrap();
            assert!((e.re - printed).abs() < 2e-3, "L{len} n{n}: {e} vs {printed}");
            assert!(e.im.abs() < 1e-8, "L{len} n{n}: {e}");
        }
    }
}

#[test]
fn printed_roots_give_printed_energies_to_print_precision() {
    // four printed decimals move some energies by a few 1e-3
    for len in [2, 3] {
        let ctx = TQContext::new(&ModelParams::table(len));
        for row in printed_rows(len).unwrap() {
            let e = energy(&row.roots(), &ctx).unwrap();
            assert!((e.re - row.energy).abs() < 1e-2, "L{len} n{}: {e} vs {}", row.n, row.energy);
        }
    }
}

#[test]
fn closed_and_two_level_eigenvalues_agree() {
    for len in [2, 3] {
        let ctx = TQContext::new(&ModelParams::table(len));
        for (n, roots, _) in refined(len) {
            for u in probes() {
                let a = lambda_tq(u, &roots, &ctx).unwrap();
                let b = lambda_two_level(u, &roots, &ctx).unwrap();
                assert!((a - b).norm() <= 1e-8 * a.norm().max(1.0), "L{len} n{n} at {u}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn all_bae_forms_vanish_at_refined_roots() {
    for len in [2, 3] {
        let ctx = TQContext::new(&ModelParams::table(len));
        for (n, roots, _) in refined(len) {
            let r = bae_residuals(&roots, &ctx).unwrap();
            assert!(r.max() <= 1e-11, "L{len} n{n}: {:e}", r.max());
            let other = r.level1_via_nested.iter().chain(&r.nested_residue).map(|z| z.norm()).fold(0.0, f64::max);
            assert!(other <= 1e-8, "L{len} n{n}: {other:e}");
        }
    }
}

#[test]
fn functional_relations_on_table_one_roots() {
    let ctx = TQContext::new(&ModelParams::table(2));
    for (n, roots, _) in refined(2) {
        if roots.m() == 0 {
            continue;
        }
        let reps = functional_checks(&roots, &ctx, FunctionalTolerances::default()).unwrap();
        assert_eq!(reps.len(), 4);
        for rep in reps {
            assert!(rep.pass, "n{n} {}: {:e}", rep.relation, rep.max_residual);
        }
    }
}

#[test]
fn functional_relations_on_table_two_roots() {
    let ctx = TQContext::new(&ModelParams::table(3));
    for (n, roots, _) in refined(3) {
        if roots.m() == 0 {
            continue;
        }
        for rep in functional_checks(&roots, &ctx, FunctionalTolerances::default()).unwrap() {
            assert!(rep.pass, "n{n} {}: {:e}", rep.relation, rep.max_residual);
        }
    }
}

#[test]
fn eigenvalue_is_regular_at_bethe_roots() {
    let ctx = TQContext::new(&ModelParams::table(2));
    for (n, roots, _) in refined(2) {
        for &x in &roots.u {
            let at = lambda_tq(x, &roots, &ctx).unwrap();
            let near = lambda_tq(x + Complex::new(1e-3, 0.0), &roots, &ctx).unwrap();
            assert!((at - near).norm() < 1e-1 * at.norm().max(1.0), "n{n}");
        }
    }
}

#[test]
fn uncancelled_pole_is_reported() {
    let ctx = TQContext::new(&ModelParams::table(2));
    let roots = BetheRootSet::new(vec![c(0.3)], vec![Complex::new(0.1, 0.4)]).unwrap();
    assert!(matches!(lambda_tq(c(0.3), &roots, &ctx), Err(Error::Pole(_))));
}

#[test]
fn perturbed_roots_break_the_equations() {
    let ctx = TQContext::new(&ModelParams::table(2));
    let (_, mut roots, _) = refined(2).remove(0);
    roots.u[0] += 1e-3;
    assert!(bae_residuals(&roots, &ctx).unwrap().max() > 1e-5);
}

#[test]
fn coincident_roots_are_rejected() {
    let ctx = TQContext::new(&ModelParams::table(2));
    let roots = BetheRootSet::new(vec![c(0.3), c(0.3)], vec![c(0.1), c(0.5)]).unwrap();
    assert!(matches!(bae_vector(&roots, &ctx), Err(Error::DegenerateRoots(_))));
}

#[test]
fn root_counts() {
    assert!(BetheRootSet::new(vec![c(0.3)], vec![c(0.1), c(0.2)]).is_err());
    // fewer level-2 roots only with h = 0
    let fewer = BetheRootSet::new(vec![c(0.3)], vec![]).unwrap();
    assert_eq!((fewer.m(), fewer.m2()), (1, 0));
    let ctx = TQContext::new(&ModelParams::table(2));
    assert!(matches!(bae_vector(&fewer, &ctx), Err(Error::Parameter(_))));
}

fn arb_c() -> impl Strategy<Value = Complex> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex::new(a, b))
}

proptest! {
    #[test]
    fn q_functions_are_reflection_invariant(u in prop::collection::vec(arb_c(), 1..4), x in arb_c(), flip in any::<u8>()) {
        let eta = c(0.2);
        let nu: Vec<Complex> = u.iter().map(|z| z * 0.7 + 0.1).collect();
        let roots = BetheRootSet::new(u.clone(), nu.clone()).unwrap();
        let mut alt = roots.clone();
        for k in 0..u.len() {
            if flip >> k & 1 == 1 {
                alt.u[k] = -alt.u[k] - eta;
                alt.nu[k] = -alt.nu[k];
            }
        }
        let (a, b) = (q1(x, &roots, eta), q1(x, &alt, eta));
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        let (a, b) = (q2(x, &roots, eta), q2(x, &alt, eta));
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        prop_assert!((q1(x, &roots, eta) - q1(-x - eta, &roots, eta)).norm() <= 1e-10 * a.norm().max(1.0).max(q1(x, &roots, eta).norm()));
    }

    #[test]
    fn energy_is_reflection_invariant(u in prop::collection::vec(arb_c(), 1..4)) {
        let ctx = TQContext::new(&ModelParams::table(2));
        prop_assume!(u.iter().all(|z| z.norm() > 0.05 && (z + 0.2).norm() > 0.05));
        let roots = BetheRootSet::new(u.clone(), u.clone()).unwrap();
        let flipped = BetheRootSet::new(u.iter().map(|z| -z - 0.2).collect(), u).unwrap();
        let (a, b) = (energy(&roots, &ctx).unwrap(), energy(&flipped, &ctx).unwrap());
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn third_kernel_is_reflected_second(x in arb_c()) {
        let ctx = TQContext::new(&ModelParams::table(2));
        let (_, k2, k3) = kernels(x, &ctx);
        prop_assert_eq!(k3, kernel2(-x + ctx.eta(), &ctx));
        prop_assert_eq!(k2, kernel2(x, &ctx));
    }
}
