mod common;

use common::*;
use eigprog::algebra::sym::SymMatrix;
use eigprog::apps::{
    build_ellipsoid_feasibility, build_vqc_feasibility, run_iep_campaign, CampaignConfig, EllipsoidInstance, IepCell,
    QuadraticConstraint, VqcInstance,
};
use eigprog::dense::Mat;
use eigprog::{eigen_map, solve_feasibility, MapOrdering, SolverConfig};
use proptest::prelude::*;
use rand::Rng;

fn random_instance(seed: u64, m: usize, tight: usize) -> EllipsoidInstance {
    let mut r = rng(seed);
    let mut q = Vec::new();
    let mut centers = Vec::new();
    for _ in 0..m {
        let o = random_orthogonal(2, &mut r);
        let vals = [r.random_range(0.3..3.0), r.random_range(0.3..3.0)];
        q.push(SymMatrix::new(conjugate(&o, &vals, &o)).unwrap());
        centers.push(vec![r.random_range(-0.3..0.3), r.random_range(-0.3..0.3)]);
    }
    EllipsoidInstance::new(q, centers, tight).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn recovery_inverts_the_lift(seed in any::<u64>(), x in prop::array::uniform2(-3.0f64..3.0)) {
        let prob = build_ellipsoid_feasibility(&random_instance(seed, 3, 1)).unwrap();
        let back = prob.recover_x(&prob.lift().apply(&x).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&back, &x) <= 1e-10);
    }

    #[test]
    fn averaged_recovery_stays_within_block_discrepancy(seed in any::<u64>(), eps in 1e-4f64..1e-1) {
        let prob = build_ellipsoid_feasibility(&random_instance(seed, 3, 1)).unwrap();
        let mut r = rng(seed ^ 1);
        let y = prob.lift().apply(&[0.2, -0.1]).unwrap();
        let mut noisy = y.data().to_vec();
        noisy.iter_mut().for_each(|v| *v += eps * gaussian(&mut r));
        let y = prob.lift().algebra().element(noisy).unwrap();
        let parts = prob.block_preimages(&y).unwrap();
        let x = prob.recover_x(&y).unwrap();
        let spread = parts
            .iter()
            .flat_map(|a| parts.iter().map(move |b| norm(&[a[0] - b[0], a[1] - b[1]])))
            .fold(0.0, f64::max);
        for p in &parts {
            prop_assert!(norm(&[x[0] - p[0], x[1] - p[1]]) <= spread + 1e-12);
        }
    }

    #[test]
    fn ellipsoid_solutions_are_certified(seed in any::<u64>(), tight in 1usize..3) {
        let prob = build_ellipsoid_feasibility(&random_instance(seed, 3, tight)).unwrap();
        let mut r = rng(seed ^ 2);
        let x0 = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
        let run = prob.solve_from(&x0, &SolverConfig::default().with_tolerance(1e-10)).unwrap();
        if run.report.converged() {
            prop_assert!(prob.instance().is_solution(&run.final_x, 1e-6, 1e-2));
        }
    }
}

#[test]
fn zero_tight_count_is_cone_membership() {
    // ‖x‖ ≤ 1 and ‖x − (1.5, 0)‖ ≤ 1 with ℓ = 0 is a convex intersection
    let inst = EllipsoidInstance::balls(vec![vec![0.0, 0.0], vec![1.5, 0.0]], 1.0, 0).unwrap();
    let prob = build_ellipsoid_feasibility(&inst).unwrap();
    for x0 in [[3.0, 3.0], [-2.0, 0.5], [0.75, 0.0]] {
        let run = prob.solve_from(&x0, &SolverConfig::default().with_tolerance(1e-10)).unwrap();
        assert!(run.report.converged());
        let lam = eigen_map(&run.report.final_point).unwrap();
        assert!(lam.iter().all(|&v| v >= -1e-12));
        assert!(inst.residuals(&run.final_x).iter().all(|&v| v <= 1e-8));
    }
}

#[test]
fn general_vqc_with_linear_terms() {
    // ‖x‖ ≤ x₁ + 1 (a paraboloid region) and |x₂| ≤ 2, both tight
    let inst = VqcInstance::new(
        2,
        vec![
            QuadraticConstraint {
                a: Mat::identity(2),
                b: vec![0.0, 0.0],
                c: vec![1.0, 0.0],
                d: 1.0,
            },
            QuadraticConstraint {
                a: Mat::from_rows(&[vec![0.0, 1.0]]),
                b: vec![0.0],
                c: vec![0.0, 0.0],
                d: 2.0,
            },
        ],
        2,
    )
    .unwrap();
    let (affine, constraint, lift) = build_vqc_feasibility(&inst).unwrap();
    let y0 = lift.apply(&[0.3, 0.4]).unwrap();
    let rep = solve_feasibility(&affine, &constraint, &y0, &SolverConfig::default().with_tolerance(1e-10)).unwrap();
    assert!(rep.converged());
    // the lift is injective here, so read x from the first block
    let x = &rep.final_point.data()[..2];
    assert!(inst.is_solution(x, 1e-8, 1e-6), "{x:?} slacks {:?}", inst.slacks(x));
    // tight points: x₂ = ±2 and ‖x‖ = x₁ + 1 ⇒ x₁ = 1.5
    assert!((x[0] - 1.5).abs() < 1e-6 && (x[1].abs() - 2.0).abs() < 1e-6);
}

#[test]
fn campaign_is_reproducible_across_thread_counts() {
    let cell = IepCell::new(1, 1, 4, 10, MapOrdering::GloballyOrdered).unwrap();
    let cfg = CampaignConfig {
        seeds: 6,
        master_seed: 99,
        threads: Some(1),
        ..CampaignConfig::default()
    };
    let a = run_iep_campaign(&cell, &cfg).unwrap();
    let b = run_iep_campaign(&cell, &CampaignConfig { threads: Some(3), ..cfg }).unwrap();
    assert_eq!(a.outcomes, b.outcomes);
    assert!(a.outcomes.iter().all(|o| o.spectrum_error <= 1e-3));
}
