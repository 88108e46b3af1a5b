mod common;

use common::*;
use eigprog::algebra::soc::{soc_spectral, SocPoint};
use eigprog::{eigen_map, rank, spectral_decompose, u_element, Algebra, BlockKind, MapOrdering};
use proptest::prelude::*;
use std::sync::Arc;

fn algebra_strategy() -> impl Strategy<Value = Arc<Algebra>> {
    let block = prop_oneof![
        (1usize..6).prop_map(|n| BlockKind::Soc { n }),
        (1usize..6).prop_map(|n| BlockKind::Sym { n }),
        (1usize..5, 1usize..5).prop_map(|(m, n)| BlockKind::Rect { m, n }),
    ];
    (prop::collection::vec(block, 1..4), any::<bool>()).prop_map(|(blocks, ordered)| {
        let ordered = ordered && blocks.iter().all(|b| !matches!(b, BlockKind::Rect { .. }));
        let ordering = if ordered { MapOrdering::GloballyOrdered } else { MapOrdering::BlockWise };
        Algebra::new(blocks, ordering).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_preserved(alg in algebra_strategy(), seed in any::<u64>()) {
        let x = random_element(&alg, &mut rng(seed));
        let lam = eigen_map(&x).unwrap();
        prop_assert!((norm(&lam) - x.norm()).abs() <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn inner_products_are_majorized(alg in algebra_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_element(&alg, &mut r);
        let y = random_element(&alg, &mut r);
        let (lx, ly) = (eigen_map(&x).unwrap(), eigen_map(&y).unwrap());
        prop_assert!(x.inner(&y).unwrap() <= dot(&lx, &ly) + 1e-10 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn u_elements_attain_the_bound(alg in algebra_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_element(&alg, &mut r);
        let mu = random_spectrum(&alg, &mut r);
        let z = u_element(&c, &mu).unwrap();
        let lz = eigen_map(&z).unwrap();
        let scale = 1.0 + norm(&mu);
        prop_assert!(max_abs_diff(&lz, &mu) <= 1e-10 * scale);
        let lc = eigen_map(&c).unwrap();
        prop_assert!((c.inner(&z).unwrap() - dot(&lc, &mu)).abs() <= 1e-10 * scale * (1.0 + c.norm()));
    }

    #[test]
    fn decomposition_reconstructs(alg in algebra_strategy(), seed in any::<u64>()) {
        let x = random_element(&alg, &mut rng(seed));
        let back = spectral_decompose(&x).unwrap().reconstruct();
        prop_assert!(back.distance(&x).unwrap() <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn spectra_are_scale_equivariant(alg in algebra_strategy(), seed in any::<u64>(), s in 0.01f64..100.0) {
        let x = random_element(&alg, &mut rng(seed));
        let a = eigen_map(&x.scale(s)).unwrap();
        let b: Vec<f64> = eigen_map(&x).unwrap().iter().map(|v| v * s).collect();
        prop_assert!(max_abs_diff(&a, &b) <= 1e-10 * (1.0 + s * x.norm()));
    }

    #[test]
    fn sym_spectrum_is_orthogonally_invariant(n in 1usize..8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let alg = Algebra::single(BlockKind::Sym { n }).unwrap();
        let x = random_element(&alg, &mut r);
        let q = random_orthogonal(n, &mut r);
        let m = eigprog::dense::Mat::from_row_major(n, n, x.data().to_vec());
        let rotated = q.transpose().matmul(&m).matmul(&q);
        let y = alg.element(rotated.into_vec()).unwrap();
        prop_assert!(max_abs_diff(&eigen_map(&x).unwrap(), &eigen_map(&y).unwrap()) <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn soc_matches_closed_form(n in 1usize..8, seed in any::<u64>()) {
        let mut r = rng(seed);
        let x: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
        let t = gaussian(&mut r);
        let s = soc_spectral(&SocPoint::new(x.clone(), t));
        let nx = norm(&x);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        prop_assert!((s.plus - h * (t + nx)).abs() <= 1e-12 * (1.0 + nx + t.abs()));
        prop_assert!((s.minus - h * (t - nx)).abs() <= 1e-12 * (1.0 + nx + t.abs()));
    }

    #[test]
    fn rect_rank_matches_elimination(m in 1usize..6, n in 1usize..6, k in 0usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = k.min(m).min(n);
        // product of Gaussian m×k and k×n factors has rank k almost surely
        let a = eigprog::dense::Mat::from_row_major(m, k, (0..m * k).map(|_| gaussian(&mut r)).collect());
        let b = eigprog::dense::Mat::from_row_major(k, n, (0..k * n).map(|_| gaussian(&mut r)).collect());
        let x = a.matmul(&b);
        let alg = Algebra::single(BlockKind::Rect { m, n }).unwrap();
        let e = alg.element(x.as_slice().to_vec()).unwrap();
        prop_assert_eq!(rank(&e, 1e-9).unwrap(), elimination_rank(&x, 1e-9));
        prop_assert_eq!(rank(&e, 1e-9).unwrap(), k);
    }
}

#[test]
fn ordered_map_is_sorted_blockwise_map() {
    let blocks = vec![BlockKind::Soc { n: 3 }, BlockKind::Sym { n: 4 }, BlockKind::Soc { n: 1 }];
    let bw = Algebra::new(blocks.clone(), MapOrdering::BlockWise).unwrap();
    let or = Algebra::new(blocks, MapOrdering::GloballyOrdered).unwrap();
    let mut r = rng(5);
    for _ in 0..200 {
        let x = random_element(&bw, &mut r);
        let y = or.element(x.data().to_vec()).unwrap();
        let mut a = eigen_map(&x).unwrap();
        a.sort_by(|p, q| q.total_cmp(p));
        assert_eq!(a, eigen_map(&y).unwrap());
    }
}
