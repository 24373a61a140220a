use fhn_cnn::analysis::{
    boundary_gap_sq, difference_fields, divergence_identity_residual, sync_error, DissipativityConstants,
};
use fhn_cnn::model::{boundary_feedback, cubic_fhn, cubic_fhn_prime, discrete_laplacian, Field};
use fhn_cnn::{CnnParams, GridDims, GridState, NonlinearityCert, System};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = (GridDims, Vec<f64>)> {
    (4usize..12, 4usize..12).prop_flat_map(|(m, n)| {
        (Just(GridDims::new(m, n).unwrap()), prop::collection::vec(-10.0f64..10.0, m * n))
    })
}

fn positive() -> impl Strategy<Value = f64> {
    0.01f64..20.0
}

fn params() -> impl Strategy<Value = CnnParams> {
    (positive(), positive(), positive(), positive(), positive())
        .prop_map(|(a, b, c, delta, p)| CnnParams::new(a, b, c, delta, p).unwrap())
}

proptest! {
    #[test]
    fn laplacian_sums_to_zero((dims, data) in grid()) {
        let x = Field::from_vec(&dims, data).unwrap();
        let l = discrete_laplacian(&x, &dims).unwrap();
        let scale: f64 = x.as_slice().iter().map(|v| v.abs()).sum::<f64>() * 8.0 + 1.0;
        prop_assert!(l.sum().abs() <= 1e-12 * scale);
    }

    #[test]
    fn summation_by_parts_identity((dims, data) in grid(), a in 0.01f64..10.0) {
        let x = Field::from_vec(&dims, data).unwrap();
        prop_assert!(divergence_identity_residual(&x, a, &dims).unwrap() <= 1e-10);
    }

    #[test]
    fn feedback_parts_are_antisymmetric((dims, data) in grid()) {
        let x = Field::from_vec(&dims, data).unwrap();
        let cf = boundary_feedback(&x, &dims).unwrap();
        for k in 1..=dims.n {
            prop_assert_eq!(cf.row.get(1, k), -cf.row.get(dims.m, k));
        }
        for i in 1..=dims.m {
            prop_assert_eq!(cf.column.get(i, 1), -cf.column.get(i, dims.n));
        }
        let u = cf.total();
        for i in 2..dims.m {
            for k in 2..dims.n {
                prop_assert_eq!(u.get(i, k), 0.0);
            }
        }
    }

    #[test]
    fn uniform_manifold_is_invariant(p in params(), x0 in -3.0f64..3.0, y0 in -3.0f64..3.0, m in 4usize..9, n in 4usize..9) {
        let dims = GridDims::new(m, n).unwrap();
        let sys = System::new(dims, p, NonlinearityCert::cubic(0.5).unwrap()).unwrap();
        let out = sys.rhs(&GridState::uniform(&dims, x0, y0)).unwrap();
        prop_assert!(out.x.is_uniform() && out.y.is_uniform());
    }

    #[test]
    fn cubic_prime_is_second_order_difference(s in -5.0f64..5.0, alpha in 0.01f64..0.99) {
        // Central difference error of a cubic is exactly −h² (f‴ ≡ −6).
        let h = 1e-3;
        let fd = (cubic_fhn(s + h, alpha) - cubic_fhn(s - h, alpha)) / (2.0 * h);
        prop_assert!((fd - cubic_fhn_prime(s, alpha) + h * h).abs() < 1e-9);
    }

    #[test]
    fn difference_fields_telescope((dims, data) in grid(), seed in any::<u64>()) {
        let x = Field::from_vec(&dims, data).unwrap();
        let y = GridState::random(&dims, 5.0, seed).y;
        let d = difference_fields(&GridState::new(x, y).unwrap());
        for k in 1..=dims.n {
            let g: f64 = (1..=dims.m).map(|i| d.gamma.get(i, k)).sum();
            let v: f64 = (1..=dims.m).map(|i| d.v.get(i, k)).sum();
            prop_assert!(g.abs() < 1e-11 && v.abs() < 1e-11);
        }
        for i in 1..=dims.m {
            let p: f64 = (1..=dims.n).map(|k| d.pi.get(i, k)).sum();
            let w: f64 = (1..=dims.n).map(|k| d.w.get(i, k)).sum();
            prop_assert!(p.abs() < 1e-11 && w.abs() < 1e-11);
        }
    }

    #[test]
    fn zero_sync_error_iff_uniform(x0 in -3.0f64..3.0, y0 in -3.0f64..3.0, bump in 1e-6f64..1.0, i in 1usize..5, k in 1usize..5) {
        let dims = GridDims::new(4, 4).unwrap();
        let s = GridState::uniform(&dims, x0, y0);
        prop_assert_eq!(sync_error(&s), 0.0);
        prop_assert_eq!(boundary_gap_sq(&s), 0.0);
        let mut t = s.clone();
        t.y.set(i, k, y0 + bump);
        prop_assert!(sync_error(&t) > 0.0);
    }

    #[test]
    fn c1_side_condition(p in params()) {
        let dims = GridDims::new(4, 4).unwrap();
        let sys = System::new(dims, p, NonlinearityCert::cubic(0.5).unwrap()).unwrap();
        let k = DissipativityConstants::of(&sys);
        prop_assert!((k.c1 * p.b - 1.5 * p.delta + p.delta).abs() <= 1e-12 * p.delta);
    }

    #[test]
    fn threshold_decreases_in_p(p in params(), bump in 0.01f64..10.0) {
        let dims = GridDims::new(4, 4).unwrap();
        let cert = NonlinearityCert::cubic(0.5).unwrap();
        let lo = DissipativityConstants::of(&System::new(dims, p, cert.clone()).unwrap());
        let hi_p = CnnParams { p: p.p + bump, ..p };
        let hi = DissipativityConstants::of(&System::new(dims, hi_p, cert).unwrap());
        prop_assert_eq!(lo.q, hi.q);
        prop_assert!(hi.threshold < lo.threshold);
    }

    #[test]
    fn q_increases_in_beta_and_cells(p in params(), extra in 0.1f64..50.0, m in 4usize..10) {
        let cubic = NonlinearityCert::cubic(0.5).unwrap();
        let looser = NonlinearityCert { beta: cubic.beta + extra, ..cubic.clone() };
        let small = GridDims::new(m, 4).unwrap();
        let large = GridDims::new(m + 1, 4).unwrap();
        let base = DissipativityConstants::of(&System::new(small, p, cubic.clone()).unwrap());
        let more_beta = DissipativityConstants::of(&System::new(small, p, looser).unwrap());
        let more_cells = DissipativityConstants::of(&System::new(large, p, cubic).unwrap());
        prop_assert!(more_beta.q > base.q);
        prop_assert!(more_cells.q > base.q);
    }
}
