use nalgebra::Matrix2;
use proptest::prelude::*;
use ptbox::em_scattering::{
    double_barrier_transfer, interface_reflection, params_from_transfer, physical_slab_transfer, time_reverse,
    to_smatrix, transfer_from_params, DoubleBarrier, MediumParams, Side, SlabParams,
};
use ptbox::Complex64;

fn slab() -> impl Strategy<Value = SlabParams> {
    (0.2..3.0f64, -1.0..1.0f64, 0.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(r, m, t, p)| SlabParams::new(r, m, t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn slab_round_trip(p in slab()) {
        let t = transfer_from_params(p);
        prop_assert!((t.det() - 1.0).norm() < 1e-10);
        prop_assert!((t.t12() + t.t21()).norm() < 1e-10);
        let back = params_from_transfer(&t).unwrap();
        let t2 = transfer_from_params(back);
        prop_assert!((t.0 - t2.0).norm() < 1e-10 * t.0.norm().max(1.0));
    }

    #[test]
    fn double_barrier_is_pt_symmetric(p in slab(), delta in 0.1..10.0f64, k in 0.01..3.0f64) {
        let db = DoubleBarrier::new(p, delta).unwrap();
        let t = double_barrier_transfer(&db, k);
        let prod = t.0 * t.0.map(|z| z.conj());
        prop_assert!((prod - Matrix2::identity()).norm() < 1e-10 * t.0.norm_squared().max(1.0));
        prop_assert!((time_reverse(&time_reverse(&t)).0 - t.0).norm() == 0.0);
    }

    #[test]
    fn physical_slab_is_reciprocal(nr in 1.0..3.0f64, ni in -0.5..0.5f64, d in 0.1..2.0f64, k in 0.1..5.0f64) {
        let m = MediumParams::new(Complex64::new(nr, ni), Complex64::new(1.0, 0.0)).unwrap();
        let t = physical_slab_transfer(m, d, k).unwrap();
        prop_assert!((t.det() - 1.0).norm() < 1e-9 * t.0.norm_squared().max(1.0));
        prop_assert!((t.t12() + t.t21()).norm() < 1e-9 * t.0.norm().max(1.0));
        if ni == 0.0 {
            let s = to_smatrix(&t).unwrap();
            prop_assert!((s.t_l.norm_sqr() + s.r_l.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn conjugate_interfaces_have_reciprocal_magnitudes(nr in 0.5..4.0f64, ni in -1.0..1.0f64, mr in 0.5..2.0f64) {
        let m = MediumParams::new(Complex64::new(nr, ni), Complex64::new(mr, 0.0)).unwrap();
        let l = interface_reflection(m, Side::Left).unwrap();
        let r = interface_reflection(m, Side::Right).unwrap();
        prop_assert!((l.norm() * r.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn absorbing_slab_loses_power() {
    let m = MediumParams::new(Complex64::new(1.5, 0.1), Complex64::new(1.0, 0.0)).unwrap();
    for k in [0.3, 1.1, 2.9] {
        let s = to_smatrix(&physical_slab_transfer(m, 1.0, k).unwrap()).unwrap();
        assert!(s.t_l.norm_sqr() + s.r_l.norm_sqr() < 1.0);
        let gain = to_smatrix(&physical_slab_transfer(m.conjugate(), 1.0, k).unwrap()).unwrap();
        assert!(gain.t_l.norm_sqr() + gain.r_l.norm_sqr() > 1.0);
    }
}
