use proptest::prelude::*;
use rvflow::convergence::{ahlfors_weill_bound, contraction_tail_bound};
use rvflow::hyperbolic::{
    lambert_quadrilateral, loxodromic_displacement, loxodromic_displacement_by_matrix, neighborhood_volume,
    CoreNeighborhoodSpec, LoxodromicCyclicGroup,
};
use rvflow::mobius::{HalfSpacePoint, MobiusTransform};
use rvflow::model_flow::{eval_v, real_jacobian, wirtinger_derivatives};
use rvflow::pairing::{bers_region, dc_limit, pair_strip_closed_form, AnnulusSpec, LengthPair};
use rvflow::par::{map_range, map_range_seq, pairwise_sum};
use rvflow::schwarzian::{schwarzian_analytic, schwarzian_closed_form, strip_criterion, univalence_criterion, PowerMapSpec};
use rvflow::{format_complex, parse_complex, Complex64};

fn complex(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, -range..range).prop_map(|(a, b)| Complex64::new(a, b))
}

fn upper(range: f64) -> impl Strategy<Value = Complex64> {
    (-range..range, 0.05..range).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #[test]
    fn complex_text_roundtrips(re in prop::num::f64::NORMAL, im in prop::num::f64::NORMAL) {
        let z = Complex64::new(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn field_is_the_dc_limit(z in complex(3.0)) {
        let scale = 1.0 + z.norm().powi(4);
        prop_assert!((eval_v(z) - dc_limit(z)).norm() <= 1e-14 * scale);
    }

    #[test]
    fn jacobian_trace_and_determinant(z in complex(4.0)) {
        let (a, b) = wirtinger_derivatives(z);
        let j = real_jacobian(z);
        let scale = (a.norm() + b.norm()).max(1.0);
        prop_assert!((j[0][0] + j[1][1] - 2.0 * a.re).abs() <= 1e-13 * scale);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        prop_assert!((det - (a.norm_sqr() - b.norm_sqr())).abs() <= 1e-13 * scale * scale);
    }

    #[test]
    fn mobius_acts_isometrically(
        a in complex(2.0), b in complex(2.0), c in complex(2.0), d in complex(2.0),
        p in upper(3.0), q in upper(3.0),
    ) {
        prop_assume!((a * d - b * c).norm() > 0.1);
        let m = MobiusTransform::new(a, b, c, d).unwrap();
        let (p, q) = (HalfSpacePoint::new(Complex64::new(p.re, 0.0), p.im), HalfSpacePoint::new(q, q.im));
        let before = p.distance(&q);
        let after = m.apply_half_space(p).distance(&m.apply_half_space(q));
        prop_assert!((before - after).abs() <= 1e-7 * before.max(1.0), "{before} {after}");
    }

    #[test]
    fn displacement_matches_matrix_oracle(t in 0.05f64..3.0, theta in 0.0f64..6.3, n in -6i64..=6, r in 0.0f64..2.0) {
        let g = LoxodromicCyclicGroup::new(t, theta).unwrap();
        let a = loxodromic_displacement(g, n, r);
        prop_assert!((a - loxodromic_displacement_by_matrix(g, n, r)).abs() <= 1e-9 * a.max(1.0));
        prop_assert!(a >= n.unsigned_abs() as f64 * t - 1e-12);
    }

    #[test]
    fn lambert_involution(d in 1e-3f64..15.0) {
        let back = lambert_quadrilateral(lambert_quadrilateral(d).unwrap()).unwrap();
        prop_assert!((back - d).abs() <= 1e-12 * d.max(1.0));
    }

    #[test]
    fn ahlfors_weill_is_increasing(k1 in 0.0f64..0.49, gap in 1e-6f64..0.01) {
        let k2 = k1 + gap;
        prop_assert!(ahlfors_weill_bound(k1).unwrap() < ahlfors_weill_bound(k2).unwrap());
    }

    #[test]
    fn tail_bound_is_linear_in_the_step(d in 0.0f64..10.0, s in 0.0f64..10.0, c in 0.01f64..0.99) {
        let lhs = contraction_tail_bound(d * s, c).unwrap();
        prop_assert!((lhs - s * contraction_tail_bound(d, c).unwrap()).abs() <= 1e-12 * lhs.max(1.0));
    }

    #[test]
    fn bers_region_is_the_disk(ell in 1e-3f64..1e2, re in 1e-6f64..3.0, im in -2.0f64..2.0) {
        let l = Complex64::new(re, im) * ell;
        let v = bers_region(LengthPair::new(ell, l).unwrap());
        let gap = ((l / ell - 1.0).norm() - 1.0).abs();
        prop_assume!(gap > 1e-12);
        prop_assert_eq!(v.satisfies, (l / ell - 1.0).norm() <= 1.0);
    }

    #[test]
    fn univalence_disk_equals_strip_for_positive_real_part(re in 1e-9f64..3.0, im in -3.0f64..3.0) {
        let c = Complex64::new(re, im);
        prop_assume!(((c - 1.0).norm() - 1.0).abs() > 1e-9);
        prop_assert_eq!(univalence_criterion(c), strip_criterion(c));
    }

    #[test]
    fn analytic_schwarzian_is_the_closed_form(c in complex(3.0), z in upper(4.0)) {
        let s = schwarzian_analytic(&PowerMapSpec::new(c), z).unwrap();
        let cf = schwarzian_closed_form(c).at(z);
        prop_assert!((s - cf).norm() <= 1e-10 * (1.0 + cf.norm()));
    }

    #[test]
    fn pairing_scales_with_the_annulus(c in complex(2.0), s in 0.01f64..10.0, k in 1.0f64..10.0) {
        let a = pair_strip_closed_form(c, AnnulusSpec::new(s).unwrap());
        let b = pair_strip_closed_form(c, AnnulusSpec::new(s * k).unwrap());
        prop_assert!((b - a * k).norm() <= 1e-13 * b.norm().max(1e-300));
    }

    #[test]
    fn volume_is_monotone_in_width(chi in 0.0f64..10.0, l in 0.01f64..5.0, e1 in 0.0f64..3.0, de in 1e-3f64..3.0) {
        let e2 = e1 + de;
        let v = |e| neighborhood_volume(&CoreNeighborhoodSpec::new(chi, l, e).unwrap());
        prop_assert!(v(e1) < v(e2));
    }

    #[test]
    fn pairwise_sum_matches_naive(xs in prop::collection::vec(-1e3f64..1e3, 0..500)) {
        let naive: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
        prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-12 * scale);
    }

    #[test]
    fn parallel_map_equals_sequential(n in 0usize..300) {
        let f = |i: usize| eval_v(Complex64::new(i as f64 * 0.01, 0.3));
        prop_assert_eq!(map_range(n, f), map_range_seq(n, f));
    }
}
