use std::f64::consts::PI;

use approx::{assert_abs_diff_eq, assert_relative_eq};
use proptest::prelude::*;
use spectral_obstacles::analytic::{
    annulus_lambda1, bessel_j, bessel_y, disk_lambda1, half_annulus_lambda1, half_ring_perimeter,
    hpw_bound, j01, ring_admissible_h, BesselRootQuery, HpwOutcome,
};
use spectral_obstacles::geometry::{point, Domain, Obstacle};
use spectral_obstacles::spectral::{assemble_with, smallest_eigenpair, BoundaryTreatment};

// Reference values from scipy.special (jv, yv, jn_zeros).
#[test]
fn bessel_spot_values() {
    let cases = [
        (0, 1.0, 0.765_197_686_557_966_6, 0.088_256_964_215_676_97),
        (1, 1.0, 0.440_050_585_744_933_5, -0.781_212_821_300_288_7),
        (0, 10.0, -0.245_935_764_451_348_3, 0.055_671_167_283_599_39),
        (1, 10.0, 0.043_472_746_168_861_44, 0.249_015_424_206_953_9),
    ];
    for (n, x, j, y) in cases {
        assert_abs_diff_eq!(bessel_j(n, x).unwrap(), j, epsilon = 1e-10);
        assert_abs_diff_eq!(bessel_y(n, x).unwrap(), y, epsilon = 1e-10);
    }
    assert_abs_diff_eq!(bessel_j(0, 20.0).unwrap(), 0.167_024_664_340_583_2, epsilon = 1e-10);
    assert_abs_diff_eq!(bessel_j(1, 20.0).unwrap(), 0.066_833_124_175_849_93, epsilon = 1e-10);
    assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
    assert!(bessel_y(0, 0.0).is_err());
    assert!(bessel_y(1, -1.0).is_err());
}

#[test]
fn first_zeros() {
    assert_abs_diff_eq!(j01(), 2.404_825_557_695_773, epsilon = 1e-10);
    let j11 = BesselRootQuery::j_zero(1).smallest_root().unwrap().omega;
    assert_abs_diff_eq!(j11, 3.831_705_970_207_512, epsilon = 1e-10);
    assert_abs_diff_eq!(bessel_j(0, j01()).unwrap(), 0.0, epsilon = 1e-11);
}

#[test]
fn disk_values() {
    assert_abs_diff_eq!(disk_lambda1(1.0).unwrap(), 5.783_185_962_946_784, epsilon = 1e-9);
    assert_relative_eq!(disk_lambda1(2.0).unwrap(), disk_lambda1(1.0).unwrap() / 4.0, max_relative = 1e-12);
    let mut prev = f64::INFINITY;
    for r in [0.5, 1.0, 2.0, 10.0, 100.0] {
        let v = disk_lambda1(r).unwrap();
        assert!(v < prev);
        prev = v;
    }
    assert!(prev < 1e-3);
}

#[test]
fn ring_and_half_ring_values() {
    assert_abs_diff_eq!(annulus_lambda1(1.0229, 2.25).unwrap(), 6.4554, epsilon = 5e-4);
    assert_abs_diff_eq!(half_annulus_lambda1(1.0, 2.25).unwrap(), 6.6180, epsilon = 5e-4);
    assert_abs_diff_eq!(ring_admissible_h(2.25).unwrap(), 0.0229, epsilon = 1e-4);
    assert_abs_diff_eq!(ring_admissible_h(3.0).unwrap(), 2.0 / PI, epsilon = 1e-14);
    let r0 = (3.0 * PI + 2.0) / (PI + 2.0);
    assert_abs_diff_eq!(r0, 2.222, epsilon = 5e-4);
    assert_abs_diff_eq!(ring_admissible_h(r0).unwrap(), 0.0, epsilon = 1e-14);
    assert!(ring_admissible_h(2.0).unwrap() < 0.0);
    assert!(ring_admissible_h(1.0).is_err());
}

#[test]
fn ring_width_gives_equal_perimeters() {
    // 2π(1 + h) + 2π·1 against the half-ring perimeter.
    for r0 in [2.25, 2.5, 3.0] {
        let h = ring_admissible_h(r0).unwrap();
        assert_relative_eq!(2.0 * PI * (2.0 + h), half_ring_perimeter(1.0, r0), max_relative = 1e-12);
    }
}

#[test]
fn small_hole_sits_above_the_disk_and_matches_the_grid() {
    let v = annulus_lambda1(0.05, 1.0).unwrap();
    assert_abs_diff_eq!(v, 9.390_592_1, epsilon = 1e-6);
    assert!(v > disk_lambda1(1.0).unwrap());
    let mut prev = f64::INFINITY;
    for r_in in [0.05, 0.02, 0.01, 1e-3, 1e-4] {
        let w = annulus_lambda1(r_in, 1.0).unwrap();
        assert!(w < prev && w > disk_lambda1(1.0).unwrap());
        prev = w;
    }

    let domain = Domain::disk(point(0.0, 0.0), 1.0).unwrap();
    let k = Obstacle::disk(point(0.0, 0.0), 0.05);
    let p = assemble_with(&domain, Some(&k), 1.0 / 256.0, BoundaryTreatment::Corrected).unwrap();
    let grid = smallest_eigenpair(&p, 1e-10).unwrap().lambda1;
    assert_relative_eq!(grid, v, max_relative = 1e-2);
}

#[test]
fn hpw_condition() {
    let (r0, r) = (1.5, 0.6);
    match hpw_bound(2.0 * PI * r0, 2.0 * PI * r, PI * (r0 * r0 - r * r)).unwrap() {
        HpwOutcome::Met { lambda1 } => {
            assert_relative_eq!(lambda1, annulus_lambda1(r, r0).unwrap(), max_relative = 1e-12)
        }
        o => panic!("{o:?}"),
    }
    // Square of side s inside B(2): isoperimetric gap makes the defect negative.
    let s: f64 = 1.0;
    let area = PI * 4.0 - s * s;
    match hpw_bound(2.0 * PI * 2.0, 4.0 * s, area).unwrap() {
        HpwOutcome::ConditionNotMet { defect } => assert!(defect < 0.0),
        o => panic!("{o:?}"),
    }
    assert!(hpw_bound(1.0, 2.0, 0.0).is_err());
}

#[test]
fn wronskian_identity() {
    for x in [0.1, 0.7, 2.0, 5.5, 11.9, 12.1, 30.0, 80.0] {
        let w = bessel_j(1, x).unwrap() * bessel_y(0, x).unwrap()
            - bessel_j(0, x).unwrap() * bessel_y(1, x).unwrap();
        assert_relative_eq!(w, 2.0 / (PI * x), max_relative = 1e-9);
    }
}

proptest! {
    #[test]
    fn eigenvalues_scale_as_inverse_square(
        r_in in 0.1..1.0f64,
        gap in 0.1..2.0f64,
        t in 0.2..5.0f64,
    ) {
        let r_out = r_in + gap;
        for f in [annulus_lambda1, half_annulus_lambda1] {
            let base = f(r_in, r_out).unwrap();
            let scaled = f(t * r_in, t * r_out).unwrap();
            prop_assert!((scaled * t * t - base).abs() <= 1e-9 * base);
        }
        let d = disk_lambda1(r_out).unwrap();
        prop_assert!((disk_lambda1(t * r_out).unwrap() * t * t - d).abs() <= 1e-9 * d);
    }

    #[test]
    fn annulus_increases_with_inner_radius(
        r_out in 0.5..3.0f64,
        a in 0.05..0.9f64,
        b in 0.05..0.9f64,
    ) {
        prop_assume!((a - b).abs() > 1e-3);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(annulus_lambda1(lo * r_out, r_out).unwrap() < annulus_lambda1(hi * r_out, r_out).unwrap());
    }

    #[test]
    fn half_annulus_exceeds_annulus(r_in in 0.1..2.0f64, gap in 0.1..2.0f64) {
        let r_out = r_in + gap;
        prop_assert!(half_annulus_lambda1(r_in, r_out).unwrap() > annulus_lambda1(r_in, r_out).unwrap());
    }

    #[test]
    fn bracket_isolates_the_smallest_root(
        order in 0u32..2,
        r_in in 0.05..2.0f64,
        gap in 0.05..3.0f64,
    ) {
        let q = BesselRootQuery::cross_product(order, r_in, r_in + gap);
        let root = q.smallest_root().unwrap();
        let (a, b) = root.bracket;
        prop_assert!(q.eval(a).unwrap() * q.eval(b).unwrap() <= 0.0);
        prop_assert!(a <= root.omega && root.omega <= b);
        // Replay the scan grid below the bracket: no sign change there.
        let mut w = 1e-3 / (r_in + gap);
        let s0 = q.eval(w).unwrap().signum();
        while w * 1.05 <= root.scan_bracket.0 * (1.0 + 1e-12) {
            w *= 1.05;
            prop_assert_eq!(q.eval(w).unwrap().signum(), s0);
        }
    }
}
