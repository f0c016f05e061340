use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_obstacles::analytic::{annulus_lambda1, disk_lambda1, AnnulusMode};
use spectral_obstacles::geometry::{
    default_eps_schedule, outer_minkowski_content, point, Domain, FourierStar, Obstacle, Polygon,
    ScalarField, Shape,
};
use spectral_obstacles::spectral::{
    assemble_with, boundary_gradient_sq, fit_multiplier, lagrange_multiplier, rayleigh_quotient,
    smallest_eigenpair, BoundaryTreatment, EigenResult,
};

const CORRECTED: BoundaryTreatment = BoundaryTreatment::Corrected;
const MASKED: BoundaryTreatment = BoundaryTreatment::Masked;

fn unit_disk() -> Domain {
    Domain::disk(point(0.0, 0.0), 1.0).unwrap()
}

fn solve(domain: &Domain, obstacle: Option<&Obstacle>, h: f64, t: BoundaryTreatment) -> EigenResult {
    let p = assemble_with(domain, obstacle, h, t).unwrap();
    smallest_eigenpair(&p, 1e-10).unwrap()
}

fn concentric_ring(r_in: f64) -> Obstacle {
    Obstacle::star(FourierStar::circle(point(0.0, 0.0), r_in))
}

#[test]
fn unit_square_matches_two_pi_squared() {
    let sq = Domain::new(
        Shape::Polygon(Polygon::rectangle(point(0.0, 0.0), point(1.0, 1.0))),
        vec![],
    )
    .unwrap();
    let r = solve(&sq, None, 1.0 / 64.0, MASKED);
    assert_relative_eq!(r.lambda1, 2.0 * PI * PI, max_relative = 5e-3);
}

#[test]
fn unit_disk_matches_bessel_zero() {
    let exact = disk_lambda1(1.0).unwrap();
    for t in [MASKED, CORRECTED] {
        let r = solve(&unit_disk(), None, 1.0 / 128.0, t);
        assert_relative_eq!(r.lambda1, exact, max_relative = 1e-2);
    }
}

#[test]
fn concentric_disk_obstacle_matches_annulus() {
    let exact = annulus_lambda1(0.5, 1.0).unwrap();
    let k = Obstacle::disk(point(0.0, 0.0), 0.5);
    for t in [MASKED, CORRECTED] {
        let r = solve(&unit_disk(), Some(&k), 1.0 / 128.0, t);
        assert_relative_eq!(r.lambda1, exact, max_relative = 1e-2);
    }
}

#[test]
fn chain_circle_acts_like_the_disk_it_bounds() {
    // Zero area, positive capacity: the outer annulus carries λ₁.
    let chain = Obstacle::Circle(spectral_obstacles::geometry::Circle::new(point(0.0, 0.0), 0.5));
    let r = solve(&unit_disk(), Some(&chain), 1.0 / 64.0, MASKED);
    let inner_disk = disk_lambda1(0.5).unwrap();
    let outer_annulus = annulus_lambda1(0.5, 1.0).unwrap();
    assert!(r.n_components >= 2);
    assert_relative_eq!(r.lambda1, inner_disk.min(outer_annulus), max_relative = 3e-2);
}

#[test]
fn random_annuli_agree_with_bessel_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let r_out: f64 = rng.gen_range(0.6..3.0);
        let r_in = rng.gen_range(0.3..0.6 * r_out);
        let domain = Domain::disk(point(0.0, 0.0), r_out).unwrap();
        let k = Obstacle::disk(point(0.0, 0.0), r_in);
        let got = solve(&domain, Some(&k), (r_out - r_in) / 128.0, CORRECTED).lambda1;
        let exact = annulus_lambda1(r_in, r_out).unwrap();
        assert_relative_eq!(got, exact, max_relative = 1e-2);
    }
}

#[test]
fn corrected_treatment_converges_at_second_order() {
    let k = Obstacle::disk(point(0.0, 0.0), 0.5);
    let lams: Vec<f64> = [32.0, 64.0, 128.0]
        .iter()
        .map(|n| solve(&unit_disk(), Some(&k), 1.0 / n, CORRECTED).lambda1)
        .collect();
    let ratio = (lams[0] - lams[1]).abs() / (lams[1] - lams[2]).abs();
    assert!(ratio >= 3.0, "halving ratio {ratio}, values {lams:?}");
}

#[test]
fn eigenfunction_is_nonnegative_and_normalized() {
    let k = Obstacle::disk(point(0.2, -0.1), 0.3);
    let r = solve(&unit_disk(), Some(&k), 1.0 / 64.0, CORRECTED);
    let max = r.u1.values.iter().cloned().fold(0.0, f64::max);
    let min = r.u1.values.iter().cloned().fold(0.0, f64::min);
    assert!(max > 0.0);
    assert!(min >= -1e-8 * max, "min {min}, max {max}");
    let h2 = r.u1.h() * r.u1.h();
    let norm: f64 = r.u1.values.iter().map(|v| v * v).sum::<f64>() * h2;
    assert_relative_eq!(norm, 1.0, max_relative = 1e-6);
    assert!(r.residual <= 1e-6 * r.lambda1);
}

#[test]
fn bump_field_rayleigh_quotient_bounds_lambda_from_above() {
    let k = Obstacle::disk(point(0.0, 0.0), 0.4);
    let p = assemble_with(&unit_disk(), Some(&k), 1.0 / 64.0, MASKED).unwrap();
    let r = smallest_eigenpair(&p, 1e-10).unwrap();
    let bump = ScalarField::from_fn(p.grid, |x| {
        let s = x.norm();
        ((1.0 - s) * (s - 0.4)).max(0.0)
    });
    let q = rayleigh_quotient(&p, &bump).unwrap();
    assert!(q >= r.lambda1 * (1.0 - 1e-6), "{q} < {}", r.lambda1);
}

#[test]
fn ring_gradient_is_rotation_invariant_and_matches_bessel_derivative() {
    let domain = unit_disk();
    let k = concentric_ring(0.5);
    let r = solve(&domain, Some(&k), 1.0 / 128.0, CORRECTED);
    let thetas: Vec<f64> = (0..16).map(|i| 2.0 * PI * i as f64 / 16.0 + 0.1).collect();
    let g = boundary_gradient_sq(&r, &domain, &k, &thetas).unwrap();
    let exact = AnnulusMode::new(0.5, 1.0).unwrap().derivative(0.5).powi(2);
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    for v in &g {
        assert_relative_eq!(*v, mean, max_relative = 2e-2);
    }
    assert_relative_eq!(mean, exact, max_relative = 2e-2);
}

#[test]
fn rellich_multiplier_matches_least_squares_fit_for_concentric_ring() {
    let domain = unit_disk();
    let k = concentric_ring(0.5);
    let r = solve(&domain, Some(&k), 1.0 / 128.0, CORRECTED);
    let est = outer_minkowski_content(&k, 1.0 / 256.0, &default_eps_schedule(&k, 1.0 / 256.0).unwrap())
        .unwrap();
    let mu = lagrange_multiplier(&r, &domain, &k, &est, 256).unwrap();

    let thetas: Vec<f64> = (0..64).map(|i| 2.0 * PI * i as f64 / 64.0).collect();
    let g = boundary_gradient_sq(&r, &domain, &k, &thetas).unwrap();
    let curv = vec![1.0 / 0.5; g.len()];
    let (mu_fit, _) = fit_multiplier(&g, &curv).unwrap();
    assert_relative_eq!(mu, mu_fit, max_relative = 5e-2);

    // (∂u/∂r)²(r)·r from the radial solution.
    let m = AnnulusMode::new(0.5, 1.0).unwrap();
    assert_relative_eq!(mu, m.derivative(0.5).powi(2) * 0.5, max_relative = 5e-2);
}

#[test]
fn multiplier_does_not_depend_on_the_domain_translation() {
    let shift = point(0.3, -0.2);
    let base = unit_disk();
    let moved = Domain::disk(shift, 1.0).unwrap();
    let mus: Vec<f64> = [(base, point(0.0, 0.0)), (moved, shift)]
        .iter()
        .map(|(d, c)| {
            let k = Obstacle::star(FourierStar::circle(*c, 0.5));
            let r = solve(d, Some(&k), 1.0 / 64.0, CORRECTED);
            let est = outer_minkowski_content(&k, 1.0 / 128.0, &default_eps_schedule(&k, 1.0 / 128.0).unwrap())
                .unwrap();
            lagrange_multiplier(&r, d, &k, &est, 256).unwrap()
        })
        .collect();
    assert_relative_eq!(mus[0], mus[1], max_relative = 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn growing_the_obstacle_never_lowers_lambda(
        cx in -0.3..0.3f64,
        cy in -0.3..0.3f64,
        r1 in 0.05..0.3f64,
        dr in 0.01..0.3f64,
    ) {
        let domain = unit_disk();
        let c = point(cx, cy);
        let r2 = (r1 + dr).min(0.95 - c.norm());
        prop_assume!(r2 > r1);
        let small = solve(&domain, Some(&Obstacle::disk(c, r1)), 1.0 / 32.0, MASKED);
        let big = solve(&domain, Some(&Obstacle::disk(c, r2)), 1.0 / 32.0, MASKED);
        prop_assert!(big.lambda1 >= small.lambda1 * (1.0 - 1e-9), "{} < {}", big.lambda1, small.lambda1);
    }

    #[test]
    fn scaling_the_whole_problem_divides_lambda_by_t_squared(
        k in -2i32..3,
        cx in -0.4..0.4f64,
        r in 0.1..0.4f64,
    ) {
        // Powers of two keep every node coordinate exact.
        let t = 2f64.powi(k);
        let h = 1.0 / 32.0;
        let k0 = Obstacle::disk(point(cx, 0.1), r);
        prop_assume!(cx.abs() + 0.1 + r < 0.9);
        let base = solve(&unit_disk(), Some(&k0), h, CORRECTED).lambda1;
        let dt = Domain::disk(point(0.0, 0.0), t).unwrap();
        let scaled = solve(&dt, Some(&k0.scaled(t)), t * h, CORRECTED).lambda1;
        prop_assert!((scaled * t * t - base).abs() <= 1e-9 * base, "{} vs {}", scaled * t * t, base);
    }
}
