//! Bessel functions J₀, J₁, Y₀, Y₁: ascending series up to x = 12, Hankel
//! asymptotic expansions beyond.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 12.0;

fn check_order(order: u32) -> Result<()> {
    if order > 1 {
        return Err(Error::Precondition(format!("only orders 0 and 1 are supported, got {order}")));
    }
    Ok(())
}

/// J₀(x)·... and J₁ by the ascending series.
fn j_series(order: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = if order == 0 { (1.0, 1.0) } else { (0.5 * x, 0.5 * x) };
    let nu = order as f64;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn y0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        let t = -term * harmonic;
        sum += t;
        if t.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j_series(0, x) + sum)
}

fn y1_series(x: f64) -> f64 {
    // Y₁ = (2/π) ln(x/2) J₁ − 2/(πx)
    //      − (1/π) Σ_k (−1)^k [ψ(k+1) + ψ(k+2)] (x/2)^{2k+1} / (k!(k+1)!)
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half; // (x/2)^{2k+1}/(k!(k+1)!) with sign
    let mut psi1 = -EULER_GAMMA; // ψ(k+1)
    let mut psi2 = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut sum = term * (psi1 + psi2);
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        psi1 += 1.0 / kf;
        psi2 += 1.0 / (kf + 1.0);
        let t = term * (psi1 + psi2);
        sum += t;
        if t.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    FRAC_2_PI * half.ln() * j_series(1, x) - FRAC_2_PI / x - sum / PI
}

/// Hankel P and Q for order ν at large x, summed until terms stop shrinking.
fn hankel_pq(order: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(ν)/x^k
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        if a.abs() >= last {
            break;
        }
        last = a.abs();
        // Signs: P = a₀ − a₂ + a₄ − ..., Q = a₁ − a₃ + ...
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel(order: u32, x: f64) -> (f64, f64) {
    let (p, q) = hankel_pq(order, x);
    let chi = x - (0.5 * order as f64 + 0.25) * PI;
    let (s, c) = chi.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// J_order(x) for order 0 or 1.
pub fn bessel_j(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    let sign = if order == 1 && x < 0.0 { -1.0 } else { 1.0 };
    let ax = x.abs();
    Ok(sign * if ax <= SERIES_LIMIT { j_series(order, ax) } else { hankel(order, ax).0 })
}

/// Y_order(x) for order 0 or 1, x > 0.
pub fn bessel_y(order: u32, x: f64) -> Result<f64> {
    check_order(order)?;
    if !(x > 0.0) {
        return Err(Error::Precondition(format!("Y is defined for x > 0, got {x}")));
    }
    Ok(if x <= SERIES_LIMIT {
        if order == 0 {
            y0_series(x)
        } else {
            y1_series(x)
        }
    } else {
        hankel(order, x).1
    })
}

/// |J₁Y₀ − J₀Y₁ − 2/(πx)| relative to 2/(πx).
pub fn wronskian_defect(x: f64) -> Result<f64> {
    let w = bessel_j(1, x)? * bessel_y(0, x)? - bessel_j(0, x)? * bessel_y(1, x)?;
    let exact = 2.0 / (PI * x);
    Ok(((w - exact) / exact).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn series_and_asymptotic_agree_at_the_switch() {
        for order in [0, 1] {
            let x = SERIES_LIMIT;
            let (j, y) = hankel(order, x);
            assert_abs_diff_eq!(j, j_series(order, x), epsilon = 1e-10);
            let ys = if order == 0 { y0_series(x) } else { y1_series(x) };
            assert_abs_diff_eq!(y, ys, epsilon = 1e-10);
        }
    }

    #[test]
    fn wronskian_holds() {
        for x in [1e-3, 0.1, 0.9, 2.5, 7.0, 11.9, 12.1, 20.0, 75.0, 300.0] {
            assert!(wronskian_defect(x).unwrap() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_y(0, 0.0).is_err());
        assert!(bessel_y(1, -1.0).is_err());
        assert!(bessel_j(2, 1.0).is_err());
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
    }
}
