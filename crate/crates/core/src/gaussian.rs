//! Scalar Gaussian primitives: truncated moments, low-discrepancy points and
//! Gauss–Hermite sigma points.

use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

pub fn std_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
    }
}

pub fn std_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(x)` without cancellation.
pub fn std_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

/// Inverse standard normal CDF.
pub fn std_quantile(u: f64) -> f64 {
    -SQRT_2 * erfc_inv(2.0 * u)
}

/// `P(a ≤ Z < b)` for standard normal `Z`, evaluated on whichever tail keeps
/// the subtraction well conditioned.
pub fn std_interval_prob(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    if a >= 0.0 {
        std_sf(a) - std_sf(b)
    } else if b <= 0.0 {
        std_cdf(b) - std_cdf(a)
    } else {
        1.0 - std_cdf(a) - std_sf(b)
    }
}

/// Mass and conditional mean of `N(0, σ²)` restricted to `[lower, upper)`.
///
/// `σ = 0` is treated as a point mass at the origin.
pub fn truncated_moments(sigma: f64, lower: f64, upper: f64) -> (f64, f64) {
    if sigma == 0.0 {
        let inside = lower <= 0.0 && 0.0 < upper;
        return (if inside { 1.0 } else { 0.0 }, 0.0);
    }
    let a = lower / sigma;
    let b = upper / sigma;
    let prob = std_interval_prob(a, b);
    if prob <= 0.0 {
        return (0.0, 0.0);
    }
    let mean = sigma * (std_pdf(a) - std_pdf(b)) / prob;
    (prob, mean)
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in base `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    acc
}

/// Point `index` (1-based) of the Halton sequence in `dim` dimensions.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton sequence supports up to 16 axes");
    (0..dim).map(|d| radical_inverse(index, PRIMES[d])).collect()
}

/// Probabilists' Gauss–Hermite nodes and weights (weights sum to one), so
/// that `Σ w_i f(x_i) ≈ E[f(Z)]` for standard normal `Z`.
///
/// Supported orders are 3 and 5; both match the first `2k - 1` moments.
pub fn hermite_points(order: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    match order {
        3 => {
            let x = 3.0_f64.sqrt();
            Some((vec![-x, 0.0, x], vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]))
        }
        5 => {
            // Roots of He_5(x) = x⁵ - 10x³ + 15x; weights n!/(n² He_4(x)²).
            let outer = (5.0 + 10.0_f64.sqrt()).sqrt();
            let inner = (5.0 - 10.0_f64.sqrt()).sqrt();
            let he4 = |x: f64| x.powi(4) - 6.0 * x * x + 3.0;
            let w = |x: f64| 120.0 / (25.0 * he4(x).powi(2));
            let nodes = vec![-outer, -inner, 0.0, inner, outer];
            let weights = nodes.iter().map(|&x| w(x)).collect();
            Some((nodes, weights))
        }
        _ => None,
    }
}
