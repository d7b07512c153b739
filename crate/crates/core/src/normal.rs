//! Standard normal distribution function and quantiles.
//!
//! Tail probabilities go through `erfc` so that small p-values keep their
//! relative accuracy. Quantiles are found by bisection on the smaller tail.

use libm::erfc;
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// `Phi(z)`.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// `1 - Phi(z)`.
pub fn sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `u_p`, the `p`-quantile of the standard normal distribution.
pub fn quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    // Bisect on the tail that contains p; the tail function is monotone and
    // accurate in relative terms, so this converges to the last ulp.
    let (lower, target) = if p < 0.5 { (true, p) } else { (false, 1.0 - p) };
    let (mut lo, mut hi) = (-40.0_f64, 0.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = if cdf(hi) - target <= target - cdf(lo) {
        hi
    } else {
        lo
    };
    let z = if lower { z } else { -z };
    Ok(z)
}
