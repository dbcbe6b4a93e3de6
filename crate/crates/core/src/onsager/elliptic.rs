//! Complete elliptic integrals by the arithmetic–geometric mean.
//!
//! Moduli are passed together with their complement `k' = √(1 - k²)` where
//! the caller can compute `k'` without cancellation; near `k = 1` that is
//! the difference between a correct logarithm and noise.

use core::f64::consts::FRAC_PI_2;

use crate::math;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 64;

/// `F(k)` and `E(k)` for modulus `k` with complement `kp`.
pub fn complete_integrals(k: f64, kp: f64) -> Result<(f64, f64)> {
    let k = k.abs();
    if !(k.is_finite() && kp.is_finite()) || k > 1.0 || kp < 0.0 {
        return Err(Error::OutsideDomain("elliptic modulus must lie in [0, 1]"));
    }
    if kp == 0.0 {
        return Err(Error::Divergent);
    }
    let (mut a, mut b) = (1.0f64, kp);
    let mut weight = 0.5;
    let mut deficit = weight * k * k;
    for _ in 0..MAX_ITERATIONS {
        let c = 0.5 * (a - b);
        weight *= 2.0;
        deficit += weight * c * c;
        let next = (0.5 * (a + b), math::sqrt(a * b));
        a = next.0;
        b = next.1;
        if c.abs() <= f64::EPSILON * a {
            let f = FRAC_PI_2 / a;
            return Ok((f, f * (1.0 - deficit)));
        }
    }
    Err(Error::NoConvergence { delta: (a - b).abs() })
}

fn complement(k: f64) -> f64 {
    let k = k.abs();
    math::sqrt((1.0 - k) * (1.0 + k))
}

/// `F(k) = ∫₀^{π/2} (1 - k² sin²θ)^{-1/2} dθ`, `0 ≤ k < 1`.
pub fn elliptic_f(k: f64) -> Result<f64> {
    if k.abs() > 1.0 {
        return Err(Error::OutsideDomain("elliptic modulus must lie in [0, 1]"));
    }
    complete_integrals(k, complement(k)).map(|(f, _)| f)
}

/// `E(k) = ∫₀^{π/2} (1 - k² sin²θ)^{1/2} dθ`, `0 ≤ k ≤ 1`.
pub fn elliptic_e(k: f64) -> Result<f64> {
    if k.abs() == 1.0 {
        return Ok(1.0);
    }
    if k.abs() > 1.0 {
        return Err(Error::OutsideDomain("elliptic modulus must lie in [0, 1]"));
    }
    complete_integrals(k, complement(k)).map(|(_, e)| e)
}
