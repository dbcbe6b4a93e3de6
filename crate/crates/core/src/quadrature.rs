//! Equal-weight rules on the periodic square `[0, 2π)²`.
//!
//! With `R` nodes per axis the rule integrates `e^{i(jε + kη)}` exactly
//! whenever `|j|, |k| < R`, so trigonometric polynomials of degree `n`
//! need only `R = n + 1`.

use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::math::CompensatedSum;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodePlacement {
    /// `θ_k = 2πk / R`, includes the origin.
    Endpoint,
    /// `θ_k = 2π(k + ½) / R`, never touches the origin.
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicGrid {
    pub resolution: usize,
    pub placement: NodePlacement,
}

impl PeriodicGrid {
    pub fn endpoint(resolution: usize) -> Self {
        Self { resolution, placement: NodePlacement::Endpoint }
    }

    pub fn midpoint(resolution: usize) -> Self {
        Self { resolution, placement: NodePlacement::Midpoint }
    }

    pub fn angle(&self, k: usize) -> f64 {
        let offset = match self.placement {
            NodePlacement::Endpoint => 0.0,
            NodePlacement::Midpoint => 0.5,
        };
        TAU * (k as f64 + offset) / self.resolution as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.resolution).map(|k| self.angle(k))
    }

    fn weight(&self) -> f64 {
        1.0 / (self.resolution * self.resolution) as f64
    }

    /// `(2π)^{-2} ∬ f(ε, η) dε dη`, nodes visited in row-major order.
    pub fn mean(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for eps in self.angles() {
            for eta in self.angles() {
                acc.add(f(eps, eta));
            }
        }
        acc.value() * self.weight()
    }

    pub fn try_mean(&self, mut f: impl FnMut(f64, f64) -> Result<f64>) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for eps in self.angles() {
            for eta in self.angles() {
                acc.add(f(eps, eta)?);
            }
        }
        Ok(acc.value() * self.weight())
    }

    pub fn mean_complex(&self, mut f: impl FnMut(f64, f64) -> Complex64) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for eps in self.angles() {
            for eta in self.angles() {
                let z = f(eps, eta);
                re.add(z.re);
                im.add(z.im);
            }
        }
        Complex64::new(re.value(), im.value()) * self.weight()
    }
}
