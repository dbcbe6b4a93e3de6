//! Thermodynamic-limit free energy, internal energy and specific heat.
//!
//! All quantities are dimensionless: `-βf`, `U/J` and `C/k_B` per site as
//! functions of `K = J / k_B T`. Negative `K` is handled through the
//! symmetry `Z(K) = Z(-K)` of the bipartite lattice.

mod elliptic;

pub use elliptic::{complete_integrals, elliptic_e, elliptic_f};

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, LN_2, PI, SQRT_2};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::math::{self, CompensatedSum};
use crate::quadrature::PeriodicGrid;
use crate::transfer;
use crate::{Error, Result};

/// `K` together with the derived variables `u = tanh K`,
/// `k = tanh 2K / (2 cosh 2K)` and `k₁ = 4k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPoint {
    pub coupling: f64,
    pub u: f64,
    pub k: f64,
    pub k1: f64,
}

impl CouplingPoint {
    pub fn new(coupling: f64) -> Self {
        let two_k = 2.0 * coupling;
        let k = math::tanh(two_k) / (2.0 * math::cosh(two_k));
        Self { coupling, u: math::tanh(coupling), k, k1: 4.0 * k }
    }

    /// Residuals of
    /// `u = ½ sinh 2K (1 - u²)`,
    /// `(1 + u²)² = cosh² 2K (1 - u²)²` and
    /// `1 - u² = cosh⁻² K`,
    /// each relative to its left-hand side (or absolute below one).
    pub fn identity_residuals(&self) -> [f64; 3] {
        let two_k = 2.0 * self.coupling;
        let u2 = self.u * self.u;
        let c2 = math::cosh(two_k);
        let ch = math::cosh(self.coupling);
        let relative = |lhs: f64, rhs: f64| (lhs - rhs) / lhs.abs().max(1.0);
        [
            relative(self.u, 0.5 * math::sinh(two_k) * (1.0 - u2)),
            relative((1.0 + u2) * (1.0 + u2), c2 * c2 * (1.0 - u2) * (1.0 - u2)),
            relative(1.0 - u2, 1.0 / (ch * ch)),
        ]
    }
}

/// `ln[cosh² 2K - sinh 2K (cos ε + cos η)]`.
pub fn onsager_integrand(eps: f64, eta: f64, coupling: f64) -> Result<f64> {
    let c = math::cosh(2.0 * coupling);
    let arg = c * c - math::sinh(2.0 * coupling) * (math::cos(eps) + math::cos(eta));
    if arg <= 0.0 {
        return Err(Error::Singular(arg));
    }
    Ok(math::ln(arg))
}

/// `ln det(I - uM)` rewritten in `K`:
/// `ln[cosh⁻⁴ K (cosh² 2K - sinh 2K (cos ε + cos η))]`.
pub fn reparametrized_log_det(eps: f64, eta: f64, coupling: f64) -> Result<f64> {
    Ok(onsager_integrand(eps, eta, coupling)? - 4.0 * math::ln(math::cosh(coupling)))
}

/// A value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One refinement level of the free-energy quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel {
    pub resolution: usize,
    /// Midpoint-rule value at this resolution.
    pub raw: f64,
    /// `h²`-Richardson value from this and the previous level.
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyOptions {
    /// Nodes per axis at the coarsest level; must be even.
    pub base_resolution: usize,
    /// Doublings always performed after the base level.
    pub refinements: usize,
    /// Further doublings stop once the resolution would exceed this.
    pub max_resolution: usize,
    /// Largest accepted change between the last two extrapolated values.
    pub tolerance: f64,
}

impl Default for FreeEnergyOptions {
    fn default() -> Self {
        Self { base_resolution: 64, refinements: 3, max_resolution: 16_384, tolerance: 1e-10 }
    }
}

/// Mean of `f(cos ε + cos η)` over the midpoint grid, folding the four
/// mirror images `ε → 2π - ε`, `η → 2π - η` together.
fn folded_mean(resolution: usize, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    if resolution == 0 || !resolution.is_multiple_of(2) {
        return Err(Error::InsufficientResolution { resolution, required: resolution.max(1) + 1 });
    }
    let grid = PeriodicGrid::midpoint(resolution);
    let half = resolution / 2;
    let cosines: Vec<f64> = (0..half).map(|i| math::cos(grid.angle(i))).collect();
    let mut acc = CompensatedSum::new();
    for (i, ci) in cosines.iter().enumerate() {
        acc.add(f(ci + ci)?);
        for cj in &cosines[i + 1..] {
            acc.add(2.0 * f(ci + cj)?);
        }
    }
    Ok(acc.value() / (half * half) as f64)
}

fn free_energy_raw(coupling: f64, resolution: usize) -> Result<f64> {
    let c = math::cosh(2.0 * coupling);
    let s = math::sinh(2.0 * coupling);
    let mean = folded_mean(resolution, |sum_cos| {
        let arg = c * c - s * sum_cos;
        if arg <= 0.0 {
            return Err(Error::Singular(arg));
        }
        Ok(math::ln(arg))
    })?;
    Ok(LN_2 + 0.5 * mean)
}

fn push_level(levels: &mut Vec<RefinementLevel>, coupling: f64, resolution: usize) -> Result<()> {
    let raw = free_energy_raw(coupling, resolution)?;
    let extrapolated = levels.last().map(|prev| (4.0 * raw - prev.raw) / 3.0);
    levels.push(RefinementLevel { resolution, raw, extrapolated });
    Ok(())
}

fn estimate(levels: &[RefinementLevel]) -> Estimate {
    let extrapolated: Vec<f64> = levels.iter().filter_map(|l| l.extrapolated).collect();
    let (value, error) = match extrapolated.as_slice() {
        [] => (levels[0].raw, f64::INFINITY),
        [only] => (*only, (only - levels[0].raw).abs()),
        [.., a, b] => (*b, (b - a).abs()),
    };
    Estimate { value, error }
}

/// The midpoint-rule values at `base · 2^i`, `i = 0..=refinements`, with
/// `h²` Richardson extrapolation between neighbours. The logarithmic
/// singularity at `K_c` is scale-free, so the error expansion carries no
/// `h² ln h` term and the extrapolation stays valid there.
pub fn richardson_sequence(coupling: f64, options: &FreeEnergyOptions) -> Result<Vec<RefinementLevel>> {
    let coupling = coupling.abs();
    let mut levels = Vec::with_capacity(options.refinements + 1);
    for i in 0..=options.refinements {
        push_level(&mut levels, coupling, options.base_resolution << i)?;
    }
    Ok(levels)
}

/// `-βf = ln 2 + (1/2π²) ∫₀^π ∫₀^π ln[cosh² 2K - sinh 2K (cos ε + cos η)]`.
///
/// Away from `K_c` the integrand is analytic and the midpoint rule
/// converges geometrically, but close to `K_c` the rate degrades, so the
/// grid keeps doubling until the extrapolated values settle.
pub fn free_energy_density(coupling: f64, options: &FreeEnergyOptions) -> Result<Estimate> {
    if coupling == 0.0 {
        return Ok(Estimate { value: LN_2, error: 0.0 });
    }
    let coupling = coupling.abs();
    let mut levels = richardson_sequence(coupling, options)?;
    loop {
        let est = estimate(&levels);
        if est.error <= options.tolerance {
            return Ok(est);
        }
        let next = levels[levels.len() - 1].resolution * 2;
        if next > options.max_resolution {
            return Err(Error::NoConvergence { delta: est.error });
        }
        push_level(&mut levels, coupling, next)?;
    }
}

/// `ln Z / N² ≈ ln 2 + 2(1 - 1/N) ln cosh K + (1/8π²) ∬ ln det(I - uM)`,
/// which neglects the border of the finite lattice.
pub fn finite_size_log_z(side: usize, coupling: f64, grid: &PeriodicGrid) -> Result<f64> {
    if side == 0 {
        return Err(Error::InvalidSize(side));
    }
    let u = math::tanh(coupling);
    let log_det = transfer::log_det_mean(u, grid)?;
    let border = 1.0 - 1.0 / side as f64;
    Ok(LN_2 + 2.0 * border * math::ln(math::cosh(coupling)) + 0.5 * log_det)
}

/// `[(2n)! / (n!)²]²`, exactly.
pub fn central_binomial_squared(n: u32) -> BigUint {
    let mut c = BigUint::one();
    for m in 1..=n {
        c = c * (2u32 * (2 * m - 1)) / m;
    }
    &c * &c
}

/// `ln 2 + ln cosh 2K - Σ_{n=1}^{n_max} [(2n)!/(n!)²]² k^{2n} / 4n`, valid for
/// `4|k| < 1`. The `1/4n` comes from expanding `ln(1 - 2k(cos ε + cos η))`
/// and averaging `(cos ε + cos η)^{2n}`, whose mean is `[(2n)!/(n!)²]² / 4ⁿ`.
pub fn series_partial(coupling: f64, n_max: u32) -> Result<f64> {
    let point = CouplingPoint::new(coupling);
    if point.k1.abs() >= 1.0 {
        return Err(Error::OutsideDomain("series requires 4|k| < 1"));
    }
    let k2 = point.k * point.k;
    let mut acc = CompensatedSum::new();
    acc.add(LN_2);
    acc.add(math::ln(math::cosh(2.0 * coupling)));
    let mut k_power = 1.0;
    let mut central = BigUint::one();
    for n in 1..=n_max {
        k_power *= k2;
        if k_power == 0.0 {
            break;
        }
        central = central * (2u32 * (2 * n - 1)) / n;
        let coeff = (&central * &central).to_f64().filter(|c| c.is_finite()).ok_or(Error::Overflow)?;
        acc.add(-coeff * k_power / (4.0 * n as f64));
    }
    Ok(acc.value())
}

/// `ln(1 + √2) / 2`.
pub fn critical_coupling_closed_form() -> f64 {
    0.5 * math::ln(1.0 + SQRT_2)
}

/// The positive root of `2 sinh 2K = cosh² 2K`. That equation reads
/// `-(sinh 2K - 1)² = 0`, a double root with no sign change, so the
/// bisection runs on `sinh 2K - 1` instead.
pub fn critical_coupling() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if math::sinh(2.0 * mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    debug_assert!((root - critical_coupling_closed_form()).abs() < 1e-14);
    root
}

/// `2 sinh 2K - cosh² 2K`.
pub fn critical_residual(coupling: f64) -> f64 {
    let c = math::cosh(2.0 * coupling);
    2.0 * math::sinh(2.0 * coupling) - c * c
}

/// `(2 tanh² 2K - 1)` and `k₁' = √(1 - k₁²) = |2 tanh² 2K - 1|`, both
/// computed from `sinh 2K` without cancellation.
fn modulus_parts(coupling: f64) -> (f64, f64, f64) {
    let s = math::sinh(2.0 * coupling);
    let one_plus = 1.0 + s * s;
    let k1 = 2.0 * s / one_plus;
    let factor = (s - 1.0) * (s + 1.0) / one_plus;
    (k1, factor.abs(), factor)
}

/// `U/J = -coth 2K [1 + (2 tanh² 2K - 1)(2/π) F(k₁)]`; the bracket term is
/// taken as zero where `k₁' = 0`. Near the critical point `k₁` itself rounds to
/// one while the explicitly computed complement is still usable.
pub fn internal_energy(coupling: f64) -> Result<f64> {
    if coupling == 0.0 {
        return Ok(0.0);
    }
    let sign = coupling.signum();
    let kk = coupling.abs();
    let (k1, k1p, factor) = modulus_parts(kk);
    let bracket = if k1p == 0.0 {
        1.0
    } else {
        let (f, _) = complete_integrals(k1, k1p)?;
        1.0 + factor * f / FRAC_PI_2
    };
    let coth = 1.0 / math::tanh(2.0 * kk);
    Ok(-sign * coth * bracket)
}

/// `U/J = -coth 2K [1 + (sinh² 2K - 1) ⟨1 / (cosh² 2K - sinh 2K (cos ε + cos η))⟩]`
/// with the average taken on the midpoint grid.
pub fn internal_energy_quadrature(coupling: f64, resolution: usize) -> Result<f64> {
    if coupling == 0.0 {
        return Ok(0.0);
    }
    let sign = coupling.signum();
    let kk = coupling.abs();
    let c = math::cosh(2.0 * kk);
    let s = math::sinh(2.0 * kk);
    let mean = folded_mean(resolution, |sum_cos| {
        let d = c * c - s * sum_cos;
        if d <= 0.0 {
            return Err(Error::Singular(d));
        }
        Ok(1.0 / d)
    })?;
    Ok(-sign * (c / s) * (1.0 + (s * s - 1.0) * mean))
}

/// `C/k_B = (4/π)(K coth 2K)² {F - E - (1 - tanh² 2K)[π/2 + (2 tanh² 2K - 1) F]}`
/// with `F = F(k₁)`, `E = E(k₁)`. This equals `-K² d(U/J)/dK`.
pub fn specific_heat(coupling: f64) -> Result<f64> {
    if coupling == 0.0 {
        return Ok(0.0);
    }
    let kk = coupling.abs();
    let (k1, k1p, factor) = modulus_parts(kk);
    if k1p == 0.0 {
        return Err(Error::Divergent);
    }
    let (f, e) = complete_integrals(k1, k1p)?;
    let t = math::tanh(2.0 * kk);
    let pref = kk / t;
    let sech2 = 1.0 - t * t;
    Ok((4.0 / PI) * pref * pref * (f - e - sech2 * (FRAC_PI_2 + factor * f)))
}

/// One row of a temperature sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub coupling: f64,
    pub u: f64,
    pub k1: f64,
    pub minus_beta_f: f64,
    pub u_over_j: f64,
    pub c_over_kb: f64,
}

pub fn thermo_point(coupling: f64, options: &FreeEnergyOptions) -> Result<ThermoPoint> {
    let point = CouplingPoint::new(coupling);
    Ok(ThermoPoint {
        coupling,
        u: point.u,
        k1: point.k1,
        minus_beta_f: free_energy_density(coupling, options)?.value,
        u_over_j: internal_energy(coupling)?,
        c_over_kb: specific_heat(coupling)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn opts() -> FreeEnergyOptions {
        FreeEnergyOptions::default()
    }

    #[test]
    fn coupling_identities() {
        for i in 1..=200 {
            let p = CouplingPoint::new(i as f64 * 0.01);
            for r in p.identity_residuals() {
                assert!(r.abs() < 1e-14, "K={} {:?}", p.coupling, p.identity_residuals());
            }
        }
    }

    #[test]
    fn cosh_2k_variant_of_identity_fails() {
        let p = CouplingPoint::new(0.5);
        let variant = (1.0 - p.u * p.u) - 1.0 / math::cosh(1.0).powi(2);
        assert!(variant.abs() > 0.1);
    }

    #[test]
    fn k1_closed_forms() {
        let p = CouplingPoint::new(0.37);
        let s = math::sinh(0.74);
        let c = math::cosh(0.74);
        assert_relative_eq!(p.k1, 2.0 * s / (c * c), epsilon = 1e-15);
        assert_relative_eq!(p.k1, 2.0 * math::tanh(0.74) / c, epsilon = 1e-15);
    }

    #[test]
    fn free_energy_at_zero() {
        assert_eq!(free_energy_density(0.0, &opts()).unwrap().value, LN_2);
        assert!((free_energy_raw(0.0, 8).unwrap() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn free_energy_matches_series() {
        let s30 = series_partial(0.1, 30).unwrap();
        let variant: f64 = LN_2 + math::ln(math::cosh(0.2))
            - (1..=30).map(|n| central_binomial_squared(n).to_f64().unwrap() * CouplingPoint::new(0.1).k.powi(2 * n as i32)).sum::<f64>();
        assert!((variant - s30).abs() > 1e-3);
        assert!((free_energy_density(0.1, &opts()).unwrap().value - s30).abs() < 1e-10);
        assert!((series_partial(0.1, 60).unwrap() - s30).abs() < 1e-14);
    }

    #[test]
    fn free_energy_even_and_nondecreasing() {
        let mut last = LN_2;
        for i in 0..=20 {
            let kk = i as f64 * 0.05;
            let v = free_energy_density(kk, &opts()).unwrap().value;
            assert!(v >= last - 1e-15, "K={kk}");
            assert!(v >= LN_2 - 1e-15);
            assert_eq!(free_energy_density(-kk, &opts()).unwrap().value, v);
            last = v;
        }
    }

    #[test]
    fn critical_free_energy() {
        let kc = critical_coupling();
        let catalan = 0.915_965_594_177_219;
        let exact = 0.5 * LN_2 + 2.0 * catalan / PI;
        let est = free_energy_density(kc, &opts()).unwrap();
        assert!((est.value - exact).abs() < 1e-10, "{} vs {exact}", est.value);
        let levels = richardson_sequence(kc, &opts()).unwrap();
        let deltas: Vec<f64> = levels.windows(2).map(|w| (w[1].raw - w[0].raw).abs()).collect();
        assert!(deltas.windows(2).all(|w| w[1] < w[0]), "{deltas:?}");
    }

    #[test]
    fn finite_size_limit_and_zero() {
        let grid = PeriodicGrid::midpoint(64);
        for n in 1..6 {
            assert_relative_eq!(finite_size_log_z(n, 0.0, &grid).unwrap(), LN_2, epsilon = 1e-15);
        }
        let big = finite_size_log_z(1 << 30, 0.3, &grid).unwrap();
        let limit = free_energy_raw(0.3, 64).unwrap();
        assert!((big - limit).abs() < 1e-8);
        assert!(finite_size_log_z(0, 0.3, &grid).is_err());
    }

    #[test]
    fn reparametrization_matches_log_det() {
        for (eps, eta, kk) in [(0.3, 1.7, 0.2), (2.0, 5.5, 0.44), (4.1, 0.9, 1.3)] {
            let direct = transfer::log_det_integrand(eps, eta, math::tanh(kk)).unwrap();
            assert!((direct - reparametrized_log_det(eps, eta, kk).unwrap()).abs() < 1e-12);
            let variant = onsager_integrand(eps, eta, kk).unwrap() - 4.0 * math::ln(math::cosh(2.0 * kk));
            assert!((direct - variant).abs() > 1e-3);
        }
    }

    #[test]
    fn series_coefficients_and_domain() {
        assert_eq!(central_binomial_squared(1), BigUint::from(4u32));
        assert_eq!(central_binomial_squared(2), BigUint::from(36u32));
        assert_eq!(central_binomial_squared(3), BigUint::from(400u32));
        assert_eq!(series_partial(0.0, 10).unwrap(), LN_2);
        let kc = critical_coupling();
        assert!(matches!(series_partial(kc, 10), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn critical_point() {
        let kc = critical_coupling();
        assert!((kc - critical_coupling_closed_form()).abs() < 1e-14);
        assert!((kc - 0.440_686_8).abs() < 1e-7);
        assert!((math::sinh(2.0 * kc) - 1.0).abs() < 1e-13);
        assert!((math::tanh(2.0 * kc).powi(2) - 0.5).abs() < 1e-13);
        assert!((CouplingPoint::new(kc).k1 - 1.0).abs() < 1e-13);
        assert!(critical_residual(kc).abs() < 1e-13);
    }

    #[test]
    fn internal_energy_routes_agree() {
        for kk in [0.1, 0.3, 0.6, 1.0] {
            let a = internal_energy(kk).unwrap();
            let b = internal_energy_quadrature(kk, 256).unwrap();
            assert!((a - b).abs() < 1e-9, "K={kk}: {a} vs {b}");
        }
    }

    #[test]
    fn internal_energy_limits() {
        let kc = critical_coupling();
        assert!((internal_energy(kc).unwrap() + SQRT_2).abs() < 1e-9);
        assert_eq!(internal_energy(0.0).unwrap(), 0.0);
        assert!((internal_energy(12.0).unwrap() + 2.0).abs() < 1e-9);
        for i in 1..=40 {
            let kk = i as f64 * 0.05;
            let u = internal_energy(kk).unwrap();
            assert!(u < 0.0);
            assert_eq!(internal_energy(-kk).unwrap(), -u);
        }
    }

    fn central_difference_heat(kk: f64, h: f64) -> f64 {
        let du = (internal_energy(kk + h).unwrap() - internal_energy(kk - h).unwrap()) / (2.0 * h);
        -kk * kk * du
    }

    #[test]
    fn specific_heat_matches_finite_differences() {
        for kk in [0.25, 0.35, 0.55, 0.9] {
            let (c1, c2) = (central_difference_heat(kk, 1e-3), central_difference_heat(kk, 5e-4));
            let extrapolated = (4.0 * c2 - c1) / 3.0;
            assert!((specific_heat(kk).unwrap() - extrapolated).abs() < 1e-6, "K={kk}");
        }
    }

    #[test]
    fn extra_modulus_factor_in_specific_heat_disagrees() {
        let kk = 0.25;
        let p = CouplingPoint::new(kk);
        let variant = p.k1 * specific_heat(kk).unwrap();
        let reference = central_difference_heat(kk, 1e-4);
        assert!((variant - reference).abs() > 1e-2);
    }

    #[test]
    fn specific_heat_limits() {
        assert_eq!(specific_heat(0.0).unwrap(), 0.0);
        assert!(specific_heat(1e-3).unwrap() < 1e-5);
        assert_eq!(specific_heat(critical_coupling_closed_form()), Err(Error::Divergent));
        let kc = critical_coupling();
        let near = specific_heat(kc + 1e-6).unwrap();
        let far = specific_heat(kc + 1e-3).unwrap();
        assert!(near > far && far > 0.0);
    }

    #[test]
    fn finite_where_the_modulus_rounds_to_one() {
        let kc = critical_coupling();
        for k in [kc - 1e-9, kc + 1e-9] {
            assert_eq!(modulus_parts(k).0, 1.0);
            let c = specific_heat(k).unwrap();
            assert!(c.is_finite() && c > specific_heat(kc + 1e-6).unwrap());
            assert!((internal_energy(k).unwrap() + SQRT_2).abs() < 1e-6);
        }
    }

    #[test]
    fn thermo_point_at_zero() {
        let t = thermo_point(0.0, &opts()).unwrap();
        assert_eq!(t.minus_beta_f, LN_2);
        assert_eq!((t.u, t.k1, t.u_over_j, t.c_over_kb), (0.0, 0.0, 0.0, 0.0));
    }
}
