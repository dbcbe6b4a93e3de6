//! Direction-resolved path amplitudes and the momentum-space step matrix.
//!
//! `uM_{ij}` is the amplitude for arriving along direction `i` and leaving
//! along `j` (indices as in [`Direction::index`]): `u` per step, `α` per
//! counterclockwise turn, `ᾱ` per clockwise turn, `0` for a reversal, and
//! a Fourier phase `e^{-i(ε dx + η dy)}` for the displacement of `j`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::lattice::{Direction, Turn};
use crate::math::{self, CompensatedSum};
use crate::quadrature::PeriodicGrid;
use crate::{Error, Result};

/// `α = e^{iπ/4}`.
pub const ALPHA: Complex64 = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
/// `ᾱ = e^{-iπ/4}`.
pub const ALPHA_BAR: Complex64 = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Imaginary residue tolerated on quantities that are real after angular
/// integration.
pub const IMAGINARY_TOLERANCE: f64 = 1e-12;

pub fn turn_phase(turn: Turn) -> Complex64 {
    match turn {
        Turn::Straight => ONE,
        Turn::Left => ALPHA,
        Turn::Right => ALPHA_BAR,
        Turn::Reverse => ZERO,
    }
}

/// Arrival amplitudes `U_n, D_n, L_n, R_n` on the window `|x|, |y| ≤ n` of
/// the unbounded lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeField {
    steps: usize,
    u: f64,
    /// Indexed by `Direction::index() - 1`.
    values: [Vec<Complex64>; 4],
}

impl AmplitudeField {
    /// Zero-step field: amplitude one at the origin for arrival along
    /// `seed`, zero elsewhere.
    pub fn seeded(seed: Direction, u: f64) -> Self {
        let mut values = [vec![ZERO], vec![ZERO], vec![ZERO], vec![ZERO]];
        values[seed.index() - 1][0] = ONE;
        Self { steps: 0, u, values }
    }

    /// The conventional seed: arriving at the origin moving up.
    pub fn initial(u: f64) -> Self {
        Self::seeded(Direction::Up, u)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn width(&self) -> usize {
        2 * self.steps + 1
    }

    fn offset(&self, x: i64, y: i64) -> Option<usize> {
        let half = self.steps as i64;
        if x.abs() > half || y.abs() > half {
            return None;
        }
        Some(((y + half) as usize) * self.width() + (x + half) as usize)
    }

    /// `F_n(x, y)` for arrival along `dir`; zero outside the window.
    pub fn get(&self, x: i64, y: i64, dir: Direction) -> Complex64 {
        self.offset(x, y).map_or(ZERO, |i| self.values[dir.index() - 1][i])
    }

    /// Arrival from any direction.
    pub fn total(&self, x: i64, y: i64) -> Complex64 {
        Direction::ALL.iter().map(|&d| self.get(x, y, d)).sum()
    }

    /// One application of the four recursions.
    pub fn step(&self) -> Self {
        let steps = self.steps + 1;
        let half = steps as i64;
        let width = 2 * steps + 1;
        let mut values: [Vec<Complex64>; 4] = core::array::from_fn(|_| vec![ZERO; width * width]);
        for next in Direction::ALL {
            let (dx, dy) = next.delta();
            let out = &mut values[next.index() - 1];
            for y in -half..=half {
                for x in -half..=half {
                    let acc: Complex64 = Direction::ALL
                        .iter()
                        .map(|&prev| turn_phase(prev.turn_to(next)) * self.get(x - dx, y - dy, prev))
                        .sum();
                    out[((y + half) as usize) * width + (x + half) as usize] = acc * self.u;
                }
            }
        }
        Self { steps, u: self.u, values }
    }

    pub fn advance(mut self, n: usize) -> Self {
        for _ in 0..n {
            self = self.step();
        }
        self
    }
}

/// `F_n(x, y)` from the conventional seed; `dir = None` sums all four
/// arrival directions.
pub fn arrival_amplitude(n: usize, x: i64, y: i64, dir: Option<Direction>, u: f64) -> Complex64 {
    let field = AmplitudeField::initial(u).advance(n);
    match dir {
        Some(d) => field.get(x, y, d),
        None => field.total(x, y),
    }
}

pub type Matrix4 = [[Complex64; 4]; 4];

pub fn identity4() -> Matrix4 {
    core::array::from_fn(|i| core::array::from_fn(|j| if i == j { ONE } else { ZERO }))
}

pub fn mul4(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    core::array::from_fn(|i| core::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn trace4(a: &Matrix4) -> Complex64 {
    (0..4).map(|i| a[i][i]).sum()
}

/// Laplace expansion along the first row.
pub fn det4(a: &Matrix4) -> Complex64 {
    let minor = |col: usize| -> Complex64 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != col).collect();
        let m = |r: usize, c: usize| a[r][cols[c]];
        m(1, 0) * (m(2, 1) * m(3, 2) - m(2, 2) * m(3, 1)) - m(1, 1) * (m(2, 0) * m(3, 2) - m(2, 2) * m(3, 0))
            + m(1, 2) * (m(2, 0) * m(3, 1) - m(2, 1) * m(3, 0))
    };
    (0..4)
        .map(|col| {
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            a[0][col] * minor(col) * sign
        })
        .sum()
}

/// `uM(ε, η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMatrix {
    pub u: f64,
    pub eps: f64,
    pub eta: f64,
    entries: Matrix4,
}

impl StepMatrix {
    pub fn new(eps: f64, eta: f64, u: f64) -> Self {
        let v = Complex64::from_polar(1.0, -eta);
        let v_bar = v.conj();
        let h = Complex64::from_polar(1.0, eps);
        let h_bar = h.conj();
        let a = ALPHA;
        let a_bar = ALPHA_BAR;
        let m: Matrix4 = [
            [v, ZERO, (a * h).conj(), a * h],
            [ZERO, v_bar, a * h_bar, a_bar * h],
            [a * v, (a * v).conj(), h_bar, ZERO],
            [a_bar * v, a * v_bar, ZERO, h],
        ];
        let entries = m.map(|row| row.map(|z| z * u));
        Self { u, eps, eta, entries }
    }

    pub fn entries(&self) -> &Matrix4 {
        &self.entries
    }

    /// 1-based entry `(uM)_{ij}`.
    pub fn entry(&self, i: Direction, j: Direction) -> Complex64 {
        self.entries[i.index() - 1][j.index() - 1]
    }

    pub fn pow(&self, n: usize) -> Matrix4 {
        (0..n).fold(identity4(), |acc, _| mul4(&acc, &self.entries))
    }

    /// `det(I - uM)` by cofactor expansion of the assembled matrix.
    pub fn det_identity_minus(&self) -> Complex64 {
        let mut a = identity4();
        for (i, row) in a.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z -= self.entries[i][j];
            }
        }
        det4(&a)
    }
}

fn check_resolution(grid: &PeriodicGrid, degree: usize) -> Result<()> {
    if grid.resolution < degree + 1 {
        return Err(Error::InsufficientResolution { resolution: grid.resolution, required: degree + 1 });
    }
    Ok(())
}

fn realify(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOLERANCE * scale.max(1.0) {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// `(2π)^{-2} ∬ (M^n)_{ij}` for every `i, j` (with `u = 1`).
pub fn matrix_power_mean(n: usize, grid: &PeriodicGrid) -> Result<Matrix4> {
    check_resolution(grid, n)?;
    let mut out = [[ZERO; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, z) in row.iter_mut().enumerate() {
            *z = grid.mean_complex(|e, h| StepMatrix::new(e, h, 1.0).pow(n)[i][j]);
        }
    }
    Ok(out)
}

/// `(2π)^{-2} ∬ Tr(uM)^n` for `n = 1..=n_max`, one pass over the grid.
pub fn trace_power_means(u: f64, n_max: usize, grid: &PeriodicGrid) -> Result<Vec<f64>> {
    check_resolution(grid, n_max)?;
    let mut re = vec![CompensatedSum::new(); n_max];
    let mut im = vec![CompensatedSum::new(); n_max];
    for eps in grid.angles() {
        for eta in grid.angles() {
            let m = StepMatrix::new(eps, eta, u);
            let mut power = identity4();
            for n in 0..n_max {
                power = mul4(&power, m.entries());
                let t = trace4(&power);
                re[n].add(t.re);
                im[n].add(t.im);
            }
        }
    }
    let w = 1.0 / (grid.resolution * grid.resolution) as f64;
    (0..n_max)
        .map(|n| {
            let scale = math::powi(4.0 * u.abs(), n as u32 + 1);
            realify(Complex64::new(re[n].value() * w, im[n].value() * w), scale)
        })
        .collect()
}

/// `(2π)^{-2} ∬ Tr(uM)^n dε dη`: the signed sum of `α`-phases over rooted
/// directed closed walks of length `n`, times `u^n`.
pub fn trace_power_integral(n: usize, u: f64, grid: &PeriodicGrid) -> Result<f64> {
    if n == 0 {
        return Ok(4.0);
    }
    Ok(trace_power_means(u, n, grid)?[n - 1])
}

/// `Σ_{p(n, P₁)} W_p(u) = -½ (2π)^{-2} ∬ Tr(uM)^n`.
pub fn closed_amplitude_sum(n: usize, u: f64, grid: &PeriodicGrid) -> Result<f64> {
    Ok(-0.5 * trace_power_integral(n, u, grid)?)
}

/// `(u² + 1)² - 2u(1 - u²)(cos ε + cos η)`, the closed form of `det(I - uM)`.
pub fn det_closed_form(eps: f64, eta: f64, u: f64) -> f64 {
    let u2 = u * u;
    (u2 + 1.0) * (u2 + 1.0) - 2.0 * u * (1.0 - u2) * (math::cos(eps) + math::cos(eta))
}

/// `ln det(I - uM)`; a nonpositive determinant signals the singular point.
pub fn log_det_integrand(eps: f64, eta: f64, u: f64) -> Result<f64> {
    let d = det_closed_form(eps, eta, u);
    if d <= 0.0 {
        return Err(Error::Singular(d));
    }
    Ok(math::ln(d))
}

/// `(2π)^{-2} ∬ ln det(I - uM)`.
pub fn log_det_mean(u: f64, grid: &PeriodicGrid) -> Result<f64> {
    grid.try_mean(|e, h| log_det_integrand(e, h, u))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub n: usize,
    pub partial_sum: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesReport {
    pub u: f64,
    pub log_det_mean: f64,
    pub points: Vec<SeriesPoint>,
}

impl SeriesReport {
    pub fn final_residual(&self) -> f64 {
        self.points.last().map_or(f64::INFINITY, |p| p.residual)
    }

    /// Residuals never grow with `n`.
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].residual <= w[0].residual)
    }
}

/// Partial sums of `-Σ_n (2π)^{-2} ∬ Tr(uM)^n / n` against the quadrature
/// of `ln det(I - uM)`. Restricted to `|u| < 1/4` where the series is known
/// to converge uniformly.
pub fn trace_log_series_check(u: f64, n_max: usize, grid: &PeriodicGrid) -> Result<SeriesReport> {
    if u.abs() >= 0.25 {
        return Err(Error::OutsideDomain("|u| must be below 1/4"));
    }
    let traces = trace_power_means(u, n_max, grid)?;
    let target = log_det_mean(u, grid)?;
    let mut partial = CompensatedSum::new();
    let points = traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let n = i + 1;
            partial.add(-t / n as f64);
            let s = partial.value();
            SeriesPoint { n, partial_sum: s, residual: (s - target).abs() }
        })
        .collect();
    Ok(SeriesReport { u, log_det_mean: target, points })
}
