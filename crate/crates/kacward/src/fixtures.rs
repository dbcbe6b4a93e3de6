//! Reference amplitudes and step-matrix values shipped as JSON.

use anyhow::{bail, Context};
use kacward_core::quadrature::PeriodicGrid;
use kacward_core::transfer::{self, AmplitudeField, StepMatrix, ALPHA};
use kacward_core::Direction;
use num_complex::Complex64;
use serde::Deserialize;

const EMBEDDED: &str = include_str!("../fixtures/transfer_examples.json");

/// Absolute tolerance for every fixture comparison.
pub const TOLERANCE: f64 = 1e-12;

/// `[coefficient, α power, h power, v power]`.
pub type Monomial = [i64; 4];

#[derive(Debug, Clone, Deserialize)]
pub struct FixtureFile {
    pub description: String,
    pub fixtures: Vec<Fixture>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixtureKind {
    /// `F_n(x, y)` for one arrival direction, or all when `dir` is null.
    Arrival { n: usize, x: i64, y: i64, dir: Option<usize> },
    /// Every amplitude of one direction over the whole `n`-step window.
    ArrivalWindow { n: usize, dir: usize },
    /// Pointwise value of a product of step-matrix entries along
    /// `path = [i₁, …, i_{n+1}]`, or of a matrix-power entry.
    TermValue {
        #[serde(default)]
        path: Option<Vec<usize>>,
        #[serde(default)]
        entry: Option<[usize; 2]>,
        #[serde(default)]
        power: Option<usize>,
    },
    /// Angular mean of a product of step-matrix entries.
    TermIntegral { path: Vec<usize> },
    /// Angular mean of `M^power`, one entry or all sixteen.
    PowerIntegral {
        power: usize,
        #[serde(default)]
        entry: Option<[usize; 2]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct Fixture {
    pub id: String,
    #[serde(flatten)]
    pub kind: FixtureKind,
    pub value: Vec<Monomial>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOutcome {
    pub id: String,
    /// Largest deviation over every point the fixture covers.
    pub max_error: f64,
}

impl FixtureOutcome {
    pub fn passed(&self) -> bool {
        self.max_error <= TOLERANCE
    }
}

pub fn embedded() -> FixtureFile {
    serde_json::from_str(EMBEDDED).expect("embedded fixture file is valid")
}

pub fn parse(text: &str) -> anyhow::Result<FixtureFile> {
    serde_json::from_str(text).context("parsing fixture file")
}

fn direction(i: usize) -> anyhow::Result<Direction> {
    Direction::from_index(i).with_context(|| format!("direction index {i} outside 1..=4"))
}

fn monomials(value: &[Monomial], eps: f64, eta: f64) -> Complex64 {
    value
        .iter()
        .map(|&[c, a, h, v]| {
            c as f64 * ALPHA.powi(a as i32) * Complex64::from_polar(1.0, h as f64 * eps - v as f64 * eta)
        })
        .sum()
}

fn path_term(path: &[usize], eps: f64, eta: f64) -> anyhow::Result<Complex64> {
    let m = StepMatrix::new(eps, eta, 1.0);
    let mut acc = Complex64::new(1.0, 0.0);
    for w in path.windows(2) {
        acc *= m.entry(direction(w[0])?, direction(w[1])?);
    }
    Ok(acc)
}

/// Sample angles for pointwise checks.
const ANGLES: [(f64, f64); 4] = [(0.0, 0.0), (0.3, 1.9), (2.5, -0.7), (4.4, 5.1)];
/// Resolution for angular means; exact for every fixture degree below it.
const GRID: usize = 16;

/// Evaluates one fixture with step weight `u`.
pub fn evaluate(fixture: &Fixture, u: f64) -> anyhow::Result<FixtureOutcome> {
    let mut max_error = 0.0f64;
    let mut record = |got: Complex64, want: Complex64| max_error = max_error.max((got - want).norm());
    match &fixture.kind {
        FixtureKind::Arrival { n, x, y, dir } => {
            let d = dir.map(direction).transpose()?;
            let got = transfer::arrival_amplitude(*n, *x, *y, d, u);
            record(got, monomials(&fixture.value, 0.0, 0.0) * u.powi(*n as i32));
        }
        FixtureKind::ArrivalWindow { n, dir } => {
            let d = direction(*dir)?;
            let field = AmplitudeField::initial(u).advance(*n);
            let half = *n as i64;
            let want = monomials(&fixture.value, 0.0, 0.0) * u.powi(*n as i32);
            for y in -half..=half {
                for x in -half..=half {
                    record(field.get(x, y, d), want);
                }
            }
        }
        FixtureKind::TermValue { path, entry, power } => {
            for (eps, eta) in ANGLES {
                let got = match (path, entry, power) {
                    (Some(p), None, None) => path_term(p, eps, eta)?,
                    (None, Some([i, j]), Some(n)) => StepMatrix::new(eps, eta, 1.0).pow(*n)[i - 1][j - 1],
                    _ => bail!("fixture {}: give either a path or an entry with a power", fixture.id),
                };
                record(got, monomials(&fixture.value, eps, eta));
            }
        }
        FixtureKind::TermIntegral { path } => {
            let grid = PeriodicGrid::endpoint(GRID.max(path.len() + 1));
            let mut failure = None;
            let got = grid.mean_complex(|e, h| {
                path_term(path, e, h).unwrap_or_else(|err| {
                    failure = Some(err);
                    Complex64::new(0.0, 0.0)
                })
            });
            if let Some(err) = failure {
                return Err(err);
            }
            record(got, monomials(&fixture.value, 0.0, 0.0));
        }
        FixtureKind::PowerIntegral { power, entry } => {
            let grid = PeriodicGrid::endpoint(GRID.max(power + 1));
            let means = transfer::matrix_power_mean(*power, &grid)?;
            let want = monomials(&fixture.value, 0.0, 0.0);
            match entry {
                Some([i, j]) => record(means[i - 1][j - 1], want),
                None => means.iter().flatten().for_each(|&z| record(z, want)),
            }
        }
    }
    Ok(FixtureOutcome { id: fixture.id.clone(), max_error })
}

pub fn evaluate_all(file: &FixtureFile, u: f64) -> anyhow::Result<Vec<FixtureOutcome>> {
    file.fixtures.iter().map(|f| evaluate(f, u)).collect()
}
