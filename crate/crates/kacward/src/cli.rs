//! Command-line front end.
//!
//! Exit codes: 0 when every reported check passes, 1 when any check fails
//! or a computation errors, 2 for usage errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kacward_core::hightemp::{self, EnumerationBudget, EnumerationStrategy};
use kacward_core::lattice::Direction;
use kacward_core::onsager::{self, CouplingPoint, FreeEnergyOptions};
use kacward_core::paths;
use kacward_core::quadrature::PeriodicGrid;
use kacward_core::transfer;
use kacward_core::Lattice;
use serde_json::json;

use crate::parallel;
use crate::report::{self, IdentityJson, PolynomialJson};
use crate::verify::{self, VerifyConfig};

pub const BRUTE_MAX_ENV: &str = "KACWARD_BRUTE_MAX_N";

/// Couplings closer than this to `K_c` are moved off the critical point.
pub const CRITICAL_WINDOW: f64 = 1e-8;
pub const CRITICAL_NUDGE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "kacward", version, about = "Exact and closed-form routes to the planar 2D Ising model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Weight {
    /// Dimensionless coupling K = J / k_B T.
    #[arg(long = "K", allow_hyphen_values = true)]
    pub coupling: Option<f64>,
    /// High-temperature weight u = tanh K.
    #[arg(long = "u", allow_hyphen_values = true)]
    pub u: Option<f64>,
}

impl Weight {
    fn u(&self) -> f64 {
        match (self.coupling, self.u) {
            (Some(k), _) => k.tanh(),
            (None, Some(u)) => u,
            (None, None) => unreachable!("clap requires one of --K / --u"),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition function by summing all 2^(N²) spin configurations.
    Brute {
        #[arg(long = "N")]
        side: usize,
        #[arg(long = "K", allow_hyphen_values = true)]
        coupling: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Even-subgraph generating polynomial, and Z when --K is given.
    Graphs {
        #[arg(long = "N")]
        side: usize,
        #[arg(long = "K", allow_hyphen_values = true)]
        coupling: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Graph polynomial against the product over closed-path classes.
    Identity {
        #[arg(long = "N")]
        side: usize,
        #[arg(long = "max-order", default_value_t = 8)]
        max_order: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Arrival amplitude after n steps from the origin (seeded moving up).
    Amplitude {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, allow_hyphen_values = true)]
        y: i64,
        /// Arrival direction 1..4 (up, down, right, left); omit for the sum.
        #[arg(long)]
        dir: Option<usize>,
        #[command(flatten)]
        weight: Weight,
        #[command(flatten)]
        output: Output,
    },
    /// Angular trace integrals of (uM)^n next to the closed-walk count.
    Trace {
        /// Largest power n.
        #[arg(long = "max-order", default_value_t = 8)]
        max_order: usize,
        #[command(flatten)]
        weight: Weight,
        /// Quadrature nodes per axis (at least max-order + 1).
        #[arg(long = "quad-res")]
        quad_res: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Thermodynamic-limit free energy, optionally next to the N×N
    /// border-neglecting estimate.
    FreeEnergy {
        #[arg(long = "K", allow_hyphen_values = true)]
        coupling: f64,
        #[arg(long = "N")]
        side: Option<usize>,
        /// Coarsest quadrature resolution (even).
        #[arg(long = "quad-res", default_value_t = 64)]
        quad_res: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Critical coupling and its defining residuals.
    Critical {
        #[command(flatten)]
        output: Output,
    },
    /// Free energy, internal energy and specific heat over a K grid.
    Thermo {
        #[arg(long, allow_hyphen_values = true)]
        kmin: f64,
        #[arg(long, allow_hyphen_values = true)]
        kmax: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long = "quad-res", default_value_t = 64)]
        quad_res: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run every cross-route check and print a pass/fail table.
    Verify {
        #[arg(long = "N", default_value_t = 3)]
        side: usize,
        #[arg(long = "max-order", default_value_t = 8)]
        max_order: usize,
        #[arg(long = "quad-res", default_value_t = 64)]
        quad_res: usize,
        #[command(flatten)]
        output: Output,
    },
}

/// A configuration error detected after argument parsing; exits with 2, as
/// does a request beyond a size guard.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// The brute-force side limit, overridable through the environment.
pub fn brute_max_side() -> anyhow::Result<usize> {
    match std::env::var(BRUTE_MAX_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{BRUTE_MAX_ENV}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(hightemp::DEFAULT_BRUTE_MAX_SIDE),
    }
}

fn lattice(side: usize) -> anyhow::Result<Lattice> {
    Lattice::new(side).map_err(|e| usage(e.to_string()))
}

/// Evenly spaced couplings, `steps ≥ 1`; one step yields `kmin`.
pub fn coupling_grid(kmin: f64, kmax: f64, steps: usize) -> anyhow::Result<Vec<f64>> {
    if steps == 0 {
        return Err(usage("--steps must be at least 1"));
    }
    if !(kmin.is_finite() && kmax.is_finite()) || kmax < kmin {
        return Err(usage("need finite --kmin <= --kmax"));
    }
    if steps == 1 {
        return Ok(vec![kmin]);
    }
    let h = (kmax - kmin) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { kmax } else { kmin + h * i as f64 }).collect())
}

/// Moves couplings within [`CRITICAL_WINDOW`] of `±K_c` by
/// [`CRITICAL_NUDGE`] away from it; returns the indices that moved.
pub fn nudge_critical(grid: &mut [f64]) -> Vec<usize> {
    let kc = onsager::critical_coupling();
    let mut moved = Vec::new();
    for (i, k) in grid.iter_mut().enumerate() {
        let d = k.abs() - kc;
        if d.abs() < CRITICAL_WINDOW {
            let away = if d >= 0.0 { 1.0 } else { -1.0 };
            *k += k.signum() * away * CRITICAL_NUDGE;
            moved.push(i);
        }
    }
    moved
}

struct Sink {
    inner: Box<dyn Write>,
    path: Option<PathBuf>,
}

impl Sink {
    fn open(out: &Option<PathBuf>) -> anyhow::Result<Self> {
        let inner: Box<dyn Write> = match out {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { inner, path: out.clone() })
    }

    fn context(&self) -> String {
        match &self.path {
            Some(p) => format!("writing {}", p.display()),
            None => "writing standard output".into(),
        }
    }

    fn text(&mut self, s: &str) -> anyhow::Result<()> {
        let ctx = self.context();
        self.inner.write_all(s.as_bytes()).and_then(|_| self.inner.flush()).with_context(|| ctx)
    }

    fn json(&mut self, v: &impl serde::Serialize) -> anyhow::Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.text(&s)
    }
}

fn format_of(output: &Output, default: Format, allowed: &[Format]) -> anyhow::Result<Format> {
    let f = output.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(usage(format!("format {f:?} is not available for this command")));
    }
    Ok(f)
}

fn c(x: f64) -> String {
    report::format_c_exp(x)
}

/// Parses arguments, runs the command and maps the outcome to an exit
/// code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let intractable = matches!(e.downcast_ref::<kacward_core::Error>(), Some(kacward_core::Error::Intractable { .. }));
            if intractable || e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Runs one command; `Ok(false)` means a reported check failed.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    use Format::*;
    match cli.command {
        Command::Brute { side, coupling, output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            let l = lattice(side)?;
            let z = parallel::partition_brute_force(&l, coupling, brute_max_side()?)?;
            let per_site = z.ln() / l.site_count() as f64;
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => sink.json(&json!({"N": side, "K": coupling, "Z": z, "ln_Z_per_site": per_site}))?,
                _ => sink.text(&format!("N={side} K={coupling}\nZ = {}\nln Z / N^2 = {}\n", c(z), c(per_site)))?,
            }
            Ok(true)
        }
        Command::Graphs { side, coupling, output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            let l = lattice(side)?;
            let poly = hightemp::graph_generating_polynomial(&l, EnumerationStrategy::Auto, EnumerationBudget::default())?;
            let z = coupling.map(|k| hightemp::partition_from_polynomial(&l, &poly, k));
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => {
                    let mut v = json!({"N": side, "polynomial": PolynomialJson::from(&poly)});
                    if let (Some(k), Some(z)) = (coupling, z) {
                        v["K"] = json!(k);
                        v["Z"] = json!(z);
                    }
                    sink.json(&v)?
                }
                _ => {
                    let mut s = format!("N={side}\n1 + sum over even subgraphs = {poly}\n");
                    if let (Some(k), Some(z)) = (coupling, z) {
                        s += &format!("K={k} Z = {}\n", c(z));
                    }
                    sink.text(&s)?
                }
            }
            Ok(true)
        }
        Command::Identity { side, max_order, output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            let l = lattice(side)?;
            let r = parallel::feynman_identity_check(&l, max_order, EnumerationBudget::default())?;
            let doc = IdentityJson::from(&r);
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => sink.json(&doc)?,
                _ => {
                    let mut s = format!("N={side} classes up to length {max_order}: {}\norder  graphs  paths\n", doc.classes);
                    for o in &doc.orders {
                        s += &format!("{:>5}  {:>6}  {:>5}  {}\n", o.order, o.graphs, o.paths, if o.matches { "ok" } else { "MISMATCH" });
                    }
                    s += &format!("identity {}\n", if doc.holds { "PASS" } else { "FAIL" });
                    sink.text(&s)?
                }
            }
            Ok(doc.holds)
        }
        Command::Amplitude { n, x, y, dir, weight, output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            let d = match dir {
                Some(i) => Some(Direction::from_index(i).ok_or_else(|| usage("--dir must be 1, 2, 3 or 4"))?),
                None => None,
            };
            let u = weight.u();
            let z = transfer::arrival_amplitude(n, x, y, d, u);
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => sink.json(&json!({"n": n, "x": x, "y": y, "dir": dir, "u": u, "re": z.re, "im": z.im}))?,
                _ => sink.text(&format!(
                    "F_{n}({x},{y}) [dir {}] at u={u}: {} + ({})i\n",
                    dir.map_or("any".into(), |i| i.to_string()),
                    c(z.re),
                    c(z.im)
                ))?,
            }
            Ok(true)
        }
        Command::Trace { max_order, weight, quad_res, output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            let u = weight.u();
            let res = quad_res.unwrap_or(max_order + 1);
            let grid = PeriodicGrid::endpoint(res);
            let traces = transfer::trace_power_means(u, max_order, &grid).map_err(|e| usage(e.to_string()))?;
            let mut rows = Vec::new();
            let mut ok = true;
            for (i, t) in traces.iter().enumerate() {
                let n = i + 1;
                let walks = if n <= paths::MAX_ENUMERATION_LENGTH {
                    Some(paths::free_plane_base_point_sum(n)?.amplitude(u))
                } else {
                    None
                };
                let amp = -0.5 * t;
                if let Some(w) = walks {
                    ok &= (w - amp).abs() <= 1e-10;
                }
                rows.push((n, *t, amp, walks));
            }
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|(n, t, a, w)| json!({"n": n, "trace_integral": t, "closed_amplitude_sum": a, "walk_enumeration": w}))
                        .collect();
                    sink.json(&json!({"u": u, "quad_res": res, "rows": v, "agrees": ok}))?
                }
                _ => {
                    let mut s = format!("u={u} quad-res={res}\n n  trace integral        amplitude sum         walk enumeration\n");
                    for (n, t, a, w) in &rows {
                        s += &format!("{n:>2}  {:>20}  {:>20}  {:>20}\n", c(*t), c(*a), w.map_or("-".into(), c));
                    }
                    sink.text(&s)?
                }
            }
            Ok(ok)
        }
        Command::FreeEnergy { coupling, side, quad_res, output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            let options = FreeEnergyOptions { base_resolution: quad_res, ..Default::default() };
            let est = onsager::free_energy_density(coupling, &options)?;
            let finite = side
                .map(|n| onsager::finite_size_log_z(n, coupling, &PeriodicGrid::midpoint(options.max_resolution.min(quad_res * 8))))
                .transpose()?;
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => sink.json(&json!({"K": coupling, "minus_beta_f": est.value, "error": est.error, "N": side, "finite_size_ln_Z_per_site": finite}))?,
                _ => {
                    let mut s = format!("K={coupling}\n-beta f = {} (error estimate {:.1e})\n", c(est.value), est.error);
                    if let (Some(n), Some(f)) = (side, finite) {
                        s += &format!("border-neglecting ln Z / N^2 at N={n}: {}\n", c(f));
                    }
                    sink.text(&s)?
                }
            }
            Ok(true)
        }
        Command::Critical { output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            let kc = onsager::critical_coupling();
            let s2 = (2.0 * kc).sinh();
            let t2 = (2.0 * kc).tanh().powi(2);
            let k1 = CouplingPoint::new(kc).k1;
            let eq = onsager::critical_residual(kc);
            let ok = (s2 - 1.0).abs() < 1e-13 && (t2 - 0.5).abs() < 1e-13 && (k1 - 1.0).abs() < 1e-13 && eq.abs() < 1e-13;
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => sink.json(&json!({
                    "K_c": kc,
                    "closed_form": onsager::critical_coupling_closed_form(),
                    "sinh_2Kc": s2, "sinh_residual": s2 - 1.0,
                    "tanh2_2Kc": t2, "tanh2_residual": t2 - 0.5,
                    "k1": k1, "k1_residual": k1 - 1.0,
                    "equation_residual": eq,
                    "T_c_over_J": 1.0 / kc,
                }))?,
                _ => sink.text(&format!(
                    "K_c = {kc:.16}\nk_B T_c / J = {:.16}\nsinh 2K_c = {s2:.16} (residual {:.1e})\ntanh^2 2K_c = {t2:.16} (residual {:.1e})\nk1(K_c) = {k1:.16} (residual {:.1e})\n2 sinh 2K - cosh^2 2K = {eq:.1e}\n",
                    1.0 / kc, s2 - 1.0, t2 - 0.5, k1 - 1.0
                ))?,
            }
            Ok(ok)
        }
        Command::Thermo { kmin, kmax, steps, quad_res, output } => {
            format_of(&output, Csv, &[Csv])?;
            let mut grid = coupling_grid(kmin, kmax, steps)?;
            for i in nudge_critical(&mut grid) {
                eprintln!("warning: K={} is at the critical point; evaluated at K={} instead", coupling_grid(kmin, kmax, steps)?[i], grid[i]);
            }
            let options = FreeEnergyOptions { base_resolution: quad_res, ..Default::default() };
            let points = parallel::thermo_sweep(&grid, &options)?;
            let mut buf = Vec::new();
            report::write_thermo_csv(&mut buf, &points)?;
            Sink::open(&output.out)?.text(std::str::from_utf8(&buf)?)?;
            Ok(true)
        }
        Command::Verify { side, max_order, quad_res, output } => {
            let fmt = format_of(&output, Text, &[Text, Json])?;
            if quad_res < 2 || quad_res % 2 != 0 {
                bail!(UsageError("--quad-res must be a positive even number".into()));
            }
            let cfg = VerifyConfig { side, max_order, brute_max_side: brute_max_side()?, quad_res, ..VerifyConfig::new(side) };
            let report = verify::run(&cfg).map_err(|e| usage(e.to_string()))?;
            let mut sink = Sink::open(&output.out)?;
            match fmt {
                Json => sink.json(&report)?,
                _ => sink.text(&report.to_text())?,
            }
            Ok(report.passed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        assert_eq!(coupling_grid(0.0, 0.0, 1).unwrap(), vec![0.0]);
        let g = coupling_grid(0.1, 0.8, 8).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!((g[0], g[7]), (0.1, 0.8));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(coupling_grid(0.1, 0.8, 0).is_err());
        assert!(coupling_grid(0.8, 0.1, 3).is_err());
    }

    #[test]
    fn nudging() {
        let kc = onsager::critical_coupling();
        let mut g = vec![0.3, 0.4406868, kc, -kc, 0.5];
        assert_eq!(nudge_critical(&mut g), vec![1, 2, 3]);
        assert_eq!(g[2], kc + CRITICAL_NUDGE);
        assert_eq!(g[3], -kc - CRITICAL_NUDGE);
        assert_eq!(g[1], 0.4406868 + CRITICAL_NUDGE);
        assert_eq!((g[0], g[4]), (0.3, 0.5));
    }
}
