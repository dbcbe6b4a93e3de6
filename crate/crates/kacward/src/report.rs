//! Serialized forms of results: JSON documents and the thermodynamics CSV.

use std::fmt::Write as _;
use std::io::{self, Write};

use kacward_core::onsager::ThermoPoint;
use kacward_core::paths::IdentityReport;
use kacward_core::IntPolynomial;
use serde::{Deserialize, Serialize};

/// `{"degree": d, "coeffs": [c0, …, cd]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub degree: usize,
    pub coeffs: Vec<i128>,
}

impl From<&IntPolynomial> for PolynomialJson {
    fn from(p: &IntPolynomial) -> Self {
        let coeffs = if p.is_zero() { vec![0] } else { p.coeffs().to_vec() };
        Self { degree: p.degree(), coeffs }
    }
}

impl From<&PolynomialJson> for IntPolynomial {
    fn from(p: &PolynomialJson) -> Self {
        IntPolynomial::from_coeffs(p.coeffs.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderJson {
    pub order: usize,
    pub graphs: i128,
    pub paths: i128,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityJson {
    pub side: usize,
    pub max_order: usize,
    pub classes: usize,
    pub orders: Vec<OrderJson>,
    pub holds: bool,
}

impl From<&IdentityReport> for IdentityJson {
    fn from(r: &IdentityReport) -> Self {
        Self {
            side: r.side,
            max_order: r.max_order,
            classes: r.classes,
            orders: r
                .orders
                .iter()
                .map(|o| OrderJson { order: o.order, graphs: o.graphs, paths: o.paths, matches: o.matches() })
                .collect(),
            holds: r.holds(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub side: usize,
    pub max_order: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn new(side: usize, max_order: usize, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.status != Status::Fail);
        Self { side, max_order, checks, passed }
    }

    pub fn to_text(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{:<width$}  {}  {}", c.name, c.status.label(), c.detail);
        }
        let _ = writeln!(out, "overall: {}", if self.passed { "PASS" } else { "FAIL" });
        out
    }
}

/// `printf("%.12e")`: twelve fractional digits and an exponent of at least
/// two digits with explicit sign.
pub fn format_c_exp(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.unsigned_abs())
}

pub const THERMO_HEADER: &str = "K,u,k1,minus_beta_f,U_over_J,C_over_kB";

pub fn write_thermo_csv(mut w: impl Write, points: &[ThermoPoint]) -> io::Result<()> {
    writeln!(w, "{THERMO_HEADER}")?;
    for p in points {
        let fields = [p.coupling, p.u, p.k1, p.minus_beta_f, p.u_over_j, p.c_over_kb].map(format_c_exp);
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponents() {
        assert_eq!(format_c_exp(0.0), "0.000000000000e+00");
        assert_eq!(format_c_exp(0.25), "2.500000000000e-01");
        assert_eq!(format_c_exp(-1234.5), "-1.234500000000e+03");
        assert_eq!(format_c_exp(1e-300), "1.000000000000e-300");
        assert_eq!(format_c_exp(f64::NAN), "nan");
    }

    #[test]
    fn polynomial_json_shape() {
        let p = IntPolynomial::from_coeffs(vec![1, 0, 0, 0, 1]);
        let json = serde_json::to_string(&PolynomialJson::from(&p)).unwrap();
        assert_eq!(json, r#"{"degree":4,"coeffs":[1,0,0,0,1]}"#);
        let back: PolynomialJson = serde_json::from_str(&json).unwrap();
        assert_eq!(IntPolynomial::from(&back), p);
    }

    #[test]
    fn status_serializes_uppercase() {
        assert_eq!(serde_json::to_string(&Status::Skip).unwrap(), r#""SKIP""#);
    }
}
