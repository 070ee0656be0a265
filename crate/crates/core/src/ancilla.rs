//! Ancilla coefficient vectors.
//!
//! Three families matter: the uniform KLM vector c(i) = 1/sqrt(n+1), the
//! fidelity-optimal vector `u` (top eigenvector of the channel-fidelity
//! matrix), and the `|+>`-optimal vector `v` (top eigenvector of the
//! `|+>`-success matrix). Both `u` and `v` have sine-shaped closed forms;
//! constructors evaluate those forms and can cross-check them against the
//! Sturm-bisection eigensolver.

use crate::error::{Error, Result};
use crate::report::format_sig16;
use crate::spectral::{build_a_tilde, largest_eigenpair, solve_theta};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AncillaLabel {
    Uniform,
    OptimalU,
    PlusOptimalV,
    Custom,
}

impl AncillaLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            AncillaLabel::Uniform => "uniform",
            AncillaLabel::OptimalU => "optimal_u",
            AncillaLabel::PlusOptimalV => "plus_optimal_v",
            AncillaLabel::Custom => "custom",
        }
    }
}

/// Normalized real coefficient vector c(0..n) defining a 2n-mode ancilla
/// state.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaCoefficients {
    n: usize,
    c: Vec<f64>,
    label: AncillaLabel,
}

impl AncillaCoefficients {
    pub(crate) fn from_normalized(c: Vec<f64>, label: AncillaLabel) -> Self {
        debug_assert!(c.len() >= 2);
        Self {
            n: c.len() - 1,
            c,
            label,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> AncillaLabel {
        self.label
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// c(k) with the boundary convention c(-1) = c(n+1) = 0, so the outcome
    /// probability formula covers k = 0 and k = n+1 uniformly.
    pub fn coeff(&self, k: i64) -> f64 {
        if k < 0 || k > self.n as i64 {
            0.0
        } else {
            self.c[k as usize]
        }
    }

    /// JSON array of the coefficients, 16 significant digits.
    pub fn to_json(&self) -> String {
        let entries: Vec<String> = self.c.iter().map(|v| format_sig16(*v)).collect();
        format!("[{}]", entries.join(","))
    }

    /// Single-column CSV, one coefficient per line, 16 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("c\n");
        for v in &self.c {
            out.push_str(&format_sig16(*v));
            out.push('\n');
        }
        out
    }
}

/// Uniform KLM coefficients: every entry 1/sqrt(n+1).
pub fn uniform_klm(n: usize) -> Result<AncillaCoefficients> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let value = 1.0 / ((n + 1) as f64).sqrt();
    Ok(AncillaCoefficients::from_normalized(
        vec![value; n + 1],
        AncillaLabel::Uniform,
    ))
}

/// Fidelity-optimal coefficients u(j) ~ sin((j+1) theta) + 2 sin(j theta),
/// theta the smallest root of the angle condition.
///
/// With `oracle_tol = Some(tol)` the closed form is re-validated against
/// the tridiagonal eigensolver componentwise; pass `None` for large-n
/// sweeps where the oracle run is the dominant cost.
pub fn optimal_u(n: usize, oracle_tol: Option<f64>) -> Result<AncillaCoefficients> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let theta = solve_theta(n, 1e-12)?.theta;
    let raw: Vec<f64> = (0..=n)
        .map(|j| {
            let jf = j as f64;
            ((jf + 1.0) * theta).sin() + 2.0 * (jf * theta).sin()
        })
        .collect();
    let c = normalize(raw);
    if let Some(tol) = oracle_tol {
        let (_, oracle) = largest_eigenpair(&build_a_tilde(n)?, 1e-10)?;
        let deviation = max_componentwise_deviation(&c, &oracle);
        if deviation > tol {
            return Err(Error::OracleMismatch { n, deviation, tol });
        }
    }
    Ok(AncillaCoefficients::from_normalized(c, AncillaLabel::OptimalU))
}

/// `|+>`-optimal coefficients v(j) ~ sin((j+1) pi/(n+1)) + sin(j pi/(n+1)).
pub fn plus_optimal_v(n: usize) -> Result<AncillaCoefficients> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let x = PI / (n + 1) as f64;
    let raw: Vec<f64> = (0..=n)
        .map(|j| {
            let jf = j as f64;
            ((jf + 1.0) * x).sin() + (jf * x).sin()
        })
        .collect();
    Ok(AncillaCoefficients::from_normalized(
        normalize(raw),
        AncillaLabel::PlusOptimalV,
    ))
}

/// Arbitrary coefficient vector, normalized on construction.
///
/// Signs are kept; downstream operations do not require positivity.
pub fn custom(coeffs: &[f64]) -> Result<AncillaCoefficients> {
    if coeffs.len() < 2 {
        return Err(Error::InvalidCoefficients(format!(
            "need at least 2 coefficients, got {}",
            coeffs.len()
        )));
    }
    if coeffs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidCoefficients(
            "coefficients must be finite".into(),
        ));
    }
    let norm_sq: f64 = coeffs.iter().map(|v| v * v).sum();
    if norm_sq <= 0.0 {
        return Err(Error::InvalidCoefficients("zero vector".into()));
    }
    Ok(AncillaCoefficients::from_normalized(
        normalize(coeffs.to_vec()),
        AncillaLabel::Custom,
    ))
}

/// Parse a coefficient file: one real per line, `#` starts a comment,
/// blank lines ignored. The vector is normalized on load.
pub fn parse_coefficient_text(text: &str) -> Result<AncillaCoefficients> {
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let value: f64 = body.parse().map_err(|_| {
            Error::InvalidCoefficients(format!("line {}: cannot parse {body:?}", lineno + 1))
        })?;
        values.push(value);
    }
    custom(&values)
}

/// Normalization constant u(0)^2 = sin^2 theta / sum_j (sin((j+1) theta)
/// + 2 sin(j theta))^2 of the fidelity-optimal vector.
pub fn u0_squared(n: usize, theta: f64) -> f64 {
    let mut denom = 0.0;
    for j in 0..=n {
        let jf = j as f64;
        let term = ((jf + 1.0) * theta).sin() + 2.0 * (jf * theta).sin();
        denom += term * term;
    }
    let s = theta.sin();
    s * s / denom
}

/// Normalization constant v(0)^2 = sin^2(pi/(n+1)) / sum_j (sin((j+1) x)
/// + sin(j x))^2 of the `|+>`-optimal vector, x = pi/(n+1).
pub fn v0_squared(n: usize) -> f64 {
    let x = PI / (n + 1) as f64;
    let mut denom = 0.0;
    for j in 0..=n {
        let jf = j as f64;
        let term = ((jf + 1.0) * x).sin() + (jf * x).sin();
        denom += term * term;
    }
    let s = x.sin();
    s * s / denom
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

fn max_componentwise_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
