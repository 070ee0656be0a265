//! Success probabilities, channel fidelity, bound inequalities, and the
//! large-n asymptotic evaluators.
//!
//! The channel fidelity of a coefficient vector c is the Bloch-sphere
//! average of the teleportation success probability, which collapses to the
//! quadratic form c^T A~ c. The success probability for `|+>` is the
//! quadratic form against A. Everything here is closed-form or a
//! one-dimensional quadrature; the Fock-space simulator provides the
//! independent protocol-level check.

use crate::ancilla::{self, AncillaCoefficients};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::spectral::{build_a, build_a_tilde, lambda_max_a, mu_from_theta, solve_theta};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Pure qubit input (alpha, beta) with |alpha|^2 + |beta|^2 = 1.
///
/// The global phase is dropped at construction; every quantity downstream
/// depends only on |alpha|^2 and |beta|^2 anyway.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    alpha: Complex64,
    beta: Complex64,
}

impl QubitState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { alpha, beta })
    }

    /// Bloch angles: alpha = cos(theta/2), beta = e^{i phi} sin(theta/2).
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let alpha = Complex64::new((theta / 2.0).cos(), 0.0);
        let beta = Complex64::from_polar((theta / 2.0).sin(), phi);
        Self { alpha, beta }
    }

    pub fn zero() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// (|0> + |1>)/sqrt(2), the hardest state to teleport.
    pub fn plus() -> Self {
        let s = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        Self { alpha: s, beta: s }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn prob_zero(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn prob_one(&self) -> f64 {
        self.beta.norm_sqr()
    }

    /// |<self|other>|^2.
    pub fn overlap_sq(&self, other: &QubitState) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm_sqr()
    }
}

/// Probability of observing k photons: |alpha|^2 c(k)^2 + |beta|^2 c(k-1)^2,
/// with c(-1) = c(n+1) = 0. Valid for 0 <= k <= n+1; the sum over that
/// range is 1.
pub fn outcome_probability(c: &AncillaCoefficients, psi: &QubitState, k: usize) -> Result<f64> {
    let n = c.n();
    if k > n + 1 {
        return Err(Error::OutcomeOutOfRange { k, max: n + 1 });
    }
    let ck = c.coeff(k as i64);
    let ck1 = c.coeff(k as i64 - 1);
    Ok(psi.prob_zero() * ck * ck + psi.prob_one() * ck1 * ck1)
}

/// Conditional teleported state (alpha c(k), beta c(k-1)) / sqrt(p_k) for a
/// teleporting outcome 1 <= k <= n.
pub fn quasi_state(c: &AncillaCoefficients, psi: &QubitState, k: usize) -> Result<QubitState> {
    let n = c.n();
    if k == 0 || k > n {
        return Err(Error::OutcomeOutOfRange { k, max: n });
    }
    let a = psi.alpha() * c.coeff(k as i64);
    let b = psi.beta() * c.coeff(k as i64 - 1);
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroProbabilityOutcome { k });
    }
    Ok(QubitState {
        alpha: a / norm,
        beta: b / norm,
    })
}

/// Fidelity-weighted success probability
/// sum_{k=1}^{n} (|alpha|^2 c(k) + |beta|^2 c(k-1))^2.
pub fn success_probability(c: &AncillaCoefficients, psi: &QubitState) -> f64 {
    let n = c.n();
    let pa = psi.prob_zero();
    let pb = psi.prob_one();
    (1..=n)
        .map(|k| {
            let term = pa * c.coeff(k as i64) + pb * c.coeff(k as i64 - 1);
            term * term
        })
        .sum()
}

/// Channel fidelity as the quadratic form c^T A~ c.
pub fn channel_fidelity(c: &AncillaCoefficients) -> f64 {
    let a_tilde = build_a_tilde(c.n()).expect("n >= 1 by construction");
    a_tilde.quadratic_form(c.coefficients())
}

/// Channel fidelity by numerical Bloch-sphere average.
///
/// The azimuthal integral is trivial (the success probability depends only
/// on |alpha|^2), leaving a one-dimensional Gauss-Legendre rule in
/// cos(theta_B). The integrand is a degree-2 polynomial in cos(theta_B),
/// so any rule with >= 2 nodes is exact up to rounding.
pub fn channel_fidelity_quadrature(c: &AncillaCoefficients, nodes: usize) -> Result<f64> {
    if nodes < 8 {
        return Err(Error::InvalidCoefficients(format!(
            "quadrature needs at least 8 nodes, got {nodes}"
        )));
    }
    let (xs, ws) = gauss_legendre(nodes);
    let n = c.n();
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let pa = 0.5 * (1.0 + x);
        let pb = 0.5 * (1.0 - x);
        let mut p = 0.0;
        for k in 1..=n {
            let term = pa * c.coeff(k as i64) + pb * c.coeff(k as i64 - 1);
            p += term * term;
        }
        acc += w * p;
    }
    Ok(0.5 * acc)
}

/// Closed-form bracket for the optimal fidelity:
/// lower = 2/3 + cos(pi/(n+1))/3 - v(0)^2/3 (the fidelity of v),
/// upper = 2/3 + cos(pi/(n+1))/3 - u(0)^2/3.
pub fn fidelity_bounds(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let base = 2.0 / 3.0 + (PI / (n + 1) as f64).cos() / 3.0;
    let theta = solve_theta(n, 1e-12)?.theta;
    let lower = base - ancilla::v0_squared(n) / 3.0;
    let upper = base - ancilla::u0_squared(n, theta) / 3.0;
    Ok((lower, upper))
}

/// The large-n closed formulas, evaluated at finite n.
#[derive(Debug, Clone, Copy)]
pub struct Asymptotics {
    /// 1 - pi^2/(6 n^2) + 2 pi^2/(9 n^3)
    pub f_opt: f64,
    /// Angle shift pi/(3 n^2) beyond pi/(n+1)
    pub delta: f64,
    /// pi^2/(2 n^3)
    pub v0_squared: f64,
    /// 2 pi^2/(9 n^3)
    pub u0_squared: f64,
    /// lambda_n - pi^2/(12 n^3)
    pub p_u_plus: f64,
    /// pi^2/(18 n^3), the gap f_opt - f_v
    pub gap: f64,
}

pub fn asymptotics(n: usize) -> Result<Asymptotics> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let nf = n as f64;
    let n2 = nf * nf;
    let n3 = n2 * nf;
    let pi2 = PI * PI;
    Ok(Asymptotics {
        f_opt: 1.0 - pi2 / (6.0 * n2) + 2.0 * pi2 / (9.0 * n3),
        delta: PI / (3.0 * n2),
        v0_squared: pi2 / (2.0 * n3),
        u0_squared: 2.0 * pi2 / (9.0 * n3),
        p_u_plus: lambda_max_a(n) - pi2 / (12.0 * n3),
        gap: pi2 / (18.0 * n3),
    })
}

/// Success probability for `|+>` with the fidelity-optimal ancilla:
/// u^T A u. Always at most lambda_n, since v maximizes the form.
pub fn p_u_plus(n: usize) -> Result<f64> {
    let u = ancilla::optimal_u(n, None)?;
    let a = build_a(n)?;
    Ok(a.quadratic_form(u.coefficients()))
}

/// Success probability for `|+>` with the `|+>`-optimal ancilla: v^T A v,
/// which equals lambda_n up to rounding.
pub fn p_v_plus(n: usize) -> Result<f64> {
    let v = ancilla::plus_optimal_v(n)?;
    let a = build_a(n)?;
    Ok(a.quadratic_form(v.coefficients()))
}

/// Per-n summary row combining the angle, eigenvalues, fidelities, bounds,
/// and asymptote.
#[derive(Debug, Clone, Copy)]
pub struct FidelityReport {
    pub n: usize,
    pub theta: f64,
    pub mu_n: f64,
    pub lambda_n: f64,
    pub f_opt: f64,
    pub f_v: f64,
    pub f_uniform: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub asymptotic_f_opt: f64,
    pub p_u_plus: f64,
    pub p_v_plus: f64,
}

impl FidelityReport {
    /// The numeric columns in serialization order (everything after n).
    pub fn numeric_fields(&self) -> [f64; 11] {
        [
            self.theta,
            self.mu_n,
            self.lambda_n,
            self.f_opt,
            self.f_v,
            self.f_uniform,
            self.lower_bound,
            self.upper_bound,
            self.asymptotic_f_opt,
            self.p_u_plus,
            self.p_v_plus,
        ]
    }
}

pub fn report(n: usize) -> Result<FidelityReport> {
    let theta = solve_theta(n, 1e-12)?.theta;
    let mu = mu_from_theta(theta);
    let v = ancilla::plus_optimal_v(n)?;
    let (lower, upper) = fidelity_bounds(n)?;
    Ok(FidelityReport {
        n,
        theta,
        mu_n: mu,
        lambda_n: lambda_max_a(n),
        f_opt: mu,
        f_v: channel_fidelity(&v),
        f_uniform: n as f64 / (n + 1) as f64,
        lower_bound: lower,
        upper_bound: upper,
        asymptotic_f_opt: asymptotics(n)?.f_opt,
        p_u_plus: p_u_plus(n)?,
        p_v_plus: p_v_plus(n)?,
    })
}
