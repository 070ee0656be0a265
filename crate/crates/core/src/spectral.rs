//! Symmetric tridiagonal matrices, the transcendental angle solver, and an
//! independent Sturm-bisection eigensolver.
//!
//! Two matrices drive everything downstream: the channel-fidelity form
//! `a_tilde` (diagonal (1, 2, ..., 2, 1)/3, off-diagonal 1/6) and the
//! `|+>`-success form `a` (diagonal (1, 2, ..., 2, 1)/4, off-diagonal 1/4).
//! Their top eigenpairs have closed forms in terms of an angle; the
//! eigensolver here is deliberately self-contained (Sturm counts plus
//! inverse iteration) so it can serve as an oracle for those closed forms.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidSize(0));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                diag: diag.len(),
                offdiag: offdiag.len(),
            });
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Entry (i, j); zero outside the three diagonals.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i + 1 == j {
            self.offdiag[i]
        } else if j + 1 == i {
            self.offdiag[j]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let m = self.dim();
        let mut y = vec![0.0; m];
        for i in 0..m {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < m {
                acc += self.offdiag[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Quadratic form x^T M x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim());
        let mut acc = 0.0;
        for i in 0..self.dim() {
            acc += self.diag[i] * x[i] * x[i];
        }
        for i in 0..self.offdiag.len() {
            acc += 2.0 * self.offdiag[i] * x[i] * x[i + 1];
        }
        acc
    }
}

/// Channel-fidelity matrix: (n+1) x (n+1), diagonal (1, 2, ..., 2, 1)/3,
/// off-diagonal entries 1/6.
pub fn build_a_tilde(n: usize) -> Result<SymTridiagonal> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let m = n + 1;
    let mut diag = vec![2.0 / 3.0; m];
    diag[0] = 1.0 / 3.0;
    diag[m - 1] = 1.0 / 3.0;
    SymTridiagonal::new(diag, vec![1.0 / 6.0; m - 1])
}

/// `|+>`-success matrix: (n+1) x (n+1), diagonal (1, 2, ..., 2, 1)/4,
/// off-diagonal entries 1/4.
pub fn build_a(n: usize) -> Result<SymTridiagonal> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let m = n + 1;
    let mut diag = vec![0.5; m];
    diag[0] = 0.25;
    diag[m - 1] = 0.25;
    SymTridiagonal::new(diag, vec![0.25; m - 1])
}

/// Corner projector: diagonal matrix with 1 at the first and last entries.
pub fn corner_projector(n: usize) -> Result<SymTridiagonal> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    let m = n + 1;
    let mut diag = vec![0.0; m];
    diag[0] = 1.0;
    diag[m - 1] = 1.0;
    SymTridiagonal::new(diag, vec![0.0; m - 1])
}

/// Max-norm of `a_tilde - (2/3 a + 1/3 identity - 1/6 corner_projector)`.
///
/// The two matrices are related exactly; the residual is floating rounding
/// only.
pub fn matrix_relation_residual(n: usize) -> Result<f64> {
    let at = build_a_tilde(n)?;
    let a = build_a(n)?;
    let gamma = corner_projector(n)?;
    let m = n + 1;
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let identity = 1.0;
        let rhs = 2.0 / 3.0 * a.diag()[i] + identity / 3.0 - gamma.diag()[i] / 6.0;
        worst = worst.max((at.diag()[i] - rhs).abs());
    }
    for i in 0..m - 1 {
        let rhs = 2.0 / 3.0 * a.offdiag()[i];
        worst = worst.max((at.offdiag()[i] - rhs).abs());
    }
    Ok(worst)
}

/// The angle condition g(theta) = (1/4) sin((n+2)theta) + sin((n+1)theta)
/// + sin(n theta) whose smallest positive root parametrizes the top
/// eigenvalue of `a_tilde`.
pub fn angle_condition(n: usize, theta: f64) -> f64 {
    let nf = n as f64;
    0.25 * ((nf + 2.0) * theta).sin() + ((nf + 1.0) * theta).sin() + (nf * theta).sin()
}

/// Smallest positive root of the angle condition, with solver diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct ThetaSolution {
    pub n: usize,
    /// Root in (pi/(n+1), pi/n).
    pub theta: f64,
    /// |g(theta)| at the returned root.
    pub residual: f64,
    /// Scan bracket that isolated the root.
    pub bracket: (f64, f64),
}

/// Solve the angle condition for its smallest positive root.
///
/// The root lies strictly inside (pi/(n+1), pi/n): the condition is
/// (3/4) sin(pi/(n+1)) > 0 at the left endpoint and negative at the right.
/// A fine scan (64 subintervals, refined x4 up to 3 times if needed)
/// isolates the sign change, then bisection runs down to floating-point
/// resolution. `tol` bounds the accepted |g(theta)|.
pub fn solve_theta(n: usize, tol: f64) -> Result<ThetaSolution> {
    if n == 0 {
        return Err(Error::InvalidSize(n));
    }
    assert!(tol > 0.0, "tolerance must be positive");
    let lo = std::f64::consts::PI / (n as f64 + 1.0);
    let hi = std::f64::consts::PI / n as f64;

    let mut segments = 64usize;
    let mut bracket = None;
    let mut refinements = 0usize;
    'scan: for _ in 0..4 {
        let step = (hi - lo) / segments as f64;
        let mut a = lo;
        let mut ga = angle_condition(n, a);
        for i in 1..=segments {
            let b = if i == segments { hi } else { lo + step * i as f64 };
            let gb = angle_condition(n, b);
            if ga > 0.0 && gb <= 0.0 {
                bracket = Some((a, b));
                break 'scan;
            }
            a = b;
            ga = gb;
        }
        segments *= 4;
        refinements += 1;
    }
    let (mut a, mut b) = bracket.ok_or(Error::NoBracket {
        n,
        lo,
        hi,
        refinements,
    })?;
    let scan_bracket = (a, b);

    // Bisect to floating-point resolution; ~70 iterations cover the worst
    // case for the sizes we handle.
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if angle_condition(n, mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let theta = 0.5 * (a + b);
    let residual = angle_condition(n, theta).abs();
    if residual > tol {
        return Err(Error::ResidualTooLarge {
            n,
            residual,
            tol,
        });
    }
    Ok(ThetaSolution {
        n,
        theta,
        residual,
        bracket: scan_bracket,
    })
}

/// Top eigenvalue of `a_tilde` expressed through the angle: 2/3 + cos(theta)/3.
pub fn mu_from_theta(theta: f64) -> f64 {
    2.0 / 3.0 + theta.cos() / 3.0
}

/// Top eigenvalue of `a`: 1/2 + cos(pi/(n+1))/2.
pub fn lambda_max_a(n: usize) -> f64 {
    0.5 + 0.5 * (std::f64::consts::PI / (n as f64 + 1.0)).cos()
}

/// Number of eigenvalues of `m` strictly below `x` (Sturm sequence via LDL
/// pivot signs).
pub fn eigenvalue_count_below(m: &SymTridiagonal, x: f64) -> usize {
    const PIVOT_GUARD: f64 = 1e-300;
    let dim = m.dim();
    let mut count = 0usize;
    let mut q = m.diag()[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..dim {
        let q_safe = if q.abs() < PIVOT_GUARD {
            if q >= 0.0 {
                PIVOT_GUARD
            } else {
                -PIVOT_GUARD
            }
        } else {
            q
        };
        let e = m.offdiag()[i - 1];
        q = (m.diag()[i] - x) - e * e / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue and unit eigenvector of a symmetric tridiagonal
/// matrix.
///
/// Eigenvalue by Sturm bisection inside the Gershgorin interval;
/// eigenvector by inverse iteration with shift `lambda + 1e-12` (the top
/// gap of our matrices shrinks like n^-3, which stalls plain power
/// iteration). The returned vector has 2-norm 1, residual
/// `max|M x - lambda x| <= tol`, and its first nonzero entry positive.
pub fn largest_eigenpair(m: &SymTridiagonal, tol: f64) -> Result<(f64, Vec<f64>)> {
    let dim = m.dim();

    // Gershgorin bounds.
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..dim {
        let left = if i > 0 { m.offdiag()[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < dim { m.offdiag()[i].abs() } else { 0.0 };
        lo = lo.min(m.diag()[i] - left - right);
        hi = hi.max(m.diag()[i] + left + right);
    }
    lo -= 1.0;
    hi += 1.0;

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eigenvalue_count_below(m, mid) >= dim {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);

    let shift = lambda + 1e-12;
    let mut b = vec![0.0; dim];
    b[0] = 1.0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..8 {
        let mut y = solve_shifted(m, shift, &b);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            // Degenerate start; retry from a spread-out vector.
            b = vec![1.0 / (dim as f64).sqrt(); dim];
            continue;
        }
        for v in &mut y {
            *v /= norm;
        }
        let res = m
            .matvec(&y)
            .iter()
            .zip(&y)
            .map(|(mv, v)| (mv - lambda * v).abs())
            .fold(0.0_f64, f64::max);
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, y.clone()));
        }
        if res <= tol {
            break;
        }
        b = y;
    }
    let (residual, mut x) = best.expect("at least one iteration ran");
    if residual > tol {
        return Err(Error::EigenIterationLimit {
            best_residual: residual,
            tol,
        });
    }
    let threshold = 1e-14 * x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() > threshold) {
        if *first < 0.0 {
            for v in &mut x {
                *v = -*v;
            }
        }
    }
    Ok((lambda, x))
}

/// Solve (M - shift I) y = b with partially pivoted elimination.
///
/// The system is near-singular by construction when `shift` sits next to an
/// eigenvalue; the resulting growth is what inverse iteration relies on.
fn solve_shifted(m: &SymTridiagonal, shift: f64, b: &[f64]) -> Vec<f64> {
    const TINY: f64 = 1e-300;
    let guard = |p: f64| if p.abs() < TINY { TINY.copysign(p) } else { p };

    let dim = m.dim();
    if dim == 1 {
        return vec![b[0] / guard(m.diag()[0] - shift)];
    }

    // Band storage with a second superdiagonal for pivoting fill-in.
    let mut d: Vec<f64> = m.diag().iter().map(|v| v - shift).collect();
    let mut du: Vec<f64> = m.offdiag().to_vec();
    let dl: Vec<f64> = m.offdiag().to_vec();
    let mut du2 = vec![0.0; dim - 1];
    let mut rhs = b.to_vec();

    for i in 0..dim - 1 {
        if d[i].abs() >= dl[i].abs() {
            let pivot = guard(d[i]);
            d[i] = pivot;
            let factor = dl[i] / pivot;
            d[i + 1] -= factor * du[i];
            rhs[i + 1] -= factor * rhs[i];
        } else {
            // Swap rows i and i+1, then eliminate.
            let factor = d[i] / dl[i];
            d[i] = dl[i];
            let upper = du[i];
            du[i] = d[i + 1];
            d[i + 1] = upper - factor * du[i];
            if i + 2 < dim {
                du2[i] = du[i + 1];
                du[i + 1] = -factor * du2[i];
            }
            let top = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = top - factor * rhs[i];
        }
    }

    let mut y = vec![0.0; dim];
    for i in (0..dim).rev() {
        let mut acc = rhs[i];
        if i + 1 < dim {
            acc -= du[i] * y[i + 1];
        }
        if i + 2 < dim {
            acc -= du2[i] * y[i + 2];
        }
        y[i] = acc / guard(d[i]);
    }
    y
}
