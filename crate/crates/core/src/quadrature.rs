//! Gauss-Legendre rule on [-1, 1].

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss-Legendre rule.
///
/// Newton iteration on the Legendre recurrence; exact for polynomials of
/// degree 2n - 1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, dpn) = legendre_with_derivative(n, x);
            dp = dpn;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, dp) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [2, 8, 32, 64] {
            let (_, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n}: {total}");
        }
    }

    #[test]
    fn integrates_low_degree_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let quad = |f: &dyn Fn(f64) -> f64| -> f64 {
            x.iter().zip(&w).map(|(xi, wi)| wi * f(*xi)).sum()
        };
        assert!((quad(&|t| t * t) - 2.0 / 3.0).abs() < 1e-14);
        assert!(quad(&|t| t * t * t).abs() < 1e-14);
        assert!((quad(&|t| t.powi(4)) - 0.4).abs() < 1e-14);
    }
}
