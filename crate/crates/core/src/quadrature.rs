//! Gauss rules and a simple adaptive integrator.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre_cache() -> &'static Mutex<HashMap<usize, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `n`-point Gauss-Legendre rule, computed by Newton iteration and cached.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    assert!(n > 0);
    if let Some(r) = legendre_cache().lock().unwrap().get(&n) {
        return r.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let rule = Arc::new(Rule { nodes, weights });
    legendre_cache().lock().unwrap().insert(n, rule.clone());
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| w * f(m + h * t))
        .sum::<f64>()
        * h
}

/// Chebyshev nodes `cos((2i+1)pi/2n)` on `[-1, 1]`, in increasing order.
pub fn chebyshev_nodes(n: usize) -> Vec<f64> {
    (0..n)
        .rev()
        .map(|i| (PI * (2 * i + 1) as f64 / (2 * n) as f64).cos())
        .collect()
}

/// `integral_a^b F(x) / sqrt((x-a)(b-x)) dx` by the `n`-point
/// Gauss-Chebyshev rule; `f` receives `(x, theta)` with `x = m - h cos theta`.
pub fn integrate_chebyshev<F: Fn(f64, f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let s: f64 = (0..n)
        .map(|i| {
            let th = PI * (2 * i + 1) as f64 / (2 * n) as f64;
            f(m - h * th.cos(), th)
        })
        .sum();
    s * PI / n as f64
}

/// Adaptive Gauss-Legendre (15 vs 30 points) with interval bisection.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, max_depth: usize) -> Result<f64> {
    let coarse = integrate_gl(f, a, b, 15);
    let fine = integrate_gl(f, a, b, 30);
    if !fine.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    if (fine - coarse).abs() <= abs_tol || (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
        return Ok(fine);
    }
    if max_depth == 0 {
        return Err(Error::Quadrature(format!(
            "adaptive rule did not converge on [{a}, {b}]: estimate {fine}, error {}",
            (fine - coarse).abs()
        )));
    }
    let m = 0.5 * (a + b);
    Ok(integrate_adaptive(f, a, m, 0.5 * abs_tol, max_depth - 1)?
        + integrate_adaptive(f, m, b, 0.5 * abs_tol, max_depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 64] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} weights sum {s}");
            let deg = 2 * n - 1;
            let v = integrate_gl(|x| x.powi(deg as i32 - 1), 0.0, 1.0, n);
            assert!((v - 1.0 / deg as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn chebyshev_rule() {
        // integral_{-1}^{1} x^2 / sqrt(1 - x^2) = pi / 2
        let v = integrate_chebyshev(|x, _| x * x, -1.0, 1.0, 8);
        assert!((v - PI / 2.0).abs() < 1e-14);
        let v = integrate_chebyshev(|_, _| 1.0, 2.0, 5.0, 3);
        assert!((v - PI).abs() < 1e-14);
    }

    #[test]
    fn adaptive_log_singularity() {
        let v = integrate_adaptive(&|x: f64| x.ln(), 0.0, 1.0, 1e-10, 60).unwrap();
        assert!((v + 1.0).abs() < 1e-9);
    }
}
