//! Fixed-order Gauss-Legendre quadrature.
//!
//! Nodes and weights are found by Newton iteration on the Legendre
//! recurrence and cached per order. Summation is fixed-order and
//! compensated, so results are deterministic.

use crate::special::KahanSum;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Node-weight pairs on the reference interval [-1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pairs: Vec<(f64, f64)>,
}

impl GaussLegendre {
    /// P_n(x) and its derivative by the three-term recurrence.
    fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
        let mut p0 = 1.0;
        let mut p1 = x;
        if n == 0 {
            return (1.0, 0.0);
        }
        for k in 1..n {
            let kf = k as f64;
            let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, dp)
    }

    fn build(n: usize) -> Self {
        assert!(n >= 2);
        let mut pairs = Vec::with_capacity(n);
        let m = n.div_ceil(2);
        for k in 0..m {
            // Chebyshev-like initial guess for the k-th positive-side root
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = Self::legendre_and_deriv(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = Self::legendre_and_deriv(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            pairs.push((x, w));
            if x.abs() > 1e-12 || 2 * m != n + 1 {
                pairs.push((-x, w));
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Self { pairs }
    }

    /// The cached rule of order `n`.
    pub fn rule(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<BTreeMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
        let mut guard = cache.lock().unwrap();
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Self::build(n)))
            .clone()
    }

    /// Visit every (node, weight) pair on the reference interval in order.
    pub fn for_each_node<F: FnMut(f64, f64)>(&self, mut f: F) {
        for &(x, w) in &self.pairs {
            f(x, w);
        }
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = KahanSum::new();
        for &(x, w) in &self.pairs {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }
}

/// Integrate over [a, b] with an `n`-node cached rule.
pub fn integrate<F: Fn(f64) -> f64>(n: usize, a: f64, b: f64, f: F) -> f64 {
    GaussLegendre::rule(n).integrate(a, b, f)
}

/// Integrate splitting the interval at interior breakpoints (supports kinks
/// at compact-support boundaries).
pub fn integrate_split<F: Fn(f64) -> f64>(n: usize, a: f64, b: f64, breaks: &[f64], f: F) -> f64 {
    let rule = GaussLegendre::rule(n);
    let mut points: Vec<f64> = vec![a];
    for &c in breaks {
        if c > a && c < b {
            points.push(c);
        }
    }
    points.push(b);
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = KahanSum::new();
    for pair in points.windows(2) {
        total.add(rule.integrate(pair[0], pair[1], &f));
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_3_reference_values() {
        let rule = GaussLegendre::rule(3);
        let nodes: Vec<f64> = rule.pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = rule.pairs.iter().map(|p| p.1).collect();
        let x_ref = [-0.7745966692414834, 0.0, 0.7745966692414834];
        let w_ref = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        for i in 0..3 {
            assert!((nodes[i] - x_ref[i]).abs() < 1e-14);
            assert!((weights[i] - w_ref[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // order n integrates degree 2n-1 exactly
        let val = integrate(8, 0.0, 1.0, |x| x.powi(15));
        assert!((val - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_sine_over_0_pi() {
        let val = integrate(64, 0.0, std::f64::consts::PI, f64::sin);
        assert!((val - 2.0).abs() < 1e-13);
    }

    #[test]
    fn split_handles_kink() {
        // |x - 1/2| on [0,1]: exact integral 1/4
        let val = integrate_split(16, 0.0, 1.0, &[0.5], |x| (x - 0.5).abs());
        assert!((val - 0.25).abs() < 1e-14);
    }

    #[test]
    fn large_rule_builds() {
        let rule = GaussLegendre::rule(512);
        assert_eq!(rule.pairs.len(), 512);
        let s: f64 = rule.pairs.iter().map(|p| p.1).sum();
        assert!((s - 2.0).abs() < 1e-12);
    }
}
