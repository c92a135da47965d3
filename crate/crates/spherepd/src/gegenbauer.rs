//! Gegenbauer (ultraspherical) polynomials C_n^lambda and the normalized
//! ratios C_n^lambda(x) / C_n^lambda(1) used throughout the sequence
//! machinery.
//!
//! The raw value C_n^lambda(1) = Gamma(n + 2 lambda) / (n! Gamma(2 lambda))
//! overflows the double range near n + 2 lambda ~ 170, so normalized ratios
//! are carried directly through the three-term recurrence instead of being
//! formed as a quotient. lambda = 0 is an explicit Chebyshev-cosine branch,
//! C_n^0(cos theta) = cos(n theta), not a limit.

use crate::error::{Error, Result};
use crate::special::lgamma;

/// Evaluation point for a Gegenbauer basis element: lambda = (d-1)/2,
/// degree n, and x = cos(theta) in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPoint {
    pub lambda: f64,
    pub degree: usize,
    pub x: f64,
}

impl BasisPoint {
    pub fn new(lambda: f64, degree: usize, x: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x must lie in [-1, 1], got {x}")));
        }
        Ok(Self { lambda, degree, x })
    }
}

/// C_n^lambda(x) by forward recurrence (lambda > 0), cos(n arccos x) for
/// lambda = 0. Overflows for large n when lambda > 0; use
/// [`normalized_gegenbauer`] whenever a bounded quantity is wanted.
pub fn gegenbauer_value(p: BasisPoint) -> f64 {
    let BasisPoint {
        lambda,
        degree: n,
        x,
    } = p;
    if lambda == 0.0 {
        return (n as f64 * x.acos()).cos();
    }
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * x;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * (kf + lambda - 1.0) * x * cur - (kf + 2.0 * lambda - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// C_n^lambda(1) = Gamma(n + 2 lambda) / (n! Gamma(2 lambda)); 1 when
/// lambda = 0 or n = 0. Computed in log-gamma space.
pub fn gegenbauer_at_one(lambda: f64, n: usize) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 || n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    Ok((lgamma(nf + 2.0 * lambda) - lgamma(nf + 1.0) - lgamma(2.0 * lambda)).exp())
}

/// All ratios R_k = C_k^lambda(x) / C_k^lambda(1) for k = 0..=n_max.
///
/// The normalized recurrence
///   R_k = (2 (k + lambda - 1) x R_{k-1} - (k - 1) R_{k-2}) / (k - 1 + 2 lambda)
/// keeps every iterate in [-1, 1], so it is stable to n ~ 10^4 and beyond.
pub fn normalized_all(lambda: f64, x: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    if lambda == 0.0 {
        let theta = x.acos();
        for k in 0..=n_max {
            out.push((k as f64 * theta).cos());
        }
        return out;
    }
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(x);
    for k in 2..=n_max {
        let kf = k as f64;
        let r = (2.0 * (kf + lambda - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2])
            / (kf - 1.0 + 2.0 * lambda);
        out.push(r);
    }
    out
}

/// C_n^lambda(x) / C_n^lambda(1); lies in [-1, 1], equals 1 at x = 1.
///
/// ```
/// use spherepd::gegenbauer::{normalized_gegenbauer, BasisPoint};
///
/// // degree 1 is cos(theta) in every dimension
/// let p = BasisPoint::new(1.5, 1, 0.25)?;
/// assert!((normalized_gegenbauer(p) - 0.25).abs() < 1e-15);
/// # Ok::<(), spherepd::Error>(())
/// ```
pub fn normalized_gegenbauer(p: BasisPoint) -> f64 {
    let vals = normalized_all(p.lambda, p.x, p.degree);
    vals[p.degree]
}

/// d/d theta [C_n^lambda(cos theta)] = -sin(theta) 2 lambda C_{n-1}^{lambda+1}(cos theta).
pub fn gegenbauer_theta_derivative(lambda: f64, n: usize, theta: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
    }
    if n == 0 {
        return Err(Error::Domain("degree must be >= 1".into()));
    }
    let x = theta.cos();
    Ok(-theta.sin()
        * 2.0
        * lambda
        * gegenbauer_value(BasisPoint {
            lambda: lambda + 1.0,
            degree: n - 1,
            x,
        }))
}

/// d/d theta of the normalized ratio R_n^lambda(cos theta).
///
/// For lambda > 0 this is -sin(theta) n (n + 2 lambda) / (2 lambda + 1)
/// times R_{n-1}^{lambda+1}(cos theta); for lambda = 0 it is -n sin(n theta).
pub fn normalized_theta_derivative(lambda: f64, n: usize, theta: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    if lambda == 0.0 {
        return -nf * (nf * theta).sin();
    }
    let x = theta.cos();
    let ratio = normalized_all(lambda + 1.0, x, n - 1)[n - 1];
    -theta.sin() * nf * (nf + 2.0 * lambda) / (2.0 * lambda + 1.0) * ratio
}

/// Derivatives of all ratios R_0..R_{n_max} at theta, one recurrence pass.
pub fn normalized_theta_derivative_all(lambda: f64, theta: f64, n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    if lambda == 0.0 {
        for k in 0..=n_max {
            let kf = k as f64;
            out.push(-kf * (kf * theta).sin());
        }
        return out;
    }
    let shifted = if n_max >= 1 {
        normalized_all(lambda + 1.0, theta.cos(), n_max - 1)
    } else {
        Vec::new()
    };
    out.push(0.0);
    let s = theta.sin();
    for k in 1..=n_max {
        let kf = k as f64;
        out.push(-s * kf * (kf + 2.0 * lambda) / (2.0 * lambda + 1.0) * shifted[k - 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_is_linear() {
        // C_1^1(0.25) = 2 * 0.25, matching (d-1) cos(theta) at d = 3
        let v = gegenbauer_value(BasisPoint::new(1.0, 1, 0.25).unwrap());
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_zero_is_one() {
        for &lambda in &[0.0, 0.5, 1.0, 3.7] {
            for &x in &[-1.0, -0.3, 0.0, 0.9, 1.0] {
                let v = gegenbauer_value(BasisPoint::new(lambda, 0, x).unwrap());
                assert_eq!(v, 1.0);
            }
        }
    }

    #[test]
    fn c2_lambda1_root() {
        // C_2^1(x) = 4x^2 - 1 vanishes at x = 1/2
        let v = gegenbauer_value(BasisPoint::new(1.0, 2, 0.5).unwrap());
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn at_one_values() {
        // Gamma(4)/(2! Gamma(2)) = 3
        assert!((gegenbauer_at_one(1.0, 2).unwrap() - 3.0).abs() < 1e-12);
        // Legendre P_n(1) = 1
        assert!((gegenbauer_at_one(0.5, 5).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(gegenbauer_at_one(2.5, 0).unwrap(), 1.0);
    }

    #[test]
    fn normalized_degree_one_is_cos_theta() {
        for d in 2..=9usize {
            let lambda = (d as f64 - 1.0) / 2.0;
            for &theta in &[0.1_f64, 0.9, 2.2, 3.0] {
                let r = normalized_gegenbauer(BasisPoint::new(lambda, 1, theta.cos()).unwrap());
                assert!((r - theta.cos()).abs() < 1e-14, "d={d} theta={theta}");
            }
        }
    }

    #[test]
    fn normalized_is_one_at_x_one() {
        for &lambda in &[0.0, 0.5, 1.0, 4.5] {
            for n in [0usize, 1, 7, 40] {
                let r = normalized_gegenbauer(BasisPoint::new(lambda, n, 1.0).unwrap());
                assert!((r - 1.0).abs() < 1e-12, "lambda={lambda} n={n}: {r}");
            }
        }
    }

    #[test]
    fn lambda_zero_chebyshev_branch() {
        let theta = std::f64::consts::PI / 6.0;
        let r = normalized_gegenbauer(BasisPoint::new(0.0, 3, theta.cos()).unwrap());
        assert!(r.abs() < 1e-14); // cos(pi/2) = 0
    }

    #[test]
    fn normalized_stays_bounded_high_degree() {
        for &lambda in &[0.5, 1.0, 2.5, 5.0, 10.0] {
            for i in 0..1000 {
                let x = -1.0 + 2.0 * (i as f64) / 999.0;
                let vals = normalized_all(lambda, x, 200);
                for (n, v) in vals.iter().enumerate() {
                    assert!(
                        v.abs() <= 1.0 + 1e-12,
                        "|R_{n}^{lambda}({x})| = {v} exceeds 1"
                    );
                }
            }
        }
    }

    #[test]
    fn theta_derivative_examples() {
        // d/dtheta C_1^1(cos theta) = -2 sin theta -> -2 at pi/2
        let v = gegenbauer_theta_derivative(1.0, 1, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((v + 2.0).abs() < 1e-14);
        // sin(0) factor kills every derivative at theta = 0
        let v = gegenbauer_theta_derivative(3.3, 1, 0.0).unwrap();
        assert_eq!(v, 0.0);
        // P_2(cos theta)' = -3 sin theta cos theta
        let theta = 0.73;
        let v = gegenbauer_theta_derivative(0.5, 2, theta).unwrap();
        assert!((v + 3.0 * theta.sin() * theta.cos()).abs() < 1e-13);
    }

    #[test]
    fn theta_derivative_matches_finite_differences() {
        let h = 1e-5;
        for &lambda in &[0.5, 1.0, 2.0] {
            for n in [1usize, 3, 10, 25, 50] {
                for &theta in &[0.4, 1.2, 2.0, 2.9] {
                    let f = |t: f64| {
                        gegenbauer_value(BasisPoint {
                            lambda,
                            degree: n,
                            x: t.cos(),
                        })
                    };
                    let fd = (f(theta + h) - f(theta - h)) / (2.0 * h);
                    let an = gegenbauer_theta_derivative(lambda, n, theta).unwrap();
                    let scale = 1.0 + an.abs();
                    assert!(
                        (fd - an).abs() / scale < 1e-6,
                        "lambda={lambda} n={n} theta={theta}: fd={fd} analytic={an}"
                    );
                }
            }
        }
    }

    #[test]
    fn normalized_derivative_consistent() {
        let h = 1e-6;
        for &(lambda, d_is_one) in &[(0.0, true), (0.5, false), (1.5, false)] {
            for n in [1usize, 2, 8, 20] {
                for &theta in &[0.5, 1.5, 2.5] {
                    let f = |t: f64| {
                        if d_is_one {
                            (n as f64 * t).cos()
                        } else {
                            normalized_all(lambda, t.cos(), n)[n]
                        }
                    };
                    let fd = (f(theta + h) - f(theta - h)) / (2.0 * h);
                    let an = normalized_theta_derivative(lambda, n, theta);
                    assert!(
                        (fd - an).abs() < 1e-5 * (1.0 + an.abs()),
                        "lambda={lambda} n={n} theta={theta}: {fd} vs {an}"
                    );
                }
            }
        }
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(BasisPoint::new(-0.5, 1, 0.0).is_err());
        assert!(BasisPoint::new(1.0, 1, 1.5).is_err());
        assert!(BasisPoint::new(f64::NAN, 1, 0.0).is_err());
        assert!(gegenbauer_theta_derivative(0.0, 1, 0.5).is_err());
    }
}
