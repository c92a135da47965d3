//! Isotropic functions psi: [0, pi] -> R and radial functions phi: [0, inf) -> R,
//! together with the parametric families used in the examples: the
//! Multiquadric family, the C2/C4 Wendland functions, the Gaspari-Cohn
//! quintic and its descente companion, and the truncated linear (hat)
//! function.
//!
//! Values are immutable after construction; derived metadata (derivative
//! closures, second derivative at zero, support radius) is attached eagerly
//! by the family constructors. Differentiability "at zero" always refers to
//! the even continuation psi(|theta|).

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function psi on [0, pi] with optional analytic derivative, optional
/// second derivative at zero (of the even extension), optional compact
/// support radius, and a provenance label.
#[derive(Clone)]
pub struct IsotropicFunction {
    eval: EvalFn,
    deriv: Option<EvalFn>,
    second_derivative_at_zero: Option<f64>,
    support_radius: Option<f64>,
    label: String,
}

impl std::fmt::Debug for IsotropicFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IsotropicFunction")
            .field("label", &self.label)
            .field("support_radius", &self.support_radius)
            .field("second_derivative_at_zero", &self.second_derivative_at_zero)
            .field("has_derivative", &self.deriv.is_some())
            .finish()
    }
}

impl IsotropicFunction {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            deriv: None,
            second_derivative_at_zero: None,
            support_radius: None,
            label: label.into(),
        }
    }

    pub fn with_derivative<F>(mut self, deriv: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn with_derivative_arc(mut self, deriv: EvalFn) -> Self {
        self.deriv = Some(deriv);
        self
    }

    pub fn with_second_derivative_at_zero(mut self, value: f64) -> Self {
        self.second_derivative_at_zero = Some(value);
        self
    }

    pub fn with_support_radius(mut self, c: f64) -> Self {
        self.support_radius = Some(c);
        self
    }

    pub fn value(&self, theta: f64) -> f64 {
        (self.eval)(theta)
    }

    /// Value of the even continuation psi(|theta|) on [-pi, pi].
    pub fn value_even(&self, theta: f64) -> f64 {
        (self.eval)(theta.abs())
    }

    /// Analytic derivative, if the family supplies one.
    pub fn derivative(&self, theta: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(theta))
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn second_derivative_at_zero(&self) -> Option<f64> {
        self.second_derivative_at_zero
    }

    /// Second central difference of the even extension at zero.
    pub fn second_derivative_at_zero_fd(&self, h: f64) -> f64 {
        2.0 * (self.value(h) - self.value(0.0)) / (h * h)
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A radial function phi on [0, inf), normalized to phi(0) = 1.
#[derive(Clone)]
pub struct RadialFunction {
    eval: EvalFn,
    deriv: Option<EvalFn>,
    second_derivative_at_zero: Option<f64>,
    support_radius: Option<f64>,
    label: String,
}

impl std::fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialFunction")
            .field("label", &self.label)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

impl RadialFunction {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(eval),
            deriv: None,
            second_derivative_at_zero: None,
            support_radius: None,
            label: label.into(),
        }
    }

    pub fn with_derivative<F>(mut self, deriv: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn with_second_derivative_at_zero(mut self, value: f64) -> Self {
        self.second_derivative_at_zero = Some(value);
        self
    }

    pub fn with_support_radius(mut self, c: f64) -> Self {
        self.support_radius = Some(c);
        self
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        self.deriv.as_ref().map(|d| d(t))
    }

    pub fn second_derivative_at_zero(&self) -> Option<f64> {
        self.second_derivative_at_zero
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// (1 - s)_+^tau evaluated as exp(tau log1p(-s)) for s < 1 to keep precision
/// near the support boundary; exact zero at and beyond it.
fn truncated_power(s: f64, tau: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (tau * (-s).ln_1p()).exp()
    }
}

/// Multiquadric psi_{tau,delta}(theta) = (1-delta)^{2 tau} / (1 + delta^2 - 2 delta cos theta)^tau,
/// a member of the class for all dimensions when tau > 0, delta in (0, 1).
pub fn multiquadric(tau: f64, delta: f64) -> Result<IsotropicFunction> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!(
            "multiquadric requires tau > 0, got {tau}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "multiquadric requires delta in (0, 1), got {delta}"
        )));
    }
    // 1 + delta^2 - 2 delta cos(theta) rewritten as (1-delta)^2 + 4 delta
    // sin^2(theta/2): no cancellation near zero, and psi(0) = 1 bit-exactly
    let scale = (1.0 - delta) * (1.0 - delta);
    let denom = move |theta: f64| {
        let s = (theta / 2.0).sin();
        scale + 4.0 * delta * s * s
    };
    let eval = move |theta: f64| (scale / denom(theta)).powf(tau);
    let deriv = move |theta: f64| {
        let d = denom(theta);
        -2.0 * delta * tau * theta.sin() * (scale / d).powf(tau) / d
    };
    Ok(
        IsotropicFunction::new(format!("multiquadric(tau={tau}, delta={delta})"), eval)
            .with_derivative(deriv)
            .with_second_derivative_at_zero(-2.0 * delta * tau / ((1.0 - delta) * (1.0 - delta))),
    )
}

/// Wendland smoothness variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WendlandKind {
    C2,
    C4,
}

/// The C2- or C4-Wendland function with cutoff c; in the d = 3 class for
/// c in (0, pi) once tau >= 4 (C2) or tau >= 6 (C4).
pub fn wendland(kind: WendlandKind, tau: f64, c: f64) -> Result<IsotropicFunction> {
    if !(c > 0.0 && c < PI) {
        return Err(Error::Domain(format!(
            "wendland requires c in (0, pi), got {c}"
        )));
    }
    let min_tau = match kind {
        WendlandKind::C2 => 4.0,
        WendlandKind::C4 => 6.0,
    };
    if !(tau >= min_tau) {
        return Err(Error::Domain(format!(
            "wendland {kind:?} requires tau >= {min_tau}, got {tau}"
        )));
    }
    match kind {
        WendlandKind::C2 => {
            let eval = move |theta: f64| {
                let s = theta / c;
                (1.0 + tau * s) * truncated_power(s, tau)
            };
            let deriv = move |theta: f64| {
                let s = theta / c;
                -tau * (1.0 + tau) * s * truncated_power(s, tau - 1.0) / c
            };
            Ok(
                IsotropicFunction::new(format!("wendland-c2(tau={tau}, c={c})"), eval)
                    .with_derivative(deriv)
                    .with_second_derivative_at_zero(-tau * (1.0 + tau) / (c * c))
                    .with_support_radius(c),
            )
        }
        WendlandKind::C4 => {
            let a = (tau * tau - 1.0) / 3.0;
            let eval = move |theta: f64| {
                let s = theta / c;
                (1.0 + tau * s + a * s * s) * truncated_power(s, tau)
            };
            let deriv = move |theta: f64| {
                let s = theta / c;
                -(tau + 1.0) * (tau + 2.0) / 3.0
                    * s
                    * (1.0 + (tau - 1.0) * s)
                    * truncated_power(s, tau - 1.0)
                    / c
            };
            Ok(
                IsotropicFunction::new(format!("wendland-c4(tau={tau}, c={c})"), eval)
                    .with_derivative(deriv)
                    .with_second_derivative_at_zero(-(tau + 1.0) * (tau + 2.0) / (3.0 * c * c))
                    .with_support_radius(c),
            )
        }
    }
}

fn gaspari_cohn_unit(t: f64) -> f64 {
    if t < 0.5 {
        1.0 + t * t * (-20.0 / 3.0 + t * (5.0 + t * (8.0 - 8.0 * t)))
    } else if t < 1.0 {
        (8.0 * t * t + 8.0 * t - 1.0) * (1.0 - t).powi(4) / (3.0 * t)
    } else {
        0.0
    }
}

fn gaspari_cohn_unit_deriv(t: f64) -> f64 {
    if t < 0.5 {
        t * (-40.0 / 3.0 + t * (15.0 + t * (32.0 - 40.0 * t)))
    } else if t < 1.0 {
        (1.0 - t).powi(3) * (1.0 + 3.0 * t - 24.0 * t * t - 40.0 * t * t * t) / (3.0 * t * t)
    } else {
        0.0
    }
}

/// Gaspari-Cohn compactly supported quintic phi_c(t) = phi_GC(t / c), a
/// radial positive definite function on R^3 with phi_c''(0) = -40/(3 c^2).
pub fn gaspari_cohn(c: f64) -> Result<RadialFunction> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!(
            "gaspari_cohn requires c > 0, got {c}"
        )));
    }
    let eval = move |t: f64| gaspari_cohn_unit(t / c);
    let deriv = move |t: f64| gaspari_cohn_unit_deriv(t / c) / c;
    Ok(RadialFunction::new(format!("gaspari-cohn(c={c})"), eval)
        .with_derivative(deriv)
        .with_second_derivative_at_zero(-40.0 / (3.0 * c * c))
        .with_support_radius(c))
}

/// The descente companion of the Gaspari-Cohn function (the tilde-phi that
/// appears when the descente is applied to its spherical restrictions).
/// Supported on [0, 1]; its even extension is not twice differentiable at
/// zero, so no second derivative is attached.
pub fn gc_descente() -> RadialFunction {
    let eval = |t: f64| {
        if t < 0.5 {
            1.0 + t * (-9.0 / 8.0 + t * (-12.0 / 5.0 + 3.0 * t))
        } else if t < 1.0 {
            (-1.0 - 3.0 * t + 24.0 * t * t + 40.0 * t * t * t) * (1.0 / t - 1.0).powi(3) / 40.0
        } else {
            0.0
        }
    };
    let deriv = |t: f64| {
        if t < 0.5 {
            -9.0 / 8.0 + t * (-24.0 / 5.0 + 9.0 * t)
        } else if t < 1.0 {
            let u = -1.0 - 3.0 * t + 24.0 * t * t + 40.0 * t * t * t;
            let du = -3.0 + 48.0 * t + 120.0 * t * t;
            let v = (1.0 / t - 1.0).powi(3);
            let dv = -3.0 * (1.0 - t) * (1.0 - t) / t.powi(4);
            (du * v + u * dv) / 40.0
        } else {
            0.0
        }
    };
    RadialFunction::new("gc-descente", eval)
        .with_derivative(deriv)
        .with_support_radius(1.0)
}

/// Yadrenko lift psi(theta) = phi(2 sin(theta/2)), carrying a radial
/// positive definite function on R^3 into the d = 2 class. Preserves the
/// second derivative at zero.
pub fn yadrenko_lift(phi: &RadialFunction) -> IsotropicFunction {
    let phi_eval = phi.clone();
    let eval = move |theta: f64| phi_eval.value(2.0 * (theta / 2.0).sin());
    let mut out = IsotropicFunction::new(format!("yadrenko({})", phi.label()), eval);
    if phi.deriv.is_some() {
        let phi_d = phi.clone();
        out = out.with_derivative(move |theta: f64| {
            let t = 2.0 * (theta / 2.0).sin();
            phi_d.derivative(t).unwrap_or(f64::NAN) * (theta / 2.0).cos()
        });
    }
    if let Some(v) = phi.second_derivative_at_zero() {
        out = out.with_second_derivative_at_zero(v);
    }
    if let Some(r) = phi.support_radius() {
        if r <= 2.0 {
            out = out.with_support_radius(2.0 * (r / 2.0).asin());
        }
    }
    out
}

/// Restriction phi|_{[0, pi]}, valid when the support does not exceed pi;
/// the result then lies in the d = 3 class when phi is radial positive
/// definite on R^3.
pub fn restrict_to_sphere(phi: &RadialFunction) -> Result<IsotropicFunction> {
    match phi.support_radius() {
        Some(r) if r <= PI + 1e-12 => {}
        other => {
            return Err(Error::Domain(format!(
                "restrict_to_sphere requires support radius <= pi, got {other:?}"
            )))
        }
    }
    let phi_eval = phi.clone();
    let eval = move |theta: f64| phi_eval.value(theta);
    let mut out = IsotropicFunction::new(format!("restricted({})", phi.label()), eval)
        .with_support_radius(phi.support_radius().unwrap().min(PI));
    if phi.deriv.is_some() {
        let phi_d = phi.clone();
        out = out.with_derivative(move |theta: f64| phi_d.derivative(theta).unwrap_or(f64::NAN));
    }
    if let Some(v) = phi.second_derivative_at_zero() {
        out = out.with_second_derivative_at_zero(v);
    }
    Ok(out)
}

/// The hat function (1 - theta/c)_+ for c in (0, pi); a member of the
/// d = 1 class whose first derivative does not exist at theta = c.
pub fn truncated_linear(c: f64) -> Result<IsotropicFunction> {
    if !(c > 0.0 && c < PI) {
        return Err(Error::Domain(format!(
            "truncated_linear requires c in (0, pi), got {c}"
        )));
    }
    let eval = move |theta: f64| if theta >= c { 0.0 } else { 1.0 - theta / c };
    // undefined exactly at the kink
    let deriv = move |theta: f64| {
        if theta == c {
            f64::NAN
        } else if theta > c {
            0.0
        } else {
            -1.0 / c
        }
    };
    Ok(
        IsotropicFunction::new(format!("truncated-linear(c={c})"), eval)
            .with_derivative(deriv)
            .with_support_radius(c),
    )
}

/// The constant member psi = 1.
pub fn constant_one() -> IsotropicFunction {
    IsotropicFunction::new("one", |_| 1.0)
        .with_derivative(|_| 0.0)
        .with_second_derivative_at_zero(0.0)
}

/// psi(theta) = (1 + cos theta)/2, the minimizing witness with
/// b_0 = b_1 = 1/2.
pub fn raised_cosine() -> IsotropicFunction {
    IsotropicFunction::new("raised-cosine", |theta: f64| 0.5 * (1.0 + theta.cos()))
        .with_derivative(|theta: f64| -0.5 * theta.sin())
        .with_second_derivative_at_zero(-0.5)
}

/// psi(theta) = cos theta.
pub fn cosine() -> IsotropicFunction {
    IsotropicFunction::new("cos", |theta: f64| theta.cos())
        .with_derivative(|theta: f64| -theta.sin())
        .with_second_derivative_at_zero(-1.0)
}

/// Central finite-difference derivative of the stated order at theta.
///
/// The stencils are O(h^2) accurate; orders 3 to 5 add one Richardson
/// extrapolation step. Step sizes balance truncation against roundoff per
/// order: 1e-5 (order 1), 1e-4 (order 2), 1e-3 (order 3), 2e-2 (orders 4-5,
/// where any smaller step lets rounding noise of ~eps/h^order dominate).
/// theta must be at least order * h away from both endpoints.
pub fn numeric_derivative(f: &IsotropicFunction, order: u32, theta: f64) -> Result<f64> {
    if order == 0 || order > 5 {
        return Err(Error::Domain(format!(
            "derivative order must be 1..=5, got {order}"
        )));
    }
    let h = match order {
        1 => (theta * 1e-7).max(1e-5),
        2 => (theta * 1e-7).max(1e-4),
        3 => 1e-3,
        _ => 2e-2,
    };
    let margin = order as f64 * h;
    if theta - margin < 0.0 || theta + margin > PI {
        return Err(Error::StepUnderflow(format!(
            "theta = {theta} is within {margin} of an endpoint for order {order}"
        )));
    }
    let stencil = |h: f64| -> f64 {
        let g = |t: f64| f.value(t);
        match order {
            1 => (g(theta + h) - g(theta - h)) / (2.0 * h),
            2 => (g(theta + h) - 2.0 * g(theta) + g(theta - h)) / (h * h),
            3 => {
                (g(theta + 2.0 * h) - 2.0 * g(theta + h) + 2.0 * g(theta - h) - g(theta - 2.0 * h))
                    / (2.0 * h * h * h)
            }
            4 => {
                (g(theta + 2.0 * h) - 4.0 * g(theta + h) + 6.0 * g(theta) - 4.0 * g(theta - h)
                    + g(theta - 2.0 * h))
                    / h.powi(4)
            }
            5 => {
                (g(theta + 3.0 * h) - 4.0 * g(theta + 2.0 * h) + 5.0 * g(theta + h)
                    - 5.0 * g(theta - h)
                    + 4.0 * g(theta - 2.0 * h)
                    - g(theta - 3.0 * h))
                    / (2.0 * h.powi(5))
            }
            _ => unreachable!(),
        }
    };
    if order <= 2 {
        Ok(stencil(h))
    } else {
        let coarse = stencil(h);
        let fine = stencil(h / 2.0);
        Ok((4.0 * fine - coarse) / 3.0)
    }
}

/// Natural cubic spline through monotone samples; used for curve input.
pub fn from_samples(thetas: &[f64], values: &[f64]) -> Result<IsotropicFunction> {
    if thetas.len() != values.len() {
        return Err(Error::Input("theta and value counts differ".into()));
    }
    let n = thetas.len();
    if n < 4 {
        return Err(Error::Input(format!("need at least 4 samples, got {n}")));
    }
    for w in thetas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Input(format!(
                "theta samples must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    if thetas[0].abs() > 1e-9 || (thetas[n - 1] - PI).abs() > 1e-9 {
        return Err(Error::Input("curve must cover [0, pi] exactly".into()));
    }

    // second derivatives from the natural-spline tridiagonal system
    let x: Vec<f64> = thetas.to_vec();
    let y: Vec<f64> = values.to_vec();
    let mut m = vec![0.0_f64; n];
    let mut diag = vec![0.0_f64; n];
    let mut rhs = vec![0.0_f64; n];
    let mut upper = vec![0.0_f64; n];
    diag[0] = 1.0;
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        upper[i] = h1;
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    diag[n - 1] = 1.0;
    // forward elimination (lower entry at row i is h0 = x[i] - x[i-1])
    for i in 1..n - 1 {
        let l = (x[i] - x[i - 1]) / diag[i - 1];
        diag[i] -= l * upper[i - 1];
        rhs[i] -= l * rhs[i - 1];
    }
    for i in (1..n - 1).rev() {
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    }

    let eval = move |theta: f64| -> f64 {
        let t = theta.clamp(x[0], x[n - 1]);
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = x[hi] - x[lo];
        let a = (x[hi] - t) / h;
        let b = (t - x[lo]) / h;
        a * y[lo] + b * y[hi] + ((a * a * a - a) * m[lo] + (b * b * b - b) * m[hi]) * h * h / 6.0
    };
    Ok(IsotropicFunction::new("custom-curve", eval))
}
