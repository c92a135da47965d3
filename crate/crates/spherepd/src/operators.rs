//! The montee and descente operators on spheres, at function level and at
//! Schoenberg-sequence level, their admissibility conditions, the turning
//! bands identity pair, the index-shift operator, and the construction that
//! witnesses optimality of the smoothness gain.

use crate::error::{Error, Result};
use crate::model::{numeric_derivative, IsotropicFunction};
use crate::quadrature;
use crate::schoenberg::{
    self, synthesize, synthesize_derivative, tail_diagnostic, Dimension, SchoenbergSequence,
};
use crate::special::{binomial, lgamma, KahanSum};
use crate::stencil::one_sided_derivative;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Quadrature order for the per-call integrals of the numeric operators.
const OP_NODES: usize = 256;

/// Admissibility tolerance for the montee condition c(d).
const C_D_TOL: f64 = 1e-10;

/// Minimal magnitude for operator normalizers.
const NORMALIZER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason")]
pub enum Admissibility {
    #[serde(rename = "admitted")]
    Admitted,
    #[serde(rename = "rejected")]
    Rejected(String),
}

/// Outcome of a montee/descente application: the result (as a function, a
/// sequence, or both), the operator normalizer, and named diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorReport {
    #[serde(skip)]
    pub result_function: Option<IsotropicFunction>,
    pub result_sequence: Option<SchoenbergSequence>,
    pub normalizer: f64,
    pub admissibility: Admissibility,
    pub diagnostics: BTreeMap<String, f64>,
}

impl OperatorReport {
    fn rejected(
        reason: impl Into<String>,
        normalizer: f64,
        diagnostics: BTreeMap<String, f64>,
    ) -> Self {
        Self {
            result_function: None,
            result_sequence: None,
            normalizer,
            admissibility: Admissibility::Rejected(reason.into()),
            diagnostics,
        }
    }

    pub fn is_admitted(&self) -> bool {
        matches!(self.admissibility, Admissibility::Admitted)
    }

    pub fn rejection_reason(&self) -> Option<&str> {
        match &self.admissibility {
            Admissibility::Rejected(r) => Some(r),
            Admissibility::Admitted => None,
        }
    }
}

/// int_0^pi sin(beta) psi(beta) d beta, split at the support boundary.
fn sine_weighted_mass(psi: &IsotropicFunction) -> f64 {
    let breaks: Vec<f64> = match psi.support_radius() {
        Some(c) if c > 0.0 && c < PI => vec![c],
        _ => vec![],
    };
    quadrature::integrate_split(OP_NODES, 0.0, PI, &breaks, |b| b.sin() * psi.value(b))
}

/// Montee on spheres: I_S psi(theta) = int_theta^pi sin(b) psi(b) db,
/// normalized by the full integral. Rejected when the normalizer vanishes.
pub fn montee_numeric(psi: &IsotropicFunction) -> Result<OperatorReport> {
    let total = sine_weighted_mass(psi);
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("normalizer".to_string(), total);
    if total.abs() <= NORMALIZER_TOL {
        return Ok(OperatorReport::rejected(
            "zero-normalizer",
            total,
            diagnostics,
        ));
    }

    let support = psi.support_radius().filter(|&c| c < PI);
    let psi_eval = psi.clone();
    let eval = move |theta: f64| -> f64 {
        if theta >= PI {
            return 0.0;
        }
        let upper = support.unwrap_or(PI);
        if theta >= upper {
            return 0.0;
        }
        quadrature::integrate(OP_NODES, theta, upper, |b| b.sin() * psi_eval.value(b)) / total
    };
    let psi_d = psi.clone();
    let deriv = move |theta: f64| -theta.sin() * psi_d.value(theta) / total;

    let mut result = IsotropicFunction::new(format!("montee({})", psi.label()), eval)
        .with_derivative(deriv)
        .with_second_derivative_at_zero(-psi.value(0.0) / total);
    if let Some(c) = psi.support_radius() {
        result = result.with_support_radius(c.min(PI));
    }
    Ok(OperatorReport {
        result_function: Some(result),
        result_sequence: None,
        normalizer: total,
        admissibility: Admissibility::Admitted,
        diagnostics,
    })
}

/// Descente on spheres: D_S psi(theta) = psi'(theta) / (sin(theta) psi''(0)),
/// extended continuously to 1 at theta = 0 and by a one-sided limit at pi.
/// Rejected when psi''(0) vanishes (psi = 1 in particular).
pub fn descente_numeric(psi: &IsotropicFunction) -> Result<OperatorReport> {
    let second = psi
        .second_derivative_at_zero()
        .unwrap_or_else(|| psi.second_derivative_at_zero_fd(1e-4));
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("second_derivative_at_zero".to_string(), second);
    if second.abs() < NORMALIZER_TOL {
        return Ok(OperatorReport::rejected(
            "flat-at-zero",
            second,
            diagnostics,
        ));
    }

    let psi_c = psi.clone();
    let analytic = psi.has_analytic_derivative();
    let eval = move |theta: f64| -> f64 {
        if theta <= 0.0 {
            return 1.0;
        }
        if let Some(c) = psi_c.support_radius() {
            if theta >= c {
                return 0.0;
            }
        }
        if analytic {
            // the sine factor in psi' cancels against the explicit sin(theta)
            // to machine precision, endpoints included
            return psi_c.derivative(theta).unwrap() / (theta.sin() * second);
        }
        let margin = 2e-5;
        if theta < margin {
            return 1.0;
        }
        if theta > PI - margin {
            // l'Hopital at pi: psi'(pi) = 0 for admissible inputs, so the
            // limit is -psi''(pi)/psi''(0) with a one-sided second difference
            let h = 1e-4;
            let second_at_pi = (2.0 * psi_c.value(PI) - 5.0 * psi_c.value(PI - h)
                + 4.0 * psi_c.value(PI - 2.0 * h)
                - psi_c.value(PI - 3.0 * h))
                / (h * h);
            return -second_at_pi / second;
        }
        let d1 = numeric_derivative(&psi_c, 1, theta).unwrap_or(f64::NAN);
        d1 / (theta.sin() * second)
    };

    let mut result = IsotropicFunction::new(format!("descente({})", psi.label()), eval);
    if let Some(c) = psi.support_radius() {
        result = result.with_support_radius(c);
    }
    Ok(OperatorReport {
        result_function: Some(result),
        result_sequence: None,
        normalizer: second,
        admissibility: Admissibility::Admitted,
        diagnostics,
    })
}

/// c(d) = sum b_n (-1)^n (d-2) / ((n+1)(n+d-2)) for finite d >= 3.
fn montee_c_finite(b: &[f64], d: u32) -> f64 {
    let df = d as f64;
    let mut acc = KahanSum::new();
    for (n, &bn) in b.iter().enumerate() {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(bn * sign * (df - 2.0) / ((nf + 1.0) * (nf + df - 2.0)));
    }
    acc.value()
}

/// sum b_n (-1)^n / (n+1), the admission series for the intersection class.
fn montee_c_infinite(b: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for (n, &bn) in b.iter().enumerate() {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(bn * sign / (n as f64 + 1.0));
    }
    acc.value()
}

/// Sequence-level montee: maps a d-sequence (d >= 3) to a (d-2)-sequence, an
/// infinity-sequence to an infinity-sequence. Admitted iff c(d) (or its
/// infinity analogue) is nonnegative within tolerance.
pub fn montee_sequence(seq: &SchoenbergSequence) -> Result<OperatorReport> {
    let b = seq.coefficients();
    match seq.dimension() {
        Dimension::Finite(d) if d <= 2 => Err(Error::Dimension(format!(
            "sequence montee requires d >= 3 or infinity, got d = {d}"
        ))),
        Dimension::Finite(d) => {
            let df = d as f64;
            let c_d = montee_c_finite(b, d);
            let mut g1 = KahanSum::new();
            for (n, &bn) in b.iter().enumerate().step_by(2) {
                let nf = n as f64;
                g1.add(2.0 * (df - 2.0) * bn / ((nf + 1.0) * (nf + df - 2.0)));
            }
            let g1 = g1.value();
            let mut diagnostics = BTreeMap::new();
            diagnostics.insert("c(d)".to_string(), c_d);
            diagnostics.insert("G_1".to_string(), g1);
            if c_d < -C_D_TOL {
                return Ok(OperatorReport::rejected("negative-c", g1, diagnostics));
            }
            if g1.abs() <= NORMALIZER_TOL {
                return Ok(OperatorReport::rejected("zero-normalizer", g1, diagnostics));
            }
            let mut a = Vec::with_capacity(b.len() + 1);
            a.push(c_d.max(0.0) / g1);
            for (n, &bn_prev) in b.iter().enumerate() {
                let m = (n + 1) as f64;
                a.push((df - 2.0) * bn_prev / (m * (m + df - 3.0) * g1));
            }
            let result = SchoenbergSequence::new(Dimension::Finite(d - 2), a);
            Ok(OperatorReport {
                result_function: None,
                result_sequence: Some(result),
                normalizer: g1,
                admissibility: Admissibility::Admitted,
                diagnostics,
            })
        }
        Dimension::Infinite => {
            let cond = montee_c_infinite(b);
            let mut g1 = KahanSum::new();
            for (n, &bn) in b.iter().enumerate().step_by(2) {
                g1.add(2.0 * bn / (n as f64 + 1.0));
            }
            let g1 = g1.value();
            let mut diagnostics = BTreeMap::new();
            diagnostics.insert("c(inf)".to_string(), cond);
            diagnostics.insert("G_1".to_string(), g1);
            if cond < -C_D_TOL {
                return Ok(OperatorReport::rejected("negative-c", g1, diagnostics));
            }
            if g1.abs() <= NORMALIZER_TOL {
                return Ok(OperatorReport::rejected("zero-normalizer", g1, diagnostics));
            }
            let mut a = Vec::with_capacity(b.len() + 1);
            a.push(cond.max(0.0) / g1);
            for (n, &bn_prev) in b.iter().enumerate() {
                a.push(bn_prev / ((n + 1) as f64 * g1));
            }
            let result = SchoenbergSequence::new(Dimension::Infinite, a);
            Ok(OperatorReport {
                result_function: None,
                result_sequence: Some(result),
                normalizer: g1,
                admissibility: Admissibility::Admitted,
                diagnostics,
            })
        }
    }
}

/// Sequence-level descente: c_{n,d+2} = b_{n+1,d} (n+1)(n+d) / G_2 for
/// finite d, c_n = b_{n+1} (n+1) / G_2 for infinity. Rejected when the G_2
/// series has not stabilized at the truncation.
pub fn descente_sequence(seq: &SchoenbergSequence) -> Result<OperatorReport> {
    let b = seq.coefficients();
    if b.len() <= 1 || b.iter().skip(1).all(|&x| x == 0.0) {
        return Err(Error::Domain(
            "descente is undefined for the constant member (b_0-only sequence)".into(),
        ));
    }
    let terms: Vec<f64> = match seq.dimension() {
        Dimension::Finite(d) => {
            let df = d as f64;
            b.iter()
                .skip(1)
                .enumerate()
                .map(|(n, &bn1)| {
                    let nf = n as f64;
                    bn1 * (nf + 1.0) * (nf + df)
                })
                .collect()
        }
        Dimension::Infinite => b
            .iter()
            .skip(1)
            .enumerate()
            .map(|(n, &bn1)| bn1 * (n as f64 + 1.0))
            .collect(),
    };
    let (g2, convergent, increment) = tail_diagnostic(&terms, seq.tail_mass());
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("G_2".to_string(), g2);
    diagnostics.insert("last_decade_increment".to_string(), increment);
    if !convergent {
        return Ok(OperatorReport::rejected("divergent-G2", g2, diagnostics));
    }
    if g2.abs() <= NORMALIZER_TOL {
        return Ok(OperatorReport::rejected("zero-normalizer", g2, diagnostics));
    }
    let out_dim = match seq.dimension() {
        Dimension::Finite(d) => Dimension::Finite(d + 2),
        Dimension::Infinite => Dimension::Infinite,
    };
    let coeffs: Vec<f64> = terms.iter().map(|t| t / g2).collect();
    let result = SchoenbergSequence::new(out_dim, coeffs);
    Ok(OperatorReport {
        result_function: None,
        result_sequence: Some(result),
        normalizer: g2,
        admissibility: Admissibility::Admitted,
        diagnostics,
    })
}

/// Every computable form of the montee admissibility condition, so callers
/// can cross-validate: the coefficient series, the integral against f_d (or
/// the upper-half sine integral for the intersection class), and the
/// sufficient pointwise-nonnegativity flag.
#[derive(Debug, Clone, Serialize)]
pub struct MonteeCondition {
    pub series: Option<f64>,
    pub integral: Option<f64>,
    pub psi_nonnegative: Option<bool>,
    pub satisfied: bool,
}

/// Condition forms computed from a sequence (synthesizing for the integral).
pub fn montee_condition_sequence(seq: &SchoenbergSequence) -> Result<MonteeCondition> {
    let psi = seq.to_function();
    let series = match seq.dimension() {
        Dimension::Finite(d) if d >= 3 => montee_c_finite(seq.coefficients(), d),
        Dimension::Infinite => montee_c_infinite(seq.coefficients()),
        Dimension::Finite(d) => {
            return Err(Error::Dimension(format!(
                "montee condition requires d >= 3 or infinity, got {d}"
            )))
        }
    };
    let integral = match seq.dimension() {
        Dimension::Finite(d) => quadrature::integrate(OP_NODES, 0.0, PI, |t| {
            f_d(d, t)
                .map(|(fs, _)| fs * psi.value(t))
                .unwrap_or(f64::NAN)
        }),
        Dimension::Infinite => {
            quadrature::integrate(OP_NODES, PI / 2.0, PI, |t| t.sin() * psi.value(t))
        }
    };
    let nonneg = psi_nonnegative_on_grid(&psi);
    Ok(MonteeCondition {
        series: Some(series),
        integral: Some(integral),
        psi_nonnegative: Some(nonneg),
        satisfied: series >= -C_D_TOL,
    })
}

/// Condition forms computed from a function: the f_d integral (or the
/// upper-half sine integral), the series via analysis when d is finite, and
/// the nonnegativity flag.
pub fn montee_condition_function(
    psi: &IsotropicFunction,
    dim: Dimension,
) -> Result<MonteeCondition> {
    let nonneg = psi_nonnegative_on_grid(psi);
    match dim {
        Dimension::Finite(d) if d >= 3 => {
            let breaks: Vec<f64> = match psi.support_radius() {
                Some(c) if c > 0.0 && c < PI => vec![c],
                _ => vec![],
            };
            let integral = quadrature::integrate_split(OP_NODES, 0.0, PI, &breaks, |t| {
                f_d(d, t)
                    .map(|(fs, _)| fs * psi.value(t))
                    .unwrap_or(f64::NAN)
            });
            let series = schoenberg::analyze(psi, d, 128)
                .map(|seq| montee_c_finite(seq.coefficients(), d))
                .ok();
            Ok(MonteeCondition {
                series,
                integral: Some(integral),
                psi_nonnegative: Some(nonneg),
                satisfied: integral >= -C_D_TOL,
            })
        }
        Dimension::Infinite => {
            let integral =
                quadrature::integrate(OP_NODES, PI / 2.0, PI, |t| t.sin() * psi.value(t));
            Ok(MonteeCondition {
                series: None,
                integral: Some(integral),
                psi_nonnegative: Some(nonneg),
                satisfied: integral >= -C_D_TOL,
            })
        }
        Dimension::Finite(d) => Err(Error::Dimension(format!(
            "montee condition requires d >= 3 or infinity, got {d}"
        ))),
    }
}

fn psi_nonnegative_on_grid(psi: &IsotropicFunction) -> bool {
    (0..=512).all(|i| psi.value(PI * i as f64 / 512.0) >= -1e-12)
}

/// Gauss series for 2F1(a, b; c; z), |z| < 1, Kahan-compensated.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z.abs() >= 1.0 {
        return Err(Error::Convergence(format!(
            "2F1 Gauss series requires |z| < 1, got {z}"
        )));
    }
    let mut acc = KahanSum::new();
    let mut term = 1.0_f64;
    acc.add(term);
    for k in 0..100_000u32 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (1.0 + kf)) * z;
        acc.add(term);
        if term.abs() <= 1e-18 * acc.value().abs().max(1e-30) {
            return Ok(acc.value());
        }
    }
    Err(Error::Convergence(format!(
        "2F1({a}, {b}; {c}; {z}) did not converge within 1e5 terms"
    )))
}

/// The montee-condition density f_d, returned in both of its forms: the
/// finite trigonometric sum and the hypergeometric expression.
///
/// The hypergeometric branch evaluates the indicator-plus-2F1 expression
/// directly for sin^2(theta) <= 3/4; closer to theta = pi/2 that series is
/// impractically slow, so the z -> 1 - z linear transformation is applied
/// first, turning the expression into
///   sin(theta)/2 - (d-2) K_d cos(theta) sin(theta)^{d-1}
///                  2F1(1, (d-1)/2; 3/2; cos^2(theta)),
/// smooth across pi/2 and convergent in a few dozen terms.
pub fn f_d(d: u32, theta: f64) -> Result<(f64, f64)> {
    if d < 3 {
        return Err(Error::Dimension(format!("f_d requires d >= 3, got {d}")));
    }
    let df = d as f64;
    let (s, x) = (theta.sin(), theta.cos());

    let finite_sum = if d % 2 == 1 {
        let mut sum = KahanSum::new();
        for l in 1..=(d - 3) / 2 {
            let lf = l as f64;
            // Gamma(l)^2 2^{2l-2} / (pi Gamma(2l))
            let coeff =
                (2.0 * lgamma(lf) - lgamma(2.0 * lf)).exp() * (2.0_f64).powi(2 * l as i32 - 2) / PI;
            sum.add(s.powi(2 * l as i32) * coeff);
        }
        theta * s / PI - x * sum.value()
    } else {
        let mut sum = KahanSum::new();
        for l in 1..=d / 2 - 1 {
            let lf = l as f64;
            // Gamma((2l-1)/2)^2 2^{2l-3} / (pi Gamma(2l-1))
            let coeff = (2.0 * lgamma(lf - 0.5) - lgamma(2.0 * lf - 1.0)).exp()
                * (2.0_f64).powi(2 * l as i32 - 3)
                / PI;
            sum.add(s.powi(2 * l as i32 - 1) * coeff);
        }
        0.5 * s - x * sum.value()
    };

    let k_d = (2.0_f64).powi(d as i32 - 3)
        * (2.0 * lgamma((df - 1.0) / 2.0) - lgamma(df - 1.0)).exp()
        / PI;
    let z = s * s;
    let hyper = if z <= 0.75 {
        let f = hyp2f1_series(1.0, (df - 1.0) / 2.0, df / 2.0, z)?;
        let indicator = if theta > PI / 2.0 { s } else { 0.0 };
        indicator + k_d * x * s.powi(d as i32 - 1) * f
    } else {
        let f = hyp2f1_series(1.0, (df - 1.0) / 2.0, 1.5, x * x)?;
        0.5 * s - (df - 2.0) * k_d * x * s.powi(d as i32 - 1) * f
    };
    Ok((finite_sum, hyper))
}

/// Derivative of order j of the montee, via the binomial sine/cosine
/// expansion in derivatives of psi; j = 1 reduces to
/// -sin(theta) psi(theta) / int_0^pi sin(b) psi(b) db.
pub fn montee_derivative(psi: &IsotropicFunction, j: u32, theta: f64) -> Result<f64> {
    if j == 0 {
        return Err(Error::Domain("derivative order must be >= 1".into()));
    }
    let total = sine_weighted_mass(psi);
    if total.abs() <= NORMALIZER_TOL {
        return Err(Error::DerivativeUnavailable(
            "zero montee normalizer".into(),
        ));
    }
    // psi^(m)(theta) for m = 0..j-1
    let mut derivs = Vec::with_capacity(j as usize);
    for m in 0..j {
        let v = if m == 0 {
            psi.value(theta)
        } else if m == 1 {
            match psi.derivative(theta) {
                Some(v) if v.is_finite() => v,
                _ => numeric_derivative(psi, 1, theta)?,
            }
        } else {
            numeric_derivative(psi, m, theta)?
        };
        derivs.push(v);
    }
    let mut sin_part = KahanSum::new();
    let mut cos_part = KahanSum::new();
    for l in 0..j {
        let weight = binomial(j - 1, l) * if (l / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let v = weight * derivs[(j - 1 - l) as usize];
        if l % 2 == 0 {
            sin_part.add(v);
        } else {
            cos_part.add(v);
        }
    }
    Ok(-(theta.sin() * sin_part.value() + theta.cos() * cos_part.value()) / total)
}

/// (I_S psi)^{(2k+2)}(0): the closed form from iterating the derivative
/// expansion at zero. Needs psi^{(2m)}(0) for m <= k, so k <= 2 is
/// supported through metadata plus even-extension differences.
pub fn montee_deriv_at_zero(psi: &IsotropicFunction, k: u32) -> Result<f64> {
    if k > 2 {
        return Err(Error::DerivativeUnavailable(
            "even derivatives at zero beyond order 4 are not available".into(),
        ));
    }
    let total = sine_weighted_mass(psi);
    if total.abs() <= NORMALIZER_TOL {
        return Err(Error::DerivativeUnavailable(
            "zero montee normalizer".into(),
        ));
    }
    let even_deriv_at_zero = |m: u32| -> f64 {
        match m {
            0 => psi.value(0.0),
            1 => psi
                .second_derivative_at_zero()
                .unwrap_or_else(|| psi.second_derivative_at_zero_fd(1e-4)),
            _ => {
                // central 4th difference of the even extension, Richardson-refined
                let stencil = |h: f64| {
                    (2.0 * psi.value(2.0 * h) - 8.0 * psi.value(h) + 6.0 * psi.value(0.0))
                        / h.powi(4)
                };
                let h = 2e-2;
                (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0
            }
        }
    };
    let mut acc = KahanSum::new();
    for l in 0..=k {
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * binomial(2 * k + 1, 2 * l + 1) * even_deriv_at_zero(k - l));
    }
    Ok(-acc.value() / total)
}

/// Index shift beta o tau_k: zero-padding in front for k > 0, dropping the
/// first -k entries for k <= 0. The dimension tag is left unchanged.
pub fn shift(seq: &SchoenbergSequence, k: i64) -> SchoenbergSequence {
    let b = seq.coefficients();
    let shifted: Vec<f64> = if k >= 0 {
        let mut v = vec![0.0; k as usize];
        v.extend_from_slice(b);
        v
    } else {
        let drop = (-k) as usize;
        if drop >= b.len() {
            Vec::new()
        } else {
            b[drop..].to_vec()
        }
    };
    let mut out = SchoenbergSequence::new(seq.dimension(), shifted);
    out.set_tail_mass(seq.tail_mass());
    out
}

fn require_finite_dim(seq: &SchoenbergSequence, what: &str) -> Result<u32> {
    match seq.dimension() {
        Dimension::Finite(d) if d >= 1 => Ok(d),
        other => Err(Error::Dimension(format!(
            "{what} requires a finite dimension >= 1, got {other:?}"
        ))),
    }
}

/// Right-hand side of the dimension-lowering turning bands identity:
/// beta_0 + cos(theta) psi_{d+2}(beta o tau_{-1}, theta)
///        + (1/d) sin(theta) psi'_{d+2}(beta o tau_{-1}, theta),
/// which must reproduce psi_d(beta, theta).
pub fn turning_bands_down(seq: &SchoenbergSequence, theta: f64) -> Result<f64> {
    let d = require_finite_dim(seq, "turning_bands_down")?;
    let b0 = seq.coefficients().first().copied().unwrap_or(0.0);
    let shifted = SchoenbergSequence::new(
        Dimension::Finite(d + 2),
        shift(seq, -1).coefficients().to_vec(),
    );
    let value = synthesize(&shifted, theta);
    let deriv = synthesize_derivative(&shifted, theta);
    Ok(b0 + theta.cos() * value + theta.sin() * deriv / d as f64)
}

/// The dimension-raising direction: recover
/// psi_{d+2}(beta o tau_{-1}, theta) from the weighted integral of
/// psi_d(beta, .) - beta_0. Endpoints use the continuous limits (the sum of
/// the shifted coefficients at 0, beta_0 - psi_d(beta, pi) at pi); past
/// pi/2 the upper-tail integral is used, so the vanishing total mass of the
/// integrand never amplifies roundoff.
pub fn turning_bands_up(seq: &SchoenbergSequence, theta: f64) -> Result<f64> {
    let d = require_finite_dim(seq, "turning_bands_up")?;
    let df = d as f64;
    let b = seq.coefficients();
    let b0 = b.first().copied().unwrap_or(0.0);
    if theta <= 0.0 {
        let mut acc = KahanSum::new();
        for &bn in b.iter().skip(1) {
            acc.add(bn);
        }
        return Ok(acc.value());
    }
    if theta >= PI - 1e-12 {
        return Ok(b0 - synthesize(seq, PI));
    }
    let integrand = |r: f64| r.sin().powi(d as i32 - 1) * (synthesize(seq, r) - b0);
    if theta <= PI / 2.0 {
        let integral = quadrature::integrate(OP_NODES, 0.0, theta, integrand);
        Ok(df * integral / theta.sin().powi(d as i32))
    } else {
        let upper = quadrature::integrate(OP_NODES, theta, PI, integrand);
        Ok(-df * upper / theta.sin().powi(d as i32))
    }
}

// ---------------------------------------------------------------------------
// grid-backed pipeline for iterated operators
// ---------------------------------------------------------------------------

/// Number of intervals per grid segment for iterated-operator caches.
const GRID_INTERVALS: usize = 2048;

/// A function cached on uniform segments (split at a kink), with local cubic
/// interpolation that never crosses the split point.
#[derive(Clone)]
struct GridFn {
    segments: Arc<Vec<Segment>>,
}

#[derive(Clone)]
struct Segment {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl Segment {
    fn step(&self) -> f64 {
        (self.b - self.a) / (self.values.len() - 1) as f64
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let h = self.step();
        let t = ((x - self.a) / h).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        // 4-point window around [i, i+1], clamped inside the segment
        let lo = i.saturating_sub(1).min(n - 4);
        let u = t - lo as f64;
        let (f0, f1, f2, f3) = (
            self.values[lo],
            self.values[lo + 1],
            self.values[lo + 2],
            self.values[lo + 3],
        );
        // cubic Lagrange on equally spaced nodes 0, 1, 2, 3
        let c0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
        let c1 = u * (u - 2.0) * (u - 3.0) / 2.0;
        let c2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
        let c3 = u * (u - 1.0) * (u - 2.0) / 6.0;
        c0 * f0 + c1 * f1 + c2 * f2 + c3 * f3
    }
}

impl GridFn {
    /// Sample `f` on [0, pi], split at the optional kink location.
    fn sample<F: Fn(f64) -> f64>(split: Option<f64>, f: F) -> Self {
        let mut edges = vec![0.0];
        if let Some(c) = split {
            if c > 1e-9 && c < PI - 1e-9 {
                edges.push(c);
            }
        }
        edges.push(PI);
        let segments = edges
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let h = (b - a) / GRID_INTERVALS as f64;
                let values = (0..=GRID_INTERVALS).map(|i| f(a + h * i as f64)).collect();
                Segment { a, b, values }
            })
            .collect();
        Self {
            segments: Arc::new(segments),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, PI);
        for seg in self.segments.iter() {
            if x <= seg.b {
                return seg.eval(x);
            }
        }
        self.segments.last().unwrap().eval(x)
    }

    /// Antiderivative of weight(x) * (self(x) - offset) from 0, per-interval
    /// Simpson on the same grid.
    fn cumulative<W: Fn(f64) -> f64>(&self, offset: f64, weight: W) -> GridFn {
        let mut segments = Vec::with_capacity(self.segments.len());
        let mut carry = 0.0;
        for seg in self.segments.iter() {
            let h = seg.step();
            let n = seg.values.len();
            let mut values = Vec::with_capacity(n);
            values.push(carry);
            let mut acc = KahanSum::new();
            acc.add(carry);
            for i in 0..n - 1 {
                let x0 = seg.a + h * i as f64;
                let x1 = x0 + h;
                let xm = x0 + 0.5 * h;
                let g0 = weight(x0) * (seg.values[i] - offset);
                let gm = weight(xm) * (seg.eval(xm) - offset);
                let g1 = weight(x1) * (seg.values[i + 1] - offset);
                acc.add(h / 6.0 * (g0 + 4.0 * gm + g1));
                values.push(acc.value());
            }
            carry = *values.last().unwrap();
            segments.push(Segment {
                a: seg.a,
                b: seg.b,
                values,
            });
        }
        GridFn {
            segments: Arc::new(segments),
        }
    }

    fn last_value(&self) -> f64 {
        *self.segments.last().unwrap().values.last().unwrap()
    }

    fn min_value(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    fn value_at_zero(&self) -> f64 {
        self.segments[0].values[0]
    }

    fn into_isotropic(self, label: String) -> IsotropicFunction {
        IsotropicFunction::new(label, move |theta: f64| self.eval(theta))
    }
}

/// One application of the dimension-raising identity to a grid function in
/// dimension `dim` whose sequence has 0th coefficient `beta0`: the grid of
/// psi_{dim+2}(beta o tau_{-1}, .).
fn turning_bands_up_grid(g: &GridFn, dim: u32, beta0: f64, split: Option<f64>) -> GridFn {
    let df = dim as f64;
    let cum = g.cumulative(beta0, |r| r.sin().powi(dim as i32 - 1));
    let total = cum.last_value();
    let at_zero = g.value_at_zero() - beta0;
    let at_pi = beta0 - g.eval(PI);
    let eval = move |theta: f64| -> f64 {
        if theta <= 1e-12 {
            return at_zero;
        }
        if theta >= PI - 1e-12 {
            return at_pi;
        }
        if theta <= PI / 2.0 {
            df * cum.eval(theta) / theta.sin().powi(dim as i32)
        } else {
            -df * (total - cum.eval(theta)) / theta.sin().powi(dim as i32)
        }
    };
    GridFn::sample(split, eval)
}

/// One montee step on a grid function: (total - cumulative)(theta) / total.
fn montee_grid(g: &GridFn, split: Option<f64>) -> Result<GridFn> {
    let cum = g.cumulative(0.0, f64::sin);
    let total = cum.last_value();
    if total.abs() <= NORMALIZER_TOL {
        return Err(Error::Construction(
            "zero montee normalizer in iterated pipeline".into(),
        ));
    }
    let eval = move |theta: f64| (total - cum.eval(theta)) / total;
    Ok(GridFn::sample(split, eval))
}

/// Iterated montee (I_S)^k via the cached-grid pipeline; k = 0 returns a
/// grid copy of the input.
pub fn montee_power(psi: &IsotropicFunction, k: u32) -> Result<IsotropicFunction> {
    let split = psi.support_radius().filter(|&c| c > 1e-9 && c < PI - 1e-9);
    let mut g = GridFn::sample(split, |t| psi.value(t));
    for _ in 0..k {
        g = montee_grid(&g, split)?;
    }
    Ok(g.into_isotropic(format!("montee^{k}({})", psi.label())))
}

/// One-sided probe of a single derivative order at a cutoff point. `gap`
/// and `gap_refined` are the one-sided left/right disagreements at step h
/// and h/4; a genuine jump leaves the gap invariant under refinement while
/// a truncation artifact shrinks with h.
#[derive(Debug, Clone, Serialize)]
pub struct JumpProbe {
    pub order: u32,
    pub left: f64,
    pub right: f64,
    pub gap: f64,
    pub gap_mid: f64,
    pub gap_refined: f64,
    pub noise_floor: f64,
    pub detected: bool,
}

/// Jump diagnostics for the optimality witness: per-order one-sided
/// derivative gaps at the cutoff, calibrated against an identically
/// processed smooth control, plus the second-difference trace at zero.
#[derive(Debug, Clone, Serialize)]
pub struct JumpReport {
    pub cutoff: f64,
    pub expected_jump_order: u32,
    pub probes: Vec<JumpProbe>,
    pub first_jump_order: Option<u32>,
    pub second_difference_at_zero: Vec<f64>,
}

fn probe_step(order: u32) -> f64 {
    match order {
        1 | 2 => 0.02,
        3 => 0.03,
        _ => 0.04,
    }
}

fn one_sided_gap<F: Fn(f64) -> f64>(f: &F, x: f64, order: u32, h: f64) -> (f64, f64, f64) {
    let left = one_sided_derivative(f, x, h, order as usize, -1.0);
    let right = one_sided_derivative(f, x, h, order as usize, 1.0);
    (left, right, (left - right).abs())
}

/// The witness construction: starting from the hat function in the d = 1
/// class, apply the dimension-raising identity (d'-1)/2 times (d' = d + 2k),
/// normalize into the class, then apply the montee k times. The derivative
/// of order 1 + (d'-1)/2 + k fails to exist at the cutoff and no lower order
/// does; the probes certify both against the control calibration.
pub fn optimality_witness(d: u32, k: u32, c: f64) -> Result<(IsotropicFunction, JumpReport)> {
    if d % 2 == 0 || d < 1 {
        return Err(Error::Domain(format!(
            "witness requires odd d >= 1, got {d}"
        )));
    }
    if !(c > 0.0 && c < PI) {
        return Err(Error::Domain(format!(
            "witness requires c in (0, pi), got {c}"
        )));
    }
    let d_prime = d + 2 * k;
    let steps = (d_prime - 1) / 2;
    let jump_order = 1 + steps + k;

    let hat_coeffs = schoenberg::truncated_linear_one_sequence(c, steps as usize + 1)?;
    // control: the same pipeline run on the smooth Poisson-kernel member
    // (the tau = 1 multiquadric), whose 1-sequence is b_0 = (1-w)/(1+w),
    // b_n = 2 w^n (1-w)/(1+w); probing it calibrates the noise floor
    let control_delta = 0.5_f64;
    let control_scale = (1.0 - control_delta) / (1.0 + control_delta);
    let control_coeffs: Vec<f64> = (0..=steps as usize)
        .map(|n| {
            if n == 0 {
                control_scale
            } else {
                2.0 * control_scale * control_delta.powi(n as i32)
            }
        })
        .collect();
    let control_fn = crate::model::multiquadric(1.0, control_delta)?;

    let build = |start: &dyn Fn(f64) -> f64, coeffs: &[f64]| -> Result<GridFn> {
        let mut g = GridFn::sample(Some(c), start);
        for j in 0..steps {
            let beta0 = coeffs[j as usize];
            g = turning_bands_up_grid(&g, 1 + 2 * j, beta0, Some(c));
        }
        // normalize into the class: add the smallest constant making the
        // grid nonnegative, then scale to 1 at zero
        let shift_c = (-g.min_value()).max(0.0);
        let denom = g.value_at_zero() + shift_c;
        if denom <= NORMALIZER_TOL {
            return Err(Error::Construction(
                "no additive constant makes the witness positive at zero".into(),
            ));
        }
        let base = g.clone();
        let mut g = GridFn::sample(Some(c), move |t| (base.eval(t) + shift_c) / denom);
        for _ in 0..k {
            g = montee_grid(&g, Some(c))?;
        }
        Ok(g)
    };

    let hat = crate::model::truncated_linear(c)?;
    let witness = build(&|t| hat.value(t), hat_coeffs.coefficients())?;
    let control = build(&|t| control_fn.value(t), &control_coeffs)?;

    let wit_eval = {
        let w = witness.clone();
        move |t: f64| w.eval(t)
    };
    let ctl_eval = {
        let g = control.clone();
        move |t: f64| g.eval(t)
    };

    let mut probes = Vec::new();
    let mut first_jump = None;
    for order in 1..=jump_order {
        let h = probe_step(order);
        let (_, _, gap) = one_sided_gap(&wit_eval, c, order, h);
        let (_, _, gap_mid) = one_sided_gap(&wit_eval, c, order, h / 2.0);
        let (left, right, gap_refined) = one_sided_gap(&wit_eval, c, order, h / 4.0);
        let (_, _, control_gap) = one_sided_gap(&ctl_eval, c, order, h / 4.0);
        let noise_floor = control_gap.max(1e-12);
        // a jump must both exceed the calibrated noise and survive step
        // refinement (truncation-induced gaps shrink at least linearly)
        let persistent = gap_mid > 1e-300 && gap_refined > 0.7 * gap_mid;
        let detected = gap_refined > 10.0 * noise_floor && persistent;
        if detected && first_jump.is_none() {
            first_jump = Some(order);
        }
        probes.push(JumpProbe {
            order,
            left,
            right,
            gap,
            gap_mid,
            gap_refined,
            noise_floor,
            detected,
        });
    }

    let second_difference_at_zero = [0.04_f64, 0.02, 0.01]
        .iter()
        .map(|&h| 2.0 * (witness.eval(h) - witness.eval(0.0)) / (h * h))
        .collect();

    let report = JumpReport {
        cutoff: c,
        expected_jump_order: jump_order,
        probes,
        first_jump_order: first_jump,
        second_difference_at_zero,
    };
    let label = format!("optimality-witness(d={d}, k={k}, c={c})");
    Ok((witness.into_isotropic(label), report))
}
