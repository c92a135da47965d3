//! Schoenberg sequences: analysis (psi -> coefficients), synthesis
//! (coefficients -> psi), conversion of d- and infinity-sequences to
//! 1-sequences through the kappa_d / tau kernels, and the moment and
//! derivative-at-zero formulas.

use crate::error::{Error, Result};
use crate::gegenbauer::{normalized_all, normalized_theta_derivative_all};
use crate::model::IsotropicFunction;
use crate::quadrature;
use crate::special::{gamma_half_ratio, lgamma, pochhammer, KahanSum};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;

/// Coefficients below this magnitude count as zero; anything at or below
/// the negated tolerance marks a sequence as outside the class.
pub const TOL_COEFF: f64 = 1e-10;

/// Sphere dimension tag: finite d >= 1 or the intersection class (infinity).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Finite(u32),
    Infinite,
}

impl Dimension {
    pub fn lambda(&self) -> Option<f64> {
        match self {
            Dimension::Finite(d) => Some((*d as f64 - 1.0) / 2.0),
            Dimension::Infinite => None,
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{d}"),
            Dimension::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dimension::Finite(d) => s.serialize_u32(*d),
            Dimension::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u32),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(v) if v >= 1 => Ok(Dimension::Finite(v)),
            Repr::Int(v) => Err(D::Error::custom(format!("dimension must be >= 1, got {v}"))),
            Repr::Text(t) if t == "inf" => Ok(Dimension::Infinite),
            Repr::Text(t) => Err(D::Error::custom(format!("unknown dimension tag {t:?}"))),
        }
    }
}

/// A truncated Schoenberg sequence: dimension tag, coefficient vector,
/// tail-mass estimate for the part beyond the truncation, and whether the
/// coefficients (plus tail) are asserted to sum to one.
#[derive(Debug, Clone)]
pub struct SchoenbergSequence {
    dimension: Dimension,
    coefficients: Vec<f64>,
    tail_mass: f64,
    normalized: bool,
}

impl SchoenbergSequence {
    /// Build a sequence, clamping roundoff negatives in (-TOL_COEFF, 0) to
    /// zero. Coefficients at or below -TOL_COEFF are kept as-is and mark
    /// the sequence as non-class (normalized = false).
    pub fn new(dimension: Dimension, coefficients: Vec<f64>) -> Self {
        if let Dimension::Finite(d) = dimension {
            assert!(d >= 1, "finite dimension must be >= 1");
        }
        let mut coeffs = coefficients;
        let mut class = true;
        for c in coeffs.iter_mut() {
            if *c < 0.0 {
                if *c > -TOL_COEFF {
                    *c = 0.0;
                } else {
                    class = false;
                }
            }
        }
        let sum: f64 = {
            let mut acc = KahanSum::new();
            for &c in &coeffs {
                acc.add(c);
            }
            acc.value()
        };
        let tail_mass = (1.0 - sum).max(0.0);
        let normalized = class && sum <= 1.0 + 1e-8;
        Self {
            dimension,
            coefficients: coeffs,
            tail_mass,
            normalized,
        }
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Override the tail-mass estimate (index shifts keep the original).
    pub fn set_tail_mass(&mut self, tail_mass: f64) {
        self.tail_mass = tail_mass.max(0.0);
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// All coefficients above the negative tolerance.
    pub fn is_class(&self) -> bool {
        self.coefficients.iter().all(|&c| c > -TOL_COEFF)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Wrap the synthesized series as an isotropic function, attaching the
    /// analytic series derivative and, when the moment gate passes, the
    /// series value of psi''(0).
    pub fn to_function(&self) -> IsotropicFunction {
        let for_eval = self.clone();
        let for_deriv = self.clone();
        let mut f = IsotropicFunction::new(
            format!("synthesized(dim={}, n={})", self.dimension, self.len()),
            move |theta: f64| synthesize(&for_eval, theta),
        )
        .with_derivative(move |theta: f64| synthesize_derivative(&for_deriv, theta));
        if let Ok(v) = second_derivative_at_zero_from_sequence(self) {
            f = f.with_second_derivative_at_zero(v);
        }
        f
    }
}

impl Serialize for SchoenbergSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            dimension: Dimension,
            coefficients: &'a [f64],
            tail_mass: f64,
        }
        Repr {
            dimension: self.dimension,
            coefficients: &self.coefficients,
            tail_mass: self.tail_mass,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SchoenbergSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dimension: Dimension,
            coefficients: Vec<f64>,
            #[serde(default)]
            tail_mass: Option<f64>,
        }
        let repr = Repr::deserialize(d)?;
        let mut seq = SchoenbergSequence::new(repr.dimension, repr.coefficients);
        if let Some(t) = repr.tail_mass {
            if t < 0.0 {
                return Err(D::Error::custom("tail_mass must be nonnegative"));
            }
            seq.tail_mass = t;
        }
        Ok(seq)
    }
}

/// Evaluate the series at theta: sum of b_n C_n^{(d-1)/2}(cos theta) /
/// C_n^{(d-1)/2}(1) for finite d, sum of b_n (cos theta)^n for infinity.
pub fn synthesize(seq: &SchoenbergSequence, theta: f64) -> f64 {
    let b = &seq.coefficients;
    if b.is_empty() {
        return 0.0;
    }
    match seq.dimension {
        Dimension::Finite(d) => {
            let lambda = (d as f64 - 1.0) / 2.0;
            let basis = normalized_all(lambda, theta.cos(), b.len() - 1);
            let mut acc = KahanSum::new();
            for (bn, rn) in b.iter().zip(basis.iter()) {
                acc.add(bn * rn);
            }
            acc.value()
        }
        Dimension::Infinite => {
            // Horner in x = cos theta
            let x = theta.cos();
            let mut v = 0.0;
            for &bn in b.iter().rev() {
                v = v * x + bn;
            }
            v
        }
    }
}

/// d/d theta of the synthesized series.
pub fn synthesize_derivative(seq: &SchoenbergSequence, theta: f64) -> f64 {
    let b = &seq.coefficients;
    if b.is_empty() {
        return 0.0;
    }
    match seq.dimension {
        Dimension::Finite(d) => {
            let lambda = (d as f64 - 1.0) / 2.0;
            let basis = normalized_theta_derivative_all(lambda, theta, b.len() - 1);
            let mut acc = KahanSum::new();
            for (bn, rn) in b.iter().zip(basis.iter()) {
                acc.add(bn * rn);
            }
            acc.value()
        }
        Dimension::Infinite => {
            let x = theta.cos();
            let mut v = 0.0;
            for (n, &bn) in b.iter().enumerate().skip(1).rev() {
                v = v * x + n as f64 * bn;
            }
            -theta.sin() * v
        }
    }
}

/// Orthogonality normalizer h_k = int_0^pi R_k(cos t)^2 (sin t)^{d-1} dt for
/// the normalized Gegenbauer basis in dimension d >= 2.
fn basis_norm(d: u32, k: usize) -> f64 {
    debug_assert!(d >= 2);
    let df = d as f64;
    let lambda = (df - 1.0) / 2.0;
    let kf = k as f64;
    let prefactor =
        PI * (2.0_f64).powi(2 - d as i32) * (2.0 * (lgamma(df - 1.0) - lgamma(lambda))).exp();
    prefactor / ((kf + lambda) * pochhammer(kf + 1.0, d - 2))
}

/// Project psi onto the first n_max + 1 basis elements of dimension d by
/// Gauss-Legendre quadrature with weight (sin theta)^{d-1} (a cosine series
/// for d = 1). Compactly supported psi are integrated piecewise around the
/// support boundary. The rule is applied at two node counts; disagreement
/// beyond 1e-9 or a failed constant-projection self-calibration raises a
/// quadrature error.
pub fn analyze(psi: &IsotropicFunction, d: u32, n_max: usize) -> Result<SchoenbergSequence> {
    if d < 1 {
        return Err(Error::Dimension("analysis dimension must be >= 1".into()));
    }
    let lambda = (d as f64 - 1.0) / 2.0;
    let base_nodes = 64 * (n_max + d as usize).div_ceil(32);
    let breaks: Vec<f64> = match psi.support_radius() {
        Some(c) if c > 0.0 && c < PI => vec![c],
        _ => vec![],
    };

    let project = |nodes: usize| -> Vec<f64> {
        let rule = quadrature::GaussLegendre::rule(nodes);
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        let mut lo = 0.0;
        for &c in &breaks {
            pieces.push((lo, c));
            lo = c;
        }
        pieces.push((lo, PI));

        let mut moments = vec![KahanSum::new(); n_max + 1];
        let mut const_moment = KahanSum::new();
        for &(a, b) in &pieces {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            rule.for_each_node(|x, w| {
                let theta = mid + half * x;
                let weight = half * w * theta.sin().powi(d as i32 - 1);
                let basis = normalized_all(lambda, theta.cos(), n_max);
                let v = psi.value(theta) * weight;
                for (m, r) in moments.iter_mut().zip(basis.iter()) {
                    m.add(v * r);
                }
                const_moment.add(weight);
            });
        }

        let mut coeffs = Vec::with_capacity(n_max + 2);
        for (k, m) in moments.iter().enumerate() {
            let h = if d == 1 {
                if k == 0 {
                    PI
                } else {
                    PI / 2.0
                }
            } else {
                basis_norm(d, k)
            };
            coeffs.push(m.value() / h);
        }
        // self-calibration entry: projection of the constant function onto n = 0
        let h0 = if d == 1 { PI } else { basis_norm(d, 0) };
        coeffs.push(const_moment.value() / h0);
        coeffs
    };

    let coarse = project(base_nodes);
    let fine = project(2 * base_nodes);

    let calibration = fine[n_max + 1];
    if (calibration - 1.0).abs() > 1e-8 {
        return Err(Error::Quadrature(format!(
            "constant-function projection deviates from 1 by {:.3e}",
            (calibration - 1.0).abs()
        )));
    }
    let scale = fine[..=n_max].iter().fold(1.0_f64, |m, &b| m.max(b.abs()));
    let mut disagreement = 0.0_f64;
    for k in 0..=n_max {
        disagreement = disagreement.max((fine[k] - coarse[k]).abs());
    }
    if disagreement / scale > 1e-9 {
        return Err(Error::Quadrature(format!(
            "node-doubling disagreement {disagreement:.3e} exceeds 1e-9 relative"
        )));
    }

    Ok(SchoenbergSequence::new(
        Dimension::Finite(d),
        fine[..=n_max].to_vec(),
    ))
}

/// Conversion-kernel family: kappa_d for finite d >= 2, tau for infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Kappa(u32),
    Tau,
}

fn check_kernel_args(j: u64, n: u64) -> Result<()> {
    if n > j || (j - n) % 2 != 0 {
        return Err(Error::Parity { j, n });
    }
    Ok(())
}

/// Gamma(x + (d-3)/2) / Gamma(x) for integer x >= 1, split into a Pochhammer
/// product (integer part of the offset) and a half-step ratio when d is even.
fn gamma_offset_ratio(x: f64, d: u32) -> f64 {
    if d % 2 == 1 {
        pochhammer(x, (d - 3) / 2)
    } else if d == 2 {
        1.0 / gamma_half_ratio(x - 0.5)
    } else {
        gamma_half_ratio(x) * pochhammer(x + 0.5, (d - 4) / 2)
    }
}

fn kappa_value(d: u32, j: u64, n: u64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Dimension(format!(
            "kappa kernel requires d >= 2, got {d}"
        )));
    }
    check_kernel_args(j, n)?;
    let df = d as f64;
    let prefactor = (lgamma(df - 1.0) - 2.0 * lgamma((df - 1.0) / 2.0)).exp();
    let x1 = ((j - n) as f64 + 2.0) / 2.0;
    let x2 = ((j + n) as f64 + 2.0) / 2.0;
    let jf = j as f64;
    Ok(
        prefactor * gamma_offset_ratio(x1, d) * gamma_offset_ratio(x2, d)
            / pochhammer(jf + 1.0, d - 2),
    )
}

/// tau(j, j_parity_base), the starting value for the outward recurrence:
/// tau(2m, 0) = 2^{-2m} C(2m, m), tau(2m-1, 1) = 2^{-(2m-1)} C(2m-1, m),
/// both as stable products staying in (0, 1].
fn tau_central(j: u64) -> f64 {
    if j % 2 == 0 {
        let m = j / 2;
        let mut v = 1.0;
        for i in 1..=m {
            v *= (2 * i - 1) as f64 / (2 * i) as f64;
        }
        v
    } else {
        let m = j.div_ceil(2);
        let mut v = 0.5;
        for i in 1..m {
            v *= (2 * i + 1) as f64 / (2 * (i + 1)) as f64;
        }
        v
    }
}

fn tau_value(j: u64, n: u64) -> Result<f64> {
    check_kernel_args(j, n)?;
    let mut v = tau_central(j);
    let mut m = j % 2;
    while m < n {
        // tau(j, m+2) = tau(j, m) (j - m) / (j + m + 2)
        v *= (j - m) as f64 / (j + m + 2) as f64;
        m += 2;
    }
    Ok(v)
}

/// kappa_d(j, n) or tau(j, n), nonnegative, for 0 <= n <= j with j - n even.
pub fn kernel_value(kind: KernelKind, j: u64, n: u64) -> Result<f64> {
    match kind {
        KernelKind::Kappa(d) => kappa_value(d, j, n),
        KernelKind::Tau => tau_value(j, n),
    }
}

/// All kernel values for fixed j: entries for n = j mod 2, +2, ..., j,
/// computed by one outward recurrence pass.
pub fn kernel_row(kind: KernelKind, j: u64) -> Result<Vec<f64>> {
    let start = j % 2;
    let mut out = Vec::with_capacity((j / 2 + 1) as usize);
    match kind {
        KernelKind::Tau => {
            let mut v = tau_central(j);
            let mut n = start;
            loop {
                out.push(v);
                if n + 2 > j {
                    break;
                }
                v *= (j - n) as f64 / (j + n + 2) as f64;
                n += 2;
            }
        }
        KernelKind::Kappa(d) => {
            if d < 2 {
                return Err(Error::Dimension(format!(
                    "kappa kernel requires d >= 2, got {d}"
                )));
            }
            let df = d as f64;
            let mut v = kappa_value(d, j, start)?;
            let mut n = start;
            loop {
                out.push(v);
                if n + 2 > j {
                    break;
                }
                let nf = n as f64;
                let jf = j as f64;
                // kappa(j, n+2) = kappa(j, n) (d-1+j+n)(j-n) / ((d-3+j-n)(j+n+2))
                v *= (df - 1.0 + jf + nf) * (jf - nf) / ((df - 3.0 + jf - nf) * (jf + nf + 2.0));
                n += 2;
            }
        }
    }
    Ok(out)
}

/// Convert a d-sequence (d >= 2) or infinity-sequence to its 1-sequence,
/// truncated at the input length: b_{0,1} takes weight 1, all other entries
/// weight 2, with parity preserved by the kernels.
pub fn to_one_dim(seq: &SchoenbergSequence) -> Result<SchoenbergSequence> {
    let kind = match seq.dimension {
        Dimension::Finite(d) if d >= 2 => KernelKind::Kappa(d),
        Dimension::Finite(d) => {
            return Err(Error::Dimension(format!(
                "to_one_dim requires dimension >= 2 or infinity, got {d}"
            )))
        }
        Dimension::Infinite => KernelKind::Tau,
    };
    let b = &seq.coefficients;
    let len = b.len();
    let mut out = vec![KahanSum::new(); len];
    for (j, &bj) in b.iter().enumerate() {
        if bj == 0.0 {
            continue;
        }
        let row = kernel_row(kind, j as u64)?;
        let start = j % 2;
        for (idx, &k) in row.iter().enumerate() {
            let n = start + 2 * idx;
            let weight = if n == 0 { 1.0 } else { 2.0 };
            out[n].add(weight * bj * k);
        }
    }
    Ok(SchoenbergSequence::new(
        Dimension::Finite(1),
        out.into_iter().map(|s| s.value()).collect(),
    ))
}

/// Finite moment sum with the Cauchy-style stabilization diagnostic.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentSum {
    pub value: f64,
    pub convergent_at_truncation: bool,
    pub last_decade_increment: f64,
}

/// Shared stabilization test: a term sequence is convergent at truncation
/// when the sequence it came from is complete (tail mass below 1e-12, so
/// the sum is finite on its face) or when the increment contributed by the
/// last index decade (N/10, N] is at most 1e-6 of the total.
pub(crate) fn tail_diagnostic(terms: &[f64], tail_mass: f64) -> (f64, bool, f64) {
    let mut total = KahanSum::new();
    for &t in terms {
        total.add(t);
    }
    let total = total.value();
    if terms.is_empty() {
        return (0.0, true, 0.0);
    }
    let cut = (terms.len() - 1) / 10;
    let mut inc = KahanSum::new();
    for &t in &terms[cut + 1..] {
        inc.add(t);
    }
    let inc = inc.value();
    let convergent = if tail_mass <= 1e-12 {
        true
    } else if total == 0.0 {
        inc == 0.0
    } else {
        inc.abs() <= 1e-6 * total.abs()
    };
    (total, convergent, inc)
}

/// Sum of b_n n^power over the truncation, plus the stabilization flag.
pub fn moment_sum(seq: &SchoenbergSequence, power: u32) -> MomentSum {
    let terms: Vec<f64> = seq
        .coefficients
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            if n == 0 && power == 0 {
                b
            } else {
                b * (n as f64).powi(power as i32)
            }
        })
        .collect();
    let (value, convergent_at_truncation, last_decade_increment) =
        tail_diagnostic(&terms, seq.tail_mass);
    MomentSum {
        value,
        convergent_at_truncation,
        last_decade_increment,
    }
}

fn require_moment(seq: &SchoenbergSequence, power: u32) -> Result<()> {
    let m = moment_sum(seq, power);
    if !m.convergent_at_truncation {
        return Err(Error::Divergence(format!(
            "moment sum of order {power} not stabilized at truncation \
             (last-decade increment {:.3e} of total {:.3e})",
            m.last_decade_increment, m.value
        )));
    }
    Ok(())
}

/// psi''(0) from the sequence: -sum b_{n+1,d} (n+1)(n+d)/d for finite d,
/// -sum b_{n+1} (n+1) for infinity, gated on the corresponding moment sum.
pub fn second_derivative_at_zero_from_sequence(seq: &SchoenbergSequence) -> Result<f64> {
    let b = &seq.coefficients;
    let mut acc = KahanSum::new();
    match seq.dimension {
        Dimension::Finite(d) => {
            require_moment(seq, 2)?;
            let df = d as f64;
            for (n, &bn1) in b.iter().enumerate().skip(1) {
                let nf = (n - 1) as f64;
                acc.add(bn1 * (nf + 1.0) * (nf + df) / df);
            }
        }
        Dimension::Infinite => {
            require_moment(seq, 1)?;
            for (n, &bn1) in b.iter().enumerate().skip(1) {
                acc.add(bn1 * n as f64);
            }
        }
    }
    Ok(-acc.value())
}

/// psi''''(0) from the sequence, gated on the order-4 (finite d) or
/// order-2 (infinity) moment sum.
pub fn fourth_derivative_at_zero_from_sequence(seq: &SchoenbergSequence) -> Result<f64> {
    let b = &seq.coefficients;
    let mut acc = KahanSum::new();
    match seq.dimension {
        Dimension::Finite(d) => {
            require_moment(seq, 4)?;
            let df = d as f64;
            for (i, &bn1) in b.iter().enumerate().skip(1) {
                let n = (i - 1) as f64;
                acc.add(
                    bn1 * (n + 1.0) * (n + df) / df * (1.0 + 3.0 * n * (n + df + 1.0) / (df + 2.0)),
                );
            }
        }
        Dimension::Infinite => {
            require_moment(seq, 2)?;
            for (i, &bn1) in b.iter().enumerate().skip(1) {
                let n = (i - 1) as f64;
                acc.add(bn1 * (n + 1.0) * (3.0 * n + 1.0));
            }
        }
    }
    Ok(acc.value())
}

/// Upper bound (1/c^2)(4/d) j_{(d-2)/2}^2 on the infimum of -psi''(0) over
/// compactly supported class members, for the two dimensions whose Bessel
/// zeros are elementary: j_{-1/2} = pi/2 (d = 1) and j_{1/2} = pi (d = 3).
pub fn corner_bound(d: u32, c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= PI) {
        return Err(Error::Domain(format!(
            "corner_bound requires c in (0, pi], got {c}"
        )));
    }
    let zero = match d {
        1 => PI / 2.0,
        3 => PI,
        _ => {
            return Err(Error::Dimension(format!(
                "corner_bound supports d in {{1, 3}}, got {d}"
            )))
        }
    };
    // forming the ratio first keeps the c = pi reference values exact
    let ratio = zero / c;
    Ok(4.0 / (d as f64) * (ratio * ratio))
}

/// The infinity-Schoenberg sequence of the Multiquadric, from the binomial
/// expansion of (1 + delta^2 - 2 delta x)^{-tau} in x = cos theta:
/// b_n = [(1-delta)^2/(1+delta^2)]^tau C(tau+n-1, n) u^n, u = 2 delta/(1+delta^2).
pub fn multiquadric_infinite_sequence(
    tau: f64,
    delta: f64,
    len: usize,
) -> Result<SchoenbergSequence> {
    if !(tau > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "multiquadric sequence requires tau > 0, delta in (0,1); got tau={tau}, delta={delta}"
        )));
    }
    let u = 2.0 * delta / (1.0 + delta * delta);
    let mut b = Vec::with_capacity(len);
    let mut cur = ((1.0 - delta) * (1.0 - delta) / (1.0 + delta * delta)).powf(tau);
    for n in 0..len {
        b.push(cur);
        cur *= u * (tau + n as f64) / (n as f64 + 1.0);
    }
    Ok(SchoenbergSequence::new(Dimension::Infinite, b))
}

/// The exact 1-Schoenberg sequence of the hat function (1 - theta/c)_+:
/// b_0 = c/(2 pi), b_n = 2 (1 - cos(n c)) / (pi c n^2).
pub fn truncated_linear_one_sequence(c: f64, len: usize) -> Result<SchoenbergSequence> {
    if !(c > 0.0 && c < PI) {
        return Err(Error::Domain(format!("requires c in (0, pi), got {c}")));
    }
    let mut b = Vec::with_capacity(len);
    for n in 0..len {
        if n == 0 {
            b.push(c / (2.0 * PI));
        } else {
            let nf = n as f64;
            b.push(2.0 * (1.0 - (nf * c).cos()) / (PI * c * nf * nf));
        }
    }
    Ok(SchoenbergSequence::new(Dimension::Finite(1), b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;

    fn seq(dim: Dimension, coeffs: &[f64]) -> SchoenbergSequence {
        SchoenbergSequence::new(dim, coeffs.to_vec())
    }

    #[test]
    fn synthesize_basis_elements() {
        // d = 3, b_1 = 1 gives cos theta
        let s = seq(Dimension::Finite(3), &[0.0, 1.0]);
        for &theta in &[0.0, 0.7, 2.1, PI] {
            assert!((synthesize(&s, theta) - theta.cos()).abs() < 1e-14);
        }
        // b_0 = 1 is the constant in any dimension
        for dim in [
            Dimension::Finite(2),
            Dimension::Finite(7),
            Dimension::Infinite,
        ] {
            let s = seq(dim, &[1.0]);
            assert_eq!(synthesize(&s, 1.3), 1.0);
        }
        // infinity, b_0 = b_1 = 1/2 vanishes at pi
        let s = seq(Dimension::Infinite, &[0.5, 0.5]);
        assert!(synthesize(&s, PI).abs() < 1e-15);
    }

    #[test]
    fn analyze_recovers_cosine_in_any_dimension() {
        let psi = model::cosine();
        for d in 2..=5u32 {
            let s = analyze(&psi, d, 8).unwrap();
            assert!((s.coefficients()[1] - 1.0).abs() < 1e-10, "d={d}");
            for (n, &b) in s.coefficients().iter().enumerate() {
                if n != 1 {
                    assert!(b.abs() < 1e-10, "d={d} n={n}: {b}");
                }
            }
        }
    }

    #[test]
    fn analyze_raised_cosine_gives_half_half() {
        let psi = model::raised_cosine();
        for d in [1u32, 2, 3, 6] {
            let s = analyze(&psi, d, 6).unwrap();
            assert!((s.coefficients()[0] - 0.5).abs() < 1e-10);
            assert!((s.coefficients()[1] - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn analyze_multiquadric_d1_is_poisson_kernel() {
        let delta = 0.3;
        let psi = model::multiquadric(1.0, delta).unwrap();
        let s = analyze(&psi, 1, 32).unwrap();
        let scale = (1.0 - delta) / (1.0 + delta);
        assert!(
            (s.coefficients()[0] - scale).abs() < 1e-12,
            "b_0 = (1-d)/(1+d)"
        );
        for n in 1..=32usize {
            let expect = 2.0 * delta.powi(n as i32) * scale;
            assert!(
                (s.coefficients()[n] - expect).abs() < 1e-12,
                "b_{n}: {} vs {expect}",
                s.coefficients()[n]
            );
        }
    }

    #[test]
    fn analyze_b1_matches_direct_integral_route() {
        // b_{1,d} = (d+1)(d-1)/(2^{3-d} pi) Gamma((d-1)/2)^2/Gamma(d-1)
        //           * int_0^pi cos(t) sin(t)^{d-1} psi(t) dt
        let psi = model::multiquadric(1.0, 0.4).unwrap();
        for d in 2..=6u32 {
            let df = d as f64;
            let prefactor = (df + 1.0) * (df - 1.0) / ((2.0_f64).powi(3 - d as i32) * PI)
                * (2.0 * lgamma((df - 1.0) / 2.0) - lgamma(df - 1.0)).exp();
            let integral = crate::quadrature::integrate(256, 0.0, PI, |t| {
                t.cos() * t.sin().powi(d as i32 - 1) * psi.value(t)
            });
            let direct = prefactor * integral;
            let analyzed = analyze(&psi, d, 8).unwrap().coefficients()[1];
            assert!(
                (direct - analyzed).abs() < 1e-12,
                "d={d}: integral route {direct} vs projection {analyzed}"
            );
        }
    }

    #[test]
    fn analyze_self_calibrates_on_constant() {
        let one = model::constant_one();
        for d in [1u32, 2, 4, 7] {
            let s = analyze(&one, d, 12).unwrap();
            assert!((s.coefficients()[0] - 1.0).abs() < 1e-10);
            for &b in &s.coefficients()[1..] {
                assert!(b.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn kernel_values_by_hand() {
        assert!((kernel_value(KernelKind::Tau, 2, 0).unwrap() - 0.5).abs() < 1e-15);
        for j in [1u64, 3, 7, 20] {
            let tjj = kernel_value(KernelKind::Tau, j, j).unwrap();
            assert!(
                (tjj - 0.5_f64.powi(j as i32)).abs() < 1e-15,
                "tau(j,j) = 2^-j"
            );
        }
        assert!((kernel_value(KernelKind::Kappa(3), 2, 0).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        // kappa_3(2j, 2n) = 1/(2j+1) for every admissible n
        for j in [1u64, 5, 40] {
            for n in (0..=2 * j).step_by(2) {
                let v = kernel_value(KernelKind::Kappa(3), 2 * j, n).unwrap();
                assert!((v - 1.0 / (2.0 * j as f64 + 1.0)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn kernel_parity_enforced() {
        assert!(matches!(
            kernel_value(KernelKind::Tau, 3, 2),
            Err(Error::Parity { .. })
        ));
        assert!(matches!(
            kernel_value(KernelKind::Kappa(4), 2, 4),
            Err(Error::Parity { .. })
        ));
        assert!(kernel_value(KernelKind::Kappa(1), 2, 0).is_err());
    }

    #[test]
    fn kernel_row_matches_single_values() {
        for kind in [KernelKind::Tau, KernelKind::Kappa(2), KernelKind::Kappa(5)] {
            for j in [0u64, 1, 2, 7, 16, 33] {
                let row = kernel_row(kind, j).unwrap();
                let start = j % 2;
                for (idx, &v) in row.iter().enumerate() {
                    let n = start + 2 * idx as u64;
                    let direct = kernel_value(kind, j, n).unwrap();
                    assert!(
                        (v - direct).abs() <= 1e-14 * (1.0 + direct.abs()),
                        "{kind:?} j={j} n={n}: {v} vs {direct}"
                    );
                    assert!(v >= 0.0);
                }
            }
        }
    }

    #[test]
    fn kappa_against_raw_gamma_formula() {
        // direct log-gamma evaluation as an independent route, moderate args
        for d in 2..=7u32 {
            for j in [2u64, 5, 12, 31] {
                for n in (j % 2..=j).step_by(2) {
                    let df = d as f64;
                    let (jf, nf) = (j as f64, n as f64);
                    let ln = lgamma(df - 1.0) - 2.0 * lgamma((df - 1.0) / 2.0)
                        + lgamma((df - 1.0 + jf - nf) / 2.0)
                        + lgamma((df - 1.0 + jf + nf) / 2.0)
                        + lgamma(jf + 1.0)
                        - lgamma((jf - nf + 2.0) / 2.0)
                        - lgamma((jf + nf + 2.0) / 2.0)
                        - lgamma(df - 1.0 + jf);
                    let raw = ln.exp();
                    let v = kernel_value(KernelKind::Kappa(d), j, n).unwrap();
                    assert!(
                        (v - raw).abs() <= 1e-11 * raw.max(1e-300),
                        "d={d} j={j} n={n}: {v} vs {raw}"
                    );
                }
            }
        }
    }

    #[test]
    fn to_one_dim_examples() {
        // d=3, b_1 = 1: cos theta maps to cos theta
        let s = seq(Dimension::Finite(3), &[0.0, 1.0]);
        let one = to_one_dim(&s).unwrap();
        assert!((one.coefficients()[1] - 1.0).abs() < 1e-14);
        assert!(one.coefficients()[0].abs() < 1e-15);

        // infinity, b_2 = 1: cos^2 = (1 + cos 2theta)/2
        let s = seq(Dimension::Infinite, &[0.0, 0.0, 1.0]);
        let one = to_one_dim(&s).unwrap();
        assert!((one.coefficients()[0] - 0.5).abs() < 1e-15);
        assert!((one.coefficients()[2] - 0.5).abs() < 1e-15);
        assert!(one.coefficients()[1].abs() < 1e-15);

        // d=2, b_0 = 1: constant maps to constant
        let s = seq(Dimension::Finite(2), &[1.0]);
        let one = to_one_dim(&s).unwrap();
        assert!((one.coefficients()[0] - 1.0).abs() < 1e-14);

        // d=1 input rejected
        let s = seq(Dimension::Finite(1), &[1.0]);
        assert!(to_one_dim(&s).is_err());
    }

    #[test]
    fn to_one_dim_preserves_parity() {
        let s = seq(Dimension::Finite(4), &[0.0, 0.0, 0.0, 0.0, 1.0]); // even index 4
        let one = to_one_dim(&s).unwrap();
        for (n, &b) in one.coefficients().iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(b, 0.0, "odd index {n} received even mass");
            }
        }
        let s = seq(Dimension::Finite(4), &[0.0, 0.0, 0.0, 1.0, 0.0]); // odd index 3
        let one = to_one_dim(&s).unwrap();
        for (n, &b) in one.coefficients().iter().enumerate() {
            if n % 2 == 0 {
                assert_eq!(b, 0.0, "even index {n} received odd mass");
            }
        }
    }

    #[test]
    fn moment_sums_and_flags() {
        let s = seq(Dimension::Finite(3), &[0.0, 1.0]);
        let m = moment_sum(&s, 2);
        assert_eq!(m.value, 1.0);
        assert!(m.convergent_at_truncation);

        // geometric Poisson-kernel sequence: second moment has closed form
        let delta = 0.4_f64;
        let scale = (1.0 - delta) / (1.0 + delta);
        let coeffs: Vec<f64> = (0..256)
            .map(|n| {
                if n == 0 {
                    scale
                } else {
                    2.0 * scale * delta.powi(n)
                }
            })
            .collect();
        let s = seq(Dimension::Finite(1), &coeffs);
        let m = moment_sum(&s, 2);
        let expect = 2.0 * delta / ((1.0 - delta) * (1.0 - delta));
        assert!((m.value - expect).abs() < 1e-12, "{} vs {expect}", m.value);
        assert!(m.convergent_at_truncation);

        // truncated 1/n^3 prefix of the zeta-normalized sequence: flagged
        let zeta3 = 1.2020569031595942_f64;
        let coeffs: Vec<f64> = (0..128)
            .map(|n| {
                if n == 0 {
                    0.0
                } else {
                    1.0 / ((n * n * n) as f64 * zeta3)
                }
            })
            .collect();
        let s = seq(Dimension::Infinite, &coeffs);
        assert!(s.tail_mass() > 1e-12, "prefix must have visible tail mass");
        let m = moment_sum(&s, 2);
        assert!(
            !m.convergent_at_truncation,
            "harmonic-tail moment must be flagged"
        );
    }

    #[test]
    fn second_derivative_formulas() {
        // the minimizing witness: -psi''(0) = 1/2 exactly, any d
        for d in [1u32, 2, 3, 9] {
            let s = seq(Dimension::Finite(d), &[0.5, 0.5]);
            assert_eq!(second_derivative_at_zero_from_sequence(&s).unwrap(), -0.5);
        }
        let s = seq(Dimension::Finite(5), &[1.0]);
        assert_eq!(second_derivative_at_zero_from_sequence(&s).unwrap(), 0.0);

        // infinity multiquadric sequence matches the closed form
        for &delta in &[0.2, 0.5] {
            let s = multiquadric_infinite_sequence(1.0, delta, 512).unwrap();
            let got = second_derivative_at_zero_from_sequence(&s).unwrap();
            let expect = -2.0 * delta / ((1.0 - delta) * (1.0 - delta));
            assert!(
                (got - expect).abs() < 1e-10 * expect.abs(),
                "{got} vs {expect}"
            );
        }
    }

    #[test]
    fn fourth_derivative_formulas() {
        // b_1 = 1 in d = 3 is cos theta: fourth derivative 1 at zero
        let s = seq(Dimension::Finite(3), &[0.0, 1.0]);
        assert_eq!(fourth_derivative_at_zero_from_sequence(&s).unwrap(), 1.0);
        let s = seq(Dimension::Finite(3), &[1.0]);
        assert_eq!(fourth_derivative_at_zero_from_sequence(&s).unwrap(), 0.0);

        // multiquadric infinity sequence against the even 4th difference
        let psi = model::multiquadric(1.0, 0.3).unwrap();
        let s = multiquadric_infinite_sequence(1.0, 0.3, 512).unwrap();
        let got = fourth_derivative_at_zero_from_sequence(&s).unwrap();
        let h = 1e-2;
        let fd = (2.0 * psi.value(2.0 * h) - 8.0 * psi.value(h) + 6.0 * psi.value(0.0)) / h.powi(4);
        assert!((got - fd).abs() / got.abs() < 1e-3, "{got} vs fd {fd}");
    }

    #[test]
    fn divergence_gate_rejects_heavy_tails() {
        let zeta3 = 1.2020569031595942_f64;
        let coeffs: Vec<f64> = (0..200)
            .map(|n: usize| {
                if n == 0 {
                    0.0
                } else {
                    1.0 / ((n as f64).powi(3) * zeta3)
                }
            })
            .collect();
        // a prefix of the zeta-normalized sequence, so the tail mass is visible
        let s = seq(Dimension::Infinite, &coeffs);
        assert!(matches!(
            fourth_derivative_at_zero_from_sequence(&s),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn corner_bound_values() {
        assert!((corner_bound(1, PI).unwrap() - 1.0).abs() < 1e-15);
        assert!((corner_bound(3, PI).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((corner_bound(1, PI / 2.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(corner_bound(2, PI).is_err());
        assert!(corner_bound(1, 0.0).is_err());
    }

    #[test]
    fn multiquadric_sequence_sums_to_one() {
        for &(tau, delta) in &[(1.0, 0.2), (2.0, 0.5), (3.0, 0.8)] {
            let n = if delta > 0.6 { 4096 } else { 512 };
            let s = multiquadric_infinite_sequence(tau, delta, n).unwrap();
            assert!(s.is_class());
            assert!(s.tail_mass() < 1e-10, "tail {}", s.tail_mass());
            // synthesized value matches the closed form
            let psi = model::multiquadric(tau, delta).unwrap();
            for &theta in &[0.0, 0.3, 1.4, 2.8, PI] {
                let a = synthesize(&s, theta);
                let b = psi.value(theta);
                assert!(
                    (a - b).abs() < 1e-10,
                    "tau={tau} delta={delta} theta={theta}"
                );
            }
        }
    }

    #[test]
    fn hat_one_sequence_matches_quadrature() {
        let c = 1.1;
        let exact = truncated_linear_one_sequence(c, 24).unwrap();
        let psi = model::truncated_linear(c).unwrap();
        let analyzed = analyze(&psi, 1, 23).unwrap();
        for (n, (a, b)) in exact
            .coefficients()
            .iter()
            .zip(analyzed.coefficients().iter())
            .enumerate()
        {
            assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn analyze_flags_unresolvable_integrands() {
        // a discontinuity the quadrature knows nothing about: the doubled
        // rule disagrees and the projection is refused
        let step = IsotropicFunction::new("step", |t: f64| if t < 1.0 { 1.0 } else { 0.0 });
        assert!(matches!(analyze(&step, 3, 16), Err(Error::Quadrature(_))));
    }

    #[test]
    fn negative_coefficients_mark_non_class() {
        let s = seq(Dimension::Finite(1), &[-0.2, 1.2]);
        assert!(!s.is_class());
        assert!(!s.normalized());
        // roundoff negatives are clamped
        let s = seq(Dimension::Finite(1), &[-1e-12, 1.0]);
        assert!(s.is_class());
        assert_eq!(s.coefficients()[0], 0.0);
    }

    #[test]
    fn json_round_trip() {
        let s = seq(Dimension::Finite(3), &[0.25, 0.5, 0.25]);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"dimension\":3"));
        let back: SchoenbergSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back.coefficients(), s.coefficients());

        let s = seq(Dimension::Infinite, &[0.5, 0.25]);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"dimension\":\"inf\""));
        let back: SchoenbergSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back.dimension(), Dimension::Infinite);
        assert!((back.tail_mass() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn synthesized_function_carries_derivative() {
        let s = seq(Dimension::Finite(3), &[0.3, 0.5, 0.2]);
        let f = s.to_function();
        let h = 1e-6;
        for &theta in &[0.5, 1.5, 2.5] {
            let fd = (f.value(theta + h) - f.value(theta - h)) / (2.0 * h);
            let an = f.derivative(theta).unwrap();
            assert!((fd - an).abs() < 1e-6, "theta={theta}: {fd} vs {an}");
        }
    }
}
