//! Finite-j moment sums of the kappa_d and tau conversion kernels, the
//! asymptotic constants c_d(l), and the numerical probe of the conjectured
//! growth of the binomial moment sums.
//!
//! The even-parity tau sums admit exact closed forms (1 - 2^{-2j} C(2j, j),
//! 2j, and 4j(3j-1) for l = 0, 2, 4). The odd-parity sums are often quoted
//! with the same forms, but exact rational evaluation shows their finite-j
//! values are 1, 2j - 1, and (2j-1)(6j-5); both parities share the leading
//! asymptotics, which is what the moment arguments rely on.

use crate::error::{Error, Result};
use crate::schoenberg::{kernel_row, KernelKind};
use crate::special::{lgamma, KahanSum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    #[serde(rename = "even")]
    Even,
    #[serde(rename = "odd")]
    Odd,
}

/// 2 sum_{n=1}^{j} (2n)^l kappa_d(2j, 2n) for even parity,
/// 2 sum_{n=1}^{j} (2n-1)^l kappa_d(2j-1, 2n-1) for odd.
pub fn kappa_moment_sum(d: u32, l: u32, j: u64, parity: Parity) -> Result<f64> {
    if d < 2 {
        return Err(Error::Dimension(format!(
            "kappa moments require d >= 2, got {d}"
        )));
    }
    if j == 0 {
        return Ok(0.0);
    }
    let mut acc = KahanSum::new();
    match parity {
        Parity::Even => {
            let row = kernel_row(KernelKind::Kappa(d), 2 * j)?;
            for (idx, &k) in row.iter().enumerate().skip(1) {
                let m = (2 * idx) as f64;
                acc.add(2.0 * m.powi(l as i32) * k);
            }
        }
        Parity::Odd => {
            let row = kernel_row(KernelKind::Kappa(d), 2 * j - 1)?;
            for (idx, &k) in row.iter().enumerate() {
                let m = (2 * idx + 1) as f64;
                acc.add(2.0 * m.powi(l as i32) * k);
            }
        }
    }
    Ok(acc.value())
}

/// The asymptotic constant c_d(l) with kappa-moment sums ~ c_d(l) j^l,
/// defined by c_{d+2}(l) = d/(d-1) (c_d(l) - c_d(l+2)/4) over the bases
/// c_2(l) = 2^l Gamma(l/2 + 1/2) / (sqrt(pi) Gamma(l/2 + 1)) and
/// c_3(l) = 2^l / (l + 1).
///
/// The d = 2 base carries the 1/sqrt(pi) normalization of the direct
/// Euler-Maclaurin limit; it is the one consistent with total mass 1 at
/// l = 0 and with brute-force kappa_2 sums.
pub fn c_d_constant(d: u32, l: u32) -> Result<f64> {
    match d {
        0 | 1 => Err(Error::Dimension(format!("c_d defined for d >= 2, got {d}"))),
        2 => {
            let lf = l as f64;
            Ok(
                (2.0_f64).powi(l as i32) * (lgamma(lf / 2.0 + 0.5) - lgamma(lf / 2.0 + 1.0)).exp()
                    / PI.sqrt(),
            )
        }
        3 => Ok((2.0_f64).powi(l as i32) / (l as f64 + 1.0)),
        _ => {
            let dm = (d - 2) as f64;
            Ok(dm / (dm - 1.0) * (c_d_constant(d - 2, l)? - c_d_constant(d - 2, l + 2)? / 4.0))
        }
    }
}

/// A tau moment sum together with its exact closed form when one exists
/// (l in {0, 2, 4}).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TauMomentSum {
    pub sum: f64,
    pub closed_form: Option<f64>,
}

fn tau_closed_form(l: u32, j: u64, parity: Parity) -> Option<f64> {
    let jf = j as f64;
    match (l, parity) {
        (0, Parity::Even) => {
            // 1 - 2^{-2j} C(2j, j), with the central value as a stable product
            let mut central = 1.0;
            for i in 1..=j {
                central *= (2 * i - 1) as f64 / (2 * i) as f64;
            }
            Some(1.0 - central)
        }
        (0, Parity::Odd) => Some(1.0),
        (2, Parity::Even) => Some(2.0 * jf),
        (2, Parity::Odd) => Some(2.0 * jf - 1.0),
        (4, Parity::Even) => Some(4.0 * jf * (3.0 * jf - 1.0)),
        (4, Parity::Odd) => Some((2.0 * jf - 1.0) * (6.0 * jf - 5.0)),
        _ => None,
    }
}

/// 2 sum (2n)^l tau(2j, 2n) (even) or 2 sum (2n-1)^l tau(2j-1, 2n-1) (odd),
/// with the closed form attached for l in {0, 2, 4}.
pub fn tau_moment_sum(l: u32, j: u64, parity: Parity) -> TauMomentSum {
    let mut acc = KahanSum::new();
    if j >= 1 {
        match parity {
            Parity::Even => {
                let row = kernel_row(KernelKind::Tau, 2 * j).expect("even args");
                for (idx, &t) in row.iter().enumerate().skip(1) {
                    let m = (2 * idx) as f64;
                    acc.add(2.0 * m.powi(l as i32) * t);
                }
            }
            Parity::Odd => {
                let row = kernel_row(KernelKind::Tau, 2 * j - 1).expect("odd args");
                for (idx, &t) in row.iter().enumerate() {
                    let m = (2 * idx + 1) as f64;
                    acc.add(2.0 * m.powi(l as i32) * t);
                }
            }
        }
    }
    TauMomentSum {
        sum: acc.value(),
        closed_form: tau_closed_form(l, j, parity),
    }
}

fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// The tau moment sum in exact rational arithmetic (big-integer binomials).
pub fn tau_moment_exact(l: u32, j: u64, parity: Parity) -> BigRational {
    let mut numerator = BigInt::from(0);
    match parity {
        Parity::Even => {
            for n in 1..=j {
                numerator += BigInt::from(2 * n).pow(l) * big_binomial(2 * j, j + n);
            }
            // 2 * sum / 2^{2j}
            BigRational::new(numerator * 2, BigInt::from(2).pow(2 * j as u32))
        }
        Parity::Odd => {
            for n in 1..=j {
                numerator += BigInt::from(2 * n - 1).pow(l) * big_binomial(2 * j - 1, j + n - 1);
            }
            BigRational::new(numerator * 2, BigInt::from(2).pow(2 * j as u32 - 1))
        }
    }
}

/// The exact closed form as a rational, for l in {0, 2, 4}.
pub fn tau_closed_form_exact(l: u32, j: u64, parity: Parity) -> Option<BigRational> {
    let ji = BigInt::from(j);
    match (l, parity) {
        (0, Parity::Even) => {
            let pow = BigInt::from(2).pow(2 * j as u32);
            Some(BigRational::new(&pow - big_binomial(2 * j, j), pow))
        }
        (0, Parity::Odd) => Some(BigRational::from_integer(BigInt::from(1))),
        (2, Parity::Even) => Some(BigRational::from_integer(2 * ji)),
        (2, Parity::Odd) => Some(BigRational::from_integer(2 * ji - 1)),
        (4, Parity::Even) => Some(BigRational::from_integer(4 * &ji * (3 * &ji - 1))),
        (4, Parity::Odd) => Some(BigRational::from_integer((2 * &ji - 1) * (6 * &ji - 5))),
        _ => None,
    }
}

/// Relative residual of the dimension recursion
/// kappa_{d+2}(2j, 2n) = d/(d-1) ((d-1+2j)/(d+2j)
///                       - (2n)^2/((d-1+2j)(d+2j))) kappa_d(2j, 2n)
/// and its odd-argument analogue.
pub fn kappa_recursion_residual(d: u32, j: u64, n: u64, parity: Parity) -> Result<f64> {
    let df = d as f64;
    let (jj, nn) = match parity {
        Parity::Even => (2 * j, 2 * n),
        Parity::Odd => (2 * j - 1, 2 * n - 1),
    };
    let base = crate::schoenberg::kernel_value(KernelKind::Kappa(d), jj, nn)?;
    let lifted = crate::schoenberg::kernel_value(KernelKind::Kappa(d + 2), jj, nn)?;
    // both parities reduce to the same expression in the raw arguments
    let (jf, nf) = (jj as f64, nn as f64);
    let factor =
        df / (df - 1.0) * ((df - 1.0 + jf) / (df + jf) - nf * nf / ((df - 1.0 + jf) * (df + jf)));
    let predicted = factor * base;
    Ok((lifted - predicted).abs() / lifted.abs().max(1e-300))
}

/// Trajectory of moment-sum ratios S(j)/j^k on a geometric j-grid, with
/// successive-difference stabilization diagnostics. No limit constant is
/// asserted: the probe reports drift, mirroring the conjectural status.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticProbe {
    pub label: String,
    pub power: u32,
    pub j_grid: Vec<u64>,
    pub even_values: Vec<f64>,
    pub odd_values: Vec<f64>,
    pub even_ratios: Vec<f64>,
    pub odd_ratios: Vec<f64>,
    pub target: Option<f64>,
    /// |r_{i+1} - r_i| / |r_{i+1}| between consecutive grid points
    pub even_successive_drift: Vec<f64>,
    pub odd_successive_drift: Vec<f64>,
    /// largest successive drift among grid points in [j_max/10, j_max]
    pub last_decade_drift_even: f64,
    pub last_decade_drift_odd: f64,
    /// |even/odd - 1| at j_max
    pub even_odd_agreement: f64,
}

/// Geometric grid from ~10 up to j_max, 12 points per decade, built
/// downward from j_max so that j_max and j_max/10 always lie on the grid.
fn geometric_grid(j_max: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut m = 0;
    loop {
        let j = (j_max as f64 * 10f64.powf(-(m as f64) / 12.0)).round() as u64;
        if j < 10 {
            break;
        }
        if grid.last() != Some(&j) {
            grid.push(j);
        }
        m += 1;
    }
    grid.reverse();
    grid
}

/// Probe the conjectured growth 2^{-2j+1} sum (2n)^{2k} C(2j, j+n) ~ c(k) j^k
/// (and the odd-argument analogue) for a given k.
pub fn conjecture_probe(k: u32, j_max: u64) -> AsymptoticProbe {
    let grid = geometric_grid(j_max);
    let mut even_values = Vec::with_capacity(grid.len());
    let mut odd_values = Vec::with_capacity(grid.len());
    let mut even_ratios = Vec::with_capacity(grid.len());
    let mut odd_ratios = Vec::with_capacity(grid.len());
    for &j in &grid {
        let e = tau_moment_sum(2 * k, j, Parity::Even).sum;
        let o = tau_moment_sum(2 * k, j, Parity::Odd).sum;
        let scale = (j as f64).powi(k as i32);
        even_values.push(e);
        odd_values.push(o);
        even_ratios.push(e / scale);
        odd_ratios.push(o / scale);
    }
    let drift = |ratios: &[f64]| -> Vec<f64> {
        ratios
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / w[1].abs().max(1e-300))
            .collect()
    };
    let even_successive_drift = drift(&even_ratios);
    let odd_successive_drift = drift(&odd_ratios);
    let decade_floor = j_max / 10;
    let decade_max = |drifts: &[f64]| -> f64 {
        drifts
            .iter()
            .zip(grid.windows(2))
            .filter(|(_, w)| w[0] >= decade_floor)
            .map(|(d, _)| *d)
            .fold(0.0, f64::max)
    };
    let last_decade_drift_even = decade_max(&even_successive_drift);
    let last_decade_drift_odd = decade_max(&odd_successive_drift);
    let even_odd_agreement = {
        let e = *even_ratios.last().unwrap_or(&f64::NAN);
        let o = *odd_ratios.last().unwrap_or(&f64::NAN);
        (e / o - 1.0).abs()
    };
    AsymptoticProbe {
        label: format!("conjectured j^{k} growth of order-2k binomial moments"),
        power: k,
        j_grid: grid,
        even_values,
        odd_values,
        even_ratios,
        odd_ratios,
        target: None,
        even_successive_drift,
        odd_successive_drift,
        last_decade_drift_even,
        last_decade_drift_odd,
        even_odd_agreement,
    }
}
