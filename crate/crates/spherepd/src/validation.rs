//! Empirical positive-definiteness certification via Gram-matrix spectra on
//! sampled sphere points, class-membership reporting for sequences, and
//! one-sided differentiability probes.

use crate::error::Result;
use crate::model::IsotropicFunction;
use crate::schoenberg::{SchoenbergSequence, TOL_COEFF};
use crate::stencil::one_sided_derivative;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::f64::consts::PI;

/// Gram-matrix spectral check outcome. A finite sample can only certify
/// consistency with positive definiteness, never membership, so the passing
/// verdict reads "pd-consistent".
#[derive(Debug, Clone, Serialize)]
pub struct PDCheckReport {
    pub dimension: u32,
    pub n_points: usize,
    pub seed: u64,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "pd-consistent")]
    PdConsistent,
    #[serde(rename = "pd-violated")]
    PdViolated,
}

/// n distinct unit vectors on S^d (in R^{d+1}), from normalized Gaussians
/// drawn from a seeded deterministic generator.
pub fn sample_sphere(d: u32, n: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(n >= 2, "need at least two points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = (d + 1) as usize;
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n);
    while points.len() < n {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        if points.iter().any(|p| p == &v) {
            continue; // resample exact duplicates
        }
        points.push(v);
    }
    points
}

/// Assemble the Gram matrix G_ij = psi(arccos <x_i, x_j>) on a seeded
/// sample and test its minimum eigenvalue against -1e-8 n.
pub fn pd_check(psi: &IsotropicFunction, d: u32, n: usize, seed: u64) -> Result<PDCheckReport> {
    let points = sample_sphere(d, n, seed);
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = points[i]
                .iter()
                .zip(points[j].iter())
                .map(|(a, b)| a * b)
                .sum();
            let theta = dot.clamp(-1.0, 1.0).acos();
            let v = psi.value(theta);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let min_eigenvalue = min_symmetric_eigenvalue(&gram);
    let tolerance = 1e-8 * n as f64;
    let verdict = if min_eigenvalue < -tolerance {
        Verdict::PdViolated
    } else {
        Verdict::PdConsistent
    };
    Ok(PDCheckReport {
        dimension: d,
        n_points: n,
        seed,
        min_eigenvalue,
        tolerance,
        verdict,
    })
}

/// Minimum eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Class-membership bookkeeping for a truncated sequence. The parity counts
/// feed the necessary condition for strict positive definiteness (infinitely
/// many strictly positive coefficients of each parity), which a finite
/// truncation can support but never certify.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub nonnegative: bool,
    pub normalized: bool,
    pub tail_mass: f64,
    pub positive_even_count: usize,
    pub positive_odd_count: usize,
    pub truncation: usize,
    pub caveat: &'static str,
}

pub fn class_report(seq: &SchoenbergSequence) -> ClassReport {
    let mut even = 0;
    let mut odd = 0;
    for (n, &b) in seq.coefficients().iter().enumerate() {
        if b > TOL_COEFF {
            if n % 2 == 0 {
                even += 1;
            } else {
                odd += 1;
            }
        }
    }
    ClassReport {
        nonnegative: seq.is_class(),
        normalized: seq.normalized(),
        tail_mass: seq.tail_mass(),
        positive_even_count: even,
        positive_odd_count: odd,
        truncation: seq.len(),
        caveat: "counts are at finite truncation; infinitude cannot be certified",
    }
}

/// One derivative order of the probe: one-sided estimates at two step
/// sizes and the convergence verdict.
#[derive(Debug, Clone, Serialize)]
pub struct OrderProbe {
    pub order: u32,
    pub left: f64,
    pub right: f64,
    pub gap_coarse: f64,
    pub gap_fine: f64,
    pub converged: bool,
}

/// Differentiability probe report: per-order results and the first order at
/// which the one-sided limits fail to agree.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub theta0: f64,
    pub probes: Vec<OrderProbe>,
    pub first_failing_order: Option<u32>,
}

fn probe_step(order: u32) -> f64 {
    match order {
        1 | 2 => 0.02,
        3 => 0.03,
        _ => 0.04,
    }
}

/// Probe one-sided derivatives of orders 1..=max_order (max 5) at theta0.
///
/// For each order the left and right one-sided estimates are computed at a
/// coarse step, a 2x and a 4x refinement. At a point where the derivative
/// exists the left-right gap is pure truncation noise and shrinks at least
/// linearly with the step; a genuine jump leaves the gap invariant. An
/// order passes when the finest gap either falls below an absolute floor or
/// keeps shrinking under refinement.
pub fn differentiability_probe(
    psi: &IsotropicFunction,
    theta0: f64,
    max_order: u32,
) -> Result<ProbeReport> {
    let max_order = max_order.min(5);
    let mut probes = Vec::new();
    let mut first_failing = None;
    for order in 1..=max_order {
        let h = probe_step(order);
        let margin = (order as usize + 2) as f64 * h;
        if theta0 - margin < 0.0 || theta0 + margin > PI {
            return Err(crate::error::Error::StepUnderflow(format!(
                "theta0 = {theta0} too close to an endpoint for order {order} (margin {margin})"
            )));
        }
        let gap_at = |h: f64| {
            let left = one_sided_derivative(|t| psi.value(t), theta0, h, order as usize, -1.0);
            let right = one_sided_derivative(|t| psi.value(t), theta0, h, order as usize, 1.0);
            (left, right, (left - right).abs())
        };
        let (_, _, gap_coarse) = gap_at(h);
        let (_, _, gap_mid) = gap_at(h / 2.0);
        let (left, right, gap_fine) = gap_at(h / 4.0);
        let floor = 1e-6 * (1.0 + left.abs() + right.abs());
        let converged = gap_fine <= floor || gap_fine <= 0.7 * gap_mid;
        if !converged && first_failing.is_none() {
            first_failing = Some(order);
        }
        probes.push(OrderProbe {
            order,
            left,
            right,
            gap_coarse,
            gap_fine,
            converged,
        });
    }
    Ok(ProbeReport {
        theta0,
        probes,
        first_failing_order: first_failing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model;
    use crate::schoenberg::{self, Dimension};

    #[test]
    fn sampled_points_are_unit_and_deterministic() {
        let pts = sample_sphere(1, 4, 7);
        for p in &pts {
            let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-14);
        }
        let again = sample_sphere(1, 4, 7);
        assert_eq!(pts, again);
        let other = sample_sphere(1, 4, 8);
        assert_ne!(pts, other);
    }

    #[test]
    fn sample_mean_shrinks_with_n() {
        let pts = sample_sphere(2, 1000, 1);
        let mut mean = [0.0_f64; 3];
        for p in &pts {
            for (m, x) in mean.iter_mut().zip(p.iter()) {
                *m += x;
            }
        }
        let norm: f64 = mean
            .iter()
            .map(|x| (x / 1000.0).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(norm < 0.1, "empirical mean norm {norm}");
    }

    #[test]
    fn all_ones_gram_has_zero_min_eigenvalue() {
        let report = pd_check(&model::constant_one(), 2, 20, 3).unwrap();
        assert!(report.min_eigenvalue.abs() < 1e-10);
        assert_eq!(report.verdict, Verdict::PdConsistent);
    }

    #[test]
    fn multiquadric_is_pd_consistent() {
        let psi = model::multiquadric(1.0, 0.5).unwrap();
        let report = pd_check(&psi, 2, 60, 1).unwrap();
        assert_eq!(report.verdict, Verdict::PdConsistent);
        assert!(report.min_eigenvalue > -report.tolerance);
    }

    #[test]
    fn shifted_cosine_is_pd_violated() {
        let bad = IsotropicFunction::new("1.2cos-0.2", |t: f64| 1.2 * t.cos() - 0.2);
        let report = pd_check(&bad, 1, 40, 1).unwrap();
        assert_eq!(report.verdict, Verdict::PdViolated);
        assert!(
            report.min_eigenvalue < -1.0,
            "clearly negative: {}",
            report.min_eigenvalue
        );
    }

    #[test]
    fn spectrum_is_permutation_invariant() {
        let psi = model::multiquadric(1.0, 0.4).unwrap();
        let points = sample_sphere(2, 30, 5);
        let build = |order: &[usize]| {
            let mut g = DMatrix::<f64>::zeros(30, 30);
            for (a, &i) in order.iter().enumerate() {
                for (b, &j) in order.iter().enumerate() {
                    let dot: f64 = points[i]
                        .iter()
                        .zip(points[j].iter())
                        .map(|(x, y)| x * y)
                        .sum();
                    g[(a, b)] = psi.value(dot.clamp(-1.0, 1.0).acos());
                }
            }
            g
        };
        let id: Vec<usize> = (0..30).collect();
        let mut rev = id.clone();
        rev.reverse();
        let e1 = min_symmetric_eigenvalue(&build(&id));
        let e2 = min_symmetric_eigenvalue(&build(&rev));
        assert!((e1 - e2).abs() < 1e-10, "{e1} vs {e2}");
    }

    #[test]
    fn class_report_counts() {
        // truncation short enough that every coefficient clears the
        // strict-positivity threshold
        let s = schoenberg::multiquadric_infinite_sequence(1.0, 0.4, 48).unwrap();
        let rep = class_report(&s);
        assert!(rep.nonnegative);
        assert_eq!(rep.positive_even_count, 24);
        assert_eq!(rep.positive_odd_count, 24);

        let s = SchoenbergSequence::new(Dimension::Finite(3), vec![0.0, 1.0]);
        let rep = class_report(&s);
        assert_eq!(rep.positive_even_count, 0);
        assert_eq!(rep.positive_odd_count, 1);

        let s = SchoenbergSequence::new(Dimension::Finite(3), vec![0.5, 0.5]);
        let rep = class_report(&s);
        assert_eq!((rep.positive_even_count, rep.positive_odd_count), (1, 1));
    }

    #[test]
    fn probe_flags_hat_kink_at_first_order() {
        let c = 1.3;
        let psi = model::truncated_linear(c).unwrap();
        let report = differentiability_probe(&psi, c, 3).unwrap();
        assert_eq!(report.first_failing_order, Some(1));
    }

    #[test]
    fn probe_wendland_c2_cutoff() {
        // (1 + 4s)(1-s)^4 has continuous derivatives through order 3 at the
        // cutoff; the fourth jumps by 120/c^4
        let c = PI / 2.0;
        let psi = model::wendland(model::WendlandKind::C2, 4.0, c).unwrap();
        let report = differentiability_probe(&psi, c, 5).unwrap();
        assert_eq!(
            report.first_failing_order,
            Some(4),
            "probes: {:#?}",
            report.probes
        );
    }

    #[test]
    fn probe_passes_smooth_functions() {
        let psi = model::multiquadric(1.0, 0.3).unwrap();
        for &theta in &[0.7, 1.4, 2.2] {
            let report = differentiability_probe(&psi, theta, 5).unwrap();
            assert_eq!(report.first_failing_order, None, "theta={theta}");
        }
    }

    #[test]
    fn probe_passes_synthesized_sequences() {
        let s = SchoenbergSequence::new(Dimension::Finite(3), vec![0.4, 0.3, 0.2, 0.1]);
        let f = s.to_function();
        for i in 1..8 {
            let theta = 0.4 + (PI - 0.8) * i as f64 / 8.0;
            let report = differentiability_probe(&f, theta, 5).unwrap();
            assert_eq!(report.first_failing_order, None, "theta={theta}");
        }
    }

    #[test]
    fn probe_guards_endpoints() {
        let psi = model::multiquadric(1.0, 0.3).unwrap();
        assert!(differentiability_probe(&psi, 0.01, 3).is_err());
    }
}
