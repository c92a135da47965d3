//! Finite-difference stencils on arbitrary nodes (Fornberg weights) and the
//! one-sided derivative estimators built from them.

/// Weights w_i with sum w_i f(x0 + offsets[i]) ~ f^(m)(x0), by Fornberg's
/// recursion. Requires distinct offsets and offsets.len() > m.
pub fn fornberg_weights(m: usize, offsets: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    assert!(n > m, "need more than {m} nodes for derivative order {m}");
    // c[i][k]: weight of node i for derivative order k
    let mut c = vec![vec![0.0_f64; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// One-sided derivative estimate of order `m` at `x`, stepping in the
/// direction `side` (+1.0 right, -1.0 left) with m + 2 nodes, so the
/// estimate is second-order accurate in h.
pub fn one_sided_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, m: usize, side: f64) -> f64 {
    let n = m + 2;
    let offsets: Vec<f64> = (0..n).map(|i| side * h * i as f64).collect();
    let w = fornberg_weights(m, &offsets);
    offsets
        .iter()
        .zip(w.iter())
        .map(|(&o, &wi)| wi * f(x + o))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_classic_stencils() {
        // central first derivative on {-1, 0, 1}: [-1/2, 0, 1/2]
        let w = fornberg_weights(1, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-14);
        assert!(w[1].abs() < 1e-14);
        assert!((w[2] - 0.5).abs() < 1e-14);
        // forward second derivative on {0, 1, 2, 3}: [2, -5, 4, -1]
        let w = fornberg_weights(2, &[0.0, 1.0, 2.0, 3.0]);
        for (got, want) in w.iter().zip([2.0, -5.0, 4.0, -1.0]) {
            assert!((got - want).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn one_sided_estimates_converge() {
        let f = |x: f64| x.sin();
        let x = 1.1_f64;
        for m in 1..=5usize {
            let exact = match m % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            };
            let h = if m >= 4 { 0.05 } else { 0.01 };
            for side in [1.0, -1.0] {
                let est = one_sided_derivative(f, x, h, m, side);
                // one-sided truncation constants grow quickly with the order
                let tol = if m >= 4 { 2e-2 } else { 1e-3 };
                assert!(
                    (est - exact).abs() < tol,
                    "m={m} side={side}: {est} vs {exact}"
                );
            }
        }
    }
}
