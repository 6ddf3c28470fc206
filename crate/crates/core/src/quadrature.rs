//! Gauss–Legendre rules on a bounded interval.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫_lo^hi f` with the `n`-point rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        acc += wi * f(mid + half * xi);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 32, 64] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        // 64 nodes integrate degree 127 exactly.
        let v = integrate(|x| x.powi(20), 0.0, 1.0, 64);
        assert!((v - 1.0 / 21.0).abs() < 1e-14);
        let v = integrate(|x| x.exp(), -1.0, 2.0, 64);
        assert!((v - (2f64.exp() - (-1f64).exp())).abs() < 1e-13);
    }
}
