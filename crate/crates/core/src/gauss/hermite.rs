//! Fixed-node Gauss-Hermite quadrature for standard-Gaussian expectations.
//!
//! Nodes are roots of the physicists' Hermite polynomial found by Newton
//! iteration on the orthonormal three-term recurrence, then rescaled by
//! sqrt(2) so that `E[g(Y)], Y ~ N(0,1)` is a plain weighted sum with weights
//! summing to one. Exact for polynomials of degree <= 2*nodes - 1.

use crate::{Error, Result};

/// A quadrature rule for E[g(Y)] with Y ~ N(0,1); weights sum to 1.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Build an `n`-node rule.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "gauss-hermite rule needs at least one node".into(),
            ));
        }
        let (x, w) = physicists_rule(n);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        // Y = sqrt(2) * X under weight exp(-x^2); normalize total mass to 1.
        let nodes = x.iter().map(|&xi| std::f64::consts::SQRT_2 * xi).collect();
        let weights = w.iter().map(|&wi| wi / sqrt_pi).collect();
        Ok(Self { nodes, weights })
    }

    /// E[g(Y)] for Y ~ N(0,1); errors if g is non-finite at a node.
    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&y, &w) in self.nodes.iter().zip(&self.weights) {
            let v = g(y);
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(format!(
                    "integrand returned {v} at node {y}"
                )));
            }
            sum += w * v;
        }
        Ok(sum)
    }
}

/// Fixed-node Gauss-Hermite estimate of E[g(Y)], Y ~ N(0,1).
pub fn gauss_expect<F: Fn(f64) -> f64>(g: F, nodes: usize) -> Result<f64> {
    GaussHermite::new(nodes)?.expect(g)
}

/// Nodes/weights for weight function exp(-x^2) (physicists' convention),
/// ascending nodes, weights summing to sqrt(pi).
fn physicists_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        // Initial guesses for roots in descending order (largest first).
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[n - 1],
            3 => 1.91 * z - 0.91 * x[n - 2],
            _ => 2.0 * z - x[n - i + 1],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // Orthonormal recurrence: p_{j}(z) with p_0 = pi^{-1/4}.
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = (j + 1) as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = 2.0 / (pp * pp);
        w[i] = w[n - 1 - i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}
