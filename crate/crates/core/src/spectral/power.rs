use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::laplacian::LaplacianMatrix;

pub const POWER_REL_TOL: f64 = 1e-6;
pub const POWER_MAX_ITER: usize = 500;
/// Inflation applied to a converged Rayleigh quotient.
pub const LAMBDA_SAFETY: f64 = 1.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaMaxEstimate {
    /// Last Rayleigh quotient; never above the true `λ_max`.
    pub rayleigh: f64,
    /// Upper estimate used as the Chebyshev interval end.
    pub bound: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Power iteration on `L` from a fixed pseudo-random start.
pub fn power_iteration(l: &LaplacianMatrix, max_iter: usize, rel_tol: f64) -> LambdaMaxEstimate {
    let n = l.n();
    let safe = 2.0 * l.max_degree();
    if n == 0 || safe == 0.0 {
        return LambdaMaxEstimate {
            rayleigh: 0.0,
            bound: 0.0,
            converged: true,
            iterations: 0,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a3b);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut rayleigh = 0.0;
    for it in 1..=max_iter {
        l.matvec(&x, &mut y);
        let next: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return LambdaMaxEstimate {
                rayleigh: 0.0,
                bound: safe,
                converged: false,
                iterations: it,
            };
        }
        let done = it > 1 && (next - rayleigh).abs() <= rel_tol * next.abs();
        rayleigh = next;
        if done {
            return LambdaMaxEstimate {
                rayleigh,
                bound: (LAMBDA_SAFETY * rayleigh).min(safe),
                converged: true,
                iterations: it,
            };
        }
        x.iter_mut().zip(&y).for_each(|(a, b)| *a = b / norm);
    }
    LambdaMaxEstimate {
        rayleigh,
        bound: safe,
        converged: false,
        iterations: max_iter,
    }
}

/// Upper estimate of the largest Laplacian eigenvalue: `1.02 ×` the
/// converged Rayleigh quotient, capped by `2 · max_degree`, which is also
/// the fallback when power iteration stalls.
pub fn estimate_lambda_max(l: &LaplacianMatrix) -> f64 {
    power_iteration(l, POWER_MAX_ITER, POWER_REL_TOL).bound
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}
