use ndarray::{ArrayView1, ArrayView2};

use crate::error::{Error, Result};

fn rbf(a: ArrayView1<f64>, b: ArrayView1<f64>, sigma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2 / (sigma * sigma)).exp()
}

/// Unbiased squared-MMD estimate between two samples (one point per row)
/// under the Gaussian kernel `exp(-‖x - y‖² / σ²)`. Can be negative.
pub fn kernel_mmd_baseline(x: ArrayView2<f64>, y: ArrayView2<f64>, sigma: f64) -> Result<f64> {
    let (nx, ny) = (x.nrows(), y.nrows());
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput(format!(
            "kernel MMD needs at least 2 samples per side, got {nx} and {ny}"
        )));
    }
    if x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch {
            what: "sample dimension",
            expected: x.ncols(),
            found: y.ncols(),
        });
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "bandwidth must be positive, got {sigma}"
        )));
    }
    let within = |s: ArrayView2<f64>| -> f64 {
        let n = s.nrows();
        let mut total = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                total += rbf(s.row(i), s.row(j), sigma);
            }
        }
        2.0 * total / (n * (n - 1)) as f64
    };
    let mut cross = 0.0;
    for a in x.rows() {
        for b in y.rows() {
            cross += rbf(a, b, sigma);
        }
    }
    Ok(within(x) + within(y) - 2.0 * cross / (nx * ny) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    /// Triple-loop oracle over ordered pairs.
    fn oracle(x: &Array2<f64>, y: &Array2<f64>, sigma: f64) -> f64 {
        let k = |a: ArrayView1<f64>, b: ArrayView1<f64>| {
            (-(&a - &b).mapv(|v| v * v).sum() / (sigma * sigma)).exp()
        };
        let mut kxx = 0.0;
        for i in 0..x.nrows() {
            for j in 0..x.nrows() {
                if i != j {
                    kxx += k(x.row(i), x.row(j));
                }
            }
        }
        let mut kyy = 0.0;
        for i in 0..y.nrows() {
            for j in 0..y.nrows() {
                if i != j {
                    kyy += k(y.row(i), y.row(j));
                }
            }
        }
        let mut kxy = 0.0;
        for i in 0..x.nrows() {
            for j in 0..y.nrows() {
                kxy += k(x.row(i), y.row(j));
            }
        }
        let (n, m) = (x.nrows() as f64, y.nrows() as f64);
        kxx / (n * (n - 1.0)) + kyy / (m * (m - 1.0)) - 2.0 * kxy / (n * m)
    }

    #[test]
    fn matches_brute_force() {
        let x = array![[0.0, 0.1], [0.3, -0.2], [1.0, 0.4]];
        let y = array![[0.5, 0.5], [0.1, 0.0], [-0.3, 0.2], [0.0, 1.0]];
        let v = kernel_mmd_baseline(x.view(), y.view(), 0.8).unwrap();
        assert!((v - oracle(&x, &y, 0.8)).abs() < 1e-14);
        let same = kernel_mmd_baseline(x.view(), x.view(), 0.8).unwrap();
        assert!((same - oracle(&x, &x, 0.8)).abs() < 1e-14);
        // unbiased: identical samples give a negative value here
        assert!(same < 0.0);
    }

    #[test]
    fn separated_clusters_approach_two() {
        let x = array![[0.0], [0.0]];
        let y = array![[100.0], [100.0]];
        let v = kernel_mmd_baseline(x.view(), y.view(), 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wide_bandwidth_goes_to_zero() {
        let x = array![[0.0], [1.0], [2.0]];
        let y = array![[5.0], [7.0]];
        let v = kernel_mmd_baseline(x.view(), y.view(), 1e6).unwrap();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn too_few_samples() {
        let x = array![[0.0]];
        let y = array![[1.0], [2.0]];
        assert!(kernel_mmd_baseline(x.view(), y.view(), 1.0).is_err());
    }
}
