//! Independent upper-bound oracle for the discrepancy norms.
//!
//! Evaluates the shifted Ky-Fan norm on a dense square grid over the
//! bounding disc, then shrinks a 3x3 pattern around the best point. Kept
//! deliberately separate from the production solver: no shared search code,
//! and the singular values are taken as square roots of Gram-matrix
//! eigenvalues instead of going through the SVD kernel. Because the
//! objective is k-Lipschitz in the shift, the plain grid minimum is already
//! within k·h·√2/2 of the true minimum (h = grid spacing); the shrink phase
//! only tightens that, and the result is always an upper bound.

use crate::matcore::{herm_eig, ComplexMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

/// Sum of the k largest singular values of `A − αI`, via the eigenvalues of
/// the Gram matrix (A − αI)*(A − αI).
fn shifted_kyfan_gram(a: &ComplexMatrix, alpha: Complex64, k: usize) -> Result<f64> {
    let b = a.shifted(alpha)?;
    let gram = b.adjoint().mul(&b)?;
    let eig = herm_eig(&gram)?;
    Ok(eig.values[..k].iter().map(|&x| x.max(0.0).sqrt()).sum())
}

/// Brute-force estimate of the k-th discrepancy norm on a
/// `resolution x resolution` grid, followed by local shrinking.
pub fn grid_oracle_discrepancy_norm(
    a: &ComplexMatrix,
    k: usize,
    resolution: usize,
) -> Result<f64> {
    a.check_square()?;
    let n = a.rows();
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "k must be between 1 and {n}, got {k}"
        )));
    }
    if resolution < 64 {
        return Err(Error::Domain(format!(
            "resolution must be at least 64, got {resolution}"
        )));
    }

    let mu = a.trace()? / n as f64;
    let sigma1 = shifted_kyfan_gram(a, mu, 1)?;
    let radius = 2.0 * sigma1;
    let mut best_val = shifted_kyfan_gram(a, mu, k)?;
    let mut best = mu;
    if radius <= 1e-14 * a.fro_norm().max(1.0) {
        return Ok(best_val);
    }

    let h = 2.0 * radius / (resolution - 1) as f64;
    for i in 0..resolution {
        for j in 0..resolution {
            let z = mu + Complex64::new(-radius + i as f64 * h, -radius + j as f64 * h);
            if (z - mu).norm() > radius + h {
                continue;
            }
            let v = shifted_kyfan_gram(a, z, k)?;
            if v < best_val {
                best_val = v;
                best = z;
            }
        }
    }

    let mut w = h;
    let floor = 1e-12 * radius.max(1.0);
    while w > floor {
        let mut moved = false;
        for di in -1i32..=1 {
            for dj in -1i32..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let z = best + Complex64::new(di as f64 * w, dj as f64 * w);
                let v = shifted_kyfan_gram(a, z, k)?;
                if v < best_val {
                    best_val = v;
                    best = z;
                    moved = true;
                }
            }
        }
        if !moved {
            w *= 0.5;
        }
    }
    Ok(best_val)
}
