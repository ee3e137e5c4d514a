//! Closed-form discrepancy data for Hermitian matrices.
//!
//! With eigenvalues λ₁ ≥ … ≥ λ_n, the values pair up: δ_{2k−1} = δ_{2k} =
//! (λ_k − λ_{n−k+1})/2 with minimizing shift at the matching midpoint, and
//! for odd n the trailing value is exactly zero with the median eigenvalue
//! as shift. The maximizing frames mix the outer eigenvector pairs.

use super::{DiscrepancyResult, KDiagnostic, SolverPath};
use crate::majorize::SpectrumVector;
use crate::matcore::{herm_eig, ComplexMatrix};
use crate::Result;
use num_complex::Complex64;

/// Half-differences and midpoints of the outer eigenvalue pairs, plus the
/// median eigenvalue when one is left over.
pub(crate) struct SpreadParts {
    pub half_spreads: Vec<f64>,
    pub midpoints: Vec<f64>,
    pub median: Option<f64>,
}

/// `lambda` must be sorted nonincreasing.
pub(crate) fn spread_parts(lambda: &[f64]) -> SpreadParts {
    let n = lambda.len();
    let m = n / 2;
    let half_spreads = (0..m).map(|i| 0.5 * (lambda[i] - lambda[n - 1 - i])).collect();
    let midpoints = (0..m).map(|i| 0.5 * (lambda[i] + lambda[n - 1 - i])).collect();
    let median = if n % 2 == 1 { Some(lambda[n / 2]) } else { None };
    SpreadParts {
        half_spreads,
        midpoints,
        median,
    }
}

/// Discrepancy values of a Hermitian matrix, in closed form.
pub fn discrepancy_values_hermitian(a: &ComplexMatrix) -> Result<DiscrepancyResult> {
    let eig = herm_eig(a)?;
    let n = eig.values.len();
    let parts = spread_parts(&eig.values);

    let mut deltas = Vec::with_capacity(n);
    let mut alphas = Vec::with_capacity(n);
    for (d, mid) in parts.half_spreads.iter().zip(&parts.midpoints) {
        for _ in 0..2 {
            deltas.push(*d);
            alphas.push(Complex64::new(*mid, 0.0));
        }
    }
    if let Some(median) = parts.median {
        deltas.push(0.0);
        alphas.push(Complex64::new(median, 0.0));
    }

    let values = SpectrumVector::new(deltas)?;
    let mut acc = 0.0;
    let partial_norms = values
        .values()
        .iter()
        .map(|d| {
            acc += d;
            acc
        })
        .collect();
    let diagnostics = vec![
        KDiagnostic {
            iterations: 0,
            residual: 0.0,
            path: SolverPath::Hermitian,
        };
        n
    ];
    Ok(DiscrepancyResult {
        values,
        partial_norms,
        alphas,
        diagnostics,
    })
}

/// Orthonormal vector pairs maximizing every prefix of the discrepancy sum
/// for a Hermitian matrix. Pair 2k−1 mixes the k-th largest and k-th
/// smallest eigenvectors; pair 2k swaps the two mixtures. The lists have
/// 2⌊n/2⌋ entries: for odd n the final value is zero, so no certificate
/// vector is needed (none exists within the orthonormality constraints).
pub fn hermitian_discrepancy_frames(
    a: &ComplexMatrix,
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let eig = herm_eig(a)?;
    let n = eig.values.len();
    let m = n / 2;
    let s = 1.0 / 2.0f64.sqrt();

    let mut xs = Vec::with_capacity(2 * m);
    let mut ys = Vec::with_capacity(2 * m);
    for k in 0..m {
        let vk = eig.vectors.column(k);
        let vn = eig.vectors.column(n - 1 - k);
        let x: Vec<Complex64> = vk
            .iter()
            .zip(&vn)
            .map(|(p, q)| (-p + q).scale(s))
            .collect();
        let y: Vec<Complex64> = vk
            .iter()
            .zip(&vn)
            .map(|(p, q)| (-p - q).scale(s))
            .collect();
        xs.push(x.clone());
        ys.push(y.clone());
        xs.push(y);
        ys.push(x);
    }
    Ok((xs, ys))
}
