//! Centrosymmetric X matrices and the `A = U X V*` decomposition of a
//! Hermitian matrix.
//!
//! An X matrix is nonzero only on the main diagonal and the anti-diagonal,
//! with mirrored entries conjugated. Every Hermitian matrix factors as
//! `U X V*` with unitary `U`, `V` satisfying `U*V = J` (the exchange
//! matrix): rotate the eigenbasis by the quarter-turn plane rotation. The
//! diagonal of the resulting X carries the odd-indexed discrepancy values in
//! modulus, and its anti-diagonal carries the minimizing shifts.

use crate::matcore::{herm_eig, rotation_matrix, special_matrix, ComplexMatrix, SpecialMatrix};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

/// Parameters of a centrosymmetric X matrix.
///
/// For i < m = ⌊n/2⌋ the realized matrix has `diag_params[i]` at (i, i) and
/// its conjugate at the mirrored diagonal cell, `anti_params[i]` at
/// (n−1−i, i) and its conjugate at the mirrored anti-diagonal cell; odd
/// sizes put `central` in the middle.
#[derive(Debug, Clone, PartialEq)]
pub struct CXMatrix {
    pub n: usize,
    pub diag_params: Vec<Complex64>,
    pub anti_params: Vec<Complex64>,
    pub central: Option<Complex64>,
}

/// Realizes the X pattern described by `params`.
pub fn cx_matrix(params: &CXMatrix) -> Result<ComplexMatrix> {
    let n = params.n;
    if n == 0 {
        return Err(Error::Domain("X matrices need positive size".into()));
    }
    let m = n / 2;
    if params.diag_params.len() != m || params.anti_params.len() != m {
        return Err(Error::Domain(format!(
            "expected {m} diagonal and {m} anti-diagonal parameters for n={n}, \
             got {} and {}",
            params.diag_params.len(),
            params.anti_params.len()
        )));
    }
    if params.central.is_some() != (n % 2 == 1) {
        return Err(Error::Domain(
            "central parameter must be present exactly when n is odd".into(),
        ));
    }

    let mut x = ComplexMatrix::zeros(n, n);
    for i in 0..m {
        let j = n - 1 - i;
        let a = params.diag_params[i];
        let b = params.anti_params[i];
        x[(i, i)] = a;
        x[(j, j)] = a.conj();
        x[(i, j)] = b.conj();
        x[(j, i)] = b;
    }
    if let Some(c) = params.central {
        x[(m, m)] = c;
    }
    Ok(x)
}

/// Column order pairing each leading column with its mirror:
/// 0, n−1, 1, n−2, …  Taking the first 2k columns of the decomposition's
/// `U` and `V` in this order yields a feasible frame whose objective is the
/// 2k-th discrepancy norm; the plain left-to-right prefix mixes pairs with
/// different spreads and does not. Odd sizes skip the central column (it
/// pairs with itself, so it can never join a zero-pairing frame).
pub fn frame_column_order(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(2 * (n / 2));
    for i in 0..n / 2 {
        order.push(i);
        order.push(n - 1 - i);
    }
    order
}

/// Factors a Hermitian matrix as `A = U X V*` with `U`, `V` unitary,
/// `U* V = J`, and `X` an X matrix: with the nonincreasing eigendecomposition
/// `A = Q Λ Q*` and the quarter-turn rotation `R`, take `U = Q R`,
/// `V = Q J Rᵀ`, and `X = Rᵀ Λ J Rᵀ`.
///
/// The parameters land in `X` up to phase: `|X[i,i]|` is the (2i+1)-th
/// discrepancy value and `|X[i,n−1−i]|` the modulus of its minimizing shift
/// (for odd n the central entry is the median eigenvalue, the full-size
/// shift). No phase normalization is attempted.
pub fn x_decomposition(
    a: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let eig = herm_eig(a)?;
    let n = eig.values.len();
    let q = &eig.vectors;
    let r = rotation_matrix(n, FRAC_PI_4);
    let rt = r.transpose();
    let j = special_matrix(SpecialMatrix::Exchange, n);

    let u = q.mul(&r)?;
    let v = q.mul(&j)?.mul(&rt)?;
    let lambda = ComplexMatrix::diag_real(&eig.values);
    let x = rt.mul(&lambda)?.mul(&j)?.mul(&rt)?;
    Ok((u, x, v))
}
