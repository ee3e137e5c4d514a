//! Constructions with prescribed discrepancy behaviour.

use crate::matcore::{
    random_unitary, rng_from_seed, special_matrix, svd, ComplexMatrix, SpecialMatrix,
};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{PI, TAU};

/// Builds `M − αI` where `M` is a traceless unitary matrix: a random unitary
/// conjugation of a diagonal of unit phases arranged in antipodal pairs
/// (plus one balanced triple when n is odd) so the phase sum vanishes
/// exactly. Every discrepancy value of the output is 1.
pub fn psi_matrix(n: usize, alpha: Complex64, seed: u64) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "traceless unitary constructions need n >= 2, got {n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut phases = Vec::with_capacity(n);
    if n % 2 == 1 {
        let base: f64 = rng.gen_range(0.0..TAU);
        phases.push(base);
        phases.push(base + 2.0 * PI / 3.0);
        phases.push(base + 4.0 * PI / 3.0);
    }
    while phases.len() < n {
        let theta: f64 = rng.gen_range(0.0..TAU);
        phases.push(theta);
        phases.push(theta + PI);
    }

    let entries: Vec<Complex64> = phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let d = ComplexMatrix::diag(&entries);
    let q = random_unitary(n, seed ^ 0xA5A5_5A5A_0F0F_F0F0);
    let m = q.mul(&d)?.mul(&q.adjoint())?;
    m.shifted(alpha)
}

/// Right-multiplier that pushes every discrepancy value of `AQ` up to the
/// corresponding singular value of `A`: with A = UΣV*, take Q = V·C·U* for
/// the cyclic shift C, so AQ = U(ΣC)U* has a singular value decomposition
/// whose left and right factors multiply to a zero-diagonal unitary.
pub fn kyfan_attaining_unitary(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_square()?;
    let n = a.rows();
    if n < 2 {
        return Err(Error::Domain(
            "a 1x1 matrix is a scalar shift; no unitary can raise its discrepancy".into(),
        ));
    }
    let dec = svd(a)?;
    let c = special_matrix(SpecialMatrix::CyclicShift, n);
    dec.right.mul(&c)?.mul(&dec.left.adjoint())
}
