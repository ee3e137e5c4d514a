//! Structured constructors: exchange/cyclic-shift permutations and the
//! centrosymmetric rotation matrices used by the commutator maximizer and the
//! X decomposition.

use super::ComplexMatrix;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialMatrix {
    /// Exchange (flip) permutation J_n: ones on the anti-diagonal.
    Exchange,
    /// Cyclic shift C_n with C[i, (i+1) mod n] = 1.
    CyclicShift,
    Identity,
}

pub fn special_matrix(kind: SpecialMatrix, n: usize) -> ComplexMatrix {
    let one = Complex64::new(1.0, 0.0);
    let mut m = ComplexMatrix::zeros(n, n);
    match kind {
        SpecialMatrix::Exchange => {
            for i in 0..n {
                m[(i, n - 1 - i)] = one;
            }
        }
        SpecialMatrix::CyclicShift => {
            for i in 0..n {
                m[(i, (i + 1) % n)] = one;
            }
        }
        SpecialMatrix::Identity => {
            for i in 0..n {
                m[(i, i)] = one;
            }
        }
    }
    m
}

/// Real rotation matrix R_n(θ): plane rotations folded outer-in, acting on
/// the coordinate pairs (i, n−1−i).  Row i carries (cos θ, −sin θ) and row
/// n−1−i carries (sin θ, cos θ); odd n leaves a central 1.  The matrix is
/// orthogonal and centrosymmetric.
pub fn rotation_matrix(n: usize, theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n / 2 {
        let j = n - 1 - i;
        m[(i, i)] = Complex64::new(c, 0.0);
        m[(i, j)] = Complex64::new(-s, 0.0);
        m[(j, i)] = Complex64::new(s, 0.0);
        m[(j, j)] = Complex64::new(c, 0.0);
    }
    if n % 2 == 1 {
        let mid = n / 2;
        m[(mid, mid)] = Complex64::new(1.0, 0.0);
    }
    m
}
