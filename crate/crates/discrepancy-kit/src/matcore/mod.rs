//! Dense complex-matrix core: storage, arithmetic, structured constructors,
//! and the decompositions (SVD, Hermitian eigendecomposition) the discrepancy
//! solvers are built on.
//!
//! Matrices are stored row-major as `Vec<Complex64>`.  Sizes in this project
//! are small (n ≤ 24), so the kernels favour robustness and determinism over
//! asymptotics: one-sided Jacobi for the SVD, cyclic Jacobi for Hermitian
//! eigenproblems, modified Gram-Schmidt for the Haar QR.

mod decomp;
mod random;
mod special;

pub use decomp::{
    expi_hermitian, expm, herm_eig, ky_fan_norm, singular_values, svd, HermEigResult, SvdResult,
};
pub(crate) use decomp::ShiftedSvBuffer;
pub use random::{
    ginibre, random_hamiltonian, random_hermitian, random_line_normal, random_psd,
    random_real_antisymmetric, random_unitary, random_zero_diag_svd, rng_from_seed, splitmix64,
    traceless_partial_isometry, trial_seed,
};
pub use special::{rotation_matrix, special_matrix, SpecialMatrix};

use crate::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};

/// Dense complex matrix, row-major.
///
/// Construction validates that every entry is finite; all other code in the
/// crate relies on that invariant.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, rejecting size mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: format!("{} entries ({}x{})", rows * cols, rows, cols),
                got: format!("{} entries", data.len()),
            });
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major data.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from complex entries.
    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = entries[i];
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(entries[i], 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds the matrix whose j-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(Error::Domain("need at least one nonempty column".into()));
        }
        let rows = columns[0].len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension {
                expected: format!("columns of length {rows}"),
                got: "ragged column lengths".into(),
            });
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: format!("{} rows on the right factor", self.cols),
                got: format!("{} rows", other.rows),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                expected: format!("vector of length {}", self.cols),
                got: format!("length {}", x.len()),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// `A − αI` for square `A`.
    pub fn shifted(&self, alpha: Complex64) -> Result<Self> {
        self.check_square()?;
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] -= alpha;
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<Complex64> {
        self.check_square()?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖A − A*‖_F`; zero for Hermitian matrices.
    pub fn hermiticity_defect(&self) -> Result<f64> {
        self.check_square()?;
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// True when `‖A − A*‖_F ≤ tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        matches!(self.hermiticity_defect(), Ok(d) if d <= tol)
    }

    /// `‖AA* − A*A‖_F`; zero for normal matrices.
    pub fn normality_defect(&self) -> Result<f64> {
        self.check_square()?;
        let aad = self.mul(&self.adjoint())?;
        let ada = self.adjoint().mul(self)?;
        Ok(aad.sub(&ada)?.fro_norm())
    }

    /// Block-diagonal sum `A ⊕ B`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (r1, c1) = (self.rows, self.cols);
        let mut out = Self::zeros(r1 + other.rows, c1 + other.cols);
        for i in 0..r1 {
            for j in 0..c1 {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(r1 + i, c1 + j)] = other[(i, j)];
            }
        }
        out
    }

    /// Principal submatrix obtained by deleting one row/column index.
    pub fn delete_index(&self, idx: usize) -> Result<Self> {
        self.check_square()?;
        if self.rows < 2 || idx >= self.rows {
            return Err(Error::Domain(format!(
                "cannot delete index {idx} from a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let pick = |t: usize| if t < idx { t } else { t + 1 };
        Ok(Self::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            self[(pick(i), pick(j))]
        }))
    }

    pub(crate) fn check_square(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Dimension {
                expected: "square matrix".into(),
                got: format!("{}x{}", self.rows, self.cols),
            });
        }
        Ok(())
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension {
                expected: format!("{}x{}", self.rows, self.cols),
                got: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `a* b`, the inner product that is conjugate-linear in `a`.
pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian dilation `[[0, A], [A*, 0]]` of an arbitrary rows×cols matrix.
///
/// Its eigenvalues are ±σ_i(A) together with |rows − cols| zeros, which makes
/// it a convenient bridge between singular-value and eigenvalue statements.
pub fn hermitian_dilation(a: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.rows(), a.cols());
    let mut out = ComplexMatrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..m {
            out[(i, n + j)] = a[(i, j)];
            out[(n + j, i)] = a[(i, j)].conj();
        }
    }
    out
}

/// Principal angles between the column spans of two isometries of equal rank,
/// returned in radians, sorted nonincreasing.
///
/// Computed as arccos of the singular values of `S* T`, clamped into [0, 1]
/// before the arccos to absorb roundoff.  Both inputs must have orthonormal
/// columns (checked to 1e-8) and matching shapes.
pub fn principal_angles(s: &ComplexMatrix, t: &ComplexMatrix) -> Result<Vec<f64>> {
    if s.rows() != t.rows() || s.cols() != t.cols() {
        return Err(Error::Dimension {
            expected: format!("{}x{}", s.rows(), s.cols()),
            got: format!("{}x{}", t.rows(), t.cols()),
        });
    }
    if s.cols() > s.rows() {
        return Err(Error::Domain(
            "isometry must have at least as many rows as columns".into(),
        ));
    }
    for (name, m) in [("first", s), ("second", t)] {
        let gram = m.adjoint().mul(m)?;
        let defect = gram.sub(&ComplexMatrix::identity(m.cols()))?.fro_norm();
        if defect > 1e-8 {
            return Err(Error::Domain(format!(
                "{name} argument is not an isometry (orthonormality defect {defect:.3e})"
            )));
        }
    }
    let overlap = s.adjoint().mul(t)?;
    let mut sv = singular_values(&overlap)?;
    for x in sv.iter_mut() {
        *x = x.clamp(0.0, 1.0);
    }
    // σ sorted descending gives angles ascending; report largest first.
    let mut angles: Vec<f64> = sv.into_iter().map(|x| x.acos()).collect();
    angles.reverse();
    Ok(angles)
}
