//! Jacobi-based decompositions.
//!
//! The SVD is one-sided Jacobi on columns (high relative accuracy, quadratic
//! convergence, no allocation in the inner loop), the Hermitian eigensolver is
//! cyclic two-sided Jacobi with the same complex rotation.  Both are exact
//! enough at this project's sizes (n ≤ 24) that downstream tolerances of
//! 1e-12·scale hold with room to spare.

use super::{dot_conj, vec_norm, ComplexMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

/// Relative off-diagonal threshold at which a Jacobi sweep is considered
/// converged.  Quadratic convergence makes the last sweep essentially free.
const JACOBI_TOL: f64 = 5e-15;
const MAX_SWEEPS: usize = 60;

/// Singular value decomposition `A = left · diag(singulars) · right*` with
/// `r = min(rows, cols)` columns on both factors and singular values sorted
/// nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singulars: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdResult {
    /// `left · diag(singulars) · right*`, for residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let r = self.singulars.len();
        ComplexMatrix::from_fn(self.left.rows(), self.right.rows(), |i, j| {
            (0..r)
                .map(|l| self.left[(i, l)] * self.singulars[l] * self.right[(j, l)].conj())
                .sum()
        })
    }
}

/// Hermitian eigendecomposition `A = vectors · diag(values) · vectors*` with
/// real eigenvalues sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct HermEigResult {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEigResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|l| self.vectors[(i, l)] * self.values[l] * self.vectors[(j, l)].conj())
                .sum()
        })
    }
}

// ─── one-sided Jacobi kernel ───────────────────────────────────────────────

/// The complex Jacobi rotation diagonalizing [[α, γ], [γ̄, β]] (α, β real).
/// Returns (c, s, e^{-iφ}) with φ = arg γ; the right factor is
/// J = [[c, −s], [s·e^{−iφ}, c·e^{−iφ}]].
#[inline]
fn jacobi_rotation(alpha: f64, beta: f64, gamma: Complex64) -> (f64, f64, Complex64) {
    let g = gamma.norm();
    let phase = gamma.conj() / g;
    let zeta = (alpha - beta) / (2.0 * g);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t, phase)
}

/// One-sided Jacobi on an m×n column-major buffer (m ≥ n).  Columns are
/// rotated until pairwise orthogonal relative to `tol`; `v` (n×n column-major,
/// pre-initialized to the identity) accumulates the right factor if given.
fn one_sided_jacobi(
    w: &mut [Complex64],
    m: usize,
    n: usize,
    mut v: Option<&mut [Complex64]>,
    tol: f64,
) -> Result<()> {
    debug_assert_eq!(w.len(), m * n);
    if n < 2 {
        return Ok(());
    }
    // Columns of a rank-deficient input collapse to rotation roundoff of
    // size ~eps·‖A‖ and can stay correlated with live columns forever, so
    // anything below this floor is snapped to exact zero instead of chasing
    // the relative criterion.  Frobenius mass is rotation-invariant, so the
    // floor is fixed up front.
    let frob = vec_norm(w);
    let zero_floor = 4.0 * (m.max(n) as f64) * f64::EPSILON * frob;
    for _sweep in 0..MAX_SWEEPS {
        let mut sweep_max = 0.0f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (head, tail) = w.split_at_mut(q * m);
                let wp = &mut head[p * m..p * m + m];
                let wq = &mut tail[..m];

                let mut a = 0.0f64;
                let mut b = 0.0f64;
                let mut g = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    a += wp[i].norm_sqr();
                    b += wq[i].norm_sqr();
                    g += wp[i].conj() * wq[i];
                }
                let denom = (a * b).sqrt();
                if denom == 0.0 {
                    continue;
                }
                let rel = g.norm() / denom;
                if rel <= tol {
                    continue;
                }
                if a.sqrt() <= zero_floor || b.sqrt() <= zero_floor {
                    if a.sqrt() <= zero_floor {
                        wp.fill(Complex64::new(0.0, 0.0));
                    }
                    if b.sqrt() <= zero_floor {
                        wq.fill(Complex64::new(0.0, 0.0));
                    }
                    continue;
                }
                sweep_max = sweep_max.max(rel);

                let (c, s, phase) = jacobi_rotation(a, b, g);
                let cp = phase * c;
                let sp = phase * s;
                for i in 0..m {
                    let x = wp[i];
                    let y = wq[i];
                    wp[i] = c * x + sp * y;
                    wq[i] = -s * x + cp * y;
                }
                if let Some(vbuf) = v.as_deref_mut() {
                    let (vh, vt) = vbuf.split_at_mut(q * n);
                    let vp = &mut vh[p * n..p * n + n];
                    let vq = &mut vt[..n];
                    for i in 0..n {
                        let x = vp[i];
                        let y = vq[i];
                        vp[i] = c * x + sp * y;
                        vq[i] = -s * x + cp * y;
                    }
                }
            }
        }
        if sweep_max <= tol {
            return Ok(());
        }
    }
    Err(Error::Numerical(format!(
        "one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
    )))
}

fn to_col_major(a: &ComplexMatrix) -> Vec<Complex64> {
    let (m, n) = (a.rows(), a.cols());
    let mut buf = vec![Complex64::new(0.0, 0.0); m * n];
    for j in 0..n {
        for i in 0..m {
            buf[j * m + i] = a[(i, j)];
        }
    }
    buf
}

/// Singular values only, sorted nonincreasing.  Cheaper than [`svd`]: no
/// factor accumulation.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let tall = a.rows() >= a.cols();
    let (m, n) = if tall {
        (a.rows(), a.cols())
    } else {
        (a.cols(), a.rows())
    };
    let mut w = if tall {
        to_col_major(a)
    } else {
        to_col_major(&a.adjoint())
    };
    one_sided_jacobi(&mut w, m, n, None, JACOBI_TOL)?;
    let mut sv: Vec<f64> = (0..n).map(|j| vec_norm(&w[j * m..j * m + m])).collect();
    sv.sort_unstable_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sv)
}

/// Full SVD.  The factors satisfy `left*·left = right*·right = I_r` and
/// `A = left·diag(singulars)·right*` to roughly machine precision.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        // Decompose the adjoint and swap the factors.
        let s = svd_tall(&a.adjoint())?;
        Ok(SvdResult {
            left: s.right,
            singulars: s.singulars,
            right: s.left,
        })
    }
}

fn svd_tall(a: &ComplexMatrix) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut w = to_col_major(a);
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        v[j * n + j] = Complex64::new(1.0, 0.0);
    }
    one_sided_jacobi(&mut w, m, n, Some(&mut v), JACOBI_TOL)?;

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| vec_norm(&w[j * m..j * m + m])).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap().then(x.cmp(&y)));

    let singulars: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let right = ComplexMatrix::from_fn(n, n, |i, j| v[order[j] * n + i]);

    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (rank, &j) in order.iter().enumerate() {
        let col = &w[j * m..j * m + m];
        if norms[j] > 0.0 {
            left_cols.push(col.iter().map(|z| z / norms[j]).collect());
        } else {
            left_cols.push(complete_orthonormal(&left_cols[..rank], m)?);
        }
    }
    let left = ComplexMatrix::from_columns(&left_cols)?;
    Ok(SvdResult {
        left,
        singulars,
        right,
    })
}

/// Deterministically extends an orthonormal set by one vector: picks the
/// standard basis vector with the largest residual and orthonormalizes it
/// (two Gram-Schmidt passes).
fn complete_orthonormal(existing: &[Vec<Complex64>], m: usize) -> Result<Vec<Complex64>> {
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for i in 0..m {
        let mut cand = vec![Complex64::new(0.0, 0.0); m];
        cand[i] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in existing {
                let proj = dot_conj(u, &cand);
                for t in 0..m {
                    cand[t] -= proj * u[t];
                }
            }
        }
        let r = vec_norm(&cand);
        if best.as_ref().map_or(true, |(br, _)| r > *br) {
            best = Some((r, cand));
        }
    }
    let (r, mut cand) = best.ok_or_else(|| Error::Numerical("empty completion".into()))?;
    if r < 1e-8 {
        return Err(Error::Numerical(
            "failed to complete orthonormal basis".into(),
        ));
    }
    for t in 0..m {
        cand[t] /= r;
    }
    Ok(cand)
}

/// Reusable evaluator for singular values of `A − αI` at many shifts α.
///
/// This is the hot loop of every discrepancy solve, so the base matrix is
/// cached column-major and each evaluation reuses one scratch buffer.
pub(crate) struct ShiftedSvBuffer {
    n: usize,
    base: Vec<Complex64>,
    work: Vec<Complex64>,
    sv: Vec<f64>,
}

impl ShiftedSvBuffer {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        a.check_square()?;
        let n = a.rows();
        Ok(Self {
            n,
            base: to_col_major(a),
            work: vec![Complex64::new(0.0, 0.0); n * n],
            sv: vec![0.0; n],
        })
    }

    /// Singular values of `A − αI`, sorted nonincreasing.
    pub fn eval(&mut self, alpha: Complex64) -> Result<&[f64]> {
        let n = self.n;
        self.work.copy_from_slice(&self.base);
        for j in 0..n {
            self.work[j * n + j] -= alpha;
        }
        one_sided_jacobi(&mut self.work, n, n, None, JACOBI_TOL)?;
        for j in 0..n {
            self.sv[j] = vec_norm(&self.work[j * n..j * n + n]);
        }
        self.sv.sort_unstable_by(|x, y| y.partial_cmp(x).unwrap());
        Ok(&self.sv)
    }
}

// ─── Hermitian eigendecomposition ──────────────────────────────────────────

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian within `1e-10·‖A‖_F`; it is symmetrized before
/// iterating so roundoff asymmetry cannot drift.  Eigenvalues come back
/// sorted nonincreasing with a matching unitary column order.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEigResult> {
    a.check_square()?;
    let n = a.rows();
    let fro = a.fro_norm();
    let defect = a.hermiticity_defect()?;
    if defect > 1e-10 * fro.max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian: defect {defect:.3e} exceeds 1e-10·‖A‖_F"
        )));
    }

    // Column-major working copy of (A + A*)/2.
    let mut h = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            h[j * n + i] = 0.5 * (a[(i, j)] + a[(j, i)].conj());
        }
    }
    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        q[j * n + j] = Complex64::new(1.0, 0.0);
    }

    let scale = fro.max(f64::MIN_POSITIVE);
    let mut converged = n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = 0.0f64;
        for p in 0..n - 1 {
            for q_idx in p + 1..n {
                off += h[q_idx * n + p].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for qq in p + 1..n {
                let gamma = h[qq * n + p];
                if gamma.norm() <= 1e-18 * scale {
                    continue;
                }
                let alpha = h[p * n + p].re;
                let beta = h[qq * n + qq].re;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                let cp = phase * c;
                let sp = phase * s;
                // H ← J* H J: columns first, then rows with conjugated factors.
                for i in 0..n {
                    let x = h[p * n + i];
                    let y = h[qq * n + i];
                    h[p * n + i] = c * x + sp * y;
                    h[qq * n + i] = -s * x + cp * y;
                }
                let cpc = phase.conj() * c;
                let spc = phase.conj() * s;
                for i in 0..n {
                    let x = h[i * n + p];
                    let y = h[i * n + qq];
                    h[i * n + p] = c * x + spc * y;
                    h[i * n + qq] = -s * x + cpc * y;
                }
                for i in 0..n {
                    let x = q[p * n + i];
                    let y = q[qq * n + i];
                    q[p * n + i] = c * x + sp * y;
                    q[qq * n + i] = -s * x + cp * y;
                }
            }
        }
    }
    if !converged {
        // One last check: the loop may have run out of sweeps just after
        // reaching the target.
        let mut off = 0.0f64;
        for p in 0..n - 1 {
            for q_idx in p + 1..n {
                off += h[q_idx * n + p].norm_sqr();
            }
        }
        if off.sqrt() > 1e-12 * scale {
            return Err(Error::Numerical(format!(
                "Hermitian Jacobi did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|j| h[j * n + j].re).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).unwrap().then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&j| diag[j]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| q[order[j] * n + i]);
    Ok(HermEigResult { values, vectors })
}

// ─── norms and exponentials ────────────────────────────────────────────────

/// Ky-Fan k-norm: the sum of the k largest singular values, 1 ≤ k ≤ min(dims).
pub fn ky_fan_norm(a: &ComplexMatrix, k: usize) -> Result<f64> {
    let r = a.rows().min(a.cols());
    if k == 0 || k > r {
        return Err(Error::Domain(format!(
            "Ky-Fan order k={k} out of range 1..={r}"
        )));
    }
    let sv = singular_values(a)?;
    Ok(sv[..k].iter().sum())
}

/// Matrix exponential via scaling-and-squaring with a degree-20 Taylor core.
/// Fine at desk scale: the scaled norm is ≤ 2^-5, so the truncation error is
/// far below machine precision.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_square()?;
    let n = a.rows();
    let fro = a.fro_norm();
    let s = if fro > 0.03125 {
        ((fro / 0.03125).log2().ceil() as i32).max(0) as u32
    } else {
        0
    };
    let m = a.scale(Complex64::new(1.0 / 2f64.powi(s as i32), 0.0));
    // Horner evaluation of Σ M^j / j!.
    let mut p = ComplexMatrix::identity(n);
    for j in (1..=20u32).rev() {
        p = ComplexMatrix::identity(n)
            .add(&m.mul(&p)?.scale(Complex64::new(1.0 / j as f64, 0.0)))?;
    }
    for _ in 0..s {
        p = p.mul(&p)?;
    }
    Ok(p)
}

/// `e^{iX}` for Hermitian X, through the eigendecomposition (exactly unitary
/// up to roundoff).
pub fn expi_hermitian(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(x)?;
    let n = x.rows();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&l| Complex64::new(l.cos(), l.sin()))
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|l| eig.vectors[(i, l)] * phases[l] * eig.vectors[(j, l)].conj())
            .sum()
    }))
}
