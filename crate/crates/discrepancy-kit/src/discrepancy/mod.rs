//! Discrepancy norms and values.
//!
//! The k-th discrepancy norm of a square matrix is the smallest Ky-Fan k-norm
//! over all scalar shifts, `min over α of ‖A − αI‖_(k)`; consecutive
//! differences of these norms are the discrepancy values δ₁ ≥ δ₂ ≥ … ≥ δ_n.
//! This module computes them three ways, picked automatically: a closed form
//! for Hermitian matrices, a eigenvalue-geometry path for normal matrices,
//! and a two-dimensional convex minimization for everything else. It also
//! evaluates extremal-frame certificates, joint (two-matrix) discrepancies,
//! and an independent grid oracle used to cross-check the solver.

mod construct;
mod hermitian;
mod normal;
mod oracle;
mod solve2d;

pub use construct::{kyfan_attaining_unitary, psi_matrix};
pub use hermitian::{discrepancy_values_hermitian, hermitian_discrepancy_frames};
pub use normal::{discrepancy_values_normal, geometric_median, minimal_enclosing_circle};
pub use oracle::grid_oracle_discrepancy_norm;

pub(crate) use normal::normal_eigenvalues;
pub(crate) use solve2d::min_on_segment;

use crate::majorize::{SpectrumVector, Tolerance};
use crate::matcore::{dot_conj, svd, ComplexMatrix, ShiftedSvBuffer};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use solve2d::{polish, GradInfo, PolishOutcome, ShiftObjective};
use std::fmt;

/// Tuning knobs for the shift solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSolverConfig {
    /// Coarse grid resolution per axis over the bounding disc.
    pub grid_points: usize,
    /// Shift resolution target, relative to max(1, disc radius).
    pub refine_tol_rel: f64,
    /// Budget for refinement steps per k.
    pub max_refine_iters: usize,
    /// Allow the derivative-free simplex fallback at nonsmooth shifts.
    pub derivative_free_fallback: bool,
}

impl Default for AlphaSolverConfig {
    fn default() -> Self {
        Self {
            grid_points: 41,
            refine_tol_rel: 1e-11,
            max_refine_iters: 400,
            derivative_free_fallback: true,
        }
    }
}

impl AlphaSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 9 {
            return Err(Error::Domain(format!(
                "grid_points must be at least 9, got {}",
                self.grid_points
            )));
        }
        if !(self.refine_tol_rel > 0.0) || !self.refine_tol_rel.is_finite() {
            return Err(Error::Domain("refine_tol_rel must be positive".into()));
        }
        if self.max_refine_iters == 0 {
            return Err(Error::Domain("max_refine_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Which computation produced a per-k result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    Hermitian,
    Normal,
    General,
}

impl fmt::Display for SolverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            SolverPath::Hermitian => "hermitian",
            SolverPath::Normal => "normal",
            SolverPath::General => "general2d",
        };
        f.write_str(tag)
    }
}

/// Per-k solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDiagnostic {
    pub iterations: usize,
    /// Norm of the (sub)gradient at the returned shift.
    pub residual: f64,
    pub path: SolverPath,
}

/// Full set of discrepancy data for one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyResult {
    /// δ₁ ≥ … ≥ δ_n.
    pub values: SpectrumVector,
    /// k-th discrepancy norm for k = 1…n (cumulative sums of `values`).
    pub partial_norms: Vec<f64>,
    /// Minimizing shift per k.
    pub alphas: Vec<Complex64>,
    pub diagnostics: Vec<KDiagnostic>,
}

impl DiscrepancyResult {
    pub fn n(&self) -> usize {
        self.partial_norms.len()
    }

    pub fn delta(&self) -> &[f64] {
        self.values.values()
    }
}

/// Turns raw per-k minima into a canonical result. The differences of the
/// partial norms must be nonincreasing up to solver noise; noise-level
/// wobbles are repaired by sorting, anything larger is a genuine failure.
pub(crate) fn canonical_result(
    partials: Vec<f64>,
    alphas: Vec<Complex64>,
    diagnostics: Vec<KDiagnostic>,
    solver_tol: f64,
) -> Result<DiscrepancyResult> {
    let mut deltas = Vec::with_capacity(partials.len());
    let mut prev = 0.0;
    for &p in &partials {
        deltas.push(p - prev);
        prev = p;
    }
    let allowed = 10.0 * solver_tol;
    for w in deltas.windows(2) {
        if w[1] > w[0] + allowed {
            return Err(Error::Numerical(format!(
                "discrepancy differences increased by {:.3e} (allowed {:.3e}); \
                 the shift solver did not reach its tolerance",
                w[1] - w[0],
                allowed
            )));
        }
    }
    let values = SpectrumVector::with_tol(deltas, allowed)?;
    let mut acc = 0.0;
    let partial_norms = values
        .values()
        .iter()
        .map(|d| {
            acc += d;
            acc
        })
        .collect();
    Ok(DiscrepancyResult {
        values,
        partial_norms,
        alphas,
        diagnostics,
    })
}

// ─── General-path objective ─────────────────────────────────────────────────

struct KyFanShiftObjective<'a> {
    matrix: &'a ComplexMatrix,
    buf: ShiftedSvBuffer,
    k: usize,
}

impl<'a> KyFanShiftObjective<'a> {
    fn new(matrix: &'a ComplexMatrix, k: usize) -> Result<Self> {
        Ok(Self {
            matrix,
            buf: ShiftedSvBuffer::new(matrix)?,
            k,
        })
    }
}

impl ShiftObjective for KyFanShiftObjective<'_> {
    fn eval(&mut self, alpha: Complex64) -> f64 {
        match self.buf.eval(alpha) {
            Ok(sv) => sv[..self.k].iter().sum(),
            Err(_) => f64::INFINITY,
        }
    }

    fn grad_info(&mut self, alpha: Complex64) -> GradInfo {
        match top_k_gradient(self.matrix, alpha, self.k) {
            Ok(info) => info,
            Err(_) => GradInfo {
                gx: 0.0,
                gy: 0.0,
                gap_rel: 0.0,
            },
        }
    }
}

/// Gradient of the k-th partial singular-value sum of `A − αI` with respect
/// to (Re α, Im α), from the top-k singular pairs: with s = tr(U_k* V_k) the
/// gradient is (−Re s, +Im s). Also reports the relative σ_k/σ_{k+1} gap.
fn top_k_gradient(a: &ComplexMatrix, alpha: Complex64, k: usize) -> Result<GradInfo> {
    let dec = svd(&a.shifted(alpha)?)?;
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..k {
        s += dot_conj(&dec.left.column(i), &dec.right.column(i));
    }
    let s1 = dec.singulars[0].max(f64::MIN_POSITIVE);
    let next = if k < dec.singulars.len() {
        dec.singulars[k]
    } else {
        0.0
    };
    let gap_rel = (dec.singulars[k - 1] - next) / s1;
    Ok(GradInfo {
        gx: -s.re,
        gy: s.im,
        gap_rel,
    })
}

/// Center and radius of a disc guaranteed to contain every minimizing shift,
/// for all k at once: center μ = tr(A)/n, radius 2σ₁(A − μI).
fn bounding_disc(buf: &mut ShiftedSvBuffer, a: &ComplexMatrix) -> Result<(Complex64, f64)> {
    let n = a.rows() as f64;
    let mu = a.trace()? / n;
    let s1 = buf.eval(mu)?[0];
    Ok((mu, 2.0 * s1))
}

/// Square grid over the bounding disc, pruned to the disc (plus one spacing
/// of slack) and always including the center.
pub(crate) fn grid_candidates_over(mu: Complex64, radius: f64, grid_points: usize) -> Vec<Complex64> {
    let mut pts = vec![mu];
    let h = 2.0 * radius / (grid_points - 1) as f64;
    for i in 0..grid_points {
        for j in 0..grid_points {
            let z = mu + Complex64::new(-radius + i as f64 * h, -radius + j as f64 * h);
            if (z - mu).norm() <= radius + h {
                pts.push(z);
            }
        }
    }
    pts
}

pub(crate) struct SingleSolve {
    pub value: f64,
    pub alpha: Complex64,
    pub iterations: usize,
    pub residual: f64,
}

/// Shared driver for the general path: one coarse grid pass amortized over
/// every requested k (the singular values of each grid shift are computed
/// once), then an independent polish per k.
fn general_partial_minima(
    a: &ComplexMatrix,
    ks: &[usize],
    cfg: &AlphaSolverConfig,
) -> Result<(Vec<SingleSolve>, f64)> {
    cfg.validate()?;
    a.check_square()?;
    let n = a.rows();
    for &k in ks {
        if k == 0 || k > n {
            return Err(Error::Domain(format!(
                "k must be between 1 and {n}, got {k}"
            )));
        }
    }

    let mut buf = ShiftedSvBuffer::new(a)?;
    let (mu, radius) = bounding_disc(&mut buf, a)?;
    if radius <= 1e-14 * a.fro_norm().max(1.0) {
        // A is (numerically) a multiple of the identity; every norm is zero
        // at the exact shift μ.
        let sv = buf.eval(mu)?.to_vec();
        let outs = ks
            .iter()
            .map(|&k| SingleSolve {
                value: sv[..k].iter().sum(),
                alpha: mu,
                iterations: 0,
                residual: 0.0,
            })
            .collect();
        return Ok((outs, radius));
    }

    let h = 2.0 * radius / (cfg.grid_points - 1) as f64;
    let mut best: Vec<(f64, Complex64)> = vec![(f64::INFINITY, mu); ks.len()];
    for z in grid_candidates_over(mu, radius, cfg.grid_points) {
        let sv = buf.eval(z)?;
        let mut acc = 0.0;
        let mut prefix = vec![0.0; n];
        for (i, s) in sv.iter().enumerate() {
            acc += s;
            prefix[i] = acc;
        }
        for (slot, &k) in best.iter_mut().zip(ks) {
            let v = prefix[k - 1];
            if v < slot.0 {
                *slot = (v, z);
            }
        }
    }

    let outs: Vec<SingleSolve> = ks
        .par_iter()
        .zip(best.par_iter())
        .map(|(&k, &(val, start))| -> Result<SingleSolve> {
            let mut obj = KyFanShiftObjective::new(a, k)?;
            let out: PolishOutcome = polish(&mut obj, start, val, h, radius, cfg)?;
            Ok(SingleSolve {
                value: out.value,
                alpha: out.alpha,
                iterations: out.iterations,
                residual: out.residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((outs, radius))
}

fn general_solver_tol(n: usize, radius: f64, cfg: &AlphaSolverConfig) -> f64 {
    (n as f64 * cfg.refine_tol_rel + 1e-11) * radius.max(1.0)
}

// ─── Public operations ──────────────────────────────────────────────────────

/// Computes the k-th discrepancy norm `min over α of ‖A − αI‖_(k)` with the
/// general solver, returning the minimum, the minimizing shift, and the
/// stationarity residual there.
pub fn discrepancy_norm(
    a: &ComplexMatrix,
    k: usize,
    cfg: &AlphaSolverConfig,
) -> Result<(f64, Complex64, f64)> {
    let (outs, _) = general_partial_minima(a, &[k], cfg)?;
    let s = outs.into_iter().next().expect("one k requested");
    Ok((s.value, s.alpha, s.residual))
}

/// Computes all discrepancy values of `A`, dispatching to the Hermitian
/// closed form or the normal-matrix path when the structure allows it.
pub fn discrepancy_values(a: &ComplexMatrix, cfg: &AlphaSolverConfig) -> Result<DiscrepancyResult> {
    a.check_square()?;
    cfg.validate()?;
    let fro = a.fro_norm();
    if a.hermiticity_defect()? <= 1e-10 * fro {
        return discrepancy_values_hermitian(a);
    }
    if a.normality_defect()? <= 1e-10 * fro * fro {
        if let Some(eigs) = normal::normal_eigenvalues(a) {
            return discrepancy_values_normal(&eigs, cfg);
        }
    }
    discrepancy_values_general(a, cfg)
}

/// Computes all discrepancy values with the two-dimensional shift solver,
/// skipping the structure dispatch. Useful for cross-checking the closed
/// forms on matrices that would otherwise take a special-cased path.
pub fn discrepancy_values_general(
    a: &ComplexMatrix,
    cfg: &AlphaSolverConfig,
) -> Result<DiscrepancyResult> {
    a.check_square()?;
    cfg.validate()?;
    let n = a.rows();
    let ks: Vec<usize> = (1..=n).collect();
    let (outs, radius) = general_partial_minima(a, &ks, cfg)?;
    let partials = outs.iter().map(|s| s.value).collect();
    let alphas = outs.iter().map(|s| s.alpha).collect();
    let diagnostics = outs
        .iter()
        .map(|s| KDiagnostic {
            iterations: s.iterations,
            residual: s.residual,
            path: SolverPath::General,
        })
        .collect();
    canonical_result(
        partials,
        alphas,
        diagnostics,
        general_solver_tol(n, radius, cfg),
    )
}

// ─── Joint discrepancy ──────────────────────────────────────────────────────

struct JointObjective<'a> {
    a: &'a ComplexMatrix,
    b: &'a ComplexMatrix,
    buf_a: ShiftedSvBuffer,
    buf_b: ShiftedSvBuffer,
    k: usize,
}

impl ShiftObjective for JointObjective<'_> {
    fn eval(&mut self, alpha: Complex64) -> f64 {
        let fa: f64 = match self.buf_a.eval(alpha) {
            Ok(sv) => sv[..self.k].iter().sum(),
            Err(_) => return f64::INFINITY,
        };
        let fb: f64 = match self.buf_b.eval(alpha) {
            Ok(sv) => sv[..self.k].iter().sum(),
            Err(_) => return f64::INFINITY,
        };
        0.5 * (fa + fb)
    }

    fn grad_info(&mut self, alpha: Complex64) -> GradInfo {
        let ga = top_k_gradient(self.a, alpha, self.k);
        let gb = top_k_gradient(self.b, alpha, self.k);
        match (ga, gb) {
            (Ok(x), Ok(y)) => GradInfo {
                gx: 0.5 * (x.gx + y.gx),
                gy: 0.5 * (x.gy + y.gy),
                gap_rel: x.gap_rel.min(y.gap_rel),
            },
            _ => GradInfo {
                gx: 0.0,
                gy: 0.0,
                gap_rel: 0.0,
            },
        }
    }
}

/// Minimizes the averaged shifted Ky-Fan norm
/// `(‖A − αI‖_(k) + ‖B − αI‖_(k)) / 2` over the shift, the k-th partial sum
/// of the joint discrepancy values of the pair.
pub fn joint_discrepancy_norm(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    k: usize,
    cfg: &AlphaSolverConfig,
) -> Result<(f64, Complex64)> {
    a.check_square()?;
    a.check_same_shape(b)?;
    cfg.validate()?;
    let n = a.rows();
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "k must be between 1 and {n}, got {k}"
        )));
    }

    let mut buf_a = ShiftedSvBuffer::new(a)?;
    let mut buf_b = ShiftedSvBuffer::new(b)?;
    let mu = (a.trace()? + b.trace()?) / (2.0 * n as f64);
    let sa = buf_a.eval(mu)?[0];
    let sb = buf_b.eval(mu)?[0];
    let radius = 2.0 * sa.max(sb);
    let prefix =
        |sv: &[f64]| -> f64 { sv[..k].iter().sum() };
    if radius <= 1e-14 * (a.fro_norm() + b.fro_norm()).max(1.0) {
        let v = 0.5 * (prefix(buf_a.eval(mu)?) + prefix(buf_b.eval(mu)?));
        return Ok((v, mu));
    }

    let h = 2.0 * radius / (cfg.grid_points - 1) as f64;
    let mut best = (f64::INFINITY, mu);
    for z in grid_candidates_over(mu, radius, cfg.grid_points) {
        let fa = prefix(buf_a.eval(z)?);
        let fb = prefix(buf_b.eval(z)?);
        let v = 0.5 * (fa + fb);
        if v < best.0 {
            best = (v, z);
        }
    }

    let mut obj = JointObjective {
        a,
        b,
        buf_a,
        buf_b,
        k,
    };
    let out = polish(&mut obj, best.1, best.0, h, radius, cfg)?;
    Ok((out.value, out.alpha))
}

/// All joint partial minima of a pair at once, sharing a single coarse grid
/// pass across every k the way the single-matrix driver does. The returned
/// result carries the joint discrepancy values and their partial sums.
pub(crate) fn joint_discrepancy_values(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cfg: &AlphaSolverConfig,
) -> Result<DiscrepancyResult> {
    a.check_square()?;
    a.check_same_shape(b)?;
    cfg.validate()?;
    let n = a.rows();

    let mut buf_a = ShiftedSvBuffer::new(a)?;
    let mut buf_b = ShiftedSvBuffer::new(b)?;
    let mu = (a.trace()? + b.trace()?) / (2.0 * n as f64);
    let sa = buf_a.eval(mu)?[0];
    let sb = buf_b.eval(mu)?[0];
    let radius = 2.0 * sa.max(sb);
    let solver_tol = general_solver_tol(n, radius, cfg);

    let prefix_all = |sv: &[f64]| -> Vec<f64> {
        let mut acc = 0.0;
        sv.iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect()
    };

    if radius <= 1e-14 * (a.fro_norm() + b.fro_norm()).max(1.0) {
        let pa = prefix_all(buf_a.eval(mu)?);
        let pb = prefix_all(buf_b.eval(mu)?);
        let partials = pa.iter().zip(&pb).map(|(x, y)| 0.5 * (x + y)).collect();
        let diag = KDiagnostic {
            iterations: 0,
            residual: 0.0,
            path: SolverPath::General,
        };
        return canonical_result(partials, vec![mu; n], vec![diag; n], solver_tol);
    }

    let h = 2.0 * radius / (cfg.grid_points - 1) as f64;
    let mut best: Vec<(f64, Complex64)> = vec![(f64::INFINITY, mu); n];
    for z in grid_candidates_over(mu, radius, cfg.grid_points) {
        let pa = prefix_all(buf_a.eval(z)?);
        let pb = prefix_all(buf_b.eval(z)?);
        for (k, slot) in best.iter_mut().enumerate() {
            let v = 0.5 * (pa[k] + pb[k]);
            if v < slot.0 {
                *slot = (v, z);
            }
        }
    }

    let outs: Vec<SingleSolve> = best
        .par_iter()
        .enumerate()
        .map(|(i, &(val, start))| -> Result<SingleSolve> {
            let mut obj = JointObjective {
                a,
                b,
                buf_a: ShiftedSvBuffer::new(a)?,
                buf_b: ShiftedSvBuffer::new(b)?,
                k: i + 1,
            };
            let out = polish(&mut obj, start, val, h, radius, cfg)?;
            Ok(SingleSolve {
                value: out.value,
                alpha: out.alpha,
                iterations: out.iterations,
                residual: out.residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let partials = outs.iter().map(|s| s.value).collect();
    let alphas = outs.iter().map(|s| s.alpha).collect();
    let diagnostics = outs
        .iter()
        .map(|s| KDiagnostic {
            iterations: s.iterations,
            residual: s.residual,
            path: SolverPath::General,
        })
        .collect();
    canonical_result(partials, alphas, diagnostics, solver_tol)
}

/// Number of discrepancy values exceeding the tolerance, relative to δ₁.
pub fn discrepancy_rank(a: &ComplexMatrix, tol: Tolerance) -> Result<usize> {
    let res = discrepancy_values(a, &AlphaSolverConfig::default())?;
    let d1 = res.delta().first().copied().unwrap_or(0.0);
    let cut = tol.abs + tol.rel * d1;
    Ok(res.delta().iter().filter(|&&d| d > cut).count())
}

// ─── Frame certificates ─────────────────────────────────────────────────────

fn max_gram_defect(vs: &[Vec<Complex64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, u) in vs.iter().enumerate() {
        for (j, w) in vs.iter().enumerate() {
            let g = dot_conj(u, w);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

/// Evaluates Σ|⟨A xᵢ, yᵢ⟩| for a pair of vector lists and reports whether
/// they form a valid certificate: both lists orthonormal and the pairing
/// trace Σ⟨xᵢ, yᵢ⟩ equal to zero, all within 1e-8.
pub fn frame_objective(
    a: &ComplexMatrix,
    xs: &[Vec<Complex64>],
    ys: &[Vec<Complex64>],
) -> Result<(f64, bool)> {
    a.check_square()?;
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::Domain(
            "frame lists must be nonempty and of equal length".into(),
        ));
    }
    let n = a.rows();
    for v in xs.iter().chain(ys) {
        if v.len() != n {
            return Err(Error::Dimension {
                expected: format!("vectors of length {n}"),
                got: format!("length {}", v.len()),
            });
        }
    }

    let mut value = 0.0;
    let mut pairing = Complex64::new(0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let ax = a.matvec(x)?;
        value += dot_conj(y, &ax).norm();
        pairing += dot_conj(x, y);
    }
    let feasible =
        max_gram_defect(xs) <= 1e-8 && max_gram_defect(ys) <= 1e-8 && pairing.norm() <= 1e-8;
    Ok((value, feasible))
}
