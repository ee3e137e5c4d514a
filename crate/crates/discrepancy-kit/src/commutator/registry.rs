//! A registry of weak-majorization inequalities between singular-value and
//! discrepancy-value vectors, each evaluated numerically on caller-supplied
//! matrices.
//!
//! Every entry reduces to the same mechanics: build one or more comparison
//! parts (a pair of vectors whose pointwise difference must stay nonnegative
//! up to tolerance), concatenate their margin data into a report, and let the
//! caller judge `holds`/`min_margin`. For `≺_w` claims the stored vectors are
//! prefix sums of the sorted operands; equality claims contribute both
//! directions so that the single min-margin criterion doubles as a two-sided
//! check; a few entries compare entry by entry instead (they say so in their
//! descriptions). `scale` for the tolerance is the largest magnitude stored
//! in the report, so a report is self-contained: `holds` can be re-derived
//! from its own fields.

use super::{bracket, generalized_commutator, require_hermitian};
use crate::discrepancy::{
    discrepancy_values, joint_discrepancy_values, min_on_segment, normal_eigenvalues,
    AlphaSolverConfig,
};
use crate::matcore::{
    expi_hermitian, expm, ginibre, herm_eig, principal_angles, random_hermitian, random_psd,
    random_unitary, rng_from_seed, singular_values, splitmix64, svd, trial_seed, ComplexMatrix,
    ShiftedSvBuffer,
};
use crate::majorize::{mu_k, Tolerance};
use crate::{Error, Result};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Identifier of one registered inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum InequalityId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
    R17,
    R18,
    R19,
    R20,
    R21,
    R22,
    R23,
    R24,
    R25,
    R26,
}

impl InequalityId {
    pub fn all() -> [InequalityId; 26] {
        use InequalityId::*;
        [
            R1, R2, R3, R4, R5, R6, R7, R8, R9, R10, R11, R12, R13, R14, R15, R16, R17, R18,
            R19, R20, R21, R22, R23, R24, R25, R26,
        ]
    }

    pub fn index(self) -> usize {
        Self::all().iter().position(|x| *x == self).unwrap() + 1
    }

    /// One-line statement of what the entry compares.
    pub fn describe(self) -> &'static str {
        use InequalityId::*;
        match self {
            R1 => "discrepancies of sums and differences between |δ(A)−δ(B)| and δ(A)+δ(B)",
            R2 => "discrepancy values sit below singular values",
            R3 => "block pinching contracts discrepancy values",
            R4 => "the off-block remainder of a two-way pinching contracts discrepancy values",
            R5 => "an off-diagonal block matrix has δ = σ (merged block singulars), below δ of the full matrix",
            R6 => "compression to a subspace against its complement sits below truncated discrepancy values",
            R7 => "discrepancy of exp(iX) sits below the spectrum of Hermitian X",
            R8 => "discrepancy of exp(i|A|) sits below the singular values of A",
            R9 => "discrepancy of |A| equals half the antipodal singular-value gaps and sits below δ(A)",
            R10 => "a PSD factor's discrepancy sits below that of its unitary multiple",
            R11 => "principal angles under a Hermitian-generated rotation sit below truncated discrepancy values",
            R12 => "joint discrepancies, duplicated, sit below direct-sum discrepancies",
            R13 => "pair-averaged PSD discrepancies sit below antipodal eigenvalue midpoints, entrywise",
            R14 => "block-averaging the discrepancies of a repeated direct sum recovers δ(A)",
            R15 => "a generalized commutator sits below twice joint discrepancies times the middle spectrum",
            R16 => "a commutator sits below twice one factor's discrepancies times the other's spectrum",
            R17 => "a commutator sits below twice the product of discrepancies when one factor is Hermitian or line-normal",
            R18 => "projector compressions and projector commutators sit below (rank-capped) discrepancy values",
            R19 => "a difference sits below twice joint discrepancies, which sit below averaged direct-sum discrepancies",
            R20 => "the spectrum equals twice the joint discrepancy with the zero matrix",
            R21 => "joint discrepancies with the adjoint equal axis-constrained shift minima; the skew part sits below twice those joint values",
            R22 => "a nested commutator sits below a power of two times spectrum and discrepancy products",
            R23 => "conjugation by exp(A) or by a positive matrix inflates the spectrum in a controlled way",
            R24 => "A²B²−(AB)² sits below twice the product of both discrepancies and both spectra",
            R25 => "discrepancy values of a codimension-one principal submatrix interlace the original's",
            R26 => "conjecture: every commutator sits below twice the product of discrepancies",
        }
    }

    /// Whether the entry is a conjecture rather than a proved statement.
    /// Non-violation on samples is then reported as "no counterexample
    /// found", never as a proof.
    pub fn is_conjecture(self) -> bool {
        self == InequalityId::R26
    }

    /// Whether random instances of this entry exist at dimension n.
    pub fn applicable(self, n: usize) -> bool {
        n >= 2 && (self != InequalityId::R13 || n % 2 == 0)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.index())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t
            .strip_prefix('R')
            .or_else(|| t.strip_prefix('r'))
            .unwrap_or(t);
        let k: usize = digits
            .parse()
            .map_err(|_| Error::Domain(format!("not an inequality id: {s:?}")))?;
        InequalityId::all()
            .get(k.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::Domain(format!("no registry entry R{k}")))
    }
}

/// Named matrices plus the structural extras some entries need.
#[derive(Debug, Clone, Default)]
pub struct InequalityInputs {
    mats: BTreeMap<String, ComplexMatrix>,
    /// Index blocks for the pinching entries; must cover every index once.
    pub partition: Option<Vec<Vec<usize>>>,
    /// Deleted row/column for the submatrix-interlacing entry.
    pub removed_index: Option<usize>,
    /// Direct-sum copy count for the block-averaging entry.
    pub copies: Option<usize>,
}

impl InequalityInputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, m: ComplexMatrix) -> Self {
        self.mats.insert(name.to_string(), m);
        self
    }

    pub fn insert(&mut self, name: &str, m: ComplexMatrix) {
        self.mats.insert(name.to_string(), m);
    }

    pub fn matrix(&self, name: &str) -> Result<&ComplexMatrix> {
        self.mats
            .get(name)
            .ok_or_else(|| Error::Domain(format!("missing input matrix {name:?}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.mats.keys().map(|s| s.as_str())
    }
}

/// Outcome of evaluating one registry entry on one set of inputs.
///
/// `lhs_partial`/`rhs_partial` hold the concatenated comparison vectors of
/// every part of the entry; the claim holds when each `rhs − lhs` stays above
/// `−(tol.abs + tol.rel·scale)` with `scale` the largest stored magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub lhs_partial: Vec<f64>,
    pub rhs_partial: Vec<f64>,
    pub holds: bool,
    pub min_margin: f64,
    pub tol: Tolerance,
    /// Hex digest of the inputs, for reproducing and deduplicating cases.
    pub witness: Option<String>,
}

impl InequalityReport {
    /// Largest magnitude appearing in the stored comparison vectors.
    pub fn scale(&self) -> f64 {
        self.lhs_partial
            .iter()
            .chain(&self.rhs_partial)
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise `rhs − lhs`.
    pub fn margins(&self) -> Vec<f64> {
        self.rhs_partial
            .iter()
            .zip(&self.lhs_partial)
            .map(|(r, l)| r - l)
            .collect()
    }
}

// ─── Vector plumbing ────────────────────────────────────────────────────────

struct Part {
    lhs: Vec<f64>,
    rhs: Vec<f64>,
}

fn prefix_padded(v: &[f64], len: usize) -> Vec<f64> {
    let mut acc = 0.0;
    (0..len)
        .map(|k| {
            acc += v.get(k).copied().unwrap_or(0.0);
            acc
        })
        .collect()
}

/// `lhs ≺_w rhs`: compare prefix sums of the (already sorted) operands,
/// zero-padded to a common length.
fn weak_part(lhs: &[f64], rhs: &[f64]) -> Part {
    let len = lhs.len().max(rhs.len());
    Part {
        lhs: prefix_padded(lhs, len),
        rhs: prefix_padded(rhs, len),
    }
}

/// Compare two vectors as stored, entry by entry (used both for elementwise
/// claims and for vectors that are already partial sums).
fn direct_part(lhs: Vec<f64>, rhs: Vec<f64>) -> Part {
    debug_assert_eq!(lhs.len(), rhs.len());
    Part { lhs, rhs }
}

/// Equality of two prefix-sum (or elementwise) vectors, folded into two
/// one-sided parts so that the report's single margin criterion checks both
/// directions.
fn equality_parts(parts: &mut Vec<Part>, a: Vec<f64>, b: Vec<f64>) {
    parts.push(direct_part(a.clone(), b.clone()));
    parts.push(direct_part(b, a));
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

fn scaled(v: &[f64], c: f64) -> Vec<f64> {
    v.iter().map(|x| c * x).collect()
}

/// Entrywise product of vectors that are each sorted nonincreasing, truncated
/// to the shortest length. This is the convention for products appearing on
/// the upper side of the registry's `≺_w` claims.
fn sorted_product(factors: &[&[f64]]) -> Vec<f64> {
    let len = factors.iter().map(|f| f.len()).min().unwrap_or(0);
    (0..len)
        .map(|i| factors.iter().map(|f| f[i]).product())
        .collect()
}

// ─── Matrix helpers shared by the evaluators ────────────────────────────────

fn cfg() -> AlphaSolverConfig {
    AlphaSolverConfig::default()
}

fn delta_of(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(discrepancy_values(m, &cfg())?.delta().to_vec())
}

fn joint_of(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<crate::DiscrepancyResult> {
    joint_discrepancy_values(a, b, &cfg())
}

/// Zeroes every block that straddles two partition classes. The partition
/// must mention each index exactly once.
fn pinch(a: &ComplexMatrix, partition: &[Vec<usize>]) -> Result<ComplexMatrix> {
    a.check_square()?;
    let n = a.rows();
    let mut owner = vec![usize::MAX; n];
    for (b, block) in partition.iter().enumerate() {
        for &i in block {
            if i >= n {
                return Err(Error::Domain(format!(
                    "partition index {i} out of range for size {n}"
                )));
            }
            if owner[i] != usize::MAX {
                return Err(Error::Domain(format!("partition repeats index {i}")));
            }
            owner[i] = b;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::Domain("partition must cover every index".into()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        if owner[i] == owner[j] {
            a[(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

fn required_partition(inputs: &InequalityInputs) -> Result<&Vec<Vec<usize>>> {
    inputs
        .partition
        .as_ref()
        .ok_or_else(|| Error::Domain("this entry needs a partition".into()))
}

fn submatrix(a: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

/// PSD-square-root free |A| = V diag(σ) V* from the SVD of A.
fn matrix_abs(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_square()?;
    let n = a.rows();
    let dec = svd(a)?;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|l| dec.right[(i, l)] * dec.singulars[l] * dec.right[(j, l)].conj())
            .sum()
    }))
}

fn require_unitary(m: &ComplexMatrix, name: &str) -> Result<()> {
    m.check_square()?;
    let gram = m.adjoint().mul(m)?;
    let defect = gram.sub(&ComplexMatrix::identity(m.rows()))?.fro_norm();
    if defect > 1e-8 {
        return Err(Error::Domain(format!(
            "{name} must be unitary (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian input, verified nonnegative up to roundoff.
fn require_psd(m: &ComplexMatrix, name: &str) -> Result<Vec<f64>> {
    require_hermitian(m, name)?;
    let eig = herm_eig(m)?;
    let top = eig.values.first().copied().unwrap_or(0.0).max(1.0);
    if let Some(min) = eig.values.last() {
        if *min < -1e-9 * top {
            return Err(Error::Domain(format!(
                "{name} must be positive semidefinite (min eigenvalue {min:.3e})"
            )));
        }
    }
    Ok(eig.values)
}

/// Isometry spanning the orthogonal complement of the columns of `s`,
/// extracted from the eigenvectors of the complementary projector.
fn orthogonal_complement(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, k) = (s.rows(), s.cols());
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "need a proper subspace: {k} columns in dimension {n}"
        )));
    }
    let proj = ComplexMatrix::identity(n).sub(&s.mul(&s.adjoint())?)?;
    let eig = herm_eig(&proj)?;
    if eig.values[n - k - 1] < 0.9 || eig.values[n - k] > 0.1 {
        return Err(Error::Domain(
            "matrix is not an isometry: complement projector has fuzzy spectrum".into(),
        ));
    }
    Ok(ComplexMatrix::from_fn(n, n - k, |i, j| eig.vectors[(i, j)]))
}

/// Accepts a Hermitian matrix, or a normal one whose eigenvalues are
/// collinear in the complex plane.
fn require_hermitian_or_line_normal(a: &ComplexMatrix, name: &str) -> Result<()> {
    if require_hermitian(a, name).is_ok() {
        return Ok(());
    }
    let fro = a.fro_norm();
    if a.normality_defect()? > 1e-10 * fro * fro {
        return Err(Error::Domain(format!(
            "{name} must be Hermitian or normal with collinear eigenvalues"
        )));
    }
    let eigs = normal_eigenvalues(a).ok_or_else(|| {
        Error::Numerical("could not extract the eigenvalues of a normal matrix".into())
    })?;
    let n = eigs.len() as f64;
    let center: Complex64 = eigs.iter().sum::<Complex64>() / n;
    let spread = eigs
        .iter()
        .map(|z| (z - center).norm())
        .fold(0.0f64, f64::max);
    if spread <= 1e-12 * fro.max(1.0) {
        return Ok(()); // scalar matrix: trivially on a line
    }
    let dir = eigs
        .iter()
        .max_by(|x, y| {
            (*x - center)
                .norm()
                .partial_cmp(&(*y - center).norm())
                .unwrap()
        })
        .map(|z| (z - center) / (z - center).norm())
        .unwrap();
    for z in &eigs {
        if ((z - center) / dir).im.abs() > 1e-8 * spread {
            return Err(Error::Domain(format!(
                "{name} is normal but its eigenvalues are not collinear"
            )));
        }
    }
    Ok(())
}

fn projector_rank(p: &ComplexMatrix, name: &str) -> Result<usize> {
    require_hermitian(p, name)?;
    let scale = p.fro_norm().max(1.0);
    if p.mul(p)?.sub(p)?.fro_norm() > 1e-8 * scale {
        return Err(Error::Domain(format!("{name} must be idempotent")));
    }
    let tr = p.trace()?.re;
    let r = tr.round();
    if (tr - r).abs() > 1e-8 * scale || r < 0.0 || r as usize > p.rows() {
        return Err(Error::Domain(format!(
            "{name} has non-integer rank {tr:.6}"
        )));
    }
    Ok(r as usize)
}

/// Collects the chain A1, A2, … (up to 4) for the nested-commutator entry.
fn chain(inputs: &InequalityInputs) -> Result<Vec<&ComplexMatrix>> {
    let mut out = Vec::new();
    for i in 1..=4 {
        match inputs.matrix(&format!("A{i}")) {
            Ok(m) => out.push(m),
            Err(_) => break,
        }
    }
    if out.len() < 2 {
        return Err(Error::Domain(
            "nested commutator needs matrices A1, A2, … (at least two, at most four)".into(),
        ));
    }
    Ok(out)
}

/// Minimum of the shifted Ky-Fan k-norm over a line through the complex
/// plane: `t ↦ ‖X − (t·dir)I‖_(k)`, convex in t, minimized by golden section
/// over a bracket that provably contains the minimizer for every k.
fn line_constrained_minima(x: &ComplexMatrix, dir: Complex64) -> Result<Vec<f64>> {
    let n = x.rows();
    let mut buf = ShiftedSvBuffer::new(x)?;
    let mu = x.trace()? / n as f64;
    let s = buf.eval(mu)?[0];
    // distance from the line to the disc center, along and across
    let along = (mu.re * dir.re + mu.im * dir.im).abs();
    let across = (mu.re * dir.im - mu.im * dir.re).abs();
    let radius = (n as f64 + 1.0) * (s + across) + 1e-9 * (1.0 + s + along);
    let center = mu.re * dir.re + mu.im * dir.im;

    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut f = |t: f64| match buf.eval(dir * t) {
            Ok(sv) => sv[..k].iter().sum(),
            Err(_) => f64::INFINITY,
        };
        let (_, v) = min_on_segment(&mut f, center - radius, center + radius, 90);
        out.push(v);
    }
    Ok(out)
}

// ─── Per-entry part builders ────────────────────────────────────────────────

fn build_parts(id: InequalityId, inputs: &InequalityInputs) -> Result<Vec<Part>> {
    use InequalityId::*;
    let mut parts = Vec::new();
    match id {
        R1 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            a.check_same_shape(b)?;
            let da = delta_of(a)?;
            let db = delta_of(b)?;
            let dsum = delta_of(&a.add(b)?)?;
            let ddiff = delta_of(&a.sub(b)?)?;
            let absdiff = sorted_desc(
                da.iter()
                    .zip(&db)
                    .map(|(x, y)| (x - y).abs())
                    .collect::<Vec<_>>(),
            );
            let together: Vec<f64> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
            parts.push(weak_part(&absdiff, &dsum));
            parts.push(weak_part(&absdiff, &ddiff));
            parts.push(weak_part(&dsum, &together));
            parts.push(weak_part(&ddiff, &together));
        }
        R2 => {
            let a = inputs.matrix("A")?;
            parts.push(weak_part(&delta_of(a)?, &singular_values(a)?));
        }
        R3 => {
            let a = inputs.matrix("A")?;
            let compressed = pinch(a, required_partition(inputs)?)?;
            parts.push(weak_part(&delta_of(&compressed)?, &delta_of(a)?));
        }
        R4 => {
            let a = inputs.matrix("A")?;
            let partition = required_partition(inputs)?;
            if partition.len() != 2 {
                return Err(Error::Domain(
                    "the off-block remainder entry needs a two-block partition".into(),
                ));
            }
            let remainder = a.sub(&pinch(a, partition)?)?;
            parts.push(weak_part(&delta_of(&remainder)?, &delta_of(a)?));
        }
        R5 => {
            let a = inputs.matrix("A")?;
            let partition = required_partition(inputs)?;
            if partition.len() != 2 {
                return Err(Error::Domain(
                    "the off-diagonal block entry needs a two-block partition".into(),
                ));
            }
            let m = a.sub(&pinch(a, partition)?)?;
            let mut merged = singular_values(&submatrix(a, &partition[0], &partition[1]))?;
            merged.extend(singular_values(&submatrix(a, &partition[1], &partition[0]))?);
            merged.resize(a.rows(), 0.0);
            let merged = sorted_desc(merged);
            let dm = delta_of(&m)?;
            // the two independent σ routes must agree, and δ = σ here
            equality_parts(&mut parts, prefix_padded(&singular_values(&m)?, a.rows()),
                prefix_padded(&merged, a.rows()));
            equality_parts(&mut parts, prefix_padded(&dm, a.rows()),
                prefix_padded(&merged, a.rows()));
            parts.push(weak_part(&dm, &delta_of(a)?));
        }
        R6 => {
            let x = inputs.matrix("X")?;
            let s = inputs.matrix("S")?;
            if s.rows() != x.rows() {
                return Err(Error::Dimension {
                    expected: format!("{} rows", x.rows()),
                    got: format!("{}", s.rows()),
                });
            }
            let sperp = orthogonal_complement(s)?;
            let mid = s.adjoint().mul(x)?.mul(&sperp)?;
            let r = s.cols().min(x.rows() - s.cols());
            parts.push(weak_part(&singular_values(&mid)?, &delta_of(x)?[..r]));
        }
        R7 => {
            let x = inputs.matrix("X")?;
            require_hermitian(x, "X")?;
            parts.push(weak_part(&delta_of(&expi_hermitian(x)?)?, &singular_values(x)?));
        }
        R8 => {
            let a = inputs.matrix("A")?;
            let rotor = expi_hermitian(&matrix_abs(a)?)?;
            parts.push(weak_part(&delta_of(&rotor)?, &singular_values(a)?));
        }
        R9 => {
            let a = inputs.matrix("A")?;
            let n = a.rows();
            let d_abs = delta_of(&matrix_abs(a)?)?;
            let sv = singular_values(a)?;
            let fold = sorted_desc(
                (0..n)
                    .map(|i| 0.5 * (sv[i] - sv[n - 1 - i]).abs())
                    .collect::<Vec<_>>(),
            );
            equality_parts(&mut parts, prefix_padded(&d_abs, n), prefix_padded(&fold, n));
            parts.push(weak_part(&d_abs, &delta_of(a)?));
        }
        R10 => {
            let p = inputs.matrix("P")?;
            let q = inputs.matrix("Q")?;
            require_psd(p, "P")?;
            require_unitary(q, "Q")?;
            parts.push(weak_part(&delta_of(p)?, &delta_of(&q.mul(p)?)?));
        }
        R11 => {
            let x = inputs.matrix("X")?;
            let s = inputs.matrix("S")?;
            require_hermitian(x, "X")?;
            let rotated = expi_hermitian(x)?.mul(s)?;
            let angles = principal_angles(s, &rotated)?;
            let r = s.cols().min(x.rows() - s.cols());
            if r == 0 {
                return Err(Error::Domain("the subspace must be proper".into()));
            }
            parts.push(weak_part(&angles[..r], &delta_of(x)?[..r]));
        }
        R12 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            let joint = joint_of(a, b)?;
            let mut dup = Vec::with_capacity(2 * joint.n());
            for d in joint.delta() {
                dup.push(*d);
                dup.push(*d);
            }
            parts.push(weak_part(&dup, &delta_of(&a.direct_sum(b))?));
        }
        R13 => {
            let a = inputs.matrix("A")?;
            let n = a.rows();
            if n % 2 != 0 {
                return Err(Error::Domain(
                    "pair averaging needs an even dimension".into(),
                ));
            }
            let lam = require_psd(a, "A")?;
            let lhs = mu_k(&delta_of(a)?, 2)?;
            let mids: Vec<f64> = (0..n / 2)
                .map(|j| 0.5 * (lam[j] + lam[n - 1 - j]))
                .collect();
            parts.push(direct_part(lhs, mids));
        }
        R14 => {
            let a = inputs.matrix("A")?;
            let copies = inputs.copies.unwrap_or(2);
            if copies < 2 || copies * a.rows() > 16 {
                return Err(Error::Domain(format!(
                    "copy count {copies} out of range for size {}",
                    a.rows()
                )));
            }
            let mut stacked = a.clone();
            for _ in 1..copies {
                stacked = stacked.direct_sum(a);
            }
            let lhs = mu_k(&delta_of(&stacked)?, copies)?;
            let rhs = delta_of(a)?;
            let n = rhs.len();
            equality_parts(&mut parts, prefix_padded(&lhs, n), prefix_padded(&rhs, n));
        }
        R15 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            let x = inputs.matrix("X")?;
            let joint = joint_of(a, b)?;
            let lhs = singular_values(&generalized_commutator(a, x, b)?)?;
            let rhs = sorted_product(&[&scaled(joint.delta(), 2.0), &singular_values(x)?]);
            parts.push(weak_part(&lhs, &rhs));
        }
        R16 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            let lhs = singular_values(&bracket(b, a)?)?;
            let rhs = sorted_product(&[&scaled(&delta_of(b)?, 2.0), &singular_values(a)?]);
            parts.push(weak_part(&lhs, &rhs));
        }
        R17 | R26 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            if id == R17 {
                require_hermitian_or_line_normal(a, "A")?;
            }
            let lhs = singular_values(&bracket(a, b)?)?;
            let rhs = sorted_product(&[&scaled(&delta_of(a)?, 2.0), &delta_of(b)?]);
            parts.push(weak_part(&lhs, &rhs));
        }
        R18 => {
            let a = inputs.matrix("A")?;
            let p = inputs.matrix("P")?;
            a.check_same_shape(p)?;
            let n = a.rows();
            let r = projector_rank(p, "P")?;
            let da = delta_of(a)?;
            let complement = ComplexMatrix::identity(n).sub(p)?;
            let compressed = p.mul(a)?.mul(&complement)?;
            parts.push(weak_part(&singular_values(&compressed)?, &da));

            let q = (2 * r).min(2 * (n - r));
            let mut capped = da.clone();
            for v in capped.iter_mut().skip(q) {
                *v = 0.0;
            }
            parts.push(weak_part(&singular_values(&bracket(a, p)?)?, &capped));
        }
        R19 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            let joint = joint_of(a, b)?;
            let doubled = scaled(joint.delta(), 2.0);
            parts.push(weak_part(&singular_values(&a.sub(b)?)?, &doubled));
            let averaged = mu_k(&delta_of(&a.direct_sum(b))?, 2)?;
            parts.push(weak_part(&doubled, &scaled(&averaged, 2.0)));
        }
        R20 => {
            let a = inputs.matrix("A")?;
            let n = a.rows();
            let joint = joint_of(a, &ComplexMatrix::zeros(n, n))?;
            let doubled: Vec<f64> = joint.partial_norms.iter().map(|p| 2.0 * p).collect();
            equality_parts(
                &mut parts,
                prefix_padded(&singular_values(a)?, n),
                doubled,
            );
        }
        R21 => {
            let x = inputs.matrix("X")?;
            let adj = x.adjoint();
            let plus = joint_of(x, &adj)?;
            let real_minima = line_constrained_minima(x, Complex64::new(-1.0, 0.0))?;
            equality_parts(&mut parts, plus.partial_norms.clone(), real_minima);

            let minus = joint_of(&x.scale(Complex64::new(-1.0, 0.0)), &adj)?;
            let imag_minima = line_constrained_minima(x, Complex64::new(0.0, -1.0))?;
            equality_parts(&mut parts, minus.partial_norms.clone(), imag_minima);

            // X - X* equals (X - tI) - (X - tI)* only when the shift t is
            // real, so the skew part bounds against the adjoint-pair values
            // (the best real shift). The unconstrained values can sit
            // strictly lower: diag(i, 0) has delta_1 = 1/2 while
            // sigma_1(X - X*) = 2.
            let skew = x.sub(&adj)?;
            parts.push(weak_part(
                &singular_values(&skew)?,
                &scaled(plus.delta(), 2.0),
            ));
        }
        R22 => {
            let mats = chain(inputs)?;
            let m = mats.len();
            let mut nested = mats[m - 1].clone();
            for a in mats[..m - 1].iter().rev() {
                nested = bracket(a, &nested)?;
            }
            let lhs = singular_values(&nested)?;
            let coeff = (1u64 << (m - 1)) as f64;

            let deltas: Vec<Vec<f64>> = mats
                .iter()
                .map(|a| delta_of(a))
                .collect::<Result<Vec<_>>>()?;
            let head_sigma = singular_values(mats[0])?;
            let mut general: Vec<&[f64]> = vec![&head_sigma];
            for d in &deltas[1..] {
                general.push(d);
            }
            parts.push(weak_part(&lhs, &scaled(&sorted_product(&general), coeff)));

            let all_hermitian = mats
                .iter()
                .all(|a| require_hermitian(a, "chain element").is_ok());
            if all_hermitian {
                let factors: Vec<&[f64]> = deltas.iter().map(|d| d.as_slice()).collect();
                parts.push(weak_part(&lhs, &scaled(&sorted_product(&factors), coeff)));
            }
        }
        R23 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            a.check_same_shape(b)?;
            let grown = expm(a)?
                .mul(b)?
                .mul(&expm(&a.scale(Complex64::new(-1.0, 0.0)))?)?;
            let sb = singular_values(b)?;
            let inflate: Vec<f64> = delta_of(a)?.iter().map(|d| (2.0 * d).exp()).collect();
            parts.push(weak_part(
                &singular_values(&grown)?,
                &sorted_product(&[&sb, &inflate]),
            ));

            if require_hermitian(a, "A").is_ok() {
                let eig = herm_eig(a)?;
                let top = eig.values[0];
                let bottom = *eig.values.last().unwrap();
                if bottom > 1e-10 * top.abs().max(1.0) {
                    let n = a.rows();
                    let inv = ComplexMatrix::from_fn(n, n, |i, j| {
                        (0..n)
                            .map(|l| {
                                eig.vectors[(i, l)] * (1.0 / eig.values[l])
                                    * eig.vectors[(j, l)].conj()
                            })
                            .sum()
                    });
                    let conjugated = a.mul(b)?.mul(&inv)?;
                    parts.push(weak_part(
                        &singular_values(&conjugated)?,
                        &scaled(&sb, top / bottom),
                    ));
                }
            }
        }
        R24 => {
            let a = inputs.matrix("A")?;
            let b = inputs.matrix("B")?;
            require_hermitian(a, "A")?;
            a.check_same_shape(b)?;
            let ab = a.mul(b)?;
            let lhs_matrix = a.mul(a)?.mul(&b.mul(b)?)?.sub(&ab.mul(&ab)?)?;
            let rhs = scaled(
                &sorted_product(&[
                    &delta_of(a)?,
                    &delta_of(b)?,
                    &singular_values(a)?,
                    &singular_values(b)?,
                ]),
                2.0,
            );
            parts.push(weak_part(&singular_values(&lhs_matrix)?, &rhs));
        }
        R25 => {
            let a = inputs.matrix("A")?;
            require_hermitian(a, "A")?;
            let idx = inputs
                .removed_index
                .ok_or_else(|| Error::Domain("this entry needs removed_index".into()))?;
            let b = a.delete_index(idx)?;
            let da = delta_of(a)?;
            let db = delta_of(&b)?;
            let n = da.len();
            // deleting an index steps the interlacing by two because the
            // values of a Hermitian matrix come in equal pairs
            parts.push(direct_part(db.clone(), da[..n - 1].to_vec()));
            if n >= 3 {
                parts.push(direct_part(da[2..].to_vec(), db[..n - 2].to_vec()));
            }
        }
    }
    Ok(parts)
}

/// Evaluates one registry entry on concrete inputs. The report concatenates
/// the margin data of every part of the claim (see the module docs for the
/// conventions), so multi-part entries stand or fall as a whole.
pub fn evaluate_inequality(
    id: InequalityId,
    inputs: &InequalityInputs,
    tol: Tolerance,
) -> Result<InequalityReport> {
    let parts = build_parts(id, inputs)?;
    let mut lhs_partial = Vec::new();
    let mut rhs_partial = Vec::new();
    for p in parts {
        lhs_partial.extend(p.lhs);
        rhs_partial.extend(p.rhs);
    }
    let scale = lhs_partial
        .iter()
        .chain(&rhs_partial)
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let min_margin = lhs_partial
        .iter()
        .zip(&rhs_partial)
        .map(|(l, r)| r - l)
        .fold(f64::INFINITY, f64::min);
    let holds = min_margin >= -tol.slack(scale);
    Ok(InequalityReport {
        id,
        lhs_partial,
        rhs_partial,
        holds,
        min_margin,
        tol,
        witness: Some(digest_inputs(id, inputs)),
    })
}

fn digest_inputs(id: InequalityId, inputs: &InequalityInputs) -> String {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15 ^ id.index() as u64;
    let mix = |h: &mut u64, x: u64| *h = splitmix64(*h ^ x);
    for (name, m) in &inputs.mats {
        for byte in name.bytes() {
            mix(&mut h, byte as u64);
        }
        mix(&mut h, m.rows() as u64);
        mix(&mut h, m.cols() as u64);
        for z in m.data() {
            mix(&mut h, z.re.to_bits());
            mix(&mut h, z.im.to_bits());
        }
    }
    if let Some(partition) = &inputs.partition {
        for block in partition {
            mix(&mut h, 0xB10C);
            for &i in block {
                mix(&mut h, i as u64);
            }
        }
    }
    if let Some(i) = inputs.removed_index {
        mix(&mut h, 0xDE1E ^ (i as u64) << 16);
    }
    if let Some(c) = inputs.copies {
        mix(&mut h, 0xC0B1 ^ (c as u64) << 16);
    }
    format!("{h:016x}")
}

// ─── Seeded instance generation ─────────────────────────────────────────────

fn shuffled_indices(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    use rand::RngCore;
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        idx.swap(i, j);
    }
    idx
}

fn random_partition(n: usize, blocks: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    use rand::RngCore;
    assert!(blocks >= 2 && blocks <= n);
    let idx = shuffled_indices(n, rng);
    // random block sizes, each at least one
    let mut cuts = vec![0usize, n];
    while cuts.len() < blocks + 1 {
        let c = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| idx[w[0]..w[1]].to_vec())
        .collect()
}

fn isometry_columns(n: usize, k: usize, seed: u64) -> ComplexMatrix {
    let u = random_unitary(n, seed);
    ComplexMatrix::from_fn(n, k, |i, j| u[(i, j)])
}

/// Builds a random input set for one registry entry, deterministically from
/// the seed. The generators stay inside each entry's preconditions (and for
/// the entries whose general form is only conjectured at depth, they
/// alternate between the proved and the general flavor).
pub fn random_instance(id: InequalityId, n: usize, seed: u64) -> Result<InequalityInputs> {
    use rand::RngCore;
    if !id.applicable(n) {
        return Err(Error::Domain(format!(
            "{id} has no instances at dimension {n}"
        )));
    }
    let mut rng = rng_from_seed(trial_seed(seed, 0x1D ^ id.index() as u64));
    let mut inputs = InequalityInputs::new();
    use InequalityId::*;
    match id {
        R1 | R12 | R16 | R19 | R26 => {
            inputs.insert("A", ginibre(n, n, &mut rng));
            inputs.insert("B", ginibre(n, n, &mut rng));
        }
        R2 | R8 | R9 | R20 => {
            inputs.insert("A", ginibre(n, n, &mut rng));
        }
        R3 => {
            inputs.insert("A", ginibre(n, n, &mut rng));
            let blocks = if n >= 3 && rng.next_u64() % 2 == 0 { 3 } else { 2 };
            inputs.partition = Some(random_partition(n, blocks, &mut rng));
        }
        R4 | R5 => {
            inputs.insert("A", ginibre(n, n, &mut rng));
            inputs.partition = Some(random_partition(n, 2, &mut rng));
        }
        R6 => {
            inputs.insert("X", ginibre(n, n, &mut rng));
            let k = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
            inputs.insert("S", isometry_columns(n, k, rng.next_u64()));
        }
        R7 => {
            inputs.insert("X", random_hermitian(n, &mut rng));
        }
        R10 => {
            inputs.insert("P", random_psd(n, &mut rng));
            inputs.insert("Q", random_unitary(n, rng.next_u64()));
        }
        R11 => {
            inputs.insert("X", random_hermitian(n, &mut rng));
            let k = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
            inputs.insert("S", isometry_columns(n, k, rng.next_u64()));
        }
        R13 => {
            inputs.insert("A", random_psd(n, &mut rng));
        }
        R14 => {
            inputs.insert("A", ginibre(n, n, &mut rng));
            let copies = if 3 * n <= 12 && rng.next_u64() % 2 == 0 { 3 } else { 2 };
            inputs.copies = Some(copies);
        }
        R15 => {
            inputs.insert("A", ginibre(n, n, &mut rng));
            inputs.insert("B", ginibre(n, n, &mut rng));
            inputs.insert("X", ginibre(n, n, &mut rng));
        }
        R17 => {
            inputs.insert("A", random_hermitian(n, &mut rng));
            inputs.insert("B", ginibre(n, n, &mut rng));
        }
        R18 => {
            inputs.insert("A", ginibre(n, n, &mut rng));
            let r = 1 + (rng.next_u64() % (n as u64 - 1)) as usize;
            let s = isometry_columns(n, r, rng.next_u64());
            inputs.insert("P", s.mul(&s.adjoint())?);
        }
        R21 => {
            inputs.insert("X", ginibre(n, n, &mut rng));
        }
        R22 => {
            let h = rng.next_u64();
            let m = 2 + (h % 3) as usize;
            let hermitian_chain = (h >> 8) % 2 == 0;
            for i in 1..=m {
                let mat = if hermitian_chain {
                    random_hermitian(n, &mut rng)
                } else {
                    ginibre(n, n, &mut rng)
                };
                inputs.insert(&format!("A{i}"), mat);
            }
        }
        R23 => {
            let a = if rng.next_u64() % 2 == 0 {
                let p = random_psd(n, &mut rng);
                let shift = 0.1 + 0.05 * p.fro_norm();
                p.add(&ComplexMatrix::identity(n).scale(Complex64::new(shift, 0.0)))?
            } else {
                ginibre(n, n, &mut rng)
            };
            inputs.insert("A", a);
            inputs.insert("B", ginibre(n, n, &mut rng));
        }
        R24 => {
            inputs.insert("A", random_hermitian(n, &mut rng));
            inputs.insert("B", ginibre(n, n, &mut rng));
        }
        R25 => {
            inputs.insert("A", random_hermitian(n, &mut rng));
            inputs.removed_index = Some((rng.next_u64() % n as u64) as usize);
        }
    }
    Ok(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex64;

    fn check(id: InequalityId, inputs: &InequalityInputs) -> InequalityReport {
        evaluate_inequality(id, inputs, Tolerance::default()).unwrap()
    }

    #[test]
    fn commutator_of_flip_and_signs_has_zero_margin() {
        let b = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        // σ([B,A]) = (2,2) and the bound 2δ(B)σ(A) = (2,2): tight
        let report = check(
            InequalityId::R16,
            &InequalityInputs::new().with("A", a).with("B", b),
        );
        assert!(report.holds);
        assert!(report.min_margin.abs() < 1e-8, "margin {}", report.min_margin);
    }

    #[test]
    fn scalar_matrices_have_zero_discrepancy_side() {
        let c = C::new(1.3, -0.4);
        let report = check(
            InequalityId::R2,
            &InequalityInputs::new().with("A", ComplexMatrix::diag(&[c, c, c])),
        );
        assert!(report.holds);
        assert!(report.lhs_partial.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn joint_discrepancy_with_zero_halves_the_spectrum() {
        let report = check(
            InequalityId::R20,
            &InequalityInputs::new().with("A", ComplexMatrix::diag_real(&[3.0, 1.0])),
        );
        assert!(report.holds);
        // equality entry: margins in both directions stay near zero
        assert!(report.min_margin > -1e-8);
        assert!((report.lhs_partial[0] - 3.0).abs() < 1e-9);
        assert!((report.rhs_partial[0] - 3.0).abs() < 1e-7);
    }

    #[test]
    fn skew_part_clears_the_pair_value_bound() {
        // The best unconstrained shift for diag(i, 0) is i/2, which no real
        // shift matches: sigma_1(X - X*) = 2 but the unconstrained values
        // give 2*delta_1 = 1. Against the pair values the bound is tight.
        let x = ComplexMatrix::diag(&[C::new(0.0, 1.0), C::new(0.0, 0.0)]);
        let report = check(InequalityId::R21, &InequalityInputs::new().with("X", x));
        assert!(report.holds, "margin {}", report.min_margin);
        assert!(report.min_margin > -1e-8, "margin {}", report.min_margin);
    }

    #[test]
    fn ids_round_trip_and_describe() {
        for id in InequalityId::all() {
            let s = id.to_string();
            assert_eq!(s.parse::<InequalityId>().unwrap(), id);
            assert!(!id.describe().is_empty());
        }
        assert_eq!("r9".parse::<InequalityId>().unwrap(), InequalityId::R9);
        assert!("R0".parse::<InequalityId>().is_err());
        assert!("R27".parse::<InequalityId>().is_err());
        assert!("Q1".parse::<InequalityId>().is_err());
        assert!(InequalityId::R26.is_conjecture());
        assert!(!InequalityId::R17.is_conjecture());
        assert!(InequalityId::R13.applicable(4));
        assert!(!InequalityId::R13.applicable(5));
    }

    #[test]
    fn input_validation_errors() {
        let a = ComplexMatrix::diag_real(&[1.0, 2.0]);
        let missing = evaluate_inequality(
            InequalityId::R1,
            &InequalityInputs::new().with("A", a.clone()),
            Tolerance::default(),
        );
        assert!(missing.is_err());

        let no_partition = evaluate_inequality(
            InequalityId::R3,
            &InequalityInputs::new().with("A", a.clone()),
            Tolerance::default(),
        );
        assert!(no_partition.is_err());

        let mut bad = InequalityInputs::new().with("A", ComplexMatrix::diag_real(&[1.0, 2.0, 3.0]));
        bad.partition = Some(vec![vec![0, 1], vec![1, 2]]);
        assert!(evaluate_inequality(InequalityId::R3, &bad, Tolerance::default()).is_err());

        let odd_psd = ComplexMatrix::diag_real(&[2.0, 1.0, 0.5]);
        assert!(evaluate_inequality(
            InequalityId::R13,
            &InequalityInputs::new().with("A", odd_psd),
            Tolerance::default()
        )
        .is_err());
        assert!(random_instance(InequalityId::R13, 5, 1).is_err());

        // non-Hermitian where Hermitian is demanded
        let mut g = ComplexMatrix::zeros(2, 2);
        g[(0, 1)] = C::new(1.0, 0.0);
        assert!(evaluate_inequality(
            InequalityId::R24,
            &InequalityInputs::new().with("A", g.clone()).with("B", g),
            Tolerance::default()
        )
        .is_err());
    }

    #[test]
    fn generated_instances_hold_across_the_registry() {
        for id in InequalityId::all() {
            for n in [3usize, 4] {
                if !id.applicable(n) {
                    continue;
                }
                let inputs = random_instance(id, n, 7 * n as u64).unwrap();
                let report = check(id, &inputs);
                assert!(
                    report.holds,
                    "{id} failed at n={n}: margin {:.3e}",
                    report.min_margin
                );
            }
        }
    }

    #[test]
    fn digests_are_deterministic_and_input_sensitive() {
        let i1 = random_instance(InequalityId::R16, 4, 99).unwrap();
        let i2 = random_instance(InequalityId::R16, 4, 99).unwrap();
        let i3 = random_instance(InequalityId::R16, 4, 100).unwrap();
        let r1 = check(InequalityId::R16, &i1);
        let r2 = check(InequalityId::R16, &i2);
        let r3 = check(InequalityId::R16, &i3);
        assert_eq!(r1.witness, r2.witness);
        assert_ne!(r1.witness, r3.witness);
        assert_eq!(r1.min_margin.to_bits(), r2.min_margin.to_bits());
    }

    #[test]
    fn report_is_self_contained() {
        let inputs = random_instance(InequalityId::R9, 4, 5).unwrap();
        let report = check(InequalityId::R9, &inputs);
        let slack = report.tol.slack(report.scale());
        let recomputed = report
            .margins()
            .iter()
            .fold(f64::INFINITY, |acc, m| acc.min(*m));
        assert_eq!(recomputed.to_bits(), report.min_margin.to_bits());
        assert_eq!(report.holds, report.min_margin >= -slack);
    }
}
