//! Real-vector machinery: weak majorization checks, the block-averaging
//! operator μ_k, and the spectral spread of a sorted eigenvalue list.

use crate::{Error, Result};

/// Absolute/relative tolerance pair used by every inequality checker.
///
/// The relative part is scaled by the dominant partial sum of the comparison
/// (never less than 1), so checks stay meaningful for large-norm matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-9,
            rel: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Effective slack for a comparison whose dominant magnitude is `scale`.
    pub fn slack(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs().max(1.0)
    }
}

/// Canonicalized carrier for singular-value-like vectors: sorted
/// nonincreasing, with small negative roundoff clamped to zero.  Genuinely
/// negative entries are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVector {
    values: Vec<f64>,
}

impl SpectrumVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tol(values, Tolerance::default().abs)
    }

    pub fn with_tol(mut values: Vec<f64>, neg_tol: f64) -> Result<Self> {
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(Error::Domain("non-finite entry in spectrum vector".into()));
            }
            if *v < 0.0 {
                if *v < -neg_tol {
                    return Err(Error::Domain(format!(
                        "negative entry {v:.3e} in a nonnegative spectrum vector"
                    )));
                }
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Outcome of a majorization check: per-k margins (upper partial sum minus
/// lower partial sum; nonnegative when the inequality holds exactly).
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityVerdict {
    pub holds: bool,
    pub margins: Vec<f64>,
}

impl InequalityVerdict {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn padded_prefix_sums(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for k in 0..len {
        acc += v.get(k).copied().unwrap_or(0.0);
        out.push(acc);
    }
    out
}

/// Checks `lower ≺_w upper`: every prefix sum of the (sorted, zero-padded)
/// lower vector stays below the corresponding prefix sum of the upper one,
/// within tolerance.
pub fn weak_majorizes(
    upper: &SpectrumVector,
    lower: &SpectrumVector,
    tol: Tolerance,
) -> InequalityVerdict {
    let len = upper.len().max(lower.len());
    let up = padded_prefix_sums(upper.values(), len);
    let lo = padded_prefix_sums(lower.values(), len);
    let slack = tol.slack(upper.sum());
    let margins: Vec<f64> = up.iter().zip(&lo).map(|(u, l)| u - l).collect();
    let holds = margins.iter().all(|&m| m >= -slack);
    InequalityVerdict { holds, margins }
}

/// Checks `lower ≺ upper`: weak majorization plus equality of totals.
pub fn majorizes(
    upper: &SpectrumVector,
    lower: &SpectrumVector,
    tol: Tolerance,
) -> InequalityVerdict {
    let weak = weak_majorizes(upper, lower, tol);
    let slack = tol.slack(upper.sum());
    let sums_match = (upper.sum() - lower.sum()).abs() <= slack;
    InequalityVerdict {
        holds: weak.holds && sums_match,
        margins: weak.margins,
    }
}

/// Block-averages consecutive groups of k entries, in the given order.
pub fn mu_k(x: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || x.len() % k != 0 {
        return Err(Error::Domain(format!(
            "mu_k needs the length ({}) to be divisible by k ({k})",
            x.len()
        )));
    }
    Ok(x.chunks(k)
        .map(|c| c.iter().sum::<f64>() / k as f64)
        .collect())
}

/// Spectral spread of a nonincreasing eigenvalue list:
/// (λ_i − λ_{n−i+1}) for i ≤ ⌊n/2⌋.
pub fn spectral_spread(lambda: &[f64]) -> Result<SpectrumVector> {
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Domain(
            "spectral_spread expects eigenvalues sorted nonincreasing".into(),
        ));
    }
    let n = lambda.len();
    let spread: Vec<f64> = (0..n / 2).map(|i| lambda[i] - lambda[n - 1 - i]).collect();
    SpectrumVector::new(spread)
}
