//! Randomized search for counterexamples to the commutator bound
//! σ([A,B]) ≺_w 2 δ(A) δ(B).
//!
//! The bound is proved when A is Hermitian (or normal with collinear
//! eigenvalues) and open in general, so the campaign is split into matrix
//! classes: the proved classes act as a regression check on the evaluator,
//! the general class probes the open case. A clean run on the general class
//! means "no counterexample found", nothing stronger.
//!
//! Trials are independent and deterministic: trial `t` always draws from
//! `trial_seed(master_seed, t)`, so campaigns are reproducible across thread
//! counts and a worst case can be regenerated from its trial index alone.

use super::registry::{evaluate_inequality, InequalityId, InequalityInputs};
use crate::matcore::{
    ginibre, random_hermitian, random_line_normal, rng_from_seed, trial_seed, ComplexMatrix,
};
use crate::majorize::Tolerance;
use crate::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Distribution of the pair (A, B) in a fuzzing campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixClass {
    /// Both factors complex Ginibre. The bound is a conjecture here.
    General,
    /// A Hermitian, B Ginibre. The bound is proved for this class.
    HermitianVsGeneral,
    /// A normal with collinear eigenvalues, B Ginibre. Also proved.
    NormalLine,
}

impl MatrixClass {
    fn id(self) -> InequalityId {
        match self {
            MatrixClass::General => InequalityId::R26,
            MatrixClass::HermitianVsGeneral | MatrixClass::NormalLine => InequalityId::R17,
        }
    }

    fn sample(self, n: usize, rng: &mut ChaCha8Rng) -> (ComplexMatrix, ComplexMatrix) {
        let a = match self {
            MatrixClass::General => ginibre(n, n, rng),
            MatrixClass::HermitianVsGeneral => random_hermitian(n, rng),
            MatrixClass::NormalLine => random_line_normal(n, rng),
        };
        (a, ginibre(n, n, rng))
    }

    /// Whether a clean campaign is evidence for a theorem (proved class) or
    /// merely absence of a counterexample.
    pub fn is_proved(self) -> bool {
        !self.id().is_conjecture()
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixClass::General => "general",
            MatrixClass::HermitianVsGeneral => "hermitian_vs_general",
            MatrixClass::NormalLine => "normal_line",
        })
    }
}

impl FromStr for MatrixClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "general" => Ok(MatrixClass::General),
            "hermitian_vs_general" => Ok(MatrixClass::HermitianVsGeneral),
            "normal_line" => Ok(MatrixClass::NormalLine),
            other => Err(Error::Domain(format!("unknown matrix class {other:?}"))),
        }
    }
}

/// Outcome of a fuzzing campaign.
///
/// Margins are reported in units of the tolerance slack of their own trial,
/// so `worst_margin >= -1.0` is exactly `violations == 0`; a worst margin
/// near +0.0 means the bound was nearly tight somewhere, large positive
/// means it was slack everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzReport {
    pub class: MatrixClass,
    pub trials: u64,
    pub n_min: usize,
    pub n_max: usize,
    pub master_seed: u64,
    pub tol: Tolerance,
    /// Smallest margin seen, in slack units.
    pub worst_margin: f64,
    /// Trial index attaining `worst_margin` (ties go to the lowest index).
    pub worst_trial: u64,
    /// Seed that regenerates the worst trial.
    pub worst_seed: u64,
    /// The worst pair itself, kept when its dimension is at most 8.
    pub worst_witness: Option<(ComplexMatrix, ComplexMatrix)>,
    pub violations: u64,
    /// Trials the evaluator could not finish (solver breakdown). Counted,
    /// not fatal; a nonzero value deserves investigation.
    pub failures: u64,
}

impl FuzzReport {
    /// Dimension used by trial `t`: cycles through `n_min..=n_max`.
    pub fn trial_dim(&self, t: u64) -> usize {
        self.n_min + (t % (self.n_max - self.n_min + 1) as u64) as usize
    }
}

/// Running state of the parallel reduction: the lexicographically smallest
/// (margin, trial) pair seen plus the campaign tallies. Combining two of
/// these is associative and commutative, so the reduction result does not
/// depend on how rayon splits the range.
struct Agg {
    margin: f64,
    trial: u64,
    violations: u64,
    failures: u64,
}

impl Agg {
    fn empty() -> Self {
        Agg {
            margin: f64::INFINITY,
            trial: u64::MAX,
            violations: 0,
            failures: 0,
        }
    }

    fn merge(self, other: Self) -> Self {
        let (small, large) = if (self.margin, self.trial) <= (other.margin, other.trial) {
            (self, other)
        } else {
            (other, self)
        };
        Agg {
            margin: small.margin,
            trial: small.trial,
            violations: small.violations + large.violations,
            failures: small.failures + large.failures,
        }
    }
}

fn run_trial(class: MatrixClass, n: usize, seed: u64, tol: Tolerance, t: u64) -> Agg {
    let mut rng = rng_from_seed(seed);
    let (a, b) = class.sample(n, &mut rng);
    let inputs = InequalityInputs::new().with("A", a).with("B", b);
    match evaluate_inequality(class.id(), &inputs, tol) {
        Ok(report) => {
            let slack = tol.slack(report.scale()).max(f64::MIN_POSITIVE);
            Agg {
                margin: report.min_margin / slack,
                trial: t,
                violations: u64::from(!report.holds),
                failures: 0,
            }
        }
        Err(_) => Agg {
            margin: f64::INFINITY,
            trial: t,
            violations: 0,
            failures: 1,
        },
    }
}

/// Runs `trials` independent random trials of the commutator bound on the
/// given class, cycling the dimension through `n_min..=n_max`.
///
/// The report is a pure function of the arguments: trials are seeded
/// individually, and ties in the worst margin resolve to the lowest trial
/// index, so the parallel reduction is order-independent.
pub fn fuzz_conjecture(
    n_min: usize,
    n_max: usize,
    trials: u64,
    master_seed: u64,
    tol: Tolerance,
    class: MatrixClass,
) -> Result<FuzzReport> {
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if n_min < 2 || n_min > n_max || n_max > 12 {
        return Err(Error::Domain(format!(
            "dimension range {n_min}..={n_max} outside the supported 2..=12"
        )));
    }
    let span = (n_max - n_min + 1) as u64;

    let agg = (0..trials)
        .into_par_iter()
        .map(|t| {
            let n = n_min + (t % span) as usize;
            run_trial(class, n, trial_seed(master_seed, t), tol, t)
        })
        .reduce(Agg::empty, Agg::merge);

    // the worst pair is reproduced from its seed rather than carried through
    // the reduction, which keeps the hot path free of matrix clones
    let worst_seed = trial_seed(master_seed, agg.trial);
    let worst_n = n_min + (agg.trial % span) as usize;
    let worst_witness = if agg.margin.is_finite() && worst_n <= 8 {
        let mut rng = rng_from_seed(worst_seed);
        Some(class.sample(worst_n, &mut rng))
    } else {
        None
    };

    Ok(FuzzReport {
        class,
        trials,
        n_min,
        n_max,
        master_seed,
        tol,
        worst_margin: agg.margin,
        worst_trial: agg.trial,
        worst_seed,
        worst_witness,
        violations: agg.violations,
        failures: agg.failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_arguments() {
        let tol = Tolerance::default();
        assert!(fuzz_conjecture(2, 4, 0, 1, tol, MatrixClass::General).is_err());
        assert!(fuzz_conjecture(1, 4, 10, 1, tol, MatrixClass::General).is_err());
        assert!(fuzz_conjecture(4, 3, 10, 1, tol, MatrixClass::General).is_err());
        assert!(fuzz_conjecture(2, 13, 10, 1, tol, MatrixClass::General).is_err());
    }

    #[test]
    fn class_names_round_trip() {
        for class in [
            MatrixClass::General,
            MatrixClass::HermitianVsGeneral,
            MatrixClass::NormalLine,
        ] {
            assert_eq!(class.to_string().parse::<MatrixClass>().unwrap(), class);
        }
        assert!("hermitian".parse::<MatrixClass>().is_err());
        assert!(MatrixClass::HermitianVsGeneral.is_proved());
        assert!(MatrixClass::NormalLine.is_proved());
        assert!(!MatrixClass::General.is_proved());
    }

    #[test]
    fn repeated_campaigns_agree_exactly() {
        let tol = Tolerance::default();
        let a = fuzz_conjecture(2, 4, 60, 0xFEED, tol, MatrixClass::General).unwrap();
        let b = fuzz_conjecture(2, 4, 60, 0xFEED, tol, MatrixClass::General).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.worst_margin.to_bits(), b.worst_margin.to_bits());
        assert_eq!(a.worst_seed, trial_seed(0xFEED, a.worst_trial));
    }

    #[test]
    fn two_by_two_general_trials_stay_clean() {
        let report =
            fuzz_conjecture(2, 2, 200, 11, Tolerance::default(), MatrixClass::General).unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.failures, 0);
        assert!(report.worst_margin >= -1.0);
        let (a, b) = report.worst_witness.as_ref().expect("dimension 2 keeps the pair");
        assert_eq!((a.rows(), a.cols()), (2, 2));
        assert_eq!((b.rows(), b.cols()), (2, 2));
        assert_eq!(report.trial_dim(report.worst_trial), 2);
    }

    #[test]
    fn proved_classes_stay_clean_on_mixed_dimensions() {
        let herm = fuzz_conjecture(
            2,
            4,
            100,
            21,
            Tolerance::default(),
            MatrixClass::HermitianVsGeneral,
        )
        .unwrap();
        assert_eq!(herm.violations, 0, "worst margin {}", herm.worst_margin);
        assert_eq!(herm.failures, 0);

        let line = fuzz_conjecture(2, 3, 50, 31, Tolerance::default(), MatrixClass::NormalLine)
            .unwrap();
        assert_eq!(line.violations, 0, "worst margin {}", line.worst_margin);
        assert_eq!(line.failures, 0);
    }
}
