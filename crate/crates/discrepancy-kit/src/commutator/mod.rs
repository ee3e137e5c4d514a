//! Commutator constructions and the inequality-verification machinery built
//! on top of them.
//!
//! The operations here connect discrepancy values to commutators: the
//! generalized commutator `AX − XB` and its shift invariance, two structured
//! decompositions (summation by parts over singular triples, and a Hermitian
//! decomposition into ±1-diagonal pieces weighted by discrepancy gaps), the
//! unitary-orbit diameter of a Hermitian matrix, and the rotation-based
//! construction of a unitary that makes two Hermitian matrices maximally
//! non-commuting. The [`registry`] submodule packages every supported
//! majorization inequality behind one entry point, and [`fuzz`] drives the
//! conjecture search over seeded random matrices.

pub mod fuzz;
pub mod registry;

pub use fuzz::{fuzz_conjecture, FuzzReport, MatrixClass};
pub use registry::{
    evaluate_inequality, random_instance, InequalityId, InequalityInputs, InequalityReport,
};

use crate::matcore::{
    herm_eig, rotation_matrix, special_matrix, svd, ComplexMatrix, SpecialMatrix,
};
use crate::majorize::SpectrumVector;
use crate::{Error, Result};
use num_complex::Complex64;

fn require_hermitian(m: &ComplexMatrix, name: &str) -> Result<()> {
    if m.hermiticity_defect()? > 1e-10 * m.fro_norm() {
        return Err(Error::Domain(format!("{name} must be Hermitian")));
    }
    Ok(())
}

/// `AX − XB` for square `A`, `B` and a conformable rectangular `X`.
///
/// Shifting both `A` and `B` by the same scalar leaves the result unchanged,
/// which is what makes this the right object to bound by shift-minimized
/// norms. The ordinary commutator `[A, B] = AB − BA` is the `X = B`, `B = A`
/// special case, see [`bracket`].
pub fn generalized_commutator(
    a: &ComplexMatrix,
    x: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    a.check_square()?;
    b.check_square()?;
    if x.rows() != a.rows() || x.cols() != b.rows() {
        return Err(Error::Dimension {
            expected: format!("{}x{} middle factor", a.rows(), b.rows()),
            got: format!("{}x{}", x.rows(), x.cols()),
        });
    }
    a.mul(x)?.sub(&x.mul(b)?)
}

/// The commutator `[A, B] = AB − BA` of two square matrices of equal size.
pub fn bracket(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    generalized_commutator(a, b, a)
}

/// Decomposes a square matrix as `X = Σ αᵢ Xᵢ` where `Xᵢ` is the partial
/// isometry built from the top i singular triples (so its singular values are
/// i ones) and `αᵢ = σᵢ − σᵢ₊₁ ≥ 0`. Terms whose weight is at roundoff level
/// are dropped, so a unitary input yields the single term `1 · X`.
///
/// Tail sums of the weights recover the spectrum: `Σ_{i≥k} αᵢ = σ_k`.
pub fn summation_by_parts(x: &ComplexMatrix) -> Result<Vec<(f64, ComplexMatrix)>> {
    x.check_square()?;
    let n = x.rows();
    let dec = svd(x)?;
    let sigma = &dec.singulars;
    let drop_tol = 64.0 * f64::EPSILON * sigma[0].max(f64::MIN_POSITIVE);

    let mut terms = Vec::new();
    let mut running = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let u = dec.left.column(i);
        let v = dec.right.column(i);
        for p in 0..n {
            for q in 0..n {
                running[(p, q)] += u[p] * v[q].conj();
            }
        }
        let alpha = sigma[i] - if i + 1 < n { sigma[i + 1] } else { 0.0 };
        if alpha > drop_tol {
            terms.push((alpha, running.clone()));
        }
    }
    Ok(terms)
}

/// Decomposes a Hermitian matrix as `A = ω·Y + Σ βⱼ Xⱼ` with `Y = I`,
/// `βⱼ ≥ 0`, and each `Xⱼ` Hermitian with discrepancy values exactly
/// `(1,…,1,0,…,0)`.
///
/// In the eigenbasis of `A`, `Xⱼ` is diagonal with j leading `+1` entries,
/// j trailing `−1` entries, and an inner ratio `t ∈ [−1, 1]` in between; the
/// weights are the gaps between consecutive half-spreads of the spectrum, so
/// tail sums of the weights reproduce the discrepancy values of `A`. For odd
/// sizes the central eigenvalue is absorbed into the inner ratio of the last
/// term, which keeps `Y` exactly the identity.
pub fn hermitian_xi_decomposition(
    a: &ComplexMatrix,
) -> Result<(Complex64, ComplexMatrix, Vec<(f64, ComplexMatrix)>)> {
    a.check_square()?;
    require_hermitian(a, "input")?;
    let n = a.rows();
    if n == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    let eig = herm_eig(a)?;
    let lam = &eig.values;
    let q = &eig.vectors;
    let m = n / 2;
    let scale = lam.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let drop_tol = 32.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    // Half-spreads and midpoints of antipodal eigenvalue pairs; for odd n the
    // central eigenvalue plays the role of the innermost midpoint.
    let d = |j: usize| 0.5 * (lam[j] - lam[n - 1 - j]);
    let mid = |j: usize| {
        if j == m && n % 2 == 1 {
            lam[m]
        } else {
            0.5 * (lam[j] + lam[n - 1 - j])
        }
    };

    let omega = if m == 0 { lam[0] } else { mid(0) };
    let mut terms = Vec::new();
    for j in 0..m {
        let beta = d(j) - if j + 1 < m { d(j + 1) } else { 0.0 };
        if beta <= drop_tol {
            continue;
        }
        // Inner ratio moving the block between consecutive midpoints. The
        // last term of an even-sized matrix has no inner block at all.
        let inner = n - 2 * (j + 1);
        let t = if inner == 0 {
            0.0
        } else {
            let ratio = (mid(j + 1) - mid(j)) / beta;
            if ratio.abs() > 1.0 + 1e-12 {
                return Err(Error::Numerical(format!(
                    "inner ratio {ratio:.6e} escapes [-1, 1]; the spectrum \
                     violates the midpoint-versus-halfspread gap bound"
                )));
            }
            ratio.clamp(-1.0, 1.0)
        };

        let mut w = vec![t; n];
        for p in 0..=j {
            w[p] = 1.0;
            w[n - 1 - p] = -1.0;
        }
        let x = ComplexMatrix::from_fn(n, n, |p, r| {
            (0..n)
                .map(|l| q[(p, l)] * w[l] * q[(r, l)].conj())
                .sum()
        });
        terms.push((beta, x));
    }

    Ok((
        Complex64::new(omega, 0.0),
        ComplexMatrix::identity(n),
        terms,
    ))
}

/// Diameter of `{‖A − UAU*‖_(k) : U unitary}` for Hermitian `A`, together
/// with a unitary attaining it: the exchange permutation of the eigenbasis,
/// which swaps each eigenvalue with its antipodal partner. The diameter
/// equals the sorted partial sum of the antipodal eigenvalue gaps, which is
/// twice the k-th partial discrepancy norm.
pub fn unitary_orbit_diameter_hermitian(
    a: &ComplexMatrix,
    k: usize,
) -> Result<(f64, ComplexMatrix)> {
    a.check_square()?;
    require_hermitian(a, "input")?;
    let n = a.rows();
    if k == 0 || k > n {
        return Err(Error::Domain(format!(
            "k must be between 1 and {n}, got {k}"
        )));
    }
    let eig = herm_eig(a)?;
    let mut gaps: Vec<f64> = (0..n)
        .map(|i| (eig.values[i] - eig.values[n - 1 - i]).abs())
        .collect();
    gaps.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let d_k = gaps[..k].iter().sum();

    let j = special_matrix(SpecialMatrix::Exchange, n);
    let witness = eig.vectors.mul(&j)?.mul(&eig.vectors.adjoint())?;
    Ok((d_k, witness))
}

/// Builds the unitary `U = Q·R(π/4)·V*` from the eigendecompositions
/// `A = QΛQ*`, `B = VDV*` that maximizes the singular values of `[A, UBU*]`
/// simultaneously for every Ky-Fan norm, and returns it together with the
/// achieved spectrum and the closed-form optimum: the paired vector
/// `|λᵢ − λ_{n−i+1}|·|dᵢ − d_{n−i+1}|/2`, each value appearing twice.
pub fn maximal_noncommuting_unitary(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<(ComplexMatrix, SpectrumVector, SpectrumVector)> {
    a.check_square()?;
    a.check_same_shape(b)?;
    require_hermitian(a, "first argument")?;
    require_hermitian(b, "second argument")?;
    let n = a.rows();

    let ea = herm_eig(a)?;
    let eb = herm_eig(b)?;
    let r = rotation_matrix(n, std::f64::consts::FRAC_PI_4);
    let u = ea.vectors.mul(&r)?.mul(&eb.vectors.adjoint())?;

    let rotated = u.mul(b)?.mul(&u.adjoint())?;
    let achieved = SpectrumVector::new(crate::matcore::singular_values(&bracket(a, &rotated)?)?)?;

    let bound_raw: Vec<f64> = (0..n)
        .map(|i| {
            0.5 * (ea.values[i] - ea.values[n - 1 - i]).abs()
                * (eb.values[i] - eb.values[n - 1 - i]).abs()
        })
        .collect();
    let bound = SpectrumVector::new(bound_raw)?;
    Ok((u, achieved, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::{discrepancy_values, discrepancy_values_hermitian, AlphaSolverConfig};
    use crate::matcore::{ginibre, ky_fan_norm, random_hermitian, random_unitary, rng_from_seed,
        singular_values};
    use crate::majorize::weak_majorizes;
    use crate::Tolerance;

    type C = Complex64;

    fn cm(n: usize, entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(n, n, entries).unwrap()
    }

    #[test]
    fn generalized_commutator_examples() {
        let a = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let j2 = cm(2, &[0.0, 1.0, 1.0, 0.0]);
        let c = bracket(&a, &j2).unwrap();
        let expected = cm(2, &[0.0, 2.0, -2.0, 0.0]);
        assert!(c.sub(&expected).unwrap().fro_norm() < 1e-15);

        let mut rng = rng_from_seed(3);
        let g = ginibre(3, 3, &mut rng);
        assert!(bracket(&g, &ComplexMatrix::identity(3)).unwrap().fro_norm() < 1e-14);
        assert!(bracket(&g, &g).unwrap().fro_norm() < 1e-13);

        let x = ginibre(3, 2, &mut rng);
        let b = ginibre(2, 2, &mut rng);
        assert!(generalized_commutator(&g, &x, &b).is_ok());
        assert!(generalized_commutator(&g, &b, &g).is_err());
        assert!(generalized_commutator(&x, &x, &b).is_err());
    }

    #[test]
    fn shift_invariance_of_the_generalized_commutator() {
        let mut rng = rng_from_seed(17);
        let a = ginibre(4, 4, &mut rng);
        let b = ginibre(3, 3, &mut rng);
        let x = ginibre(4, 3, &mut rng);
        let base = generalized_commutator(&a, &x, &b).unwrap();
        let alpha = C::new(2.3, -0.9);
        let shifted =
            generalized_commutator(&a.shifted(alpha).unwrap(), &x, &b.shifted(alpha).unwrap())
                .unwrap();
        let scale = base.max_abs().max(1.0);
        assert!(base.sub(&shifted).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn summation_by_parts_examples() {
        let terms = summation_by_parts(&ComplexMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert_eq!(terms.len(), 2);
        assert!((terms[0].0 - 2.0).abs() < 1e-12);
        assert!((terms[1].0 - 1.0).abs() < 1e-12);
        let e11 = cm(2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(terms[0].1.sub(&e11).unwrap().fro_norm() < 1e-12);
        assert!(terms[1].1.sub(&ComplexMatrix::identity(2)).unwrap().fro_norm() < 1e-12);

        let u = random_unitary(4, 21);
        let terms = summation_by_parts(&u).unwrap();
        assert_eq!(terms.len(), 1);
        assert!((terms[0].0 - 1.0).abs() < 1e-12);
        assert!(terms[0].1.sub(&u).unwrap().fro_norm() < 1e-10);
    }

    #[test]
    fn summation_by_parts_reconstructs_and_grades() {
        let mut rng = rng_from_seed(41);
        let x = ginibre(3, 3, &mut rng);
        let sigma = singular_values(&x).unwrap();
        let terms = summation_by_parts(&x).unwrap();

        let mut sum = ComplexMatrix::zeros(3, 3);
        for (alpha, xi) in &terms {
            sum = sum.add(&xi.scale(C::new(*alpha, 0.0))).unwrap();
            // every partial isometry has unit singular values up to its rank
            let sv = singular_values(xi).unwrap();
            let rank = sv.iter().filter(|s| **s > 0.5).count();
            for (i, s) in sv.iter().enumerate() {
                let target = if i < rank { 1.0 } else { 0.0 };
                assert!((s - target).abs() < 1e-10);
            }
        }
        assert!(sum.sub(&x).unwrap().fro_norm() <= 1e-10 * sigma[0]);

        // tail sums of the weights recover each singular value
        let mut tail = 0.0;
        let mut ranks: Vec<(usize, f64)> = terms
            .iter()
            .map(|(alpha, xi)| {
                let rank = singular_values(xi)
                    .unwrap()
                    .iter()
                    .filter(|s| **s > 0.5)
                    .count();
                (rank, *alpha)
            })
            .collect();
        ranks.sort_by_key(|(r, _)| std::cmp::Reverse(*r));
        let mut idx = 3;
        for (rank, alpha) in ranks {
            // weights between rank and idx are zero-dropped terms
            while idx > rank {
                idx -= 1;
                assert!((sigma[idx] - tail).abs() < 1e-10);
            }
            tail += alpha;
        }
        assert!((sigma[0] - tail).abs() < 1e-10);
    }

    #[test]
    fn xi_decomposition_examples() {
        let (omega, y, terms) =
            hermitian_xi_decomposition(&ComplexMatrix::diag_real(&[3.0, 1.0, -1.0])).unwrap();
        assert!((omega - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!(y.sub(&ComplexMatrix::identity(3)).unwrap().fro_norm() == 0.0);
        assert_eq!(terms.len(), 1);
        assert!((terms[0].0 - 2.0).abs() < 1e-12);
        let x_expected = ComplexMatrix::diag_real(&[1.0, 0.0, -1.0]);
        assert!(terms[0].1.sub(&x_expected).unwrap().fro_norm() < 1e-10);
        let dx = discrepancy_values_hermitian(&terms[0].1).unwrap();
        assert!((dx.delta()[0] - 1.0).abs() < 1e-12);
        assert!((dx.delta()[1] - 1.0).abs() < 1e-12);
        assert!(dx.delta()[2].abs() < 1e-12);

        let (omega, _, terms) =
            hermitian_xi_decomposition(&ComplexMatrix::diag_real(&[4.0, 2.0, -2.0, -4.0]))
                .unwrap();
        assert!(omega.norm() < 1e-12);
        assert_eq!(terms.len(), 2);
        assert!((terms[0].0 - 2.0).abs() < 1e-12);
        assert!((terms[1].0 - 2.0).abs() < 1e-12);
        let x1 = ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, -1.0]);
        let x2 = ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]);
        assert!(terms[0].1.sub(&x1).unwrap().fro_norm() < 1e-10);
        assert!(terms[1].1.sub(&x2).unwrap().fro_norm() < 1e-10);

        let c = C::new(-0.7, 0.0);
        let (omega, _, terms) =
            hermitian_xi_decomposition(&ComplexMatrix::diag(&[c, c, c])).unwrap();
        assert!((omega - c).norm() < 1e-12);
        assert!(terms.is_empty());

        let mut bad = ComplexMatrix::zeros(2, 2);
        bad[(0, 1)] = C::new(1.0, 0.0);
        assert!(hermitian_xi_decomposition(&bad).is_err());
    }

    #[test]
    fn xi_decomposition_random_postconditions() {
        let cfg_scale = [(5usize, 61u64), (6, 62), (7, 63)];
        for (n, seed) in cfg_scale {
            let mut rng = rng_from_seed(seed);
            let a = random_hermitian(n, &mut rng);
            let scale = a.max_abs().max(1.0);
            let (omega, y, terms) = hermitian_xi_decomposition(&a).unwrap();

            let mut sum = y.scale(omega);
            for (beta, x) in &terms {
                assert!(*beta >= 0.0);
                sum = sum.add(&x.scale(C::new(*beta, 0.0))).unwrap();
            }
            assert!(sum.sub(&a).unwrap().fro_norm() <= 1e-9 * scale);

            // each piece carries exactly 2j unit discrepancy values, and the
            // weighted sum of those flat vectors reproduces δ(A)
            let da = discrepancy_values_hermitian(&a).unwrap();
            let mut rebuilt = vec![0.0; n];
            for (beta, x) in &terms {
                let dx = discrepancy_values_hermitian(x).unwrap();
                let ones = dx.delta().iter().filter(|v| **v > 0.5).count();
                assert!(ones % 2 == 0 && ones >= 2);
                for (i, v) in dx.delta().iter().enumerate() {
                    let target = if i < ones { 1.0 } else { 0.0 };
                    assert!((v - target).abs() < 1e-9);
                    rebuilt[i] += beta * v;
                }
            }
            for (r, d) in rebuilt.iter().zip(da.delta()) {
                assert!((r - d).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn orbit_diameter_examples() {
        let a = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let (d, u) = unitary_orbit_diameter_hermitian(&a, 1).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        let j2 = cm(2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(u.sub(&j2).unwrap().fro_norm() < 1e-10);

        let c = ComplexMatrix::diag_real(&[0.4, 0.4, 0.4]);
        let (d, _) = unitary_orbit_diameter_hermitian(&c, 2).unwrap();
        assert!(d.abs() < 1e-12);

        assert!(unitary_orbit_diameter_hermitian(&a, 0).is_err());
        assert!(unitary_orbit_diameter_hermitian(&a, 3).is_err());
    }

    #[test]
    fn orbit_diameter_is_attained_and_extremal() {
        let mut rng = rng_from_seed(77);
        let a = random_hermitian(5, &mut rng);
        let r = discrepancy_values_hermitian(&a).unwrap();
        for k in 1..=5 {
            let (d, u) = unitary_orbit_diameter_hermitian(&a, k).unwrap();
            // the witness must be unitary and actually attain the diameter
            let defect = u
                .adjoint()
                .mul(&u)
                .unwrap()
                .sub(&ComplexMatrix::identity(5))
                .unwrap()
                .fro_norm();
            assert!(defect < 1e-10);
            let moved = a.sub(&u.mul(&a).unwrap().mul(&u.adjoint()).unwrap()).unwrap();
            let attained = ky_fan_norm(&moved, k).unwrap();
            assert!((attained - d).abs() < 1e-8);
            assert!((d - 2.0 * r.partial_norms[k - 1]).abs() < 1e-8);
        }

        // no random unitary may beat it
        let (d3, _) = unitary_orbit_diameter_hermitian(&a, 3).unwrap();
        for s in 0..10 {
            let w = random_unitary(5, 1000 + s);
            let moved = a.sub(&w.mul(&a).unwrap().mul(&w.adjoint()).unwrap()).unwrap();
            assert!(ky_fan_norm(&moved, 3).unwrap() <= d3 + 1e-8);
        }
    }

    #[test]
    fn maximal_noncommuting_examples() {
        let a = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let (u, achieved, bound) = maximal_noncommuting_unitary(&a, &a).unwrap();
        let r2 = rotation_matrix(2, std::f64::consts::FRAC_PI_4);
        assert!(u.sub(&r2).unwrap().fro_norm() < 1e-12);
        assert_eq!(achieved.values().len(), 2);
        for (x, y) in achieved.values().iter().zip(bound.values()) {
            assert!((x - 2.0).abs() < 1e-10);
            assert!((y - 2.0).abs() < 1e-12);
        }

        let mut rng = rng_from_seed(5);
        let b = random_hermitian(3, &mut rng);
        let (_, achieved, _) =
            maximal_noncommuting_unitary(&ComplexMatrix::identity(3), &b).unwrap();
        assert!(achieved.values().iter().all(|v| v.abs() < 1e-10));

        let g = ginibre(3, 3, &mut rng);
        assert!(maximal_noncommuting_unitary(&g, &b).is_err());
    }

    #[test]
    fn maximal_noncommuting_attains_the_bound_and_dominates_random_unitaries() {
        let mut rng = rng_from_seed(91);
        let a = random_hermitian(4, &mut rng);
        let b = random_hermitian(4, &mut rng);
        let (u, achieved, bound) = maximal_noncommuting_unitary(&a, &b).unwrap();

        let defect = u
            .adjoint()
            .mul(&u)
            .unwrap()
            .sub(&ComplexMatrix::identity(4))
            .unwrap()
            .fro_norm();
        assert!(defect < 1e-10);

        let scale = bound.values().first().copied().unwrap_or(0.0).max(1.0);
        for (x, y) in achieved.values().iter().zip(bound.values()) {
            assert!((x - y).abs() <= 1e-8 * scale, "achieved {x} vs bound {y}");
        }

        // in the eigenbasis, the rotated commutator is anti-diagonal and
        // skew-Hermitian
        let ea = herm_eig(&a).unwrap();
        let inner = ea
            .vectors
            .adjoint()
            .mul(&bracket(&a, &u.mul(&b).unwrap().mul(&u.adjoint()).unwrap()).unwrap())
            .unwrap()
            .mul(&ea.vectors)
            .unwrap();
        let tol = 1e-8 * scale;
        assert!(inner.add(&inner.adjoint()).unwrap().max_abs() < tol);
        for i in 0..4 {
            for j in 0..4 {
                if i + j != 3 {
                    assert!(inner[(i, j)].norm() < tol, "entry ({i},{j}) not anti-diagonal");
                }
            }
        }

        for s in 0..20 {
            let w = random_unitary(4, 500 + s);
            let c = bracket(&a, &w.mul(&b).unwrap().mul(&w.adjoint()).unwrap()).unwrap();
            let sv = SpectrumVector::new(singular_values(&c).unwrap()).unwrap();
            let verdict = weak_majorizes(&achieved, &sv, Tolerance::default());
            assert!(verdict.holds, "random unitary beat the construction");
        }
    }

    #[test]
    fn real_symmetric_commutators_have_matching_delta_and_sigma() {
        let mut rng = rng_from_seed(23);
        for _ in 0..3 {
            let g = ginibre(4, 4, &mut rng);
            let h = ginibre(4, 4, &mut rng);
            let real_sym = |m: &ComplexMatrix| {
                ComplexMatrix::from_fn(4, 4, |i, j| {
                    C::new(0.5 * (m[(i, j)].re + m[(j, i)].re), 0.0)
                })
            };
            let c = bracket(&real_sym(&g), &real_sym(&h)).unwrap();
            let sv = singular_values(&c).unwrap();
            let dv = discrepancy_values(&c, &AlphaSolverConfig::default()).unwrap();
            for (d, s) in dv.delta().iter().zip(&sv) {
                assert!((d - s).abs() < 1e-7, "delta {d} vs sigma {s}");
            }
        }
    }
}
