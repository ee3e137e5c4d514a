//! Discrepancy data for normal matrices, which depends only on the spectrum:
//! the k-th objective is the sum of the k largest distances from the
//! eigenvalues to the shift. The k = 1 minimum is the minimal enclosing
//! circle of the spectrum and the k = n minimizer is a geometric median;
//! intermediate k reuse the 2-D refinement on the distance objective.

use super::solve2d::{polish, GradInfo, ShiftObjective};
use super::{
    canonical_result, grid_candidates_over, AlphaSolverConfig, DiscrepancyResult, KDiagnostic,
    SingleSolve, SolverPath,
};
use crate::matcore::{herm_eig, ComplexMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

// ─── Minimal enclosing circle ───────────────────────────────────────────────

#[derive(Clone, Copy)]
struct Circle {
    c: Complex64,
    r: f64,
}

impl Circle {
    fn contains(&self, p: Complex64) -> bool {
        (p - self.c).norm() <= self.r + 1e-12 * (1.0 + self.r + p.norm())
    }
}

fn circle_two(a: Complex64, b: Complex64) -> Circle {
    let c = (a + b).scale(0.5);
    Circle {
        c,
        r: (a - c).norm().max((b - c).norm()),
    }
}

fn circle_three(a: Complex64, b: Complex64, c: Complex64) -> Circle {
    let d = 2.0
        * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    let scale = a.norm().max(b.norm()).max(c.norm()).max(1.0);
    if d.abs() <= 1e-14 * scale * scale {
        // Collinear: the widest pair's diameter circle covers the third.
        let candidates = [circle_two(a, b), circle_two(b, c), circle_two(a, c)];
        let mut best = candidates[0];
        for cand in &candidates[1..] {
            if cand.r > best.r {
                best = *cand;
            }
        }
        return best;
    }
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    let nc = c.norm_sqr();
    let ux = (na * (b.im - c.im) + nb * (c.im - a.im) + nc * (a.im - b.im)) / d;
    let uy = (na * (c.re - b.re) + nb * (a.re - c.re) + nc * (b.re - a.re)) / d;
    let center = Complex64::new(ux, uy);
    let r = (a - center)
        .norm()
        .max((b - center).norm())
        .max((c - center).norm());
    Circle { c: center, r }
}

/// Smallest circle containing all points (randomized incremental
/// construction with a deterministic shuffle). An empty input yields a
/// zero circle at the origin.
pub fn minimal_enclosing_circle(points: &[Complex64]) -> (Complex64, f64) {
    if points.is_empty() {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let mut pts = points.to_vec();
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (pts.len() as u64);
    for i in (1..pts.len()).rev() {
        state = crate::matcore::splitmix64(state);
        let j = (state % (i as u64 + 1)) as usize;
        pts.swap(i, j);
    }

    let mut circle = Circle { c: pts[0], r: 0.0 };
    for i in 1..pts.len() {
        if circle.contains(pts[i]) {
            continue;
        }
        circle = Circle { c: pts[i], r: 0.0 };
        for j in 0..i {
            if circle.contains(pts[j]) {
                continue;
            }
            circle = circle_two(pts[i], pts[j]);
            for l in 0..j {
                if !circle.contains(pts[l]) {
                    circle = circle_three(pts[i], pts[j], pts[l]);
                }
            }
        }
    }
    (circle.c, circle.r)
}

// ─── Geometric median ───────────────────────────────────────────────────────

/// Minimizer of the summed distances to the points, found by iterative
/// reweighting. When an iterate sits on a data point the anchored update is
/// used, so the iteration cannot get stuck there. Any minimizer is a valid
/// answer when it is not unique.
pub fn geometric_median(points: &[Complex64], tol: f64) -> Complex64 {
    let n = points.len();
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let centroid = points.iter().sum::<Complex64>() / n as f64;
    let spread = points
        .iter()
        .map(|p| (p - centroid).norm())
        .fold(0.0f64, f64::max);
    if spread == 0.0 {
        return points[0];
    }
    let anchor_eps = 1e-13 * spread;

    // A data point is the median iff the pull of the others does not exceed
    // its multiplicity; check that exactly first.
    for (i, &y) in points.iter().enumerate() {
        if points[..i].iter().any(|&p| (p - y).norm() <= anchor_eps) {
            continue; // duplicate, already tested
        }
        let mut eta = 0.0f64;
        let mut pull = Complex64::new(0.0, 0.0);
        for &p in points {
            let d = (p - y).norm();
            if d <= anchor_eps {
                eta += 1.0;
            } else {
                pull += (p - y) / d;
            }
        }
        if pull.norm() <= eta + 1e-12 {
            return y;
        }
    }

    let mut y = centroid;
    for _ in 0..50_000 {
        let mut wsum = 0.0f64;
        let mut wpoint = Complex64::new(0.0, 0.0);
        let mut pull = Complex64::new(0.0, 0.0);
        let mut eta = 0.0f64;
        for &p in points {
            let d = (p - y).norm();
            if d <= anchor_eps {
                eta += 1.0;
            } else {
                wsum += 1.0 / d;
                wpoint += p / d;
                pull += (p - y) / d;
            }
        }
        let r = pull.norm();
        if r <= eta + 1e-15 * n as f64 {
            break; // stationary
        }
        let tilde = wpoint / wsum;
        let next = if eta == 0.0 {
            tilde
        } else {
            let lam = (eta / r).min(1.0);
            tilde.scale(1.0 - lam) + y.scale(lam)
        };
        let step = (next - y).norm();
        y = next;
        if step <= 0.01 * tol.max(1e-15) * spread {
            break;
        }
    }
    y
}

// ─── Distance-sum objective ─────────────────────────────────────────────────

struct EigDistObjective<'a> {
    pts: &'a [Complex64],
    k: usize,
    dists: Vec<f64>,
}

impl<'a> EigDistObjective<'a> {
    fn new(pts: &'a [Complex64], k: usize) -> Self {
        Self {
            pts,
            k,
            dists: vec![0.0; pts.len()],
        }
    }
}

impl ShiftObjective for EigDistObjective<'_> {
    fn eval(&mut self, alpha: Complex64) -> f64 {
        for (slot, p) in self.dists.iter_mut().zip(self.pts) {
            *slot = (p - alpha).norm();
        }
        self.dists.sort_unstable_by(|x, y| y.partial_cmp(x).unwrap());
        self.dists[..self.k].iter().sum()
    }

    fn grad_info(&mut self, alpha: Complex64) -> GradInfo {
        let mut order: Vec<(f64, usize)> = self
            .pts
            .iter()
            .enumerate()
            .map(|(i, p)| ((p - alpha).norm(), i))
            .collect();
        order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
        let mut gx = 0.0;
        let mut gy = 0.0;
        let mut smooth = true;
        for &(r, i) in &order[..self.k] {
            if r == 0.0 {
                smooth = false; // shift sits on an eigenvalue
                continue;
            }
            let u = (alpha - self.pts[i]) / r;
            gx += u.re;
            gy += u.im;
        }
        let r1 = order[0].0.max(f64::MIN_POSITIVE);
        let next = if self.k < order.len() {
            order[self.k].0
        } else {
            0.0
        };
        let gap_rel = if smooth {
            (order[self.k - 1].0 - next) / r1
        } else {
            0.0
        };
        GradInfo { gx, gy, gap_rel }
    }
}

/// Extracts the eigenvalues of a (numerically) normal matrix by
/// diagonalizing a real-linear Hermitian combination of its Hermitian and
/// skew parts, then verifying the basis actually diagonalizes the matrix.
/// Returns `None` when every verification fails; callers then fall back to
/// the general solver, so a miss costs time but never correctness.
pub(crate) fn normal_eigenvalues(a: &ComplexMatrix) -> Option<Vec<Complex64>> {
    let n = a.rows();
    let adj = a.adjoint();
    let h = a.add(&adj).ok()?.scale(Complex64::new(0.5, 0.0));
    let k = a.sub(&adj).ok()?.scale(Complex64::new(0.0, -0.5));
    let fro = a.fro_norm().max(f64::MIN_POSITIVE);
    // Distinct eigenvalues can collide in the combination for unlucky
    // weights; a few incommensurate choices make that vanishingly unlikely.
    for &t in &[1.0, 0.618_033_988_749_894_9, std::f64::consts::SQRT_2, std::f64::consts::PI] {
        let m = match h.add(&k.scale(Complex64::new(t, 0.0))) {
            Ok(m) => m,
            Err(_) => return None,
        };
        let Ok(eig) = herm_eig(&m) else { continue };
        let d = eig
            .vectors
            .adjoint()
            .mul(a)
            .ok()?
            .mul(&eig.vectors)
            .ok()?;
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += d[(i, j)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= 1e-10 * fro {
            return Some((0..n).map(|i| d[(i, i)]).collect());
        }
    }
    None
}

/// Discrepancy values computed from a normal matrix's eigenvalues.
pub fn discrepancy_values_normal(
    eigs: &[Complex64],
    cfg: &AlphaSolverConfig,
) -> Result<DiscrepancyResult> {
    if eigs.is_empty() {
        return Err(Error::Domain("eigenvalue list must be nonempty".into()));
    }
    for (i, z) in eigs.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
    }
    cfg.validate()?;
    let n = eigs.len();
    let mu = eigs.iter().sum::<Complex64>() / n as f64;
    let rmax = eigs.iter().map(|z| (z - mu).norm()).fold(0.0f64, f64::max);
    let magnitude = eigs.iter().map(|z| z.norm()).fold(0.0f64, f64::max);

    if rmax <= 1e-15 * (1.0 + magnitude) {
        let values = crate::majorize::SpectrumVector::new(vec![0.0; n])?;
        return Ok(DiscrepancyResult {
            values,
            partial_norms: vec![0.0; n],
            alphas: vec![eigs[0]; n],
            diagnostics: vec![
                KDiagnostic {
                    iterations: 0,
                    residual: 0.0,
                    path: SolverPath::Normal,
                };
                n
            ],
        });
    }

    let radius = 2.0 * rmax;
    let h = 2.0 * radius / (cfg.grid_points - 1) as f64;
    let (center, circle_r) = minimal_enclosing_circle(eigs);
    let median = geometric_median(eigs, 1e-13);

    // One pass over the grid scores every k at once.
    let mut best: Vec<(f64, Complex64)> = vec![(f64::INFINITY, mu); n];
    let mut dists = vec![0.0f64; n];
    for z in grid_candidates_over(mu, radius, cfg.grid_points) {
        for (slot, p) in dists.iter_mut().zip(eigs) {
            *slot = (p - z).norm();
        }
        dists.sort_unstable_by(|x, y| y.partial_cmp(x).unwrap());
        let mut acc = 0.0;
        for (k0, d) in dists.iter().enumerate() {
            acc += d;
            if acc < best[k0].0 {
                best[k0] = (acc, z);
            }
        }
    }

    let mut outs: Vec<SingleSolve> = Vec::with_capacity(n);
    for k in 1..=n {
        if k == 1 {
            // Exact: the smallest enclosing circle of the spectrum.
            let mut obj = EigDistObjective::new(eigs, 1);
            let residual = obj.grad_info(center).residual();
            outs.push(SingleSolve {
                value: circle_r,
                alpha: center,
                iterations: 0,
                residual,
            });
            continue;
        }
        let mut obj = EigDistObjective::new(eigs, k);
        let (mut start_val, mut start) = best[k - 1];
        if k == n {
            let at_median = obj.eval(median);
            if at_median < start_val {
                start_val = at_median;
                start = median;
            }
        }
        let out = polish(&mut obj, start, start_val, h, radius, cfg)?;
        outs.push(SingleSolve {
            value: out.value,
            alpha: out.alpha,
            iterations: out.iterations,
            residual: out.residual,
        });
    }

    let partials = outs.iter().map(|s| s.value).collect();
    let alphas = outs.iter().map(|s| s.alpha).collect();
    let diagnostics = outs
        .iter()
        .map(|s| KDiagnostic {
            iterations: s.iterations,
            residual: s.residual,
            path: SolverPath::Normal,
        })
        .collect();
    let tol = (n as f64 * cfg.refine_tol_rel + 1e-11) * radius.max(1.0);
    canonical_result(partials, alphas, diagnostics, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::hermitian::spread_parts;
    use crate::matcore::{random_unitary, rng_from_seed};
    use rand::Rng;

    type C = Complex64;

    #[test]
    fn enclosing_circle_examples() {
        let (c, r) = minimal_enclosing_circle(&[C::new(0.0, 0.0), C::new(2.0, 0.0)]);
        assert!((c - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);

        let pts = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)];
        let (c, r) = minimal_enclosing_circle(&pts);
        assert!(c.norm() < 1e-12);
        assert!((r - 1.0).abs() < 1e-12);

        let single = C::new(-2.3, 0.4);
        let (c, r) = minimal_enclosing_circle(&[single]);
        assert_eq!(c, single);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn enclosing_circle_covers_random_clouds() {
        let mut rng = rng_from_seed(5);
        for trial in 0..20 {
            let n = 2 + (trial % 9);
            let pts: Vec<C> = (0..n)
                .map(|_| C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
                .collect();
            let (c, r) = minimal_enclosing_circle(&pts);
            let mut on_boundary = 0;
            for p in &pts {
                let d = (p - c).norm();
                assert!(d <= r + 1e-9, "point escaped the circle");
                if (d - r).abs() < 1e-9 {
                    on_boundary += 1;
                }
            }
            assert!(on_boundary >= 2, "a minimal circle rests on two points");
        }
    }

    #[test]
    fn median_examples() {
        let m = geometric_median(&[C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(5.0, 0.0)], 1e-12);
        assert!(m.norm() < 1e-12);

        let pts = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)];
        let m = geometric_median(&pts, 1e-12);
        assert!(m.norm() < 1e-9);

        // Collinear tie: any point of the segment minimizes; only the
        // objective value is pinned.
        let pts = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
        let m = geometric_median(&pts, 1e-12);
        let objective: f64 = pts.iter().map(|p| (p - m).norm()).sum();
        assert!((objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn median_of_random_cloud_is_stationary() {
        let mut rng = rng_from_seed(41);
        let pts: Vec<C> = (0..7)
            .map(|_| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let m = geometric_median(&pts, 1e-13);
        // Optimality at a data point only bounds the pull from the others by
        // the multiplicity, so count coincident points separately.
        let mut at_m = 0usize;
        let mut pull = C::new(0.0, 0.0);
        for p in &pts {
            let d = (p - m).norm();
            if d < 1e-9 {
                at_m += 1;
            } else {
                pull += (p - m) / d;
            }
        }
        assert!(
            pull.norm() <= at_m as f64 + 1e-6,
            "pull {} exceeds multiplicity {at_m}",
            pull.norm()
        );
    }

    #[test]
    fn normal_values_examples() {
        let cfg = AlphaSolverConfig::default();
        let r = discrepancy_values_normal(&[C::new(0.0, 0.0), C::new(2.0, 0.0)], &cfg).unwrap();
        assert!((r.partial_norms[0] - 1.0).abs() < 1e-10);
        assert!((r.alphas[0] - C::new(1.0, 0.0)).norm() < 1e-9);

        let quartic = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)];
        let r = discrepancy_values_normal(&quartic, &cfg).unwrap();
        assert!((r.partial_norms[0] - 1.0).abs() < 1e-10);
        assert!(r.alphas[0].norm() < 1e-9);
        // Spectrum symmetric through the origin: every value is 1.
        for d in r.delta() {
            assert!((d - 1.0).abs() < 1e-8, "delta {d}");
        }
    }

    #[test]
    fn real_spectra_match_the_hermitian_closed_form() {
        let mut rng = rng_from_seed(53);
        for n in [2usize, 3, 5, 6] {
            let mut lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
            lambda.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let eigs: Vec<C> = lambda.iter().map(|&x| C::new(x, 0.0)).collect();

            let parts = spread_parts(&lambda);
            let mut expected: Vec<f64> = Vec::new();
            for d in &parts.half_spreads {
                expected.push(*d);
                expected.push(*d);
            }
            if parts.median.is_some() {
                expected.push(0.0);
            }

            let cfg = AlphaSolverConfig::default();
            let r = discrepancy_values_normal(&eigs, &cfg).unwrap();
            for (got, want) in r.delta().iter().zip(&expected) {
                assert!((got - want).abs() < 1e-9, "{got} vs {want} at n={n}");
            }
        }
    }

    #[test]
    fn eigenvalue_extraction_on_conjugated_diagonals() {
        let mut rng = rng_from_seed(61);
        let spectrum: Vec<C> = (0..5)
            .map(|_| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let q = random_unitary(5, 777);
        let a = q
            .mul(&ComplexMatrix::diag(&spectrum))
            .unwrap()
            .mul(&q.adjoint())
            .unwrap();
        let mut got = normal_eigenvalues(&a).expect("normal matrix should diagonalize");
        let mut want = spectrum.clone();
        let key = |z: &C| (z.re, z.im);
        got.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        want.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-8);
        }

        // A matrix that is far from normal must be rejected.
        let jordan = ComplexMatrix::from_real(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
            .unwrap();
        assert!(normal_eigenvalues(&jordan).is_none());
    }
}
