//! Local minimization of convex shift objectives over the complex plane.
//!
//! Every discrepancy computation bottoms out in minimizing a convex function
//! of a complex shift. Callers bracket the minimum with a coarse grid (they
//! know their own objective and its bounding disc); this module refines a
//! bracketed start. The refinement mixes three moves per step-size level:
//! a compass sweep over eight directions (rotated between levels so repeated
//! shrinks do not keep probing the same rays), a gradient line search where
//! the objective is differentiable, and a short Nelder-Mead burst near kinks,
//! where leading singular values coalesce and gradients stop being reliable.

use super::AlphaSolverConfig;
use crate::{Error, Result};
use num_complex::Complex64;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Relative gap between the k-th and (k+1)-th singular values below which the
/// prefix sum is treated as nonsmooth at the current shift.
pub(crate) const SMOOTH_GAP_REL: f64 = 1e-8;

/// Gradient report at a trial shift.
pub(crate) struct GradInfo {
    pub gx: f64,
    pub gy: f64,
    /// Relative spectral gap governing differentiability at this shift.
    pub gap_rel: f64,
}

impl GradInfo {
    /// Euclidean norm of the (sub)gradient; doubles as the stationarity
    /// residual reported in diagnostics.
    pub fn residual(&self) -> f64 {
        self.gx.hypot(self.gy)
    }
}

/// A convex function of the complex shift, with enough structure to report
/// gradients and local smoothness.
pub(crate) trait ShiftObjective {
    fn eval(&mut self, alpha: Complex64) -> f64;
    fn grad_info(&mut self, alpha: Complex64) -> GradInfo;
}

pub(crate) struct PolishOutcome {
    pub alpha: Complex64,
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Refines a bracketed start down to a shift resolution of
/// `refine_tol_rel * max(1, scale)`, where `scale` is the bounding-disc
/// radius supplied by the caller.
pub(crate) fn polish<O: ShiftObjective>(
    obj: &mut O,
    start: Complex64,
    start_value: f64,
    h0: f64,
    scale: f64,
    cfg: &AlphaSolverConfig,
) -> Result<PolishOutcome> {
    let tol_h = cfg.refine_tol_rel * scale.max(1.0);
    let h_top = h0.max(4.0 * tol_h);
    let mut best = start;
    let mut best_val = start_value;
    let mut h = h_top;
    let mut iterations = 0usize;
    let mut level = 0usize;

    while h > tol_h {
        if iterations >= cfg.max_refine_iters {
            return Err(Error::Numerical(format!(
                "shift refinement stopped after {} iterations with step {:.3e} \
                 still above {:.3e}; best value {:.12e} at {:.9e}{:+.9e}i",
                cfg.max_refine_iters, h, tol_h, best_val, best.re, best.im
            )));
        }
        iterations += 1;

        // Sufficient-decrease threshold for this step size. Strict
        // improvements below it are still taken, but they don't stop the
        // step from shrinking: near a kink minimum the compass keeps finding
        // decrements of order machine noise forever, and counting those as
        // progress stalls the whole refinement at a fixed h.
        let rho = h * h / scale.max(1.0) + 4.0 * f64::EPSILON * best_val.abs();
        let pass_start_val = best_val;

        let base = GOLDEN_ANGLE * level as f64;
        let anchor = best;
        for _ in 0..64 {
            let round_start = best_val;
            let mut cand = best;
            let mut cand_val = best_val;
            for j in 0..8 {
                let ang = base + std::f64::consts::FRAC_PI_4 * j as f64;
                let trial = best + Complex64::new(h * ang.cos(), h * ang.sin());
                let v = obj.eval(trial);
                if v < cand_val {
                    cand_val = v;
                    cand = trial;
                }
            }
            if cand_val < best_val {
                best_val = cand_val;
                best = cand;
            }
            if round_start - best_val < rho {
                break;
            }
        }

        // Pattern move: a long compass run means the minimizer lies much
        // further along a narrow valley than single h-steps can cover, so
        // extrapolate along the net displacement before the next sweep.
        let disp = best - anchor;
        let travelled = disp.norm();
        if travelled > 2.0 * h {
            let dir = Complex64::new(disp.re / travelled, disp.im / travelled);
            let (pt, val) = line_min(&mut |z| obj.eval(z), best, dir, 16.0 * travelled);
            if val < best_val {
                best_val = val;
                best = pt;
            }
        }

        let info = obj.grad_info(best);
        if info.gap_rel > SMOOTH_GAP_REL {
            let g = info.residual();
            if g > 0.0 {
                let dir = Complex64::new(-info.gx / g, -info.gy / g);
                let (pt, val) = line_min(&mut |z| obj.eval(z), best, dir, 8.0 * h);
                if val < best_val {
                    best_val = val;
                    best = pt;
                }
            }
        } else if cfg.derivative_free_fallback {
            let (pt, val) = nelder_mead(&mut |z| obj.eval(z), best, h, 60);
            if val < best_val {
                best_val = val;
                best = pt;
            }
        }

        if pass_start_val - best_val >= rho && (best - anchor).norm() >= 0.5 * h {
            // Meaningful progress across at least half a step re-arms the
            // step; a premature shrink otherwise leaves the search inching
            // across the remaining distance one tiny move at a time. Gains
            // without displacement mean the minimizer already sits inside
            // the current resolution (line searches and the simplex burst
            // keep shaving noise-level slivers off a stationary point), and
            // re-arming on those ping-pongs the step forever.
            h = (2.0 * h).min(h_top);
        } else {
            h *= 0.5;
            level += 1;
        }
    }

    // Step size has converged. Where the objective is smooth, push the
    // gradient norm itself below the reporting threshold; kink minima are
    // exempt (their gap collapses, which the caller's diagnostics record).
    let mut info = obj.grad_info(best);
    let mut rounds = 0usize;
    while info.gap_rel > 0.5e-6 && info.residual() > 0.5e-6 && rounds < 60 {
        rounds += 1;
        iterations += 1;
        let g = info.residual();
        let dir = Complex64::new(-info.gx / g, -info.gy / g);
        let horizon = (1e6 * tol_h).max(64.0 * h0);
        let (pt, val) = line_min(&mut |z| obj.eval(z), best, dir, horizon);
        let mut improved = val < best_val;
        if improved {
            best_val = val;
            best = pt;
        }
        if cfg.derivative_free_fallback {
            let (pt2, val2) = nelder_mead(&mut |z| obj.eval(z), best, 64.0 * tol_h, 40);
            if val2 < best_val {
                best_val = val2;
                best = pt2;
                improved = true;
            }
        }
        info = obj.grad_info(best);
        if !improved {
            break;
        }
    }

    Ok(PolishOutcome {
        alpha: best,
        value: best_val,
        iterations,
        residual: info.residual(),
    })
}

/// Golden-section search along a ray, `t` in `[0, t_hi]`.
pub(crate) fn line_min<F: FnMut(Complex64) -> f64>(
    f: &mut F,
    from: Complex64,
    dir: Complex64,
    t_hi: f64,
) -> (Complex64, f64) {
    let inv_phi = 0.618_033_988_749_894_8;
    let mut lo = 0.0f64;
    let mut hi = t_hi;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(from + x1 * dir);
    let mut f2 = f(from + x2 * dir);
    for _ in 0..40 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(from + x1 * dir);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(from + x2 * dir);
        }
    }
    let t = 0.5 * (lo + hi);
    let p = from + t * dir;
    let v = f(p);
    (p, v)
}

/// Golden-section minimization of a scalar function on `[lo, hi]`.
pub(crate) fn min_on_segment<F: FnMut(f64) -> f64>(
    f: &mut F,
    lo: f64,
    hi: f64,
    iters: usize,
) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_8;
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (a + b);
    let v = f(x);
    (x, v)
}

/// Plain two-dimensional Nelder-Mead around `center` with initial simplex
/// size `size`. Used as the derivative-free fallback at nonsmooth shifts.
pub(crate) fn nelder_mead<F: FnMut(Complex64) -> f64>(
    f: &mut F,
    center: Complex64,
    size: f64,
    max_iter: usize,
) -> (Complex64, f64) {
    let mut pts = [
        center,
        center + Complex64::new(size, 0.0),
        center + Complex64::new(0.372, 0.928).scale(size),
    ];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];

    for _ in 0..max_iter {
        // Order best -> worst.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        let centroid = (pts[b] + pts[m]).scale(0.5);

        let refl = centroid + (centroid - pts[w]);
        let f_refl = f(refl);
        if f_refl < vals[b] {
            let exp = centroid + (centroid - pts[w]).scale(2.0);
            let f_exp = f(exp);
            if f_exp < f_refl {
                pts[w] = exp;
                vals[w] = f_exp;
            } else {
                pts[w] = refl;
                vals[w] = f_refl;
            }
        } else if f_refl < vals[m] {
            pts[w] = refl;
            vals[w] = f_refl;
        } else {
            let contr = centroid + (pts[w] - centroid).scale(0.5);
            let f_contr = f(contr);
            if f_contr < vals[w].min(f_refl) {
                pts[w] = contr;
                vals[w] = f_contr;
            } else {
                // Shrink toward the best vertex.
                for i in 0..3 {
                    if i != b {
                        pts[i] = pts[b] + (pts[i] - pts[b]).scale(0.5);
                        vals[i] = f(pts[i]);
                    }
                }
            }
        }
    }

    let mut bi = 0;
    for i in 1..3 {
        if vals[i] < vals[bi] {
            bi = i;
        }
    }
    (pts[bi], vals[bi])
}
