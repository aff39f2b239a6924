//! Simultaneous (Durand–Kerner) iteration for all roots of a complex
//! polynomial, followed by a few Newton polishing steps.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{HeunError, Result};

/// Initial guesses sit on a circle rotated by this angle (radians) so that
/// no guess lands on a symmetry axis of a real polynomial.
const START_ANGLE: f64 = 0.4;
const NEWTON_POLISH_STEPS: usize = 3;
const ROUNDING_FLOOR: f64 = 8.0 * f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOptions {
    /// Residual bound: `|p(r)| ≤ tol · max(1 + |r|^deg, Σ|a_j||r|^j)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Iteration stops once every root moves less than `step_tol·max(1, |r|)`.
    pub step_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 5000,
            step_tol: 1e-13,
        }
    }
}

/// Horner evaluation, ascending coefficients.
pub fn eval_poly(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Value and derivative in one Horner pass.
fn eval_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), c| (p * x + c, dp * x + p))
}

/// `Σ |a_j| |x|^j`, the rounding scale of a Horner evaluation at `x`.
pub fn abs_poly_scale(coeffs: &[Complex64], x: Complex64) -> f64 {
    let r = x.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Lexicographic `(Re, Im)` order.
pub fn lex_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Monic polynomial with the given roots, ascending coefficients.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); out.len() + 1];
        for (j, c) in out.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * r;
        }
        out = next;
    }
    out
}

/// All roots of `Σ coeffs[j] x^j`, sorted by `(Re, Im)`.
pub fn find_roots(coeffs: &[Complex64], opts: &RootOptions) -> Result<Vec<Complex64>> {
    let deg = coeffs
        .iter()
        .rposition(|c| *c != Complex64::new(0.0, 0.0))
        .ok_or_else(|| HeunError::InvalidArgument("zero polynomial has no finite root set".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs[..=deg].iter().map(|c| c / lead).collect();
    if deg == 1 {
        return Ok(vec![-monic[0]]);
    }

    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|j| Complex64::from_polar(radius, START_ANGLE + std::f64::consts::TAU * j as f64 / deg as f64))
        .collect();

    let mut converged = false;
    for _ in 0..opts.max_iter {
        let mut worst = 0.0f64;
        let mut at_rounding_level = true;
        for i in 0..deg {
            let zi = roots[i];
            let denom = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, zj)| acc * (zi - zj));
            if denom == Complex64::new(0.0, 0.0) {
                continue;
            }
            let value = eval_poly(&monic, zi);
            at_rounding_level &= value.norm() <= ROUNDING_FLOOR * abs_poly_scale(&monic, zi);
            let step = value / denom;
            if !step.is_finite() {
                continue;
            }
            roots[i] = zi - step;
            worst = worst.max(step.norm() / zi.norm().max(1.0));
        }
        // multiple roots stall at a movement well above step_tol
        if worst < opts.step_tol || at_rounding_level {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(HeunError::NoConvergence {
            what: "Durand-Kerner root iteration",
            limit: opts.max_iter,
        });
    }

    for r in roots.iter_mut() {
        for _ in 0..NEWTON_POLISH_STEPS {
            let (p, dp) = eval_with_derivative(&monic, *r);
            if dp == Complex64::new(0.0, 0.0) {
                break;
            }
            let cand = *r - p / dp;
            // keep the step only when it does not worsen the residual
            if cand.is_finite() && eval_poly(&monic, cand).norm() <= p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
        let bound = opts.tol * (1.0 + r.norm().powi(deg as i32)).max(abs_poly_scale(&monic, *r));
        if eval_poly(&monic, *r).norm() > bound {
            return Err(HeunError::NoConvergence {
                what: "root residual check",
                limit: opts.max_iter,
            });
        }
    }

    roots.sort_by(lex_cmp);
    Ok(roots)
}

/// Index pairs `(i, j)`, `i < j`, of roots closer than `tol`.
pub fn close_root_pairs(roots: &[Complex64], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < tol {
                out.push((i, j));
            }
        }
    }
    out
}
