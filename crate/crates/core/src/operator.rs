//! The confluent Heun differential expression
//!
//! ```text
//! D̂ = z(z−1) [ d²/dz² + (α + (β+1)/z + (γ+1)/(z−1)) d/dz + μ/z + ν/(z−1) ]
//! ```
//!
//! Multiplying through by `z(z−1)` clears every pole, so `D̂` is stored as
//! three polynomials: `D̂[H] = p2·H'' + p1·H' + p0·H` with
//!
//! ```text
//! p2 = z(z−1)
//! p1 = αz(z−1) + (β+1)(z−1) + (γ+1)z
//! p0 = μ(z−1) + νz
//! ```

use num_complex::Complex64;

use crate::error::{HeunError, Result};
use crate::params::{EigenShift, HeunParams, ShiftIndex};
use crate::series::{taylor_coeffs, TruncatedSeries};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct HeunOperator {
    p2: [Complex64; 3],
    p1: [Complex64; 3],
    p0: [Complex64; 2],
    source: HeunParams,
}

impl HeunOperator {
    pub fn new(p: &HeunParams) -> Self {
        let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
        let mn = p.to_mu_nu();
        Self {
            p2: [0.0.into(), -ONE, ONE],
            p1: [-(b + 1.0), -a + b + g + 2.0, a],
            p0: [-mn.mu, mn.mu + mn.nu],
            source: *p,
        }
    }

    /// `D̂_n`, the operator of the index-augmented parameters.
    pub fn shifted(p: &HeunParams, n: u32) -> Result<Self> {
        Ok(Self::new(&p.shift(ShiftIndex(n))?))
    }

    pub fn p2(&self) -> &[Complex64; 3] {
        &self.p2
    }

    pub fn p1(&self) -> &[Complex64; 3] {
        &self.p1
    }

    pub fn p0(&self) -> &[Complex64; 2] {
        &self.p0
    }

    pub fn source_params(&self) -> &HeunParams {
        &self.source
    }

    /// `D̂ − λ`: the same operator with `μ → μ + λ`, `ν → ν − λ`.
    pub fn minus_eigenvalue(&self, lam: Complex64) -> Self {
        let mut out = self.clone();
        out.p0[0] -= lam;
        out
    }

    /// Applies `D̂` to a series. The result is trusted two degrees lower.
    pub fn apply(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        let v = s.valid_degree();
        if v < 2 {
            return Err(HeunError::DegreeTooLow { have: v, need: 2 });
        }
        let d1 = s.differentiate();
        let d2 = d1.differentiate();
        let out = &(&d2.mul_poly(&self.p2) + &d1.mul_poly(&self.p1)) + &s.mul_poly(&self.p0);
        Ok(out.with_valid_degree(v - 2))
    }

    /// Coefficient-wise majorant of [`HeunOperator::apply`]: every product
    /// is taken in absolute value, so the output bounds the magnitude of each
    /// contribution that entered the corresponding coefficient.
    pub fn apply_abs(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        let abs = |xs: &[Complex64]| xs.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect::<Vec<_>>();
        let v = s.valid_degree();
        if v < 2 {
            return Err(HeunError::DegreeTooLow { have: v, need: 2 });
        }
        let s = s.abs();
        let d1 = s.differentiate();
        let d2 = d1.differentiate();
        let out = &(&d2.mul_poly(&abs(&self.p2)) + &d1.mul_poly(&abs(&self.p1))) + &s.mul_poly(&abs(&self.p0));
        Ok(out.with_valid_degree(v - 2))
    }

    /// Evaluates `D̂[H](z)` from `[H, H', H'']` at a point and returns the
    /// residual magnitude together with `|p2 H''| + |p1 H'| + |p0 H|`.
    pub fn pointwise_residual(&self, z: Complex64, h: [Complex64; 3]) -> (f64, f64) {
        let poly = |c: &[Complex64]| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, x| acc * z + x);
        let terms = [poly(&self.p0) * h[0], poly(&self.p1) * h[1], poly(&self.p2) * h[2]];
        let r = terms.iter().sum::<Complex64>().norm();
        (r, terms.iter().map(|t| t.norm()).sum())
    }
}

/// `D̂_from D̂_{from+1} … D̂_to s`, applying the highest index first.
pub fn apply_shifted_chain(p: &HeunParams, from: u32, to: u32, s: &TruncatedSeries) -> Result<TruncatedSeries> {
    chain(p, from, to, s, HeunOperator::apply)
}

/// Majorant counterpart of [`apply_shifted_chain`].
pub fn apply_shifted_chain_abs(p: &HeunParams, from: u32, to: u32, s: &TruncatedSeries) -> Result<TruncatedSeries> {
    chain(p, from, to, s, HeunOperator::apply_abs)
}

fn chain(
    p: &HeunParams,
    from: u32,
    to: u32,
    s: &TruncatedSeries,
    step: fn(&HeunOperator, &TruncatedSeries) -> Result<TruncatedSeries>,
) -> Result<TruncatedSeries> {
    if from > to {
        return Err(HeunError::InvalidArgument(format!("empty operator chain {from}..={to}")));
    }
    let need = 2 * (to - from + 1) as usize;
    if s.valid_degree() < need {
        return Err(HeunError::DegreeTooLow {
            have: s.valid_degree(),
            need,
        });
    }
    (from..=to)
        .rev()
        .try_fold(s.clone(), |acc, k| step(&HeunOperator::shifted(p, k)?, &acc))
}

/// Checks that `H_λ = HeunC(α, β, γ, δ, η − λ)` is an eigenfunction of
/// `D̂_{α,β,γ,δ,η}` with eigenvalue `λ`. Returns the largest trusted
/// coefficient of `D̂H_λ − λH_λ` relative to `max |coeff(H_λ)|`.
pub fn eigen_shift_residual(p: &HeunParams, lam: EigenShift, m: usize) -> Result<f64> {
    if m < 4 {
        return Err(HeunError::DegreeTooLow { have: m, need: 4 });
    }
    let h = taylor_coeffs(&p.with_eta(p.eta() - lam.0), m)?;
    let lhs = HeunOperator::new(p).apply(&h)?;
    let diff = &lhs - &h.scale(lam.0);
    Ok(diff.max_trusted_abs() / h.max_trusted_abs())
}
