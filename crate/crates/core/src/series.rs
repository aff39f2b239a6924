//! Taylor expansion of `HeunC` about `z = 0`.
//!
//! The coefficients obey `A_n v_n = B_n v_{n−1} + C_n v_{n−2}` with
//! `v_{−1} = 0`, `v_0 = 1`. [`TruncatedSeries`] carries a finite prefix of
//! such an expansion together with the degree up to which the stored
//! coefficients are exact images of the underlying function.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::params::HeunParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients `c_0..c_M` about `z = 0`, trusted up to `valid_degree`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
    valid_degree: usize,
}

impl TruncatedSeries {
    /// Builds a series; an empty coefficient list becomes the zero series and
    /// `valid_degree` is clamped to the stored length.
    pub fn new(coeffs: Vec<Complex64>, valid_degree: usize) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        let valid_degree = valid_degree.min(coeffs.len() - 1);
        Self { coeffs, valid_degree }
    }

    /// A series whose every stored coefficient is trusted (e.g. a polynomial).
    pub fn exact(coeffs: Vec<Complex64>) -> Self {
        let v = coeffs.len().saturating_sub(1);
        Self::new(coeffs, v)
    }

    /// `[0]` with valid degree 0.
    pub fn zero() -> Self {
        Self {
            coeffs: vec![ZERO],
            valid_degree: 0,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn valid_degree(&self) -> usize {
        self.valid_degree
    }

    /// The trusted prefix `c_0..c_V`.
    pub fn trusted(&self) -> &[Complex64] {
        &self.coeffs[..=self.valid_degree]
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Largest magnitude among the trusted coefficients.
    pub fn max_trusted_abs(&self) -> f64 {
        self.trusted().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Same series restricted to a lower trusted degree.
    pub fn with_valid_degree(mut self, v: usize) -> Self {
        self.valid_degree = v.min(self.valid_degree);
        self
    }

    /// Term-wise derivative. The trusted degree drops by one; a constant maps
    /// to the zero series `[0]` with valid degree 0.
    pub fn differentiate(&self) -> Self {
        if self.coeffs.len() < 2 {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        Self::new(coeffs, self.valid_degree.saturating_sub(1))
    }

    /// `n`-fold derivative.
    pub fn derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |s, _| s.differentiate())
    }

    /// Cauchy product with the polynomial `q` (ascending coefficients).
    /// The trusted degree is unchanged.
    pub fn mul_poly(&self, q: &[Complex64]) -> Self {
        if q.is_empty() {
            return Self::zero().with_valid_degree(0);
        }
        let mut out = vec![ZERO; self.coeffs.len() + q.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in q.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self {
            coeffs: out,
            valid_degree: self.valid_degree,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            valid_degree: self.valid_degree,
        }
    }

    /// Coefficient-wise magnitudes, used to bound rounding in identity checks.
    pub fn abs(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect(),
            valid_degree: self.valid_degree,
        }
    }

    /// Horner evaluation of the trusted prefix.
    pub fn eval_trusted(&self, z: Complex64) -> Complex64 {
        self.trusted().iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|k| f(self.coeff(k), other.coeff(k))).collect();
        Self {
            coeffs,
            valid_degree: self.valid_degree.min(other.valid_degree),
        }
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: Self) -> TruncatedSeries {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<Complex64> for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: Complex64) -> TruncatedSeries {
        self.scale(rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        self.scale(-ONE)
    }
}

/// `A_n`, `B_n`, `C_n` of the three-term recurrence at index `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceCoeffs {
    pub a_n: Complex64,
    pub b_n: Complex64,
    pub c_n: Complex64,
}

/// Recurrence coefficients for `n ≥ 1`.
///
/// `C_n` is evaluated as `(δ + α(β+γ)/2 + α(n−1)) / n²`, which is the
/// ratio form multiplied out and stays finite at `α = 0`.
pub fn recurrence_coeffs(p: &HeunParams, n: usize) -> RecurrenceCoeffs {
    assert!(n >= 1, "recurrence index starts at 1");
    let (a, b, g, eta) = (p.alpha(), p.beta(), p.gamma(), p.eta());
    let nf = n as f64;
    let s = -a + b + g;
    RecurrenceCoeffs {
        a_n: ONE + b / nf,
        b_n: ONE + (s - 1.0) / nf + (eta - s * 0.5 - a * b * 0.5 + b * g * 0.5) / (nf * nf),
        c_n: p.delta_gap(nf - 1.0) / (nf * nf),
    }
}

/// Streams `v_0, v_1, …` from the recurrence.
#[derive(Clone, Debug)]
pub struct CoefficientStream<'a> {
    params: &'a HeunParams,
    n: usize,
    prev: Complex64,
    prev2: Complex64,
}

impl<'a> CoefficientStream<'a> {
    pub fn new(params: &'a HeunParams) -> Self {
        Self {
            params,
            n: 0,
            prev: ZERO,
            prev2: ZERO,
        }
    }
}

impl Iterator for CoefficientStream<'_> {
    type Item = Result<Complex64>;

    fn next(&mut self) -> Option<Self::Item> {
        let v = if self.n == 0 {
            ONE
        } else {
            let r = recurrence_coeffs(self.params, self.n);
            if r.a_n == ZERO {
                return Some(Err(HeunError::InvalidBeta { beta: self.params.beta() }));
            }
            (r.b_n * self.prev + r.c_n * self.prev2) / r.a_n
        };
        self.prev2 = self.prev;
        self.prev = v;
        self.n += 1;
        Some(Ok(v))
    }
}

/// `v_0..v_M` of `HeunC(p, ·)`, all trusted.
pub fn taylor_coeffs(p: &HeunParams, m: usize) -> Result<TruncatedSeries> {
    let coeffs = CoefficientStream::new(p).take(m + 1).collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries::new(coeffs, m))
}

/// Summation controls for [`eval`] and [`eval_derivative`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub tol: f64,
    pub max_terms: usize,
    pub r_max: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_terms: 10_000,
            r_max: 0.95,
        }
    }
}

/// A converged partial sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    /// Number of series terms consumed.
    pub terms: usize,
}

/// `HeunC(p, z)` for `|z| ≤ r_max`.
pub fn eval(p: &HeunParams, z: Complex64, opts: &EvalOptions) -> Result<Complex64> {
    eval_derivative_detailed(p, z, 0, opts).map(|s| s.value)
}

/// `d^n/dz^n HeunC(p, z)` by term-wise differentiation.
pub fn eval_derivative(p: &HeunParams, z: Complex64, n: usize, opts: &EvalOptions) -> Result<Complex64> {
    eval_derivative_detailed(p, z, n, opts).map(|s| s.value)
}

/// Sums `Σ_{k≥n} v_k k!/(k−n)! z^{k−n}`.
///
/// Stops once two consecutive steps both satisfy
/// `|t_k| + |t_{k−1}| < tol·(1 + |sum|)`.
pub fn eval_derivative_detailed(p: &HeunParams, z: Complex64, n: usize, opts: &EvalOptions) -> Result<SeriesSum> {
    let abs = z.norm();
    if abs.is_nan() || abs > opts.r_max {
        return Err(HeunError::OutOfDisk { abs, r_max: opts.r_max });
    }
    let mut sum = ZERO;
    let mut last_term = f64::INFINITY;
    let mut small_streak = 0;
    // k!/(k−n)! and z^{k−n} carried incrementally
    let mut falling = (1..=n).fold(1.0, |acc, j| acc * j as f64);
    let mut zpow = ONE;
    for (k, v) in CoefficientStream::new(p).enumerate().take(opts.max_terms) {
        let v = v?;
        if k < n {
            continue;
        }
        if k > n {
            falling *= k as f64 / (k - n) as f64;
            zpow *= z;
        }
        let term = v * falling * zpow;
        sum += term;
        let mag = term.norm();
        if k > n && mag + last_term < opts.tol * (1.0 + sum.norm()) {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(SeriesSum { value: sum, terms: k + 1 });
            }
        } else {
            small_streak = 0;
        }
        last_term = mag;
    }
    Err(HeunError::NoConvergence {
        what: "HeunC series",
        limit: opts.max_terms,
    })
}
