//! Polynomial solutions of the confluent Heun equation.
//!
//! `HeunC` collapses to a polynomial of degree `N` when
//!
//! 1. `δ = δ_N = −α((β+γ)/2 + N + 1)`, which kills `C_{N+2}`, and
//! 2. `Δ_{N+1}(μ) = 0`, the determinant of the tridiagonal matrix with
//!    diagonal `μ − q_r + (r−1)α`, superdiagonal `r(r+β)` and subdiagonal
//!    `(N−r+2)α`, where `q_r = (r−1)(r+β+γ)`.
//!
//! `Δ_{N+1}` is monic of degree `N+1` in `μ`; each root `μ_k` fixes one
//! `η_k` and one polynomial `PHeunC_{N,k}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::params::{delta_for_condition, eta_offset, HeunParams, DEFAULT_DELTA_TOL};
use crate::roots::{close_root_pairs, eval_poly, find_roots, RootOptions};
use crate::series::taylor_coeffs;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tail magnitude, relative to the largest coefficient, accepted as zero.
pub const TAIL_TOL: f64 = 1e-9;

/// Roots closer than this are reported as a multiple root.
pub const MULTIPLE_ROOT_TOL: f64 = 1e-7;

/// `Δ_{N+1}(μ)` as ascending coefficients in `μ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuPolynomial {
    coeffs: Vec<Complex64>,
    n: u32,
}

impl MuPolynomial {
    /// Expands the `(N+1)×(N+1)` determinant through
    /// `D_r = d_r D_{r−1} − l_r u_{r−1} D_{r−2}` with polynomial entries.
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64, n: u32) -> Self {
        let nf = f64::from(n);
        let mut prev2: Vec<Complex64> = vec![];
        let mut prev: Vec<Complex64> = vec![ONE];
        for r in 1..=n + 1 {
            let rf = f64::from(r);
            let q = (rf - 1.0) * (rf + beta + gamma);
            let diag_const = -q + alpha * (rf - 1.0);
            let mut next = vec![ZERO; prev.len() + 1];
            for (j, c) in prev.iter().enumerate() {
                next[j] += c * diag_const;
                next[j + 1] += c;
            }
            if r >= 2 {
                let lower = alpha * (nf - rf + 2.0);
                let upper = (rf - 1.0) * (rf - 1.0 + beta);
                let coupling = lower * upper;
                for (j, c) in prev2.iter().enumerate() {
                    next[j] -= c * coupling;
                }
            }
            prev2 = std::mem::replace(&mut prev, next);
        }
        Self { coeffs: prev, n }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Degree `N` of the Heun polynomial this determinant belongs to.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().expect("determinant has at least one coefficient")
    }

    pub fn eval(&self, mu: Complex64) -> Complex64 {
        eval_poly(&self.coeffs, mu)
    }
}

/// Free-function form of [`MuPolynomial::new`].
pub fn delta_determinant(alpha: Complex64, beta: Complex64, gamma: Complex64, n: u32) -> MuPolynomial {
    MuPolynomial::new(alpha, beta, gamma, n)
}

/// The `N+1` roots of `Δ_{N+1}`, ordered by `(Re, Im)`.
pub fn find_mu_roots(dp: &MuPolynomial, opts: &RootOptions) -> Result<Vec<Complex64>> {
    find_roots(dp.coeffs(), opts)
}

/// `η = ½(α − β − γ + αβ − βγ) − μ`.
pub fn mu_to_eta(alpha: Complex64, beta: Complex64, gamma: Complex64, mu: Complex64) -> Complex64 {
    eta_offset(alpha, beta, gamma) - mu
}

/// Parameters of `HeunC_N(α, β, γ, η, ·)`, i.e. `δ = δ_N`.
pub fn delta_n_params(alpha: Complex64, beta: Complex64, gamma: Complex64, eta: Complex64, n: u32) -> Result<HeunParams> {
    HeunParams::new(alpha, beta, gamma, delta_for_condition(alpha, beta, gamma, n), eta)
}

/// Parameters of the associate function `HeunC✠_N`:
/// `(α, β+N+1, γ+N+1, −α(β+γ)/2, η + (N+1)(N+1−α+β+γ)/2)`.
pub fn associate_params(alpha: Complex64, beta: Complex64, gamma: Complex64, eta: Complex64, n: u32) -> Result<HeunParams> {
    let m = f64::from(n) + 1.0;
    HeunParams::new(
        alpha,
        beta + m,
        gamma + m,
        -alpha * (beta + gamma) * 0.5,
        eta + m * (m - alpha + beta + gamma) * 0.5,
    )
}

/// `𝒫_N = (N+1)! v_{N+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PnConstant(pub Complex64);

/// `(N+1)! v_{N+1}(p)`; `p` must satisfy the `δ_N` condition for this `N`.
pub fn pn_constant(p: &HeunParams, n: u32) -> Result<PnConstant> {
    if p.check_delta_condition(DEFAULT_DELTA_TOL) != Some(n) {
        return Err(HeunError::DeltaConditionViolated { n });
    }
    let v = taylor_coeffs(p, n as usize + 1)?.coeff(n as usize + 1);
    let fact: f64 = (1..=n + 1).map(f64::from).product();
    Ok(PnConstant(v * fact))
}

/// One confluent Heun polynomial `PHeunC_{N,k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySolution {
    pub n: u32,
    /// 1-based root index.
    pub k: usize,
    pub mu: Complex64,
    pub eta: Complex64,
    /// `v_0..v_N`.
    pub coeffs: Vec<Complex64>,
    /// `max(|v_{N+1}|, |v_{N+2}|) / max |v_n|` from continuing the recurrence.
    pub tail_residual: f64,
}

impl PolySolution {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval_poly(&self.coeffs, z)
    }

    /// The full parameter set `(α, β, γ, δ_N, η_k)`.
    pub fn params(&self, alpha: Complex64, beta: Complex64, gamma: Complex64) -> Result<HeunParams> {
        delta_n_params(alpha, beta, gamma, self.eta, self.n)
    }
}

/// Everything `N` determines for fixed `(α, β, γ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySpectrum {
    pub determinant: MuPolynomial,
    pub roots: Vec<Complex64>,
    pub solutions: Vec<PolySolution>,
    /// 0-based index pairs of roots closer than [`MULTIPLE_ROOT_TOL`].
    pub multiple_roots: Vec<(usize, usize)>,
}

fn check_inputs(alpha: Complex64, beta: Complex64) -> Result<()> {
    if alpha == ZERO {
        return Err(HeunError::AlphaZero);
    }
    HeunParams::new(alpha, beta, ZERO, ZERO, ZERO).map(|_| ())
}

fn build_solution(alpha: Complex64, beta: Complex64, gamma: Complex64, n: u32, k: usize, mu: Complex64) -> Result<PolySolution> {
    let eta = mu_to_eta(alpha, beta, gamma, mu);
    let p = delta_n_params(alpha, beta, gamma, eta, n)?;
    let nu = n as usize;
    let mut v = taylor_coeffs(&p, nu + 2)?.into_coeffs();
    let scale = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail = v[nu + 1].norm().max(v[nu + 2].norm());
    if tail >= TAIL_TOL * scale {
        return Err(HeunError::VerificationFailed {
            tail,
            bound: TAIL_TOL * scale,
        });
    }
    v.truncate(nu + 1);
    Ok(PolySolution {
        n,
        k,
        mu,
        eta,
        coeffs: v,
        tail_residual: tail / scale,
    })
}

/// Determinant, roots and all `N+1` polynomials for `(α, β, γ)`.
pub fn solve_polynomials(alpha: Complex64, beta: Complex64, gamma: Complex64, n: u32, opts: &RootOptions) -> Result<PolySpectrum> {
    check_inputs(alpha, beta)?;
    let determinant = MuPolynomial::new(alpha, beta, gamma, n);
    let roots = find_mu_roots(&determinant, opts)?;
    let solutions = roots
        .iter()
        .enumerate()
        .map(|(i, &mu)| build_solution(alpha, beta, gamma, n, i + 1, mu))
        .collect::<Result<Vec<_>>>()?;
    let multiple_roots = close_root_pairs(&roots, MULTIPLE_ROOT_TOL);
    Ok(PolySpectrum {
        determinant,
        roots,
        solutions,
        multiple_roots,
    })
}

/// `PHeunC_{N,k}(α, β, γ, ·)`, `k` counted from 1 in `(Re μ, Im μ)` order.
pub fn construct_polynomial(alpha: Complex64, beta: Complex64, gamma: Complex64, n: u32, k: usize) -> Result<PolySolution> {
    check_inputs(alpha, beta)?;
    let count = n as usize + 1;
    if k == 0 || k > count {
        return Err(HeunError::RootIndex { k, count });
    }
    let determinant = MuPolynomial::new(alpha, beta, gamma, n);
    let roots = find_mu_roots(&determinant, &RootOptions::default())?;
    build_solution(alpha, beta, gamma, n, k, roots[k - 1])
}

/// `(−1)^{N+1} / Π_{r=1}^{N+1} r(r+β)`: the factor with
/// `v_{N+1} = factor · Δ_{N+1}(μ)` under the `δ_N` condition.
///
/// Follows from forward elimination of the tridiagonal system: the leading
/// principal minors `D_r` satisfy the same recurrence as `(−1)^r r!(β+1)_r v_r`.
pub fn determinant_to_coefficient_factor(beta: Complex64, n: u32) -> Complex64 {
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    let prod = (1..=n + 1).fold(ONE, |acc, r| {
        let rf = f64::from(r);
        acc * rf * (beta + rf)
    });
    Complex64::new(sign, 0.0) / prod
}
