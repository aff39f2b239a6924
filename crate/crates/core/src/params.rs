//! Parameter algebra for the confluent Heun equation.
//!
//! The equation is carried in the `(α, β, γ, δ, η)` convention. The pair
//! `(μ, ν)` appearing in the pole terms is derived from it:
//!
//! ```text
//! μ = ½(α − β − γ + αβ − βγ) − η
//! ν = ½(α + β + γ + αγ + βγ) + δ + η
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};

/// Absolute distance to a negative integer below which `β` is rejected.
pub const NEG_INT_TOL: f64 = 1e-12;

/// Default tolerance of [`HeunParams::check_delta_condition`].
pub const DEFAULT_DELTA_TOL: f64 = 1e-9;

const HALF: f64 = 0.5;

/// True when `x` sits within [`NEG_INT_TOL`] of one of −1, −2, −3, … on the real axis.
pub fn is_negative_integer(x: Complex64) -> bool {
    if x.im.abs() >= NEG_INT_TOL {
        return false;
    }
    let nearest = x.re.round();
    nearest <= -1.0 && (x.re - nearest).abs() < NEG_INT_TOL
}

/// The five parameters `(α, β, γ, δ, η)`.
///
/// Construction rejects `β` on a negative integer, so every value of this
/// type yields a well-defined Frobenius series at `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct HeunParams {
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    delta: Complex64,
    eta: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    delta: Complex64,
    eta: Complex64,
}

impl TryFrom<RawParams> for HeunParams {
    type Error = HeunError;

    fn try_from(r: RawParams) -> Result<Self> {
        HeunParams::new(r.alpha, r.beta, r.gamma, r.delta, r.eta)
    }
}

impl From<HeunParams> for RawParams {
    fn from(p: HeunParams) -> Self {
        RawParams {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
            eta: p.eta,
        }
    }
}

/// The spectral pair `(μ, ν)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuNu {
    pub mu: Complex64,
    pub nu: Complex64,
}

/// Derivative order `n` used by the index-augmentation map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShiftIndex(pub u32);

/// Eigenvalue `λ` of `D̂`; any complex value is admissible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenShift(pub Complex64);

impl HeunParams {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64, delta: Complex64, eta: Complex64) -> Result<Self> {
        if is_negative_integer(beta) {
            return Err(HeunError::InvalidBeta { beta });
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
            eta,
        })
    }

    /// Convenience constructor for purely real parameters.
    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64, eta: f64) -> Result<Self> {
        Self::new(alpha.into(), beta.into(), gamma.into(), delta.into(), eta.into())
    }

    /// Inverse of [`HeunParams::to_mu_nu`] for fixed `(α, β, γ)`:
    /// `δ = μ + ν − α((β+γ)/2 + 1)` and `η = ½(α − β − γ + αβ − βγ) − μ`.
    pub fn from_mu_nu(alpha: Complex64, beta: Complex64, gamma: Complex64, mn: MuNu) -> Result<Self> {
        let eta = eta_offset(alpha, beta, gamma) - mn.mu;
        let delta = mn.mu + mn.nu - alpha * ((beta + gamma) * HALF + 1.0);
        Self::new(alpha, beta, gamma, delta, eta)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn delta(&self) -> Complex64 {
        self.delta
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    /// Same parameters with `η` replaced.
    pub fn with_eta(&self, eta: Complex64) -> Self {
        Self { eta, ..*self }
    }

    /// Same parameters with `δ` replaced.
    pub fn with_delta(&self, delta: Complex64) -> Self {
        Self { delta, ..*self }
    }

    pub fn to_mu_nu(&self) -> MuNu {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        MuNu {
            mu: eta_offset(a, b, g) - self.eta,
            nu: (a + b + g + a * g + b * g) * HALF + self.delta + self.eta,
        }
    }

    pub fn mu(&self) -> Complex64 {
        self.to_mu_nu().mu
    }

    pub fn nu(&self) -> Complex64 {
        self.to_mu_nu().nu
    }

    /// `δ + α((β+γ)/2 + j)`, i.e. `α(δ/α + (β+γ)/2 + j)` without the division.
    ///
    /// It vanishes exactly when `δ = δ_{j−1}`, and `n · delta_gap(n)` is the
    /// coupling between `H^(n)` and `H^(n−1)` in the derivative identities.
    pub fn delta_gap(&self, j: f64) -> Complex64 {
        self.delta + self.alpha * ((self.beta + self.gamma) * HALF + j)
    }

    /// Index augmentation `(α, β+n, γ+n, δ+nα, η + (n/2)(n − α + β + γ))`.
    pub fn shift(&self, s: ShiftIndex) -> Result<Self> {
        let n = f64::from(s.0);
        Self::new(
            self.alpha,
            self.beta + n,
            self.gamma + n,
            self.delta + self.alpha * n,
            self.eta + (n * HALF) * (n - self.alpha + self.beta + self.gamma),
        )
    }

    /// Returns `N` when `δ/α + (β+γ)/2 + N + 1` is within `tol` of zero for
    /// some integer `N ≥ 0`. `α = 0` never satisfies the condition.
    pub fn check_delta_condition(&self, tol: f64) -> Option<u32> {
        if self.alpha == Complex64::new(0.0, 0.0) {
            return None;
        }
        let target = -self.delta / self.alpha - (self.beta + self.gamma) * HALF - 1.0;
        let n = target.re.round();
        if n < 0.0 || n > f64::from(u32::MAX) {
            return None;
        }
        let gap = self.delta / self.alpha + (self.beta + self.gamma) * HALF + n + 1.0;
        (gap.norm() < tol).then_some(n as u32)
    }
}

/// `½(α − β − γ + αβ − βγ)`, the η-independent part of `μ`.
pub(crate) fn eta_offset(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Complex64 {
    (alpha - beta - gamma + alpha * beta - beta * gamma) * HALF
}

/// `δ_N = −α((β+γ)/2 + N + 1)`.
pub fn delta_for_condition(alpha: Complex64, beta: Complex64, gamma: Complex64, n: u32) -> Complex64 {
    -alpha * ((beta + gamma) * HALF + f64::from(n) + 1.0)
}

/// Rising factorial `x(x+1)…(x+n−1)`, `1` for `n = 0`.
pub fn pochhammer(x: Complex64, n: u32) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (x + f64::from(j)))
}
