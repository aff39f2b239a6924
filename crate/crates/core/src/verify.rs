//! Executable checks of the derivative and operator identities.
//!
//! Every check compares two truncated series coefficient by coefficient on
//! their common trusted range. The residual of coefficient `k` is
//! `|lhs_k − rhs_k| / env_k`, where `env_k` is the same computation redone
//! with every coefficient and product in absolute value. That majorant bounds
//! the magnitude of everything that was added up to form coefficient `k`, so
//! an honest identity leaves a residual at the level of a few ulps no matter
//! how much cancellation the operator chain performs. The report carries the
//! largest such ratio.
//!
//! Each check can be run with a [`Mutation`], which corrupts one constant of
//! the identity. A verifier that passes mutated identities proves nothing.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HeunError, Result};
use crate::operator::{apply_shifted_chain, apply_shifted_chain_abs, HeunOperator};
use crate::params::{eta_offset, pochhammer, HeunParams};
use crate::polynomial::{associate_params, delta_n_params, pn_constant};
use crate::sampling::random_series;
use crate::series::{taylor_coeffs, TruncatedSeries};

/// Base tolerance; chain identities loosen it by 10× per derivative order.
pub const BASE_TOL: f64 = 1e-11;
pub const DARBOUX_TOL: f64 = 1e-10;
pub const EIGEN_SHIFT_TOL: f64 = 1e-10;
pub const SELF_ADJOINT_TOL: f64 = 1e-13;
pub const SWAP_TOL: f64 = 1e-12;

/// Default relative perturbation used by [`Mutation::Perturb`] controls.
pub const MUTATION_SIZE: f64 = 1e-3;

/// Radius and number of points of the pointwise cross-check.
pub const GRID_RADIUS: f64 = 0.5;
pub const GRID_POINTS: usize = 16;

const WORST_OFFENDERS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// `dⁿ D̂_0 = D̂_n dⁿ + n(δ + α(β+γ)/2 + nα) d^{n−1}` on arbitrary series.
    Basic,
    /// `D̂_n H^(n) = −n(δ + α(β+γ)/2 + nα) H^(n−1)`.
    FourTerm,
    /// `D̂_1…D̂_n H^(n) = (−α)ⁿ n! (δ/α + (β+γ)/2 + 1)_n H`.
    Chain,
    /// `D̂_0 D̂_1…D̂_n H^(n) = 0`.
    HighOde,
    /// `d^{N+1} HeunC_N = 𝒫_N HeunC✠_N`.
    Darboux,
    /// Divergence form of `D̂` agrees with the polynomial form.
    Selfadjoint,
    /// `{β, γ, μ, ν} → {γ, β, ν, μ}` at the parameter level.
    Swap,
    /// `D̂_η H_λ = λ H_λ` for `H_λ = HeunC(…, η − λ, ·)`.
    EigenShift,
}

impl Identity {
    /// The seven identities run by `verify --identity all`.
    pub const SUITE: [Identity; 7] = [
        Identity::Basic,
        Identity::FourTerm,
        Identity::Chain,
        Identity::HighOde,
        Identity::Darboux,
        Identity::Selfadjoint,
        Identity::Swap,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Identity::Basic => "basic",
            Identity::FourTerm => "four-term",
            Identity::Chain => "chain",
            Identity::HighOde => "high-ode",
            Identity::Darboux => "darboux",
            Identity::Selfadjoint => "selfadjoint",
            Identity::Swap => "swap",
            Identity::EigenShift => "eigen-shift",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::SUITE.into_iter().chain([Identity::EigenShift]).find(|i| i.tag() == tag)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Stratified tolerance `1e-11 · 10^{n−1}` for the chain identities.
pub fn order_tolerance(n: u32) -> f64 {
    BASE_TOL * 10f64.powi(n.saturating_sub(1) as i32)
}

/// Deliberate corruption of an identity, for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum Mutation {
    #[default]
    None,
    /// Multiply the identity's constant by `1 + ε` (or shift it by `ε·max(1, |c|)`
    /// where the constant is an operator parameter).
    Perturb(f64),
    /// Use `n + 1` where the identity uses `n` (the scalar, or the top of the
    /// operator chain). Identities without an order fall back to
    /// `Perturb(MUTATION_SIZE)`.
    OffByOne,
}

impl Mutation {
    fn scale(self, c: Complex64) -> Complex64 {
        match self {
            Mutation::None => c,
            Mutation::Perturb(eps) => c * (1.0 + eps),
            Mutation::OffByOne => c * (1.0 + MUTATION_SIZE),
        }
    }

    fn shift(self, c: Complex64) -> Complex64 {
        let eps = match self {
            Mutation::None => return c,
            Mutation::Perturb(eps) => eps,
            Mutation::OffByOne => MUTATION_SIZE,
        };
        c + eps * c.norm().max(1.0)
    }

    fn order(self, n: u32) -> u32 {
        match self {
            Mutation::OffByOne => n + 1,
            _ => n,
        }
    }
}

/// One coefficient where the two sides disagree most.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub index: usize,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: Identity,
    pub params: HeunParams,
    pub order_n: u32,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Number of coefficients (or scalars) that entered the residual.
    pub compared: usize,
    pub details: Vec<Offender>,
    /// Identity-specific measured constant (`𝒫_N` for the Darboux relation,
    /// the Pochhammer eigenvalue for the chain).
    pub measured: Option<Complex64>,
    /// Pointwise residual on `GRID_POINTS` points of `|z| = GRID_RADIUS`.
    pub grid_residual: Option<f64>,
}

/// Two sides of an identity and the magnitude scale of each coefficient.
struct Comparison {
    lhs: TruncatedSeries,
    rhs: TruncatedSeries,
    env: TruncatedSeries,
}

impl Comparison {
    fn valid_degree(&self) -> usize {
        self.lhs.valid_degree().min(self.rhs.valid_degree()).min(self.env.valid_degree())
    }

    fn per_coefficient(&self) -> Vec<Offender> {
        (0..=self.valid_degree())
            .map(|k| {
                let (l, r) = (self.lhs.coeff(k), self.rhs.coeff(k));
                let diff = (l - r).norm();
                let scale = self.env.coeff(k).norm();
                let relative = if diff == 0.0 { 0.0 } else { diff / scale.max(f64::MIN_POSITIVE) };
                Offender {
                    index: k,
                    lhs: l,
                    rhs: r,
                    relative,
                }
            })
            .collect()
    }

    /// Replaces the per-coefficient scale by the largest trusted scale, but
    /// never less than `floor`.
    fn with_global_scale(mut self, floor: f64) -> Self {
        let top = self.env.trusted().iter().map(|c| c.norm()).fold(floor, f64::max);
        let v = self.env.valid_degree();
        self.env = TruncatedSeries::new(vec![Complex64::new(top, 0.0); v + 1], v);
        self
    }

    fn grid_residual(&self) -> f64 {
        let v = self.valid_degree();
        let (l, r, e) = (
            self.lhs.clone().with_valid_degree(v),
            self.rhs.clone().with_valid_degree(v),
            self.env.clone().with_valid_degree(v),
        );
        let scale = e.eval_trusted(Complex64::new(GRID_RADIUS, 0.0)).norm();
        let worst = (0..GRID_POINTS)
            .map(|j| {
                let z = Complex64::from_polar(GRID_RADIUS, TAU * j as f64 / GRID_POINTS as f64);
                (l.eval_trusted(z) - r.eval_trusted(z)).norm()
            })
            .fold(0.0, f64::max);
        if worst == 0.0 {
            0.0
        } else {
            worst / scale.max(f64::MIN_POSITIVE)
        }
    }

    fn into_report(self, identity: Identity, params: HeunParams, order_n: u32, tolerance: f64) -> VerificationReport {
        let mut per = self.per_coefficient();
        let residual = per.iter().map(|o| o.relative).fold(0.0, f64::max);
        per.sort_by(|a, b| b.relative.total_cmp(&a.relative).then(a.index.cmp(&b.index)));
        per.truncate(WORST_OFFENDERS);
        VerificationReport {
            identity,
            params,
            order_n,
            residual,
            tolerance,
            passed: residual < tolerance,
            compared: self.valid_degree() + 1,
            details: per,
            measured: None,
            grid_residual: Some(self.grid_residual()),
        }
    }
}

/// Runs identity checks, optionally with a corrupted constant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Verifier {
    pub mutation: Mutation,
    /// Seed for the random test series of the commutation check.
    pub seed: u64,
}

impl Verifier {
    pub fn new(seed: u64) -> Self {
        Self {
            mutation: Mutation::None,
            seed,
        }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    /// `D̂_1…D̂_top s` and its majorant. Under `Perturb(ε)` the innermost
    /// operator becomes `D̂_top − ε·max(1, |μ_top|)`.
    fn perturbed_chain(&self, p: &HeunParams, top: u32, s: &TruncatedSeries) -> Result<(TruncatedSeries, TruncatedSeries)> {
        let innermost = HeunOperator::shifted(p, top)?;
        let innermost = match self.mutation {
            Mutation::Perturb(_) => {
                let mu = -innermost.p0()[0];
                innermost.minus_eigenvalue(self.mutation.shift(Complex64::new(0.0, 0.0)) * mu.norm().max(1.0))
            }
            _ => innermost,
        };
        let (first, first_env) = (innermost.apply(s)?, innermost.apply_abs(s)?);
        if top == 1 {
            return Ok((first, first_env));
        }
        Ok((
            apply_shifted_chain(p, 1, top - 1, &first)?,
            apply_shifted_chain_abs(p, 1, top - 1, &first_env)?,
        ))
    }

    /// Commutation of `dⁿ` with `D̂` on `trials` random series. These are
    /// not solutions, so the identity is checked as an operator statement.
    pub fn basic_commutation(&self, p: &HeunParams, n: u32, trials: usize) -> Result<VerificationReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (u64::from(n) << 32));
        let nu = n as usize;
        let op0 = HeunOperator::new(p);
        let opn = HeunOperator::shifted(p, n)?;
        let coupling = self
            .mutation
            .scale(p.delta_gap(f64::from(self.mutation.order(n))) * f64::from(self.mutation.order(n)));
        let mut worst: Option<VerificationReport> = None;
        for _ in 0..trials.max(1) {
            let s = random_series(&mut rng, nu + 16);
            let lhs = op0.apply(&s)?.derivative(nu);
            let lhs_env = op0.apply_abs(&s)?.derivative(nu);
            let mut rhs = opn.apply(&s.derivative(nu))?;
            let mut env = &lhs_env + &opn.apply_abs(&s.derivative(nu))?;
            if n > 0 {
                let lower = s.derivative(nu - 1);
                rhs = &rhs + &lower.scale(coupling);
                env = &env + &lower.abs().scale(coupling.norm().into());
            }
            let report = Comparison { lhs, rhs, env }.into_report(Identity::Basic, *p, n, BASE_TOL);
            if worst.as_ref().is_none_or(|w| report.residual > w.residual) {
                worst = Some(report);
            }
        }
        Ok(worst.expect("at least one trial"))
    }

    /// `D̂_n H^(n) + n(δ + α(β+γ)/2 + nα) H^(n−1) = 0` for `H = HeunC(p)`.
    pub fn four_term(&self, p: &HeunParams, n: u32, m: usize) -> Result<VerificationReport> {
        require(n >= 1, "four-term relation needs n >= 1")?;
        require_degree(m, 2 * n as usize + 6)?;
        let nu = n as usize;
        let h = taylor_coeffs(p, m)?;
        let opn = HeunOperator::shifted(p, n)?;
        let hn = h.derivative(nu);
        let lower = h.derivative(nu - 1);
        let k = f64::from(self.mutation.order(n));
        let coupling = self.mutation.scale(p.delta_gap(k) * k);
        let cmp = Comparison {
            lhs: opn.apply(&hn)?,
            rhs: lower.scale(-coupling),
            env: &opn.apply_abs(&hn)? + &lower.abs().scale(coupling.norm().into()),
        };
        let mut report = cmp.into_report(Identity::FourTerm, *p, n, order_tolerance(n));
        report.measured = Some(coupling);
        Ok(report)
    }

    /// `D̂_1…D̂_n H^(n) = Π_{j=1..n} (−j)(δ + α(β+γ)/2 + jα) · H`.
    ///
    /// `Perturb` shifts the innermost operator `D̂_n` as in
    /// [`Verifier::high_order_ode`]; `OffByOne` uses the scalar for `n + 1`.
    pub fn chain(&self, p: &HeunParams, n: u32, m: usize) -> Result<VerificationReport> {
        require(n >= 1, "chain identity needs n >= 1")?;
        require_degree(m, 3 * n as usize + 8)?;
        let h = taylor_coeffs(p, m)?;
        let hn = h.derivative(n as usize);
        let scalar = chain_eigenvalue(p, self.mutation.order(n));
        let (lhs, lhs_env) = self.perturbed_chain(p, n, &hn)?;
        let cmp = Comparison {
            lhs,
            rhs: h.scale(scalar),
            env: &lhs_env + &h.abs().scale(scalar.norm().into()),
        };
        let mut report = cmp.into_report(Identity::Chain, *p, n, order_tolerance(n));
        report.measured = Some(scalar);
        Ok(report)
    }

    /// `D̂_0 D̂_1…D̂_n H^(n) = 0`.
    ///
    /// `Perturb` shifts the innermost operator `D̂_n`; `OffByOne` extends the
    /// chain to `D̂_{n+1}`.
    pub fn high_order_ode(&self, p: &HeunParams, n: u32, m: usize) -> Result<VerificationReport> {
        require(n >= 1, "high-order equation needs n >= 1")?;
        require_degree(m, 3 * n as usize + 10)?;
        let h = taylor_coeffs(p, m)?;
        let hn = h.derivative(n as usize);
        let op0 = HeunOperator::new(p);
        let top = self.mutation.order(n);
        let (inner, inner_env) = self.perturbed_chain(p, top, &hn)?;
        let lhs = op0.apply(&inner)?;
        let cmp = Comparison {
            rhs: TruncatedSeries::new(vec![Complex64::new(0.0, 0.0); lhs.coeffs().len()], lhs.valid_degree()),
            env: op0.apply_abs(&inner_env)?,
            lhs,
        };
        Ok(cmp.into_report(Identity::HighOde, *p, n, order_tolerance(n)))
    }

    /// Coefficient-wise `d^{N+1} HeunC_N(α,β,γ,η,·) = 𝒫_N · HeunC✠_N(α,β,γ,η,·)`.
    ///
    /// Both sides come from independent recurrences, so the comparison is
    /// scaled by the largest trusted coefficient of either side (or of
    /// `HeunC_N` itself, which keeps the check meaningful at polynomial
    /// points where both sides vanish).
    pub fn darboux(
        &self,
        alpha: Complex64,
        beta: Complex64,
        gamma: Complex64,
        eta: Complex64,
        n: u32,
        m: usize,
    ) -> Result<VerificationReport> {
        require_degree(m, n as usize + 20)?;
        if alpha == Complex64::new(0.0, 0.0) {
            return Err(HeunError::AlphaZero);
        }
        let base = delta_n_params(alpha, beta, gamma, eta, n)?;
        let assoc = associate_params(alpha, beta, gamma, eta, n)?;
        let pn = self.mutation.scale(pn_constant(&base, n)?.0);
        let h = taylor_coeffs(&base, m)?;
        let lhs = h.derivative(n as usize + 1);
        let rhs = taylor_coeffs(&assoc, lhs.valid_degree())?.scale(pn);
        let cmp = Comparison {
            env: &lhs.abs() + &rhs.abs(),
            lhs,
            rhs,
        }
        .with_global_scale(h.max_trusted_abs());
        let mut report = cmp.into_report(Identity::Darboux, base, n, DARBOUX_TOL);
        report.measured = Some(pn);
        Ok(report)
    }

    /// Compares `D̂` with its divergence form
    /// `(z(z−1)H')' + (αz(z−1) + β(z−1) + γz)H' + (α(δ/α + (β+γ)/2 + 1)z − μ)H`.
    pub fn selfadjoint(&self, p: &HeunParams, m: usize) -> Result<VerificationReport> {
        require_degree(m, 6)?;
        let h = taylor_coeffs(p, m)?;
        let op = HeunOperator::new(p);
        let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
        let potential = self.mutation.scale(p.delta_gap(1.0));
        let weight = [-b, -a + b + g, a];
        let z_zm1 = [0.0.into(), Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)];
        let pot = [-p.mu(), potential];

        let divergence = |s: &TruncatedSeries, abs: bool| {
            let f = |c: &[Complex64]| -> Vec<Complex64> {
                if abs {
                    c.iter().map(|x| Complex64::new(x.norm(), 0.0)).collect()
                } else {
                    c.to_vec()
                }
            };
            let s = if abs { s.abs() } else { s.clone() };
            let d1 = s.differentiate();
            let flux = d1.mul_poly(&f(&z_zm1)).differentiate();
            let out = &(&flux + &d1.mul_poly(&f(&weight))) + &s.mul_poly(&f(&pot));
            let v = out.valid_degree();
            out.with_valid_degree(v.min(s.valid_degree().saturating_sub(2)))
        };

        let lhs = op.apply(&h)?;
        let rhs = divergence(&h, false);
        let env = &op.apply_abs(&h)? + &divergence(&h, true);
        Ok(Comparison { lhs, rhs, env }.into_report(Identity::Selfadjoint, *p, 0, SELF_ADJOINT_TOL))
    }

    /// Swapping `z ↔ 1 − z` exchanges `(β, μ)` with `(γ, ν)`: for
    /// `p′ = (α, γ, β, δ, η′)` with `η′` chosen so that `μ′ = ν`, check `ν′ = μ`.
    pub fn symmetry_swap(&self, p: &HeunParams) -> Result<VerificationReport> {
        let (swapped, _) = swap_params(p)?;
        let swapped = swapped.with_eta(self.mutation.shift(swapped.eta()));
        let (mn, sw) = (p.to_mu_nu(), swapped.to_mu_nu());
        let scale = mn.mu.norm().max(mn.nu.norm()).max(1.0);
        let offenders = [(0, sw.mu, mn.nu), (1, sw.nu, mn.mu)].map(|(index, lhs, rhs)| Offender {
            index,
            lhs,
            rhs,
            relative: (lhs - rhs).norm() / scale,
        });
        let residual = offenders.iter().map(|o| o.relative).fold(0.0, f64::max);
        Ok(VerificationReport {
            identity: Identity::Swap,
            params: *p,
            order_n: 0,
            residual,
            tolerance: SWAP_TOL,
            passed: residual < SWAP_TOL,
            compared: offenders.len(),
            details: offenders.to_vec(),
            measured: None,
            grid_residual: None,
        })
    }

    /// `D̂_{α,β,γ,δ,η} H_λ = λ H_λ` with `H_λ = HeunC(α, β, γ, δ, η − λ)`.
    pub fn eigen_shift(&self, p: &HeunParams, lam: Complex64, m: usize) -> Result<VerificationReport> {
        require_degree(m, 4)?;
        let h = taylor_coeffs(&p.with_eta(p.eta() - lam), m)?;
        let op = HeunOperator::new(p);
        let lam_used = self.mutation.shift(lam);
        let cmp = Comparison {
            lhs: op.apply(&h)?,
            rhs: h.scale(lam_used),
            env: &op.apply_abs(&h)? + &h.abs().scale(lam_used.norm().into()),
        };
        let mut report = cmp.into_report(Identity::EigenShift, *p, 0, EIGEN_SHIFT_TOL);
        report.measured = Some(lam);
        Ok(report)
    }
}

/// `(−α)ⁿ n! (δ/α + (β+γ)/2 + 1)_n` as `Π_{j=1..n} −j(δ + α(β+γ)/2 + jα)`,
/// finite at `α = 0`.
pub fn chain_eigenvalue(p: &HeunParams, n: u32) -> Complex64 {
    (1..=n).fold(Complex64::new(1.0, 0.0), |acc, j| {
        let jf = f64::from(j);
        acc * (-jf) * p.delta_gap(jf)
    })
}

/// The Pochhammer form of [`chain_eigenvalue`]; requires `α ≠ 0`.
pub fn chain_eigenvalue_pochhammer(p: &HeunParams, n: u32) -> Complex64 {
    let x = p.delta() / p.alpha() + (p.beta() + p.gamma()) * 0.5 + 1.0;
    let fact: f64 = (1..=n).map(f64::from).product();
    (-p.alpha()).powu(n) * fact * pochhammer(x, n)
}

/// `(α, γ, β, δ, η′)` with `μ′ = ν`; also returns `(μ′, ν′)`.
pub fn swap_params(p: &HeunParams) -> Result<(HeunParams, crate::params::MuNu)> {
    let (a, b, g) = (p.alpha(), p.beta(), p.gamma());
    let eta = eta_offset(a, g, b) - p.nu();
    let q = HeunParams::new(a, g, b, p.delta(), eta)?;
    Ok((q, q.to_mu_nu()))
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(HeunError::InvalidArgument(what.to_owned()))
    }
}

fn require_degree(m: usize, need: usize) -> Result<()> {
    if m < need {
        Err(HeunError::DegreeTooLow { have: m, need })
    } else {
        Ok(())
    }
}

pub fn verify_basic_commutation(p: &HeunParams, n: u32, trials: usize) -> Result<VerificationReport> {
    Verifier::default().basic_commutation(p, n, trials)
}

pub fn verify_four_term(p: &HeunParams, n: u32, m: usize) -> Result<VerificationReport> {
    Verifier::default().four_term(p, n, m)
}

pub fn verify_chain(p: &HeunParams, n: u32, m: usize) -> Result<VerificationReport> {
    Verifier::default().chain(p, n, m)
}

pub fn verify_high_order_ode(p: &HeunParams, n: u32, m: usize) -> Result<VerificationReport> {
    Verifier::default().high_order_ode(p, n, m)
}

pub fn verify_darboux_relation(
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    eta: Complex64,
    n: u32,
    m: usize,
) -> Result<VerificationReport> {
    Verifier::default().darboux(alpha, beta, gamma, eta, n, m)
}

pub fn verify_selfadjoint_form(p: &HeunParams, m: usize) -> Result<VerificationReport> {
    Verifier::default().selfadjoint(p, m)
}

pub fn verify_symmetry_swap(p: &HeunParams) -> Result<VerificationReport> {
    Verifier::default().symmetry_swap(p)
}
