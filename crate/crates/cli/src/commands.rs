//! One function per subcommand. Each writes a single record and returns
//! whether every check passed.

use std::io::Write;

use heunc::params::delta_for_condition;
use heunc::polynomial::{solve_polynomials, PolySpectrum};
use heunc::roots::{abs_poly_scale, eval_poly, RootOptions};
use heunc::sampling::trial_params;
use heunc::series::{eval_derivative_detailed, taylor_coeffs, SeriesSum};
use heunc::verify::{Identity, Verifier};
use heunc::{Complex64, EvalOptions, HeunError, HeunOperator, HeunParams, Mutation, VerificationReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{cxs, real_field, write_csv, write_json, Cx, OutputRecord, ParamsOut};
use crate::{CliError, CoeffsArgs, EvalArgs, Format, IdentityArg, ParamArgs, PolyArgs, Runtime, VerifyArgs, MAX_TERMS_ENV};

fn params(a: &ParamArgs) -> Result<HeunParams, CliError> {
    Ok(HeunParams::new(a.alpha, a.beta, a.gamma, a.delta, a.eta)?)
}

fn relative(r: f64, scale: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r / scale.max(f64::MIN_POSITIVE)
    }
}

// ---------------------------------------------------------------- eval

#[derive(Serialize)]
struct EvalInputs {
    params: ParamsOut,
    z: Cx,
    deriv: Option<usize>,
    tol: f64,
    max_terms: usize,
    r_max: f64,
}

#[derive(Serialize)]
struct Derivative {
    order: usize,
    value: Cx,
}

#[derive(Serialize)]
struct EvalResults {
    value: Cx,
    derivative: Option<Derivative>,
}

#[derive(Serialize)]
struct EvalDiagnostics {
    terms: usize,
    derivative_terms: Option<usize>,
    max_terms_source: &'static str,
    /// `|D̂H(z)|` relative to `|p2 H''| + |p1 H'| + |p0 H|`.
    ode_residual: f64,
}

fn max_terms(flag: Option<usize>, rt: &Runtime) -> Result<(usize, &'static str), CliError> {
    if let Some(m) = flag {
        return positive(m, "--max-terms").map(|m| (m, "flag"));
    }
    match &rt.max_terms_env {
        Some(raw) => raw
            .parse::<usize>()
            .ok()
            .filter(|&m| m > 0)
            .map(|m| (m, "env"))
            .ok_or_else(|| CliError::Usage(format!("{MAX_TERMS_ENV} must be a positive integer, got '{raw}'"))),
        None => Ok((EvalOptions::default().max_terms, "default")),
    }
}

fn positive(m: usize, flag: &str) -> Result<usize, CliError> {
    if m == 0 {
        Err(CliError::Usage(format!("{flag} must be positive")))
    } else {
        Ok(m)
    }
}

pub fn eval(a: &EvalArgs, rt: &Runtime, out: &mut dyn Write) -> Result<bool, CliError> {
    let p = params(&a.params)?;
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be a positive number, got {}", a.tol)));
    }
    let (cap, source) = max_terms(a.max_terms, rt)?;
    let opts = EvalOptions {
        tol: a.tol,
        max_terms: cap,
        ..EvalOptions::default()
    };
    let sums: Vec<SeriesSum> = (0..=2)
        .map(|n| eval_derivative_detailed(&p, a.z, n, &opts))
        .collect::<Result<_, _>>()?;
    let (r, scale) = HeunOperator::new(&p).pointwise_residual(a.z, [sums[0].value, sums[1].value, sums[2].value]);
    let derivative = match a.deriv {
        None => None,
        Some(n) if n <= 2 => Some((n, sums[n])),
        Some(n) => Some((n, eval_derivative_detailed(&p, a.z, n, &opts)?)),
    };
    let record = OutputRecord {
        command: "eval",
        inputs: EvalInputs {
            params: (&p).into(),
            z: a.z.into(),
            deriv: a.deriv,
            tol: opts.tol,
            max_terms: opts.max_terms,
            r_max: opts.r_max,
        },
        results: EvalResults {
            value: sums[0].value.into(),
            derivative: derivative.map(|(order, s)| Derivative {
                order,
                value: s.value.into(),
            }),
        },
        diagnostics: EvalDiagnostics {
            terms: sums[0].terms,
            derivative_terms: derivative.map(|(_, s)| s.terms),
            max_terms_source: source,
            ode_residual: relative(r, scale),
        },
    };
    write_json(out, &record)?;
    Ok(true)
}

// ---------------------------------------------------------------- coeffs

#[derive(Serialize)]
struct CoeffsInputs {
    params: ParamsOut,
    order: usize,
}

#[derive(Serialize)]
struct Coefficient {
    n: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CoeffsResults {
    coefficients: Vec<Coefficient>,
    valid_degree: usize,
}

#[derive(Serialize)]
struct CoeffsDiagnostics {
    mu: Cx,
    nu: Cx,
    /// `N` when `δ = δ_N`, otherwise null.
    delta_condition: Option<u32>,
}

pub fn coeffs(a: &CoeffsArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let p = params(&a.params)?;
    let s = taylor_coeffs(&p, a.order)?;
    if a.format == Format::Csv {
        let rows = s
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, v)| vec![n.to_string(), real_field(v.re), real_field(v.im)]);
        write_csv(out, &["n", "re", "im"], rows)?;
        return Ok(true);
    }
    let mn = p.to_mu_nu();
    let record = OutputRecord {
        command: "coeffs",
        inputs: CoeffsInputs {
            params: (&p).into(),
            order: a.order,
        },
        results: CoeffsResults {
            coefficients: s
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, v)| Coefficient { n, re: v.re, im: v.im })
                .collect(),
            valid_degree: s.valid_degree(),
        },
        diagnostics: CoeffsDiagnostics {
            mu: mn.mu.into(),
            nu: mn.nu.into(),
            delta_condition: p.check_delta_condition(heunc::params::DEFAULT_DELTA_TOL),
        },
    };
    write_json(out, &record)?;
    Ok(true)
}

// ---------------------------------------------------------------- poly

#[derive(Serialize)]
struct PolyInputs {
    alpha: Cx,
    beta: Cx,
    gamma: Cx,
    #[serde(rename = "N")]
    n: u32,
    k: Option<usize>,
}

#[derive(Serialize)]
struct SolutionOut {
    k: usize,
    mu: Cx,
    eta: Cx,
    coefficients: Vec<Cx>,
    tail_residual: f64,
}

#[derive(Serialize)]
struct PolyResults {
    delta_n: Cx,
    /// `Δ_{N+1}(μ)`, ascending powers of `μ`.
    determinant: Vec<Cx>,
    roots: Vec<Cx>,
    solutions: Vec<SolutionOut>,
    /// 1-based index pairs of roots closer than the multiplicity tolerance.
    multiple_roots: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct PolyDiagnostics {
    degree: usize,
    leading: Cx,
    /// `|Δ(μ_k)| / Σ|c_j||μ_k|^j` for each root.
    root_residuals: Vec<f64>,
}

pub fn poly(a: &PolyArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let spectrum: PolySpectrum = solve_polynomials(a.alpha, a.beta, a.gamma, a.degree, &RootOptions::default())?;
    let count = spectrum.solutions.len();
    let selected: Vec<_> = match a.k {
        Some(k) if k == 0 || k > count => return Err(HeunError::RootIndex { k, count }.into()),
        Some(k) => vec![&spectrum.solutions[k - 1]],
        None => spectrum.solutions.iter().collect(),
    };
    if a.format == Format::Csv {
        let rows = selected.iter().flat_map(|s| {
            s.coeffs
                .iter()
                .enumerate()
                .map(move |(n, v)| vec![s.k.to_string(), n.to_string(), real_field(v.re), real_field(v.im)])
        });
        write_csv(out, &["k", "n", "re", "im"], rows)?;
        return Ok(true);
    }
    let det = spectrum.determinant.coeffs();
    let record = OutputRecord {
        command: "poly",
        inputs: PolyInputs {
            alpha: a.alpha.into(),
            beta: a.beta.into(),
            gamma: a.gamma.into(),
            n: a.degree,
            k: a.k,
        },
        results: PolyResults {
            delta_n: delta_for_condition(a.alpha, a.beta, a.gamma, a.degree).into(),
            determinant: cxs(det),
            roots: cxs(&spectrum.roots),
            solutions: selected
                .iter()
                .map(|s| SolutionOut {
                    k: s.k,
                    mu: s.mu.into(),
                    eta: s.eta.into(),
                    coefficients: cxs(&s.coeffs),
                    tail_residual: s.tail_residual,
                })
                .collect(),
            multiple_roots: spectrum.multiple_roots.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
        },
        diagnostics: PolyDiagnostics {
            degree: spectrum.determinant.degree(),
            leading: spectrum.determinant.leading().into(),
            root_residuals: spectrum
                .roots
                .iter()
                .map(|&mu| relative(eval_poly(det, mu).norm(), abs_poly_scale(det, mu)))
                .collect(),
        },
    };
    write_json(out, &record)?;
    Ok(true)
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyInputs {
    identity: &'static str,
    params: Option<ParamsOut>,
    random: Option<u64>,
    seed: u64,
    n: u32,
    #[serde(rename = "N")]
    degree: u32,
    #[serde(rename = "M")]
    truncation: usize,
    series: usize,
    lambda: Cx,
}

#[derive(Serialize)]
struct OffenderOut {
    index: usize,
    lhs: Cx,
    rhs: Cx,
    relative: f64,
}

#[derive(Serialize)]
struct ReportOut {
    trial: u64,
    identity: &'static str,
    order: u32,
    params: ParamsOut,
    residual: f64,
    tolerance: f64,
    passed: bool,
    compared: usize,
    measured: Option<Cx>,
    grid_residual: Option<f64>,
    worst: Vec<OffenderOut>,
}

impl ReportOut {
    fn new(trial: u64, r: &VerificationReport) -> Self {
        Self {
            trial,
            identity: r.identity.tag(),
            order: r.order_n,
            params: (&r.params).into(),
            residual: r.residual,
            tolerance: r.tolerance,
            passed: r.passed,
            compared: r.compared,
            measured: r.measured.map(Cx::from),
            grid_residual: r.grid_residual,
            worst: r
                .details
                .iter()
                .map(|o| OffenderOut {
                    index: o.index,
                    lhs: o.lhs.into(),
                    rhs: o.rhs.into(),
                    relative: o.relative,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct VerifyResults {
    reports: Vec<ReportOut>,
    total: usize,
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct VerifyDiagnostics {
    trials: u64,
    checks_per_trial: usize,
    mutated: bool,
}

fn identities(arg: IdentityArg) -> Vec<Identity> {
    match arg {
        IdentityArg::All => Identity::SUITE.to_vec(),
        IdentityArg::Basic => vec![Identity::Basic],
        IdentityArg::FourTerm => vec![Identity::FourTerm],
        IdentityArg::Chain => vec![Identity::Chain],
        IdentityArg::HighOde => vec![Identity::HighOde],
        IdentityArg::Darboux => vec![Identity::Darboux],
        IdentityArg::Selfadjoint => vec![Identity::Selfadjoint],
        IdentityArg::Swap => vec![Identity::Swap],
        IdentityArg::EigenShift => vec![Identity::EigenShift],
    }
}

fn identity_tag(arg: IdentityArg) -> &'static str {
    match arg {
        IdentityArg::All => "all",
        other => identities(other)[0].tag(),
    }
}

/// Explicit parameters. The Darboux check replaces `δ` by `δ_N`, so a
/// missing `--delta` is allowed when it is the only identity requested.
fn explicit_params(a: &VerifyArgs, ids: &[Identity]) -> Result<HeunParams, CliError> {
    let need = |v: Option<Complex64>, flag: &str| {
        v.ok_or_else(|| CliError::Usage(format!("missing --{flag} (required unless --random is given)")))
    };
    let (alpha, beta, gamma, eta) = (
        need(a.alpha, "alpha")?,
        need(a.beta, "beta")?,
        need(a.gamma, "gamma")?,
        need(a.eta, "eta")?,
    );
    let delta = match a.delta {
        Some(d) => d,
        None if ids == [Identity::Darboux] => delta_for_condition(alpha, beta, gamma, a.degree),
        None => return Err(CliError::Usage("missing --delta (required unless --random is given)".into())),
    };
    Ok(HeunParams::new(alpha, beta, gamma, delta, eta)?)
}

fn check(v: &Verifier, id: Identity, p: &HeunParams, a: &VerifyArgs) -> heunc::Result<VerificationReport> {
    let m = a.truncation;
    match id {
        Identity::Basic => v.basic_commutation(p, a.n, a.series),
        Identity::FourTerm => v.four_term(p, a.n, m),
        Identity::Chain => v.chain(p, a.n, m),
        Identity::HighOde => v.high_order_ode(p, a.n, m),
        Identity::Darboux => v.darboux(p.alpha(), p.beta(), p.gamma(), p.eta(), a.degree, m),
        Identity::Selfadjoint => v.selfadjoint(p, m),
        Identity::Swap => v.symmetry_swap(p),
        Identity::EigenShift => v.eigen_shift(p, a.lambda, m),
    }
}

/// Seed of the random test series in trial `i`.
fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn verify(a: &VerifyArgs, rt: &Runtime, out: &mut dyn Write) -> Result<bool, CliError> {
    let ids = identities(a.identity);
    positive(a.series, "--series")?;
    let trials: Vec<(u64, HeunParams)> = match a.random {
        Some(0) => return Err(CliError::Usage("--random needs at least one trial".into())),
        Some(t) => (0..t).map(|i| (i, trial_params(a.seed, i))).collect(),
        None => vec![(0, explicit_params(a, &ids)?)],
    };
    let per_trial: Vec<heunc::Result<Vec<ReportOut>>> = trials
        .par_iter()
        .map(|&(i, p)| {
            let v = Verifier::new(trial_seed(a.seed, i)).with_mutation(rt.mutation);
            ids.iter().map(|&id| check(&v, id, &p, a).map(|r| ReportOut::new(i, &r))).collect()
        })
        .collect();
    let mut reports = Vec::new();
    for r in per_trial {
        reports.extend(r?);
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    let all_passed = passed == reports.len();
    if a.format == Format::Csv {
        let rows = reports.iter().map(|r| {
            vec![
                r.trial.to_string(),
                r.identity.to_owned(),
                r.order.to_string(),
                real_field(r.residual),
                real_field(r.tolerance),
                r.passed.to_string(),
            ]
        });
        write_csv(out, &["trial", "identity", "order", "residual", "tolerance", "passed"], rows)?;
        return Ok(all_passed);
    }
    let record = OutputRecord {
        command: "verify",
        inputs: VerifyInputs {
            identity: identity_tag(a.identity),
            params: a.random.is_none().then(|| (&trials[0].1).into()),
            random: a.random,
            seed: a.seed,
            n: a.n,
            degree: a.degree,
            truncation: a.truncation,
            series: a.series,
            lambda: a.lambda.into(),
        },
        results: VerifyResults {
            total: reports.len(),
            failed: reports.len() - passed,
            passed,
            reports,
        },
        diagnostics: VerifyDiagnostics {
            trials: trials.len() as u64,
            checks_per_trial: ids.len(),
            mutated: rt.mutation != Mutation::None,
        },
    };
    write_json(out, &record)?;
    Ok(all_passed)
}
