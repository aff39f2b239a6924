//! Reference computations written from first principles, independent of the
//! library's operator and determinant code.
#![allow(dead_code)]

use heunc::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `μ` and `ν` straight from their defining formulas.
pub fn mu_nu(a: Complex64, b: Complex64, g: Complex64, d: Complex64, e: Complex64) -> (Complex64, Complex64) {
    let mu = (a - b - g + a * b - b * g) * 0.5 - e;
    let nu = (a + b + g + a * g + b * g) * 0.5 + d + e;
    (mu, nu)
}

/// Coefficient `k` of `z(z−1)H'' + (αz(z−1) + (β+1)(z−1) + (γ+1)z)H' + (μ(z−1) + νz)H`
/// for `H = Σ c_j z^j`, expanded by hand term by term. Returns the residual
/// coefficients `0..len−1` (coefficient `k` needs `c_{k+1}`) together with
/// the sum of absolute values of the contributing terms.
pub fn ode_residual(a: Complex64, b: Complex64, g: Complex64, d: Complex64, e: Complex64, cs: &[Complex64]) -> Vec<(Complex64, f64)> {
    let (mu, nu) = mu_nu(a, b, g, d, e);
    let at = |j: isize| -> Complex64 {
        if j < 0 || j as usize >= cs.len() {
            c(0.0, 0.0)
        } else {
            cs[j as usize]
        }
    };
    (0..cs.len().saturating_sub(1))
        .map(|k| {
            let ki = k as isize;
            let kf = k as f64;
            let terms = [
                at(ki) * (kf * (kf - 1.0)),
                -at(ki + 1) * ((kf + 1.0) * kf),
                a * at(ki - 1) * (kf - 1.0),
                -a * at(ki) * kf,
                (b + 1.0) * at(ki) * kf,
                -(b + 1.0) * at(ki + 1) * (kf + 1.0),
                (g + 1.0) * at(ki) * kf,
                mu * at(ki - 1),
                -mu * at(ki),
                nu * at(ki - 1),
            ];
            (terms.iter().sum(), terms.iter().map(|t| t.norm()).sum())
        })
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 0 {
        return c(1.0, 0.0);
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<Complex64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, x)| *x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            m[0][j] * cofactor_det(&minor) * sign
        })
        .sum()
}

/// The `(N+1)×(N+1)` tridiagonal matrix whose determinant is `Δ_{N+1}(μ)`.
pub fn delta_matrix(a: Complex64, b: Complex64, g: Complex64, n: u32, mu: Complex64) -> Vec<Vec<Complex64>> {
    let size = n as usize + 1;
    let mut m = vec![vec![c(0.0, 0.0); size]; size];
    for i in 0..size {
        let r = (i + 1) as f64;
        m[i][i] = mu - (r - 1.0) * (r + b + g) + a * (r - 1.0);
        if i + 1 < size {
            m[i][i + 1] = r * (r + b);
            m[i + 1][i] = a * (n as f64 - (r + 1.0) + 2.0);
        }
    }
    m
}

/// Rising factorial by its product definition.
pub fn rising(x: Complex64, n: u32) -> Complex64 {
    (0..n).map(|k| x + k as f64).product()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Central difference of order 1 or 2 with step `h` along the real axis.
pub fn central_difference(f: impl Fn(Complex64) -> Complex64, z: Complex64, order: u32, h: f64) -> Complex64 {
    match order {
        1 => (f(z + h) - f(z - h)) / (2.0 * h),
        2 => (f(z + h) - f(z) * 2.0 + f(z - h)) / (h * h),
        _ => panic!("only orders 1 and 2"),
    }
}

/// Taylor coefficients by the raw recurrence, with no library code involved.
pub fn raw_coeffs(a: Complex64, b: Complex64, g: Complex64, d: Complex64, e: Complex64, m: usize) -> Vec<Complex64> {
    let mut v = vec![c(1.0, 0.0)];
    let mut prev2 = c(0.0, 0.0);
    for n in 1..=m {
        let nf = n as f64;
        let an = c(1.0, 0.0) + b / nf;
        let bn = c(1.0, 0.0) + (-a + b + g - 1.0) / nf + (e - (-a + b + g) * 0.5 - a * b * 0.5 + b * g * 0.5) / (nf * nf);
        let cn = (d / a + (b + g) * 0.5 + nf - 1.0) * a / (nf * nf);
        let prev = v[n - 1];
        v.push((bn * prev + cn * prev2) / an);
        prev2 = prev;
    }
    v
}
