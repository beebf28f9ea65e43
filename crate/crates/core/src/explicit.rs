//! Closed-form switch functions.
//!
//! For the polynomial family `1, t, …, t^{n-1}` the switch points are the
//! roots of two explicit polynomials (`P_m(x, ±θ)` for `n = 2m`,
//! `Q_{m+1}(x, θ)` and `R_m(x, -θ)` for `n = 2m + 1`), whose roots interleave
//! in `(0, 1)`. For the even family `1, t², …, t^{2n-2}` they are the
//! absolute values of the roots of the monic Jacobi polynomial with
//! parameters `(θ, -θ)`. The sine family `sin(kπt/2)` reduces to the
//! polynomial case through `t ↦ cos(πt/2)`.
//!
//! Every constructor certifies its output against the defining equations and
//! returns [`Error::Internal`] if the certificate fails.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::polyalg::{gen_binomial, real_roots_in, Polynomial, ROOT_TOL};
use crate::switch::{
    pair_exact, residuals_alternating, residuals_odd, theta_from_lambda, IntegrableFunction,
    PolyFamily, ResidualReport, Sign, SwitchFunction, SystemKind,
};

/// Certificate threshold for the alternating power sums.
pub const POLY_CERT_TOL: f64 = 1e-9;
/// Certificate threshold for the odd power sums.
pub const EVEN_CERT_TOL: f64 = 1e-8;
/// Certificate threshold for the sine pairings.
pub const SINE_CERT_TOL: f64 = 1e-8;

// Σ_i (-1)^i ratio_i · binom(top, i) · x^{deg-i}, where
// ratio_i = Π_{j<i} (num - j) / (den - j).
fn hypergeometric_poly(deg: usize, num: usize, den: usize, top: f64) -> Polynomial {
    let mut coeffs = vec![0.0; deg + 1];
    let mut ratio = 1.0;
    for i in 0..=deg {
        if i > 0 {
            ratio *= (num - (i - 1)) as f64 / (den - (i - 1)) as f64;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[deg - i] = sign * ratio * gen_binomial(top, i);
    }
    Polynomial::new(coeffs)
}

/// Monic `P_m(x, θ) = Σ_i (-1)^i [m!(2m-i)! / ((2m)!(m-i)!)] binom(m+θ, i) x^{m-i}`.
pub fn build_p(m: usize, theta: f64) -> Polynomial {
    hypergeometric_poly(m, m, 2 * m, m as f64 + theta)
}

/// Monic `Q_{m+1}(x, θ)` of degree `mp1 = m + 1`, with coefficients
/// `(m+1)!(2m+1-i)! / ((2m+1)!(m+1-i)!) · binom(m+θ, i)`.
pub fn build_q(mp1: usize, theta: f64) -> Result<Polynomial> {
    if mp1 == 0 {
        return Err(Error::Domain {
            what: "m + 1",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let m = mp1 - 1;
    Ok(hypergeometric_poly(mp1, mp1, 2 * m + 1, m as f64 + theta))
}

/// Monic `R_m(x, θ)` with coefficients
/// `m!(2m+1-i)! / ((2m+1)!(m-i)!) · binom(m+1+θ, i)`.
pub fn build_r(m: usize, theta: f64) -> Polynomial {
    hypergeometric_poly(m, m, 2 * m + 1, (m + 1) as f64 + theta)
}

/// The two generating polynomials for `n` switches: the one whose roots
/// enter the power sums with `+` comes first.
pub fn generating_polynomials(n: usize, theta: f64) -> Result<(Polynomial, Polynomial)> {
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let m = n / 2;
    if n % 2 == 0 {
        Ok((build_p(m, theta), build_p(m, -theta)))
    } else {
        Ok((build_q(m + 1, theta)?, build_r(m, -theta)))
    }
}

/// Switch function orthogonal (up to `λ`) to polynomials of degree `< n`,
/// together with its generating polynomials and certificate.
#[derive(Debug, Clone)]
pub struct PolySwitch {
    pub switch: SwitchFunction,
    pub lambda: f64,
    pub theta: f64,
    pub first: Polynomial,
    pub second: Polynomial,
    pub report: ResidualReport,
}

/// Merges the root sets, checking strict alternation.
///
/// For even `n` the second polynomial's roots come first
/// (`η_1 < ξ_1 < η_2 < …`); for odd `n` the first polynomial leads
/// (`ξ_1 < η_1 < … < ξ_{m+1}`).
fn interleave(n: usize, first: &[f64], second: &[f64]) -> Result<Vec<f64>> {
    let m = n / 2;
    if first.len() != n - m || second.len() != m {
        return Err(Error::Internal(format!(
            "expected {} + {} roots in (0, 1), found {} + {}",
            n - m,
            m,
            first.len(),
            second.len()
        )));
    }
    let (lead, follow) = if n % 2 == 0 {
        (second, first)
    } else {
        (first, second)
    };
    let mut merged = Vec::with_capacity(n);
    for i in 0..lead.len() {
        merged.push(lead[i]);
        if let Some(&f) = follow.get(i) {
            merged.push(f);
        }
    }
    if merged.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Internal(format!(
            "generating polynomial roots do not interleave: {merged:?}"
        )));
    }
    Ok(merged)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > -1.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "lambda",
            value: lambda,
            expected: "(-1, 1)",
        })
    }
}

/// The unique `σ` with `n` switches such that `⟨p, σ - λ⟩ = 0` for every
/// polynomial `p` of degree `< n`.
pub fn poly_switch(n: usize, lambda: f64) -> Result<PolySwitch> {
    check_lambda(lambda)?;
    let theta = theta_from_lambda(lambda, n, PolyFamily::Poly)?;
    let (first, second) = generating_polynomials(n, theta)?;
    let first_roots = real_roots_in(&first, 0.0, 1.0, ROOT_TOL)?;
    let second_roots = if second.degree().unwrap_or(0) == 0 {
        Vec::new()
    } else {
        real_roots_in(&second, 0.0, 1.0, ROOT_TOL)?
    };
    let points = interleave(n, &first_roots, &second_roots)?;
    let report = residuals_alternating(&points, theta, n)?;
    if !report.passes(POLY_CERT_TOL) {
        return Err(Error::Internal(format!(
            "alternating power sums off by {:e} (n = {n}, θ = {theta})",
            report.max_abs
        )));
    }
    Ok(PolySwitch {
        switch: SwitchFunction::new(points, Sign::Plus)?,
        lambda,
        theta,
        first,
        second,
        report,
    })
}

/// `x_j = cos²((n+1-j)π / (2n+2))`: the `λ = 0` polynomial solution.
pub fn cos2_solution(n: usize) -> Result<SwitchFunction> {
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let points = (1..=n)
        .map(|j| {
            let c = ((n + 1 - j) as f64 * PI / (2 * n + 2) as f64).cos();
            c * c
        })
        .collect();
    SwitchFunction::new(points, Sign::Plus)
}

/// Monic Jacobi polynomial `J_n(θ, -θ; x)`.
///
/// Built from the monic three-term recurrence
/// `p_{k+1} = x p_k - (k² - θ²)/(4k² - 1) p_{k-1}` with `p_1 = x - θ`, then
/// checked against `(1-x²)P'' + (2θ-2x)P' + n(n+1)P = 0` at five points.
pub fn jacobi_poly(n: usize, theta: f64) -> Result<Polynomial> {
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            expected: "(0, 1)",
        });
    }
    let x = Polynomial::monomial(1);
    let mut prev = Polynomial::constant(1.0);
    let mut cur = Polynomial::new(vec![-theta, 1.0]);
    for k in 1..n {
        let kf = k as f64;
        let beta = (kf * kf - theta * theta) / (4.0 * kf * kf - 1.0);
        let next = &(&x * &cur) - &prev.scale(beta);
        prev = cur;
        cur = next;
    }

    let d1 = cur.derivative();
    let d2 = d1.derivative();
    let nn = (n * (n + 1)) as f64;
    for t in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        let terms = [
            (1.0 - t * t) * d2.eval(t),
            (2.0 * theta - 2.0 * t) * d1.eval(t),
            nn * cur.eval(t),
        ];
        let residual: f64 = terms.iter().sum();
        let scale = terms.iter().map(|v| v.abs()).sum::<f64>() + cur.max_abs_coeff();
        if residual.abs() > 1e-8 * scale {
            return Err(Error::Internal(format!(
                "Jacobi ODE residual {residual:e} at x = {t} (n = {n}, θ = {theta})"
            )));
        }
    }
    Ok(cur)
}

/// Switch function orthogonal (up to `λ`) to even polynomials of degree
/// `≤ 2n - 2`.
#[derive(Debug, Clone)]
pub struct EvenPolySwitch {
    pub switch: SwitchFunction,
    pub lambda: f64,
    pub theta: f64,
    pub jacobi: Polynomial,
    /// Roots `ζ_i` of the Jacobi polynomial ordered by absolute value.
    pub signed_roots: Vec<f64>,
    pub report: ResidualReport,
}

/// Switch points `|ζ_i|` from the Jacobi polynomial roots.
pub fn even_poly_switch(n: usize, lambda: f64) -> Result<EvenPolySwitch> {
    check_lambda(lambda)?;
    let theta = theta_from_lambda(lambda, n, PolyFamily::EvenPoly)?;
    let jacobi = jacobi_poly(n, theta)?;
    let mut roots = real_roots_in(&jacobi, -1.0, 1.0, ROOT_TOL)?;
    if roots.len() != n {
        return Err(Error::Internal(format!(
            "Jacobi polynomial has {} roots in (-1, 1), expected {n}",
            roots.len()
        )));
    }
    roots.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    for (i, &z) in roots.iter().enumerate() {
        let expected = Sign::alternating(n - 1 - i);
        if z == 0.0 || Sign::of(z) != expected {
            return Err(Error::Internal(format!(
                "Jacobi root {i} = {z} breaks the sign pattern (-1)^(n-i)"
            )));
        }
    }
    let points: Vec<f64> = roots.iter().map(|z| z.abs()).collect();
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Internal(format!(
            "Jacobi root magnitudes are not distinct: {points:?}"
        )));
    }
    let report = residuals_odd(&points, theta, n)?;
    if !report.passes(EVEN_CERT_TOL) {
        return Err(Error::Internal(format!(
            "odd power sums off by {:e} (n = {n}, θ = {theta})",
            report.max_abs
        )));
    }
    Ok(EvenPolySwitch {
        switch: SwitchFunction::new(points, Sign::Plus)?,
        lambda,
        theta,
        jacobi,
        signed_roots: roots,
        report,
    })
}

/// Switch function orthogonal (up to `λ`) to `sin(kπt/2)`, `k = 1..n`.
#[derive(Debug, Clone)]
pub struct SineSwitch {
    pub switch: SwitchFunction,
    pub lambda: f64,
    /// The polynomial solution (parameter `(-1)^n λ`) it was mapped from.
    pub polynomial: PolySwitch,
    /// `⟨sin(kπt/2), σ⟩ - λ ∫ sin(kπt/2)` for `k = 1..n`.
    pub report: ResidualReport,
}

/// Maps the polynomial solution for `(-1)^n λ` through
/// `y_j = (2/π) arccos(x_{n+1-j})`.
pub fn sine_switch(n: usize, lambda: f64) -> Result<SineSwitch> {
    check_lambda(lambda)?;
    let poly_lambda = if n % 2 == 0 { lambda } else { -lambda };
    let polynomial = poly_switch(n, poly_lambda)?;
    let points: Vec<f64> = polynomial
        .switch
        .points()
        .iter()
        .rev()
        .map(|&x| x.acos() / FRAC_PI_2)
        .collect();
    let switch = SwitchFunction::new(points, Sign::Plus)?;
    let residuals = (1..=n as u32)
        .map(|k| {
            let g = IntegrableFunction::half_sine(k);
            let total = g.antiderivative(1.0).expect("closed form");
            Ok(pair_exact(&switch, &g)? - lambda * total)
        })
        .collect::<Result<Vec<f64>>>()?;
    let report = ResidualReport::new(residuals, polynomial.theta, lambda, SystemKind::GenericPairing);
    if !report.passes(SINE_CERT_TOL) {
        return Err(Error::Internal(format!(
            "sine pairings off by {:e} (n = {n}, λ = {lambda})",
            report.max_abs
        )));
    }
    Ok(SineSwitch {
        switch,
        lambda,
        polynomial,
        report,
    })
}
