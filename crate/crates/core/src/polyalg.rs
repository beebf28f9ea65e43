//! Dense real polynomials, binomial-type coefficients, truncated power series
//! and real-root isolation by Sturm sequences.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Relative cutoff below which Sturm remainder coefficients are dropped.
pub const STURM_CUTOFF: f64 = 1e-13;

/// Default bisection width for [`real_roots_in`].
pub const ROOT_TOL: f64 = 1e-13;

/// Dense univariate polynomial; `coeffs[i]` multiplies `x^i`.
///
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self { coeffs }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::constant(1.0), |acc, &r| {
            &acc * &Polynomial::new(vec![-r, 1.0])
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            Some(&lead) => self.scale(1.0 / lead),
            None => Self::zero(),
        }
    }

    /// Zeroes coefficients with `|c| <= cutoff`, then re-trims.
    pub fn chop(&self, cutoff: f64) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() <= cutoff { 0.0 } else { c })
                .collect(),
        )
    }

    /// Euclidean division `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading_coeff();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![0.0; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ if a == 1.0 => {}
                _ => write!(f, "{a}·")?,
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

fn zip_coeffs(a: &Polynomial, b: &Polynomial, op: impl Fn(f64, f64) -> f64) -> Polynomial {
    let len = a.coeffs.len().max(b.coeffs.len());
    Polynomial::new(
        (0..len)
            .map(|i| {
                op(
                    a.coeffs.get(i).copied().unwrap_or(0.0),
                    b.coeffs.get(i).copied().unwrap_or(0.0),
                )
            })
            .collect(),
    )
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        zip_coeffs(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        zip_coeffs(self, rhs, |a, b| a - b)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// Generalized binomial coefficient `θ(θ-1)…(θ-i+1)/i!`.
pub fn gen_binomial(theta: f64, i: usize) -> f64 {
    (0..i).fold(1.0, |acc, j| acc * (theta - j as f64) / (j + 1) as f64)
}

/// Rising-factorial coefficient `θ(θ+1)…(θ+m-1)/m!`, the `x^m` coefficient
/// of `(1-x)^{-θ}`.
pub fn rising_binomial(theta: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (theta + j as f64) / (j + 1) as f64)
}

/// Reciprocal polynomial `x^m p(1/x)`: the coefficients reversed within
/// length `m + 1`.
pub fn reciprocal_poly(p: &Polynomial, m: usize) -> Result<Polynomial> {
    if let Some(degree) = p.degree() {
        if m < degree {
            return Err(Error::ReciprocalOrder { order: m, degree });
        }
    }
    let mut coeffs = p.coeffs.clone();
    coeffs.resize(m + 1, 0.0);
    coeffs.reverse();
    Ok(Polynomial::new(coeffs))
}

/// Power series known through `x^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    /// Series whose coefficients are `coeffs`, valid through
    /// `x^{coeffs.len()-1}`. Panics on an empty list.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs order >= 0");
        Self { coeffs }
    }

    /// A polynomial viewed as a series through `x^order` (zero-padded or cut).
    pub fn from_polynomial(p: &Polynomial, order: usize) -> Self {
        let mut coeffs = p.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// `(1-x)^θ` through `x^order`: coefficients `(-1)^i binom(θ, i)`.
pub fn series_pow_one_minus_x(theta: f64, order: usize) -> TruncatedSeries {
    TruncatedSeries {
        coeffs: (0..=order)
            .map(|i| {
                let c = gen_binomial(theta, i);
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect(),
    }
}

/// Cauchy product of `a` and `b`, truncated at `x^order`.
pub fn series_mul_truncate(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    order: usize,
) -> Result<TruncatedSeries> {
    let available = a.order().min(b.order());
    if available < order {
        return Err(Error::InsufficientOrder {
            available,
            requested: order,
        });
    }
    let coeffs = (0..=order)
        .map(|k| (0..=k).map(|i| a.coeffs[i] * b.coeffs[k - i]).sum())
        .collect();
    Ok(TruncatedSeries { coeffs })
}

/// Sturm sequence `p, p', -rem(p, p'), …`, each member rescaled to unit
/// max-coefficient.
pub fn sturm_chain(p: &Polynomial) -> Result<Vec<Polynomial>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let normalize = |q: &Polynomial| q.scale(1.0 / q.max_abs_coeff());
    let mut chain = vec![normalize(p)];
    let d = chain[0].derivative();
    if d.is_zero() {
        return Ok(chain);
    }
    chain.push(normalize(&d));
    loop {
        let k = chain.len();
        let (a, b) = (&chain[k - 2], &chain[k - 1]);
        if b.degree() == Some(0) {
            break;
        }
        let (q, r) = a.div_rem(b);
        let scale = a.max_abs_coeff().max(q.max_abs_coeff() * b.max_abs_coeff());
        let r = r.chop(STURM_CUTOFF * scale);
        if r.is_zero() {
            break;
        }
        chain.push(normalize(&-&r));
    }
    Ok(chain)
}

fn sign_changes(chain: &[Polynomial], x: f64) -> usize {
    let mut changes = 0;
    let mut prev = 0.0_f64;
    for q in chain {
        let v = q.eval(x);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v < 0.0) != (prev < 0.0) {
            changes += 1;
        }
        prev = v;
    }
    changes
}

/// All real roots of `p` in the open interval `(lo, hi)`, ascending.
///
/// Roots are isolated with a Sturm sequence, bisected to width `tol` and
/// polished by two Newton steps. The roots are assumed simple; a chain that
/// ends in a non-constant polynomial (a common factor of `p` and `p'`) or an
/// interval that cannot be split further while still holding several roots
/// is reported as [`Error::MultipleRoot`].
pub fn real_roots_in(p: &Polynomial, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>> {
    if !(lo < hi) {
        return Err(Error::Domain {
            what: "hi - lo",
            value: hi - lo,
            expected: "(0, inf)",
        });
    }
    let chain = sturm_chain(p)?;
    let last = chain.last().expect("chain is non-empty");
    if last.degree().unwrap_or(0) > 0 && chain.len() > 1 {
        return Err(Error::MultipleRoot {
            near: f64::NAN,
            gcd_degree: last.degree().unwrap_or(0),
        });
    }
    let p = &chain[0];
    let dp = p.derivative();
    let width = tol.max(f64::EPSILON);

    let mut brackets = Vec::new();
    let mut stack = vec![(lo, hi, sign_changes(&chain, lo), sign_changes(&chain, hi))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let mut count = va.saturating_sub(vb);
        // Sturm counts (a, b]; the caller's interval is open at hi.
        if b == hi && p.eval(hi) == 0.0 && count > 0 {
            count -= 1;
        }
        match count {
            0 => {}
            1 => brackets.push((a, b)),
            _ => {
                let mid = 0.5 * (a + b);
                if b - a <= width || mid <= a || mid >= b {
                    return Err(Error::MultipleRoot {
                        near: mid,
                        gcd_degree: 0,
                    });
                }
                let vm = sign_changes(&chain, mid);
                stack.push((mid, b, vm, vb));
                stack.push((a, mid, va, vm));
            }
        }
    }

    let mut roots: Vec<f64> = brackets
        .into_iter()
        .map(|(a, b)| refine_root(p, &dp, &chain, a, b, width, hi))
        .collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn refine_root(
    p: &Polynomial,
    dp: &Polynomial,
    chain: &[Polynomial],
    a0: f64,
    b0: f64,
    width: f64,
    hi: f64,
) -> f64 {
    let (mut a, mut b) = (a0, b0);
    if b < hi && p.eval(b) == 0.0 {
        return b;
    }
    let fa = p.eval(a);
    let fb = p.eval(b);
    let by_sign = fa != 0.0 && fa.signum() != fb.signum();
    let mut va = sign_changes(chain, a);
    while b - a > width {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let left_holds_root = if by_sign {
            p.eval(mid).signum() != fa.signum()
        } else {
            let vm = sign_changes(chain, mid);
            let holds = va > vm;
            if !holds {
                va = vm;
            }
            holds
        };
        if left_holds_root {
            b = mid;
        } else {
            a = mid;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..2 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let next = x - p.eval(x) / d;
        if next > a0 && next <= b0 && p.eval(next).abs() <= p.eval(x).abs() {
            x = next;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn trims_trailing_zeros() {
        assert!(Polynomial::new(vec![0.0, 0.0]).is_zero());
        assert_eq!(Polynomial::new(vec![1.0, 2.0, 0.0]).degree(), Some(1));
        assert_eq!(Polynomial::zero().degree(), None);
    }

    #[test]
    fn arithmetic() {
        let p = Polynomial::new(vec![1.0, 1.0]);
        let q = Polynomial::new(vec![-1.0, 1.0]);
        assert_eq!((&p * &q).coeffs(), &[-1.0, 0.0, 1.0]);
        assert_eq!((&p + &q).coeffs(), &[0.0, 2.0]);
        assert_eq!((&p - &p).coeffs(), &[] as &[f64]);
        let (quot, rem) = Polynomial::new(vec![-1.0, 0.0, 1.0]).div_rem(&q);
        assert_eq!(quot.coeffs(), &[1.0, 1.0]);
        assert!(rem.is_zero());
        assert_eq!(Polynomial::from_roots(&[1.0, 2.0]).coeffs(), &[2.0, -3.0, 1.0]);
        assert_eq!(Polynomial::new(vec![1.0, 2.0, 3.0]).derivative().coeffs(), &[2.0, 6.0]);
        assert_eq!(Polynomial::new(vec![1.0, -2.0, 1.0]).eval(3.0), 4.0);
    }

    #[test]
    fn display_is_readable() {
        let p = Polynomial::new(vec![-0.5, 0.0, 1.0]);
        assert_eq!(p.to_string(), "x^2 - 0.5");
    }

    #[test]
    fn gen_binomial_examples() {
        assert_eq!(gen_binomial(0.5, 0), 1.0);
        assert_eq!(gen_binomial(0.5, 2), -0.125);
        assert_eq!(gen_binomial(3.0, 2), 3.0);
        assert_eq!(gen_binomial(3.0, 5), 0.0);
    }

    // Integer θ: compare with Pascal's triangle.
    #[test]
    fn gen_binomial_matches_pascal() {
        let mut row = vec![1u64];
        for theta in 0..=8u64 {
            for (i, &c) in row.iter().enumerate() {
                assert_eq!(gen_binomial(theta as f64, i), c as f64);
            }
            assert_eq!(gen_binomial(theta as f64, row.len()), 0.0);
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
    }

    #[test]
    fn rising_binomial_examples() {
        assert_eq!(rising_binomial(0.7, 0), 1.0);
        assert!((rising_binomial(1.0 / 3.0, 1) - 1.0 / 3.0).abs() < 1e-16);
        assert!((rising_binomial(1.0 / 3.0, 2) - 2.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn reciprocal_examples() {
        let theta = 0.3;
        let p = Polynomial::new(vec![0.0, -theta, 1.0]);
        assert_eq!(reciprocal_poly(&p, 2).unwrap().coeffs(), &[1.0, -theta]);
        assert_eq!(reciprocal_poly(&Polynomial::constant(1.0), 0).unwrap().coeffs(), &[1.0]);
        assert!(matches!(
            reciprocal_poly(&p, 1),
            Err(Error::ReciprocalOrder { order: 1, degree: 2 })
        ));
        let q = Polynomial::new(vec![2.0, -1.0, 0.5, 3.0]);
        assert_eq!(reciprocal_poly(&reciprocal_poly(&q, 3).unwrap(), 3).unwrap(), q);
    }

    #[test]
    fn series_examples() {
        assert_eq!(series_pow_one_minus_x(1.0, 2).coeffs(), &[1.0, -1.0, 0.0]);
        assert_eq!(series_pow_one_minus_x(0.5, 2).coeffs(), &[1.0, -0.5, -0.125]);
        assert_eq!(series_pow_one_minus_x(0.0, 3).coeffs(), &[1.0, 0.0, 0.0, 0.0]);

        let a = TruncatedSeries::new(vec![1.0, 1.0]);
        let b = TruncatedSeries::new(vec![1.0, -1.0]);
        assert_eq!(series_mul_truncate(&a, &b, 1).unwrap().coeffs(), &[1.0, 0.0]);

        let h = series_pow_one_minus_x(0.5, 4);
        let sq = series_mul_truncate(&h, &h, 4).unwrap();
        assert!(close(sq.coeffs(), &[1.0, -1.0, 0.0, 0.0, 0.0], 1e-15));

        let one = TruncatedSeries::new(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(series_mul_truncate(&h, &one, 4).unwrap(), h);

        assert!(matches!(
            series_mul_truncate(&a, &h, 2),
            Err(Error::InsufficientOrder { available: 1, requested: 2 })
        ));
    }

    #[test]
    fn quadratic_roots() {
        let p = Polynomial::new(vec![3.0 / 16.0, -1.0, 1.0]);
        let r = real_roots_in(&p, 0.0, 1.0, ROOT_TOL).unwrap();
        assert!(close(&r, &[0.25, 0.75], 1e-15), "{r:?}");
    }

    #[test]
    fn worked_cubic_and_quadratic() {
        let q3 = Polynomial::new(vec![-7.0 / 405.0, 7.0 / 15.0, -7.0 / 5.0, 1.0]);
        let r = real_roots_in(&q3, 0.0, 1.0, ROOT_TOL).unwrap();
        assert!(close(&r, &[0.0422244245, 0.4518343712, 0.9059412043], 1e-10), "{r:?}");

        let r2 = Polynomial::new(vec![2.0 / 9.0, -16.0 / 15.0, 1.0]);
        let r = real_roots_in(&r2, 0.0, 1.0, ROOT_TOL).unwrap();
        assert!(close(&r, &[0.2838895075, 0.7827771591], 1e-10), "{r:?}");
    }

    #[test]
    fn roots_outside_interval_are_ignored() {
        let p = Polynomial::from_roots(&[-2.0, 0.3, 0.6, 1.5]);
        let r = real_roots_in(&p, 0.0, 1.0, ROOT_TOL).unwrap();
        assert!(close(&r, &[0.3, 0.6], 1e-13), "{r:?}");
        // Root sitting on the open upper end is excluded.
        let p = Polynomial::from_roots(&[0.5, 1.0]);
        let r = real_roots_in(&p, 0.0, 1.0, ROOT_TOL).unwrap();
        assert!(close(&r, &[0.5], 1e-14), "{r:?}");
    }

    #[test]
    fn no_real_roots() {
        let p = Polynomial::new(vec![1.0, 0.0, 1.0]);
        assert!(real_roots_in(&p, -5.0, 5.0, ROOT_TOL).unwrap().is_empty());
    }

    #[test]
    fn double_root_is_reported() {
        let p = Polynomial::from_roots(&[0.25, 0.5, 0.5]);
        assert!(matches!(
            real_roots_in(&p, 0.0, 1.0, ROOT_TOL),
            Err(Error::MultipleRoot { .. })
        ));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(
            real_roots_in(&Polynomial::zero(), 0.0, 1.0, ROOT_TOL),
            Err(Error::ZeroPolynomial)
        );
    }
}
