//! Switch functions, their pairing with integrable functions, and
//! power-sum residual certificates.
//!
//! A switch function on `[0, 1]` takes the values `+1` and `-1` and changes
//! sign at finitely many ordered switch points. Pairing with `f` means
//! `∫₀¹ σ(t) f(t) dt`. When an antiderivative `F` with `F(0) = 0` is known
//! the pairing is an exact finite sum of `F` values; otherwise it is computed
//! by adaptive quadrature over each constant-sign interval.

use std::fmt;
use std::ops::{Mul, Neg};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature;

/// Default tolerance for quadrature and residual checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Value of a switch function on one of its intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// `(-1)^k` as a sign.
    pub fn alternating(k: usize) -> Self {
        if k % 2 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

fn check_unit(what: &'static str, t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: t,
            expected: "[0, 1]",
        })
    }
}

/// A ±1-valued step function on `[0, 1]` given by ordered switch points.
///
/// With `initial_sign = +1` the function is `(-1)^m` on `[x_m, x_{m+1})`,
/// where `x_0 = 0` and `x_{n+1} = 1`; at `t = 1` it takes the value of the
/// last interval. Coincident points are allowed and cancel each other.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchFunction {
    points: Vec<f64>,
    initial_sign: Sign,
}

impl SwitchFunction {
    pub fn new(points: Vec<f64>, initial_sign: Sign) -> Result<Self> {
        let in_range = points.iter().all(|x| (0.0..=1.0).contains(x));
        let ordered = points.windows(2).all(|w| w[0] <= w[1]);
        if !in_range || !ordered {
            return Err(Error::Unordered(points));
        }
        Ok(Self {
            points,
            initial_sign,
        })
    }

    /// Sorts and clamps arbitrary reals into a valid point list.
    pub fn from_unsorted(mut points: Vec<f64>, initial_sign: Sign) -> Result<Self> {
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Unordered(points));
        }
        for x in points.iter_mut() {
            *x = x.clamp(0.0, 1.0);
        }
        points.sort_by(f64::total_cmp);
        Self::new(points, initial_sign)
    }

    /// The function that never switches.
    pub fn constant(sign: Sign) -> Self {
        Self {
            points: Vec::new(),
            initial_sign: sign,
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn initial_sign(&self) -> Sign {
        self.initial_sign
    }

    pub fn num_switches(&self) -> usize {
        self.points.len()
    }

    /// Sign on the final interval `[x_n, 1]`.
    pub fn final_sign(&self) -> Sign {
        self.initial_sign * Sign::alternating(self.points.len())
    }

    pub fn evaluate(&self, t: f64) -> Result<Sign> {
        check_unit("t", t)?;
        if t == 1.0 {
            return Ok(self.final_sign());
        }
        let below = self.points.partition_point(|&x| x <= t);
        Ok(self.initial_sign * Sign::alternating(below))
    }

    /// Constant-sign pieces `(a, b, sign)`, including empty ones from
    /// coincident points.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, Sign)> + '_ {
        let n = self.points.len();
        (0..=n).map(move |m| {
            let a = if m == 0 { 0.0 } else { self.points[m - 1] };
            let b = if m == n { 1.0 } else { self.points[m] };
            (a, b, self.initial_sign * Sign::alternating(m))
        })
    }
}

/// Shared real function on `[0, 1]`.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An integrand `f` with an optional antiderivative `F`, normalized so that
/// `F(0) = 0`.
#[derive(Clone)]
pub struct IntegrableFunction {
    f: RealFn,
    antiderivative: Option<RealFn>,
    label: String,
}

impl IntegrableFunction {
    /// An integrand without a known antiderivative.
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            antiderivative: None,
            label: label.into(),
        }
    }

    /// An integrand with antiderivative `F`; rejects `F(0) != 0`.
    pub fn with_antiderivative(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        antiderivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let label = label.into();
        let at_zero = antiderivative(0.0);
        let scale = 1.0 + antiderivative(1.0).abs();
        if !(at_zero.abs() <= 1e-14 * scale) {
            return Err(Error::AntiderivativeOffset {
                label,
                value: at_zero,
            });
        }
        Ok(Self {
            f: Arc::new(f),
            antiderivative: Some(Arc::new(antiderivative)),
            label,
        })
    }

    /// `t^k` with antiderivative `t^(k+1)/(k+1)`.
    pub fn monomial(k: u32) -> Self {
        let kk = k as i32;
        Self {
            f: Arc::new(move |t: f64| t.powi(kk)),
            antiderivative: Some(Arc::new(move |t: f64| t.powi(kk + 1) / (kk + 1) as f64)),
            label: format!("t^{k}"),
        }
    }

    /// `sin(kπt/2)` with antiderivative `(2/(kπ))(1 - cos(kπt/2))`.
    pub fn half_sine(k: u32) -> Self {
        let w = k as f64 * std::f64::consts::FRAC_PI_2;
        Self {
            f: Arc::new(move |t: f64| (w * t).sin()),
            antiderivative: Some(Arc::new(move |t: f64| (1.0 - (w * t).cos()) / w)),
            label: format!("sin({k}πt/2)"),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn has_antiderivative(&self) -> bool {
        self.antiderivative.is_some()
    }

    pub fn antiderivative(&self, t: f64) -> Option<f64> {
        self.antiderivative.as_ref().map(|big_f| big_f(t))
    }

    /// `∫₀ˣ f`, from the antiderivative when present, else by quadrature.
    pub fn integral_to(&self, x: f64, tol: f64) -> Result<f64> {
        match &self.antiderivative {
            Some(big_f) => Ok(big_f(x)),
            None => Ok(quadrature::integrate(|t| self.eval(t), 0.0, x, tol)?.value),
        }
    }

    /// Total integral `∫₀¹ f`.
    pub fn total(&self, tol: f64) -> Result<f64> {
        self.integral_to(1.0, tol)
    }
}

impl fmt::Debug for IntegrableFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegrableFunction")
            .field("label", &self.label)
            .field("has_antiderivative", &self.has_antiderivative())
            .finish()
    }
}

/// Which power-sum (or pairing) system a residual report certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    AlternatingPowerSums,
    OddPowerSums,
    GenericPairing,
}

/// Per-equation residuals of a candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub theta: f64,
    pub lambda: f64,
    pub system_kind: SystemKind,
}

impl ResidualReport {
    pub fn new(residuals: Vec<f64>, theta: f64, lambda: f64, system_kind: SystemKind) -> Self {
        let max_abs = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        Self {
            residuals,
            max_abs,
            theta,
            lambda,
            system_kind,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs <= tol
    }
}

/// The function family a switch function is made orthogonal to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyFamily {
    /// `1, t, …, t^{n-1}`
    Poly,
    /// `1, t², …, t^{2n-2}`
    EvenPoly,
}

/// Right-hand side `θ = (1 + (-1)^{n-1} λ) / 2` of the power-sum systems.
///
/// The same transform applies to both families.
pub fn theta_from_lambda(lambda: f64, n: usize, _family: PolyFamily) -> Result<f64> {
    if !(lambda > -1.0 && lambda < 1.0) {
        return Err(Error::Domain {
            what: "lambda",
            value: lambda,
            expected: "(-1, 1)",
        });
    }
    Ok((1.0 + Sign::alternating(n + 1).value() * lambda) / 2.0)
}

/// Inverse of [`theta_from_lambda`].
pub fn lambda_from_theta(theta: f64, n: usize) -> f64 {
    Sign::alternating(n + 1).value() * (2.0 * theta - 1.0)
}

/// Evaluates `s` at `t`; half-open intervals `[x_m, x_{m+1})`.
pub fn evaluate_switch(s: &SwitchFunction, t: f64) -> Result<Sign> {
    s.evaluate(t)
}

/// Exact pairing `∫₀¹ σ g` from the antiderivative:
/// `±[(-1)^n F(1) - Σ_m 2(-1)^m F(x_m)]`.
pub fn pair_exact(s: &SwitchFunction, g: &IntegrableFunction) -> Result<f64> {
    let Some(big_f) = &g.antiderivative else {
        return Err(Error::MissingAntiderivative(g.label.clone()));
    };
    Ok(pair_with(s, |x| big_f(x)))
}

/// Pairing given any cumulative integral `F` with `F(0) = 0`.
pub(crate) fn pair_with(s: &SwitchFunction, big_f: impl Fn(f64) -> f64) -> f64 {
    let n = s.points.len();
    let mut acc = Sign::alternating(n).value() * big_f(1.0);
    for (i, &x) in s.points.iter().enumerate() {
        acc -= 2.0 * Sign::alternating(i + 1).value() * big_f(x);
    }
    s.initial_sign.value() * acc
}

/// Pairing by adaptive quadrature over each constant-sign interval.
///
/// `tol` is split evenly across the intervals.
pub fn pair_numeric(s: &SwitchFunction, g: &IntegrableFunction, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
            expected: "(0, inf)",
        });
    }
    let piece_tol = tol / (s.points.len() + 1) as f64;
    let mut total = 0.0;
    for (a, b, sign) in s.intervals() {
        if b > a {
            total += sign.value() * quadrature::integrate(|t| g.eval(t), a, b, piece_tol)?.value;
        }
    }
    Ok(total)
}

fn check_points(points: &[f64], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    if points.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: points.len(),
        });
    }
    Ok(())
}

/// Residuals of `Σ_j (-1)^{n-j} x_j^k = θ` for `k = 1..n`.
pub fn residuals_alternating(points: &[f64], theta: f64, n: usize) -> Result<ResidualReport> {
    check_points(points, n)?;
    let residuals = (1..=n as i32)
        .map(|k| signed_power_sum(points, k) - theta)
        .collect();
    Ok(ResidualReport::new(
        residuals,
        theta,
        lambda_from_theta(theta, n),
        SystemKind::AlternatingPowerSums,
    ))
}

/// Residuals of `Σ_j (-1)^{n-j} x_j^{2k-1} = θ` for `k = 1..n`.
///
/// The largest point carries the `+` sign, as in the polynomial system; for
/// odd `n` this is the same as starting with `+x_1`.
pub fn residuals_odd(points: &[f64], theta: f64, n: usize) -> Result<ResidualReport> {
    check_points(points, n)?;
    let residuals = (1..=n as i32)
        .map(|k| signed_power_sum(points, 2 * k - 1) - theta)
        .collect();
    Ok(ResidualReport::new(
        residuals,
        theta,
        lambda_from_theta(theta, n),
        SystemKind::OddPowerSums,
    ))
}

fn signed_power_sum(points: &[f64], k: i32) -> f64 {
    let n = points.len();
    points
        .iter()
        .enumerate()
        .map(|(j, x)| Sign::alternating(n - 1 - j).value() * x.powi(k))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sw(points: &[f64]) -> SwitchFunction {
        SwitchFunction::new(points.to_vec(), Sign::Plus).unwrap()
    }

    // Integral of σ·f by summing exact interval integrals of t^k.
    fn interval_sum_monomial(points: &[f64], k: i32) -> f64 {
        let mut edges = vec![0.0];
        edges.extend_from_slice(points);
        edges.push(1.0);
        edges
            .windows(2)
            .enumerate()
            .map(|(m, w)| {
                let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                s * (w[1].powi(k + 1) - w[0].powi(k + 1)) / (k + 1) as f64
            })
            .sum()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate_switch(&sw(&[]), 0.5).unwrap(), Sign::Plus);
        assert_eq!(evaluate_switch(&sw(&[0.25, 0.75]), 0.5).unwrap(), Sign::Minus);
        let double = sw(&[0.3, 0.3]);
        for t in [0.0, 0.1, 0.29, 0.31, 0.9, 1.0] {
            assert_eq!(double.evaluate(t).unwrap(), Sign::Plus);
        }
    }

    #[test]
    fn evaluate_half_open_and_endpoint() {
        let s = sw(&[0.5]);
        assert_eq!(s.evaluate(0.5).unwrap(), Sign::Minus);
        assert_eq!(s.evaluate(1.0).unwrap(), Sign::Minus);
        let neg = SwitchFunction::new(vec![0.5], Sign::Minus).unwrap();
        assert_eq!(neg.evaluate(0.0).unwrap(), Sign::Minus);
        assert_eq!(neg.evaluate(1.0).unwrap(), Sign::Plus);
    }

    #[test]
    fn evaluate_rejects_outside() {
        assert!(matches!(sw(&[0.5]).evaluate(1.5), Err(Error::Domain { .. })));
        assert!(matches!(sw(&[0.5]).evaluate(-0.1), Err(Error::Domain { .. })));
    }

    #[test]
    fn construction_validates_order() {
        assert!(SwitchFunction::new(vec![0.6, 0.2], Sign::Plus).is_err());
        assert!(SwitchFunction::new(vec![0.2, 1.2], Sign::Plus).is_err());
        let s = SwitchFunction::from_unsorted(vec![0.6, 0.2, 1.3], Sign::Plus).unwrap();
        assert_eq!(s.points(), &[0.2, 0.6, 1.0]);
    }

    #[test]
    fn pair_exact_examples() {
        let one = IntegrableFunction::monomial(0);
        assert!(pair_exact(&sw(&[0.5]), &one).unwrap().abs() < 1e-15);

        let t = IntegrableFunction::monomial(1);
        let p = pair_exact(&sw(&[0.25, 0.75]), &t).unwrap();
        assert!((p - interval_sum_monomial(&[0.25, 0.75], 1)).abs() < 1e-15);
        assert!(p.abs() < 1e-15);

        let s1 = IntegrableFunction::half_sine(1);
        assert!(pair_exact(&sw(&[2.0 / 3.0]), &s1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn pair_exact_needs_antiderivative() {
        let g = IntegrableFunction::new("bare", |t| t);
        assert!(matches!(
            pair_exact(&sw(&[0.5]), &g),
            Err(Error::MissingAntiderivative(_))
        ));
    }

    #[test]
    fn pair_exact_respects_initial_sign() {
        let g = IntegrableFunction::monomial(2);
        let plus = pair_exact(&sw(&[0.1, 0.7]), &g).unwrap();
        let minus =
            pair_exact(&SwitchFunction::new(vec![0.1, 0.7], Sign::Minus).unwrap(), &g).unwrap();
        assert_eq!(plus, -minus);
    }

    #[test]
    fn rejects_shifted_antiderivative() {
        let err = IntegrableFunction::with_antiderivative("f", |_| 1.0, |t| t + 1.0).unwrap_err();
        assert!(matches!(err, Error::AntiderivativeOffset { .. }));
    }

    #[test]
    fn pair_numeric_examples() {
        let one = IntegrableFunction::monomial(0);
        assert!(pair_numeric(&sw(&[0.5]), &one, 1e-10).unwrap().abs() <= 1e-10);
        let t = IntegrableFunction::monomial(1);
        assert!(pair_numeric(&sw(&[0.25, 0.75]), &t, 1e-10).unwrap().abs() <= 1e-10);

        // θ = 1/3, n = 5 polynomial solution: ⟨t³, σ⟩ = λ/4 with λ = -1/3.
        let reference = [0.0422244245, 0.2838895075, 0.4518343712, 0.7827771591, 0.9059412043];
        let cube = IntegrableFunction::monomial(3);
        let got = pair_numeric(&sw(&reference), &cube, 1e-10).unwrap();
        assert!((got - interval_sum_monomial(&reference, 3)).abs() < 1e-12);
        assert!((got + 1.0 / 12.0).abs() < 1e-8, "{got}");
    }

    #[test]
    fn pair_numeric_rejects_bad_tol() {
        let one = IntegrableFunction::monomial(0);
        assert!(pair_numeric(&sw(&[0.5]), &one, 0.0).is_err());
    }

    #[test]
    fn residual_examples() {
        let reference = [0.0422244245, 0.2838895075, 0.4518343712, 0.7827771591, 0.9059412043];
        let r = residuals_alternating(&reference, 1.0 / 3.0, 5).unwrap();
        assert!(r.max_abs < 1e-8, "{r:?}");
        assert_eq!(r.system_kind, SystemKind::AlternatingPowerSums);

        let r = residuals_alternating(&[0.25, 0.75], 0.5, 2).unwrap();
        assert!(r.residuals.iter().all(|x| x.abs() < 1e-16));
        let r = residuals_alternating(&[0.5], 0.5, 1).unwrap();
        assert_eq!(r.residuals, vec![0.0]);

        let zeta = [0.0948419, 0.4571986, 0.6167796, 0.8641519, 0.9430623];
        let r = residuals_odd(&zeta, 1.0 / 3.0, 5).unwrap();
        assert!(r.max_abs < 1e-6, "{r:?}");
        assert_eq!(residuals_odd(&[0.5], 0.5, 1).unwrap().residuals, vec![0.0]);
    }

    // n = 2 odd system: x2 - x1 = θ, x2³ - x1³ = θ. Substituting x2 = x1 + θ
    // leaves a quadratic in x1 that is bisected on [0, 1 - θ].
    #[test]
    fn residuals_odd_two_point_bisection_oracle() {
        let theta = 0.3;
        let g = |x1: f64| (x1 + theta).powi(3) - x1.powi(3) - theta;
        let (mut lo, mut hi) = (0.0, 1.0 - theta);
        assert!(g(lo) * g(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x1 = 0.5 * (lo + hi);
        let r = residuals_odd(&[x1, x1 + theta], theta, 2).unwrap();
        assert!(r.max_abs < 1e-10, "{r:?}");
    }

    #[test]
    fn residual_length_mismatch() {
        assert!(matches!(
            residuals_alternating(&[0.1, 0.2], 0.5, 3),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        ));
        assert!(residuals_odd(&[0.1], 0.5, 2).is_err());
    }

    #[test]
    fn theta_examples() {
        for n in 1..6 {
            assert_eq!(theta_from_lambda(0.0, n, PolyFamily::Poly).unwrap(), 0.5);
        }
        let t = theta_from_lambda(-1.0 / 3.0, 5, PolyFamily::Poly).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-16);
        let t = theta_from_lambda(1.0 / 3.0, 4, PolyFamily::EvenPoly).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-16);
        assert!(theta_from_lambda(1.0, 3, PolyFamily::Poly).is_err());
        assert!(theta_from_lambda(-1.5, 3, PolyFamily::Poly).is_err());
        assert!((lambda_from_theta(1.0 / 3.0, 5) + 1.0 / 3.0).abs() < 1e-16);
    }
}
