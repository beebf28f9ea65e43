//! Switch functions orthogonal to prescribed function families.
//!
//! A switch function is a ±1-valued step function on `[0, 1]` with finitely
//! many sign changes. This crate computes switch functions `σ` with at most
//! `n` switches such that `∫₀¹ (σ - λ) f = 0` for every `f` in a family:
//!
//! * polynomials of degree `< n` and even polynomials of degree `< 2n - 1`,
//!   via closed-form polynomials whose roots are the switch points
//!   ([`explicit`]), cross-checked by an independent Padé linear-algebra
//!   route ([`pade`]);
//! * `sin(kπt/2)`, `k = 1..n`, by a change of variables from the polynomial
//!   case;
//! * arbitrary integrable families, by a multistart damped Newton solver
//!   ([`solver`]).
//!
//! Every constructed solution carries a [`ResidualReport`] certifying the
//! underlying power-sum or pairing equations.

pub mod error;
pub mod explicit;
pub mod linalg;
pub mod pade;
pub mod polyalg;
pub mod quadrature;
pub mod solver;
pub mod switch;

pub use error::{Error, Result};
pub use polyalg::{Polynomial, TruncatedSeries};
pub use switch::{
    evaluate_switch, pair_exact, pair_numeric, residuals_alternating, residuals_odd,
    theta_from_lambda, IntegrableFunction, PolyFamily, ResidualReport, Sign, SwitchFunction,
    SystemKind,
};
