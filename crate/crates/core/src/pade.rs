//! Linear systems for the switch polynomials and closed-form determinants.
//!
//! The generating polynomials are the unique solutions of small structured
//! linear systems: a block system for the polynomial family, built from the
//! coefficients `c_i = binom(θ, i)` of `(1-x)^θ` in powers of `-x`, and a
//! Toeplitz-like system for the even family, built from the coefficients
//! `b_i = θ(θ+1)…(θ+i-1)/i!` of `(1-x)^{-θ}`. Solving them gives an
//! independent route to the polynomials of [`crate::explicit`].

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::polyalg::{gen_binomial, rising_binomial, Polynomial};

/// Which system a [`PadeSystem`] encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadeKind {
    /// `[[I, -T], [0, -K]] (a, b) = c` for the polynomial family.
    BlockOddEven,
    /// `B a = -V` for the even family.
    EvenCase,
}

/// An assembled `n × n` system `matrix · unknowns = rhs`.
#[derive(Debug, Clone)]
pub struct PadeSystem {
    pub matrix: Matrix,
    pub rhs: Vec<f64>,
    pub kind: PadeKind,
    pub n: usize,
    /// `⌊n/2⌋`, the size of the `K` block.
    pub m: usize,
    pub theta: f64,
}

impl PadeSystem {
    /// The lower-right `m × m` block, negated back to `K`.
    pub fn k_block(&self) -> Option<Matrix> {
        if self.kind != PadeKind::BlockOddEven {
            return None;
        }
        let off = self.n - self.m;
        let mut k = self.matrix.submatrix(off, off, self.m, self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                k[(i, j)] = -k[(i, j)];
            }
        }
        Some(k)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain {
            what: "n",
            value: 0.0,
            expected: ">= 1",
        })
    } else {
        Ok(())
    }
}

// Coefficient of x^i in a power series, zero for negative i.
fn coeff(f: impl Fn(f64, usize) -> f64, theta: f64, i: isize) -> f64 {
    if i < 0 {
        0.0
    } else {
        f(theta, i as usize)
    }
}

/// Assembles the block system whose solution gives `(P⁺)*` and `(P⁻)*`.
///
/// Unknowns are `a_1..a_{n-m}` then `b_1..b_m`, where
/// `(P⁺)*(x) = Σ a_i (-x)^i` and `(P⁻)*(x) = Σ b_i (-x)^i`.
pub fn build_block_system(n: usize, theta: f64) -> Result<PadeSystem> {
    check_n(n)?;
    let m = n / 2;
    let p = n - m;
    let c = |i: isize| coeff(gen_binomial, theta, i);
    // Row k of both T and K reads c_{k-j}; the b_j columns start at p.
    let matrix = Matrix::from_fn(n, n, |i, j| {
        if j < p {
            f64::from(u8::from(i == j))
        } else {
            -c(i as isize - (j - p) as isize)
        }
    });
    let rhs = (1..=n as isize).map(c).collect();
    Ok(PadeSystem {
        matrix,
        rhs,
        kind: PadeKind::BlockOddEven,
        n,
        m,
        theta,
    })
}

fn require_kind(sys: &PadeSystem, kind: PadeKind) -> Result<()> {
    if sys.kind == kind {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "expected a {kind:?} system, got {:?}",
            sys.kind
        )))
    }
}

// x^d - v_1 x^{d-1} + v_2 x^{d-2} - …
fn from_alternating(v: &[f64]) -> Polynomial {
    let d = v.len();
    let mut coeffs = vec![0.0; d + 1];
    coeffs[d] = 1.0;
    for (i, &a) in v.iter().enumerate() {
        let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
        coeffs[d - 1 - i] = sign * a;
    }
    Polynomial::new(coeffs)
}

/// Solves a block system for the monic pair `(P⁺, P⁻)` of degrees
/// `n - m` and `m`.
pub fn solve_block(sys: &PadeSystem) -> Result<(Polynomial, Polynomial)> {
    require_kind(sys, PadeKind::BlockOddEven)?;
    let x = Lu::new(&sys.matrix).solve(&sys.rhs)?;
    let (a, b) = x.split_at(sys.n - sys.m);
    Ok((from_alternating(a), from_alternating(b)))
}

/// Assembles `B a = -V` with `B_ij = b_{2i-j-1}` and `V_i = b_{2i-1}`
/// (1-based), so that `P*(x) = 1 + a_1 x + … + a_n x^n` times `(1-x)^{-θ}`
/// is even through `x^{2n-1}`. The stored right-hand side is `-V`.
pub fn build_even_system(n: usize, theta: f64) -> Result<PadeSystem> {
    check_n(n)?;
    let b = |i: isize| coeff(rising_binomial, theta, i);
    let matrix = Matrix::from_fn(n, n, |i, j| b(2 * i as isize - j as isize));
    let rhs = (0..n as isize).map(|i| -b(2 * i + 1)).collect();
    Ok(PadeSystem {
        matrix,
        rhs,
        kind: PadeKind::EvenCase,
        n,
        m: n / 2,
        theta,
    })
}

/// Solves an even system for the monic `P(x) = x^n + a_1 x^{n-1} + … + a_n`.
pub fn solve_even(sys: &PadeSystem) -> Result<Polynomial> {
    require_kind(sys, PadeKind::EvenCase)?;
    let a = Lu::new(&sys.matrix).solve(&sys.rhs)?;
    let n = a.len();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    for (i, &ai) in a.iter().enumerate() {
        coeffs[n - 1 - i] = ai;
    }
    Ok(Polynomial::new(coeffs))
}

fn det_k_even_numerator(theta: f64, m: usize) -> f64 {
    (1..m).fold(theta.powi(m as i32), |acc, k| {
        let k = k as f64;
        acc * (theta * theta - k * k).powi((m as f64 - k) as i32)
    })
}

fn det_k_odd_numerator(theta: f64, m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, k| {
        let e = (m - k + 1) as i32;
        let k = k as f64;
        acc * ((theta + k - 1.0) * (theta - k)).powi(e)
    })
}

/// Closed form of `det K`.
///
/// For `n = 2m` this is `θ^m Π_{k<m} (θ²-k²)^{m-k}` normalized to 1 at
/// `θ = m`; for `n = 2m+1` it is `Π_{k≤m} ((θ+k-1)(θ-k))^{m-k+1}`
/// normalized to 1 at `θ = m+1`.
pub fn det_k_formula(n: usize, theta: f64) -> f64 {
    let m = n / 2;
    if n % 2 == 0 {
        det_k_even_numerator(theta, m) / det_k_even_numerator(m as f64, m)
    } else {
        det_k_odd_numerator(theta, m) / det_k_odd_numerator((m + 1) as f64, m)
    }
}

/// Closed form `det B = θ^{⌊n/2⌋} Π_{k=1}^{n-2} (θ²-k²)^{⌊(n-k)/2⌋} / (2k+1)!!`.
pub fn det_b_formula(n: usize, theta: f64) -> f64 {
    let mut det = theta.powi((n / 2) as i32);
    let mut double_factorial = 1.0;
    for k in 1..n.saturating_sub(1) {
        double_factorial *= (2 * k + 1) as f64;
        let kf = k as f64;
        det *= (theta * theta - kf * kf).powi(((n - k) / 2) as i32) / double_factorial;
    }
    det
}

/// LU determinant with a singularity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: f64,
    /// A pivot fell below [`crate::linalg::PIVOT_TOLERANCE`]; `value` is 0.
    pub singular: bool,
}

/// Determinant by partially pivoted LU.
pub fn det_numeric(matrix: &Matrix) -> Result<Determinant> {
    if !matrix.is_square() {
        return Err(Error::Precondition(format!(
            "determinant of a {}x{} matrix",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let lu = Lu::new(matrix);
    Ok(Determinant {
        value: lu.det(),
        singular: lu.is_singular(),
    })
}

/// The `m × m` matrix with entries `binom(m+1, 2a-b)` (1-based, zero out of
/// range).
pub fn a_matrix(m: usize) -> Matrix {
    Matrix::from_fn(m, m, |a, b| {
        let idx = 2 * (a as isize + 1) - (b as isize + 1);
        if idx < 0 || idx as usize > m + 1 {
            0.0
        } else {
            gen_binomial((m + 1) as f64, idx as usize).round()
        }
    })
}

/// `det A_m = 2^{m(m+1)/2}`.
pub fn det_a_lemma(m: usize) -> f64 {
    2f64.powi((m * (m + 1) / 2) as i32)
}
