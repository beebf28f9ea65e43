//! Numerical solvers for families without a closed form.
//!
//! [`two_switch_constructive`] follows the one-dimensional sweep that proves
//! existence for two functions with `λ = 1 - 2/k`. [`generic_solve`] runs a
//! damped Newton iteration on the pairing equations
//! `⟨f_i, Σ_n(x)⟩ = λ ∫ f_i` from many starts in the simplex.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::explicit::cos2_solution;
use crate::linalg::{Lu, Matrix};
use crate::switch::{IntegrableFunction, ResidualReport, Sign, SwitchFunction, SystemKind};

/// Quadrature tolerance used when a function has no antiderivative.
pub const QUAD_TOL: f64 = 1e-13;
/// Points closer than this are nudged apart after projection.
pub const SEPARATION: f64 = 1e-12;
/// Converged solutions farther apart than this count as distinct.
pub const BASIN_TOL: f64 = 1e-6;

/// Tuning for [`generic_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Target for the max-norm of the residuals.
    pub tol: f64,
    pub max_iter: usize,
    pub n_starts: usize,
    pub seed: u64,
    /// Initial Newton step fraction, halved on backtracking.
    pub damping: f64,
    /// Worker threads for independent starts.
    pub threads: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            n_starts: 64,
            seed: 0,
            damping: 1.0,
            threads: 1,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Domain {
                what: "tol",
                value: self.tol,
                expected: "(0, inf)",
            });
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Domain {
                what: "damping",
                value: self.damping,
                expected: "(0, 1]",
            });
        }
        if self.n_starts == 0 {
            return Err(Error::Precondition("n_starts must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Precondition("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    NoConvergence,
}

/// Result of [`generic_solve`].
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// The solution, when converged.
    pub switch: Option<SwitchFunction>,
    /// Residuals at the best point found.
    pub report: ResidualReport,
    pub best_points: Vec<f64>,
    pub starts_tried: usize,
    pub best_residual: f64,
    /// Number of distinct converged solutions (not claimed exhaustive).
    pub distinct_solutions: usize,
}

// Cumulative integrals with the antiderivative when available.
struct Family<'a> {
    fs: &'a [IntegrableFunction],
    totals: Vec<f64>,
}

impl<'a> Family<'a> {
    fn new(fs: &'a [IntegrableFunction]) -> Result<Self> {
        let totals = fs.iter().map(|f| f.total(QUAD_TOL)).collect::<Result<_>>()?;
        Ok(Self { fs, totals })
    }

    // ⟨f_i, Σ_n(x)⟩ - λ F_i(1) with initial sign +1.
    fn residuals(&self, x: &[f64], lambda: f64) -> Result<Vec<f64>> {
        let n = x.len();
        self.fs
            .iter()
            .zip(&self.totals)
            .map(|(f, &total)| {
                let mut acc = Sign::alternating(n).value() * total;
                for (m, &xm) in x.iter().enumerate() {
                    acc -= 2.0 * Sign::alternating(m + 1).value() * f.integral_to(xm, QUAD_TOL)?;
                }
                Ok(acc - lambda * total)
            })
            .collect()
    }

    fn jacobian(&self, x: &[f64]) -> Matrix {
        Matrix::from_fn(self.fs.len(), x.len(), |i, m| {
            -2.0 * Sign::alternating(m + 1).value() * self.fs[i].eval(x[m])
        })
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, r| acc.max(r.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|r| r * r).sum()
}

/// Clamps into `[0, 1]`, sorts, and separates coincident points.
fn project(x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    x.sort_by(f64::total_cmp);
    let n = x.len();
    for i in 1..n {
        if x[i] - x[i - 1] < SEPARATION {
            x[i] = x[i - 1] + SEPARATION;
        }
    }
    if n > 0 && x[n - 1] > 1.0 {
        x[n - 1] = 1.0;
        for i in (0..n - 1).rev() {
            if x[i + 1] - x[i] < SEPARATION {
                x[i] = x[i + 1] - SEPARATION;
            }
        }
    }
}

// Levenberg–Marquardt step for a singular Jacobian.
fn lm_step(j: &Matrix, r: &[f64]) -> Result<Vec<f64>> {
    let jt = j.transpose();
    let mut a = jt.mul(j);
    let trace: f64 = (0..a.rows()).map(|i| a[(i, i)]).sum();
    let mu = 1e-8 * trace.max(1e-300) + 1e-14;
    for i in 0..a.rows() {
        a[(i, i)] += mu;
    }
    let g: Vec<f64> = jt.mul_vec(r).iter().map(|v| -v).collect();
    Lu::new(&a).solve(&g)
}

struct Run {
    points: Vec<f64>,
    residuals: Vec<f64>,
    max_abs: f64,
}

fn newton(family: &Family, lambda: f64, mut x: Vec<f64>, opts: &SolveOptions) -> Result<Run> {
    project(&mut x);
    let mut r = family.residuals(&x, lambda)?;
    for _ in 0..opts.max_iter {
        if max_abs(&r) <= opts.tol {
            break;
        }
        let j = family.jacobian(&x);
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let lu = Lu::new(&j);
        let step = if lu.is_singular() {
            lm_step(&j, &r)?
        } else {
            lu.solve(&neg_r)?
        };
        let f0 = norm2(&r);
        let mut t = opts.damping;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            project(&mut trial);
            let rt = family.residuals(&trial, lambda)?;
            if norm2(&rt) < (1.0 - 1e-4 * t) * f0 {
                accepted = Some((trial, rt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
            }
            None => break,
        }
    }
    Ok(Run {
        max_abs: max_abs(&r),
        points: x,
        residuals: r,
    })
}

fn start_point(n: usize, index: usize, seed: u64) -> Result<Vec<f64>> {
    Ok(match index {
        0 => cos2_solution(n)?.points().to_vec(),
        1 => (1..=n).map(|j| j as f64 / (n + 1) as f64).collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            x.sort_by(f64::total_cmp);
            x
        }
    })
}

/// Solves `⟨f_i, σ⟩ = λ ∫₀¹ f_i` for `σ` with `n = fs.len()` switches.
///
/// Every start runs; the outcome keeps the smallest residual, ties going to
/// the lowest start index, so results do not depend on `opts.threads`.
pub fn generic_solve(fs: &[IntegrableFunction], lambda: f64, opts: &SolveOptions) -> Result<SolveOutcome> {
    opts.validate()?;
    if !(lambda > -1.0 && lambda < 1.0) {
        return Err(Error::Domain {
            what: "lambda",
            value: lambda,
            expected: "(-1, 1)",
        });
    }
    if fs.is_empty() {
        return Err(Error::Precondition("at least one function is required".into()));
    }
    let n = fs.len();
    let family = Family::new(fs)?;

    let run_range = |lo: usize, hi: usize| -> Result<Vec<Run>> {
        (lo..hi)
            .map(|i| newton(&family, lambda, start_point(n, i, opts.seed)?, opts))
            .collect()
    };
    let threads = opts.threads.min(opts.n_starts);
    let runs: Vec<Run> = if threads == 1 {
        run_range(0, opts.n_starts)?
    } else {
        let chunk = opts.n_starts.div_ceil(threads);
        let parts: Vec<Result<Vec<Run>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let lo = (t * chunk).min(opts.n_starts);
                    let hi = ((t + 1) * chunk).min(opts.n_starts);
                    let run_range = &run_range;
                    scope.spawn(move || run_range(lo, hi))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("solver thread panicked".into()))))
                .collect()
        });
        let mut runs = Vec::with_capacity(opts.n_starts);
        for part in parts {
            runs.extend(part?);
        }
        runs
    };

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.max_abs.total_cmp(&b.max_abs).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one start");

    let mut basins: Vec<&[f64]> = Vec::new();
    for run in runs.iter().filter(|r| r.max_abs <= opts.tol) {
        let seen = basins.iter().any(|b| {
            b.iter().zip(&run.points).all(|(p, q)| (p - q).abs() <= BASIN_TOL)
        });
        if !seen {
            basins.push(&run.points);
        }
    }

    let converged = best.max_abs <= opts.tol;
    let report = ResidualReport::new(best.residuals.clone(), f64::NAN, lambda, SystemKind::GenericPairing);
    Ok(SolveOutcome {
        status: if converged {
            SolveStatus::Converged
        } else {
            SolveStatus::NoConvergence
        },
        switch: if converged {
            Some(SwitchFunction::new(best.points.clone(), Sign::Plus)?)
        } else {
            None
        },
        report,
        best_points: best.points.clone(),
        starts_tried: runs.len(),
        best_residual: best.max_abs,
        distinct_solutions: basins.len(),
    })
}

// Smallest y in [lo, 1] with h(y) >= target, for nondecreasing h.
fn bisect_increasing(h: impl Fn(f64) -> Result<f64>, target: f64, mut lo: f64) -> Result<f64> {
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Two switch points with `F_i(x_2) - F_i(x_1) = F_i(1)/k` for both
/// functions, so that `σ - λ` is orthogonal to both with `λ = 1 - 2/k`.
///
/// `f1` must have a strictly increasing integral.
pub fn two_switch_constructive(
    f1: &IntegrableFunction,
    f2: &IntegrableFunction,
    k: usize,
    tol: f64,
) -> Result<SwitchFunction> {
    if k < 2 {
        return Err(Error::Domain {
            what: "k",
            value: k as f64,
            expected: ">= 2",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
            expected: "(0, inf)",
        });
    }
    let total1 = f1.total(QUAD_TOL)?;
    let total2 = f2.total(QUAD_TOL)?;
    let big_f1 = |x: f64| -> Result<f64> { Ok(f1.integral_to(x, QUAD_TOL)? / total1) };
    let big_f2 = |x: f64| f2.integral_to(x, QUAD_TOL);

    const SAMPLES: usize = 1000;
    let mut prev = 0.0;
    for i in 1..=SAMPLES {
        let v = big_f1(i as f64 / SAMPLES as f64)?;
        if !(total1 > 0.0 && v > prev) {
            return Err(Error::Precondition(format!(
                "∫f1 is not strictly increasing near t = {}",
                i as f64 / SAMPLES as f64
            )));
        }
        prev = v;
    }

    let step = 1.0 / k as f64;
    let phi_end = |x: f64| -> Result<f64> { bisect_increasing(big_f1, big_f1(x)? + step, x) };
    let g = |x: f64| -> Result<f64> { Ok(big_f2(phi_end(x)?)? - big_f2(x)? - total2 * step) };

    let mut table = Vec::with_capacity(k);
    let mut a = 0.0;
    for j in 0..k {
        if j > 0 {
            a = bisect_increasing(big_f1, j as f64 * step, 0.0)?;
        }
        table.push((a, g(a)?));
    }

    let bracket = table.windows(2).find_map(|w| {
        let ((a0, g0), (a1, g1)) = (w[0], w[1]);
        if g0 == 0.0 {
            Some((a0, a0))
        } else if g0 * g1 <= 0.0 {
            Some((a0, a1))
        } else {
            None
        }
    });
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => return Err(Error::NoSignChange { table }),
    };
    let g_lo = g(lo)?;
    while hi - lo > 1e-15 && lo < hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            lo = mid;
            hi = mid;
        } else if (gm > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x1 = if g(lo)?.abs() <= g(hi)?.abs() { lo } else { hi };
    let x2 = phi_end(x1)?;

    for (f, total) in [(f1, total1), (f2, total2)] {
        let gap = f.integral_to(x2, QUAD_TOL)? - f.integral_to(x1, QUAD_TOL)? - total * step;
        if gap.abs() > tol {
            return Err(Error::Internal(format!(
                "two-switch equations off by {gap:e} for {}",
                f.label()
            )));
        }
    }
    SwitchFunction::new(vec![x1, x2], Sign::Plus)
}

/// `λ = (4k-8m+1)/(4k+1)` with `f_1 = 1` and
/// `f_2 = ((4k+1)π/2) cos((4k+1)πt/2)`, a pair for which no two-switch `σ`
/// makes `σ - λ` orthogonal to both.
pub fn counterexample_family(k: usize, m: usize) -> Result<(f64, IntegrableFunction, IntegrableFunction)> {
    if k == 0 || m == 0 || m > k {
        return Err(Error::Precondition(format!(
            "counterexample needs 1 <= m <= k, got k = {k}, m = {m}"
        )));
    }
    let q = (4 * k + 1) as f64;
    let lambda = (4.0 * k as f64 - 8.0 * m as f64 + 1.0) / q;
    let w = q * PI / 2.0;
    let f2 = IntegrableFunction::with_antiderivative(
        format!("{q}π/2·cos({q}πt/2)"),
        move |t| w * (w * t).cos(),
        move |t| (w * t).sin(),
    )?;
    Ok((lambda, IntegrableFunction::monomial(0), f2))
}
