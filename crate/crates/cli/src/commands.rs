//! Command implementations. Each returns an [`Output`] or a [`CliError`].

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use switchfn::explicit::{even_poly_switch, poly_switch, sine_switch};
use switchfn::pade::{
    a_matrix, build_block_system, build_even_system, det_a_lemma, det_b_formula, det_k_formula,
    det_numeric,
};
use switchfn::solver::{generic_solve, two_switch_constructive, SolveOptions, SolveStatus};
use switchfn::switch::lambda_from_theta;
use switchfn::{
    pair_exact, residuals_alternating, residuals_odd, IntegrableFunction, Sign, SwitchFunction,
};

use crate::args::{self, Cli, Command, DetKind};
use crate::funcspec::load_functions;
use crate::output::{join, sig12, Output, Table};
use crate::psi::psi_scan;

pub const MAX_N: usize = 64;
/// `verify` accepts recomputed residuals within this of the recorded ones.
pub const VERIFY_TOL: f64 = 1e-12;
/// Certification bound for the constant solutions at `λ = ±1`.
pub const CONSTANT_TOL: f64 = 1e-12;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or inputs; exit code 2.
    Usage(String),
    /// Anything else; exit code 1.
    Failed(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failed(e)
    }
}

impl From<switchfn::Error> for CliError {
    fn from(e: switchfn::Error) -> Self {
        CliError::Failed(e.into())
    }
}

type CmdResult = std::result::Result<Output, CliError>;

fn usage<T>(msg: impl Into<String>) -> std::result::Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

pub fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Poly(a) => closed_form(ClosedKind::Poly, a),
        Command::Evenpoly(a) => closed_form(ClosedKind::EvenPoly, a),
        Command::Sine(a) => closed_form(ClosedKind::Sine, a),
        Command::Generic(a) => generic(a),
        Command::Twoswitch(a) => twoswitch(a),
        Command::PsiScan(a) => psi(a),
        Command::Det(a) => det(a),
        Command::Verify(a) => verify(&a.input),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ClosedKind {
    Poly,
    EvenPoly,
    Sine,
}

impl ClosedKind {
    fn name(self) -> &'static str {
        match self {
            ClosedKind::Poly => "poly",
            ClosedKind::EvenPoly => "evenpoly",
            ClosedKind::Sine => "sine",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        match name {
            "poly" => Some(ClosedKind::Poly),
            "evenpoly" => Some(ClosedKind::EvenPoly),
            "sine" => Some(ClosedKind::Sine),
            _ => None,
        }
    }

    fn family(self, n: usize) -> Vec<IntegrableFunction> {
        let n = n as u32;
        match self {
            ClosedKind::Poly => (0..n).map(IntegrableFunction::monomial).collect(),
            ClosedKind::EvenPoly => (0..n).map(|k| IntegrableFunction::monomial(2 * k)).collect(),
            ClosedKind::Sine => (1..=n).map(IntegrableFunction::half_sine).collect(),
        }
    }
}

/// `⟨f_i, σ⟩ - λ ∫ f_i` for each function.
pub fn pairing_residuals(fs: &[IntegrableFunction], s: &SwitchFunction, lambda: f64) -> anyhow::Result<Vec<f64>> {
    fs.iter()
        .map(|f| {
            let total = f
                .antiderivative(1.0)
                .ok_or_else(|| anyhow::anyhow!("{} has no antiderivative", f.label()))?;
            Ok(pair_exact(s, f)? - lambda * total)
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, r| a.max(r.abs()))
}

fn check_lambda(lambda: f64) -> std::result::Result<(), CliError> {
    if lambda.is_finite() && lambda.abs() <= 1.0 {
        Ok(())
    } else {
        usage(format!("--lambda must lie in [-1, 1], got {lambda}"))
    }
}

fn resolve_lambda(kind: ClosedKind, a: &args::ClosedForm, warnings: &mut Vec<String>) -> std::result::Result<f64, CliError> {
    let lambda = match (a.lambda, a.theta) {
        (Some(l), theta) => {
            if theta.is_some() {
                warnings.push("both --lambda and --theta given; using --lambda".into());
            }
            l
        }
        (None, Some(theta)) => match kind {
            ClosedKind::Sine => 1.0 - 2.0 * theta,
            _ => lambda_from_theta(theta, a.n),
        },
        (None, None) => return usage("one of --lambda or --theta is required"),
    };
    check_lambda(lambda)?;
    Ok(lambda)
}

fn points_table(points: &[f64], residuals: &[f64]) -> Table {
    let mut t = Table::new(&["index", "point", "residual"]);
    for i in 0..points.len().max(residuals.len()) {
        t.push(vec![
            (i + 1).to_string(),
            points.get(i).map_or(String::new(), |&v| sig12(v)),
            residuals.get(i).map_or(String::new(), |&v| sig12(v)),
        ]);
    }
    t
}

fn constant_output(kind: ClosedKind, n: usize, lambda: f64, mut warnings: Vec<String>) -> CmdResult {
    let sign = if lambda > 0.0 { Sign::Plus } else { Sign::Minus };
    warnings.push(format!(
        "|lambda| = 1: the solution is the constant switch function {sign}"
    ));
    let s = SwitchFunction::constant(sign);
    let residuals = pairing_residuals(&kind.family(n), &s, lambda)?;
    let max = max_abs(&residuals);
    let mut json = json!({
        "command": kind.name(),
        "n": n,
        "lambda": lambda,
        "initial_sign": sign.value(),
        "points": [],
        "residuals": residuals,
        "max_abs": max,
        "system": "pairing",
    });
    if kind != ClosedKind::Sine {
        json["theta"] = json!((1.0 + Sign::alternating(n + 1).value() * lambda) / 2.0);
    }
    Ok(Output {
        summary: vec![
            ("command".into(), kind.name().into()),
            ("n".into(), n.to_string()),
            ("lambda".into(), sig12(lambda)),
            ("initial_sign".into(), sign.to_string()),
            ("points".into(), "[]".into()),
            ("max_abs".into(), sig12(max)),
        ],
        table: points_table(&[], &residuals),
        json,
        ok: max <= CONSTANT_TOL,
        warnings,
        raw: None,
    })
}

fn closed_form(kind: ClosedKind, a: &args::ClosedForm) -> CmdResult {
    if !(1..=MAX_N).contains(&a.n) {
        return usage(format!("-n must be in 1..={MAX_N}, got {}", a.n));
    }
    let mut warnings = Vec::new();
    let lambda = resolve_lambda(kind, a, &mut warnings)?;
    if lambda.abs() == 1.0 {
        return constant_output(kind, a.n, lambda, warnings);
    }
    let n = a.n;
    let mut summary = vec![
        ("command".to_string(), kind.name().to_string()),
        ("n".to_string(), n.to_string()),
        ("lambda".to_string(), sig12(lambda)),
    ];
    let (json, points, residuals) = match kind {
        ClosedKind::Poly => {
            let s = poly_switch(n, lambda)?;
            let points = s.switch.points().to_vec();
            summary.push(("theta".into(), sig12(s.theta)));
            summary.push(("points".into(), join(&points)));
            summary.push(("first".into(), join(s.first.coeffs())));
            summary.push(("second".into(), join(s.second.coeffs())));
            let json = json!({
                "command": "poly",
                "n": n,
                "lambda": lambda,
                "theta": s.theta,
                "initial_sign": 1.0,
                "points": points,
                "polys": { "first": s.first.coeffs(), "second": s.second.coeffs() },
                "residuals": s.report.residuals,
                "max_abs": s.report.max_abs,
                "system": "alternating",
            });
            (json, points, s.report.residuals)
        }
        ClosedKind::EvenPoly => {
            let s = even_poly_switch(n, lambda)?;
            let points = s.switch.points().to_vec();
            summary.push(("theta".into(), sig12(s.theta)));
            summary.push(("points".into(), join(&points)));
            summary.push(("signed_roots".into(), join(&s.signed_roots)));
            summary.push(("jacobi".into(), join(s.jacobi.coeffs())));
            let json = json!({
                "command": "evenpoly",
                "n": n,
                "lambda": lambda,
                "theta": s.theta,
                "initial_sign": 1.0,
                "points": points,
                "signed_roots": s.signed_roots,
                "jacobi": s.jacobi.coeffs(),
                "residuals": s.report.residuals,
                "max_abs": s.report.max_abs,
                "system": "odd",
            });
            (json, points, s.report.residuals)
        }
        ClosedKind::Sine => {
            let s = sine_switch(n, lambda)?;
            let points = s.switch.points().to_vec();
            let residuals = pairing_residuals(&kind.family(n), &s.switch, lambda)?;
            summary.push(("points".into(), join(&points)));
            let json = json!({
                "command": "sine",
                "n": n,
                "lambda": lambda,
                "theta": s.polynomial.theta,
                "initial_sign": 1.0,
                "points": points,
                "residuals": residuals,
                "max_abs": max_abs(&residuals),
                "system": "pairing",
            });
            (json, points, residuals)
        }
    };
    summary.push(("residuals".into(), join(&residuals)));
    summary.push(("max_abs".into(), sig12(max_abs(&residuals))));
    Ok(Output {
        json,
        summary,
        table: points_table(&points, &residuals),
        ok: true,
        warnings,
        raw: None,
    })
}

fn load(path: &Path) -> std::result::Result<Vec<IntegrableFunction>, CliError> {
    load_functions(path).map_err(|e| CliError::Usage(format!("{e:#}")))
}

fn generic(a: &args::Generic) -> CmdResult {
    check_lambda(a.lambda)?;
    let fs = load(&a.spec)?;
    let labels: Vec<&str> = fs.iter().map(|f| f.label()).collect();
    let n = fs.len();
    if a.lambda.abs() == 1.0 {
        let sign = if a.lambda > 0.0 { Sign::Plus } else { Sign::Minus };
        let s = SwitchFunction::constant(sign);
        let residuals = pairing_residuals(&fs, &s, a.lambda)?;
        let max = max_abs(&residuals);
        return Ok(Output {
            json: json!({
                "command": "generic",
                "spec": a.spec,
                "labels": labels,
                "n": n,
                "lambda": a.lambda,
                "status": "Converged",
                "initial_sign": sign.value(),
                "points": [],
                "residuals": residuals,
                "max_abs": max,
                "system": "pairing",
            }),
            summary: vec![
                ("command".into(), "generic".into()),
                ("status".into(), "Converged".into()),
                ("initial_sign".into(), sign.to_string()),
                ("max_abs".into(), sig12(max)),
            ],
            table: points_table(&[], &residuals),
            ok: max <= CONSTANT_TOL,
            warnings: vec![format!("|lambda| = 1: the solution is the constant switch function {sign}")],
            raw: None,
        });
    }
    let opts = SolveOptions {
        tol: a.tol,
        n_starts: a.starts,
        seed: a.seed,
        threads: a.threads,
        ..SolveOptions::default()
    };
    let out = generic_solve(&fs, a.lambda, &opts).map_err(|e| match e {
        switchfn::Error::Domain { .. } | switchfn::Error::Precondition(_) => CliError::Usage(e.to_string()),
        e => e.into(),
    })?;
    let converged = out.status == SolveStatus::Converged;
    let s = SwitchFunction::new(out.best_points.clone(), Sign::Plus)?;
    let residuals = pairing_residuals(&fs, &s, a.lambda)?;
    let status = if converged { "Converged" } else { "NoConvergence" };
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!(
            "no start converged to {:e}; best residual {:e}",
            a.tol, out.best_residual
        ));
    }
    Ok(Output {
        json: json!({
            "command": "generic",
            "spec": a.spec,
            "labels": labels,
            "n": n,
            "lambda": a.lambda,
            "status": status,
            "initial_sign": 1.0,
            "points": out.best_points,
            "residuals": residuals,
            "max_abs": max_abs(&residuals),
            "best_residual": out.best_residual,
            "starts_tried": out.starts_tried,
            "distinct_solutions": out.distinct_solutions,
            "system": "pairing",
        }),
        summary: vec![
            ("command".into(), "generic".into()),
            ("n".into(), n.to_string()),
            ("lambda".into(), sig12(a.lambda)),
            ("status".into(), status.into()),
            ("points".into(), join(&out.best_points)),
            ("best_residual".into(), sig12(out.best_residual)),
            ("starts_tried".into(), out.starts_tried.to_string()),
            ("distinct_solutions".into(), out.distinct_solutions.to_string()),
        ],
        table: points_table(&out.best_points, &residuals),
        ok: converged,
        warnings,
        raw: None,
    })
}

fn twoswitch(a: &args::TwoSwitch) -> CmdResult {
    if a.k < 2 {
        return usage(format!("--k must be at least 2, got {}", a.k));
    }
    let fs = load(&a.spec)?;
    let [f1, f2] = fs.as_slice() else {
        return usage(format!("twoswitch needs exactly 2 functions, got {}", fs.len()));
    };
    let s = two_switch_constructive(f1, f2, a.k, a.tol)?;
    let lambda = 1.0 - 2.0 / a.k as f64;
    let residuals = pairing_residuals(&fs, &s, lambda)?;
    let points = s.points().to_vec();
    Ok(Output {
        json: json!({
            "command": "twoswitch",
            "spec": a.spec,
            "k": a.k,
            "n": 2,
            "lambda": lambda,
            "initial_sign": 1.0,
            "points": points,
            "residuals": residuals,
            "max_abs": max_abs(&residuals),
            "system": "pairing",
        }),
        summary: vec![
            ("command".into(), "twoswitch".into()),
            ("k".into(), a.k.to_string()),
            ("lambda".into(), sig12(lambda)),
            ("points".into(), join(&points)),
            ("max_abs".into(), sig12(max_abs(&residuals))),
        ],
        table: points_table(&points, &residuals),
        ok: true,
        warnings: Vec::new(),
        raw: None,
    })
}

fn psi(a: &args::PsiScan) -> CmdResult {
    if let Some(l) = a.lambda {
        check_lambda(l)?;
    }
    let fs = load(&a.spec)?;
    if fs.len() != 2 {
        return usage(format!("psi-scan needs exactly 2 functions, got {}", fs.len()));
    }
    if a.grid < 2 {
        return usage(format!("--grid must be at least 2, got {}", a.grid));
    }
    let scan = psi_scan(&fs, a.grid, a.lambda)?;
    let covered = scan.target.map(|t| scan.covers(t));

    let mut table = Table::new(&["kind", "x1", "x2", "psi1", "psi2"]);
    for s in &scan.interior {
        table.push(vec!["grid".into(), sig12(s.x1), sig12(s.x2), sig12(s.psi.0), sig12(s.psi.1)]);
    }
    let mut boundary = serde_json::Map::new();
    for (edge, pts) in &scan.boundary {
        for s in pts {
            table.push(vec![edge.name().into(), sig12(s.x1), sig12(s.x2), sig12(s.psi.0), sig12(s.psi.1)]);
        }
        let rows: Vec<[f64; 4]> = pts.iter().map(|s| [s.x1, s.x2, s.psi.0, s.psi.1]).collect();
        boundary.insert(edge.name().into(), json!(rows));
    }
    for &(l, p1, p2) in &scan.lambda_line {
        table.push(vec!["lambda".into(), sig12(l), String::new(), sig12(p1), sig12(p2)]);
    }
    let interior: Vec<[f64; 4]> = scan.interior.iter().map(|s| [s.x1, s.x2, s.psi.0, s.psi.1]).collect();
    let line: Vec<[f64; 3]> = scan.lambda_line.iter().map(|&(l, a, b)| [l, a, b]).collect();

    let mut summary = vec![
        ("command".to_string(), "psi-scan".to_string()),
        ("grid".to_string(), a.grid.to_string()),
        ("samples".to_string(), scan.interior.len().to_string()),
    ];
    if let (Some((tx, ty)), Some(c)) = (scan.target, covered) {
        summary.push(("target".into(), format!("{}, {}", sig12(tx), sig12(ty))));
        summary.push(("target_covered".into(), c.to_string()));
    }
    Ok(Output {
        json: json!({
            "command": "psi-scan",
            "spec": a.spec,
            "grid": a.grid,
            "interior": interior,
            "boundary": boundary,
            "lambda_line": line,
            "target": scan.target.map(|(x, y)| [x, y]),
            "target_covered": covered,
        }),
        summary,
        table,
        ok: true,
        warnings: Vec::new(),
        raw: a.svg.then(|| scan.to_svg()),
    })
}

fn det(a: &args::Det) -> CmdResult {
    let need_theta = || a.theta.map_or_else(|| usage("--theta is required for K and B"), Ok);
    let (label, size, theta, formula, numeric) = match a.kind {
        DetKind::K => {
            let Some(n) = a.n.filter(|&n| n >= 2) else {
                return usage("det K needs -n >= 2");
            };
            let theta = need_theta()?;
            let k = build_block_system(n, theta)?.k_block().expect("block system");
            ("K", n, Some(theta), det_k_formula(n, theta), det_numeric(&k)?)
        }
        DetKind::B => {
            let Some(n) = a.n.filter(|&n| n >= 1) else {
                return usage("det B needs -n >= 1");
            };
            let theta = need_theta()?;
            let b = build_even_system(n, theta)?;
            ("B", n, Some(theta), det_b_formula(n, theta), det_numeric(&b.matrix)?)
        }
        DetKind::A => {
            let Some(m) = a.m.filter(|&m| m >= 1) else {
                return usage("det A needs -m >= 1");
            };
            ("A", m, None, det_a_lemma(m), det_numeric(&a_matrix(m))?)
        }
    };
    let rel_error = if formula == 0.0 {
        numeric.value.abs()
    } else {
        (numeric.value - formula).abs() / formula.abs()
    };
    let size_key = if a.kind == DetKind::A { "m" } else { "n" };
    let mut table = Table::new(&["kind", size_key, "theta", "formula", "numeric", "rel_error"]);
    table.push(vec![
        label.into(),
        size.to_string(),
        theta.map_or(String::new(), sig12),
        sig12(formula),
        sig12(numeric.value),
        sig12(rel_error),
    ]);
    let mut summary = vec![
        ("kind".to_string(), label.to_string()),
        (size_key.to_string(), size.to_string()),
    ];
    if let Some(t) = theta {
        summary.push(("theta".into(), sig12(t)));
    }
    summary.push(("formula".into(), sig12(formula)));
    summary.push(("numeric".into(), sig12(numeric.value)));
    summary.push(("rel_error".into(), sig12(rel_error)));
    let mut json = json!({
        "command": "det",
        "kind": label,
        "theta": theta,
        "formula": formula,
        "numeric": numeric.value,
        "rel_error": rel_error,
        "singular": numeric.singular,
    });
    json[size_key] = json!(size);
    Ok(Output {
        json,
        summary,
        table,
        ok: true,
        warnings: if numeric.singular {
            vec!["LU flagged the matrix as singular".into()]
        } else {
            Vec::new()
        },
        raw: None,
    })
}

fn field<'a>(v: &'a Value, key: &str) -> std::result::Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| CliError::Usage(format!("payload has no '{key}' field")))
}

fn as_f64(v: &Value, key: &str) -> std::result::Result<f64, CliError> {
    field(v, key)?
        .as_f64()
        .ok_or_else(|| CliError::Usage(format!("'{key}' must be a number")))
}

fn as_points(v: &Value) -> std::result::Result<Vec<f64>, CliError> {
    field(v, "points")?
        .as_array()
        .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
        .ok_or_else(|| CliError::Usage("'points' must be an array of numbers".into()))
}

/// Recomputes the residuals of a payload and compares `max_abs`.
pub fn verify(input: &Path) -> CmdResult {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Usage(format!("reading {}: {e}", input.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid JSON: {e}")))?;
    let command = field(&v, "command")?.as_str().unwrap_or_default().to_string();
    let system = field(&v, "system")?.as_str().unwrap_or_default().to_string();
    let recorded = as_f64(&v, "max_abs")?;
    let points = as_points(&v)?;
    let n = field(&v, "n")?
        .as_u64()
        .ok_or_else(|| CliError::Usage("'n' must be an integer".into()))? as usize;

    let recomputed = match system.as_str() {
        "alternating" => residuals_alternating(&points, as_f64(&v, "theta")?, n)?.max_abs,
        "odd" => residuals_odd(&points, as_f64(&v, "theta")?, n)?.max_abs,
        "pairing" => {
            let lambda = as_f64(&v, "lambda")?;
            let sign = if as_f64(&v, "initial_sign")? < 0.0 { Sign::Minus } else { Sign::Plus };
            let s = SwitchFunction::new(points.clone(), sign)?;
            let fs = match ClosedKind::parse(&command) {
                Some(kind) => kind.family(n),
                None => {
                    let spec = field(&v, "spec")?
                        .as_str()
                        .ok_or_else(|| CliError::Usage("'spec' must be a path".into()))?;
                    load(&PathBuf::from(spec))?
                }
            };
            max_abs(&pairing_residuals(&fs, &s, lambda)?)
        }
        other => return usage(format!("unknown residual system '{other}'")),
    };
    let difference = (recomputed - recorded).abs();
    let ok = difference <= VERIFY_TOL;
    Ok(Output {
        json: json!({
            "command": "verify",
            "source": command,
            "recorded_max_abs": recorded,
            "recomputed_max_abs": recomputed,
            "difference": difference,
            "ok": ok,
        }),
        summary: vec![
            ("source".into(), command.clone()),
            ("recorded_max_abs".into(), sig12(recorded)),
            ("recomputed_max_abs".into(), sig12(recomputed)),
            ("difference".into(), sig12(difference)),
            ("ok".into(), ok.to_string()),
        ],
        table: {
            let mut t = Table::new(&["source", "recorded_max_abs", "recomputed_max_abs", "difference", "ok"]);
            t.push(vec![command, sig12(recorded), sig12(recomputed), sig12(difference), ok.to_string()]);
            t
        },
        ok,
        warnings: Vec::new(),
        raw: None,
    })
}
