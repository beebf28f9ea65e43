//! Function-spec files.
//!
//! A spec is a TOML table whose keys name functions and whose values are
//! descriptors built from a fixed vocabulary, each term with a closed-form
//! antiderivative:
//!
//! ```toml
//! f1 = "const(1)"
//! f2 = "cos(5*pi/2, 5/2)"        # (5π/2)·cos(5πt/2)
//! f3 = "poly(1, 0, -3) + exp(2)" # 1 - 3t² + e^{2t}
//! ```
//!
//! Arguments are arithmetic expressions over numbers and `pi`.

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use switchfn::IntegrableFunction;

pub const VOCABULARY: &str =
    "const(c), poly(c0, c1, ...), cos(a, b) = a·cos(bπt), sin(a, b) = a·sin(bπt), exp(a) = e^(a·t)";

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Const(f64),
    Poly(Vec<f64>),
    Cos { a: f64, b: f64 },
    Sin { a: f64, b: f64 },
    Exp(f64),
}

impl Term {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Term::Const(c) => *c,
            Term::Poly(cs) => cs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Term::Cos { a, b } => a * (b * PI * t).cos(),
            Term::Sin { a, b } => a * (b * PI * t).sin(),
            Term::Exp(a) => (a * t).exp(),
        }
    }

    /// `∫₀ᵗ` of the term.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            Term::Const(c) => c * t,
            Term::Poly(cs) => cs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + c / (i + 1) as f64)
                * t,
            Term::Cos { a, b } if *b == 0.0 => a * t,
            Term::Cos { a, b } => a * (b * PI * t).sin() / (b * PI),
            Term::Sin { b, .. } if *b == 0.0 => 0.0,
            Term::Sin { a, b } => a * (1.0 - (b * PI * t).cos()) / (b * PI),
            Term::Exp(a) if *a == 0.0 => t,
            Term::Exp(a) => (a * t).exp_m1() / a,
        }
    }
}

/// A named sum of terms.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub label: String,
    pub descriptor: String,
    pub terms: Vec<(f64, Term)>,
}

impl FunctionSpec {
    pub fn to_integrable(&self) -> Result<IntegrableFunction> {
        let f_terms = self.terms.clone();
        let big_terms = self.terms.clone();
        IntegrableFunction::with_antiderivative(
            self.label.clone(),
            move |t| f_terms.iter().map(|(s, term)| s * term.eval(t)).sum(),
            move |t| big_terms.iter().map(|(s, term)| s * term.integral(t)).sum(),
        )
        .map_err(Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().with_context(|| format!("bad number '{text}'"))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            bail!("unexpected character '{c}'");
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            bail!("expected '{c}'")
        }
    }

    // sum := ['-'] call (('+' | '-') call)*
    fn sum(&mut self) -> Result<Vec<(f64, Term)>> {
        let mut sign = if self.eat('-') { -1.0 } else { 1.0 };
        let mut terms = vec![(sign, self.call()?)];
        loop {
            if self.eat('+') {
                sign = 1.0;
            } else if self.eat('-') {
                sign = -1.0;
            } else {
                break;
            }
            terms.push((sign, self.call()?));
        }
        if let Some(t) = self.peek() {
            bail!("trailing input at {t:?}");
        }
        Ok(terms)
    }

    fn call(&mut self) -> Result<Term> {
        let name = match self.next() {
            Some(Tok::Ident(name)) => name,
            other => bail!("expected a function name, found {other:?}; vocabulary: {VOCABULARY}"),
        };
        self.expect('(')?;
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        self.expect(')')?;
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                bail!("{name} takes {k} argument(s), got {}", args.len())
            }
        };
        Ok(match name.as_str() {
            "const" => {
                arity(1)?;
                Term::Const(args[0])
            }
            "poly" => Term::Poly(args),
            "cos" => {
                arity(2)?;
                Term::Cos { a: args[0], b: args[1] }
            }
            "sin" => {
                arity(2)?;
                Term::Sin { a: args[0], b: args[1] }
            }
            "exp" => {
                arity(1)?;
                Term::Exp(args[0])
            }
            other => bail!("unknown function '{other}'; vocabulary: {VOCABULARY}"),
        })
    }

    // expr := product (('+' | '-') product)*
    fn expr(&mut self) -> Result<f64> {
        let mut v = self.product()?;
        loop {
            if self.eat('+') {
                v += self.product()?;
            } else if self.eat('-') {
                v -= self.product()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn product(&mut self) -> Result<f64> {
        let mut v = self.atom()?;
        loop {
            if self.eat('*') {
                v *= self.atom()?;
            } else if self.eat('/') {
                v /= self.atom()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn atom(&mut self) -> Result<f64> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(v),
            Some(Tok::Ident(id)) if id == "pi" => Ok(PI),
            Some(Tok::Sym('-')) => Ok(-self.atom()?),
            Some(Tok::Sym('(')) => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            other => bail!("expected a number, found {other:?}"),
        }
    }
}

/// Parses one descriptor such as `"poly(1, 2) + cos(1, 0.5)"`.
pub fn parse_descriptor(label: &str, descriptor: &str) -> Result<FunctionSpec> {
    let toks = tokenize(descriptor).with_context(|| format!("in '{label}'"))?;
    let terms = Parser { toks, pos: 0 }
        .sum()
        .with_context(|| format!("in '{label}' = \"{descriptor}\""))?;
    Ok(FunctionSpec {
        label: label.to_string(),
        descriptor: descriptor.to_string(),
        terms,
    })
}

/// Parses a spec file body, keeping key order.
pub fn parse_spec(text: &str) -> Result<Vec<FunctionSpec>> {
    let table: toml::Table = text.parse().context("spec is not valid TOML")?;
    let specs = table
        .iter()
        .map(|(key, value)| {
            let descriptor = value
                .as_str()
                .ok_or_else(|| anyhow!("'{key}' must be a descriptor string; vocabulary: {VOCABULARY}"))?;
            parse_descriptor(key, descriptor)
        })
        .collect::<Result<Vec<_>>>()?;
    if specs.is_empty() {
        bail!("spec defines no functions");
    }
    Ok(specs)
}

pub fn load_spec(path: &Path) -> Result<Vec<FunctionSpec>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("in {}", path.display()))
}

pub fn load_functions(path: &Path) -> Result<Vec<IntegrableFunction>> {
    load_spec(path)?.iter().map(FunctionSpec::to_integrable).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_arguments() {
        let s = parse_descriptor("f", "cos(5*pi/2, 5/2)").unwrap();
        assert_eq!(s.terms, vec![(1.0, Term::Cos { a: 2.5 * PI, b: 2.5 })]);
        let s = parse_descriptor("f", "-poly(1, -2e-1, (3))").unwrap();
        assert_eq!(s.terms, vec![(-1.0, Term::Poly(vec![1.0, -0.2, 3.0]))]);
    }

    #[test]
    fn sums_and_signs() {
        let s = parse_descriptor("f", "const(1) - sin(2, 1) + exp(0)").unwrap();
        assert_eq!(s.terms.len(), 3);
        assert_eq!(s.terms[1], (-1.0, Term::Sin { a: 2.0, b: 1.0 }));
    }

    #[test]
    fn unknown_tag_lists_vocabulary() {
        let err = parse_descriptor("g", "tan(1)").unwrap_err();
        assert!(format!("{err:#}").contains("cos(a, b)"));
        assert!(parse_descriptor("g", "cos(1)").is_err());
        assert!(parse_descriptor("g", "cos(1, 2) 3").is_err());
    }

    #[test]
    fn antiderivatives_match_quadrature() {
        let descriptors = [
            "const(-2)",
            "poly(1, -3, 0.5)",
            "cos(2, 1.5)",
            "sin(1, 0.5)",
            "exp(-1.3)",
            "cos(1, 0) + sin(4, 0) + exp(0)",
        ];
        for d in descriptors {
            let f = parse_descriptor("f", d).unwrap().to_integrable().unwrap();
            for x in [0.0, 0.3, 1.0] {
                let q = switchfn::quadrature::integrate(|t| f.eval(t), 0.0, x, 1e-13).unwrap().value;
                assert!((f.antiderivative(x).unwrap() - q).abs() < 1e-12, "{d} at {x}");
            }
        }
    }

    #[test]
    fn spec_keeps_key_order() {
        let specs = parse_spec("zeta = \"const(1)\"\nalpha = \"poly(0, 1)\"\n").unwrap();
        let labels: Vec<_> = specs.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, ["zeta", "alpha"]);
        assert!(parse_spec("x = 3").is_err());
        assert!(parse_spec("").is_err());
    }
}
