//! Text format for describing networks (`.mzn` files).
//!
//! One statement per line, `#` starts a comment, keywords are
//! case-sensitive, and both LF and CRLF endings are accepted:
//!
//! ```text
//! # n = 2 chain with a symbolic scan parameter
//! input 1 0 0 0
//! chain n=2 psi=pi phi=PHI
//! ```
//!
//! Statements:
//!
//! ```text
//! input <re> <im> <re> <im>     field amplitudes, upper arm first
//! bs                            balanced beam splitter
//! phase <upper|lower> <expr>    phase element on one arm
//! mzi phi=<expr>                Mach-Zehnder block
//! chain n=<int> psi=<expr> phi=<expr>
//! fig1 zeta=<expr> phi=<expr>   coupled two-stage scheme
//! ```
//!
//! An expression is a decimal literal, a pi fraction (`pi`, `pi/4`,
//! `3*pi/4`, optionally signed), or an uppercase parameter name bound at
//! run time. The `input` line must come first and appear exactly once;
//! elements apply in source order (the first line acts on the field
//! first); a program may name at most eight distinct parameters.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use crate::networks::{cbw_chain, coupled_mzi_matrix, CbwChainSpec, CoupledMziSpec};
use crate::observables::{sample_from, CoincidenceSample};
use crate::xfer::{bs_matrix, phase_matrix, Arm, FieldPair, Matrix2};

/// Most parameters a single program may name.
pub const MAX_PARAMS: usize = 8;

/// Syntax or structure error with its source position (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Failure to resolve a program's parameters against a binding set.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BindError {
    #[error("parameter `{0}` is not bound")]
    Unbound(String),
    #[error("binding `{0}` does not name a program parameter")]
    UnknownBinding(String),
    #[error("binding `{name}` must be finite, got {value}")]
    NonFiniteValue { name: String, value: f64 },
}

/// Phase-valued expression: literal, pi fraction, or named parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(f64),
    /// `num * pi / den`, kept as integers so printing is lossless.
    PiRatio { num: i64, den: i64 },
    Param(String),
}

impl Expr {
    fn eval(&self, bindings: &BTreeMap<String, f64>) -> f64 {
        match self {
            Expr::Literal(v) => *v,
            Expr::PiRatio { num, den } => *num as f64 * PI / *den as f64,
            Expr::Param(name) => bindings[name],
        }
    }

    fn print(&self, out: &mut String) {
        match self {
            Expr::Literal(v) => write!(out, "{v}").unwrap(),
            Expr::PiRatio { num, den } => match (num, den) {
                (1, 1) => out.push_str("pi"),
                (-1, 1) => out.push_str("-pi"),
                (1, d) => write!(out, "pi/{d}").unwrap(),
                (-1, d) => write!(out, "-pi/{d}").unwrap(),
                (n, d) => write!(out, "{n}*pi/{d}").unwrap(),
            },
            Expr::Param(name) => out.push_str(name),
        }
    }

    fn visit_params<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        if let Expr::Param(name) = self {
            f(name);
        }
    }
}

/// One optical element statement.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    BeamSplitter,
    Phase { arm: Arm, theta: Expr },
    Mzi { phi: Expr },
    Chain { n: u32, psi: Expr, phi: Expr },
    CoupledMzi { zeta: Expr, phi: Expr },
}

impl Element {
    fn visit_params<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            Element::BeamSplitter => {}
            Element::Phase { theta, .. } => theta.visit_params(f),
            Element::Mzi { phi } => phi.visit_params(f),
            Element::Chain { psi, phi, .. } => {
                psi.visit_params(f);
                phi.visit_params(f);
            }
            Element::CoupledMzi { zeta, phi } => {
                zeta.visit_params(f);
                phi.visit_params(f);
            }
        }
    }
}

/// Parsed program: input field, element sequence, and the distinct
/// parameter names in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    input: FieldPair,
    elements: Vec<Element>,
    params: Vec<String>,
}

impl Program {
    pub fn input(&self) -> FieldPair {
        self.input
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    /// Resolve all parameters, producing a network ready to compose.
    /// Every parameter must be bound, every binding must name a
    /// parameter, and values must be finite.
    pub fn bind(&self, bindings: &BTreeMap<String, f64>) -> Result<Network, BindError> {
        for name in bindings.keys() {
            if !self.params.iter().any(|p| p == name) {
                return Err(BindError::UnknownBinding(name.clone()));
            }
        }
        for name in &self.params {
            match bindings.get(name) {
                None => return Err(BindError::Unbound(name.clone())),
                Some(v) if !v.is_finite() => {
                    return Err(BindError::NonFiniteValue {
                        name: name.clone(),
                        value: *v,
                    })
                }
                Some(_) => {}
            }
        }
        let elements = self
            .elements
            .iter()
            .map(|e| match e {
                Element::BeamSplitter => BoundElement::BeamSplitter,
                Element::Phase { arm, theta } => BoundElement::Phase {
                    arm: *arm,
                    theta: theta.eval(bindings),
                },
                Element::Mzi { phi } => BoundElement::Mzi {
                    phi: phi.eval(bindings),
                },
                Element::Chain { n, psi, phi } => BoundElement::Chain {
                    n: *n,
                    psi: psi.eval(bindings),
                    phi: phi.eval(bindings),
                },
                Element::CoupledMzi { zeta, phi } => BoundElement::CoupledMzi {
                    zeta: zeta.eval(bindings),
                    phi: phi.eval(bindings),
                },
            })
            .collect();
        Ok(Network {
            input: self.input,
            elements,
        })
    }
}

/// Canonical source text for a program; parsing it back yields an equal
/// [`Program`].
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    let i = program.input;
    writeln!(
        out,
        "input {} {} {} {}",
        i.upper.re, i.upper.im, i.lower.re, i.lower.im
    )
    .unwrap();
    for e in &program.elements {
        match e {
            Element::BeamSplitter => out.push_str("bs"),
            Element::Phase { arm, theta } => {
                let side = match arm {
                    Arm::Upper => "upper",
                    Arm::Lower => "lower",
                };
                write!(out, "phase {side} ").unwrap();
                theta.print(&mut out);
            }
            Element::Mzi { phi } => {
                out.push_str("mzi phi=");
                phi.print(&mut out);
            }
            Element::Chain { n, psi, phi } => {
                write!(out, "chain n={n} psi=").unwrap();
                psi.print(&mut out);
                out.push_str(" phi=");
                phi.print(&mut out);
            }
            Element::CoupledMzi { zeta, phi } => {
                out.push_str("fig1 zeta=");
                zeta.print(&mut out);
                out.push_str(" phi=");
                phi.print(&mut out);
            }
        }
        out.push('\n');
    }
    out
}

/// Fully bound element sequence with its input field.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    input: FieldPair,
    elements: Vec<BoundElement>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BoundElement {
    BeamSplitter,
    Phase { arm: Arm, theta: f64 },
    Mzi { phi: f64 },
    Chain { n: u32, psi: f64, phi: f64 },
    CoupledMzi { zeta: f64, phi: f64 },
}

impl BoundElement {
    fn matrix(&self) -> Matrix2 {
        match self {
            BoundElement::BeamSplitter => bs_matrix(),
            BoundElement::Phase { arm, theta } => {
                phase_matrix(*theta, *arm).expect("bound phases are finite")
            }
            BoundElement::Mzi { phi } => crate::networks::mzi_block(*phi),
            BoundElement::Chain { n, psi, phi } => {
                let spec = CbwChainSpec::new(*n, *phi, *psi).expect("n >= 1 checked at parse");
                cbw_chain(&spec)
            }
            BoundElement::CoupledMzi { zeta, phi } => {
                coupled_mzi_matrix(&CoupledMziSpec::new(*zeta, *phi))
            }
        }
    }
}

impl Network {
    pub fn input(&self) -> FieldPair {
        self.input
    }

    /// Total transfer matrix; elements apply in source order, so each
    /// one multiplies from the left.
    pub fn matrix(&self) -> Matrix2 {
        let mut total = Matrix2::identity();
        for e in &self.elements {
            total = e.matrix() * total;
        }
        total
    }

    /// Output field for the declared input.
    pub fn output(&self) -> FieldPair {
        self.matrix().apply(&self.input)
    }

    /// Coincidence sample at the declared input, tagged with the scanned
    /// parameter value.
    pub fn sample(&self, param: f64) -> CoincidenceSample {
        sample_from(param, &self.input, &self.matrix())
    }
}

struct LineParser<'a> {
    line_no: usize,
    tokens: Vec<(usize, &'a str)>,
    next: usize,
    end_column: usize,
}

impl<'a> LineParser<'a> {
    fn new(line_no: usize, line: &'a str) -> Self {
        let body = match line.find('#') {
            Some(idx) => &line[..idx],
            None => line,
        };
        let mut tokens = Vec::new();
        let mut column = 0usize;
        let mut start = None;
        for ch in body.chars().chain(std::iter::once(' ')) {
            column += 1;
            if ch.is_whitespace() {
                if let Some((col, begin)) = start.take() {
                    let end = byte_offset(body, column - 1);
                    tokens.push((col, &body[begin..end]));
                }
            } else if start.is_none() {
                start = Some((column, byte_offset(body, column - 1)));
            }
        }
        let end_column = body.chars().count() + 1;
        Self {
            line_no,
            tokens,
            next: 0,
            end_column,
        }
    }

    fn take(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        match self.tokens.get(self.next) {
            Some(&(col, tok)) => {
                self.next += 1;
                Ok((col, tok))
            }
            None => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.next) {
            Some(&(col, tok)) => Err(ParseError::new(
                self.line_no,
                col,
                format!("unexpected trailing `{tok}`"),
            )),
            None => Ok(()),
        }
    }

    fn err_at(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line_no, column, message)
    }

    fn err_here(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line_no, self.end_column, message)
    }
}

fn byte_offset(s: &str, chars: usize) -> usize {
    s.char_indices()
        .nth(chars)
        .map(|(i, _)| i)
        .unwrap_or(s.len())
}

fn is_param_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

fn parse_literal(tok: &str) -> Option<f64> {
    // Reject float syntax that is not a plain decimal (inf, nan, hex).
    if !tok
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
    {
        return None;
    }
    tok.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_pi_form(tok: &str) -> Option<(i64, i64)> {
    let (sign, rest) = match tok.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1, tok),
    };
    let (num_part, den) = match rest.split_once('/') {
        Some((head, den_str)) => (head, den_str.parse::<i64>().ok()?),
        None => (rest, 1),
    };
    if den <= 0 {
        return None;
    }
    let num = if num_part == "pi" {
        1
    } else {
        let head = num_part.strip_suffix("*pi")?;
        head.parse::<i64>().ok()?
    };
    Some((sign * num, den))
}

fn parse_expr(line: &LineParser, col: usize, tok: &str) -> Result<Expr, ParseError> {
    if is_param_name(tok) {
        return Ok(Expr::Param(tok.to_string()));
    }
    if tok.contains("pi") {
        return match parse_pi_form(tok) {
            Some((num, den)) => Ok(Expr::PiRatio { num, den }),
            None => Err(line.err_at(col, format!("malformed pi expression `{tok}`"))),
        };
    }
    match parse_literal(tok) {
        Some(v) => Ok(Expr::Literal(v)),
        None => Err(line.err_at(col, format!("malformed expression `{tok}`"))),
    }
}

fn parse_kv<'a>(
    line: &LineParser,
    col: usize,
    tok: &'a str,
    key: &str,
) -> Result<&'a str, ParseError> {
    match tok.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        _ => Err(line.err_at(col, format!("expected `{key}=<value>`, got `{tok}`"))),
    }
}

fn parse_number_token(line: &LineParser, col: usize, tok: &str) -> Result<f64, ParseError> {
    parse_literal(tok)
        .ok_or_else(|| line.err_at(col, format!("expected a decimal number, got `{tok}`")))
}

/// Parse `.mzn` source text.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let mut input: Option<FieldPair> = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut params: Vec<String> = Vec::new();

    for (idx, raw_line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let mut line = LineParser::new(line_no, raw_line.trim_end_matches('\r'));
        let (kw_col, keyword) = match line.take("a statement") {
            Ok(t) => t,
            Err(_) => continue,
        };

        let element = match keyword {
            "input" => {
                if input.is_some() {
                    return Err(line.err_at(kw_col, "duplicate input declaration"));
                }
                if !elements.is_empty() {
                    return Err(line.err_at(kw_col, "input must precede all elements"));
                }
                let mut vals = [0.0f64; 4];
                for v in &mut vals {
                    let (col, tok) = line.take("four numbers after `input`")?;
                    *v = parse_number_token(&line, col, tok)?;
                }
                line.finish()?;
                input = Some(FieldPair::new(
                    Complex64::new(vals[0], vals[1]),
                    Complex64::new(vals[2], vals[3]),
                ));
                continue;
            }
            "bs" => {
                line.finish()?;
                Element::BeamSplitter
            }
            "phase" => {
                let (col, tok) = line.take("`upper` or `lower`")?;
                let arm = match tok {
                    "upper" => Arm::Upper,
                    "lower" => Arm::Lower,
                    other => {
                        return Err(line.err_at(col, format!("unknown arm `{other}`")));
                    }
                };
                let (col, tok) = line.take("a phase expression")?;
                let theta = parse_expr(&line, col, tok)?;
                line.finish()?;
                Element::Phase { arm, theta }
            }
            "mzi" => {
                let (col, tok) = line.take("`phi=<expr>`")?;
                let phi = parse_expr(&line, col, parse_kv(&line, col, tok, "phi")?)?;
                line.finish()?;
                Element::Mzi { phi }
            }
            "chain" => {
                let (col, tok) = line.take("`n=<int>`")?;
                let n_str = parse_kv(&line, col, tok, "n")?;
                let n: u32 = n_str
                    .parse()
                    .map_err(|_| line.err_at(col, format!("malformed block count `{n_str}`")))?;
                if n < 1 {
                    return Err(line.err_at(col, "chain needs at least one block"));
                }
                let (col, tok) = line.take("`psi=<expr>`")?;
                let psi = parse_expr(&line, col, parse_kv(&line, col, tok, "psi")?)?;
                let (col, tok) = line.take("`phi=<expr>`")?;
                let phi = parse_expr(&line, col, parse_kv(&line, col, tok, "phi")?)?;
                line.finish()?;
                Element::Chain { n, psi, phi }
            }
            "fig1" => {
                let (col, tok) = line.take("`zeta=<expr>`")?;
                let zeta = parse_expr(&line, col, parse_kv(&line, col, tok, "zeta")?)?;
                let (col, tok) = line.take("`phi=<expr>`")?;
                let phi = parse_expr(&line, col, parse_kv(&line, col, tok, "phi")?)?;
                line.finish()?;
                Element::CoupledMzi { zeta, phi }
            }
            other => {
                return Err(line.err_at(kw_col, format!("unknown keyword `{other}`")));
            }
        };

        let mut overflow = false;
        element.visit_params(&mut |name| {
            if !params.iter().any(|p| p == name) {
                if params.len() == MAX_PARAMS {
                    overflow = true;
                } else {
                    params.push(name.to_string());
                }
            }
        });
        if overflow {
            return Err(line.err_at(
                kw_col,
                format!("too many parameters (limit {MAX_PARAMS})"),
            ));
        }
        elements.push(element);
    }

    match input {
        Some(input) => Ok(Program {
            input,
            elements,
            params,
        }),
        None => Err(ParseError::new(1, 1, "missing input declaration")),
    }
}

/// Parse a standalone numeric expression (literal or pi fraction), the
/// form command-line values take. Parameter names are not allowed here.
pub fn parse_number(text: &str) -> Result<f64, ParseError> {
    let tok = text.trim();
    if tok.is_empty() {
        return Err(ParseError::new(1, 1, "empty value".to_string()));
    }
    if tok.contains("pi") {
        return match parse_pi_form(tok) {
            Some((num, den)) => Ok(num as f64 * PI / den as f64),
            None => Err(ParseError::new(
                1,
                1,
                format!("malformed pi expression `{tok}`"),
            )),
        };
    }
    parse_literal(tok).ok_or_else(|| ParseError::new(1, 1, format!("malformed number `{tok}`")))
}
