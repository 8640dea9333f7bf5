//! Line-oriented state-description language.
//!
//! ```text
//! # comment
//! dims 2 2
//! ket k = (0.7071+0i)|0,0> + (0.7071+0i)|1,1>
//! rho R = proj(k)
//! rho M = mix 0.5 kron(a, b) 0.5 classical_corr
//! rho T = tripartite(0.5, 0.5).AB
//! analyze R
//! teleport R with 0.6 0.8
//! compare (0.6+0i) (0+0.8i)
//! ```
//!
//! Ket coefficients are relative amplitudes; kets are normalized on use.
//! Rho names are evaluated where they are referenced, so a single-index ket
//! takes the dimension of the slot it is used in (`A` or `B` inside `kron`,
//! the whole space at top level).

use std::collections::HashMap;
use std::fmt;

use densig_core::{Complex64, PairSelector};
use thiserror::Error;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{span}: syntax error: {message}")]
    Parse { span: Span, message: String },
    #[error("{span}: name error: {message}")]
    Name { span: Span, message: String },
    #[error("{span}: dimension error: {message}")]
    Dims { span: Span, message: String },
}

impl DslError {
    pub fn span(&self) -> Span {
        match self {
            DslError::Parse { span, .. }
            | DslError::Name { span, .. }
            | DslError::Dims { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Name {
    pub ident: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KetTerm {
    pub coeff: Complex64,
    pub digits: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RhoExpr {
    Ref(Name),
    Proj(Name),
    Kron(Box<RhoExpr>, Box<RhoExpr>),
    Mix(Vec<(f64, RhoExpr)>),
    Matrix {
        rows: Vec<Vec<Complex64>>,
        span: Span,
    },
    ClassicalCorr(Span),
    Bell(Span),
    Tripartite {
        weights: Vec<f64>,
        pair: PairSelector,
        span: Span,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    Dims {
        n: usize,
        m: usize,
    },
    Ket {
        name: Name,
        terms: Vec<KetTerm>,
    },
    Rho {
        name: Name,
        expr: RhoExpr,
    },
    Analyze {
        target: Name,
    },
    Teleport {
        target: Name,
        c1: Complex64,
        c2: Complex64,
    },
    Compare {
        c1: Complex64,
        c2: Complex64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub span: Span,
}

impl Statement {
    pub fn is_action(&self) -> bool {
        matches!(
            self.kind,
            StatementKind::Analyze { .. }
                | StatementKind::Teleport { .. }
                | StatementKind::Compare { .. }
        )
    }
}

/// A parsed and validated program.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct StateProgram {
    pub statements: Vec<Statement>,
}

impl StateProgram {
    pub fn actions(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter().filter(|s| s.is_action())
    }
}

const KEYWORDS: &[&str] = &[
    "dims",
    "ket",
    "rho",
    "analyze",
    "teleport",
    "with",
    "compare",
    "proj",
    "kron",
    "mix",
    "matrix",
    "classical_corr",
    "bell",
    "tripartite",
];

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let span = Span {
            line: line_no,
            col: i + 1,
        };
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                span,
            });
            continue;
        }
        if ch.is_ascii_digit()
            || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()))
        {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when followed by digits, so `0i` stays number + `i`
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
            out.push(Token {
                tok: Tok::Number(chars[start..i].iter().collect()),
                span,
            });
            continue;
        }
        if "=+-|,<>()[];.".contains(ch) {
            out.push(Token {
                tok: Tok::Sym(ch),
                span,
            });
            i += 1;
            continue;
        }
        return Err(DslError::Parse {
            span,
            message: format!("unexpected character {ch:?}"),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parser

struct LineParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line_no: usize,
    line_len: usize,
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// Span for an error at the current position; at end of line this is the
    /// last token so the location stays inside a token.
    fn here(&self) -> Span {
        match self.peek().or_else(|| self.tokens.last()) {
            Some(t) => t.span,
            None => Span {
                line: self.line_no,
                col: self.line_len.max(1),
            },
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Parse {
            span: self.here(),
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(s), ..
            }) => format!("'{s}'"),
            Some(Token {
                tok: Tok::Number(s),
                ..
            }) => format!("number {s}"),
            Some(Token {
                tok: Tok::Sym(c), ..
            }) => format!("'{c}'"),
            None => "end of line".to_string(),
        }
    }

    fn at_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(s), .. }) if s == kw)
    }

    fn expect_sym(&mut self, c: char) -> Result<Span, DslError> {
        if self.at_sym(c) {
            Ok(self.next().expect("peeked").span)
        } else {
            self.error(format!("expected '{c}', found {}", self.describe()))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Span, DslError> {
        if self.at_keyword(kw) {
            Ok(self.next().expect("peeked").span)
        } else {
            self.error(format!("expected '{kw}', found {}", self.describe()))
        }
    }

    fn expect_end(&self) -> Result<(), DslError> {
        if self.peek().is_some() {
            self.error(format!("unexpected {} after statement", self.describe()))
        } else {
            Ok(())
        }
    }

    fn name(&mut self) -> Result<Name, DslError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(s),
                span,
            }) => {
                if KEYWORDS.contains(&s.as_str()) {
                    return self.error(format!("'{s}' is a keyword and cannot be used as a name"));
                }
                self.pos += 1;
                Ok(Name {
                    ident: s.clone(),
                    span: *span,
                })
            }
            _ => self.error(format!("expected a name, found {}", self.describe())),
        }
    }

    fn integer(&mut self) -> Result<usize, DslError> {
        match self.peek() {
            Some(Token {
                tok: Tok::Number(s),
                ..
            }) => match s.parse::<usize>() {
                Ok(v) => {
                    self.pos += 1;
                    Ok(v)
                }
                Err(_) => self.error(format!("expected a non-negative integer, found {s}")),
            },
            _ => self.error(format!("expected an integer, found {}", self.describe())),
        }
    }

    /// Optionally signed real literal.
    fn float(&mut self) -> Result<f64, DslError> {
        let mut sign = 1.0;
        if self.at_sym('-') || self.at_sym('+') {
            if self.at_sym('-') {
                sign = -1.0;
            }
            self.pos += 1;
        }
        match self.peek() {
            Some(Token {
                tok: Tok::Number(s),
                ..
            }) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => {
                    self.pos += 1;
                    Ok(sign * v)
                }
                _ => self.error(format!("invalid number {s}")),
            },
            _ => self.error(format!("expected a number, found {}", self.describe())),
        }
    }

    /// `(re ± im i)` or a bare real.
    fn complex(&mut self) -> Result<Complex64, DslError> {
        if !self.at_sym('(') {
            return Ok(Complex64::new(self.float()?, 0.0));
        }
        self.pos += 1;
        let re = self.float()?;
        let sign = if self.at_sym('+') {
            1.0
        } else if self.at_sym('-') {
            -1.0
        } else {
            return self.error(format!(
                "expected '+' or '-' in complex literal, found {}",
                self.describe()
            ));
        };
        self.pos += 1;
        let im = match self.peek() {
            Some(Token {
                tok: Tok::Number(s),
                ..
            }) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => {
                    self.pos += 1;
                    v
                }
                _ => return self.error(format!("invalid number {s}")),
            },
            _ => {
                return self.error(format!(
                    "expected imaginary part, found {}",
                    self.describe()
                ))
            }
        };
        self.expect_keyword("i").or_else(|_| {
            self.error(format!(
                "expected 'i' after imaginary part, found {}",
                self.describe()
            ))
        })?;
        self.expect_sym(')')?;
        Ok(Complex64::new(re, sign * im))
    }

    fn ket_term(&mut self) -> Result<KetTerm, DslError> {
        let coeff = if self.at_sym('|') {
            Complex64::new(1.0, 0.0)
        } else {
            self.complex()?
        };
        self.expect_sym('|')?;
        let mut digits = vec![self.integer()?];
        while self.at_sym(',') {
            self.pos += 1;
            digits.push(self.integer()?);
        }
        self.expect_sym('>')?;
        Ok(KetTerm { coeff, digits })
    }

    fn rexpr(&mut self) -> Result<RhoExpr, DslError> {
        let span = self.here();
        match self.peek() {
            Some(Token {
                tok: Tok::Ident(s), ..
            }) => match s.as_str() {
                "proj" => {
                    self.pos += 1;
                    self.expect_sym('(')?;
                    let name = self.name()?;
                    self.expect_sym(')')?;
                    Ok(RhoExpr::Proj(name))
                }
                "kron" => {
                    self.pos += 1;
                    self.expect_sym('(')?;
                    let a = self.rexpr()?;
                    self.expect_sym(',')?;
                    let b = self.rexpr()?;
                    self.expect_sym(')')?;
                    Ok(RhoExpr::Kron(Box::new(a), Box::new(b)))
                }
                "mix" => {
                    self.pos += 1;
                    let mut terms = Vec::new();
                    loop {
                        let w = self.float()?;
                        let e = self.rexpr()?;
                        terms.push((w, e));
                        let more = matches!(
                            self.peek(),
                            Some(Token {
                                tok: Tok::Number(_),
                                ..
                            })
                        ) || self.at_sym('-')
                            || self.at_sym('+');
                        if !more {
                            break;
                        }
                    }
                    Ok(RhoExpr::Mix(terms))
                }
                "matrix" => {
                    self.pos += 1;
                    self.expect_sym('[')?;
                    let mut rows = vec![self.matrix_row()?];
                    while self.at_sym(';') {
                        self.pos += 1;
                        rows.push(self.matrix_row()?);
                    }
                    self.expect_sym(']')?;
                    if rows.iter().any(|r| r.len() != rows.len()) {
                        return Err(DslError::Dims {
                            span,
                            message: format!(
                                "matrix literal with {} rows must have {} entries per row",
                                rows.len(),
                                rows.len()
                            ),
                        });
                    }
                    Ok(RhoExpr::Matrix { rows, span })
                }
                "classical_corr" => {
                    self.pos += 1;
                    Ok(RhoExpr::ClassicalCorr(span))
                }
                "bell" => {
                    self.pos += 1;
                    Ok(RhoExpr::Bell(span))
                }
                "tripartite" => {
                    self.pos += 1;
                    self.expect_sym('(')?;
                    let mut weights = vec![self.float()?];
                    while self.at_sym(',') {
                        self.pos += 1;
                        weights.push(self.float()?);
                    }
                    self.expect_sym(')')?;
                    self.expect_sym('.')?;
                    let pair = match self.peek() {
                        Some(Token {
                            tok: Tok::Ident(p), ..
                        }) => match p.as_str() {
                            "AB" => PairSelector::AB,
                            "AC" => PairSelector::AC,
                            "BC" => PairSelector::BC,
                            _ => return self.error(format!("expected AB, AC or BC, found '{p}'")),
                        },
                        _ => {
                            return self
                                .error(format!("expected AB, AC or BC, found {}", self.describe()))
                        }
                    };
                    self.pos += 1;
                    Ok(RhoExpr::Tripartite {
                        weights,
                        pair,
                        span,
                    })
                }
                _ => Ok(RhoExpr::Ref(self.name()?)),
            },
            _ => self.error(format!(
                "expected a state expression, found {}",
                self.describe()
            )),
        }
    }

    fn matrix_row(&mut self) -> Result<Vec<Complex64>, DslError> {
        let mut row = vec![self.complex()?];
        while self.at_sym(',') {
            self.pos += 1;
            row.push(self.complex()?);
        }
        Ok(row)
    }

    fn statement(&mut self) -> Result<Statement, DslError> {
        let head = self.peek().expect("non-empty line");
        let span = head.span;
        let keyword = match &head.tok {
            Tok::Ident(s) => s.as_str(),
            _ => {
                return self.error(format!(
                    "expected a statement keyword, found {}",
                    self.describe()
                ))
            }
        };
        let kind = match keyword {
            "dims" => {
                self.pos += 1;
                let n = self.integer()?;
                let m = self.integer()?;
                if n == 0 || m == 0 {
                    return Err(DslError::Dims {
                        span,
                        message: "subsystem dimensions must be positive".into(),
                    });
                }
                StatementKind::Dims { n, m }
            }
            "ket" => {
                self.pos += 1;
                let name = self.name()?;
                self.expect_sym('=')?;
                let mut terms = vec![self.ket_term()?];
                while self.at_sym('+') {
                    self.pos += 1;
                    terms.push(self.ket_term()?);
                }
                let arity = terms[0].digits.len();
                if terms.iter().any(|t| t.digits.len() != arity) {
                    return Err(DslError::Dims {
                        span: name.span,
                        message: format!(
                            "ket '{}' mixes basis labels of different lengths",
                            name.ident
                        ),
                    });
                }
                if arity > 2 {
                    return Err(DslError::Dims {
                        span: name.span,
                        message: format!("ket '{}' has {arity}-part labels; at most two subsystems are supported", name.ident),
                    });
                }
                StatementKind::Ket { name, terms }
            }
            "rho" => {
                self.pos += 1;
                let name = self.name()?;
                self.expect_sym('=')?;
                let expr = self.rexpr()?;
                StatementKind::Rho { name, expr }
            }
            "analyze" => {
                self.pos += 1;
                StatementKind::Analyze {
                    target: self.name()?,
                }
            }
            "teleport" => {
                self.pos += 1;
                let target = self.name()?;
                self.expect_keyword("with")?;
                let c1 = self.complex()?;
                let c2 = self.complex()?;
                StatementKind::Teleport { target, c1, c2 }
            }
            "compare" => {
                self.pos += 1;
                let c1 = self.complex()?;
                let c2 = self.complex()?;
                StatementKind::Compare { c1, c2 }
            }
            other => return self.error(format!("unknown statement '{other}'")),
        };
        self.expect_end()?;
        Ok(Statement { kind, span })
    }
}

// ---------------------------------------------------------------------------
// Validation

/// Slot a state expression is evaluated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Bipartite(usize, usize),
    Single(usize),
}

impl Shape {
    pub fn total(self) -> usize {
        match self {
            Shape::Bipartite(n, m) => n * m,
            Shape::Single(d) => d,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Bipartite(n, m) => write!(f, "{n}x{m} bipartite"),
            Shape::Single(d) => write!(f, "single {d}-level"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Ket,
    Rho,
}

/// Definitions visible at a point in the program.
#[derive(Default)]
pub(crate) struct Env<'p> {
    kets: HashMap<&'p str, &'p [KetTerm]>,
    rhos: HashMap<&'p str, &'p RhoExpr>,
}

impl<'p> Env<'p> {
    pub(crate) fn ket(&self, name: &str) -> Option<&'p [KetTerm]> {
        self.kets.get(name).copied()
    }

    pub(crate) fn rho(&self, name: &str) -> Option<&'p RhoExpr> {
        self.rhos.get(name).copied()
    }

    pub(crate) fn define(&mut self, stmt: &'p Statement) {
        match &stmt.kind {
            StatementKind::Ket { name, terms } => {
                self.kets.insert(&name.ident, terms);
            }
            StatementKind::Rho { name, expr } => {
                self.rhos.insert(&name.ident, expr);
            }
            _ => {}
        }
    }
}

fn dims_error<T>(span: Span, message: impl Into<String>) -> Result<T, DslError> {
    Err(DslError::Dims {
        span,
        message: message.into(),
    })
}

fn expr_span(expr: &RhoExpr) -> Span {
    match expr {
        RhoExpr::Ref(n) | RhoExpr::Proj(n) => n.span,
        RhoExpr::Kron(a, _) => expr_span(a),
        RhoExpr::Mix(terms) => terms.first().map(|(_, e)| expr_span(e)).unwrap_or_default(),
        RhoExpr::Matrix { span, .. }
        | RhoExpr::ClassicalCorr(span)
        | RhoExpr::Bell(span)
        | RhoExpr::Tripartite { span, .. } => *span,
    }
}

/// Checks that `expr` can be evaluated in the slot `shape`.
pub(crate) fn check_shape(expr: &RhoExpr, shape: Shape, env: &Env<'_>) -> Result<(), DslError> {
    match expr {
        RhoExpr::Ref(name) => {
            let inner = env
                .rho(&name.ident)
                .expect("names resolved before shape checks");
            check_shape(inner, shape, env).map_err(|e| match e {
                DslError::Dims { message, .. } => DslError::Dims {
                    span: name.span,
                    message: format!("'{}' used as a {shape} state: {message}", name.ident),
                },
                other => other,
            })
        }
        RhoExpr::Proj(name) => {
            let terms = env
                .ket(&name.ident)
                .expect("names resolved before shape checks");
            let arity = terms[0].digits.len();
            let bounds: Vec<usize> = match (shape, arity) {
                (Shape::Bipartite(n, m), 2) => vec![n, m],
                (Shape::Bipartite(n, m), 1) => vec![n * m],
                (Shape::Single(d), 1) => vec![d],
                (Shape::Single(_), _) => {
                    return dims_error(
                        name.span,
                        format!(
                            "two-part ket '{}' used as a single-system state",
                            name.ident
                        ),
                    )
                }
                _ => {
                    return dims_error(
                        name.span,
                        format!("ket '{}' has unsupported label length", name.ident),
                    )
                }
            };
            for t in terms {
                for (d, b) in t.digits.iter().zip(&bounds) {
                    if d >= b {
                        return dims_error(
                            name.span,
                            format!("ket '{}' label {d} out of range for dimension {b} in a {shape} slot", name.ident),
                        );
                    }
                }
            }
            Ok(())
        }
        RhoExpr::Kron(a, b) => match shape {
            Shape::Bipartite(n, m) => {
                check_shape(a, Shape::Single(n), env)?;
                check_shape(b, Shape::Single(m), env)
            }
            Shape::Single(_) => dims_error(
                expr_span(a),
                "kron(...) builds a two-party state but a single-system state is required",
            ),
        },
        RhoExpr::Mix(terms) => terms
            .iter()
            .try_for_each(|(_, e)| check_shape(e, shape, env)),
        RhoExpr::Matrix { rows, span } => {
            if rows.len() != shape.total() {
                return dims_error(
                    *span,
                    format!(
                        "{0}x{0} matrix used where a {shape} state of dimension {1} is required",
                        rows.len(),
                        shape.total()
                    ),
                );
            }
            Ok(())
        }
        RhoExpr::ClassicalCorr(span) | RhoExpr::Bell(span) => {
            if shape != Shape::Bipartite(2, 2) {
                return dims_error(
                    *span,
                    format!("two-qubit state used where a {shape} state is required"),
                );
            }
            Ok(())
        }
        RhoExpr::Tripartite { weights, span, .. } => match shape {
            Shape::Bipartite(n, m) => {
                if weights.len() > n.min(m) {
                    return dims_error(
                        *span,
                        format!(
                            "{} Schmidt terms do not fit in dims {n} x {m}",
                            weights.len()
                        ),
                    );
                }
                Ok(())
            }
            Shape::Single(_) => dims_error(*span, "tripartite reduction is a two-party state"),
        },
    }
}

fn resolve(expr: &RhoExpr, kinds: &HashMap<String, Kind>) -> Result<(), DslError> {
    let lookup = |name: &Name, want: Kind| -> Result<(), DslError> {
        match kinds.get(&name.ident) {
            None => Err(DslError::Name {
                span: name.span,
                message: format!("'{}' is not defined", name.ident),
            }),
            Some(k) if *k != want => Err(DslError::Name {
                span: name.span,
                message: match want {
                    Kind::Ket => format!("'{}' is a rho, proj(...) needs a ket", name.ident),
                    Kind::Rho => format!(
                        "'{}' is a ket, wrap it in proj(...) to use it as a state",
                        name.ident
                    ),
                },
            }),
            Some(_) => Ok(()),
        }
    };
    match expr {
        RhoExpr::Ref(n) => lookup(n, Kind::Rho),
        RhoExpr::Proj(n) => lookup(n, Kind::Ket),
        RhoExpr::Kron(a, b) => {
            resolve(a, kinds)?;
            resolve(b, kinds)
        }
        RhoExpr::Mix(terms) => terms.iter().try_for_each(|(_, e)| resolve(e, kinds)),
        _ => Ok(()),
    }
}

/// Dimensions in effect before any `dims` statement.
pub const DEFAULT_DIMS: (usize, usize) = (2, 2);

fn validate(program: &StateProgram) -> Result<(), DslError> {
    let mut kinds: HashMap<String, Kind> = HashMap::new();
    let mut env = Env::default();
    let (mut n, mut m) = DEFAULT_DIMS;

    for stmt in &program.statements {
        match &stmt.kind {
            StatementKind::Dims { n: nn, m: mm } => (n, m) = (*nn, *mm),
            StatementKind::Ket { name, .. } | StatementKind::Rho { name, .. } => {
                if kinds.contains_key(&name.ident) {
                    return Err(DslError::Name {
                        span: name.span,
                        message: format!("'{}' is already defined", name.ident),
                    });
                }
                if let StatementKind::Rho { expr, .. } = &stmt.kind {
                    resolve(expr, &kinds)?;
                }
                let kind = if matches!(stmt.kind, StatementKind::Ket { .. }) {
                    Kind::Ket
                } else {
                    Kind::Rho
                };
                kinds.insert(name.ident.clone(), kind);
                env.define(stmt);
            }
            StatementKind::Analyze { target } => {
                resolve(&RhoExpr::Ref(target.clone()), &kinds)?;
                check_shape(&RhoExpr::Ref(target.clone()), Shape::Bipartite(n, m), &env)?;
            }
            StatementKind::Teleport { target, .. } => {
                resolve(&RhoExpr::Ref(target.clone()), &kinds)?;
                if (n, m) != (2, 2) {
                    return dims_error(
                        stmt.span,
                        format!("teleport needs dims 2 2, current dims are {n} {m}"),
                    );
                }
                check_shape(&RhoExpr::Ref(target.clone()), Shape::Bipartite(2, 2), &env)?;
            }
            StatementKind::Compare { .. } => {}
        }
    }
    Ok(())
}

/// Parses and validates a program.
pub fn parse_state_spec(text: &str) -> Result<StateProgram, DslError> {
    let mut statements = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = lex_line(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            tokens: &tokens,
            pos: 0,
            line_no,
            line_len: line.chars().count(),
        };
        statements.push(p.statement()?);
    }
    let program = StateProgram { statements };
    validate(&program)?;
    Ok(program)
}

// ---------------------------------------------------------------------------
// Canonical form

struct Real(f64);

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Debug output of f64 is the shortest string that parses back exactly.
        write!(f, "{:?}", self.0)
    }
}

struct Cplx(Complex64);

impl fmt::Display for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.0;
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        write!(f, "({}{sign}{}i)", Real(z.re), Real(z.im.abs()))
    }
}

impl fmt::Display for RhoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoExpr::Ref(n) => write!(f, "{}", n.ident),
            RhoExpr::Proj(n) => write!(f, "proj({})", n.ident),
            RhoExpr::Kron(a, b) => write!(f, "kron({a}, {b})"),
            RhoExpr::Mix(terms) => {
                write!(f, "mix")?;
                for (w, e) in terms {
                    write!(f, " {} {e}", Real(*w))?;
                }
                Ok(())
            }
            RhoExpr::Matrix { rows, .. } => {
                write!(f, "matrix [")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    for (j, z) in row.iter().enumerate() {
                        if j > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", Cplx(*z))?;
                    }
                }
                write!(f, "]")
            }
            RhoExpr::ClassicalCorr(_) => write!(f, "classical_corr"),
            RhoExpr::Bell(_) => write!(f, "bell"),
            RhoExpr::Tripartite { weights, pair, .. } => {
                write!(f, "tripartite(")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", Real(*w))?;
                }
                write!(f, ").{pair:?}")
            }
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StatementKind::Dims { n, m } => write!(f, "dims {n} {m}"),
            StatementKind::Ket { name, terms } => {
                write!(f, "ket {} =", name.ident)?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " +")?;
                    }
                    let labels: Vec<String> = t.digits.iter().map(|d| d.to_string()).collect();
                    write!(f, " {}|{}>", Cplx(t.coeff), labels.join(","))?;
                }
                Ok(())
            }
            StatementKind::Rho { name, expr } => write!(f, "rho {} = {expr}", name.ident),
            StatementKind::Analyze { target } => write!(f, "analyze {}", target.ident),
            StatementKind::Teleport { target, c1, c2 } => {
                write!(
                    f,
                    "teleport {} with {} {}",
                    target.ident,
                    Cplx(*c1),
                    Cplx(*c2)
                )
            }
            StatementKind::Compare { c1, c2 } => write!(f, "compare {} {}", Cplx(*c1), Cplx(*c2)),
        }
    }
}

impl fmt::Display for StateProgram {
    /// Canonical source text; parses back to an equivalent program.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
