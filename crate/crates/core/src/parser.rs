//! Polynomial expressions in two named variables.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := '-' factor | power
//! power    := atom ('^' uint)?
//! atom     := rational | ident | '(' expr ')'
//! rational := uint ('/' uint)?
//! ```
//!
//! `^` binds tighter than unary minus, so `-u^2` is `-(u^2)`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::scalar::{rat_text, Rat, Scalar};
use crate::series::{Axis, Series2};

pub const DEFAULT_MAX_DEPTH: usize = 64;

/// How far past the requested order an expression is expanded to detect dropped terms.
const DROP_CHECK_MARGIN: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier '{name}' at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("negative exponent at {pos}")]
    NegativeExponent { pos: usize },
    #[error("fractional exponent at {pos}")]
    FractionalExponent { pos: usize },
    #[error("floating-point literal at {pos}; write rationals as p/q")]
    FloatLiteral { pos: usize },
    #[error("division by zero in literal at {pos}")]
    DivisionByZero { pos: usize },
    #[error("nesting deeper than {limit}")]
    DepthLimit { limit: usize },
    #[error("term of degree {degree} exceeds truncation order {order}")]
    DegreeExceeded { degree: usize, order: usize },
    #[error("variable names must be distinct identifiers")]
    BadVariableNames,
}

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Literal(Rat),
    Var(Axis),
    Neg(Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, u32),
}

impl Expr {
    /// Upper bound on the total degree of the denoted polynomial.
    pub fn degree_bound(&self) -> usize {
        match self {
            Expr::Literal(_) => 0,
            Expr::Var(_) => 1,
            Expr::Neg(e) => e.degree_bound(),
            Expr::Sum(a, b) | Expr::Difference(a, b) => a.degree_bound().max(b.degree_bound()),
            Expr::Product(a, b) => a.degree_bound().saturating_add(b.degree_bound()),
            Expr::Power(e, n) => e.degree_bound().saturating_mul(*n as usize),
        }
    }

    /// Expands the polynomial, truncated to `order`.
    pub fn to_series(&self, order: usize) -> Series2<Rat> {
        match self {
            Expr::Literal(r) => Series2::constant(r.clone(), order),
            Expr::Var(a) => Series2::var(*a, order),
            Expr::Neg(e) => e.to_series(order).neg(),
            Expr::Sum(a, b) => a.to_series(order).add(&b.to_series(order)),
            Expr::Difference(a, b) => a.to_series(order).sub(&b.to_series(order)),
            Expr::Product(a, b) => a.to_series(order).mul(&b.to_series(order)),
            Expr::Power(e, n) => {
                let mut base = e.to_series(order);
                let mut acc = Series2::constant(Rat::from_integer(1.into()), order);
                let mut n = *n;
                while n > 0 {
                    if n & 1 == 1 {
                        acc = acc.mul(&base);
                    }
                    n >>= 1;
                    if n > 0 {
                        base = base.mul(&base);
                    }
                }
                acc
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Reject expressions with terms above the truncation order.
    pub strict: bool,
    pub max_depth: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: false, max_depth: DEFAULT_MAX_DEPTH }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Parsed {
    pub series: Series2<Rat>,
    /// Some nonzero term above the order was dropped (or may have been, for
    /// expressions whose degree bound is far beyond the order).
    pub dropped_degree: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            if k < chars.len() && (chars[k].1 == '.' || chars[k].1 == 'e' || chars[k].1 == 'E') {
                return Err(ParseError::FloatLiteral { pos });
            }
            let digits: String = chars[start..k].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Int(digits.parse().expect("ascii digits"))));
            continue;
        }
        if c == '.' {
            return Err(ParseError::FloatLiteral { pos });
        }
        if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
                k += 1;
            }
            let name: String = chars[start..k].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Ident(name)));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return Err(ParseError::Syntax { pos, message: format!("unexpected character '{other}'") }),
        };
        out.push((pos, tok));
        k += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    vars: (&'a str, &'a str),
    max_depth: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), message: message.into() })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > self.max_depth {
            return Err(ParseError::DepthLimit { limit: self.max_depth });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Sum(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Difference(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            lhs = Expr::Product(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            self.enter()?;
            let inner = self.factor()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            return match self.bump() {
                Some(Tok::Int(n)) => {
                    if let Some(Tok::Slash) = self.peek() {
                        return Err(ParseError::FractionalExponent { pos });
                    }
                    let n: u32 =
                        n.try_into().map_err(|_| ParseError::Syntax { pos, message: "exponent too large".into() })?;
                    Ok(Expr::Power(Box::new(base), n))
                }
                Some(Tok::Minus) => Err(ParseError::NegativeExponent { pos }),
                Some(Tok::LParen) => {
                    Err(ParseError::Syntax { pos, message: "exponent must be a literal unsigned integer".into() })
                }
                _ => Err(ParseError::Syntax { pos, message: "expected exponent".into() }),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => {
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dpos = self.pos();
                    match self.bump() {
                        Some(Tok::Int(d)) => {
                            if d.is_zero() {
                                return Err(ParseError::DivisionByZero { pos: dpos });
                            }
                            Ok(Expr::Literal(Rat::new(n, d)))
                        }
                        _ => Err(ParseError::Syntax { pos: dpos, message: "expected denominator".into() }),
                    }
                } else {
                    Ok(Expr::Literal(Rat::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => {
                if name == self.vars.0 {
                    Ok(Expr::Var(Axis::First))
                } else if name == self.vars.1 {
                    Ok(Expr::Var(Axis::Second))
                } else {
                    Err(ParseError::UnknownIdentifier { name, pos })
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(ParseError::Syntax {
                        pos: self.toks.get(self.at - 1).map_or(self.end, |t| t.0),
                        message: "expected ')'".into(),
                    }),
                }
            }
            Some(_) => Err(ParseError::Syntax { pos, message: "expected a number, variable or '('".into() }),
            None => Err(ParseError::Syntax { pos, message: "unexpected end of input".into() }),
        }
    }
}

fn valid_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses text into an expression tree.
pub fn parse_expr(text: &str, vars: (&str, &str), max_depth: usize) -> Result<Expr, ParseError> {
    if vars.0 == vars.1 || !valid_ident(vars.0) || !valid_ident(vars.1) {
        return Err(ParseError::BadVariableNames);
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), vars, max_depth, depth: 0 };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a polynomial into an exact series truncated to `order`.
pub fn parse_with(text: &str, vars: (&str, &str), order: usize, opts: &ParseOptions) -> Result<Parsed, ParseError> {
    let e = parse_expr(text, vars, opts.max_depth)?;
    let bound = e.degree_bound();
    let cap = order.saturating_add(DROP_CHECK_MARGIN);
    let (series, dropped, top) = if bound <= order {
        (e.to_series(order), false, None)
    } else if bound <= cap {
        let full = e.to_series(bound);
        let top = full.degree().filter(|&d| d > order);
        (full.truncate(order), top.is_some(), top)
    } else {
        (e.to_series(order), true, Some(bound))
    };
    if opts.strict && dropped {
        return Err(ParseError::DegreeExceeded { degree: top.unwrap_or(bound), order });
    }
    Ok(Parsed { series, dropped_degree: dropped })
}

/// Parses with default options (non-strict, depth 64).
pub fn parse(text: &str, vars: (&str, &str), order: usize) -> Result<Series2<Rat>, ParseError> {
    parse_with(text, vars, order, &ParseOptions::default()).map(|p| p.series)
}

fn monomial_text(i: usize, j: usize, vars: (&str, &str)) -> String {
    let pow = |name: &str, e: usize| match e {
        0 => None,
        1 => Some(name.to_string()),
        e => Some(format!("{name}^{e}")),
    };
    [pow(vars.0, i), pow(vars.1, j)].into_iter().flatten().collect::<Vec<_>>().join("*")
}

fn magnitude_text(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical expression text, terms in graded-lex order.
pub fn unparse(s: &Series2<Rat>, vars: (&str, &str)) -> String {
    let mut out = String::new();
    for (i, j, c) in s.terms() {
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = monomial_text(i, j, vars);
        if mono.is_empty() {
            out.push_str(&magnitude_text(&mag));
        } else if Scalar::is_one(&mag) {
            out.push_str(&mono);
        } else {
            out.push_str(&magnitude_text(&mag));
            out.push('*');
            out.push_str(&mono);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Exact rational literal in the form used by the expression language.
pub fn literal_text(r: &Rat) -> String {
    rat_text(r)
}
