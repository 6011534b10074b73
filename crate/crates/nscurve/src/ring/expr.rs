//! Small expression grammar shared by fixtures, golden files and the CLI.
//!
//! Grammar:
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' integer)?
//! atom   := rational | symbol | '(' expr ')' | '-' factor
//! ```
//! Division is restricted to constant right-hand sides. Symbols are resolved
//! by the caller; the ring-level parser resolves them to generators.

use super::{Rat, WeightedPoly};
use num::traits::{One, Zero};
use num::BigInt;
use std::fmt;
use std::sync::Arc;

use super::GenSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    UnknownSymbol(String),
    Unexpected(String),
    DivisionByNonConstant,
    DivisionByZero,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::UnknownSymbol(s) => write!(f, "unknown symbol `{s}`"),
            ExprError::Unexpected(s) => write!(f, "unexpected input at `{s}`"),
            ExprError::DivisionByNonConstant => write!(f, "division by a non-constant"),
            ExprError::DivisionByZero => write!(f, "division by zero"),
        }
    }
}

impl std::error::Error for ExprError {}

/// Ring interface required of expression values.
pub trait ExprValue: Clone {
    fn from_rat(&self, r: Rat) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn pow(&self, n: u32) -> Self;
    /// Constant value, if the element is one.
    fn as_rat(&self) -> Option<Rat>;
    fn scale(&self, r: &Rat) -> Self;
}

impl ExprValue for WeightedPoly {
    fn from_rat(&self, r: Rat) -> Self {
        WeightedPoly::constant(self.gens(), r)
    }
    fn add(&self, other: &Self) -> Self {
        WeightedPoly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        WeightedPoly::mul(self, other)
    }
    fn neg(&self) -> Self {
        WeightedPoly::neg(self)
    }
    fn pow(&self, n: u32) -> Self {
        WeightedPoly::pow(self, n)
    }
    fn as_rat(&self) -> Option<Rat> {
        self.as_constant()
    }
    fn scale(&self, r: &Rat) -> Self {
        WeightedPoly::scale(self, r)
    }
}

pub struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    _marker: std::marker::PhantomData<&'a str>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Int(BigInt),
    Sym(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Pipe,
    End,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            _marker: std::marker::PhantomData,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    pub fn rest(&self) -> String {
        self.chars[self.pos.min(self.chars.len())..].iter().collect()
    }

    pub fn peek(&mut self) -> Tok {
        let save = self.pos;
        let t = self.next_tok();
        self.pos = save;
        t
    }

    pub fn next_tok(&mut self) -> Tok {
        self.skip_ws();
        if self.pos >= self.chars.len() {
            return Tok::End;
        }
        let c = self.chars[self.pos];
        match c {
            '+' => {
                self.pos += 1;
                Tok::Plus
            }
            '-' | '−' => {
                self.pos += 1;
                Tok::Minus
            }
            '*' | '·' => {
                self.pos += 1;
                Tok::Star
            }
            '/' => {
                self.pos += 1;
                Tok::Slash
            }
            '^' => {
                self.pos += 1;
                Tok::Caret
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            '[' => {
                self.pos += 1;
                Tok::LBracket
            }
            ']' => {
                self.pos += 1;
                Tok::RBracket
            }
            ',' => {
                self.pos += 1;
                Tok::Comma
            }
            '|' => {
                self.pos += 1;
                Tok::Pipe
            }
            d if d.is_ascii_digit() => {
                let mut s = String::new();
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    s.push(self.chars[self.pos]);
                    self.pos += 1;
                }
                Tok::Int(s.parse().unwrap())
            }
            a if a.is_alphabetic() || a == '℘' || a == 'ζ' || a == '𝔭' || a == 'ξ' || a == '_' => {
                let mut s = String::new();
                while self.pos < self.chars.len() {
                    let c = self.chars[self.pos];
                    if c.is_alphanumeric() || c == '_' || c == '℘' || c == 'ζ' || c == '𝔭' || c == 'ξ'
                    {
                        s.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                Tok::Sym(s)
            }
            other => Tok::Sym(other.to_string()),
        }
    }
}

/// Recursive-descent parser over an atom resolver.
pub struct Parser<'a, T, F>
where
    T: ExprValue,
    F: FnMut(&mut Lexer<'a>, &str) -> Result<T, ExprError>,
{
    pub lexer: Lexer<'a>,
    pub resolve: F,
    pub proto: T,
}

impl<'a, T, F> Parser<'a, T, F>
where
    T: ExprValue,
    F: FnMut(&mut Lexer<'a>, &str) -> Result<T, ExprError>,
{
    pub fn new(src: &'a str, proto: T, resolve: F) -> Self {
        Parser {
            lexer: Lexer::new(src),
            resolve,
            proto,
        }
    }

    pub fn parse_full(&mut self) -> Result<T, ExprError> {
        let v = self.expr()?;
        match self.lexer.peek() {
            Tok::End => Ok(v),
            _ => Err(ExprError::Unexpected(self.lexer.rest())),
        }
    }

    pub fn expr(&mut self) -> Result<T, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.lexer.peek() {
                Tok::Plus => {
                    self.lexer.next_tok();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Tok::Minus => {
                    self.lexer.next_tok();
                    let t = self.term()?;
                    acc = acc.add(&t.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<T, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.lexer.peek() {
                Tok::Star => {
                    self.lexer.next_tok();
                    let t = self.factor()?;
                    acc = acc.mul(&t);
                }
                Tok::Slash => {
                    self.lexer.next_tok();
                    let t = self.factor()?;
                    let c = t.as_rat().ok_or(ExprError::DivisionByNonConstant)?;
                    if c.is_zero() {
                        return Err(ExprError::DivisionByZero);
                    }
                    acc = acc.scale(&(Rat::one() / c));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<T, ExprError> {
        let base = self.atom()?;
        if self.lexer.peek() == Tok::Caret {
            self.lexer.next_tok();
            match self.lexer.next_tok() {
                Tok::Int(n) => {
                    let n: u32 = n.try_into().map_err(|_| ExprError::Unexpected("^".into()))?;
                    Ok(base.pow(n))
                }
                _ => Err(ExprError::Unexpected(self.lexer.rest())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<T, ExprError> {
        match self.lexer.next_tok() {
            Tok::Int(n) => Ok(self.proto.from_rat(Rat::from_integer(n))),
            Tok::Minus => {
                let f = self.factor()?;
                Ok(f.neg())
            }
            Tok::LParen => {
                let v = self.expr()?;
                match self.lexer.next_tok() {
                    Tok::RParen => Ok(v),
                    _ => Err(ExprError::Unexpected(self.lexer.rest())),
                }
            }
            Tok::Sym(s) => (self.resolve)(&mut self.lexer, &s),
            _ => Err(ExprError::Unexpected(self.lexer.rest())),
        }
    }
}

/// Parse a polynomial in the canonical text form over the given generators.
pub fn expr_parser<'a, T, F>(src: &'a str, proto: T, resolve: F) -> Parser<'a, T, F>
where
    T: ExprValue,
    F: FnMut(&mut Lexer<'a>, &str) -> Result<T, ExprError>,
{
    Parser::new(src, proto, resolve)
}

/// Parse a polynomial in the canonical text form over the given generators.
pub fn parse_poly(src: &str, gens: &Arc<GenSet>) -> Result<WeightedPoly, ExprError> {
    let proto = WeightedPoly::zero(gens);
    let gens = gens.clone();
    let mut p = Parser::new(src, proto, move |_lexer, name: &str| {
        gens.index_of(name)
            .map(|i| WeightedPoly::gen(&gens, i))
            .ok_or_else(|| ExprError::UnknownSymbol(name.to_string()))
    });
    p.parse_full()
}

#[cfg(test)]
mod tests {
    use super::super::GenSet;
    use super::*;

    #[test]
    fn roundtrip_canonical_text() {
        let g = GenSet::new(vec![("λ2".into(), 2), ("λ5".into(), 5), ("c1".into(), 1)]);
        let p = parse_poly("-1/3*λ2 + 2*c1^2 - 7", &g).unwrap();
        let s = format!("{p}");
        let q = parse_poly(&s, &g).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn parenthesised_rationals() {
        let g = GenSet::new(vec![("λ2".into(), 2), ("c2".into(), 2)]);
        let p = parse_poly("(λ2 + 3*c2)/6", &g).unwrap();
        let q = parse_poly("1/6*λ2 + 1/2*c2", &g).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn rejects_unknown_symbol() {
        let g = GenSet::new(vec![("λ2".into(), 2)]);
        assert!(matches!(
            parse_poly("λ3", &g),
            Err(ExprError::UnknownSymbol(_))
        ));
    }
}
