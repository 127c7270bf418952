//! Sparse multivariate polynomials over Q with a small text syntax.
//!
//! Syntax: `-x^2 - y*z`, `u1^2 + u1*u2 + u2^2`, `3/2 (x + y)^2`. Juxtaposition multiplies.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::add_to;
use crate::rational::{join_terms, Q};

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, Q>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParsePolyError {
    #[error("unexpected character {0:?} at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {0}")]
    UnexpectedToken(String),
    #[error("division is only allowed by a nonzero constant")]
    BadDivision,
    #[error("exponent must be a small nonnegative integer")]
    BadExponent,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Q::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: Q) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { nvars, terms }
    }

    /// Sum of `coeffs[i] * x_i`.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            add_to(&mut p.terms, &e, c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            add_to(&mut p.terms, &e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    /// `Some(d)` when every term has total degree `d`; `None` for the zero polynomial or a
    /// mixed-degree one.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|e| degree_of(e));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `x_i ↦ images[i]`; all images share a variable count.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars)]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            add_to(&mut out.terms, &e2, c * Q::from_integer(BigInt::from(e[i])));
        }
        out
    }

    /// Terms of total degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| degree_of(e) == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Renders with the given variable names in graded order (highest degree first).
    pub fn display_with(&self, names: &[impl AsRef<str>]) -> String {
        assert_eq!(names.len(), self.nvars);
        let mut keys: Vec<&Exponents> = self.terms.keys().collect();
        keys.sort_by(|a, b| degree_of(b).cmp(&degree_of(a)).then_with(|| b.cmp(a)));
        join_terms(
            keys.into_iter()
                .map(|e| (&self.terms[e], monomial_text(e, names))),
        )
    }

    pub fn parse(s: &str, names: &[impl AsRef<str>]) -> Result<Poly, ParsePolyError> {
        let tokens = tokenize(s)?;
        let names: Vec<&str> = names.iter().map(|n| n.as_ref()).collect();
        let mut p = Parser {
            tokens: &tokens,
            pos: 0,
            names: &names,
        };
        let out = p.expr()?;
        if p.pos != tokens.len() {
            return Err(ParsePolyError::UnexpectedToken(format!(
                "{:?}",
                tokens[p.pos]
            )));
        }
        Ok(out)
    }
}

pub fn degree_of(e: &[u32]) -> usize {
    e.iter().map(|&k| k as usize).sum()
}

/// All exponent vectors in `nvars` variables of total degree `d`, in lexicographic order.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Exponents> {
    fn rec(i: usize, left: usize, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i + 1 == cur.len() {
            cur[i] = left as u32;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k as u32;
            rec(i + 1, left - k, cur, out);
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut vec![0; nvars], &mut out);
    out
}

fn monomial_text(e: &[u32], names: &[impl AsRef<str>]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(names[i].as_ref().to_string()),
            _ => parts.push(format!("{}^{}", names[i].as_ref(), k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("t{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            add_to(&mut out.terms, e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            add_to(&mut out.terms, e, -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                add_to(&mut out.terms, &e, c1 * c2);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Token>, ParsePolyError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' | '\u{2212}' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push(Token::Num(text.parse().unwrap()));
            }
            a if a.is_alphabetic() || a == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(ParsePolyError::UnexpectedChar(other, i)),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn expr(&mut self) -> Result<Poly, ParsePolyError> {
        let mut acc = Poly::zero(self.nvars());
        let mut sign = Q::one();
        match self.peek() {
            Some(Token::Minus) => {
                sign = -sign;
                self.pos += 1;
            }
            Some(Token::Plus) => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = &acc + &t.scale(&sign);
            match self.peek() {
                Some(Token::Plus) => {
                    sign = Q::one();
                    self.pos += 1;
                }
                Some(Token::Minus) => {
                    sign = -Q::one();
                    self.pos += 1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Token::Num(_)) | Some(Token::Ident(_)) | Some(Token::LParen)
        )
    }

    fn term(&mut self) -> Result<Poly, ParsePolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    let c = match f.homogeneous_degree() {
                        Some(0) => f.coefficient(&vec![0; self.nvars()]),
                        _ => return Err(ParsePolyError::BadDivision),
                    };
                    acc = acc.scale(&c.recip());
                }
                _ if self.starts_atom() => {
                    let f = self.factor()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, ParsePolyError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(k)) => {
                    let k = k
                        .to_u32()
                        .filter(|&k| k <= 64)
                        .ok_or(ParsePolyError::BadExponent)?;
                    self.pos += 1;
                    return Ok(base.pow(k));
                }
                Some(_) => return Err(ParsePolyError::BadExponent),
                None => return Err(ParsePolyError::UnexpectedEnd),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParsePolyError> {
        let n = self.nvars();
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(k)) => {
                self.pos += 1;
                Ok(Poly::constant(n, Q::from_integer(k)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .names
                    .iter()
                    .position(|v| *v == name)
                    .ok_or(ParsePolyError::UnknownVariable(name))?;
                Ok(Poly::var(n, i))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(match self.peek() {
                        Some(t) => ParsePolyError::UnexpectedToken(format!("{t:?}")),
                        None => ParsePolyError::UnexpectedEnd,
                    });
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(t) => Err(ParsePolyError::UnexpectedToken(format!("{t:?}"))),
            None => Err(ParsePolyError::UnexpectedEnd),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    const XYZ: [&str; 3] = ["x", "y", "z"];

    #[test]
    fn parses_determinant() {
        let p = Poly::parse("-x^2 - y*z", &XYZ).unwrap();
        assert_eq!(p.coefficient(&[2, 0, 0]), qi(-1));
        assert_eq!(p.coefficient(&[0, 1, 1]), qi(-1));
        assert_eq!(p.len(), 2);
        assert_eq!(p.homogeneous_degree(), Some(2));
        assert_eq!(p.display_with(&XYZ), "-x^2 - y*z");
    }

    #[test]
    fn parses_products_and_fractions() {
        let p = Poly::parse("3/2 (x + y)^2", &XYZ).unwrap();
        assert_eq!(p.coefficient(&[1, 1, 0]), qi(3));
        assert_eq!(p.coefficient(&[2, 0, 0]), q(3, 2));
        let u = ["u1", "u2"];
        let a2 = Poly::parse("u1^2+u1*u2+u2^2", &u).unwrap();
        assert_eq!(a2.len(), 3);
        assert!(Poly::parse("w", &XYZ).is_err());
        assert!(Poly::parse("x/y", &XYZ).is_err());
        assert!(Poly::parse("0", &XYZ).unwrap().is_zero());
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(4, 3).len(), 20);
        assert_eq!(monomials_of_degree(2, 0), vec![vec![0, 0]]);
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(((0u32..3, 0u32..3, 0u32..3), -5i64..6, 1i64..4), 0..5).prop_map(
            |ts| {
                Poly::from_terms(
                    3,
                    ts.into_iter()
                        .map(|((a, b, c), n, d)| (vec![a, b, c], q(n, d))),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(p in small_poly()) {
            let text = p.display_with(&XYZ);
            prop_assert_eq!(Poly::parse(&text, &XYZ).unwrap(), p);
        }

        #[test]
        fn substitution_is_a_ring_map(a in small_poly(), b in small_poly()) {
            let images = vec![
                Poly::parse("x + y", &XYZ).unwrap(),
                Poly::parse("2 z", &XYZ).unwrap(),
                Poly::parse("x - 1/2 y", &XYZ).unwrap(),
            ];
            let lhs = (&a * &b).substitute(&images);
            let rhs = &a.substitute(&images) * &b.substitute(&images);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
