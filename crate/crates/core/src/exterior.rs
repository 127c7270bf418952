//! Exterior algebra on `slots` copies of a dual space, `Λ(C^p 𝔤^∨)` with `slots = p + 1`.
//!
//! Generator `(basis b, slot s)` has index `s * dim + b`; monomials are bitmasks over generator
//! indices, read as the wedge of the set generators in increasing index order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lie::LieAlgebra;
use crate::linalg::{add_to, Matrix};
use crate::rational::{join_terms, parse_rational, Q};

/// A wedge monomial as a set of generator indices.
pub type Monomial = u128;

pub const MAX_GENERATORS: usize = 128;

/// Convention in force for the Chevalley–Eilenberg differential.
pub const CE_CONVENTION: &str = "d(xi^k) = sum_{i,j} c_ij^k xi^i ^ xi^j";
/// Convention in force for wedge products viewed as alternating multilinear maps.
pub const WEDGE_CONVENTION: &str =
    "u^v = (u(x)v - v(x)u)/2, degree d forms antisymmetrized with 1/d!";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error(
        "forms live on different spaces: {left_dim}x{left_slots} vs {right_dim}x{right_slots}"
    )]
    DimensionMismatch {
        left_dim: usize,
        left_slots: usize,
        right_dim: usize,
        right_slots: usize,
    },
    #[error("form of degree {degree} evaluated on {vectors} vectors")]
    ArityMismatch { degree: usize, vectors: usize },
    #[error("vector of length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("cannot parse form: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    dim: usize,
    slots: usize,
    terms: BTreeMap<Monomial, Q>,
}

/// Generator indices of a monomial in increasing order.
pub fn generators_of(m: Monomial) -> impl Iterator<Item = usize> {
    let mut rest = m;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

pub fn degree_of(m: Monomial) -> usize {
    m.count_ones() as usize
}

/// Sign of `a ∧ b` relative to the sorted monomial `a | b`; `None` when they share a generator.
pub fn wedge_sign(a: Monomial, b: Monomial) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    for j in generators_of(b) {
        swaps += (a >> j >> 1).count_ones();
    }
    Some(swaps % 2 == 1)
}

/// Sorted monomial and sign for a generator sequence; `None` for a repeated generator.
pub fn sort_generators(gens: &[usize]) -> Option<(Monomial, bool)> {
    let mut m: Monomial = 0;
    let mut neg = false;
    for &g in gens {
        let bit = 1u128 << g;
        if m & bit != 0 {
            return None;
        }
        neg ^= (m >> g).count_ones() % 2 == 1;
        m |= bit;
    }
    Some((m, neg))
}

/// All degree-`k` monomials on the first `n` generators, in lexicographic order of their
/// sorted index tuples.
pub fn monomials(n: usize, k: usize) -> Vec<Monomial> {
    fn rec(start: usize, n: usize, k: usize, acc: Monomial, out: &mut Vec<Monomial>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for g in start..=n - k {
            rec(g + 1, n, k - 1, acc | (1u128 << g), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

fn signed(c: &Q, neg: bool) -> Q {
    if neg {
        -c.clone()
    } else {
        c.clone()
    }
}

impl Form {
    pub fn zero(dim: usize, slots: usize) -> Self {
        assert!(
            dim * slots <= MAX_GENERATORS,
            "at most {MAX_GENERATORS} generators are supported"
        );
        Form {
            dim,
            slots,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, slots: usize, c: Q) -> Self {
        Self::from_terms(dim, slots, [(0, c)])
    }

    pub fn one(dim: usize, slots: usize) -> Self {
        Self::constant(dim, slots, Q::one())
    }

    pub fn generator(dim: usize, slots: usize, basis: usize, slot: usize) -> Self {
        assert!(basis < dim && slot < slots);
        Self::from_terms(dim, slots, [(1u128 << (slot * dim + basis), Q::one())])
    }

    /// `c · g_1 ∧ … ∧ g_k` for generator indices in any order.
    pub fn from_generators(dim: usize, slots: usize, gens: &[usize], c: Q) -> Self {
        assert!(gens.iter().all(|&g| g < dim * slots));
        match sort_generators(gens) {
            Some((m, neg)) => Self::from_terms(dim, slots, [(m, signed(&c, neg))]),
            None => Self::zero(dim, slots),
        }
    }

    pub fn from_terms(
        dim: usize,
        slots: usize,
        terms: impl IntoIterator<Item = (Monomial, Q)>,
    ) -> Self {
        let mut f = Self::zero(dim, slots);
        let limit = dim * slots;
        for (m, c) in terms {
            assert!(
                limit == MAX_GENERATORS || m >> limit == 0,
                "monomial outside the space"
            );
            add_to(&mut f.terms, &m, c);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn generator_count(&self) -> usize {
        self.dim * self.slots
    }

    pub fn generator_index(&self, basis: usize, slot: usize) -> usize {
        slot * self.dim + basis
    }

    /// `(basis, slot)` of a generator index.
    pub fn generator_position(&self, g: usize) -> (usize, usize) {
        (g % self.dim, g / self.dim)
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Q> {
        self.terms
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

    pub fn coefficient(&self, m: Monomial) -> Q {
        self.terms.get(&m).cloned().unwrap_or_else(Q::zero)
    }

    /// The common degree of all terms; `None` for zero or mixed-degree forms.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|&m| degree_of(m));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn same_space(&self, other: &Form) -> Result<(), FormError> {
        if self.dim == other.dim && self.slots == other.slots {
            Ok(())
        } else {
            Err(FormError::DimensionMismatch {
                left_dim: self.dim,
                left_slots: self.slots,
                right_dim: other.dim,
                right_slots: other.slots,
            })
        }
    }

    pub fn scale(&self, s: &Q) -> Form {
        if s.is_zero() {
            return Form::zero(self.dim, self.slots);
        }
        Form {
            dim: self.dim,
            slots: self.slots,
            terms: self.terms.iter().map(|(&m, c)| (m, c * s)).collect(),
        }
    }

    pub fn wedge(&self, other: &Form) -> Result<Form, FormError> {
        self.same_space(other)?;
        let mut out = Form::zero(self.dim, self.slots);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if let Some(neg) = wedge_sign(a, b) {
                    add_to(&mut out.terms, &(a | b), signed(&(ca * cb), neg));
                }
            }
        }
        Ok(out)
    }

    /// Relabels generators through an injective map into a space with `slots` slots.
    pub fn relabel(&self, slots: usize, map: impl Fn(usize) -> usize) -> Form {
        let mut out = Form::zero(self.dim, slots);
        let mut buf = Vec::new();
        for (&m, c) in &self.terms {
            buf.clear();
            buf.extend(generators_of(m).map(&map));
            if let Some((m2, neg)) = sort_generators(&buf) {
                add_to(&mut out.terms, &m2, signed(c, neg));
            }
        }
        out
    }

    /// Extends `generator g ↦ images[g]` multiplicatively. Images must share a space.
    pub fn substitute(&self, images: &[Form]) -> Form {
        assert_eq!(images.len(), self.generator_count());
        let (dim, slots) = images
            .first()
            .map_or((self.dim, self.slots), |f| (f.dim, f.slots));
        let mut out = Form::zero(dim, slots);
        for (&m, c) in &self.terms {
            let mut acc = Form::constant(dim, slots, c.clone());
            for g in generators_of(m) {
                acc = acc.wedge(&images[g]).expect("images share a space");
                if acc.is_zero() {
                    break;
                }
            }
            for (m2, c2) in acc.terms {
                add_to(&mut out.terms, &m2, c2);
            }
        }
        out
    }

    /// The Chevalley–Eilenberg differential, acting on each slot separately.
    pub fn ce_differential(&self, g: &LieAlgebra) -> Result<Form, FormError> {
        if g.dim() != self.dim {
            return Err(FormError::DimensionMismatch {
                left_dim: self.dim,
                left_slots: self.slots,
                right_dim: g.dim(),
                right_slots: self.slots,
            });
        }
        let table = generator_differentials(g);
        let mut out = Form::zero(self.dim, self.slots);
        for (&m, c) in &self.terms {
            for (pos, gen) in generators_of(m).enumerate() {
                let rest = m & !(1u128 << gen);
                let (b, s) = self.generator_position(gen);
                let shift = s * self.dim;
                let left = rest & ((1u128 << gen) - 1);
                let right = rest & !((1u128 << gen) - 1);
                for (t, ct) in &table[b] {
                    let t = t << shift;
                    let (Some(n1), Some(n2)) = (wedge_sign(left, t), wedge_sign(left | t, right))
                    else {
                        continue;
                    };
                    let neg = n1 ^ n2 ^ (pos % 2 == 1);
                    add_to(&mut out.terms, &(rest | t), signed(&(c * ct), neg));
                }
            }
        }
        Ok(out)
    }

    /// Value on a tuple of vectors (coordinates over all generators), using the
    /// 1/d!-antisymmetrization normalization.
    pub fn evaluate(&self, vectors: &[Vec<Q>]) -> Result<Q, FormError> {
        let n = vectors.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != self.generator_count()) {
            return Err(FormError::VectorLength {
                expected: self.generator_count(),
                got: v.len(),
            });
        }
        let mut factorial = Q::one();
        for k in 2..=n {
            factorial *= Q::from_integer(BigInt::from(k));
        }
        let mut total = Q::zero();
        for (&m, c) in &self.terms {
            let d = degree_of(m);
            if d != n {
                return Err(FormError::ArityMismatch {
                    degree: d,
                    vectors: n,
                });
            }
            let gens: Vec<usize> = generators_of(m).collect();
            let entries = vectors
                .iter()
                .map(|v| gens.iter().map(|&g| v[g].clone()).collect())
                .collect();
            let det = if n == 0 {
                Q::one()
            } else {
                Matrix::from_rows(n, n, entries).determinant()
            };
            total += c * det;
        }
        Ok(total / factorial)
    }

    fn generator_text(&self, g: usize, labels: &[impl AsRef<str>]) -> String {
        let (b, s) = self.generator_position(g);
        let label = labels[b].as_ref();
        if self.slots == 1 {
            label.to_string()
        } else if label.ends_with(|c: char| c.is_ascii_digit()) {
            format!("{label}_{}", s + 1)
        } else {
            format!("{label}{}", s + 1)
        }
    }

    /// Text form such as `3/2 x1^y2 - z1`; slot numbers are 1-based and omitted for one slot.
    pub fn display_with(&self, labels: &[impl AsRef<str>]) -> String {
        assert_eq!(labels.len(), self.dim);
        let mut keys: Vec<(Vec<usize>, Monomial)> = self
            .terms
            .keys()
            .map(|&m| (generators_of(m).collect(), m))
            .collect();
        keys.sort();
        join_terms(keys.into_iter().map(|(gens, m)| {
            let text: Vec<String> = gens
                .iter()
                .map(|&g| self.generator_text(g, labels))
                .collect();
            (&self.terms[&m], text.join("^"))
        }))
    }

    /// Parses the syntax produced by [`Form::display_with`].
    pub fn parse(text: &str, labels: &[impl AsRef<str>], slots: usize) -> Result<Form, FormError> {
        let dim = labels.len();
        let mut out = Form::zero(dim, slots);
        let err = |msg: String| FormError::Parse(msg);
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut neg = false;
        let mut signed_start = false;
        for ch in text.chars() {
            if ch == '+' || ch == '-' {
                if current.trim().is_empty() {
                    if signed_start || !pieces.is_empty() {
                        return Err(err(format!("dangling sign in {text:?}")));
                    }
                    signed_start = true;
                } else {
                    pieces.push((neg, std::mem::take(&mut current)));
                }
                neg = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.trim().is_empty() {
            return Err(err(format!("missing term in {text:?}")));
        }
        pieces.push((neg, current));
        for (neg, piece) in pieces {
            let words: Vec<&str> = piece.split_whitespace().collect();
            let (coef, mono) = match words.as_slice() {
                [w] => match parse_rational(w) {
                    Some(c) => (c, None),
                    None => (Q::one(), Some(*w)),
                },
                [c, w] => (
                    parse_rational(c).ok_or_else(|| err(format!("bad coefficient {c:?}")))?,
                    Some(*w),
                ),
                _ => return Err(err(format!("bad term {:?}", piece.trim()))),
            };
            let mut gens = Vec::new();
            if let Some(mono) = mono {
                for factor in mono.split('^') {
                    gens.push(
                        parse_generator(factor, labels, slots)
                            .ok_or_else(|| err(format!("unknown generator {factor:?}")))?,
                    );
                }
            }
            let c = if neg { -coef } else { coef };
            out = &out + &Form::from_generators(dim, slots, &gens, c);
        }
        Ok(out)
    }
}

fn parse_generator(factor: &str, labels: &[impl AsRef<str>], slots: usize) -> Option<usize> {
    let dim = labels.len();
    let mut found = None;
    for (b, label) in labels.iter().enumerate() {
        let Some(rest) = factor.strip_prefix(label.as_ref()) else {
            continue;
        };
        let slot = if slots == 1 {
            rest.is_empty().then_some(0)
        } else {
            let digits = rest.strip_prefix('_').unwrap_or(rest);
            match digits.parse::<usize>() {
                Ok(n) if (1..=slots).contains(&n) && !digits.starts_with('+') => Some(n - 1),
                _ => None,
            }
        };
        if let Some(s) = slot {
            if found.is_some() {
                return None;
            }
            found = Some(s * dim + b);
        }
    }
    found
}

/// `δξ^b` on a single slot as a list of (monomial in slot 0, coefficient).
fn generator_differentials(g: &LieAlgebra) -> Vec<Vec<(Monomial, Q)>> {
    let n = g.dim();
    (0..n)
        .map(|b| {
            let mut acc = BTreeMap::new();
            for i in 0..n {
                for j in i + 1..n {
                    let c = g.structure_constant(i, j, b);
                    if !c.is_zero() {
                        add_to(
                            &mut acc,
                            &((1u128 << i) | (1u128 << j)),
                            c * Q::from_integer(2.into()),
                        );
                    }
                }
            }
            acc.into_iter().collect()
        })
        .collect()
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = (0..self.dim).map(|i| format!("e{i}_")).collect();
        write!(f, "Form({})", self.display_with(&labels))
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.same_space(rhs)
            .expect("adding forms on different spaces");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            add_to(&mut out.terms, m, c.clone());
        }
        out
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.same_space(rhs)
            .expect("subtracting forms on different spaces");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            add_to(&mut out.terms, m, -c.clone());
        }
        out
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale(&-Q::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn gen1(b: usize) -> Form {
        Form::generator(3, 1, b, 0)
    }

    #[test]
    fn wedge_sign_counts_transpositions() {
        assert_eq!(wedge_sign(0b010, 0b001), Some(true));
        assert_eq!(wedge_sign(0b001, 0b110), Some(false));
        assert_eq!(wedge_sign(0b100, 0b011), Some(false));
        assert_eq!(wedge_sign(0b1, 0b1), None);
        assert_eq!(sort_generators(&[2, 0, 1]), Some((0b111, false)));
        assert_eq!(sort_generators(&[1, 0]), Some((0b11, true)));
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(
            monomials(4, 2),
            vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]
        );
        assert_eq!(monomials(8, 4).len(), 70);
        assert_eq!(monomials(3, 0), vec![0]);
        assert!(monomials(2, 3).is_empty());
    }

    #[test]
    fn wedge_of_slotted_differences() {
        // (x2 - x3)^(x1 - x3) on three slots of a one-dimensional space
        let x = |s| Form::generator(1, 3, 0, s);
        let a = &x(1) - &x(2);
        let b = &x(0) - &x(2);
        let lhs = a.wedge(&b).unwrap();
        let rhs = &(&Form::from_generators(1, 3, &[1, 0], qi(1))
            + &Form::from_generators(1, 3, &[2, 1], qi(1)))
            + &Form::from_generators(1, 3, &[0, 2], qi(1));
        assert_eq!(lhs, rhs);
        assert!(gen1(0).wedge(&gen1(0)).unwrap().is_zero());
        assert_eq!(Form::one(3, 1).wedge(&gen1(2)).unwrap(), gen1(2));
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = Form::generator(3, 1, 0, 0);
        let b = Form::generator(3, 2, 0, 1);
        assert!(matches!(
            a.wedge(&b),
            Err(FormError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evaluation_normalization() {
        let unit =
            |i: usize| -> Vec<Q> { (0..3).map(|j| if i == j { qi(1) } else { qi(0) }).collect() };
        let xy = gen1(0).wedge(&gen1(1)).unwrap();
        assert_eq!(xy.evaluate(&[unit(0), unit(1)]).unwrap(), q(1, 2));
        assert_eq!(xy.evaluate(&[unit(0), unit(0)]).unwrap(), qi(0));
        let xyz = xy.wedge(&gen1(2)).unwrap();
        assert_eq!(xyz.evaluate(&[unit(0), unit(1), unit(2)]).unwrap(), q(1, 6));
        assert!(matches!(
            xyz.evaluate(&[unit(0)]),
            Err(FormError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn text_roundtrip() {
        let labels = ["x", "y", "z"];
        let f = Form::parse("3/2 x1^y2 - z1 + 2", &labels, 2).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f.display_with(&labels), "2 + 3/2 x1^y2 - z1");
        assert_eq!(
            Form::parse(&f.display_with(&labels), &labels, 2).unwrap(),
            f
        );
        assert_eq!(
            Form::parse("y^x", &labels, 1).unwrap(),
            Form::parse("-x^y", &labels, 1).unwrap()
        );
        assert!(Form::parse("x3", &labels, 2).is_err());
        assert!(Form::parse("w1", &labels, 2).is_err());
        let digits = ["a12", "b"];
        let g = Form::parse("a12_2^b1", &digits, 2).unwrap();
        assert_eq!(
            Form::parse(&g.display_with(&digits), &digits, 2).unwrap(),
            g
        );
    }
}
