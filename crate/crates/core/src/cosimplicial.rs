//! The cosimplicial exterior algebras `Λ(C^p 𝔤^∨)`, with `C^p V = V^{p+1}`, their
//! sub-objects `Λ(Σ^p 𝔤^∨)` (tuples summing to zero), and the bicomplex differentials.
//!
//! Slots are 0-based internally and printed 1-based.

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use crate::exterior::{Form, FormError};
use crate::lie::LieAlgebra;
use crate::rational::Q;

/// Convention in force for identifying `Σ¹𝔤^∨` with `𝔤^∨`.
pub const SIGMA_CONVENTION: &str = "xi <-> (xi, -xi) = xi_1 - xi_2";
/// Convention in force for the two bicomplex differentials.
pub const DIFFERENTIAL_CONVENTION: &str = "d_I = sum_i (-1)^i d^i, d_II = (-1)^p delta";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CosimplicialError {
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("form has {got} slots, expected {expected}")]
    SlotMismatch { expected: usize, got: usize },
    #[error("form is not homogeneous of degree {0}")]
    DegreeMismatch(usize),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// An element of `Λ^q(C^p 𝔤^∨)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedElement {
    p: usize,
    q: usize,
    form: Form,
}

impl BigradedElement {
    pub fn new(p: usize, q: usize, form: Form) -> Result<Self, CosimplicialError> {
        if form.slots() != p + 1 {
            return Err(CosimplicialError::SlotMismatch {
                expected: p + 1,
                got: form.slots(),
            });
        }
        if !form.is_zero() && form.degree() != Some(q) {
            return Err(CosimplicialError::DegreeMismatch(q));
        }
        Ok(BigradedElement { p, q, form })
    }

    pub fn zero(dim: usize, p: usize, q: usize) -> Self {
        BigradedElement {
            p,
            q,
            form: Form::zero(dim, p + 1),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn into_form(self) -> Form {
        self.form
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero()
    }

    pub fn scale(&self, s: &Q) -> Self {
        BigradedElement {
            form: self.form.scale(s),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &BigradedElement) -> Result<Self, CosimplicialError> {
        self.form.same_space(&other.form)?;
        if self.q != other.q {
            return Err(CosimplicialError::DegreeMismatch(self.q));
        }
        Ok(BigradedElement {
            form: &self.form + &other.form,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &BigradedElement) -> Result<Self, CosimplicialError> {
        self.add(&other.scale(&-Q::one()))
    }
}

/// `d^i`: inserts a zero component at position `i`, for `0 ≤ i ≤ p + 1`.
pub fn coface(i: usize, e: &BigradedElement) -> Result<BigradedElement, CosimplicialError> {
    if i > e.p + 1 {
        return Err(CosimplicialError::IndexOutOfRange {
            index: i,
            max: e.p + 1,
        });
    }
    let dim = e.form.dim();
    let form = e.form.relabel(e.p + 2, |g| {
        let (b, s) = (g % dim, g / dim);
        let s2 = if s < i { s } else { s + 1 };
        s2 * dim + b
    });
    Ok(BigradedElement {
        p: e.p + 1,
        q: e.q,
        form,
    })
}

/// `s^i`: adds components `i` and `i + 1`, for `0 ≤ i < p`.
pub fn codegeneracy(i: usize, e: &BigradedElement) -> Result<BigradedElement, CosimplicialError> {
    if e.p == 0 || i >= e.p {
        return Err(CosimplicialError::IndexOutOfRange {
            index: i,
            max: e.p.saturating_sub(1),
        });
    }
    let dim = e.form.dim();
    // Linear but not injective on generators, so go through the multiplicative extension.
    let images: Vec<Form> = (0..e.form.generator_count())
        .map(|g| {
            let (b, s) = (g % dim, g / dim);
            let s2 = if s <= i { s } else { s - 1 };
            Form::generator(dim, e.p, b, s2)
        })
        .collect();
    let form = if e.form.is_zero() {
        Form::zero(dim, e.p)
    } else {
        e.form.substitute(&images)
    };
    Ok(BigradedElement {
        p: e.p - 1,
        q: e.q,
        form,
    })
}

/// `∂_I = Σ_{i=0}^{p+1} (-1)^i d^i`.
pub fn d_i(e: &BigradedElement) -> BigradedElement {
    let mut out = Form::zero(e.form.dim(), e.p + 2);
    for i in 0..=e.p + 1 {
        let f = coface(i, e).expect("index in range").form;
        out = if i % 2 == 0 { &out + &f } else { &out - &f };
    }
    BigradedElement {
        p: e.p + 1,
        q: e.q,
        form: out,
    }
}

/// `∂_II = (-1)^p δ`, with `δ` acting on each component.
pub fn d_ii(e: &BigradedElement, g: &LieAlgebra) -> Result<BigradedElement, CosimplicialError> {
    let mut form = e.form.ce_differential(g)?;
    if e.p % 2 == 1 {
        form = -&form;
    }
    Ok(BigradedElement {
        p: e.p,
        q: e.q + 1,
        form,
    })
}

/// Rewrites a form on `C^p` in the coordinates `g_s = e_s - e_p` (`s < p`) and `e_p`: the
/// generator in slot `s < p` of the result stands for `g_s`, the one in slot `p` for `e_p`.
pub fn to_sigma_coordinates(form: &Form) -> Form {
    let (dim, slots) = (form.dim(), form.slots());
    let last = slots - 1;
    let images: Vec<Form> = (0..form.generator_count())
        .map(|g| {
            let (b, s) = (g % dim, g / dim);
            let own = Form::generator(dim, slots, b, s);
            if s == last {
                own
            } else {
                &own + &Form::generator(dim, slots, b, last)
            }
        })
        .collect();
    form.substitute(&images)
}

/// Inverse of [`to_sigma_coordinates`].
pub fn from_sigma_coordinates(form: &Form) -> Form {
    let (dim, slots) = (form.dim(), form.slots());
    let last = slots - 1;
    let images: Vec<Form> = (0..form.generator_count())
        .map(|g| {
            let (b, s) = (g % dim, g / dim);
            let own = Form::generator(dim, slots, b, s);
            if s == last {
                own
            } else {
                &own - &Form::generator(dim, slots, b, last)
            }
        })
        .collect();
    form.substitute(&images)
}

/// Whether `e` lies in `Λ^q(Σ^p 𝔤^∨)`, i.e. its Σ-coordinate expansion avoids the last slot.
pub fn is_in_sigma(e: &BigradedElement) -> bool {
    sigma_part(&e.form).is_some()
}

/// The coordinates of `form` in `Λ(Σ^p)`, as a form whose generators in slots `0..p` stand
/// for `g_s`; `None` when `form` is not in `Λ(Σ^p)`.
pub fn sigma_part(form: &Form) -> Option<Form> {
    let dim = form.dim();
    let last = form.slots() - 1;
    let converted = to_sigma_coordinates(form);
    let mask_last: u128 = ((1u128 << dim) - 1) << (last * dim);
    converted
        .terms()
        .keys()
        .all(|&m| m & mask_last == 0)
        .then_some(converted)
}

/// Reads a form on `Σ¹` (two slots) as a form on `𝔤^∨` through `ξ ↦ ξ_1 − ξ_2`.
pub fn sigma_one_to_dual(form: &Form) -> Option<Form> {
    assert_eq!(form.slots(), 2);
    let g = sigma_part(form)?;
    Some(Form::from_terms(form.dim(), 1, g.into_terms()))
}

/// Embeds a form on `𝔤^∨` into `Λ(Σ¹𝔤^∨)` through `ξ ↦ ξ_1 − ξ_2`.
pub fn dual_to_sigma_one(form: &Form) -> Form {
    assert_eq!(form.slots(), 1);
    let g = Form::from_terms(
        form.dim(),
        2,
        form.terms().iter().map(|(&m, c)| (m, c.clone())),
    );
    from_sigma_coordinates(&g)
}

/// The entries `a^{p,q}`, `p + q = 2d`, `1 ≤ p ≤ d`, of a solution of the transgression
/// recurrence `∂_II a^{p,q} = ∂_I a^{p-1,q+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransgressionChain {
    d: usize,
    entries: BTreeMap<usize, BigradedElement>,
}

impl TransgressionChain {
    pub(crate) fn new(d: usize, entries: BTreeMap<usize, BigradedElement>) -> Self {
        debug_assert!(entries.iter().all(|(&p, e)| e.p == p && e.q == 2 * d - p));
        TransgressionChain { d, entries }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// `a^{p, 2d - p}`.
    pub fn entry(&self, p: usize) -> Option<&BigradedElement> {
        self.entries.get(&p)
    }

    pub fn entries(&self) -> impl Iterator<Item = &BigradedElement> {
        self.entries.values().rev()
    }

    /// Checks `∂_II a^{p,q} = ∂_I a^{p-1,q+1}` for `2 ≤ p ≤ d`, `∂_I a^{d,d} = 0` and that every
    /// entry lies in `Σ`.
    pub fn satisfies_recurrence(&self, g: &LieAlgebra) -> bool {
        let Some(top) = self.entries.get(&self.d) else {
            return false;
        };
        if !d_i(top).is_zero() {
            return false;
        }
        (2..=self.d).all(|p| {
            let (Some(hi), Some(lo)) = (self.entries.get(&p), self.entries.get(&(p - 1))) else {
                return false;
            };
            d_ii(hi, g).map(|x| x.form) == Ok(d_i(lo).form)
        }) && self.entries.values().all(is_in_sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn el(p: usize, q: usize, form: Form) -> BigradedElement {
        BigradedElement::new(p, q, form).unwrap()
    }

    #[test]
    fn cofaces_insert_zero() {
        // one-dimensional space, the degree-one element m0 in slot 0 of C^0
        let m0 = el(0, 1, Form::generator(1, 1, 0, 0));
        assert_eq!(coface(0, &m0).unwrap().form, Form::generator(1, 2, 0, 1));
        assert_eq!(coface(1, &m0).unwrap().form, Form::generator(1, 2, 0, 0));
        assert!(matches!(
            coface(2, &m0),
            Err(CosimplicialError::IndexOutOfRange { .. })
        ));
        assert!(coface(0, &BigradedElement::zero(3, 1, 2))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn codegeneracy_inverts_coface() {
        let f = &Form::from_generators(2, 2, &[0, 3], qi(2))
            - &Form::generator(2, 2, 1, 0)
                .wedge(&Form::generator(2, 2, 0, 1))
                .unwrap();
        let e = el(1, 2, f);
        for j in 0..=1 {
            for i in [j, j + 1] {
                let back = codegeneracy(j, &coface(i, &e).unwrap()).unwrap();
                assert_eq!(back, e, "s^{j} d^{i}");
            }
        }
    }

    #[test]
    fn sigma_membership() {
        let x = |s| Form::generator(3, 3, 0, s);
        assert!(is_in_sigma(&el(2, 1, &x(1) - &x(2))));
        assert!(!is_in_sigma(&el(2, 1, x(0))));
        let f = Form::parse("x1^y2 - 2 z1", &["x", "y", "z"], 2).unwrap();
        assert_eq!(from_sigma_coordinates(&to_sigma_coordinates(&f)), f);
    }

    #[test]
    fn sigma_one_identification() {
        let xy = Form::from_generators(3, 1, &[0, 1], qi(3));
        let emb = dual_to_sigma_one(&xy);
        let labels = ["x", "y", "z"];
        assert_eq!(
            emb.display_with(&labels),
            "3 x1^y1 - 3 x1^y2 + 3 y1^x2 + 3 x2^y2"
        );
        assert_eq!(sigma_one_to_dual(&emb), Some(xy));
    }
}
