//! From an invariant polynomial to a Chevalley–Eilenberg representative of its image under
//! the edge map `H^{2d}(BG) → H^{2d-1}_pr(G)`.
//!
//! 1. symmetrize `a ∈ Sym^d 𝔤^∨` into `⊗^d 𝔤^∨`;
//! 2. send the tensor to `a^{d,d} ∈ Λ^d(Σ^d 𝔤^∨)` by the inverse Alexander–Whitney map;
//! 3. solve `∂_I a^{p-1,q+1} = ∂_II a^{p,q}` for `p = d, …, 2`;
//! 4. read `a^{1,2d-1}` off through `Σ¹𝔤^∨ ≅ 𝔤^∨`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cosimplicial::{
    d_i, d_ii, from_sigma_coordinates, sigma_one_to_dual, sigma_part, BigradedElement,
    CosimplicialError, TransgressionChain,
};
use crate::exterior::{generators_of, monomials, sort_generators, Form, FormError, Monomial};
use crate::lie::{InvariantPolynomial, LieAlgebra};
use crate::linalg::{Echelon, Insertion, SparseVec};
use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransgressionError {
    #[error("polynomial is not invariant")]
    NotInvariant,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomial of degree 0 has no transgression")]
    DegreeZero,
    #[error("polynomial lives on {got} variables, the algebra has dimension {expected}")]
    VariableCount { expected: usize, got: usize },
    #[error("top entry is not closed under the first differential")]
    TopNotClosed,
    #[error("no solution for the entry at p = {p}")]
    UnsolvableSystem { p: usize },
    #[error("form is not closed")]
    NotClosed,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Cosimplicial(#[from] CosimplicialError),
}

/// A symmetric tensor in `⊗^d 𝔤^∨`, keyed by tuples of dual-basis indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorRep {
    dim: usize,
    d: usize,
    terms: BTreeMap<Vec<usize>, Q>,
}

impl TensorRep {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Q> {
        &self.terms
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|(idx, c)| {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            multiset_permutations(&sorted)
                .iter()
                .all(|perm| self.terms.get(perm) == Some(c))
        })
    }

    /// `Σ T_idx ∏_k v[idx_k]`.
    pub fn evaluate_diagonal(&self, v: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(idx, c)| idx.iter().fold(c.clone(), |acc, &i| acc * &v[i]))
            .sum()
    }

    /// Text such as `-x(x)x - 1/2 y(x)z - 1/2 z(x)y`.
    pub fn display_with(&self, labels: &[impl AsRef<str>]) -> String {
        crate::rational::join_terms(self.terms.iter().map(|(idx, c)| {
            let parts: Vec<&str> = idx.iter().map(|&i| labels[i].as_ref()).collect();
            (c, parts.join("(x)"))
        }))
    }
}

fn multiset_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let mut i = 0;
        while i < rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, v);
            i += 1;
            while i < rest.len() && rest[i] == v {
                i += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut sorted.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// The image of `p` under `Sym^d 𝔤^∨ ↪ ⊗^d 𝔤^∨`: each monomial is spread evenly over its
/// distinct orderings.
pub fn symmetrize(p: &InvariantPolynomial) -> TensorRep {
    let poly = p.poly();
    let mut terms = BTreeMap::new();
    for (exps, c) in poly.terms() {
        let idx: Vec<usize> = exps
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect();
        let perms = multiset_permutations(&idx);
        let share = c / Q::from_integer(BigInt::from(perms.len()));
        for perm in perms {
            terms.insert(perm, share.clone());
        }
    }
    TensorRep {
        dim: poly.nvars(),
        d: p.degree(),
        terms,
    }
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * Q::from_integer(BigInt::from(k)))
}

/// `a^{d,d} = d! Σ_idx T_idx ι_1(ξ_{idx_1}) ∧ … ∧ ι_d(ξ_{idx_d})` where `ι_k(ξ) = ξ_{k-1} − ξ_k`
/// places `ξ` along the `k`-th edge of the spine of the `d`-simplex. Because `T` is symmetric
/// this is the sum over all ways of distributing the tensor factors over the spine.
pub fn inverse_alexander_whitney(t: &TensorRep) -> BigradedElement {
    let (dim, d) = (t.dim, t.d);
    let slots = d + 1;
    let edge = |b: usize, k: usize| {
        &Form::generator(dim, slots, b, k - 1) - &Form::generator(dim, slots, b, k)
    };
    let scale = factorial(d);
    let mut out = Form::zero(dim, slots);
    for (idx, c) in &t.terms {
        let mut acc = Form::constant(dim, slots, c * &scale);
        for (k, &b) in idx.iter().enumerate() {
            acc = acc.wedge(&edge(b, k + 1)).expect("same space");
        }
        out = &out + &acc;
    }
    BigradedElement::new(d, d, out).expect("degree d on d + 1 slots")
}

/// Order in which candidate columns are offered to the elimination; it decides which
/// particular solution is returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotOrder {
    Lexicographic,
    Reversed,
    Shuffled(u64),
}

impl PivotOrder {
    fn arrange(self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        match self {
            PivotOrder::Lexicographic => {}
            PivotOrder::Reversed => order.reverse(),
            PivotOrder::Shuffled(seed) => order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        }
        order
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Row {
    Face(Monomial),
    Action(usize, Monomial),
}

/// The coadjoint action of `b_i` as a derivation on `Λ(C^p 𝔤^∨)`, acting in every slot.
pub fn coadjoint_action(g: &LieAlgebra, i: usize, form: &Form) -> Form {
    let dim = g.dim();
    let mut terms = SparseVec::new();
    for (&m, c) in form.terms() {
        let gens: Vec<usize> = generators_of(m).collect();
        for (pos, &gen) in gens.iter().enumerate() {
            let (k, s) = (gen % dim, gen / dim);
            for j in 0..dim {
                let cst = g.structure_constant(i, j, k);
                if cst.is_zero() {
                    continue;
                }
                let mut replaced = gens.clone();
                replaced[pos] = s * dim + j;
                if let Some((m2, neg)) = sort_generators(&replaced) {
                    let v = -(c * cst);
                    crate::linalg::add_to(&mut terms, &m2, if neg { -v } else { v });
                }
            }
        }
    }
    Form::from_terms(form.dim(), form.slots(), terms)
}

/// Solves the recurrence downward from `top = a^{d,d}`.
///
/// At each step the unknown `a^{p-1,q+1}` is sought in `Λ^{q+1}(Σ^{p-1} 𝔤^∨)`, written in the
/// coordinates `g_s = e_s − e_{p-1}`, and constrained to be invariant under the diagonal
/// coadjoint action. The right-hand side is invariant whenever `top` is, and the constraint
/// keeps every step inside the invariant part of the complex where the system is solvable.
pub fn solve_recurrence(
    top: &BigradedElement,
    g: &LieAlgebra,
    order: PivotOrder,
) -> Result<TransgressionChain, TransgressionError> {
    let d = top.p();
    if top.q() != d {
        return Err(CosimplicialError::DegreeMismatch(d).into());
    }
    if !d_i(top).is_zero() {
        return Err(TransgressionError::TopNotClosed);
    }
    let dim = g.dim();
    let mut entries = BTreeMap::new();
    entries.insert(d, top.clone());
    let mut current = top.clone();
    for p in (2..=d).rev() {
        let q = 2 * d - p;
        let rhs = d_ii(&current, g)?;
        let next = if rhs.is_zero() {
            BigradedElement::zero(dim, p - 1, q + 1)
        } else {
            if sigma_part(rhs.form()).is_none() {
                return Err(TransgressionError::UnsolvableSystem { p: p - 1 });
            }
            let columns = monomials((p - 1) * dim, q + 1);
            let mut ech: Echelon<Row> = Echelon::with_tracking();
            for &c in &order.arrange(columns.len()) {
                let g_form = Form::from_terms(dim, p, [(columns[c], Q::one())]);
                let mut col = SparseVec::new();
                let face = d_i(&BigradedElement::new(
                    p - 1,
                    q + 1,
                    from_sigma_coordinates(&g_form),
                )?);
                for (&m, v) in face.form().terms() {
                    col.insert(Row::Face(m), v.clone());
                }
                for b in 0..dim {
                    for (&m, v) in coadjoint_action(g, b, &g_form).terms() {
                        col.insert(Row::Action(b, m), v.clone());
                    }
                }
                ech.insert(col, c);
            }
            let target: SparseVec<Row> = rhs
                .form()
                .terms()
                .iter()
                .map(|(&m, v)| (Row::Face(m), v.clone()))
                .collect();
            let combo = ech
                .solve(&target)
                .ok_or(TransgressionError::UnsolvableSystem { p: p - 1 })?;
            let g_form = Form::from_terms(dim, p, combo.into_iter().map(|(c, v)| (columns[c], v)));
            BigradedElement::new(p - 1, q + 1, from_sigma_coordinates(&g_form))?
        };
        entries.insert(p - 1, next.clone());
        current = next;
    }
    Ok(TransgressionChain::new(d, entries))
}

/// The full output of the pipeline.
#[derive(Clone, Debug)]
pub struct Transgression {
    pub tensor: TensorRep,
    pub chain: TransgressionChain,
    pub class: CohomologyClass,
}

/// Runs all four steps with the given pivot order.
pub fn transgress(
    p: &InvariantPolynomial,
    g: &LieAlgebra,
    order: PivotOrder,
) -> Result<Transgression, TransgressionError> {
    if p.poly().nvars() != g.dim() {
        return Err(TransgressionError::VariableCount {
            expected: g.dim(),
            got: p.poly().nvars(),
        });
    }
    if p.degree() == 0 {
        return Err(TransgressionError::DegreeZero);
    }
    if !g.is_invariant(p) {
        return Err(TransgressionError::NotInvariant);
    }
    let tensor = symmetrize(p);
    let top = inverse_alexander_whitney(&tensor);
    let chain = solve_recurrence(&top, g, order)?;
    let a1 = chain.entry(1).expect("chain reaches p = 1");
    let rep = sigma_one_to_dual(a1.form()).ok_or(TransgressionError::UnsolvableSystem { p: 1 })?;
    let class = CohomologyClass::with_degree(g, 2 * p.degree() - 1, rep)?;
    Ok(Transgression {
        tensor,
        chain,
        class,
    })
}

/// The class `ε₂^{1,2d-1}(p)` in `H^{2d-1}` of the Chevalley–Eilenberg complex.
pub fn edge_map(
    p: &InvariantPolynomial,
    g: &LieAlgebra,
) -> Result<CohomologyClass, TransgressionError> {
    transgress(p, g, PivotOrder::Lexicographic).map(|t| t.class)
}

fn sparse(form: &Form) -> SparseVec<Monomial> {
    form.terms().iter().map(|(&m, c)| (m, c.clone())).collect()
}

/// The span of `δ(Λ^{q-1} 𝔤^∨)` inside `Λ^q 𝔤^∨`.
pub fn coboundaries(g: &LieAlgebra, q: usize) -> Echelon<Monomial> {
    let mut ech = Echelon::new();
    if q == 0 {
        return ech;
    }
    for (t, m) in monomials(g.dim(), q - 1).into_iter().enumerate() {
        let f = Form::from_terms(g.dim(), 1, [(m, Q::one())]);
        ech.insert(sparse(&f.ce_differential(g).expect("same dimension")), t);
    }
    ech
}

/// A class in `H^q` of the Chevalley–Eilenberg complex.
#[derive(Clone, Debug)]
pub struct CohomologyClass {
    degree: usize,
    representative: Form,
    boundaries: Arc<Echelon<Monomial>>,
}

impl CohomologyClass {
    /// The class of a closed homogeneous form on `𝔤^∨`; the zero form gets degree 0 unless
    /// built with [`CohomologyClass::zero`].
    pub fn new(g: &LieAlgebra, representative: Form) -> Result<Self, TransgressionError> {
        let degree = representative.degree().unwrap_or(0);
        Self::with_degree(g, degree, representative)
    }

    pub fn zero(g: &LieAlgebra, degree: usize) -> Self {
        Self::with_degree(g, degree, Form::zero(g.dim(), 1)).expect("zero is closed")
    }

    pub fn with_degree(
        g: &LieAlgebra,
        degree: usize,
        representative: Form,
    ) -> Result<Self, TransgressionError> {
        if representative.slots() != 1 || representative.dim() != g.dim() {
            return Err(FormError::DimensionMismatch {
                left_dim: representative.dim(),
                left_slots: representative.slots(),
                right_dim: g.dim(),
                right_slots: 1,
            }
            .into());
        }
        if !representative.is_zero() && representative.degree() != Some(degree) {
            return Err(TransgressionError::NotHomogeneous);
        }
        if !representative.ce_differential(g)?.is_zero() {
            return Err(TransgressionError::NotClosed);
        }
        Ok(CohomologyClass {
            degree,
            representative,
            boundaries: Arc::new(coboundaries(g, degree)),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn representative(&self) -> &Form {
        &self.representative
    }

    /// Canonical representative modulo coboundaries.
    pub fn normal_form(&self) -> Form {
        let (r, _) = self.boundaries.reduce(&sparse(&self.representative));
        Form::from_terms(self.representative.dim(), 1, r)
    }

    pub fn is_zero(&self) -> bool {
        self.boundaries.contains(&sparse(&self.representative))
    }

    pub fn scale(&self, s: &Q) -> Self {
        CohomologyClass {
            representative: self.representative.scale(s),
            ..self.clone()
        }
    }

    /// Sum of two classes of the same degree on the same algebra.
    pub fn add(&self, other: &CohomologyClass) -> Option<Self> {
        if self.degree != other.degree
            || self
                .representative
                .same_space(&other.representative)
                .is_err()
        {
            return None;
        }
        Some(CohomologyClass {
            representative: &self.representative + &other.representative,
            ..self.clone()
        })
    }
}

/// `t` with `c1 = t · c2` in cohomology, if it exists. When both classes vanish the answer
/// is 0.
pub fn classes_proportional(c1: &CohomologyClass, c2: &CohomologyClass) -> Option<Q> {
    if c1.degree != c2.degree {
        return None;
    }
    let r1 = c1.normal_form();
    let r2 = c2.normal_form();
    let Some((&lead, c)) = r2.terms().iter().next() else {
        return r1.is_zero().then(Q::zero);
    };
    let t = r1.coefficient(lead) / c;
    (r1 == r2.scale(&t)).then_some(t)
}

/// A basis of `H^q` of the Chevalley–Eilenberg complex together with the sizes of the
/// cocycle and coboundary spaces.
#[derive(Clone, Debug)]
pub struct CeCohomology {
    pub degree: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub basis: Vec<Form>,
}

impl CeCohomology {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn ce_cohomology(g: &LieAlgebra, q: usize) -> CeCohomology {
    let n = g.dim();
    let cells = monomials(n, q);
    let mut ker: Echelon<Monomial> = Echelon::with_tracking();
    let mut cocycles = Vec::new();
    for (t, &m) in cells.iter().enumerate() {
        let f = Form::from_terms(n, 1, [(m, Q::one())]);
        if let Insertion::Dependent(rel) =
            ker.insert(sparse(&f.ce_differential(g).expect("same dimension")), t)
        {
            cocycles.push(Form::from_terms(
                n,
                1,
                rel.into_iter().map(|(i, c)| (cells[i], c)),
            ));
        }
    }
    let mut quotient = coboundaries(g, q);
    let coboundary_dim = quotient.rank();
    let mut basis = Vec::new();
    for z in &cocycles {
        if let Insertion::Pivot = quotient.insert(sparse(z), 0) {
            basis.push(z.clone());
        }
    }
    CeCohomology {
        degree: q,
        cocycle_dim: cocycles.len(),
        coboundary_dim,
        basis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn symmetrizes_the_determinant() {
        let g = LieAlgebra::sl2();
        let t = symmetrize(&g.parse_polynomial("-x^2 - y*z").unwrap());
        assert_eq!(t.terms().len(), 3);
        assert_eq!(t.terms()[&vec![0, 0]], qi(-1));
        assert_eq!(t.terms()[&vec![1, 2]], q(-1, 2));
        assert_eq!(t.terms()[&vec![2, 1]], q(-1, 2));
        assert!(t.is_symmetric());
        let v = vec![qi(2), qi(3), qi(-1)];
        assert_eq!(t.evaluate_diagonal(&v), qi(-1));
    }

    #[test]
    fn multiset_permutation_counts() {
        assert_eq!(multiset_permutations(&[0, 0, 1]).len(), 3);
        assert_eq!(multiset_permutations(&[0, 1, 2]).len(), 6);
        assert_eq!(multiset_permutations(&[]).len(), 1);
    }

    #[test]
    fn degree_one_tensor_embeds_unchanged() {
        let g = LieAlgebra::abelian(2);
        let p = g.parse_polynomial("t1").unwrap();
        let top = inverse_alexander_whitney(&symmetrize(&p));
        let x = |s| Form::generator(2, 2, 0, s);
        assert_eq!(*top.form(), &x(0) - &x(1));
    }

    #[test]
    fn sl2_cohomology() {
        let g = LieAlgebra::sl2();
        let dims: Vec<usize> = (0..=3).map(|q| ce_cohomology(&g, q).dim()).collect();
        assert_eq!(dims, vec![1, 0, 0, 1]);
    }

    #[test]
    fn determinant_transgresses_to_half_eta() {
        let g = LieAlgebra::sl2();
        let p = g.parse_polynomial("-x^2 - y*z").unwrap();
        let class = edge_map(&p, &g).unwrap();
        let eta = CohomologyClass::new(&g, g.cartan_three_form()).unwrap();
        assert_eq!(classes_proportional(&class, &eta), Some(q(1, 2)));
    }
}
