//! Finite-dimensional Lie algebras over Q given by structure constants.

use serde::Deserialize;
use thiserror::Error;

use num_traits::{One, Zero};

use crate::exterior::Form;
use crate::linalg::Matrix;
use crate::poly::{ParsePolyError, Poly};
use crate::rational::{parse_rational, qi, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("a Lie algebra needs a positive dimension")]
    Empty,
    #[error("structure constant table is not {0}x{0}x{0}")]
    Shape(usize),
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("antisymmetry violated at ({i}, {j}, {k})")]
    AntisymmetryViolation { i: usize, j: usize, k: usize },
    #[error("Jacobi identity violated at ({i}, {j}, {k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("basis index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("bad coefficient {0:?}")]
    BadCoefficient(String),
    #[error("invalid algebra file: {0}")]
    Json(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error(transparent)]
    Polynomial(#[from] ParsePolyError),
    #[error("matrices do not close under the commutator")]
    NotClosed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    dual_labels: Vec<String>,
    /// `c[(i * n + j) * n + k]` is the coefficient of `b_k` in `[b_i, b_j]`.
    constants: Vec<Q>,
    matrices: Option<Vec<Matrix>>,
}

/// A symmetric bilinear form on the algebra, in the basis order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymBilinearForm {
    matrix: Matrix,
}

impl SymBilinearForm {
    pub fn new(matrix: Matrix) -> Option<Self> {
        (matrix.rows() == matrix.cols() && matrix.transpose() == matrix)
            .then_some(SymBilinearForm { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn eval(&self, i: usize, j: usize) -> &Q {
        &self.matrix[(i, j)]
    }
}

#[derive(Deserialize)]
struct AlgebraFile {
    labels: Vec<String>,
    #[serde(default)]
    dual_labels: Option<Vec<String>>,
    #[serde(default)]
    brackets: Vec<BracketEntry>,
}

/// `(i, j, [(k, c_k), ...])` for `[b_i, b_j] = Σ c_k b_k`.
type BracketEntry = (usize, usize, Vec<(usize, Coefficient)>);

#[derive(Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Int(i64),
    Text(String),
}

fn default_dual_labels(labels: &[String]) -> Vec<String> {
    labels.iter().map(|l| format!("d{l}")).collect()
}

impl LieAlgebra {
    /// Validates the table `table[i][j][k]` (coefficient of `b_k` in `[b_i, b_j]`).
    pub fn from_structure_constants(
        table: Vec<Vec<Vec<Q>>>,
        labels: Vec<String>,
    ) -> Result<Self, LieError> {
        let dual = default_dual_labels(&labels);
        Self::with_dual_labels(table, labels, dual)
    }

    pub fn with_dual_labels(
        table: Vec<Vec<Vec<Q>>>,
        labels: Vec<String>,
        dual_labels: Vec<String>,
    ) -> Result<Self, LieError> {
        let n = table.len();
        if n == 0 {
            return Err(LieError::Empty);
        }
        if table
            .iter()
            .any(|row| row.len() != n || row.iter().any(|v| v.len() != n))
        {
            return Err(LieError::Shape(n));
        }
        for got in [labels.len(), dual_labels.len()] {
            if got != n {
                return Err(LieError::LabelCount { expected: n, got });
            }
        }
        let constants = table.into_iter().flatten().flatten().collect();
        let g = LieAlgebra {
            labels,
            dual_labels,
            constants,
            matrices: None,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), LieError> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.structure_constant(i, j, k) != &-self.structure_constant(j, i, k) {
                        return Err(LieError::AntisymmetryViolation { i, j, k });
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut total = vec![Q::zero(); n];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for m in 0..n {
                            let s = self.structure_constant(a, b, m);
                            if s.is_zero() {
                                continue;
                            }
                            for (t, out) in total.iter_mut().enumerate() {
                                *out += s * self.structure_constant(m, c, t);
                            }
                        }
                    }
                    if total.iter().any(|x| !x.is_zero()) {
                        return Err(LieError::JacobiViolation { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Reads the JSON format `{"labels": [...], "dual_labels": [...], "brackets": [[i, j, [[k, "p/q"], ...]], ...]}`.
    /// Missing brackets are zero and `[b_j, b_i] = -[b_i, b_j]` is filled in.
    pub fn from_json(text: &str) -> Result<Self, LieError> {
        let file: AlgebraFile =
            serde_json::from_str(text).map_err(|e| LieError::Json(e.to_string()))?;
        let n = file.labels.len();
        if n == 0 {
            return Err(LieError::Empty);
        }
        let mut given: Vec<Vec<Vec<Option<Q>>>> = vec![vec![vec![None; n]; n]; n];
        for (i, j, terms) in file.brackets {
            for idx in [i, j] {
                if idx >= n {
                    return Err(LieError::IndexOutOfRange(idx));
                }
            }
            for (k, c) in terms {
                if k >= n {
                    return Err(LieError::IndexOutOfRange(k));
                }
                let c = match c {
                    Coefficient::Int(v) => qi(v),
                    Coefficient::Text(s) => {
                        parse_rational(&s).ok_or(LieError::BadCoefficient(s))?
                    }
                };
                let slot = &mut given[i][j][k];
                *slot = Some(slot.take().unwrap_or_else(Q::zero) + c);
            }
        }
        let mut table = vec![vec![vec![Q::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table[i][j][k] = match (&given[i][j][k], &given[j][i][k]) {
                        (Some(a), Some(b)) if *a != -b.clone() => {
                            return Err(LieError::AntisymmetryViolation { i, j, k })
                        }
                        (Some(a), _) => a.clone(),
                        (None, Some(b)) => -b.clone(),
                        (None, None) => Q::zero(),
                    };
                }
            }
        }
        let dual = file
            .dual_labels
            .unwrap_or_else(|| default_dual_labels(&file.labels));
        Self::with_dual_labels(table, file.labels, dual)
    }

    /// The Lie algebra spanned by square matrices closed under the commutator.
    pub fn from_matrices(
        matrices: Vec<Matrix>,
        labels: Vec<String>,
        dual_labels: Vec<String>,
    ) -> Result<Self, LieError> {
        let n = matrices.len();
        if n == 0 {
            return Err(LieError::Empty);
        }
        let size = matrices[0].rows();
        let flat = |m: &Matrix| -> Vec<Q> { (0..size).flat_map(|r| m.row(r).to_vec()).collect() };
        let columns: Vec<Vec<Q>> = matrices.iter().map(flat).collect();
        let basis = Matrix::from_columns(size * size, &columns);
        let mut table = vec![vec![vec![Q::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let comm = matrices[i]
                    .mul(&matrices[j])
                    .add(&matrices[j].mul(&matrices[i]).scale(&-Q::one()));
                table[i][j] = basis.solve(&flat(&comm)).ok_or(LieError::NotClosed)?;
            }
        }
        let mut g = Self::with_dual_labels(table, labels, dual_labels)?;
        g.matrices = Some(matrices);
        Ok(g)
    }

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// `sl₂` in the basis `(h, e, f)` with dual coordinates `(x, y, z)`.
    pub fn sl2() -> Self {
        let m = |v: [i64; 4]| Matrix::from_i64(2, 2, &v);
        Self::from_matrices(
            vec![m([1, 0, 0, -1]), m([0, 1, 0, 0]), m([0, 0, 1, 0])],
            Self::strings(&["h", "e", "f"]),
            Self::strings(&["x", "y", "z"]),
        )
        .expect("sl2 is a Lie algebra")
    }

    /// `gl₂` in the basis `(h, e, f, c)` with `c` the identity; dual coordinates `(x, y, z, w)`.
    pub fn gl2() -> Self {
        let m = |v: [i64; 4]| Matrix::from_i64(2, 2, &v);
        Self::from_matrices(
            vec![
                m([1, 0, 0, -1]),
                m([0, 1, 0, 0]),
                m([0, 0, 1, 0]),
                m([1, 0, 0, 1]),
            ],
            Self::strings(&["h", "e", "f", "c"]),
            Self::strings(&["x", "y", "z", "w"]),
        )
        .expect("gl2 is a Lie algebra")
    }

    /// `sl₃` in the basis `(h1, h2, e12, e13, e23, e21, e31, e32)`.
    pub fn sl3() -> Self {
        let unit = |i: usize, j: usize| {
            let mut m = Matrix::zeros(3, 3);
            m[(i, j)] = Q::one();
            m
        };
        let diff = |a: Matrix, b: Matrix| a.add(&b.scale(&-Q::one()));
        let matrices = vec![
            diff(unit(0, 0), unit(1, 1)),
            diff(unit(1, 1), unit(2, 2)),
            unit(0, 1),
            unit(0, 2),
            unit(1, 2),
            unit(1, 0),
            unit(2, 0),
            unit(2, 1),
        ];
        Self::from_matrices(
            matrices,
            Self::strings(&["h1", "h2", "e12", "e13", "e23", "e21", "e31", "e32"]),
            Self::strings(&["s1", "s2", "x12", "x13", "x23", "y21", "y31", "y32"]),
        )
        .expect("sl3 is a Lie algebra")
    }

    /// The abelian Lie algebra of dimension `n`.
    pub fn abelian(n: usize) -> Self {
        let labels = (1..=n).map(|i| format!("a{i}")).collect();
        let dual = (1..=n).map(|i| format!("t{i}")).collect();
        Self::with_dual_labels(vec![vec![vec![Q::zero(); n]; n]; n], labels, dual)
            .expect("abelian algebra")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dual_labels(&self) -> &[String] {
        &self.dual_labels
    }

    /// The defining matrices when the algebra was built from a matrix basis.
    pub fn matrices(&self) -> Option<&[Matrix]> {
        self.matrices.as_deref()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Q {
        let n = self.dim();
        &self.constants[(i * n + j) * n + k]
    }

    /// Coordinates of `[u, v]`.
    pub fn bracket(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for (i, ui) in u.iter().enumerate().take(n) {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate().take(n) {
                if vj.is_zero() {
                    continue;
                }
                let uv = ui * vj;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.structure_constant(i, j, k);
                    if !c.is_zero() {
                        *o += &uv * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad b_i`: entry `(k, j)` is the coefficient of `b_k` in `[b_i, b_j]`.
    pub fn ad(&self, i: usize) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                m[(k, j)] = self.structure_constant(i, j, k).clone();
            }
        }
        m
    }

    /// `κ(u, v) = tr(ad u ∘ ad v)`.
    pub fn killing_form(&self) -> SymBilinearForm {
        let n = self.dim();
        let ads: Vec<Matrix> = (0..n).map(|i| self.ad(i)).collect();
        let mut m = Matrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let p = ads[a].mul(&ads[b]);
                let mut tr = Q::zero();
                for i in 0..n {
                    tr += &p[(i, i)];
                }
                m[(a, b)] = tr.clone();
                m[(b, a)] = tr;
            }
        }
        SymBilinearForm { matrix: m }
    }

    /// `η(u, v, w) = κ([u, v], w)`, stored with coefficient `η(b_i, b_j, b_k)` on `ξ^i∧ξ^j∧ξ^k`
    /// for `i < j < k`.
    pub fn cartan_three_form(&self) -> Form {
        let n = self.dim();
        let kappa = self.killing_form();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut v = Q::zero();
                    for m in 0..n {
                        let c = self.structure_constant(i, j, m);
                        if !c.is_zero() {
                            v += c * kappa.eval(m, k);
                        }
                    }
                    terms.push(((1u128 << i) | (1u128 << j) | (1u128 << k), v));
                }
            }
        }
        Form::from_terms(n, 1, terms)
    }

    /// The quadratic invariant `v ↦ κ(v, v)` in dual coordinates.
    pub fn killing_polynomial(&self) -> InvariantPolynomial {
        let n = self.dim();
        let kappa = self.killing_form();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                terms.push((e, kappa.eval(i, j).clone()));
            }
        }
        InvariantPolynomial::from_poly_with_degree(Poly::from_terms(n, terms), 2)
    }

    /// `v ↦ tr(v^k)` for algebras built from matrices.
    pub fn trace_power(&self, k: usize) -> Option<InvariantPolynomial> {
        let mats = self.matrices.as_ref()?;
        let n = self.dim();
        let size = mats[0].rows();
        let generic: Vec<Vec<Poly>> = (0..size)
            .map(|r| {
                (0..size)
                    .map(|c| {
                        let coeffs: Vec<Q> = mats.iter().map(|m| m[(r, c)].clone()).collect();
                        Poly::linear(&coeffs)
                    })
                    .collect()
            })
            .collect();
        let mut power: Vec<Vec<Poly>> = (0..size)
            .map(|r| {
                (0..size)
                    .map(|c| if r == c { Poly::one(n) } else { Poly::zero(n) })
                    .collect()
            })
            .collect();
        for _ in 0..k {
            power = (0..size)
                .map(|r| {
                    (0..size)
                        .map(|c| {
                            let mut acc = Poly::zero(n);
                            for (m, g) in power[r].iter().zip(generic.iter().map(|row| &row[c])) {
                                acc = &acc + &(m * g);
                            }
                            acc
                        })
                        .collect()
                })
                .collect();
        }
        let mut tr = Poly::zero(n);
        for (i, row) in power.iter().enumerate() {
            tr = &tr + &row[i];
        }
        Some(InvariantPolynomial::from_poly_with_degree(tr, k))
    }

    /// Parses a polynomial in the dual coordinates.
    pub fn parse_polynomial(&self, text: &str) -> Result<InvariantPolynomial, LieError> {
        let p = Poly::parse(text, &self.dual_labels)?;
        InvariantPolynomial::new(p)
    }

    /// The derivation by which `b_i` acts on polynomial functions: `ξ^k ↦ -Σ_j c_{ij}^k ξ^j`.
    pub fn coadjoint_action(&self, i: usize, p: &Poly) -> Poly {
        let n = self.dim();
        let images: Vec<Poly> = (0..n)
            .map(|k| {
                let coeffs: Vec<Q> = (0..n)
                    .map(|j| -self.structure_constant(i, j, k).clone())
                    .collect();
                Poly::linear(&coeffs)
            })
            .collect();
        let mut out = Poly::zero(n);
        for (k, img) in images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            out = &out + &(&p.derivative(k) * img);
        }
        out
    }

    /// Whether every basis element annihilates `p` under the coadjoint derivation.
    pub fn is_invariant(&self, p: &InvariantPolynomial) -> bool {
        p.poly.nvars() == self.dim()
            && (0..self.dim()).all(|i| self.coadjoint_action(i, &p.poly).is_zero())
    }
}

/// A homogeneous polynomial on the algebra, in dual-basis coordinates. Invariance is
/// checked separately by [`LieAlgebra::is_invariant`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPolynomial {
    degree: usize,
    poly: Poly,
}

impl InvariantPolynomial {
    /// Wraps a homogeneous polynomial; the zero polynomial gets degree 0.
    pub fn new(poly: Poly) -> Result<Self, LieError> {
        if poly.is_zero() {
            return Ok(InvariantPolynomial { degree: 0, poly });
        }
        let degree = poly.homogeneous_degree().ok_or(LieError::NotHomogeneous)?;
        Ok(InvariantPolynomial { degree, poly })
    }

    pub fn zero(nvars: usize, degree: usize) -> Self {
        InvariantPolynomial {
            degree,
            poly: Poly::zero(nvars),
        }
    }

    fn from_poly_with_degree(poly: Poly, degree: usize) -> Self {
        debug_assert!(poly.is_zero() || poly.homogeneous_degree() == Some(degree));
        InvariantPolynomial { degree, poly }
    }

    /// Overrides the degree of a zero polynomial.
    pub fn with_degree(self, degree: usize) -> Result<Self, LieError> {
        if self.poly.is_zero() || self.degree == degree {
            Ok(Self::from_poly_with_degree(self.poly, degree))
        } else {
            Err(LieError::NotHomogeneous)
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn product(&self, other: &InvariantPolynomial) -> InvariantPolynomial {
        Self::from_poly_with_degree(&self.poly * &other.poly, self.degree + other.degree)
    }

    pub fn sum(&self, other: &InvariantPolynomial) -> Result<InvariantPolynomial, LieError> {
        if self.degree != other.degree && !self.poly.is_zero() && !other.poly.is_zero() {
            return Err(LieError::NotHomogeneous);
        }
        let degree = if self.poly.is_zero() {
            other.degree
        } else {
            self.degree
        };
        Ok(Self::from_poly_with_degree(
            &self.poly + &other.poly,
            degree,
        ))
    }

    pub fn scale(&self, s: &Q) -> InvariantPolynomial {
        Self::from_poly_with_degree(self.poly.scale(s), self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn sl2_brackets() {
        let g = LieAlgebra::sl2();
        assert_eq!(g.structure_constant(0, 1, 1), &qi(2));
        assert_eq!(g.structure_constant(0, 2, 2), &qi(-2));
        assert_eq!(g.structure_constant(1, 2, 0), &qi(1));
        assert_eq!(g.structure_constant(2, 1, 0), &qi(-1));
    }

    #[test]
    fn killing_form_of_sl2() {
        let k = LieAlgebra::sl2().killing_form();
        assert_eq!(
            *k.matrix(),
            Matrix::from_i64(3, 3, &[8, 0, 0, 0, 0, 4, 0, 4, 0])
        );
        assert!(LieAlgebra::abelian(3).killing_form().matrix().is_zero());
    }

    #[test]
    fn rejects_broken_tables() {
        let mut t = vec![vec![vec![Q::zero(); 3]; 3]; 3];
        t[1][2][1] = qi(1);
        t[2][1][1] = qi(1);
        let labels = vec!["a".into(), "b".into(), "c".into()];
        assert_eq!(
            LieAlgebra::from_structure_constants(t, labels.clone()),
            Err(LieError::AntisymmetryViolation { i: 1, j: 2, k: 1 })
        );
        // [a,b] = a, [b,c] = b, [a,c] = c is antisymmetric but not Jacobi
        let mut t = vec![vec![vec![Q::zero(); 3]; 3]; 3];
        for (i, j, k) in [(0, 1, 0), (1, 2, 1), (0, 2, 2)] {
            t[i][j][k] = qi(1);
            t[j][i][k] = qi(-1);
        }
        assert!(matches!(
            LieAlgebra::from_structure_constants(t, labels),
            Err(LieError::JacobiViolation { .. })
        ));
    }

    #[test]
    fn json_roundtrip_matches_fixture() {
        let text = r#"{"labels": ["h", "e", "f"], "dual_labels": ["x", "y", "z"],
            "brackets": [[0, 1, [[1, "2"]]], [0, 2, [[2, -2]]], [1, 2, [[0, "1/1"]]]]}"#;
        let g = LieAlgebra::from_json(text).unwrap();
        let mut s = LieAlgebra::sl2();
        s.matrices = None;
        assert_eq!(g, s);
        assert!(matches!(
            LieAlgebra::from_json("{}"),
            Err(LieError::Json(_))
        ));
        let bad = r#"{"labels": ["a"], "brackets": [[0, 1, []]]}"#;
        assert_eq!(
            LieAlgebra::from_json(bad),
            Err(LieError::IndexOutOfRange(1))
        );
    }

    #[test]
    fn determinant_is_invariant() {
        let g = LieAlgebra::sl2();
        assert!(g.is_invariant(&g.parse_polynomial("-x^2 - y*z").unwrap()));
        assert!(!g.is_invariant(&g.parse_polynomial("x^2").unwrap()));
        assert!(g.is_invariant(&InvariantPolynomial::zero(3, 2)));
        // tr(X^2) = 2x^2 + 2yz = -2 det
        let tr = g.trace_power(2).unwrap();
        assert_eq!(
            *tr.poly(),
            g.parse_polynomial("2x^2 + 2y z").unwrap().poly().clone()
        );
    }

    #[test]
    fn sl3_casimirs_are_invariant() {
        let g = LieAlgebra::sl3();
        for k in 2..=3 {
            let p = g.trace_power(k).unwrap();
            assert!(!p.poly().is_zero());
            assert!(g.is_invariant(&p));
        }
        assert!(g.is_invariant(&g.killing_polynomial()));
    }

    #[test]
    fn cartan_form_of_sl2() {
        let g = LieAlgebra::sl2();
        let eta = g.cartan_three_form();
        assert_eq!(eta, Form::from_generators(3, 1, &[0, 1, 2], qi(8)));
        assert!(LieAlgebra::abelian(4).cartan_three_form().is_zero());
    }
}
