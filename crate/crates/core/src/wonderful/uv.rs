use std::fmt;

use super::WonderfulError;
use crate::poly::Poly;
use crate::rational::{q, qi, Q};

/// A polynomial in `u_1..u_l, v_1..v_l`, stored in those variables (in that order).
///
/// The coordinates `x_i = u_i - v_i`, `y_i = u_i + v_i` are available through
/// [`UVPolynomial::to_xy`] and [`UVPolynomial::from_xy`], where the `x`'s come first.
/// Cohomological degree is twice the polynomial degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UVPolynomial {
    rank: usize,
    poly: Poly,
}

pub fn uv_names(l: usize) -> Vec<String> {
    (1..=l)
        .map(|i| format!("u{i}"))
        .chain((1..=l).map(|i| format!("v{i}")))
        .collect()
}

pub fn xy_names(l: usize) -> Vec<String> {
    (1..=l)
        .map(|i| format!("x{i}"))
        .chain((1..=l).map(|i| format!("y{i}")))
        .collect()
}

impl UVPolynomial {
    pub fn new(rank: usize, poly: Poly) -> Self {
        assert_eq!(poly.nvars(), 2 * rank);
        UVPolynomial { rank, poly }
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(rank, Poly::zero(2 * rank))
    }

    /// `p(u)` for `p` in `l` variables.
    pub fn from_u(p: &Poly) -> Self {
        let l = p.nvars();
        let images: Vec<Poly> = (0..l).map(|i| Poly::var(2 * l, i)).collect();
        Self::new(l, p.substitute(&images))
    }

    /// `p(v)` for `p` in `l` variables.
    pub fn from_v(p: &Poly) -> Self {
        let l = p.nvars();
        let images: Vec<Poly> = (0..l).map(|i| Poly::var(2 * l, l + i)).collect();
        Self::new(l, p.substitute(&images))
    }

    /// Converts a polynomial in `x_1..x_l, y_1..y_l`.
    pub fn from_xy(p: &Poly) -> Self {
        let l = p.nvars() / 2;
        let u = |i| Poly::var(2 * l, i);
        let v = |i| Poly::var(2 * l, l + i);
        let images: Vec<Poly> = (0..l)
            .map(|i| &u(i) - &v(i))
            .chain((0..l).map(|i| &u(i) + &v(i)))
            .collect();
        Self::new(l, p.substitute(&images))
    }

    /// Parses text in any of the names `u_i, v_i, x_i, y_i`.
    pub fn parse(rank: usize, text: &str) -> Result<Self, WonderfulError> {
        let mut names = uv_names(rank);
        names.extend(xy_names(rank));
        let p = Poly::parse(text, &names)?;
        let l = rank;
        let u = |i| Poly::var(2 * l, i);
        let v = |i| Poly::var(2 * l, l + i);
        let images: Vec<Poly> = (0..2 * l)
            .map(|i| Poly::var(2 * l, i))
            .chain((0..l).map(|i| &u(i) - &v(i)))
            .chain((0..l).map(|i| &u(i) + &v(i)))
            .collect();
        Ok(Self::new(rank, p.substitute(&images)))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.homogeneous_degree()
    }

    /// The same polynomial in `x_1..x_l, y_1..y_l`.
    pub fn to_xy(&self) -> Poly {
        let l = self.rank;
        let x = |i| Poly::var(2 * l, i);
        let y = |i| Poly::var(2 * l, l + i);
        let half = q(1, 2);
        let images: Vec<Poly> = (0..l)
            .map(|i| (&x(i) + &y(i)).scale(&half))
            .chain((0..l).map(|i| (&y(i) - &x(i)).scale(&half)))
            .collect();
        self.poly.substitute(&images)
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.rank, self.poly.scale(s))
    }

    pub fn display_uv(&self) -> String {
        self.poly.display_with(&uv_names(self.rank))
    }

    pub fn display_xy(&self) -> String {
        self.to_xy().display_with(&xy_names(self.rank))
    }

    /// Rank one only: the image in `H*(P^1 × P^1)` under `u ↦ σ⊗1`, `v ↦ -(1⊗σ)`, as
    /// coefficients of `1⊗1`, `σ⊗1`, `1⊗σ`, `σ⊗σ`.
    pub fn a1_translation(&self) -> Option<[Q; 4]> {
        if self.rank != 1 {
            return None;
        }
        let mut out = [qi(0), qi(0), qi(0), qi(0)];
        for (e, c) in self.poly.terms() {
            let (i, j) = (e[0], e[1]);
            if i > 1 || j > 1 {
                continue;
            }
            let sign = if j == 1 { -c.clone() } else { c.clone() };
            out[(i + 2 * j) as usize] += sign;
        }
        Some(out)
    }
}

/// Renders the output of [`UVPolynomial::a1_translation`].
pub fn display_a1_translation(coeffs: &[Q; 4]) -> String {
    let names = ["1⊗1", "σ⊗1", "1⊗σ", "σ⊗σ"];
    let mut terms = Poly::zero(4);
    for (k, c) in coeffs.iter().enumerate() {
        terms = &terms + &Poly::var(4, k).scale(c);
    }
    if terms.is_zero() {
        return "0".into();
    }
    terms.display_with(&names)
}

impl fmt::Display for UVPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_uv())
    }
}
