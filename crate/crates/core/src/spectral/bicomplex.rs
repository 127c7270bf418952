use std::collections::BTreeMap;

use num_traits::Zero;

use super::SpectralError;
use crate::linalg::{Matrix, Subquotient, Subspace};
use crate::rational::Q;

/// A first-quadrant bicomplex of finite-dimensional Q-vector spaces supported on
/// `0 ≤ p < width`, `0 ≤ q < height`.
///
/// `d_one(p, q)` maps `L^{p,q} → L^{p+1,q}` and `d_two(p, q)` maps `L^{p,q} → L^{p,q+1}`;
/// the two anticommute. Both are always present, with zero rows where the target lies
/// outside the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bicomplex {
    dims: Vec<Vec<usize>>,
    d_one: Vec<Vec<Matrix>>,
    d_two: Vec<Vec<Matrix>>,
}

/// Which page of the spectral sequence of the column filtration `F_p = ⊕_{p' ≥ p}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Page {
    /// `E_r` for `r ≥ 1`.
    Finite(usize),
    Infinity,
}

impl Page {
    pub const E1: Page = Page::Finite(1);
    pub const E2: Page = Page::Finite(2);
}

/// The entries `E_r^{p,q}` of one page, each a subquotient `Z_r / B_r` of `L^{p,q}`.
#[derive(Clone, Debug)]
pub struct PageData {
    page: Page,
    entries: BTreeMap<(usize, usize), Subquotient>,
}

impl PageData {
    pub fn page(&self) -> Page {
        self.page
    }

    pub fn entry(&self, p: usize, q: usize) -> Option<&Subquotient> {
        self.entries.get(&(p, q))
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.entry(p, q).map_or(0, Subquotient::dim)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Subquotient> {
        &self.entries
    }

    /// `Σ_p dim E^{p, n-p}`.
    pub fn total_dim(&self, n: usize) -> usize {
        self.entries
            .iter()
            .filter(|((p, q), _)| p + q == n)
            .map(|(_, e)| e.dim())
            .sum()
    }
}

/// One spot of a total degree: the bidegree and where its coordinates sit in `tot^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spot {
    pub p: usize,
    pub q: usize,
    pub offset: usize,
    pub len: usize,
}

impl Bicomplex {
    /// Builds and validates a bicomplex. Missing differentials are zero.
    pub fn new(
        dims: Vec<Vec<usize>>,
        d_one: BTreeMap<(usize, usize), Matrix>,
        d_two: BTreeMap<(usize, usize), Matrix>,
    ) -> Result<Self, SpectralError> {
        let width = dims.len();
        let height = dims.first().map_or(0, Vec::len);
        if dims.iter().any(|col| col.len() != height) {
            return Err(SpectralError::Shape(
                "dimension table is not rectangular".into(),
            ));
        }
        let dim = |p: usize, q: usize| {
            if p < width && q < height {
                dims[p][q]
            } else {
                0
            }
        };
        for &(p, q) in d_one.keys().chain(d_two.keys()) {
            if p >= width || q >= height {
                return Err(SpectralError::Shape(format!(
                    "differential at ({p}, {q}) outside the support"
                )));
            }
        }
        let take = |map: &BTreeMap<(usize, usize), Matrix>,
                    p: usize,
                    q: usize,
                    rows: usize|
         -> Result<Matrix, SpectralError> {
            match map.get(&(p, q)) {
                None => Ok(Matrix::zeros(rows, dim(p, q))),
                Some(m) if m.rows() == rows && m.cols() == dim(p, q) => Ok(m.clone()),
                Some(m) => Err(SpectralError::Shape(format!(
                    "differential at ({p}, {q}) is {}x{}, expected {rows}x{}",
                    m.rows(),
                    m.cols(),
                    dim(p, q)
                ))),
            }
        };
        let mut one = Vec::with_capacity(width);
        let mut two = Vec::with_capacity(width);
        for p in 0..width {
            let mut col_one = Vec::with_capacity(height);
            let mut col_two = Vec::with_capacity(height);
            for q in 0..height {
                col_one.push(take(&d_one, p, q, dim(p + 1, q))?);
                col_two.push(take(&d_two, p, q, dim(p, q + 1))?);
            }
            one.push(col_one);
            two.push(col_two);
        }
        let b = Bicomplex {
            dims,
            d_one: one,
            d_two: two,
        };
        b.validate()?;
        Ok(b)
    }

    /// All differentials zero.
    pub fn with_zero_differentials(dims: Vec<Vec<usize>>) -> Result<Self, SpectralError> {
        Self::new(dims, BTreeMap::new(), BTreeMap::new())
    }

    fn validate(&self) -> Result<(), SpectralError> {
        for p in 0..self.width() {
            for q in 0..self.height() {
                let here = (p, q);
                if p + 1 < self.width() && !self.d_one(p + 1, q).mul(self.d_one(p, q)).is_zero() {
                    return Err(SpectralError::InvalidDifferentials(format!(
                        "d_I∘d_I ≠ 0 at {here:?}"
                    )));
                }
                if q + 1 < self.height() && !self.d_two(p, q + 1).mul(self.d_two(p, q)).is_zero() {
                    return Err(SpectralError::InvalidDifferentials(format!(
                        "d_II∘d_II ≠ 0 at {here:?}"
                    )));
                }
                if p + 1 < self.width() && q + 1 < self.height() {
                    let a = self.d_two(p + 1, q).mul(self.d_one(p, q));
                    let b = self.d_one(p, q + 1).mul(self.d_two(p, q));
                    if !a.add(&b).is_zero() {
                        return Err(SpectralError::InvalidDifferentials(format!(
                            "differentials do not anticommute at {here:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.dims.len()
    }

    pub fn height(&self) -> usize {
        self.dims.first().map_or(0, Vec::len)
    }

    /// `dim L^{p,q}`, zero outside the support.
    pub fn dim(&self, p: usize, q: usize) -> usize {
        if p < self.width() && q < self.height() {
            self.dims[p][q]
        } else {
            0
        }
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    pub fn d_one(&self, p: usize, q: usize) -> &Matrix {
        &self.d_one[p][q]
    }

    pub fn d_two(&self, p: usize, q: usize) -> &Matrix {
        &self.d_two[p][q]
    }

    /// Largest total degree with a nonempty spot range.
    pub fn top_degree(&self) -> usize {
        (self.width() + self.height()).saturating_sub(2)
    }

    /// The spots of `tot^n` in increasing `p`.
    pub fn spots(&self, n: usize) -> Vec<Spot> {
        let mut out = Vec::new();
        let mut offset = 0;
        for p in 0..=n.min(self.width().saturating_sub(1)) {
            let q = n - p;
            if q >= self.height() || self.width() == 0 {
                continue;
            }
            let len = self.dims[p][q];
            out.push(Spot { p, q, offset, len });
            offset += len;
        }
        out
    }

    pub fn total_dim(&self, n: usize) -> usize {
        self.spots(n).iter().map(|s| s.len).sum()
    }

    /// The total differential `D = d_I + d_II : tot^n → tot^{n+1}`.
    pub fn total_differential(&self, n: usize) -> Matrix {
        let source = self.spots(n);
        let target = self.spots(n + 1);
        let mut m = Matrix::zeros(self.total_dim(n + 1), self.total_dim(n));
        for s in &source {
            for t in &target {
                if t.p == s.p + 1 && t.q == s.q {
                    m.set_block(t.offset, s.offset, self.d_one(s.p, s.q));
                } else if t.p == s.p && t.q == s.q + 1 {
                    m.set_block(t.offset, s.offset, self.d_two(s.p, s.q));
                }
            }
        }
        m
    }

    /// The `(p, n-p)` component of `x ∈ tot^n`.
    pub fn component(&self, n: usize, p: usize, x: &[Q]) -> Vec<Q> {
        match self.spots(n).into_iter().find(|s| s.p == p) {
            Some(s) => x[s.offset..s.offset + s.len].to_vec(),
            None => Vec::new(),
        }
    }

    /// Places `v ∈ L^{p,n-p}` into `tot^n`.
    pub fn embed(&self, n: usize, p: usize, v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.total_dim(n)];
        if let Some(s) = self.spots(n).into_iter().find(|s| s.p == p) {
            assert_eq!(v.len(), s.len);
            out[s.offset..s.offset + s.len].clone_from_slice(v);
        }
        out
    }

    /// First coordinate of `tot^n` belonging to a spot with column index `≥ p`.
    fn filtration_start(&self, n: usize, p: usize) -> usize {
        self.spots(n)
            .iter()
            .filter(|s| s.p < p)
            .map(|s| s.len)
            .sum()
    }

    /// Coordinates of `tot^n` belonging to spots with column index in `[lo, hi)`.
    fn column_range(&self, n: usize, lo: usize, hi: usize) -> std::ops::Range<usize> {
        let start = self.filtration_start(n, lo);
        let end = self.filtration_start(n, hi);
        start..end.max(start)
    }

    /// `ℍ^n(tot)`, for every total degree.
    pub fn total_cohomology(&self) -> Vec<Subquotient> {
        (0..=self.top_degree())
            .map(|n| self.total_cohomology_in(n))
            .collect()
    }

    pub fn total_cohomology_in(&self, n: usize) -> Subquotient {
        let dim = self.total_dim(n);
        let cycles = Subspace::span(dim, &self.total_differential(n).kernel());
        let boundaries = if n == 0 {
            Subspace::zero(dim)
        } else {
            Subspace::column_space(&self.total_differential(n - 1))
        };
        Subquotient::new(cycles, boundaries)
    }

    /// `F_p ℍ^n`: classes with a representative vanishing in columns below `p`, as a subspace
    /// of `tot^n` containing all boundaries.
    pub fn filtered_cocycles(&self, n: usize, p: usize) -> Subspace {
        let dim = self.total_dim(n);
        let start = self.filtration_start(n, p);
        let d = self.total_differential(n);
        let restricted = d.block(0..d.rows(), start..dim);
        let lifted: Vec<Vec<Q>> = restricted
            .kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![Q::zero(); start];
                v.extend(k);
                v
            })
            .collect();
        let boundaries = if n == 0 {
            Subspace::zero(dim)
        } else {
            Subspace::column_space(&self.total_differential(n - 1))
        };
        Subspace::span(dim, &lifted).sum(&boundaries)
    }

    /// `Z_r^{p,q}` and `B_r^{p,q}` as subspaces of `L^{p,q}`; `r = None` is the limit.
    ///
    /// `Z_r` holds the `(p,q)`-components of chains `y ∈ F_p tot^n` whose total differential
    /// vanishes in columns `< p + r`; `B_r` holds the `(p,q)`-components of `Dy` for
    /// `y ∈ F_{p-r+1} tot^{n-1}` with `Dy` vanishing in columns `< p`.
    fn cycles_and_boundaries(&self, p: usize, q: usize, r: Option<usize>) -> (Subspace, Subspace) {
        let n = p + q;
        let len = self.dim(p, q);
        let here = self.column_range(n, p, p + 1);

        let source = self.column_range(n, p, self.width());
        let d = self.total_differential(n);
        let hi = r.map_or(self.width(), |r| (p + r).min(self.width()));
        let rows = self.column_range(n + 1, p, hi);
        let constraint = d.block(rows, source.clone());
        let cycles: Vec<Vec<Q>> = constraint
            .kernel()
            .into_iter()
            .map(|k| k[here.start - source.start..here.end - source.start].to_vec())
            .collect();

        let boundaries = if n == 0 {
            Subspace::zero(len)
        } else {
            let lo = r.map_or(0, |r| (p + 1).saturating_sub(r));
            let source = self.column_range(n - 1, lo, self.width());
            let d = self.total_differential(n - 1);
            let below = self.column_range(n, 0, p);
            let constraint = d.block(below, source.clone());
            let image = d.block(here.clone(), source);
            let vectors: Vec<Vec<Q>> = constraint
                .kernel()
                .iter()
                .map(|k| image.mul_vec(k))
                .collect();
            Subspace::span(len, &vectors)
        };
        (Subspace::span(len, &cycles), boundaries)
    }

    /// The page `E_r` (or `E_∞`) of the spectral sequence of the column filtration.
    /// `E_1^{p,q}` is the `d_II`-cohomology of column `p`.
    pub fn page(&self, page: Page) -> Result<PageData, SpectralError> {
        let r = match page {
            Page::Finite(0) => return Err(SpectralError::Shape("pages start at 1".into())),
            Page::Finite(r) => Some(r),
            Page::Infinity => None,
        };
        let mut entries = BTreeMap::new();
        for p in 0..self.width() {
            for q in 0..self.height() {
                let (z, b) = self.cycles_and_boundaries(p, q, r);
                entries.insert((p, q), Subquotient::new(z, b));
            }
        }
        Ok(PageData { page, entries })
    }

    /// The edge map `F_p tot^{p+q} → E^{p,q}`: the class of the `(p,q)`-component of a total
    /// cocycle vanishing in columns below `p`, as coordinates in the page entry.
    pub fn edge_map_eval(
        &self,
        data: &PageData,
        p: usize,
        q: usize,
        x: &[Q],
    ) -> Result<Vec<Q>, SpectralError> {
        let n = p + q;
        if x.len() != self.total_dim(n) {
            return Err(SpectralError::Shape(format!(
                "vector of length {} in a total degree of dimension {}",
                x.len(),
                self.total_dim(n)
            )));
        }
        if !self
            .total_differential(n)
            .mul_vec(x)
            .iter()
            .all(Zero::is_zero)
        {
            return Err(SpectralError::NotCocycle);
        }
        if !x[..self.filtration_start(n, p)].iter().all(Zero::is_zero) {
            return Err(SpectralError::NotInFiltration { p });
        }
        let entry = data
            .entry(p, q)
            .ok_or(SpectralError::IndexOutOfRange { p, q })?;
        entry
            .class_of(&self.component(n, p, x))
            .ok_or_else(|| SpectralError::Shape("component is not a page cycle".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn zero_differentials_everything_survives() {
        let dims = vec![vec![1, 2], vec![0, 3]];
        let b = Bicomplex::with_zero_differentials(dims).unwrap();
        let h = b.total_cohomology();
        assert_eq!(
            h.iter().map(Subquotient::dim).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        for page in [Page::E1, Page::E2, Page::Infinity] {
            let e = b.page(page).unwrap();
            assert_eq!(e.dim(0, 1), 2);
            assert_eq!(e.dim(1, 1), 3);
        }
    }

    #[test]
    fn identity_in_one_column_is_acyclic() {
        let mut d_two = BTreeMap::new();
        d_two.insert((0, 0), Matrix::identity(2));
        let b = Bicomplex::new(vec![vec![2, 2]], BTreeMap::new(), d_two).unwrap();
        assert!(b.total_cohomology().iter().all(|h| h.dim() == 0));
        assert_eq!(b.page(Page::E1).unwrap().total_dim(0), 0);
    }

    #[test]
    fn rejects_non_anticommuting_square() {
        let one = |p, q| ((p, q), Matrix::identity(1));
        let d_one: BTreeMap<_, _> = [one(0, 0), one(0, 1)].into_iter().collect();
        let d_two: BTreeMap<_, _> = [one(0, 0), one(1, 0)].into_iter().collect();
        let err = Bicomplex::new(vec![vec![1, 1], vec![1, 1]], d_one, d_two).unwrap_err();
        assert!(matches!(err, SpectralError::InvalidDifferentials(_)));
    }

    #[test]
    fn staircase_has_a_second_differential() {
        // x(0,1) → y(1,1) ← z(1,0) → w(2,0): d_2 sends x to w
        let dims = vec![vec![0, 1], vec![1, 1], vec![1, 0]];
        let d_one: BTreeMap<_, _> = [((0, 1), Matrix::identity(1)), ((1, 0), Matrix::identity(1))]
            .into_iter()
            .collect();
        let d_two: BTreeMap<_, _> = [((1, 0), Matrix::identity(1))].into_iter().collect();
        let b = Bicomplex::new(dims, d_one, d_two).unwrap();
        let e1 = b.page(Page::E1).unwrap();
        let e2 = b.page(Page::E2).unwrap();
        let e3 = b.page(Page::Finite(3)).unwrap();
        assert_eq!((e1.dim(0, 1), e1.dim(2, 0)), (1, 1));
        assert_eq!((e2.dim(0, 1), e2.dim(2, 0)), (1, 1));
        assert_eq!((e3.dim(0, 1), e3.dim(2, 0)), (0, 0));
        assert!(b.total_cohomology().iter().all(|h| h.dim() == 0));
    }

    #[test]
    fn edge_map_checks_filtration() {
        let b = Bicomplex::with_zero_differentials(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let e = b.page(Page::Infinity).unwrap();
        assert_eq!(b.edge_map_eval(&e, 1, 0, &v(&[0, 5])).unwrap(), v(&[5]));
        assert_eq!(
            b.edge_map_eval(&e, 1, 0, &v(&[1, 5])).unwrap_err(),
            SpectralError::NotInFiltration { p: 1 }
        );
        assert_eq!(b.edge_map_eval(&e, 0, 1, &v(&[2, 5])).unwrap(), v(&[2]));
    }
}
