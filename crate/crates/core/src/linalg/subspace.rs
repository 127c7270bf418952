use num_traits::Zero;

use super::Matrix;
use crate::rational::Q;

/// A subspace of `Q^n`, kept as a basis in reduced row echelon form.
///
/// Reduction modulo the subspace produces a canonical representative of each coset,
/// which is what makes class equality decidable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, &Matrix::identity(ambient).image())
    }

    pub fn span(ambient: usize, vectors: &[Vec<Q>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = Matrix::from_rows(vectors.len(), ambient, vectors.to_vec());
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    /// The column space of `m`.
    pub fn column_space(m: &Matrix) -> Self {
        let cols: Vec<Vec<Q>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Self::span(m.rows(), &cols)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v + self`: all pivot coordinates cleared.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.ambient);
        let mut out = v.to_vec();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            if out[c].is_zero() {
                continue;
            }
            let f = out[c].clone();
            for (o, b) in out.iter_mut().zip(row) {
                if !b.is_zero() {
                    *o -= &f * b;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Self::span(self.ambient, &all)
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&c| v[c].clone()).collect())
    }
}

/// A subquotient `Z / B` with `B ⊆ Z ⊆ Q^n`, together with a fixed basis of a complement of
/// `B` in `Z` used to give classes coordinates.
#[derive(Clone, Debug)]
pub struct Subquotient {
    cycles: Subspace,
    boundaries: Subspace,
    complement: Subspace,
}

impl Subquotient {
    /// `boundaries` need not be contained in `cycles`; it is intersected implicitly by only
    /// ever reducing elements of `cycles`. Callers construct genuine subquotients.
    pub fn new(cycles: Subspace, boundaries: Subspace) -> Self {
        debug_assert!(cycles.contains_subspace(&boundaries));
        let reduced: Vec<Vec<Q>> = cycles
            .basis()
            .iter()
            .map(|v| boundaries.reduce(v))
            .collect();
        let complement = Subspace::span(cycles.ambient(), &reduced);
        Subquotient {
            cycles,
            boundaries,
            complement,
        }
    }

    pub fn ambient(&self) -> usize {
        self.cycles.ambient()
    }

    pub fn dim(&self) -> usize {
        self.complement.dim()
    }

    pub fn cycles(&self) -> &Subspace {
        &self.cycles
    }

    pub fn boundaries(&self) -> &Subspace {
        &self.boundaries
    }

    /// Representatives of a basis of the subquotient.
    pub fn basis_representatives(&self) -> &[Vec<Q>] {
        self.complement.basis()
    }

    /// Coordinates of the class of `v`, or `None` when `v` is not a cycle.
    pub fn class_of(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.cycles.contains(v) {
            return None;
        }
        let r = self.boundaries.reduce(v);
        self.complement.coordinates(&r)
    }

    pub fn is_zero_class(&self, v: &[Q]) -> bool {
        self.boundaries.contains(v)
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
    fn reduce_is_canonical() {
        let s = Subspace::span(3, &[v(&[1, 1, 0])]);
        assert_eq!(s.reduce(&v(&[2, 3, 1])), s.reduce(&v(&[0, 1, 1])));
        assert!(s.contains(&v(&[-2, -2, 0])));
        assert!(!s.contains(&v(&[1, 0, 0])));
    }

    #[test]
    fn subquotient_coordinates() {
        let z = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let b = Subspace::span(3, &[v(&[1, 1, 0])]);
        let sq = Subquotient::new(z, b);
        assert_eq!(sq.dim(), 1);
        let c1 = sq.class_of(&v(&[1, 0, 0])).unwrap();
        let c2 = sq.class_of(&v(&[0, -1, 0])).unwrap();
        assert_eq!(c1, c2);
        assert!(sq.class_of(&v(&[0, 0, 1])).is_none());
        assert!(sq.is_zero_class(&v(&[3, 3, 0])));
    }
}
