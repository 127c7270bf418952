//! Random instances for testing: sums of small indecomposable pieces (dots, edges, squares
//! and staircases) conjugated by random unimodular changes of basis in every spot, so that
//! `d² = 0` and anticommutation hold by construction.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;

use super::{Bicomplex, ChainComplex, FreeComplex};
use crate::linalg::Matrix;
use crate::rational::{qi, Q};

/// A unimodular integer matrix and its inverse, as products of elementary row operations
/// with multipliers in `-2..=2`.
pub fn unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (Matrix, Matrix) {
    let mut t = Matrix::identity(n);
    let mut inv = Matrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            t[(0, 0)] = qi(-1);
            inv[(0, 0)] = qi(-1);
        }
        return (t, inv);
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let c = qi(rng.gen_range(-2..=2));
        if c.is_zero() {
            continue;
        }
        // t ← E t with E = I + c e_ij; inv ← inv E⁻¹
        for col in 0..n {
            let add = &c * &t[(j, col)];
            t[(i, col)] += add;
        }
        for row in 0..n {
            let sub = &c * &inv[(row, i)];
            inv[(row, j)] -= sub;
        }
    }
    (t, inv)
}

#[derive(Clone, Copy)]
enum Edge {
    One,
    Two,
}

/// `(p, q, index)` of a generator.
type Slot = (usize, usize, usize);

/// Generators per spot and the signed incidences between them.
struct Pieces {
    width: usize,
    height: usize,
    max_dim: usize,
    dims: Vec<Vec<usize>>,
    arrows: Vec<(Edge, Slot, Slot, i64)>,
}

impl Pieces {
    fn fits(&self, spots: &[(usize, usize)]) -> bool {
        let mut extra: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &s in spots {
            *extra.entry(s).or_default() += 1;
        }
        extra.iter().all(|(&(p, q), &k)| {
            p < self.width && q < self.height && self.dims[p][q] + k <= self.max_dim
        })
    }

    fn add(&mut self, p: usize, q: usize) -> (usize, usize, usize) {
        let i = self.dims[p][q];
        self.dims[p][q] += 1;
        (p, q, i)
    }

    fn piece<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let p = rng.gen_range(0..self.width);
        let q = rng.gen_range(0..self.height);
        match rng.gen_range(0..5) {
            0 => {
                if self.fits(&[(p, q)]) {
                    self.add(p, q);
                }
            }
            1 => {
                if self.fits(&[(p, q), (p + 1, q)]) {
                    let a = self.add(p, q);
                    let b = self.add(p + 1, q);
                    self.arrows.push((Edge::One, a, b, 1));
                }
            }
            2 => {
                if self.fits(&[(p, q), (p, q + 1)]) {
                    let a = self.add(p, q);
                    let b = self.add(p, q + 1);
                    self.arrows.push((Edge::Two, a, b, 1));
                }
            }
            3 => {
                if self.fits(&[(p, q), (p + 1, q), (p, q + 1), (p + 1, q + 1)]) {
                    let a = self.add(p, q);
                    let b = self.add(p + 1, q);
                    let c = self.add(p, q + 1);
                    let d = self.add(p + 1, q + 1);
                    self.arrows.push((Edge::One, a, b, 1));
                    self.arrows.push((Edge::Two, a, c, 1));
                    self.arrows.push((Edge::Two, b, d, 1));
                    self.arrows.push((Edge::One, c, d, -1));
                }
            }
            _ => {
                // x(p,q) → y_1 ← z_1 → y_2 ← … ← z_{r-1} → w(p+r, q-r+1)
                let r = rng.gen_range(2..=3);
                if q + 1 < r {
                    return;
                }
                let mut spots = vec![(p, q), (p + r, q + 1 - r)];
                for k in 1..r {
                    spots.push((p + k, q + 1 - k));
                    spots.push((p + k, q - k));
                }
                if !self.fits(&spots) {
                    return;
                }
                let mut prev = self.add(p, q);
                for k in 1..r {
                    let y = self.add(p + k, q + 1 - k);
                    let z = self.add(p + k, q - k);
                    self.arrows.push((Edge::One, prev, y, 1));
                    self.arrows.push((Edge::Two, z, y, 1));
                    prev = z;
                }
                let w = self.add(p + r, q + 1 - r);
                self.arrows.push((Edge::One, prev, w, 1));
            }
        }
    }
}

/// A random bicomplex on a `width × height` grid with every spot of dimension at most
/// `max_dim`.
pub fn random_bicomplex<R: Rng + ?Sized>(
    rng: &mut R,
    width: usize,
    height: usize,
    max_dim: usize,
) -> Bicomplex {
    let mut pieces = Pieces {
        width,
        height,
        max_dim,
        dims: vec![vec![0; height]; width],
        arrows: Vec::new(),
    };
    for _ in 0..rng.gen_range(1..=3 * width * height) {
        pieces.piece(rng);
    }
    let dims = pieces.dims.clone();
    let dim = |p: usize, q: usize| {
        if p < width && q < height {
            dims[p][q]
        } else {
            0
        }
    };
    let mut d_one = BTreeMap::new();
    let mut d_two = BTreeMap::new();
    for p in 0..width {
        for q in 0..height {
            d_one.insert((p, q), Matrix::zeros(dim(p + 1, q), dim(p, q)));
            d_two.insert((p, q), Matrix::zeros(dim(p, q + 1), dim(p, q)));
        }
    }
    for &(edge, (p, q, i), (tp, tq, j), c) in &pieces.arrows {
        let map = match edge {
            Edge::One => &mut d_one,
            Edge::Two => &mut d_two,
        };
        let m = map.get_mut(&(p, q)).expect("source spot in range");
        debug_assert!(m.rows() == dim(tp, tq));
        m[(j, i)] = qi(c);
    }
    let bases: Vec<Vec<(Matrix, Matrix)>> = (0..width)
        .map(|p| (0..height).map(|q| unimodular(rng, dims[p][q])).collect())
        .collect();
    let conjugate = |m: &Matrix, src: (usize, usize), tgt: (usize, usize)| -> Matrix {
        if tgt.0 >= width || tgt.1 >= height {
            return m.clone();
        }
        bases[tgt.0][tgt.1].0.mul(m).mul(&bases[src.0][src.1].1)
    };
    let d_one = d_one
        .iter()
        .map(|(&(p, q), m)| ((p, q), conjugate(m, (p, q), (p + 1, q))))
        .collect();
    let d_two = d_two
        .iter()
        .map(|(&(p, q), m)| ((p, q), conjugate(m, (p, q), (p, q + 1))))
        .collect();
    Bicomplex::new(dims, d_one, d_two).expect("random pieces form a bicomplex")
}

/// A random cochain complex with `terms` terms of dimension at most `max_dim`.
pub fn random_chain_complex<R: Rng + ?Sized>(
    rng: &mut R,
    terms: usize,
    max_dim: usize,
) -> ChainComplex {
    let mut dims = vec![0usize; terms];
    let mut arrows = Vec::new();
    for _ in 0..rng.gen_range(1..=2 * terms.max(1)) {
        let k = rng.gen_range(0..terms.max(1));
        if terms == 0 {
            break;
        }
        if rng.gen_bool(0.5) && k + 1 < terms && dims[k] < max_dim && dims[k + 1] < max_dim {
            arrows.push((k, dims[k], dims[k + 1]));
            dims[k] += 1;
            dims[k + 1] += 1;
        } else if dims[k] < max_dim {
            dims[k] += 1;
        }
    }
    let mut d: Vec<Matrix> = (0..terms.saturating_sub(1))
        .map(|k| Matrix::zeros(dims[k + 1], dims[k]))
        .collect();
    for (k, i, j) in arrows {
        d[k][(j, i)] = Q::one();
    }
    let bases: Vec<(Matrix, Matrix)> = dims.iter().map(|&n| unimodular(rng, n)).collect();
    let d = d
        .iter()
        .enumerate()
        .map(|(k, m)| bases[k + 1].0.mul(m).mul(&bases[k].1))
        .collect();
    ChainComplex::new(dims, d).expect("random pieces form a complex")
}

/// A random complex of `Q[t]`-modules with `terms` terms of dimension at most `max_dim`:
/// a sum of nilpotent Jordan blocks, alone or mapped to a copy of themselves in the next
/// degree by a power of `t`.
pub fn random_module_complex<R: Rng + ?Sized>(
    rng: &mut R,
    terms: usize,
    max_dim: usize,
) -> ChainComplex {
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); terms];
    let mut arrows = Vec::new();
    let mut dims = vec![0usize; terms];
    for _ in 0..rng.gen_range(1..=2 * terms.max(1)) {
        if terms == 0 {
            break;
        }
        let k = rng.gen_range(0..terms);
        let m = [1, 2, 2, 3][rng.gen_range(0..4)];
        if rng.gen_bool(0.6)
            && k + 1 < terms
            && dims[k] + m <= max_dim
            && dims[k + 1] + m <= max_dim
        {
            // d = t^s between two copies of Q[t]/t^m; s = 0 is an isomorphism
            let s = if m > 1 && rng.gen_bool(0.7) {
                rng.gen_range(1..m)
            } else {
                0
            };
            arrows.push((k, dims[k], dims[k + 1], m, s));
            blocks[k].push(m);
            blocks[k + 1].push(m);
            dims[k] += m;
            dims[k + 1] += m;
        } else if dims[k] + m <= max_dim {
            blocks[k].push(m);
            dims[k] += m;
        }
    }
    let mut d: Vec<Matrix> = (0..terms.saturating_sub(1))
        .map(|k| Matrix::zeros(dims[k + 1], dims[k]))
        .collect();
    for (k, i, j, m, s) in arrows {
        for r in 0..m - s {
            d[k][(j + r + s, i + r)] = Q::one();
        }
    }
    let action: Vec<Matrix> = (0..terms)
        .map(|k| {
            let mut t = Matrix::zeros(dims[k], dims[k]);
            let mut start = 0;
            for &m in &blocks[k] {
                for s in 1..m {
                    t[(start + s, start + s - 1)] = Q::one();
                }
                start += m;
            }
            t
        })
        .collect();
    let bases: Vec<(Matrix, Matrix)> = dims.iter().map(|&n| unimodular(rng, n)).collect();
    let d = d
        .iter()
        .enumerate()
        .map(|(k, m)| bases[k + 1].0.mul(m).mul(&bases[k].1))
        .collect();
    let action = action
        .iter()
        .zip(&bases)
        .map(|(t, (p, inv))| p.mul(t).mul(inv))
        .collect();
    ChainComplex::new(dims, d)
        .and_then(|c| c.with_action(action))
        .expect("random pieces form a complex of modules")
}

/// One of a few small free `Q[t]`-complexes of length at most two; with `allow_constant`
/// also a complex of vector spaces on which `t` plays no role.
pub fn random_free_complex<R: Rng + ?Sized>(rng: &mut R, allow_constant: bool) -> FreeComplex {
    match rng.gen_range(0..if allow_constant { 4 } else { 3 }) {
        0 => FreeComplex::koszul(1),
        1 => FreeComplex::koszul(2),
        2 => {
            // Q[t] --(t, t)--> Q[t]^2 --(t, -t)--> Q[t]
            let zero = |r, c| Matrix::zeros(r, c);
            FreeComplex::new(
                vec![1, 2, 1],
                vec![
                    vec![zero(2, 1), Matrix::from_i64(2, 1, &[1, 1])],
                    vec![zero(1, 2), Matrix::from_i64(1, 2, &[1, -1])],
                ],
            )
            .expect("d∘d = t² - t² = 0")
        }
        _ => FreeComplex::constant(&random_chain_complex(rng, 3, 2)),
    }
}

/// A random chain map `a → b` of complexes of `Q[t]`-modules: an integer combination, with
/// coefficients in `-2..=2`, of a basis of the space of all such maps.
pub fn random_chain_map<R: Rng + ?Sized>(
    rng: &mut R,
    a: &ChainComplex,
    b: &ChainComplex,
) -> Vec<Matrix> {
    let terms = a.len().max(b.len());
    // unknowns: the entries of f_k, row-major, degree by degree
    let mut offsets = Vec::with_capacity(terms + 1);
    let mut total = 0;
    for k in 0..terms {
        offsets.push(total);
        total += b.dim(k) * a.dim(k);
    }
    offsets.push(total);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for k in 0..terms {
        // d_b f_k - f_{k+1} d_a = 0, entrywise
        let (db, da) = (b.d(k), a.d(k));
        for i in 0..b.dim(k + 1) {
            for j in 0..a.dim(k) {
                let mut row = vec![Q::zero(); total];
                for m in 0..b.dim(k) {
                    row[offsets[k] + m * a.dim(k) + j] += &db[(i, m)];
                }
                if k + 1 < terms {
                    for m in 0..a.dim(k + 1) {
                        row[offsets[k + 1] + i * a.dim(k + 1) + m] -= &da[(m, j)];
                    }
                }
                rows.push(row);
            }
        }
        // t_b f_k - f_k t_a = 0
        let (tb, ta) = (b.action(k), a.action(k));
        for i in 0..b.dim(k) {
            for j in 0..a.dim(k) {
                let mut row = vec![Q::zero(); total];
                for m in 0..b.dim(k) {
                    row[offsets[k] + m * a.dim(k) + j] += &tb[(i, m)];
                }
                for m in 0..a.dim(k) {
                    row[offsets[k] + i * a.dim(k) + m] -= &ta[(m, j)];
                }
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        Matrix::identity(total).image()
    } else {
        Matrix::from_rows(rows.len(), total, rows).kernel()
    };
    let mut entries = vec![Q::zero(); total];
    for v in &kernel {
        let c = qi(rng.gen_range(-2..=2));
        for (e, x) in entries.iter_mut().zip(v) {
            *e += &c * x;
        }
    }
    (0..terms)
        .map(|k| {
            let mut m = Matrix::zeros(b.dim(k), a.dim(k));
            for i in 0..b.dim(k) {
                for j in 0..a.dim(k) {
                    m[(i, j)] = entries[offsets[k] + i * a.dim(k) + j].clone();
                }
            }
            m
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unimodular_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..5 {
            let (t, inv) = unimodular(&mut rng, n);
            assert_eq!(t.mul(&inv), Matrix::identity(n));
            assert_eq!(num_traits::Signed::abs(&t.determinant()), Q::one());
        }
    }

    #[test]
    fn random_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let b = random_bicomplex(&mut rng, 4, 4, 4);
            assert!(b.dims().iter().flatten().all(|&d| d <= 4));
            let a = random_module_complex(&mut rng, 3, 4);
            let c = random_module_complex(&mut rng, 3, 4);
            let f = random_chain_map(&mut rng, &a, &c);
            for k in 0..3 {
                assert_eq!(
                    c.d(k).mul(&f[k]),
                    f.get(k + 1)
                        .map_or(Matrix::zeros(0, a.dim(k)), |g| g.mul(&a.d(k)))
                );
                assert_eq!(c.action(k).mul(&f[k]), f[k].mul(&a.action(k)));
            }
            random_free_complex(&mut rng, true);
        }
    }
}
