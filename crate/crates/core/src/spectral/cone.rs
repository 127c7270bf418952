use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::random::{random_chain_map, random_free_complex, random_module_complex};
use super::{Bicomplex, Page, SpectralError};
use crate::linalg::{Matrix, Subquotient, Subspace};
use crate::rational::{fmt_rational, qi, Q};

/// A bounded cochain complex `V^0 → V^1 → … → V^{len-1}` of finite-dimensional
/// `Q[t]`-modules: each term carries an endomorphism `t` commuting with `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    dims: Vec<usize>,
    d: Vec<Matrix>,
    action: Vec<Matrix>,
}

impl ChainComplex {
    /// `d[k] : V^k → V^{k+1}`, one matrix per consecutive pair; `t` acts by zero.
    pub fn new(dims: Vec<usize>, d: Vec<Matrix>) -> Result<Self, SpectralError> {
        if d.len() != dims.len().saturating_sub(1) {
            return Err(SpectralError::Shape(format!(
                "{} terms need {} differentials, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                d.len()
            )));
        }
        for (k, m) in d.iter().enumerate() {
            if m.rows() != dims[k + 1] || m.cols() != dims[k] {
                return Err(SpectralError::Shape(format!(
                    "differential {k} has the wrong shape"
                )));
            }
        }
        for k in 1..d.len() {
            if !d[k].mul(&d[k - 1]).is_zero() {
                return Err(SpectralError::InvalidDifferentials(format!(
                    "d∘d ≠ 0 in degree {}",
                    k - 1
                )));
            }
        }
        let action = dims.iter().map(|&n| Matrix::zeros(n, n)).collect();
        Ok(ChainComplex { dims, d, action })
    }

    pub fn zero(dims: Vec<usize>) -> Self {
        let d = dims.windows(2).map(|w| Matrix::zeros(w[1], w[0])).collect();
        let action = dims.iter().map(|&n| Matrix::zeros(n, n)).collect();
        ChainComplex { dims, d, action }
    }

    /// Replaces the action of `t`, one square matrix per term.
    pub fn with_action(mut self, action: Vec<Matrix>) -> Result<Self, SpectralError> {
        if action.len() != self.len()
            || action
                .iter()
                .zip(&self.dims)
                .any(|(m, &n)| m.rows() != n || m.cols() != n)
        {
            return Err(SpectralError::Shape(
                "action of t has the wrong shape".into(),
            ));
        }
        for k in 0..self.d.len() {
            if self.d[k].mul(&action[k]) != action[k + 1].mul(&self.d[k]) {
                return Err(SpectralError::InvalidDifferentials(format!(
                    "t does not commute with d in degree {k}"
                )));
            }
        }
        self.action = action;
        Ok(self)
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `d : V^k → V^{k+1}`, zero outside the range of terms.
    pub fn d(&self, k: usize) -> Matrix {
        self.d
            .get(k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(k + 1), self.dim(k)))
    }

    /// The action of `t` on `V^k`.
    pub fn action(&self, k: usize) -> Matrix {
        self.action
            .get(k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(k), self.dim(k)))
    }

    /// The same complex with a zero term prepended, so that term `k` moves to degree `k + 1`.
    pub fn shift_up(&self) -> ChainComplex {
        let mut dims = vec![0];
        dims.extend(&self.dims);
        let mut d = vec![Matrix::zeros(self.dim(0), 0)];
        d.extend(self.d.iter().cloned());
        let mut action = vec![Matrix::zeros(0, 0)];
        action.extend(self.action.iter().cloned());
        ChainComplex { dims, d, action }
    }

    /// `cone(f)^k = a^{k+1} ⊕ b^k` with `d(x, y) = (-d x, f(x) + d y)`. The term `a^0` would
    /// sit in degree `-1`, so callers keep it zero.
    pub fn cone(a: &ChainComplex, b: &ChainComplex, f: &[Matrix]) -> ChainComplex {
        let terms = a.len().saturating_sub(1).max(b.len());
        let fk = |k: usize| {
            f.get(k)
                .cloned()
                .unwrap_or_else(|| Matrix::zeros(b.dim(k), a.dim(k)))
        };
        let dims: Vec<usize> = (0..terms).map(|k| a.dim(k + 1) + b.dim(k)).collect();
        let d = (0..terms.saturating_sub(1))
            .map(|k| {
                let mut m = Matrix::zeros(dims[k + 1], dims[k]);
                m.set_block(0, 0, &a.d(k + 1).scale(&qi(-1)));
                m.set_block(a.dim(k + 2), 0, &fk(k + 1));
                m.set_block(a.dim(k + 2), a.dim(k + 1), &b.d(k));
                m
            })
            .collect();
        let action = (0..terms)
            .map(|k| {
                let mut m = Matrix::zeros(dims[k], dims[k]);
                m.set_block(0, 0, &a.action(k + 1));
                m.set_block(a.dim(k + 1), a.dim(k + 1), &b.action(k));
                m
            })
            .collect();
        ChainComplex { dims, d, action }
    }

    /// The bicomplex `V ⊗_{Q[t]} K` with `L^{p,q} = V^q ⊗ K^p`, `d_I = id ⊗ d_K` (with `t`
    /// acting on `V`) and `d_II = (-1)^p d_V ⊗ id`. Coordinates are `v * rank K^p + k`.
    pub fn tensor(&self, k: &FreeComplex) -> Bicomplex {
        let width = k.len();
        let height = self.len();
        let dims = (0..width)
            .map(|p| (0..height).map(|q| self.dim(q) * k.rank(p)).collect())
            .collect();
        let mut d_one = BTreeMap::new();
        let mut d_two = BTreeMap::new();
        for p in 0..width {
            let sign = if p % 2 == 0 { qi(1) } else { qi(-1) };
            for q in 0..height {
                d_one.insert((p, q), k.evaluate(p, &self.action(q)));
                d_two.insert(
                    (p, q),
                    self.d(q).kron(&Matrix::identity(k.rank(p))).scale(&sign),
                );
            }
        }
        Bicomplex::new(dims, d_one, d_two).expect("tensor product of complexes is a bicomplex")
    }
}

/// A bounded complex of free `Q[t]`-modules of finite rank. The differential `K^p → K^{p+1}`
/// is `Σ_j t^j M_{p,j}` with rational matrices `M_{p,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeComplex {
    ranks: Vec<usize>,
    d: Vec<Vec<Matrix>>,
}

impl FreeComplex {
    /// `d[p][j]` is the coefficient of `t^j` in the differential out of `K^p`.
    pub fn new(ranks: Vec<usize>, d: Vec<Vec<Matrix>>) -> Result<Self, SpectralError> {
        if d.len() != ranks.len().saturating_sub(1) {
            return Err(SpectralError::Shape(
                "one differential per consecutive pair of terms".into(),
            ));
        }
        for (p, coeffs) in d.iter().enumerate() {
            if coeffs
                .iter()
                .any(|m| m.rows() != ranks[p + 1] || m.cols() != ranks[p])
            {
                return Err(SpectralError::Shape(format!(
                    "differential {p} has the wrong shape"
                )));
            }
        }
        // d∘d = 0 as a polynomial identity
        for p in 1..d.len() {
            let degree = d[p].len() + d[p - 1].len();
            for total in 0..degree {
                let mut sum = Matrix::zeros(ranks[p + 1], ranks[p - 1]);
                for (i, outer) in d[p].iter().enumerate() {
                    if let Some(inner) = total.checked_sub(i).and_then(|j| d[p - 1].get(j)) {
                        sum = sum.add(&outer.mul(inner));
                    }
                }
                if !sum.is_zero() {
                    return Err(SpectralError::InvalidDifferentials(format!(
                        "d∘d ≠ 0 in degree {}",
                        p - 1
                    )));
                }
            }
        }
        Ok(FreeComplex { ranks, d })
    }

    /// A complex of vector spaces, read as free modules on which `t` plays no role.
    pub fn constant(k: &ChainComplex) -> Self {
        FreeComplex {
            ranks: k.dims().to_vec(),
            d: (0..k.len().saturating_sub(1))
                .map(|p| vec![k.d(p)])
                .collect(),
        }
    }

    /// `Q[t] --t^m--> Q[t]`.
    pub fn koszul(m: usize) -> Self {
        let mut coeffs = vec![Matrix::zeros(1, 1); m + 1];
        coeffs[m] = Matrix::identity(1);
        FreeComplex {
            ranks: vec![1, 1],
            d: vec![coeffs],
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn rank(&self, p: usize) -> usize {
        self.ranks.get(p).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `id ⊗ d_K : V ⊗ K^p → V ⊗ K^{p+1}` with `t` acting on `V` by `action`.
    pub fn evaluate(&self, p: usize, action: &Matrix) -> Matrix {
        let n = action.rows();
        let mut out = Matrix::zeros(n * self.rank(p + 1), n * self.rank(p));
        let Some(coeffs) = self.d.get(p) else {
            return out;
        };
        let mut power = Matrix::identity(n);
        for m in coeffs {
            out = out.add(&power.kron(m));
            power = power.mul(action);
        }
        out
    }
}

/// A family of matrices `L^{p,q} → M^{p,q+shift}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedMap {
    shift: usize,
    blocks: BTreeMap<(usize, usize), Matrix>,
}

impl BigradedMap {
    pub fn new(shift: usize, blocks: BTreeMap<(usize, usize), Matrix>) -> Self {
        BigradedMap { shift, blocks }
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn block(&self, p: usize, q: usize) -> Option<&Matrix> {
        self.blocks.get(&(p, q))
    }

    pub fn apply(&self, p: usize, q: usize, v: &[Q]) -> Vec<Q> {
        self.blocks[&(p, q)].mul_vec(v)
    }

    /// The induced map `tot^n(source) → tot^{n+shift}(target)`, with the block in column `p`
    /// multiplied by `(-1)^p` when `alternate` is set.
    pub fn total(
        &self,
        source: &Bicomplex,
        target: &Bicomplex,
        n: usize,
        alternate: bool,
    ) -> Matrix {
        let targets = target.spots(n + self.shift);
        let mut m = Matrix::zeros(target.total_dim(n + self.shift), source.total_dim(n));
        for s in source.spots(n) {
            let Some(t) = targets.iter().find(|t| t.p == s.p) else {
                continue;
            };
            let Some(block) = self.blocks.get(&(s.p, s.q)) else {
                continue;
            };
            let block = if alternate && s.p % 2 == 1 {
                block.scale(&qi(-1))
            } else {
                block.clone()
            };
            m.set_block(t.offset, s.offset, &block);
        }
        m
    }
}

/// `A = 𝒜 ⊗ K`, `B = ℬ ⊗ K`, `C = cone(f) ⊗ K` with `f : A → B`, `g : B → C`, `b ↦ (0, b)`,
/// and `k : C^{p,q} → A^{p,q+1}`, `(a, b) ↦ a`.
#[derive(Clone, Debug)]
pub struct ConeTriple {
    pub a: Bicomplex,
    pub b: Bicomplex,
    pub c: Bicomplex,
    pub f: BigradedMap,
    pub g: BigradedMap,
    pub k: BigradedMap,
}

/// Builds the cone triple of `f : 𝒜 → ℬ` under `V ↦ V ⊗_{Q[t]} K`.
pub fn build_cone_triple(
    a: &ChainComplex,
    b: &ChainComplex,
    f: &[Matrix],
    k: &FreeComplex,
) -> Result<ConeTriple, SpectralError> {
    if a.dim(0) != 0 {
        return Err(SpectralError::Shape(
            "the source complex must vanish in degree 0".into(),
        ));
    }
    let terms = a.len().max(b.len());
    if f.len() > terms {
        return Err(SpectralError::Shape(format!(
            "{} chain map components for {terms} terms",
            f.len()
        )));
    }
    let fk = |q: usize| {
        f.get(q)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(b.dim(q), a.dim(q)))
    };
    for q in 0..terms {
        let m = fk(q);
        if m.rows() != b.dim(q) || m.cols() != a.dim(q) {
            return Err(SpectralError::Shape(format!(
                "chain map component {q} has the wrong shape"
            )));
        }
        if b.d(q).mul(&m) != fk(q + 1).mul(&a.d(q)) || b.action(q).mul(&m) != m.mul(&a.action(q)) {
            return Err(SpectralError::NotChainMap(q));
        }
    }
    let cone = ChainComplex::cone(a, b, f);
    let (big_a, big_b, big_c) = (a.tensor(k), b.tensor(k), cone.tensor(k));
    let mut f_blocks = BTreeMap::new();
    let mut g_blocks = BTreeMap::new();
    let mut k_blocks = BTreeMap::new();
    for p in 0..k.len() {
        let kp = k.rank(p);
        for q in 0..terms {
            f_blocks.insert((p, q), fk(q).kron(&Matrix::identity(kp)));
        }
        for q in 0..cone.len() {
            let (a_part, b_part) = (a.dim(q + 1) * kp, b.dim(q) * kp);
            let mut g = Matrix::zeros(a_part + b_part, b_part);
            g.set_block(a_part, 0, &Matrix::identity(b_part));
            g_blocks.insert((p, q), g);
            let mut proj = Matrix::zeros(a_part, a_part + b_part);
            proj.set_block(0, 0, &Matrix::identity(a_part));
            k_blocks.insert((p, q), proj);
        }
    }
    Ok(ConeTriple {
        a: big_a,
        b: big_b,
        c: big_c,
        f: BigradedMap::new(0, f_blocks),
        g: BigradedMap::new(0, g_blocks),
        k: BigradedMap::new(1, k_blocks),
    })
}

impl ConeTriple {
    /// Negates `k`, for exercising the failure path of the lemma check.
    #[doc(hidden)]
    pub fn corrupt(&mut self) {
        for m in self.k.blocks.values_mut() {
            *m = m.scale(&qi(-1));
        }
    }

    /// Exactness of `ℍ(A) → ℍ(B) → ℍ(C) → ℍ(A)[1]` at `ℍ(B)` and `ℍ(C)` in every total degree,
    /// with the connecting map `(a, b) ↦ (-1)^p a`. Returns the first failing degree.
    pub fn long_exactness(&self) -> Result<(), (usize, &'static str)> {
        let top = self
            .a
            .top_degree()
            .max(self.b.top_degree())
            .max(self.c.top_degree());
        for n in 0..=top {
            let f = self.f.total(&self.a, &self.b, n, false);
            let g = self.g.total(&self.b, &self.c, n, false);
            if !exact_at(&self.a, &self.b, &self.c, n, n, &f, &g) {
                return Err((n, "B"));
            }
            let g = self.g.total(&self.b, &self.c, n, false);
            let k = self.k.total(&self.c, &self.a, n, true);
            if !exact_at(&self.b, &self.c, &self.a, n, n + 1, &g, &k) {
                return Err((n, "C"));
            }
        }
        Ok(())
    }

    /// `φ` out of `E_2^{p+1,q}(B)`, valued in `E_2^{p,q+1}(A) / k(Z_2^{p,q}(C))`.
    pub fn phi_map(&self, p: usize, q: usize) -> PhiMap<'_> {
        let e2_a = self.a.page(Page::E2).expect("page 2 exists");
        let e2_b = self.b.page(Page::E2).expect("page 2 exists");
        let e2_c = self.c.page(Page::E2).expect("page 2 exists");
        let len = self.a.dim(p, q + 1);
        let (cycles, boundaries) = match e2_a.entry(p, q + 1) {
            Some(e) => (e.cycles().clone(), e.boundaries().clone()),
            None => (Subspace::zero(len), Subspace::zero(len)),
        };
        let lifted: Vec<Vec<Q>> = match (e2_c.entry(p, q), self.k.block(p, q)) {
            (Some(z), Some(k)) => z.cycles().basis().iter().map(|s| k.mul_vec(s)).collect(),
            _ => Vec::new(),
        };
        let relations = boundaries.sum(&Subspace::span(len, &lifted));
        let source = e2_b.entry(p + 1, q).cloned();
        PhiMap {
            triple: self,
            p,
            q,
            source,
            target: Subquotient::new(cycles, relations),
        }
    }
}

/// Whether `ℍ^n(X) → ℍ^n(Y) → ℍ^m(Z)` is exact in the middle.
fn exact_at(
    x: &Bicomplex,
    y: &Bicomplex,
    z: &Bicomplex,
    n: usize,
    m: usize,
    u: &Matrix,
    v: &Matrix,
) -> bool {
    let hx = x.total_cohomology_in(n);
    let hy = y.total_cohomology_in(n);
    let hz = if m <= z.top_degree() {
        Some(z.total_cohomology_in(m))
    } else {
        None
    };
    let dim = y.total_dim(n);
    let image: Vec<Vec<Q>> = hx.cycles().basis().iter().map(|c| u.mul_vec(c)).collect();
    let image = Subspace::span(dim, &image).sum(hy.boundaries());
    let cycles = hy.cycles().basis();
    let kernel = match hz {
        None => hy.cycles().clone(),
        Some(hz) => {
            // y = Σ c_i z_i with v(y) = Σ t_j b_j
            let rows = v.rows();
            let bz = hz.boundaries().basis();
            let mut columns: Vec<Vec<Q>> = cycles.iter().map(|c| v.mul_vec(c)).collect();
            columns.extend(bz.iter().map(|b| b.iter().map(|e| -e.clone()).collect()));
            if columns.is_empty() {
                hy.cycles().clone()
            } else {
                let system = Matrix::from_columns(rows, &columns);
                let coeffs: Vec<Vec<Q>> = system
                    .kernel()
                    .into_iter()
                    .map(|k| {
                        let mut yv = vec![Q::zero(); dim];
                        for (c, z) in k.iter().zip(cycles) {
                            for (e, zi) in yv.iter_mut().zip(z) {
                                *e += c * zi;
                            }
                        }
                        yv
                    })
                    .collect();
                Subspace::span(dim, &coeffs)
            }
        }
    };
    image == kernel.sum(hy.boundaries())
}

/// The connecting map `φ` for one bidegree, with its source and target subquotients fixed.
pub struct PhiMap<'a> {
    triple: &'a ConeTriple,
    p: usize,
    q: usize,
    source: Option<Subquotient>,
    target: Subquotient,
}

impl PhiMap<'_> {
    /// `E_2^{p,q+1}(A)` modulo `k(Z_2^{p,q}(C))`.
    pub fn target(&self) -> &Subquotient {
        &self.target
    }

    /// Applies `φ` to the class of `beta ∈ B^{p+1,q}`: find `σ ∈ C^{p,q}` with `d_II σ = 0`
    /// and `d_I σ ≡ g(β)` modulo `d_II`, then return the coordinates of `[k(σ)]`.
    pub fn apply(&self, beta: &[Q]) -> Result<Vec<Q>, SpectralError> {
        let (p, q) = (self.p, self.q);
        let t = self.triple;
        if beta.len() != t.b.dim(p + 1, q) {
            return Err(SpectralError::Shape(format!(
                "vector of length {} in B^({}, {q}) of dimension {}",
                beta.len(),
                p + 1,
                t.b.dim(p + 1, q)
            )));
        }
        if beta.iter().all(Zero::is_zero) {
            return Ok(vec![Q::zero(); self.target.dim()]);
        }
        match &self.source {
            Some(s) if s.cycles().contains(beta) => {}
            _ => return Err(SpectralError::NotPageCycle),
        }
        let c = &t.c;
        let sigma_len = c.dim(p, q);
        let tau_len = if q > 0 { c.dim(p + 1, q - 1) } else { 0 };
        let top_rows = c.dim(p, q + 1);
        let low_rows = c.dim(p + 1, q);
        let mut system = Matrix::zeros(top_rows + low_rows, sigma_len + tau_len);
        if sigma_len > 0 {
            system.set_block(0, 0, c.d_two(p, q));
            if p + 1 < c.width() {
                system.set_block(top_rows, 0, c.d_one(p, q));
            }
        }
        if tau_len > 0 {
            system.set_block(top_rows, sigma_len, c.d_two(p + 1, q - 1));
        }
        let g_beta = t.g.apply(p + 1, q, beta);
        let mut rhs = vec![Q::zero(); top_rows];
        rhs.extend(g_beta);
        let solution = system.solve(&rhs).ok_or(SpectralError::NotInKernel)?;
        let k_sigma = t.k.apply(p, q, &solution[..sigma_len]);
        self.target
            .class_of(&k_sigma)
            .ok_or(SpectralError::LiftFailed)
    }
}

/// `φ` on the class of `beta ∈ E_2^{p+1,q}(B)`; see [`PhiMap::apply`].
pub fn phi(t: &ConeTriple, p: usize, q: usize, beta: &[Q]) -> Result<Vec<Q>, SpectralError> {
    t.phi_map(p, q).apply(beta)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ConeLemmaOptions {
    /// Largest term of the random complexes `𝒜`, `ℬ`.
    pub max_dim: usize,
    /// Negate `k` before checking, so that every nonzero comparison fails.
    pub inject_fault: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub a_dims: Vec<usize>,
    pub b_dims: Vec<usize>,
    pub k_ranks: Vec<usize>,
    /// Basis elements of `F̃_1 ℍ(A)` checked, over all degrees.
    pub checked: usize,
    /// Checks where `u_2(x)` is a nonzero class.
    pub nontrivial: usize,
    pub failures: Vec<String>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ConeLemmaReport {
    pub seed: u64,
    pub trials: Vec<TrialOutcome>,
    pub passed: usize,
    pub failed: usize,
    /// Sign `s` in the checked identity `φ(v_2(f x)) = s · u_2(x)`.
    pub sign: i32,
}

impl ConeLemmaReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn random_triple(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
) -> (ChainComplex, ChainComplex, Vec<Matrix>, FreeComplex) {
    let (la, lb) = (rng.gen_range(1..=3), rng.gen_range(1..=4));
    let a = random_module_complex(rng, la, max_dim).shift_up();
    let b = random_module_complex(rng, lb, max_dim);
    let f = random_chain_map(rng, &a, &b);
    let k = random_free_complex(rng, false);
    (a, b, f, k)
}

/// Checks on random cone triples that the connecting map `φ` of the second page carries
/// `v_2(f(x))` to `u_2(x)` for every `x` in a basis of `F̃_1 ℍ(A)`, the preimage of `F_1 ℍ(B)`.
/// Here `u_2` is the edge map to `E_2^{0,·}(A)` and `v_2` the edge map to `E_2^{1,·}(B)`.
pub fn verify_cone_lemma(seed: u64, trials: usize, options: ConeLemmaOptions) -> ConeLemmaReport {
    let max_dim = if options.max_dim == 0 {
        4
    } else {
        options.max_dim
    };
    let mut outcomes = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let (a, b, f, k) = random_triple(&mut rng, max_dim);
        let mut t = build_cone_triple(&a, &b, &f, &k).expect("random chain map is a chain map");
        if options.inject_fault {
            t.corrupt();
        }
        let mut outcome = TrialOutcome {
            trial,
            a_dims: a.dims().to_vec(),
            b_dims: b.dims().to_vec(),
            k_ranks: k.ranks().to_vec(),
            checked: 0,
            nontrivial: 0,
            failures: Vec::new(),
        };
        check_triple(&t, &mut outcome);
        outcomes.push(outcome);
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    ConeLemmaReport {
        seed,
        passed: trials - failed,
        failed,
        trials: outcomes,
        sign: 1,
    }
}

/// Runs the lemma check on one triple, appending failures to `outcome`.
pub(crate) fn check_triple(t: &ConeTriple, outcome: &mut TrialOutcome) {
    for q in 0..t.a.height() {
        let n = q + 1;
        if n > t.a.top_degree() {
            break;
        }
        let basis = tilde_filtration_basis(t, n);
        if basis.is_empty() {
            continue;
        }
        let phi_map = t.phi_map(0, q);
        for x in basis {
            outcome.checked += 1;
            let u = t.a.component(n, 0, &x);
            let Some(lhs) = phi_map.target().class_of(&u) else {
                outcome.failures.push(format!(
                    "degree {n}: leading component is not a page-2 cycle"
                ));
                continue;
            };
            if lhs.iter().any(|c| !c.is_zero()) {
                outcome.nontrivial += 1;
            }
            let beta = match v2_representative(t, n, &x) {
                Some(b) => b,
                None => {
                    outcome
                        .failures
                        .push(format!("degree {n}: f(x) does not lie in F_1"));
                    continue;
                }
            };
            match phi_map.apply(&beta) {
                Ok(rhs) if rhs == lhs => {}
                Ok(rhs) => outcome.failures.push(format!(
                    "degree {n}: φ gives ({}), edge map gives ({})",
                    show(&rhs),
                    show(&lhs)
                )),
                Err(e) => outcome.failures.push(format!("degree {n}: {e}")),
            }
        }
    }
}

/// Representatives of a basis of `F̃_1 ℍ^n(A)`: cocycles `x` with `f(x)_0 ∈ im d_II`.
fn tilde_filtration_basis(t: &ConeTriple, n: usize) -> Vec<Vec<Q>> {
    let h = t.a.total_cohomology_in(n);
    let cycles = h.cycles().basis();
    if cycles.is_empty() {
        return Vec::new();
    }
    let f = t.f.total(&t.a, &t.b, n, false);
    let leading: Vec<Vec<Q>> = cycles
        .iter()
        .map(|c| t.b.component(n, 0, &f.mul_vec(c)))
        .collect();
    let rows = t.b.dim(0, n);
    let mut columns = leading;
    if n >= 1 && n - 1 < t.b.height() {
        let d = t.b.d_two(0, n - 1);
        columns.extend((0..d.cols()).map(|j| d.column(j)));
    }
    let system = Matrix::from_columns(rows, &columns);
    let dim = t.a.total_dim(n);
    let xs: Vec<Vec<Q>> = system
        .kernel()
        .into_iter()
        .map(|k| {
            let mut x = vec![Q::zero(); dim];
            for (c, z) in k.iter().zip(cycles) {
                for (e, zi) in x.iter_mut().zip(z) {
                    *e += c * zi;
                }
            }
            x
        })
        .collect();
    let with_boundaries = Subspace::span(dim, &xs).sum(h.boundaries());
    Subquotient::new(with_boundaries, h.boundaries().clone())
        .basis_representatives()
        .to_vec()
}

/// The `(1, n-1)` component of a representative of `[f(x)]` lying in `F_1`, obtained by
/// subtracting `D b_0` with `d_II b_0 = f(x)_0`.
fn v2_representative(t: &ConeTriple, n: usize, x: &[Q]) -> Option<Vec<Q>> {
    let fx = t.f.total(&t.a, &t.b, n, false).mul_vec(x);
    let lead = t.b.component(n, 0, &fx);
    let next = t.b.component(n, 1, &fx);
    let q = n - 1;
    if q >= t.b.height() {
        return lead.iter().all(Zero::is_zero).then_some(next);
    }
    let b0 = t.b.d_two(0, q).solve(&lead)?;
    if t.b.width() < 2 {
        return Some(next);
    }
    let correction = t.b.d_one(0, q).mul_vec(&b0);
    Some(next.iter().zip(&correction).map(|(a, b)| a - b).collect())
}

fn show(v: &[Q]) -> String {
    v.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn koszul_pair() -> FreeComplex {
        FreeComplex::koszul(1)
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let a = ChainComplex::new(vec![2, 1], vec![Matrix::from_i64(1, 2, &[1, 1])])
            .unwrap()
            .shift_up();
        let id: Vec<Matrix> = a.dims().iter().map(|&d| Matrix::identity(d)).collect();
        let t = build_cone_triple(&a, &a, &id, &koszul_pair()).unwrap();
        assert!(t.c.total_cohomology().iter().all(|h| h.dim() == 0));
        assert_eq!(t.long_exactness(), Ok(()));
    }

    #[test]
    fn rejects_non_chain_map() {
        let a = ChainComplex::new(vec![1, 1], vec![Matrix::identity(1)])
            .unwrap()
            .shift_up();
        let b = ChainComplex::zero(vec![0, 1, 1]);
        let f = vec![
            Matrix::zeros(0, 0),
            Matrix::zeros(1, 1),
            Matrix::identity(1),
        ];
        assert_eq!(
            build_cone_triple(&a, &b, &f, &koszul_pair()).unwrap_err(),
            SpectralError::NotChainMap(1)
        );
    }

    #[test]
    fn zero_class_goes_to_zero() {
        let a = ChainComplex::zero(vec![0, 1, 1]);
        let f = vec![
            Matrix::identity(0),
            Matrix::identity(1),
            Matrix::identity(1),
        ];
        let t = build_cone_triple(&a, &a, &f, &koszul_pair()).unwrap();
        let out = phi(&t, 0, 1, &[Q::zero()]).unwrap();
        assert!(out.iter().all(Zero::is_zero));
    }

    #[test]
    fn lemma_holds_on_a_few_trials() {
        let report = verify_cone_lemma(5, 10, ConeLemmaOptions::default());
        assert!(
            report.all_passed(),
            "{:#?}",
            report
                .trials
                .iter()
                .filter(|t| !t.passed())
                .collect::<Vec<_>>()
        );
    }
}
