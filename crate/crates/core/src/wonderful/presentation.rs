use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::roots::{reynolds_basis, RootSystemData, WeylElement};
use super::uv::UVPolynomial;
use super::WonderfulError;
use crate::linalg::{Matrix, Subquotient, Subspace};
use crate::poly::{monomials_of_degree, Exponents, Poly};
use crate::rational::{qi, Q};

pub const DEFAULT_DEGREE_BOUND: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CokernelMode {
    Equivariant,
    Nonequivariant,
}

/// `p(x+y) - (-1)^d p(x-y)` for a homogeneous `W`-invariant `p` of degree `d` in `u_1..u_l`.
pub fn beta(r: &RootSystemData, p: &Poly) -> Result<UVPolynomial, WonderfulError> {
    let l = r.rank();
    assert_eq!(p.nvars(), l);
    if p.is_zero() {
        return Ok(UVPolynomial::zero(l));
    }
    let d = p
        .homogeneous_degree()
        .ok_or(WonderfulError::NotHomogeneous)?;
    if !r.is_invariant_under(&(0..l).collect::<Vec<_>>(), p) {
        return Err(WonderfulError::NotInvariant);
    }
    let x = |i| Poly::var(2 * l, i);
    let y = |i| Poly::var(2 * l, l + i);
    let plus: Vec<Poly> = (0..l).map(|i| &x(i) + &y(i)).collect();
    let minus: Vec<Poly> = (0..l).map(|i| &x(i) - &y(i)).collect();
    let sign = if d % 2 == 0 { qi(1) } else { qi(-1) };
    let b = &p.substitute(&plus) - &p.substitute(&minus).scale(&sign);
    Ok(UVPolynomial::from_xy(&b))
}

/// Writes `b = Σ_k x_k f_k` by moving, for `k = 1..l` in turn, every remaining monomial
/// divisible by `x_k` into `f_k`.
pub fn decompose_beta(b: &UVPolynomial) -> Result<Vec<UVPolynomial>, WonderfulError> {
    let l = b.rank();
    let mut rest: Vec<(Exponents, Q)> = b
        .to_xy()
        .terms()
        .iter()
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let mut out = Vec::with_capacity(l);
    for k in 0..l {
        let (take, keep): (Vec<_>, Vec<_>) = rest.into_iter().partition(|(e, _)| e[k] > 0);
        rest = keep;
        let f = Poly::from_terms(
            2 * l,
            take.into_iter().map(|(mut e, c)| {
                e[k] -= 1;
                (e, c)
            }),
        );
        out.push(UVPolynomial::from_xy(&f));
    }
    if rest.is_empty() {
        Ok(out)
    } else {
        Err(WonderfulError::NotDivisible)
    }
}

/// `Σ_k x_k f_k`.
pub fn recompose(fs: &[UVPolynomial]) -> UVPolynomial {
    let l = fs.len();
    let mut sum = Poly::zero(2 * l);
    for (k, f) in fs.iter().enumerate() {
        sum = &sum + &(&x_uv(l, k) * f.poly());
    }
    UVPolynomial::new(l, sum)
}

fn x_uv(l: usize, i: usize) -> Poly {
    &Poly::var(2 * l, i) - &Poly::var(2 * l, l + i)
}

/// The degree-`degree` part of `A_Λ`.
///
/// The spanning set is indexed by an `x`-monomial `x^e` and an invariant `p(y)` of
/// `W_{Δ-(Λ∪supp e)}`: taking `Γ = supp e` gives the largest admissible invariant ring for that
/// monomial, so smaller `Γ` contribute nothing new and the set is a basis.
#[derive(Clone, Debug)]
pub struct ALambdaSpace {
    lambda: Vec<usize>,
    degree: usize,
    spanning: Vec<UVPolynomial>,
    span: Subspace,
    coords: Coords,
}

impl ALambdaSpace {
    pub fn lambda(&self) -> &[usize] {
        &self.lambda
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn spanning(&self) -> &[UVPolynomial] {
        &self.spanning
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn contains(&self, f: &UVPolynomial) -> bool {
        if f.is_zero() {
            return true;
        }
        f.degree() == Some(self.degree) && self.span.contains(&self.coords.vector(f.poly()))
    }
}

/// `Λ` is a list of 0-based simple-root indices.
pub fn a_lambda(
    r: &RootSystemData,
    lambda: &[usize],
    degree: usize,
) -> Result<ALambdaSpace, WonderfulError> {
    let mut model = Model::new(r);
    let spanning = model.a_lambda(mask_of(lambda), degree)?;
    let coords = Coords::new(2 * r.rank(), degree, None);
    let vectors: Vec<Vec<Q>> = spanning.iter().map(|f| coords.vector(f.poly())).collect();
    Ok(ALambdaSpace {
        lambda: lambda.to_vec(),
        degree,
        span: Subspace::span(coords.len(), &vectors),
        spanning,
        coords,
    })
}

pub fn is_in_a(
    r: &RootSystemData,
    lambda: &[usize],
    f: &UVPolynomial,
    degree_bound: usize,
) -> Result<bool, WonderfulError> {
    if f.is_zero() {
        return Ok(true);
    }
    let n = f.degree().ok_or(WonderfulError::NotHomogeneous)?;
    if n > degree_bound {
        return Err(WonderfulError::DegreeBoundTooSmall {
            needed: n,
            bound: degree_bound,
        });
    }
    Ok(a_lambda(r, lambda, n)?.contains(f))
}

fn mask_of(set: &[usize]) -> u32 {
    set.iter().fold(0, |m, &i| m | (1 << i))
}

/// Monomial coordinates for homogeneous polynomials of one degree, optionally in shuffled order.
#[derive(Clone, Debug)]
struct Coords {
    nvars: usize,
    monos: Vec<Exponents>,
    index: HashMap<Exponents, usize>,
}

impl Coords {
    fn new(nvars: usize, degree: usize, rng: Option<&mut ChaCha8Rng>) -> Self {
        let mut monos = monomials_of_degree(nvars, degree);
        if let Some(rng) = rng {
            monos.shuffle(rng);
        }
        let index = monos
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Coords {
            nvars,
            monos,
            index,
        }
    }

    fn len(&self) -> usize {
        self.monos.len()
    }

    fn vector(&self, p: &Poly) -> Vec<Q> {
        let mut v = vec![qi(0); self.len()];
        for (e, c) in p.terms() {
            v[self.index[e]] = c.clone();
        }
        v
    }

    fn poly(&self, v: &[Q]) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.monos.iter().cloned().zip(v.iter().cloned()),
        )
    }
}

struct Model<'a> {
    r: &'a RootSystemData,
    groups: HashMap<u32, Vec<WeylElement>>,
    invariants: HashMap<(u32, usize), Vec<Poly>>,
}

impl<'a> Model<'a> {
    fn new(r: &'a RootSystemData) -> Self {
        Model {
            r,
            groups: HashMap::new(),
            invariants: HashMap::new(),
        }
    }

    fn full(&self) -> u32 {
        (1 << self.r.rank()) - 1
    }

    /// Invariants in `l` variables of the subgroup generated by the reflections in `mask`.
    fn invariants(&mut self, mask: u32, degree: usize) -> Result<Vec<Poly>, WonderfulError> {
        if let Some(b) = self.invariants.get(&(mask, degree)) {
            return Ok(b.clone());
        }
        if !self.groups.contains_key(&mask) {
            let gens: Vec<usize> = (0..self.r.rank())
                .filter(|i| mask & (1 << i) != 0)
                .collect();
            self.groups.insert(mask, self.r.subgroup(&gens)?);
        }
        let b = reynolds_basis(self.r.rank(), &self.groups[&mask], degree);
        self.invariants.insert((mask, degree), b.clone());
        Ok(b)
    }

    fn a_lambda(
        &mut self,
        lambda: u32,
        degree: usize,
    ) -> Result<Vec<UVPolynomial>, WonderfulError> {
        let l = self.r.rank();
        let to_y: Vec<Poly> = (0..l).map(|i| Poly::var(2 * l, l + i)).collect();
        let mut out = Vec::new();
        for a in 0..=degree {
            for mut e in monomials_of_degree(l, a) {
                let support = mask_of(&(0..l).filter(|&i| e[i] > 0).collect::<Vec<_>>());
                let s = self.full() & !(lambda | support);
                let xe = {
                    e.resize(2 * l, 0);
                    Poly::monomial(2 * l, e, qi(1))
                };
                for p in self.invariants(s, degree - a)? {
                    out.push(UVPolynomial::from_xy(&(&xe * &p.substitute(&to_y))));
                }
            }
        }
        Ok(out)
    }

    /// A spanning set of the degree-`degree` part of `Q[u,v]^{W×W}`.
    fn bi_invariants(&mut self, degree: usize) -> Result<Vec<UVPolynomial>, WonderfulError> {
        let full = self.full();
        let mut out = Vec::new();
        for i in 0..=degree {
            let left = self.invariants(full, i)?;
            let right = self.invariants(full, degree - i)?;
            for p in &left {
                for q in &right {
                    let pu = UVPolynomial::from_u(p);
                    let qv = UVPolynomial::from_v(q);
                    out.push(UVPolynomial::new(self.r.rank(), pu.poly() * qv.poly()));
                }
            }
        }
        Ok(out)
    }

    /// The positive-degree bi-invariant ideal of `A_Λ`, in degree `degree`.
    fn bi_invariant_ideal(
        &mut self,
        lambda: u32,
        degree: usize,
    ) -> Result<Vec<UVPolynomial>, WonderfulError> {
        let mut out = Vec::new();
        for m in 1..=degree {
            let gens = self.bi_invariants(m)?;
            if gens.is_empty() {
                continue;
            }
            for a in self.a_lambda(lambda, degree - m)? {
                for g in &gens {
                    out.push(UVPolynomial::new(self.r.rank(), a.poly() * g.poly()));
                }
            }
        }
        Ok(out)
    }
}

/// One degree of the presentation `⊕_{i<j} A_{ij} → ⊕_k A_k` (reduced modulo the
/// bi-invariant ideal in the nonequivariant case). Degrees are polynomial degrees of the target.
#[derive(Clone, Debug)]
pub struct CokernelDegree {
    pub degree: usize,
    /// Dimension of `⊕_k A_k` (modulo the ideal, when nonequivariant) in this degree.
    pub target_dim: usize,
    pub relation_rank: usize,
    pub dim: usize,
    /// Columns are the images of the basis of `⊕_{i<j} A_{ij}` in degree `degree - 1`.
    pub relations: Matrix,
    /// Whether every relation and ideal element landed inside `⊕_k A_k`.
    pub well_defined: bool,
    rank: usize,
    coords: Coords,
    quotient: Subquotient,
}

impl CokernelDegree {
    fn vector(&self, fs: &[UVPolynomial]) -> Vec<Q> {
        assert_eq!(fs.len(), self.rank);
        let mut v = Vec::with_capacity(self.rank * self.coords.len());
        for f in fs {
            v.extend(self.coords.vector(f.poly()));
        }
        v
    }

    fn split(&self, v: &[Q]) -> Vec<UVPolynomial> {
        v.chunks(self.coords.len().max(1))
            .take(self.rank)
            .map(|c| UVPolynomial::new(self.rank, self.coords.poly(c)))
            .chain(std::iter::repeat_with(|| UVPolynomial::zero(self.rank)))
            .take(self.rank)
            .collect()
    }

    /// Coordinates of the class of `(f_k)` in the cokernel basis, or `None` when some `f_k`
    /// lies outside `A_k`.
    pub fn class_of(&self, fs: &[UVPolynomial]) -> Option<Vec<Q>> {
        self.quotient.class_of(&self.vector(fs))
    }

    pub fn is_zero_class(&self, fs: &[UVPolynomial]) -> bool {
        self.quotient.is_zero_class(&self.vector(fs))
    }

    /// The canonical representative of the class of `(f_k)` for this coordinate order.
    pub fn reduce(&self, fs: &[UVPolynomial]) -> Vec<UVPolynomial> {
        self.split(&self.quotient.boundaries().reduce(&self.vector(fs)))
    }

    /// Representatives of a basis of the cokernel in this degree.
    pub fn basis(&self) -> Vec<Vec<UVPolynomial>> {
        self.quotient
            .basis_representatives()
            .iter()
            .map(|v| self.split(v))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct CokernelPresentation {
    pub mode: CokernelMode,
    pub degree_bound: usize,
    pub degrees: Vec<CokernelDegree>,
}

impl CokernelPresentation {
    pub fn degree(&self, n: usize) -> Result<&CokernelDegree, WonderfulError> {
        self.degrees
            .get(n)
            .ok_or(WonderfulError::DegreeBoundTooSmall {
                needed: n,
                bound: self.degree_bound,
            })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim).collect()
    }
}

pub fn equivariant_cokernel(
    r: &RootSystemData,
    degree_bound: usize,
) -> Result<CokernelPresentation, WonderfulError> {
    cokernel_presentation(r, CokernelMode::Equivariant, degree_bound, None)
}

pub fn nonequivariant_cokernel(
    r: &RootSystemData,
    degree_bound: usize,
) -> Result<CokernelPresentation, WonderfulError> {
    cokernel_presentation(r, CokernelMode::Nonequivariant, degree_bound, None)
}

/// All degrees `0..=degree_bound`. A `permutation_seed` shuffles the monomial order and the
/// order of every spanning set; dimensions do not depend on it.
pub fn cokernel_presentation(
    r: &RootSystemData,
    mode: CokernelMode,
    degree_bound: usize,
    permutation_seed: Option<u64>,
) -> Result<CokernelPresentation, WonderfulError> {
    let mut model = Model::new(r);
    let degrees = (0..=degree_bound)
        .map(|n| cokernel_in_degree(&mut model, mode, n, permutation_seed))
        .collect::<Result<_, _>>()?;
    Ok(CokernelPresentation {
        mode,
        degree_bound,
        degrees,
    })
}

/// A single degree of the presentation.
pub fn cokernel_degree(
    r: &RootSystemData,
    mode: CokernelMode,
    n: usize,
    permutation_seed: Option<u64>,
) -> Result<CokernelDegree, WonderfulError> {
    cokernel_in_degree(&mut Model::new(r), mode, n, permutation_seed)
}

fn cokernel_in_degree(
    model: &mut Model,
    mode: CokernelMode,
    n: usize,
    seed: Option<u64>,
) -> Result<CokernelDegree, WonderfulError> {
    let l = model.r.rank();
    let mut rng = seed.map(|s| ChaCha8Rng::seed_from_u64(s.wrapping_add(n as u64)));
    let coords = Coords::new(2 * l, n, rng.as_mut());
    let block = coords.len();
    let total = l * block;
    let place = |k: usize, f: &UVPolynomial| -> Vec<Q> {
        let mut v = vec![qi(0); total];
        for (i, c) in coords.vector(f.poly()).into_iter().enumerate() {
            v[k * block + i] = c;
        }
        v
    };
    let shuffle = |mut vs: Vec<Vec<Q>>, rng: &mut Option<ChaCha8Rng>| {
        if let Some(rng) = rng {
            vs.shuffle(rng);
        }
        vs
    };

    let mut target = Vec::new();
    for k in 0..l {
        for f in model.a_lambda(1 << k, n)? {
            target.push(place(k, &f));
        }
    }
    let target = Subspace::span(total, &shuffle(target, &mut rng));

    let mut columns = Vec::new();
    if n > 0 {
        for i in 0..l {
            for j in i + 1..l {
                for f in model.a_lambda((1 << i) | (1 << j), n - 1)? {
                    let to_j = UVPolynomial::new(l, &x_uv(l, i) * f.poly());
                    let to_i = UVPolynomial::new(l, (&x_uv(l, j) * f.poly()).scale(&qi(-1)));
                    let mut v = place(j, &to_j);
                    for (a, b) in v.iter_mut().zip(place(i, &to_i)) {
                        *a += b;
                    }
                    columns.push(v);
                }
            }
        }
    }
    let columns = shuffle(columns, &mut rng);
    let relations = Matrix::from_columns(total, &columns);
    let image = Subspace::span(total, &columns);

    let ideal = match mode {
        CokernelMode::Equivariant => Subspace::zero(total),
        CokernelMode::Nonequivariant => {
            let mut gens = Vec::new();
            for k in 0..l {
                for g in model.bi_invariant_ideal(1 << k, n)? {
                    gens.push(place(k, &g));
                }
            }
            Subspace::span(total, &shuffle(gens, &mut rng))
        }
    };

    let boundaries = image.sum(&ideal);
    let well_defined = target.contains_subspace(&boundaries);
    let cycles = if well_defined {
        target
    } else {
        target.sum(&boundaries)
    };
    let target_dim = cycles.dim() - ideal.dim();
    let relation_rank = boundaries.dim() - ideal.dim();
    let quotient = Subquotient::new(cycles, boundaries);
    Ok(CokernelDegree {
        degree: n,
        target_dim,
        relation_rank,
        dim: quotient.dim(),
        relations,
        well_defined,
        rank: l,
        coords,
        quotient,
    })
}

/// The residue formula is only claimed outside type D with `2d = l`; the computation itself
/// goes through regardless.
pub fn hypothesis_warning(r: &RootSystemData, d: usize) -> Option<String> {
    let l = r.rank();
    (r.label().to_ascii_uppercase().starts_with('D') && 2 * d == l).then(|| {
        format!(
            "type {} with 2d = l = {l}: the residue need not represent the class in this case",
            r.label()
        )
    })
}

/// The class `ψ((f_k))` attached to an invariant polynomial.
#[derive(Clone, Debug)]
pub struct ResidueClass {
    pub mode: CokernelMode,
    /// Polynomial degree of the invariant.
    pub degree: usize,
    pub beta: UVPolynomial,
    /// The decomposition `β = Σ_k x_k f_k` used for the class.
    pub components: Vec<UVPolynomial>,
    /// Whether the ordered extraction already gave `f_k ∈ A_k` for every `k`; when it did not,
    /// `components` come from a linear solve inside `⊕_k A_k`.
    pub greedy: bool,
    pub cokernel_dim: usize,
    pub coordinates: Vec<Q>,
    pub representative: Vec<UVPolynomial>,
    pub is_zero: bool,
    pub warnings: Vec<String>,
}

pub fn residue_class(
    r: &RootSystemData,
    p: &Poly,
    mode: CokernelMode,
    degree_bound: usize,
) -> Result<ResidueClass, WonderfulError> {
    let b = beta(r, p)?;
    let d = p.homogeneous_degree().unwrap_or(0);
    let warnings: Vec<String> = hypothesis_warning(r, d).into_iter().collect();
    let greedy_components = decompose_beta(&b)?;
    if b.is_zero() {
        return Ok(ResidueClass {
            mode,
            degree: d,
            beta: b,
            representative: greedy_components.clone(),
            components: greedy_components,
            greedy: true,
            cokernel_dim: 0,
            coordinates: Vec::new(),
            is_zero: true,
            warnings,
        });
    }
    let n = d - 1;
    if n > degree_bound {
        return Err(WonderfulError::DegreeBoundTooSmall {
            needed: n,
            bound: degree_bound,
        });
    }
    let mut model = Model::new(r);
    let cok = cokernel_in_degree(&mut model, mode, n, None)?;
    let (components, greedy) = match cok.class_of(&greedy_components) {
        Some(_) => (greedy_components, true),
        None => (solve_in_a(&mut model, &b, n)?, false),
    };
    let coordinates = cok
        .class_of(&components)
        .ok_or(WonderfulError::NoDecompositionInA)?;
    Ok(ResidueClass {
        mode,
        degree: d,
        beta: b,
        representative: cok.reduce(&components),
        is_zero: coordinates.iter().all(|c| *c == qi(0)),
        components,
        greedy,
        cokernel_dim: cok.dim,
        coordinates,
        warnings,
    })
}

/// Some `(f_k) ∈ ⊕_k A_k` of degree `n` with `Σ_k x_k f_k = b`.
fn solve_in_a(
    model: &mut Model,
    b: &UVPolynomial,
    n: usize,
) -> Result<Vec<UVPolynomial>, WonderfulError> {
    let l = model.r.rank();
    let coords = Coords::new(2 * l, n + 1, None);
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for k in 0..l {
        for f in model.a_lambda(1 << k, n)? {
            columns.push(coords.vector(&(&x_uv(l, k) * f.poly())));
            labels.push((k, f));
        }
    }
    let m = Matrix::from_columns(coords.len(), &columns);
    let sol = m
        .solve(&coords.vector(b.poly()))
        .ok_or(WonderfulError::NoDecompositionInA)?;
    let mut out = vec![Poly::zero(2 * l); l];
    for (c, (k, f)) in sol.iter().zip(labels) {
        out[k] = &out[k] + &f.poly().scale(c);
    }
    Ok(out.into_iter().map(|p| UVPolynomial::new(l, p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(l: usize, text: &str) -> Poly {
        let names: Vec<String> = (1..=l).map(|i| format!("u{i}")).collect();
        Poly::parse(text, &names).unwrap()
    }

    #[test]
    fn a1_beta_and_decomposition() {
        let r = RootSystemData::a1();
        let b = beta(&r, &u(1, "u1^2")).unwrap();
        assert_eq!(b, UVPolynomial::parse(1, "4 x1 y1").unwrap());
        let fs = decompose_beta(&b).unwrap();
        assert_eq!(fs, vec![UVPolynomial::parse(1, "4 u1 + 4 v1").unwrap()]);
    }

    #[test]
    fn beta_rejects_bad_input() {
        let r = RootSystemData::a2();
        assert_eq!(beta(&r, &u(2, "u1^2")), Err(WonderfulError::NotInvariant));
        assert_eq!(
            beta(&r, &u(2, "u1^2 + u1 u2 + u2^2 + 1")),
            Err(WonderfulError::NotHomogeneous)
        );
        assert!(beta(&r, &Poly::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn decomposition_needs_an_x_factor() {
        let b = UVPolynomial::parse(2, "x1 y2 + y1^2").unwrap();
        assert_eq!(decompose_beta(&b), Err(WonderfulError::NotDivisible));
    }

    #[test]
    fn rank_one_a_lambda_is_everything_for_lambda_one() {
        let r = RootSystemData::a1();
        assert_eq!(a_lambda(&r, &[0], 3).unwrap().dim(), 4);
        // A_∅ in degree 1: x only, since y is odd under W.
        let a = a_lambda(&r, &[], 1).unwrap();
        assert_eq!(a.dim(), 1);
        assert!(a.contains(&UVPolynomial::parse(1, "x1").unwrap()));
        assert!(!a.contains(&UVPolynomial::parse(1, "y1").unwrap()));
    }

    #[test]
    fn is_in_a_checks_the_bound() {
        let r = RootSystemData::a1();
        let f = UVPolynomial::parse(1, "u1^3").unwrap();
        assert!(matches!(
            is_in_a(&r, &[0], &f, 2),
            Err(WonderfulError::DegreeBoundTooSmall { .. })
        ));
        let g = UVPolynomial::parse(1, "u1^3 + 1").unwrap();
        assert_eq!(
            is_in_a(&r, &[0], &g, 6),
            Err(WonderfulError::NotHomogeneous)
        );
    }
}
