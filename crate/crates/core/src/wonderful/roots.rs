use std::collections::{BTreeSet, VecDeque};

use serde::Deserialize;

use super::WonderfulError;
use crate::linalg::Subspace;
use crate::poly::{monomials_of_degree, Poly};
use crate::rational::{qi, Q};

/// Largest group the closure enumeration will build before giving up.
pub const CLOSURE_CAP: usize = 10_000;

pub const MAX_RANK: usize = 3;

/// A root system given by its Cartan matrix, with `a_ij = <ρ_i, ρ_j^∨>`.
///
/// The simple reflection `s_i` sends `ρ_j` to `ρ_j - a_ji ρ_i`; the variables `u_i` (and
/// `v_i`, `x_i`, `y_i`) transform the same way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystemData {
    label: String,
    cartan: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct CartanFile {
    rank: usize,
    cartan: Vec<Vec<i64>>,
    #[serde(default)]
    label: Option<String>,
}

impl RootSystemData {
    pub fn new(label: impl Into<String>, cartan: Vec<Vec<i64>>) -> Result<Self, WonderfulError> {
        let l = cartan.len();
        if l == 0 || l > MAX_RANK {
            return Err(WonderfulError::InvalidCartan(format!(
                "rank {l} is outside 1..={MAX_RANK}"
            )));
        }
        for (i, row) in cartan.iter().enumerate() {
            if row.len() != l {
                return Err(WonderfulError::InvalidCartan(format!(
                    "row {} has length {}",
                    i + 1,
                    row.len()
                )));
            }
            if row[i] != 2 {
                return Err(WonderfulError::InvalidCartan(format!(
                    "diagonal entry {} is not 2",
                    i + 1
                )));
            }
            for (j, &a) in row.iter().enumerate() {
                if i != j && (a > 0 || (a == 0) != (cartan[j][i] == 0)) {
                    return Err(WonderfulError::InvalidCartan(format!(
                        "off-diagonal entries ({}, {}) are not a Cartan pair",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(RootSystemData {
            label: label.into(),
            cartan,
        })
    }

    pub fn a1() -> Self {
        Self::new("A1", vec![vec![2]]).unwrap()
    }

    pub fn a2() -> Self {
        Self::new("A2", vec![vec![2, -1], vec![-1, 2]]).unwrap()
    }

    /// `ρ_1` long, `ρ_2` short.
    pub fn b2() -> Self {
        Self::new("B2", vec![vec![2, -2], vec![-1, 2]]).unwrap()
    }

    pub fn from_type(label: &str) -> Result<Self, WonderfulError> {
        match label.to_ascii_uppercase().as_str() {
            "A1" => Ok(Self::a1()),
            "A2" => Ok(Self::a2()),
            "B2" => Ok(Self::b2()),
            _ => Err(WonderfulError::UnknownType(label.to_string())),
        }
    }

    /// Reads `{ "rank": l, "cartan": [[...]] }`, with an optional `"label"`.
    pub fn from_json(text: &str) -> Result<Self, WonderfulError> {
        let file: CartanFile =
            serde_json::from_str(text).map_err(|e| WonderfulError::Json(e.to_string()))?;
        if file.rank != file.cartan.len() {
            return Err(WonderfulError::InvalidCartan(format!(
                "rank {} but {} rows",
                file.rank,
                file.cartan.len()
            )));
        }
        Self::new(file.label.unwrap_or_else(|| "custom".into()), file.cartan)
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn reflection(&self, i: usize) -> WeylElement {
        let l = self.rank();
        let mut m = vec![vec![0; l]; l];
        for (j, row) in m.iter_mut().enumerate() {
            row[j] = 1;
            row[i] -= self.cartan[j][i];
        }
        WeylElement { matrix: m }
    }

    /// The subgroup generated by the reflections in `generators` (0-based simple-root indices).
    pub fn subgroup(&self, generators: &[usize]) -> Result<Vec<WeylElement>, WonderfulError> {
        let gens: Vec<WeylElement> = generators.iter().map(|&i| self.reflection(i)).collect();
        let id = WeylElement::identity(self.rank());
        let mut seen = BTreeSet::from([id.clone()]);
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(g) = queue.pop_front() {
            for s in &gens {
                let h = g.compose(s);
                if seen.insert(h.clone()) {
                    if seen.len() > CLOSURE_CAP {
                        return Err(WonderfulError::NonFiniteClosure { cap: CLOSURE_CAP });
                    }
                    out.push(h.clone());
                    queue.push_back(h);
                }
            }
        }
        Ok(out)
    }

    pub fn weyl_group(&self) -> Result<Vec<WeylElement>, WonderfulError> {
        self.subgroup(&(0..self.rank()).collect::<Vec<_>>())
    }

    /// Whether `p` (in `l` variables) is fixed by every reflection in `generators`.
    pub fn is_invariant_under(&self, generators: &[usize], p: &Poly) -> bool {
        generators
            .iter()
            .all(|&i| self.reflection(i).apply(p) == *p)
    }
}

/// A Weyl group element acting by the linear substitution `u_j ↦ Σ_k m[j][k] u_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylElement {
    matrix: Vec<Vec<i64>>,
}

impl WeylElement {
    pub fn identity(l: usize) -> Self {
        WeylElement {
            matrix: (0..l)
                .map(|i| (0..l).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// Substituting by `self` and then by `other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let l = self.matrix.len();
        let matrix = (0..l)
            .map(|j| {
                (0..l)
                    .map(|m| (0..l).map(|k| self.matrix[j][k] * other.matrix[k][m]).sum())
                    .collect()
            })
            .collect();
        WeylElement { matrix }
    }

    /// The images of the variables as linear polynomials in `nvars` variables starting at `offset`.
    pub fn images(&self, nvars: usize, offset: usize) -> Vec<Poly> {
        self.matrix
            .iter()
            .map(|row| {
                let mut coeffs = vec![Q::from_integer(0.into()); nvars];
                for (k, &a) in row.iter().enumerate() {
                    coeffs[offset + k] = qi(a);
                }
                Poly::linear(&coeffs)
            })
            .collect()
    }

    /// Acts on a polynomial in exactly `l` variables.
    pub fn apply(&self, p: &Poly) -> Poly {
        p.substitute(&self.images(p.nvars(), 0))
    }
}

/// Basis (in reduced echelon form over the monomial basis) of the degree-`degree` polynomials
/// in `u_1..u_l` fixed by the subgroup generated by `generators`, via Reynolds averaging.
pub fn invariant_basis(
    r: &RootSystemData,
    generators: &[usize],
    degree: usize,
) -> Result<Vec<Poly>, WonderfulError> {
    let group = r.subgroup(generators)?;
    Ok(reynolds_basis(r.rank(), &group, degree))
}

pub(crate) fn reynolds_basis(l: usize, group: &[WeylElement], degree: usize) -> Vec<Poly> {
    let monos = monomials_of_degree(l, degree);
    let order = qi(group.len() as i64);
    let averaged: Vec<Vec<Q>> = monos
        .iter()
        .map(|e| {
            let m = Poly::monomial(l, e.clone(), qi(1));
            let mut sum = Poly::zero(l);
            for g in group {
                sum = &sum + &g.apply(&m);
            }
            let sum = sum.scale(&(qi(1) / &order));
            monos.iter().map(|f| sum.coefficient(f)).collect()
        })
        .collect();
    Subspace::span(monos.len(), &averaged)
        .basis()
        .iter()
        .map(|v| Poly::from_terms(l, monos.iter().cloned().zip(v.iter().cloned())))
        .collect()
}
