use std::collections::BTreeMap;
use std::ops::Bound;

use num_traits::{One, Zero};

use crate::rational::Q;

/// Sparse vector keyed by an ordered coordinate label.
pub type SparseVec<K> = BTreeMap<K, Q>;

/// Adds `c` to the coordinate `k`, dropping it when the sum vanishes.
pub fn add_to<K: Ord + Clone>(v: &mut SparseVec<K>, k: &K, c: Q) {
    if c.is_zero() {
        return;
    }
    match v.get_mut(k) {
        Some(x) => {
            *x += c;
            if x.is_zero() {
                v.remove(k);
            }
        }
        None => {
            v.insert(k.clone(), c);
        }
    }
}

#[derive(Clone, Debug)]
struct Row<K> {
    vec: SparseVec<K>,
    combo: SparseVec<usize>,
}

/// Result of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// The vector was independent and now contributes a pivot.
    Pivot,
    /// The vector was dependent. With tracking enabled, the map is a linear relation among
    /// the inserted vectors (by tag) that sums to zero and has coefficient 1 on the new tag.
    Dependent(SparseVec<usize>),
}

/// Incremental sparse Gaussian elimination over Q.
///
/// Every stored row has its leading (smallest) key as pivot with coefficient 1. Reduction
/// clears every pivot coordinate, so reduced vectors are canonical coset representatives.
/// With tracking on, each row remembers which inserted vectors (by tag) it is made of, which
/// turns the structure into a linear solver.
#[derive(Clone, Debug)]
pub struct Echelon<K> {
    rows: Vec<Row<K>>,
    pivot_of: BTreeMap<K, usize>,
    track: bool,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon {
            rows: Vec::new(),
            pivot_of: BTreeMap::new(),
            track: false,
        }
    }

    pub fn with_tracking() -> Self {
        Echelon {
            track: true,
            ..Self::new()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.pivot_of.contains_key(k)
    }

    /// Returns `(remainder, combo)` with `v = remainder + Σ combo[t] · inserted[t]`.
    pub fn reduce(&self, v: &SparseVec<K>) -> (SparseVec<K>, SparseVec<usize>) {
        let mut out = v.clone();
        let mut combo = SparseVec::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = {
                let mut iter: Box<dyn Iterator<Item = (&K, &Q)>> = match &cursor {
                    None => Box::new(out.iter()),
                    Some(c) => Box::new(out.range((Bound::Excluded(c), Bound::Unbounded))),
                };
                iter.find(|(k, _)| self.pivot_of.contains_key(*k))
                    .map(|(k, c)| (k.clone(), c.clone()))
            };
            let Some((k, coef)) = next else { break };
            let row = &self.rows[self.pivot_of[&k]];
            for (kk, vv) in &row.vec {
                add_to(&mut out, kk, -(&coef * vv));
            }
            if self.track {
                for (t, c) in &row.combo {
                    add_to(&mut combo, t, &coef * c);
                }
            }
            cursor = Some(k);
        }
        (out, combo)
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v` under `tag`.
    pub fn insert(&mut self, v: SparseVec<K>, tag: usize) -> Insertion {
        let (mut r, combo) = self.reduce(&v);
        if r.is_empty() {
            let mut relation = SparseVec::new();
            if self.track {
                relation.insert(tag, Q::one());
                for (t, c) in combo {
                    add_to(&mut relation, &t, -c);
                }
            }
            return Insertion::Dependent(relation);
        }
        let (lead, lc) = r
            .iter()
            .next()
            .map(|(k, c)| (k.clone(), c.clone()))
            .unwrap();
        let inv = lc.recip();
        for x in r.values_mut() {
            *x *= &inv;
        }
        let mut row_combo = SparseVec::new();
        if self.track {
            row_combo.insert(tag, inv.clone());
            for (t, c) in combo {
                add_to(&mut row_combo, &t, -(c * &inv));
            }
        }
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(Row {
            vec: r,
            combo: row_combo,
        });
        Insertion::Pivot
    }

    /// Solves `Σ x[t] · inserted[t] = v`. Requires tracking.
    pub fn solve(&self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        assert!(self.track, "solve requires an echelon built with tracking");
        let (r, combo) = self.reduce(v);
        r.is_empty().then_some(combo)
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.rows.iter().map(|r| &r.vec)
    }
}
