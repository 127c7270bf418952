use std::collections::BTreeMap;

use edgemap::cosimplicial::{d_i, from_sigma_coordinates, sigma_part, BigradedElement};
use edgemap::exterior::{monomials, Form};
use edgemap::linalg::{Matrix, Subspace};
use edgemap::rational::{qi, Q};
use edgemap::spectral::random::{
    random_bicomplex, random_chain_complex, random_chain_map, random_free_complex,
    random_module_complex,
};
use edgemap::spectral::{
    build_cone_triple, phi, verify_cone_lemma, Bicomplex, ChainComplex, ConeLemmaOptions,
    FreeComplex, Page, SpectralError,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Flattens the bicomplex with spots ordered by increasing `q` and returns `dim H^n`.
fn flattened_betti(b: &Bicomplex) -> Vec<usize> {
    let top = b.width() + b.height() - 2;
    let layout = |n: usize| -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut offset = 0;
        for q in (0..b.height()).rev() {
            if n >= q && n - q < b.width() {
                out.push((n - q, q, offset));
                offset += b.dim(n - q, q);
            }
        }
        out
    };
    let size = |n: usize| {
        layout(n)
            .iter()
            .map(|&(p, q, _)| b.dim(p, q))
            .sum::<usize>()
    };
    let differential = |n: usize| -> Matrix {
        let mut m = Matrix::zeros(size(n + 1), size(n));
        for &(p, q, src) in &layout(n) {
            for &(tp, tq, dst) in &layout(n + 1) {
                let block = if (tp, tq) == (p + 1, q) {
                    b.d_one(p, q)
                } else if (tp, tq) == (p, q + 1) {
                    b.d_two(p, q)
                } else {
                    continue;
                };
                for i in 0..block.rows() {
                    for j in 0..block.cols() {
                        m[(dst + i, src + j)] = block[(i, j)].clone();
                    }
                }
            }
        }
        m
    };
    (0..=top)
        .map(|n| {
            let out = differential(n).rank();
            let inc = if n == 0 {
                0
            } else {
                differential(n - 1).rank()
            };
            size(n) - out - inc
        })
        .collect()
}

/// `Z_2` and `B_2` from the column cohomology and the induced first differential.
fn second_page_oracle(b: &Bicomplex, p: usize, q: usize) -> (Subspace, Subspace) {
    let len = b.dim(p, q);
    let z1 = |p: usize, q: usize| Subspace::span(b.dim(p, q), &b.d_two(p, q).kernel());
    let b1 = |p: usize, q: usize| {
        if q == 0 {
            Subspace::zero(b.dim(p, q))
        } else {
            Subspace::column_space(b.d_two(p, q - 1))
        }
    };
    let here = z1(p, q);
    let z2: Vec<Vec<Q>> = if p + 1 < b.width() {
        let target = b1(p + 1, q);
        // z = Σ c_i z_i with d_I z ∈ B_1
        let mut columns: Vec<Vec<Q>> = here
            .basis()
            .iter()
            .map(|z| b.d_one(p, q).mul_vec(z))
            .collect();
        columns.extend(target.basis().iter().cloned());
        let system = Matrix::from_columns(b.dim(p + 1, q), &columns);
        system
            .kernel()
            .iter()
            .map(|k| {
                let mut v = vec![Q::zero(); len];
                for (c, z) in k.iter().zip(here.basis()) {
                    for (e, zi) in v.iter_mut().zip(z) {
                        *e += c * zi;
                    }
                }
                v
            })
            .collect()
    } else {
        here.basis().to_vec()
    };
    let mut b2 = b1(p, q);
    if p > 0 {
        let image: Vec<Vec<Q>> = z1(p - 1, q)
            .basis()
            .iter()
            .map(|z| b.d_one(p - 1, q).mul_vec(z))
            .collect();
        b2 = b2.sum(&Subspace::span(len, &image));
    }
    (Subspace::span(len, &z2), b2)
}

#[test]
fn random_bicomplexes_converge_and_match_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let (w, h) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let b = random_bicomplex(&mut rng, w, h, 4);
        let betti: Vec<usize> = b.total_cohomology().iter().map(|h| h.dim()).collect();
        assert_eq!(betti, flattened_betti(&b));
        let e1 = b.page(Page::E1).unwrap();
        let e2 = b.page(Page::E2).unwrap();
        let einf = b.page(Page::Infinity).unwrap();
        let stable = b.page(Page::Finite(w.max(h) + 1)).unwrap();
        for (n, &h) in betti.iter().enumerate() {
            assert_eq!(einf.total_dim(n), h);
        }
        for p in 0..w {
            for q in 0..h {
                assert!(e2.dim(p, q) <= e1.dim(p, q));
                assert!(einf.dim(p, q) <= e2.dim(p, q));
                assert_eq!(stable.dim(p, q), einf.dim(p, q));
                let (z2, b2) = second_page_oracle(&b, p, q);
                let entry = e2.entry(p, q).unwrap();
                assert_eq!(entry.cycles(), &z2);
                assert_eq!(entry.boundaries(), &b2);
            }
        }
    }
}

#[test]
fn edge_map_agrees_with_zigzag_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut nonzero = 0;
    for _ in 0..60 {
        let b = random_bicomplex(&mut rng, 3, 3, 3);
        let e2 = b.page(Page::E2).unwrap();
        let einf = b.page(Page::Infinity).unwrap();
        for n in 0..=b.top_degree() {
            for p in 0..b.width().min(n + 1) {
                let q = n - p;
                if q >= b.height() {
                    continue;
                }
                // total cocycles vanishing in columns below p, plus one random coboundary
                let filtered = b.filtered_cocycles(n, p);
                for x in filtered.basis() {
                    let lead: usize = b.spots(n).iter().filter(|s| s.p < p).map(|s| s.len).sum();
                    if x[..lead].iter().any(|c| !c.is_zero()) {
                        assert!(matches!(
                            b.edge_map_eval(&e2, p, q, x),
                            Err(SpectralError::NotInFiltration { .. })
                        ));
                        continue;
                    }
                    let class = b.edge_map_eval(&e2, p, q, x).unwrap();
                    let (z2, b2) = second_page_oracle(&b, p, q);
                    let xp = b.component(n, p, x);
                    assert!(z2.contains(&xp));
                    assert_eq!(class.iter().all(Zero::is_zero), b2.contains(&xp));
                    if !b2.contains(&xp) {
                        nonzero += 1;
                    }
                    b.edge_map_eval(&einf, p, q, x).unwrap();
                }
                if n > 0 {
                    let d = b.total_differential(n - 1);
                    let y: Vec<Q> = (0..d.cols()).map(|_| qi(rng.gen_range(-2..=2))).collect();
                    let boundary = d.mul_vec(&y);
                    if b.edge_map_eval(&einf, 0, n, &boundary).is_ok() {
                        assert!(b
                            .edge_map_eval(&einf, 0, n, &boundary)
                            .unwrap()
                            .iter()
                            .all(Zero::is_zero));
                    }
                }
            }
        }
    }
    assert!(nonzero > 20);
}

#[test]
fn two_column_koszul_example() {
    // Koszul complex of x on Q[x]/x^3 in two columns: K^{0,q} = Q^3 --x--> K^{1,q} = Q^3,
    // with d_II the identity between rows 0 and 1 of column 0.
    let mult = Matrix::from_i64(3, 3, &[0, 0, 0, 1, 0, 0, 0, 1, 0]);
    let d_one: BTreeMap<_, _> = [((0, 0), mult.clone()), ((0, 1), mult.scale(&qi(-1)))]
        .into_iter()
        .collect();
    let d_two: BTreeMap<_, _> = [((0, 0), Matrix::identity(3)), ((1, 0), Matrix::identity(3))]
        .into_iter()
        .collect();
    let b = Bicomplex::new(vec![vec![3, 3], vec![3, 3]], d_one, d_two).unwrap();
    let betti: Vec<usize> = b.total_cohomology().iter().map(|h| h.dim()).collect();
    assert_eq!(betti, flattened_betti(&b));
    let e1 = b.page(Page::E1).unwrap();
    assert_eq!(e1.total_dim(0) + e1.total_dim(1) + e1.total_dim(2), 0);

    // with d_II = 0 the first page is everything and the second is Koszul homology
    let d_one: BTreeMap<_, _> = [((0, 0), mult)].into_iter().collect();
    let b = Bicomplex::new(vec![vec![3], vec![3]], d_one, BTreeMap::new()).unwrap();
    let e2 = b.page(Page::E2).unwrap();
    assert_eq!((e2.dim(0, 0), e2.dim(1, 0)), (1, 1));
    let einf = b.page(Page::Infinity).unwrap();
    for (n, h) in b.total_cohomology().iter().enumerate() {
        assert_eq!(einf.total_dim(n), h.dim());
    }
}

#[test]
fn cosimplicial_sigma_rows_are_concentrated_on_the_diagonal() {
    // Λ^q(Σ^p sl2^∨) under d_I, for p ≤ 3 and q ≤ 4; column 4 is only there as a target
    let dim = 3;
    let (width, height) = (5usize, 5usize);
    let basis = |p: usize, q: usize| monomials(dim * p, q);
    let dims: Vec<Vec<usize>> = (0..width)
        .map(|p| (0..height).map(|q| basis(p, q).len()).collect())
        .collect();
    let mut d_one = BTreeMap::new();
    for p in 0..width - 1 {
        for q in 0..height {
            let target = basis(p + 1, q);
            let index: BTreeMap<u128, usize> =
                target.iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let source = basis(p, q);
            let mut m = Matrix::zeros(target.len(), source.len());
            for (j, &mono) in source.iter().enumerate() {
                let form = from_sigma_coordinates(&Form::from_terms(dim, p + 1, [(mono, qi(1))]));
                let image = d_i(&BigradedElement::new(p, q, form).unwrap());
                let coords = sigma_part(image.form()).expect("cofaces preserve Σ");
                for (mono, c) in coords.terms() {
                    m[(index[mono], j)] = c.clone();
                }
            }
            d_one.insert((p, q), m);
        }
    }
    let b = Bicomplex::new(dims, d_one, BTreeMap::new()).unwrap();
    let e2 = b.page(Page::E2).unwrap();
    for p in 0..width - 1 {
        for q in 0..height {
            // Sym^q of a three-dimensional space sits at p = q
            let expected = if p == q { (q + 1) * (q + 2) / 2 } else { 0 };
            assert_eq!(e2.dim(p, q), expected, "({p}, {q})");
        }
    }
}

#[test]
fn cone_triples_satisfy_the_cone_facts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..40 {
        let (la, lb) = (rng.gen_range(1..=3), rng.gen_range(1..=4));
        let a = random_module_complex(&mut rng, la, 4).shift_up();
        let b = random_module_complex(&mut rng, lb, 4);
        let f = random_chain_map(&mut rng, &a, &b);
        let k = random_free_complex(&mut rng, true);
        let t = build_cone_triple(&a, &b, &f, &k).unwrap();
        assert_eq!(t.long_exactness(), Ok(()));
        // d_II(a, b) = (-d_II a, (-1)^p f(a) + d_II b), entrywise on basis vectors
        for p in 0..t.c.width() {
            for q in 0..t.c.height() {
                let (na, nb) = (t.a.dim(p, q + 1), t.b.dim(p, q));
                for j in 0..na + nb {
                    let mut e = vec![Q::zero(); na + nb];
                    e[j] = qi(1);
                    let lhs = t.c.d_two(p, q).mul_vec(&e);
                    let (xa, xb) = e.split_at(na);
                    let mut rhs: Vec<Q> = if q + 1 < t.a.height() {
                        t.a.d_two(p, q + 1)
                            .mul_vec(xa)
                            .into_iter()
                            .map(|c| -c)
                            .collect()
                    } else {
                        vec![]
                    };
                    let mut second = if q + 1 < t.b.height() {
                        t.b.d_two(p, q).mul_vec(xb)
                    } else {
                        vec![Q::zero(); t.b.dim(p, q + 1)]
                    };
                    if let Some(fm) = t.f.block(p, q + 1) {
                        let sign = if p % 2 == 0 { qi(1) } else { qi(-1) };
                        for (s, v) in second.iter_mut().zip(fm.mul_vec(xa)) {
                            *s += &sign * v;
                        }
                    }
                    rhs.extend(second);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn cone_of_zero_source_is_the_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = random_chain_complex(&mut rng, 3, 3);
    let a = ChainComplex::zero(vec![0, 0, 0]);
    let f: Vec<Matrix> = (0..3).map(|q| Matrix::zeros(b.dim(q), 0)).collect();
    let k = FreeComplex::constant(&random_chain_complex(&mut rng, 2, 2));
    let t = build_cone_triple(&a, &b, &f, &k).unwrap();
    assert_eq!(t.c, t.b);
}

#[test]
fn cone_of_identity_has_no_cohomology() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let a = random_module_complex(&mut rng, 3, 4).shift_up();
        let id: Vec<Matrix> = a.dims().iter().map(|&d| Matrix::identity(d)).collect();
        let k = random_free_complex(&mut rng, true);
        let t = build_cone_triple(&a, &a, &id, &k).unwrap();
        assert!(t.c.total_cohomology().iter().all(|h| h.dim() == 0));
    }
}

#[test]
fn split_injection_has_vanishing_phi() {
    // f : 𝒜 → 𝒜 ⊕ 𝒟, so E_2(A) → E_2(B) is injective and φ vanishes on ker(E_2(B) → E_2(C))
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut evaluated = 0;
    for _ in 0..20 {
        let a = random_chain_complex(&mut rng, 3, 2).shift_up();
        let extra = random_chain_complex(&mut rng, 4, 2);
        let dims: Vec<usize> = (0..4).map(|q| a.dim(q) + extra.dim(q)).collect();
        let d: Vec<Matrix> = (0..3)
            .map(|q| {
                let mut m = Matrix::zeros(dims[q + 1], dims[q]);
                m.set_block(0, 0, &a.d(q));
                m.set_block(a.dim(q + 1), a.dim(q), &extra.d(q));
                m
            })
            .collect();
        let b = ChainComplex::new(dims.clone(), d).unwrap();
        let f: Vec<Matrix> = (0..4)
            .map(|q| {
                let mut m = Matrix::zeros(dims[q], a.dim(q));
                m.set_block(0, 0, &Matrix::identity(a.dim(q)));
                m
            })
            .collect();
        let k = FreeComplex::constant(&random_chain_complex(&mut rng, 3, 2));
        let t = build_cone_triple(&a, &b, &f, &k).unwrap();
        let e2 = t.b.page(Page::E2).unwrap();
        for p in 0..t.b.width().saturating_sub(1) {
            for q in 0..t.b.height() {
                let map = t.phi_map(p, q);
                for beta in e2.entry(p + 1, q).unwrap().basis_representatives() {
                    match map.apply(beta) {
                        Ok(v) => {
                            evaluated += 1;
                            assert!(v.iter().all(Zero::is_zero));
                        }
                        Err(SpectralError::NotInKernel) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }
    assert!(evaluated > 0);
}

#[test]
fn phi_rejects_classes_outside_its_domain() {
    // 𝒜 = 0 ⇒ g is an isomorphism, so every nonzero class of E_2(B) survives in E_2(C)
    let b = ChainComplex::zero(vec![1]);
    let a = ChainComplex::zero(vec![0]);
    let k = FreeComplex::constant(&ChainComplex::zero(vec![1, 1]));
    let t = build_cone_triple(&a, &b, &[Matrix::zeros(1, 0)], &k).unwrap();
    assert_eq!(phi(&t, 0, 0, &[qi(1)]), Err(SpectralError::NotInKernel));
}

#[test]
fn cone_lemma_on_one_hundred_trials() {
    let report = verify_cone_lemma(1, 100, ConeLemmaOptions::default());
    assert_eq!((report.passed, report.failed), (100, 0));
    let nontrivial: usize = report.trials.iter().map(|t| t.nontrivial).sum();
    assert!(nontrivial >= 10, "only {nontrivial} nonzero comparisons");
}

#[test]
fn injected_fault_is_detected() {
    let report = verify_cone_lemma(
        1,
        30,
        ConeLemmaOptions {
            inject_fault: true,
            ..Default::default()
        },
    );
    assert!(report.failed > 0);
}

#[test]
fn all_zero_triple_passes_vacuously() {
    let a = ChainComplex::zero(vec![0, 0]);
    let t = build_cone_triple(
        &a,
        &a,
        &[],
        &FreeComplex::constant(&ChainComplex::zero(vec![0, 0])),
    )
    .unwrap();
    assert!(t.c.total_cohomology().iter().all(|h| h.dim() == 0));
    assert_eq!(t.long_exactness(), Ok(()));
}
