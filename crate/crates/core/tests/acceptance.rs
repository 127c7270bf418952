//! End-to-end acceptance checks. Runs without the libtest harness so that the PASS/FAIL
//! summary is always printed; exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use edgemap::cosimplicial::{d_i, d_ii, dual_to_sigma_one, BigradedElement};
use edgemap::exterior::{monomials, Form};
use edgemap::lie::LieAlgebra;
use edgemap::poly::Poly;
use edgemap::rational::{q, qi, Q};
use edgemap::spectral::random::{
    random_bicomplex, random_chain_map, random_free_complex, random_module_complex,
};
use edgemap::spectral::{build_cone_triple, verify_cone_lemma, ConeLemmaOptions, Page};
use edgemap::transgression::{
    ce_cohomology, classes_proportional, edge_map, inverse_alexander_whitney, symmetrize,
    transgress, CohomologyClass, PivotOrder,
};
use edgemap::wonderful::{
    beta, cokernel_presentation, decompose_beta, display_a1_translation, invariant_basis,
    recompose, residue_class, uv_names, xy_names, CokernelMode, RootSystemData, UVPolynomial,
    DEFAULT_DEGREE_BOUND,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const XYZ: [&str; 3] = ["x", "y", "z"];

const DISPLAYED_A22: &str =
    "2 x2^x1 + 2 x3^x2 + 2 x1^x3 + z2^y1 + y1^z3 + y3^z2 + z3^y3 + y2^z1 + z1^y3 + z3^y2 + y3^z3";

fn c2(text: &str) -> Form {
    Form::parse(text, &XYZ, 3).unwrap()
}

fn check(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn pgl2_transgression() -> Result<(), String> {
    let g = LieAlgebra::sl2();
    let det = g.parse_polynomial("-x^2 - y*z").unwrap();
    let class = edge_map(&det, &g).map_err(|e| e.to_string())?;
    let eta = CohomologyClass::new(&g, g.cartan_three_form()).unwrap();
    check(
        classes_proportional(&class, &eta) == Some(q(1, 2)),
        "class is not eta/2",
    )
}

fn intermediate_anchor() -> Result<(), String> {
    let g = LieAlgebra::sl2();
    let det = g.parse_polynomial("-x^2 - y*z").unwrap();
    let top = inverse_alexander_whitney(&symmetrize(&det));
    check(
        (top.p(), top.q()) == (2, 2),
        "top entry not in bidegree (2, 2)",
    )?;
    check(*top.form() == c2(DISPLAYED_A22), "a^{2,2} differs")?;
    let eighth = BigradedElement::new(
        1,
        3,
        dual_to_sigma_one(&g.cartan_three_form().scale(&q(1, 8))),
    )
    .unwrap();
    let quarter = d_ii(&top, &g).unwrap().scale(&q(1, 4));
    check(d_i(&eighth) == quarter, "d_I(eta/8) != d_II(a^{2,2})/4")
}

fn random_form(rng: &mut ChaCha8Rng, dim: usize, slots: usize, degree: usize) -> Form {
    let cells = monomials(dim * slots, degree);
    let terms: Vec<_> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let m = cells[rng.gen_range(0..cells.len())];
            (m, qi(rng.gen_range(-5..=5)))
        })
        .collect();
    let mut f = Form::zero(dim, slots);
    for (m, c) in terms {
        f = &f + &Form::from_terms(dim, slots, [(m, c)]);
    }
    f
}

fn property_suite() -> Result<(), String> {
    let mut failures = Vec::new();
    for g in [LieAlgebra::sl2(), LieAlgebra::sl3()] {
        let n = g.dim();
        let unit = |i: usize| {
            let mut v = vec![Q::zero(); n];
            v[i] = qi(1);
            v
        };
        for i in 0..n {
            for j in 0..n {
                if g.bracket(&unit(i), &unit(j))
                    != g.bracket(&unit(j), &unit(i))
                        .into_iter()
                        .map(|c| -c)
                        .collect::<Vec<_>>()
                {
                    failures.push(format!("antisymmetry at ({i}, {j})"));
                }
                for k in 0..n {
                    let mut sum = vec![Q::zero(); n];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        let t = g.bracket(&unit(a), &g.bracket(&unit(b), &unit(c)));
                        for (s, x) in sum.iter_mut().zip(t) {
                            *s += x;
                        }
                    }
                    if sum.iter().any(|c| !c.is_zero()) {
                        failures.push(format!("Jacobi at ({i}, {j}, {k})"));
                    }
                }
            }
        }
        for degree in 0..=2 {
            for m in monomials(n, degree) {
                let f = Form::from_terms(n, 1, [(m, qi(1))]);
                let d = f.ce_differential(&g).unwrap();
                if !d.ce_differential(&g).unwrap().is_zero() {
                    failures.push(format!("delta^2 on a generator monomial of sl dim {n}"));
                }
                // Leibniz against every generator
                for b in 0..n {
                    let y = Form::generator(n, 1, b, 0);
                    let lhs = f.wedge(&y).unwrap().ce_differential(&g).unwrap();
                    let sign = if degree % 2 == 0 { qi(1) } else { qi(-1) };
                    let rhs = &d.wedge(&y).unwrap()
                        + &f.wedge(&y.ce_differential(&g).unwrap())
                            .unwrap()
                            .scale(&sign);
                    if lhs != rhs {
                        failures.push("Leibniz on generators".into());
                    }
                }
            }
        }
        for p in 0..=1 {
            for slot in 0..=p {
                for b in 0..n {
                    let e = BigradedElement::new(p, 1, Form::generator(n, p + 1, b, slot)).unwrap();
                    if !anticommutes(&e, &g) {
                        failures.push(format!("d_I d_II + d_II d_I on a generator at p = {p}"));
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..120 {
        let g = if trial % 2 == 0 {
            LieAlgebra::sl2()
        } else {
            LieAlgebra::sl3()
        };
        let n = g.dim();
        let da = rng.gen_range(0..=2);
        let a = random_form(&mut rng, n, 1, da);
        let db = rng.gen_range(0..=2);
        let b = random_form(&mut rng, n, 1, db);
        if !a
            .ce_differential(&g)
            .unwrap()
            .ce_differential(&g)
            .unwrap()
            .is_zero()
        {
            failures.push(format!("delta^2 on random form {trial}"));
        }
        let lhs = a.wedge(&b).unwrap().ce_differential(&g).unwrap();
        let sign = if da % 2 == 0 { qi(1) } else { qi(-1) };
        let rhs = &a.ce_differential(&g).unwrap().wedge(&b).unwrap()
            + &a.wedge(&b.ce_differential(&g).unwrap())
                .unwrap()
                .scale(&sign);
        if lhs != rhs {
            failures.push(format!("Leibniz on random pair {trial}"));
        }
        let p = rng.gen_range(0..=2);
        let e = BigradedElement::new(p, 2, random_form(&mut rng, n, p + 1, 2)).unwrap();
        if !anticommutes(&e, &g) {
            failures.push(format!("bicomplex identity on random form {trial}"));
        }
    }
    match failures.first() {
        None => Ok(()),
        Some(f) => Err(format!("{} failures, first: {f}", failures.len())),
    }
}

fn anticommutes(e: &BigradedElement, g: &LieAlgebra) -> bool {
    let di = d_i(e);
    let dii = d_ii(e, g).unwrap();
    let dd_i = d_i(&d_i(e));
    let dd_ii = d_ii(&dii, g).unwrap();
    d_ii(&di, g).unwrap().add(&d_i(&dii)).unwrap().is_zero() && dd_i.is_zero() && dd_ii.is_zero()
}

fn ce_dimensions() -> Result<(), String> {
    let betti = |g: &LieAlgebra, range: std::ops::RangeInclusive<usize>| -> Vec<usize> {
        range.map(|k| ce_cohomology(g, k).dim()).collect()
    };
    check(
        betti(&LieAlgebra::sl2(), 0..=3) == [1, 0, 0, 1],
        "sl2 Betti numbers",
    )?;
    check(
        betti(&LieAlgebra::sl3(), 3..=5) == [1, 0, 1],
        "sl3 H^3, H^4, H^5",
    )?;
    for n in 1..=4usize {
        let binomial: Vec<usize> = (0..=n)
            .map(|k| (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1)))
            .collect();
        check(
            betti(&LieAlgebra::abelian(n), 0..=n) == binomial,
            "abelian Betti numbers",
        )?;
    }
    Ok(())
}

fn spectral_engine() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..200 {
        let (w, h) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let b = random_bicomplex(&mut rng, w, h, 4);
        let einf = b.page(Page::Infinity).map_err(|e| e.to_string())?;
        for (n, hn) in b.total_cohomology().iter().enumerate() {
            check(
                einf.total_dim(n) == hn.dim(),
                &format!("E_inf total dimension in degree {n}, trial {trial}"),
            )?;
        }
    }
    for trial in 0..40 {
        let (la, lb) = (rng.gen_range(1..=3), rng.gen_range(1..=4));
        let a = random_module_complex(&mut rng, la, 4).shift_up();
        let b = random_module_complex(&mut rng, lb, 4);
        let f = random_chain_map(&mut rng, &a, &b);
        let k = random_free_complex(&mut rng, true);
        let t = build_cone_triple(&a, &b, &f, &k).map_err(|e| e.to_string())?;
        if let Err((n, what)) = t.long_exactness() {
            return Err(format!(
                "cone long exact sequence fails at {what} in degree {n}, trial {trial}"
            ));
        }
    }
    let report = verify_cone_lemma(1, 100, ConeLemmaOptions::default());
    check(
        report.passed == 100,
        &format!("cone lemma passed {}/100", report.passed),
    )
}

fn uv(l: usize, text: &str) -> UVPolynomial {
    UVPolynomial::parse(l, text).unwrap()
}

fn wonderful_pgl2() -> Result<(), String> {
    let r = RootSystemData::a1();
    let p = Poly::parse("u1^2", &uv_names(1)[..1]).unwrap();
    let b = beta(&r, &p).map_err(|e| e.to_string())?;
    check(
        b.to_xy() == Poly::parse("4 x1 y1", &xy_names(1)).unwrap(),
        "beta(u1^2) != 4 x1 y1",
    )?;
    check(
        decompose_beta(&b).unwrap() == vec![uv(1, "4 u1 + 4 v1")],
        "f_1 != 4 (u1 + v1)",
    )?;
    let res = residue_class(&r, &p, CokernelMode::Nonequivariant, DEFAULT_DEGREE_BOUND)
        .map_err(|e| e.to_string())?;
    check(!res.is_zero, "nonequivariant class vanishes")?;
    let t = res.representative[0].a1_translation().unwrap();
    check(
        display_a1_translation(&t) == "4 σ⊗1 - 4 1⊗σ",
        "translated class is not 4 (σ⊗1 - 1⊗σ)",
    )
}

fn wonderful_a2() -> Result<(), String> {
    let r = RootSystemData::a2();
    for d in 2..=3 {
        for p in invariant_basis(&r, &[0, 1], d).unwrap() {
            let b = beta(&r, &p).map_err(|e| e.to_string())?;
            let expected = (UVPolynomial::from_u(&p).poly() - UVPolynomial::from_v(&p).poly())
                .scale(&qi(1 << d));
            check(*b.poly() == expected, "beta != 2^d (p(u) - p(v))")?;
            let fs = decompose_beta(&b).map_err(|e| e.to_string())?;
            check(recompose(&fs) == b, "decomposition does not recompose")?;
            for mode in [CokernelMode::Equivariant, CokernelMode::Nonequivariant] {
                let res =
                    residue_class(&r, &p, mode, DEFAULT_DEGREE_BOUND).map_err(|e| e.to_string())?;
                check(recompose(&res.components) == b, "residue components")?;
            }
        }
    }
    for mode in [CokernelMode::Equivariant, CokernelMode::Nonequivariant] {
        let base = cokernel_presentation(&r, mode, 3, None).map_err(|e| e.to_string())?;
        for seed in 0..3 {
            let other = cokernel_presentation(&r, mode, 3, Some(seed)).unwrap();
            check(
                other.dims() == base.dims(),
                "cokernel dims depend on the basis order",
            )?;
        }
    }
    Ok(())
}

fn solver_independence() -> Result<(), String> {
    let orders = [
        PivotOrder::Lexicographic,
        PivotOrder::Reversed,
        PivotOrder::Shuffled(5),
    ];
    let sl2 = LieAlgebra::sl2();
    let sl3 = LieAlgebra::sl3();
    let runs = [
        (&sl2, sl2.parse_polynomial("-x^2 - y*z").unwrap()),
        (&sl3, sl3.trace_power(2).unwrap()),
        (&sl3, sl3.trace_power(3).unwrap()),
    ];
    for (g, p) in &runs {
        let classes: Vec<CohomologyClass> = orders
            .iter()
            .map(|&o| transgress(p, g, o).map(|t| t.class))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        check(!classes[0].is_zero(), "zero class")?;
        for c in &classes[1..] {
            check(
                classes_proportional(c, &classes[0]) == Some(qi(1)),
                "pivot orders disagree",
            )?;
        }
    }
    Ok(())
}

type Criterion = (&'static str, fn() -> Result<(), String>, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "1 PGL2 transgression is eta/2",
            pgl2_transgression,
            Some(Duration::from_secs(1)),
        ),
        (
            "2 intermediate a^{2,2} anchor",
            intermediate_anchor,
            Some(Duration::from_secs(1)),
        ),
        ("3 algebraic property suite", property_suite, None),
        (
            "4 CE cohomology dimensions",
            ce_dimensions,
            Some(Duration::from_secs(10)),
        ),
        (
            "5 spectral engine and cone lemma",
            spectral_engine,
            Some(Duration::from_secs(60)),
        ),
        (
            "6 wonderful PGL2 residue",
            wonderful_pgl2,
            Some(Duration::from_secs(1)),
        ),
        (
            "7 wonderful A2 regression",
            wonderful_a2,
            Some(Duration::from_secs(30)),
        ),
        ("8 solver independence", solver_independence, None),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(()), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        match result {
            Ok(()) => println!("PASS  criterion {name} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
