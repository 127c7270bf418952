use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use edgemap::cosimplicial::{DIFFERENTIAL_CONVENTION, SIGMA_CONVENTION};
use edgemap::exterior::{CE_CONVENTION, WEDGE_CONVENTION};
use edgemap::lie::{LieAlgebra, LieError};
use edgemap::poly::Poly;
use edgemap::rational::{fmt_rational, Q};
use edgemap::spectral::{verify_cone_lemma, ConeLemmaOptions};
use edgemap::transgression::{
    classes_proportional, transgress as run_transgression, CohomologyClass, PivotOrder,
    TransgressionError,
};
use edgemap::wonderful::{
    cokernel_presentation, display_a1_translation, is_in_a, residue_class, CokernelMode,
    RootSystemData, WonderfulError,
};
use serde_json::{json, Value};

use crate::report::{digest, Assertion, Outcome, RunReport};
use crate::{
    Builtin, CliError, CokernelArgs, Mode, Pivot, ResidueArgs, RootArgs, TransgressArgs,
    VerifyConeArgs,
};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn q_str(x: &Q) -> String {
    fmt_rational(x)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn lie_error(e: LieError) -> CliError {
    CliError::Input(e.to_string())
}

fn transgression_error(e: TransgressionError) -> CliError {
    match e {
        TransgressionError::NotInvariant => CliError::Invariance(e.to_string()),
        TransgressionError::UnsolvableSystem { .. }
        | TransgressionError::TopNotClosed
        | TransgressionError::NotClosed => CliError::Solver(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn wonderful_error(e: WonderfulError) -> CliError {
    match e {
        WonderfulError::NotInvariant => CliError::Invariance(e.to_string()),
        WonderfulError::NotDivisible | WonderfulError::NoDecompositionInA => {
            CliError::Solver(e.to_string())
        }
        WonderfulError::DegreeBoundTooSmall { .. } => CliError::DegreeBound(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

pub fn transgress(a: &TransgressArgs, echo: &str) -> Result<Outcome, CliError> {
    let (g, source, shown) = match (&a.algebra, a.builtin) {
        (Some(path), _) => {
            let text = read(path)?;
            let g = LieAlgebra::from_json(&text).map_err(lie_error)?;
            (g, text, path.display().to_string())
        }
        (None, Some(b)) => {
            let (g, name) = match b {
                Builtin::Sl2 => (LieAlgebra::sl2(), "sl2"),
                Builtin::Sl3 => (LieAlgebra::sl3(), "sl3"),
                Builtin::Gl2 => (LieAlgebra::gl2(), "gl2"),
            };
            (g, format!("builtin:{name}"), name.to_string())
        }
        (None, None) => {
            return Err(CliError::Input(
                "one of --algebra, --builtin is required".into(),
            ))
        }
    };
    let (order, order_name) = match a.pivot {
        Pivot::Lex => (PivotOrder::Lexicographic, "lexicographic".to_string()),
        Pivot::Rev => (PivotOrder::Reversed, "reversed".to_string()),
        Pivot::Shuffle => (PivotOrder::Shuffled(a.seed), format!("shuffled:{}", a.seed)),
    };
    let inputs_digest = digest(&[
        ("command", "transgress"),
        ("algebra", &source),
        ("poly", &a.poly),
        ("pivot", &order_name),
    ]);
    let labels = g.dual_labels().to_vec();
    let p = g.parse_polynomial(&a.poly).map_err(lie_error)?;
    let mut conventions = BTreeMap::new();
    conventions.insert("ce_differential", CE_CONVENTION);
    conventions.insert("wedge", WEDGE_CONVENTION);
    conventions.insert("sigma_one", SIGMA_CONVENTION);
    conventions.insert("bicomplex", DIFFERENTIAL_CONVENTION);

    let mut text = vec![
        format!("algebra: {shown} (dimension {})", g.dim()),
        format!("polynomial: {}", p.poly().display_with(&labels)),
        format!("pivot order: {order_name}"),
    ];
    if p.poly().is_zero() {
        text.push("class: 0".into());
        let outputs = json!({
            "algebra": { "dim": g.dim(), "dual_labels": labels },
            "polynomial": "0",
            "pivot_order": order_name,
            "chain": [],
            "class": { "degree": Value::Null, "representative": "0", "normal_form": "0", "zero": true },
            "eta_factor": Value::Null,
        });
        return Ok(Outcome {
            report: RunReport {
                command: echo.to_string(),
                inputs_digest,
                conventions,
                outputs,
                assertions: vec![],
                timing_ms: None,
            },
            text,
            json_lines: vec![],
        });
    }
    if !g.is_invariant(&p) {
        return Err(CliError::Invariance(
            "polynomial is not invariant under the coadjoint action".into(),
        ));
    }
    let t = run_transgression(&p, &g, order).map_err(transgression_error)?;
    text[1] = format!(
        "polynomial: {} (degree {})",
        p.poly().display_with(&labels),
        p.degree()
    );

    let mut chain = Vec::new();
    for e in t.chain.entries() {
        let form = e.form().display_with(&labels);
        text.push(format!("a^{{{},{}}} = {form}", e.p(), e.q()));
        chain.push(json!({ "p": e.p(), "q": e.q(), "form": form }));
    }
    let class = &t.class;
    let normal = class.normal_form().display_with(&labels);
    text.push(format!("class in H^{}: {normal}", class.degree()));
    text.push(format!("zero class: {}", yes_no(class.is_zero())));

    let mut assertions = vec![Assertion::new(
        "recurrence",
        t.chain.satisfies_recurrence(&g),
    )];
    let mut eta_factor = Value::Null;
    if class.degree() == 3 {
        let eta = CohomologyClass::new(&g, g.cartan_three_form()).map_err(transgression_error)?;
        if !eta.is_zero() {
            let factor = classes_proportional(class, &eta);
            assertions.push(Assertion::new("proportional_to_eta", factor.is_some()));
            match factor {
                Some(f) => {
                    text.push(format!("factor against eta: {}", q_str(&f)));
                    eta_factor = json!(q_str(&f));
                }
                None => text.push("factor against eta: not proportional".into()),
            }
        }
    }
    let outputs = json!({
        "algebra": { "dim": g.dim(), "dual_labels": labels },
        "polynomial": p.poly().display_with(&labels),
        "degree": p.degree(),
        "pivot_order": order_name,
        "chain": chain,
        "class": {
            "degree": class.degree(),
            "representative": class.representative().display_with(&labels),
            "normal_form": normal,
            "zero": class.is_zero(),
        },
        "eta_factor": eta_factor,
    });
    Ok(Outcome {
        report: RunReport {
            command: echo.to_string(),
            inputs_digest,
            conventions,
            outputs,
            assertions,
            timing_ms: None,
        },
        text,
        json_lines: vec![],
    })
}

fn root_system(root: &RootArgs) -> Result<(RootSystemData, String), CliError> {
    match (&root.type_name, &root.cartan) {
        (Some(name), _) => Ok((
            RootSystemData::from_type(name).map_err(wonderful_error)?,
            format!("type:{}", name.to_ascii_uppercase()),
        )),
        (None, Some(path)) => {
            let text = read(path)?;
            Ok((
                RootSystemData::from_json(&text).map_err(wonderful_error)?,
                text,
            ))
        }
        (None, None) => Err(CliError::Input(
            "one of --type, --cartan is required".into(),
        )),
    }
}

fn mode_of(m: Mode) -> (CokernelMode, &'static str) {
    match m {
        Mode::Eq => (CokernelMode::Equivariant, "equivariant"),
        Mode::Noneq => (CokernelMode::Nonequivariant, "nonequivariant"),
    }
}

fn wonderful_conventions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("cartan", "a_ij = <rho_i, rho_j^vee>"),
        ("weyl_action", "s_i(u_j) = u_j - a_ji u_i, same on v, x, y"),
        ("coordinates", "x_i = u_i - v_i, y_i = u_i + v_i"),
        (
            "beta",
            "p(x+y) - (-1)^d p(x-y) = sum_k x_k f_k, f_k extracted for k = 1..l in turn",
        ),
        (
            "relations",
            "(f_ij) -> (sum_{i<k} x_i f_ik - sum_{j>k} x_j f_kj)_k",
        ),
        ("rank_one_translation", "u1 -> σ⊗1, v1 -> -(1⊗σ)"),
    ])
}

fn root_json(r: &RootSystemData) -> Value {
    json!({ "label": r.label(), "rank": r.rank(), "cartan": r.cartan() })
}

pub fn residue(a: &ResidueArgs, echo: &str) -> Result<Outcome, CliError> {
    let (r, source) = root_system(&a.root)?;
    let (mode, mode_name) = mode_of(a.mode);
    let bound = a.degree_bound.to_string();
    let inputs_digest = digest(&[
        ("command", "wonderful residue"),
        ("root_system", &source),
        ("poly", &a.poly),
        ("mode", mode_name),
        ("degree_bound", &bound),
    ]);
    let l = r.rank();
    let names: Vec<String> = (1..=l).map(|i| format!("u{i}")).collect();
    let p = Poly::parse(&a.poly, &names).map_err(|e| CliError::Input(e.to_string()))?;
    let res = residue_class(&r, &p, mode, a.degree_bound).map_err(wonderful_error)?;

    let mut text = vec![
        format!("root system: {} (rank {l})", r.label()),
        format!("p = {}", p.display_with(&names)),
        format!(
            "beta = {} = {}",
            res.beta.display_uv(),
            res.beta.display_xy()
        ),
    ];
    let mut components = Vec::new();
    let mut all_in_a = true;
    for (k, f) in res.components.iter().enumerate() {
        let in_a = is_in_a(&r, &[k], f, a.degree_bound).map_err(wonderful_error)?;
        all_in_a &= in_a;
        text.push(format!(
            "f_{} = {} = {}",
            k + 1,
            f.display_uv(),
            f.display_xy()
        ));
        components.push(json!({
            "k": k + 1,
            "uv": f.display_uv(),
            "xy": f.display_xy(),
            "in_a_k": in_a,
        }));
    }
    let representative: Vec<String> = res.representative.iter().map(|f| f.display_uv()).collect();
    let n = res.degree.saturating_sub(1);
    text.push(format!("mode: {mode_name}"));
    if !res.beta.is_zero() {
        text.push(format!(
            "cokernel dimension in degree {n}: {}",
            res.cokernel_dim
        ));
        text.push(format!(
            "class representative: ({})",
            representative.join(", ")
        ));
    }
    text.push(format!("zero class: {}", yes_no(res.is_zero)));
    let translation = if l == 1 {
        let t = res.representative[0].a1_translation().expect("rank one");
        let shown = display_a1_translation(&t);
        text.push(format!("in H*(P^1 x P^1): {shown}"));
        json!(shown)
    } else {
        Value::Null
    };
    for w in &res.warnings {
        text.push(format!("warning: {w}"));
    }
    let recomposed = edgemap::wonderful::recompose(&res.components) == res.beta;
    let outputs = json!({
        "root_system": root_json(&r),
        "polynomial": p.display_with(&names),
        "degree": res.degree,
        "mode": mode_name,
        "beta": { "uv": res.beta.display_uv(), "xy": res.beta.display_xy() },
        "components": components,
        "greedy": res.greedy,
        "cokernel_degree": if res.beta.is_zero() { Value::Null } else { json!(n) },
        "cokernel_dim": res.cokernel_dim,
        "class_coordinates": res.coordinates.iter().map(q_str).collect::<Vec<_>>(),
        "representative": representative,
        "zero": res.is_zero,
        "rank_one_translation": translation,
        "warnings": res.warnings,
    });
    Ok(Outcome {
        report: RunReport {
            command: echo.to_string(),
            inputs_digest,
            conventions: wonderful_conventions(),
            outputs,
            assertions: vec![
                Assertion::new("recomposes_to_beta", recomposed),
                Assertion::new("components_in_a_k", all_in_a),
            ],
            timing_ms: None,
        },
        text,
        json_lines: vec![],
    })
}

pub fn cokernel(a: &CokernelArgs, echo: &str) -> Result<Outcome, CliError> {
    let (r, source) = root_system(&a.root)?;
    let (mode, mode_name) = mode_of(a.mode);
    let bound = a.degree_bound.to_string();
    let inputs_digest = digest(&[
        ("command", "wonderful cokernel"),
        ("root_system", &source),
        ("mode", mode_name),
        ("degree_bound", &bound),
    ]);
    let pres = cokernel_presentation(&r, mode, a.degree_bound, None).map_err(wonderful_error)?;
    let mut text = vec![
        format!("root system: {} (rank {})", r.label(), r.rank()),
        format!("mode: {mode_name}"),
        "degree  target  relations  cokernel".to_string(),
    ];
    let mut degrees = Vec::new();
    let mut consistent = true;
    for d in &pres.degrees {
        consistent &= d.well_defined && d.dim + d.relation_rank == d.target_dim;
        text.push(format!(
            "{:>6}  {:>6}  {:>9}  {:>8}",
            d.degree, d.target_dim, d.relation_rank, d.dim
        ));
        degrees.push(json!({
            "degree": d.degree,
            "target_dim": d.target_dim,
            "relation_rank": d.relation_rank,
            "dim": d.dim,
        }));
    }
    Ok(Outcome {
        report: RunReport {
            command: echo.to_string(),
            inputs_digest,
            conventions: wonderful_conventions(),
            outputs: json!({
                "root_system": root_json(&r),
                "mode": mode_name,
                "degree_bound": a.degree_bound,
                "degrees": degrees,
            }),
            assertions: vec![Assertion::new("dimensions_consistent", consistent)],
            timing_ms: None,
        },
        text,
        json_lines: vec![],
    })
}

pub fn verify_cone(a: &VerifyConeArgs, echo: &str) -> Result<Outcome, CliError> {
    let (seed, trials, max_dim) = (
        a.seed.to_string(),
        a.trials.to_string(),
        a.max_dim.to_string(),
    );
    let mut inputs = vec![
        ("command", "ss verify-cone"),
        ("seed", seed.as_str()),
        ("trials", trials.as_str()),
        ("max_dim", max_dim.as_str()),
    ];
    if a.inject_fault {
        inputs.push(("inject_fault", "true"));
    }
    let inputs_digest = digest(&inputs);
    let report = verify_cone_lemma(
        a.seed,
        a.trials,
        ConeLemmaOptions {
            max_dim: a.max_dim,
            inject_fault: a.inject_fault,
        },
    );
    let nontrivial: usize = report.trials.iter().map(|t| t.nontrivial).sum();
    let json_lines = report
        .trials
        .iter()
        .map(|t| serde_json::to_string(t).expect("trial serializes"))
        .collect();
    let mut text = vec![
        format!("seed: {}", report.seed),
        format!(
            "trials: {}  passed: {}  failed: {}",
            report.trials.len(),
            report.passed,
            report.failed
        ),
        format!("comparisons with a nonzero class: {nontrivial}"),
    ];
    for t in report.trials.iter().filter(|t| !t.passed()) {
        text.push(format!("trial {}: {}", t.trial, t.failures.join("; ")));
    }
    let conventions = BTreeMap::from([
        (
            "cone",
            "cone(f)^k = A^{k+1} + B^k, d(a, b) = (-d a, f a + d b)",
        ),
        ("filtration", "F_p = columns p' >= p"),
        ("identity", "phi(v_2(f x)) = +u_2(x)"),
        ("bicomplex", DIFFERENTIAL_CONVENTION),
    ]);
    let outputs = json!({
        "seed": report.seed,
        "trials": report.trials.len(),
        "passed": report.passed,
        "failed": report.failed,
        "nontrivial_comparisons": nontrivial,
        "sign": report.sign,
    });
    let failed = report.failed;
    let outcome = Outcome {
        report: RunReport {
            command: echo.to_string(),
            inputs_digest,
            conventions,
            outputs,
            assertions: vec![Assertion::new("cone_lemma", report.all_passed())],
            timing_ms: None,
        },
        text,
        json_lines,
    };
    if failed > 0 {
        return Err(CliError::Commutativity {
            failed,
            trials: a.trials,
            outcome: Box::new(outcome),
        });
    }
    Ok(outcome)
}
