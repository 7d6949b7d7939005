//! Acceptance criteria 1–10. Each criterion returns a pass flag, a detail
//! line and a rendered artifact; criterion 10 reruns the others on a
//! single-thread pool and compares artifacts byte for byte.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use twarrow::artifact::{render, Artifact, Meta};
use twarrow::category::{pointed_op, simplex_category};
use twarrow::collections::{build_operad, check_action_laws, check_operad_axioms, check_simplicial_identities, DiscreteOperad};
use twarrow::encodings::{check_ib_associativity, check_ib_functoriality};
use twarrow::exactla::{random_sparse, Backend, ChainComplex, Field, FinMatrix, PrimeField, Rationals};
use twarrow::qcohom::{
    ext, gamma_t, les_check_ass, naturality_dim, quillen_cohomology, random_cokernel, representable, BarKind, ExtBackend,
    ExtOptions, LinearFunctor, TwBase,
};
use twarrow::sset::{check_opposite, check_quasi_bijection, check_un_over_ib, FinSimplicialSet};
use twarrow::twisted::{certify_tw_ass, certify_tw_com};
use twarrow::Error;

struct Outcome {
    passed: bool,
    detail: String,
    artifact: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>, data: Value) -> Self {
        let doc = twarrow::artifact::Document {
            schema_version: twarrow::artifact::SCHEMA_VERSION,
            kind: "acceptance".into(),
            meta: Meta::new(),
            data,
        };
        Outcome { passed, detail: detail.into(), artifact: render(&doc).expect("renders") }
    }

    fn failed(e: Error) -> Self {
        Outcome { passed: false, detail: format!("error: {e}"), artifact: String::new() }
    }
}

type Criterion = (usize, &'static str, u64, fn() -> twarrow::Result<Outcome>);

const CRITERIA: [Criterion; 9] = [
    (1, "Tw(Com) ≅ Fin_*^op certificate at N = 4", 10, tw_com),
    (2, "Tw(Ass) ≃ Δ certificate at N = 4", 60, tw_ass),
    (3, "quasi-simplex bijections, n ≤ 3", 60, quasi),
    (4, "Grothendieck cross-check, degrees ≤ 2", 30, grothendieck),
    (5, "H^n_Q(Com; const) = 0, 0 ≤ n ≤ 4, N = 4", 60, vanishing),
    (6, "Ass long exact sequence, 20 seeded F", 120, ass_les),
    (7, "stable cohomotopy engine at N = 3", 120, stable),
    (8, "operad and encoding core", 60, operad_core),
    (9, "exact linear algebra", 30, linear_algebra),
];

fn tw_com() -> twarrow::Result<Outcome> {
    let n = 4;
    let cert = certify_tw_com(n)?;
    let counts_ok = cert.objects.len() == n + 1
        && cert.homs.len() == (n + 1) * (n + 1)
        && cert.homs.iter().all(|h| h.pairs.len() == (h.source + 1).pow(h.target as u32));
    let detail = format!("{} hom-sets, {} composable pairs", cert.homs.len(), cert.composable_pairs_checked);
    let doc = cert.to_document(Meta::new())?;
    Ok(Outcome::new(counts_ok, detail, serde_json::to_value(doc)?))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn tw_ass() -> twarrow::Result<Outcome> {
    let n = 4;
    let cert = certify_tw_ass(n)?;
    let counts_ok = cert.hom_counts.len() == (n + 1) * (n + 1)
        && cert.hom_counts.iter().all(|&(m, k, c)| c == binomial(m + k + 1, m + 1));
    let arities: usize = (0..=n).map(|m| (1..=m).product::<usize>()).sum();
    let linked_ok = cert.linked.len() == arities;
    let detail = format!(
        "{} morphisms, {} composable pairs, {} linked objects, {} witness equations",
        cert.morphisms.len(),
        cert.composable_pairs_checked,
        cert.linked.len(),
        cert.witness_equations_checked
    );
    let doc = cert.to_document(Meta::new())?;
    Ok(Outcome::new(counts_ok && linked_ok, detail, serde_json::to_value(doc)?))
}

fn quasi() -> twarrow::Result<Outcome> {
    let spaces = [
        FinSimplicialSet::standard(0),
        FinSimplicialSet::standard(1),
        FinSimplicialSet::standard(2),
        FinSimplicialSet::boundary(2)?,
        FinSimplicialSet::grid(),
    ];
    let mut rows = Vec::new();
    for x in &spaces {
        let reports = (0..=3).map(|n| check_quasi_bijection(x, n)).collect::<twarrow::Result<Vec<_>>>()?;
        let squares = check_opposite(x, 3)?;
        rows.push(json!({"space": x.name(), "degrees": reports, "opposite_squares": squares}));
    }
    Ok(Outcome::new(true, format!("{} spaces", spaces.len()), json!(rows)))
}

fn grothendieck() -> twarrow::Result<Outcome> {
    let (mut rows, mut detail) = (Vec::new(), Vec::new());
    for p in [DiscreteOperad::com(3), DiscreteOperad::ass(3)] {
        let counts = (0..=2).map(|n| check_un_over_ib(&p, 2, n)).collect::<twarrow::Result<Vec<_>>>()?;
        detail.push(format!("{} {counts:?}", p.name()));
        rows.push(json!({"operad": p.name(), "simplices": counts}));
    }
    Ok(Outcome::new(true, detail.join(", "), json!(rows)))
}

fn vanishing() -> twarrow::Result<Outcome> {
    let base = TwBase::new(&DiscreteOperad::com(5), 4)?;
    let coeff = twarrow::qcohom::constant(&base.table, &Rationals, 1)?;
    let table = quillen_cohomology(&base, &coeff, 0, 4, ExtOptions::with_backend(ExtBackend::CoverDual))?;
    let zero = table.degrees.iter().all(|d| d.1 == 0);
    let detail = format!("dims {:?}", table.degrees.iter().map(|d| d.1).collect::<Vec<_>>());
    Ok(Outcome::new(zero, detail, serde_json::to_value(&table)?))
}

fn ass_les() -> twarrow::Result<Outcome> {
    let field = PrimeField::new(101)?;
    let cat = simplex_category(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut reports = Vec::new();
    for _ in 0..20 {
        let f = random_cokernel(&cat, &field, 3, 2, &mut rng)?;
        reports.push(les_check_ass(&cat, &f, 3)?);
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    Ok(Outcome::new(failed == 0, format!("{failed} of 20 trials failed"), serde_json::to_value(&reports)?))
}

fn stable() -> twarrow::Result<Outcome> {
    let field = PrimeField::new(101)?;
    let base = pointed_op(3);
    let t = gamma_t(&base, &field)?;
    let mut targets: Vec<(String, LinearFunctor<PrimeField>)> = vec![("t".into(), t.clone())];
    for x in 0..4 {
        targets.push((format!("rep:{x}"), representable(&base, &field, x)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..2 {
        targets.push((format!("random:2,2#{i}"), random_cokernel(&base, &field, 2, 2, &mut rng)?));
    }
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, target) in &targets {
        let bar = ext(&base, &t, target, 3, ExtOptions::with_backend(ExtBackend::Bar(BarKind::Relative)))?;
        let cover = ext(&base, &t, target, 3, ExtOptions::with_backend(ExtBackend::Cover))?;
        let hom = naturality_dim(&base, &t, target)?;
        ok &= bar == cover && bar[0] == hom;
        rows.push(json!({"target": name, "bar": bar, "cover": cover, "naturality": hom}));
    }
    Ok(Outcome::new(ok, format!("{} targets, seed 1", targets.len()), json!(rows)))
}

fn operad_core() -> twarrow::Result<Outcome> {
    let n = 4;
    let specs = ["ass", "com", "unit:a,b", "free:2"];
    let mut violations = Vec::new();
    for s in specs {
        let p = build_operad(&s.parse()?, n)?;
        violations.extend(check_operad_axioms(&p, n)?);
        violations.extend(check_action_laws(&p, n)?);
    }
    let free = build_operad(&"free:2".parse()?, 3)?;
    violations.extend(check_simplicial_identities(&free, 2, 3, None)?);
    let unit = build_operad(&"unit:a,b".parse()?, 3)?;
    violations.extend(check_simplicial_identities(&unit, 2, 3, None)?);
    for p in [DiscreteOperad::ass(4), DiscreteOperad::com(4)] {
        violations.extend(check_ib_functoriality(&p, 3)?);
        violations.extend(check_ib_associativity(&p, 2)?);
    }
    let detail = format!("{} violations", violations.len());
    Ok(Outcome::new(violations.is_empty(), detail, json!(violations)))
}

fn rank_pairs<F: Field>(field: &F, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..100)
        .map(|i| {
            let (r, c) = (4 + i % 13, 3 + (i * 7) % 17);
            let m = random_sparse(field, r, c, 0.3, &mut rng);
            (m.rank_with(Backend::Gaussian), m.rank_with(Backend::FractionFree))
        })
        .collect()
}

fn linear_algebra() -> twarrow::Result<Outcome> {
    let q = rank_pairs(&Rationals, 9);
    let p = rank_pairs(&PrimeField::new(101)?, 9);
    let agree = q.iter().chain(&p).all(|(a, b)| a == b);
    let id = FinMatrix::identity(&Rationals, 1);
    let rejected = matches!(ChainComplex::new(0, vec![1, 1, 1], vec![id.clone(), id]), Err(Error::NotAComplex { .. }));
    let detail = format!("200 rank pairs agree: {agree}; d² ≠ 0 rejected: {rejected}");
    Ok(Outcome::new(agree && rejected, detail, json!({"rationals": q, "fp101": p})))
}

fn run_all(threads: usize) -> Vec<(Outcome, Duration)> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("pool");
    pool.install(|| {
        CRITERIA
            .iter()
            .map(|(_, _, _, f)| {
                let start = Instant::now();
                let outcome = f().unwrap_or_else(Outcome::failed);
                (outcome, start.elapsed())
            })
            .collect()
    })
}

#[test]
fn acceptance() {
    let first = run_all(4);
    let mut all_passed = true;
    for ((id, name, budget, _), (outcome, elapsed)) in CRITERIA.iter().zip(&first) {
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        let secs = elapsed.as_secs_f64();
        let over = if secs > *budget as f64 { ", over budget" } else { "" };
        println!("criterion {id}: {verdict} {name}: {} ({secs:.1} s of {budget} s{over})", outcome.detail);
        all_passed &= outcome.passed;
    }
    let second = run_all(1);
    let mismatched: Vec<usize> = CRITERIA
        .iter()
        .zip(first.iter().zip(&second))
        .filter(|(_, ((a, _), (b, _)))| a.artifact.is_empty() || a.artifact != b.artifact)
        .map(|((id, ..), _)| *id)
        .collect();
    let deterministic = mismatched.is_empty();
    let verdict = if deterministic { "PASS" } else { "FAIL" };
    println!("criterion 10: {verdict} artifacts byte-identical across runs on 4 and 1 threads (differing: {mismatched:?})");
    all_passed &= deterministic;
    assert!(all_passed, "acceptance criteria failed");
}
