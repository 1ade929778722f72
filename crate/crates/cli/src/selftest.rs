//! Fixture expectations and an optional seeded cross-check against minor enumeration.

use serde_json::json;
use tuhyper::detect::{
    decide_unimodular_disjoint_with, decide_unimodular_mixed_disjoint_with, find_odd_cycle, find_odd_tree_house,
    verify_mixed_witness, verify_witness, Witness,
};
use tuhyper::fixtures;
use tuhyper::gen::{generate, GenConfig};
use tuhyper::linalg::{camion_unimodular, det_exact, is_almost_tu, is_tu_bruteforce_with, max_abs_subdet};
use tuhyper::mixed::{
    build_r_matrix, classify_almost_tu_disjoint, even_cycle_nullvector, normalize_to_hypergraph, AlmostTuClass,
};
use tuhyper::{par, Instance, IntMatrix};

use crate::render::{Output, Tone};
use crate::Settings;

type Check = Result<(), String>;
type NamedCheck = (&'static str, fn() -> Check);

fn ensure(cond: bool, what: &str) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn err(e: tuhyper::Error) -> String {
    e.to_string()
}

fn abs_det(m: &IntMatrix) -> Result<i64, String> {
    let d = det_exact(m).map_err(err)?;
    i64::try_from(&d).map(i64::abs).map_err(|e| e.to_string())
}

fn fig1() -> Check {
    let g = fixtures::fig1();
    let dec = decide_unimodular_disjoint_with(&g, Default::default()).map_err(err)?;
    let w = dec.witness().ok_or("FIG1 decided TU")?;
    ensure(
        w.is_tree_house() && verify_witness(&g, w),
        "witness is not a verified odd tree house",
    )?;
    ensure(
        max_abs_subdet(&g.incidence_matrix(), None).map_err(err)?.delta == 2,
        "delta is not 2",
    )?;
    let camion = camion_unimodular(&g).map_err(err)?;
    ensure(
        camion.witness.is_some_and(|c| c.support == 10),
        "Camion core support is not 10",
    )
}

fn fig2() -> Check {
    let g = fixtures::fig2();
    ensure(!g.is_disjoint(), "FIG2 should not be disjoint")?;
    ensure(find_odd_cycle(&g).map_err(err)?.is_none(), "found an odd cycle")?;
    ensure(
        find_odd_tree_house(&g).map_err(err)?.is_none(),
        "found an odd tree house",
    )?;
    let m = g.incidence_matrix();
    ensure(
        !is_tu_bruteforce_with(&m, Default::default(), Default::default()).map_err(err)?,
        "M is TU",
    )?;
    ensure(is_almost_tu(&m).map_err(err)?, "M is not almost TU")
}

fn fig4() -> Check {
    let left = fixtures::fig4_left();
    let norm = normalize_to_hypergraph(&left).map_err(err)?;
    ensure(
        norm.hypergraph.incidence_matrix() == fixtures::fig4_right().incidence_matrix(),
        "split matrix differs",
    )?;
    ensure(
        abs_det(&left.incidence_matrix())? == 2,
        "|det| before splitting is not 2",
    )?;
    ensure(
        abs_det(&norm.hypergraph.incidence_matrix())? == 2,
        "|det| after splitting is not 2",
    )
}

fn fig5() -> Check {
    let d = fixtures::fig5();
    let class = classify_almost_tu_disjoint(&d).map_err(err)?;
    ensure(
        matches!(class, AlmostTuClass::MixedOddTreeHouse { .. }),
        "not a mixed odd tree house",
    )?;
    let a = d.incidence_matrix();
    ensure(abs_det(&a)? == 2, "|det| is not 2")?;
    let rc = build_r_matrix(&a).map_err(err)?;
    ensure(
        is_tu_bruteforce_with(&rc.r, Default::default(), Default::default()).map_err(err)?,
        "R is not TU",
    )?;
    ensure(abs_det(&rc.product)? == 2, "|det A·R| is not 2")
}

fn small_cycles() -> Check {
    let c3 = fixtures::c3();
    let dec = decide_unimodular_disjoint_with(&c3, Default::default()).map_err(err)?;
    ensure(
        dec.witness().is_some_and(|w| !w.is_tree_house()),
        "C3 has no odd cycle witness",
    )?;
    let c4 = fixtures::c4();
    ensure(
        decide_unimodular_disjoint_with(&c4, Default::default())
            .map_err(err)?
            .is_tu(),
        "C4 is not TU",
    )?;
    let dir4 = fixtures::dir4();
    let dec = decide_unimodular_mixed_disjoint_with(&dir4, Default::default(), Default::default()).map_err(err)?;
    ensure(dec.is_tu(), "DIR4 is not TU")?;
    ensure(
        even_cycle_nullvector(&dir4).map_err(err)? == vec![1, 1, 1, 1],
        "DIR4 null vector differs",
    )
}

fn agrees(inst: &Instance, witness: Option<Witness>, s: &Settings) -> Check {
    let tu = is_tu_bruteforce_with(&inst.incidence_matrix(), s.limits, s.exec).map_err(err)?;
    ensure(tu == witness.is_none(), "decision disagrees with minor enumeration")?;
    let ok = match (inst, &witness) {
        (_, None) => true,
        (Instance::Plain(g), Some(w)) => verify_witness(g, w),
        (Instance::Mixed(d), Some(w)) => verify_mixed_witness(d, w),
    };
    ensure(ok, "witness fails the checker")
}

fn random_case(seed: u64, s: &Settings) -> Check {
    for mixed in [false, true] {
        let max_n = if mixed { 8 } else { 9 };
        let g = generate(&GenConfig::random_disjoint(seed, max_n, 9, mixed)).map_err(err)?;
        let witness = match &g.instance {
            Instance::Plain(h) => decide_unimodular_disjoint_with(h, s.budget)
                .map_err(err)?
                .witness()
                .cloned(),
            Instance::Mixed(d) => {
                decide_unimodular_mixed_disjoint_with(d, s.budget, s.limits)
                    .map_err(err)?
                    .witness
            }
        };
        agrees(&g.instance, witness, s).map_err(|e| format!("seed {seed} mixed={mixed}: {e}"))?;
    }
    Ok(())
}

pub fn run(random: Option<(usize, u64)>, s: &Settings) -> anyhow::Result<Output> {
    let fixed: [NamedCheck; 5] = [
        ("fig1", fig1),
        ("fig2", fig2),
        ("fig4", fig4),
        ("fig5", fig5),
        ("small_cycles", small_cycles),
    ];
    let mut results: Vec<(String, Check)> = par::map_slice(s.exec, &fixed, |(name, f)| (name.to_string(), f()));
    if let Some((count, seed)) = random {
        let outcomes = par::map_range(s.exec, count, |i| random_case(seed.wrapping_add(i as u64), s));
        let failures: Vec<String> = outcomes.into_iter().filter_map(Result::err).collect();
        let check = match failures.first() {
            None => Ok(()),
            Some(first) => Err(format!("{} failure(s), first: {first}", failures.len())),
        };
        results.push((format!("random x{count} from seed {seed}"), check));
    }
    let failed = results.iter().filter(|(_, r)| r.is_err()).count();
    let checks: Vec<_> = results
        .iter()
        .map(|(name, r)| json!({ "name": name, "ok": r.is_ok(), "detail": r.as_ref().err() }))
        .collect();
    let mut out = Output::new(
        "selftest",
        json!({ "passed": results.len() - failed, "failed": failed, "checks": checks }),
    )
    .violated(failed > 0);
    for (name, r) in &results {
        out = match r {
            Ok(()) => out.line(Tone::Good, format!("PASS {name}")),
            Err(e) => out.line(Tone::Bad, format!("FAIL {name}: {e}")),
        };
    }
    Ok(out)
}
