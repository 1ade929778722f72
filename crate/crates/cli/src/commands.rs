use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde_json::{json, Value};
use tuhyper::detect::{
    decide_unimodular_disjoint_with, decide_unimodular_mixed_disjoint_with, find_odd_cycle_with,
    find_odd_tree_house_with, verify_mixed_witness, verify_witness, Certificate, Witness,
};
use tuhyper::extract::{extract_witness_with, ExtractOptions};
use tuhyper::gen::{generate, GenConfig, Plant};
use tuhyper::linalg::{
    camion_unimodular_mixed_with, camion_unimodular_with, det_exact, is_tu_bruteforce_with, max_abs_subdet_with,
};
use tuhyper::mixed::{
    build_r_matrix, build_r_matrix_transposed, classify_almost_tu_disjoint, normalize_to_hypergraph, AlmostTuClass,
};
use tuhyper::{EdgeId, Error, Instance, IntMatrix, MixedHypergraph, Vertex};

use crate::render::{Output, Tone};
use crate::{GenArgs, Settings};

pub fn load(path: &Path) -> anyhow::Result<Instance> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Instance::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn name(inst: &Instance, v: Vertex) -> String {
    match inst {
        Instance::Plain(g) => g.name(v),
        Instance::Mixed(d) => d.name(v),
    }
}

fn row_names(inst: &Instance, rows: &[usize]) -> Vec<String> {
    let verts = match inst {
        Instance::Plain(g) => g.vertices(),
        Instance::Mixed(d) => d.vertices(),
    };
    rows.iter().map(|&r| name(inst, verts[r])).collect()
}

fn col_ids(inst: &Instance, cols: &[usize]) -> Vec<EdgeId> {
    match inst {
        Instance::Plain(g) => cols.iter().map(|&c| g.edges()[c].id).collect(),
        Instance::Mixed(d) => cols.iter().map(|&c| d.arcs()[c].id).collect(),
    }
}

fn certificate(inst: &Instance, w: &Witness) -> Value {
    serde_json::to_value(w.named(|v| name(inst, v))).expect("certificates serialize")
}

fn summary(inst: &Instance, w: &Witness) -> String {
    let c = w.named(|v| name(inst, v));
    format!("{}: vertices {:?}, edges {:?}", w.kind(), c.vertex_list(), w.edge_ids())
}

fn to_mixed(inst: &Instance) -> MixedHypergraph {
    match inst {
        Instance::Plain(g) => MixedHypergraph::from_hypergraph(g),
        Instance::Mixed(d) => d.clone(),
    }
}

fn verdict(tu: bool) -> (Tone, &'static str) {
    if tu {
        (Tone::Good, "TU")
    } else {
        (Tone::Bad, "not TU")
    }
}

pub fn check(path: &Path, require_disjoint: bool, s: &Settings) -> anyhow::Result<Output> {
    let inst = load(path)?;
    if !inst.is_disjoint() {
        if require_disjoint {
            match &inst {
                Instance::Plain(g) => g.require_disjoint()?,
                Instance::Mixed(d) => d.require_disjoint()?,
            }
        }
        return check_by_minors(&inst, s);
    }
    let (witness, mixed) = match &inst {
        Instance::Plain(g) => (decide_unimodular_disjoint_with(g, s.budget)?.witness().cloned(), false),
        Instance::Mixed(d) => (
            decide_unimodular_mixed_disjoint_with(d, s.budget, s.limits)?.witness,
            true,
        ),
    };
    let tu = witness.is_none();
    let (tone, word) = verdict(tu);
    let mut out = Output::new(
        "check",
        json!({
            "tu": tu,
            "method": "structure",
            "mixed": mixed,
            "witness": witness.as_ref().map(|w| certificate(&inst, w)),
        }),
    )
    .violated(!tu)
    .line(tone, word);
    if let Some(w) = &witness {
        out = out.line(Tone::Plain, summary(&inst, w));
    }
    Ok(out)
}

fn check_by_minors(inst: &Instance, s: &Settings) -> anyhow::Result<Output> {
    let d = max_abs_subdet_with(&inst.incidence_matrix(), None, s.limits, s.exec)?;
    let tu = d.delta <= 1;
    let minor = (!tu).then(|| {
        json!({
            "rows": row_names(inst, &d.rows),
            "cols": col_ids(inst, &d.cols),
            "det_abs": d.delta,
        })
    });
    let (tone, word) = verdict(tu);
    let mut out = Output::new(
        "check",
        json!({
            "tu": tu,
            "method": "minors",
            "mixed": matches!(inst, Instance::Mixed(_)),
            "witness": Value::Null,
            "minor": minor,
        }),
    )
    .violated(!tu)
    .line(
        tone,
        format!("{word} (input is not disjoint; decided by minor enumeration)"),
    );
    if !tu {
        out = out.line(
            Tone::Plain,
            format!(
                "|det| = {} on rows {:?}, columns {:?}",
                d.delta,
                row_names(inst, &d.rows),
                col_ids(inst, &d.cols)
            ),
        );
    }
    Ok(out)
}

pub fn verify_cert(instance: &Path, cert: &Path) -> anyhow::Result<Output> {
    let inst = load(instance)?;
    let text = std::fs::read_to_string(cert).with_context(|| format!("reading {}", cert.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", cert.display()))?;
    let body = match doc.get("witness") {
        Some(Value::Null) => return Err(Error::InvalidInput("certificate file holds no witness".into()).into()),
        Some(w) => w.clone(),
        None => doc,
    };
    let named: Certificate =
        serde_json::from_value(body).map_err(|e| Error::InvalidInput(format!("malformed certificate: {e}")))?;
    let (w, ok) = match &inst {
        Instance::Plain(g) => {
            let w = named.resolve(|n| g.vertex_by_name(n))?;
            let ok = verify_witness(g, &w);
            (w, ok)
        }
        Instance::Mixed(d) => {
            let w = named.resolve(|n| d.vertex_by_name(n))?;
            let ok = verify_mixed_witness(d, &w);
            (w, ok)
        }
    };
    let line = if ok {
        (Tone::Good, format!("certificate verified: {}", w.kind()))
    } else {
        (
            Tone::Bad,
            format!("certificate rejected: not a {} of this instance", w.kind()),
        )
    };
    Ok(Output::new("verify_cert", json!({ "verified": ok, "kind": w.kind() }))
        .violated(!ok)
        .line(line.0, line.1))
}

pub fn delta(path: &Path, s: &Settings) -> anyhow::Result<Output> {
    let inst = load(path)?;
    let d = max_abs_subdet_with(&inst.incidence_matrix(), None, s.limits, s.exec)?;
    let rows = row_names(&inst, &d.rows);
    let cols = col_ids(&inst, &d.cols);
    Ok(Output::new(
        "delta",
        json!({ "delta": d.delta, "order": d.rows.len(), "rows": rows, "cols": cols }),
    )
    .line(Tone::Plain, format!("delta = {}", d.delta))
    .line(Tone::Plain, format!("attained on rows {rows:?}, columns {cols:?}")))
}

pub fn detect(path: &Path, s: &Settings) -> anyhow::Result<Output> {
    let inst = load(path)?;
    match &inst {
        Instance::Plain(g) => {
            let cycle = find_odd_cycle_with(g, s.budget)?;
            let house = find_odd_tree_house_with(g, s.budget)?;
            let mut out = Output::new(
                "detect",
                json!({
                    "odd_cycle": cycle.as_ref().map(|w| certificate(&inst, w)),
                    "odd_tree_house": house.as_ref().map(|w| certificate(&inst, w)),
                }),
            )
            .violated(cycle.is_some() || house.is_some());
            for (label, found) in [("odd cycle", &cycle), ("odd tree house", &house)] {
                out = match found {
                    Some(w) => out.line(Tone::Bad, format!("found {}", summary(&inst, w))),
                    None => out.line(Tone::Good, format!("no {label}")),
                };
            }
            Ok(out)
        }
        Instance::Mixed(d) => {
            let witness = decide_unimodular_mixed_disjoint_with(d, s.budget, s.limits)?.witness;
            let class = classify_almost_tu_disjoint(d)?;
            let class_name = match class {
                AlmostTuClass::MixedOddCycle { .. } => "mixed_odd_cycle",
                AlmostTuClass::MixedOddTreeHouse { .. } => "mixed_odd_tree_house",
                AlmostTuClass::NotAlmostTu => "not_almost_tu",
            };
            let line = match &witness {
                Some(w) => (Tone::Bad, format!("found {}", summary(&inst, w))),
                None => (Tone::Good, "no mixed odd cycle or mixed odd tree house".to_string()),
            };
            Ok(Output::new(
                "detect",
                json!({
                    "witness": witness.as_ref().map(|w| certificate(&inst, w)),
                    "almost_tu_class": class_name,
                }),
            )
            .violated(witness.is_some())
            .line(line.0, line.1)
            .line(Tone::Plain, format!("whole-instance class: {class_name}")))
        }
    }
}

pub fn extract(path: &Path, with_trace: bool, s: &Settings) -> anyhow::Result<Output> {
    let inst = load(path)?;
    let Instance::Plain(g) = &inst else {
        return Err(Error::InvalidInput("extract works on hypergraphs; reduce mixed inputs first".into()).into());
    };
    let opts = ExtractOptions {
        budget: s.budget,
        limits: s.limits,
    };
    let ex = match extract_witness_with(g, opts) {
        Err(Error::InputIsTu) => {
            return Ok(Output::new("extract", json!({ "tu": true, "witness": Value::Null }))
                .line(Tone::Good, "TU: no Eulerian core with support 2 mod 4"))
        }
        r => r?,
    };
    let verified = verify_witness(g, &ex.witness);
    if !verified {
        return Err(anyhow!(Error::Internal {
            lemma: "extraction soundness",
            detail: "extracted witness failed the independent checker".into(),
        }));
    }
    let mut doc = json!({
        "tu": false,
        "witness": certificate(&inst, &ex.witness),
        "verified": verified,
        "rounds": ex.trace.rounds.len(),
    });
    if with_trace {
        doc["trace"] = serde_json::to_value(&ex.trace)?;
    }
    Ok(Output::new("extract", doc)
        .violated(true)
        .line(Tone::Bad, "not TU")
        .line(Tone::Plain, summary(&inst, &ex.witness))
        .line(Tone::Plain, format!("{} reduction round(s)", ex.trace.rounds.len())))
}

pub fn camion(path: &Path, s: &Settings) -> anyhow::Result<Output> {
    let inst = load(path)?;
    let res = match &inst {
        Instance::Plain(g) => camion_unimodular_with(g, s.limits, s.exec)?,
        Instance::Mixed(d) => camion_unimodular_mixed_with(d, s.limits, s.exec)?,
    };
    let witness = res.witness.as_ref().map(|w| {
        json!({
            "vertices": w.selection.vertices.iter().map(|&v| name(&inst, v)).collect::<Vec<_>>(),
            "edges": w.selection.edges,
            "support": w.support,
            "entry_sum": w.entry_sum,
        })
    });
    let (tone, word) = verdict(res.unimodular);
    let mut out = Output::new("camion", json!({ "unimodular": res.unimodular, "witness": witness }))
        .violated(!res.unimodular)
        .line(tone, word);
    if let Some(w) = &res.witness {
        out = out.line(
            Tone::Plain,
            format!(
                "Eulerian square core on {} rows, {} columns, support {}",
                w.selection.vertices.len(),
                w.selection.edges.len(),
                w.support
            ),
        );
    }
    Ok(out)
}

pub fn reduce(path: &Path) -> anyhow::Result<Output> {
    let inst = load(path)?;
    let norm = normalize_to_hypergraph(&to_mixed(&inst))?;
    let matrix = norm.hypergraph.incidence_matrix();
    Ok(Output::new(
        "reduce",
        json!({
            "transcript": norm.transcript.steps,
            "hypergraph": norm.hypergraph.to_doc(),
            "matrix": matrix.to_rows(),
        }),
    )
    .line(
        Tone::Plain,
        format!("{} reduction step(s)", norm.transcript.steps.len()),
    )
    .line(Tone::Plain, format_matrix(&matrix)))
}

/// `A·R` (or `Rᵀ·A`) is a mixed odd cycle with `|det| = 2`, checked from the matrix alone.
fn is_unbalanced_hole(product: &IntMatrix) -> anyhow::Result<bool> {
    let Ok(d) = MixedHypergraph::from_matrix(product) else {
        return Ok(false);
    };
    let cycle = match classify_almost_tu_disjoint(&d) {
        Ok(AlmostTuClass::MixedOddCycle { witness }) => verify_mixed_witness(&d, &witness),
        _ => false,
    };
    Ok(cycle && i64::try_from(&det_exact(product)?).is_ok_and(|x| x.abs() == 2))
}

pub fn build_r(path: &Path, transpose: bool, s: &Settings) -> anyhow::Result<Output> {
    let inst = load(path)?;
    let d = to_mixed(&inst);
    let class = match classify_almost_tu_disjoint(&d)? {
        AlmostTuClass::MixedOddCycle { .. } => "mixed_odd_cycle",
        AlmostTuClass::MixedOddTreeHouse { .. } => "mixed_odd_tree_house",
        AlmostTuClass::NotAlmostTu => {
            return Err(Error::Precondition("build-r needs a mixed odd cycle or a mixed odd tree house".into()).into())
        }
    };
    let a = d.incidence_matrix();
    let rc = if transpose {
        build_r_matrix_transposed(&a)?
    } else {
        build_r_matrix(&a)?
    };
    let r_is_tu = is_tu_bruteforce_with(&rc.r, s.limits, s.exec)?;
    let hole = is_unbalanced_hole(&rc.product)?;
    let det = det_exact(&rc.product)?;
    let (tone, word) = if hole && r_is_tu {
        (Tone::Good, "product is an unbalanced hole and R is TU")
    } else {
        (Tone::Bad, "construction check failed")
    };
    Ok(Output::new(
        "build-r",
        json!({
            "class": class,
            "transposed": rc.transposed,
            "R": rc.r.to_rows(),
            "product": rc.product.to_rows(),
            "R_is_tu": r_is_tu,
            "det_product": i64::try_from(&det).ok(),
            "AR_is_unbalanced_hole": hole,
        }),
    )
    .violated(!(hole && r_is_tu))
    .line(tone, word)
    .line(Tone::Plain, format!("R =\n{}", format_matrix(&rc.r)))
    .line(Tone::Plain, format!("product =\n{}", format_matrix(&rc.product))))
}

fn format_matrix(m: &IntMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(|x| format!("{x:>3}")).collect::<String>())
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn gen(args: &GenArgs) -> anyhow::Result<Output> {
    let plant_is_mixed = matches!(
        args.plant,
        Some(Plant::MixedOddCycle { .. } | Plant::MixedOddTreeHouse { .. })
    );
    let cfg = if args.random {
        GenConfig::random_disjoint(args.seed, args.vertices, args.small_edges, args.mixed)
    } else {
        GenConfig {
            seed: args.seed,
            n_vertices: args.vertices,
            n_small_edges: args.small_edges,
            proper_edge_sizes: args.proper.clone(),
            disjoint: !args.non_disjoint,
            mixed: args.mixed || plant_is_mixed,
            plant: args.plant,
        }
    };
    let g = generate(&cfg)?;
    let instance = g.instance.to_json();
    let planted = g.planted.as_ref().map(|w| certificate(&g.instance, w));
    let pretty = serde_json::to_string_pretty(&instance)?;
    Ok(Output::new(
        "gen",
        json!({ "config": cfg, "instance": instance, "planted": planted }),
    )
    .line(Tone::Plain, pretty))
}
