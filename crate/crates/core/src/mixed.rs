//! Mixed-hypergraph transformations: arc parities, row and column negation,
//! arc splitting, normalization to an unsigned hypergraph, even-cycle null
//! vectors, almost-TU classification and the column-operation matrix `R`.
//!
//! Splitting renumbers vertices to their row positions: the new vertex is
//! inserted right after the earlier endpoint of the split arc, so incidence
//! matrices come out in the natural drawing order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::detect::{verify_mixed_witness, TreeHouseOf, Witness, WitnessOf};
use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, HyperArc, Hypergraph, MixedHypergraph, SubSelection, Vertex};
use crate::linalg::{det_exact, is_tu_bruteforce};
use crate::matrix::IntMatrix;
use crate::quasi::Parity;

/// Parity of an arc with two-element support.
pub fn arc_parity(a: &HyperArc) -> Result<Parity> {
    match (a.plus.len(), a.minus.len()) {
        (1, 1) => Ok(Parity::Even),
        (2, 0) | (0, 2) => Ok(Parity::Odd),
        _ => Err(Error::pre(format!(
            "parity needs an arc of support 2, arc {} has support {}",
            a.id,
            a.support_len()
        ))),
    }
}

/// Parity of `a` restricted to `verts`.
pub fn restricted_parity(a: &HyperArc, verts: &[Vertex]) -> Result<Parity> {
    arc_parity(&restrict_arc(a, verts))
}

fn restrict_arc(a: &HyperArc, verts: &[Vertex]) -> HyperArc {
    let keep = |v: &&Vertex| verts.contains(v);
    HyperArc {
        id: a.id,
        plus: a.plus.iter().filter(keep).copied().collect(),
        minus: a.minus.iter().filter(keep).copied().collect(),
    }
}

fn add(p: Parity, q: Parity) -> Parity {
    if p == q {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Degrees in the underlying graph; `None` if some arc has support other than 2.
fn graph_degrees(d: &MixedHypergraph) -> Option<BTreeMap<Vertex, usize>> {
    let mut deg: BTreeMap<Vertex, usize> = d.vertices().iter().map(|&v| (v, 0)).collect();
    for a in d.arcs() {
        if a.support_len() != 2 {
            return None;
        }
        for v in a.support() {
            *deg.get_mut(&v)? += 1;
        }
    }
    Some(deg)
}

fn connected(d: &MixedHypergraph) -> bool {
    let Some(&start) = d.vertices().first() else {
        return true;
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for a in d.arcs().iter().filter(|a| a.contains(x)) {
            for y in a.support() {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen.len() == d.n()
}

/// Sum of arc parities of a mixed path or cycle.
pub fn path_or_cycle_parity(p: &MixedHypergraph) -> Result<Parity> {
    let deg = graph_degrees(p).ok_or_else(|| Error::pre("mixed path or cycle needs arcs of support 2"))?;
    let ones = deg.values().filter(|&&d| d == 1).count();
    let shape_ok = connected(p)
        && deg.values().all(|&d| d == 1 || d == 2)
        && ((ones == 0 && p.m() == p.n() && p.m() >= 2) || (ones == 2 && p.m() + 1 == p.n()));
    if !shape_ok {
        return Err(Error::pre("underlying hypergraph is neither a path nor a cycle"));
    }
    p.arcs()
        .iter()
        .try_fold(Parity::Even, |acc, a| Ok(add(acc, arc_parity(a)?)))
}

fn rebuild(d: &MixedHypergraph, arcs: Vec<HyperArc>) -> MixedHypergraph {
    d.derive(d.vertices().to_vec(), arcs)
        .expect("sign changes keep a valid hypergraph")
}

/// Multiplies row `v` by −1.
pub fn negate_row(d: &MixedHypergraph, v: Vertex) -> Result<MixedHypergraph> {
    if !d.contains_vertex(v) {
        return Err(Error::invalid(format!("negate_row: no vertex {v}")));
    }
    let arcs = d
        .arcs()
        .iter()
        .map(|a| {
            let mut plus = a.plus.clone();
            let mut minus = a.minus.clone();
            if let Ok(i) = plus.binary_search(&v) {
                plus.remove(i);
                let j = minus.binary_search(&v).unwrap_err();
                minus.insert(j, v);
            } else if let Ok(i) = minus.binary_search(&v) {
                minus.remove(i);
                let j = plus.binary_search(&v).unwrap_err();
                plus.insert(j, v);
            }
            HyperArc { id: a.id, plus, minus }
        })
        .collect();
    Ok(rebuild(d, arcs))
}

/// Multiplies column `a` by −1, swapping its head and tail.
pub fn negate_column(d: &MixedHypergraph, a: EdgeId) -> Result<MixedHypergraph> {
    if d.arc(a).is_none() {
        return Err(Error::invalid(format!("negate_column: no arc {a}")));
    }
    let arcs = d
        .arcs()
        .iter()
        .map(|x| {
            if x.id == a {
                HyperArc {
                    id: x.id,
                    plus: x.minus.clone(),
                    minus: x.plus.clone(),
                }
            } else {
                x.clone()
            }
        })
        .collect();
    Ok(rebuild(d, arcs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    NegateRow {
        vertex: Vertex,
    },
    NegateColumn {
        arc: EdgeId,
    },
    /// `arc` keeps its id as `({u', w}, ∅)`; `new_arc` is `({u'', w}, ∅)`; `w` is
    /// `new_vertex` in the renumbered output.
    Split {
        arc: EdgeId,
        new_arc: EdgeId,
        new_vertex: Vertex,
    },
}

/// Replaces arc `a = ({u'}, {u''})` by two unsigned arcs through a new vertex.
pub fn split_arc(d: &MixedHypergraph, a: EdgeId) -> Result<(MixedHypergraph, Step)> {
    let arc = d
        .arc(a)
        .ok_or_else(|| Error::invalid(format!("split_arc: no arc {a}")))?;
    if arc.plus.len() != 1 || arc.minus.len() != 1 {
        return Err(Error::pre(format!(
            "split_arc: arc {a} is not of the form ({{u}}, {{v}})"
        )));
    }
    let (head, tail) = (arc.plus[0], arc.minus[0]);
    let (rh, rt) = (d.row_of(head).expect("arc inside"), d.row_of(tail).expect("arc inside"));
    let w = rh.min(rt) + 1;
    let renum = |v: Vertex| {
        let r = d.row_of(v).expect("arc inside");
        if r < w {
            r
        } else {
            r + 1
        }
    };

    let mut names: Vec<String> = d.names(d.vertices());
    let taken: BTreeSet<String> = names.iter().cloned().collect();
    let mut w_name = format!("w#{a}");
    while taken.contains(&w_name) {
        w_name.push('\'');
    }
    names.insert(w, w_name);

    let new_arc = d.max_arc_id().map_or(0, |m| m + 1);
    let pair = |end: Vertex, id: EdgeId| {
        let mut plus = vec![renum(end), w];
        plus.sort_unstable();
        HyperArc {
            id,
            plus,
            minus: Vec::new(),
        }
    };
    let mut arcs = Vec::with_capacity(d.m() + 1);
    for x in d.arcs() {
        if x.id == a {
            let first = pair(head, a);
            let second = pair(tail, new_arc);
            if rh < rt {
                arcs.extend([first, second]);
            } else {
                arcs.extend([second, first]);
            }
        } else {
            arcs.push(HyperArc {
                id: x.id,
                plus: x.plus.iter().map(|&v| renum(v)).collect(),
                minus: x.minus.iter().map(|&v| renum(v)).collect(),
            });
        }
    }
    let label = format!("{}''", d.arc_label(a));
    let symbols = d.symbols().with_vertex_names(names).with_edge_label(new_arc, label);
    let n = d.n() + 1;
    let out = MixedHypergraph::derive_with_symbols(symbols, (0..n).collect(), arcs)?;
    Ok((
        out,
        Step::Split {
            arc: a,
            new_arc,
            new_vertex: w,
        },
    ))
}

/// Undoes a split on its output: merges the two halves back and removes `w`.
fn unsplit(d: &MixedHypergraph, arc: EdgeId, new_arc: EdgeId, w: Vertex) -> Result<MixedHypergraph> {
    let bad = || Error::invalid(format!("transcript does not match: cannot undo split of arc {arc}"));
    let first = d.arc(arc).ok_or_else(bad)?;
    let second = d.arc(new_arc).ok_or_else(bad)?;
    let end = |x: &HyperArc| -> Result<Vertex> {
        match (x.plus.as_slice(), x.minus.is_empty()) {
            ([p, q], true) if *p == w => Ok(*q),
            ([p, q], true) if *q == w => Ok(*p),
            _ => Err(bad()),
        }
    };
    let (head, tail) = (end(first)?, end(second)?);
    if !d.contains_vertex(w) || d.arcs().iter().any(|x| x.id != arc && x.id != new_arc && x.contains(w)) {
        return Err(bad());
    }
    let renum = |v: Vertex| if v > w { v - 1 } else { v };
    let mut arcs = Vec::with_capacity(d.m() - 1);
    for x in d.arcs() {
        if x.id == new_arc {
            continue;
        }
        if x.id == arc {
            arcs.push(HyperArc {
                id: arc,
                plus: vec![renum(head)],
                minus: vec![renum(tail)],
            });
            continue;
        }
        arcs.push(HyperArc {
            id: x.id,
            plus: x.plus.iter().map(|&v| renum(v)).collect(),
            minus: x.minus.iter().map(|&v| renum(v)).collect(),
        });
    }
    // Undo the merge placement: the restored arc goes where the earlier half sat.
    let pos_first = d.arc_index(arc).expect("present");
    let pos_second = d.arc_index(new_arc).expect("present");
    if pos_second < pos_first {
        let merged = arcs.iter().position(|x| x.id == arc).expect("present");
        let restored = arcs.remove(merged);
        arcs.insert(pos_second, restored);
    }
    let names: Vec<String> = d.vertices().iter().filter(|&&v| v != w).map(|&v| d.name(v)).collect();
    let keep = arcs.iter().map(|x| x.id + 1).max().unwrap_or(0);
    let symbols = d.symbols().with_vertex_names(names).truncate_edges(keep);
    let n = d.n() - 1;
    MixedHypergraph::derive_with_symbols(symbols, (0..n).collect(), arcs)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTranscript {
    pub steps: Vec<Step>,
}

impl ReductionTranscript {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn apply(d: &MixedHypergraph, step: &Step) -> Result<MixedHypergraph> {
        match *step {
            Step::NegateRow { vertex } => negate_row(d, vertex),
            Step::NegateColumn { arc } => negate_column(d, arc),
            Step::Split {
                arc,
                new_arc,
                new_vertex,
            } => {
                let (out, got) = split_arc(d, arc)?;
                let want = Step::Split {
                    arc,
                    new_arc,
                    new_vertex,
                };
                if got != want {
                    return Err(Error::invalid(format!("transcript split {want:?} replays as {got:?}")));
                }
                Ok(out)
            }
        }
    }

    pub fn replay(&self, d: &MixedHypergraph) -> Result<MixedHypergraph> {
        self.steps.iter().try_fold(d.clone(), |acc, s| Self::apply(&acc, s))
    }

    /// Applies the inverse steps in reverse order.
    pub fn invert(&self, out: &MixedHypergraph) -> Result<MixedHypergraph> {
        self.steps.iter().rev().try_fold(out.clone(), |acc, s| match *s {
            Step::NegateRow { vertex } => negate_row(&acc, vertex),
            Step::NegateColumn { arc } => negate_column(&acc, arc),
            Step::Split {
                arc,
                new_arc,
                new_vertex,
            } => unsplit(&acc, arc, new_arc, new_vertex),
        })
    }
}

/// An unsigned hypergraph obtained from a mixed one by the three reductions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    /// Final mixed hypergraph; every tail is empty.
    pub mixed: MixedHypergraph,
    pub hypergraph: Hypergraph,
    pub transcript: ReductionTranscript,
    /// Input vertex of each final row; `None` for split vertices.
    pub origin: Vec<Option<Vertex>>,
    /// Split-off arc id to the input arc it came from.
    pub split_from: BTreeMap<EdgeId, EdgeId>,
}

impl Normalized {
    fn origin_of(&self, v: Vertex) -> Option<Vertex> {
        self.origin[self.mixed.row_of(v).expect("witness vertex in reduced hypergraph")]
    }

    fn input_arc(&self, e: EdgeId) -> EdgeId {
        self.split_from.get(&e).copied().unwrap_or(e)
    }

    /// Drops split vertices from an open or closed vertex/edge sequence.
    fn collapse(&self, verts: &[Vertex], edges: &[EdgeId]) -> Result<(Vec<Vertex>, Vec<EdgeId>)> {
        let mut out_v = Vec::new();
        let mut out_e = Vec::new();
        for (i, &v) in verts.iter().enumerate() {
            match self.origin_of(v) {
                Some(o) => {
                    out_v.push(o);
                    if let Some(&e) = edges.get(i) {
                        out_e.push(self.input_arc(e));
                    }
                }
                None => {
                    let (Some(&before), Some(&after)) = (i.checked_sub(1).and_then(|j| edges.get(j)), edges.get(i))
                    else {
                        return Err(Error::internal(
                            "split correspondence",
                            "split vertex at a sequence end",
                        ));
                    };
                    if self.input_arc(before) != self.input_arc(after) {
                        return Err(Error::internal(
                            "split correspondence",
                            "split vertex between arcs of different origin",
                        ));
                    }
                }
            }
        }
        Ok((out_v, out_e))
    }

    /// Maps a witness in the reduced hypergraph to a mixed witness of the input.
    pub fn lift_witness(&self, w: &Witness) -> Result<Witness> {
        match w {
            WitnessOf::OddCycle { vertices, edges } | WitnessOf::MixedOddCycle { vertices, edges } => {
                let start = vertices
                    .iter()
                    .position(|&v| self.origin_of(v).is_some())
                    .ok_or_else(|| Error::internal("split correspondence", "cycle of split vertices only"))?;
                let mut vs = vertices.clone();
                let mut es = edges.clone();
                vs.rotate_left(start);
                es.rotate_left(start);
                let (vertices, edges) = self.collapse(&vs, &es)?;
                Ok(WitnessOf::MixedOddCycle { vertices, edges })
            }
            WitnessOf::OddTreeHouse(t) | WitnessOf::MixedOddTreeHouse(t) => {
                let mut paths: [Vec<Vertex>; 3] = Default::default();
                let mut path_edges: [Vec<EdgeId>; 3] = Default::default();
                for i in 0..3 {
                    let (p, e) = self.collapse(&t.paths[i], &t.path_edges[i])?;
                    paths[i] = p;
                    path_edges[i] = e;
                }
                let corner = |v: Vertex| {
                    self.origin_of(v)
                        .ok_or_else(|| Error::internal("split correspondence", "tree house corner is a split vertex"))
                };
                Ok(WitnessOf::MixedOddTreeHouse(TreeHouseOf {
                    root: corner(t.root)?,
                    leaves: [corner(t.leaves[0])?, corner(t.leaves[1])?, corner(t.leaves[2])?],
                    paths,
                    path_edges,
                    house_edge: self.input_arc(t.house_edge),
                }))
            }
        }
    }
}

/// Row and column signs making every arc of support other than 2 all-positive,
/// or `None` when no such signs exist.
fn sign_pattern(d: &MixedHypergraph) -> Option<(BTreeMap<Vertex, i64>, BTreeMap<EdgeId, i64>)> {
    let constrained: Vec<&HyperArc> = d.arcs().iter().filter(|a| a.support_len() != 2).collect();
    let mut row: BTreeMap<Vertex, i64> = BTreeMap::new();
    let mut col: BTreeMap<EdgeId, i64> = BTreeMap::new();
    for seed in &constrained {
        if col.contains_key(&seed.id) {
            continue;
        }
        col.insert(seed.id, 1);
        let mut queue: VecDeque<EdgeId> = VecDeque::from([seed.id]);
        while let Some(id) = queue.pop_front() {
            let a = d.arc(id).expect("constrained arc");
            let k = col[&id];
            for v in a.support() {
                let want = a.sign(v) * k;
                match row.get(&v) {
                    Some(&r) if r != want => return None,
                    Some(_) => {}
                    None => {
                        row.insert(v, want);
                        for b in constrained.iter().filter(|b| b.contains(v)) {
                            let need = b.sign(v) * want;
                            match col.get(&b.id) {
                                Some(&c) if c != need => return None,
                                Some(_) => {}
                                None => {
                                    col.insert(b.id, need);
                                    queue.push_back(b.id);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Some((row, col))
}

/// Normalizes `d`, or returns `None` when arcs of odd support admit no common
/// sign choice. Arcs of support 2 never constrain the signs.
pub fn try_normalize(d: &MixedHypergraph) -> Result<Option<Normalized>> {
    d.require_disjoint()?;
    let Some((row, col)) = sign_pattern(d) else {
        return Ok(None);
    };
    let mut steps = Vec::new();
    let mut cur = d.clone();
    for &v in d.vertices() {
        if row.get(&v) == Some(&-1) {
            let step = Step::NegateRow { vertex: v };
            cur = ReductionTranscript::apply(&cur, &step)?;
            steps.push(step);
        }
    }
    for a in d.arcs() {
        let now = cur.arc(a.id).expect("ids stable under negation");
        let flip = if a.support_len() == 2 {
            now.plus.is_empty()
        } else {
            col.get(&a.id) == Some(&-1)
        };
        if flip {
            let step = Step::NegateColumn { arc: a.id };
            cur = ReductionTranscript::apply(&cur, &step)?;
            steps.push(step);
        }
    }
    let mut origin: Vec<Option<Vertex>> = d.vertices().iter().map(|&v| Some(v)).collect();
    let mut split_from = BTreeMap::new();
    let to_split: Vec<EdgeId> = cur
        .arcs()
        .iter()
        .filter(|a| a.plus.len() == 1 && a.minus.len() == 1)
        .map(|a| a.id)
        .collect();
    for id in to_split {
        let (next, step) = split_arc(&cur, id)?;
        if let Step::Split {
            new_arc, new_vertex, ..
        } = step
        {
            origin.insert(new_vertex, None);
            split_from.insert(new_arc, id);
        }
        cur = next;
        steps.push(step);
    }
    if let Some(a) = cur.arcs().iter().find(|a| !a.minus.is_empty()) {
        return Err(Error::internal(
            "sign normalization",
            format!("arc {} still has a tail", a.id),
        ));
    }
    let hypergraph = cur.underlying();
    Ok(Some(Normalized {
        mixed: cur,
        hypergraph,
        transcript: ReductionTranscript { steps },
        origin,
        split_from,
    }))
}

/// Row negations, column negations and splits turning `d` into an unsigned hypergraph.
pub fn normalize_to_hypergraph(d: &MixedHypergraph) -> Result<Normalized> {
    try_normalize(d)?
        .ok_or_else(|| Error::pre("no sign normalization exists: arcs of odd support force conflicting row signs"))
}

/// The cyclic vertex/arc order of a mixed cycle, starting with its first column.
fn cycle_order(c: &MixedHypergraph) -> Result<(Vec<Vertex>, Vec<EdgeId>)> {
    let deg = graph_degrees(c).ok_or_else(|| Error::pre("mixed cycle needs arcs of support 2"))?;
    if c.m() < 2 || c.m() != c.n() || !deg.values().all(|&d| d == 2) || !connected(c) {
        return Err(Error::pre("underlying hypergraph is not a cycle"));
    }
    let first = &c.arcs()[0];
    let support = first.support();
    let (v1, mut x) = if c.row_of(support[0]) < c.row_of(support[1]) {
        (support[0], support[1])
    } else {
        (support[1], support[0])
    };
    let mut verts = vec![v1];
    let mut arcs = vec![first.id];
    while x != v1 {
        let last = *arcs.last().expect("nonempty");
        let next = c
            .arcs()
            .iter()
            .find(|a| a.id != last && a.contains(x))
            .expect("degree 2");
        verts.push(x);
        arcs.push(next.id);
        x = next.support().into_iter().find(|&y| y != x).expect("support 2");
    }
    Ok((verts, arcs))
}

/// `u ∈ {±1}^arcs` (column order) with `M(c)·u = 0` for a mixed even cycle `c`.
pub fn even_cycle_nullvector(c: &MixedHypergraph) -> Result<Vec<i64>> {
    let (verts, arcs) = cycle_order(c)?;
    let k = arcs.len();
    let entry = |v: Vertex, a: EdgeId| c.arc(a).expect("cycle arc").sign(v);
    let mut u: BTreeMap<EdgeId, i64> = BTreeMap::from([(arcs[0], 1)]);
    for i in 0..k - 1 {
        let v = verts[i + 1];
        let next = -entry(v, arcs[i]) * u[&arcs[i]] * entry(v, arcs[i + 1]);
        u.insert(arcs[i + 1], next);
    }
    let v1 = verts[0];
    if entry(v1, arcs[0]) * u[&arcs[0]] + entry(v1, arcs[k - 1]) * u[&arcs[k - 1]] != 0 {
        return Err(Error::pre("cycle is odd: no ±1 null vector exists"));
    }
    let out: Vec<i64> = c.arcs().iter().map(|a| u[&a.id]).collect();
    if c.incidence_matrix().mul_vec(&out).iter().any(|&x| x != 0) {
        return Err(Error::internal("even-cycle null vector", "M·u is not zero"));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum AlmostTuClass {
    MixedOddCycle { witness: Witness },
    MixedOddTreeHouse { witness: Witness },
    NotAlmostTu,
}

fn recognize_cycle(d: &MixedHypergraph) -> Option<Witness> {
    let (vertices, edges) = cycle_order(d).ok()?;
    let w = WitnessOf::MixedOddCycle { vertices, edges };
    verify_mixed_witness(d, &w).then_some(w)
}

fn recognize_tree_house(d: &MixedHypergraph) -> Option<Witness> {
    let mut big = d.arcs().iter().filter(|a| a.support_len() != 2);
    let house = big.next()?;
    if big.next().is_some() || house.support_len() != 4 || d.n() != d.m() {
        return None;
    }
    let degree = |v: Vertex| d.arcs().iter().filter(|a| a.contains(v)).count();
    let corners = house.support();
    let roots: Vec<Vertex> = corners.iter().copied().filter(|&v| degree(v) == 4).collect();
    let [root] = roots[..] else {
        return None;
    };
    let mut paths: Vec<(Vec<Vertex>, Vec<EdgeId>)> = Vec::new();
    for start in d.arcs().iter().filter(|a| a.id != house.id && a.contains(root)) {
        let mut verts = vec![root];
        let mut edges = vec![start.id];
        let mut x = start.support().into_iter().find(|&y| y != root)?;
        while !house.contains(x) {
            verts.push(x);
            if verts.len() > d.n() {
                return None;
            }
            let last = *edges.last()?;
            let next = d.arcs().iter().find(|a| a.id != last && a.contains(x))?;
            edges.push(next.id);
            x = next.support().into_iter().find(|&y| y != x)?;
        }
        verts.push(x);
        paths.push((verts, edges));
    }
    if paths.len() != 3 {
        return None;
    }
    paths.sort_by_key(|(v, _)| *v.last().expect("nonempty"));
    let leaves = [*paths[0].0.last()?, *paths[1].0.last()?, *paths[2].0.last()?];
    let covered: usize = 1 + paths.iter().map(|(v, _)| v.len() - 1).sum::<usize>();
    if covered != d.n() {
        return None;
    }
    let [(p0, e0), (p1, e1), (p2, e2)]: [(Vec<Vertex>, Vec<EdgeId>); 3] = paths.try_into().ok()?;
    let w = WitnessOf::MixedOddTreeHouse(TreeHouseOf {
        root,
        leaves,
        paths: [p0, p1, p2],
        path_edges: [e0, e1, e2],
        house_edge: house.id,
    });
    verify_mixed_witness(d, &w).then_some(w)
}

/// Structural classification of a disjoint mixed hypergraph as a whole.
pub fn classify_almost_tu_disjoint(d: &MixedHypergraph) -> Result<AlmostTuClass> {
    d.require_disjoint()?;
    if let Some(witness) = recognize_cycle(d) {
        return Ok(AlmostTuClass::MixedOddCycle { witness });
    }
    if let Some(witness) = recognize_tree_house(d) {
        return Ok(AlmostTuClass::MixedOddTreeHouse { witness });
    }
    Ok(AlmostTuClass::NotAlmostTu)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RConstruction {
    pub r: IntMatrix,
    /// `A·R`, or `Rᵀ·A` when built for the transpose.
    pub product: IntMatrix,
    pub transposed: bool,
}

/// `R` with `A·R` the incidence matrix of a mixed odd cycle, for `A` the
/// incidence matrix (columns are arcs) of a mixed odd tree house or odd cycle.
pub fn build_r_matrix(a: &IntMatrix) -> Result<RConstruction> {
    let r = r_for(a)?;
    let product = a.mul(&r)?;
    check_r(&r, &product)?;
    Ok(RConstruction {
        r,
        product,
        transposed: false,
    })
}

/// `R` for `Aᵀ`, so that `Rᵀ·A` is the incidence matrix of a mixed odd cycle.
pub fn build_r_matrix_transposed(a: &IntMatrix) -> Result<RConstruction> {
    let at = a.transpose();
    let r = r_for(&at)?;
    let product = at.mul(&r)?;
    check_r(&r, &product)?;
    Ok(RConstruction {
        r: r.clone(),
        product: product.transpose(),
        transposed: true,
    })
}

fn check_r(r: &IntMatrix, product: &IntMatrix) -> Result<()> {
    let d = MixedHypergraph::from_matrix(product)
        .map_err(|e| Error::internal("column operations", format!("A·R is not an incidence matrix: {e}")))?;
    if !matches!(classify_almost_tu_disjoint(&d)?, AlmostTuClass::MixedOddCycle { .. }) {
        return Err(Error::internal("column operations", "A·R is not a mixed odd cycle"));
    }
    if det_exact(product)?.abs() != 2.into() {
        return Err(Error::internal("column operations", "|det A·R| is not 2"));
    }
    if !is_tu_bruteforce(r)? {
        return Err(Error::internal("column operations", "R is not TU"));
    }
    Ok(())
}

fn r_for(a: &IntMatrix) -> Result<IntMatrix> {
    let d = MixedHypergraph::from_matrix(a)?;
    let t = match classify_almost_tu_disjoint(&d)? {
        AlmostTuClass::MixedOddCycle { .. } => return Ok(IntMatrix::identity(d.m())),
        AlmostTuClass::MixedOddTreeHouse {
            witness: WitnessOf::MixedOddTreeHouse(t),
        } => t,
        _ => {
            return Err(Error::pre(
                "build-r needs the incidence matrix of a mixed odd tree house or mixed odd cycle",
            ))
        }
    };
    let h = t.house_edge;
    let p1 = &t.path_edges[0];
    let cycle_sel = SubSelection::new(t.paths[0].clone(), p1.iter().copied().chain([h]).collect());
    let cycle = d.induce(&cycle_sel)?;
    let u_cols = even_cycle_nullvector(&cycle)?;
    let mut u: BTreeMap<EdgeId, i64> = cycle.arcs().iter().map(|x| x.id).zip(u_cols).collect();
    let scale = u[&h];
    for x in u.values_mut() {
        *x *= scale;
    }
    let a2 = t.path_edges[1][0];
    let col = |id: EdgeId| d.arc_index(id).expect("arc of d");
    let row_r = d.row_of(t.root).expect("root row");
    let p1u_r: i64 = p1.iter().map(|&f| a.get(row_r, col(f)) * u[&f]).sum();
    // σ·(M(P1)u)_r = −M_{r,a2}; both sides are ±1.
    let sigma = -a.get(row_r, col(a2)) * p1u_r;
    let mut r = IntMatrix::identity(d.m());
    for &f in p1 {
        r.set(col(f), col(h), u[&f]);
        r.set(col(f), col(a2), sigma * u[&f]);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::decide_unimodular_disjoint;
    use crate::fixtures;
    use num_bigint::BigInt;

    fn arc(plus: &[Vertex], minus: &[Vertex]) -> HyperArc {
        HyperArc {
            id: 0,
            plus: plus.to_vec(),
            minus: minus.to_vec(),
        }
    }

    #[test]
    fn arc_parities() {
        assert_eq!(arc_parity(&arc(&[0], &[1])).unwrap(), Parity::Even);
        assert_eq!(arc_parity(&arc(&[0, 1], &[])).unwrap(), Parity::Odd);
        assert_eq!(arc_parity(&arc(&[], &[0, 1])).unwrap(), Parity::Odd);
        assert!(arc_parity(&arc(&[0, 1, 2], &[])).is_err());
    }

    #[test]
    fn cycle_parities() {
        assert_eq!(path_or_cycle_parity(&fixtures::dir4()).unwrap(), Parity::Even);
        let tri = MixedHypergraph::from_hypergraph(&fixtures::c3());
        assert_eq!(path_or_cycle_parity(&tri).unwrap(), Parity::Odd);
        // Path r-v-l2 closed by h restricted to {r, l2}.
        let fig5 = fixtures::fig5();
        let c = fig5.induce(&SubSelection::new(vec![0, 2, 3], vec![1, 2, 4])).unwrap();
        assert_eq!(path_or_cycle_parity(&c).unwrap(), Parity::Even);
    }

    #[test]
    fn negations_preserve_cycle_parity_and_det() {
        let dir4 = fixtures::dir4();
        let flipped = negate_row(&dir4, 1).unwrap();
        let at_v1: Vec<Parity> = flipped
            .arcs()
            .iter()
            .filter(|a| a.contains(1))
            .map(|a| arc_parity(a).unwrap())
            .collect();
        assert_eq!(at_v1, vec![Parity::Odd, Parity::Odd]);
        assert_eq!(path_or_cycle_parity(&flipped).unwrap(), Parity::Even);

        let tails = MixedHypergraph::unnamed(2, vec![(vec![], vec![0, 1])]).unwrap();
        let heads = negate_column(&tails, 0).unwrap();
        assert_eq!(heads.arcs()[0].plus, vec![0, 1]);
        assert_eq!(arc_parity(&heads.arcs()[0]).unwrap(), Parity::Odd);

        let fig5 = fixtures::fig5();
        let base = det_exact(&fig5.incidence_matrix()).unwrap().abs();
        for &v in fig5.vertices() {
            assert_eq!(
                det_exact(&negate_row(&fig5, v).unwrap().incidence_matrix())
                    .unwrap()
                    .abs(),
                base
            );
        }
        for a in fig5.arcs() {
            assert_eq!(
                det_exact(&negate_column(&fig5, a.id).unwrap().incidence_matrix())
                    .unwrap()
                    .abs(),
                base
            );
        }
    }

    #[test]
    fn fig4_splits_reproduce_printed_matrix() {
        let left = fixtures::fig4_left();
        let norm = normalize_to_hypergraph(&left).unwrap();
        assert_eq!(norm.transcript.steps.len(), 3);
        assert!(norm.transcript.steps.iter().all(|s| matches!(s, Step::Split { .. })));
        assert_eq!(
            norm.hypergraph.incidence_matrix(),
            fixtures::fig4_right().incidence_matrix()
        );
        let before = det_exact(&left.incidence_matrix()).unwrap();
        let after = det_exact(&norm.hypergraph.incidence_matrix()).unwrap();
        assert_eq!(before.abs(), BigInt::from(2));
        assert_eq!(after.abs(), BigInt::from(2));
        assert_eq!(norm.transcript.replay(&left).unwrap(), norm.mixed);
        let back = norm.transcript.invert(&norm.mixed).unwrap();
        assert_eq!(back.incidence_matrix(), left.incidence_matrix());
        assert_eq!(back.names(back.vertices()), left.names(left.vertices()));
    }

    #[test]
    fn unsigned_input_has_empty_transcript() {
        let g = MixedHypergraph::from_hypergraph(&fixtures::fig1());
        assert!(normalize_to_hypergraph(&g).unwrap().transcript.is_empty());
    }

    #[test]
    fn fig5_normalizes_to_a_tree_house_host() {
        let fig5 = fixtures::fig5();
        let norm = normalize_to_hypergraph(&fig5).unwrap();
        let dec = decide_unimodular_disjoint(&norm.hypergraph).unwrap();
        let w = dec.witness().unwrap();
        assert!(w.is_tree_house());
        let lifted = norm.lift_witness(w).unwrap();
        assert!(verify_mixed_witness(&fig5, &lifted));
    }

    #[test]
    fn nullvectors() {
        assert_eq!(even_cycle_nullvector(&fixtures::dir4()).unwrap(), vec![1, 1, 1, 1]);
        let c4 = MixedHypergraph::from_hypergraph(&fixtures::c4());
        assert_eq!(even_cycle_nullvector(&c4).unwrap(), vec![1, -1, 1, -1]);
        let tri = MixedHypergraph::from_hypergraph(&fixtures::c3());
        assert!(even_cycle_nullvector(&tri).is_err());
        let fig5 = fixtures::fig5();
        let c = fig5.induce(&SubSelection::new(vec![0, 2, 3], vec![1, 2, 4])).unwrap();
        let u = even_cycle_nullvector(&c).unwrap();
        assert!(c.incidence_matrix().mul_vec(&u).iter().all(|&x| x == 0));
    }

    #[test]
    fn classification_examples() {
        assert!(matches!(
            classify_almost_tu_disjoint(&fixtures::fig5()).unwrap(),
            AlmostTuClass::MixedOddTreeHouse { .. }
        ));
        assert_eq!(
            classify_almost_tu_disjoint(&fixtures::dir4()).unwrap(),
            AlmostTuClass::NotAlmostTu
        );
        let tri =
            MixedHypergraph::unnamed(3, vec![(vec![0], vec![1]), (vec![1], vec![2]), (vec![0, 2], vec![])]).unwrap();
        assert!(matches!(
            classify_almost_tu_disjoint(&tri).unwrap(),
            AlmostTuClass::MixedOddCycle { .. }
        ));
        assert_eq!(det_exact(&tri.incidence_matrix()).unwrap().abs(), BigInt::from(2));
    }

    #[test]
    fn r_for_fig5() {
        let a = fixtures::fig5().incidence_matrix();
        let rc = build_r_matrix(&a).unwrap();
        assert!(is_tu_bruteforce(&rc.r).unwrap());
        assert_eq!(rc.product.rows(), 5);
        assert_eq!(det_exact(&rc.product).unwrap().abs(), BigInt::from(2));
        let rt = build_r_matrix_transposed(&a).unwrap();
        assert_eq!(det_exact(&rt.product).unwrap().abs(), BigInt::from(2));
        let cycle = MixedHypergraph::from_hypergraph(&fixtures::c3()).incidence_matrix();
        assert_eq!(build_r_matrix(&cycle).unwrap().r, IntMatrix::identity(3));
        assert!(build_r_matrix(&fixtures::dir4().incidence_matrix()).is_err());
    }
}
