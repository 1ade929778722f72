//! Witness certificates and their checker.
//!
//! The checker works only from the host's edge lists and the certificate; it
//! shares no code with the searches that produce witnesses.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, Hypergraph, MixedHypergraph, SubSelection, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeHouseOf<V> {
    pub root: V,
    pub leaves: [V; 3],
    /// `paths[i]` runs from `root` to `leaves[i]`.
    pub paths: [Vec<V>; 3],
    /// `path_edges[i][j]` joins `paths[i][j]` and `paths[i][j + 1]`.
    pub path_edges: [Vec<EdgeId>; 3],
    pub house_edge: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessOf<V> {
    /// `edges[i]` joins `vertices[i]` and `vertices[(i + 1) % k]`.
    OddCycle {
        vertices: Vec<V>,
        edges: Vec<EdgeId>,
    },
    OddTreeHouse(TreeHouseOf<V>),
    MixedOddCycle {
        vertices: Vec<V>,
        edges: Vec<EdgeId>,
    },
    MixedOddTreeHouse(TreeHouseOf<V>),
}

/// Witness over vertex ids.
pub type Witness = WitnessOf<Vertex>;
pub type TreeHouse = TreeHouseOf<Vertex>;
/// Witness over vertex names, as written to certificate files.
pub type Certificate = WitnessOf<String>;

impl<V> TreeHouseOf<V> {
    pub fn try_map<W, E>(&self, mut f: impl FnMut(&V) -> Result<W, E>) -> Result<TreeHouseOf<W>, E> {
        let path = |p: &Vec<V>, f: &mut dyn FnMut(&V) -> Result<W, E>| p.iter().map(f).collect::<Result<Vec<W>, E>>();
        Ok(TreeHouseOf {
            root: f(&self.root)?,
            leaves: [f(&self.leaves[0])?, f(&self.leaves[1])?, f(&self.leaves[2])?],
            paths: [
                path(&self.paths[0], &mut f)?,
                path(&self.paths[1], &mut f)?,
                path(&self.paths[2], &mut f)?,
            ],
            path_edges: self.path_edges.clone(),
            house_edge: self.house_edge,
        })
    }

    pub fn edge_count(&self) -> usize {
        1 + self.path_edges.iter().map(Vec::len).sum::<usize>()
    }
}

impl<V> WitnessOf<V> {
    pub fn kind(&self) -> &'static str {
        match self {
            WitnessOf::OddCycle { .. } => "odd_cycle",
            WitnessOf::OddTreeHouse(_) => "odd_tree_house",
            WitnessOf::MixedOddCycle { .. } => "mixed_odd_cycle",
            WitnessOf::MixedOddTreeHouse(_) => "mixed_odd_tree_house",
        }
    }

    pub fn is_mixed(&self) -> bool {
        matches!(self, WitnessOf::MixedOddCycle { .. } | WitnessOf::MixedOddTreeHouse(_))
    }

    pub fn is_tree_house(&self) -> bool {
        matches!(self, WitnessOf::OddTreeHouse(_) | WitnessOf::MixedOddTreeHouse(_))
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        match self {
            WitnessOf::OddCycle { edges, .. } | WitnessOf::MixedOddCycle { edges, .. } => edges.clone(),
            WitnessOf::OddTreeHouse(t) | WitnessOf::MixedOddTreeHouse(t) => {
                let mut out = vec![t.house_edge];
                out.extend(t.path_edges.iter().flatten());
                out
            }
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids().len()
    }

    pub fn try_map<W, E>(&self, mut f: impl FnMut(&V) -> Result<W, E>) -> Result<WitnessOf<W>, E> {
        Ok(match self {
            WitnessOf::OddCycle { vertices, edges } => WitnessOf::OddCycle {
                vertices: vertices.iter().map(&mut f).collect::<Result<_, E>>()?,
                edges: edges.clone(),
            },
            WitnessOf::MixedOddCycle { vertices, edges } => WitnessOf::MixedOddCycle {
                vertices: vertices.iter().map(&mut f).collect::<Result<_, E>>()?,
                edges: edges.clone(),
            },
            WitnessOf::OddTreeHouse(t) => WitnessOf::OddTreeHouse(t.try_map(f)?),
            WitnessOf::MixedOddTreeHouse(t) => WitnessOf::MixedOddTreeHouse(t.try_map(f)?),
        })
    }

    pub fn map<W>(&self, mut f: impl FnMut(&V) -> W) -> WitnessOf<W> {
        self.try_map::<W, std::convert::Infallible>(|v| Ok(f(v)))
            .unwrap_or_else(|never| match never {})
    }

    /// Same structure with every edge id replaced by `f(id)`.
    pub fn map_edges(&self, mut f: impl FnMut(EdgeId) -> EdgeId) -> WitnessOf<V>
    where
        V: Clone,
    {
        let mut out = self.clone();
        match &mut out {
            WitnessOf::OddCycle { edges, .. } | WitnessOf::MixedOddCycle { edges, .. } => {
                edges.iter_mut().for_each(|e| *e = f(*e));
            }
            WitnessOf::OddTreeHouse(t) | WitnessOf::MixedOddTreeHouse(t) => {
                t.house_edge = f(t.house_edge);
                t.path_edges.iter_mut().flatten().for_each(|e| *e = f(*e));
            }
        }
        out
    }
}

impl<V: Clone> WitnessOf<V> {
    pub fn vertex_list(&self) -> Vec<V> {
        match self {
            WitnessOf::OddCycle { vertices, .. } | WitnessOf::MixedOddCycle { vertices, .. } => vertices.clone(),
            WitnessOf::OddTreeHouse(t) | WitnessOf::MixedOddTreeHouse(t) => {
                let mut out = vec![t.root.clone()];
                for p in &t.paths {
                    out.extend(p.iter().skip(1).cloned());
                }
                out
            }
        }
    }
}

impl Witness {
    /// `(U, F)` of the witness inside its host.
    pub fn selection(&self) -> SubSelection {
        SubSelection::new(self.vertex_list(), self.edge_ids())
    }

    pub fn named(&self, name: impl Fn(Vertex) -> String) -> Certificate {
        self.map(|&v| name(v))
    }

    /// Same structure with the mixed/plain flag switched.
    pub fn into_kind(self, mixed: bool) -> Witness {
        match (self, mixed) {
            (WitnessOf::OddCycle { vertices, edges } | WitnessOf::MixedOddCycle { vertices, edges }, false) => {
                WitnessOf::OddCycle { vertices, edges }
            }
            (WitnessOf::OddCycle { vertices, edges } | WitnessOf::MixedOddCycle { vertices, edges }, true) => {
                WitnessOf::MixedOddCycle { vertices, edges }
            }
            (WitnessOf::OddTreeHouse(t) | WitnessOf::MixedOddTreeHouse(t), false) => WitnessOf::OddTreeHouse(t),
            (WitnessOf::OddTreeHouse(t) | WitnessOf::MixedOddTreeHouse(t), true) => WitnessOf::MixedOddTreeHouse(t),
        }
    }
}

impl Certificate {
    pub fn resolve(&self, lookup: impl Fn(&str) -> Option<Vertex>) -> Result<Witness> {
        self.try_map(|name| {
            lookup(name).ok_or_else(|| Error::invalid(format!("certificate names unknown vertex {name:?}")))
        })
    }
}

/// Signed support of a host column.
type Column = Vec<(Vertex, i64)>;

struct Host<'a> {
    vertex: &'a dyn Fn(Vertex) -> bool,
    column: &'a dyn Fn(EdgeId) -> Option<Column>,
}

impl Host<'_> {
    /// Signed entries of column `e` on the vertex set `u`.
    fn restricted(&self, e: EdgeId, u: &BTreeSet<Vertex>) -> Option<Column> {
        Some((self.column)(e)?.into_iter().filter(|(v, _)| u.contains(v)).collect())
    }
}

fn meets_exactly(col: &Column, pair: [Vertex; 2]) -> bool {
    let mut got: Vec<Vertex> = col.iter().map(|&(v, _)| v).collect();
    got.sort_unstable();
    let mut want = pair.to_vec();
    want.sort_unstable();
    got == want
}

/// Parity of a two-entry signed column: 0 for opposite signs, 1 for equal signs.
fn pair_parity(col: &Column) -> usize {
    usize::from(col[0].1 == col[1].1)
}

fn distinct<T: Ord + Copy>(items: impl IntoIterator<Item = T>) -> bool {
    let mut seen = BTreeSet::new();
    items.into_iter().all(|x| seen.insert(x))
}

fn check_cycle(host: &Host<'_>, vertices: &[Vertex], edges: &[EdgeId], mixed: bool) -> bool {
    let k = vertices.len();
    let long_enough = if mixed { k >= 2 } else { k >= 3 && k % 2 == 1 };
    if !long_enough || edges.len() != k || !distinct(vertices.iter().copied()) || !distinct(edges.iter().copied()) {
        return false;
    }
    if !vertices.iter().all(|&v| (host.vertex)(v)) {
        return false;
    }
    let u: BTreeSet<Vertex> = vertices.iter().copied().collect();
    let mut parity = 0;
    for (i, &e) in edges.iter().enumerate() {
        let Some(col) = host.restricted(e, &u) else {
            return false;
        };
        if !meets_exactly(&col, [vertices[i], vertices[(i + 1) % k]]) {
            return false;
        }
        parity += pair_parity(&col);
    }
    !mixed || parity % 2 == 1
}

fn check_house(host: &Host<'_>, t: &TreeHouse, mixed: bool) -> bool {
    let corners = [t.root, t.leaves[0], t.leaves[1], t.leaves[2]];
    if !distinct(corners) {
        return false;
    }
    for i in 0..3 {
        let (p, es) = (&t.paths[i], &t.path_edges[i]);
        if p.len() < 2 || p[0] != t.root || p[p.len() - 1] != t.leaves[i] || es.len() + 1 != p.len() {
            return false;
        }
        if !mixed && es.len() % 2 == 0 {
            return false;
        }
    }
    let all_vertices: Vec<Vertex> = std::iter::once(t.root)
        .chain(t.paths.iter().flat_map(|p| p[1..].iter().copied()))
        .collect();
    let all_edges: Vec<EdgeId> = std::iter::once(t.house_edge)
        .chain(t.path_edges.iter().flatten().copied())
        .collect();
    if !distinct(all_vertices.iter().copied()) || !distinct(all_edges.iter().copied()) {
        return false;
    }
    if !all_vertices.iter().all(|&v| (host.vertex)(v)) {
        return false;
    }
    let u: BTreeSet<Vertex> = all_vertices.into_iter().collect();
    let Some(house) = host.restricted(t.house_edge, &u) else {
        return false;
    };
    let mut house_verts: Vec<Vertex> = house.iter().map(|&(v, _)| v).collect();
    house_verts.sort_unstable();
    let mut want = corners.to_vec();
    want.sort_unstable();
    if house_verts != want {
        return false;
    }
    let sign_in_house = |v: Vertex| house.iter().find(|&&(w, _)| w == v).map(|&(_, s)| s).expect("corner");
    for i in 0..3 {
        let mut parity = 0;
        for (j, &e) in t.path_edges[i].iter().enumerate() {
            let Some(col) = host.restricted(e, &u) else {
                return false;
            };
            if !meets_exactly(&col, [t.paths[i][j], t.paths[i][j + 1]]) {
                return false;
            }
            parity += pair_parity(&col);
        }
        // The cycle closed by the house edge restricted to {root, leaf} must be even.
        parity += usize::from(sign_in_house(t.root) == sign_in_house(t.leaves[i]));
        if mixed && parity % 2 == 1 {
            return false;
        }
    }
    true
}

/// Whether `w` is an odd cycle or odd tree house that is a partial subhypergraph of `g`.
pub fn verify_witness(g: &Hypergraph, w: &Witness) -> bool {
    let vertex = |v: Vertex| g.contains_vertex(v);
    let column = |e: EdgeId| g.edge(e).map(|e| e.verts.iter().map(|&v| (v, 1)).collect());
    let host = Host {
        vertex: &vertex,
        column: &column,
    };
    match w {
        WitnessOf::OddCycle { vertices, edges } => check_cycle(&host, vertices, edges, false),
        WitnessOf::OddTreeHouse(t) => check_house(&host, t, false),
        _ => false,
    }
}

/// Whether `w` is a mixed odd cycle or mixed odd tree house that is a partial
/// subhypergraph of `d`.
pub fn verify_mixed_witness(d: &MixedHypergraph, w: &Witness) -> bool {
    let vertex = |v: Vertex| d.contains_vertex(v);
    let column = |e: EdgeId| {
        d.arc(e).map(|a| {
            a.plus
                .iter()
                .map(|&v| (v, 1))
                .chain(a.minus.iter().map(|&v| (v, -1)))
                .collect()
        })
    };
    let host = Host {
        vertex: &vertex,
        column: &column,
    };
    match w {
        WitnessOf::MixedOddCycle { vertices, edges } => check_cycle(&host, vertices, edges, true),
        WitnessOf::MixedOddTreeHouse(t) => check_house(&host, t, true),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    pub(crate) fn fig1_house() -> Witness {
        WitnessOf::OddTreeHouse(TreeHouseOf {
            root: 0,
            leaves: [1, 2, 3],
            paths: [vec![0, 1], vec![0, 2], vec![0, 3]],
            path_edges: [vec![0], vec![1], vec![2]],
            house_edge: 3,
        })
    }

    #[test]
    fn fig1_house_verifies() {
        assert!(verify_witness(&fixtures::fig1(), &fig1_house()));
    }

    #[test]
    fn swapped_edge_breaks_certificate() {
        let WitnessOf::OddTreeHouse(mut t) = fig1_house() else {
            unreachable!()
        };
        t.path_edges[0] = vec![3];
        assert!(!verify_witness(&fixtures::fig1(), &WitnessOf::OddTreeHouse(t)));
    }

    #[test]
    fn c3_cycle_verifies_and_fig1_triangle_does_not() {
        let c3 = WitnessOf::OddCycle {
            vertices: vec![0, 1, 2],
            edges: vec![0, 1, 2],
        };
        assert!(verify_witness(&fixtures::c3(), &c3));
        // r-l1-h-l2-r uses h, which meets {r, l1, l2} in three vertices.
        let bad = WitnessOf::OddCycle {
            vertices: vec![0, 1, 2],
            edges: vec![0, 3, 1],
        };
        assert!(!verify_witness(&fixtures::fig1(), &bad));
    }

    #[test]
    fn fig5_is_a_mixed_odd_tree_house() {
        let w = WitnessOf::MixedOddTreeHouse(TreeHouseOf {
            root: 0,
            leaves: [1, 3, 4],
            paths: [vec![0, 1], vec![0, 2, 3], vec![0, 4]],
            path_edges: [vec![0], vec![1, 2], vec![3]],
            house_edge: 4,
        });
        assert!(verify_mixed_witness(&fixtures::fig5(), &w));
        assert!(!verify_witness(&fixtures::fig5().underlying(), &w));
    }

    #[test]
    fn certificate_round_trip() {
        let g = fixtures::fig1();
        let cert = fig1_house().named(|v| g.name(v));
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"kind\":\"odd_tree_house\""));
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back.resolve(|n| g.vertex_by_name(n)).unwrap(), fig1_house());
        assert!(back.resolve(|_| None).is_err());
    }
}
