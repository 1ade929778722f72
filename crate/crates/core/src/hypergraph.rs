//! Hypergraphs, mixed hypergraphs, incidence matrices and partial subhypergraphs.
//!
//! Vertex ids index a shared name table (the *universe*); a hypergraph owns a
//! sorted subset of the universe. Derived hypergraphs (induced, reduced, split)
//! keep the universe, so vertex ids and edge ids stay comparable across an
//! entire pipeline.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

pub type Vertex = usize;
pub type EdgeId = usize;

/// Largest universe the bitmask-based searches accept.
pub const MASK_UNIVERSE: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    /// Sorted, nonempty, duplicate-free.
    pub verts: Vec<Vertex>,
}

impl Edge {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.verts.binary_search(&v).is_ok()
    }

    pub fn mask(&self) -> u64 {
        mask_of(&self.verts)
    }
}

pub(crate) fn mask_of(verts: &[Vertex]) -> u64 {
    verts.iter().fold(0u64, |m, &v| m | (1u64 << v))
}

pub(crate) fn verts_of(mut mask: u64) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// Vertex subset `U` and edge-id subset `F` of a host.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubSelection {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
}

impl SubSelection {
    pub fn new(mut vertices: Vec<Vertex>, mut edges: Vec<EdgeId>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_unstable();
        edges.dedup();
        SubSelection { vertices, edges }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Symbols {
    vertices: Arc<[String]>,
    edges: Arc<[String]>,
}

impl Symbols {
    fn vertex(&self, v: Vertex) -> String {
        self.vertices.get(v).cloned().unwrap_or_else(|| format!("#{v}"))
    }

    fn edge(&self, id: EdgeId) -> String {
        self.edges.get(id).cloned().unwrap_or_else(|| format!("#{id}"))
    }

    /// Same edge labels over a new vertex name table.
    pub(crate) fn with_vertex_names(&self, names: Vec<String>) -> Symbols {
        Symbols {
            vertices: names.into(),
            edges: self.edges.clone(),
        }
    }

    /// Sets the label of edge `id`, padding unlabeled ids with `#i`.
    pub(crate) fn with_edge_label(&self, id: EdgeId, label: String) -> Symbols {
        let mut edges: Vec<String> = self.edges.to_vec();
        while edges.len() <= id {
            edges.push(format!("#{}", edges.len()));
        }
        edges[id] = label;
        Symbols {
            vertices: self.vertices.clone(),
            edges: edges.into(),
        }
    }

    /// Keeps labels of ids below `len` only.
    pub(crate) fn truncate_edges(&self, len: usize) -> Symbols {
        Symbols {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().take(len).cloned().collect::<Vec<_>>().into(),
        }
    }
}

fn check_vertex_set(vertices: &[Vertex], universe: usize) -> Result<()> {
    for w in vertices.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::invalid("vertex list must be strictly ascending"));
        }
    }
    if let Some(&v) = vertices.last() {
        if v >= universe {
            return Err(Error::invalid(format!("vertex id {v} outside the name table")));
        }
    }
    Ok(())
}

fn check_member_list(verts: &[Vertex], vertex_set: &[Vertex], what: &str) -> Result<()> {
    if verts.is_empty() {
        return Err(Error::invalid(format!("{what} is empty")));
    }
    for w in verts.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::invalid(format!("{what} is not a sorted set")));
        }
    }
    for v in verts {
        if vertex_set.binary_search(v).is_err() {
            return Err(Error::invalid(format!("{what} uses vertex {v} outside the vertex set")));
        }
    }
    Ok(())
}

/// Position of each id in the edge order; `usize::MAX` marks absent ids.
fn build_index<I: Iterator<Item = EdgeId>>(ids: I) -> Result<Vec<usize>> {
    let mut index = Vec::new();
    for (pos, id) in ids.enumerate() {
        if id >= index.len() {
            index.resize(id + 1, usize::MAX);
        }
        if index[id] != usize::MAX {
            return Err(Error::invalid(format!("edge id {id} used twice")));
        }
        index[id] = pos;
    }
    Ok(index)
}

/// A finite hypergraph with a multiset of hyperedges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    symbols: Symbols,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    index: Vec<usize>,
}

impl Hypergraph {
    /// Vertices `0..names.len()`, edges numbered in order. Edge member lists may be
    /// unsorted but must not repeat a vertex.
    pub fn new(names: Vec<String>, edges: Vec<Vec<Vertex>>) -> Result<Self> {
        let labels: Vec<String> = (0..edges.len()).map(|i| format!("#{i}")).collect();
        Self::with_labels(names, edges, labels)
    }

    pub fn with_labels(names: Vec<String>, edges: Vec<Vec<Vertex>>, labels: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::invalid(format!("duplicate vertex name {n:?}")));
            }
        }
        let vertices: Vec<Vertex> = (0..names.len()).collect();
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(id, mut verts)| {
                let k = verts.len();
                verts.sort_unstable();
                verts.dedup();
                if verts.len() != k {
                    return Err(Error::invalid(format!("edge {id} repeats a vertex")));
                }
                Ok(Edge { id, verts })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts_inner(
            Symbols {
                vertices: names.into(),
                edges: labels.into(),
            },
            vertices,
            edges,
        )
    }

    /// Convenience constructor with vertices named `v0, v1, ...`.
    pub fn unnamed(n: usize, edges: Vec<Vec<Vertex>>) -> Result<Self> {
        Self::new((0..n).map(|i| format!("v{i}")).collect(), edges)
    }

    fn from_parts_inner(symbols: Symbols, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        check_vertex_set(&vertices, symbols.vertices.len())?;
        let index = build_index(edges.iter().map(|e| e.id))?;
        for e in &edges {
            check_member_list(&e.verts, &vertices, &format!("edge {}", e.id))?;
        }
        Ok(Hypergraph {
            symbols,
            vertices,
            edges,
            index,
        })
    }

    /// A hypergraph over the same universe as `self` with the given parts.
    pub fn derive(&self, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        Self::from_parts_inner(self.symbols.clone(), vertices, edges)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn universe(&self) -> usize {
        self.symbols.vertices.len()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edge_index(id).map(|i| &self.edges[i])
    }

    /// Column position of edge `id`.
    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.index.get(id).copied().filter(|&i| i != usize::MAX)
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.iter().map(|e| e.id).max()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn name(&self, v: Vertex) -> String {
        self.symbols.vertex(v)
    }

    pub fn names(&self, vs: &[Vertex]) -> Vec<String> {
        vs.iter().map(|&v| self.name(v)).collect()
    }

    pub fn edge_label(&self, id: EdgeId) -> String {
        self.symbols.edge(id)
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        self.symbols.vertices.iter().position(|n| n == name)
    }

    /// Ids of the edges containing `v`.
    pub fn incident(&self, v: Vertex) -> Vec<EdgeId> {
        self.edges.iter().filter(|e| e.contains(v)).map(|e| e.id).collect()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    pub fn vertex_mask(&self) -> u64 {
        mask_of(&self.vertices)
    }

    pub(crate) fn require_mask_universe(&self) -> Result<()> {
        if self.universe() > MASK_UNIVERSE {
            return Err(Error::GuardExceeded {
                what: "vertex universe",
                actual: self.universe(),
                limit: MASK_UNIVERSE,
            });
        }
        Ok(())
    }

    pub fn incidence_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.n(), self.m());
        for (c, e) in self.edges.iter().enumerate() {
            for v in &e.verts {
                let r = self.vertices.binary_search(v).expect("edge inside vertex set");
                m.set(r, c, 1);
            }
        }
        m
    }

    pub fn validate_selection(&self, sel: &SubSelection) -> Result<()> {
        for v in &sel.vertices {
            if !self.contains_vertex(*v) {
                return Err(Error::invalid(format!("selected vertex {v} is not in the hypergraph")));
            }
        }
        for id in &sel.edges {
            if self.edge(*id).is_none() {
                return Err(Error::invalid(format!("selected edge id {id} does not exist")));
            }
        }
        Ok(())
    }

    /// `G[U, F]`: edges `f ∩ U` for `f ∈ F` meeting `U`, keeping their ids.
    pub fn induce(&self, sel: &SubSelection) -> Result<Self> {
        self.validate_selection(sel)?;
        let sel = SubSelection::new(sel.vertices.clone(), sel.edges.clone());
        let edges = self
            .edges
            .iter()
            .filter(|e| sel.edges.binary_search(&e.id).is_ok())
            .filter_map(|e| {
                let verts: Vec<Vertex> = e
                    .verts
                    .iter()
                    .copied()
                    .filter(|v| sel.vertices.binary_search(v).is_ok())
                    .collect();
                (!verts.is_empty()).then_some(Edge { id: e.id, verts })
            })
            .collect();
        Self::from_parts_inner(self.symbols.clone(), sel.vertices, edges)
    }

    /// First pair of distinct size-≥4 edges that share a vertex, in id order.
    pub fn disjointness_violation(&self) -> Option<(EdgeId, EdgeId, Vec<Vertex>)> {
        let proper: Vec<&Edge> = self.edges.iter().filter(|e| e.len() >= 4).collect();
        for (i, a) in proper.iter().enumerate() {
            for b in &proper[i + 1..] {
                let shared: Vec<Vertex> = a.verts.iter().copied().filter(|v| b.contains(*v)).collect();
                if !shared.is_empty() {
                    return Some((a.id, b.id, shared));
                }
            }
        }
        None
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjointness_violation().is_none()
    }

    pub fn require_disjoint(&self) -> Result<()> {
        match self.disjointness_violation() {
            None => Ok(()),
            Some((a, b, shared)) => Err(Error::NotDisjoint {
                first: self.edge_label(a),
                second: self.edge_label(b),
                shared: self.names(&shared),
            }),
        }
    }

    pub fn is_eulerian(&self) -> bool {
        self.edges.iter().all(|e| e.len() % 2 == 0) && self.vertices.iter().all(|&v| self.degree(v).is_multiple_of(2))
    }

    /// Number of nonzeros of the incidence matrix.
    pub fn support_size(&self) -> usize {
        self.edges.iter().map(Edge::len).sum()
    }

    /// True when every edge has exactly two vertices.
    pub fn is_graph(&self) -> bool {
        self.edges.iter().all(|e| e.len() == 2)
    }

    pub fn to_doc(&self) -> HypergraphDoc {
        HypergraphDoc {
            vertices: self.names(&self.vertices),
            edges: self.edges.iter().map(|e| self.names(&e.verts)).collect(),
            edge_names: Some(self.edges.iter().map(|e| self.edge_label(e.id)).collect()),
        }
    }
}

/// A hyperarc `(S, T)`: `plus` gets entry +1, `minus` gets −1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperArc {
    pub id: EdgeId,
    pub plus: Vec<Vertex>,
    pub minus: Vec<Vertex>,
}

impl HyperArc {
    /// Sorted `S ∪ T`.
    pub fn support(&self) -> Vec<Vertex> {
        let mut s: Vec<Vertex> = self.plus.iter().chain(&self.minus).copied().collect();
        s.sort_unstable();
        s
    }

    pub fn support_len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    /// Incidence entry of `v`.
    pub fn sign(&self, v: Vertex) -> i64 {
        if self.plus.binary_search(&v).is_ok() {
            1
        } else if self.minus.binary_search(&v).is_ok() {
            -1
        } else {
            0
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.sign(v) != 0
    }
}

/// A mixed hypergraph: hyperarcs carry a head set and a tail set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedHypergraph {
    symbols: Symbols,
    vertices: Vec<Vertex>,
    arcs: Vec<HyperArc>,
    index: Vec<usize>,
}

impl MixedHypergraph {
    /// Vertices `0..names.len()`, arcs numbered in order as `(plus, minus)` pairs.
    pub fn new(names: Vec<String>, arcs: Vec<(Vec<Vertex>, Vec<Vertex>)>) -> Result<Self> {
        let labels: Vec<String> = (0..arcs.len()).map(|i| format!("#{i}")).collect();
        Self::with_labels(names, arcs, labels)
    }

    pub fn with_labels(names: Vec<String>, arcs: Vec<(Vec<Vertex>, Vec<Vertex>)>, labels: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::invalid(format!("duplicate vertex name {n:?}")));
            }
        }
        let vertices: Vec<Vertex> = (0..names.len()).collect();
        let arcs = arcs
            .into_iter()
            .enumerate()
            .map(|(id, (mut plus, mut minus))| {
                let (p, q) = (plus.len(), minus.len());
                plus.sort_unstable();
                plus.dedup();
                minus.sort_unstable();
                minus.dedup();
                if plus.len() != p || minus.len() != q {
                    return Err(Error::invalid(format!("arc {id} repeats a vertex")));
                }
                Ok(HyperArc { id, plus, minus })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts_inner(
            Symbols {
                vertices: names.into(),
                edges: labels.into(),
            },
            vertices,
            arcs,
        )
    }

    pub fn unnamed(n: usize, arcs: Vec<(Vec<Vertex>, Vec<Vertex>)>) -> Result<Self> {
        Self::new((0..n).map(|i| format!("v{i}")).collect(), arcs)
    }

    /// Reads columns of a {0, ±1} matrix as arcs; rows become vertices `v0, v1, ...`.
    pub fn from_matrix(m: &IntMatrix) -> Result<Self> {
        if !m.is_signed_incidence() {
            return Err(Error::invalid("matrix entries must lie in {0, ±1}"));
        }
        let arcs = (0..m.cols())
            .map(|c| {
                let plus = (0..m.rows()).filter(|&r| m.get(r, c) == 1).collect();
                let minus = (0..m.rows()).filter(|&r| m.get(r, c) == -1).collect();
                (plus, minus)
            })
            .collect();
        Self::unnamed(m.rows(), arcs)
    }

    fn from_parts_inner(symbols: Symbols, vertices: Vec<Vertex>, arcs: Vec<HyperArc>) -> Result<Self> {
        check_vertex_set(&vertices, symbols.vertices.len())?;
        let index = build_index(arcs.iter().map(|a| a.id))?;
        for a in &arcs {
            let what = format!("arc {}", a.id);
            if a.plus.iter().any(|v| a.minus.binary_search(v).is_ok()) {
                return Err(Error::invalid(format!("{what} has a vertex in both head and tail")));
            }
            check_member_list(&a.support(), &vertices, &what)?;
            for w in a.plus.windows(2).chain(a.minus.windows(2)) {
                if w[0] >= w[1] {
                    return Err(Error::invalid(format!("{what} sides are not sorted sets")));
                }
            }
        }
        Ok(MixedHypergraph {
            symbols,
            vertices,
            arcs,
            index,
        })
    }

    pub fn derive(&self, vertices: Vec<Vertex>, arcs: Vec<HyperArc>) -> Result<Self> {
        Self::from_parts_inner(self.symbols.clone(), vertices, arcs)
    }

    pub(crate) fn derive_with_symbols(symbols: Symbols, vertices: Vec<Vertex>, arcs: Vec<HyperArc>) -> Result<Self> {
        Self::from_parts_inner(symbols, vertices, arcs)
    }

    pub(crate) fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[HyperArc] {
        &self.arcs
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    pub fn universe(&self) -> usize {
        self.symbols.vertices.len()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn arc(&self, id: EdgeId) -> Option<&HyperArc> {
        self.arc_index(id).map(|i| &self.arcs[i])
    }

    /// Column position of arc `id`.
    pub fn arc_index(&self, id: EdgeId) -> Option<usize> {
        self.index.get(id).copied().filter(|&i| i != usize::MAX)
    }

    pub fn max_arc_id(&self) -> Option<EdgeId> {
        self.arcs.iter().map(|a| a.id).max()
    }

    pub fn name(&self, v: Vertex) -> String {
        self.symbols.vertex(v)
    }

    pub fn names(&self, vs: &[Vertex]) -> Vec<String> {
        vs.iter().map(|&v| self.name(v)).collect()
    }

    pub fn arc_label(&self, id: EdgeId) -> String {
        self.symbols.edge(id)
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<Vertex> {
        self.symbols.vertices.iter().position(|n| n == name)
    }

    pub fn row_of(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Hypergraph of supports, same vertex and edge ids.
    pub fn underlying(&self) -> Hypergraph {
        Hypergraph {
            symbols: self.symbols.clone(),
            vertices: self.vertices.clone(),
            edges: self
                .arcs
                .iter()
                .map(|a| Edge {
                    id: a.id,
                    verts: a.support(),
                })
                .collect(),
            index: self.index.clone(),
        }
    }

    /// The mixed hypergraph whose arcs all have empty tails.
    pub fn from_hypergraph(g: &Hypergraph) -> Self {
        MixedHypergraph {
            symbols: g.symbols.clone(),
            vertices: g.vertices.clone(),
            arcs: g
                .edges
                .iter()
                .map(|e| HyperArc {
                    id: e.id,
                    plus: e.verts.clone(),
                    minus: Vec::new(),
                })
                .collect(),
            index: g.index.clone(),
        }
    }

    pub fn incidence_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.n(), self.m());
        for (c, a) in self.arcs.iter().enumerate() {
            for &v in &a.plus {
                m.set(self.row_of(v).expect("arc inside vertex set"), c, 1);
            }
            for &v in &a.minus {
                m.set(self.row_of(v).expect("arc inside vertex set"), c, -1);
            }
        }
        m
    }

    pub fn induce(&self, sel: &SubSelection) -> Result<Self> {
        let under = self.underlying().induce(sel)?;
        let arcs = under
            .edges
            .iter()
            .map(|e| {
                let a = self.arc(e.id).expect("induced ids come from host");
                HyperArc {
                    id: a.id,
                    plus: a.plus.iter().copied().filter(|v| e.contains(*v)).collect(),
                    minus: a.minus.iter().copied().filter(|v| e.contains(*v)).collect(),
                }
            })
            .collect();
        Self::from_parts_inner(self.symbols.clone(), under.vertices, arcs)
    }

    pub fn disjointness_violation(&self) -> Option<(EdgeId, EdgeId, Vec<Vertex>)> {
        self.underlying().disjointness_violation()
    }

    pub fn is_disjoint(&self) -> bool {
        self.disjointness_violation().is_none()
    }

    pub fn require_disjoint(&self) -> Result<()> {
        match self.disjointness_violation() {
            None => Ok(()),
            Some((a, b, shared)) => Err(Error::NotDisjoint {
                first: self.arc_label(a),
                second: self.arc_label(b),
                shared: self.names(&shared),
            }),
        }
    }

    pub fn is_eulerian(&self) -> bool {
        self.underlying().is_eulerian()
    }

    pub fn support_size(&self) -> usize {
        self.arcs.iter().map(HyperArc::support_len).sum()
    }

    pub fn to_doc(&self) -> MixedDoc {
        MixedDoc {
            vertices: self.names(&self.vertices),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcDoc {
                    plus: self.names(&a.plus),
                    minus: self.names(&a.minus),
                })
                .collect(),
            arc_names: Some(self.arcs.iter().map(|a| self.arc_label(a.id)).collect()),
        }
    }
}

/// Incidence matrix of either kind of hypergraph.
pub trait Incidence {
    fn incidence_matrix(&self) -> IntMatrix;
}

impl Incidence for Hypergraph {
    fn incidence_matrix(&self) -> IntMatrix {
        Hypergraph::incidence_matrix(self)
    }
}

impl Incidence for MixedHypergraph {
    fn incidence_matrix(&self) -> IntMatrix {
        MixedHypergraph::incidence_matrix(self)
    }
}

pub fn incidence_matrix<G: Incidence>(g: &G) -> IntMatrix {
    g.incidence_matrix()
}

pub fn induce(g: &Hypergraph, sel: &SubSelection) -> Result<Hypergraph> {
    g.induce(sel)
}

// ---------------------------------------------------------------------------
// JSON documents

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_names: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDoc {
    #[serde(default)]
    pub plus: Vec<String>,
    #[serde(default)]
    pub minus: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedDoc {
    pub vertices: Vec<String>,
    pub arcs: Vec<ArcDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc_names: Option<Vec<String>>,
}

fn resolve(names: &[String], list: &[String], what: &str) -> Result<Vec<Vertex>> {
    list.iter()
        .map(|n| {
            names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::invalid(format!("{what} mentions unknown vertex {n:?}")))
        })
        .collect()
}

fn labels_or_default(labels: Option<Vec<String>>, count: usize, what: &str) -> Result<Vec<String>> {
    match labels {
        None => Ok((0..count).map(|i| format!("#{i}")).collect()),
        Some(l) if l.len() == count => Ok(l),
        Some(l) => Err(Error::invalid(format!(
            "{what} has {} names for {count} entries",
            l.len()
        ))),
    }
}

impl TryFrom<HypergraphDoc> for Hypergraph {
    type Error = Error;

    fn try_from(doc: HypergraphDoc) -> Result<Self> {
        let edges = doc
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| resolve(&doc.vertices, e, &format!("edge {i}")))
            .collect::<Result<Vec<_>>>()?;
        let labels = labels_or_default(doc.edge_names, edges.len(), "edge_names")?;
        Hypergraph::with_labels(doc.vertices, edges, labels)
    }
}

impl TryFrom<MixedDoc> for MixedHypergraph {
    type Error = Error;

    fn try_from(doc: MixedDoc) -> Result<Self> {
        let arcs = doc
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let what = format!("arc {i}");
                Ok((
                    resolve(&doc.vertices, &a.plus, &what)?,
                    resolve(&doc.vertices, &a.minus, &what)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = labels_or_default(doc.arc_names, arcs.len(), "arc_names")?;
        MixedHypergraph::with_labels(doc.vertices, arcs, labels)
    }
}

/// A parsed instance of either kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Plain(Hypergraph),
    Mixed(MixedHypergraph),
}

impl Instance {
    /// Parses either document format; the presence of `"arcs"` selects the mixed one.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed JSON: {e}")))?;
        if value.get("arcs").is_some() {
            let doc: MixedDoc = serde_json::from_value(value)
                .map_err(|e| Error::invalid(format!("bad mixed hypergraph document: {e}")))?;
            Ok(Instance::Mixed(doc.try_into()?))
        } else {
            let doc: HypergraphDoc =
                serde_json::from_value(value).map_err(|e| Error::invalid(format!("bad hypergraph document: {e}")))?;
            Ok(Instance::Plain(doc.try_into()?))
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Instance::Plain(g) => serde_json::to_value(g.to_doc()),
            Instance::Mixed(d) => serde_json::to_value(d.to_doc()),
        }
        .expect("documents serialize")
    }

    pub fn incidence_matrix(&self) -> IntMatrix {
        match self {
            Instance::Plain(g) => g.incidence_matrix(),
            Instance::Mixed(d) => d.incidence_matrix(),
        }
    }

    pub fn is_disjoint(&self) -> bool {
        match self {
            Instance::Plain(g) => g.is_disjoint(),
            Instance::Mixed(d) => d.is_disjoint(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig1_incidence() {
        let g = fixtures::fig1();
        assert_eq!(
            g.incidence_matrix().to_rows(),
            vec![vec![1, 1, 1, 1], vec![1, 0, 0, 1], vec![0, 1, 0, 1], vec![0, 0, 1, 1]]
        );
    }

    #[test]
    fn fig5_incidence() {
        let d = fixtures::fig5();
        assert_eq!(
            d.incidence_matrix().to_rows(),
            vec![
                vec![1, -1, 0, -1, 1],
                vec![-1, 0, 0, 0, -1],
                vec![0, 1, 1, 0, 0],
                vec![0, 0, 1, 0, 1],
                vec![0, 0, 0, -1, 1],
            ]
        );
    }

    #[test]
    fn empty_hypergraph() {
        let g = Hypergraph::new(vec![], vec![]).unwrap();
        let m = g.incidence_matrix();
        assert_eq!((m.rows(), m.cols()), (0, 0));
        assert!(g.is_disjoint());
        assert!(g.is_eulerian());
    }

    #[test]
    fn fig1_induce_on_root_and_leaf() {
        let g = fixtures::fig1();
        let r = g.vertex_by_name("r").unwrap();
        let l1 = g.vertex_by_name("l1").unwrap();
        let h = g.induce(&SubSelection::new(vec![r, l1], vec![0, 1, 2, 3])).unwrap();
        let sets: Vec<Vec<String>> = h.edges().iter().map(|e| h.names(&e.verts)).collect();
        assert_eq!(sets, vec![vec!["r", "l1"], vec!["r"], vec!["r"], vec!["r", "l1"]]);
    }

    #[test]
    fn fig2_induce_gives_parallel_singletons() {
        let g = fixtures::fig2();
        let v1 = g.vertex_by_name("v1").unwrap();
        let h = g.induce(&SubSelection::new(vec![v1], vec![0, 1])).unwrap();
        assert_eq!(h.m(), 2);
        assert!(h.edges().iter().all(|e| e.verts == vec![v1]));
        assert_ne!(h.edges()[0].id, h.edges()[1].id);
    }

    #[test]
    fn full_selection_is_identity() {
        let g = fixtures::fig2();
        let sel = SubSelection::new(g.vertices().to_vec(), g.edges().iter().map(|e| e.id).collect());
        assert_eq!(g.induce(&sel).unwrap(), g);
    }

    #[test]
    fn invalid_selection_rejected() {
        let g = fixtures::c3();
        assert!(g.induce(&SubSelection::new(vec![7], vec![])).is_err());
        assert!(g.induce(&SubSelection::new(vec![0], vec![9])).is_err());
    }

    #[test]
    fn disjointness() {
        assert!(fixtures::fig1().is_disjoint());
        let err = fixtures::fig2().require_disjoint().unwrap_err();
        match err {
            Error::NotDisjoint { first, second, shared } => {
                assert_eq!((first.as_str(), second.as_str()), ("e", "f"));
                assert_eq!(shared, vec!["v1", "v3", "v4"]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(fixtures::c4().is_disjoint());
    }

    #[test]
    fn eulerian_examples() {
        assert!(fixtures::c4().is_eulerian());
        assert!(fixtures::fig1().is_eulerian());
        let tri = Hypergraph::unnamed(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(!tri.is_eulerian());
    }

    #[test]
    fn support_sizes() {
        assert_eq!(fixtures::fig1().support_size(), 10);
        assert_eq!(fixtures::fig1().incidence_matrix().support_size(), 10);
        assert_eq!(fixtures::c3().support_size(), 6);
    }

    #[test]
    fn json_roundtrip() {
        let g = fixtures::fig2();
        let text = serde_json::to_string(&g.to_doc()).unwrap();
        match Instance::from_json(&text).unwrap() {
            Instance::Plain(h) => assert_eq!(h, g),
            Instance::Mixed(_) => panic!("parsed as mixed"),
        }
        let d = fixtures::fig5();
        let text = serde_json::to_string(&d.to_doc()).unwrap();
        assert_eq!(Instance::from_json(&text).unwrap(), Instance::Mixed(d));
    }

    #[test]
    fn malformed_documents_rejected() {
        assert!(Instance::from_json(r#"{"vertices":["a"],"edges":[["b"]]}"#).is_err());
        assert!(Instance::from_json(r#"{"vertices":["a","a"],"edges":[]}"#).is_err());
        assert!(Instance::from_json(r#"{"vertices":["a"],"edges":[[]]}"#).is_err());
        assert!(Instance::from_json(r#"{"vertices":["a"],"arcs":[{"plus":["a"],"minus":["a"]}]}"#).is_err());
        assert!(Instance::from_json("not json").is_err());
    }
}
