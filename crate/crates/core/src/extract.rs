//! Constructive witness extraction for non-unimodular disjoint hypergraphs.
//!
//! Each round takes an Eulerian core `G*` (square, support `2 mod 4`), removes
//! an even cycle `C*` from its incidence matrix and continues on the result
//! `H*`. Edges of `H*` keep the ids of the `G*` edges they come from, so the
//! map `Φ*: E(H*) → E(G*)` is the identity on ids. Once a core contains an odd
//! cycle, that witness is lifted back through the rounds.
//!
//! Every step the construction depends on is re-checked as it runs. A failed
//! check is reported as [`Error::Internal`] naming the step, never skipped
//! by falling back to search.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::detect::{
    find_odd_cycle_with, shortest_odd_cycles, verify_witness, Budget, TreeHouse, TreeHouseOf, Witness, WitnessOf,
};
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, EdgeId, Hypergraph, SubSelection, Vertex};
use crate::linalg::{least_square_core, Limits};
use crate::quasi::{ParityChecker, ParityClaim, QuasiEmbedding};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub budget: Budget,
    pub limits: Limits,
}

/// A square Eulerian partial subhypergraph with support `2 mod 4` and no
/// isolated vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianCore {
    /// `G[U, F]` of the hypergraph it was taken from; edge ids are kept.
    pub hypergraph: Hypergraph,
    pub selection: SubSelection,
}

impl EulerianCore {
    pub fn support(&self) -> usize {
        self.hypergraph.support_size()
    }

    fn check(&self) -> Result<()> {
        let g = &self.hypergraph;
        let ok = g.n() == g.m()
            && g.is_eulerian()
            && g.support_size() % 4 == 2
            && g.vertices().iter().all(|&v| g.degree(v) > 0)
            && g.is_disjoint();
        if ok {
            Ok(())
        } else {
            Err(Error::internal(
                "Eulerian core conditions",
                format!("core {:?} violates them", self.selection),
            ))
        }
    }
}

pub fn find_eulerian_core(g: &Hypergraph) -> Result<EulerianCore> {
    find_eulerian_core_with(g, Limits::default())
}

/// The least-support core; ties go to the least (vertex mask, edge mask).
pub fn find_eulerian_core_with(g: &Hypergraph, limits: Limits) -> Result<EulerianCore> {
    g.require_disjoint()?;
    let Some(w) = least_square_core(g, limits)? else {
        return Err(Error::InputIsTu);
    };
    let core = EulerianCore {
        hypergraph: g.induce(&w.selection)?,
        selection: w.selection,
    };
    core.check()?;
    Ok(core)
}

/// A cycle listed in order: `edges[i]` joins `vertices[i]` and `vertices[(i + 1) % k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWalk {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
}

impl CycleWalk {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn selection(&self) -> SubSelection {
        SubSelection::new(self.vertices.clone(), self.edges.clone())
    }

    /// Whether `g[U, F]` is exactly this cycle (length 2 allowed).
    pub fn is_cycle_in(&self, g: &Hypergraph) -> bool {
        let k = self.vertices.len();
        let u: BTreeSet<Vertex> = self.vertices.iter().copied().collect();
        let f: BTreeSet<EdgeId> = self.edges.iter().copied().collect();
        if k < 2 || self.edges.len() != k || u.len() != k || f.len() != k {
            return false;
        }
        self.edges.iter().enumerate().all(|(i, &id)| {
            let Some(e) = g.edge(id) else {
                return false;
            };
            let meet: Vec<Vertex> = e.verts.iter().copied().filter(|v| u.contains(v)).collect();
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % k]);
            meet == [a.min(b), a.max(b)]
        })
    }

    fn into_odd_cycle(self) -> Witness {
        WitnessOf::OddCycle {
            vertices: self.vertices,
            edges: self.edges,
        }
    }
}

/// An even cycle `C*` of a core together with its distinguished edge `g*`,
/// which is always the last edge of `cycle`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceCycle {
    pub cycle: CycleWalk,
    pub g_star: EdgeId,
    /// Whether the path came from a crossable pair rather than a dropped matching edge.
    pub crossable: bool,
}

impl NiceCycle {
    /// Every vertex of a size-≥4 cycle edge other than `g*` has all its edges on the cycle.
    pub fn satisfies_n1(&self, g: &Hypergraph) -> bool {
        let f: BTreeSet<EdgeId> = self.cycle.edges.iter().copied().collect();
        self.cycle.edges.iter().filter(|&&id| id != self.g_star).all(|&id| {
            let e = g.edge(id).expect("cycle edge");
            e.len() < 4
                || self
                    .cycle
                    .vertices
                    .iter()
                    .filter(|&&v| e.contains(v))
                    .all(|&v| g.incident(v).iter().all(|x| f.contains(x)))
        })
    }

    /// Every size-≥4 edge off the cycle meets it in at most one vertex.
    pub fn satisfies_n2(&self, g: &Hypergraph) -> bool {
        let u: BTreeSet<Vertex> = self.cycle.vertices.iter().copied().collect();
        g.edges()
            .iter()
            .filter(|e| e.len() >= 4 && !self.cycle.edges.contains(&e.id))
            .all(|e| e.verts.iter().filter(|v| u.contains(v)).count() <= 1)
    }

    /// Even cycle of `g` with `g*` last, N1 and N2.
    pub fn verify(&self, g: &Hypergraph) -> bool {
        self.cycle.is_cycle_in(g)
            && self.cycle.len().is_multiple_of(2)
            && self.cycle.edges.last() == Some(&self.g_star)
            && self.satisfies_n1(g)
            && self.satisfies_n2(g)
    }
}

/// Unique path between two vertices of a forest given as adjacency lists.
fn forest_path<T: Copy>(
    adj: &BTreeMap<Vertex, Vec<(Vertex, T)>>,
    from: Vertex,
    to: Vertex,
) -> Option<(Vec<Vertex>, Vec<T>)> {
    let mut prev: BTreeMap<Vertex, (Vertex, T)> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let (mut verts, mut links) = (vec![to], Vec::new());
            let mut cur = to;
            while cur != from {
                let (p, t) = prev[&cur];
                verts.push(p);
                links.push(t);
                cur = p;
            }
            verts.reverse();
            links.reverse();
            return Some((verts, links));
        }
        for &(y, t) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(y) {
                prev.insert(y, (x, t));
                queue.push_back(y);
            }
        }
    }
    None
}

/// First cycle closed when links are added in order; the closing link comes last.
fn first_cycle<T: Copy>(links: &[(Vertex, Vertex, T)]) -> Option<(Vec<Vertex>, Vec<T>)> {
    let mut adj: BTreeMap<Vertex, Vec<(Vertex, T)>> = BTreeMap::new();
    for &(a, b, t) in links {
        if let Some((verts, mut path)) = forest_path(&adj, b, a) {
            path.push(t);
            return Some((verts, path));
        }
        adj.entry(a).or_default().push((b, t));
        adj.entry(b).or_default().push((a, t));
    }
    None
}

/// A cycle of the graph formed by the size-2 edges, if any.
fn graph_cycle(g: &Hypergraph) -> Option<CycleWalk> {
    let links: Vec<(Vertex, Vertex, EdgeId)> = g
        .edges()
        .iter()
        .filter(|e| e.len() == 2)
        .map(|e| (e.verts[0], e.verts[1], e.id))
        .collect();
    first_cycle(&links).map(|(vertices, edges)| CycleWalk { vertices, edges })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Forested {
    /// The size-2 edges of `core` form a forest; `removed` lists the even
    /// cycles deleted on the way, each followed by a fresh core search.
    Forest {
        core: EulerianCore,
        removed: Vec<CycleWalk>,
    },
    OddCycle(Witness),
}

pub fn enforce_forest(core: EulerianCore, limits: Limits) -> Result<Forested> {
    let mut core = core;
    let mut removed = Vec::new();
    loop {
        core.check()?;
        let Some(cycle) = graph_cycle(&core.hypergraph) else {
            return Ok(Forested::Forest { core, removed });
        };
        if !cycle.is_cycle_in(&core.hypergraph) {
            return Err(Error::internal(
                "forest cycle",
                "graph cycle is not a partial subhypergraph",
            ));
        }
        if cycle.len() % 2 == 1 {
            return Ok(Forested::OddCycle(cycle.into_odd_cycle()));
        }
        let nc = NiceCycle {
            g_star: *cycle.edges.last().expect("nonempty cycle"),
            cycle: cycle.clone(),
            crossable: false,
        };
        let rp = reduce_by_cycle(&core, &nc)?;
        if !rp.is_partial() {
            return Err(Error::internal(
                "forest cycle removal",
                "graph cycle removal left a conflict",
            ));
        }
        let next = find_eulerian_core_with(&rp.reduced, limits).map_err(lost_non_unimodularity)?;
        // The reduced hypergraph is an induced part of the old core, so the new
        // selection is valid in the core's source too.
        core = next;
        removed.push(cycle);
    }
}

fn lost_non_unimodularity(e: Error) -> Error {
    match e {
        Error::InputIsTu => Error::internal(
            "reduction preserves non-unimodularity",
            "reduced hypergraph has no Eulerian core of support 2 mod 4",
        ),
        e => e,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Link {
    Forest(EdgeId),
    /// Pair of forest leaves inside the given size-≥4 edge.
    Matching(EdgeId),
}

impl Link {
    fn image(self) -> EdgeId {
        match self {
            Link::Forest(e) | Link::Matching(e) => e,
        }
    }
}

/// Builds the auxiliary graph of forest edges and leaf matchings, takes a
/// cycle in it, and shortens it to an even cycle with N1 and N2.
pub fn almost_nice_cycle(core: &EulerianCore) -> Result<NiceCycle> {
    core.check()?;
    let g = &core.hypergraph;
    if graph_cycle(g).is_some() {
        return Err(Error::pre("almost-nice cycle needs the size-2 edges to form a forest"));
    }
    let mut forest_degree: BTreeMap<Vertex, usize> = BTreeMap::new();
    for e in g.edges().iter().filter(|e| e.len() == 2) {
        for &v in &e.verts {
            *forest_degree.entry(v).or_default() += 1;
        }
    }
    let owner: BTreeMap<Vertex, EdgeId> = g
        .edges()
        .iter()
        .filter(|e| e.len() >= 4)
        .flat_map(|e| e.verts.iter().map(move |&v| (v, e.id)))
        .collect();
    let is_leaf = |v: Vertex| forest_degree.get(&v) == Some(&1);
    if g.vertices().iter().any(|&v| is_leaf(v) && !owner.contains_key(&v)) {
        return Err(Error::internal(
            "forest leaves lie in proper edges",
            "a leaf outside every size-≥4 edge",
        ));
    }

    let mut links: Vec<(Vertex, Vertex, Link)> = g
        .edges()
        .iter()
        .filter(|e| e.len() == 2)
        .map(|e| (e.verts[0], e.verts[1], Link::Forest(e.id)))
        .collect();
    for e in g.edges().iter().filter(|e| e.len() >= 4) {
        let leaves: Vec<Vertex> = e.verts.iter().copied().filter(|&v| is_leaf(v)).collect();
        for pair in leaves.chunks_exact(2) {
            links.push((pair[0], pair[1], Link::Matching(e.id)));
        }
    }
    if links.len() < g.n() {
        return Err(Error::internal(
            "auxiliary graph edge count",
            format!("{} links on {} vertices", links.len(), g.n()),
        ));
    }
    let (cv, cl) = first_cycle(&links)
        .ok_or_else(|| Error::internal("auxiliary graph edge count", "no cycle despite |E| ≥ |V|"))?;
    let k = cv.len();
    let matching_pairs: BTreeSet<(Vertex, Vertex)> = (0..k)
        .filter(|&i| matches!(cl[i], Link::Matching(_)))
        .map(|i| {
            let (a, b) = (cv[i], cv[(i + 1) % k]);
            (a.min(b), a.max(b))
        })
        .collect();

    let mut best: Option<((usize, Vertex, Vertex), usize, usize)> = None;
    for i in 0..k {
        for j in i + 1..k {
            let (v, w) = (cv[i], cv[j]);
            let same = matches!((owner.get(&v), owner.get(&w)), (Some(a), Some(b)) if a == b);
            if !same || matching_pairs.contains(&(v.min(w), v.max(w))) {
                continue;
            }
            let key = ((j - i).min(k - (j - i)), v.min(w), v.max(w));
            if best.as_ref().is_none_or(|(b, _, _)| key < *b) {
                best = Some((key, i, j));
            }
        }
    }
    let crossable = best.is_some();
    let (path, path_links): (Vec<Vertex>, Vec<Link>) = match best {
        Some((_, i, j)) if j - i <= k - (j - i) => (cv[i..=j].to_vec(), cl[i..j].to_vec()),
        Some((_, i, j)) => {
            let verts = (0..=k - (j - i)).map(|t| cv[(i + k - t) % k]).collect();
            let ls = (0..k - (j - i)).map(|t| cl[(i + k - 1 - t) % k]).collect();
            (verts, ls)
        }
        None => {
            let p = (0..k)
                .find(|&i| matches!(cl[i], Link::Matching(_)))
                .ok_or_else(|| Error::internal("auxiliary cycle uses a matching edge", "cycle of forest edges only"))?;
            let verts = (0..k).map(|t| cv[(p + 1 + t) % k]).collect();
            let ls = (0..k - 1).map(|t| cl[(p + 1 + t) % k]).collect();
            (verts, ls)
        }
    };
    let (v, w) = (path[0], path[path.len() - 1]);
    let g_star = match (owner.get(&v), owner.get(&w)) {
        (Some(&a), Some(&b)) if a == b => a,
        _ => return Err(Error::internal("path ends share a proper edge", format!("{v} and {w}"))),
    };
    let mut edges: Vec<EdgeId> = path_links.iter().map(|l| l.image()).collect();
    if edges.contains(&g_star) {
        return Err(Error::internal(
            "path avoids g*",
            format!("edge {g_star} is used inside the path"),
        ));
    }
    edges.push(g_star);
    let nc = NiceCycle {
        cycle: CycleWalk { vertices: path, edges },
        g_star,
        crossable,
    };
    if !nc.cycle.is_cycle_in(g) {
        return Err(Error::internal(
            "path plus g* is a partial cycle",
            format!("{:?}", nc.cycle),
        ));
    }
    if nc.cycle.len() % 2 == 1 {
        return Err(Error::internal("core has no odd cycle", "almost-nice cycle is odd"));
    }
    if !nc.satisfies_n1(g) {
        return Err(Error::internal("N1", format!("{:?}", nc.cycle)));
    }
    if !nc.satisfies_n2(g) {
        return Err(Error::internal("N2", format!("{:?}", nc.cycle)));
    }
    Ok(nc)
}

/// `H*` obtained from `G*` by deleting the support of a cycle, with `Φ*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPair {
    /// `G*`.
    pub core: Hypergraph,
    /// `H*`; every edge keeps the id of the `G*` edge it comes from.
    pub reduced: Hypergraph,
    pub cycle: NiceCycle,
    pub phi: BTreeMap<EdgeId, EdgeId>,
}

impl ReducedPair {
    pub fn embedding(&self) -> QuasiEmbedding<'_> {
        QuasiEmbedding::new(self.reduced.clone(), &self.core, self.phi.clone())
    }

    /// Whether `H*` is a partial subhypergraph of `G*`.
    pub fn is_partial(&self) -> bool {
        self.embedding().is_partial()
    }
}

pub fn reduce_by_cycle(core: &EulerianCore, nc: &NiceCycle) -> Result<ReducedPair> {
    let g = &core.hypergraph;
    if !g.is_eulerian() || !g.is_disjoint() || g.support_size() % 4 != 2 {
        return Err(Error::pre(
            "reduction needs a disjoint Eulerian host of support 2 mod 4",
        ));
    }
    if !nc.cycle.is_cycle_in(g) || nc.cycle.len() % 2 == 1 || nc.cycle.edges.last() != Some(&nc.g_star) {
        return Err(Error::pre("reduction needs an even cycle of the core ending in g*"));
    }
    if !nc.satisfies_n1(g) {
        return Err(Error::pre("reduction needs N1"));
    }
    let u: BTreeSet<Vertex> = nc.cycle.vertices.iter().copied().collect();
    let f: BTreeSet<EdgeId> = nc.cycle.edges.iter().copied().collect();
    let spent = |v: Vertex| u.contains(&v) && g.incident(v).iter().all(|e| f.contains(e));
    let vertices: Vec<Vertex> = g.vertices().iter().copied().filter(|&v| !spent(v)).collect();
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter_map(|e| {
            if !f.contains(&e.id) {
                Some(e.clone())
            } else if e.len() >= 4 {
                Some(Edge {
                    id: e.id,
                    verts: e.verts.iter().copied().filter(|v| !u.contains(v)).collect(),
                })
            } else {
                None
            }
        })
        .collect();
    let reduced = g.derive(vertices, edges)?;
    let phi = reduced.edges().iter().map(|e| (e.id, e.id)).collect();
    let rp = ReducedPair {
        core: g.clone(),
        reduced,
        cycle: nc.clone(),
        phi,
    };

    let h = &rp.reduced;
    let removed = 2 * nc.cycle.len();
    if !h.is_eulerian() || !h.is_disjoint() {
        return Err(Error::internal(
            "reduced hypergraph is Eulerian and disjoint",
            format!("{h:?}"),
        ));
    }
    if h.support_size() + removed != g.support_size() || h.support_size() % 4 != 2 || removed < 4 {
        return Err(Error::internal(
            "support drops by the cycle support",
            format!("{} to {} removing {removed}", g.support_size(), h.support_size()),
        ));
    }
    let q = rp.embedding();
    if !q.verify_quasi() {
        return Err(Error::internal(
            "reduced pair is a quasi-subhypergraph",
            format!("{h:?}"),
        ));
    }
    let conflicts = q.conflicts().host_edges();
    if !(conflicts.is_empty() || conflicts == [nc.g_star]) {
        return Err(Error::internal(
            "g* is the only conflict",
            format!("conflicts {conflicts:?}"),
        ));
    }
    let g_star = g.edge(nc.g_star).expect("cycle edge");
    let special = g_star.len() == 2 || g_star.verts.iter().filter(|v| u.contains(v)).all(|&v| spent(v));
    if special && !conflicts.is_empty() {
        return Err(Error::internal(
            "special condition gives a partial subhypergraph",
            format!("{conflicts:?}"),
        ));
    }
    Ok(rp)
}

/// Three root-to-leaf paths closed by a house edge, each edge carrying its
/// image in the host. This also represents non-injective intermediates.
#[derive(Clone, Debug, PartialEq, Eq)]
struct QuasiHouse {
    /// `paths[i][0]` is the common root.
    paths: [Vec<Vertex>; 3],
    /// `images[i][j]` is the host image of the edge `paths[i][j]`-`paths[i][j + 1]`.
    images: [Vec<EdgeId>; 3],
    house_image: EdgeId,
}

fn pair(a: Vertex, b: Vertex) -> Vec<Vertex> {
    vec![a.min(b), a.max(b)]
}

impl QuasiHouse {
    fn from_tree_house(t: &TreeHouse) -> Self {
        QuasiHouse {
            paths: t.paths.clone(),
            images: t.path_edges.clone(),
            house_image: t.house_edge,
        }
    }

    fn root(&self) -> Vertex {
        self.paths[0][0]
    }

    fn leaf(&self, i: usize) -> Vertex {
        *self.paths[i].last().expect("nonempty path")
    }

    fn house(&self) -> Vec<Vertex> {
        let mut h = vec![self.root(), self.leaf(0), self.leaf(1), self.leaf(2)];
        h.sort_unstable();
        h.dedup();
        h
    }

    fn edge_count(&self) -> usize {
        1 + self.images.iter().map(Vec::len).sum::<usize>()
    }

    fn swap_paths(&mut self, i: usize, j: usize) {
        self.paths.swap(i, j);
        self.images.swap(i, j);
    }

    /// Sub edge `0` is the house; path edges follow in path order.
    fn embedding<'h>(&self, host: &'h Hypergraph) -> Result<QuasiEmbedding<'h>> {
        let vertices: BTreeSet<Vertex> = self.paths.iter().flatten().copied().collect();
        let mut edges = vec![Edge {
            id: 0,
            verts: self.house(),
        }];
        let mut phi = BTreeMap::from([(0, self.house_image)]);
        for (p, imgs) in self.paths.iter().zip(&self.images) {
            for (j, &img) in imgs.iter().enumerate() {
                let id = edges.len();
                edges.push(Edge {
                    id,
                    verts: pair(p[j], p[j + 1]),
                });
                phi.insert(id, img);
            }
        }
        let sub = host.derive(vertices.into_iter().collect(), edges)?;
        Ok(QuasiEmbedding::new(sub, host, phi))
    }

    /// Path and position of sub edge `id`; `None` for the house.
    fn locate(&self, id: EdgeId) -> Option<(usize, usize)> {
        let mut next = 1;
        for (i, imgs) in self.images.iter().enumerate() {
            if id < next + imgs.len() && id >= next {
                return Some((i, id - next));
            }
            next += imgs.len();
        }
        None
    }

    /// Paths that are simple `root`-`leaf` paths with interiors off the house.
    fn satisfies_r1(&self) -> bool {
        let house = self.house();
        house.len() == 4
            && self.paths.iter().zip(&self.images).all(|(p, imgs)| {
                p.len() >= 2
                    && p[0] == self.root()
                    && imgs.len() + 1 == p.len()
                    && p.iter().collect::<BTreeSet<_>>().len() == p.len()
                    && p[1..p.len() - 1].iter().all(|v| house.binary_search(v).is_err())
            })
    }

    /// Sorted by (length, least non-root vertex).
    fn canonical(mut self) -> Self {
        let key = |p: &Vec<Vertex>| (p.len(), p[1..].iter().min().copied());
        let mut order = [0, 1, 2];
        order.sort_by_key(|&i| key(&self.paths[i]));
        let paths = order.map(|i| std::mem::take(&mut self.paths[i]));
        let images = order.map(|i| std::mem::take(&mut self.images[i]));
        QuasiHouse {
            paths,
            images,
            house_image: self.house_image,
        }
    }

    fn into_tree_house(self) -> TreeHouse {
        let leaves = [self.leaf(0), self.leaf(1), self.leaf(2)];
        TreeHouseOf {
            root: self.root(),
            leaves,
            paths: self.paths,
            path_edges: self.images,
            house_edge: self.house_image,
        }
    }
}

/// A walk given by its vertex sequence and edge images.
type WalkRef<'a> = (&'a [Vertex], &'a [EdgeId]);

/// Runs the parity lemma on the union of `walks`; `claim` receives the sub
/// edge ids of each walk. Failed hypotheses are reported against `lemma`.
fn assert_parity(
    checker: &ParityChecker<'_>,
    host: &Hypergraph,
    walks: &[WalkRef<'_>],
    lemma: &'static str,
    claim: impl FnOnce(Vec<Vec<EdgeId>>) -> ParityClaim,
) -> Result<()> {
    let vertices: BTreeSet<Vertex> = walks.iter().flat_map(|(p, _)| p.iter().copied()).collect();
    let mut edges = Vec::new();
    let mut phi = BTreeMap::new();
    let mut ids = Vec::new();
    for (p, imgs) in walks {
        let mut mine = Vec::new();
        for (j, &img) in imgs.iter().enumerate() {
            let id = edges.len();
            edges.push(Edge {
                id,
                verts: pair(p[j], p[j + 1]),
            });
            phi.insert(id, img);
            mine.push(id);
        }
        ids.push(mine);
    }
    let sub = host.derive(vertices.into_iter().collect(), edges)?;
    let q = QuasiEmbedding::new(sub, host, phi);
    match checker.check(&q, &claim(ids)) {
        Ok(_) => Ok(()),
        Err(Error::Precondition(msg)) => Err(Error::internal(lemma, msg)),
        Err(e) => Err(e),
    }
}

/// One shrinking step of the tree-house lifting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum HouseStep {
    /// The house edge was the conflicting piece; path `path` was cut at `index`.
    ShrinkHouse {
        conflict: EdgeId,
        path: usize,
        index: usize,
    },
    /// A path edge was the conflicting piece; the path was spliced from `from` to `to`.
    Splice {
        conflict: EdgeId,
        path: usize,
        from: usize,
        to: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HouseLift {
    pub witness: Witness,
    pub steps: Vec<HouseStep>,
}

/// Turns an odd tree house of `H*` into one of `G*`.
pub fn lift_tree_house(rp: &ReducedPair, t: &Witness) -> Result<HouseLift> {
    let WitnessOf::OddTreeHouse(th) = t else {
        return Err(Error::pre("tree-house lifting needs an odd tree house"));
    };
    if !verify_witness(&rp.reduced, t) {
        return Err(Error::pre("tree house is not a partial subhypergraph of H*"));
    }
    let host = &rp.core;
    let checker = ParityChecker::new(host)?;
    let mut w = QuasiHouse::from_tree_house(th);
    let mut steps = Vec::new();
    loop {
        let q = w.embedding(host)?;
        if !q.verify_quasi() {
            return Err(Error::internal(
                "tree-house lifting keeps a quasi-subhypergraph",
                format!("{w:?}"),
            ));
        }
        if q.phi.values().collect::<BTreeSet<_>>().len() != q.phi.len() {
            return Err(Error::internal(
                "tree-house lifting keeps the map injective",
                format!("{w:?}"),
            ));
        }
        let report = q.conflicts();
        let conflict = match report.conflicts.as_slice() {
            [] => break,
            [c] => *c,
            more => {
                return Err(Error::internal(
                    "tree house has at most one conflict",
                    format!("{} conflicts", more.len()),
                ))
            }
        };
        let e_c = conflict.host_edge;
        let ec = host.edge(e_c).expect("conflict is a host edge");
        let before = w.edge_count();
        match w.locate(conflict.witness) {
            None => {
                let (i, s) = (0..3)
                    .find_map(|i| {
                        let p = &w.paths[i];
                        (1..p.len() - 1).find(|&j| ec.contains(p[j])).map(|j| (i, j))
                    })
                    .ok_or_else(|| Error::internal("house conflict meets a path interior", format!("{w:?}")))?;
                let (root, v_s) = (w.root(), w.paths[i][s]);
                assert_parity(
                    &checker,
                    host,
                    &[(&w.paths[i][..=s], &w.images[i][..s])],
                    "shortened path is odd",
                    |_| ParityClaim::Walk {
                        a: root,
                        b: v_s,
                        e: e_c,
                    },
                )?;
                w.paths[i].truncate(s + 1);
                w.images[i].truncate(s);
                steps.push(HouseStep::ShrinkHouse {
                    conflict: e_c,
                    path: i,
                    index: s,
                });
            }
            Some((k, _)) => {
                let p = w.paths[k].clone();
                let imgs = w.images[k].clone();
                let hits: Vec<usize> = (0..p.len()).filter(|&j| ec.contains(p[j])).collect();
                if hits.len() < 3 {
                    return Err(Error::internal(
                        "tree-house lifting case 3",
                        format!("conflict {e_c} meets path {k} in {} vertices", hits.len()),
                    ));
                }
                let (s, t) = (hits[0], hits[hits.len() - 1]);
                if s == 0 || t == p.len() - 1 || s + 2 > t {
                    return Err(Error::internal(
                        "conflict meets only path interiors",
                        format!("{hits:?}"),
                    ));
                }
                let (root, leaf, house_image) = (p[0], p[p.len() - 1], w.house_image);
                assert_parity(
                    &checker,
                    host,
                    &[(&p[..=s], &imgs[..s]), (&p[t..], &imgs[t..])],
                    "spliced path is odd",
                    |ids| ParityClaim::TwoWalks {
                        ends: [root, p[s], leaf, p[t]],
                        p: ids[0].clone(),
                        q: ids[1].clone(),
                        e: house_image,
                        f: e_c,
                    },
                )?;
                w.paths[k] = p[..=s].iter().chain(&p[t..]).copied().collect();
                w.images[k] = imgs[..s].iter().chain([&e_c]).chain(&imgs[t..]).copied().collect();
                steps.push(HouseStep::Splice {
                    conflict: e_c,
                    path: k,
                    from: s,
                    to: t,
                });
            }
        }
        if w.edge_count() >= before {
            return Err(Error::internal(
                "tree-house lifting shrinks the house",
                format!("{w:?}"),
            ));
        }
    }
    let witness = WitnessOf::OddTreeHouse(w.canonical().into_tree_house());
    if !verify_witness(host, &witness) {
        return Err(Error::internal(
            "conflict-free tree house embeds in G*",
            format!("{witness:?}"),
        ));
    }
    Ok(HouseLift { witness, steps })
}

/// One crossover between the first two paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossover {
    pub g1: EdgeId,
    pub g2: EdgeId,
    /// Whether the second and third paths were exchanged first.
    pub swapped: bool,
    pub s1: usize,
    pub t1: usize,
    pub s2: usize,
    pub t2: usize,
    pub edges_before: usize,
    pub edges_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleLift {
    pub witness: Witness,
    /// `K*`, the chosen shortest odd cycle of `H*`.
    pub k_star: CycleWalk,
    /// The vertex of `g*` shared by `C*` and `K*`.
    pub root: Vertex,
    pub crossovers: Vec<Crossover>,
}

/// Checks R1 to R4 and returns the conflicts.
fn check_candidate(w: &QuasiHouse, host: &Hypergraph) -> Result<Vec<EdgeId>> {
    if !w.satisfies_r1() {
        return Err(Error::internal("R1", format!("{w:?}")));
    }
    let q = w.embedding(host)?;
    if !q.verify_quasi() {
        return Err(Error::internal("R2", format!("{w:?}")));
    }
    let conflicts = q.conflicts().host_edges();
    for &c in &conflicts {
        let e = host.edge(c).expect("conflict is a host edge");
        let meets = |i: usize| w.paths[i].iter().filter(|&&v| e.contains(v)).count();
        if meets(1) > 0 && meets(2) > 0 {
            return Err(Error::internal(
                "R3",
                format!("conflict {c} meets the second and third paths"),
            ));
        }
        for i in 0..3 {
            let at: Vec<usize> = (0..w.paths[i].len()).filter(|&j| e.contains(w.paths[i][j])).collect();
            let ok = match at.as_slice() {
                [] | [_] => true,
                [a, b] => *b == a + 1 && w.images[i][*a] == c,
                _ => false,
            };
            if !ok {
                return Err(Error::internal("R4", format!("conflict {c} meets path {i} at {at:?}")));
            }
        }
    }
    Ok(conflicts)
}

fn crossover(w: &QuasiHouse, conflicts: &[EdgeId], host: &Hypergraph) -> Result<(QuasiHouse, Crossover)> {
    let edge = |e: EdgeId| host.edge(e).expect("conflict is a host edge");
    let conflict_at = |v: Vertex| conflicts.iter().copied().find(|&c| edge(c).contains(v));
    let first_in_conflict = |p: &[Vertex]| (1..p.len() - 1).find_map(|j| conflict_at(p[j]).map(|c| (j, c)));
    let last_in = |p: &[Vertex], e: EdgeId| (0..p.len()).rev().find(|&j| edge(e).contains(p[j]));

    let mut w = w.clone();
    let (s1, g1) =
        first_in_conflict(&w.paths[0]).ok_or_else(|| Error::internal("T3", "no conflict meets the first path"))?;
    let swapped = last_in(&w.paths[1], g1).is_none();
    if swapped {
        w.swap_paths(1, 2);
    }
    let (p1, p2) = (&w.paths[0], &w.paths[1]);
    let (i1, i2) = (&w.images[0], &w.images[1]);
    let t1 = last_in(p2, g1).ok_or_else(|| Error::internal("T3", format!("conflict {g1} meets one path only")))?;
    let (s2, g2) = first_in_conflict(p2).ok_or_else(|| Error::internal("T3", "no conflict meets the second path"))?;
    let t2 = last_in(p1, g2).ok_or_else(|| Error::internal("T3", format!("conflict {g2} misses the first path")))?;
    if g1 == g2 {
        return Err(Error::internal("crossover conflicts differ", format!("both are {g1}")));
    }
    if !(s1 < t2 && s2 < t1 && (s1 + 1 < t2 || s2 + 1 < t1)) {
        return Err(Error::internal(
            "crossover indices",
            format!("s1 {s1} t2 {t2} s2 {s2} t1 {t1}"),
        ));
    }

    // Walk `a` up to `cut`, cross on `via` to `b[land]`, then follow `b`;
    // shortcut at the first vertex of `a[..=cut]` already on that tail of `b`.
    let cross = |a: &[Vertex], ia: &[EdgeId], cut: usize, b: &[Vertex], ib: &[EdgeId], land: usize, via: EdgeId| {
        let tail = &b[land..];
        match (1..=cut).find(|&j| tail.contains(&a[j])) {
            None => {
                let verts = a[..=cut].iter().chain(tail).copied().collect::<Vec<_>>();
                let imgs = ia[..cut]
                    .iter()
                    .chain([&via])
                    .chain(&ib[land..])
                    .copied()
                    .collect::<Vec<_>>();
                (verts, imgs)
            }
            Some(x) => {
                let y = land + tail.iter().position(|&v| v == a[x]).expect("shared vertex");
                let verts = a[..=x].iter().chain(&b[y + 1..]).copied().collect::<Vec<_>>();
                let imgs = ia[..x].iter().chain(&ib[y..]).copied().collect::<Vec<_>>();
                (verts, imgs)
            }
        }
    };
    let (n1, m1) = cross(p2, i2, s2, p1, i1, t2, g2);
    let (n2, m2) = cross(p1, i1, s1, p2, i2, t1, g1);
    let next = QuasiHouse {
        paths: [n1, n2, w.paths[2].clone()],
        images: [m1, m2, w.images[2].clone()],
        house_image: w.house_image,
    };
    let step = Crossover {
        g1,
        g2,
        swapped,
        s1,
        t1,
        s2,
        t2,
        edges_before: w.edge_count(),
        edges_after: next.edge_count(),
    };
    Ok((next, step))
}

/// Turns an odd cycle of `H*` into an odd tree house of `G*`.
pub fn lift_odd_cycle(rp: &ReducedPair, k: &Witness, budget: Budget) -> Result<CycleLift> {
    if !matches!(k, WitnessOf::OddCycle { .. }) || !verify_witness(&rp.reduced, k) {
        return Err(Error::pre("odd-cycle lifting needs an odd cycle of H*"));
    }
    let host = &rp.core;
    let checker = ParityChecker::new(host)?;
    let g_star = rp.cycle.g_star;
    let is_proper = |e: &EdgeId| host.edge(*e).is_some_and(|x| x.len() >= 4);
    let k_star = shortest_odd_cycles(&rp.reduced, budget)?
        .into_iter()
        .filter_map(|w| match w {
            WitnessOf::OddCycle { vertices, edges } => Some(CycleWalk { vertices, edges }),
            _ => None,
        })
        .min_by_key(|c| {
            let mut es = c.edges.clone();
            es.sort_unstable();
            let mut vs = c.vertices.clone();
            vs.sort_unstable();
            (Reverse(c.edges.iter().filter(|e| is_proper(e)).count()), es, vs)
        })
        .ok_or_else(|| Error::internal("H* has an odd cycle", "shortest odd cycle search came back empty"))?;

    let qk = QuasiEmbedding::new(
        rp.reduced.induce(&k_star.selection())?,
        host,
        k_star.edges.iter().map(|&e| (e, rp.phi[&e])).collect(),
    );
    if qk.conflicts().host_edges() != [g_star] {
        return Err(Error::internal(
            "g* is the only conflict of K*",
            format!("{:?}", qk.conflicts()),
        ));
    }
    let q = k_star.len();
    let fi = k_star
        .edges
        .iter()
        .position(|&e| e == g_star)
        .expect("conflict edge lies on K*");
    let f_star = pair(k_star.vertices[fi], k_star.vertices[(fi + 1) % q]);

    let gs = host.edge(g_star).expect("g* is a host edge");
    let on_c: BTreeSet<Vertex> = rp.cycle.cycle.vertices.iter().copied().collect();
    let on_k: BTreeSet<Vertex> = k_star.vertices.iter().copied().collect();
    let shared: Vec<Vertex> = gs
        .verts
        .iter()
        .copied()
        .filter(|v| on_c.contains(v) && on_k.contains(v))
        .collect();
    let outside: Vec<Vertex> = gs
        .verts
        .iter()
        .copied()
        .filter(|v| !on_c.contains(v) && on_k.contains(v))
        .collect();
    if shared.len() != 1 || outside != f_star {
        return Err(Error::internal(
            "three-vertex conflict",
            format!("g* meets C* and K* in {shared:?}, K* alone in {outside:?}"),
        ));
    }
    let root = shared[0];

    // First path: C* without g*, which is its last edge.
    let (mut p1, mut i1) = (rp.cycle.cycle.vertices.clone(), rp.cycle.cycle.edges.clone());
    i1.pop();
    if p1[0] != root {
        p1.reverse();
        i1.reverse();
    }
    // K* without f*, split at the root.
    let seq: Vec<Vertex> = (0..q).map(|t| k_star.vertices[(fi + 1 + t) % q]).collect();
    let seq_edges: Vec<EdgeId> = (0..q - 1).map(|t| rp.phi[&k_star.edges[(fi + 1 + t) % q]]).collect();
    let at = seq.iter().position(|&v| v == root).expect("root lies on K*");
    let p2: Vec<Vertex> = seq[..=at].iter().rev().copied().collect();
    let i2: Vec<EdgeId> = seq_edges[..at].iter().rev().copied().collect();
    let mut w = QuasiHouse {
        paths: [p1, p2, seq[at..].to_vec()],
        images: [i1, i2, seq_edges[at..].to_vec()],
        house_image: g_star,
    };

    let mut crossovers = Vec::new();
    loop {
        let conflicts = check_candidate(&w, host)?;
        for i in 0..3 {
            let (root, leaf) = (w.root(), w.leaf(i));
            assert_parity(
                &checker,
                host,
                &[(&w.paths[i], &w.images[i])],
                "candidate paths are odd",
                |_| ParityClaim::Walk {
                    a: root,
                    b: leaf,
                    e: w.house_image,
                },
            )?;
        }
        if conflicts.is_empty() {
            break;
        }
        let (next, step) = crossover(&w, &conflicts, host)?;
        if step.edges_after >= step.edges_before {
            return Err(Error::internal("crossover shrinks the candidate", format!("{step:?}")));
        }
        crossovers.push(step);
        w = next;
    }
    let witness = WitnessOf::OddTreeHouse(w.canonical().into_tree_house());
    if !verify_witness(host, &witness) {
        return Err(Error::internal(
            "conflict-free candidate is an odd tree house",
            format!("{witness:?}"),
        ));
    }
    Ok(CycleLift {
        witness,
        k_star,
        root,
        crossovers,
    })
}

/// Where the innermost round found its odd cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    /// Among the size-2 edges of the core.
    ForestCycle,
    /// In the forest-shaped core.
    CoreCycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub depth: usize,
    pub input_support: usize,
    pub core: SubSelection,
    pub core_support: usize,
    pub forest_removals: Vec<CycleWalk>,
    /// Core after the forest removals.
    pub forest_core: Option<SubSelection>,
    pub nice_cycle: Option<NiceCycle>,
    pub reduced_support: Option<usize>,
    pub conflict_free: Option<bool>,
    pub terminal: Option<Terminal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lift", rename_all = "snake_case")]
pub enum LiftTrace {
    /// `H*` was a partial subhypergraph of `G*`.
    Direct {
        depth: usize,
    },
    TreeHouse {
        depth: usize,
        steps: Vec<HouseStep>,
    },
    OddCycle {
        depth: usize,
        k_star: CycleWalk,
        root: Vertex,
        crossovers: Vec<Crossover>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub rounds: Vec<RoundTrace>,
    /// Innermost round first.
    pub lifts: Vec<LiftTrace>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub witness: Witness,
    pub trace: Trace,
}

pub fn extract_witness(g: &Hypergraph) -> Result<Extraction> {
    extract_witness_with(g, ExtractOptions::default())
}

/// Reduces round by round until a core holds an odd cycle, then lifts that
/// cycle back to the input.
pub fn extract_witness_with(g: &Hypergraph, opts: ExtractOptions) -> Result<Extraction> {
    g.require_disjoint()?;
    let mut trace = Trace::default();
    let mut rounds: Vec<ReducedPair> = Vec::new();
    let mut current = g.clone();
    let mut witness = loop {
        let depth = rounds.len();
        let core = match find_eulerian_core_with(&current, opts.limits) {
            Err(e) if depth > 0 => return Err(lost_non_unimodularity(e)),
            r => r?,
        };
        let mut round = RoundTrace {
            depth,
            input_support: current.support_size(),
            core: core.selection.clone(),
            core_support: core.support(),
            forest_removals: Vec::new(),
            forest_core: None,
            nice_cycle: None,
            reduced_support: None,
            conflict_free: None,
            terminal: None,
        };
        let core = match enforce_forest(core, opts.limits)? {
            Forested::OddCycle(w) => {
                round.terminal = Some(Terminal::ForestCycle);
                trace.rounds.push(round);
                break w;
            }
            Forested::Forest { core, removed } => {
                round.forest_removals = removed;
                round.forest_core = Some(core.selection.clone());
                core
            }
        };
        if let Some(w) = find_odd_cycle_with(&core.hypergraph, opts.budget)? {
            round.terminal = Some(Terminal::CoreCycle);
            trace.rounds.push(round);
            break w;
        }
        let nc = almost_nice_cycle(&core)?;
        let rp = reduce_by_cycle(&core, &nc)?;
        round.nice_cycle = Some(nc);
        round.reduced_support = Some(rp.reduced.support_size());
        round.conflict_free = Some(rp.is_partial());
        trace.rounds.push(round);
        current = rp.reduced.clone();
        rounds.push(rp);
    };

    // Each lift turns a witness of `H*` into one of `G*`, which is also a
    // witness of that round's input.
    for (depth, rp) in rounds.iter().enumerate().rev() {
        if rp.is_partial() {
            trace.lifts.push(LiftTrace::Direct { depth });
            continue;
        }
        match witness {
            WitnessOf::OddTreeHouse(_) => {
                let lift = lift_tree_house(rp, &witness)?;
                witness = lift.witness;
                trace.lifts.push(LiftTrace::TreeHouse {
                    depth,
                    steps: lift.steps,
                });
            }
            WitnessOf::OddCycle { .. } => {
                let lift = lift_odd_cycle(rp, &witness, opts.budget)?;
                witness = lift.witness;
                trace.lifts.push(LiftTrace::OddCycle {
                    depth,
                    k_star: lift.k_star,
                    root: lift.root,
                    crossovers: lift.crossovers,
                });
            }
            _ => return Err(Error::internal("extraction stays unsigned", "mixed witness in a round")),
        }
    }
    if !verify_witness(g, &witness) {
        return Err(Error::internal(
            "extracted witness embeds in the input",
            format!("{witness:?}"),
        ));
    }
    Ok(Extraction { witness, trace })
}
