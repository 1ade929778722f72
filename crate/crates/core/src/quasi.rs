//! Quasi-subhypergraphs `(H, Φ)`: `H` is embedded into a host by a map `Φ` from
//! its edges to host edges with `f ⊆ Φ(f)` (Q1) and pairwise disjoint fibres (Q2).
//!
//! A host edge `e` is a *conflict* when some `f ∈ Φ⁻¹(e)` is a proper subset of
//! `e ∩ V(H)`. Conflict-free embeddings are exactly partial subhypergraphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::detect::{self, Budget};
use crate::error::{Error, Result};
use crate::hypergraph::{Edge, EdgeId, Hypergraph, SubSelection, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiEmbedding<'h> {
    pub sub: Hypergraph,
    pub host: &'h Hypergraph,
    /// Sub edge id to host edge id.
    pub phi: BTreeMap<EdgeId, EdgeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub host_edge: EdgeId,
    /// Lowest-id sub edge `f` with `Φ(f) = host_edge` and `f ⊊ host_edge ∩ V(H)`.
    pub witness: EdgeId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictReport {
    /// Ascending by host edge id.
    pub conflicts: Vec<Conflict>,
}

impl ConflictReport {
    pub fn is_empty(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.conflicts.len()
    }

    pub fn host_edges(&self) -> Vec<EdgeId> {
        self.conflicts.iter().map(|c| c.host_edge).collect()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.conflicts.iter().any(|c| c.host_edge == e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Hypotheses of the closed-walk parity lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParityClaim {
    /// `H` is an `a`-`b` walk and `e ∩ V(H) = {a, b}`; forces `|E(H)|` odd.
    Walk { a: Vertex, b: Vertex, e: EdgeId },
    /// `H` is the edge-disjoint union of an `a`-`b` walk on `p` and a `c`-`d` walk
    /// on `q`, with `e ∩ V(H) = {a, c}` and `f ∩ V(H) = {b, d}`; forces `|E(H)|` even.
    TwoWalks {
        ends: [Vertex; 4],
        p: Vec<EdgeId>,
        q: Vec<EdgeId>,
        e: EdgeId,
        f: EdgeId,
    },
}

impl<'h> QuasiEmbedding<'h> {
    pub fn new(sub: Hypergraph, host: &'h Hypergraph, phi: BTreeMap<EdgeId, EdgeId>) -> Self {
        QuasiEmbedding { sub, host, phi }
    }

    /// `host[U, F]` embedded by inclusion.
    pub fn inclusion(host: &'h Hypergraph, sel: &SubSelection) -> Result<Self> {
        let sub = host.induce(sel)?;
        let phi = sub.edges().iter().map(|f| (f.id, f.id)).collect();
        Ok(QuasiEmbedding { sub, host, phi })
    }

    pub fn image(&self, f: EdgeId) -> Option<&Edge> {
        self.phi.get(&f).and_then(|&e| self.host.edge(e))
    }

    /// `Φ⁻¹` as a multimap, fibres ascending by sub edge id.
    pub fn preimage(&self) -> BTreeMap<EdgeId, Vec<EdgeId>> {
        let mut out: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
        for f in self.sub.edges() {
            if let Some(&e) = self.phi.get(&f.id) {
                out.entry(e).or_default().push(f.id);
            }
        }
        out
    }

    /// Q1 and Q2, plus well-formedness of the map.
    pub fn verify_quasi(&self) -> bool {
        if self.sub.universe() != self.host.universe()
            || !self.sub.vertices().iter().all(|&v| self.host.contains_vertex(v))
            || self.phi.len() != self.sub.m()
        {
            return false;
        }
        for f in self.sub.edges() {
            let Some(e) = self.image(f.id) else {
                return false;
            };
            if !f.verts.iter().all(|&v| e.contains(v)) {
                return false;
            }
        }
        self.preimage().values().all(|fibre| {
            let mut seen = BTreeSet::new();
            fibre
                .iter()
                .flat_map(|&f| self.sub.edge(f).expect("fibre member").verts.iter())
                .all(|&v| seen.insert(v))
        })
    }

    pub fn conflicts(&self) -> ConflictReport {
        let conflicts = self
            .preimage()
            .into_iter()
            .filter_map(|(e, fibre)| {
                let e_edge = self.host.edge(e)?;
                let inside = e_edge.verts.iter().filter(|&&v| self.sub.contains_vertex(v)).count();
                fibre
                    .iter()
                    .copied()
                    .find(|&f| self.sub.edge(f).expect("fibre member").len() < inside)
                    .map(|witness| Conflict { host_edge: e, witness })
            })
            .collect();
        ConflictReport { conflicts }
    }

    pub fn is_partial(&self) -> bool {
        self.conflicts().is_empty()
    }

    /// `(H[U, F], Φ↾)`: each surviving `f ∩ U` keeps `f`'s id and image.
    pub fn restrict(&self, sel: &SubSelection) -> Result<QuasiEmbedding<'h>> {
        let sub = self.sub.induce(sel)?;
        let phi = sub.edges().iter().map(|f| (f.id, self.phi[&f.id])).collect();
        Ok(QuasiEmbedding {
            sub,
            host: self.host,
            phi,
        })
    }

    /// `(H ⊕ e, Φ ⊕ e)`; the new sub edge gets id one above the current maximum.
    pub fn add_edge(&self, e: EdgeId) -> Result<QuasiEmbedding<'h>> {
        let host_edge = self
            .host
            .edge(e)
            .ok_or_else(|| Error::pre(format!("add_edge: host has no edge {e}")))?;
        if self.phi.values().any(|&x| x == e) {
            return Err(Error::pre(format!(
                "add_edge: edge {e} is already in the image of the map"
            )));
        }
        let verts: Vec<Vertex> = host_edge
            .verts
            .iter()
            .copied()
            .filter(|&v| self.sub.contains_vertex(v))
            .collect();
        if verts.is_empty() {
            return Err(Error::pre(format!("add_edge: edge {e} misses the sub vertex set")));
        }
        let id = self.sub.max_edge_id().map_or(0, |m| m + 1);
        let mut edges = self.sub.edges().to_vec();
        edges.push(Edge { id, verts });
        let sub = self.sub.derive(self.sub.vertices().to_vec(), edges)?;
        let mut phi = self.phi.clone();
        phi.insert(id, e);
        Ok(QuasiEmbedding {
            sub,
            host: self.host,
            phi,
        })
    }

    /// Checks the parity lemma's hypotheses and conclusion for this embedding.
    pub fn walk_parity_closed(&self, claim: &ParityClaim) -> Result<Parity> {
        ParityChecker::new(self.host)?.check(self, claim)
    }
}

/// Parity-lemma checker that tests the host for odd cycles once.
pub struct ParityChecker<'h> {
    host: &'h Hypergraph,
}

impl<'h> ParityChecker<'h> {
    pub fn new(host: &'h Hypergraph) -> Result<Self> {
        if detect::find_odd_cycle_with(host, Budget::default())?.is_some() {
            return Err(Error::pre("parity lemma: host contains an odd cycle"));
        }
        Ok(ParityChecker { host })
    }

    /// Returns the parity the lemma forces, after confirming the hypotheses and
    /// that `|E(H)|` actually has that parity.
    pub fn check(&self, q: &QuasiEmbedding<'_>, claim: &ParityClaim) -> Result<Parity> {
        let fail = |clause: &str| Err(Error::pre(format!("parity lemma: {clause}")));
        if !std::ptr::eq(q.host, self.host) && q.host != self.host {
            return fail("embedding targets a different host");
        }
        if !q.verify_quasi() || !q.is_partial() {
            return fail("embedding is not a partial subhypergraph");
        }
        if !q.sub.is_graph() {
            return fail("walk has an edge that is not of size 2");
        }
        let outside = |e: EdgeId, want: &[Vertex]| -> bool {
            let Some(edge) = self.host.edge(e) else {
                return false;
            };
            if q.phi.values().any(|&x| x == e) {
                return false;
            }
            let mut meet: Vec<Vertex> = edge
                .verts
                .iter()
                .copied()
                .filter(|&v| q.sub.contains_vertex(v))
                .collect();
            meet.sort_unstable();
            let mut want = want.to_vec();
            want.sort_unstable();
            meet == want
        };
        let all: Vec<EdgeId> = q.sub.edge_ids();
        let (forced, m) = match claim {
            ParityClaim::Walk { a, b, e } => {
                if a == b {
                    return fail("walk endpoints coincide");
                }
                if !is_walk(&q.sub, &all, *a, *b) || covered(&q.sub, &all) != q.sub.vertices() {
                    return fail("sub is not an a-b walk");
                }
                if !outside(*e, &[*a, *b]) {
                    return fail("closing edge does not meet the walk in exactly {a, b}");
                }
                (Parity::Odd, all.len())
            }
            ParityClaim::TwoWalks { ends, p, q: qe, e, f } => {
                let [a, b, c, d] = *ends;
                if ends.iter().collect::<BTreeSet<_>>().len() != 4 {
                    return fail("walk endpoints are not distinct");
                }
                let mut union: Vec<EdgeId> = p.iter().chain(qe.iter()).copied().collect();
                union.sort_unstable();
                let before = union.len();
                union.dedup();
                if union.len() != before || union != all {
                    return fail("walks do not partition the edges");
                }
                if !is_walk(&q.sub, p, a, b) || !is_walk(&q.sub, qe, c, d) {
                    return fail("a part is not a walk between its ends");
                }
                if covered(&q.sub, &all) != q.sub.vertices() {
                    return fail("sub has vertices off both walks");
                }
                if !outside(*e, &[a, c]) || !outside(*f, &[b, d]) {
                    return fail("closing edges do not meet the walks in {a, c} and {b, d}");
                }
                (Parity::Even, all.len())
            }
        };
        if Parity::of(m) != forced {
            return Err(Error::internal(
                "closed-walk parity",
                format!("lemma forces {forced:?} but the walk has {m} edges"),
            ));
        }
        Ok(forced)
    }
}

fn covered(g: &Hypergraph, edges: &[EdgeId]) -> Vec<Vertex> {
    let set: BTreeSet<Vertex> = edges
        .iter()
        .filter_map(|&id| g.edge(id))
        .flat_map(|e| e.verts.iter().copied())
        .collect();
    set.into_iter().collect()
}

/// Whether `edges` (all of size 2) form an `a`-`b` trail: connected, with odd
/// degree exactly at `a` and `b`.
fn is_walk(g: &Hypergraph, edges: &[EdgeId], a: Vertex, b: Vertex) -> bool {
    if edges.is_empty() {
        return false;
    }
    let mut deg: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &id in edges {
        let Some(e) = g.edge(id) else {
            return false;
        };
        if e.len() != 2 {
            return false;
        }
        let (x, y) = (e.verts[0], e.verts[1]);
        *deg.entry(x).or_default() += 1;
        *deg.entry(y).or_default() += 1;
        adj.entry(x).or_default().push(y);
        adj.entry(y).or_default().push(x);
    }
    let odd: Vec<Vertex> = deg.iter().filter(|(_, &d)| d % 2 == 1).map(|(&v, _)| v).collect();
    let mut ends = vec![a, b];
    ends.sort_unstable();
    if odd != ends {
        return false;
    }
    let mut seen = BTreeSet::from([a]);
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        for &y in &adj[&x] {
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen.len() == deg.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Five-cycle into a host where one cycle edge is a triangle hyperedge.
    fn fig3_left() -> (Hypergraph, Hypergraph, BTreeMap<EdgeId, EdgeId>) {
        let names = ["u0", "u1", "u2", "u3", "u4"].map(String::from).to_vec();
        let host = Hypergraph::new(
            names,
            vec![vec![2, 1], vec![1, 0], vec![0, 4], vec![4, 3], vec![0, 2, 3]],
        )
        .unwrap();
        let sub = host
            .derive(
                (0..5).collect(),
                vec![
                    Edge {
                        id: 0,
                        verts: vec![1, 2],
                    },
                    Edge {
                        id: 1,
                        verts: vec![0, 1],
                    },
                    Edge {
                        id: 2,
                        verts: vec![0, 4],
                    },
                    Edge {
                        id: 3,
                        verts: vec![3, 4],
                    },
                    Edge {
                        id: 4,
                        verts: vec![2, 3],
                    },
                ],
            )
            .unwrap();
        (host, sub, (0..5).map(|i| (i, i)).collect())
    }

    /// Six-cycle where two cycle edges are pieces of one size-4 hyperedge.
    fn fig3_right() -> (Hypergraph, Hypergraph, BTreeMap<EdgeId, EdgeId>) {
        let names = ["v0", "v1", "v2", "v3", "v4", "v5"].map(String::from).to_vec();
        let host = Hypergraph::new(
            names,
            vec![vec![0, 1], vec![1, 2], vec![3, 4], vec![4, 5], vec![0, 5, 2, 3]],
        )
        .unwrap();
        let mut edges: Vec<Edge> = host.edges()[..4].to_vec();
        edges.push(Edge {
            id: 4,
            verts: vec![2, 3],
        });
        edges.push(Edge {
            id: 5,
            verts: vec![0, 5],
        });
        let sub = host.derive((0..6).collect(), edges).unwrap();
        let phi = [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 4)].into_iter().collect();
        (host, sub, phi)
    }

    #[test]
    fn figure_three_embeddings() {
        let (host, sub, phi) = fig3_left();
        let q = QuasiEmbedding::new(sub, &host, phi);
        assert!(q.verify_quasi());
        let report = q.conflicts();
        assert_eq!(report.host_edges(), vec![4]);
        assert_eq!(report.conflicts[0].witness, 4);
        assert!(!q.is_partial());

        let (host, sub, phi) = fig3_right();
        let q = QuasiEmbedding::new(sub, &host, phi);
        assert!(q.verify_quasi());
        // Splitting one hyperedge into two pieces is a conflict.
        assert!(!q.is_partial());
        assert_eq!(q.conflicts().host_edges(), vec![4]);
    }

    #[test]
    fn overlapping_fibre_breaks_q2() {
        let (host, _, _) = fig3_right();
        let mut edges: Vec<Edge> = host.edges()[..4].to_vec();
        edges.push(Edge {
            id: 4,
            verts: vec![2, 3],
        });
        edges.push(Edge {
            id: 5,
            verts: vec![0, 3],
        });
        let sub = host.derive((0..6).collect(), edges).unwrap();
        let phi = [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 4)].into_iter().collect();
        assert!(!QuasiEmbedding::new(sub, &host, phi).verify_quasi());
    }

    #[test]
    fn dangling_ids_rejected() {
        let (host, sub, mut phi) = fig3_left();
        phi.insert(0, 99);
        assert!(!QuasiEmbedding::new(sub.clone(), &host, phi).verify_quasi());
        let (_, _, mut phi) = fig3_left();
        phi.remove(&3);
        assert!(!QuasiEmbedding::new(sub, &host, phi).verify_quasi());
    }

    #[test]
    fn inclusion_is_conflict_free_and_restrict_identity() {
        let (host, _, _) = fig3_left();
        let sel = SubSelection::new(vec![0, 2, 3, 4], vec![2, 3, 4]);
        let q = QuasiEmbedding::inclusion(&host, &sel).unwrap();
        assert!(q.verify_quasi() && q.is_partial());
        let full = SubSelection::new(q.sub.vertices().to_vec(), q.sub.edge_ids());
        assert_eq!(q.restrict(&full).unwrap(), q);
    }

    #[test]
    fn restriction_shrinks_conflicts() {
        let (host, sub, phi) = fig3_left();
        let q = QuasiEmbedding::new(sub, &host, phi);
        let r = q
            .restrict(&SubSelection::new(vec![1, 2, 3, 4], (0..5).collect()))
            .unwrap();
        assert!(r.verify_quasi());
        assert!(r.conflicts().host_edges().iter().all(|e| q.conflicts().contains(*e)));
        // Avoiding the conflicting fibre leaves a partial subhypergraph.
        let r = q
            .restrict(&SubSelection::new((0..5).collect(), vec![0, 1, 2, 3]))
            .unwrap();
        assert!(r.is_partial());
    }

    #[test]
    fn add_edge_preconditions_and_conflicts() {
        let (host, sub, phi) = fig3_left();
        let q = QuasiEmbedding::new(sub, &host, phi);
        let err = q.add_edge(4).unwrap_err().to_string();
        assert!(err.contains("already in the image"), "{err}");
        assert!(q.add_edge(17).unwrap_err().to_string().contains("no edge"));

        let path = q.restrict(&SubSelection::new(vec![0, 1, 2, 4], vec![0, 1, 2])).unwrap();
        assert!(path.add_edge(3).is_ok());
        let lone = QuasiEmbedding::inclusion(&host, &SubSelection::new(vec![1, 2], vec![0])).unwrap();
        assert!(lone.add_edge(3).unwrap_err().to_string().contains("misses"));

        let grown = path.add_edge(3).unwrap();
        assert!(grown.verify_quasi());
        assert_eq!(grown.conflicts(), path.conflicts());
        assert_eq!(grown.sub.m(), path.sub.m() + 1);
    }

    #[test]
    fn parity_lemma_on_even_cycle() {
        let host = Hypergraph::unnamed(4, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap();
        let walk = QuasiEmbedding::inclusion(&host, &SubSelection::new(vec![0, 1, 2, 3], vec![0, 1, 2])).unwrap();
        let claim = ParityClaim::Walk { a: 0, b: 3, e: 3 };
        assert_eq!(walk.walk_parity_closed(&claim).unwrap(), Parity::Odd);

        let two = QuasiEmbedding::inclusion(&host, &SubSelection::new(vec![0, 1, 2, 3], vec![0, 2])).unwrap();
        let claim = ParityClaim::TwoWalks {
            ends: [0, 1, 3, 2],
            p: vec![0],
            q: vec![2],
            e: 3,
            f: 1,
        };
        assert_eq!(two.walk_parity_closed(&claim).unwrap(), Parity::Even);

        let bad = ParityClaim::Walk { a: 0, b: 2, e: 3 };
        assert!(walk.walk_parity_closed(&bad).is_err());
    }

    #[test]
    fn parity_lemma_rejects_odd_host() {
        let host = Hypergraph::unnamed(3, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        let walk = QuasiEmbedding::inclusion(&host, &SubSelection::new(vec![0, 1, 2], vec![0, 1])).unwrap();
        let err = walk
            .walk_parity_closed(&ParityClaim::Walk { a: 0, b: 2, e: 2 })
            .unwrap_err();
        assert!(err.to_string().contains("odd cycle"));
    }
}
