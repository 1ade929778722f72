//! Complete backtracking searches for odd cycles and odd tree houses as
//! partial subhypergraphs.
//!
//! Both searches grow a vertex set `U` and a list of committed edges whose
//! intersections with `U` are already fixed. A vertex may join `U` only if no
//! committed edge contains it, which keeps every committed intersection exact.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::witness::{TreeHouseOf, Witness, WitnessOf};
use crate::error::{Error, Result};
use crate::hypergraph::{verts_of, EdgeId, Hypergraph, Vertex};

/// Node-expansion limit for one search call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: u64,
}

impl Budget {
    pub const DEFAULT_MAX_NODES: u64 = 50_000_000;
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: Self::DEFAULT_MAX_NODES,
        }
    }
}

struct Meter {
    used: u64,
    limit: u64,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter {
            used: 0,
            limit: budget.max_nodes,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded { limit: self.limit });
        }
        Ok(())
    }
}

/// Edges ordered by id, with per-vertex incidence lists.
struct Index {
    ids: Vec<EdgeId>,
    masks: Vec<u64>,
    incident: Vec<Vec<usize>>,
    vertex_mask: u64,
}

impl Index {
    fn new(g: &Hypergraph) -> Result<Self> {
        g.require_mask_universe()?;
        let mut order: Vec<usize> = (0..g.m()).collect();
        order.sort_by_key(|&i| g.edges()[i].id);
        let ids: Vec<EdgeId> = order.iter().map(|&i| g.edges()[i].id).collect();
        let masks: Vec<u64> = order.iter().map(|&i| g.edges()[i].mask()).collect();
        let mut incident = vec![Vec::new(); g.universe()];
        for (p, &m) in masks.iter().enumerate() {
            for v in verts_of(m) {
                incident[v].push(p);
            }
        }
        Ok(Index {
            ids,
            masks,
            incident,
            vertex_mask: g.vertex_mask(),
        })
    }
}

fn bit(v: Vertex) -> u64 {
    1u64 << v
}

struct CycleSearch<'a> {
    idx: &'a Index,
    k: usize,
    seq: Vec<Vertex>,
    edges: Vec<usize>,
    used: Vec<bool>,
    meter: &'a mut Meter,
}

impl CycleSearch<'_> {
    /// Extends `seq` (last vertex `x`), calling `found` on complete cycles.
    /// Returns `true` once `found` asks to stop.
    fn extend(
        &mut self,
        umask: u64,
        forbidden: u64,
        found: &mut dyn FnMut(&[Vertex], &[usize]) -> bool,
    ) -> Result<bool> {
        let i = self.seq.len();
        let x = self.seq[i - 1];
        let v1 = self.seq[0];
        let idx = self.idx;
        if i == self.k {
            for &p in &idx.incident[x] {
                if !self.used[p] && idx.masks[p] & umask == bit(x) | bit(v1) {
                    self.meter.tick()?;
                    self.edges.push(p);
                    let stop = found(&self.seq, &self.edges);
                    self.edges.pop();
                    if stop {
                        return Ok(true);
                    }
                }
            }
            return Ok(false);
        }
        let above_v1 = idx.vertex_mask & !(bit(v1).wrapping_shl(1).wrapping_sub(1));
        let avail = above_v1 & !umask & !forbidden;
        if (avail.count_ones() as usize) < self.k - i {
            return Ok(false);
        }
        for &p in &idx.incident[x] {
            if self.used[p] || idx.masks[p] & umask != bit(x) {
                continue;
            }
            self.meter.tick()?;
            self.used[p] = true;
            self.edges.push(p);
            let mut next = idx.masks[p] & avail;
            while next != 0 {
                let y = next.trailing_zeros() as usize;
                next &= next - 1;
                self.seq.push(y);
                let stop = self.extend(umask | bit(y), forbidden | idx.masks[p], found)?;
                self.seq.pop();
                if stop {
                    self.used[p] = false;
                    self.edges.pop();
                    return Ok(true);
                }
            }
            self.edges.pop();
            self.used[p] = false;
        }
        Ok(false)
    }
}

/// Runs the cycle search for exact length `k`, `v1` being the least vertex.
fn cycles_of_length(
    idx: &Index,
    k: usize,
    meter: &mut Meter,
    found: &mut dyn FnMut(&[Vertex], &[usize]) -> bool,
) -> Result<bool> {
    for v1 in verts_of(idx.vertex_mask) {
        let mut s = CycleSearch {
            idx,
            k,
            seq: vec![v1],
            edges: Vec::new(),
            used: vec![false; idx.ids.len()],
            meter: &mut *meter,
        };
        if s.extend(bit(v1), 0, found)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn cycle_witness(idx: &Index, seq: &[Vertex], edges: &[usize]) -> Witness {
    WitnessOf::OddCycle {
        vertices: seq.to_vec(),
        edges: edges.iter().map(|&p| idx.ids[p]).collect(),
    }
}

pub fn find_odd_cycle(g: &Hypergraph) -> Result<Option<Witness>> {
    find_odd_cycle_with(g, Budget::default())
}

/// A shortest odd cycle, least in (length, vertex sequence, edge ids) search order.
pub fn find_odd_cycle_with(g: &Hypergraph, budget: Budget) -> Result<Option<Witness>> {
    let idx = Index::new(g)?;
    let mut meter = Meter::new(budget);
    let max_len = g.n().min(g.m());
    for k in (3..=max_len).step_by(2) {
        let mut out = None;
        cycles_of_length(&idx, k, &mut meter, &mut |seq, edges| {
            out = Some(cycle_witness(&idx, seq, edges));
            true
        })?;
        if out.is_some() {
            return Ok(out);
        }
    }
    Ok(None)
}

/// Every odd cycle of minimum length, once per `(U, F)`, in discovery order.
pub fn shortest_odd_cycles(g: &Hypergraph, budget: Budget) -> Result<Vec<Witness>> {
    let idx = Index::new(g)?;
    let mut meter = Meter::new(budget);
    let max_len = g.n().min(g.m());
    for k in (3..=max_len).step_by(2) {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        cycles_of_length(&idx, k, &mut meter, &mut |seq, edges| {
            let mut u = seq.to_vec();
            u.sort_unstable();
            let mut f: Vec<EdgeId> = edges.iter().map(|&p| idx.ids[p]).collect();
            f.sort_unstable();
            if seen.insert((u, f)) {
                out.push(cycle_witness(&idx, seq, edges));
            }
            false
        })?;
        if !out.is_empty() {
            return Ok(out);
        }
    }
    Ok(Vec::new())
}

struct HouseSearch<'a> {
    idx: &'a Index,
    root: Vertex,
    leaves: [Vertex; 3],
    paths: [Vec<Vertex>; 3],
    path_edges: [Vec<usize>; 3],
    used: Vec<bool>,
    meter: &'a mut Meter,
}

impl HouseSearch<'_> {
    /// Grows path `i` from its last vertex; on completion moves to path `i + 1`.
    fn grow(&mut self, i: usize, umask: u64, forbidden: u64) -> Result<bool> {
        let idx = self.idx;
        let x = *self.paths[i].last().expect("paths start at the root");
        let target = self.leaves[i];
        let len = self.path_edges[i].len();
        for &p in &idx.incident[x] {
            if self.used[p] {
                continue;
            }
            let meet = idx.masks[p] & umask;
            if meet == bit(x) | bit(target) {
                if len % 2 == 1 {
                    // Closing would give an even path.
                    continue;
                }
                self.meter.tick()?;
                self.used[p] = true;
                self.path_edges[i].push(p);
                self.paths[i].push(target);
                let done = i == 2 || {
                    self.paths[i + 1] = vec![self.root];
                    self.grow(i + 1, umask, forbidden | idx.masks[p])?
                };
                if done {
                    return Ok(true);
                }
                self.paths[i].pop();
                self.path_edges[i].pop();
                self.used[p] = false;
            } else if meet == bit(x) {
                self.meter.tick()?;
                self.used[p] = true;
                self.path_edges[i].push(p);
                let mut next = idx.masks[p] & idx.vertex_mask & !umask & !forbidden;
                while next != 0 {
                    let y = next.trailing_zeros() as usize;
                    next &= next - 1;
                    self.paths[i].push(y);
                    if self.grow(i, umask | bit(y), forbidden | idx.masks[p])? {
                        return Ok(true);
                    }
                    self.paths[i].pop();
                }
                self.path_edges[i].pop();
                self.used[p] = false;
            }
        }
        Ok(false)
    }
}

pub fn find_odd_tree_house(g: &Hypergraph) -> Result<Option<Witness>> {
    find_odd_tree_house_with(g, Budget::default())
}

/// First odd tree house in order of house edge id, corner set, root, then paths.
pub fn find_odd_tree_house_with(g: &Hypergraph, budget: Budget) -> Result<Option<Witness>> {
    let idx = Index::new(g)?;
    let mut meter = Meter::new(budget);
    for (hp, &hmask) in idx.masks.iter().enumerate() {
        if hmask.count_ones() < 4 {
            continue;
        }
        let hv = verts_of(hmask);
        for corners in four_subsets(&hv) {
            for &root in &corners {
                let mut leaves = [0; 3];
                for (slot, &v) in leaves.iter_mut().zip(corners.iter().filter(|&&v| v != root)) {
                    *slot = v;
                }
                let mut used = vec![false; idx.ids.len()];
                used[hp] = true;
                let mut s = HouseSearch {
                    idx: &idx,
                    root,
                    leaves,
                    paths: [vec![root], Vec::new(), Vec::new()],
                    path_edges: [Vec::new(), Vec::new(), Vec::new()],
                    used,
                    meter: &mut meter,
                };
                let umask = corners.iter().fold(0, |m, &v| m | bit(v));
                if s.grow(0, umask, hmask)? {
                    let edge_ids = |ps: &Vec<usize>| ps.iter().map(|&p| idx.ids[p]).collect::<Vec<_>>();
                    return Ok(Some(WitnessOf::OddTreeHouse(TreeHouseOf {
                        root,
                        leaves,
                        paths: s.paths.clone(),
                        path_edges: [
                            edge_ids(&s.path_edges[0]),
                            edge_ids(&s.path_edges[1]),
                            edge_ids(&s.path_edges[2]),
                        ],
                        house_edge: idx.ids[hp],
                    })));
                }
            }
        }
    }
    Ok(None)
}

fn four_subsets(v: &[Vertex]) -> Vec<[Vertex; 4]> {
    let n = v.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    out.push([v[a], v[b], v[c], v[d]]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::verify_witness;
    use crate::fixtures;

    #[test]
    fn c3_has_a_triangle() {
        let w = find_odd_cycle(&fixtures::c3()).unwrap().unwrap();
        assert_eq!(w.edge_count(), 3);
        assert!(verify_witness(&fixtures::c3(), &w));
    }

    #[test]
    fn fig1_and_fig2_have_no_odd_cycle() {
        assert!(find_odd_cycle(&fixtures::fig1()).unwrap().is_none());
        assert!(find_odd_cycle(&fixtures::fig2()).unwrap().is_none());
        assert!(find_odd_tree_house(&fixtures::fig2()).unwrap().is_none());
    }

    #[test]
    fn fig1_tree_house_has_unit_paths() {
        let g = fixtures::fig1();
        let w = find_odd_tree_house(&g).unwrap().unwrap();
        assert!(verify_witness(&g, &w));
        let WitnessOf::OddTreeHouse(t) = w else { panic!() };
        assert_eq!(t.root, 0);
        assert!(t.path_edges.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn hyperedge_pieces_close_short_cycles() {
        // Pentagon plus a hyperedge on three pentagon vertices: {0, 1, 2} and
        // {0, 3, 4} each meet the hyperedge in two vertices.
        let g = Hypergraph::unnamed(
            5,
            vec![
                vec![0, 1],
                vec![1, 2],
                vec![2, 3],
                vec![3, 4],
                vec![4, 0],
                vec![0, 2, 3],
            ],
        )
        .unwrap();
        let w = find_odd_cycle(&g).unwrap().unwrap();
        assert!(verify_witness(&g, &w));
        assert_eq!(w.edge_count(), 3);
        assert_eq!(shortest_odd_cycles(&g, Budget::default()).unwrap().len(), 2);
    }

    #[test]
    fn shortest_cycles_are_deduplicated() {
        let g = Hypergraph::unnamed(4, vec![vec![0, 1], vec![1, 2], vec![2, 0], vec![2, 3], vec![3, 0]]).unwrap();
        let all = shortest_odd_cycles(&g, Budget::default()).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|w| verify_witness(&g, w)));
    }

    #[test]
    fn budget_is_enforced() {
        let err = find_odd_cycle_with(&fixtures::c3(), Budget { max_nodes: 1 }).unwrap_err();
        assert!(err.is_limit());
    }
}
