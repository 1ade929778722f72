//! Enumeration of Eulerian partial subhypergraphs and the two Camion tests.
//!
//! For a vertex set `U`, an edge can appear in an Eulerian `G[U, F]` only if it
//! meets `U` in an even, nonzero number of vertices. Edge subsets of those
//! candidates are walked depth-first, highest candidate decided first and
//! exclusion tried first, so edge masks come out in increasing numeric order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, Hypergraph, MixedHypergraph, SubSelection, Vertex};
use crate::linalg::Limits;
use crate::par::{self, Exec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CamionWitness {
    pub selection: SubSelection,
    /// Nonzero count of the selected submatrix.
    pub support: usize,
    /// Sum of the selected submatrix entries.
    pub entry_sum: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CamionResult {
    pub unimodular: bool,
    pub witness: Option<CamionWitness>,
}

/// Columns restricted to local vertex positions `0..n`.
struct SignedColumns {
    pub verts: Vec<Vertex>,
    /// `(edge id, plus mask, minus mask)` in column order.
    pub cols: Vec<(EdgeId, u64, u64)>,
}

impl SignedColumns {
    pub fn from_mixed(d: &MixedHypergraph) -> Self {
        let pos = |v: Vertex| d.row_of(v).expect("arc inside vertex set");
        let mask = |vs: &[Vertex]| vs.iter().fold(0u64, |m, &v| m | 1u64 << pos(v));
        SignedColumns {
            verts: d.vertices().to_vec(),
            cols: d.arcs().iter().map(|a| (a.id, mask(&a.plus), mask(&a.minus))).collect(),
        }
    }

    pub fn from_plain(g: &Hypergraph) -> Self {
        Self::from_mixed(&MixedHypergraph::from_hypergraph(g))
    }

    fn check(&self, limits: Limits) -> Result<()> {
        let sum = self.verts.len() + self.cols.len();
        if sum > limits.max_dim_sum {
            return Err(Error::GuardExceeded {
                what: "rows + cols",
                actual: sum,
                limit: limits.max_dim_sum,
            });
        }
        Ok(())
    }

    pub fn selection(&self, u: u64, f: u64) -> SubSelection {
        SubSelection::new(
            (0..self.verts.len())
                .filter(|i| u >> i & 1 == 1)
                .map(|i| self.verts[i])
                .collect(),
            (0..self.cols.len())
                .filter(|j| f >> j & 1 == 1)
                .map(|j| self.cols[j].0)
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct EulerFilter {
    /// Require `|F| = |U|`.
    pub square: bool,
    /// Require every vertex of `U` to meet some selected edge.
    pub covering: bool,
}

/// An Eulerian selection inside a fixed `U`.
#[derive(Clone, Copy, Debug)]
struct EulerHit {
    pub f: u64,
    pub support: usize,
    pub sum: i64,
}

/// Calls `visit` on every Eulerian `G[U, F]` for this `U` in increasing `F` order;
/// `visit` returns `true` to stop. Returns whether it stopped.
fn eulerian_in<F>(sc: &SignedColumns, u: u64, filter: EulerFilter, visit: &mut F) -> bool
where
    F: FnMut(EulerHit) -> bool,
{
    struct Cand {
        col: usize,
        support: u64,
        size: usize,
        sum: i64,
    }
    let cands: Vec<Cand> = sc
        .cols
        .iter()
        .enumerate()
        .filter_map(|(j, &(_, p, m))| {
            let (p, m) = (p & u, m & u);
            let size = (p | m).count_ones() as usize;
            (size >= 2 && size.is_multiple_of(2)).then(|| Cand {
                col: j,
                support: p | m,
                size,
                sum: p.count_ones() as i64 - m.count_ones() as i64,
            })
        })
        .collect();
    let target = u.count_ones() as usize;

    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(EulerHit) -> bool>(
        cands: &[Cand],
        i: usize,
        parity: u64,
        cover: u64,
        count: usize,
        hit: EulerHit,
        u: u64,
        target: usize,
        filter: EulerFilter,
        visit: &mut F,
    ) -> bool {
        if filter.square && (count > target || count + i < target) {
            return false;
        }
        if i == 0 {
            let ok =
                hit.f != 0 && parity == 0 && (!filter.square || count == target) && (!filter.covering || cover == u);
            return ok && visit(hit);
        }
        let c = &cands[i - 1];
        if rec(cands, i - 1, parity, cover, count, hit, u, target, filter, visit) {
            return true;
        }
        let next = EulerHit {
            f: hit.f | 1u64 << c.col,
            support: hit.support + c.size,
            sum: hit.sum + c.sum,
        };
        rec(
            cands,
            i - 1,
            parity ^ c.support,
            cover | c.support,
            count + 1,
            next,
            u,
            target,
            filter,
            visit,
        )
    }

    let start = EulerHit {
        f: 0,
        support: 0,
        sum: 0,
    };
    rec(&cands, cands.len(), 0, 0, 0, start, u, target, filter, visit)
}

fn first_violation<P>(sc: &SignedColumns, filter: EulerFilter, exec: Exec, bad: P) -> Option<CamionWitness>
where
    P: Fn(&EulerHit) -> bool + Sync,
{
    let n = sc.verts.len();
    let total = 1usize << n;
    par::find_first(exec, total.saturating_sub(1), |i| {
        let u = (i + 1) as u64;
        let mut found = None;
        eulerian_in(sc, u, filter, &mut |hit| {
            if bad(&hit) {
                found = Some(hit);
                true
            } else {
                false
            }
        });
        found.map(|hit| CamionWitness {
            selection: sc.selection(u, hit.f),
            support: hit.support,
            entry_sum: hit.sum,
        })
    })
}

pub fn camion_unimodular(g: &Hypergraph) -> Result<CamionResult> {
    camion_unimodular_with(g, Limits::default(), Exec::default())
}

/// TU iff every Eulerian partial subhypergraph has support divisible by 4.
/// The witness is least by (vertex mask, edge mask).
pub fn camion_unimodular_with(g: &Hypergraph, limits: Limits, exec: Exec) -> Result<CamionResult> {
    let sc = SignedColumns::from_plain(g);
    sc.check(limits)?;
    let witness = first_violation(&sc, EulerFilter::default(), exec, |h| h.support % 4 == 2);
    Ok(CamionResult {
        unimodular: witness.is_none(),
        witness,
    })
}

/// Square, covering Eulerian `G[U, F]` of support `2 mod 4` with least support,
/// ties broken by least (vertex mask, edge mask). Exists iff `g` is not TU.
pub(crate) fn least_square_core(g: &Hypergraph, limits: Limits) -> Result<Option<CamionWitness>> {
    let sc = SignedColumns::from_plain(g);
    sc.check(limits)?;
    let filter = EulerFilter {
        square: true,
        covering: true,
    };
    let mut best: Option<(usize, u64, u64)> = None;
    for u in 1..(1u64 << sc.verts.len()) {
        eulerian_in(&sc, u, filter, &mut |hit| {
            if hit.support % 4 == 2 && best.is_none_or(|(s, _, _)| hit.support < s) {
                best = Some((hit.support, u, hit.f));
            }
            false
        });
    }
    Ok(best.map(|(support, u, f)| CamionWitness {
        selection: sc.selection(u, f),
        support,
        entry_sum: support as i64,
    }))
}

pub fn camion_unimodular_mixed(d: &MixedHypergraph) -> Result<CamionResult> {
    camion_unimodular_mixed_with(d, Limits::default(), Exec::default())
}

/// TU iff every square Eulerian partial subhypergraph has entry sum divisible by 4.
pub fn camion_unimodular_mixed_with(d: &MixedHypergraph, limits: Limits, exec: Exec) -> Result<CamionResult> {
    let sc = SignedColumns::from_mixed(d);
    sc.check(limits)?;
    let filter = EulerFilter {
        square: true,
        covering: false,
    };
    let witness = first_violation(&sc, filter, exec, |h| h.sum.rem_euclid(4) != 0);
    Ok(CamionResult {
        unimodular: witness.is_none(),
        witness,
    })
}
