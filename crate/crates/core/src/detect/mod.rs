//! Forbidden-structure search and the unimodularity decisions for disjoint
//! hypergraphs and disjoint mixed hypergraphs.

mod search;
mod witness;

use serde::{Deserialize, Serialize};

pub use search::{
    find_odd_cycle, find_odd_cycle_with, find_odd_tree_house, find_odd_tree_house_with, shortest_odd_cycles, Budget,
};
pub use witness::{verify_mixed_witness, verify_witness, Certificate, TreeHouse, TreeHouseOf, Witness, WitnessOf};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, MixedHypergraph, SubSelection};
use crate::linalg::{camion_unimodular_mixed_with, Limits};
use crate::mixed::{self, ReductionTranscript};
use crate::par::Exec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Decision {
    Tu,
    NotTu { witness: Witness },
}

impl Decision {
    pub fn is_tu(&self) -> bool {
        matches!(self, Decision::Tu)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Decision::Tu => None,
            Decision::NotTu { witness } => Some(witness),
        }
    }
}

fn checked(g: &Hypergraph, w: Witness) -> Result<Witness> {
    if verify_witness(g, &w) {
        Ok(w)
    } else {
        Err(Error::internal(
            "witness soundness",
            format!("search returned an invalid {}", w.kind()),
        ))
    }
}

pub fn decide_unimodular_disjoint(g: &Hypergraph) -> Result<Decision> {
    decide_unimodular_disjoint_with(g, Budget::default())
}

/// TU iff there is no odd cycle and no odd tree house.
pub fn decide_unimodular_disjoint_with(g: &Hypergraph, budget: Budget) -> Result<Decision> {
    g.require_disjoint()?;
    if let Some(w) = find_odd_cycle_with(g, budget)? {
        return Ok(Decision::NotTu {
            witness: checked(g, w)?,
        });
    }
    if let Some(w) = find_odd_tree_house_with(g, budget)? {
        return Ok(Decision::NotTu {
            witness: checked(g, w)?,
        });
    }
    Ok(Decision::Tu)
}

/// Verdict for a mixed hypergraph together with the reduced certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedDecision {
    /// Mixed witness in the input's coordinates; `None` means TU.
    pub witness: Option<Witness>,
    pub reduced: Option<ReducedCertificate>,
}

impl MixedDecision {
    pub fn is_tu(&self) -> bool {
        self.witness.is_none()
    }
}

/// The unsigned hypergraph the decision ran on and the witness found there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCertificate {
    /// Part of the input that was reduced: all of it, or a Camion core when the
    /// whole input admits no sign normalization.
    pub scope: SubSelection,
    pub hypergraph: Hypergraph,
    pub witness: Witness,
    pub transcript: ReductionTranscript,
}

pub fn decide_unimodular_mixed_disjoint(d: &MixedHypergraph) -> Result<MixedDecision> {
    decide_unimodular_mixed_disjoint_with(d, Budget::default(), Limits::default())
}

/// Normalizes to an unsigned hypergraph, decides there, and maps the witness back.
///
/// Arcs of odd support can make a global sign normalization impossible; then the
/// reduction is applied to a least violating Camion core instead (`limits`
/// guards that enumeration).
pub fn decide_unimodular_mixed_disjoint_with(
    d: &MixedHypergraph,
    budget: Budget,
    limits: Limits,
) -> Result<MixedDecision> {
    d.require_disjoint()?;
    let (scope, norm) = match mixed::try_normalize(d)? {
        Some(norm) => (
            SubSelection::new(d.vertices().to_vec(), d.arcs().iter().map(|a| a.id).collect()),
            norm,
        ),
        None => {
            let camion = camion_unimodular_mixed_with(d, limits, Exec::Serial)?;
            let Some(core) = camion.witness else {
                return Ok(MixedDecision {
                    witness: None,
                    reduced: None,
                });
            };
            let sub = d.induce(&core.selection)?;
            let norm = mixed::try_normalize(&sub)?
                .ok_or_else(|| Error::internal("core normalization", "Eulerian core admits no sign normalization"))?;
            (core.selection, norm)
        }
    };
    let witness = match decide_unimodular_disjoint_with(&norm.hypergraph, budget)? {
        Decision::Tu if scope.vertices.len() == d.n() && scope.edges.len() == d.m() => {
            return Ok(MixedDecision {
                witness: None,
                reduced: None,
            })
        }
        Decision::Tu => {
            return Err(Error::internal(
                "mixed reduction",
                "a non-unimodular core reduced to a unimodular hypergraph",
            ))
        }
        Decision::NotTu { witness } => witness,
    };
    let lifted = norm.lift_witness(&witness)?;
    if !verify_mixed_witness(d, &lifted) {
        return Err(Error::internal(
            "mixed reduction",
            format!("lifted {} does not verify in the input", lifted.kind()),
        ));
    }
    Ok(MixedDecision {
        witness: Some(lifted),
        reduced: Some(ReducedCertificate {
            scope,
            hypergraph: norm.hypergraph,
            witness,
            transcript: norm.transcript,
        }),
    })
}

/// Largest graph the packing computation accepts.
pub const OCP_MAX_VERTICES: usize = 12;

/// Maximum number of vertex-disjoint odd cycles of a graph.
pub fn compute_ocp(g: &Hypergraph) -> Result<usize> {
    if !g.is_graph() {
        return Err(Error::pre("odd cycle packing needs every edge of size 2"));
    }
    let n = g.n();
    if n > OCP_MAX_VERTICES {
        return Err(Error::GuardExceeded {
            what: "graph vertices",
            actual: n,
            limit: OCP_MAX_VERTICES,
        });
    }
    let pos = |v| g.vertices().binary_search(&v).expect("edge inside vertex set");
    let mut adj = vec![0u32; n];
    for e in g.edges() {
        let (a, b) = (pos(e.verts[0]), pos(e.verts[1]));
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let full = 1usize << n;
    let non_bipartite: Vec<bool> = (0..full).map(|s| !is_bipartite(&adj, s as u32)).collect();
    let mut best = vec![0usize; full];
    for s in 1..full {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut value = best[rest];
        // Subsets of `s` containing its lowest vertex.
        let mut t = rest;
        loop {
            let with_low = t | low;
            if non_bipartite[with_low] {
                value = value.max(1 + best[s ^ with_low]);
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & rest;
        }
        best[s] = value;
    }
    Ok(best[full - 1])
}

fn is_bipartite(adj: &[u32], set: u32) -> bool {
    let mut color = [0u8; 32];
    let mut todo = set;
    while todo != 0 {
        let start = todo.trailing_zeros() as usize;
        color[start] = 1;
        let mut stack = vec![start];
        todo &= !(1 << start);
        while let Some(x) = stack.pop() {
            let mut nb = adj[x] & set;
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if color[y] == 0 {
                    color[y] = 3 - color[x];
                    todo &= !(1 << y);
                    stack.push(y);
                } else if color[y] == color[x] {
                    return false;
                }
            }
        }
    }
    true
}
