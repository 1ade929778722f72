//! Seeded generators for random and planted instances.
//!
//! The stream is xoshiro256** seeded through SplitMix64 (`seed_from_u64`), so any
//! implementation of those two published algorithms reproduces every instance.
//! Integers below `n` are drawn by rejection: draw `x` until
//! `x >= 2^64 mod n` and return `x mod n`. Shuffles are Fisher-Yates from
//! the last index down, swapping index `i` with `below(i + 1)`.
//!
//! Draw order in [`generate`]: vertex permutation, planted signs, proper edges,
//! small edges, signs of unplanted arcs, edge-order shuffle.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::detect::{TreeHouseOf, Witness, WitnessOf};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Instance, MixedHypergraph, Vertex};

pub struct Rng(Xoshiro256StarStar);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let reject_below = 0u64.wrapping_sub(n) % n;
        loop {
            let x = self.next_u64();
            // `[reject_below, 2^64)` holds a multiple of `n` values.
            if x >= reject_below {
                return (x % n) as usize;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 1
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct members of `pool`, ascending.
    pub fn subset(&mut self, pool: &[Vertex], k: usize) -> Vec<Vertex> {
        let mut p = pool.to_vec();
        let len = p.len();
        for i in 0..k {
            let j = i + self.below(len - i);
            p.swap(i, j);
        }
        p.truncate(k);
        p.sort_unstable();
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Plant {
    /// Odd `k ≥ 3`.
    OddCycle { k: usize },
    /// Odd path lengths.
    OddTreeHouse { lengths: [usize; 3] },
    /// `k ≥ 2`; signs random with odd parity sum.
    MixedOddCycle { k: usize },
    /// Path lengths ≥ 1; signs random, house signs fixed to make each closed cycle even.
    MixedOddTreeHouse { lengths: [usize; 3] },
}

impl Plant {
    fn is_mixed(self) -> bool {
        matches!(self, Plant::MixedOddCycle { .. } | Plant::MixedOddTreeHouse { .. })
    }

    fn vertex_count(self) -> usize {
        match self {
            Plant::OddCycle { k } | Plant::MixedOddCycle { k } => k,
            Plant::OddTreeHouse { lengths } | Plant::MixedOddTreeHouse { lengths } => 1 + lengths.iter().sum::<usize>(),
        }
    }

    fn validate(self) -> Result<()> {
        let ok = match self {
            Plant::OddCycle { k } => k >= 3 && k % 2 == 1,
            Plant::MixedOddCycle { k } => k >= 2,
            Plant::OddTreeHouse { lengths } => lengths.iter().all(|&l| l % 2 == 1),
            Plant::MixedOddTreeHouse { lengths } => lengths.iter().all(|&l| l >= 1),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("infeasible plant {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub n_vertices: usize,
    /// Edges of size 1 to 3, drawn with weights 1:3:2.
    pub n_small_edges: usize,
    /// Sizes ≥ 3 of additional edges.
    pub proper_edge_sizes: Vec<usize>,
    pub disjoint: bool,
    pub mixed: bool,
    pub plant: Option<Plant>,
}

impl GenConfig {
    pub fn new(seed: u64, n_vertices: usize) -> Self {
        GenConfig {
            seed,
            n_vertices,
            n_small_edges: 0,
            proper_edge_sizes: Vec::new(),
            disjoint: true,
            mixed: false,
            plant: None,
        }
    }

    /// A disjoint config with `1..=max_n` vertices and `1..=max_m` edges, at most
    /// two of them proper, all drawn from `seed`.
    pub fn random_disjoint(seed: u64, max_n: usize, max_m: usize, mixed: bool) -> Self {
        let mut rng = Rng::new(seed ^ 0x9e37_79b9_7f4a_7c15);
        let n = 1 + rng.below(max_n.max(1));
        let m = 1 + rng.below(max_m.max(1));
        let mut free = n;
        let mut proper = Vec::new();
        for _ in 0..rng.below(3).min(m) {
            if n < 3 {
                break;
            }
            let size = 3 + rng.below((n - 2).min(4));
            if size >= 4 {
                if size > free {
                    continue;
                }
                free -= size;
            }
            proper.push(size);
        }
        GenConfig {
            seed,
            n_vertices: n,
            n_small_edges: m - proper.len(),
            proper_edge_sizes: proper,
            disjoint: true,
            mixed,
            plant: None,
        }
    }
}

/// A generated instance and the planted witness, in instance coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub instance: Instance,
    pub planted: Option<Witness>,
}

impl Generated {
    pub fn plain(&self) -> Option<&Hypergraph> {
        match &self.instance {
            Instance::Plain(g) => Some(g),
            Instance::Mixed(_) => None,
        }
    }

    pub fn mixed(&self) -> Option<&MixedHypergraph> {
        match &self.instance {
            Instance::Mixed(d) => Some(d),
            Instance::Plain(_) => None,
        }
    }
}

/// Signed column under construction: `(vertex, sign)` pairs.
type Column = Vec<(Vertex, i64)>;

struct Planted {
    columns: Vec<Column>,
    /// Witness over local column indices.
    witness: Witness,
}

fn random_signs(rng: &mut Rng, verts: &[Vertex], mixed: bool) -> Column {
    verts
        .iter()
        .map(|&v| (v, if !mixed || rng.coin() { 1 } else { -1 }))
        .collect()
}

fn pair_parity(col: &Column) -> usize {
    usize::from(col[0].1 == col[1].1)
}

fn flip_last(col: &mut Column) {
    let last = col.len() - 1;
    col[last].1 = -col[last].1;
}

fn plant(rng: &mut Rng, p: Plant, perm: &[Vertex]) -> Planted {
    let mixed = p.is_mixed();
    match p {
        Plant::OddCycle { k } | Plant::MixedOddCycle { k } => {
            let vertices: Vec<Vertex> = perm[..k].to_vec();
            let mut columns: Vec<Column> = (0..k)
                .map(|i| random_signs(rng, &[vertices[i], vertices[(i + 1) % k]], mixed))
                .collect();
            if mixed && columns.iter().map(pair_parity).sum::<usize>() % 2 == 0 {
                flip_last(&mut columns[k - 1]);
            }
            let edges = (0..k).collect();
            let witness = if mixed {
                WitnessOf::MixedOddCycle { vertices, edges }
            } else {
                WitnessOf::OddCycle { vertices, edges }
            };
            Planted { columns, witness }
        }
        Plant::OddTreeHouse { lengths } | Plant::MixedOddTreeHouse { lengths } => {
            let root = perm[0];
            let mut next = 1;
            let mut columns = Vec::new();
            let mut paths: [Vec<Vertex>; 3] = Default::default();
            let mut path_edges: [Vec<usize>; 3] = Default::default();
            let mut parities = [0usize; 3];
            for i in 0..3 {
                paths[i].push(root);
                for _ in 0..lengths[i] {
                    let a = *paths[i].last().expect("nonempty");
                    let b = perm[next];
                    next += 1;
                    let col = random_signs(rng, &[a, b], mixed);
                    parities[i] += pair_parity(&col);
                    path_edges[i].push(columns.len());
                    columns.push(col);
                    paths[i].push(b);
                }
            }
            let leaves = [paths[0][lengths[0]], paths[1][lengths[1]], paths[2][lengths[2]]];
            let root_sign = if !mixed || rng.coin() { 1 } else { -1 };
            let mut house: Column = vec![(root, root_sign)];
            for i in 0..3 {
                // Equal signs contribute parity 1, so match the path parity.
                let sign = if !mixed || parities[i] % 2 == 1 {
                    root_sign
                } else {
                    -root_sign
                };
                house.push((leaves[i], sign));
            }
            house.sort_unstable();
            let house_edge = columns.len();
            columns.push(house);
            let t = TreeHouseOf {
                root,
                leaves,
                paths,
                path_edges,
                house_edge,
            };
            let witness = if mixed {
                WitnessOf::MixedOddTreeHouse(t)
            } else {
                WitnessOf::OddTreeHouse(t)
            };
            Planted { columns, witness }
        }
    }
}

/// Deterministic in `cfg`; the planted witness, if any, verifies against the instance.
pub fn generate(cfg: &GenConfig) -> Result<Generated> {
    let n = cfg.n_vertices;
    if let Some(p) = cfg.plant {
        p.validate()?;
        if p.is_mixed() != cfg.mixed {
            return Err(Error::invalid("plant kind must match the mixed flag"));
        }
        if p.vertex_count() > n {
            return Err(Error::invalid(format!(
                "plant needs {} vertices, config has {n}",
                p.vertex_count()
            )));
        }
    }
    if let Some(&s) = cfg.proper_edge_sizes.iter().find(|&&s| s < 3 || s > n) {
        return Err(Error::invalid(format!("proper edge size {s} outside 3..={n}")));
    }
    if n == 0 && cfg.n_small_edges > 0 {
        return Err(Error::invalid("small edges need at least one vertex"));
    }

    let mut rng = Rng::new(cfg.seed);
    let mut perm: Vec<Vertex> = (0..n).collect();
    rng.shuffle(&mut perm);

    let planted = cfg.plant.map(|p| plant(&mut rng, p, &perm));
    let mut columns: Vec<Column> = planted.as_ref().map(|p| p.columns.clone()).unwrap_or_default();

    let mut free: Vec<Vertex> = (0..n)
        .filter(|&v| !columns.iter().any(|c| c.len() >= 4 && c.iter().any(|&(w, _)| w == v)))
        .collect();
    let all: Vec<Vertex> = (0..n).collect();
    let mut unsigned: Vec<Vec<Vertex>> = Vec::new();
    for &s in &cfg.proper_edge_sizes {
        if cfg.disjoint && s >= 4 {
            if s > free.len() {
                return Err(Error::invalid(format!(
                    "cannot place a disjoint edge of size {s}: {} free vertices",
                    free.len()
                )));
            }
            let e = rng.subset(&free, s);
            free.retain(|v| !e.contains(v));
            unsigned.push(e);
        } else {
            unsigned.push(rng.subset(&all, s));
        }
    }
    for _ in 0..cfg.n_small_edges {
        let size = match rng.below(6) {
            0 => 1,
            1..=3 => 2,
            _ => 3,
        }
        .min(n);
        unsigned.push(rng.subset(&all, size));
    }
    for e in unsigned {
        columns.push(random_signs(&mut rng, &e, cfg.mixed));
    }

    let mut order: Vec<usize> = (0..columns.len()).collect();
    rng.shuffle(&mut order);
    let mut new_id = vec![0; columns.len()];
    for (pos, &old) in order.iter().enumerate() {
        new_id[old] = pos;
    }
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let instance = if cfg.mixed {
        let arcs = order
            .iter()
            .map(|&i| {
                let c = &columns[i];
                let pick = |s: i64| c.iter().filter(|&&(_, x)| x == s).map(|&(v, _)| v).collect();
                (pick(1), pick(-1))
            })
            .collect();
        Instance::Mixed(MixedHypergraph::new(names, arcs)?)
    } else {
        let edges = order
            .iter()
            .map(|&i| columns[i].iter().map(|&(v, _)| v).collect())
            .collect();
        Instance::Plain(Hypergraph::new(names, edges)?)
    };
    let planted = planted.map(|p| p.witness.map_edges(|e| new_id[e]));
    Ok(Generated { instance, planted })
}
