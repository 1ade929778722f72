//! Named instances shipped as JSON data files under `fixtures/`.

use crate::hypergraph::{Hypergraph, Instance, MixedHypergraph};

pub const FIG1: &str = include_str!("../fixtures/fig1.json");
pub const FIG2: &str = include_str!("../fixtures/fig2.json");
pub const FIG4_LEFT: &str = include_str!("../fixtures/fig4_left.json");
pub const FIG4_RIGHT: &str = include_str!("../fixtures/fig4_right.json");
pub const FIG5: &str = include_str!("../fixtures/fig5.json");
pub const C3: &str = include_str!("../fixtures/c3.json");
pub const C4: &str = include_str!("../fixtures/c4.json");
pub const DIR4: &str = include_str!("../fixtures/dir4.json");

/// Every fixture by file stem.
pub const ALL: &[(&str, &str)] = &[
    ("fig1", FIG1),
    ("fig2", FIG2),
    ("fig4_left", FIG4_LEFT),
    ("fig4_right", FIG4_RIGHT),
    ("fig5", FIG5),
    ("c3", C3),
    ("c4", C4),
    ("dir4", DIR4),
];

fn plain(text: &str) -> Hypergraph {
    match Instance::from_json(text).expect("fixture parses") {
        Instance::Plain(g) => g,
        Instance::Mixed(_) => panic!("fixture is mixed"),
    }
}

fn mixed(text: &str) -> MixedHypergraph {
    match Instance::from_json(text).expect("fixture parses") {
        Instance::Mixed(d) => d,
        Instance::Plain(_) => panic!("fixture is not mixed"),
    }
}

/// Size-4 edge over a root and three leaves, plus the three root-leaf edges.
pub fn fig1() -> Hypergraph {
    plain(FIG1)
}

/// Two overlapping size-4 edges `e`, `f` and a path `v2 v3 v4 v5`.
pub fn fig2() -> Hypergraph {
    plain(FIG2)
}

pub fn fig4_left() -> MixedHypergraph {
    mixed(FIG4_LEFT)
}

pub fn fig4_right() -> Hypergraph {
    plain(FIG4_RIGHT)
}

pub fn fig5() -> MixedHypergraph {
    mixed(FIG5)
}

pub fn c3() -> Hypergraph {
    plain(C3)
}

pub fn c4() -> Hypergraph {
    plain(C4)
}

pub fn dir4() -> MixedHypergraph {
    mixed(DIR4)
}
