mod common;

use common::{brute_tu, mask_to_verts};
use proptest::prelude::*;
use tuhyper::detect::{decide_unimodular_disjoint, find_odd_cycle, verify_witness};
use tuhyper::extract::extract_witness;
use tuhyper::gen::{generate, GenConfig, Plant};
use tuhyper::linalg::camion_unimodular;
use tuhyper::{Error, Hypergraph, Instance, SubSelection};

fn hypergraph(max_n: usize, max_m: usize) -> impl Strategy<Value = Hypergraph> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(1u32..(1 << n), 0..=max_m)
            .prop_map(move |masks| Hypergraph::unnamed(n, masks.into_iter().map(mask_to_verts).collect()).unwrap())
    })
}

fn disjoint_instance() -> impl Strategy<Value = Hypergraph> {
    any::<u64>().prop_map(|seed| {
        let gen = generate(&GenConfig::random_disjoint(seed, 7, 7, false)).unwrap();
        gen.plain().unwrap().clone()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn induced_incidence_is_the_selected_submatrix(g in hypergraph(7, 7), vmask in any::<u32>(), emask in any::<u32>()) {
        let u: Vec<usize> = g.vertices().iter().copied().filter(|v| vmask >> v & 1 == 1).collect();
        let f: Vec<usize> = g.edge_ids().into_iter().filter(|e| emask >> e & 1 == 1).collect();
        let sub = g.induce(&SubSelection::new(u.clone(), f.clone())).unwrap();
        let full = g.incidence_matrix().to_rows();
        let kept: Vec<usize> = f.iter().copied().filter(|&e| g.edge(e).unwrap().verts.iter().any(|v| u.contains(v))).collect();
        let expected: Vec<Vec<i64>> = u
            .iter()
            .map(|&v| kept.iter().map(|&e| full[v][g.edge_index(e).unwrap()]).collect())
            .collect();
        prop_assert_eq!(sub.incidence_matrix().to_rows(), expected);
    }

    #[test]
    fn eulerian_means_even_lines(g in hypergraph(7, 7)) {
        let rows = g.incidence_matrix().to_rows();
        let rows_even = rows.iter().all(|r| r.iter().filter(|&&x| x != 0).count() % 2 == 0);
        let cols_even = (0..g.m()).all(|c| rows.iter().filter(|r| r[c] != 0).count() % 2 == 0);
        prop_assert_eq!(g.is_eulerian(), rows_even && cols_even);
    }

    #[test]
    fn documents_round_trip(g in hypergraph(6, 6)) {
        let inst = Instance::Plain(g);
        let back = Instance::from_json(&inst.to_json().to_string()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn decision_matches_exhaustive_minors(g in disjoint_instance()) {
        let decision = decide_unimodular_disjoint(&g).unwrap();
        prop_assert_eq!(decision.is_tu(), brute_tu(&g.incidence_matrix()));
        if let Some(w) = decision.witness() {
            prop_assert!(verify_witness(&g, w));
        }
    }

    #[test]
    fn extraction_is_sound_and_complete(g in disjoint_instance()) {
        let tu = brute_tu(&g.incidence_matrix());
        match extract_witness(&g) {
            Ok(ex) => {
                prop_assert!(!tu);
                prop_assert!(verify_witness(&g, &ex.witness));
            }
            Err(Error::InputIsTu) => prop_assert!(tu),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn camion_matches_exhaustive_minors(g in disjoint_instance()) {
        let res = camion_unimodular(&g).unwrap();
        prop_assert_eq!(res.unimodular, brute_tu(&g.incidence_matrix()));
        if let Some(w) = res.witness {
            prop_assert_eq!(w.support % 4, 2);
            prop_assert_eq!(g.induce(&w.selection).unwrap().support_size(), w.support);
        }
    }

    #[test]
    fn generation_is_deterministic_and_planted_witnesses_verify(seed in any::<u64>(), a in 0usize..3, b in 0usize..3, c in 0usize..3, extra in 0usize..4) {
        let lengths = [2 * a + 1, 2 * b + 1, 2 * c + 1];
        let mut cfg = GenConfig::new(seed, 1 + lengths.iter().sum::<usize>() + extra);
        cfg.n_small_edges = extra;
        cfg.plant = Some(Plant::OddTreeHouse { lengths });
        let first = generate(&cfg).unwrap();
        let second = generate(&cfg).unwrap();
        prop_assert_eq!(first.instance.to_json().to_string(), second.instance.to_json().to_string());
        let g = first.plain().unwrap();
        prop_assert!(g.is_disjoint());
        prop_assert!(verify_witness(g, first.planted.as_ref().unwrap()));
    }

    #[test]
    fn odd_cycles_have_support_two_mod_four(k in 1usize..8) {
        let n = 2 * k + 1;
        let edges = (0..n).map(|i| { let (a, b) = (i, (i + 1) % n); vec![a.min(b), a.max(b)] }).collect();
        let c = Hypergraph::unnamed(n, edges).unwrap();
        prop_assert_eq!(c.support_size(), 4 * k + 2);
        prop_assert!(find_odd_cycle(&c).unwrap().is_some());
        let even: Vec<Vec<usize>> = (0..2 * k + 2).map(|i| { let (a, b) = (i, (i + 1) % (2 * k + 2)); vec![a.min(b), a.max(b)] }).collect();
        let e = Hypergraph::unnamed(2 * k + 2, even).unwrap();
        prop_assert_eq!(e.support_size() % 4, 0);
        prop_assert!(find_odd_cycle(&e).unwrap().is_none());
    }
}
