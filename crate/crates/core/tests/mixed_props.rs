mod common;

use common::{brute_almost_tu, brute_tu, laplace_det, leibniz};
use proptest::prelude::*;
use tuhyper::detect::{decide_unimodular_mixed_disjoint, verify_mixed_witness};
use tuhyper::gen::{generate, GenConfig, Plant};
use tuhyper::mixed::{classify_almost_tu_disjoint, even_cycle_nullvector, path_or_cycle_parity, AlmostTuClass};
use tuhyper::quasi::Parity;
use tuhyper::MixedHypergraph;

/// Cycle on `signs.len()` vertices; arc `i` joins `i` and `i + 1` with the given endpoint signs.
fn signed_cycle(signs: &[(bool, bool)]) -> MixedHypergraph {
    let k = signs.len();
    let arcs = signs
        .iter()
        .enumerate()
        .map(|(i, &(si, sj))| {
            let (a, b) = (i, (i + 1) % k);
            let (mut plus, mut minus) = (Vec::new(), Vec::new());
            if si {
                plus.push(a)
            } else {
                minus.push(a)
            }
            if sj {
                plus.push(b)
            } else {
                minus.push(b)
            }
            plus.sort_unstable();
            minus.sort_unstable();
            (plus, minus)
        })
        .collect();
    MixedHypergraph::unnamed(k, arcs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixed_decision_matches_exhaustive_minors(seed in any::<u64>()) {
        let gen = generate(&GenConfig::random_disjoint(seed, 6, 6, true)).unwrap();
        let d = gen.mixed().unwrap();
        let decision = decide_unimodular_mixed_disjoint(d).unwrap();
        prop_assert_eq!(decision.is_tu(), brute_tu(&d.incidence_matrix()));
        if let Some(w) = &decision.witness {
            prop_assert!(verify_mixed_witness(d, w));
        }
    }

    #[test]
    fn cycle_determinant_follows_sign_parity(signs in (2usize..=12).prop_flat_map(|k| proptest::collection::vec(any::<(bool, bool)>(), k))) {
        let c = signed_cycle(&signs);
        let m = c.incidence_matrix();
        let det = laplace_det(&m.to_rows());
        match path_or_cycle_parity(&c).unwrap() {
            Parity::Even => {
                prop_assert_eq!(det, 0);
                let u = even_cycle_nullvector(&c).unwrap();
                prop_assert!(u.iter().any(|&x| x != 0));
                prop_assert!(m.mul_vec(&u).iter().all(|&x| x == 0));
            }
            Parity::Odd => prop_assert_eq!(det.abs(), 2),
        }
    }

    #[test]
    fn laplace_agrees_with_leibniz(rows in (1usize..=6).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(-2i64..=2, n), n))) {
        prop_assert_eq!(laplace_det(&rows), leibniz(&rows));
    }

    #[test]
    fn classification_matches_almost_tu(seed in any::<u64>(), k in 2usize..6) {
        let mut cfg = GenConfig::new(seed, k);
        cfg.mixed = true;
        cfg.plant = Some(Plant::MixedOddCycle { k });
        let gen = generate(&cfg).unwrap();
        let d = gen.mixed().unwrap();
        let class = classify_almost_tu_disjoint(d).unwrap();
        prop_assert_eq!(!matches!(class, AlmostTuClass::NotAlmostTu), brute_almost_tu(&d.incidence_matrix()));
    }
}
