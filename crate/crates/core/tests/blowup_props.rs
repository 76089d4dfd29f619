use dturan::acceptance::random_blowup;
use dturan::blowup::star_decomposition_construct;
use dturan::catalog;
use dturan::graph::proper_labelings;
use dturan::number::{ratio, Rational};
use dturan::oracle::{oracle_find_transversal, oracle_search_construction, SearchConfig};
use dturan::star::{random_proper_labeling, star_necessary_condition, StarCheck};
use dturan::EdgeDensityAssignment;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn searchers_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_blowup(&mut rng).unwrap();
        let fast = b.find_transversal();
        prop_assert_eq!(fast.is_some(), oracle_find_transversal(&b).unwrap().is_some());
        if let Some(t) = fast {
            prop_assert!(t.is_valid(&b));
        }
    }

    #[test]
    fn transversals_ignore_weights(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_blowup(&mut rng).unwrap();
        let weights = b
            .cluster_sizes()
            .iter()
            .map(|&s| {
                let raw: Vec<i64> = (0..s).map(|_| rng.gen_range(0..5)).collect();
                let total: i64 = raw.iter().sum();
                if total == 0 {
                    vec![ratio(1, s as i64); s]
                } else {
                    raw.iter().map(|&k| ratio(k, total)).collect()
                }
            })
            .collect();
        let c = b.with_exact_weights(weights).unwrap();
        prop_assert_eq!(b.find_transversal().is_some(), c.find_transversal().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn failed_star_check_yields_construction(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let h = catalog::random_connected(n, 0.6, &mut rng);
        let values: Vec<Rational> = (0..h.edge_count()).map(|_| ratio(rng.gen_range(1..=20), 20)).collect();
        let gamma = EdgeDensityAssignment::from_values(&h, &values).unwrap();
        let f = random_proper_labeling(&h, &mut rng);
        let built = star_decomposition_construct(&h, &f, &gamma).unwrap();
        match star_necessary_condition(&h, &gamma, &f).unwrap() {
            StarCheck::FailsThisLabeling => {
                let b = built.expect("a failing labeling must construct");
                prop_assert!(b.meets(&gamma));
                prop_assert!(b.find_transversal().is_none());
                prop_assert!(oracle_find_transversal(&b).unwrap().is_none());
                for i in h.vertices() {
                    prop_assert!(b.cluster_size(i) <= h.degree(i).max(1));
                }
            }
            StarCheck::PassesThisLabeling => prop_assert!(built.is_none()),
        }
    }

    #[test]
    fn oracle_constructions_certify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let h = catalog::random_connected(n, 0.6, &mut rng);
        let values: Vec<Rational> = (0..h.edge_count()).map(|_| ratio(rng.gen_range(0..=10), 10)).collect();
        let gamma = EdgeDensityAssignment::from_values(&h, &values).unwrap();
        if let Some(b) = oracle_search_construction(&h, &SearchConfig::new(&h, gamma.clone(), 6)).unwrap() {
            prop_assert!(b.meets(&gamma));
            prop_assert!(b.find_transversal().is_none());
            prop_assert!(oracle_find_transversal(&b).unwrap().is_none());
        }
    }
}

#[test]
fn every_labeling_of_small_graphs_is_consistent() {
    let h = catalog::complete(3);
    let gamma = EdgeDensityAssignment::homogeneous(&h, ratio(3, 5)).unwrap();
    for f in proper_labelings(&h).unwrap() {
        let b = star_decomposition_construct(&h, &f, &gamma).unwrap().expect("below the threshold");
        assert!(b.meets(&gamma) && b.find_transversal().is_none());
    }
}
