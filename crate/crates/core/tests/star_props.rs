use dturan::bounds::bounds_report;
use dturan::catalog;
use dturan::number::ratio;
use dturan::star::{labeling_density, star_lower_bound, verify_bt1};
use dturan::graph::proper_labelings;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn star_bound_below_matching_root(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=7);
        let p = if n == 7 { 0.3 } else { rng.gen_range(0.3..0.7) };
        let h = catalog::random_connected(n, p, &mut rng);
        prop_assume!(h.max_degree() >= 2);
        let report = bounds_report(&h, &ratio(1, 1_000_000)).unwrap();
        prop_assert!(report.star.cmp_density(&report.matching_root) != Ordering::Greater);
        prop_assert!(report.is_consistent());
    }

    #[test]
    fn every_labeling_is_below_the_maximum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = catalog::random_connected(rng.gen_range(2..=5), 0.6, &mut rng);
        let best = star_lower_bound(&h, &ratio(1, 1_000_000)).unwrap();
        for f in proper_labelings(&h).unwrap() {
            prop_assert!(labeling_density(&h, &f).unwrap().cmp_density(&best.density) != Ordering::Greater);
        }
    }
}

#[test]
fn complete_bipartite_small() {
    for n in 1..=6 {
        for m in 1..=(7 - n) {
            assert!(verify_bt1(n, m, &ratio(1, 1_000_000_000)).unwrap(), "K_{n},{m}");
        }
    }
}

#[test]
fn cycle_matches_longer_path() {
    let s = star_lower_bound(&catalog::cycle(4), &ratio(1, 1_000_000)).unwrap();
    assert_eq!(s.density.exact_value(), Some(ratio(2, 3)));
    for n in [3usize, 5] {
        let c = star_lower_bound(&catalog::cycle(n), &ratio(1, 1_000_000_000)).unwrap();
        let p = dturan::tree_decision::tree_critical_density(&catalog::path(n + 1)).unwrap();
        assert_eq!(c.density.cmp_density(&p), Ordering::Equal, "C_{n}");
    }
}
