use dturan::catalog;
use dturan::graph::proper_labelings;
use dturan::number::{int, ratio, Rational};
use dturan::polynomials::{positive_on_unit_interval, tree_multivariate_matching, EdgeWeightAssignment};
use dturan::star::monotone_path_tree;
use dturan::tree_decision::{decide_tree, decide_weights, decide_weights_with, dcrit_tree, tree_critical_density};
use dturan::{EdgeDensityAssignment, PatternGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

fn random_gamma(t: &PatternGraph, rng: &mut ChaCha8Rng) -> EdgeDensityAssignment {
    let values: Vec<Rational> = (0..t.edge_count())
        .map(|_| {
            let q = rng.gen_range(1..=20);
            ratio(rng.gen_range(0..=q), q)
        })
        .collect();
    EdgeDensityAssignment::from_values(t, &values).unwrap()
}

/// Sum over roots of `n! / Π subtree sizes`.
fn tree_labeling_count(t: &PatternGraph) -> u64 {
    fn sizes(t: &PatternGraph, v: usize, parent: usize, out: &mut Vec<u64>) -> u64 {
        let s = 1 + t.neighbors(v).iter().filter(|&&w| w != parent).map(|&w| sizes(t, w, v, out)).sum::<u64>();
        out.push(s);
        s
    }
    let fact: u64 = (1..=t.n() as u64).product();
    t.vertices()
        .map(|root| {
            let mut s = Vec::new();
            sizes(t, root, 0, &mut s);
            fact / s.iter().product::<u64>()
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leaf_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = catalog::random_tree(rng.gen_range(2..=10), &mut rng);
        let r = EdgeWeightAssignment::from_densities(&random_gamma(&t, &mut rng));
        let base = decide_weights(&t, &r).unwrap().verdict;
        let mut pick = |s: &dturan::tree_decision::TreeState| {
            let leaves: Vec<usize> = s.leaves().collect();
            leaves[rng.gen_range(0..leaves.len())]
        };
        prop_assert_eq!(decide_weights_with(&t, &r, &mut pick).unwrap().verdict, base);
    }

    #[test]
    fn reduction_matches_positivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = catalog::random_tree(rng.gen_range(1..=10), &mut rng);
        let gamma = random_gamma(&t, &mut rng);
        let f = tree_multivariate_matching(&t, &EdgeWeightAssignment::from_densities(&gamma)).unwrap();
        prop_assert_eq!(decide_tree(&t, &gamma).unwrap().is_ensured(), positive_on_unit_interval(&f).unwrap());
    }

    #[test]
    fn homogeneous_flip_at_dcrit(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = catalog::random_tree(rng.gen_range(3..=10), &mut rng);
        let iv = dcrit_tree(&t, &ratio(1, 1_000_000_000_000)).unwrap();
        let eps = ratio(1, 1_000_000);
        let up = EdgeDensityAssignment::homogeneous(&t, &iv.hi + &eps).unwrap();
        let down = EdgeDensityAssignment::homogeneous(&t, &iv.lo - &eps).unwrap();
        prop_assert!(decide_tree(&t, &up).unwrap().is_ensured());
        prop_assert!(!decide_tree(&t, &down).unwrap().is_ensured());
    }

    #[test]
    fn dcrit_grows_with_the_tree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = catalog::random_tree(rng.gen_range(3..=10), &mut rng);
        // drop the highest-numbered leaf and relabel to 1..n-1
        let leaf = t.vertices().filter(|&v| t.degree(v) == 1).max().unwrap();
        let relabel = |v: usize| if v > leaf { v - 1 } else { v };
        let sub = PatternGraph::new(
            t.n() - 1,
            t.edges().iter().filter(|e| !e.contains(leaf)).map(|e| (relabel(e.0), relabel(e.1))),
        ).unwrap();
        let big = tree_critical_density(&t).unwrap();
        let small = tree_critical_density(&sub).unwrap();
        prop_assert!(small.cmp_density(&big) != Ordering::Greater);
    }

    #[test]
    fn tree_labeling_counts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = catalog::random_tree(rng.gen_range(1..=7), &mut rng);
        prop_assert_eq!(proper_labelings(&t).unwrap().count() as u64, tree_labeling_count(&t));
    }

    #[test]
    fn path_tree_of_a_tree_is_the_tree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = catalog::random_tree(rng.gen_range(1..=8), &mut rng);
        let all: Vec<_> = proper_labelings(&t).unwrap().collect();
        let f = &all[rng.gen_range(0..all.len())];
        let m = monotone_path_tree(&t, f, None).unwrap().to_graph();
        prop_assert_eq!(catalog::tree_canonical_form(&m), catalog::tree_canonical_form(&t));
    }
}

#[test]
fn homogeneous_one_is_always_ensured() {
    for n in 2..=7 {
        for t in catalog::trees(n) {
            assert!(decide_tree(&t, &EdgeDensityAssignment::homogeneous(&t, int(1)).unwrap()).unwrap().is_ensured());
        }
    }
}
