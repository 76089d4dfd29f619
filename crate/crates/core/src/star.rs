//! Monotone-path trees, star-decomposition lower bounds, the bipartite closed
//! form, and the bow-tie construction.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::blowup::{VertexRef, WeightedBlowupGraph};
use crate::catalog;
use crate::error::{Error, Result};
use crate::graph::{proper_labelings, Edge, EdgeDensityAssignment, PatternGraph, ProperLabeling};
use crate::number::{int, ratio, Interval, Rational};
use crate::polynomials::{even_part, matching_polynomial, CriticalDensity, IsolatedRoot, Poly};
use crate::tree_decision::{decide_tree, TreeDecision};

/// Largest monotone-path tree that will be built.
pub const PATH_TREE_NODE_CAP: usize = 100_000;
/// Largest number of labelings enumerated before switching to sampling.
pub const LABELING_CAP: usize = 100_000;

/// Tree of increasing-label paths from `f(1)`; node `k` (1-based) is `paths[k - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonePathTree {
    paths: Vec<Vec<usize>>,
    parent: Vec<usize>,
    weights: Option<Vec<Rational>>,
}

impl MonotonePathTree {
    pub fn node_count(&self) -> usize {
        self.paths.len()
    }

    pub fn path(&self, node: usize) -> &[usize] {
        &self.paths[node - 1]
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    /// Parent node of `node`, `None` for the root.
    pub fn parent(&self, node: usize) -> Option<usize> {
        match self.parent[node - 1] {
            0 => None,
            p => Some(p),
        }
    }

    pub fn to_graph(&self) -> PatternGraph {
        PatternGraph::new(
            self.paths.len(),
            (2..=self.paths.len()).map(|k| (self.parent[k - 1], k)),
        )
        .expect("parent links form a tree")
    }

    /// The inherited densities on the tree edges, when weights were supplied.
    pub fn lifted_densities(&self) -> Option<EdgeDensityAssignment> {
        let w = self.weights.as_ref()?;
        let g = self.to_graph();
        let map = (2..=self.paths.len())
            .map(|k| (Edge::new(self.parent[k - 1], k), w[k - 1].clone()))
            .collect();
        Some(EdgeDensityAssignment::new(&g, map).expect("weights come from a valid assignment"))
    }

    /// Graph-file text with a `#` legend mapping node index to path.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, p) in self.paths.iter().enumerate() {
            let names: Vec<String> = p.iter().map(usize::to_string).collect();
            out.push_str(&format!("# node {}: path ({})\n", k + 1, names.join(",")));
        }
        out.push_str(&self.to_graph().to_text());
        out
    }
}

/// Monotone-path tree of `graph` under `labeling`, carrying `γ` when given.
pub fn monotone_path_tree(
    graph: &PatternGraph,
    labeling: &ProperLabeling,
    weights: Option<&EdgeDensityAssignment>,
) -> Result<MonotonePathTree> {
    check_labeling(graph, labeling)?;
    let pos = labeling.positions();
    let root = labeling.order()[0];
    let mut t = MonotonePathTree {
        paths: Vec::new(),
        parent: Vec::new(),
        weights: weights.map(|_| Vec::new()),
    };
    extend(graph, &pos, weights, &mut t, vec![root], 0, Rational::one())?;
    Ok(t)
}

// Preorder: a path, then its extensions by increasing label.
fn extend(
    graph: &PatternGraph,
    pos: &[usize],
    weights: Option<&EdgeDensityAssignment>,
    t: &mut MonotonePathTree,
    path: Vec<usize>,
    parent: usize,
    w: Rational,
) -> Result<()> {
    if t.paths.len() >= PATH_TREE_NODE_CAP {
        return Err(Error::SizeLimit {
            what: "monotone-path tree nodes",
            limit: PATH_TREE_NODE_CAP as u64,
            actual: PATH_TREE_NODE_CAP as u64 + 1,
        });
    }
    let last = *path.last().unwrap();
    t.paths.push(path.clone());
    t.parent.push(parent);
    if let Some(ws) = t.weights.as_mut() {
        ws.push(w);
    }
    let node = t.paths.len();
    let mut ext: Vec<usize> = graph
        .neighbors(last)
        .iter()
        .copied()
        .filter(|&z| pos[z] > pos[last])
        .collect();
    ext.sort_by_key(|&z| pos[z]);
    for z in ext {
        let mut p = path.clone();
        p.push(z);
        let wz = weights.map_or_else(Rational::one, |g| g.get(Edge::new(last, z)).clone());
        extend(graph, pos, weights, t, p, node, wz)?;
    }
    Ok(())
}

fn check_labeling(graph: &PatternGraph, labeling: &ProperLabeling) -> Result<()> {
    if labeling.len() != graph.n() {
        return Err(Error::ImproperLabeling(format!(
            "{labeling} has {} entries for {} vertices",
            labeling.len(),
            graph.n()
        )));
    }
    ProperLabeling::new(graph, labeling.order().to_vec()).map(|_| ())
}

/// Even part of `M(T_f(H), t)`; its largest root is `λ(T_f(H))²`.
fn path_tree_s_poly(graph: &PatternGraph, labeling: &ProperLabeling) -> Result<Poly> {
    let tree = monotone_path_tree(graph, labeling, None)?.to_graph();
    Ok(even_part(&matching_polynomial(&tree)?))
}

fn s_to_density(s_poly: &Poly) -> Result<CriticalDensity> {
    if s_poly.degree() == Some(0) {
        // a single node: no edges, λ = 0
        return Ok(CriticalDensity::exact(Rational::from_integer(0.into())));
    }
    Ok(CriticalDensity::from_s(IsolatedRoot::largest(s_poly)?))
}

/// `1 - 1/λ(T_f(H))²` for one labeling.
pub fn labeling_density(graph: &PatternGraph, labeling: &ProperLabeling) -> Result<CriticalDensity> {
    s_to_density(&path_tree_s_poly(graph, labeling)?)
}

#[derive(Clone, Debug)]
pub struct StarBound {
    pub density: CriticalDensity,
    pub interval: Interval,
    pub labeling: ProperLabeling,
    pub labelings_examined: usize,
    /// Set when the labelings were sampled rather than enumerated.
    pub heuristic: bool,
}

#[derive(Clone, Debug)]
pub struct StarBoundOptions {
    pub labeling_cap: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for StarBoundOptions {
    fn default() -> Self {
        StarBoundOptions {
            labeling_cap: LABELING_CAP,
            samples: 2_000,
            seed: 0,
        }
    }
}

/// A uniformly grown random proper labeling.
pub fn random_proper_labeling(graph: &PatternGraph, rng: &mut ChaCha8Rng) -> ProperLabeling {
    let n = graph.n();
    let mut used = vec![false; n + 1];
    let start = *graph.vertices().collect::<Vec<_>>().choose(rng).expect("nonempty graph");
    let mut order = vec![start];
    used[start] = true;
    while order.len() < n {
        let mut frontier: Vec<usize> = order
            .iter()
            .flat_map(|&v| graph.neighbors(v).iter().copied())
            .filter(|&w| !used[w])
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        let &v = frontier.choose(rng).expect("graph is connected");
        used[v] = true;
        order.push(v);
    }
    ProperLabeling::new(graph, order).expect("grown along edges")
}

pub fn star_lower_bound(graph: &PatternGraph, tol: &Rational) -> Result<StarBound> {
    star_lower_bound_with(graph, tol, &StarBoundOptions::default())
}

/// `max_f (1 - 1/λ(T_f(H))²)` over proper labelings, ties to the lexicographically
/// smallest labeling.
pub fn star_lower_bound_with(graph: &PatternGraph, tol: &Rational, opts: &StarBoundOptions) -> Result<StarBound> {
    graph.require_connected()?;
    if graph.n() == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    let mut labelings: Vec<ProperLabeling> = proper_labelings(graph)?.take(opts.labeling_cap + 1).collect();
    let heuristic = labelings.len() > opts.labeling_cap;
    if heuristic {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        labelings = (0..opts.samples).map(|_| random_proper_labeling(graph, &mut rng)).collect();
        labelings.sort_by(|a, b| a.order().cmp(b.order()));
        labelings.dedup();
    }
    let polys: Vec<Poly> = labelings
        .par_iter()
        .map(|f| path_tree_s_poly(graph, f))
        .collect::<Result<_>>()?;
    let (best_index, density) = best_by_poly(&polys)?;
    let interval = density.interval(tol);
    Ok(StarBound {
        density,
        interval,
        labeling: labelings[best_index].clone(),
        labelings_examined: labelings.len(),
        heuristic,
    })
}

/// Index of the first polynomial whose density is maximal, computing each distinct
/// polynomial once.
fn best_by_poly(polys: &[Poly]) -> Result<(usize, CriticalDensity)> {
    let mut first: HashMap<&Poly, usize> = HashMap::new();
    let mut distinct: Vec<usize> = Vec::new();
    for (i, p) in polys.iter().enumerate() {
        first.entry(p).or_insert_with(|| {
            distinct.push(i);
            i
        });
    }
    let densities: Vec<CriticalDensity> = distinct
        .par_iter()
        .map(|&i| s_to_density(&polys[i]))
        .collect::<Result<_>>()?;
    let mut best = 0usize;
    for k in 1..distinct.len() {
        if densities[k].cmp_density(&densities[best]) == Ordering::Greater {
            best = k;
        }
    }
    Ok((distinct[best], densities[best].clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarCheck {
    PassesThisLabeling,
    FailsThisLabeling,
}

impl fmt::Display for StarCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StarCheck::PassesThisLabeling => "PassesThisLabeling",
            StarCheck::FailsThisLabeling => "FailsThisLabeling",
        })
    }
}

/// Runs the tree decision on `T_f(H)` with lifted densities.
pub fn star_necessary_condition_report(
    graph: &PatternGraph,
    gamma: &EdgeDensityAssignment,
    labeling: &ProperLabeling,
) -> Result<(StarCheck, TreeDecision)> {
    let t = monotone_path_tree(graph, labeling, Some(gamma))?;
    let tree = t.to_graph();
    let lifted = t.lifted_densities().expect("weights supplied");
    let d = decide_tree(&tree, &lifted)?;
    let check = if d.is_ensured() {
        StarCheck::PassesThisLabeling
    } else {
        StarCheck::FailsThisLabeling
    };
    Ok((check, d))
}

pub fn star_necessary_condition(
    graph: &PatternGraph,
    gamma: &EdgeDensityAssignment,
    labeling: &ProperLabeling,
) -> Result<StarCheck> {
    Ok(star_necessary_condition_report(graph, gamma, labeling)?.0)
}

/// `d_s(n, m) = 1 - 1/(n + m - 1)`.
pub fn bipartite_star_density(n: usize, m: usize) -> Rational {
    assert!(n >= 1 && m >= 1);
    Rational::one() - ratio(1, (n + m - 1) as i64)
}

/// The same value from `d_s(1,1) = 0` and `d_s(n, m) = 1/(2 - d_s(n, m - 1))`.
pub fn bipartite_star_density_recursive(n: usize, m: usize) -> Rational {
    assert!(n >= 1 && m >= 1);
    match (n, m) {
        (1, 1) => int(0),
        (_, 1) => bipartite_star_density_recursive(1, n),
        _ => (int(2) - bipartite_star_density_recursive(n, m - 1)).recip(),
    }
}

/// Largest `n + m` accepted by [`verify_bt1`].
pub const BT1_CAP: usize = 8;

/// Whether `|λ(T_f(K_{n,m}))² - (n + m - 1)| <= tol` for every proper labeling `f`.
pub fn verify_bt1(n: usize, m: usize, tol: &Rational) -> Result<bool> {
    if n == 0 || m == 0 {
        return Err(Error::DegenerateGraph("both sides of K_{n,m} need a vertex".into()));
    }
    if n + m > BT1_CAP {
        return Err(Error::SizeLimit {
            what: "n + m for the bipartite check",
            limit: BT1_CAP as u64,
            actual: (n + m) as u64,
        });
    }
    let g = catalog::complete_bipartite(n, m);
    let labelings: Vec<ProperLabeling> = proper_labelings(&g)?.collect();
    let polys: Vec<Poly> = labelings
        .par_iter()
        .map(|f| path_tree_s_poly(&g, f))
        .collect::<Result<_>>()?;
    let mut distinct: Vec<&Poly> = polys.iter().collect();
    distinct.sort();
    distinct.dedup();
    let target = Rational::from_integer(((n + m - 1) as i64).into());
    let lo = &target - tol;
    let hi = &target + tol;
    let ok: Vec<bool> = distinct
        .par_iter()
        .map(|p| -> Result<bool> {
            let s = IsolatedRoot::largest(p)?;
            Ok(s.cmp_rational(&lo) != Ordering::Less && s.cmp_rational(&hi) != Ordering::Greater)
        })
        .collect::<Result<_>>()?;
    Ok(ok.into_iter().all(|b| b))
}

/// The bow-tie construction: center cluster `{c1, c2}`, outer clusters `{a_i, b_i}`.
pub fn bow_tie_reconstruction() -> WeightedBlowupGraph {
    let h = catalog::bow_tie();
    let mut clusters = vec![vec![("c1".to_string(), ratio(1, 2)), ("c2".to_string(), ratio(1, 2))]];
    for i in 2..=5 {
        clusters.push(vec![(format!("a{i}"), ratio(3, 10)), (format!("b{i}"), ratio(7, 10))]);
    }
    let c = |k| VertexRef::new(1, k);
    let a = |i| VertexRef::new(i, 0);
    let b = |i| VertexRef::new(i, 1);
    let missing = [
        (c(0), a(2)),
        (c(0), a(3)),
        (c(1), a(4)),
        (c(1), a(5)),
        (b(2), b(3)),
        (b(4), b(5)),
    ];
    WeightedBlowupGraph::exact_from_complement(h, clusters, &missing).expect("valid construction")
}

/// The bow-tie base densities: 17/20 on the center edges, 51/100 on the outer ones.
pub fn bow_tie_base_densities() -> EdgeDensityAssignment {
    let h = catalog::bow_tie();
    let map = h
        .edges()
        .iter()
        .map(|&e| (e, if e.contains(1) { ratio(17, 20) } else { ratio(51, 100) }))
        .collect();
    EdgeDensityAssignment::new(&h, map).expect("densities in range")
}

/// Whether every labeling passes the star condition at the bow-tie base densities,
/// so no star decomposition reaches them.
pub fn star_decomposition_cannot_match_bowtie() -> Result<bool> {
    let h = catalog::bow_tie();
    let gamma = bow_tie_base_densities();
    let labelings: Vec<ProperLabeling> = proper_labelings(&h)?.collect();
    let checks: Vec<StarCheck> = labelings
        .par_iter()
        .map(|f| star_necessary_condition(&h, &gamma, f))
        .collect::<Result<_>>()?;
    Ok(checks.iter().all(|c| *c == StarCheck::PassesThisLabeling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_decision::dcrit_tree;

    fn tol() -> Rational {
        ratio(1, 1_000_000_000)
    }

    #[test]
    fn path_tree_examples() {
        let k3 = catalog::complete(3);
        let f = ProperLabeling::new(&k3, vec![1, 2, 3]).unwrap();
        let t = monotone_path_tree(&k3, &f, None).unwrap();
        assert_eq!(t.paths(), &[vec![1], vec![1, 2], vec![1, 2, 3], vec![1, 3]]);
        assert_eq!(catalog::tree_canonical_form(&t.to_graph()), catalog::tree_canonical_form(&catalog::path(4)));
        // K_{2,2} with parts {1,2}, {3,4}; alternating labeling a1 b1 a2 b2
        let k22 = catalog::complete_bipartite(2, 2);
        let f = ProperLabeling::new(&k22, vec![1, 3, 2, 4]).unwrap();
        let t = monotone_path_tree(&k22, &f, None).unwrap();
        assert_eq!(t.node_count(), 5);
        assert!(t.paths().contains(&vec![1, 3, 2, 4]));
        assert!(t.paths().contains(&vec![1, 4]));
        assert_eq!(catalog::tree_canonical_form(&t.to_graph()), catalog::tree_canonical_form(&catalog::path(5)));
        assert_eq!(t.parent(1), None);
        assert!(t.to_text().starts_with("# node 1: path (1)\n"));
    }

    #[test]
    fn path_tree_of_tree_is_isomorphic() {
        let t = catalog::tree_from_prufer(7, &[2, 2, 5, 5, 3]);
        let want = catalog::tree_canonical_form(&t);
        for f in proper_labelings(&t).unwrap().step_by(7) {
            let m = monotone_path_tree(&t, &f, None).unwrap();
            assert_eq!(catalog::tree_canonical_form(&m.to_graph()), want);
        }
    }

    #[test]
    fn lifted_weights() {
        let k3 = catalog::complete(3);
        let gamma = EdgeDensityAssignment::from_values(&k3, &[ratio(1, 2), ratio(2, 3), ratio(3, 4)]).unwrap();
        let f = ProperLabeling::new(&k3, vec![1, 2, 3]).unwrap();
        let t = monotone_path_tree(&k3, &f, Some(&gamma)).unwrap();
        let lifted = t.lifted_densities().unwrap();
        // node 3 = path (1,2,3) hangs off node 2 through pattern edge 2-3
        assert_eq!(lifted.get(Edge(2, 3)), &ratio(3, 4));
        assert_eq!(lifted.get(Edge(1, 4)), &ratio(2, 3));
    }

    #[test]
    fn star_bounds() {
        let k3 = star_lower_bound(&catalog::complete(3), &tol()).unwrap();
        assert!((k3.interval.midpoint_f64() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
        assert!(!k3.heuristic);
        assert_eq!(k3.labelings_examined, 6);
        assert_eq!(k3.labeling.order(), &[1, 2, 3]);
        let k23 = star_lower_bound(&catalog::complete_bipartite(2, 3), &tol()).unwrap();
        assert_eq!(k23.interval, Interval::exact(ratio(3, 4)));
        let t = catalog::tree_from_prufer(6, &[1, 1, 4, 4]);
        let sb = star_lower_bound(&t, &tol()).unwrap();
        assert_eq!(sb.density.cmp_density(&crate::tree_decision::tree_critical_density(&t).unwrap()), Ordering::Equal);
        let c4 = star_lower_bound(&catalog::cycle(4), &tol()).unwrap();
        assert_eq!(c4.interval, Interval::exact(ratio(2, 3)));
        assert_eq!(dcrit_tree(&catalog::path(5), &tol()).unwrap(), Interval::exact(ratio(2, 3)));
    }

    #[test]
    fn sampling_fallback_is_flagged() {
        let opts = StarBoundOptions {
            labeling_cap: 3,
            samples: 20,
            seed: 5,
        };
        let b = star_lower_bound_with(&catalog::complete(4), &tol(), &opts).unwrap();
        assert!(b.heuristic);
        assert!(b.labelings_examined <= 20);
    }

    #[test]
    fn necessary_condition() {
        let k3 = catalog::complete(3);
        for f in proper_labelings(&k3).unwrap() {
            let low = EdgeDensityAssignment::homogeneous(&k3, ratio(6, 10)).unwrap();
            assert_eq!(star_necessary_condition(&k3, &low, &f).unwrap(), StarCheck::FailsThisLabeling);
            let high = EdgeDensityAssignment::homogeneous(&k3, ratio(63, 100)).unwrap();
            assert_eq!(star_necessary_condition(&k3, &high, &f).unwrap(), StarCheck::PassesThisLabeling);
        }
    }

    #[test]
    fn bipartite_formula() {
        assert_eq!(bipartite_star_density(1, 1), int(0));
        assert_eq!(bipartite_star_density(2, 3), ratio(3, 4));
        for k in 1..8 {
            assert_eq!(bipartite_star_density(1, k), Rational::one() - ratio(1, k as i64));
        }
        for n in 1..6 {
            for m in 1..6 {
                assert_eq!(bipartite_star_density(n, m), bipartite_star_density_recursive(n, m));
            }
        }
    }

    #[test]
    fn bt1_small_cases() {
        assert!(verify_bt1(2, 2, &tol()).unwrap());
        assert!(verify_bt1(1, 3, &tol()).unwrap());
        assert!(verify_bt1(2, 3, &tol()).unwrap());
        assert!(matches!(verify_bt1(5, 4, &tol()), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn bow_tie() {
        let b = bow_tie_reconstruction();
        let d = b.densities();
        assert_eq!(d[&Edge(1, 2)].exact(), Some(&ratio(17, 20)));
        assert_eq!(d[&Edge(2, 3)].exact(), Some(&ratio(51, 100)));
        assert!(b.find_transversal().is_none());
        b.certify_construction(&bow_tie_base_densities()).unwrap();
        assert!(star_decomposition_cannot_match_bowtie().unwrap());
    }
}
