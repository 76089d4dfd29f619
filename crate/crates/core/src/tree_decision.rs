//! The leaf-reduction decision procedure for trees and exact tree critical densities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeDensityAssignment, PatternGraph};
use crate::number::{self, int, Interval, Rational};
use crate::polynomials::{
    even_part, matching_polynomial, positive_on_unit_interval, tree_multivariate_matching,
    CriticalDensity, EdgeWeightAssignment, IsolatedRoot, SturmSequence,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Ensured,
    NotEnsured,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Ensured => "Ensured",
            Verdict::NotEnsured => "NotEnsured",
        })
    }
}

/// One leaf removal: the leaf, its neighbor, and the new `r` on the neighbor's edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub removed_leaf: usize,
    pub neighbor: usize,
    pub updated: Vec<(Edge, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecision {
    pub verdict: Verdict,
    pub violating_edge: Option<Edge>,
    pub trace: Vec<TraceStep>,
}

impl TreeDecision {
    pub fn is_ensured(&self) -> bool {
        self.verdict == Verdict::Ensured
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "verdict": self.verdict,
            "violating_edge": self.violating_edge,
            "trace": self.trace.iter().map(|s| json!({
                "step": s.step,
                "removed_leaf": s.removed_leaf,
                "neighbor": s.neighbor,
                "updated": s.updated.iter().map(|(e, r)| json!({
                    "edge": e,
                    "r": r.to_string(),
                    "approx": number::to_f64(r),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for TreeDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        if let Some(e) = self.violating_edge {
            writeln!(f, "violating edge: {e}")?;
        }
        for s in &self.trace {
            write!(f, "step {}: remove leaf {} (neighbor {})", s.step, s.removed_leaf, s.neighbor)?;
            for (e, r) in &s.updated {
                write!(f, "  r'({e}) = {r} (~{})", number::display_decimal(r, 8))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A partially reduced tree, keeping the original vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeState {
    adjacency: BTreeMap<usize, BTreeSet<usize>>,
    r: BTreeMap<Edge, Rational>,
}

impl TreeState {
    pub fn new(tree: &PatternGraph, r: &EdgeWeightAssignment) -> Result<Self> {
        tree.require_tree()?;
        Ok(TreeState {
            adjacency: tree
                .vertices()
                .map(|v| (v, tree.neighbors(v).iter().copied().collect()))
                .collect(),
            r: r.map().clone(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency
            .iter()
            .filter(|(_, nb)| nb.len() == 1)
            .map(|(&v, _)| v)
    }

    pub fn r(&self) -> &BTreeMap<Edge, Rational> {
        &self.r
    }

    /// The lowest edge with `r >= 1`.
    pub fn violating_edge(&self) -> Option<Edge> {
        self.r
            .iter()
            .find(|(_, r)| **r >= Rational::one())
            .map(|(&e, _)| e)
    }

    /// Removes `leaf` and divides every `r` at its neighbor by `1 - r_leaf`.
    pub fn reduce_leaf(&self, leaf: usize) -> Result<(TreeState, TraceStep)> {
        let nb = self
            .adjacency
            .get(&leaf)
            .ok_or(Error::VertexNotInGraph(leaf))?;
        if nb.len() != 1 {
            return Err(Error::NotALeaf(leaf));
        }
        let u = *nb.iter().next().unwrap();
        let leaf_edge = Edge::new(leaf, u);
        let r_leaf = &self.r[&leaf_edge];
        if r_leaf >= &Rational::one() {
            return Err(Error::DivisionByZeroGuard(leaf_edge));
        }
        let factor = (Rational::one() - r_leaf).recip();
        let mut next = self.clone();
        next.adjacency.remove(&leaf);
        next.adjacency.get_mut(&u).unwrap().remove(&leaf);
        next.r.remove(&leaf_edge);
        let mut updated = Vec::new();
        for &w in &next.adjacency[&u] {
            let e = Edge::new(u, w);
            let v = next.r.get_mut(&e).unwrap();
            *v = &*v * &factor;
            updated.push((e, v.clone()));
        }
        let step = TraceStep {
            step: 0,
            removed_leaf: leaf,
            neighbor: u,
            updated,
        };
        Ok((next, step))
    }

    /// Relabels the remaining vertices `1..=k` in increasing order.
    /// Returns the graph, its weights and the original label of each new vertex.
    pub fn to_graph(&self) -> (PatternGraph, EdgeWeightAssignment, Vec<usize>) {
        let labels: Vec<usize> = self.vertices().collect();
        let index: BTreeMap<usize, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
        let g = PatternGraph::new(
            labels.len(),
            self.r.keys().map(|e| (index[&e.0], index[&e.1])),
        )
        .expect("reduced tree is simple");
        let w = EdgeWeightAssignment::new(
            &g,
            self.r
                .iter()
                .map(|(e, r)| (Edge::new(index[&e.0], index[&e.1]), r.clone()))
                .collect(),
        )
        .expect("weights stay nonnegative");
        (g, w, labels)
    }
}

/// One leaf removal on a tree with weights `r`.
pub fn leaf_reduction_step(
    tree: &PatternGraph,
    r: &EdgeWeightAssignment,
    leaf: usize,
) -> Result<TreeState> {
    Ok(TreeState::new(tree, r)?.reduce_leaf(leaf)?.0)
}

fn lowest_leaf(state: &TreeState) -> usize {
    state.leaves().next().expect("a tree with two or more vertices has a leaf")
}

/// Leaf reduction on weights `r = 1 - γ`, removing the leaf picked by `choose`.
pub fn decide_weights_with(
    tree: &PatternGraph,
    r: &EdgeWeightAssignment,
    choose: &mut dyn FnMut(&TreeState) -> usize,
) -> Result<TreeDecision> {
    let mut state = TreeState::new(tree, r)?;
    let mut trace = Vec::new();
    loop {
        if state.vertex_count() <= 1 {
            return Ok(TreeDecision {
                verdict: Verdict::Ensured,
                violating_edge: None,
                trace,
            });
        }
        if let Some(e) = state.violating_edge() {
            return Ok(TreeDecision {
                verdict: Verdict::NotEnsured,
                violating_edge: Some(e),
                trace,
            });
        }
        if state.vertex_count() == 2 {
            return Ok(TreeDecision {
                verdict: Verdict::Ensured,
                violating_edge: None,
                trace,
            });
        }
        let leaf = choose(&state);
        let (next, mut step) = state.reduce_leaf(leaf)?;
        step.step = trace.len() + 1;
        trace.push(step);
        state = next;
    }
}

pub fn decide_weights(tree: &PatternGraph, r: &EdgeWeightAssignment) -> Result<TreeDecision> {
    decide_weights_with(tree, r, &mut lowest_leaf)
}

pub fn decide_tree(tree: &PatternGraph, gamma: &EdgeDensityAssignment) -> Result<TreeDecision> {
    decide_weights(tree, &EdgeWeightAssignment::from_densities(gamma))
}

pub fn decide_tree_with(
    tree: &PatternGraph,
    gamma: &EdgeDensityAssignment,
    choose: &mut dyn FnMut(&TreeState) -> usize,
) -> Result<TreeDecision> {
    decide_weights_with(tree, &EdgeWeightAssignment::from_densities(gamma), choose)
}

/// Whether the reduction verdict agrees with positivity of `F(r, t)` on `[0, 1]`.
pub fn decide_tree_equivalence(tree: &PatternGraph, gamma: &EdgeDensityAssignment) -> Result<bool> {
    let decision = decide_tree(tree, gamma)?;
    let f = tree_multivariate_matching(tree, &EdgeWeightAssignment::from_densities(gamma))?;
    Ok(decision.is_ensured() == positive_on_unit_interval(&f)?)
}

/// The boundary `t*` of the scaling `γ_e = 1 - t r_e`: ensured below, not ensured
/// from `t*` on. Returns `(lo, hi]` with `hi - lo <= tol`, or the exact value when
/// it is rational.
pub fn critical_scaling(tree: &PatternGraph, r: &EdgeWeightAssignment, tol: &Rational) -> Result<Interval> {
    if decide_weights(tree, r)?.is_ensured() {
        return Err(Error::AlreadyEnsured);
    }
    let not_ensured = |t: &Rational| -> Result<bool> { Ok(!decide_weights(tree, &r.scaled(t))?.is_ensured()) };
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / int(2);
        if not_ensured(&mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // t* is the smallest positive root of F(r, t); snap to it when it is rational.
    let f = tree_multivariate_matching(tree, r)?;
    let sturm = SturmSequence::new(&f)?;
    if sturm.count_between(&lo, &hi) == 1 {
        let c = number::simplest_between(&lo, &hi);
        let c = if c == lo { hi.clone() } else { c };
        if f.eval(&c).is_zero() {
            return Ok(Interval::exact(c));
        }
    }
    Ok(Interval::new(lo, hi))
}

/// `d_crit(T) = 1 - 1/λ(T)²`, with `λ²` the largest root of the even part of `M(T, t)`.
pub fn tree_critical_density(tree: &PatternGraph) -> Result<CriticalDensity> {
    tree.require_tree()?;
    if tree.n() == 1 {
        return Ok(CriticalDensity::exact(Rational::zero()));
    }
    let g = even_part(&matching_polynomial(tree)?);
    Ok(CriticalDensity::from_s(IsolatedRoot::largest(&g)?))
}

pub fn dcrit_tree(tree: &PatternGraph, tol: &Rational) -> Result<Interval> {
    Ok(tree_critical_density(tree)?.interval(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::number::ratio;

    fn gamma(g: &PatternGraph, values: &[Rational]) -> EdgeDensityAssignment {
        EdgeDensityAssignment::from_values(g, values).unwrap()
    }

    fn weights(g: &PatternGraph, values: &[Rational]) -> EdgeWeightAssignment {
        EdgeWeightAssignment::new(g, g.edges().iter().copied().zip(values.iter().cloned()).collect()).unwrap()
    }

    #[test]
    fn leaf_steps() {
        let p3 = catalog::path(3);
        let s = leaf_reduction_step(&p3, &weights(&p3, &[ratio(1, 2), ratio(1, 2)]), 3).unwrap();
        assert_eq!(s.r()[&Edge(1, 2)], int(1));
        let s = leaf_reduction_step(&p3, &weights(&p3, &[ratio(2, 5), ratio(2, 5)]), 3).unwrap();
        assert_eq!(s.r()[&Edge(1, 2)], ratio(2, 3));
        // S_3 with center 1
        let s3 = catalog::star(3);
        let s = leaf_reduction_step(&s3, &weights(&s3, &[ratio(1, 4), ratio(1, 4)]), 2).unwrap();
        assert_eq!(s.r()[&Edge(1, 3)], ratio(1, 3));
        let (g, w, labels) = s.to_graph();
        assert_eq!((g.n(), labels), (2, vec![1, 3]));
        assert_eq!(w.get(Edge(1, 2)), &ratio(1, 3));
        assert_eq!(
            leaf_reduction_step(&p3, &weights(&p3, &[ratio(1, 2), ratio(1, 2)]), 2),
            Err(Error::NotALeaf(2))
        );
        assert_eq!(
            leaf_reduction_step(&p3, &weights(&p3, &[int(1), ratio(1, 2)]), 1),
            Err(Error::DivisionByZeroGuard(Edge(1, 2)))
        );
    }

    #[test]
    fn decisions() {
        let p3 = catalog::path(3);
        let d = decide_tree(&p3, &gamma(&p3, &[ratio(1, 2), ratio(1, 2)])).unwrap();
        assert_eq!(d.verdict, Verdict::NotEnsured);
        assert_eq!(d.violating_edge, Some(Edge(2, 3)));
        assert_eq!(d.trace.len(), 1);
        let d = decide_tree(&p3, &gamma(&p3, &[ratio(3, 5), ratio(3, 5)])).unwrap();
        assert!(d.is_ensured());
        let k2 = catalog::path(2);
        let d = decide_tree(&k2, &gamma(&k2, &[int(0)])).unwrap();
        assert_eq!((d.verdict, d.violating_edge), (Verdict::NotEnsured, Some(Edge(1, 2))));
        assert!(d.trace.is_empty());
        let k1 = catalog::single_vertex();
        assert!(decide_tree(&k1, &gamma(&k1, &[])).unwrap().is_ensured());
        let k3 = catalog::complete(3);
        assert_eq!(
            decide_tree(&k3, &EdgeDensityAssignment::homogeneous(&k3, int(1)).unwrap()),
            Err(Error::NotATree)
        );
    }

    #[test]
    fn equivalence_examples() {
        let p3 = catalog::path(3);
        assert!(decide_tree_equivalence(&p3, &gamma(&p3, &[ratio(1, 2), ratio(1, 2)])).unwrap());
        let p4 = catalog::path(4);
        let g = EdgeDensityAssignment::homogeneous(&p4, ratio(2, 3)).unwrap();
        assert!(decide_tree(&p4, &g).unwrap().is_ensured());
        assert!(decide_tree_equivalence(&p4, &g).unwrap());
        let g = EdgeDensityAssignment::homogeneous(&p4, int(1)).unwrap();
        assert!(decide_tree_equivalence(&p4, &g).unwrap());
    }

    #[test]
    fn scaling_boundaries() {
        let tol = ratio(1, 1_000_000_000);
        let p3 = catalog::path(3);
        assert_eq!(
            critical_scaling(&p3, &EdgeWeightAssignment::ones(&p3), &tol).unwrap(),
            Interval::exact(ratio(1, 2))
        );
        let k2 = catalog::path(2);
        assert_eq!(
            critical_scaling(&k2, &EdgeWeightAssignment::ones(&k2), &tol).unwrap(),
            Interval::exact(int(1))
        );
        let p4 = catalog::path(4);
        let iv = critical_scaling(&p4, &EdgeWeightAssignment::ones(&p4), &tol).unwrap();
        assert!(iv.width() <= tol);
        assert!((iv.midpoint_f64() - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-9);
        assert_eq!(
            critical_scaling(&p3, &EdgeWeightAssignment::uniform(&p3, ratio(1, 3)), &tol),
            Err(Error::AlreadyEnsured)
        );
    }

    #[test]
    fn critical_densities() {
        let tol = ratio(1, 1_000_000_000);
        assert_eq!(dcrit_tree(&catalog::star(4), &tol).unwrap(), Interval::exact(ratio(2, 3)));
        assert_eq!(dcrit_tree(&catalog::path(2), &tol).unwrap(), Interval::exact(int(0)));
        let p4 = dcrit_tree(&catalog::path(4), &tol).unwrap();
        assert!((p4.midpoint_f64() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
        assert_eq!(dcrit_tree(&catalog::cycle(3), &tol), Err(Error::NotATree));
    }

    #[test]
    fn json_report() {
        let p3 = catalog::path(3);
        let d = decide_tree(&p3, &gamma(&p3, &[ratio(1, 2), ratio(1, 2)])).unwrap();
        let v = d.to_json();
        assert_eq!(v["verdict"], "NotEnsured");
        assert_eq!(v["violating_edge"], json!([2, 3]));
        assert_eq!(v["trace"][0]["removed_leaf"], 1);
        assert_eq!(v["trace"][0]["updated"][0]["r"], "1");
    }
}
