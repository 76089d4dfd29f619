//! Brute-force cross-checks: an unpruned transversal search, a grid search for
//! transversal-free weighted constructions, and an empirical critical-density probe.
//!
//! The construction search runs over cluster-size vectors in lexicographic order
//! (the configuration index). For each size vector it enumerates the minimal sets of
//! missing cross pairs that meet every transversal, up to permuting vertices inside
//! clusters. The canonical form of such a set is the smallest bitmask over all
//! within-cluster permutations, where bit `k` is the `k`-th pair in the order: pattern
//! edges ascending, then positions in the lower cluster, then in the upper. Weights
//! `k/q` with `k >= 1` are then searched cluster by cluster in breadth-first order.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::{Transversal, VertexRef, WeightedBlowupGraph};
use crate::error::{Error, Result};
use crate::graph::{EdgeDensityAssignment, PatternGraph};
use crate::number::{self, int, Interval, Rational};

/// Largest product of cluster sizes for the unpruned search.
pub const ORACLE_PRODUCT_CAP: u64 = 1_000_000;
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// Exhaustive nested-loop transversal search with no pruning.
pub fn oracle_find_transversal(b: &WeightedBlowupGraph) -> Result<Option<Transversal>> {
    let sizes = b.cluster_sizes();
    let product = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64).filter(|&p| p <= ORACLE_PRODUCT_CAP));
    let Some(_) = product else {
        return Err(Error::SizeLimit {
            what: "product of cluster sizes",
            limit: ORACLE_PRODUCT_CAP,
            actual: sizes.iter().fold(1u64, |acc, &s| acc.saturating_mul(s as u64)),
        });
    };
    let mut choice = vec![0usize; sizes.len()];
    loop {
        let t = Transversal { choice: choice.clone() };
        if t.is_valid(b) {
            return Ok(Some(t));
        }
        let mut k = 0;
        while k < sizes.len() && choice[k] + 1 == sizes[k] {
            choice[k] = 0;
            k += 1;
        }
        if k == sizes.len() {
            return Ok(None);
        }
        choice[k] += 1;
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub cluster_size_bounds: Vec<usize>,
    pub weight_grid_denominator: u32,
    pub density_floor: EdgeDensityAssignment,
    pub budget: u64,
}

impl SearchConfig {
    /// Cluster sizes bounded by the pattern degrees.
    pub fn new(graph: &PatternGraph, floor: EdgeDensityAssignment, q: u32) -> Self {
        SearchConfig {
            cluster_size_bounds: graph.vertices().map(|v| graph.degree(v).max(1)).collect(),
            weight_grid_denominator: q,
            density_floor: floor,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self, graph: &PatternGraph) -> Result<()> {
        if self.cluster_size_bounds.len() != graph.n() {
            return Err(Error::Validation(format!(
                "{} cluster bounds for {} vertices",
                self.cluster_size_bounds.len(),
                graph.n()
            )));
        }
        if self.cluster_size_bounds.contains(&0) {
            return Err(Error::Validation("cluster bounds must be at least 1".into()));
        }
        if self.weight_grid_denominator == 0 {
            return Err(Error::Validation("grid denominator must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Validation("budget must be positive".into()));
        }
        Ok(())
    }
}

/// One line of search progress.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressRecord {
    pub config: usize,
    pub sizes: Vec<usize>,
    pub verdict: String,
    pub complements: usize,
    pub nodes: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub densities: Option<BTreeMap<String, String>>,
}

/// Cluster-size vectors in lexicographic order; the position is the configuration index.
pub fn size_vectors(bounds: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![1usize; bounds.len()];
    loop {
        out.push(cur.clone());
        let mut k = bounds.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < bounds[k] {
                cur[k] += 1;
                for c in &mut cur[k + 1..] {
                    *c = 1;
                }
                break;
            }
        }
    }
}

pub fn oracle_search_construction(graph: &PatternGraph, cfg: &SearchConfig) -> Result<Option<WeightedBlowupGraph>> {
    oracle_search_construction_with(graph, cfg, 0, &mut |_| {})
}

/// Searches configurations from index `start` on, reporting each finished one.
pub fn oracle_search_construction_with(
    graph: &PatternGraph,
    cfg: &SearchConfig,
    start: usize,
    on_record: &mut dyn FnMut(&ProgressRecord),
) -> Result<Option<WeightedBlowupGraph>> {
    graph.require_connected()?;
    cfg.validate(graph)?;
    let q = cfg.weight_grid_denominator as i64;
    let q2 = Rational::from_integer((q * q).into());
    let caps: Vec<i64> = graph
        .edges()
        .iter()
        .map(|&e| {
            number::floor(&(cfg.density_floor.deficit(e) * &q2))
                .to_i64()
                .expect("bounded by q^2")
        })
        .collect();
    let sizes_all = size_vectors(&cfg.cluster_size_bounds);
    let mut used = 0u64;
    let batch = rayon::current_num_threads().max(1);
    let mut idx = start;
    while idx < sizes_all.len() {
        let end = (idx + batch).min(sizes_all.len());
        let remaining = cfg.budget - used;
        let results: Vec<Result<Partition>> = (idx..end)
            .into_par_iter()
            .map(|k| search_sizes(graph, &sizes_all[k], q, &caps, remaining))
            .collect();
        for (k, res) in (idx..end).zip(results) {
            let part = res?;
            used = used.saturating_add(part.nodes);
            if part.exhausted || used > cfg.budget {
                return Err(Error::BudgetExhausted(cfg.budget));
            }
            let found = match part.found {
                Some((mask, weights)) => {
                    let b = emit(graph, &part.layout, mask, &weights, q)?;
                    b.certify_construction(&cfg.density_floor)?;
                    Some(b)
                }
                None => None,
            };
            on_record(&ProgressRecord {
                config: k,
                sizes: sizes_all[k].clone(),
                verdict: if found.is_some() { "found" } else { "none" }.into(),
                complements: part.complements,
                nodes: part.nodes,
                densities: found.as_ref().map(|b| {
                    b.densities()
                        .iter()
                        .map(|(e, d)| (e.to_string(), d.exact().map_or_else(|| d.to_f64().to_string(), |x| x.to_string())))
                        .collect()
                }),
            });
            if found.is_some() {
                return Ok(found);
            }
        }
        idx = end;
    }
    Ok(None)
}

/// Pair numbering for one size vector.
struct Layout {
    sizes: Vec<usize>,
    /// per pattern edge `(i, j)`: first pair id
    offset: Vec<usize>,
    edges: Vec<(usize, usize)>,
    pairs: usize,
    /// breadth-first cluster order and, per position, edges back to earlier clusters
    order: Vec<usize>,
    back: Vec<Vec<usize>>,
}

impl Layout {
    fn new(graph: &PatternGraph, sizes: &[usize]) -> Self {
        let edges: Vec<(usize, usize)> = graph.edges().iter().map(|e| (e.0, e.1)).collect();
        let mut offset = Vec::with_capacity(edges.len());
        let mut pairs = 0;
        for &(i, j) in &edges {
            offset.push(pairs);
            pairs += sizes[i - 1] * sizes[j - 1];
        }
        let mut incident = vec![Vec::new(); graph.n() + 1];
        for (k, &(i, j)) in edges.iter().enumerate() {
            incident[i].push((k, j));
            incident[j].push((k, i));
        }
        let order = graph.bfs_order(1);
        let mut placed = vec![false; graph.n() + 1];
        let mut back = Vec::with_capacity(order.len());
        for &v in &order {
            back.push(incident[v].iter().filter(|(_, w)| placed[*w]).map(|&(k, _)| k).collect());
            placed[v] = true;
        }
        Layout {
            sizes: sizes.to_vec(),
            offset,
            edges,
            pairs,
            order,
            back,
        }
    }

    /// Pair id of `(p in cluster i, r in cluster j)` for pattern edge `k = (i, j)`, `i < j`.
    fn pair(&self, k: usize, p: usize, r: usize) -> usize {
        let (_, j) = self.edges[k];
        self.offset[k] + p * self.sizes[j - 1] + r
    }

    fn decode(&self, id: usize) -> (VertexRef, VertexRef) {
        let k = self.offset.partition_point(|&o| o <= id) - 1;
        let (i, j) = self.edges[k];
        let local = id - self.offset[k];
        let w = self.sizes[j - 1];
        (VertexRef::new(i, local / w), VertexRef::new(j, local % w))
    }

    /// A transversal avoiding `mask`, as the pair ids it uses (one per pattern edge).
    fn unhit_transversal(&self, mask: u128) -> Option<Vec<usize>> {
        let n = self.order.len();
        let mut choice = vec![usize::MAX; n + 1];
        let mut next = vec![0usize; n];
        let mut k = 0;
        loop {
            if k == n {
                return Some(
                    (0..self.edges.len())
                        .map(|e| {
                            let (i, j) = self.edges[e];
                            self.pair(e, choice[i], choice[j])
                        })
                        .collect(),
                );
            }
            let v = self.order[k];
            let mut found = false;
            while next[k] < self.sizes[v - 1] {
                let p = next[k];
                next[k] += 1;
                let ok = self.back[k].iter().all(|&e| {
                    let (i, j) = self.edges[e];
                    let id = if i == v { self.pair(e, p, choice[j]) } else { self.pair(e, choice[i], p) };
                    mask >> id & 1 == 0
                });
                if ok {
                    choice[v] = p;
                    found = true;
                    break;
                }
            }
            if found {
                k += 1;
                if k < n {
                    next[k] = 0;
                }
            } else {
                if k == 0 {
                    return None;
                }
                choice[v] = usize::MAX;
                k -= 1;
            }
        }
    }

    /// Pair-id permutations induced by within-cluster vertex permutations.
    fn symmetries(&self) -> Vec<Vec<usize>> {
        let per_cluster: Vec<Vec<Vec<usize>>> = self.sizes.iter().map(|&s| permutations(s)).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.sizes.len()];
        loop {
            let mut map = vec![0usize; self.pairs];
            for (k, &(i, j)) in self.edges.iter().enumerate() {
                let pi = &per_cluster[i - 1][idx[i - 1]];
                let pj = &per_cluster[j - 1][idx[j - 1]];
                for p in 0..self.sizes[i - 1] {
                    for r in 0..self.sizes[j - 1] {
                        map[self.pair(k, p, r)] = self.pair(k, pi[p], pj[r]);
                    }
                }
            }
            out.push(map);
            let mut c = 0;
            while c < idx.len() && idx[c] + 1 == per_cluster[c].len() {
                idx[c] = 0;
                c += 1;
            }
            if c == idx.len() {
                return out;
            }
            idx[c] += 1;
        }
    }
}

fn permutations(s: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..s).collect();
    let mut out = vec![p.clone()];
    while crate::catalog::next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

fn canonical(mask: u128, syms: &[Vec<usize>]) -> u128 {
    syms.iter()
        .map(|map| {
            let mut m = mask;
            let mut out = 0u128;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                m &= m - 1;
                out |= 1 << map[b];
            }
            out
        })
        .min()
        .unwrap_or(mask)
}

/// The node budget ran out.
struct OutOfBudget;

type Step<T> = std::result::Result<T, OutOfBudget>;

/// A complement and its grid weights.
type Hit = (u128, Vec<Vec<i64>>);

struct Partition {
    layout: Layout,
    found: Option<Hit>,
    complements: usize,
    nodes: u64,
    exhausted: bool,
}

struct Search<'a> {
    layout: &'a Layout,
    syms: Vec<Vec<usize>>,
    q: i64,
    caps: &'a [i64],
    cap_nodes: u64,
    nodes: u64,
    visited: HashSet<u128>,
    complements: usize,
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        self.nodes <= self.cap_nodes
    }

    /// Lower bound on the missing count per pattern edge must respect the caps.
    fn plausible(&self, mask: u128) -> bool {
        self.layout.edges.iter().enumerate().all(|(k, &(i, j))| {
            let lo = self.layout.offset[k];
            let width = self.layout.sizes[i - 1] * self.layout.sizes[j - 1];
            let count = ((mask >> lo) & ((1u128 << width) - 1)).count_ones() as i64;
            count <= self.caps[k]
        })
    }

    fn is_minimal(&self, mask: u128) -> bool {
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros();
            m &= m - 1;
            if self.layout.unhit_transversal(mask & !(1u128 << b)).is_none() {
                return false;
            }
        }
        true
    }

    /// Depth-first over missing-pair sets.
    fn complements(&mut self, mask: u128) -> Step<Option<Hit>> {
        if !self.tick() {
            return Err(OutOfBudget);
        }
        match self.layout.unhit_transversal(mask) {
            None => {
                if !self.is_minimal(mask) {
                    return Ok(None);
                }
                self.complements += 1;
                Ok(self.weights(mask)?.map(|w| (mask, w)))
            }
            Some(pairs) => {
                for id in pairs {
                    let next = mask | 1u128 << id;
                    if !self.plausible(next) {
                        continue;
                    }
                    let c = canonical(next, &self.syms);
                    if !self.visited.insert(c) {
                        continue;
                    }
                    if let Some(hit) = self.complements(c)? {
                        return Ok(Some(hit));
                    }
                }
                Ok(None)
            }
        }
    }

    /// Grid weights for a fixed complement, clusters in breadth-first order.
    fn weights(&mut self, mask: u128) -> Step<Option<Vec<Vec<i64>>>> {
        let n = self.layout.order.len();
        let mut w: Vec<Vec<i64>> = self.layout.sizes.iter().map(|&s| vec![0; s]).collect();
        if self.assign(mask, 0, n, &mut w)? {
            Ok(Some(w))
        } else {
            Ok(None)
        }
    }

    fn assign(&mut self, mask: u128, depth: usize, n: usize, w: &mut Vec<Vec<i64>>) -> Step<bool> {
        if depth == n {
            return Ok(true);
        }
        let v = self.layout.order[depth];
        let s = self.layout.sizes[v - 1];
        // For each back edge: coefficient of each vertex of v and the cap.
        let mut constraints: Vec<(Vec<i64>, i64)> = Vec::new();
        for &e in &self.layout.back[depth] {
            let (i, j) = self.layout.edges[e];
            let other = if i == v { j } else { i };
            let mut c = vec![0i64; s];
            for (p, cp) in c.iter_mut().enumerate() {
                for r in 0..self.layout.sizes[other - 1] {
                    let id = if i == v { self.layout.pair(e, p, r) } else { self.layout.pair(e, r, p) };
                    if mask >> id & 1 == 1 {
                        *cp += w[other - 1][r];
                    }
                }
            }
            constraints.push((c, self.caps[e]));
        }
        let mut comp = vec![0i64; s];
        self.compose(mask, depth, n, w, v, &constraints, &mut comp, 0, self.q, &mut vec![0; constraints.len()])
    }

    #[allow(clippy::too_many_arguments)]
    fn compose(
        &mut self,
        mask: u128,
        depth: usize,
        n: usize,
        w: &mut Vec<Vec<i64>>,
        v: usize,
        constraints: &[(Vec<i64>, i64)],
        comp: &mut Vec<i64>,
        slot: usize,
        left: i64,
        partial: &mut Vec<i64>,
    ) -> Step<bool> {
        let s = comp.len();
        if slot + 1 == s {
            comp[slot] = left;
            if constraints
                .iter()
                .zip(partial.iter())
                .all(|((c, cap), p)| p + c[slot] * left <= *cap)
            {
                if !self.tick() {
                    return Err(OutOfBudget);
                }
                w[v - 1].clone_from(comp);
                if self.assign(mask, depth + 1, n, w)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        let slots_after = (s - slot - 1) as i64;
        for k in 1..=(left - slots_after) {
            let rest = left - k;
            // remaining weight lands at least at the cheapest remaining coefficient
            let ok = constraints.iter().zip(partial.iter()).all(|((c, cap), p)| {
                let min_rest = c[slot + 1..].iter().min().copied().unwrap_or(0);
                p + c[slot] * k + min_rest * rest <= *cap
            });
            if !ok {
                continue;
            }
            comp[slot] = k;
            for (pi, (c, _)) in partial.iter_mut().zip(constraints) {
                *pi += c[slot] * k;
            }
            let r = self.compose(mask, depth, n, w, v, constraints, comp, slot + 1, rest, partial);
            for (pi, (c, _)) in partial.iter_mut().zip(constraints) {
                *pi -= c[slot] * k;
            }
            if r? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn search_sizes(graph: &PatternGraph, sizes: &[usize], q: i64, caps: &[i64], cap_nodes: u64) -> Result<Partition> {
    let layout = Layout::new(graph, sizes);
    if layout.pairs > 128 {
        return Err(Error::SizeLimit {
            what: "cross pairs per configuration",
            limit: 128,
            actual: layout.pairs as u64,
        });
    }
    if sizes.iter().any(|&s| s as i64 > q) {
        // every vertex needs weight at least 1/q
        return Ok(Partition {
            layout,
            found: None,
            complements: 0,
            nodes: 0,
            exhausted: false,
        });
    }
    let syms = layout.symmetries();
    let mut search = Search {
        layout: &layout,
        syms,
        q,
        caps,
        cap_nodes,
        nodes: 0,
        visited: HashSet::new(),
        complements: 0,
    };
    let outcome = search.complements(0);
    let (nodes, complements) = (search.nodes, search.complements);
    Ok(match outcome {
        Ok(found) => Partition {
            layout,
            found,
            complements,
            nodes,
            exhausted: false,
        },
        Err(OutOfBudget) => Partition {
            layout,
            found: None,
            complements,
            nodes,
            exhausted: true,
        },
    })
}

fn emit(graph: &PatternGraph, layout: &Layout, mask: u128, weights: &[Vec<i64>], q: i64) -> Result<WeightedBlowupGraph> {
    let clusters = weights
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.iter()
                .enumerate()
                .map(|(p, &k)| (format!("{}:{p}", i + 1), Rational::new(k.into(), q.into())))
                .collect()
        })
        .collect();
    let mut missing = Vec::new();
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        m &= m - 1;
        missing.push(layout.decode(b));
    }
    WeightedBlowupGraph::exact_from_complement(graph.clone(), clusters, &missing)
}

/// Bisection on the homogeneous floor over dyadic points of `[0, 1]`: `lo` is the
/// largest probe with a construction, `hi` the smallest probe exhausted without one.
pub fn oracle_dcrit_estimate(graph: &PatternGraph, q: u32, tol: &Rational, budget: u64) -> Result<Interval> {
    let probe = |d: &Rational| -> Result<bool> {
        let floor = EdgeDensityAssignment::homogeneous(graph, d.clone())?;
        let mut cfg = SearchConfig::new(graph, floor, q);
        cfg.budget = budget;
        Ok(oracle_search_construction(graph, &cfg)?.is_some())
    };
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    if probe(&hi)? {
        return Err(Error::Invariant("a construction met density 1 on every edge".into()));
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / int(2);
        if probe(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Interval::new(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::gacs_tree_construction;
    use crate::catalog;
    use crate::number::ratio;
    use crate::star::bow_tie_reconstruction;

    #[test]
    fn unpruned_search() {
        let p3 = catalog::path(3);
        assert!(oracle_find_transversal(&gacs_tree_construction(&p3).unwrap()).unwrap().is_none());
        let complete = WeightedBlowupGraph::complete(&p3, &[2, 2, 2]).unwrap();
        assert!(oracle_find_transversal(&complete).unwrap().unwrap().is_valid(&complete));
        assert!(oracle_find_transversal(&bow_tie_reconstruction()).unwrap().is_none());
        let big = WeightedBlowupGraph::complete(&catalog::path(3), &[101, 100, 100]).unwrap();
        assert!(matches!(oracle_find_transversal(&big), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn size_vector_order() {
        assert_eq!(
            size_vectors(&[2, 1, 2]),
            vec![vec![1, 1, 1], vec![1, 1, 2], vec![2, 1, 1], vec![2, 1, 2]]
        );
    }

    #[test]
    fn triangle_constructions() {
        let k3 = catalog::complete(3);
        let floor = EdgeDensityAssignment::homogeneous(&k3, ratio(6, 10)).unwrap();
        let cfg = SearchConfig::new(&k3, floor.clone(), 10);
        let b = oracle_search_construction(&k3, &cfg).unwrap().expect("0.6 is below critical");
        assert!(b.meets(&floor));
        assert!(b.find_transversal().is_none());
        let floor = EdgeDensityAssignment::homogeneous(&k3, ratio(65, 100)).unwrap();
        let cfg = SearchConfig::new(&k3, floor, 20);
        assert!(oracle_search_construction(&k3, &cfg).unwrap().is_none());
        let floor = EdgeDensityAssignment::homogeneous(&k3, ratio(61, 100)).unwrap();
        assert!(oracle_search_construction(&k3, &SearchConfig::new(&k3, floor, 50)).unwrap().is_some());
    }

    #[test]
    fn budget_is_reported() {
        let k3 = catalog::complete(3);
        let floor = EdgeDensityAssignment::homogeneous(&k3, ratio(65, 100)).unwrap();
        let mut cfg = SearchConfig::new(&k3, floor, 20);
        cfg.budget = 1;
        assert_eq!(oracle_search_construction(&k3, &cfg).unwrap_err(), Error::BudgetExhausted(1));
    }

    #[test]
    fn progress_and_resume() {
        let p3 = catalog::path(3);
        let floor = EdgeDensityAssignment::homogeneous(&p3, ratio(1, 2)).unwrap();
        let cfg = SearchConfig::new(&p3, floor, 4);
        let mut records = Vec::new();
        let b = oracle_search_construction_with(&p3, &cfg, 0, &mut |r| records.push(r.clone())).unwrap();
        assert!(b.is_some());
        let last = records.last().unwrap();
        assert_eq!(last.verdict, "found");
        assert_eq!(last.sizes, vec![1, 2, 1]);
        let mut again = Vec::new();
        let b2 = oracle_search_construction_with(&p3, &cfg, last.config, &mut |r| again.push(r.clone())).unwrap();
        assert_eq!(b, b2);
        assert_eq!(again, vec![last.clone()]);
    }

    #[test]
    fn path_estimate() {
        let iv = oracle_dcrit_estimate(&catalog::path(3), 20, &ratio(1, 50), DEFAULT_BUDGET).unwrap();
        assert!(iv.contains(&ratio(1, 2)));
        assert!(iv.width() <= ratio(1, 50));
    }
}
