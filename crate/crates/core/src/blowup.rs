//! Weighted blow-up graphs, their densities and transversals, and explicit
//! transversal-free constructions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeDensityAssignment, PatternGraph, ProperLabeling};
use crate::number::{self, parse_rational, Rational};
use crate::tree_decision::tree_critical_density;

/// Slack for float-mode comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Exact,
    Float,
}

/// An exact or float value, depending on the numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Num {
    Exact(Rational),
    Float(f64),
}

impl Num {
    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(x) => number::to_f64(x),
            Num::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Num::Exact(x) => Some(x),
            Num::Float(_) => None,
        }
    }

    /// `self >= x`, exactly or with [`FLOAT_TOL`] slack.
    pub fn at_least(&self, x: &Rational) -> bool {
        match self {
            Num::Exact(v) => v >= x,
            Num::Float(v) => *v >= number::to_f64(x) - FLOAT_TOL,
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(x) => write!(f, "{x} (= {})", number::display_decimal(x, 10)),
            Num::Float(x) => write!(f, "~{}", number::format_sig(*x, 12)),
        }
    }
}

/// A blow-up vertex: cluster `1..=n` and 0-based position inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexRef {
    pub cluster: usize,
    pub pos: usize,
}

impl VertexRef {
    pub fn new(cluster: usize, pos: usize) -> Self {
        VertexRef { cluster, pos }
    }
}

fn ordered(a: VertexRef, b: VertexRef) -> (VertexRef, VertexRef) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Weights {
    Exact(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

/// One chosen vertex per cluster: `choice[i - 1]` is the position in cluster `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversal {
    pub choice: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedBlowupGraph {
    pattern: PatternGraph,
    ids: Vec<Vec<String>>,
    weights: Weights,
    cross: BTreeSet<(VertexRef, VertexRef)>,
}

impl WeightedBlowupGraph {
    fn build(
        pattern: PatternGraph,
        ids: Vec<Vec<String>>,
        weights: Weights,
        cross: BTreeSet<(VertexRef, VertexRef)>,
    ) -> Result<Self> {
        let b = WeightedBlowupGraph {
            pattern,
            ids,
            weights,
            cross,
        };
        b.validate()?;
        Ok(b)
    }

    /// Exact-mode blow-up from its cross edges.
    pub fn exact(
        pattern: PatternGraph,
        clusters: Vec<Vec<(String, Rational)>>,
        cross: impl IntoIterator<Item = (VertexRef, VertexRef)>,
    ) -> Result<Self> {
        let (ids, w) = clusters.into_iter().map(|c| c.into_iter().unzip()).unzip();
        Self::build(
            pattern,
            ids,
            Weights::Exact(w),
            cross.into_iter().map(|(a, b)| ordered(a, b)).collect(),
        )
    }

    pub fn float(
        pattern: PatternGraph,
        clusters: Vec<Vec<(String, f64)>>,
        cross: impl IntoIterator<Item = (VertexRef, VertexRef)>,
    ) -> Result<Self> {
        let (ids, w) = clusters.into_iter().map(|c| c.into_iter().unzip()).unzip();
        Self::build(
            pattern,
            ids,
            Weights::Float(w),
            cross.into_iter().map(|(a, b)| ordered(a, b)).collect(),
        )
    }

    /// Exact-mode blow-up with every cross pair present except `missing`.
    pub fn exact_from_complement(
        pattern: PatternGraph,
        clusters: Vec<Vec<(String, Rational)>>,
        missing: &[(VertexRef, VertexRef)],
    ) -> Result<Self> {
        let sizes: Vec<usize> = clusters.iter().map(Vec::len).collect();
        let cross = complement_of(&pattern, &sizes, missing);
        Self::exact(pattern, clusters, cross)
    }

    pub fn float_from_complement(
        pattern: PatternGraph,
        clusters: Vec<Vec<(String, f64)>>,
        missing: &[(VertexRef, VertexRef)],
    ) -> Result<Self> {
        let sizes: Vec<usize> = clusters.iter().map(Vec::len).collect();
        let cross = complement_of(&pattern, &sizes, missing);
        Self::float(pattern, clusters, cross)
    }

    /// All cross pairs present, uniform weights `1/size`.
    pub fn complete(pattern: &PatternGraph, sizes: &[usize]) -> Result<Self> {
        let clusters = sizes
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                (0..s)
                    .map(|p| (format!("{}:{}", i + 1, p), number::ratio(1, s.max(1) as i64)))
                    .collect()
            })
            .collect();
        Self::exact_from_complement(pattern.clone(), clusters, &[])
    }

    fn validate(&self) -> Result<()> {
        let n = self.pattern.n();
        if self.ids.len() != n {
            return Err(Error::InvalidBlowup(format!("{} clusters for {n} pattern vertices", self.ids.len())));
        }
        for (i, ids) in self.ids.iter().enumerate() {
            if ids.is_empty() {
                return Err(Error::InvalidBlowup(format!("cluster {} is empty", i + 1)));
            }
        }
        match &self.weights {
            Weights::Exact(w) => {
                for (i, c) in w.iter().enumerate() {
                    if c.iter().any(Signed::is_negative) {
                        return Err(Error::InvalidBlowup(format!("negative weight in cluster {}", i + 1)));
                    }
                    let sum: Rational = c.iter().sum();
                    if !sum.is_one() {
                        return Err(Error::InvalidBlowup(format!("cluster {} has total weight {sum}", i + 1)));
                    }
                }
            }
            Weights::Float(w) => {
                for (i, c) in w.iter().enumerate() {
                    if c.iter().any(|x| !x.is_finite() || *x < 0.0) {
                        return Err(Error::InvalidBlowup(format!("bad weight in cluster {}", i + 1)));
                    }
                    let sum: f64 = c.iter().sum();
                    if (sum - 1.0).abs() > FLOAT_TOL {
                        return Err(Error::InvalidBlowup(format!("cluster {} has total weight {sum}", i + 1)));
                    }
                }
            }
        }
        for &(a, b) in &self.cross {
            for v in [a, b] {
                if v.cluster == 0 || v.cluster > n || v.pos >= self.ids[v.cluster - 1].len() {
                    return Err(Error::InvalidBlowup(format!(
                        "cross edge endpoint ({}, {}) does not exist",
                        v.cluster, v.pos
                    )));
                }
            }
            if !self.pattern.has_edge(a.cluster, b.cluster) {
                return Err(Error::InvalidBlowup(format!(
                    "cross edge between clusters {} and {}, which are not adjacent in the pattern",
                    a.cluster, b.cluster
                )));
            }
        }
        Ok(())
    }

    pub fn pattern(&self) -> &PatternGraph {
        &self.pattern
    }

    pub fn mode(&self) -> NumericMode {
        match self.weights {
            Weights::Exact(_) => NumericMode::Exact,
            Weights::Float(_) => NumericMode::Float,
        }
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.ids.iter().map(Vec::len).collect()
    }

    pub fn cluster_size(&self, i: usize) -> usize {
        self.ids[i - 1].len()
    }

    pub fn ids(&self, i: usize) -> &[String] {
        &self.ids[i - 1]
    }

    pub fn weight(&self, v: VertexRef) -> Num {
        match &self.weights {
            Weights::Exact(w) => Num::Exact(w[v.cluster - 1][v.pos].clone()),
            Weights::Float(w) => Num::Float(w[v.cluster - 1][v.pos]),
        }
    }

    pub fn exact_weights(&self) -> Option<&[Vec<Rational>]> {
        match &self.weights {
            Weights::Exact(w) => Some(w),
            Weights::Float(_) => None,
        }
    }

    pub fn cross_edges(&self) -> &BTreeSet<(VertexRef, VertexRef)> {
        &self.cross
    }

    pub fn has_cross_edge(&self, a: VertexRef, b: VertexRef) -> bool {
        self.cross.contains(&ordered(a, b))
    }

    /// `d(A_i, A_j) = Σ w(u) w(v)` over the cross edges between the two clusters.
    pub fn density(&self, i: usize, j: usize) -> Result<Num> {
        if !self.pattern.has_edge(i, j) {
            return Err(Error::NotAnHEdge(Edge::new(i.max(1), j.max(1))));
        }
        let (i, j) = (i.min(j), i.max(j));
        let range = (VertexRef::new(i, 0), VertexRef::new(0, 0))..(VertexRef::new(i + 1, 0), VertexRef::new(0, 0));
        let pairs = self.cross.range(range).filter(|(_, b)| b.cluster == j);
        Ok(match &self.weights {
            Weights::Exact(w) => Num::Exact(
                pairs
                    .map(|(a, b)| &w[i - 1][a.pos] * &w[j - 1][b.pos])
                    .sum(),
            ),
            Weights::Float(w) => Num::Float(pairs.map(|(a, b)| w[i - 1][a.pos] * w[j - 1][b.pos]).sum()),
        })
    }

    pub fn densities(&self) -> BTreeMap<Edge, Num> {
        self.pattern
            .edges()
            .iter()
            .map(|&e| (e, self.density(e.0, e.1).expect("pattern edge")))
            .collect()
    }

    /// Whether every realized density is at least the requested one.
    pub fn meets(&self, gamma: &EdgeDensityAssignment) -> bool {
        self.densities().iter().all(|(e, d)| d.at_least(gamma.get(*e)))
    }

    /// Missing cross pairs relative to the complete blow-up.
    pub fn complement_view(&self) -> Vec<(VertexRef, VertexRef)> {
        let mut out = Vec::new();
        for e in self.pattern.edges() {
            for p in 0..self.cluster_size(e.0) {
                for q in 0..self.cluster_size(e.1) {
                    let pair = (VertexRef::new(e.0, p), VertexRef::new(e.1, q));
                    if !self.cross.contains(&pair) {
                        out.push(pair);
                    }
                }
            }
        }
        out
    }

    /// Backtracking search for a transversal, clusters in breadth-first order of the
    /// pattern, each choice checked against the already chosen neighbors.
    pub fn find_transversal(&self) -> Option<Transversal> {
        let n = self.pattern.n();
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n + 1];
        for s in self.pattern.vertices() {
            if !seen[s] {
                for v in self.pattern.bfs_order(s) {
                    seen[v] = true;
                    order.push(v);
                }
            }
        }
        let mut placed = vec![false; n + 1];
        let mut back: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, &v) in order.iter().enumerate() {
            back[k] = self.pattern.neighbors(v).iter().copied().filter(|&w| placed[w]).collect();
            placed[v] = true;
        }
        let adj = self.presence();
        let mut choice = vec![usize::MAX; n + 1];
        let mut k = 0usize;
        let mut next = vec![0usize; n];
        loop {
            if k == n {
                return Some(Transversal {
                    choice: choice[1..].to_vec(),
                });
            }
            let v = order[k];
            let mut found = false;
            while next[k] < self.cluster_size(v) {
                let p = next[k];
                next[k] += 1;
                if back[k].iter().all(|&w| adj.present(v, p, w, choice[w])) {
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

    fn presence(&self) -> Presence {
        let mut sets: BTreeMap<(usize, usize), Vec<bool>> = BTreeMap::new();
        for e in self.pattern.edges() {
            sets.insert((e.0, e.1), vec![false; self.cluster_size(e.0) * self.cluster_size(e.1)]);
        }
        for (a, b) in &self.cross {
            let width = self.cluster_size(b.cluster);
            sets.get_mut(&(a.cluster, b.cluster)).unwrap()[a.pos * width + b.pos] = true;
        }
        Presence {
            sizes: self.cluster_sizes(),
            sets,
        }
    }

    /// Drops zero-weight vertices (only meaningful for constructions; the verdict of
    /// [`Self::find_transversal`] can change).
    pub fn prune_zero_weights(&self) -> Result<Self> {
        let keep: Vec<Vec<bool>> = match &self.weights {
            Weights::Exact(w) => w.iter().map(|c| c.iter().map(|x| !x.is_zero()).collect()).collect(),
            Weights::Float(w) => w.iter().map(|c| c.iter().map(|&x| x != 0.0).collect()).collect(),
        };
        let remap: Vec<Vec<Option<usize>>> = keep
            .iter()
            .map(|c| {
                let mut k = 0;
                c.iter()
                    .map(|&b| {
                        b.then(|| {
                            k += 1;
                            k - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let filter = |v: &VertexRef| remap[v.cluster - 1][v.pos].map(|p| VertexRef::new(v.cluster, p));
        let ids = self
            .ids
            .iter()
            .zip(&keep)
            .map(|(c, k)| c.iter().zip(k).filter(|(_, &b)| b).map(|(s, _)| s.clone()).collect())
            .collect();
        let weights = match &self.weights {
            Weights::Exact(w) => Weights::Exact(
                w.iter()
                    .map(|c| c.iter().filter(|x| !x.is_zero()).cloned().collect())
                    .collect(),
            ),
            Weights::Float(w) => Weights::Float(
                w.iter()
                    .map(|c| c.iter().copied().filter(|&x| x != 0.0).collect())
                    .collect(),
            ),
        };
        let cross = self
            .cross
            .iter()
            .filter_map(|(a, b)| Some((filter(a)?, filter(b)?)))
            .collect();
        Self::build(self.pattern.clone(), ids, weights, cross)
    }

    /// Same structure with other weights (exact mode).
    pub fn with_exact_weights(&self, weights: Vec<Vec<Rational>>) -> Result<Self> {
        Self::build(self.pattern.clone(), self.ids.clone(), Weights::Exact(weights), self.cross.clone())
    }

    /// Checks the two properties every emitted construction must have.
    pub fn certify_construction(&self, gamma: &EdgeDensityAssignment) -> Result<()> {
        if let Some(t) = self.find_transversal() {
            return Err(Error::Invariant(format!("construction has a transversal {:?}", t.choice)));
        }
        for (e, d) in self.densities() {
            if !d.at_least(gamma.get(e)) {
                return Err(Error::Invariant(format!(
                    "density {d} on {e} is below the requested {}",
                    gamma.get(e)
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let clusters: Vec<Value> = (1..=self.pattern.n())
            .map(|i| {
                (0..self.cluster_size(i))
                    .map(|p| {
                        let w = match &self.weights {
                            Weights::Exact(w) => w[i - 1][p].to_string(),
                            Weights::Float(w) => format!("{:?}", w[i - 1][p]),
                        };
                        json!({"id": self.ids[i - 1][p], "weight": w})
                    })
                    .collect()
            })
            .collect();
        let cross: Vec<[usize; 4]> = self
            .cross
            .iter()
            .map(|(a, b)| [a.cluster, a.pos, b.cluster, b.pos])
            .collect();
        json!({
            "pattern": self.pattern.to_json(),
            "mode": self.mode(),
            "clusters": clusters,
            "cross_edges": cross,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidBlowup(m.to_string());
        let pattern = PatternGraph::from_json(value.get("pattern").ok_or_else(|| bad("missing pattern"))?)?;
        let mode: NumericMode = serde_json::from_value(value.get("mode").cloned().ok_or_else(|| bad("missing mode"))?)
            .map_err(|e| bad(&format!("mode: {e}")))?;
        let clusters = value
            .get("clusters")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing clusters array"))?;
        let mut ids = Vec::new();
        let mut exact = Vec::new();
        let mut float = Vec::new();
        for (i, c) in clusters.iter().enumerate() {
            let c = c.as_array().ok_or_else(|| bad(&format!("cluster {} is not an array", i + 1)))?;
            let mut cid = Vec::new();
            let mut ce = Vec::new();
            let mut cf = Vec::new();
            for v in c {
                let id = v.get("id").and_then(Value::as_str).ok_or_else(|| bad("vertex without id"))?;
                let w = match v.get("weight") {
                    Some(Value::String(s)) => s.clone(),
                    Some(Value::Number(x)) => x.to_string(),
                    _ => return Err(bad(&format!("vertex {id} has no weight"))),
                };
                match mode {
                    NumericMode::Exact => ce.push(
                        parse_rational(&w).ok_or_else(|| bad(&format!("bad weight {w:?} for {id}")))?,
                    ),
                    NumericMode::Float => {
                        cf.push(w.trim().parse::<f64>().map_err(|_| bad(&format!("bad weight {w:?} for {id}")))?)
                    }
                }
                cid.push(id.to_string());
            }
            ids.push(cid);
            exact.push(ce);
            float.push(cf);
        }
        let cross_raw = value
            .get("cross_edges")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing cross_edges array"))?;
        let mut cross = BTreeSet::new();
        for item in cross_raw {
            let q: [usize; 4] = serde_json::from_value(item.clone())
                .map_err(|_| bad(&format!("cross edge {item} is not [cluster, pos, cluster, pos]")))?;
            cross.insert(ordered(VertexRef::new(q[0], q[1]), VertexRef::new(q[2], q[3])));
        }
        let weights = match mode {
            NumericMode::Exact => Weights::Exact(exact),
            NumericMode::Float => Weights::Float(float),
        };
        Self::build(pattern, ids, weights, cross)
    }
}

struct Presence {
    sizes: Vec<usize>,
    sets: BTreeMap<(usize, usize), Vec<bool>>,
}

impl Presence {
    fn present(&self, i: usize, p: usize, j: usize, q: usize) -> bool {
        let ((a, pa), (b, pb)) = if i < j { ((i, p), (j, q)) } else { ((j, q), (i, p)) };
        self.sets[&(a, b)][pa * self.sizes[b - 1] + pb]
    }
}

impl Transversal {
    pub fn is_valid(&self, b: &WeightedBlowupGraph) -> bool {
        self.choice.len() == b.pattern.n()
            && self
                .choice
                .iter()
                .enumerate()
                .all(|(i, &p)| p < b.cluster_size(i + 1))
            && b.pattern.edges().iter().all(|e| {
                b.has_cross_edge(
                    VertexRef::new(e.0, self.choice[e.0 - 1]),
                    VertexRef::new(e.1, self.choice[e.1 - 1]),
                )
            })
    }
}

fn complement_of(
    pattern: &PatternGraph,
    sizes: &[usize],
    missing: &[(VertexRef, VertexRef)],
) -> BTreeSet<(VertexRef, VertexRef)> {
    let missing: BTreeSet<_> = missing.iter().map(|&(a, b)| ordered(a, b)).collect();
    let mut cross = BTreeSet::new();
    for e in pattern.edges() {
        for p in 0..sizes.get(e.0 - 1).copied().unwrap_or(0) {
            for q in 0..sizes.get(e.1 - 1).copied().unwrap_or(0) {
                let pair = (VertexRef::new(e.0, p), VertexRef::new(e.1, q));
                if !missing.contains(&pair) {
                    cross.insert(pair);
                }
            }
        }
    }
    cross
}

/// The tree construction: cluster `i` holds `v(i,j)` for each neighbor `j`, every
/// cross pair is present except `v(i,j) v(j,i)`, and the weights make every
/// density `1 - 1/λ²`. Exact mode when `λ²` is rational.
pub fn gacs_tree_construction(tree: &PatternGraph) -> Result<WeightedBlowupGraph> {
    tree.require_tree()?;
    if tree.n() < 2 {
        return Err(Error::DegenerateGraph("the construction needs an edge".into()));
    }
    let s_root = tree_critical_density(tree)?.s().clone();
    let order = tree.bfs_order(1);
    let mut parent = vec![0usize; tree.n() + 1];
    for &v in &order {
        for &w in tree.neighbors(v) {
            if w != parent[v] {
                parent[w] = v;
            }
        }
    }
    let children = |v: usize| -> Vec<usize> {
        tree.neighbors(v).iter().copied().filter(|&c| c != parent[v]).collect()
    };
    // Positions: cluster i lists its neighbors in increasing order.
    let pos = |i: usize, j: usize| tree.neighbors(i).binary_search(&j).unwrap();
    let ids: Vec<Vec<String>> = tree
        .vertices()
        .map(|i| tree.neighbors(i).iter().map(|j| format!("v{i}_{j}")).collect())
        .collect();
    let missing: Vec<(VertexRef, VertexRef)> = tree
        .edges()
        .iter()
        .map(|e| (VertexRef::new(e.0, pos(e.0, e.1)), VertexRef::new(e.1, pos(e.1, e.0))))
        .collect();
    let sizes: Vec<usize> = tree.vertices().map(|v| tree.degree(v)).collect();
    let cross = complement_of(tree, &sizes, &missing);

    let built = if let Some(s) = s_root.exact() {
        // u_c = 1 / (s (1 - Σ_{children d of c} u_d)), bottom up.
        let mut u = vec![Rational::zero(); tree.n() + 1];
        for &v in order.iter().rev().filter(|&&v| v != 1) {
            let below: Rational = children(v).iter().map(|&d| u[d].clone()).sum();
            u[v] = (s * (Rational::one() - below)).recip();
        }
        let mut w: Vec<Vec<Rational>> = sizes.iter().map(|&k| vec![Rational::zero(); k]).collect();
        for v in tree.vertices() {
            let kids = children(v);
            let below: Rational = kids.iter().map(|&c| u[c].clone()).sum();
            for &c in &kids {
                w[v - 1][pos(v, c)] = u[c].clone();
            }
            if v != 1 {
                w[v - 1][pos(v, parent[v])] = Rational::one() - below;
            }
        }
        WeightedBlowupGraph::build(tree.clone(), ids, Weights::Exact(w), cross)?
    } else {
        let s = s_root.approx();
        let mut u = vec![0f64; tree.n() + 1];
        for &v in order.iter().rev().filter(|&&v| v != 1) {
            let below: f64 = children(v).iter().map(|&d| u[d]).sum();
            u[v] = 1.0 / (s * (1.0 - below));
        }
        let mut w: Vec<Vec<f64>> = sizes.iter().map(|&k| vec![0.0; k]).collect();
        for v in tree.vertices() {
            let kids = children(v);
            let below: f64 = kids.iter().map(|&c| u[c]).sum();
            for &c in &kids {
                // the root's weights are renormalized against round-off
                w[v - 1][pos(v, c)] = if v == 1 { u[c] / below } else { u[c] };
            }
            if v != 1 {
                w[v - 1][pos(v, parent[v])] = 1.0 - below;
            }
        }
        WeightedBlowupGraph::build(tree.clone(), ids, Weights::Float(w), cross)?
    };
    if built.find_transversal().is_some() {
        return Err(Error::Invariant("tree construction has a transversal".into()));
    }
    Ok(built)
}

/// Recursive star-decomposition construction along the labeling `f`. Returns
/// `None` when the recursion reaches a single vertex without finding an edge
/// with `r_e >= 1`, i.e. when the monotone-path tree densities ensure the factor.
pub fn star_decomposition_construct(
    graph: &PatternGraph,
    labeling: &ProperLabeling,
    gamma: &EdgeDensityAssignment,
) -> Result<Option<WeightedBlowupGraph>> {
    graph.require_connected()?;
    if labeling.len() != graph.n() || ProperLabeling::new(graph, labeling.order().to_vec()).is_err() {
        return Err(Error::ImproperLabeling(format!("{labeling} is not a proper labeling of the graph")));
    }
    let order = labeling.order();
    let pos = labeling.positions();
    // levels[k] holds r on the edges of the prefix subgraph H_k, for k = n down to the base.
    let mut r: BTreeMap<Edge, Rational> = gamma.deficits();
    let mut k = graph.n();
    let mut steps: Vec<(usize, BTreeMap<Edge, Rational>)> = Vec::new();
    let base_edge = loop {
        if let Some((&e, _)) = r.iter().find(|(_, v)| **v >= Rational::one()) {
            break e;
        }
        if k <= 1 {
            return Ok(None);
        }
        let u = order[k - 1];
        let g_u = |x: usize| Rational::one() - &r[&Edge::new(u, x)];
        let next: BTreeMap<Edge, Rational> = r
            .iter()
            .filter(|(e, _)| !e.contains(u))
            .map(|(&e, v)| {
                let mut v = v.clone();
                for x in [e.0, e.1] {
                    if graph.has_edge(u, x) {
                        v /= g_u(x);
                    }
                }
                (e, v)
            })
            .collect();
        steps.push((u, r));
        r = next;
        k -= 1;
    };
    // Base: singletons on H_k, one missing pair.
    let n = graph.n();
    let mut clusters: Vec<Vec<(String, Rational)>> = vec![Vec::new(); n];
    for &v in &order[..k] {
        clusters[v - 1].push((format!("{v}:0"), Rational::one()));
    }
    let mut missing = vec![(VertexRef::new(base_edge.0, 0), VertexRef::new(base_edge.1, 0))];
    // Rebuild upward, adding f(k+1), ..., f(n).
    for (u, r_level) in steps.into_iter().rev() {
        clusters[u - 1].push((format!("{u}:0"), Rational::one()));
        let w_u = VertexRef::new(u, 0);
        for &x in graph.neighbors(u) {
            if pos[x] > pos[u] {
                continue;
            }
            let r_ux = r_level[&Edge::new(u, x)].clone();
            let g_ux = Rational::one() - &r_ux;
            for (_, w) in clusters[x - 1].iter_mut() {
                *w *= &g_ux;
            }
            let p = clusters[x - 1].len();
            clusters[x - 1].push((format!("{x}:{p}"), r_ux));
            missing.push((w_u, VertexRef::new(x, p)));
        }
    }
    debug_assert!(clusters.iter().all(|c| !c.is_empty()));
    let built = WeightedBlowupGraph::exact_from_complement(graph.clone(), clusters, &missing)?.prune_zero_weights()?;
    built.certify_construction(gamma)?;
    if built
        .pattern
        .vertices()
        .any(|v| built.cluster_size(v) > graph.degree(v).max(1))
    {
        return Err(Error::Invariant("cluster larger than its pattern degree".into()));
    }
    Ok(Some(built))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::number::{int, ratio};

    #[test]
    fn complete_blowup_densities() {
        let p3 = catalog::path(3);
        let b = WeightedBlowupGraph::complete(&p3, &[2, 3, 1]).unwrap();
        assert_eq!(b.density(1, 2).unwrap(), Num::Exact(int(1)));
        assert!(b.complement_view().is_empty());
        assert!(b.find_transversal().unwrap().is_valid(&b));
        assert_eq!(b.density(1, 3), Err(Error::NotAnHEdge(Edge(1, 3))));
        let empty = WeightedBlowupGraph::exact(
            p3.clone(),
            vec![
                vec![("a".into(), int(1))],
                vec![("b".into(), ratio(1, 2)), ("c".into(), ratio(1, 2))],
                vec![("d".into(), int(1))],
            ],
            [],
        )
        .unwrap();
        assert_eq!(empty.density(2, 3).unwrap(), Num::Exact(int(0)));
        assert_eq!(empty.complement_view().len(), 4);
        assert!(empty.find_transversal().is_none());
    }

    #[test]
    fn validation() {
        let k2 = catalog::path(2);
        let bad = WeightedBlowupGraph::exact(
            k2.clone(),
            vec![vec![("a".into(), ratio(1, 2))], vec![("b".into(), int(1))]],
            [],
        );
        assert!(matches!(bad, Err(Error::InvalidBlowup(_))));
        let p3 = catalog::path(3);
        let wrong_edge = WeightedBlowupGraph::complete(&p3, &[1, 1, 1])
            .unwrap()
            .cross_edges()
            .iter()
            .copied()
            .chain([(VertexRef::new(1, 0), VertexRef::new(3, 0))])
            .collect::<Vec<_>>();
        let clusters = vec![vec![("a".into(), int(1))], vec![("b".into(), int(1))], vec![("c".into(), int(1))]];
        assert!(matches!(
            WeightedBlowupGraph::exact(p3, clusters, wrong_edge),
            Err(Error::InvalidBlowup(_))
        ));
    }

    #[test]
    fn gacs_examples() {
        let p3 = catalog::path(3);
        let b = gacs_tree_construction(&p3).unwrap();
        assert_eq!(b.mode(), NumericMode::Exact);
        assert_eq!(b.cluster_sizes(), vec![1, 2, 1]);
        assert_eq!(b.density(1, 2).unwrap(), Num::Exact(ratio(1, 2)));
        assert_eq!(b.density(2, 3).unwrap(), Num::Exact(ratio(1, 2)));
        assert_eq!(b.exact_weights().unwrap()[1], vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(b.complement_view().len(), 2);
        let k2 = gacs_tree_construction(&catalog::path(2)).unwrap();
        assert_eq!(k2.density(1, 2).unwrap(), Num::Exact(int(0)));
        let p4 = gacs_tree_construction(&catalog::path(4)).unwrap();
        assert_eq!(p4.mode(), NumericMode::Float);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        for d in p4.densities().values() {
            assert!((d.to_f64() - golden).abs() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip() {
        let b = gacs_tree_construction(&catalog::star(5)).unwrap();
        let text = b.to_json().to_string();
        let back = WeightedBlowupGraph::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, b);
        let f = gacs_tree_construction(&catalog::path(5)).unwrap();
        let back = WeightedBlowupGraph::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn star_construction_for_triangle() {
        let k3 = catalog::complete(3);
        let gamma = EdgeDensityAssignment::homogeneous(&k3, ratio(618, 1000)).unwrap();
        for f in crate::graph::proper_labelings(&k3).unwrap() {
            let b = star_decomposition_construct(&k3, &f, &gamma).unwrap().expect("0.618 is below critical");
            assert!(b.cluster_sizes().iter().all(|&s| s <= 2));
            assert!(b.find_transversal().is_none());
            assert!(b.meets(&gamma));
        }
        let above = EdgeDensityAssignment::homogeneous(&k3, ratio(62, 100)).unwrap();
        let f = ProperLabeling::new(&k3, vec![1, 2, 3]).unwrap();
        assert!(star_decomposition_construct(&k3, &f, &above).unwrap().is_none());
        let k2 = catalog::path(2);
        let zero = EdgeDensityAssignment::homogeneous(&k2, int(0)).unwrap();
        let f2 = ProperLabeling::new(&k2, vec![1, 2]).unwrap();
        let b = star_decomposition_construct(&k2, &f2, &zero).unwrap().unwrap();
        assert_eq!(b.cluster_sizes(), vec![1, 1]);
        assert!(b.cross_edges().is_empty());
    }
}
