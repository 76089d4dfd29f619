use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::roots::largest_real_root;
use super::Poly;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeDensityAssignment, PatternGraph};
use crate::number::{Interval, Rational};

/// Largest edge count for the exhaustive matching enumeration.
pub const MATCHING_EDGE_CAP: usize = 24;

/// Nonnegative rational weight `x_e` for every edge of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeWeightAssignment {
    weights: BTreeMap<Edge, Rational>,
}

impl EdgeWeightAssignment {
    pub fn new(graph: &PatternGraph, weights: BTreeMap<Edge, Rational>) -> Result<Self> {
        if weights.len() != graph.edge_count() {
            return Err(Error::InvalidDensity(format!(
                "{} weights given for {} edges",
                weights.len(),
                graph.edge_count()
            )));
        }
        for (e, w) in &weights {
            if graph.edge_index(*e).is_none() {
                return Err(Error::NotAnHEdge(*e));
            }
            if w.is_negative() {
                return Err(Error::InvalidDensity(format!("negative weight {w} on {e}")));
            }
        }
        Ok(EdgeWeightAssignment { weights })
    }

    pub fn ones(graph: &PatternGraph) -> Self {
        Self::uniform(graph, Rational::one())
    }

    pub fn uniform(graph: &PatternGraph, w: Rational) -> Self {
        EdgeWeightAssignment {
            weights: graph.edges().iter().map(|&e| (e, w.clone())).collect(),
        }
    }

    /// `r_e = 1 - γ_e`.
    pub fn from_densities(gamma: &EdgeDensityAssignment) -> Self {
        EdgeWeightAssignment {
            weights: gamma.deficits(),
        }
    }

    pub fn get(&self, e: Edge) -> &Rational {
        &self.weights[&e]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &Rational)> {
        self.weights.iter()
    }

    pub fn map(&self) -> &BTreeMap<Edge, Rational> {
        &self.weights
    }

    pub fn scaled(&self, t: &Rational) -> Self {
        EdgeWeightAssignment {
            weights: self.weights.iter().map(|(&e, w)| (e, w * t)).collect(),
        }
    }

    /// Weights in the order of [`PatternGraph::edges`].
    pub fn values_for(&self, graph: &PatternGraph) -> Vec<Rational> {
        graph.edges().iter().map(|e| self.weights[e].clone()).collect()
    }
}

/// `sums[k]` is the sum over `k`-matchings of the product of edge weights.
pub fn matching_sums(graph: &PatternGraph, weights: &[Rational]) -> Result<Vec<Rational>> {
    assert_eq!(weights.len(), graph.edge_count());
    if graph.edge_count() + 1 == graph.n() && graph.is_tree() {
        return Ok(tree_sums(graph, weights));
    }
    if graph.edge_count() > MATCHING_EDGE_CAP {
        return Err(Error::SizeLimit {
            what: "edge count for matching enumeration",
            limit: MATCHING_EDGE_CAP as u64,
            actual: graph.edge_count() as u64,
        });
    }
    let edges = graph.edges();
    // touching[i]: edges sharing an endpoint with edge i, including i itself
    let touching: Vec<u32> = edges
        .iter()
        .map(|e| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, f)| f.contains(e.0) || f.contains(e.1))
                .fold(0u32, |m, (j, _)| m | (1 << j))
        })
        .collect();
    let full: u32 = if edges.is_empty() { 0 } else { u32::MAX >> (32 - edges.len()) };
    let mut memo = HashMap::new();
    Ok(sums_rec(full, &touching, weights, &mut memo))
}

fn sums_rec(
    mask: u32,
    touching: &[u32],
    weights: &[Rational],
    memo: &mut HashMap<u32, Vec<Rational>>,
) -> Vec<Rational> {
    if mask == 0 {
        return vec![Rational::one()];
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let i = mask.trailing_zeros() as usize;
    let without = sums_rec(mask & !(1 << i), touching, weights, memo);
    let with = sums_rec(mask & !touching[i], touching, weights, memo);
    let mut out = without;
    if out.len() < with.len() + 1 {
        out.resize(with.len() + 1, Rational::zero());
    }
    for (k, c) in with.iter().enumerate() {
        out[k + 1] += c * &weights[i];
    }
    memo.insert(mask, out.clone());
    out
}

fn tree_sums(tree: &PatternGraph, weights: &[Rational]) -> Vec<Rational> {
    let f = tree_dp(tree, weights);
    // F(x, t) = Σ s_k (-t)^k
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { c.clone() } else { -c })
        .collect()
}

/// Tree DP for `F(x, t)`: `f_v` counts all matchings of the subtree at `v`,
/// `g_v` those leaving `v` unmatched.
fn tree_dp(tree: &PatternGraph, weights: &[Rational]) -> Poly {
    let order = tree.bfs_order(1);
    let mut parent = vec![0usize; tree.n() + 1];
    for &v in &order {
        for &w in tree.neighbors(v) {
            if w != parent[v] {
                parent[w] = v;
            }
        }
    }
    let minus_t = Poly::from_ints(&[0, -1]);
    let mut f = vec![Poly::one(); tree.n() + 1];
    let mut g = vec![Poly::one(); tree.n() + 1];
    for &v in order.iter().rev() {
        let children: Vec<usize> = tree.neighbors(v).iter().copied().filter(|&c| c != parent[v]).collect();
        // prefix[k] = Π_{j<k} f_{c_j}, suffix likewise
        let mut prefix = vec![Poly::one()];
        for &c in &children {
            let next = prefix.last().unwrap() * &f[c];
            prefix.push(next);
        }
        let mut suffix = vec![Poly::one(); children.len() + 1];
        for k in (0..children.len()).rev() {
            suffix[k] = &suffix[k + 1] * &f[children[k]];
        }
        let mut fv = prefix[children.len()].clone();
        for (k, &c) in children.iter().enumerate() {
            let w = &weights[tree.edge_index(Edge::new(v, c)).unwrap()];
            let term = &(&(&prefix[k] * &suffix[k + 1]) * &g[c]) * &minus_t.scale(w);
            fv = &fv + &term;
        }
        g[v] = prefix[children.len()].clone();
        f[v] = fv;
    }
    f[1].clone()
}

/// Number of `k`-matchings for each `k`.
pub fn matching_counts(graph: &PatternGraph) -> Result<Vec<BigInt>> {
    let ones = vec![Rational::one(); graph.edge_count()];
    Ok(matching_sums(graph, &ones)?
        .into_iter()
        .map(|c| c.to_integer())
        .collect())
}

fn signed_matching_poly(n: usize, sums: &[Rational]) -> Poly {
    let mut coeffs = vec![Rational::zero(); n + 1];
    for (k, s) in sums.iter().enumerate() {
        coeffs[n - 2 * k] = if k % 2 == 0 { s.clone() } else { -s };
    }
    Poly::new(coeffs)
}

/// `M(G, t) = Σ_k (-1)^k m_k(G) t^(n - 2k)`.
pub fn matching_polynomial(graph: &PatternGraph) -> Result<Poly> {
    let ones = vec![Rational::one(); graph.edge_count()];
    Ok(signed_matching_poly(graph.n(), &matching_sums(graph, &ones)?))
}

/// The weighted matching polynomial `M((G, w), t) = t^n F(w, 1/t²)`.
pub fn weighted_matching_polynomial(graph: &PatternGraph, w: &EdgeWeightAssignment) -> Result<Poly> {
    Ok(signed_matching_poly(
        graph.n(),
        &matching_sums(graph, &w.values_for(graph))?,
    ))
}

/// `F(w, t) = Σ_M (Π_{e∈M} w_e) (-t)^|M|` as a polynomial in `t`.
pub fn multivariate_matching_eval(graph: &PatternGraph, w: &EdgeWeightAssignment) -> Result<Poly> {
    let sums = matching_sums(graph, &w.values_for(graph))?;
    Ok(Poly::new(
        sums.into_iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { s } else { -s })
            .collect(),
    ))
}

/// `F` for a tree by the linear-size DP.
pub fn tree_multivariate_matching(tree: &PatternGraph, w: &EdgeWeightAssignment) -> Result<Poly> {
    tree.require_tree()?;
    Ok(tree_dp(tree, &w.values_for(tree)))
}

/// For `p` containing only powers `t^(n-2k)`, returns `g` with `p(t) = t^(n mod 2) g(t²)`.
pub fn even_part(p: &Poly) -> Poly {
    let Some(deg) = p.degree() else {
        return Poly::zero();
    };
    let parity = deg % 2;
    Poly::new(
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == parity)
            .map(|(_, c)| c.clone())
            .collect(),
    )
}

/// Weighted independence polynomial `Σ_S (Π_{v∈S} w_v) (-t)^|S|`, `w[v-1]` for vertex `v`.
pub fn independence_polynomial(graph: &PatternGraph, w: &[Rational]) -> Result<Poly> {
    assert_eq!(w.len(), graph.n());
    if graph.n() > 2 * MATCHING_EDGE_CAP {
        return Err(Error::SizeLimit {
            what: "vertex count for independent-set enumeration",
            limit: 2 * MATCHING_EDGE_CAP as u64,
            actual: graph.n() as u64,
        });
    }
    let closed: Vec<u64> = graph
        .vertices()
        .map(|v| {
            graph
                .neighbors(v)
                .iter()
                .fold(1u64 << (v - 1), |m, &u| m | (1 << (u - 1)))
        })
        .collect();
    let full = if graph.n() == 0 { 0 } else { u64::MAX >> (64 - graph.n()) };
    fn rec(mask: u64, closed: &[u64], w: &[Rational], memo: &mut HashMap<u64, Poly>) -> Poly {
        if mask == 0 {
            return Poly::one();
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let v = mask.trailing_zeros() as usize;
        let without = rec(mask & !(1 << v), closed, w, memo);
        let with = rec(mask & !closed[v], closed, w, memo);
        let out = &without - &(&with * &Poly::monomial(w[v].clone(), 1));
        memo.insert(mask, out.clone());
        out
    }
    Ok(rec(full, &closed, w, &mut HashMap::new()))
}

/// Line graph; vertex `i + 1` stands for `graph.edges()[i]`.
pub fn line_graph(graph: &PatternGraph) -> PatternGraph {
    let edges = graph.edges();
    let mut pairs = Vec::new();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = (edges[i], edges[j]);
            if a.contains(b.0) || a.contains(b.1) {
                pairs.push((i + 1, j + 1));
            }
        }
    }
    PatternGraph::new(edges.len(), pairs).expect("line graph is simple")
}

/// Characteristic polynomial `det(tI - A)` by the Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(a: &[Vec<Rational>]) -> Poly {
    let n = a.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Rational::zero();
                for l in 0..n {
                    if !a[i][l].is_zero() && !m[l][j].is_zero() {
                        acc += &a[i][l] * &m[l][j];
                    }
                }
                next[i][j] = acc;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut trace = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                if !a[i][l].is_zero() && !m[l][i].is_zero() {
                    trace += &a[i][l] * &m[l][i];
                }
            }
        }
        coeffs[n - k] = -trace / Rational::from_integer(BigInt::from(k));
    }
    Poly::new(coeffs)
}

/// Checks `det(tI - A) = t^n F(x, 1/t²)` for a weighted tree, where `A` has
/// entries `√x_e`. The matrix used is the diagonal conjugate with `x_e` above and
/// `1` below the diagonal of a rooted orientation, which keeps it rational.
pub fn char_poly_identity_check(tree: &PatternGraph, w: &EdgeWeightAssignment) -> Result<bool> {
    tree.require_tree()?;
    let n = tree.n();
    let order = tree.bfs_order(1);
    let mut parent = vec![0usize; n + 1];
    let mut a = vec![vec![Rational::zero(); n]; n];
    for &v in &order {
        for &c in tree.neighbors(v) {
            if c != parent[v] {
                parent[c] = v;
                a[v - 1][c - 1] = w.get(Edge::new(v, c)).clone();
                a[c - 1][v - 1] = Rational::one();
            }
        }
    }
    let phi = characteristic_polynomial(&a);
    let sums = matching_sums(tree, &w.values_for(tree))?;
    Ok(phi == signed_matching_poly(n, &sums))
}

/// Isolating interval of width at most `tol` around the spectral radius of a tree.
pub fn tree_spectral_radius(tree: &PatternGraph, tol: &Rational) -> Result<Interval> {
    tree.require_tree()?;
    if tree.n() == 1 {
        return Ok(Interval::exact(Rational::zero()));
    }
    largest_real_root(&matching_polynomial(tree)?, tol)
}
