//! Named graph families, exhaustive catalogs up to isomorphism, and random instances.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Edge, PatternGraph};

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> PatternGraph {
    PatternGraph::new(n, edges).expect("catalog graphs are valid")
}

pub fn single_vertex() -> PatternGraph {
    build(1, [])
}

/// `P_n`: vertices `1-2-...-n`.
pub fn path(n: usize) -> PatternGraph {
    build(n, (1..n).map(|i| (i, i + 1)))
}

/// `S_n`: center `1` joined to `2..=n`.
pub fn star(n: usize) -> PatternGraph {
    build(n, (2..=n).map(|i| (1, i)))
}

pub fn cycle(n: usize) -> PatternGraph {
    build(n, (1..n).map(|i| (i, i + 1)).chain([(1, n)]))
}

pub fn complete(n: usize) -> PatternGraph {
    build(n, (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))))
}

/// `K_{a,b}` with parts `1..=a` and `a+1..=a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> PatternGraph {
    build(a + b, (1..=a).flat_map(|i| (a + 1..=a + b).map(move |j| (i, j))))
}

/// Two triangles `1-2-3` and `1-4-5` sharing vertex `1`.
pub fn bow_tie() -> PatternGraph {
    build(5, [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (4, 5)])
}

/// Tree from a Prüfer sequence over `1..=n` (`seq.len() == n - 2`).
pub fn tree_from_prufer(n: usize, seq: &[usize]) -> PatternGraph {
    assert!(n >= 2 && seq.len() == n - 2);
    let mut degree = vec![1usize; n + 1];
    for &v in seq {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = *leaves.iter().next().expect("a leaf exists");
        leaves.remove(&leaf);
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    build(n, edges)
}

pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PatternGraph {
    match n {
        0 | 1 => single_vertex(),
        2 => path(2),
        _ => {
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(1..=n)).collect();
            tree_from_prufer(n, &seq)
        }
    }
}

/// Random connected graph: a random spanning tree plus each extra pair with probability `p`.
pub fn random_connected<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> PatternGraph {
    let tree = random_tree(n, rng);
    let mut edges: BTreeSet<Edge> = tree.edges().iter().copied().collect();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(p) {
                edges.insert(Edge(i, j));
            }
        }
    }
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(rng);
    build(n, edges.iter().map(|e| (perm[e.0 - 1], perm[e.1 - 1])))
}

/// Canonical string of a tree: the smaller AHU encoding over its one or two centers.
pub fn tree_canonical_form(tree: &PatternGraph) -> String {
    let n = tree.n();
    if n <= 1 {
        return "()".to_string();
    }
    // Peel leaves to find the center(s).
    let mut degree: Vec<usize> = (0..=n).map(|v| if v == 0 { 0 } else { tree.degree(v) }).collect();
    let mut layer: Vec<usize> = (1..=n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            degree[v] = 0;
            for &w in tree.neighbors(v) {
                if degree[w] > 0 {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| ahu(tree, c, 0))
        .min()
        .expect("a center exists")
}

fn ahu(tree: &PatternGraph, v: usize, parent: usize) -> String {
    let mut parts: Vec<String> = tree
        .neighbors(v)
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| ahu(tree, w, v))
        .collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// All trees on `n` vertices up to isomorphism, in a deterministic order.
pub fn trees(n: usize) -> Vec<PatternGraph> {
    match n {
        0 => Vec::new(),
        1 => vec![single_vertex()],
        2 => vec![path(2)],
        _ => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            let mut seq = vec![1usize; n - 2];
            loop {
                let t = tree_from_prufer(n, &seq);
                if seen.insert(tree_canonical_form(&t)) {
                    out.push(t);
                }
                // Odometer over Prüfer sequences.
                let mut k = 0;
                while k < seq.len() && seq[k] == n {
                    seq[k] = 1;
                    k += 1;
                }
                if k == seq.len() {
                    break;
                }
                seq[k] += 1;
            }
            out
        }
    }
}

/// Canonical adjacency bitmask: the minimum over all vertex permutations.
pub fn canonical_mask(graph: &PatternGraph) -> u64 {
    let n = graph.n();
    assert!(n <= 8, "canonical_mask is brute force");
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    let pairs = pair_index(n);
    loop {
        let mut mask = 0u64;
        for e in graph.edges() {
            let (a, b) = (perm[e.0 - 1], perm[e.1 - 1]);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            mask |= 1 << pairs[a][b];
        }
        best = best.min(mask);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

fn pair_index(n: usize) -> Vec<Vec<usize>> {
    let mut idx = vec![vec![0; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            idx[i][j] = k;
            k += 1;
        }
    }
    idx
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All connected graphs on `n <= 6` vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Vec<PatternGraph> {
    assert!(n <= 6, "exhaustive catalog limited to n <= 6");
    if n == 0 {
        return Vec::new();
    }
    let all_pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << all_pairs.len()) {
        if (mask.count_ones() as usize) + 1 < n {
            continue;
        }
        let g = build(
            n,
            all_pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p),
        );
        if g.is_connected() && seen.insert(canonical_mask(&g)) {
            out.push(g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_shapes() {
        assert_eq!(path(4).edge_count(), 3);
        assert_eq!(cycle(5).edge_count(), 5);
        assert_eq!(complete(5).edge_count(), 10);
        assert_eq!(complete_bipartite(2, 3).edge_count(), 6);
        assert!(star(6).is_tree());
        assert_eq!(bow_tie().degree(1), 4);
    }

    #[test]
    fn tree_counts_match_oeis() {
        // A000055: 1, 1, 1, 2, 3, 6, 11, 23
        let counts: Vec<usize> = (1..=8).map(|n| trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23]);
        assert!(trees(7).iter().all(PatternGraph::is_tree));
    }

    #[test]
    fn connected_graph_counts_match_oeis() {
        // A001349: 1, 1, 2, 6, 21, 112
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn random_instances_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..9 {
            assert!(random_tree(n, &mut rng).is_tree());
            assert!(random_connected(n, 0.3, &mut rng).is_connected());
        }
    }
}
