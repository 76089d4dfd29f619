//! Pattern graphs, edge densities and proper labelings.
//!
//! Vertices are numbered `1..=n`. The text format is `n; i-j i-j ...`; lines
//! starting with `#` are comments. A JSON object `{"n": 3, "edges": [[1, 2], [2, 3]]}`
//! is accepted as well.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{parse_rational, Rational};

/// An unordered vertex pair, stored with the smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: usize) -> usize {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

impl From<[usize; 2]> for Edge {
    fn from(p: [usize; 2]) -> Self {
        Edge::new(p[0], p[1])
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.0, e.1]
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// A simple undirected graph on `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl PatternGraph {
    /// Validates and builds a graph. Edges may be given in any orientation;
    /// loops, repeated pairs and indices outside `1..=n` are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Validation(format!("loop at vertex {a}")));
            }
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(Error::Validation(format!(
                        "vertex index {v} outside 1..={n}"
                    )));
                }
            }
            if !set.insert(Edge::new(a, b)) {
                return Err(Error::Validation(format!("duplicate edge {}", Edge::new(a, b))));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &set {
            adjacency[e.0 - 1].push(e.1);
            adjacency[e.1 - 1].push(e.0);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(PatternGraph {
            n,
            edges: set.into_iter().collect(),
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + Clone {
        1..=self.n
    }

    /// Edges in increasing lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v - 1]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v - 1].len()
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        v >= 1 && v <= self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.has_vertex(a) && self.has_vertex(b) && self.adjacency[a - 1].binary_search(&b).is_ok()
    }

    /// Position of `e` in [`Self::edges`].
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs_order(1).len() == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() == self.n - 1 && self.is_connected()
    }

    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::DisconnectedGraph)
        }
    }

    pub fn require_tree(&self) -> Result<()> {
        if self.is_tree() {
            Ok(())
        } else {
            Err(Error::NotATree)
        }
    }

    /// Breadth-first order of the component of `start`, neighbors in increasing order.
    pub fn bfs_order(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n + 1];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Whether the vertex set induces a connected subgraph.
    pub fn induces_connected(&self, vertices: &[usize]) -> bool {
        let Some(&start) = vertices.first() else {
            return true;
        };
        let inside: BTreeSet<usize> = vertices.iter().copied().collect();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if inside.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == inside.len()
    }

    /// The graph on the same vertex set with `(a, b)` removed.
    pub fn without_edge(&self, e: Edge) -> PatternGraph {
        PatternGraph::new(
            self.n,
            self.edges.iter().filter(|&&f| f != e).map(|f| (f.0, f.1)),
        )
        .expect("subgraph of a valid graph")
    }

    pub fn to_text(&self) -> String {
        let pairs: Vec<String> = self.edges.iter().map(Edge::to_string).collect();
        if pairs.is_empty() {
            format!("{};", self.n)
        } else {
            format!("{}; {}", self.n, pairs.join(" "))
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphRecord {
            n: self.n,
            edges: self.edges.iter().map(|&e| e.into()).collect(),
        })
        .expect("graph record serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let record: GraphRecord = serde_json::from_value(value.clone())
            .map_err(|e| Error::parse(1, format!("bad graph object: {e}")))?;
        PatternGraph::new(record.n, record.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the edge-list text format or the JSON object format.
pub fn parse_graph(text: &str) -> Result<PatternGraph> {
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        return PatternGraph::from_json(&value);
    }
    // Join non-comment lines, remembering where each token came from.
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut rest = line;
        while let Some(pos) = rest.find(';') {
            tokens.extend(rest[..pos].split_whitespace().map(|t| (i + 1, t.to_string())));
            tokens.push((i + 1, ";".to_string()));
            rest = &rest[pos + 1..];
        }
        tokens.extend(rest.split_whitespace().map(|t| (i + 1, t.to_string())));
    }
    let mut it = tokens.into_iter();
    let (line, first) = it.next().ok_or_else(|| Error::parse(1, "empty graph description"))?;
    let n: usize = first
        .parse()
        .map_err(|_| Error::parse(line, format!("expected vertex count, found {first:?}")))?;
    match it.next() {
        Some((_, s)) if s == ";" => {}
        Some((l, s)) => return Err(Error::parse(l, format!("expected ';' after vertex count, found {s:?}"))),
        None => return Err(Error::parse(line, "expected ';' after vertex count")),
    }
    let mut edges = Vec::new();
    for (l, tok) in it {
        let (a, b) = tok
            .split_once('-')
            .ok_or_else(|| Error::parse(l, format!("expected i-j, found {tok:?}")))?;
        let a: usize = a
            .parse()
            .map_err(|_| Error::parse(l, format!("bad vertex in {tok:?}")))?;
        let b: usize = b
            .parse()
            .map_err(|_| Error::parse(l, format!("bad vertex in {tok:?}")))?;
        edges.push((a, b));
    }
    PatternGraph::new(n, edges)
}

/// True iff every edge of `small` maps to an edge of `big` under `embedding`
/// (`embedding[v - 1]` is the image of vertex `v`). Non-injective or
/// out-of-range maps are rejected.
pub fn is_subgraph(small: &PatternGraph, big: &PatternGraph, embedding: &[usize]) -> bool {
    if embedding.len() != small.n() || embedding.iter().any(|&v| !big.has_vertex(v)) {
        return false;
    }
    let distinct: BTreeSet<_> = embedding.iter().collect();
    if distinct.len() != embedding.len() {
        return false;
    }
    small
        .edges()
        .iter()
        .all(|e| big.has_edge(embedding[e.0 - 1], embedding[e.1 - 1]))
}

/// A vertex ordering `f(1), ..., f(n)` whose every prefix induces a connected subgraph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProperLabeling {
    order: Vec<usize>,
}

impl ProperLabeling {
    pub fn new(graph: &PatternGraph, order: Vec<usize>) -> Result<Self> {
        if order.len() != graph.n() {
            return Err(Error::ImproperLabeling(format!(
                "expected {} vertices, got {}",
                graph.n(),
                order.len()
            )));
        }
        let mut seen = vec![false; graph.n() + 1];
        for (k, &v) in order.iter().enumerate() {
            if !graph.has_vertex(v) || seen[v] {
                return Err(Error::ImproperLabeling(format!(
                    "position {} holds invalid or repeated vertex {v}",
                    k + 1
                )));
            }
            if k > 0 && !graph.neighbors(v).iter().any(|&w| seen[w]) {
                return Err(Error::ImproperLabeling(format!(
                    "prefix of length {} is not connected",
                    k + 1
                )));
            }
            seen[v] = true;
        }
        Ok(ProperLabeling { order })
    }

    /// `f(1), ..., f(n)`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `position[v]` is the 1-based label of vertex `v` (index 0 unused).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len() + 1];
        for (k, &v) in self.order.iter().enumerate() {
            pos[v] = k + 1;
        }
        pos
    }
}

impl fmt::Display for ProperLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Prefix-connectivity test on an arbitrary sequence.
pub fn is_proper_order(graph: &PatternGraph, order: &[usize]) -> bool {
    ProperLabeling::new(graph, order.to_vec()).is_ok()
}

/// Lazily enumerates proper labelings in lexicographic order.
pub fn proper_labelings(graph: &PatternGraph) -> Result<ProperLabelings<'_>> {
    graph.require_connected()?;
    Ok(ProperLabelings::new(graph))
}

pub struct ProperLabelings<'g> {
    graph: &'g PatternGraph,
    prefix: Vec<usize>,
    used: Vec<bool>,
    // Lowest vertex to try next at the current depth.
    next_candidate: Vec<usize>,
    done: bool,
}

impl<'g> ProperLabelings<'g> {
    fn new(graph: &'g PatternGraph) -> Self {
        ProperLabelings {
            graph,
            prefix: Vec::with_capacity(graph.n()),
            used: vec![false; graph.n() + 1],
            next_candidate: vec![1],
            done: graph.n() == 0,
        }
    }

    fn admissible(&self, v: usize) -> bool {
        !self.used[v]
            && (self.prefix.is_empty() || self.graph.neighbors(v).iter().any(|&w| self.used[w]))
    }
}

impl Iterator for ProperLabelings<'_> {
    type Item = ProperLabeling;

    fn next(&mut self) -> Option<ProperLabeling> {
        let n = self.graph.n();
        while !self.done {
            let depth = self.prefix.len();
            if depth == n {
                let result = ProperLabeling {
                    order: self.prefix.clone(),
                };
                self.backtrack();
                return Some(result);
            }
            let start = self.next_candidate[depth];
            match (start..=n).find(|&v| self.admissible(v)) {
                Some(v) => {
                    self.next_candidate[depth] = v + 1;
                    self.prefix.push(v);
                    self.used[v] = true;
                    self.next_candidate.push(1);
                }
                None => self.backtrack(),
            }
        }
        None
    }
}

impl ProperLabelings<'_> {
    fn backtrack(&mut self) {
        self.next_candidate.pop();
        match self.prefix.pop() {
            Some(v) => self.used[v] = false,
            None => self.done = true,
        }
        if self.next_candidate.is_empty() {
            self.done = true;
        }
    }
}

/// Required density `γ_e ∈ [0, 1]` for every edge of a pattern graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDensityAssignment {
    densities: BTreeMap<Edge, Rational>,
}

impl EdgeDensityAssignment {
    pub fn new(graph: &PatternGraph, densities: BTreeMap<Edge, Rational>) -> Result<Self> {
        for e in graph.edges() {
            if !densities.contains_key(e) {
                return Err(Error::InvalidDensity(format!("missing density for edge {e}")));
            }
        }
        for (e, g) in &densities {
            if graph.edge_index(*e).is_none() {
                return Err(Error::NotAnHEdge(*e));
            }
            if g < &Rational::zero() || g > &Rational::one() {
                return Err(Error::InvalidDensity(format!("density {g} on {e} outside [0, 1]")));
            }
        }
        Ok(EdgeDensityAssignment { densities })
    }

    pub fn homogeneous(graph: &PatternGraph, d: Rational) -> Result<Self> {
        Self::new(graph, graph.edges().iter().map(|&e| (e, d.clone())).collect())
    }

    /// Densities listed in the order of [`PatternGraph::edges`].
    pub fn from_values(graph: &PatternGraph, values: &[Rational]) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(Error::InvalidDensity(format!(
                "{} densities given for {} edges",
                values.len(),
                graph.edge_count()
            )));
        }
        Self::new(graph, graph.edges().iter().copied().zip(values.iter().cloned()).collect())
    }

    /// Builds from complements `r_e = 1 - γ_e`.
    pub fn from_deficits(graph: &PatternGraph, deficits: &BTreeMap<Edge, Rational>) -> Result<Self> {
        Self::new(
            graph,
            deficits.iter().map(|(&e, r)| (e, Rational::one() - r)).collect(),
        )
    }

    pub fn get(&self, e: Edge) -> &Rational {
        &self.densities[&e]
    }

    pub fn deficit(&self, e: Edge) -> Rational {
        Rational::one() - self.get(e)
    }

    /// The map `e -> r_e = 1 - γ_e`.
    pub fn deficits(&self) -> BTreeMap<Edge, Rational> {
        self.densities
            .iter()
            .map(|(&e, g)| (e, Rational::one() - g))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &Rational)> {
        self.densities.iter()
    }

    pub fn values(&self) -> Vec<Rational> {
        self.densities.values().cloned().collect()
    }
}

/// Parses a density file: one `i-j value` per line, `#` comments allowed.
/// Errors carry the offending line number.
pub fn parse_density_file(graph: &PatternGraph, text: &str) -> Result<EdgeDensityAssignment> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(edge), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(line_no, format!("expected 'i-j value', found {line:?}")));
        };
        let (a, b) = edge
            .split_once('-')
            .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
            .ok_or_else(|| Error::parse(line_no, format!("bad edge {edge:?}")))?;
        let e = Edge::new(a, b);
        if graph.edge_index(e).is_none() {
            return Err(Error::parse(line_no, format!("{e} is not an edge of the graph")));
        }
        let g = parse_rational(value)
            .ok_or_else(|| Error::parse(line_no, format!("bad density {value:?}")))?;
        if g < Rational::zero() || g > Rational::one() {
            return Err(Error::parse(line_no, format!("density {value} outside [0, 1]")));
        }
        if map.insert(e, g).is_some() {
            return Err(Error::parse(line_no, format!("edge {e} listed twice")));
        }
    }
    EdgeDensityAssignment::new(graph, map)
}

/// Parses a comma-separated list of densities in edge order.
pub fn parse_density_list(graph: &PatternGraph, text: &str) -> Result<EdgeDensityAssignment> {
    let values = text
        .split(',')
        .enumerate()
        .map(|(k, s)| {
            parse_rational(s).ok_or_else(|| {
                Error::InvalidDensity(format!("entry {} ({:?}) is not a number", k + 1, s.trim()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() == 1 && graph.edge_count() != 1 {
        return EdgeDensityAssignment::homogeneous(graph, values[0].clone());
    }
    EdgeDensityAssignment::from_values(graph, &values)
}
