//! Closed-form bounds on the critical density and sufficiency certificates for
//! general pattern graphs.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::catalog;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeDensityAssignment, PatternGraph, ProperLabeling};
use crate::number::{self, int, ratio, Interval, IntervalRecord, Rational};
use crate::polynomials::{
    even_part, matching_polynomial, multivariate_matching_eval, positive_on_unit_interval,
    CriticalDensity, EdgeWeightAssignment, IsolatedRoot,
};
use crate::star::{bow_tie_base_densities, bow_tie_reconstruction, star_lower_bound};
use crate::tree_decision::{decide_tree, Verdict};

/// `1 - 1/Δ`.
pub fn delta_lower_bound(delta: usize) -> Rational {
    Rational::one() - ratio(1, delta as i64)
}

/// `1 - 1/(4(Δ - 1))`, for `Δ >= 2`.
pub fn coarse_upper_bound(delta: usize) -> Rational {
    assert!(delta >= 2);
    Rational::one() - ratio(1, 4 * (delta as i64 - 1))
}

/// `1 - 1/(e(2Δ - 1))`.
pub fn lll_upper_bound(delta: usize) -> f64 {
    1.0 - 1.0 / (std::f64::consts::E * (2.0 * delta as f64 - 1.0))
}

/// `1 - 1/t(H)²` with `t(H)` the largest root of `M(H, t)`.
pub fn matching_root_bound(graph: &PatternGraph) -> Result<CriticalDensity> {
    if graph.edge_count() == 0 {
        return Err(Error::DegenerateGraph("no edges".into()));
    }
    let g = even_part(&matching_polynomial(graph)?);
    Ok(CriticalDensity::from_s(IsolatedRoot::largest(&g)?))
}

#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub delta: usize,
    pub lower_delta: Rational,
    pub lower_star: Interval,
    pub lower_star_labeling: ProperLabeling,
    pub lower_star_heuristic: bool,
    pub upper_matching_root: Interval,
    pub upper_coarse: Rational,
    pub upper_lll: f64,
    /// Exact forms, for interval-safe comparisons.
    pub star: CriticalDensity,
    pub matching_root: CriticalDensity,
}

impl BoundsReport {
    /// `lower_delta <= lower_star <= upper_matching_root < upper_coarse`, compared exactly.
    pub fn is_consistent(&self) -> bool {
        self.star.cmp_rational(&self.lower_delta) != Ordering::Less
            && self.star.cmp_density(&self.matching_root) != Ordering::Greater
            && self.matching_root.cmp_rational(&self.upper_coarse) == Ordering::Less
    }

    pub fn rows(&self) -> Vec<(&'static str, String, f64)> {
        let iv = |i: &Interval| {
            if i.is_exact() {
                i.lo.to_string()
            } else {
                format!("[{}, {}]", i.lo, i.hi)
            }
        };
        vec![
            ("lower_delta", self.lower_delta.to_string(), number::to_f64(&self.lower_delta)),
            ("lower_star", iv(&self.lower_star), self.star.approx()),
            ("upper_matching_root", iv(&self.upper_matching_root), self.matching_root.approx()),
            ("upper_coarse", self.upper_coarse.to_string(), number::to_f64(&self.upper_coarse)),
            ("upper_lll", "-".to_string(), self.upper_lll),
        ]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "delta": self.delta,
            "lower_delta": self.lower_delta.to_string(),
            "lower_star": IntervalRecord::from(&self.lower_star),
            "lower_star_labeling": self.lower_star_labeling.order(),
            "lower_star_heuristic": self.lower_star_heuristic,
            "upper_matching_root": IntervalRecord::from(&self.upper_matching_root),
            "upper_coarse": self.upper_coarse.to_string(),
            "upper_lll": self.upper_lll,
        })
    }
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max degree: {}", self.delta)?;
        writeln!(f, "{:<22}{:<48}decimal", "bound", "exact")?;
        for (name, exact, approx) in self.rows() {
            writeln!(f, "{name:<22}{exact:<48}{}", number::format_sig(approx, 10))?;
        }
        write!(f, "star bound labeling: {}", self.lower_star_labeling)?;
        if self.lower_star_heuristic {
            write!(f, " (sampled labelings)")?;
        }
        Ok(())
    }
}

pub fn bounds_report(graph: &PatternGraph, tol: &Rational) -> Result<BoundsReport> {
    graph.require_connected()?;
    let delta = graph.max_degree();
    if delta < 2 {
        return Err(Error::DegenerateGraph(format!(
            "maximum degree {delta}: the bounds collapse to 0"
        )));
    }
    let star = star_lower_bound(graph, tol)?;
    let mr = matching_root_bound(graph)?;
    Ok(BoundsReport {
        delta,
        lower_delta: delta_lower_bound(delta),
        lower_star: star.interval.clone(),
        lower_star_labeling: star.labeling.clone(),
        lower_star_heuristic: star.heuristic,
        upper_matching_root: mr.interval(tol),
        upper_coarse: coarse_upper_bound(delta),
        upper_lll: lll_upper_bound(delta),
        star: star.density,
        matching_root: mr,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sufficiency {
    Sufficient,
    Unknown,
}

impl fmt::Display for Sufficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sufficiency::Sufficient => "Sufficient",
            Sufficiency::Unknown => "Unknown",
        })
    }
}

impl From<bool> for Sufficiency {
    fn from(b: bool) -> Self {
        if b {
            Sufficiency::Sufficient
        } else {
            Sufficiency::Unknown
        }
    }
}

/// Sufficient when `F(r, t) > 0` on `[0, 1]`.
pub fn sufficiency_by_positivity(graph: &PatternGraph, gamma: &EdgeDensityAssignment) -> Result<Sufficiency> {
    let f = multivariate_matching_eval(graph, &EdgeWeightAssignment::from_densities(gamma))?;
    Ok(positive_on_unit_interval(&f)?.into())
}

/// Ensured iff `αβ + γ > 1`, `βγ + α > 1` and `γα + β > 1`.
pub fn triangle_decide(alpha: &Rational, beta: &Rational, gamma: &Rational) -> Verdict {
    let one = Rational::one();
    if alpha * beta + gamma > one && beta * gamma + alpha > one && gamma * alpha + beta > one {
        Verdict::Ensured
    } else {
        Verdict::NotEnsured
    }
}

/// A per-part certifier for [`glue_sufficiency`].
pub type Certifier<'a> = &'a (dyn Fn(&PatternGraph, &EdgeDensityAssignment) -> Result<Sufficiency> + Sync);

/// Triangle criterion on a 3-vertex complete graph; Unknown for anything else.
pub fn certify_triangle(graph: &PatternGraph, gamma: &EdgeDensityAssignment) -> Result<Sufficiency> {
    if graph.n() != 3 || graph.edge_count() != 3 {
        return Ok(Sufficiency::Unknown);
    }
    let v = gamma.values();
    Ok((triangle_decide(&v[0], &v[1], &v[2]) == Verdict::Ensured).into())
}

pub fn certify_tree(graph: &PatternGraph, gamma: &EdgeDensityAssignment) -> Result<Sufficiency> {
    if !graph.is_tree() {
        return Ok(Sufficiency::Unknown);
    }
    Ok(decide_tree(graph, gamma)?.is_ensured().into())
}

/// Tree decision for trees, then the triangle criterion, then positivity.
pub fn certify_any(graph: &PatternGraph, gamma: &EdgeDensityAssignment) -> Result<Sufficiency> {
    if graph.is_tree() {
        return certify_tree(graph, gamma);
    }
    if certify_triangle(graph, gamma)? == Sufficiency::Sufficient {
        return Ok(Sufficiency::Sufficient);
    }
    sufficiency_by_positivity(graph, gamma)
}

/// The graph `H1 : H2` with `u2` identified with `u1`. Vertices of `H1` keep their
/// labels; the map sends each vertex of `H2` to its label in the glued graph.
pub fn glue_graphs(h1: &PatternGraph, u1: usize, h2: &PatternGraph, u2: usize) -> Result<(PatternGraph, Vec<usize>)> {
    if !h1.has_vertex(u1) {
        return Err(Error::VertexNotInGraph(u1));
    }
    if !h2.has_vertex(u2) {
        return Err(Error::VertexNotInGraph(u2));
    }
    let mut map = vec![0usize; h2.n() + 1];
    let mut next = h1.n();
    for v in h2.vertices() {
        map[v] = if v == u2 {
            u1
        } else {
            next += 1;
            next
        };
    }
    let edges = h1
        .edges()
        .iter()
        .map(|e| (e.0, e.1))
        .chain(h2.edges().iter().map(|e| (map[e.0], map[e.1])));
    Ok((PatternGraph::new(next, edges)?, map))
}

/// Splits the glued densities at `u_k` by `r'_e = r_e / m_k` and certifies both parts.
#[allow(clippy::too_many_arguments)]
pub fn glue_sufficiency(
    h1: &PatternGraph,
    h2: &PatternGraph,
    u1: usize,
    u2: usize,
    m1: &Rational,
    m2: &Rational,
    gamma: &EdgeDensityAssignment,
    certify: Certifier<'_>,
) -> Result<Sufficiency> {
    let zero = Rational::zero();
    let one = Rational::one();
    if !(m1 > &zero && m1 < &one && m2 > &zero && m2 < &one && m1 + m2 <= one) {
        return Err(Error::BadSplit(format!(
            "need 0 < m1, m2 < 1 and m1 + m2 <= 1, got m1 = {m1}, m2 = {m2}"
        )));
    }
    let (glued, map2) = glue_graphs(h1, u1, h2, u2)?;
    let map1: Vec<usize> = (0..=h1.n()).collect();
    for (part, u, m, map) in [(h1, u1, m1, &map1), (h2, u2, m2, &map2)] {
        let mut values = Vec::with_capacity(part.edge_count());
        for e in part.edges() {
            let ge = Edge::new(map[e.0], map[e.1]);
            if glued.edge_index(ge).is_none() {
                return Err(Error::NotAnHEdge(ge));
            }
            let mut r = gamma.deficit(ge);
            if e.contains(u) {
                r /= m;
            }
            if r > one {
                // the transformed density would be negative
                return Ok(Sufficiency::Unknown);
            }
            values.push(&one - r);
        }
        let g = EdgeDensityAssignment::from_values(part, &values)?;
        if certify(part, &g)? == Sufficiency::Unknown {
            return Ok(Sufficiency::Unknown);
        }
    }
    Ok(Sufficiency::Sufficient)
}

/// Offset used for asymmetric splits.
pub fn bow_tie_epsilon() -> Rational {
    ratio(1, 1000)
}

#[derive(Clone, Debug)]
pub struct RaiseResult {
    pub edge: Edge,
    pub density: Rational,
    pub verdict: Sufficiency,
    /// The split `(m1, m2)` that certified, if any.
    pub split: Option<(Rational, Rational)>,
}

#[derive(Clone, Debug)]
pub struct BowTieReport {
    pub raises: Vec<RaiseResult>,
    pub base_densities_exact: bool,
    pub base_has_transversal: bool,
}

impl BowTieReport {
    pub fn passed(&self) -> bool {
        self.base_densities_exact
            && !self.base_has_transversal
            && self.raises.iter().all(|r| r.verdict == Sufficiency::Sufficient)
    }
}

/// Glues two triangles at vertex 1 and tries the splits `1/2 ∓ ε`, `1/2 ± ε`, `1/2`.
pub fn bow_tie_glue_certificate(gamma: &EdgeDensityAssignment) -> Result<Option<(Rational, Rational)>> {
    let k3 = catalog::complete(3);
    let half = ratio(1, 2);
    let eps = bow_tie_epsilon();
    let splits = [
        (&half - &eps, &half + &eps),
        (&half + &eps, &half - &eps),
        (half.clone(), half.clone()),
    ];
    for (m1, m2) in splits {
        if glue_sufficiency(&k3, &k3, 1, 1, &m1, &m2, gamma, &certify_triangle)? == Sufficiency::Sufficient {
            return Ok(Some((m1, m2)));
        }
    }
    Ok(None)
}

pub fn bow_tie_counterexample_check() -> Result<BowTieReport> {
    let h = catalog::bow_tie();
    let base = bow_tie_base_densities();
    let mut raises = Vec::new();
    for &e in h.edges() {
        let mut values = base.values();
        let k = h.edge_index(e).unwrap();
        values[k] += ratio(1, 100);
        let gamma = EdgeDensityAssignment::from_values(&h, &values)?;
        let split = bow_tie_glue_certificate(&gamma)?;
        raises.push(RaiseResult {
            edge: e,
            density: values[k].clone(),
            verdict: split.is_some().into(),
            split,
        });
    }
    let b = bow_tie_reconstruction();
    let base_densities_exact = b
        .densities()
        .iter()
        .all(|(e, d)| d.exact() == Some(base.get(*e)));
    Ok(BowTieReport {
        raises,
        base_densities_exact,
        base_has_transversal: b.find_transversal().is_some(),
    })
}

/// The homogeneous triangle threshold by bisection on [`triangle_decide`]: returns
/// `(lo, hi]` with `lo` not ensured, `hi` ensured.
pub fn triangle_threshold(tol: &Rational) -> Interval {
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / int(2);
        if triangle_decide(&mid, &mid, &mid) == Verdict::Ensured {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn tol() -> Rational {
        ratio(1, 1_000_000_000)
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(triangle_decide(&q("0.8"), &q("0.8"), &q("0.8")), Verdict::Ensured);
        assert_eq!(triangle_decide(&int(1), &int(1), &int(0)), Verdict::NotEnsured);
        assert_eq!(triangle_decide(&q("0.618"), &q("0.618"), &q("0.618")), Verdict::NotEnsured);
        assert_eq!(triangle_decide(&q("0.62"), &q("0.62"), &q("0.62")), Verdict::Ensured);
        let t = triangle_threshold(&tol());
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(t.width() <= tol());
        assert!(number::to_f64(&t.lo) <= golden + 1e-12 && golden <= number::to_f64(&t.hi) + 1e-12);
    }

    #[test]
    fn bounds_examples() {
        let k3 = bounds_report(&catalog::complete(3), &tol()).unwrap();
        assert_eq!(k3.lower_delta, ratio(1, 2));
        assert_eq!(k3.upper_matching_root, Interval::exact(ratio(2, 3)));
        assert_eq!(k3.upper_coarse, ratio(3, 4));
        assert!((k3.upper_lll - (1.0 - 1.0 / (3.0 * std::f64::consts::E))).abs() < 1e-12);
        assert!(k3.is_consistent());
        let s5 = bounds_report(&catalog::star(5), &tol()).unwrap();
        assert_eq!(s5.lower_delta, ratio(3, 4));
        assert_eq!(s5.upper_matching_root, Interval::exact(ratio(3, 4)));
        assert_eq!(s5.lower_star, Interval::exact(ratio(3, 4)));
        let k4 = bounds_report(&catalog::complete(4), &tol()).unwrap();
        assert!((k4.upper_matching_root.midpoint_f64() - (1.0 - 1.0 / (3.0 + 6f64.sqrt()))).abs() < 1e-9);
        assert_eq!(k4.upper_coarse, ratio(7, 8));
        assert!(matches!(
            bounds_report(&catalog::path(2), &tol()),
            Err(Error::DegenerateGraph(_))
        ));
        let text = k4.to_string();
        assert!(text.contains("upper_matching_root"));
        assert_eq!(k4.to_json()["delta"], 3);
    }

    #[test]
    fn positivity_certificates() {
        let k3 = catalog::complete(3);
        let hom = |d: &str| EdgeDensityAssignment::homogeneous(&k3, q(d)).unwrap();
        assert_eq!(sufficiency_by_positivity(&k3, &hom("1")).unwrap(), Sufficiency::Sufficient);
        assert_eq!(sufficiency_by_positivity(&k3, &hom("0.7")).unwrap(), Sufficiency::Sufficient);
        assert_eq!(sufficiency_by_positivity(&k3, &hom("0.65")).unwrap(), Sufficiency::Unknown);
        assert_eq!(certify_triangle(&k3, &hom("0.65")).unwrap(), Sufficiency::Sufficient);
    }

    fn bow(center: [&str; 4], outer: [&str; 2]) -> EdgeDensityAssignment {
        // edges in order 1-2, 1-3, 1-4, 1-5, 2-3, 4-5
        let h = catalog::bow_tie();
        let v: Vec<Rational> = center.iter().chain(outer.iter()).map(|s| q(s)).collect();
        EdgeDensityAssignment::from_values(&h, &v).unwrap()
    }

    #[test]
    fn glue_examples() {
        let k3 = catalog::complete(3);
        let half = ratio(1, 2);
        let run = |g: &EdgeDensityAssignment, m1: &Rational, m2: &Rational| {
            glue_sufficiency(&k3, &k3, 1, 1, m1, m2, g, &certify_triangle).unwrap()
        };
        let g = bow(["0.86"; 4], ["0.51"; 2]);
        assert_eq!(run(&g, &half, &half), Sufficiency::Sufficient);
        let g = bow(["0.85"; 4], ["0.51"; 2]);
        assert_eq!(run(&g, &half, &half), Sufficiency::Unknown);
        let eps = bow_tie_epsilon();
        let g = bow(["0.86", "0.85", "0.85", "0.85"], ["0.51"; 2]);
        assert_eq!(run(&g, &(&half - &eps), &(&half + &eps)), Sufficiency::Sufficient);
        assert!(matches!(
            glue_sufficiency(&k3, &k3, 1, 1, &q("0.6"), &q("0.6"), &g, &certify_triangle),
            Err(Error::BadSplit(_))
        ));
        assert_eq!(
            glue_sufficiency(&k3, &k3, 4, 1, &half, &half, &g, &certify_triangle),
            Err(Error::VertexNotInGraph(4))
        );
        let (glued, _) = glue_graphs(&k3, 1, &k3, 1).unwrap();
        assert_eq!(glued, catalog::bow_tie());
    }

    #[test]
    fn bow_tie_check() {
        let report = bow_tie_counterexample_check().unwrap();
        assert_eq!(report.raises.len(), 6);
        for r in &report.raises {
            assert_eq!(r.verdict, Sufficiency::Sufficient, "raise on {}", r.edge);
        }
        // the outer raise works with the symmetric split
        let outer = report.raises.iter().find(|r| r.edge == Edge(2, 3)).unwrap();
        assert!(outer.split.is_some());
        assert!(report.passed());
    }
}
