use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dturan::blowup::{gacs_tree_construction, star_decomposition_construct, WeightedBlowupGraph};
use dturan::bounds::{
    bounds_report, bow_tie_counterexample_check, certify_any, certify_tree, certify_triangle, glue_graphs,
    glue_sufficiency, sufficiency_by_positivity, triangle_decide, Certifier, Sufficiency,
};
use dturan::graph::{parse_density_file, parse_density_list, parse_graph, proper_labelings};
use dturan::number::{display_decimal, parse_rational, IntervalRecord, Interval, Rational};
use dturan::oracle::{oracle_dcrit_estimate, oracle_find_transversal, oracle_search_construction_with, ProgressRecord, SearchConfig, DEFAULT_BUDGET};
use dturan::polynomials::{matching_polynomial, multivariate_matching_eval, EdgeWeightAssignment};
use dturan::star::{
    monotone_path_tree, star_lower_bound_with, star_necessary_condition_report, verify_bt1, StarBoundOptions, StarCheck,
};
use dturan::tree_decision::{decide_tree, tree_critical_density, Verdict};
use dturan::{acceptance, EdgeDensityAssignment, Error, PatternGraph, ProperLabeling};

#[derive(Parser)]
#[command(name = "dturan", version, about = "Transversals in blow-ups of pattern graphs and their critical edge densities")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct DensityArgs {
    /// Comma-separated densities in edge order, or a single homogeneous value.
    #[arg(long, conflicts_with = "density_file")]
    densities: Option<String>,
    /// File with one `i-j value` line per edge.
    #[arg(long)]
    density_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertifierKind {
    Triangle,
    Tree,
    Positivity,
    Any,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether tree densities ensure a transversal.
    DecideTree {
        graph: PathBuf,
        #[command(flatten)]
        densities: DensityArgs,
        /// Print every leaf reduction.
        #[arg(long)]
        trace: bool,
    },
    /// Critical homogeneous density of a tree.
    DcritTree {
        graph: PathBuf,
        #[arg(long, default_value = "1e-12")]
        tol: String,
    },
    /// Matching polynomial and the multivariate form F(w, t).
    Matchpoly {
        graph: PathBuf,
        /// Edge weights for F, comma-separated in edge order.
        #[arg(long)]
        weights: Option<String>,
    },
    /// Lower and upper bounds on the critical density.
    Bounds {
        graph: PathBuf,
        #[arg(long, default_value = "1e-9")]
        tol: String,
    },
    /// Decide the triangle with side densities a, b, c.
    Triangle { a: String, b: String, c: String },
    /// Glue two graphs at a vertex and certify the glued densities.
    Glue {
        h1: PathBuf,
        u1: usize,
        h2: PathBuf,
        u2: usize,
        #[arg(long)]
        m1: String,
        #[arg(long)]
        m2: String,
        #[command(flatten)]
        densities: DensityArgs,
        #[arg(long, value_enum, default_value_t = CertifierKind::Any)]
        certify: CertifierKind,
    },
    /// Star-decomposition lower bound, maximized over proper labelings.
    StarBound {
        graph: PathBuf,
        #[arg(long, default_value = "1e-9")]
        tol: String,
        #[arg(long, default_value_t = dturan::star::LABELING_CAP)]
        labeling_cap: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Necessary condition through monotone-path trees.
    StarCheck {
        graph: PathBuf,
        #[command(flatten)]
        densities: DensityArgs,
        /// One labeling such as `(1,2,3)`; all proper labelings when omitted.
        #[arg(long)]
        labeling: Option<String>,
        /// Write the monotone-path tree of the given labeling here.
        #[arg(long, requires = "labeling")]
        tree_out: Option<PathBuf>,
    },
    /// Build a transversal-free blow-up.
    Construct {
        graph: PathBuf,
        /// Tree construction at the critical density.
        #[arg(long, conflicts_with = "labeling")]
        tree: bool,
        /// Star decomposition along this labeling.
        #[arg(long)]
        labeling: Option<String>,
        #[command(flatten)]
        densities: DensityArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a blow-up file for a transversal.
    CheckTransversal {
        blowup: PathBuf,
        /// Use the unpruned search as well and require agreement.
        #[arg(long)]
        oracle: bool,
    },
    /// Grid search for a transversal-free construction meeting the density floor.
    OracleSearch {
        graph: PathBuf,
        #[command(flatten)]
        densities: DensityArgs,
        #[arg(long, default_value_t = 10)]
        q: u32,
        /// Comma-separated cluster size bounds (default: degrees).
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Append one record per finished configuration.
        #[arg(long)]
        progress: Option<PathBuf>,
        /// Resume from, and keep updating, this checkpoint.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket the critical density by grid searches.
    OracleDcrit {
        graph: PathBuf,
        #[arg(long, default_value_t = 50)]
        q: u32,
        #[arg(long, default_value = "0.02")]
        tol: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check the complete bipartite star bound against the spectral radius.
    VerifyBt1 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "1e-9")]
        tol: String,
    },
    /// Check the bow-tie glue certificates and its base construction.
    VerifyBowtie,
    /// Run the acceptance suite.
    SelfTest {
        /// Only this criterion.
        #[arg(long)]
        criterion: Option<u32>,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeLimit { .. } | Error::BudgetExhausted(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<bool, Failure>;

struct Out {
    format: Format,
}

impl Out {
    fn text(&self, s: impl AsRef<str>) {
        if self.format == Format::Text {
            println!("{}", s.as_ref());
        }
    }

    fn record(&self, command: &str, mut v: Value) {
        if self.format == Format::Json {
            if let Value::Object(m) = &mut v {
                m.insert("command".into(), json!(command));
            }
            println!("{v}");
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<PatternGraph, Failure> {
    parse_graph(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn rational(s: &str, what: &str) -> Result<Rational, Failure> {
    parse_rational(s).ok_or_else(|| usage(format!("{what}: {s:?} is not a number")))
}

fn tolerance(s: &str) -> Result<Rational, Failure> {
    let t = rational(s, "tolerance")?;
    if t <= Rational::from_integer(0.into()) {
        return Err(usage("tolerance must be positive"));
    }
    Ok(t)
}

fn densities(graph: &PatternGraph, args: &DensityArgs) -> Result<EdgeDensityAssignment, Failure> {
    match (&args.densities, &args.density_file) {
        (Some(list), None) => Ok(parse_density_list(graph, list)?),
        (None, Some(path)) => {
            parse_density_file(graph, &read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        _ => Err(usage("give densities with --densities or --density-file")),
    }
}

fn labeling(graph: &PatternGraph, s: &str) -> Result<ProperLabeling, Failure> {
    let order = s
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| usage(format!("bad labeling {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProperLabeling::new(graph, order)?)
}

fn both(x: &Rational) -> String {
    format!("{x} ({})", display_decimal(x, 12))
}

fn interval_text(iv: &Interval) -> String {
    if iv.is_exact() {
        format!("{} exactly", both(&iv.lo))
    } else {
        format!("[{}, {}]", both(&iv.lo), both(&iv.hi))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn densities_json(b: &WeightedBlowupGraph) -> Value {
    b.densities()
        .iter()
        .map(|(e, d)| {
            let v = match d.exact() {
                Some(x) => json!({"exact": x.to_string(), "approx": d.to_f64()}),
                None => json!({"approx": d.to_f64()}),
            };
            (e.to_string(), v)
        })
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn densities_text(b: &WeightedBlowupGraph) -> String {
    b.densities()
        .iter()
        .map(|(e, d)| match d.exact() {
            Some(x) => format!("  {e}: {}", both(x)),
            None => format!("  {e}: {}", display_decimal(&Rational::from_float(d.to_f64()).unwrap_or_default(), 12)),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn run(cli: Cli) -> Outcome {
    let out = Out { format: cli.format };
    match cli.command {
        Command::DecideTree { graph, densities: d, trace } => {
            let g = load_graph(&graph)?;
            let gamma = densities(&g, &d)?;
            let decision = decide_tree(&g, &gamma)?;
            out.record("decide-tree", decision.to_json());
            if trace {
                for s in &decision.trace {
                    let upd: Vec<String> = s.updated.iter().map(|(e, r)| format!("r_{e} = {}", both(r))).collect();
                    out.text(format!("step {}: removed leaf {} at {}; {}", s.step, s.removed_leaf, s.neighbor, upd.join(", ")));
                }
            }
            out.text(format!("verdict: {}", decision.verdict));
            if let Some(e) = decision.violating_edge {
                out.text(format!("violating edge: {e}"));
            }
            Ok(decision.is_ensured())
        }
        Command::DcritTree { graph, tol } => {
            let g = load_graph(&graph)?;
            let tol = tolerance(&tol)?;
            let d = tree_critical_density(&g)?;
            let iv = d.interval(&tol);
            out.record(
                "dcrit-tree",
                json!({"dcrit": IntervalRecord::from(&iv), "exact": d.exact_value().map(|x| x.to_string()), "s_polynomial": d.s().poly().to_string()}),
            );
            out.text(format!("d_crit: {}", interval_text(&iv)));
            out.text(format!("lambda^2 is the largest root of {}", d.s().poly()));
            Ok(true)
        }
        Command::Matchpoly { graph, weights } => {
            let g = load_graph(&graph)?;
            let m = matching_polynomial(&g)?;
            let w = match weights {
                None => EdgeWeightAssignment::ones(&g),
                Some(list) => {
                    let values = list.split(',').map(|s| rational(s, "weight")).collect::<Result<Vec<_>, _>>()?;
                    if values.len() != g.edge_count() {
                        return Err(usage(format!("{} weights for {} edges", values.len(), g.edge_count())));
                    }
                    EdgeWeightAssignment::new(&g, g.edges().iter().copied().zip(values).collect())?
                }
            };
            let f = multivariate_matching_eval(&g, &w)?;
            out.record("matchpoly", json!({"matching": m.to_strings(), "f": f.to_strings()}));
            out.text(format!("M(G, t) = {m}"));
            out.text(format!("F(w, t) = {f}"));
            Ok(true)
        }
        Command::Bounds { graph, tol } => {
            let g = load_graph(&graph)?;
            let r = bounds_report(&g, &tolerance(&tol)?)?;
            out.record("bounds", r.to_json());
            out.text(r.to_string());
            Ok(r.is_consistent())
        }
        Command::Triangle { a, b, c } => {
            let v = [rational(&a, "a")?, rational(&b, "b")?, rational(&c, "c")?];
            if v.iter().any(|x| *x < Rational::from_integer(0.into()) || *x > Rational::from_integer(1.into())) {
                return Err(usage("triangle densities must lie in [0, 1]"));
            }
            let verdict = triangle_decide(&v[0], &v[1], &v[2]);
            out.record("triangle", json!({"verdict": verdict}));
            out.text(format!("verdict: {verdict}"));
            Ok(verdict == Verdict::Ensured)
        }
        Command::Glue { h1, u1, h2, u2, m1, m2, densities: d, certify } => {
            let (g1, g2) = (load_graph(&h1)?, load_graph(&h2)?);
            let (glued, _) = glue_graphs(&g1, u1, &g2, u2)?;
            let gamma = densities(&glued, &d)?;
            let (m1, m2) = (rational(&m1, "m1")?, rational(&m2, "m2")?);
            let c: Certifier<'_> = match certify {
                CertifierKind::Triangle => &certify_triangle,
                CertifierKind::Tree => &certify_tree,
                CertifierKind::Positivity => &sufficiency_by_positivity,
                CertifierKind::Any => &certify_any,
            };
            let s = glue_sufficiency(&g1, &g2, u1, u2, &m1, &m2, &gamma, c)?;
            out.record("glue", json!({"glued": glued.to_json(), "verdict": format!("{s:?}")}));
            out.text(format!("glued graph: {}", glued.to_text().trim()));
            out.text(format!("verdict: {s:?}"));
            Ok(s == Sufficiency::Sufficient)
        }
        Command::StarBound { graph, tol, labeling_cap, samples, seed } => {
            let g = load_graph(&graph)?;
            let opts = StarBoundOptions { labeling_cap, samples, seed };
            let b = star_lower_bound_with(&g, &tolerance(&tol)?, &opts)?;
            out.record(
                "star-bound",
                json!({
                    "bound": IntervalRecord::from(&b.interval),
                    "exact": b.density.exact_value().map(|x| x.to_string()),
                    "labeling": b.labeling.order(),
                    "labelings_examined": b.labelings_examined,
                    "heuristic": b.heuristic,
                }),
            );
            out.text(format!("star lower bound: {}", interval_text(&b.interval)));
            out.text(format!("labeling: {}", b.labeling));
            out.text(format!(
                "labelings examined: {}{}",
                b.labelings_examined,
                if b.heuristic { " (sampled)" } else { "" }
            ));
            Ok(true)
        }
        Command::StarCheck { graph, densities: d, labeling: f, tree_out } => {
            let g = load_graph(&graph)?;
            let gamma = densities(&g, &d)?;
            let fs: Vec<ProperLabeling> = match &f {
                Some(s) => vec![labeling(&g, s)?],
                None => proper_labelings(&g)?.collect(),
            };
            if let (Some(path), Some(f)) = (&tree_out, fs.first()) {
                write_file(path, &monotone_path_tree(&g, f, Some(&gamma))?.to_text())?;
            }
            let mut all_pass = true;
            for f in &fs {
                let (check, decision) = star_necessary_condition_report(&g, &gamma, f)?;
                all_pass &= check == StarCheck::PassesThisLabeling;
                out.record(
                    "star-check",
                    json!({"labeling": f.order(), "check": check.to_string(), "violating_edge": decision.violating_edge}),
                );
                out.text(format!("{f}: {check}"));
            }
            Ok(all_pass)
        }
        Command::Construct { graph, tree, labeling: f, densities: d, out: path } => {
            let g = load_graph(&graph)?;
            let built = if tree {
                Some(gacs_tree_construction(&g)?)
            } else {
                let f = f.ok_or_else(|| usage("give --tree or --labeling"))?;
                let f = labeling(&g, &f)?;
                let gamma = densities(&g, &d)?;
                star_decomposition_construct(&g, &f, &gamma)?
            };
            let Some(b) = built else {
                out.record("construct", json!({"found": false}));
                out.text("no construction: the star condition holds for this labeling");
                return Ok(false);
            };
            let text = serde_json::to_string_pretty(&b.to_json()).expect("json value");
            if let Some(p) = &path {
                write_file(p, &text)?;
            }
            out.record("construct", json!({"found": true, "densities": densities_json(&b), "blowup": b.to_json()}));
            out.text(format!("clusters: {:?}", b.cluster_sizes()));
            out.text(format!("densities:\n{}", densities_text(&b)));
            if path.is_none() {
                out.text(text);
            }
            Ok(true)
        }
        Command::CheckTransversal { blowup, oracle } => {
            let text = read(&blowup)?;
            let value: Value = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{}: line {}: {e}", blowup.display(), e.line())))?;
            let b = WeightedBlowupGraph::from_json(&value).map_err(|e| usage(format!("{}: {e}", blowup.display())))?;
            let t = b.find_transversal();
            if oracle {
                let o = oracle_find_transversal(&b)?;
                if o.is_some() != t.is_some() {
                    return Err(Failure { code: 2, message: "the two searches disagree".into() });
                }
            }
            out.record(
                "check-transversal",
                json!({"transversal": t.as_ref().map(|t| &t.choice), "densities": densities_json(&b)}),
            );
            match &t {
                Some(t) => {
                    let ids: Vec<&str> = t.choice.iter().enumerate().map(|(i, &p)| b.ids(i + 1)[p].as_str()).collect();
                    out.text(format!("transversal: {}", ids.join(", ")));
                }
                None => out.text("no transversal"),
            }
            out.text(format!("densities:\n{}", densities_text(&b)));
            Ok(t.is_some())
        }
        Command::OracleSearch { graph, densities: d, q, sizes, budget, progress, checkpoint, out: path } => {
            let g = load_graph(&graph)?;
            let floor = densities(&g, &d)?;
            let mut cfg = SearchConfig::new(&g, floor, q);
            cfg.budget = budget;
            if let Some(s) = sizes {
                cfg.cluster_size_bounds = s
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|_| usage(format!("bad size bounds {s:?}"))))
                    .collect::<Result<_, _>>()?;
            }
            cfg.validate(&g)?;
            let key = checkpoint_key(&g, &cfg);
            let start = match &checkpoint {
                Some(p) if p.exists() => read_checkpoint(p, &key)?,
                _ => 0,
            };
            let mut log = match &progress {
                Some(p) => Some(
                    fs::OpenOptions::new()
                        .create(true)
                        .append(true)
                        .open(p)
                        .map_err(|e| usage(format!("{}: {e}", p.display())))?,
                ),
                None => None,
            };
            let mut io_error = None;
            let mut on_record = |r: &ProgressRecord| {
                let line = serde_json::to_string(r).expect("record");
                if let Some(f) = log.as_mut() {
                    if let Err(e) = writeln!(f, "{line}") {
                        io_error.get_or_insert(e.to_string());
                    }
                }
                if let Some(p) = &checkpoint {
                    let next = if r.verdict == "found" { r.config } else { r.config + 1 };
                    let c = json!({"key": key, "next_config": next});
                    if let Err(e) = fs::write(p, c.to_string()) {
                        io_error.get_or_insert(e.to_string());
                    }
                }
            };
            let found = oracle_search_construction_with(&g, &cfg, start, &mut on_record)?;
            if let Some(e) = io_error {
                return Err(usage(e));
            }
            match found {
                Some(b) => {
                    let text = serde_json::to_string_pretty(&b.to_json()).expect("json value");
                    if let Some(p) = &path {
                        write_file(p, &text)?;
                    }
                    out.record("oracle-search", json!({"verdict": "found", "densities": densities_json(&b), "blowup": b.to_json()}));
                    out.text(format!("found: clusters {:?}", b.cluster_sizes()));
                    out.text(format!("densities:\n{}", densities_text(&b)));
                    if path.is_none() {
                        out.text(text);
                    }
                    Ok(true)
                }
                None => {
                    out.record("oracle-search", json!({"verdict": "none"}));
                    out.text("none: full enumeration found no construction on this grid");
                    Ok(false)
                }
            }
        }
        Command::OracleDcrit { graph, q, tol, budget } => {
            let g = load_graph(&graph)?;
            let tol = tolerance(&tol)?;
            if q == 0 {
                return Err(usage("q must be at least 1"));
            }
            let iv = oracle_dcrit_estimate(&g, q, &tol, budget)?;
            out.record("oracle-dcrit", json!({"estimate": IntervalRecord::from(&iv)}));
            out.text(format!("d_crit estimate: {}", interval_text(&iv)));
            Ok(true)
        }
        Command::VerifyBt1 { n, m, tol } => {
            let ok = verify_bt1(n, m, &tolerance(&tol)?)?;
            out.record("verify-bt1", json!({"n": n, "m": m, "verified": ok}));
            out.text(format!("K_{{{n},{m}}}: {}", if ok { "verified" } else { "mismatch" }));
            Ok(ok)
        }
        Command::VerifyBowtie => {
            let r = bow_tie_counterexample_check()?;
            let raises: Vec<Value> = r
                .raises
                .iter()
                .map(|x| {
                    json!({
                        "edge": x.edge,
                        "density": x.density.to_string(),
                        "verdict": format!("{:?}", x.verdict),
                        "split": x.split.as_ref().map(|(a, b)| [a.to_string(), b.to_string()]),
                    })
                })
                .collect();
            out.record(
                "verify-bowtie",
                json!({
                    "passed": r.passed(),
                    "base_densities_exact": r.base_densities_exact,
                    "base_has_transversal": r.base_has_transversal,
                    "raises": raises,
                }),
            );
            for x in &r.raises {
                let split = x.split.as_ref().map_or("-".to_string(), |(a, b)| format!("m1 = {a}, m2 = {b}"));
                out.text(format!("raise {} to {}: {:?} ({split})", x.edge, both(&x.density), x.verdict));
            }
            out.text(format!("base densities exact: {}", r.base_densities_exact));
            out.text(format!("base construction has a transversal: {}", r.base_has_transversal));
            Ok(r.passed())
        }
        Command::SelfTest { criterion } => {
            let results = match criterion {
                Some(k) => vec![acceptance::run_criterion(k).ok_or_else(|| usage(format!("no criterion {k}")))?],
                None => acceptance::run_all(),
            };
            for r in &results {
                out.record("self-test", serde_json::to_value(r).expect("record"));
                out.text(r.to_string());
            }
            Ok(results.iter().all(|r| r.passed))
        }
    }
}

fn checkpoint_key(g: &PatternGraph, cfg: &SearchConfig) -> String {
    let floor: Vec<String> = cfg.density_floor.values().iter().map(ToString::to_string).collect();
    format!(
        "{} | {} | q={} | sizes={:?}",
        g.to_text().trim(),
        floor.join(","),
        cfg.weight_grid_denominator,
        cfg.cluster_size_bounds
    )
}

fn read_checkpoint(path: &Path, key: &str) -> Result<usize, Failure> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if v["key"].as_str() != Some(key) {
        return Err(usage(format!("{}: checkpoint belongs to a different search", path.display())));
    }
    v["next_config"]
        .as_u64()
        .map(|k| k as usize)
        .ok_or_else(|| usage(format!("{}: missing next_config", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(2),
    }
}
