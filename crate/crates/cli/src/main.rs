//! Workbench CLI: config ingestion, experiment orchestration, CSV and
//! report emission.
//!
//! Exit codes: 0 all declared thresholds pass, 2 threshold fail,
//! 3 validation, 4 budget, 5 parse/schema/word errors.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use admissible_core::config::{fnv1a64, parse_config, ConfigError, WorkbenchConfig};
use admissible_core::cusped::{
    build_cusped, cayley_ball_graph, estimate_delta, CuspError, DeltaMethod, MetricGraph,
};
use admissible_core::gog::Verdict;
use admissible_core::groupcore::{BackendSpec, FreeWord, GroupElement, GroupError};
use admissible_core::lattice::LatticeIndex;
use admissible_core::normalform::{self, WordError};
use admissible_core::quotient::{proj_bound_free, verify_dist_projs, QuotientError};
use admissible_core::treespace::{build_ball, IntrinsicMetric, SpaceError};

const EXIT_THRESHOLD: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_PARSE: u8 = 5;

#[derive(Parser)]
#[command(name = "admissible", about = "graph-of-groups geometry workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Path to a workbench config.
    config: PathBuf,
    /// Maximum number of ball vertices before aborting.
    #[arg(long)]
    budget_vertices: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the admissibility conditions on a config.
    CheckAdmissible {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 4)]
        radius: u32,
        /// Write per-condition rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build a ball of the tree of spaces and export it.
    BuildBall {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 3)]
        radius: u32,
        /// Export path (text header + vertex table + edge list).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distortion profile of an edge or vertex space.
    Distortion {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Oriented edge id whose edge space is profiled (or whose source
        /// vertex space, with --kind vertex).
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        /// Sampling seed (mandatory: sampling kicks in above 2000 vertices).
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "edge")]
        kind: String,
        #[arg(long)]
        cap_k: Option<f64>,
        #[arg(long)]
        cap_a: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Two-sided distance formula across an edge.
    DistProjs {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        #[arg(long, default_value_t = 2.0)]
        cap_k: f64,
        #[arg(long, default_value_t = 2.0)]
        cap_a: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Projection diameters between peripheral lines in a free quotient.
    ProjBound {
        /// Free rank of the quotient (used without a config).
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Peripheral element (a word in x, y, ...).
        #[arg(long, default_value = "x")]
        peripheral: String,
        #[arg(long, default_value_t = 6)]
        radius: u32,
        /// Largest admissible projection diameter.
        #[arg(long, default_value_t = 0)]
        cap_diameter: u64,
        /// Disable the boundary guard.
        #[arg(long)]
        no_guard: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sides decomposition of a ball relative to an edge space.
    Sides {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        edge: String,
        #[arg(long, default_value_t = 4)]
        radius: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Gromov delta of a Cayley ball, horoball, or cusped space.
    CuspDelta {
        /// Base group: free<k> or abelian<n>, e.g. free2.
        #[arg(long, default_value = "free2")]
        base: String,
        /// Peripheral word; with it the cusped space is built, without it
        /// the plain Cayley ball.
        #[arg(long)]
        peripheral: Option<String>,
        #[arg(long, default_value_t = 4)]
        radius: u32,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// four-point (default) or basepoint.
        #[arg(long, default_value = "four-point")]
        method: String,
        #[arg(long, default_value_t = 0)]
        basepoint: u32,
        #[arg(long, default_value_t = 1)]
        guard_margin: u32,
        #[arg(long)]
        budget_vertices: Option<usize>,
        /// Export the graph as an edge list with depth annotations.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Reduce a word (read from stdin) to its normal form.
    Nf {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let code = match &e {
            ConfigError::Validation(_) => EXIT_VALIDATION,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Self {
        let code = match &e {
            SpaceError::BudgetExceeded { .. } => EXIT_BUDGET,
            SpaceError::Gog(_) => EXIT_VALIDATION,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<CuspError> for Failure {
    fn from(e: CuspError) -> Self {
        let code = match &e {
            CuspError::Group(GroupError::BudgetExceeded { .. }) => EXIT_BUDGET,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<QuotientError> for Failure {
    fn from(e: QuotientError) -> Self {
        Failure::new(EXIT_VALIDATION, e.to_string())
    }
}

impl From<WordError> for Failure {
    fn from(e: WordError) -> Self {
        Failure::new(EXIT_PARSE, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_PARSE, e.to_string())
    }
}

/// Writes a file atomically: temp file in the same directory, then rename.
fn write_atomic(path: &PathBuf, content: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn load(cfg: &ConfigArgs) -> Result<(WorkbenchConfig, usize), Failure> {
    let parsed = parse_config(&cfg.config)?;
    let budget = cfg.budget_vertices.unwrap_or(parsed.budget_vertices);
    Ok((parsed, budget))
}

fn report_header(name: &str, hash: u64, experiment: &str) {
    println!("experiment = {experiment}");
    println!("config = {name}");
    println!("config_hash = {hash:016x}");
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::CheckAdmissible { cfg, radius, csv } => {
            let started = Instant::now();
            let (parsed, budget) = load(&cfg)?;
            let report = parsed
                .gog
                .check_admissibility_with_budget(radius, budget)
                .map_err(|e| match e {
                    admissible_core::GogError::Group(GroupError::BudgetExceeded {
                        ..
                    }) => Failure::new(EXIT_BUDGET, e.to_string()),
                    other => Failure::new(EXIT_VALIDATION, other.to_string()),
                })?;
            report_header(&parsed.name, parsed.content_hash, "check-admissible");
            println!("radius = {radius}");
            let mut rows = String::from("condition,verdict,detail\n");
            for c in &report.conditions {
                let verdict = match c.verdict {
                    Verdict::Pass => "pass",
                    Verdict::Fail => "fail",
                    Verdict::InconclusiveAtRadius => "inconclusive-at-radius",
                };
                println!("condition \"{}\" = {verdict}", c.name);
                for w in &c.witnesses {
                    println!("  witness: {w}");
                }
                for d in &c.details {
                    println!("  detail: {d}");
                }
                rows.push_str(&format!(
                    "{},{},{}\n",
                    c.name.replace(',', ";"),
                    verdict,
                    c.witnesses.len()
                ));
            }
            for (edge, idx) in &report.kernel_indices {
                match idx {
                    LatticeIndex::Finite(d) => println!("kernel_index {edge} = {d}"),
                    LatticeIndex::Infinite => println!("kernel_index {edge} = infinite"),
                }
            }
            println!("wallclock_ms = {}", started.elapsed().as_millis());
            let status = if report.passed() { "pass" } else { "fail" };
            println!("status = {status}");
            if let Some(path) = csv {
                write_atomic(&path, &rows)?;
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            })
        }

        Command::BuildBall { cfg, radius, out } => {
            let started = Instant::now();
            let (parsed, budget) = load(&cfg)?;
            let gog = Arc::new(parsed.gog.clone());
            let ball = build_ball(&gog, radius, budget)?;
            report_header(&parsed.name, parsed.content_hash, "build-ball");
            println!("radius = {radius}");
            println!("vertices = {}", ball.vertex_count());
            println!("edges = {}", ball.edge_count());
            println!("tree_nodes = {}", ball.tree_nodes().len());
            println!("tree_edges = {}", ball.tree_edges().len());
            println!("wallclock_ms = {}", started.elapsed().as_millis());
            println!("status = ok");
            if let Some(path) = out {
                let mut text = format!(
                    "# ball config_hash={:016x} radius={} vertices={} edges={}\n",
                    parsed.content_hash,
                    radius,
                    ball.vertex_count(),
                    ball.edge_count()
                );
                for i in 0..ball.vertex_count() as u32 {
                    let v = ball.vertex(i);
                    text.push_str(&format!(
                        "vertex {} {} {}\n",
                        i,
                        gog.vertex_id(v.gamma),
                        normalform::render_nf(&gog, &v.nf)
                    ));
                }
                for i in 0..ball.vertex_count() as u32 {
                    for &j in ball.neighbours(i) {
                        if i < j {
                            text.push_str(&format!("edge {i} {j}\n"));
                        }
                    }
                }
                write_atomic(&path, &text)?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Distortion {
            cfg,
            edge,
            radius,
            seed,
            kind,
            cap_k,
            cap_a,
            csv,
        } => {
            let started = Instant::now();
            let (parsed, budget) = load(&cfg)?;
            let gog = Arc::new(parsed.gog.clone());
            let e = gog
                .edge_index(&edge)
                .ok_or_else(|| Failure::new(EXIT_PARSE, format!("unknown edge `{edge}`")))?;
            let ball = build_ball(&gog, radius, budget)?;
            let anchor = base_edge_anchor(&gog, &ball, e)?;
            let te = ball
                .tree_edge_of(anchor, e)?
                .ok_or_else(|| Failure::new(EXIT_VALIDATION, "edge space not in ball"))?;
            let (sel, metric) = match kind.as_str() {
                "edge" => {
                    let fwd = ball.tree_edges()[te as usize].edge == e;
                    (ball.edge_space(te, fwd)?, IntrinsicMetric::EdgeL1)
                }
                "vertex" => {
                    let node = ball.vertex(anchor).tree_node;
                    (ball.vertex_space(node)?, IntrinsicMetric::VertexWord)
                }
                other => {
                    return Err(Failure::new(
                        EXIT_PARSE,
                        format!("kind must be edge or vertex, got `{other}`"),
                    ))
                }
            };
            let prof = ball.distortion_profile(&sel, metric, Some(seed))?;
            report_header(&parsed.name, parsed.content_hash, "distortion");
            println!("edge = {edge}");
            println!("kind = {kind}");
            println!("radius = {radius}");
            println!("seed = {seed}");
            println!("selection_size = {}", sel.verts.len());
            println!("pairs = {}", prof.pairs);
            println!("certified_pairs = {}", prof.certified_pairs);
            println!("sampled = {}", prof.sampled);
            println!("fitted_k = {:.6}", prof.k);
            println!("fitted_a = {:.6}", prof.a);
            println!("max_ratio = {:.6}", prof.max_ratio);
            println!("wallclock_ms = {}", started.elapsed().as_millis());
            let ok = cap_k.map_or(true, |c| prof.k <= c) && cap_a.map_or(true, |c| prof.a <= c);
            println!("status = {}", if ok { "pass" } else { "fail" });
            if let Some(path) = csv {
                let mut rows = String::from("d_intrinsic,d_ambient,count\n");
                for (di, da, c) in &prof.rows {
                    rows.push_str(&format!("{di},{da},{c}\n"));
                }
                write_atomic(&path, &rows)?;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            })
        }

        Command::DistProjs {
            cfg,
            edge,
            radius,
            cap_k,
            cap_a,
            csv,
        } => {
            let started = Instant::now();
            let (parsed, _budget) = load(&cfg)?;
            let e = parsed
                .gog
                .edge_index(&edge)
                .ok_or_else(|| Failure::new(EXIT_PARSE, format!("unknown edge `{edge}`")))?;
            let rep = verify_dist_projs(&parsed.gog, e, radius, (cap_k, cap_a))?;
            report_header(&parsed.name, parsed.content_hash, "dist-projs");
            println!("edge = {edge}");
            println!("radius = {radius}");
            println!("pairs = {}", rep.rows.len());
            println!("fitted_k = {:.6}", rep.k);
            println!("fitted_a = {:.6}", rep.a);
            println!("cap_k = {cap_k:.6}");
            println!("cap_a = {cap_a:.6}");
            println!("violations = {}", rep.violations);
            println!("wallclock_ms = {}", started.elapsed().as_millis());
            let ok = rep.violations == 0 && rep.k <= cap_k && rep.a <= cap_a;
            println!("status = {}", if ok { "pass" } else { "fail" });
            if let Some(path) = csv {
                let mut rows = String::from("pair_id,d_edge,d_yv,d_yw,d_xv\n");
                for (i, r) in rep.rows.iter().enumerate() {
                    rows.push_str(&format!(
                        "{},{},{},{},{}\n",
                        i, r.d_edge, r.d_yv, r.d_yw, r.d_xv
                    ));
                }
                write_atomic(&path, &rows)?;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            })
        }

        Command::ProjBound {
            rank,
            peripheral,
            radius,
            cap_diameter,
            no_guard,
            csv,
        } => {
            let started = Instant::now();
            let backend = BackendSpec::free(rank);
            let u = match backend
                .element_from_str(&peripheral)
                .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?
            {
                GroupElement::Free(w) => w,
                _ => unreachable!("free backend yields free elements"),
            };
            if u.is_identity() {
                return Err(Failure::new(EXIT_PARSE, "peripheral must be nontrivial"));
            }
            let rep = proj_bound_free(rank, &u, radius, !no_guard);
            let spec = format!("free{rank} peripheral={peripheral} radius={radius}");
            report_header(&spec, fnv1a64(spec.as_bytes()), "proj-bound");
            println!("lines = {}", rep.lines);
            println!("ordered_pairs = {}", rep.ordered_pairs);
            println!("max_diameter = {}", rep.max_diameter);
            println!("guard_excluded_points = {}", rep.guard_excluded);
            println!("wallclock_ms = {}", started.elapsed().as_millis());
            let ok = rep.max_diameter <= cap_diameter;
            println!("status = {}", if ok { "pass" } else { "fail" });
            if let Some(path) = csv {
                let mut rows = String::from("line,other_line,diameter\n");
                if rep.offenders.is_empty() {
                    rows.push_str(&format!("all,all,{}\n", rep.max_diameter));
                }
                for (a, b, d) in &rep.offenders {
                    rows.push_str(&format!("\"{a}\",\"{b}\",{d}\n"));
                }
                write_atomic(&path, &rows)?;
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            })
        }

        Command::Sides {
            cfg,
            edge,
            radius,
            csv,
        } => {
            let started = Instant::now();
            let (parsed, budget) = load(&cfg)?;
            let gog = Arc::new(parsed.gog.clone());
            let e = gog
                .edge_index(&edge)
                .ok_or_else(|| Failure::new(EXIT_PARSE, format!("unknown edge `{edge}`")))?;
            let ball = build_ball(&gog, radius, budget)?;
            let anchor = base_edge_anchor(&gog, &ball, e)?;
            let te = ball
                .tree_edge_of(anchor, e)?
                .ok_or_else(|| Failure::new(EXIT_VALIDATION, "edge space not in ball"))?;
            let fwd = ball.tree_edges()[te as usize].edge == e;
            let sides = ball.sides_decomposition(te, fwd)?;
            let constant = ball.sides_constant_on_vertex_spaces(&sides).is_none();
            report_header(&parsed.name, parsed.content_hash, "sides");
            println!("edge = {edge}");
            println!("radius = {radius}");
            println!("on_edge = {}", sides.on_edge.len());
            println!("side_plus = {}", sides.plus.len());
            println!("side_minus = {}", sides.minus.len());
            println!("constant_on_vertex_spaces = {constant}");
            println!("wallclock_ms = {}", started.elapsed().as_millis());
            println!("status = {}", if constant { "pass" } else { "fail" });
            if let Some(path) = csv {
                let mut rows = String::from("vertex,gamma,side\n");
                let mut klass = vec![""; ball.vertex_count()];
                for &v in &sides.on_edge {
                    klass[v as usize] = "on-edge";
                }
                for &v in &sides.plus {
                    klass[v as usize] = "plus";
                }
                for &v in &sides.minus {
                    klass[v as usize] = "minus";
                }
                for i in 0..ball.vertex_count() {
                    rows.push_str(&format!(
                        "{},{},{}\n",
                        i,
                        gog.vertex_id(ball.vertex(i as u32).gamma),
                        klass[i]
                    ));
                }
                write_atomic(&path, &rows)?;
            }
            Ok(if constant {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_THRESHOLD)
            })
        }

        Command::CuspDelta {
            base,
            peripheral,
            radius,
            depth,
            method,
            basepoint,
            guard_margin,
            budget_vertices,
            export,
        } => {
            let started = Instant::now();
            let budget = budget_vertices.unwrap_or(5_000_000);
            let backend = parse_base(&base)?;
            let graph: MetricGraph = match &peripheral {
                Some(p) => {
                    let u = peripheral_word(&backend, p)?;
                    build_cusped(&backend, &u, radius, depth, budget)?.graph
                }
                None => cayley_ball_graph(&backend, radius, budget)?.0,
            };
            let m = match method.as_str() {
                "four-point" => DeltaMethod::FourPoint,
                "basepoint" => DeltaMethod::Basepoint(basepoint),
                other => {
                    return Err(Failure::new(
                        EXIT_PARSE,
                        format!("method must be four-point or basepoint, got `{other}`"),
                    ))
                }
            };
            let est = estimate_delta(&graph, m, guard_margin)?;
            let spec = format!(
                "base={base} peripheral={} radius={radius} depth={depth}",
                peripheral.as_deref().unwrap_or("-")
            );
            report_header(&spec, fnv1a64(spec.as_bytes()), "cusp-delta");
            println!("vertices = {}", graph.vertex_count());
            println!("edges = {}", graph.edge_count());
            println!("delta = {}", est.value());
            println!("twice_delta = {}", est.twice_value);
            println!("method = {method}");
            println!("certified_vertices = {}", est.certified_vertices);
            println!("certified_quadruples = {}", est.certified_quadruples);
            println!("guard_margin = {guard_margin}");
            println!("wallclock_ms = {}", started.elapsed().as_millis());
            println!("status = ok");
            if let Some(path) = export {
                write_atomic(&path, &graph.export())?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Nf { cfg } => {
            let (parsed, _) = load(&cfg)?;
            let gog = Arc::new(parsed.gog.clone());
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            let word = normalform::parse_word(&gog, &text)?;
            let nf = normalform::reduce(&gog, &word)?;
            println!("{}", normalform::render_nf(&gog, &nf));
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// The ball vertex anchoring the identity coset of an edge: the basepoint
/// carried along spanning-tree crossings to the edge's source vertex.
fn base_edge_anchor(
    gog: &Arc<admissible_core::GraphOfGroups>,
    ball: &admissible_core::BallGraph,
    e: usize,
) -> Result<u32, Failure> {
    use admissible_core::normalform::NormalForm;
    let target = gog.edge(e).source;
    // BFS over the underlying graph's spanning tree to find the token path
    let mut prefix = NormalForm::identity(gog);
    let mut at = gog.base_vertex();
    let mut guard = 0;
    'outer: while at != target {
        guard += 1;
        if guard > gog.vertex_count() + 1 {
            return Err(Failure::new(EXIT_VALIDATION, "edge source unreachable"));
        }
        // walk greedily along tree edges reducing the tree distance
        for &te in gog.link(at) {
            if !gog.is_tree_edge(te) {
                continue;
            }
            let next = gog.edge(te).target;
            if tree_dist(gog, next, target) < tree_dist(gog, at, target) {
                prefix = normalform::cross(gog, &prefix, te)
                    .map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))?;
                at = next;
                continue 'outer;
            }
        }
        return Err(Failure::new(EXIT_VALIDATION, "edge source unreachable"));
    }
    ball.find(&prefix)
        .ok_or_else(|| Failure::new(EXIT_VALIDATION, "edge anchor outside the ball"))
}

fn tree_dist(gog: &admissible_core::GraphOfGroups, from: usize, to: usize) -> usize {
    use std::collections::VecDeque;
    let mut dist = vec![usize::MAX; gog.vertex_count()];
    let mut q = VecDeque::new();
    dist[from] = 0;
    q.push_back(from);
    while let Some(u) = q.pop_front() {
        if u == to {
            return dist[u];
        }
        for &e in gog.link(u) {
            if !gog.is_tree_edge(e) {
                continue;
            }
            let v = gog.edge(e).target;
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    usize::MAX
}

fn parse_base(base: &str) -> Result<BackendSpec, Failure> {
    if let Some(k) = base.strip_prefix("free") {
        let k: usize = k
            .parse()
            .map_err(|_| Failure::new(EXIT_PARSE, format!("bad base `{base}`")))?;
        if k < 1 {
            return Err(Failure::new(EXIT_PARSE, "free rank must be at least 1"));
        }
        return Ok(BackendSpec::free(k));
    }
    if let Some(n) = base.strip_prefix("abelian") {
        let n: usize = n
            .parse()
            .map_err(|_| Failure::new(EXIT_PARSE, format!("bad base `{base}`")))?;
        if n < 1 {
            return Err(Failure::new(EXIT_PARSE, "abelian rank must be at least 1"));
        }
        return Ok(BackendSpec::free_abelian(n));
    }
    Err(Failure::new(
        EXIT_PARSE,
        format!("base must be free<k> or abelian<n>, got `{base}`"),
    ))
}

fn peripheral_word(backend: &BackendSpec, text: &str) -> Result<FreeWord, Failure> {
    match backend
        .element_from_str(text)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?
    {
        GroupElement::Free(w) if !w.is_identity() => Ok(w),
        GroupElement::Free(_) => Err(Failure::new(EXIT_PARSE, "peripheral must be nontrivial")),
        _ => Err(Failure::new(
            EXIT_PARSE,
            "peripheral subgroups are supported for free bases only",
        )),
    }
}
