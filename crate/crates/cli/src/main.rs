use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use orientcycle::extremal::{extremal_graph, rotational_tournament, verify_extremal};
use orientcycle::generate::{directed_cycle, random_exact_semi_degree_graph, random_oriented, random_tournament};
use orientcycle::harness::{census, sanity_violations, threshold_probe, ExperimentConfig};
use orientcycle::reduced::{
    check_expansion, expand_traverse, skewed_traverse, traverse_bound, ExpansionMode, ReducedGraph,
    EXACT_EXPANSION_LIMIT,
};
use orientcycle::regularity::{is_eps_regular, is_super_regular, BipartitePair, RegularityMode, EXACT_PAIR_LIMIT};
use orientcycle::solver::{self, EmbeddingProblem, SearchOptions, Verdict};
use orientcycle::walk::pipeline::{embed, EmbedOptions};
use orientcycle::walk::Case;
use orientcycle::{OrientationPattern, OrientedGraph};

/// Exit code for usage, I/O and input errors; 0/1/2 are solver verdicts.
const ERROR_EXIT: u8 = 3;

#[derive(Parser)]
#[command(name = "orientcycle", version, about = "Oriented cycles in dense oriented graphs")]
struct Cli {
    /// Seed for every random choice; overrides a config file's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "ORIENTCYCLE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    RandomOriented,
    Tournament,
    SemiDegree,
    Cycle,
    Rotational,
    Extremal,
    Pair,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Far,
    Close,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph (or bipartite pair) in text form.
    Gen {
        kind: GenKind,
        #[arg(short, long, default_value_t = 10)]
        n: usize,
        /// Edge probability.
        #[arg(short, long, default_value_t = 0.5)]
        p: f64,
        /// Semi-degree for `semi-degree`.
        #[arg(long, default_value_t = 0)]
        degree: usize,
        /// Size parameter for `extremal`.
        #[arg(short, long, default_value_t = 1)]
        m: usize,
        /// Emit Graphviz instead of the text form.
        #[arg(long)]
        dot: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Search for a cycle (or path) of the given orientation.
    Solve {
        #[arg(short, long)]
        graph: PathBuf,
        /// `FBF…[*]` or `@standard:n`, `@antidirected:n`, `@random:n:seed`.
        #[arg(short, long)]
        pattern: String,
        /// Require a linear pattern (path search).
        #[arg(long)]
        path: bool,
        #[arg(long)]
        budget: Option<u64>,
        /// First vertex of the path.
        #[arg(long)]
        from: Option<usize>,
        /// Last vertex of the path.
        #[arg(long)]
        to: Option<usize>,
    },
    /// Build the four-part extremal graph, optionally verifying its claims.
    Extremal {
        #[arg(short, long, default_value_t = 1)]
        m: usize,
        /// Print a JSON verification report instead of the graph.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        budget: Option<u64>,
        /// Also write the graph here.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Shortest skewed traverse between two clusters of a reduced graph.
    Traverse {
        #[arg(short, long)]
        graph: PathBuf,
        /// Hamilton cycle of `R`: a file or a comma-separated list of
        /// vertices. Searched for if absent.
        #[arg(long)]
        cycle: Option<String>,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Also print the shifted walk.
        #[arg(long)]
        expand: bool,
    },
    /// Check `|N+(X)| ≥ |X| + αk/2` for all small enough `X`.
    ExpandCheck {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Defaults to exact when `R` is small enough.
        #[arg(long)]
        mode: Option<ModeArg>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Assign a closed pattern to a reduced graph and balance the walk.
    Embed {
        #[arg(short, long)]
        graph: PathBuf,
        #[arg(long)]
        cycle: Option<String>,
        #[arg(short, long)]
        pattern: String,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long)]
        case: Option<CaseArg>,
        /// Print the whole trace instead of a summary.
        #[arg(long)]
        full: bool,
    },
    /// ε-regularity (and optionally super-regularity) of a bipartite pair.
    PairCheck {
        #[arg(short, long)]
        pair: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Density for the super-regularity degree floors.
        #[arg(short, long)]
        d: Option<f64>,
        #[arg(long)]
        mode: Option<ModeArg>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Run a census from a JSON experiment config.
    Census {
        #[arg(short, long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Tabulate verdicts around the semi-degree threshold.
    Probe {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(ERROR_EXIT);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}

fn read_graph(path: &Path) -> Result<OrientedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(OrientedGraph::parse_text(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Labels `R` along the given Hamilton cycle, or along one found by the
/// solver.
fn reduced_graph(graph: &Path, cycle: Option<String>, alpha: f64) -> Result<ReducedGraph> {
    let r = read_graph(graph)?;
    let cycle = match cycle {
        Some(c) => parse_cycle(&c)?,
        None => {
            let pattern = OrientationPattern::standard(r.n())?;
            let outcome = solver::solve(&EmbeddingProblem::cycle(r.clone(), pattern), &SearchOptions::default())?;
            match outcome.embedding {
                Some(e) => e.vertices,
                None => bail!("reduced graph has no directed Hamilton cycle ({:?})", outcome.verdict),
            }
        }
    };
    Ok(ReducedGraph::new(&r, &cycle, alpha)?)
}

fn parse_cycle(arg: &str) -> Result<Vec<usize>> {
    let text = if Path::new(arg).is_file() { fs::read_to_string(arg)? } else { arg.to_string() };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().with_context(|| format!("bad vertex `{t}` in cycle")))
        .collect()
}

fn run(cli: Cli) -> Result<u8> {
    let seed = cli.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match cli.command {
        Command::Gen { kind, n, p, degree, m, dot, out } => {
            let g = match kind {
                GenKind::RandomOriented => random_oriented(n, p, &mut rng),
                GenKind::Tournament => random_tournament(n, &mut rng),
                GenKind::SemiDegree => random_exact_semi_degree_graph(n, degree, &mut rng)
                    .with_context(|| format!("no oriented graph on {n} vertices has semi-degree {degree}"))?,
                GenKind::Cycle => directed_cycle(n),
                GenKind::Rotational => rotational_tournament(n)?,
                GenKind::Extremal => extremal_graph(m).graph,
                GenKind::Pair => {
                    emit(out.as_deref(), &BipartitePair::random(n, n, p, &mut rng).to_text())?;
                    return Ok(0);
                }
            };
            emit(out.as_deref(), &if dot { g.to_dot() } else { g.to_text() })?;
            Ok(0)
        }
        Command::Solve { graph, pattern, path, budget, from, to } => {
            let host = read_graph(&graph)?;
            let pattern: OrientationPattern = pattern.parse()?;
            if path == pattern.is_closed() {
                bail!("use a closed pattern (trailing `*`) for cycles and a linear one with --path");
            }
            if !path && (from.is_some() || to.is_some()) {
                bail!("--from and --to only apply to path search");
            }
            let problem = if path {
                EmbeddingProblem::path(host, pattern).with_anchors(from, to)
            } else {
                EmbeddingProblem::cycle(host, pattern)
            };
            let mut opts = SearchOptions::default();
            if let Some(b) = budget {
                if b == 0 {
                    bail!("budget must be positive");
                }
                opts = opts.with_budget(b);
            }
            let outcome = solver::solve(&problem, &opts)?;
            print!("{}", json(&outcome)?);
            Ok(outcome.verdict.exit_code() as u8)
        }
        Command::Extremal { m, verify, budget, out } => {
            let w = extremal_graph(m);
            if let Some(p) = &out {
                emit(Some(p), &w.graph.to_text())?;
            }
            if !verify {
                print!("{}", w.graph.to_text());
                return Ok(0);
            }
            let mut opts = SearchOptions::default();
            if let Some(b) = budget {
                opts = opts.with_budget(b);
            }
            let report = verify_extremal(&w, &opts);
            print!("{}", json(&report)?);
            let ok = report.audit.is_ok()
                && report.semi_degree_matches
                && report.anti_directed_hamiltonian == Verdict::None
                && report.longest_anti_directed <= report.longest_bound;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Traverse { graph, cycle, from, to, alpha, expand } => {
            let rg = reduced_graph(&graph, cycle, alpha)?;
            let t = skewed_traverse(&rg, from, to)?;
            let bound = traverse_bound(alpha);
            let mut value = serde_json::json!({
                "from": from,
                "to": to,
                "length": t.length(),
                "bound": bound,
                "edges": t.edges,
            });
            if expand {
                value["shifted_walk"] = serde_json::to_value(expand_traverse(&rg, &t))?;
            }
            print!("{}", json(&value)?);
            Ok(if t.length() <= bound { 0 } else { 1 })
        }
        Command::ExpandCheck { graph, alpha, mode, samples } => {
            let r = read_graph(&graph)?;
            let exact = mode.map_or(r.n() <= EXACT_EXPANSION_LIMIT, |m| m == ModeArg::Exact);
            let mode = if exact { ExpansionMode::Exact } else { ExpansionMode::Sampled { samples, seed } };
            let report = check_expansion(&r, alpha, mode)?;
            print!("{}", json(&report)?);
            Ok(match (&report, report.counterexample()) {
                (_, Some(_)) => 1,
                (orientcycle::reduced::ExpansionReport::Exact(_), None) => 0,
                _ => 2,
            })
        }
        Command::Embed { graph, cycle, pattern, alpha, gamma, mu, case, full } => {
            let rg = reduced_graph(&graph, cycle, alpha)?;
            let p: OrientationPattern = pattern.parse()?;
            let opts = EmbedOptions {
                alpha,
                gamma,
                mu,
                case: case.map(|c| match c {
                    CaseArg::Far => Case::Far,
                    CaseArg::Close => Case::Close,
                }),
                ..EmbedOptions::default()
            };
            let trace = embed(&rg, None, &p, &opts, &mut rng)?;
            if full {
                print!("{}", json(&trace)?);
            } else {
                let summary = serde_json::json!({
                    "case": trace.case,
                    "reversed": trace.reversed,
                    "n": trace.n,
                    "clusters": trace.clusters,
                    "placement_draws": trace.placement_draws,
                    "phases": trace.phases,
                    "corrections": trace.corrections.len(),
                    "homomorphic": trace.homomorphic,
                    "certificate": trace.certificate,
                });
                print!("{}", json(&summary)?);
            }
            Ok(if trace.homomorphic && trace.certificate.corresponds { 0 } else { 1 })
        }
        Command::PairCheck { pair, eps, d, mode, samples } => {
            let text = fs::read_to_string(&pair).with_context(|| format!("reading {}", pair.display()))?;
            let p = BipartitePair::parse_text(&text)?;
            let exact = mode.map_or(p.left() + p.right() <= EXACT_PAIR_LIMIT, |m| m == ModeArg::Exact);
            let mode = if exact { RegularityMode::Exact } else { RegularityMode::Sampled { samples, seed } };
            let (text, holds, certified) = match d {
                Some(d) => {
                    let r = is_super_regular(&p, eps, d, mode)?;
                    (json(&r)?, r.holds(), r.is_certified())
                }
                None => {
                    let r = is_eps_regular(&p, eps, mode)?;
                    (json(&r)?, r.witness().is_none(), r.is_certified_regular())
                }
            };
            print!("{text}");
            Ok(match (holds, certified) {
                (true, true) => 0,
                (false, _) => 1,
                (true, false) => 2,
            })
        }
        Command::Census { config, out } => {
            let mut cfg = ExperimentConfig::from_json(&fs::read_to_string(&config)?)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            if out.is_some() {
                cfg.output = out;
            }
            let run = census(&cfg)?;
            let bad = sanity_violations(&run.records);
            let count = |v: Verdict| run.records.iter().filter(|r| r.verdict == v).count();
            let value = serde_json::json!({
                "records": run.records.len(),
                "resumed": run.resumed,
                "skipped": run.skipped,
                "found": count(Verdict::Found),
                "none": count(Verdict::None),
                "unknown": count(Verdict::Unknown),
                "sanity_violations": bad.len(),
            });
            print!("{}", json(&value)?);
            Ok(if bad.is_empty() { 0 } else { 1 })
        }
        Command::Probe { config, out } => {
            let mut cfg = ExperimentConfig::from_json(&fs::read_to_string(&config)?)?;
            cfg.seed = cli.seed.unwrap_or(cfg.seed);
            emit(out.as_deref(), &threshold_probe(&cfg)?.to_json())?;
            Ok(0)
        }
    }
}
