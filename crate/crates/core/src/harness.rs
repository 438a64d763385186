//! Experiment plumbing: census runs over generated hosts, threshold probes
//! around the semi-degree bound, and their on-disk artifacts.
//!
//! Every random choice is drawn from ChaCha streams keyed by the config
//! seed, and records are written in job order, so outputs do not depend on
//! the rayon thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::extremal::extremal_graph;
use crate::generate::{labeled_tournaments, random_exact_semi_degree_graph, random_oriented, random_tournament};
use crate::graph::{GraphError, OrientedGraph};
use crate::pattern::{Orientation, OrientationPattern, PatternError};
use crate::solver::{self, EmbeddingProblem, RootStrategy, SearchMode, SearchOptions, SolverError, Verdict};
use crate::walk::CaseThresholds;

const JOB_CHUNK: usize = 256;
const JOURNAL: &str = "journal.jsonl";
const RECORDS: &str = "records.jsonl";
const SUMMARY: &str = "summary.csv";
const GRAPHS: &str = "graphs";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Where the host graphs come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// `count` graphs, each pair joined with probability `p`.
    RandomOriented { n: usize, p: f64, count: usize },
    /// `count` random tournaments for each listed order.
    RandomTournament { sizes: Vec<usize>, count: usize },
    /// All `2^(n choose 2)` labelled tournaments.
    LabeledTournaments { n: usize },
    /// For each degree in `degrees`, `count` graphs whose semi-degree is
    /// exactly that degree.
    ExactSemiDegree { n: usize, degrees: Vec<usize>, count: usize },
    /// The four-part extremal graph for `m`.
    Extremal { m: usize },
    /// One graph in the line-oriented text format.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub generator: GeneratorSpec,
    /// Pattern classes, see [`pattern_for`].
    pub patterns: Vec<String>,
    #[serde(default = "default_mode")]
    pub mode: SearchMode,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub thresholds: CaseThresholds,
    /// Solver node budget per job; `None` runs every search to completion.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Wall times make outputs run-dependent, so they are opt-in.
    #[serde(default)]
    pub record_timing: bool,
}

fn default_mode() -> SearchMode {
    SearchMode::Cycle
}
fn default_alpha() -> f64 {
    0.1
}
fn default_gamma() -> f64 {
    0.25
}

impl ExperimentConfig {
    pub fn new(seed: u64, generator: GeneratorSpec, patterns: &[&str]) -> Self {
        ExperimentConfig {
            seed,
            generator,
            patterns: patterns.iter().map(|s| s.to_string()).collect(),
            mode: SearchMode::Cycle,
            alpha: default_alpha(),
            gamma: default_gamma(),
            thresholds: CaseThresholds::default(),
            budget: None,
            output: None,
            record_timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.budget == Some(0) {
            return bad("budget must be positive");
        }
        if self.patterns.is_empty() {
            return bad("no pattern classes");
        }
        let unique: BTreeSet<&String> = self.patterns.iter().collect();
        if unique.len() != self.patterns.len() {
            return bad("pattern classes must be distinct");
        }
        if !(self.alpha > 0.0 && self.gamma > 0.0) {
            return bad("alpha and gamma must be positive");
        }
        match &self.generator {
            GeneratorSpec::RandomOriented { p, .. } if !(0.0..=1.0).contains(p) => bad("p must lie in [0, 1]"),
            GeneratorSpec::LabeledTournaments { n } if *n > 7 => bad("labelled enumeration is limited to n <= 7"),
            _ => Ok(()),
        }
    }

    fn search_options(&self) -> SearchOptions {
        let opts = SearchOptions::sequential().with_root(RootStrategy::Rotations);
        match self.budget {
            Some(b) => opts.with_budget(b),
            None => opts.unbounded(),
        }
    }
}

/// One solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub graph_index: u64,
    pub graph_hash: String,
    pub n: usize,
    pub semi_degree: usize,
    pub tournament: bool,
    pub strong: bool,
    pub pattern_id: String,
    pub mode: SearchMode,
    pub verdict: Verdict,
    pub nodes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl CensusRecord {
    fn key(&self) -> (u64, String) {
        (self.graph_index, self.pattern_id.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRun {
    pub records: Vec<CensusRecord>,
    /// Jobs taken from an existing journal.
    pub resumed: usize,
    /// `(graph, class)` combinations with no pattern of the right shape,
    /// such as anti-directed cycles on an odd number of vertices.
    pub skipped: usize,
}

/// Hex SHA-256 of the text form, truncated to 128 bits.
pub fn graph_hash(g: &OrientedGraph) -> String {
    let digest = Sha256::digest(g.to_text().as_bytes());
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// Pattern of class `class` covering all `n` vertices: a closed word of
/// length `n` in cycle mode, a linear one of length `n - 1` in path mode.
///
/// Classes are `standard`, `anti-directed`, `random` (drawn from `rng`) or
/// a literal word accepted by the pattern parser. `None` when the class
/// has no member of that size.
pub fn pattern_for(
    class: &str,
    n: usize,
    mode: SearchMode,
    rng: &mut ChaCha8Rng,
) -> Result<Option<OrientationPattern>, PatternError> {
    let len = match mode {
        SearchMode::Cycle if n < 3 => return Ok(None),
        SearchMode::Cycle => n,
        SearchMode::Path if n < 2 => return Ok(None),
        SearchMode::Path => n - 1,
    };
    let make = |word: Vec<Orientation>| match mode {
        SearchMode::Cycle => OrientationPattern::closed(word),
        SearchMode::Path => OrientationPattern::linear(word),
    };
    let word = match class {
        "standard" => vec![Orientation::F; len],
        "anti-directed" => {
            if mode == SearchMode::Cycle && len % 2 == 1 {
                return Ok(None);
            }
            (0..len).map(|i| if i % 2 == 0 { Orientation::F } else { Orientation::B }).collect()
        }
        "random" => (0..len).map(|_| if rand::Rng::gen(rng) { Orientation::F } else { Orientation::B }).collect(),
        literal => {
            let p: OrientationPattern = literal.parse()?;
            let fits = p.is_closed() == (mode == SearchMode::Cycle) && p.vertex_count() == n;
            return Ok(fits.then_some(p));
        }
    };
    make(word).map(Some)
}

/// Host graphs in generation order with their indices.
pub fn generate_hosts(config: &ExperimentConfig) -> Result<Vec<(u64, OrientedGraph)>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let hosts: Vec<OrientedGraph> = match &config.generator {
        GeneratorSpec::RandomOriented { n, p, count } => (0..*count).map(|_| random_oriented(*n, *p, &mut rng)).collect(),
        GeneratorSpec::RandomTournament { sizes, count } => sizes
            .iter()
            .flat_map(|&n| (0..*count).map(move |_| n))
            .map(|n| random_tournament(n, &mut rng))
            .collect(),
        GeneratorSpec::LabeledTournaments { n } => labeled_tournaments(*n).collect(),
        GeneratorSpec::ExactSemiDegree { n, degrees, count } => {
            let mut out = Vec::new();
            for &d in degrees {
                for _ in 0..*count {
                    let g = random_exact_semi_degree_graph(*n, d, &mut rng).ok_or_else(|| {
                        HarnessError::Config(format!("no oriented graph on {n} vertices has semi-degree {d}"))
                    })?;
                    out.push(g);
                }
            }
            out
        }
        GeneratorSpec::Extremal { m } => vec![extremal_graph(*m).graph],
        GeneratorSpec::File { path } => vec![OrientedGraph::parse_text(&fs::read_to_string(path)?)?],
    };
    Ok(hosts.into_iter().enumerate().map(|(i, g)| (i as u64, g)).collect())
}

struct Job<'a> {
    graph_index: u64,
    graph: &'a OrientedGraph,
    hash: &'a str,
    pattern_id: &'a str,
    pattern: OrientationPattern,
}

fn run_job(job: &Job<'_>, config: &ExperimentConfig, opts: &SearchOptions) -> Result<CensusRecord, HarnessError> {
    let problem = match config.mode {
        SearchMode::Cycle => EmbeddingProblem::cycle(job.graph.clone(), job.pattern.clone()),
        SearchMode::Path => EmbeddingProblem::path(job.graph.clone(), job.pattern.clone()),
    };
    let clock = Instant::now();
    let outcome = solver::solve(&problem, opts)?;
    let wall = clock.elapsed().as_secs_f64() * 1e3;
    Ok(CensusRecord {
        graph_index: job.graph_index,
        graph_hash: job.hash.to_string(),
        n: job.graph.n(),
        semi_degree: job.graph.min_semi_degree(),
        tournament: job.graph.is_tournament(),
        strong: job.graph.is_strongly_connected(),
        pattern_id: job.pattern_id.to_string(),
        mode: config.mode,
        verdict: outcome.verdict,
        nodes: outcome.nodes,
        wall_ms: config.record_timing.then_some(wall),
    })
}

/// Valid records of an existing journal. A torn final line from an
/// interrupted run is dropped.
fn read_journal(path: &Path) -> Result<Vec<CensusRecord>, HarnessError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        match serde_json::from_str::<CensusRecord>(&line?) {
            Ok(r) => out.push(r),
            Err(_) => break,
        }
    }
    Ok(out)
}

fn write_jsonl(path: &Path, records: &[CensusRecord]) -> Result<(), HarnessError> {
    let mut f = File::create(path)?;
    for r in records {
        writeln!(f, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

/// Runs every `(host, pattern class)` job, appending to `journal.jsonl`
/// in the output directory as chunks finish. A rerun resumes from the
/// journal. On completion writes `records.jsonl` (sorted by graph index
/// then class), `summary.csv` and `graphs/<hash>.txt` fixtures.
pub fn census(config: &ExperimentConfig) -> Result<CensusRun, HarnessError> {
    config.validate()?;
    let hosts = generate_hosts(config)?;
    let hashes: Vec<String> = hosts.iter().map(|(_, g)| graph_hash(g)).collect();

    let out_dir = config.output.as_deref();
    let journal_path = out_dir.map(|d| d.join(JOURNAL));
    let mut records = match &journal_path {
        Some(p) => {
            fs::create_dir_all(p.parent().unwrap())?;
            let prior = read_journal(p)?;
            // rewrite without any torn tail so appends start on a clean line
            write_jsonl(p, &prior)?;
            prior
        }
        None => Vec::new(),
    };
    let resumed = records.len();
    let done: BTreeSet<(u64, String)> = records.iter().map(CensusRecord::key).collect();

    let mut jobs = Vec::new();
    let mut skipped = 0;
    let classes = config.patterns.len() as u64;
    for ((gi, g), hash) in hosts.iter().zip(&hashes) {
        for (ci, class) in config.patterns.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(1 + gi * classes + ci as u64);
            let Some(pattern) = pattern_for(class, g.n(), config.mode, &mut rng)? else {
                skipped += 1;
                continue;
            };
            if done.contains(&(*gi, class.clone())) {
                continue;
            }
            jobs.push(Job { graph_index: *gi, graph: g, hash, pattern_id: class, pattern });
        }
    }

    let opts = config.search_options();
    let mut journal = match &journal_path {
        Some(p) => Some(OpenOptions::new().append(true).open(p)?),
        None => None,
    };
    for chunk in jobs.chunks(JOB_CHUNK) {
        let fresh: Vec<CensusRecord> =
            chunk.par_iter().map(|job| run_job(job, config, &opts)).collect::<Result<_, _>>()?;
        if let Some(f) = journal.as_mut() {
            for r in &fresh {
                writeln!(f, "{}", serde_json::to_string(r)?)?;
            }
            f.flush()?;
        }
        records.extend(fresh);
    }

    records.sort_by_key(CensusRecord::key);
    if let Some(dir) = out_dir {
        write_jsonl(&dir.join(RECORDS), &records)?;
        fs::write(dir.join(SUMMARY), summary_csv(&records))?;
        let graphs = dir.join(GRAPHS);
        fs::create_dir_all(&graphs)?;
        for ((_, g), hash) in hosts.iter().zip(&hashes) {
            let path = graphs.join(format!("{hash}.txt"));
            if !path.exists() {
                fs::write(path, g.to_text())?;
            }
        }
    }
    Ok(CensusRun { records, resumed, skipped })
}

/// Verdict counts per `(n, semi-degree, class)`.
pub fn summary_csv(records: &[CensusRecord]) -> String {
    let mut groups: BTreeMap<(usize, usize, &str), [u64; 5]> = BTreeMap::new();
    for r in records {
        let e = groups.entry((r.n, r.semi_degree, &r.pattern_id)).or_default();
        e[0] += 1;
        e[match r.verdict {
            Verdict::Found => 1,
            Verdict::None => 2,
            Verdict::Unknown => 3,
        }] += 1;
        e[4] += r.nodes;
    }
    let mut out = String::from("n,semi_degree,pattern,jobs,found,none,unknown,nodes\n");
    for ((n, d, p), [jobs, found, none, unknown, nodes]) in &groups {
        out += &format!("{n},{d},{p},{jobs},{found},{none},{unknown},{nodes}\n");
    }
    out
}

/// Records contradicting two classical facts about tournaments: strong
/// tournaments have a directed Hamilton cycle and non-strong ones do not,
/// and every tournament has a directed Hamilton path. Only `standard`
/// records with a definite verdict are checked.
pub fn sanity_violations(records: &[CensusRecord]) -> Vec<&CensusRecord> {
    records
        .iter()
        .filter(|r| r.tournament && r.pattern_id == "standard" && r.verdict != Verdict::Unknown)
        .filter(|r| {
            let found = r.verdict == Verdict::Found;
            match r.mode {
                SearchMode::Cycle => r.n >= 3 && found != r.strong,
                SearchMode::Path => !found,
            }
        })
        .collect()
}

/// `⌈(3n - 4) / 8⌉`.
pub fn semi_degree_threshold(n: usize) -> usize {
    (3 * n).saturating_sub(4).div_ceil(8)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub family: String,
    pub semi_degree: usize,
    pub pattern_class: String,
    pub trials: usize,
    pub found: usize,
    pub none: usize,
    pub unknown: usize,
}

/// Anti-directed re-check of the extremal graph after reversing one edge
/// between `B` and `D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReversalCheck {
    pub edge: (usize, usize),
    pub semi_degree: usize,
    pub verdict: Verdict,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub seed: u64,
    pub n: usize,
    pub threshold: usize,
    /// Whether `(3n - 4) / 8` is an integer.
    pub threshold_exact: bool,
    pub rows: Vec<ProbeRow>,
    pub reversals: Vec<ReversalCheck>,
}

impl ProbeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data") + "\n"
    }
}

/// Tabulates verdicts around the semi-degree threshold.
///
/// For `ExactSemiDegree { n, count, .. }` the listed degrees are replaced
/// by the bracket `t - 1, t, t + 1` around `t = ⌈(3n - 4)/8⌉`, dropping
/// degrees no oriented graph on `n` vertices attains. For `Extremal { m }`
/// the witness is solved once per class and then once more for every
/// single `B`/`D` edge reversal with the anti-directed pattern. Other
/// generators are tabulated by their actual semi-degrees. Always searches
/// cycles.
pub fn threshold_probe(config: &ExperimentConfig) -> Result<ProbeReport, HarnessError> {
    config.validate()?;
    let mut cfg = config.clone();
    cfg.mode = SearchMode::Cycle;
    cfg.output = None;
    cfg.record_timing = false;
    let (family, n) = match &mut cfg.generator {
        GeneratorSpec::ExactSemiDegree { n, degrees, .. } => {
            let t = semi_degree_threshold(*n);
            *degrees = (t.saturating_sub(1)..=t + 1).filter(|&d| d <= n.saturating_sub(1) / 2).collect();
            ("bracket".to_string(), *n)
        }
        GeneratorSpec::Extremal { m } => (format!("extremal-{m}"), 8 * *m + 4),
        other => {
            let family = serde_json::to_value(&*other)?["kind"].as_str().unwrap_or("graphs").to_string();
            let n = generate_hosts(&cfg)?.first().map_or(0, |(_, g)| g.n());
            (family, n)
        }
    };
    let run = census(&cfg)?;

    let mut table: BTreeMap<(usize, usize), ProbeRow> = BTreeMap::new();
    for r in &run.records {
        let class = cfg.patterns.iter().position(|c| *c == r.pattern_id).unwrap();
        let row = table.entry((r.semi_degree, class)).or_insert_with(|| ProbeRow {
            family: family.clone(),
            semi_degree: r.semi_degree,
            pattern_class: r.pattern_id.clone(),
            trials: 0,
            found: 0,
            none: 0,
            unknown: 0,
        });
        row.trials += 1;
        match r.verdict {
            Verdict::Found => row.found += 1,
            Verdict::None => row.none += 1,
            Verdict::Unknown => row.unknown += 1,
        }
    }

    let mut reversals = Vec::new();
    if let GeneratorSpec::Extremal { m } = cfg.generator {
        let w = extremal_graph(m);
        let (b, d) = (&w.parts[1], &w.parts[3]);
        let pattern = OrientationPattern::anti_directed(w.n())?;
        let edges: Vec<(usize, usize)> = w
            .graph
            .edges()
            .filter(|&(u, v)| (b.contains(u) && d.contains(v)) || (d.contains(u) && b.contains(v)))
            .collect();
        let opts = cfg.search_options();
        reversals = edges
            .par_iter()
            .map(|&(u, v)| {
                let g = w.graph.with_edge_reversed(u, v);
                let semi_degree = g.min_semi_degree();
                let outcome = solver::solve(&EmbeddingProblem::cycle(g, pattern.clone()), &opts)?;
                Ok(ReversalCheck { edge: (u, v), semi_degree, verdict: outcome.verdict, nodes: outcome.nodes })
            })
            .collect::<Result<_, HarnessError>>()?;
    }

    Ok(ProbeReport {
        seed: config.seed,
        n,
        threshold: semi_degree_threshold(n),
        threshold_exact: (3 * n).saturating_sub(4) % 8 == 0 && 3 * n >= 4,
        rows: table.into_values().collect(),
        reversals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_values() {
        assert_eq!(semi_degree_threshold(12), 4);
        assert_eq!(semi_degree_threshold(20), 7);
        assert_eq!(semi_degree_threshold(4), 1);
        assert_eq!(semi_degree_threshold(10), 4);
    }

    #[test]
    fn pattern_classes_have_the_right_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = pattern_for("standard", 6, SearchMode::Path, &mut rng).unwrap().unwrap();
        assert_eq!((p.len(), p.is_closed()), (5, false));
        assert!(pattern_for("anti-directed", 7, SearchMode::Cycle, &mut rng).unwrap().is_none());
        assert!(pattern_for("FFB*", 4, SearchMode::Cycle, &mut rng).unwrap().is_none());
        assert!(pattern_for("FFBB*", 4, SearchMode::Cycle, &mut rng).unwrap().is_some());
        assert!(pattern_for("FQ", 3, SearchMode::Path, &mut rng).is_err());
    }

    #[test]
    fn zero_budget_is_rejected() {
        let mut cfg = ExperimentConfig::new(1, GeneratorSpec::Extremal { m: 1 }, &["standard"]);
        cfg.budget = Some(0);
        assert!(matches!(census(&cfg), Err(HarnessError::Config(_))));
    }

    #[test]
    fn config_round_trips_through_json() {
        let mut cfg = ExperimentConfig::new(
            9,
            GeneratorSpec::RandomOriented { n: 7, p: 0.5, count: 3 },
            &["standard", "random"],
        );
        cfg.budget = Some(10_000);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let minimal = r#"{"seed":1,"generator":{"kind":"extremal","m":1},"patterns":["standard"]}"#;
        assert_eq!(ExperimentConfig::from_json(minimal).unwrap().mode, SearchMode::Cycle);
    }
}
