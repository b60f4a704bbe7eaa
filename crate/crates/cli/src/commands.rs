//! Dataset loading and algorithm dispatch for `run` and `compare`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;

use stream_maxcov::framework::{run_budgeted_guessing, run_guessing, Algorithm, GuessingConfig, LadderKind};
use stream_maxcov::offline::{
    binomial, brute_force_budgeted, brute_force_group, brute_force_opt, brute_force_vertex, greedy_opt,
    DEFAULT_ORACLE_CAP,
};
use stream_maxcov::setstream::{
    materialize_graph, read_graph_stream, read_set_stream, Hypergraph, RecordKind, SetStream,
};
use stream_maxcov::streamalgs::{
    boosted_single_pass, budgeted_single_pass, group_multi_pass, group_single_pass, half_single_pass,
    multi_pass_threshold, single_pass_threshold, sketch_all,
};
use stream_maxcov::vertexcover::{near_regular_sample, solve_on_sparsifier, SolveStrategy, UniformSampler};
use stream_maxcov::{seed, Error, Solution};

use crate::report::{RunReport, CSV_SCHEMA_VERSION};

/// Environment variable overriding the subset-enumeration cap.
pub const ORACLE_CAP_ENV: &str = "STREAM_MAXCOV_ORACLE_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum AlgoName {
    SinglePass,
    MultiPass,
    Half,
    Boosted,
    SketchAll,
    GroupSingle,
    GroupMulti,
    Budgeted,
    Greedy,
    VertexSample,
    VertexSparsify,
}

impl AlgoName {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }

    fn on_graphs(self) -> bool {
        matches!(self, AlgoName::VertexSample | AlgoName::VertexSparsify)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LadderArg {
    Pow2,
    Fine,
}

impl From<LadderArg> for LadderKind {
    fn from(arg: LadderArg) -> Self {
        match arg {
            LadderArg::Pow2 => LadderKind::Pow2,
            LadderArg::Fine => LadderKind::Fine,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub k: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub oracle_z: bool,
    pub ladder: Option<LadderArg>,
    pub lambda_c: f64,
    pub b: Option<f64>,
    pub budget: Option<f64>,
    pub quotas: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub require_oracle: bool,
    pub refine: bool,
    pub oracle_cap: u64,
}

impl RunOptions {
    pub fn new(k: usize, epsilon: f64) -> Self {
        RunOptions {
            k,
            epsilon,
            seed: 42,
            oracle_z: false,
            ladder: None,
            lambda_c: 1.0,
            b: None,
            budget: None,
            quotas: None,
            trials: None,
            require_oracle: false,
            refine: false,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Format(String),
    OracleTooLarge(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Format(_) => 3,
            CliError::OracleTooLarge(_) => 4,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Format(m) => write!(f, "format error: {m}"),
            CliError::OracleTooLarge(m) => write!(f, "oracle too large: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Parse { .. } | Error::Format { .. } | Error::StreamConsistency { .. } | Error::Domain(_) => {
                CliError::Format(message)
            }
            Error::InvalidParameter(_) | Error::Io(_) => CliError::Usage(message),
            Error::OracleTooLarge { .. } => CliError::OracleTooLarge(message),
            Error::IncompatibleSketch(_) | Error::Invariant(_) => CliError::Internal(message),
        }
    }
}

/// Reads the oracle cap from the environment, defaulting to [`DEFAULT_ORACLE_CAP`].
pub fn oracle_cap_from_env() -> Result<u64, CliError> {
    match std::env::var(ORACLE_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{ORACLE_CAP_ENV}={v} is not an integer"))),
        Err(_) => Ok(DEFAULT_ORACLE_CAP),
    }
}

pub enum Dataset {
    Sets(SetStream),
    Graph(Hypergraph),
}

/// Loads `.gstream` files as graphs and everything else as set streams.
pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    if path.extension().and_then(|e| e.to_str()) == Some("gstream") {
        Ok(Dataset::Graph(materialize_graph(&read_graph_stream(path)?)?))
    } else {
        Ok(Dataset::Sets(read_set_stream(path)?))
    }
}

/// Result of one algorithm run plus notes for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub notes: Vec<String>,
}

/// Caches oracle optima across the algorithms of one `compare`.
#[derive(Default)]
pub struct OracleCache(HashMap<String, Option<u64>>);

pub fn run_algorithm(
    dataset: &Dataset,
    algo: AlgoName,
    options: &RunOptions,
    cache: &mut OracleCache,
) -> Result<Outcome, CliError> {
    if !(options.epsilon > 0.0 && options.epsilon < 1.0) {
        return Err(CliError::Usage(format!("--eps {} outside (0, 1)", options.epsilon)));
    }
    let mut notes = Vec::new();
    let opt = oracle(dataset, algo, options, cache, &mut notes)?;
    if options.oracle_z && opt.is_none() {
        return Err(CliError::OracleTooLarge("--oracle-z needs the exact optimum".into()));
    }
    let z = options.oracle_z.then(|| opt.unwrap_or(0).max(1) as f64);

    let start = Instant::now();
    let (solution, ladder) = match dataset {
        Dataset::Sets(stream) => {
            if algo.on_graphs() {
                return Err(CliError::Usage(format!("{} needs a .gstream graph dataset", algo.name())));
            }
            run_on_sets(stream, algo, options, z)?
        }
        Dataset::Graph(graph) => {
            if !algo.on_graphs() {
                return Err(CliError::Usage(format!("{} needs a set stream dataset", algo.name())));
            }
            (run_on_graph(graph, algo, options)?, "none".to_string())
        }
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let ledger = solution.ledger;
    let report = RunReport {
        schema: CSV_SCHEMA_VERSION,
        algorithm: algo.name(),
        k: effective_k(algo, options),
        epsilon: options.epsilon,
        z,
        ladder,
        seed: options.seed,
        chosen: solution.chosen.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        exact_coverage: solution.exact_coverage,
        estimated_coverage: solution.estimated_coverage,
        opt,
        ratio: RunReport::ratio_of(solution.exact_coverage, opt),
        element_slots: ledger.element_slots(),
        set_id_slots: ledger.set_id_slots(),
        sketch_registers: ledger.sketch_registers(),
        passes: ledger.passes(),
        wall_time_ms,
    };
    Ok(Outcome { report, notes })
}

fn effective_k(algo: AlgoName, options: &RunOptions) -> usize {
    match (algo, &options.quotas) {
        (AlgoName::GroupSingle | AlgoName::GroupMulti, Some(q)) => q.iter().sum(),
        _ => options.k,
    }
}

fn quotas(options: &RunOptions) -> Result<&[usize], CliError> {
    options.quotas.as_deref().ok_or_else(|| CliError::Usage("group algorithms need --quotas".into()))
}

fn budget(options: &RunOptions) -> Result<f64, CliError> {
    options.budget.ok_or_else(|| CliError::Usage("budgeted runs need --budget".into()))
}

fn require_kind(stream: &SetStream, kind: RecordKind, algo: AlgoName) -> Result<(), CliError> {
    if stream.kind() == kind {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{} needs a {kind:?} stream, got {:?}", algo.name(), stream.kind())))
    }
}

/// The exact optimum for the algorithm's problem variant, or `None` when
/// enumeration exceeds the cap (an error under `--require-oracle`).
fn oracle(
    dataset: &Dataset,
    algo: AlgoName,
    options: &RunOptions,
    cache: &mut OracleCache,
    notes: &mut Vec<String>,
) -> Result<Option<u64>, CliError> {
    let cap = options.oracle_cap;
    let (key, result) = match (dataset, algo) {
        (Dataset::Graph(g), _) => (format!("vertex/{}", options.k), lazy(move || brute_force_vertex(g, options.k, cap))),
        (Dataset::Sets(s), AlgoName::GroupSingle | AlgoName::GroupMulti) => {
            require_kind(s, RecordKind::Grouped, algo)?;
            let q = quotas(options)?;
            (format!("group/{q:?}"), lazy(move || brute_force_group(s, q, cap)))
        }
        (Dataset::Sets(s), AlgoName::Budgeted) => {
            require_kind(s, RecordKind::Budgeted, algo)?;
            let b = budget(options)?;
            (format!("budget/{b}"), lazy(move || brute_force_budgeted(s, b)))
        }
        (Dataset::Sets(s), _) => (format!("plain/{}", options.k), lazy(move || brute_force_opt(s, options.k, cap))),
    };
    if let Some(cached) = cache.0.get(&key) {
        return Ok(*cached);
    }
    let opt = match result() {
        Ok(solution) => Some(solution.exact_coverage),
        Err(Error::OracleTooLarge { required, cap }) => {
            let message = format!("exact optimum needs {required} subsets, cap is {cap}");
            if options.require_oracle {
                return Err(CliError::OracleTooLarge(message));
            }
            notes.push(format!("oracle skipped: {message}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    cache.0.insert(key, opt);
    Ok(opt)
}

fn lazy<'a>(f: impl FnOnce() -> stream_maxcov::Result<Solution> + 'a) -> Box<dyn FnOnce() -> stream_maxcov::Result<Solution> + 'a> {
    Box::new(f)
}

fn run_on_sets(
    stream: &SetStream,
    algo: AlgoName,
    options: &RunOptions,
    z: Option<f64>,
) -> Result<(Solution, String), CliError> {
    let k = options.k;
    let eps = options.epsilon;
    let b = options.b.unwrap_or(4.0 / eps);
    let framework_algorithm = match algo {
        AlgoName::SinglePass => Some(Algorithm::SinglePass),
        AlgoName::MultiPass => Some(Algorithm::MultiPass),
        AlgoName::Half => Some(Algorithm::Half),
        AlgoName::Boosted => Some(Algorithm::Boosted { b }),
        AlgoName::GroupSingle => Some(Algorithm::GroupSingle { quotas: quotas(options)?.to_vec() }),
        AlgoName::GroupMulti => Some(Algorithm::GroupMulti { quotas: quotas(options)?.to_vec() }),
        _ => None,
    };

    if let Some(z) = z {
        let solution = match algo {
            AlgoName::SinglePass => single_pass_threshold(stream, k, z)?,
            AlgoName::MultiPass => multi_pass_threshold(stream, k, z, eps)?,
            AlgoName::Half => half_single_pass(stream, k, z)?,
            AlgoName::Boosted => boosted_single_pass(stream, k, z, b, options.oracle_cap)?,
            AlgoName::GroupSingle => group_single_pass(stream, quotas(options)?, z)?,
            AlgoName::GroupMulti => group_multi_pass(stream, quotas(options)?, z, eps)?,
            AlgoName::Budgeted => budgeted_single_pass(stream, budget(options)?, z)?,
            _ => return run_on_sets(stream, algo, options, None),
        };
        return Ok((solution, "oracle-z".into()));
    }

    if let Some(algorithm) = framework_algorithm {
        let config = GuessingConfig {
            ladder: options.ladder.map(LadderKind::from),
            lambda_c: options.lambda_c,
            seed: options.seed,
            refine_with_largest_set: options.refine,
            oracle_cap: options.oracle_cap,
            ..GuessingConfig::new(k, eps)
        };
        let kind = config.ladder.unwrap_or_else(|| algorithm.natural_ladder());
        let run = run_guessing(stream, &algorithm, &config)?;
        return Ok((run.solution, ladder_name(kind)));
    }

    match algo {
        AlgoName::SketchAll => {
            let sketch_seed = seed::derive(options.seed, "sketch-all", 0);
            Ok((sketch_all(stream, k, eps, sketch_seed, options.oracle_cap)?, "none".into()))
        }
        AlgoName::Budgeted => {
            let run = run_budgeted_guessing(stream, budget(options)?, eps)?;
            Ok((run.solution, "1+eps".into()))
        }
        AlgoName::Greedy => Ok((greedy_opt(stream, k), "none".into())),
        _ => unreachable!("graph algorithms are dispatched separately"),
    }
}

fn ladder_name(kind: LadderKind) -> String {
    match kind {
        LadderKind::Pow2 => "pow2".into(),
        LadderKind::Fine => "fine".into(),
    }
}

fn run_on_graph(graph: &Hypergraph, algo: AlgoName, options: &RunOptions) -> Result<Solution, CliError> {
    let cap = options.oracle_cap;
    let solution = match algo {
        AlgoName::VertexSample => {
            near_regular_sample(graph, options.k, options.epsilon, options.trials, options.seed, cap)?
        }
        AlgoName::VertexSparsify => {
            let sparsifier = UniformSampler::new(options.epsilon, options.seed);
            let strategy = if binomial(graph.node_count(), options.k.min(graph.node_count())) <= cap as u128 {
                SolveStrategy::Exhaustive { cap }
            } else {
                SolveStrategy::Greedy
            };
            solve_on_sparsifier(graph, options.k, &sparsifier, strategy)?
        }
        _ => unreachable!("set algorithms are dispatched separately"),
    };
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use stream_maxcov::setstream::SetRecord;

    fn toy_a() -> Dataset {
        Dataset::Sets(
            SetStream::new(
                vec![
                    SetRecord::new(1, vec![1, 2, 3, 4]),
                    SetRecord::new(2, vec![5, 6, 7, 8]),
                    SetRecord::new(3, vec![1, 2, 5, 6]),
                    SetRecord::new(4, vec![3, 4, 7, 8]),
                ],
                None,
            )
            .unwrap(),
        )
    }

    #[test]
    fn oracle_z_single_pass_is_optimal_on_toy_a() {
        let options = RunOptions { oracle_z: true, ..RunOptions::new(2, 0.3) };
        let out = run_algorithm(&toy_a(), AlgoName::SinglePass, &options, &mut OracleCache::default()).unwrap();
        assert_eq!(out.report.ratio, Some(1.0));
        assert_eq!(out.report.z, Some(8.0));
        assert_eq!(out.report.chosen, "1 2");
        assert_eq!(out.report.passes, 1);
    }

    #[test]
    fn require_oracle_fails_past_the_cap() {
        let options = RunOptions { require_oracle: true, oracle_cap: 3, ..RunOptions::new(2, 0.3) };
        let err = run_algorithm(&toy_a(), AlgoName::Greedy, &options, &mut OracleCache::default()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        let options = RunOptions { oracle_cap: 3, ..RunOptions::new(2, 0.3) };
        let out = run_algorithm(&toy_a(), AlgoName::Greedy, &options, &mut OracleCache::default()).unwrap();
        assert_eq!(out.report.opt, None);
        assert_eq!(out.notes.len(), 1);
    }

    #[test]
    fn mismatched_dataset_is_a_usage_error() {
        let options = RunOptions::new(2, 0.3);
        let err = run_algorithm(&toy_a(), AlgoName::VertexSample, &options, &mut OracleCache::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run_algorithm(&toy_a(), AlgoName::Budgeted, &options, &mut OracleCache::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn algorithm_names_are_kebab_case() {
        assert_eq!(AlgoName::SketchAll.name(), "sketch-all");
        assert_eq!(AlgoName::VertexSparsify.name(), "vertex-sparsify");
    }
}
