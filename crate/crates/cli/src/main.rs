use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stream_maxcov::setstream::{write_graph_stream, write_set_stream};
use stream_maxcov_cli::commands::{
    load_dataset, oracle_cap_from_env, run_algorithm, AlgoName, CliError, LadderArg, OracleCache, RunOptions,
};
use stream_maxcov_cli::generate;
use stream_maxcov_cli::report::{write_csv, RunReport};

#[derive(Parser)]
#[command(name = "stream-maxcov", version, about = "Streaming maximum coverage experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic dataset.
    Gen(GenArgs),
    /// Run one algorithm on a dataset.
    Run {
        dataset: PathBuf,
        #[arg(long)]
        algo: AlgoName,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run several algorithms on the same dataset.
    Compare {
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<AlgoName>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    RandomSets,
    PlantedCover,
    Budgeted,
    Grouped,
    RegularGraph,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    #[arg(long, default_value_t = 50)]
    max_size: usize,
    #[arg(long, default_value_t = 100)]
    nodes: usize,
    #[arg(long, default_value_t = 3)]
    degree: usize,
    #[arg(long, default_value_t = 10.0)]
    budget: f64,
    #[arg(long, default_value_t = 3)]
    groups: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.3)]
    eps: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Hand the algorithm the exact optimum as its guess instead of guessing.
    #[arg(long)]
    oracle_z: bool,
    #[arg(long)]
    ladder: Option<LadderArg>,
    #[arg(long, default_value_t = 1.0)]
    lambda_c: f64,
    /// Boost factor for `boosted`; defaults to 4/eps.
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    budget: Option<f64>,
    /// Per-group quotas, comma separated.
    #[arg(long, value_delimiter = ',')]
    quotas: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Fail instead of skipping the exact optimum when it is too costly.
    #[arg(long)]
    require_oracle: bool,
    /// Spend one pass on the largest set size to narrow the guess range.
    #[arg(long)]
    refine: bool,
    /// Also write the reports as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl CommonArgs {
    fn options(&self) -> Result<RunOptions, CliError> {
        Ok(RunOptions {
            k: self.k,
            epsilon: self.eps,
            seed: self.seed,
            oracle_z: self.oracle_z,
            ladder: self.ladder,
            lambda_c: self.lambda_c,
            b: self.b,
            budget: self.budget,
            quotas: self.quotas.clone(),
            trials: self.trials,
            require_oracle: self.require_oracle,
            refine: self.refine,
            oracle_cap: oracle_cap_from_env()?,
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn gen(args: &GenArgs) -> Result<(), CliError> {
    let out = create(&args.out)?;
    match args.kind {
        GenKind::RegularGraph => {
            let updates = generate::regular_graph(args.nodes, args.degree, args.seed)?;
            write_graph_stream(&updates, out)?;
        }
        kind => {
            let stream = match kind {
                GenKind::RandomSets => generate::random_sets(args.n, args.m, args.min_size, args.max_size, args.seed)?,
                GenKind::PlantedCover => generate::planted_cover(args.n, args.m, args.k, args.seed)?,
                GenKind::Budgeted => {
                    generate::budgeted(args.n, args.m, args.min_size, args.max_size, args.budget, args.seed)?
                }
                GenKind::Grouped => {
                    generate::grouped(args.n, args.m, args.min_size, args.max_size, args.groups, args.seed)?
                }
                GenKind::RegularGraph => unreachable!(),
            };
            write_set_stream(&stream, out)?;
        }
    }
    Ok(())
}

fn run(dataset: &Path, algos: &[AlgoName], common: &CommonArgs) -> Result<(), CliError> {
    let options = common.options()?;
    let data = load_dataset(dataset)?;
    let mut cache = OracleCache::default();
    let mut reports: Vec<RunReport> = Vec::with_capacity(algos.len());
    for (i, &algo) in algos.iter().enumerate() {
        let outcome = run_algorithm(&data, algo, &options, &mut cache)?;
        for note in &outcome.notes {
            eprintln!("{}: {note}", algo.name());
        }
        if i > 0 {
            println!();
        }
        print!("{}", outcome.report.render());
        reports.push(outcome.report);
    }
    if let Some(path) = &common.csv {
        write_csv(&reports, create(path)?).map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => gen(args),
        Command::Run { dataset, algo, common } => run(dataset, &[*algo], common),
        Command::Compare { dataset, algos, common } => run(dataset, algos, common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stream-maxcov: {e}");
            let _ = io::Write::flush(&mut io::stdout());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
