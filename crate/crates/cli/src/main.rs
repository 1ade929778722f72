//! `tuhyper` command-line front end.
//!
//! Exit codes: 0 answered, 1 the property was violated (a witness was found),
//! 2 input error, 3 budget or guard exceeded, 4 internal consistency failure.

mod commands;
mod render;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tuhyper::detect::Budget;
use tuhyper::gen::Plant;
use tuhyper::linalg::Limits;
use tuhyper::Exec;

use crate::render::Output;

#[derive(Parser)]
#[command(
    name = "tuhyper",
    version,
    about = "Total unimodularity of disjoint (mixed) hypergraph incidence matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print one JSON document on stdout instead of a human summary.
    #[arg(long, global = true)]
    json: bool,

    /// Largest `rows + cols` accepted by minor enumerations and Camion cores.
    #[arg(long, global = true, default_value_t = Limits::DEFAULT_MAX_DIM_SUM)]
    max_order: usize,

    /// Node-expansion budget of each structure search.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_MAX_NODES)]
    max_nodes: u64,

    /// Worker threads for enumerations and suites.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decide total unimodularity; non-disjoint inputs fall back to minor enumeration.
    Check {
        input: PathBuf,
        /// Reject inputs whose size-≥4 edges are not pairwise disjoint.
        #[arg(long)]
        disjoint: bool,
        /// Verify a certificate (bare, or any output holding a `witness`) instead of deciding.
        #[arg(long, value_name = "CERT")]
        verify_cert: Option<PathBuf>,
    },
    /// Largest absolute subdeterminant and a submatrix attaining it.
    Delta { input: PathBuf },
    /// Search for an odd cycle and an odd tree house as partial subhypergraphs.
    Detect { input: PathBuf },
    /// Extract a witness constructively through Eulerian cores and reductions.
    Extract {
        input: PathBuf,
        /// Include the per-round trace.
        #[arg(long)]
        trace: bool,
    },
    /// Camion criterion: least square Eulerian submatrix with support 2 mod 4.
    Camion { input: PathBuf },
    /// Reduce a mixed hypergraph to an unsigned one, with the transcript.
    Reduce { input: PathBuf },
    /// Build a TU matrix R mapping an almost-TU instance to a mixed odd cycle.
    BuildR {
        input: PathBuf,
        /// Build for the transpose, so that Rᵀ·A is the odd cycle.
        #[arg(long)]
        transpose: bool,
    },
    /// Generate a seeded random or planted instance.
    Gen(GenArgs),
    /// Run the fixture suite, optionally with a seeded random cross-check.
    Selftest {
        /// Number of random instances to cross-check against minor enumeration.
        #[arg(long, requires = "seed")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Vertex count, or the maximum with `--random`.
    #[arg(long, default_value_t = 6)]
    vertices: usize,
    /// Edges of size 1 to 3, or the maximum edge count with `--random`.
    #[arg(long, default_value_t = 4)]
    small_edges: usize,
    /// Comma-separated sizes (≥ 3) of additional edges.
    #[arg(long, value_delimiter = ',')]
    proper: Vec<usize>,
    #[arg(long)]
    mixed: bool,
    /// Allow proper edges to overlap.
    #[arg(long)]
    non_disjoint: bool,
    /// `odd-cycle:K`, `odd-tree-house:A,B,C`, `mixed-odd-cycle:K` or `mixed-odd-tree-house:A,B,C`.
    #[arg(long, value_parser = parse_plant)]
    plant: Option<Plant>,
    /// Draw sizes from the seed, bounded by `--vertices` and `--small-edges`.
    #[arg(long, conflicts_with_all = ["proper", "plant", "non_disjoint"])]
    random: bool,
}

fn parse_plant(s: &str) -> Result<Plant, String> {
    let (kind, args) = s.split_once(':').ok_or("expected KIND:ARGS")?;
    let nums = args
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let three = || -> Result<[usize; 3], String> {
        nums.as_slice()
            .try_into()
            .map_err(|_| "expected three path lengths".to_string())
    };
    let one = || match nums[..] {
        [k] => Ok(k),
        _ => Err("expected one cycle length".to_string()),
    };
    match kind {
        "odd-cycle" => Ok(Plant::OddCycle { k: one()? }),
        "odd-tree-house" => Ok(Plant::OddTreeHouse { lengths: three()? }),
        "mixed-odd-cycle" => Ok(Plant::MixedOddCycle { k: one()? }),
        "mixed-odd-tree-house" => Ok(Plant::MixedOddTreeHouse { lengths: three()? }),
        _ => Err(format!("unknown plant kind {kind:?}")),
    }
}

/// Shared knobs handed to every command.
pub struct Settings {
    pub limits: Limits,
    pub budget: Budget,
    pub exec: Exec,
}

fn configure_workers(workers: usize) -> anyhow::Result<Exec> {
    if workers <= 1 {
        return Ok(Exec::Serial);
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
        Ok(Exec::Parallel)
    }
    #[cfg(not(feature = "parallel"))]
    {
        eprintln!("warning: built without the `parallel` feature; running with one worker");
        Ok(Exec::Serial)
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<tuhyper::Error>() {
        Some(e) if e.is_limit() => 3,
        Some(tuhyper::Error::Internal { .. }) => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<Output> {
    let settings = Settings {
        limits: Limits {
            max_dim_sum: cli.max_order,
        },
        budget: Budget {
            max_nodes: cli.max_nodes,
        },
        exec: configure_workers(cli.workers)?,
    };
    match cli.command {
        Command::Check {
            input,
            disjoint,
            verify_cert,
        } => match verify_cert {
            Some(cert) => commands::verify_cert(&input, &cert),
            None => commands::check(&input, disjoint, &settings),
        },
        Command::Delta { input } => commands::delta(&input, &settings),
        Command::Detect { input } => commands::detect(&input, &settings),
        Command::Extract { input, trace } => commands::extract(&input, trace, &settings),
        Command::Camion { input } => commands::camion(&input, &settings),
        Command::Reduce { input } => commands::reduce(&input),
        Command::BuildR { input, transpose } => commands::build_r(&input, transpose, &settings),
        Command::Gen(args) => commands::gen(&args),
        Command::Selftest { random, seed } => selftest::run(random.zip(seed), &settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            if std::env::args().any(|a| a == "--json") {
                render::print_error(&anyhow::anyhow!(e.kind().to_string()), 2);
            }
            return ExitCode::from(2);
        }
    };
    let json = cli.json;
    let style = render::Style::detect(json);
    match run(cli) {
        Ok(out) => {
            out.print(json, &style);
            ExitCode::from(u8::from(out.violated))
        }
        Err(err) => {
            let code = exit_code(&err);
            eprintln!("{} {err:#}", style.paint("error:", render::Tone::Bad));
            if json {
                render::print_error(&err, code);
            }
            ExitCode::from(code)
        }
    }
}
