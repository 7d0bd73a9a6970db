use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use delsync::analysis::{coefficient_table, write_coefficient_csv, BoundReport};
use delsync::harness::{self, expand_efficiencies, ExperimentConfig};
use delsync::{apply_deletion_channel, rng, BitSeq, EcPolicy, ProtocolParams, SyncOutput};

#[derive(Parser)]
#[command(name = "delsync", version, about = "Synchronize a file against a deletion-degraded copy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one session on a random (or given) file.
    Run(RunArgs),
    /// Run a parameter sweep from a config file.
    Sweep(SweepArgs),
    /// Tabulate the leading-term redundancy coefficients.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 50_000)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    /// Segment length multiplier.
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long, default_value_t = 2)]
    w: usize,
    #[arg(long, default_value_t = 3.0)]
    c: f64,
    /// Code efficiencies a_1..a_w, or one value used for a_2..a_w.
    #[arg(long, value_delimiter = ',', default_value = "3.5")]
    a: Vec<f64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "empirical")]
    ec_policy: EcPolicy,
    /// Write the transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Print the metrics as JSON.
    #[arg(long)]
    json: bool,
    /// Text file of '0'/'1' characters to use as Alice's file instead of random bits.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's csv path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5,3,4,5")]
    s_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    w_grid: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 3.0)]
    c: f64,
    /// Output path; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn read_bits(path: &PathBuf) -> Result<BitSeq> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let digits: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    digits.parse().with_context(|| format!("parsing {}", path.display()))
}

fn run(args: RunArgs) -> Result<bool> {
    let (x, ch) = match &args.input {
        Some(path) => {
            let x = read_bits(path)?;
            let ch = apply_deletion_channel(&x, args.beta, &mut rng::stream(args.seed, rng::LABEL_CHANNEL));
            (x, ch)
        }
        None => harness::draw(args.n, args.beta, args.seed),
    };
    let params = ProtocolParams {
        n: x.len(),
        beta: args.beta,
        s: args.s,
        c: args.c,
        w: args.w,
        a: expand_efficiencies(args.w, &args.a)?,
        seed: args.seed,
        ec_policy: args.ec_policy,
    };
    let out: SyncOutput = harness::timed_session(&x, &ch, &params)?;
    if let Some(path) = &args.transcript {
        let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        out.transcript.write_jsonl(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))?;
    }
    let m = &out.metrics;
    if args.json {
        println!("{}", m.to_json());
    } else {
        let bound = BoundReport::new(params.n, params.beta, params.s, params.w, params.a_max(), params.c);
        println!("n={} beta={} s={} w={} c={} a={:?} seed={}", params.n, params.beta, params.s, params.w, params.c, params.a, params.seed);
        println!("deletions       {}", ch.deletions());
        println!("bits I/II/III   {} / {} / {}", m.bits_i, m.bits_ii, m.bits_iii);
        println!("bits total      {}  (leading-term bound {:.0})", m.bits_total, bound.improved_bits);
        println!("rounds seq/par  {} / {}", m.rounds_sequential, m.rounds_parallel);
        println!("pivots          {} selected, {} false", m.selected_pivots, m.false_pivots);
        println!("residual errors {}", m.residual_errors);
        println!("synchronized    {}", m.synchronized);
        println!("runtime         {} ms", m.runtime_ms);
    }
    Ok(m.synchronized)
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if args.csv.is_some() {
        cfg.csv = args.csv;
    }
    let result = harness::sweep(&cfg)?;
    for reason in &result.skipped {
        eprintln!("skipped: {reason}");
    }
    let failed = result.rows.iter().filter(|r| !r.synchronized).count();
    println!("{} rows, {} skipped points, {failed} unsynchronized", result.rows.len(), result.skipped.len());
    if let Some(path) = &cfg.csv {
        println!("wrote {}", path.display());
    }
    Ok(failed == 0)
}

fn bounds(args: BoundsArgs) -> Result<bool> {
    if args.s_grid.iter().any(|&s| s <= 0.0) || args.w_grid.contains(&0) || args.a < 1.0 || args.c <= 0.0 {
        bail!("need s > 0, w >= 1, a >= 1, c > 0");
    }
    let rows = coefficient_table(&args.s_grid, &args.w_grid, args.a, args.c);
    match &args.csv {
        Some(path) => {
            let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_coefficient_csv(f, &rows).with_context(|| format!("writing {}", path.display()))?;
        }
        None => write_coefficient_csv(io::stdout().lock(), &rows)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Bounds(a) => bounds(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
