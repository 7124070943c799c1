use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kimf::angle::parse_angle;
use kimf::report::{self, CompareReport};
use kimf::sweep::{self, Observable, SweepMode, SweepSpec, ThetaGrid, TopologySource};
use kimf::{par, Error};

#[derive(Parser)]
#[command(
    name = "kimf",
    version,
    about = "Kicked Ising mean-field sweeps and cross-checks"
)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one engine over a θ_h grid and write CSV rows for every step.
    Sweep {
        #[arg(long, default_value = "mf-dissipative")]
        mode: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the analytic dephasing shrink with Monte Carlo along a dissipative run.
    ValidateChannel {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare two CSV runs key by key. Exit status 1 when any difference exceeds the tolerance.
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Inspect or export coupling graphs.
    Topology {
        #[command(subcommand)]
        action: TopologyAction,
    },
}

#[derive(Args)]
struct RunArgs {
    /// `start:stop:count` or a single angle; `pi` literals allowed.
    #[arg(long, default_value = "0:pi/2:33")]
    theta_h: String,
    #[arg(long, default_value = "pi/2")]
    theta_j: String,
    #[arg(long, default_value_t = 5)]
    steps: usize,
    /// Built-in descriptor (heavy-hex, heavy-hex:RxC, ring:N, chain:N, complete:N, edgeless:N) or an edge-list file.
    #[arg(long, default_value = "heavy-hex")]
    topology: String,
    /// mean-z, site-z:<j> or coherence.
    #[arg(long, default_value = "mean-z")]
    observable: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG destination.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long, default_value_t = kimf::exact::DEFAULT_QUBIT_CAP)]
    qubit_cap: usize,
}

#[derive(Subcommand)]
enum TopologyAction {
    /// Print qubit count, edge count, mean and max degree, connectivity.
    Inspect {
        #[arg(long, default_value = "heavy-hex")]
        topology: String,
    },
    /// Write the graph as an edge list.
    #[command(alias = "generate")]
    Export {
        #[arg(long, default_value = "heavy-hex")]
        topology: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::KeyMismatch { only_a, only_b } = &e {
                for k in only_a {
                    eprintln!("  only in first: {k}");
                }
                for k in only_b {
                    eprintln!("  only in second: {k}");
                }
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> kimf::Result<ExitCode> {
    if let Some(n) = cli.threads {
        par::configure_threads(n)?;
    }
    match cli.command {
        Command::Sweep { mode, run } => {
            let mode: SweepMode = mode.parse()?;
            run_sweep(mode, run)
        }
        Command::ValidateChannel { run } => run_sweep(SweepMode::ValidateChannel, run),
        Command::Compare {
            run_a,
            run_b,
            tolerance,
        } => {
            let rep = report::compare(&run_a, &run_b, tolerance)?;
            print_report(&rep);
            Ok(if rep.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Topology { action } => topology(action),
    }
}

fn run_sweep(mode: SweepMode, args: RunArgs) -> kimf::Result<ExitCode> {
    let mut spec = SweepSpec::new(mode, ThetaGrid::parse(&args.theta_h)?, args.steps);
    spec.theta_j = parse_angle(&args.theta_j)?;
    spec.topology = TopologySource::parse(&args.topology);
    spec.observable = args.observable.parse::<Observable>()?;
    spec.seed = args.seed;
    spec.samples = args.samples;
    spec.qubit_cap = args.qubit_cap;

    let result = sweep::run_sweep(&spec)?;
    match &args.out {
        Some(path) => report::emit_csv(&result, path)?,
        None => {
            let stdout = std::io::stdout().lock();
            report::write_csv(&result, stdout).map_err(|source| Error::Csv {
                path: "<stdout>".into(),
                source,
            })?;
        }
    }
    if let Some(path) = &args.plot {
        report::emit_plot(&result, path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn print_report(rep: &CompareReport) {
    let mut out = std::io::stdout().lock();
    for d in rep.failures() {
        let _ = writeln!(
            out,
            "exceeds {}: {} a={} b={} diff={}",
            rep.tolerance, d.key, d.a, d.b, d.diff
        );
    }
    let _ = writeln!(
        out,
        "keys={} max_diff={} tolerance={} {}",
        rep.diffs.len(),
        rep.max_diff,
        rep.tolerance,
        if rep.pass { "PASS" } else { "FAIL" }
    );
}

fn topology(action: TopologyAction) -> kimf::Result<ExitCode> {
    match action {
        TopologyAction::Inspect { topology } => {
            let g = TopologySource::parse(&topology).load()?;
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "qubits      {}", g.n_qubits());
            let _ = writeln!(out, "edges       {}", g.n_edges());
            let _ = writeln!(out, "mean degree {:.6}", g.mean_degree());
            let _ = writeln!(out, "max degree  {}", g.max_degree());
            let _ = writeln!(out, "connected   {}", g.is_connected());
        }
        TopologyAction::Export { topology, out } => {
            let g = TopologySource::parse(&topology).load()?;
            let text = g.to_edge_list();
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|source| Error::Io { path, source })?
                }
                None => {
                    let _ = std::io::stdout().lock().write_all(text.as_bytes());
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
