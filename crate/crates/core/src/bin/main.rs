use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use proactive_cache::baselines::{infinite_buffer_cost, no_buffer_cost, offline_estimate, taut_string_schedule, Trace};
use proactive_cache::harness::bench::{run_bench, speedup_trend_ok, write_bench_csv};
use proactive_cache::harness::sweep::{gnuplot_script, run_sweep, write_sweep_csv};
use proactive_cache::harness::validate::{run_validation, ValidateOptions};
use proactive_cache::harness::{SweepSpec, SweepVariable};
use proactive_cache::sim::{simulate_policy, simulate_policy_with_trace};
use proactive_cache::value_iteration::{value_iterate_degenerated, value_iterate_full, DEFAULT_EPS};
use proactive_cache::{BellmanMethod, Error, Policy, SystemConfig, ViOptions};

#[derive(Parser)]
#[command(name = "proactive-cache", version, about = "Energy-minimal proactive transmission into a client buffer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every random draw; generated and echoed to stderr if omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Value iteration stops when the span of one-sweep differences is below this.
    #[arg(long)]
    eps: Option<f64>,
    /// Output file (a directory for `validate`); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Degenerated,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimal policy for a configuration.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "exact-rowwise")]
        method: BellmanMethod,
        #[arg(long, value_enum, default_value = "degenerated")]
        space: Space,
        /// Give up after this many sweeps (exit code 3).
        #[arg(long, default_value_t = proactive_cache::value_iteration::DEFAULT_MAX_SWEEPS)]
        max_sweeps: usize,
        /// Also write the iteration report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo run of a stored policy.
    Simulate {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        /// Initial buffer level.
        #[arg(long, default_value_t = 0)]
        b0: usize,
        /// Per-slot CSV `t,b,x,y,energy`.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Reference costs: no buffer, infinite buffer and the offline schedule.
    Baselines {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        traces: usize,
        #[arg(long, default_value_t = 100_000)]
        trace_len: usize,
        /// Per-slot CSV of the offline schedule on the first trace.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal and baseline costs over a parameter grid, as CSV.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Worker threads; all cores if omitted.
        #[arg(long)]
        threads: Option<usize>,
        /// Write a gnuplot script for the CSV here.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Wallclock of buffer-level against full-state value iteration, as CSV.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check every solver against an independent one.
    Validate {
        /// Run a tenth of the instances.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Lib(Error),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotConverged { .. } | Error::BellmanNotConverged { .. } => 3,
        Error::Disagreement(_) => 4,
        Error::InvalidConfig(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch(_)
        | Error::Json(_)
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn seed_or_generate(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
        let s = (nanos as u64) ^ ((nanos >> 64) as u64) ^ u64::from(std::process::id());
        eprintln!("seed: {s}");
        s
    })
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    let mut w = sink(path)?;
    writeln!(w, "{text}")?;
    w.flush()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { config, method, space, max_sweeps, report, common } => {
            let cfg = SystemConfig::load(&config)?;
            let mut opts = ViOptions::with_eps(common.eps.unwrap_or(DEFAULT_EPS)).method(method);
            opts.max_sweeps = max_sweeps;
            let (policy, rep) = match space {
                Space::Degenerated => value_iterate_degenerated(&cfg, &opts)?,
                Space::Full => value_iterate_full(&cfg, &opts)?,
            };
            eprintln!(
                "L = {:.10}  g = {:.10}  iterations = {}  span = {:.3e}{}",
                policy.average_cost,
                policy.gain,
                rep.iterations,
                rep.final_span,
                if policy.solver.multichain { "  (multichain)" } else { "" }
            );
            emit(common.out.as_deref(), &policy.to_json())?;
            if let Some(path) = report {
                std::fs::write(path, serde_json::to_string_pretty(&rep).map_err(Error::Json)?)?;
            }
        }
        Command::Simulate { policy, steps, b0, trace, common } => {
            let policy = Policy::load(&policy)?;
            let seed = seed_or_generate(common.seed);
            let rep = match trace {
                Some(path) => simulate_policy_with_trace(&policy, steps, seed, b0, BufWriter::new(File::create(path)?))?,
                None => simulate_policy(&policy, steps, seed, b0)?,
            };
            eprintln!(
                "mean energy {:.6} +- {:.6} (analytic {:.6})",
                rep.mean_energy, rep.std_error, policy.average_cost
            );
            emit(common.out.as_deref(), &rep.to_json())?;
        }
        Command::Baselines { config, traces, trace_len, schedule, common } => {
            let cfg = SystemConfig::load(&config)?;
            let seed = seed_or_generate(common.seed);
            let est = offline_estimate(&cfg, traces, trace_len, seed)?;
            if let Some(path) = schedule {
                let trace = Trace::sample(&cfg, trace_len, seed);
                let sched = taut_string_schedule(&trace, cfg.buffer_size(), cfg.eta(), 0)?;
                sched.write_csv(BufWriter::new(File::create(path)?))?;
            }
            let doc = json!({
                "no_buffer": no_buffer_cost(&cfg),
                "infinite_buffer": infinite_buffer_cost(&cfg),
                "offline_mean": est.mean,
                "offline_std_error": est.std_error,
                "traces": est.traces,
                "trace_len": est.trace_len,
                "seed": seed,
            });
            emit(common.out.as_deref(), &serde_json::to_string_pretty(&doc).map_err(Error::Json)?)?;
        }
        Command::Sweep { spec, threads, gnuplot, common } => {
            let mut spec = SweepSpec::load(&spec)?;
            if let Some(eps) = common.eps {
                spec.eps = eps;
            }
            let seed = seed_or_generate(common.seed.or(spec.seed));
            let rows = run_sweep(&spec, seed, threads)?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} of {} grid points failed", rows.len());
            }
            write_sweep_csv(&rows, sink(common.out.as_deref())?)?;
            if let Some(path) = gnuplot {
                let csv_path = common.out.clone().unwrap_or_else(|| PathBuf::from("sweep.csv"));
                let label = match spec.variable {
                    SweepVariable::RequestMax => "X",
                    _ => "B",
                };
                std::fs::write(path, gnuplot_script(&csv_path, label, &spec.etas))?;
            }
        }
        Command::Bench { spec, common } => {
            let mut spec = SweepSpec::load(&spec)?;
            if let Some(eps) = common.eps {
                spec.eps = eps;
            }
            let rows = run_bench(&spec)?;
            if !speedup_trend_ok(&rows) {
                eprintln!("speedup is not increasing along the grid");
            }
            write_bench_csv(&rows, sink(common.out.as_deref())?)?;
        }
        Command::Validate { quick, common } => {
            let mut opts = ValidateOptions::new(seed_or_generate(common.seed));
            opts.quick = quick;
            opts.out_dir = common.out;
            let summary = run_validation(&opts)?;
            print!("{summary}");
            if !summary.all_passed() {
                return Err(Failure::Validation);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
