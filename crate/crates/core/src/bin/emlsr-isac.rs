use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use emlsr_isac::config::{ConfigError, SimConfig};
use emlsr_isac::experiments::{self, Axes, ExperimentError, ResultRow, RowKind, Seeds, SweepSpec};

/// Simulate target tracking with integrated sensing and communications over
/// EMLSR multi-link Wi-Fi.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// Simulation configuration (TOML). Defaults to the built-in parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep specification (TOML); takes precedence over --config.
    #[arg(long)]
    sweep: Option<PathBuf>,
    /// CSV output path. For a sweep this overrides the file's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of seeds, starting at the configured seed.
    #[arg(long)]
    seeds: Option<u32>,
    /// Write event traces next to the CSV output (or to stdout for a
    /// single run without --out).
    #[arg(long)]
    trace: bool,
    /// Check the expected orderings between sweep points.
    #[arg(long)]
    check_trends: bool,
}

enum Failure {
    Config(String),
    Trends,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

fn trace_dir(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push("_traces");
    out.with_file_name(name)
}

fn run_sweep(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let mut spec = SweepSpec::load(path)?;
    if let Some(n) = cli.seeds {
        spec.seeds.count = n;
    }
    if let Some(out) = &cli.out {
        spec.out = out.clone();
    }
    let result = experiments::run_sweep(&spec, cli.trace)?;
    std::fs::write(&spec.out, result.to_csv()?).map_err(|e| io_err(&spec.out, e))?;
    if cli.trace {
        let dir = trace_dir(&spec.out);
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        for (point, seed, text) in &result.traces {
            let file = dir.join(format!(
                "a{}_k{}_m{}_{}_{}_s{}.csv",
                point.alpha, point.k, point.n_stas, point.scheme, point.mode, seed
            ));
            std::fs::write(&file, text).map_err(|e| io_err(&file, e))?;
        }
    }
    for r in result.summaries() {
        print_summary(r);
    }
    println!("wrote {}", spec.out.display());
    check_trends(cli, &result.rows)
}

fn print_summary(r: &ResultRow) {
    println!(
        "{} n={}: mse {:.6e} m^2, throughput {:.6e} bit/s, jain {:.4}, sensing {:.1}, comm {:.1}",
        r.point(),
        r.n,
        r.mse_mean,
        r.throughput,
        r.jain,
        r.sensing_count,
        r.comm_count
    );
}

fn check_trends(cli: &Cli, rows: &[ResultRow]) -> Result<(), Failure> {
    if !cli.check_trends {
        return Ok(());
    }
    let report = experiments::compare_schemes(rows);
    print!("{report}");
    if report.failed() {
        Err(Failure::Trends)
    } else {
        Ok(())
    }
}

/// Runs the configuration for `--seeds` consecutive seeds as a one-point sweep.
fn run_single(cli: &Cli) -> Result<(), Failure> {
    let cfg = match &cli.config {
        Some(path) => SimConfig::load_valid(path)?,
        None => SimConfig::default(),
    };
    let net = &cfg.network;
    let spec = SweepSpec {
        base_config: cli.config.clone().unwrap_or_default(),
        out: cli.out.clone().unwrap_or_default(),
        seeds: Seeds { count: cli.seeds.unwrap_or(1), base: net.seed },
        axes: Axes {
            alpha: vec![net.alpha],
            k: vec![net.k],
            n_stas: vec![net.n_stas],
            scheme: vec![net.scheme],
            mode: vec![net.mode],
        },
    };
    let result = experiments::run_sweep_with(&cfg, &spec, cli.trace)?;
    for r in &result.rows {
        match r.row {
            RowKind::Data => println!(
                "seed {}: mse {:.6e} m^2, throughput {:.6e} bit/s, jain {:.4}, sensing {}, comm {}",
                r.seed.unwrap_or_default(),
                r.mse_mean,
                r.throughput,
                r.jain,
                r.sensing_count,
                r.comm_count
            ),
            RowKind::Summary if r.n > 1 => print_summary(r),
            RowKind::Summary => {}
        }
    }
    match &cli.out {
        Some(out) => {
            std::fs::write(out, result.to_csv()?).map_err(|e| io_err(out, e))?;
            if cli.trace {
                let dir = trace_dir(out);
                std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
                for (_, seed, text) in &result.traces {
                    let file = dir.join(format!("s{seed}.csv"));
                    std::fs::write(&file, text).map_err(|e| io_err(&file, e))?;
                }
            }
            println!("wrote {}", out.display());
        }
        None => {
            for (_, _, text) in &result.traces {
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.sweep {
        Some(path) => run_sweep(&cli, path),
        None => run_single(&cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Trends) => {
            eprintln!("trend check failed");
            ExitCode::from(2)
        }
    }
}
