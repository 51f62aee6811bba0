use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cdbeam::pipeline::benchmark::{run_benchmark, write_benchmark_outputs};
use cdbeam::pipeline::export::{export_beampattern, write_beampattern_output, write_design_outputs};
use cdbeam::pipeline::{run_design, BenchmarkSettings, DesignConfig, DesignResult, Mode, Plane, Solver};

#[derive(Parser)]
#[command(
    name = "cdbeam",
    version,
    about = "Constant-directivity loudspeaker beamformer design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design weights over the frequency grid.
    Design(DesignArgs),
    /// Design, then export horizontal-plane beam patterns.
    Beampattern {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long)]
        resolution_deg: Option<f64>,
    },
    /// Compare projected ascent with differential multipliers.
    Benchmark {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        tau_db: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Parse and validate a configuration file.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    tau_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

impl DesignArgs {
    fn load(&self) -> cdbeam::Result<DesignConfig> {
        let mut cfg = DesignConfig::from_path(&self.config)?;
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        if let Some(tau) = self.tau_db {
            cfg.tau_db = Some(tau);
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
            cfg.benchmark.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(result: &DesignResult, quiet: bool) {
    if quiet {
        return;
    }
    for r in &result.records {
        println!(
            "{:>10.1} Hz  {:<28} gdi {:>7.3} dB",
            r.frequency_hz,
            r.status.label(),
            r.gdi_db
        );
    }
    println!("{} of {} frequencies failed", result.failures(), result.records.len());
}

fn design_exit(result: &DesignResult) -> ExitCode {
    if result.failures() > 0 {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> cdbeam::Result<ExitCode> {
    match cli.command {
        Command::Design(args) => {
            let cfg = args.load()?;
            let result = run_design(&cfg)?;
            write_design_outputs(&result, &args.out)?;
            report(&result, args.quiet);
            Ok(design_exit(&result))
        }
        Command::Beampattern { design, resolution_deg } => {
            let cfg = design.load()?;
            let result = run_design(&cfg)?;
            let rows = export_beampattern(
                &result,
                &cfg.array,
                Plane::Horizontal,
                resolution_deg.unwrap_or(cfg.resolution_deg),
            )?;
            write_beampattern_output(&rows, &design.out)?;
            report(&result, design.quiet);
            Ok(design_exit(&result))
        }
        Command::Benchmark {
            config,
            out,
            n,
            trials,
            tau_db,
            seed,
            quiet,
        } => {
            let mut settings = match config {
                Some(path) => DesignConfig::from_path(path)?.benchmark,
                None => BenchmarkSettings::default(),
            };
            settings.n = n.unwrap_or(settings.n);
            settings.trials = trials.unwrap_or(settings.trials);
            settings.tau_db = tau_db.unwrap_or(settings.tau_db);
            settings.seed = seed.unwrap_or(settings.seed);
            let report = run_benchmark(&settings)?;
            write_benchmark_outputs(&report, &out)?;
            if !quiet {
                println!("median iterations to residual {:e}", settings.residual);
                println!("  pa {}", report.median_iterations(Solver::Pa));
                println!("  dm {}", report.median_iterations(Solver::Dm));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateConfig { config, quiet } => {
            let cfg = DesignConfig::from_path(&config)?;
            cfg.validate()?;
            if !quiet {
                println!(
                    "{}: ok ({} transducers, {} frequencies, mode {})",
                    config.display(),
                    cfg.array.len(),
                    cfg.frequencies.len(),
                    cfg.mode.as_str()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
