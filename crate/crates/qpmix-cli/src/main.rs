use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use qpmix_cli::config::{ExperimentConfig, HistogramSpec};
use qpmix_cli::experiments;
use qpmix_cli::histogram::{histogram_rng, resample_histogram};
use qpmix_cli::oracle_check::run_oracle_checks;
use qpmix_cli::output::{read_weighted_samples_csv, write_histogram_csv};
use qpmix_cli::presets;

/// Estimate ideal-circuit observables from coherently noisy circuits by
/// sampling signed mixtures of over-rotated channels.
#[derive(Parser)]
#[command(name = "qpmix", version, about)]
struct Cli {
    /// Worker threads for instance sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config file or a built-in preset name.
    Run {
        /// Path to a config file, or a preset name (see `presets`).
        config: String,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the decomposition one-norm over the (A, B) offset grid.
    ScanAb {
        /// Over-rotation angle ε.
        #[arg(long)]
        epsilon: f64,
        /// Grid resolution per axis.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Output CSV path.
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
    },
    /// Verify the decomposition identities and exact estimator paths.
    OracleCheck,
    /// Bootstrap-resample a samples CSV into a histogram CSV.
    Histogram {
        /// A samples_*.csv file produced by `run`.
        samples: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        resample_size: usize,
        #[arg(long, default_value_t = 10_000)]
        n_resamples: usize,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "histogram.csv")]
        out: PathBuf,
    },
    /// List the built-in presets (or print one with --show).
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run { config, seed, out } => {
            let text = if std::path::Path::new(&config).exists() {
                std::fs::read_to_string(&config).with_context(|| format!("reading {config}"))?
            } else if let Some(preset) = presets::get(&config) {
                preset.to_string()
            } else {
                anyhow::bail!(
                    "{config}: not a file and not a preset (known presets: {})",
                    presets::names().join(", ")
                );
            };
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            let output = experiments::run(&cfg)?;
            println!("wrote {}", output.results_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::ScanAb { epsilon, grid, out } => {
            let argmin = experiments::scan_to_file(epsilon, grid, &out)?;
            println!("wrote {}", out.display());
            match argmin {
                Some([a, b, norm]) => {
                    println!("argmin: A={a} B={b} one_norm={norm}");
                }
                None => println!("argmin: none (all cells singular)"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck => {
            if run_oracle_checks() {
                println!("all oracle checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("oracle checks FAILED");
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Histogram {
            samples,
            resample_size,
            n_resamples,
            bins,
            seed,
            out,
        } => {
            let values = read_weighted_samples_csv(&samples)?;
            let spec = HistogramSpec {
                resample_size,
                n_resamples,
                bins,
            };
            let mut rng = histogram_rng(seed, 0);
            let hist = resample_histogram(&values, &spec, &mut rng)?;
            write_histogram_csv(&out, &hist)?;
            println!(
                "wrote {} (center {}, bin width {})",
                out.display(),
                hist.center,
                hist.bin_width
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Presets { show } => {
            match show {
                Some(name) => {
                    let text = presets::get(&name)
                        .ok_or_else(|| anyhow::anyhow!("unknown preset {name}"))?;
                    print!("{text}");
                }
                None => {
                    for name in presets::names() {
                        println!("{name}");
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
