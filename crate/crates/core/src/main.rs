use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use binvis::dataset::{self, ExtractConfig, Manifest, Mode, SplitAssignment, SplitRatios};
use binvis::eval::{self, FeatureSource};
use binvis::{EntropyConfig, Exec, ImageSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(name = "binvis", version, about = "Entropy and grayscale image datasets from binary files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Entropy,
    Grayscale,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchModeArg {
    Entropy,
    Grayscale,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Png,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a class-per-directory corpus and write images plus a manifest.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        #[arg(long, default_value_t = 256)]
        window_size: usize,
        /// Defaults to the window size (non-overlapping windows).
        #[arg(long)]
        step: Option<usize>,
        #[arg(long, default_value_t = 256)]
        image_size: usize,
        #[arg(long, value_enum, default_value = "png")]
        format: FormatArg,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Defaults to <output>/manifest.jsonl.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Also resample entropy images to --image-size.
        #[arg(long)]
        resize_entropy: bool,
    },
    /// Print dataset totals, class distribution and the largest classes.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Stratified train/val/test assignment.
    Split {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "0.7,0.1,0.2")]
        ratios: SplitRatios,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Nearest-centroid baseline: train on `train`, report on `test`.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        split: PathBuf,
        #[arg(long, value_enum)]
        mode: BenchModeArg,
        #[arg(long, default_value_t = 32)]
        feature_side: usize,
        #[arg(long)]
        report: PathBuf,
        /// Directory the manifest's image paths are relative to; defaults to the manifest's directory.
        #[arg(long)]
        images: Option<PathBuf>,
    },
    /// Write a synthetic three-class corpus (random, sparse, text).
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 20)]
        per_class: usize,
        #[arg(long, default_value_t = 64 * 1024)]
        min_size: usize,
        #[arg(long, default_value_t = 256 * 1024)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parent_or_cwd(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn run(command: Command) -> binvis::Result<u8> {
    match command {
        Command::Extract {
            input,
            output,
            mode,
            window_size,
            step,
            image_size,
            format: FormatArg::Png,
            jobs,
            manifest,
            resize_entropy,
        } => {
            let config = ExtractConfig {
                mode: match mode {
                    ModeArg::Entropy => Mode::Entropy,
                    ModeArg::Grayscale => Mode::Grayscale,
                    ModeArg::Both => Mode::Both,
                },
                entropy: EntropyConfig::new(window_size, step.unwrap_or(window_size))?,
                image: ImageSpec { target_side: image_size },
                resize_entropy,
            };
            let scanned = dataset::scan_dataset(&input)?;
            let done = dataset::run_batch(&scanned, &config, &output, jobs)?;
            let manifest_path = manifest.unwrap_or_else(|| output.join("manifest.jsonl"));
            done.write(&manifest_path)?;
            let s = done.summary();
            println!(
                "{} records: {} ok, {} skipped, {} failed -> {}",
                done.len(),
                s.ok,
                s.skipped,
                s.failed,
                manifest_path.display()
            );
            for r in done.records.iter().filter(|r| r.status == dataset::Status::Failed) {
                eprintln!("failed: {}", r.reason.as_deref().unwrap_or("unknown"));
            }
            Ok(if s.failed > 0 { EXIT_PARTIAL } else { 0 })
        }
        Command::Stats { manifest, top } => {
            let m = Manifest::read(&manifest)?;
            print!("{}", dataset::compute_stats(&m, top));
            Ok(0)
        }
        Command::Split {
            manifest,
            ratios,
            seed,
            out,
        } => {
            let m = Manifest::read(&manifest)?;
            let a = dataset::split_dataset(&m, ratios, seed)?;
            a.write(&out)?;
            let counts = a.counts();
            for split in dataset::Split::ALL {
                let n: usize = counts.iter().filter(|((_, s), _)| *s == split).map(|(_, n)| n).sum();
                println!("{split:<5} {n}");
            }
            Ok(0)
        }
        Command::Bench {
            manifest,
            split,
            mode,
            feature_side,
            report,
            images,
        } => {
            let m = Manifest::read(&manifest)?;
            let a = SplitAssignment::read(&split)?;
            let source = match mode {
                BenchModeArg::Entropy => FeatureSource::Entropy,
                BenchModeArg::Grayscale => FeatureSource::Grayscale,
            };
            let root = images.unwrap_or_else(|| parent_or_cwd(&manifest));
            let r = eval::run_bench(&m, &a, source, feature_side, &root, Exec::default())?;
            let json = serde_json::to_string_pretty(&r).expect("report serializes");
            std::fs::write(&report, json + "\n").map_err(|e| binvis::Error::Io {
                path: report.clone(),
                source: e,
            })?;
            print!("{r}");
            Ok(0)
        }
        Command::Synth {
            output,
            per_class,
            min_size,
            max_size,
            seed,
        } => {
            let paths = binvis::synth::write_corpus(&output, per_class, min_size, max_size, seed)?;
            println!("wrote {} files under {}", paths.len(), output.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
