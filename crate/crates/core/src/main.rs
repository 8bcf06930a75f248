use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use corpus_forge::corpus::{read_manifest, Dialect};
use corpus_forge::g2p::{g2p_convert, load_lexicon, G2pOptions};
use corpus_forge::ingest::NetFetcher;
use corpus_forge::pipeline::{self, RunConfig, Step};
use corpus_forge::stats::{compute_stats, format_percent, retention_hours};

/// Build a segmented, phonemized speech corpus from scraped recordings.
#[derive(Parser)]
#[command(name = "forge", version)]
struct Cli {
    /// Pipeline config file.
    #[arg(long, global = true, default_value = "forge.toml")]
    config: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "info")]
    log_level: log::LevelFilter,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crawl the configured sources into scraped.jsonl.
    Ingest,
    /// Rescore ill-transcribed utterances into cleaned.jsonl.
    Cleanup,
    /// Force-align transcripts into aligned.jsonl.
    Align,
    /// Trim and split at long silences into segmented.jsonl.
    Segment,
    /// Join adjacent segments into concatenated.jsonl.
    Concat,
    /// Recompute phonemes from the final text into phonemized.jsonl. With
    /// `--dialect`, convert text lines from standard input instead.
    G2p {
        #[arg(long, requires = "lexicon")]
        dialect: Option<Dialect>,
        #[arg(long, requires = "dialect")]
        lexicon: Option<PathBuf>,
        /// Fail on characters missing from the lexicon.
        #[arg(long, requires = "dialect")]
        strict: bool,
    },
    /// Print statistics of a manifest.
    Stats {
        manifest: PathBuf,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Percentage of hours kept between two manifests or two hour figures.
    Retention { before: String, after: String },
    /// Run several stages in order.
    Run {
        /// Comma-separated stages; all of them by default.
        #[arg(long)]
        stages: Option<String>,
    },
}

fn run_stages(cli: &Cli, stages: &[Step]) -> Result<()> {
    let cfg = RunConfig::load(&cli.config).with_context(|| format!("loading {}", cli.config.display()))?;
    let report = pipeline::run(&cfg, stages, &NetFetcher::default())?;
    for s in &report.stages {
        println!("{:<8} {:>7} -> {:<7} {:>8.2} s  {} warning(s)", s.stage, s.records_in, s.records_out, s.seconds, s.warnings.len());
    }
    Ok(())
}

fn g2p_filter(dialect: Dialect, lexicon: &Path, strict: bool) -> Result<()> {
    let lex = load_lexicon(lexicon).with_context(|| format!("loading {}", lexicon.display()))?;
    let options = G2pOptions { strict, ..Default::default() };
    let mut out = std::io::stdout().lock();
    for (i, line) in std::io::stdin().lock().lines().enumerate() {
        let phonemes = g2p_convert(&line?, dialect, &lex, &options).with_context(|| format!("input line {}", i + 1))?;
        writeln!(out, "{phonemes}")?;
    }
    Ok(())
}

/// A literal number of hours, or the grand total of a manifest.
fn hours_of(arg: &str) -> Result<f64> {
    if let Ok(h) = arg.parse::<f64>() {
        return Ok(h);
    }
    Ok(compute_stats(&read_manifest(arg)?.records).grand.hours())
}

fn real_main(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global()?;
    }
    match &cli.command {
        Command::Ingest => run_stages(&cli, &[Step::Ingest]),
        Command::Cleanup => run_stages(&cli, &[Step::Cleanup]),
        Command::Align => run_stages(&cli, &[Step::Align]),
        Command::Segment => run_stages(&cli, &[Step::Segment]),
        Command::Concat => run_stages(&cli, &[Step::Concat]),
        Command::G2p { dialect: Some(dialect), lexicon: Some(lexicon), strict } => g2p_filter(*dialect, lexicon, *strict),
        Command::G2p { .. } => run_stages(&cli, &[Step::G2p]),
        Command::Run { stages } => {
            let list = match stages {
                Some(s) => pipeline::parse_stages(s)?,
                None => Step::ALL.to_vec(),
            };
            run_stages(&cli, &list)
        }
        Command::Stats { manifest, csv } => {
            let m = read_manifest(manifest)?;
            let table = compute_stats(&m.records);
            print!("{}", table.render_text());
            println!("grand total: {:.2} h", table.grand.hours());
            if let Some(path) = csv {
                std::fs::write(path, table.render_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
        Command::Retention { before, after } => {
            let (b, a) = (hours_of(before)?, hours_of(after)?);
            let p = retention_hours(b, a)?;
            println!("{b:.2} h -> {a:.2} h: {}", format_percent(p));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).format_timestamp(None).init();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = matches!(
                e.downcast_ref::<pipeline::PipelineError>(),
                Some(
                    pipeline::PipelineError::UnknownStage(_)
                        | pipeline::PipelineError::StageOrder { .. }
                        | pipeline::PipelineError::MissingInput { .. }
                )
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
