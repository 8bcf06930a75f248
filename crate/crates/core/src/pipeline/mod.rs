//! Stage orchestration: each stage reads the previous stage's manifest from
//! the output directory and writes its own.

mod config;
mod stages;

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::Fetcher;

pub use config::{AlignSection, G2pSection, IngestSection, Paths, RunConfig, RunConfigError, SegmentSection, CACHE_ENV};

/// Pipeline stages in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Ingest,
    Cleanup,
    Align,
    Segment,
    Concat,
    G2p,
    Emit,
    Stats,
}

impl Step {
    pub const ALL: [Step; 8] =
        [Step::Ingest, Step::Cleanup, Step::Align, Step::Segment, Step::Concat, Step::G2p, Step::Emit, Step::Stats];

    pub fn name(self) -> &'static str {
        match self {
            Step::Ingest => "ingest",
            Step::Cleanup => "cleanup",
            Step::Align => "align",
            Step::Segment => "segment",
            Step::Concat => "concat",
            Step::G2p => "g2p",
            Step::Emit => "emit",
            Step::Stats => "stats",
        }
    }

    /// Manifest written by the stage, if any.
    pub fn output_file(self) -> Option<&'static str> {
        match self {
            Step::Ingest => Some(SCRAPED),
            Step::Cleanup => Some(CLEANED),
            Step::Align => Some(ALIGNED),
            Step::Segment => Some(SEGMENTED),
            Step::Concat => Some(CONCATENATED),
            Step::G2p => Some(PHONEMIZED),
            Step::Emit => Some(FINAL),
            Step::Stats => None,
        }
    }
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Step {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, PipelineError> {
        Step::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| PipelineError::UnknownStage(s.to_string()))
    }
}

pub const SCRAPED: &str = "scraped.jsonl";
pub const CLEANED: &str = "cleaned.jsonl";
pub const ALIGNED: &str = "aligned.jsonl";
pub const SEGMENTED: &str = "segmented.jsonl";
pub const CONCATENATED: &str = "concatenated.jsonl";
pub const PHONEMIZED: &str = "phonemized.jsonl";
pub const FINAL: &str = "final.jsonl";
pub const RUN_REPORT: &str = "run_report.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown stage {0:?}; expected one of ingest, cleanup, align, segment, concat, g2p, emit, stats")]
    UnknownStage(String),
    #[error("stage {later} cannot run before {earlier}; list stages in pipeline order")]
    StageOrder { earlier: Step, later: Step },
    #[error("stage {stage} needs {}: {hint}", path.display())]
    MissingInput { stage: Step, path: PathBuf, hint: String },
    #[error("{0}")]
    Config(#[from] RunConfigError),
    #[error(transparent)]
    Manifest(#[from] crate::corpus::ManifestError),
    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
    #[error(transparent)]
    G2p(#[from] crate::g2p::G2pError),
    #[error(transparent)]
    Lm(#[from] crate::lm::LmError),
    #[error(transparent)]
    Cleanup(#[from] crate::cleanup::CleanupError),
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("stage {stage}: {message}")]
    Stage { stage: Step, message: String },
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.display().to_string(), source }
}

/// What one stage did.
#[derive(Debug, Clone, Default, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub records_in: usize,
    pub records_out: usize,
    pub seconds: f64,
    pub warnings: Vec<String>,
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub stages: Vec<StageReport>,
}

/// Parses a comma-separated stage list and checks it is in pipeline order.
pub fn parse_stages(list: &str) -> Result<Vec<Step>, PipelineError> {
    let stages = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Step>, _>>()?;
    check_order(&stages)?;
    Ok(stages)
}

pub fn check_order(stages: &[Step]) -> Result<(), PipelineError> {
    for w in stages.windows(2) {
        if w[1] <= w[0] {
            return Err(PipelineError::StageOrder { earlier: w[1], later: w[0] });
        }
    }
    Ok(())
}

/// Runs `stages` in order and writes the run report. A failing stage stops
/// the run; the report written so far is kept.
pub fn run(cfg: &RunConfig, stages: &[Step], fetcher: &dyn Fetcher) -> Result<RunReport, PipelineError> {
    check_order(stages)?;
    let out_dir = &cfg.paths.output_dir;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let ctx = stages::Ctx::new(cfg, fetcher);
    let mut report = RunReport::default();
    let mut result = Ok(());
    for &step in stages {
        log::info!("stage {step}: starting");
        let t0 = Instant::now();
        match ctx.run_step(step) {
            Ok(mut r) => {
                r.seconds = t0.elapsed().as_secs_f64();
                for w in &r.warnings {
                    log::warn!("{step}: {w}");
                }
                log::info!("stage {step}: {} in, {} out, {:.2} s", r.records_in, r.records_out, r.seconds);
                report.stages.push(r);
            }
            Err(e) => {
                log::error!("stage {step} failed: {e}");
                result = Err(e);
                break;
            }
        }
    }
    let path = out_dir.join(RUN_REPORT);
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&path, json + "\n").map_err(io_err(&path))?;
    result.map(|_| report)
}
