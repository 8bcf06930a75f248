//! Transcript refinement for ill-transcribed utterances by rescoring an
//! external decoder's n-best list with a transcript-biased language model.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Quality, Stage, Utterance};
use crate::lm::{build_biased_lm, char_tokens, LmError, NGramLm};

#[derive(Debug, Error)]
pub enum CleanupError {
    #[error("n-best list for {0} is empty")]
    EmptyNBest(String),
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lm_weight_lambda must be non-negative, got {0}")]
    Lambda(f64),
    #[error("utterance {id}: {source}")]
    Lm {
        id: String,
        #[source]
        source: LmError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub text: String,
    pub tokens: Vec<String>,
    pub acoustic_logprob: f64,
}

impl Hypothesis {
    /// `None` when the text has no countable characters or the score is not
    /// finite.
    pub fn new(text: &str, acoustic_logprob: f64) -> Option<Self> {
        let text = crate::text::nfc(text.trim());
        let tokens = char_tokens(&text);
        (!tokens.is_empty() && acoustic_logprob.is_finite())
            .then_some(Hypothesis { text, tokens, acoustic_logprob })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NBestList {
    pub utterance_id: String,
    pub initial_transcript: String,
    pub hypotheses: Vec<Hypothesis>,
}

impl NBestList {
    /// Parses `<acoustic logprob>\t<text>` lines; `#` starts a comment line.
    /// A first line without a tab is the initial transcript and replaces
    /// `initial_transcript`.
    pub fn parse(utterance_id: &str, initial_transcript: &str, src: &str, path: &str) -> Result<Self, CleanupError> {
        let mut hypotheses = Vec::new();
        let mut initial = initial_transcript.to_string();
        let mut first = true;
        for (i, line) in src.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if std::mem::take(&mut first) && !line.contains('\t') {
                initial = line.trim().to_string();
                continue;
            }
            let err = |message: String| CleanupError::Parse { path: path.to_string(), line: i + 1, message };
            let (score, text) = line.split_once('\t').ok_or_else(|| err("expected <score>\\t<text>".into()))?;
            let score: f64 = score.trim().parse().map_err(|e| err(format!("bad score: {e}")))?;
            let hyp = Hypothesis::new(text, score).ok_or_else(|| err("empty text or non-finite score".into()))?;
            hypotheses.push(hyp);
        }
        if hypotheses.is_empty() {
            return Err(CleanupError::EmptyNBest(utterance_id.to_string()));
        }
        Ok(NBestList {
            utterance_id: utterance_id.to_string(),
            initial_transcript: initial,
            hypotheses,
        })
    }

    pub fn load(utterance_id: &str, initial_transcript: &str, path: &Path) -> Result<Self, CleanupError> {
        let src = std::fs::read_to_string(path)
            .map_err(|source| CleanupError::Io { path: path.display().to_string(), source })?;
        Self::parse(utterance_id, initial_transcript, &src, &path.display().to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisScore {
    pub acoustic: f64,
    /// Log-probability gain of the biased model over the background.
    pub bias: f64,
    pub combined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CleanupReport {
    pub utterance_id: String,
    pub scores: Vec<HypothesisScore>,
    pub chosen: usize,
    pub changed: bool,
}

/// Picks the hypothesis maximizing `acoustic + lambda * bias`, where `bias`
/// is the biased model's log-probability minus the background's. Ties go to
/// the higher acoustic score, then to the earlier hypothesis.
pub fn refine_transcript<'n>(
    nbest: &'n NBestList,
    background: &NGramLm,
    discount_d: f64,
    lambda: f64,
) -> Result<(&'n Hypothesis, f64, CleanupReport), CleanupError> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(CleanupError::Lambda(lambda));
    }
    if nbest.hypotheses.is_empty() {
        return Err(CleanupError::EmptyNBest(nbest.utterance_id.clone()));
    }
    let lm_err = |source| CleanupError::Lm { id: nbest.utterance_id.clone(), source };
    let biased = build_biased_lm(background, &char_tokens(&nbest.initial_transcript), discount_d).map_err(lm_err)?;

    let scores: Vec<HypothesisScore> = nbest
        .hypotheses
        .iter()
        .map(|h| {
            let bias = if lambda == 0.0 { 0.0 } else { biased.bias_logratio(&h.tokens) };
            HypothesisScore { acoustic: h.acoustic_logprob, bias, combined: h.acoustic_logprob + lambda * bias }
        })
        .collect();
    let mut chosen = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        let best = &scores[chosen];
        if s.combined > best.combined || (s.combined == best.combined && s.acoustic > best.acoustic) {
            chosen = i;
        }
    }
    let hyp = &nbest.hypotheses[chosen];
    let changed = hyp.text != crate::text::nfc(nbest.initial_transcript.trim());
    let combined = scores[chosen].combined;
    let report = CleanupReport { utterance_id: nbest.utterance_id.clone(), scores, chosen, changed };
    Ok((hyp, combined, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CleanupParams {
    pub discount_d: f64,
    pub lm_weight_lambda: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CleanupSummary {
    pub processed: usize,
    pub changed: usize,
    pub passed_through: usize,
    /// Ill-transcribed utterances without a usable n-best list; they are
    /// left out of the output.
    pub flagged: Vec<String>,
    pub reports: Vec<CleanupReport>,
}

/// Location of an utterance's n-best file.
pub fn nbest_path(dir: &Path, utterance_id: &str) -> PathBuf {
    dir.join(format!("{utterance_id}.nbest"))
}

/// Refines every ill-transcribed record and advances all kept records to
/// `Cleaned`. Output order follows input order.
pub fn batch_cleanup(
    records: &[Utterance],
    nbest_dir: &Path,
    background: &NGramLm,
    params: CleanupParams,
) -> Result<(Vec<Utterance>, CleanupSummary), CleanupError> {
    enum Outcome {
        Passed(Utterance),
        Refined(Utterance, CleanupReport),
        Flagged(String, String),
    }
    let outcomes: Vec<Outcome> = records
        .par_iter()
        .map(|u| {
            let mut u = u.clone();
            if u.source.quality == Quality::WellTranscribed {
                u.advance(Stage::Cleaned);
                return Ok(Outcome::Passed(u));
            }
            let path = nbest_path(nbest_dir, &u.id);
            let nbest = match NBestList::load(&u.id, &u.text, &path) {
                Ok(n) => n,
                Err(e @ (CleanupError::Io { .. } | CleanupError::EmptyNBest(_) | CleanupError::Parse { .. })) => {
                    return Ok(Outcome::Flagged(u.id, e.to_string()));
                }
                Err(e) => return Err(e),
            };
            let (hyp, _, report) = refine_transcript(&nbest, background, params.discount_d, params.lm_weight_lambda)?;
            u.text = hyp.text.clone();
            u.advance(Stage::Cleaned);
            Ok(Outcome::Refined(u, report))
        })
        .collect::<Result<_, CleanupError>>()?;

    let mut out = Vec::with_capacity(outcomes.len());
    let mut summary = CleanupSummary::default();
    for o in outcomes {
        match o {
            Outcome::Passed(u) => {
                summary.passed_through += 1;
                out.push(u);
            }
            Outcome::Refined(u, report) => {
                summary.processed += 1;
                summary.changed += report.changed as usize;
                summary.reports.push(report);
                out.push(u);
            }
            Outcome::Flagged(id, why) => {
                log::warn!("cleanup: flagging {id}: {why}");
                summary.flagged.push(id);
            }
        }
    }
    Ok((out, summary))
}
