use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde_json::json;

use super::{io_err, PipelineError, RunConfig, StageReport, Step};
use super::{ALIGNED, CLEANED, CONCATENATED, FINAL, PHONEMIZED, SCRAPED, SEGMENTED};
use crate::align::{
    energy_scores, force_align, read_alignment, read_scores, timed_silences, write_alignment, SIL,
};
use crate::audio::{
    concatenate, decode_wav, detect_silences, encode_wav, speech_regions, trim_and_split, AudioBuffer, EnergyVad,
    Segment, SpanLabel, TrimParams,
};
use crate::cleanup::{batch_cleanup, CleanupParams, CleanupSummary};
use crate::corpus::{
    read_manifest, validate_manifest, write_manifest, AudioCheck, CorpusManifest, Quality, SegmentInfo, Stage,
    Utterance,
};
use crate::g2p::{g2p_convert, g2p_convert_detailed, load_lexicon, G2pOptions, Lexicon};
use crate::ingest::{crawl, materialize, Cache, Fetcher, RateLimiter};
use crate::lm::{char_tokens, save_lm, NGramLm};
use crate::stats::{compute_stats, format_percent, retention};
use crate::text::{is_pause_comma, is_punctuation, is_sentence_final, nfc};

type Result<T> = std::result::Result<T, PipelineError>;
/// Silences to cut at, and the label of each resulting piece.
type Cuts = (Vec<(f64, f64)>, Vec<SpanLabel>);

pub(crate) struct Ctx<'a> {
    cfg: &'a RunConfig,
    fetcher: &'a dyn Fetcher,
    lexicon: OnceLock<Lexicon>,
}

fn read_records(path: &Path) -> Result<Vec<Utterance>> {
    Ok(read_manifest(path)?.records)
}

fn write_records(path: &Path, records: Vec<Utterance>) -> Result<()> {
    Ok(write_manifest(&CorpusManifest::new(records), path)?)
}

fn report(step: Step, input: Option<&Path>, output: Option<&Path>, n_in: usize, n_out: usize) -> StageReport {
    StageReport {
        stage: step.name().to_string(),
        input: input.map(Path::to_path_buf),
        output: output.map(Path::to_path_buf),
        records_in: n_in,
        records_out: n_out,
        ..Default::default()
    }
}

/// Splits per-record outcomes into kept records and warnings, preserving
/// input order.
fn partition<T>(results: Vec<std::result::Result<T, String>>) -> (Vec<T>, Vec<String>) {
    let mut kept = Vec::new();
    let mut warnings = Vec::new();
    for r in results {
        match r {
            Ok(v) => kept.push(v),
            Err(w) => warnings.push(w),
        }
    }
    (kept, warnings)
}

/// Text of syllables `i0..i1`, without edge punctuation or whitespace.
fn span_text(text: &str, char_offsets: &[usize], i0: usize, i1: usize) -> String {
    let chars: Vec<char> = text.chars().collect();
    let c0 = char_offsets[i0];
    let c1 = char_offsets.get(i1).copied().unwrap_or(chars.len());
    let s: String = chars[c0..c1].iter().collect();
    s.trim_matches(|c: char| is_punctuation(c) || c.is_whitespace()).to_string()
}

fn split_clauses(text: &str) -> Vec<String> {
    text.split(|c: char| is_pause_comma(c) || is_sentence_final(c))
        .map(|c| c.trim_matches(|c: char| is_punctuation(c) || c.is_whitespace()).to_string())
        .filter(|c| !c.is_empty())
        .collect()
}

fn segment_of(u: &Utterance, audio: AudioBuffer) -> Segment {
    let info = u.segment.clone().unwrap_or(SegmentInfo {
        source_utterance_id: u.id.clone(),
        offset_in_source_s: 0.0,
        leading_silence_s: 0.0,
        trailing_silence_s: 0.0,
    });
    let n = audio.len();
    Segment {
        audio,
        text: u.text.clone(),
        phonemes: u.phonemes.clone().unwrap_or_default(),
        source_utterance_id: info.source_utterance_id,
        offset_in_source_s: info.offset_in_source_s,
        leading_silence_s: info.leading_silence_s,
        trailing_silence_s: info.trailing_silence_s,
        source_range: 0..n,
    }
}

fn record_from_segment(template: &Utterance, id: String, path: PathBuf, seg: &Segment) -> Utterance {
    Utterance {
        id,
        audio_path: path,
        sample_rate: seg.audio.sample_rate,
        duration_s: seg.duration_s(),
        text: nfc(&seg.text),
        phonemes: Some(seg.phonemes.clone()),
        segment: Some(SegmentInfo {
            source_utterance_id: seg.source_utterance_id.clone(),
            offset_in_source_s: seg.offset_in_source_s,
            leading_silence_s: seg.leading_silence_s,
            trailing_silence_s: seg.trailing_silence_s,
        }),
        ..template.clone()
    }
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(cfg: &'a RunConfig, fetcher: &'a dyn Fetcher) -> Self {
        Ctx { cfg, fetcher, lexicon: OnceLock::new() }
    }

    pub(crate) fn run_step(&self, step: Step) -> Result<StageReport> {
        match step {
            Step::Ingest => self.ingest(),
            Step::Cleanup => self.cleanup(),
            Step::Align => self.align(),
            Step::Segment => self.segment(),
            Step::Concat => self.concat(),
            Step::G2p => self.g2p(),
            Step::Emit => self.emit(),
            Step::Stats => self.stats(),
        }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.paths.output_dir.join(name)
    }

    fn out_dir(&self, name: &str) -> Result<PathBuf> {
        let dir = self.out(name);
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(dir)
    }

    fn require(&self, stage: Step, name: &str, hint: &str) -> Result<PathBuf> {
        let path = self.out(name);
        if path.is_file() {
            Ok(path)
        } else {
            Err(PipelineError::MissingInput { stage, path, hint: hint.to_string() })
        }
    }

    fn first_existing(&self, stage: Step, names: &[&str], hint: &str) -> Result<PathBuf> {
        names
            .iter()
            .map(|n| self.out(n))
            .find(|p| p.is_file())
            .ok_or_else(|| PipelineError::MissingInput { stage, path: self.out(names[0]), hint: hint.to_string() })
    }

    fn audio_path(&self, u: &Utterance) -> PathBuf {
        self.cfg.base_dir.join(&u.audio_path)
    }

    fn lexicon(&self, stage: Step) -> Result<&Lexicon> {
        if let Some(lex) = self.lexicon.get() {
            return Ok(lex);
        }
        let path = self.cfg.paths.lexicon.clone().ok_or_else(|| PipelineError::MissingInput {
            stage,
            path: PathBuf::from("<paths.lexicon>"),
            hint: "set paths.lexicon in the config".into(),
        })?;
        let lex = load_lexicon(&path)?;
        Ok(self.lexicon.get_or_init(|| lex))
    }

    fn g2p_options(&self) -> G2pOptions {
        G2pOptions { tones: self.cfg.pipeline.tones.clone(), strict: self.cfg.g2p.strict }
    }

    fn trim_params(&self) -> TrimParams {
        TrimParams { threshold_s: self.cfg.pipeline.silence_split_threshold_s, pad_s: self.cfg.pipeline.silence_pad_s }
    }

    fn ingest(&self) -> Result<StageReport> {
        let sources = &self.cfg.ingest.sources;
        if sources.is_empty() {
            return Err(PipelineError::Stage { stage: Step::Ingest, message: "no [[ingest.sources]] configured".into() });
        }
        let gap = sources.iter().map(|s| s.rate_limit).fold(0.0, f64::max);
        let limiter = RateLimiter::new(gap);
        let per_source: Vec<Result<_>> = sources
            .par_iter()
            .map(|src| {
                let cache = Cache::new(src.cache_dir.clone().unwrap_or_else(|| self.cfg.paths.cache_dir.clone()));
                let crawled = crawl(src, &self.cfg.base_dir, &cache, self.fetcher, &limiter)?;
                let mat = materialize(&crawled.records, src, &cache, self.fetcher, &limiter);
                let mut warnings: Vec<String> =
                    crawled.failures.iter().map(|(u, e)| format!("{}: fetch {u} failed: {e}", src.name)).collect();
                warnings.extend(mat.skipped.iter().map(|s| format!("{}: skipped {}: {}", src.name, s.audio_url, s.reason)));
                let details = json!({
                    "source": src.name,
                    "pages": crawled.pages,
                    "records": crawled.records.len(),
                    "utterances": mat.utterances.len(),
                    "skipped": mat.skipped,
                });
                Ok((mat.utterances, warnings, details))
            })
            .collect();
        let mut records = Vec::new();
        let mut warnings = Vec::new();
        let mut details = Vec::new();
        let mut seen = HashSet::new();
        for r in per_source {
            let (utts, w, d) = r?;
            records.extend(utts.into_iter().filter(|u| seen.insert(u.id.clone())));
            warnings.extend(w);
            details.push(d);
        }
        let out = self.out(SCRAPED);
        let n = records.len();
        write_records(&out, records)?;
        let mut r = report(Step::Ingest, None, Some(&out), 0, n);
        r.warnings = warnings;
        r.details = json!({ "sources": details, "network_requests": limiter.requests() });
        Ok(r)
    }

    fn background_lm(&self, records: &[Utterance]) -> Result<NGramLm> {
        let mut seqs: Vec<Vec<String>> = records
            .iter()
            .filter(|u| u.source.quality == Quality::WellTranscribed)
            .map(|u| char_tokens(&u.text))
            .collect();
        if let Some(path) = &self.cfg.paths.lm_corpus {
            let src = std::fs::read_to_string(path).map_err(io_err(path))?;
            seqs.extend(src.lines().map(|l| char_tokens(&nfc(l))));
        }
        let p = &self.cfg.pipeline;
        Ok(NGramLm::train(&seqs, p.lm_order, p.background_discount)?)
    }

    fn cleanup(&self) -> Result<StageReport> {
        let input = self.require(Step::Cleanup, SCRAPED, "run the ingest stage first")?;
        let records = read_records(&input)?;
        let n_in = records.len();
        let (out_records, summary) = if records.iter().any(|u| u.source.quality == Quality::IllTranscribed) {
            let lm = self.background_lm(&records)?;
            save_lm(&lm, self.out("background.lm"))?;
            let nbest_dir = self.cfg.paths.nbest_dir.clone().unwrap_or_else(|| self.cfg.base_dir.join("nbest"));
            let params =
                CleanupParams { discount_d: self.cfg.pipeline.discount_d, lm_weight_lambda: self.cfg.pipeline.lm_weight_lambda };
            batch_cleanup(&records, &nbest_dir, &lm, params)?
        } else {
            let mut out = records;
            for u in &mut out {
                u.advance(Stage::Cleaned);
            }
            let summary = CleanupSummary { passed_through: out.len(), ..Default::default() };
            (out, summary)
        };
        let detail_path = self.out("cleanup_report.json");
        let json = serde_json::to_string_pretty(&summary.reports).expect("reports serialize");
        std::fs::write(&detail_path, json + "\n").map_err(io_err(&detail_path))?;

        let out = self.out(CLEANED);
        let n_out = out_records.len();
        write_records(&out, out_records)?;
        let mut r = report(Step::Cleanup, Some(&input), Some(&out), n_in, n_out);
        r.warnings = summary.flagged.iter().map(|id| format!("{id}: no usable n-best list, left out")).collect();
        r.details = json!({
            "processed": summary.processed,
            "changed": summary.changed,
            "passed_through": summary.passed_through,
            "flagged": summary.flagged,
        });
        Ok(r)
    }

    fn align(&self) -> Result<StageReport> {
        let input = self.require(Step::Align, CLEANED, "run the cleanup stage first")?;
        let records = read_records(&input)?;
        let lex = self.lexicon(Step::Align)?;
        let opts = self.g2p_options();
        let dir = self.out_dir("alignments")?;
        let sec = &self.cfg.align;
        let results: Vec<std::result::Result<(Utterance, bool), String>> = records
            .par_iter()
            .map(|u| {
                let fail = |e: &dyn std::fmt::Display| format!("{}: {e}", u.id);
                let ph = g2p_convert(&u.text, u.dialect, lex, &opts).map_err(|e| fail(&e))?;
                if ph.is_empty() {
                    return Err(fail(&"no pronounceable characters"));
                }
                let phones: Vec<String> = ph.syllables.iter().map(ToString::to_string).collect();
                let score_file = self.cfg.paths.scores_dir.as_ref().map(|d| d.join(format!("{}.scores", u.id)));
                let (scores, from_file) = match score_file.filter(|p| p.is_file()) {
                    Some(p) => (read_scores(&p).map_err(|e| fail(&e))?, true),
                    None => {
                        let audio = decode_wav(self.audio_path(u)).map_err(|e| fail(&e))?;
                        let mut symbols: Vec<String> = phones.clone();
                        symbols.sort();
                        symbols.dedup();
                        symbols.insert(0, SIL.to_string());
                        let s = energy_scores(&audio, sec.frame_period_s, sec.energy_threshold_db, &symbols)
                            .map_err(|e| fail(&e))?;
                        (s, false)
                    }
                };
                let alignment = force_align(&scores, &phones, sec.allow_optional_silence).map_err(|e| fail(&e))?;
                write_alignment(dir.join(format!("{}.tsv", u.id)), &alignment, scores.frame_period_s())
                    .map_err(|e| fail(&e))?;
                let mut u = u.clone();
                u.phonemes = Some(ph);
                u.advance(Stage::Aligned);
                Ok((u, from_file))
            })
            .collect();
        let (kept, warnings) = partition(results);
        let from_files = kept.iter().filter(|(_, f)| *f).count();
        let out = self.out(ALIGNED);
        let mut r = report(Step::Align, Some(&input), Some(&out), records.len(), kept.len());
        r.details = json!({ "scored_from_file": from_files, "energy_scored": kept.len() - from_files });
        write_records(&out, kept.into_iter().map(|(u, _)| u).collect())?;
        r.warnings = warnings;
        Ok(r)
    }

    /// Silences and per-region labels from a stored alignment.
    fn labels_from_alignment(
        &self,
        u: &Utterance,
        audio: &AudioBuffer,
        tsv: &Path,
    ) -> std::result::Result<Cuts, String> {
        let timed = read_alignment(tsv).map_err(|e| e.to_string())?;
        let lex = self.lexicon(Step::Segment).map_err(|e| e.to_string())?;
        let ph = g2p_convert_detailed(&u.text, u.dialect, lex, &self.g2p_options()).map_err(|e| e.to_string())?;
        let phones: Vec<_> = timed.iter().filter(|s| !s.is_silence()).collect();
        if phones.len() != ph.phonemes.len() {
            return Err(format!("alignment has {} phones but the text has {}", phones.len(), ph.phonemes.len()));
        }
        let silences = timed_silences(&timed);
        let sr = audio.sample_rate as f64;
        let regions = speech_regions(audio.len(), audio.sample_rate, &silences, self.trim_params())
            .map_err(|e| e.to_string())?;
        let mut ranges: Vec<Option<(usize, usize)>> = vec![None; regions.len()];
        for (k, p) in phones.iter().enumerate() {
            let mid = ((p.start_s + p.end_s) / 2.0 * sr) as usize;
            let r = regions
                .iter()
                .position(|r| r.start <= mid && mid < r.end)
                .ok_or_else(|| format!("phone {} at {:.3} s falls outside every speech region", p.symbol, p.start_s))?;
            let slot = ranges[r].get_or_insert((k, k));
            slot.1 = k + 1;
        }
        let spans = ranges
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let (i0, i1) = r.ok_or_else(|| format!("speech region {} holds no phones", i + 1))?;
                Ok(SpanLabel {
                    text: span_text(&u.text, &ph.char_offsets, i0, i1),
                    phonemes: ph.phonemes.slice(i0..i1),
                })
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        Ok((silences, spans))
    }

    /// Silences and labels from the energy detector: one label per comma
    /// clause when the counts agree, otherwise edge trimming only.
    fn labels_from_energy(
        &self,
        u: &Utterance,
        audio: &AudioBuffer,
    ) -> std::result::Result<Cuts, String> {
        let seg = &self.cfg.segment;
        let vad = EnergyVad { frame_s: 0.010, floor_db: seg.floor_db, min_frames: seg.min_frames };
        let mut silences = detect_silences(audio, &vad);
        let regions =
            speech_regions(audio.len(), audio.sample_rate, &silences, self.trim_params()).map_err(|e| e.to_string())?;
        let mut clauses = split_clauses(&u.text);
        if clauses.len() != regions.len() {
            let end = audio.duration_s();
            silences.retain(|&(a, b)| a <= 0.0 || (b - end).abs() < 1.0 / audio.sample_rate as f64);
            clauses = vec![u.text.trim_matches(|c: char| is_punctuation(c) || c.is_whitespace()).to_string()];
        }
        let lex = self.lexicon(Step::Segment).map_err(|e| e.to_string())?;
        let spans = clauses
            .into_iter()
            .map(|text| {
                let phonemes = g2p_convert(&text, u.dialect, lex, &self.g2p_options()).map_err(|e| e.to_string())?;
                Ok(SpanLabel { text, phonemes })
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        Ok((silences, spans))
    }

    fn segment(&self) -> Result<StageReport> {
        let fallback = self.cfg.segment.energy_fallback;
        let input = if self.out(ALIGNED).is_file() || !fallback {
            self.require(
                Step::Segment,
                ALIGNED,
                "run the align stage first, or set [segment] energy_fallback = true",
            )?
        } else {
            self.require(Step::Segment, CLEANED, "run the cleanup stage first")?
        };
        let records = read_records(&input)?;
        self.lexicon(Step::Segment)?;
        let align_dir = self.out("alignments");
        let seg_dir = self.out_dir("segments")?;
        let params = self.trim_params();
        let results: Vec<std::result::Result<(Vec<Utterance>, bool), String>> = records
            .par_iter()
            .map(|u| {
                let fail = |e: String| format!("{}: {e}", u.id);
                let audio = decode_wav(self.audio_path(u)).map_err(|e| fail(e.to_string()))?;
                let tsv = align_dir.join(format!("{}.tsv", u.id));
                let (silences, spans, aligned) = if tsv.is_file() {
                    let (s, l) = self.labels_from_alignment(u, &audio, &tsv).map_err(fail)?;
                    (s, l, true)
                } else if fallback {
                    let (s, l) = self.labels_from_energy(u, &audio).map_err(fail)?;
                    (s, l, false)
                } else {
                    return Err(fail(format!("no alignment at {}", tsv.display())));
                };
                let segs = trim_and_split(&audio, &silences, params, &spans, &u.id).map_err(|e| fail(e.to_string()))?;
                let mut out = Vec::with_capacity(segs.len());
                for (i, seg) in segs.iter().enumerate() {
                    let id = format!("{}_{}", u.id, i + 1);
                    let path = seg_dir.join(format!("{id}.wav"));
                    encode_wav(&seg.audio, &path, 16).map_err(|e| fail(e.to_string()))?;
                    let mut rec = record_from_segment(u, id, path, seg);
                    rec.advance(Stage::Segmented);
                    out.push(rec);
                }
                Ok((out, aligned))
            })
            .collect();
        let (kept, warnings) = partition(results);
        let from_alignment = kept.iter().filter(|(_, a)| *a).count();
        let segments: Vec<Utterance> = kept.iter().flat_map(|(v, _)| v.iter().cloned()).collect();
        let out = self.out(SEGMENTED);
        let mut r = report(Step::Segment, Some(&input), Some(&out), records.len(), segments.len());
        r.details = json!({ "from_alignment": from_alignment, "from_energy": kept.len() - from_alignment });
        r.warnings = warnings;
        write_records(&out, segments)?;
        Ok(r)
    }

    fn concat(&self) -> Result<StageReport> {
        let input = self.require(Step::Concat, SEGMENTED, "run the segment stage first")?;
        let records = read_records(&input)?;
        let dir = self.out_dir("concat")?;
        let pause = self.cfg.pipeline.concat_pause_s;

        let mut groups: Vec<Vec<&Utterance>> = Vec::new();
        for u in &records {
            let key = u.segment.as_ref().map(|s| s.source_utterance_id.as_str());
            let same = match (groups.last().and_then(|g| g.last()), key) {
                (Some(prev), Some(k)) => prev.segment.as_ref().map(|s| s.source_utterance_id.as_str()) == Some(k),
                _ => false,
            };
            if same {
                groups.last_mut().expect("group exists").push(u);
            } else {
                groups.push(vec![u]);
            }
        }
        let pairs: Vec<(usize, &Utterance, &Utterance)> = groups
            .iter()
            .enumerate()
            .flat_map(|(g, members)| members.windows(2).map(move |w| (g, w[0], w[1])))
            .collect();
        let joined: Vec<std::result::Result<(usize, Utterance), String>> = pairs
            .par_iter()
            .map(|&(g, a, b)| {
                let fail = |e: String| format!("{}+{}: {e}", a.id, b.id);
                let sa = segment_of(a, decode_wav(self.audio_path(a)).map_err(|e| fail(e.to_string()))?);
                let sb = segment_of(b, decode_wav(self.audio_path(b)).map_err(|e| fail(e.to_string()))?);
                let seg = concatenate(&sa, &sb, pause).map_err(|e| fail(e.to_string()))?;
                let suffix = b.id.rsplit('_').next().unwrap_or(&b.id);
                let id = format!("{}+{suffix}", a.id);
                let path = dir.join(format!("{id}.wav"));
                encode_wav(&seg.audio, &path, 16).map_err(|e| fail(e.to_string()))?;
                let mut rec = record_from_segment(a, id, path, &seg);
                rec.advance(Stage::Segmented);
                Ok((g, rec))
            })
            .collect();
        let (joined, warnings) = partition(joined);
        let n_joined = joined.len();
        let mut out_records = Vec::with_capacity(records.len() + n_joined);
        let mut j = joined.into_iter().peekable();
        for (g, members) in groups.iter().enumerate() {
            out_records.extend(members.iter().map(|u| (*u).clone()));
            while let Some((_, rec)) = j.next_if(|(jg, _)| *jg == g) {
                out_records.push(rec);
            }
        }
        let out = self.out(CONCATENATED);
        let mut r = report(Step::Concat, Some(&input), Some(&out), records.len(), out_records.len());
        r.details = json!({ "concatenations": n_joined });
        r.warnings = warnings;
        write_records(&out, out_records)?;
        Ok(r)
    }

    fn g2p(&self) -> Result<StageReport> {
        let input = self.first_existing(Step::G2p, &[CONCATENATED, SEGMENTED], "run the segment stage first")?;
        let records = read_records(&input)?;
        let lex = self.lexicon(Step::G2p)?;
        let opts = self.g2p_options();
        let results: Vec<std::result::Result<(Utterance, bool), String>> = records
            .par_iter()
            .map(|u| {
                let ph = g2p_convert(&u.text, u.dialect, lex, &opts).map_err(|e| format!("{}: {e}", u.id))?;
                let mut u = u.clone();
                let changed = u.phonemes.as_ref() != Some(&ph);
                u.phonemes = Some(ph);
                Ok((u, changed))
            })
            .collect();
        let (kept, warnings) = partition(results);
        let changed = kept.iter().filter(|(_, c)| *c).count();
        let out = self.out(PHONEMIZED);
        let mut r = report(Step::G2p, Some(&input), Some(&out), records.len(), kept.len());
        r.details = json!({ "phonemes_changed": changed });
        r.warnings = warnings;
        write_records(&out, kept.into_iter().map(|(u, _)| u).collect())?;
        Ok(r)
    }

    fn emit(&self) -> Result<StageReport> {
        let input =
            self.first_existing(Step::Emit, &[PHONEMIZED, CONCATENATED, SEGMENTED], "run the segment stage first")?;
        let mut records = read_records(&input)?;
        for u in &mut records {
            u.advance(Stage::Final);
        }
        let manifest = CorpusManifest::new(records);
        let check = validate_manifest(&manifest, &AudioCheck::Strict { base_dir: self.cfg.base_dir.clone() });
        if !check.is_ok() {
            return Err(PipelineError::Stage { stage: Step::Emit, message: check.to_string() });
        }
        let out = self.out(FINAL);
        let n = manifest.len();
        write_manifest(&manifest, &out)?;
        Ok(report(Step::Emit, Some(&input), Some(&out), n, n))
    }

    fn stats(&self) -> Result<StageReport> {
        let input = self.first_existing(
            Step::Stats,
            &[FINAL, PHONEMIZED, CONCATENATED, SEGMENTED, ALIGNED, CLEANED, SCRAPED],
            "run at least the ingest stage first",
        )?;
        let records = read_records(&input)?;
        let table = compute_stats(&records);
        let txt = self.out("stats.txt");
        let csv = self.out("stats.csv");
        std::fs::write(&txt, table.render_text()).map_err(io_err(&txt))?;
        std::fs::write(&csv, table.render_csv()).map_err(io_err(&csv))?;
        let mut details = json!({
            "grand_hours": table.grand.hours(),
            "chars_per_sec": table.grand.chars_per_sec(),
        });
        let scraped = self.out(SCRAPED);
        if scraped.is_file() && scraped != input {
            let before = compute_stats(&read_records(&scraped)?);
            details["scraped_hours"] = json!(before.grand.hours());
            details["scraped_chars_per_sec"] = json!(before.grand.chars_per_sec());
            if let Ok(p) = retention(&before, &table) {
                details["retention_percent"] = json!(p);
                log::info!("retention: {}", format_percent(p));
            }
        }
        let mut r = report(Step::Stats, Some(&input), Some(&txt), records.len(), records.len());
        r.details = details;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_text_trims_punctuation() {
        let text = "天光，落雨。";
        let offsets = [0, 1, 3, 4];
        assert_eq!(span_text(text, &offsets, 0, 2), "天光");
        assert_eq!(span_text(text, &offsets, 2, 4), "落雨");
    }

    #[test]
    fn clauses() {
        assert_eq!(split_clauses("天光，落雨。 好"), vec!["天光", "落雨", "好"]);
        assert!(split_clauses("，。").is_empty());
    }
}
