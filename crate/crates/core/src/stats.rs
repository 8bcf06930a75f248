//! Corpus accounting: utterances, hours and characters per second by
//! dialect and source, plus before/after retention.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{Dialect, SourceKind, Utterance};
use crate::text::count_chars;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("retention is undefined: the reference table has zero hours")]
    ZeroReference,
}

/// Sum that does not depend on input order: values are sorted, then added
/// with Neumaier compensation.
pub fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &v in values.iter() {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Cell {
    pub n_utts: u64,
    pub seconds: f64,
    pub chars: u64,
}

impl Cell {
    pub fn hours(&self) -> f64 {
        self.seconds / 3600.0
    }

    /// `None` when the cell holds no audio.
    pub fn chars_per_sec(&self) -> Option<f64> {
        (self.seconds > 0.0).then(|| self.chars as f64 / self.seconds)
    }
}

/// Sort key placing DICT, EXAM, RADIO first and other sources by name.
fn source_key(kind: &SourceKind) -> (u8, &str) {
    match kind {
        SourceKind::Dict => (0, ""),
        SourceKind::Exam => (1, ""),
        SourceKind::Radio => (2, ""),
        SourceKind::Other(name) => (3, name.as_str()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub dialect: Dialect,
    pub source: SourceKind,
    #[serde(flatten)]
    pub cell: Cell,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StatsTable {
    /// Non-empty (dialect, source) cells in dialect order, then source order.
    pub rows: Vec<StatsRow>,
    pub dialect_totals: Vec<(Dialect, Cell)>,
    pub source_totals: Vec<(SourceKind, Cell)>,
    pub grand: Cell,
}

#[derive(Default)]
struct Acc {
    n: u64,
    secs: Vec<f64>,
    chars: u64,
}

impl Acc {
    fn add(&mut self, secs: f64, chars: u64) {
        self.n += 1;
        self.secs.push(secs);
        self.chars += chars;
    }

    fn finish(mut self) -> Cell {
        Cell { n_utts: self.n, seconds: stable_sum(&mut self.secs), chars: self.chars }
    }
}

pub fn compute_stats<'a>(records: impl IntoIterator<Item = &'a Utterance>) -> StatsTable {
    let mut cells: BTreeMap<(Dialect, (u8, String)), (SourceKind, Acc)> = BTreeMap::new();
    let mut dialects: BTreeMap<Dialect, Acc> = BTreeMap::new();
    let mut sources: BTreeMap<(u8, String), (SourceKind, Acc)> = BTreeMap::new();
    let mut grand = Acc::default();
    for u in records {
        let chars = count_chars(&u.text) as u64;
        let (rank, name) = source_key(&u.source.kind);
        let skey = (rank, name.to_string());
        cells
            .entry((u.dialect, skey.clone()))
            .or_insert_with(|| (u.source.kind.clone(), Acc::default()))
            .1
            .add(u.duration_s, chars);
        dialects.entry(u.dialect).or_default().add(u.duration_s, chars);
        sources.entry(skey).or_insert_with(|| (u.source.kind.clone(), Acc::default())).1.add(u.duration_s, chars);
        grand.add(u.duration_s, chars);
    }
    StatsTable {
        rows: cells
            .into_iter()
            .map(|((dialect, _), (source, acc))| StatsRow { dialect, source, cell: acc.finish() })
            .collect(),
        dialect_totals: dialects.into_iter().map(|(d, acc)| (d, acc.finish())).collect(),
        source_totals: sources.into_values().map(|(k, acc)| (k, acc.finish())).collect(),
        grand: grand.finish(),
    }
}

impl StatsTable {
    pub fn dialect_total(&self, dialect: Dialect) -> Cell {
        self.dialect_totals.iter().find(|(d, _)| *d == dialect).map(|(_, c)| *c).unwrap_or_default()
    }

    pub fn source_total(&self, kind: &SourceKind) -> Cell {
        self.source_totals.iter().find(|(k, _)| k == kind).map(|(_, c)| *c).unwrap_or_default()
    }

    pub fn cell(&self, dialect: Dialect, kind: &SourceKind) -> Cell {
        self.rows
            .iter()
            .find(|r| r.dialect == dialect && &r.source == kind)
            .map(|r| r.cell)
            .unwrap_or_default()
    }

    fn lines(&self) -> Vec<(String, String, Cell)> {
        let mut out = Vec::new();
        for (d, total) in &self.dialect_totals {
            for r in self.rows.iter().filter(|r| r.dialect == *d) {
                out.push((d.display_name(), r.source.label().to_string(), r.cell));
            }
            out.push((d.display_name(), "all".to_string(), *total));
        }
        for (k, c) in &self.source_totals {
            out.push(("Total".to_string(), k.label().to_string(), *c));
        }
        out.push(("Total".to_string(), "all".to_string(), self.grand));
        out
    }

    /// Aligned plain-text table.
    pub fn render_text(&self) -> String {
        let lines = self.lines();
        let dw = lines.iter().map(|l| l.0.chars().count()).max().unwrap_or(0).max(7);
        let sw = lines.iter().map(|l| l.1.len()).max().unwrap_or(0).max(6);
        let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(s.chars().count())));
        let mut out = format!("{}  {}  {:>9}  {:>9}  {:>9}\n", pad("Dialect", dw), pad("Source", sw), "#Utt.", "Hours", "#Char/Sec");
        for (d, s, c) in lines {
            let cps = c.chars_per_sec().map_or("-".to_string(), |v| format!("{v:.2}"));
            let _ = writeln!(out, "{}  {}  {:>9}  {:>9.2}  {:>9}", pad(&d, dw), pad(&s, sw), c.n_utts, c.hours(), cps);
        }
        out
    }

    /// CSV with one line per cell and per total; `chars_per_sec` is empty
    /// when undefined.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("dialect,source,n_utts,hours,chars,chars_per_sec\n");
        for (d, s, c) in self.lines() {
            let cps = c.chars_per_sec().map_or(String::new(), |v| format!("{v:.6}"));
            let d = if d.contains(',') { format!("\"{d}\"") } else { d };
            let _ = writeln!(out, "{d},{s},{},{:.6},{},{cps}", c.n_utts, c.hours(), c.chars);
        }
        out
    }
}

/// Percentage of `before`'s hours still present in `after`.
pub fn retention(before: &StatsTable, after: &StatsTable) -> Result<f64, StatsError> {
    retention_hours(before.grand.hours(), after.grand.hours())
}

pub fn retention_hours(before: f64, after: f64) -> Result<f64, StatsError> {
    if before <= 0.0 {
        return Err(StatsError::ZeroReference);
    }
    Ok(100.0 * after / before)
}

/// Two-decimal rendering used for reports.
pub fn format_percent(p: f64) -> String {
    format!("{p:.2}%")
}
