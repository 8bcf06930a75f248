//! Published corpus tables and a generator for manifests that match them.

use corpus_forge::corpus::{Dialect, Source, SourceKind, Utterance};

pub const KINDS: [SourceKind; 3] = [SourceKind::Dict, SourceKind::Exam, SourceKind::Radio];

/// `(dialect, [(utterances, hours, chars/sec) per DICT, EXAM, RADIO])`,
/// hours and rates as printed.
pub type Row = (Dialect, [Option<(usize, &'static str, &'static str)>; 3]);

pub const TABLE1: [Row; 6] = [
    (Dialect::Sixian, [Some((15221, "4.27", "2.20")), Some((2729, "3.73", "2.47")), Some((1180, "57.15", "3.94"))]),
    (Dialect::Hailu, [Some((15322, "5.17", "1.82")), Some((4986, "6.06", "3.10")), Some((915, "43.54", "3.90"))]),
    (Dialect::Dapu, [Some((14363, "7.60", "1.13")), Some((4980, "6.79", "2.66")), Some((256, "12.05", "3.54"))]),
    (Dialect::Raoping, [Some((14258, "3.50", "2.54")), Some((3171, "8.94", "1.19")), Some((68, "2.75", "3.50"))]),
    (Dialect::Zhaoan, [Some((11245, "3.55", "1.70")), Some((4973, "6.82", "2.67")), Some((64, "2.79", "2.91"))]),
    (Dialect::Nansixian, [Some((14698, "5.72", "1.55")), None, None]),
];

pub const TABLE1_DIALECT_TOTALS: [(Dialect, f64); 6] = [
    (Dialect::Sixian, 65.15),
    (Dialect::Hailu, 54.77),
    (Dialect::Dapu, 26.44),
    (Dialect::Raoping, 15.19),
    (Dialect::Zhaoan, 13.16),
    (Dialect::Nansixian, 5.72),
];
pub const TABLE1_TOTAL_HOURS: f64 = 180.43;
pub const TABLE2_TOTAL_HOURS: f64 = 140.31;
/// Scraped total as quoted in the running text.
pub const QUOTED_SCRAPED_HOURS: f64 = 180.53;

fn centi(h: &str) -> u64 {
    h.replace('.', "").parse().unwrap()
}

/// Splits `total` into `n` near-equal whole parts.
fn split(total: u64, n: usize) -> impl Iterator<Item = u64> {
    let n = n as u64;
    (0..n).map(move |i| total / n + u64::from(i < total % n))
}

/// Every utterance of the table: durations in whole milliseconds summing to
/// the cell's hours, and texts whose lengths sum to the nearest whole
/// number of characters at the cell's rate.
pub fn table1_utterances() -> Vec<Utterance> {
    let mut out = Vec::new();
    for (dialect, cells) in TABLE1 {
        for (kind, cell) in KINDS.iter().zip(cells) {
            let Some((n, hours, cps)) = cell else { continue };
            let ms = centi(hours) * 36_000;
            let chars = (centi(cps) as f64 * ms as f64 / 100_000.0).round() as u64;
            for (i, (d, c)) in split(ms, n).zip(split(chars, n)).enumerate() {
                let text: String = "客".repeat(c as usize);
                out.push(Utterance::scraped(
                    format!("{}-{}-{i}", dialect.name(), kind.label()),
                    dialect,
                    Source::new(kind.clone()),
                    "placeholder.wav",
                    16000,
                    d as f64 / 1000.0,
                    &text,
                ));
            }
        }
    }
    out
}
