//! Deterministic 20-utterance demo corpus: a static two-source site,
//! synthetic recordings, acoustic score files, n-best lists, a lexicon and
//! a pipeline config.

use std::fmt::Write as _;
use std::path::Path;

use corpus_forge::audio::{encode_wav, AudioBuffer};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const SR: u32 = 16000;
const FRAME: usize = 160;

const CHARS: &[(&str, &str)] = &[
    ("天", "tien1"), ("光", "gong1"), ("落", "lok8"), ("雨", "i3"), ("食", "siit8"),
    ("飯", "fan5"), ("歇", "hiet4"), ("睏", "kun5"), ("阿", "a1"), ("姆", "me1"),
    ("學", "hok8"), ("堂", "tong2"), ("老", "lo3"), ("師", "sii1"), ("講", "gong3"),
    ("客", "hak4"), ("話", "fa5"), ("新", "xin1"), ("聞", "vun2"), ("今", "gin1"),
    ("晡", "bu1"), ("日", "ngit4"), ("好", "ho3"), ("大", "tai5"), ("家", "ga1"),
    ("屋", "vuk4"), ("出", "cut4"), ("門", "mun2"), ("水", "sui3"), ("山", "san1"),
];

const WORDS: &[&str] = &["天光", "學堂", "老師", "客話", "新聞", "今晡日", "大家", "出門"];

const INTRUDER: char = '的';

/// Pronunciation of `ch` in the given dialect; Hailu uses shifted tones.
fn syllable(ch: char, hailu: bool) -> String {
    let s = CHARS.iter().find(|(c, _)| c.starts_with(ch)).expect("known char").1;
    if !hailu {
        return s.to_string();
    }
    let (base, tone) = s.split_at(s.find(|c: char| c.is_ascii_digit()).unwrap());
    let t: u8 = tone.parse().unwrap();
    format!("{base}{}", t % 8 + 1)
}

fn lexicon_tsv() -> String {
    let mut out = String::from("# surface\tdialect\tpronunciation\tfrequency\n");
    for (dialect, hailu) in [("Sixian", false), ("Hailu", true)] {
        for (c, _) in CHARS {
            let ch = c.chars().next().unwrap();
            writeln!(out, "{c}\t{dialect}\t{}\t10", syllable(ch, hailu)).unwrap();
        }
        for w in WORDS {
            let pron: Vec<String> = w.chars().map(|c| syllable(c, hailu)).collect();
            writeln!(out, "{w}\t{dialect}\t{}\t50", pron.join(" ")).unwrap();
        }
        writeln!(out, "好\t{dialect}\thau5\t2").unwrap();
    }
    out
}

pub struct DemoUtterance {
    pub stem: String,
    pub clauses: Vec<String>,
    pub hailu: bool,
    pub scored: bool,
}

impl DemoUtterance {
    pub fn text(&self) -> String {
        format!("{}。", self.clauses.join("，"))
    }
}

fn random_clause(rng: &mut StdRng) -> String {
    let n = rng.gen_range(2..=5);
    (0..n).map(|_| CHARS[rng.gen_range(0..CHARS.len())].0).collect()
}

fn frames(rng: &mut StdRng, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo..=hi) * FRAME
}

/// Renders one recording and its frame-level score matrix.
fn render(u: &DemoUtterance, rng: &mut StdRng) -> (AudioBuffer, String) {
    let mut samples: Vec<f32> = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let silence = |samples: &mut Vec<f32>, labels: &mut Vec<Option<String>>, n: usize| {
        samples.extend(std::iter::repeat_n(0.0, n));
        labels.extend(std::iter::repeat_n(None, n / FRAME));
    };
    silence(&mut samples, &mut labels, frames(rng, 30, 50));
    for (ci, clause) in u.clauses.iter().enumerate() {
        if ci > 0 {
            silence(&mut samples, &mut labels, frames(rng, 20, 40));
        }
        for ch in clause.chars() {
            let n = frames(rng, 15, 25);
            let freq = 180.0 + 15.0 * (ch as u32 % 17) as f32;
            let start = samples.len();
            samples.extend((0..n).map(|i| 0.3 * (2.0 * std::f32::consts::PI * freq * (start + i) as f32 / SR as f32).sin()));
            labels.extend(std::iter::repeat_n(Some(syllable(ch, u.hailu)), n / FRAME));
        }
    }
    silence(&mut samples, &mut labels, frames(rng, 40, 60));

    let mut symbols: Vec<String> = labels.iter().flatten().cloned().collect();
    symbols.sort();
    symbols.dedup();
    symbols.insert(0, "SIL".into());
    let mut scores = format!("frame_period_s=0.01\n{}\n", symbols.join(" "));
    for l in &labels {
        let want = l.as_deref().unwrap_or("SIL");
        let row: Vec<&str> = symbols.iter().map(|s| if s == want { "0" } else { "-8" }).collect();
        scores.push_str(&row.join(" "));
        scores.push('\n');
    }
    (AudioBuffer::new(samples, SR), scores)
}

fn corrupt(text: &str, at: usize, with: char) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    let idx = chars.iter().enumerate().filter(|(_, c)| **c != '，' && **c != '。').map(|(i, _)| i).nth(at).unwrap();
    chars[idx] = with;
    chars.into_iter().collect()
}

pub fn demo_utterances() -> Vec<DemoUtterance> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut out = Vec::new();
    for i in 1..=10 {
        let n_clauses = if i >= 9 { 1 } else { rng.gen_range(1..=3) };
        let clauses = (0..n_clauses).map(|_| random_clause(&mut rng)).collect();
        out.push(DemoUtterance { stem: format!("d{i:02}"), clauses, hailu: false, scored: i < 9 });
    }
    for i in 1..=10 {
        let n_clauses = rng.gen_range(1..=3);
        let clauses = (0..n_clauses).map(|_| random_clause(&mut rng)).collect();
        out.push(DemoUtterance { stem: format!("r{i:02}"), clauses, hailu: true, scored: true });
    }
    out
}

pub const CONFIG: &str = r#"# Demo pipeline over a local static site.
[pipeline]
discount_d = 0.5
lm_weight_lambda = 1.0

[paths]
output_dir = "out"
cache_dir = "cache"
lexicon = "lexicon.tsv"
nbest_dir = "nbest"
scores_dir = "scores"

[[ingest.sources]]
name = "dict"
kind = "DICT"
dialect = "Sixian"
seed_urls = ["site/dict/p1.html"]
rate_limit = 0.002
max_pages = 10

[ingest.sources.rules]
record = "div.entry"
text = ".hanzi"
audio = "audio @src"
follow = "a.next @href"

[[ingest.sources]]
name = "radio"
kind = "RADIO"
seed_urls = ["site/radio/index.html"]
rate_limit = 0.002

[ingest.sources.rules]
record = "li.news"
text = ".transcript"
audio = "audio source @src"
dialect = ".dialect"
"#;

/// Writes the corpus under `dir` and returns the utterances it describes.
pub fn write_demo_corpus(dir: &Path) -> Vec<DemoUtterance> {
    let mut rng = StdRng::seed_from_u64(11);
    let utts = demo_utterances();
    for sub in ["site/dict", "site/radio", "site/audio", "scores", "nbest"] {
        std::fs::create_dir_all(dir.join(sub)).unwrap();
    }
    std::fs::write(dir.join("lexicon.tsv"), lexicon_tsv()).unwrap();
    std::fs::write(dir.join("forge.toml"), CONFIG).unwrap();

    let mut dict_pages = [String::new(), String::new()];
    let mut radio = String::new();
    for (k, u) in utts.iter().enumerate() {
        let (audio, scores) = render(u, &mut rng);
        encode_wav(&audio, dir.join(format!("site/audio/{}.wav", u.stem)), 16).unwrap();
        let id = if u.hailu { format!("radio-{}", u.stem) } else { format!("dict-{}", u.stem) };
        if u.scored {
            std::fs::write(dir.join(format!("scores/{id}.scores")), scores).unwrap();
        }
        let text = u.text();
        if !u.hailu {
            writeln!(
                dict_pages[k / 5],
                r#"<div class="entry"><span class="hanzi">{text}</span> <audio src="../audio/{}.wav"></audio></div>"#,
                u.stem
            )
            .unwrap();
            continue;
        }
        let r = k - 10;
        let scraped = if r < 6 { corrupt(&text, r % 2, INTRUDER) } else { text.clone() };
        writeln!(
            radio,
            r#"<li class="news"><span class="dialect">海陸</span><p class="transcript">{scraped}</p><audio controls><source src="../audio/{}.wav"></audio></li>"#,
            u.stem
        )
        .unwrap();
        if r == 9 {
            continue;
        }
        let alt = corrupt(&text, 0, if text.starts_with('山') { '水' } else { '山' });
        let nbest = if r < 6 {
            format!("# decoder output\n{scraped}\n-10.0\t{text}\n-30.0\t{scraped}\n-12.0\t{alt}\n")
        } else {
            format!("{scraped}\n-10.0\t{text}\n-9.8\t{alt}\n")
        };
        std::fs::write(dir.join(format!("nbest/{id}.nbest")), nbest).unwrap();
    }
    let page = |body: &str, next: Option<&str>| {
        let link = next.map(|n| format!(r#"<a class="next" href="{n}">next</a>"#)).unwrap_or_default();
        format!("<!doctype html><html><head><meta charset=\"utf-8\"></head><body>\n{body}{link}\n</body></html>\n")
    };
    std::fs::write(dir.join("site/dict/p1.html"), page(&dict_pages[0], Some("p2.html"))).unwrap();
    std::fs::write(dir.join("site/dict/p2.html"), page(&dict_pages[1], Some("p1.html"))).unwrap();
    std::fs::write(dir.join("site/radio/index.html"), page(&format!("<ul>\n{radio}</ul>"), None)).unwrap();
    utts
}
