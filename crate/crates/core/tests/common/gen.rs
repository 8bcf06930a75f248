//! Seeded random fixtures shared by the property suites.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use corpus_forge::audio::{AudioBuffer, Segment};
use corpus_forge::g2p::PhonemeSequence;

pub const HANZI: [char; 6] = ['天', '光', '落', '雨', '食', '飯'];
const ONSETS: [&str; 6] = ["tien", "gong", "log", "i", "siid", "fan"];

/// A small lexicon over [`HANZI`] with heteronyms, as TSV and as
/// `(surface, pronunciation, frequency)` triples in file order.
pub fn random_lexicon(rng: &mut StdRng) -> (String, Vec<(String, String, u64)>) {
    let mut entries = Vec::new();
    for _ in 0..rng.gen_range(1..=12) {
        let len = rng.gen_range(1..=3);
        let surface: String = (0..len).map(|_| *HANZI.choose(rng).unwrap()).collect();
        let variants = if rng.gen_bool(0.3) { rng.gen_range(2..=3) } else { 1 };
        for _ in 0..variants {
            let pron: Vec<String> = surface
                .chars()
                .map(|c| {
                    let k = HANZI.iter().position(|&h| h == c).unwrap();
                    format!("{}{}", ONSETS[k], rng.gen_range(1..=8))
                })
                .collect();
            entries.push((surface.clone(), pron.join(" "), rng.gen_range(0..=4)));
        }
    }
    let tsv = entries
        .iter()
        .map(|(s, p, f)| format!("{s}\tSixian\t{p}\t{f}\n"))
        .collect();
    (tsv, entries)
}

/// Text over [`HANZI`], an out-of-lexicon character, commas and stops.
pub fn random_text(rng: &mut StdRng) -> String {
    let n = rng.gen_range(0..=16);
    (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0 => '，',
            1 => '。',
            2 => '水',
            _ => *HANZI.choose(rng).unwrap(),
        })
        .collect()
}

/// A segment with `lead` and `tail` zero samples around non-zero speech.
pub fn segment(rng: &mut StdRng, text: &str, syllables: usize, lead: usize, speech: usize, tail: usize) -> Segment {
    let mut samples = vec![0.0f32; lead];
    samples.extend((0..speech).map(|_| {
        let v: f32 = rng.gen_range(0.05..0.9);
        if rng.gen_bool(0.5) { v } else { -v }
    }));
    samples.extend(vec![0.0; tail]);
    let syl: Vec<_> = (0..syllables).map(|i| format!("sa{}", i % 8 + 1).parse().unwrap()).collect();
    let mut phonemes = PhonemeSequence { syllables: syl, pauses: Default::default() };
    if syllables > 2 && rng.gen_bool(0.5) {
        phonemes.pauses.insert(rng.gen_range(1..syllables));
    }
    let sr = 16000.0;
    Segment {
        audio: AudioBuffer::new(samples, 16000),
        text: text.to_string(),
        phonemes,
        source_utterance_id: "u".into(),
        offset_in_source_s: 0.0,
        leading_silence_s: lead as f64 / sr,
        trailing_silence_s: tail as f64 / sr,
        source_range: 0..lead + speech + tail,
    }
}

/// Length of the zero run starting at `from`.
pub fn zero_run(samples: &[f32], from: usize) -> usize {
    samples[from..].iter().take_while(|&&s| s == 0.0).count()
}

/// Random character sentences over a small alphabet.
pub fn random_corpus(rng: &mut StdRng, alphabet: &[&str], sentences: usize, max_len: usize) -> Vec<Vec<String>> {
    (0..sentences)
        .map(|_| {
            let n = rng.gen_range(1..=max_len);
            (0..n).map(|_| alphabet.choose(rng).unwrap().to_string()).collect()
        })
        .collect()
}
