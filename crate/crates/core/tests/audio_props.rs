mod common;

use common::gen::{segment, zero_run};
use corpus_forge::audio::{concatenate, speech_regions, trim_and_split, AudioBuffer, SpanLabel, TrimParams};
use corpus_forge::g2p::PhonemeSequence;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

const SR: u32 = 16000;
const THRESHOLD: usize = 800;
const PAD: usize = 400;

/// Alternating silence and speech run lengths, starting and ending with a
/// (possibly empty) silence.
fn layout() -> impl Strategy<Value = Vec<usize>> {
    let silence = prop_oneof![
        Just(THRESHOLD),
        Just(THRESHOLD + 1),
        Just(THRESHOLD + 160),
        0usize..1600,
    ];
    (1usize..6).prop_flat_map(move |k| {
        (
            prop::collection::vec(silence.clone(), k + 1),
            prop::collection::vec(1usize..2000, k),
        )
            .prop_map(|(sil, speech)| {
                let mut v = vec![sil[0]];
                for (sp, si) in speech.iter().zip(&sil[1..]) {
                    v.push(*sp);
                    v.push(*si);
                }
                v
            })
    })
}

fn render(layout: &[usize]) -> (AudioBuffer, Vec<(f64, f64)>, Vec<f32>) {
    let mut samples = Vec::new();
    let mut silences = Vec::new();
    let mut speech = Vec::new();
    for (i, &len) in layout.iter().enumerate() {
        if i % 2 == 0 {
            if len > 0 {
                let s = samples.len();
                silences.push((s as f64 / SR as f64, (s + len) as f64 / SR as f64));
            }
            samples.extend(std::iter::repeat_n(0.0f32, len));
        } else {
            let start = samples.len();
            samples.extend((0..len).map(|j| 0.1 + ((start + j) % 97) as f32 / 200.0));
            speech.extend_from_slice(&samples[start..]);
        }
    }
    (AudioBuffer::new(samples, SR), silences, speech)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn trimming_splits_exactly_at_long_silences(layout in layout()) {
        let (audio, silences, speech) = render(&layout);
        let internal: Vec<usize> = layout[2..layout.len() - 1].iter().step_by(2).copied().collect();
        let expected = 1 + internal.iter().filter(|&&l| l > THRESHOLD).count();

        let regions = speech_regions(audio.len(), SR, &silences, TrimParams::default()).unwrap();
        prop_assert_eq!(regions.len(), expected);
        let spans: Vec<SpanLabel> = (0..expected)
            .map(|i| SpanLabel { text: format!("s{i}"), phonemes: PhonemeSequence::default() })
            .collect();
        let segs = trim_and_split(&audio, &silences, TrimParams::default(), &spans, "u").unwrap();

        let mut kept = Vec::new();
        let mut total = 0;
        for (seg, r) in segs.iter().zip(&regions) {
            let s = &seg.audio.samples;
            prop_assert!(r.lead <= PAD && r.tail <= PAD);
            prop_assert_eq!(zero_run(s, 0), r.lead);
            let trailing = s.iter().rev().take_while(|&&v| v == 0.0).count();
            prop_assert_eq!(trailing, r.tail);
            prop_assert_eq!(seg.leading_silence_s, r.lead as f64 / SR as f64);
            kept.extend(s.iter().copied().filter(|&v| v != 0.0));
            total += s.len();
        }
        prop_assert_eq!(kept, speech.clone());

        let lead = layout[0];
        let tail = *layout.last().unwrap();
        let short: usize = internal.iter().filter(|&&l| l <= THRESHOLD).sum();
        let cuts = expected - 1;
        let want = speech.len() + short + lead.min(PAD) + tail.min(PAD) + cuts * 2 * PAD;
        prop_assert_eq!(total, want);
    }

    #[test]
    fn silence_at_threshold_never_splits(a in 1usize..3000, b in 1usize..3000, extra in 0usize..2) {
        let gap = THRESHOLD + extra;
        let (audio, silences, _) = render(&[0, a, gap, b, 0]);
        let regions = speech_regions(audio.len(), SR, &silences, TrimParams::default()).unwrap();
        prop_assert_eq!(regions.len(), 1 + extra);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn concatenation_leaves_one_pause(
        seed in any::<u64>(),
        la in 0usize..=1200, ta in 0usize..=1200,
        lb in 0usize..=1200, tb in 0usize..=1200,
        na in 1usize..8000, nb in 1usize..8000,
        sa in 1usize..6, sb in 1usize..6,
        text_a in "[天光落雨，]{1,6}", text_b in "[食飯，]{1,6}",
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = segment(&mut rng, &text_a, sa, la, na, ta);
        let b = segment(&mut rng, &text_b, sb, lb, nb, tb);
        let c = concatenate(&a, &b, 0.05).unwrap();
        let s = &c.audio.samples;
        let end_a = la + na;
        let gap = zero_run(s, end_a);
        prop_assert!(gap.abs_diff(800) <= 1, "junction {gap}");
        prop_assert_eq!(&s[..end_a], &a.audio.samples[..end_a]);
        prop_assert_eq!(&s[end_a + gap..], &b.audio.samples[lb..]);

        prop_assert_eq!(c.text.clone(), format!("{text_a}，{text_b}"));
        let commas = |t: &str| t.matches('，').count();
        prop_assert_eq!(commas(&c.text), commas(&text_a) + commas(&text_b) + 1);
        prop_assert_eq!(c.phonemes.pauses.len(), a.phonemes.pauses.len() + b.phonemes.pauses.len() + 1);
        prop_assert!(c.phonemes.pauses.contains(&sa));
        prop_assert_eq!(c.phonemes.len(), sa + sb);
    }
}
