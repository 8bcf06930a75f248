mod common;

use common::oracles::brute_force_align;
use corpus_forge::align::{force_align, AcousticScores, AlignError, SIL};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Instance {
    rows: Vec<Vec<f64>>,
    phones: Vec<usize>,
    allow_sil: bool,
}

const SYMBOLS: [&str; 5] = [SIL, "a", "b", "c", "d"];

fn instance(dyadic: bool) -> impl Strategy<Value = Instance> {
    (1usize..=20, 0usize..=6, any::<bool>()).prop_flat_map(move |(frames, k, allow_sil)| {
        let cell = if dyadic {
            (-64i32..=0).prop_map(|v| v as f64 / 8.0).boxed()
        } else {
            (-10.0f64..0.0).boxed()
        };
        (
            prop::collection::vec(prop::collection::vec(cell, SYMBOLS.len()), frames),
            prop::collection::vec(1usize..SYMBOLS.len(), k),
        )
            .prop_map(move |(rows, phones)| Instance { rows, phones, allow_sil })
    })
}

fn run(inst: &Instance) -> Result<corpus_forge::align::Alignment, AlignError> {
    let scores = AcousticScores::new(0.01, SYMBOLS.iter().map(|s| s.to_string()).collect(), inst.rows.clone())?;
    let phones: Vec<&str> = inst.phones.iter().map(|&p| SYMBOLS[p]).collect();
    force_align(&scores, &phones, inst.allow_sil)
}

fn check(inst: &Instance) -> Result<(), TestCaseError> {
    let brute = brute_force_align(&inst.rows, &inst.phones, inst.allow_sil.then_some(0));
    match run(inst) {
        Ok(a) => {
            prop_assert_eq!(Some(a.total_score), brute);
            // the returned path really scores its total
            let mut acc = 0.0;
            let mut t = 0;
            for seg in &a.segments {
                let col = SYMBOLS.iter().position(|s| *s == seg.symbol).unwrap();
                for f in seg.start..seg.end {
                    acc = if t == 0 { inst.rows[f][col] } else { acc + inst.rows[f][col] };
                    t += 1;
                }
            }
            prop_assert_eq!(acc, a.total_score);
            prop_assert_eq!(t, inst.rows.len());
            let phones: Vec<&str> = a.phones().map(|s| s.symbol.as_str()).collect();
            let want: Vec<&str> = inst.phones.iter().map(|&p| SYMBOLS[p]).collect();
            prop_assert_eq!(phones, want);
        }
        Err(AlignError::TooFewFrames { .. } | AlignError::NothingToAlign) => prop_assert_eq!(brute, None),
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn dp_matches_enumeration(inst in instance(false)) {
        check(&inst)?;
    }

    #[test]
    fn dp_matches_enumeration_on_dyadic_scores(inst in instance(true)) {
        check(&inst)?;
    }

    #[test]
    fn dyadic_shift_moves_total_and_keeps_path(inst in instance(true), c in -16i32..=16) {
        let Ok(base) = run(&inst) else { return Ok(()) };
        let shift = c as f64 / 4.0;
        let shifted = Instance {
            rows: inst.rows.iter().map(|r| r.iter().map(|v| v + shift).collect()).collect(),
            ..inst.clone()
        };
        let moved = run(&shifted).unwrap();
        prop_assert_eq!(moved.total_score, base.total_score + shift * inst.rows.len() as f64);
        prop_assert_eq!(moved.segments, base.segments);
    }
}
