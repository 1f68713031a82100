use proptest::prelude::*;
use scg::eval::{score, CaptionRecord, LengthUnit, ScoredInterpretation, Verdict, Verdicts};

fn records() -> impl Strategy<Value = (Vec<CaptionRecord>, Verdicts)> {
    prop::collection::vec(
        (
            1usize..8,
            prop::collection::vec((0usize..8, 1usize..4, 0u8..3), 0..5),
        ),
        1..6,
    )
    .prop_map(|caps| {
        let mut verdicts = Verdicts::new();
        let records = caps
            .into_iter()
            .enumerate()
            .map(|(c, (tokens, raw))| {
                let id = format!("c{c}");
                let interpretations = raw
                    .into_iter()
                    .filter(|(s, _, _)| *s < tokens)
                    .enumerate()
                    .map(|(k, (s, len, v))| {
                        let end = (s + len).min(tokens);
                        let iid = format!("i{}", k + 1);
                        match v {
                            0 => {
                                verdicts.insert((id.clone(), iid.clone()), Verdict::Correct);
                            }
                            1 => {
                                verdicts.insert((id.clone(), iid.clone()), Verdict::Incorrect);
                            }
                            _ => {}
                        }
                        ScoredInterpretation {
                            id: iid,
                            start: s,
                            end,
                            chars: (end - s) * 4,
                            logic: "X".into(),
                        }
                    })
                    .collect();
                CaptionRecord {
                    id,
                    text: String::new(),
                    tokens,
                    interpretations,
                }
            })
            .collect();
        (records, verdicts)
    })
}

proptest! {
    #[test]
    fn metrics_ignore_caption_order((recs, verdicts) in records(), seed in any::<u64>()) {
        let a = score(&recs, &verdicts, LengthUnit::Tokens).unwrap();
        let mut shuffled = recs.clone();
        let n = shuffled.len();
        shuffled.rotate_left((seed as usize) % n);
        shuffled.reverse();
        let b = score(&shuffled, &verdicts, LengthUnit::Tokens).unwrap();
        prop_assert_eq!(a.scored, b.scored);
        prop_assert_eq!(a.correct, b.correct);
        prop_assert!((a.coverage - b.coverage).abs() < 1e-12);
        prop_assert_eq!(a.precision, b.precision);
        prop_assert_eq!(a.mean_length, b.mean_length);
    }

    #[test]
    fn metrics_stay_in_range((recs, verdicts) in records()) {
        let m = score(&recs, &verdicts, LengthUnit::Chars).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.coverage));
        if let Some(p) = m.precision {
            prop_assert!((0.0..=1.0).contains(&p));
        }
        prop_assert!(m.correct <= m.scored);
    }
}
