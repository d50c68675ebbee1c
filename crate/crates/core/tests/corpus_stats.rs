mod common;

use common::{alpha_by_definition, fixture_dir, seeded_corpus, synthetic_record};
use lexispec::corpus::{
    analyze, compute_stats, krippendorff_alpha, load_corpus, nominal_alpha, render_report, AlphaError, AlphaInput,
    EmotionLabel, PairKind, ReportFormat, StatsReport,
};
use lexispec::hierarchy::build_graph;
use lexispec::specificity::{CaseTag, SpecificityVerdict};
use lexispec::wordnet::load_fixture;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHA_TOLERANCE: f64 = 1e-9;

fn reference_counts() -> Vec<lexispec::corpus::ParallelRecord> {
    seeded_corpus(
        [[82, 10, 5], [8, 8, 1]],
        &[
            (PairKind::MetaphorVsLiteral, [143, 17, 11]),
            (PairKind::MetaphorVsSameSpecificityLiteral, [42, 23, 40]),
            (PairKind::LiteralVsMoreSpecificLiteral, [32, 14, 46]),
        ],
    )
}

#[test]
fn reference_counts_give_half_up_percentages() {
    let r = compute_stats(&reference_counts());
    let t = &r.cross_tab;
    assert_eq!(t.total, 114);
    let cells = [
        t.more_emotional.more_specific,
        t.more_emotional.more_general,
        t.more_emotional.same_level,
        t.less_or_same_emotional.more_specific,
        t.less_or_same_emotional.more_general,
        t.less_or_same_emotional.same_level,
    ]
    .map(|s| s.to_string());
    // 10/114 = 8.77% and 1/114 = 0.877% round to 8.8 and 0.9
    assert_eq!(
        cells,
        [
            "82 (71.9%)",
            "10 (8.8%)",
            "5 (4.4%)",
            "8 (7.0%)",
            "8 (7.0%)",
            "1 (0.9%)"
        ]
    );
    assert_eq!(
        r.conditional_rates.emotional_given_specific.unwrap().to_string(),
        "91.1"
    );
    assert_eq!(
        r.conditional_rates.specific_given_emotional.unwrap().to_string(),
        "84.5"
    );
    assert_eq!(r.specificity_distribution.more_specific.to_string(), "90 (78.9%)");

    // the metaphor/literal emotion column counts the extra unassessed pairs too
    let base = &r.emotion_distribution[&PairKind::MetaphorVsLiteral];
    assert_eq!(base.total, 114 + 171);
    let text = render_report(&compute_stats(&reference_counts()[114..]), ReportFormat::Text);
    for needle in [
        "143 (83.6%)",
        "17 (9.9%)",
        "11 (6.4%)",
        "42 (40.0%, ↓ 43.6%)",
        "23 (21.9%, ↑ 12.0%)",
        "40 (38.1%, ↑ 31.7%)",
        "32 (34.8%)",
        "14 (15.2%)",
        "46 (50.0%)",
    ] {
        assert!(text.contains(needle), "missing {needle:?} in\n{text}");
    }
}

#[test]
fn case_split_of_114_pairs() {
    let mut records = Vec::new();
    for i in 0..114 {
        let case = if i < 98 {
            CaseTag::DirectRelation
        } else {
            CaseTag::CommonHypernym
        };
        records.push(synthetic_record(
            i,
            PairKind::MetaphorVsLiteral,
            Some((SpecificityVerdict::FirstMoreSpecific, case)),
            None,
        ));
    }
    let r = compute_stats(&records);
    assert_eq!(r.case_split.direct_relation.to_string(), "98 (86.0%)");
    assert_eq!(r.case_split.common_hypernym.to_string(), "16 (14.0%)");
    assert_eq!(r.cross_tab.unlabeled, 114);
}

#[test]
fn worked_alpha_example_matches_definition() {
    let units = vec![vec!['A', 'A'], vec!['A', 'B'], vec!['B', 'B'], vec!['B', 'B']];
    let alpha = nominal_alpha(&units).unwrap();
    let reference = alpha_by_definition(&units);
    assert!((reference - 8.0 / 15.0).abs() < ALPHA_TOLERANCE);
    assert!((alpha - reference).abs() < ALPHA_TOLERANCE, "{alpha} vs {reference}");
}

#[test]
fn alpha_from_annotators_with_missing_cells() {
    let mut input = AlphaInput::new();
    // a3 skips item 2 and item 4 has a single value, so it is not pairable
    for (a, i, l) in [
        ("a1", 1, 'x'),
        ("a2", 1, 'x'),
        ("a3", 1, 'y'),
        ("a1", 2, 'y'),
        ("a2", 2, 'y'),
        ("a1", 3, 'z'),
        ("a2", 3, 'x'),
        ("a3", 3, 'z'),
        ("a1", 4, 'y'),
    ] {
        input.insert(a, format!("i{i}"), l);
    }
    let units = vec![vec!['x', 'x', 'y'], vec!['y', 'y'], vec!['z', 'x', 'z'], vec!['y']];
    let got = krippendorff_alpha(&input).unwrap();
    assert!((got - alpha_by_definition(&units)).abs() < ALPHA_TOLERANCE);
}

#[test]
fn alpha_matches_definition_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let items = rng.gen_range(1..30);
        let coders = rng.gen_range(2..6);
        let cats = rng.gen_range(2..5u8);
        let units: Vec<Vec<u8>> = (0..items)
            .map(|_| {
                let present = rng.gen_range(0..=coders);
                (0..present).map(|_| rng.gen_range(0..cats)).collect()
            })
            .collect();
        match nominal_alpha(&units) {
            Ok(a) => {
                let reference = alpha_by_definition(&units);
                assert!((a - reference).abs() < ALPHA_TOLERANCE, "{units:?}: {a} vs {reference}");
            }
            Err(AlphaError::InsufficientData) => assert!(units.iter().all(|u| u.len() < 2)),
            Err(AlphaError::UndefinedAlpha) => {
                let mut values: Vec<u8> = units.iter().filter(|u| u.len() >= 2).flatten().copied().collect();
                values.dedup();
                values.sort();
                values.dedup();
                assert_eq!(values.len(), 1);
            }
        }
    }
}

#[test]
fn sample_corpus_report_is_consistent() {
    let db = load_fixture(&fixture_dir().join("mini.wn")).unwrap();
    let g = build_graph(&db).unwrap();
    let records = load_corpus(&fixture_dir().join("sample.tsv")).unwrap();
    assert_eq!(records.len(), 12);
    let (assessed, r) = analyze(&records, &db, &g);
    assert_eq!((r.n_total, r.n_valid, r.n_invalid), (6, 5, 1));
    assert_eq!(r.invalid_reasons.get("no_common_hypernym"), Some(&1));
    assert_eq!(r.wordnet_release.as_deref(), Some("3.0"));
    assert_eq!(assessed.iter().filter(|a| a.is_valid()).count(), 11);
    let json = render_report(&r, ReportFormat::Json);
    let back: StatsReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(value["schemaVersion"], 1);
}

fn shuffled_stats(records: &[lexispec::corpus::ParallelRecord], seed: u64) -> StatsReport {
    let mut v = records.to_vec();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    compute_stats(&v)
}

fn random_corpus(seed: u64) -> Vec<lexispec::corpus::ParallelRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verdicts = [
        SpecificityVerdict::FirstMoreSpecific,
        SpecificityVerdict::SecondMoreSpecific,
        SpecificityVerdict::SameLevel,
    ];
    (0..rng.gen_range(0..80))
        .map(|i| {
            let kind = PairKind::ALL[rng.gen_range(0..3)];
            let verdict = rng.gen_bool(0.8).then(|| {
                (
                    verdicts[rng.gen_range(0..3)],
                    if rng.gen_bool(0.7) {
                        CaseTag::DirectRelation
                    } else {
                        CaseTag::CommonHypernym
                    },
                )
            });
            let gold = rng.gen_bool(0.9).then(|| EmotionLabel::ALL[rng.gen_range(0..3)]);
            let mut r = synthetic_record(i, kind, verdict, gold);
            if rng.gen_bool(0.5) {
                for a in ["a1", "a2", "a3"] {
                    if rng.gen_bool(0.8) {
                        r.annotator_labels
                            .insert(a.into(), EmotionLabel::ALL[rng.gen_range(0..3)]);
                    }
                }
            }
            r
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn stats_ignore_record_order(seed in any::<u64>()) {
        let records = random_corpus(seed);
        prop_assert_eq!(shuffled_stats(&records, seed ^ 9), compute_stats(&records));
    }

    #[test]
    fn duplicating_the_corpus_doubles_counts(seed in any::<u64>()) {
        let records = random_corpus(seed);
        let once = compute_stats(&records);
        let mut doubled = records.clone();
        for r in &records {
            let mut copy = r.clone();
            copy.record_id = format!("{}-copy", r.record_id);
            doubled.push(copy);
        }
        let twice = compute_stats(&doubled);
        prop_assert_eq!(twice.n_valid, 2 * once.n_valid);
        prop_assert_eq!(twice.n_total, 2 * once.n_total);
        prop_assert_eq!(twice.cross_tab.total, 2 * once.cross_tab.total);
        prop_assert_eq!(&twice.specificity_distribution.more_specific.percent, &once.specificity_distribution.more_specific.percent);
        prop_assert_eq!(&twice.conditional_rates, &once.conditional_rates);
        prop_assert_eq!(&twice.literal_deltas, &once.literal_deltas);
        for k in PairKind::ALL {
            let (a, b) = (&once.emotion_distribution[&k], &twice.emotion_distribution[&k]);
            prop_assert_eq!(b.total, 2 * a.total);
            prop_assert_eq!(b.first.count, 2 * a.first.count);
            prop_assert_eq!(b.first.percent, a.first.percent);
        }
    }

    #[test]
    fn alpha_ignores_category_names(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let units: Vec<Vec<u8>> = (0..rng.gen_range(2..25))
            .map(|_| (0..rng.gen_range(0..5)).map(|_| rng.gen_range(0..4u8)).collect())
            .collect();
        let mut perm: Vec<u8> = (0..4).collect();
        perm.shuffle(&mut rng);
        let renamed: Vec<Vec<u8>> = units.iter().map(|u| u.iter().map(|v| perm[*v as usize]).collect()).collect();
        match (nominal_alpha(&units), nominal_alpha(&renamed)) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
            (a, b) => prop_assert_eq!(a, b),
        }
    }
}
