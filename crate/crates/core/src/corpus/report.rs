use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::{CrossTabRow, Percent, Share, StatsReport};
use super::{EmotionLabel, PairKind, ParallelRecord, SpecificityAssessment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format {other:?} (expected text or json)")),
        }
    }
}

pub fn render_report(report: &StatsReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(report),
    }
}

fn delta(p: Option<Percent>) -> String {
    match p {
        None => "n/a".to_string(),
        Some(p) if p.tenths() > 0 => format!("↑ {p}%"),
        Some(p) if p.tenths() < 0 => format!("↓ {}%", Percent::from_tenths(-p.tenths())),
        Some(p) => format!("± {p}%"),
    }
}

fn opt_percent(p: Option<Percent>) -> String {
    p.map_or("n/a".to_string(), |p| format!("{p}%"))
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let cols = header.len();
    let width: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let mut s = String::from(" ");
        for (c, cell) in cells.iter().enumerate() {
            let pad = width[c] - cell.chars().count();
            s.push(' ');
            s.push_str(cell);
            if c + 1 < cols {
                s.push_str(&" ".repeat(pad + 2));
            }
        }
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(header.to_vec()));
    for r in rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
}

fn tab_row(label: &str, r: &CrossTabRow) -> Vec<String> {
    vec![
        label.to_string(),
        r.more_specific.to_string(),
        r.more_general.to_string(),
        r.same_level.to_string(),
    ]
}

fn render_text(r: &StatsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "WordNet release: {}",
        r.wordnet_release.as_deref().unwrap_or("unknown")
    );
    let reasons = if r.invalid_reasons.is_empty() {
        String::new()
    } else {
        let list: Vec<String> = r.invalid_reasons.iter().map(|(k, v)| format!("{k} {v}")).collect();
        format!(" ({})", list.join(", "))
    };
    let _ = writeln!(
        out,
        "Metaphor/literal pairs: {} total, {} valid, {} invalid{}, {} unassessed",
        r.n_total, r.n_valid, r.n_invalid, reasons, r.n_unassessed
    );

    out.push_str("\nMetaphor specificity over valid pairs\n");
    let d = &r.specificity_distribution;
    let c = &r.case_split;
    table(
        &mut out,
        &["", "pairs"],
        &[
            vec!["more specific".into(), d.more_specific.to_string()],
            vec!["more general".into(), d.more_general.to_string()],
            vec!["same level".into(), d.same_level.to_string()],
            vec!["direct relation".into(), c.direct_relation.to_string()],
            vec!["common hypernym".into(), c.common_hypernym.to_string()],
        ],
    );

    let t = &r.cross_tab;
    let _ = writeln!(
        out,
        "\nMetaphor emotion by metaphor specificity ({} labelled valid pairs, {} unlabelled)",
        t.total, t.unlabeled
    );
    table(
        &mut out,
        &["", "more specific", "more general", "same level"],
        &[
            tab_row("more emotional", &t.more_emotional),
            tab_row("less or similarly emotional", &t.less_or_same_emotional),
        ],
    );
    let _ = writeln!(
        out,
        "  more emotional given more specific: {}",
        opt_percent(r.conditional_rates.emotional_given_specific)
    );
    let _ = writeln!(
        out,
        "  more specific given more emotional: {}",
        opt_percent(r.conditional_rates.specific_given_emotional)
    );

    out.push_str("\nEmotion judgements by pair kind\n");
    let dist = |k: PairKind| r.emotion_distribution.get(&k).cloned().unwrap_or_default();
    let (base, same_spec, literal) = (
        dist(PairKind::MetaphorVsLiteral),
        dist(PairKind::MetaphorVsSameSpecificityLiteral),
        dist(PairKind::LiteralVsMoreSpecificLiteral),
    );
    let with_delta = |s: Share, p: Option<Percent>| format!("{} ({}%, {})", s.count, s.percent, delta(p));
    let deltas = &r.literal_deltas;
    let rows = [
        ("first more emotional", EmotionLabel::FirstMoreEmotional, deltas.more),
        ("second more emotional", EmotionLabel::SecondMoreEmotional, deltas.less),
        ("similarly emotional", EmotionLabel::SimilarlyEmotional, deltas.similar),
    ]
    .map(|(label, l, p)| {
        vec![
            label.to_string(),
            base.share(l).to_string(),
            with_delta(same_spec.share(l), p),
            literal.share(l).to_string(),
        ]
    });
    let mut rows = rows.to_vec();
    rows.push(vec![
        "labelled / unadjudicated".into(),
        format!("{} / {}", base.total, base.unadjudicated),
        format!("{} / {}", same_spec.total, same_spec.unadjudicated),
        format!("{} / {}", literal.total, literal.unadjudicated),
    ]);
    table(
        &mut out,
        &[
            "",
            PairKind::MetaphorVsLiteral.as_str(),
            PairKind::MetaphorVsSameSpecificityLiteral.as_str(),
            PairKind::LiteralVsMoreSpecificLiteral.as_str(),
        ],
        &rows,
    );

    out.push_str("\nInter-annotator agreement (nominal Krippendorff's alpha)\n");
    for (kind, a) in &r.alpha_by_kind {
        let value = match (&a.value, &a.error) {
            (Some(v), _) => format!("{v:.3}"),
            (None, Some(e)) => e.clone(),
            (None, None) => "n/a".to_string(),
        };
        let _ = writeln!(
            out,
            "  {kind}: {value} ({} annotators, {} items)",
            a.annotators, a.items
        );
    }
    out
}

/// One line per record with its verdict, evidence case and gold emotion.
pub fn render_audit(records: &[ParallelRecord]) -> String {
    let mut out = String::from("# record_id\tkind\tterm1\tterm2\tverdict\tcase\tgold\n");
    for r in records {
        let (verdict, case) = match &r.specificity {
            None => ("unassessed".to_string(), "-".to_string()),
            Some(SpecificityAssessment::Valid(o)) => (o.verdict.to_string(), o.evidence.case().to_string()),
            Some(SpecificityAssessment::Invalid { reason, .. }) => ("invalid".to_string(), reason.tag().to_string()),
        };
        let gold = r.gold_label().map_or("-".to_string(), |l| l.to_string());
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.record_id, r.kind, r.term1, r.term2, verdict, case, gold
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::compute_stats;

    #[test]
    fn empty_report_renders() {
        let r = compute_stats(&[]);
        let text = render_report(&r, ReportFormat::Text);
        assert!(text.contains("0 total, 0 valid"));
        assert!(text.contains("0 (0.0%)"));
        let json = render_report(&r, ReportFormat::Json);
        let back: StatsReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn delta_arrows() {
        assert_eq!(delta(Some(Percent::from_tenths(-436))), "↓ 43.6%");
        assert_eq!(delta(Some(Percent::from_tenths(120))), "↑ 12.0%");
        assert_eq!(delta(Some(Percent::from_tenths(0))), "± 0.0%");
        assert_eq!(delta(None), "n/a");
    }
}
