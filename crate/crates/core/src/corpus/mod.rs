//! Parallel sentence-pair corpora and the statistics computed over them.

mod alpha;
mod report;
mod stats;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::HypernymGraph;
use crate::specificity::{compare_specificity, SpecificityOutcome, SpecificityVerdict};
use crate::wordnet::{LexicalDatabase, SenseKey};

pub use alpha::{krippendorff_alpha, nominal_alpha, AlphaError, AlphaInput};
pub use report::{render_audit, render_report, ReportFormat};
pub use stats::{
    compute_stats, AlphaSummary, CaseSplit, ConditionalRates, CrossTab, CrossTabRow, EmotionDistribution,
    LiteralDeltas, Percent, Share, SpecificityDistribution, StatsReport, REPORT_SCHEMA_VERSION,
};

/// Which of the three comparison experiments a pair belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    MetaphorVsLiteral,
    MetaphorVsSameSpecificityLiteral,
    LiteralVsMoreSpecificLiteral,
}

impl PairKind {
    pub const ALL: [PairKind; 3] = [
        PairKind::MetaphorVsLiteral,
        PairKind::MetaphorVsSameSpecificityLiteral,
        PairKind::LiteralVsMoreSpecificLiteral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PairKind::MetaphorVsLiteral => "metaphor_vs_literal",
            PairKind::MetaphorVsSameSpecificityLiteral => "metaphor_vs_same_specificity_literal",
            PairKind::LiteralVsMoreSpecificLiteral => "literal_vs_more_specific_literal",
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PairKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PairKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown pair kind {s:?}"))
    }
}

/// Which sentence of a pair a judge found more emotional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EmotionLabel {
    #[serde(rename = "first")]
    FirstMoreEmotional,
    #[serde(rename = "second")]
    SecondMoreEmotional,
    #[serde(rename = "same")]
    SimilarlyEmotional,
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; 3] = [
        EmotionLabel::FirstMoreEmotional,
        EmotionLabel::SecondMoreEmotional,
        EmotionLabel::SimilarlyEmotional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmotionLabel::FirstMoreEmotional => "first",
            EmotionLabel::SecondMoreEmotional => "second",
            EmotionLabel::SimilarlyEmotional => "same",
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmotionLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EmotionLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown emotion label {s:?} (expected first, second or same)"))
    }
}

/// The adjudicated emotion label of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "label", rename_all = "snake_case")]
pub enum GoldEmotion {
    /// Strict majority of the annotator labels.
    Majority(EmotionLabel),
    /// Supplied by the corpus file for a pair without annotator labels.
    Provided(EmotionLabel),
    /// Annotators split with no strict majority.
    Unadjudicated,
}

impl GoldEmotion {
    pub fn label(self) -> Option<EmotionLabel> {
        match self {
            GoldEmotion::Majority(l) | GoldEmotion::Provided(l) => Some(l),
            GoldEmotion::Unadjudicated => None,
        }
    }
}

/// Strict-majority label, or `None` when no label has more than half the votes.
pub fn majority_label<'a>(labels: impl IntoIterator<Item = &'a EmotionLabel>) -> Option<EmotionLabel> {
    let mut counts: BTreeMap<EmotionLabel, usize> = BTreeMap::new();
    let mut total = 0;
    for l in labels {
        *counts.entry(*l).or_default() += 1;
        total += 1;
    }
    counts.into_iter().find(|(_, c)| 2 * c > total).map(|(l, _)| l)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum InvalidReason {
    Unresolvable { term: String, detail: String },
    NoCommonHypernym,
    CrossPos,
}

impl InvalidReason {
    /// Stable snake_case name used as a report key.
    pub fn tag(&self) -> &'static str {
        match self {
            InvalidReason::Unresolvable { .. } => "unresolvable",
            InvalidReason::NoCommonHypernym => "no_common_hypernym",
            InvalidReason::CrossPos => "cross_pos",
        }
    }
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::Unresolvable { term, detail } => write!(f, "unresolvable {term}: {detail}"),
            InvalidReason::NoCommonHypernym => f.write_str("no common hypernym"),
            InvalidReason::CrossPos => f.write_str("terms belong to different parts of speech"),
        }
    }
}

/// Outcome of attaching hierarchy evidence to a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpecificityAssessment {
    Valid(SpecificityOutcome),
    Invalid {
        reason: InvalidReason,
        #[serde(skip_serializing_if = "Option::is_none")]
        outcome: Option<SpecificityOutcome>,
    },
}

impl SpecificityAssessment {
    pub fn verdict(&self) -> Option<SpecificityVerdict> {
        match self {
            SpecificityAssessment::Valid(o) => Some(o.verdict),
            SpecificityAssessment::Invalid { .. } => None,
        }
    }
}

/// One sentence pair. `term1`/`sentence1` is the metaphor in the metaphor
/// experiments and the more general literal in the literal experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelRecord {
    pub record_id: String,
    pub kind: PairKind,
    pub term1: SenseKey,
    pub sentence1: String,
    pub term2: SenseKey,
    pub sentence2: String,
    pub annotator_labels: BTreeMap<String, EmotionLabel>,
    pub provided_gold: Option<EmotionLabel>,
    pub specificity: Option<SpecificityAssessment>,
}

impl ParallelRecord {
    pub fn new(
        record_id: impl Into<String>,
        kind: PairKind,
        term1: SenseKey,
        sentence1: impl Into<String>,
        term2: SenseKey,
        sentence2: impl Into<String>,
    ) -> Self {
        ParallelRecord {
            record_id: record_id.into(),
            kind,
            term1,
            sentence1: sentence1.into(),
            term2,
            sentence2: sentence2.into(),
            annotator_labels: BTreeMap::new(),
            provided_gold: None,
            specificity: None,
        }
    }

    pub fn gold(&self) -> Option<GoldEmotion> {
        if self.annotator_labels.is_empty() {
            return self.provided_gold.map(GoldEmotion::Provided);
        }
        Some(match majority_label(self.annotator_labels.values()) {
            Some(l) => GoldEmotion::Majority(l),
            None => GoldEmotion::Unadjudicated,
        })
    }

    pub fn gold_label(&self) -> Option<EmotionLabel> {
        self.gold().and_then(GoldEmotion::label)
    }

    pub fn is_valid(&self) -> bool {
        matches!(self.specificity, Some(SpecificityAssessment::Valid(_)))
    }

    /// Renders the record as one corpus-file line (without newline).
    pub fn to_corpus_line(&self) -> String {
        let labels = if self.annotator_labels.is_empty() {
            "-".to_string()
        } else {
            self.annotator_labels
                .iter()
                .map(|(a, l)| format!("{a}={l}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        let gold = self.gold_label().map_or("-".to_string(), |l| l.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.record_id, self.kind, self.term1, self.sentence1, self.term2, self.sentence2, labels, gold
        )
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: duplicate record id {id:?}")]
    DuplicateRecordId { line: usize, id: String },
    #[error("reading {}: {source}", .path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub const CORPUS_HEADER: &str = "# record_id\tkind\tterm1\tsentence1\tterm2\tsentence2\tannotator_labels\tgold_emotion";

pub fn load_corpus(path: &Path) -> Result<Vec<ParallelRecord>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&text)
}

pub fn parse_corpus(text: &str) -> Result<Vec<ParallelRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let record = parse_record(raw).map_err(|reason| CorpusError::MalformedRecord { line, reason })?;
        if !seen.insert(record.record_id.clone()) {
            return Err(CorpusError::DuplicateRecordId {
                line,
                id: record.record_id,
            });
        }
        records.push(record);
    }
    Ok(records)
}

fn parse_record(raw: &str) -> Result<ParallelRecord, String> {
    let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
    if cols.len() != 8 {
        return Err(format!("expected 8 tab-separated fields, found {}", cols.len()));
    }
    fn optional(s: &str) -> Option<&str> {
        (s != "-" && !s.is_empty()).then_some(s)
    }
    let id = cols[0];
    if id.is_empty() || id == "-" {
        return Err("empty record id".into());
    }
    let kind: PairKind = cols[1].parse()?;
    let term = |s: &str| s.parse::<SenseKey>().map_err(|e| e.to_string());
    let (term1, term2) = (term(cols[2])?, term(cols[4])?);
    if cols[3].is_empty() || cols[5].is_empty() {
        return Err("empty sentence".into());
    }
    let mut record = ParallelRecord::new(id, kind, term1, cols[3], term2, cols[5]);
    if let Some(labels) = optional(cols[6]) {
        for item in labels.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (annotator, label) = item
                .split_once('=')
                .ok_or_else(|| format!("annotator label {item:?} is not annotator=label"))?;
            let annotator = annotator.trim();
            if annotator.is_empty() {
                return Err(format!("annotator label {item:?} has no annotator"));
            }
            if record
                .annotator_labels
                .insert(annotator.to_string(), label.trim().parse()?)
                .is_some()
            {
                return Err(format!("annotator {annotator:?} labels the record twice"));
            }
        }
    }
    if let Some(gold) = optional(cols[7]) {
        let gold: EmotionLabel = gold.parse()?;
        if record.annotator_labels.is_empty() {
            record.provided_gold = Some(gold);
        } else if record.gold_label() != Some(gold) {
            return Err(format!(
                "gold emotion {gold} is not the strict majority of the annotator labels"
            ));
        }
    }
    Ok(record)
}

/// Compares each record's two senses and stores the verdict or the reason the
/// pair is invalid.
pub fn attach_specificity(records: &mut [ParallelRecord], db: &LexicalDatabase, g: &HypernymGraph) {
    for r in records.iter_mut() {
        r.specificity = Some(assess(r, db, g));
    }
}

fn assess(r: &ParallelRecord, db: &LexicalDatabase, g: &HypernymGraph) -> SpecificityAssessment {
    let resolve = |key: &SenseKey| {
        db.resolve_sense_key(key)
            .map_err(|e| e.to_string())
            .and_then(|id| {
                if g.contains(id) {
                    Ok(id)
                } else {
                    Err(format!("{id} is not in the hierarchy"))
                }
            })
            .map_err(|detail| SpecificityAssessment::Invalid {
                reason: InvalidReason::Unresolvable {
                    term: key.to_string(),
                    detail,
                },
                outcome: None,
            })
    };
    let (a, b) = match (resolve(&r.term1), resolve(&r.term2)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return e,
    };
    match compare_specificity(g, a, b) {
        Ok(o) if o.verdict == SpecificityVerdict::Incomparable => SpecificityAssessment::Invalid {
            reason: InvalidReason::NoCommonHypernym,
            outcome: Some(o),
        },
        Ok(o) => SpecificityAssessment::Valid(o),
        Err(crate::hierarchy::HierarchyError::PosMismatch { .. }) => SpecificityAssessment::Invalid {
            reason: InvalidReason::CrossPos,
            outcome: None,
        },
        Err(e) => SpecificityAssessment::Invalid {
            reason: InvalidReason::Unresolvable {
                term: format!("{} / {}", r.term1, r.term2),
                detail: e.to_string(),
            },
            outcome: None,
        },
    }
}

/// Attaches specificity to a copy of `records` and summarises it, stamping
/// the database release into the report.
pub fn analyze(
    records: &[ParallelRecord],
    db: &LexicalDatabase,
    g: &HypernymGraph,
) -> (Vec<ParallelRecord>, StatsReport) {
    let mut records = records.to_vec();
    attach_specificity(&mut records, db, g);
    let mut report = compute_stats(&records);
    report.wordnet_release = db.release().map(str::to_string);
    (records, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = "r1\tmetaphor_vs_literal\trip.v.04\tThe candidate ripped into his opponent mercilessly.\tcriticize.v.01\tThe candidate criticized his opponent mercilessly.\ta1=first;a2=first;a3=same\tfirst";

    #[test]
    fn parses_full_record() {
        let r = parse_corpus(LINE).unwrap().remove(0);
        assert_eq!(r.kind, PairKind::MetaphorVsLiteral);
        assert_eq!(r.term1.to_string(), "rip.v.04");
        assert_eq!(r.annotator_labels.len(), 3);
        assert_eq!(r.gold(), Some(GoldEmotion::Majority(EmotionLabel::FirstMoreEmotional)));
        assert_eq!(r.to_corpus_line(), LINE);
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        assert!(parse_corpus("").unwrap().is_empty());
        assert!(parse_corpus(&format!("{CORPUS_HEADER}\n\n")).unwrap().is_empty());
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = parse_corpus(&format!("{LINE}\n{LINE}\n")).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateRecordId { line: 2, .. }), "{err}");
    }

    #[test]
    fn malformed_records() {
        let cases = [
            "r1\tmetaphor_vs_literal\trip.v.04\tA\tcriticize.v.01\tB\t-",
            "r1\tbogus\trip.v.04\tA\tcriticize.v.01\tB\t-\t-",
            "r1\tmetaphor_vs_literal\trip\tA\tcriticize.v.01\tB\t-\t-",
            "r1\tmetaphor_vs_literal\trip.v.04\t\tcriticize.v.01\tB\t-\t-",
            "r1\tmetaphor_vs_literal\trip.v.04\tA\tcriticize.v.01\tB\ta1=loud\t-",
            "r1\tmetaphor_vs_literal\trip.v.04\tA\tcriticize.v.01\tB\ta1=first;a1=same\t-",
            "r1\tmetaphor_vs_literal\trip.v.04\tA\tcriticize.v.01\tB\ta1=first;a2=first\tsecond",
        ];
        for c in cases {
            assert!(
                matches!(parse_corpus(c), Err(CorpusError::MalformedRecord { line: 1, .. })),
                "{c}"
            );
        }
    }

    #[test]
    fn three_way_split_is_unadjudicated() {
        let line =
            "r1\tliteral_vs_more_specific_literal\tcriticize.v.01\tA\tattack.v.02\tB\ta1=first;a2=second;a3=same\t-";
        let r = parse_corpus(line).unwrap().remove(0);
        assert_eq!(r.gold(), Some(GoldEmotion::Unadjudicated));
        assert_eq!(r.gold_label(), None);
    }

    #[test]
    fn provided_gold_without_annotators() {
        let line = "pair-1\tmetaphor_vs_literal\trip.v.04\tA\tcriticize.v.01\tB\t-\tfirst";
        let r = parse_corpus(line).unwrap().remove(0);
        assert_eq!(r.gold(), Some(GoldEmotion::Provided(EmotionLabel::FirstMoreEmotional)));
    }

    #[test]
    fn majority_needs_more_than_half() {
        use EmotionLabel::*;
        assert_eq!(
            majority_label(&[FirstMoreEmotional, FirstMoreEmotional, SimilarlyEmotional]),
            Some(FirstMoreEmotional)
        );
        assert_eq!(majority_label(&[FirstMoreEmotional, SecondMoreEmotional]), None);
        assert_eq!(majority_label(&[]), None);
    }
}
