use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::alpha::{krippendorff_alpha, AlphaInput};
use super::{EmotionLabel, GoldEmotion, PairKind, ParallelRecord, SpecificityAssessment};
use crate::specificity::{CaseTag, SpecificityVerdict};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A percentage held in exact tenths, rounded half-up (away from zero for
/// negative differences).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Percent {
    tenths: i64,
}

impl Percent {
    pub fn from_tenths(tenths: i64) -> Self {
        Percent { tenths }
    }

    pub fn tenths(self) -> i64 {
        self.tenths
    }

    /// `count / total` as a percentage; zero when `total` is zero.
    pub fn of(count: u64, total: u64) -> Self {
        Self::ratio(count as i128 * 1000, total as i128)
    }

    /// `a/ta - b/tb` in percentage points, or `None` if either total is zero.
    pub fn difference(a: u64, ta: u64, b: u64, tb: u64) -> Option<Self> {
        if ta == 0 || tb == 0 {
            return None;
        }
        let num = (a as i128 * tb as i128 - b as i128 * ta as i128) * 1000;
        Some(Self::ratio(num, ta as i128 * tb as i128))
    }

    fn ratio(num: i128, den: i128) -> Self {
        if den == 0 {
            return Percent::default();
        }
        let magnitude = (2 * num.abs() + den) / (2 * den);
        Percent {
            tenths: (num.signum() * magnitude) as i64,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.tenths as f64 / 10.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.tenths < 0 { "-" } else { "" };
        let abs = self.tenths.unsigned_abs();
        write!(f, "{sign}{}.{}", abs / 10, abs % 10)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        Ok(Percent::from_tenths((x * 10.0).round() as i64))
    }
}

/// A count with its share of some total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Share {
    pub count: u64,
    pub percent: Percent,
}

impl Share {
    pub fn of(count: u64, total: u64) -> Self {
        Share {
            count,
            percent: Percent::of(count, total),
        }
    }
}

impl fmt::Display for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}%)", self.count, self.percent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SpecificityDistribution {
    pub more_specific: Share,
    pub more_general: Share,
    pub same_level: Share,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CaseSplit {
    pub direct_relation: Share,
    pub common_hypernym: Share,
}

/// One emotion row of the specificity cross-tab; shares are of the whole table.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CrossTabRow {
    pub more_specific: Share,
    pub more_general: Share,
    pub same_level: Share,
}

/// Metaphor emotion (rows) against metaphor specificity (columns) over valid,
/// labelled metaphor/literal pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CrossTab {
    pub total: u64,
    pub more_emotional: CrossTabRow,
    pub less_or_same_emotional: CrossTabRow,
    /// Unmerged rows keyed by the gold label.
    pub full: BTreeMap<EmotionLabel, CrossTabRow>,
    /// Valid pairs left out because they have no adjudicated emotion label.
    pub unlabeled: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConditionalRates {
    /// Share of more-specific metaphors that are more emotional.
    pub emotional_given_specific: Option<Percent>,
    /// Share of more-emotional metaphors that are more specific.
    pub specific_given_emotional: Option<Percent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmotionDistribution {
    pub total: u64,
    pub first: Share,
    pub second: Share,
    pub same: Share,
    pub unadjudicated: u64,
    pub unlabeled: u64,
}

impl EmotionDistribution {
    pub fn share(&self, label: EmotionLabel) -> Share {
        match label {
            EmotionLabel::FirstMoreEmotional => self.first,
            EmotionLabel::SecondMoreEmotional => self.second,
            EmotionLabel::SimilarlyEmotional => self.same,
        }
    }
}

/// Change from metaphor-vs-literal to metaphor-vs-same-specificity-literal,
/// in percentage points.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LiteralDeltas {
    pub more: Option<Percent>,
    pub less: Option<Percent>,
    pub similar: Option<Percent>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AlphaSummary {
    pub value: Option<f64>,
    pub error: Option<String>,
    pub annotators: usize,
    pub items: usize,
}

impl AlphaSummary {
    pub fn for_kind(records: &[ParallelRecord], kind: PairKind) -> Self {
        let input = AlphaInput::from_records(records, kind);
        let result = krippendorff_alpha(&input);
        AlphaSummary {
            value: result.as_ref().ok().copied(),
            error: result.err().map(|e| e.to_string()),
            annotators: input.annotators().len(),
            items: input.items().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub wordnet_release: Option<String>,
    pub n_total: u64,
    pub n_valid: u64,
    pub n_invalid: u64,
    pub n_unassessed: u64,
    pub invalid_reasons: BTreeMap<String, u64>,
    pub specificity_distribution: SpecificityDistribution,
    pub case_split: CaseSplit,
    pub cross_tab: CrossTab,
    pub conditional_rates: ConditionalRates,
    pub emotion_distribution: BTreeMap<PairKind, EmotionDistribution>,
    pub literal_deltas: LiteralDeltas,
    pub alpha_by_kind: BTreeMap<PairKind, AlphaSummary>,
}

fn column(verdict: SpecificityVerdict) -> Option<usize> {
    match verdict {
        SpecificityVerdict::FirstMoreSpecific => Some(0),
        SpecificityVerdict::SecondMoreSpecific => Some(1),
        SpecificityVerdict::SameLevel => Some(2),
        SpecificityVerdict::Incomparable => None,
    }
}

fn row(counts: [u64; 3], total: u64) -> CrossTabRow {
    CrossTabRow {
        more_specific: Share::of(counts[0], total),
        more_general: Share::of(counts[1], total),
        same_level: Share::of(counts[2], total),
    }
}

/// Computes every summary statistic. Specificity figures cover
/// metaphor/literal pairs only; emotion figures cover each pair kind.
pub fn compute_stats(records: &[ParallelRecord]) -> StatsReport {
    let metaphor_pairs: Vec<&ParallelRecord> = records
        .iter()
        .filter(|r| r.kind == PairKind::MetaphorVsLiteral)
        .collect();

    let mut invalid_reasons = BTreeMap::new();
    let mut n_unassessed = 0;
    let mut verdicts = [0u64; 3];
    let mut cases = [0u64; 2];
    // rows: first / second / same gold label
    let mut cells = [[0u64; 3]; 3];
    let mut unlabeled = 0;
    for r in &metaphor_pairs {
        match &r.specificity {
            None => n_unassessed += 1,
            Some(SpecificityAssessment::Invalid { reason, .. }) => {
                *invalid_reasons.entry(reason.tag().to_string()).or_insert(0) += 1;
            }
            Some(SpecificityAssessment::Valid(o)) => {
                let Some(col) = column(o.verdict) else { continue };
                verdicts[col] += 1;
                match o.evidence.case() {
                    CaseTag::DirectRelation => cases[0] += 1,
                    CaseTag::CommonHypernym => cases[1] += 1,
                    CaseTag::NoCommonHypernym => {}
                }
                match r.gold_label() {
                    Some(label) => {
                        let row = EmotionLabel::ALL.iter().position(|l| *l == label).expect("closed set");
                        cells[row][col] += 1;
                    }
                    None => unlabeled += 1,
                }
            }
        }
    }
    let n_valid: u64 = verdicts.iter().sum();
    let n_invalid: u64 = invalid_reasons.values().sum();

    let table_total: u64 = cells.iter().flatten().sum();
    let more_emotional = cells[0];
    let less_or_same: [u64; 3] = std::array::from_fn(|c| cells[1][c] + cells[2][c]);
    let cross_tab = CrossTab {
        total: table_total,
        more_emotional: row(more_emotional, table_total),
        less_or_same_emotional: row(less_or_same, table_total),
        full: EmotionLabel::ALL
            .iter()
            .enumerate()
            .map(|(i, l)| (*l, row(cells[i], table_total)))
            .collect(),
        unlabeled,
    };
    let specific_col = more_emotional[0] + less_or_same[0];
    let emotional_row: u64 = more_emotional.iter().sum();
    let conditional_rates = ConditionalRates {
        emotional_given_specific: (specific_col > 0).then(|| Percent::of(more_emotional[0], specific_col)),
        specific_given_emotional: (emotional_row > 0).then(|| Percent::of(more_emotional[0], emotional_row)),
    };

    let mut emotion_counts: BTreeMap<PairKind, ([u64; 3], u64, u64)> =
        PairKind::ALL.iter().map(|k| (*k, ([0; 3], 0, 0))).collect();
    for r in records {
        let entry = emotion_counts.get_mut(&r.kind).expect("all kinds present");
        match r.gold() {
            Some(GoldEmotion::Unadjudicated) => entry.1 += 1,
            None => entry.2 += 1,
            Some(g) => {
                let label = g.label().expect("adjudicated");
                entry.0[EmotionLabel::ALL.iter().position(|l| *l == label).expect("closed set")] += 1;
            }
        }
    }
    let emotion_distribution: BTreeMap<PairKind, EmotionDistribution> = emotion_counts
        .into_iter()
        .map(|(kind, (c, unadjudicated, unlabeled))| {
            let total = c.iter().sum();
            (
                kind,
                EmotionDistribution {
                    total,
                    first: Share::of(c[0], total),
                    second: Share::of(c[1], total),
                    same: Share::of(c[2], total),
                    unadjudicated,
                    unlabeled,
                },
            )
        })
        .collect();

    let base = &emotion_distribution[&PairKind::MetaphorVsLiteral];
    let same_spec = &emotion_distribution[&PairKind::MetaphorVsSameSpecificityLiteral];
    let delta = |l: EmotionLabel| {
        Percent::difference(
            same_spec.share(l).count,
            same_spec.total,
            base.share(l).count,
            base.total,
        )
    };
    let literal_deltas = LiteralDeltas {
        more: delta(EmotionLabel::FirstMoreEmotional),
        less: delta(EmotionLabel::SecondMoreEmotional),
        similar: delta(EmotionLabel::SimilarlyEmotional),
    };

    let alpha_by_kind = PairKind::ALL
        .iter()
        .map(|kind| (*kind, AlphaSummary::for_kind(records, *kind)))
        .collect();

    StatsReport {
        schema_version: REPORT_SCHEMA_VERSION,
        wordnet_release: None,
        n_total: metaphor_pairs.len() as u64,
        n_valid,
        n_invalid,
        n_unassessed,
        invalid_reasons,
        specificity_distribution: SpecificityDistribution {
            more_specific: Share::of(verdicts[0], n_valid),
            more_general: Share::of(verdicts[1], n_valid),
            same_level: Share::of(verdicts[2], n_valid),
        },
        case_split: CaseSplit {
            direct_relation: Share::of(cases[0], n_valid),
            common_hypernym: Share::of(cases[1], n_valid),
        },
        cross_tab,
        conditional_rates,
        emotion_distribution,
        literal_deltas,
        alpha_by_kind,
    }
}
