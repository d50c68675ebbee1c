//! Relative specificity of two synsets from their hierarchy positions.
//!
//! A direct relation (one synset is a hypernym ancestor of the other) decides
//! the comparison outright: the ancestor is more general. Otherwise both are
//! located under their lowest common hypernym and the one more hops below it
//! is the more specific.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::hierarchy::{CommonHypernym, HierarchyError, HypernymGraph};
use crate::wordnet::SynsetId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecificityVerdict {
    FirstMoreSpecific,
    SecondMoreSpecific,
    SameLevel,
    Incomparable,
}

impl SpecificityVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            SpecificityVerdict::FirstMoreSpecific => "first_more_specific",
            SpecificityVerdict::SecondMoreSpecific => "second_more_specific",
            SpecificityVerdict::SameLevel => "same_level",
            SpecificityVerdict::Incomparable => "incomparable",
        }
    }

    /// The verdict for the same pair with its members swapped.
    pub fn flipped(self) -> Self {
        match self {
            SpecificityVerdict::FirstMoreSpecific => SpecificityVerdict::SecondMoreSpecific,
            SpecificityVerdict::SecondMoreSpecific => SpecificityVerdict::FirstMoreSpecific,
            v => v,
        }
    }
}

impl fmt::Display for SpecificityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    DirectRelation,
    CommonHypernym,
    NoCommonHypernym,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::DirectRelation => "direct_relation",
            CaseTag::CommonHypernym => "common_hypernym",
            CaseTag::NoCommonHypernym => "no_common_hypernym",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why a verdict was reached.
///
/// `DirectRelation` carries the upward chain from the lower synset to the
/// higher one (a single element when both are the same synset).
/// `CommonHypernym` carries every lowest common hypernym plus the
/// representative that decided the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SpecificityEvidence {
    DirectRelation {
        chain: Vec<SynsetId>,
    },
    CommonHypernym {
        lch: Vec<CommonHypernym>,
        representative: CommonHypernym,
    },
    NoCommonHypernym,
}

impl SpecificityEvidence {
    pub fn case(&self) -> CaseTag {
        match self {
            SpecificityEvidence::DirectRelation { .. } => CaseTag::DirectRelation,
            SpecificityEvidence::CommonHypernym { .. } => CaseTag::CommonHypernym,
            SpecificityEvidence::NoCommonHypernym => CaseTag::NoCommonHypernym,
        }
    }

    pub fn ancestor_chain(&self) -> Option<&[SynsetId]> {
        match self {
            SpecificityEvidence::DirectRelation { chain } => Some(chain),
            _ => None,
        }
    }

    pub fn lch(&self) -> Option<&[CommonHypernym]> {
        match self {
            SpecificityEvidence::CommonHypernym { lch, .. } => Some(lch),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecificityOutcome {
    pub verdict: SpecificityVerdict,
    pub evidence: SpecificityEvidence,
}

/// Picks the deciding hypernym among equally low ones: the most lopsided hop
/// split wins, then the smallest id.
pub fn representative(lch: &[CommonHypernym]) -> Option<CommonHypernym> {
    lch.iter()
        .copied()
        .min_by_key(|c| (std::cmp::Reverse(c.hops_first.0.abs_diff(c.hops_second.0)), c.ancestor))
}

pub fn compare_specificity(g: &HypernymGraph, a: SynsetId, b: SynsetId) -> Result<SpecificityOutcome, HierarchyError> {
    if !g.contains(a) {
        return Err(HierarchyError::UnknownSynset(a));
    }
    if !g.contains(b) {
        return Err(HierarchyError::UnknownSynset(b));
    }
    if a.pos.file_pos() != b.pos.file_pos() {
        return Err(HierarchyError::PosMismatch { a, b });
    }
    if a == b {
        return Ok(SpecificityOutcome {
            verdict: SpecificityVerdict::SameLevel,
            evidence: SpecificityEvidence::DirectRelation { chain: vec![a] },
        });
    }
    if let Some(chain) = g.hypernym_chain(b, a)? {
        return Ok(SpecificityOutcome {
            verdict: SpecificityVerdict::SecondMoreSpecific,
            evidence: SpecificityEvidence::DirectRelation { chain },
        });
    }
    if let Some(chain) = g.hypernym_chain(a, b)? {
        return Ok(SpecificityOutcome {
            verdict: SpecificityVerdict::FirstMoreSpecific,
            evidence: SpecificityEvidence::DirectRelation { chain },
        });
    }
    let lch = g.lowest_common_hypernyms(a, b)?;
    let Some(rep) = representative(&lch) else {
        return Ok(SpecificityOutcome {
            verdict: SpecificityVerdict::Incomparable,
            evidence: SpecificityEvidence::NoCommonHypernym,
        });
    };
    let verdict = match rep.hops_first.cmp(&rep.hops_second) {
        std::cmp::Ordering::Greater => SpecificityVerdict::FirstMoreSpecific,
        std::cmp::Ordering::Less => SpecificityVerdict::SecondMoreSpecific,
        std::cmp::Ordering::Equal => SpecificityVerdict::SameLevel,
    };
    Ok(SpecificityOutcome {
        verdict,
        evidence: SpecificityEvidence::CommonHypernym {
            lch,
            representative: rep,
        },
    })
}

pub fn classify_case(g: &HypernymGraph, a: SynsetId, b: SynsetId) -> Result<CaseTag, HierarchyError> {
    compare_specificity(g, a, b).map(|o| o.evidence.case())
}

/// Sister terms of a metaphor's synset: literal paraphrase candidates at the same level.
pub fn same_specificity_candidates(
    g: &HypernymGraph,
    metaphor: SynsetId,
) -> Result<BTreeSet<SynsetId>, HierarchyError> {
    g.sister_terms(metaphor)
}

/// Direct hyponyms of a literal synset: more specific paraphrase candidates.
pub fn more_specific_candidates(g: &HypernymGraph, literal: SynsetId) -> Result<BTreeSet<SynsetId>, HierarchyError> {
    g.direct_hyponyms(literal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::HopDistance;
    use crate::wordnet::Pos;

    fn v(n: u64) -> SynsetId {
        SynsetId::new(Pos::Verb, n)
    }

    fn graph(n: u64, edges: &[(u64, u64)]) -> HypernymGraph {
        HypernymGraph::from_edges((1..=n).map(v), edges.iter().map(|&(c, p)| (v(c), v(p)))).unwrap()
    }

    #[test]
    fn direct_hypernym_makes_child_more_specific() {
        // literal 1 is the direct hypernym of metaphor 2
        let g = graph(2, &[(2, 1)]);
        let o = compare_specificity(&g, v(2), v(1)).unwrap();
        assert_eq!(o.verdict, SpecificityVerdict::FirstMoreSpecific);
        assert_eq!(
            o.evidence,
            SpecificityEvidence::DirectRelation {
                chain: vec![v(2), v(1)]
            }
        );
        let o = compare_specificity(&g, v(1), v(2)).unwrap();
        assert_eq!(o.verdict, SpecificityVerdict::SecondMoreSpecific);
    }

    #[test]
    fn two_hop_ancestor_is_direct_relation() {
        let g = graph(3, &[(3, 2), (2, 1)]);
        let o = compare_specificity(&g, v(3), v(1)).unwrap();
        assert_eq!(o.verdict, SpecificityVerdict::FirstMoreSpecific);
        assert_eq!(o.evidence.ancestor_chain(), Some(&[v(3), v(2), v(1)][..]));
    }

    #[test]
    fn lower_under_common_hypernym_is_more_specific() {
        let g = graph(5, &[(2, 1), (3, 1), (4, 3), (5, 3)]);
        let o = compare_specificity(&g, v(4), v(2)).unwrap();
        assert_eq!(o.verdict, SpecificityVerdict::FirstMoreSpecific);
        match o.evidence {
            SpecificityEvidence::CommonHypernym { representative, .. } => {
                assert_eq!(representative.ancestor, v(1));
                assert_eq!(
                    (representative.hops_first, representative.hops_second),
                    (HopDistance(2), HopDistance(1))
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_and_disjoint() {
        let g = graph(2, &[]);
        assert_eq!(
            compare_specificity(&g, v(1), v(1)).unwrap().verdict,
            SpecificityVerdict::SameLevel
        );
        let o = compare_specificity(&g, v(1), v(2)).unwrap();
        assert_eq!(o.verdict, SpecificityVerdict::Incomparable);
        assert_eq!(o.evidence.case(), CaseTag::NoCommonHypernym);
    }

    #[test]
    fn direct_relation_wins_over_other_common_ancestors() {
        // 3 -> 2 -> 1 and 3 -> 1: 2 is an ancestor of 3, and both also share 1
        let g = graph(3, &[(3, 2), (2, 1), (3, 1)]);
        assert_eq!(classify_case(&g, v(3), v(2)).unwrap(), CaseTag::DirectRelation);
    }

    #[test]
    fn tie_break_prefers_lopsided_split() {
        // a=5 sits 1 below X=1 and 3 below Y=2; b=6 sits 3 below X and 1 below Y
        // sums are both 4 with diff 2, so the smaller id (1) decides: hops (1, 3)
        let g = graph(10, &[(5, 1), (6, 7), (7, 8), (8, 1), (5, 9), (9, 10), (10, 2), (6, 2)]);
        let lch = g.lowest_common_hypernyms(v(5), v(6)).unwrap();
        assert_eq!(lch.len(), 2);
        let o = compare_specificity(&g, v(5), v(6)).unwrap();
        assert_eq!(o.verdict, SpecificityVerdict::SecondMoreSpecific);
        let back = compare_specificity(&g, v(6), v(5)).unwrap();
        assert_eq!(back.verdict, SpecificityVerdict::FirstMoreSpecific);
    }

    #[test]
    fn balanced_tie_loses_to_lopsided_one() {
        // X=1: hops (2, 2); Y=2: hops (1, 3). Both sum 4; Y is more lopsided.
        let g = graph(9, &[(3, 5), (5, 1), (4, 6), (6, 1), (3, 2), (4, 7), (7, 8), (8, 2)]);
        let o = compare_specificity(&g, v(3), v(4)).unwrap();
        assert_eq!(o.verdict, SpecificityVerdict::SecondMoreSpecific);
        match o.evidence {
            SpecificityEvidence::CommonHypernym { representative, lch } => {
                assert_eq!(lch.len(), 2);
                assert_eq!(representative.ancestor, v(2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cross_pos_rejected() {
        let n = SynsetId::new(Pos::Noun, 1);
        let g = HypernymGraph::from_edges([v(1), n], []).unwrap();
        assert!(matches!(
            compare_specificity(&g, v(1), n),
            Err(HierarchyError::PosMismatch { .. })
        ));
        assert!(matches!(
            compare_specificity(&g, v(1), v(7)),
            Err(HierarchyError::UnknownSynset(_))
        ));
    }

    #[test]
    fn sister_candidates_compare_same_level() {
        let g = graph(4, &[(2, 1), (3, 1), (4, 1)]);
        let c = same_specificity_candidates(&g, v(2)).unwrap();
        assert_eq!(c, BTreeSet::from([v(3), v(4)]));
        for s in c {
            assert_eq!(
                compare_specificity(&g, v(2), s).unwrap().verdict,
                SpecificityVerdict::SameLevel
            );
        }
        assert!(same_specificity_candidates(&g, v(1)).unwrap().is_empty());
    }

    #[test]
    fn hyponym_candidates_compare_more_specific() {
        let g = graph(3, &[(2, 1), (3, 2)]);
        for child in more_specific_candidates(&g, v(1)).unwrap() {
            assert_eq!(
                compare_specificity(&g, child, v(1)).unwrap().verdict,
                SpecificityVerdict::FirstMoreSpecific
            );
        }
        assert!(more_specific_candidates(&g, v(3)).unwrap().is_empty());
    }
}
