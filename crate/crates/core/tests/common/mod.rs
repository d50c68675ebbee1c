//! Random DAGs and brute-force reference answers shared by the integration
//! tests. Nothing here calls the library's hierarchy algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lexispec::hierarchy::HypernymGraph;
use lexispec::specificity::{CaseTag, SpecificityVerdict};
use lexispec::wordnet::{Pos, SynsetId};
use rand::seq::SliceRandom;
use rand::Rng;

pub struct RandomDag {
    pub ids: Vec<SynsetId>,
    /// (child, parent) index pairs
    pub edges: Vec<(usize, usize)>,
}

impl RandomDag {
    /// Up to `max_nodes` nodes and at most 1.5 edges per node. Acyclic because
    /// every edge points from a later node to an earlier one in a hidden
    /// random order; offsets are shuffled so id order says nothing about depth.
    pub fn generate<R: Rng>(rng: &mut R, max_nodes: usize) -> Self {
        let n = rng.gen_range(2..=max_nodes);
        let mut rank: Vec<usize> = (0..n).collect();
        rank.shuffle(rng);
        let max_edges = 3 * n / 2;
        let m = rng.gen_range(0..=max_edges);
        let mut edges = BTreeSet::new();
        for _ in 0..m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if rank[a] == rank[b] {
                continue;
            }
            let (child, parent) = if rank[a] > rank[b] { (a, b) } else { (b, a) };
            edges.insert((child, parent));
        }
        let mut offsets: BTreeSet<u64> = BTreeSet::new();
        while offsets.len() < n {
            offsets.insert(rng.gen_range(1..100_000_000));
        }
        let mut offsets: Vec<u64> = offsets.into_iter().collect();
        offsets.shuffle(rng);
        RandomDag {
            ids: offsets.into_iter().map(|o| SynsetId::new(Pos::Verb, o)).collect(),
            edges: edges.into_iter().collect(),
        }
    }

    pub fn graph(&self) -> HypernymGraph {
        HypernymGraph::from_edges(
            self.ids.iter().copied(),
            self.edges.iter().map(|&(c, p)| (self.ids[c], self.ids[p])),
        )
        .expect("generated graph is acyclic")
    }

    pub fn oracle(&self) -> Oracle<'_> {
        Oracle {
            dag: self,
            slot: self.ids.iter().enumerate().map(|(i, id)| (*id, i)).collect(),
            cache: BTreeMap::new(),
        }
    }
}

/// What the reference says about an ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub verdict: SpecificityVerdict,
    pub case: CaseTag,
    /// Hop count of the direct relation (chain length minus one).
    pub direct_hops: Option<u32>,
    /// Every lowest common hypernym with (hops from first, hops from second).
    pub lch: BTreeSet<(SynsetId, u32, u32)>,
    pub representative: Option<(SynsetId, u32, u32)>,
}

pub struct Oracle<'a> {
    dag: &'a RandomDag,
    slot: BTreeMap<SynsetId, usize>,
    cache: BTreeMap<usize, Vec<Option<u32>>>,
}

impl Oracle<'_> {
    /// Minimal upward hops from `from` to every node, by Bellman-Ford style
    /// relaxation over the full edge list until nothing changes.
    pub fn distances(&mut self, from: usize) -> &[Option<u32>] {
        let dag = self.dag;
        self.cache.entry(from).or_insert_with(|| {
            let mut d = vec![None; dag.ids.len()];
            d[from] = Some(0u32);
            loop {
                let mut changed = false;
                for &(c, p) in &dag.edges {
                    if let Some(dc) = d[c] {
                        if d[p].is_none_or(|dp| dc + 1 < dp) {
                            d[p] = Some(dc + 1);
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break d;
                }
            }
        })
    }

    pub fn hops(&mut self, from: SynsetId, to: SynsetId) -> Option<u32> {
        let (f, t) = (self.slot[&from], self.slot[&to]);
        self.distances(f)[t]
    }

    pub fn ancestors(&mut self, of: SynsetId) -> BTreeMap<SynsetId, u32> {
        let ids = self.dag.ids.clone();
        let f = self.slot[&of];
        self.distances(f)
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (ids[i], d)))
            .collect()
    }

    pub fn is_edge(&self, child: SynsetId, parent: SynsetId) -> bool {
        let (c, p) = (self.slot[&child], self.slot[&parent]);
        self.dag.edges.contains(&(c, p))
    }

    pub fn lch(&mut self, a: SynsetId, b: SynsetId) -> BTreeSet<(SynsetId, u32, u32)> {
        let up_a = self.ancestors(a);
        let up_b = self.ancestors(b);
        let common: Vec<(SynsetId, u32, u32)> = up_a
            .iter()
            .filter_map(|(id, da)| up_b.get(id).map(|db| (*id, *da, *db)))
            .collect();
        let Some(best) = common.iter().map(|c| c.1 + c.2).min() else {
            return BTreeSet::new();
        };
        common.into_iter().filter(|c| c.1 + c.2 == best).collect()
    }

    pub fn compare(&mut self, a: SynsetId, b: SynsetId) -> Expected {
        let direct = |verdict, hops| Expected {
            verdict,
            case: CaseTag::DirectRelation,
            direct_hops: Some(hops),
            lch: BTreeSet::new(),
            representative: None,
        };
        if a == b {
            return direct(SpecificityVerdict::SameLevel, 0);
        }
        if let Some(h) = self.hops(b, a) {
            return direct(SpecificityVerdict::SecondMoreSpecific, h);
        }
        if let Some(h) = self.hops(a, b) {
            return direct(SpecificityVerdict::FirstMoreSpecific, h);
        }
        let lch = self.lch(a, b);
        // most lopsided split first, then the smallest id
        let representative = lch
            .iter()
            .copied()
            .max_by(|x, y| x.1.abs_diff(x.2).cmp(&y.1.abs_diff(y.2)).then_with(|| y.0.cmp(&x.0)));
        let (verdict, case) = match representative {
            None => (SpecificityVerdict::Incomparable, CaseTag::NoCommonHypernym),
            Some((_, da, db)) if da > db => (SpecificityVerdict::FirstMoreSpecific, CaseTag::CommonHypernym),
            Some((_, da, db)) if da < db => (SpecificityVerdict::SecondMoreSpecific, CaseTag::CommonHypernym),
            Some(_) => (SpecificityVerdict::SameLevel, CaseTag::CommonHypernym),
        };
        Expected {
            verdict,
            case,
            direct_hops: None,
            lch,
            representative,
        }
    }
}

/// Pairs to probe: uniform pairs mixed with ancestor/descendant pairs and
/// pairs that share a parent, so every case shows up often.
pub fn sample_pairs<R: Rng>(rng: &mut R, dag: &RandomDag, count: usize) -> Vec<(SynsetId, SynsetId)> {
    let n = dag.ids.len();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let pick = rng.gen_range(0..4);
        let pair = match pick {
            0 if !dag.edges.is_empty() => {
                let (c, p) = dag.edges[rng.gen_range(0..dag.edges.len())];
                (c, p)
            }
            1 if dag.edges.len() >= 2 => {
                let (c1, p) = dag.edges[rng.gen_range(0..dag.edges.len())];
                let siblings: Vec<usize> = dag.edges.iter().filter(|e| e.1 == p).map(|e| e.0).collect();
                (c1, siblings[rng.gen_range(0..siblings.len())])
            }
            _ => (rng.gen_range(0..n), rng.gen_range(0..n)),
        };
        let pair = if rng.gen_bool(0.5) { pair } else { (pair.1, pair.0) };
        out.push((dag.ids[pair.0], dag.ids[pair.1]));
    }
    out
}

/// Checks one library outcome against the reference; returns a description
/// of the first disagreement.
pub fn check_outcome(g: &HypernymGraph, oracle: &mut Oracle<'_>, a: SynsetId, b: SynsetId) -> Result<(), String> {
    use lexispec::specificity::{compare_specificity, SpecificityEvidence};
    let expected = oracle.compare(a, b);
    let got = compare_specificity(g, a, b).map_err(|e| format!("{a} vs {b}: error {e}"))?;
    if got.verdict != expected.verdict || got.evidence.case() != expected.case {
        return Err(format!(
            "{a} vs {b}: got {:?}/{:?}, expected {:?}/{:?}",
            got.verdict,
            got.evidence.case(),
            expected.verdict,
            expected.case
        ));
    }
    match &got.evidence {
        SpecificityEvidence::DirectRelation { chain } => {
            let hops = expected.direct_hops.expect("direct case");
            if chain.len() as u32 != hops + 1 {
                return Err(format!("{a} vs {b}: chain {chain:?} is not {hops} hops"));
            }
            for w in chain.windows(2) {
                if !oracle.is_edge(w[0], w[1]) {
                    return Err(format!("{a} vs {b}: chain step {} -> {} is not an edge", w[0], w[1]));
                }
            }
            let ends = (chain.first().copied(), chain.last().copied());
            let allowed = [(Some(a), Some(b)), (Some(b), Some(a))];
            if !allowed.contains(&ends) {
                return Err(format!("{a} vs {b}: chain {chain:?} does not join the pair"));
            }
        }
        SpecificityEvidence::CommonHypernym { lch, representative } => {
            let got_lch: BTreeSet<(SynsetId, u32, u32)> = lch
                .iter()
                .map(|c| (c.ancestor, c.hops_first.0, c.hops_second.0))
                .collect();
            if got_lch != expected.lch {
                return Err(format!("{a} vs {b}: lch {got_lch:?}, expected {:?}", expected.lch));
            }
            let rep = (
                representative.ancestor,
                representative.hops_first.0,
                representative.hops_second.0,
            );
            if Some(rep) != expected.representative {
                return Err(format!(
                    "{a} vs {b}: representative {rep:?}, expected {:?}",
                    expected.representative
                ));
            }
        }
        SpecificityEvidence::NoCommonHypernym => {}
    }
    Ok(())
}

/// Nominal alpha straight from its pairwise definition: observed disagreement
/// over ordered pairs within units, expected disagreement over ordered pairs
/// of all pairable values.
pub fn alpha_by_definition<L: PartialEq>(units: &[Vec<L>]) -> f64 {
    let pairable: Vec<&Vec<L>> = units.iter().filter(|u| u.len() >= 2).collect();
    let values: Vec<&L> = pairable.iter().flat_map(|u| u.iter()).collect();
    let n = values.len() as f64;
    let mut observed = 0.0;
    for u in &pairable {
        let m = u.len() as f64;
        for (i, x) in u.iter().enumerate() {
            for (j, y) in u.iter().enumerate() {
                if i != j && x != y {
                    observed += 1.0 / (m - 1.0);
                }
            }
        }
    }
    observed /= n;
    let mut expected = 0.0;
    for (i, x) in values.iter().enumerate() {
        for (j, y) in values.iter().enumerate() {
            if i != j && x != y {
                expected += 1.0;
            }
        }
    }
    expected /= n * (n - 1.0);
    1.0 - observed / expected
}

pub fn fixture_dir() -> std::path::PathBuf {
    // the acceptance crate borrows this module and the core fixtures
    let here = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let local = here.join("fixtures");
    if local.is_dir() {
        local
    } else {
        here.join("../core/fixtures")
    }
}

/// A record with a ready-made specificity verdict and a provided gold label,
/// for exercising the statistics without a hierarchy.
pub fn synthetic_record(
    id: usize,
    kind: lexispec::corpus::PairKind,
    verdict: Option<(SpecificityVerdict, CaseTag)>,
    gold: Option<lexispec::corpus::EmotionLabel>,
) -> lexispec::corpus::ParallelRecord {
    use lexispec::corpus::{ParallelRecord, SpecificityAssessment};
    use lexispec::specificity::{SpecificityEvidence, SpecificityOutcome};
    let mut r = ParallelRecord::new(
        format!("s{id:04}"),
        kind,
        "first.v.01".parse().unwrap(),
        "first sentence",
        "second.v.01".parse().unwrap(),
        "second sentence",
    );
    r.provided_gold = gold;
    r.specificity = verdict.map(|(verdict, case)| {
        let evidence = match case {
            CaseTag::DirectRelation => SpecificityEvidence::DirectRelation { chain: Vec::new() },
            CaseTag::CommonHypernym => {
                let c = lexispec::hierarchy::CommonHypernym {
                    ancestor: SynsetId::new(Pos::Verb, 1),
                    hops_first: lexispec::hierarchy::HopDistance(1),
                    hops_second: lexispec::hierarchy::HopDistance(1),
                };
                SpecificityEvidence::CommonHypernym {
                    lch: vec![c],
                    representative: c,
                }
            }
            CaseTag::NoCommonHypernym => SpecificityEvidence::NoCommonHypernym,
        };
        SpecificityAssessment::Valid(SpecificityOutcome { verdict, evidence })
    });
    r
}

/// Records whose cells reproduce given counts.
///
/// `cross_tab` is `[[more emotional: specific, general, same], [less or
/// similarly emotional: ...]]` for metaphor/literal pairs; `emotion` gives
/// (first, second, same) gold counts for pairs of each listed kind that carry
/// no specificity.
pub fn seeded_corpus(
    cross_tab: [[usize; 3]; 2],
    emotion: &[(lexispec::corpus::PairKind, [usize; 3])],
) -> Vec<lexispec::corpus::ParallelRecord> {
    use lexispec::corpus::{EmotionLabel, PairKind};
    let verdicts = [
        SpecificityVerdict::FirstMoreSpecific,
        SpecificityVerdict::SecondMoreSpecific,
        SpecificityVerdict::SameLevel,
    ];
    let mut out = Vec::new();
    for (row, counts) in cross_tab.iter().enumerate() {
        for (col, &n) in counts.iter().enumerate() {
            for i in 0..n {
                // the lower row mixes "second" and "same" gold labels
                let gold = match (row, i % 2) {
                    (0, _) => EmotionLabel::FirstMoreEmotional,
                    (_, 0) => EmotionLabel::SecondMoreEmotional,
                    _ => EmotionLabel::SimilarlyEmotional,
                };
                out.push(synthetic_record(
                    out.len(),
                    PairKind::MetaphorVsLiteral,
                    Some((verdicts[col], CaseTag::DirectRelation)),
                    Some(gold),
                ));
            }
        }
    }
    for (kind, counts) in emotion {
        for (label, &n) in EmotionLabel::ALL.iter().zip(counts) {
            for _ in 0..n {
                out.push(synthetic_record(out.len(), *kind, None, Some(*label)));
            }
        }
    }
    out
}
