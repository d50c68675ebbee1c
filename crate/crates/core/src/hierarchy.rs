//! Graph algorithms over the hypernym DAG.
//!
//! Edges point upward (child to direct hypernym). The graph may be a forest:
//! WordNet verbs have many roots, so disjoint closures are an ordinary outcome
//! rather than an error.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wordnet::{LexicalDatabase, Pos, SynsetId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
    #[error("hypernym cycle detected: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> "))]
    CycleDetected(Vec<SynsetId>),
    #[error("{a} and {b} belong to different parts of speech")]
    PosMismatch { a: SynsetId, b: SynsetId },
}

/// Number of hypernym edges between two synsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HopDistance(pub u32);

impl fmt::Display for HopDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A shared ancestor with the minimal hop count from each query synset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CommonHypernym {
    pub ancestor: SynsetId,
    pub hops_first: HopDistance,
    pub hops_second: HopDistance,
}

impl CommonHypernym {
    pub fn hop_sum(&self) -> u32 {
        self.hops_first.0 + self.hops_second.0
    }

    pub fn swapped(self) -> Self {
        CommonHypernym {
            ancestor: self.ancestor,
            hops_first: self.hops_second,
            hops_second: self.hops_first,
        }
    }
}

/// Immutable hypernym DAG with hyponym adjacency kept as its exact inverse.
#[derive(Debug, Clone, Default)]
pub struct HypernymGraph {
    nodes: Vec<SynsetId>,
    slot: HashMap<SynsetId, usize>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl HypernymGraph {
    /// Builds a graph from nodes and `(child, hypernym)` edges, rejecting cycles.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = SynsetId>,
        edges: impl IntoIterator<Item = (SynsetId, SynsetId)>,
    ) -> Result<Self, HierarchyError> {
        let mut nodes: Vec<SynsetId> = nodes.into_iter().collect();
        nodes.sort();
        nodes.dedup();
        let slot: HashMap<SynsetId, usize> = nodes.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut up = vec![Vec::new(); nodes.len()];
        let mut down = vec![Vec::new(); nodes.len()];
        for (child, parent) in edges {
            let c = *slot.get(&child).ok_or(HierarchyError::UnknownSynset(child))?;
            let p = *slot.get(&parent).ok_or(HierarchyError::UnknownSynset(parent))?;
            up[c].push(p);
            down[p].push(c);
        }
        for adj in up.iter_mut().chain(down.iter_mut()) {
            adj.sort_unstable();
            adj.dedup();
        }
        let graph = HypernymGraph { nodes, slot, up, down };
        if let Some(cycle) = graph.cycle() {
            return Err(HierarchyError::CycleDetected(cycle));
        }
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: SynsetId) -> bool {
        self.slot.contains_key(&id)
    }

    pub fn nodes(&self) -> &[SynsetId] {
        &self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }

    fn index(&self, id: SynsetId) -> Result<usize, HierarchyError> {
        self.slot.get(&id).copied().ok_or(HierarchyError::UnknownSynset(id))
    }

    fn ids(&self, slots: &[usize]) -> BTreeSet<SynsetId> {
        slots.iter().map(|&i| self.nodes[i]).collect()
    }

    pub fn direct_hypernyms(&self, id: SynsetId) -> Result<BTreeSet<SynsetId>, HierarchyError> {
        Ok(self.ids(&self.up[self.index(id)?]))
    }

    pub fn direct_hyponyms(&self, id: SynsetId) -> Result<BTreeSet<SynsetId>, HierarchyError> {
        Ok(self.ids(&self.down[self.index(id)?]))
    }

    fn cycle(&self) -> Option<Vec<SynsetId>> {
        find_cycle_dense(&self.up).map(|c| c.into_iter().map(|i| self.nodes[i]).collect())
    }

    /// Breadth-first minimal hop counts over up-edges, `start` included at 0.
    fn distances_up(&self, start: usize) -> HashMap<usize, u32> {
        let mut dist = HashMap::new();
        dist.insert(start, 0);
        let mut queue = VecDeque::from([start]);
        while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            for &p in &self.up[n] {
                dist.entry(p).or_insert_with(|| {
                    queue.push_back(p);
                    d + 1
                });
            }
        }
        dist
    }

    pub fn hypernym_closure(&self, id: SynsetId) -> Result<BTreeMap<SynsetId, HopDistance>, HierarchyError> {
        let start = self.index(id)?;
        Ok(self
            .distances_up(start)
            .into_iter()
            .map(|(n, d)| (self.nodes[n], HopDistance(d)))
            .collect())
    }

    /// True when `ancestor` lies on some upward path from `descendant`, at one hop or more.
    pub fn is_ancestor(&self, ancestor: SynsetId, descendant: SynsetId) -> Result<bool, HierarchyError> {
        Ok(self.hypernym_chain(descendant, ancestor)?.is_some_and(|c| c.len() > 1))
    }

    /// Shortest upward chain `from, ..., to`, if `to` is reachable.
    pub fn hypernym_chain(&self, from: SynsetId, to: SynsetId) -> Result<Option<Vec<SynsetId>>, HierarchyError> {
        let start = self.index(from)?;
        let goal = self.index(to)?;
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        let mut reached = start == goal;
        while let Some(n) = queue.pop_front() {
            if reached {
                break;
            }
            for &p in &self.up[n] {
                if p != start && !parent.contains_key(&p) {
                    parent.insert(p, n);
                    if p == goal {
                        reached = true;
                        break;
                    }
                    queue.push_back(p);
                }
            }
        }
        if !reached {
            return Ok(None);
        }
        let mut chain = vec![self.nodes[goal]];
        let mut n = goal;
        while n != start {
            n = parent[&n];
            chain.push(self.nodes[n]);
        }
        chain.reverse();
        Ok(Some(chain))
    }

    /// Common ancestors minimizing the total hop count, sorted by (hop sum, ancestor id).
    /// Empty when the two closures are disjoint.
    pub fn lowest_common_hypernyms(&self, a: SynsetId, b: SynsetId) -> Result<Vec<CommonHypernym>, HierarchyError> {
        let da = self.distances_up(self.index(a)?);
        let db = self.distances_up(self.index(b)?);
        let common: Vec<CommonHypernym> = da
            .iter()
            .filter_map(|(n, &x)| {
                db.get(n).map(|&y| CommonHypernym {
                    ancestor: self.nodes[*n],
                    hops_first: HopDistance(x),
                    hops_second: HopDistance(y),
                })
            })
            .collect();
        let Some(best) = common.iter().map(CommonHypernym::hop_sum).min() else {
            return Ok(Vec::new());
        };
        let mut lowest: Vec<CommonHypernym> = common.into_iter().filter(|c| c.hop_sum() == best).collect();
        lowest.sort_by_key(|c| (c.hop_sum(), c.ancestor));
        Ok(lowest)
    }

    /// Synsets other than `id` sharing at least one direct hypernym with it.
    pub fn sister_terms(&self, id: SynsetId) -> Result<BTreeSet<SynsetId>, HierarchyError> {
        let n = self.index(id)?;
        Ok(self.up[n]
            .iter()
            .flat_map(|&p| self.down[p].iter())
            .filter(|&&s| s != n)
            .map(|&s| self.nodes[s])
            .collect())
    }

    /// Every maximal upward path from `id`, each ending at a root.
    pub fn paths_to_roots(&self, id: SynsetId) -> Result<Vec<Vec<SynsetId>>, HierarchyError> {
        let start = self.index(id)?;
        let mut paths = Vec::new();
        let mut stack = vec![(start, 0usize)];
        let mut path = Vec::new();
        while let Some((n, depth)) = stack.pop() {
            path.truncate(depth);
            path.push(self.nodes[n]);
            if self.up[n].is_empty() {
                paths.push(path.clone());
                continue;
            }
            for &p in self.up[n].iter().rev() {
                stack.push((p, depth + 1));
            }
        }
        Ok(paths)
    }

    /// Depth below the nearest root (minimal hops to any synset without hypernyms).
    pub fn min_depth(&self, id: SynsetId) -> Result<HopDistance, HierarchyError> {
        let start = self.index(id)?;
        let dist = self.distances_up(start);
        let depth = dist
            .iter()
            .filter(|(n, _)| self.up[**n].is_empty())
            .map(|(_, d)| *d)
            .min()
            .unwrap_or(0);
        Ok(HopDistance(depth))
    }
}

/// Builds the hypernym graph of a database. Adjective satellites carry no
/// hypernym structure and are left out.
pub fn build_graph(db: &LexicalDatabase) -> Result<HypernymGraph, HierarchyError> {
    let nodes = db.synsets().filter(|s| s.id.pos != Pos::AdjSat).map(|s| s.id);
    let edges: Vec<(SynsetId, SynsetId)> = db
        .synsets()
        .filter(|s| s.id.pos != Pos::AdjSat)
        .flat_map(|s| {
            let up = s.hypernyms().map(move |h| (s.id, h));
            let down = s.hyponyms().map(move |c| (c, s.id));
            up.chain(down)
        })
        .filter(|(c, p)| c.pos != Pos::AdjSat && p.pos != Pos::AdjSat)
        .collect();
    HypernymGraph::from_edges(nodes, edges)
}

/// Finds one directed cycle in `(child, hypernym)` edges, if any. The witness
/// starts at the smallest id from which a cycle is reachable.
pub fn find_cycle(nodes: impl IntoIterator<Item = SynsetId>, edges: &[(SynsetId, SynsetId)]) -> Option<Vec<SynsetId>> {
    let mut ids: Vec<SynsetId> = nodes
        .into_iter()
        .chain(edges.iter().flat_map(|(a, b)| [*a, *b]))
        .collect();
    ids.sort();
    ids.dedup();
    let slot: HashMap<SynsetId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut adjacency = vec![Vec::new(); ids.len()];
    for (c, p) in edges {
        adjacency[slot[c]].push(slot[p]);
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
    }
    find_cycle_dense(&adjacency).map(|c| c.into_iter().map(|i| ids[i]).collect())
}

fn find_cycle_dense(adjacency: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut mark = vec![Mark::New; adjacency.len()];
    for root in 0..adjacency.len() {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, next edge to try); `path` mirrors the active stack
        let mut stack = vec![(root, 0usize)];
        let mut path = vec![root];
        mark[root] = Mark::Active;
        while let Some(top) = stack.last_mut() {
            let n = top.0;
            if let Some(&p) = adjacency[n].get(top.1) {
                top.1 += 1;
                match mark[p] {
                    Mark::Active => {
                        let from = path.iter().position(|&x| x == p).expect("active node on path");
                        return Some(path[from..].to_vec());
                    }
                    Mark::New => {
                        mark[p] = Mark::Active;
                        stack.push((p, 0));
                        path.push(p);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[n] = Mark::Done;
                stack.pop();
                path.pop();
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u64) -> SynsetId {
        SynsetId::new(Pos::Verb, n)
    }

    fn graph(n: u64, edges: &[(u64, u64)]) -> HypernymGraph {
        HypernymGraph::from_edges((1..=n).map(v), edges.iter().map(|&(c, p)| (v(c), v(p)))).unwrap()
    }

    // root 1 over literal 2 and intermediate 3; metaphor 4 and its sister 5 under 3
    fn uneven_branches() -> HypernymGraph {
        graph(5, &[(2, 1), (3, 1), (4, 3), (5, 3)])
    }

    #[test]
    fn two_cycle_reported() {
        let err = HypernymGraph::from_edges([v(1), v(2)], [(v(1), v(2)), (v(2), v(1))]).unwrap_err();
        assert_eq!(err, HierarchyError::CycleDetected(vec![v(1), v(2)]));
    }

    #[test]
    fn empty_graph() {
        let g = HypernymGraph::from_edges([], []).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn closure_of_root_is_itself() {
        let g = uneven_branches();
        let c = g.hypernym_closure(v(1)).unwrap();
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![(v(1), HopDistance(0))]);
    }

    #[test]
    fn closure_reaches_common_hypernym_in_two_hops() {
        let g = uneven_branches();
        assert_eq!(g.hypernym_closure(v(4)).unwrap()[&v(1)], HopDistance(2));
    }

    #[test]
    fn diamond_uses_minimal_hops() {
        // 1 -> {2, 3} -> 4, plus a longer detour 1 -> 5 -> 3
        let g = graph(5, &[(1, 2), (1, 3), (2, 4), (3, 4), (1, 5), (5, 3)]);
        assert_eq!(g.hypernym_closure(v(1)).unwrap()[&v(4)], HopDistance(2));
    }

    #[test]
    fn ancestor_two_hops_up() {
        let g = graph(3, &[(3, 2), (2, 1)]);
        assert!(g.is_ancestor(v(1), v(3)).unwrap());
        assert!(!g.is_ancestor(v(3), v(1)).unwrap());
        assert!(!g.is_ancestor(v(2), v(2)).unwrap());
        assert_eq!(g.hypernym_chain(v(3), v(1)).unwrap(), Some(vec![v(3), v(2), v(1)]));
        assert_eq!(g.hypernym_chain(v(2), v(2)).unwrap(), Some(vec![v(2)]));
    }

    #[test]
    fn lch_of_uneven_branches() {
        let g = uneven_branches();
        let lch = g.lowest_common_hypernyms(v(4), v(2)).unwrap();
        assert_eq!(
            lch,
            vec![CommonHypernym {
                ancestor: v(1),
                hops_first: HopDistance(2),
                hops_second: HopDistance(1)
            }]
        );
    }

    #[test]
    fn lch_identity_and_disjoint() {
        let g = graph(3, &[(2, 1)]);
        assert_eq!(
            g.lowest_common_hypernyms(v(2), v(2)).unwrap(),
            vec![CommonHypernym {
                ancestor: v(2),
                hops_first: HopDistance(0),
                hops_second: HopDistance(0)
            }]
        );
        assert!(g.lowest_common_hypernyms(v(1), v(3)).unwrap().is_empty());
    }

    #[test]
    fn lch_ties_all_returned_in_id_order() {
        // 3 and 4 both have parents 1 and 2
        let g = graph(4, &[(3, 1), (3, 2), (4, 1), (4, 2)]);
        let lch = g.lowest_common_hypernyms(v(3), v(4)).unwrap();
        assert_eq!(lch.iter().map(|c| c.ancestor).collect::<Vec<_>>(), vec![v(1), v(2)]);
    }

    #[test]
    fn sisters() {
        let g = graph(4, &[(2, 1), (3, 1), (4, 1)]);
        assert_eq!(g.sister_terms(v(2)).unwrap(), BTreeSet::from([v(3), v(4)]));
        assert!(g.sister_terms(v(1)).unwrap().is_empty());
    }

    #[test]
    fn hyponyms_of_leaf_and_parent() {
        let g = graph(3, &[(2, 1), (3, 1)]);
        assert!(g.direct_hyponyms(v(2)).unwrap().is_empty());
        assert_eq!(g.direct_hyponyms(v(1)).unwrap(), BTreeSet::from([v(2), v(3)]));
    }

    #[test]
    fn paths() {
        let g = graph(4, &[(4, 3), (3, 2), (2, 1)]);
        assert_eq!(g.paths_to_roots(v(1)).unwrap(), vec![vec![v(1)]]);
        assert_eq!(g.paths_to_roots(v(4)).unwrap(), vec![vec![v(4), v(3), v(2), v(1)]]);
        let diamond = graph(4, &[(1, 2), (1, 3), (2, 4), (3, 4)]);
        assert_eq!(
            diamond.paths_to_roots(v(1)).unwrap(),
            vec![vec![v(1), v(2), v(4)], vec![v(1), v(3), v(4)]]
        );
    }

    #[test]
    fn unknown_synset_errors() {
        let g = graph(1, &[]);
        assert_eq!(g.sister_terms(v(9)), Err(HierarchyError::UnknownSynset(v(9))));
        assert!(g.is_ancestor(v(1), v(9)).is_err());
        assert!(g.paths_to_roots(v(9)).is_err());
    }

    #[test]
    fn depth() {
        let g = uneven_branches();
        assert_eq!(g.min_depth(v(4)).unwrap(), HopDistance(2));
        assert_eq!(g.min_depth(v(1)).unwrap(), HopDistance(0));
    }
}
