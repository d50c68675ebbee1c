use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use thiserror::Error;

use super::types::{normalize_lemma, Pointer, PointerKind, Pos, SenseKey, Synset, SynsetId, SynsetRef};
use crate::hierarchy;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}:{line} (byte {byte}): {reason}", .path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        byte: u64,
        reason: String,
    },
    #[error("dangling pointer from {from} to {target}")]
    DanglingPointer { from: String, target: String },
    #[error("hypernym cycle detected: {}", format_cycle(.0))]
    CycleDetected(Vec<SynsetId>),
    #[error("reading {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn format_cycle(cycle: &[SynsetId]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(ToString::to_string).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown lemma {lemma:?} ({pos})")]
    UnknownLemma { lemma: String, pos: Pos },
    #[error("sense {key} out of range: {lemma:?} has {available} sense(s)", lemma = .key.lemma)]
    SenseOutOfRange { key: SenseKey, available: usize },
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
}

/// Immutable lexical database: synsets keyed by identity plus the sense-ordered
/// lemma index.
#[derive(Debug, Clone)]
pub struct LexicalDatabase {
    synsets: BTreeMap<SynsetId, Synset>,
    index: BTreeMap<(String, Pos), Vec<SynsetId>>,
    keys: BTreeMap<SynsetId, SenseKey>,
    release: Option<String>,
    diagnostics: Vec<String>,
}

impl PartialEq for LexicalDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.synsets == other.synsets && self.index == other.index
    }
}

impl Eq for LexicalDatabase {}

impl LexicalDatabase {
    /// Validates and freezes loader output.
    ///
    /// Hypernym/hyponym pointers missing their inverse get one added, with a
    /// diagnostic. Unresolved references and hypernym cycles are errors.
    pub(crate) fn assemble(
        mut synsets: BTreeMap<SynsetId, Synset>,
        index: BTreeMap<(String, Pos), Vec<SynsetId>>,
        release: Option<String>,
        mut diagnostics: Vec<String>,
    ) -> Result<Self, LoadError> {
        for ((lemma, pos), ids) in &index {
            for id in ids {
                if !synsets.contains_key(id) {
                    return Err(LoadError::DanglingPointer {
                        from: format!("index entry {lemma} ({pos})"),
                        target: id.to_string(),
                    });
                }
            }
        }
        for synset in synsets.values() {
            for p in &synset.pointers {
                if !synsets.contains_key(&p.target) {
                    return Err(LoadError::DanglingPointer {
                        from: synset.id.to_string(),
                        target: p.target.to_string(),
                    });
                }
            }
        }

        repair_inverse_pointers(&mut synsets, &mut diagnostics);

        for synset in synsets.values_mut() {
            synset.pointers.sort();
            synset.pointers.dedup();
        }

        let edges: Vec<(SynsetId, SynsetId)> = synsets
            .values()
            .flat_map(|s| s.hypernyms().map(move |h| (s.id, h)))
            .collect();
        if let Some(cycle) = hierarchy::find_cycle(synsets.keys().copied(), &edges) {
            return Err(LoadError::CycleDetected(cycle));
        }

        let mut keys = BTreeMap::new();
        for synset in synsets.values() {
            let Some(head) = synset.lemmas.first() else { continue };
            let lemma = normalize_lemma(head);
            if let Some(list) = index.get(&(lemma.clone(), synset.id.pos.file_pos())) {
                if let Some(i) = list.iter().position(|id| *id == synset.id) {
                    keys.insert(synset.id, SenseKey::new(&lemma, synset.id.pos, i as u32 + 1));
                }
            }
        }

        for d in &diagnostics {
            log::warn!("{d}");
        }

        Ok(LexicalDatabase {
            synsets,
            index,
            keys,
            release,
            diagnostics,
        })
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn index_entries(&self) -> impl Iterator<Item = (&str, Pos, &[SynsetId])> {
        self.index
            .iter()
            .map(|((lemma, pos), ids)| (lemma.as_str(), *pos, ids.as_slice()))
    }

    /// Release string from the license header, when the source files carried one.
    pub fn release(&self) -> Option<&str> {
        self.release.as_deref()
    }

    /// Warnings raised while loading (repaired pointers, dropped references).
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Candidate synsets for an already-lemmatized word, in index sense order.
    pub fn lookup_synsets(&self, lemma: &str, pos: Pos) -> Vec<&Synset> {
        self.index
            .get(&(normalize_lemma(lemma), pos.file_pos()))
            .map(|ids| ids.iter().filter_map(|id| self.synsets.get(id)).collect())
            .unwrap_or_default()
    }

    pub fn resolve_sense_key(&self, key: &SenseKey) -> Result<SynsetId, ResolveError> {
        let list = self
            .index
            .get(&(key.lemma.clone(), key.pos.file_pos()))
            .ok_or_else(|| ResolveError::UnknownLemma {
                lemma: key.lemma.clone(),
                pos: key.pos,
            })?;
        list.get(key.sense as usize - 1)
            .copied()
            .ok_or_else(|| ResolveError::SenseOutOfRange {
                key: key.clone(),
                available: list.len(),
            })
    }

    pub fn resolve(&self, r: &SynsetRef) -> Result<SynsetId, ResolveError> {
        match r {
            SynsetRef::Key(key) => self.resolve_sense_key(key),
            SynsetRef::Id(id) if self.synsets.contains_key(id) => Ok(*id),
            SynsetRef::Id(id) => Err(ResolveError::UnknownSynset(*id)),
        }
    }

    /// Canonical `lemma.pos.NN` name: the synset's position in its head lemma's sense list.
    pub fn sense_key(&self, id: SynsetId) -> Option<&SenseKey> {
        self.keys.get(&id)
    }

    /// Sense key when one exists, otherwise the `pos:offset` id.
    pub fn display_key(&self, id: SynsetId) -> String {
        self.sense_key(id)
            .map(ToString::to_string)
            .unwrap_or_else(|| id.to_string())
    }
}

fn repair_inverse_pointers(synsets: &mut BTreeMap<SynsetId, Synset>, diagnostics: &mut Vec<String>) {
    let present: BTreeSet<(SynsetId, PointerKind, SynsetId)> = synsets
        .values()
        .flat_map(|s| {
            s.pointers
                .iter()
                .filter(|p| matches!(p.kind, PointerKind::Hypernym | PointerKind::Hyponym))
                .map(move |p| (s.id, p.kind.clone(), p.target))
        })
        .collect();
    let mut missing = Vec::new();
    for (from, kind, to) in &present {
        let inverse = match kind {
            PointerKind::Hypernym => PointerKind::Hyponym,
            _ => PointerKind::Hypernym,
        };
        if !present.contains(&(*to, inverse.clone(), *from)) {
            missing.push((*to, inverse, *from));
        }
    }
    for (at, kind, target) in missing {
        diagnostics.push(format!(
            "repaired missing inverse pointer: {at} {} {target}",
            kind.symbol()
        ));
        if let Some(s) = synsets.get_mut(&at) {
            s.pointers.push(Pointer::semantic(kind, target));
        }
    }
}
