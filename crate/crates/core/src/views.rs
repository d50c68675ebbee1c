//! JSON views shared by the CLI and the HTTP service, so both emit the same
//! bytes for the same query.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::hierarchy::{CommonHypernym, HierarchyError, HypernymGraph};
use crate::specificity::{compare_specificity, SpecificityEvidence};
use crate::wordnet::{LexicalDatabase, Pos, ResolveError, Synset, SynsetId, SynsetRef};

pub const API_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{0}")]
    BadInput(String),
    #[error("{0}")]
    NotFound(String),
}

impl From<ResolveError> for QueryError {
    fn from(e: ResolveError) -> Self {
        QueryError::NotFound(e.to_string())
    }
}

impl From<HierarchyError> for QueryError {
    fn from(e: HierarchyError) -> Self {
        match e {
            HierarchyError::UnknownSynset(_) => QueryError::NotFound(e.to_string()),
            _ => QueryError::BadInput(e.to_string()),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("view serializes");
    s.push('\n');
    s
}

pub fn resolve_ref(db: &LexicalDatabase, text: &str) -> Result<SynsetId, QueryError> {
    let r: SynsetRef = text
        .parse()
        .map_err(|e| QueryError::BadInput(format!("{text:?}: {e}")))?;
    Ok(db.resolve(&r)?)
}

pub fn parse_pos(text: &str) -> Result<Pos, QueryError> {
    let mut chars = text.chars();
    match (chars.next().and_then(Pos::from_char), chars.next()) {
        (Some(p), None) => Ok(p),
        _ => Err(QueryError::BadInput(format!(
            "unknown part of speech {text:?} (expected n, v, a, s or r)"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynsetView {
    pub key: String,
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub examples: Vec<String>,
    pub hypernyms: Vec<String>,
    pub hyponyms: Vec<String>,
}

impl SynsetView {
    pub fn new(db: &LexicalDatabase, s: &Synset) -> Self {
        SynsetView {
            key: db.display_key(s.id),
            id: s.id,
            lemmas: s.lemmas.clone(),
            gloss: s.gloss.clone(),
            examples: s.examples.clone(),
            hypernyms: s.hypernyms().map(|h| db.display_key(h)).collect(),
            hyponyms: s.hyponyms().map(|h| db.display_key(h)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidatesView {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub query: String,
    pub candidates: Vec<SynsetView>,
}

pub fn synsets_view(db: &LexicalDatabase, lemma: &str, pos: Pos) -> Result<CandidatesView, QueryError> {
    let found = db.lookup_synsets(lemma, pos);
    if found.is_empty() {
        return Err(ResolveError::UnknownLemma {
            lemma: lemma.to_string(),
            pos,
        }
        .into());
    }
    Ok(CandidatesView {
        schema_version: API_SCHEMA_VERSION,
        query: format!("{lemma}.{}", pos.as_char()),
        candidates: found.into_iter().map(|s| SynsetView::new(db, s)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleSynsetView {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub synset: SynsetView,
}

pub fn synset_view(db: &LexicalDatabase, key: &str) -> Result<SingleSynsetView, QueryError> {
    let id = resolve_ref(db, key)?;
    let s = db.synset(id).ok_or(ResolveError::UnknownSynset(id))?;
    Ok(SingleSynsetView {
        schema_version: API_SCHEMA_VERSION,
        synset: SynsetView::new(db, s),
    })
}

/// Sister terms or direct hyponyms of one synset.
pub fn neighbours_view(
    db: &LexicalDatabase,
    g: &HypernymGraph,
    key: &str,
    hyponyms: bool,
) -> Result<CandidatesView, QueryError> {
    let id = resolve_ref(db, key)?;
    let ids = if hyponyms {
        g.direct_hyponyms(id)?
    } else {
        g.sister_terms(id)?
    };
    Ok(CandidatesView {
        schema_version: API_SCHEMA_VERSION,
        query: db.display_key(id),
        candidates: ids
            .into_iter()
            .filter_map(|i| db.synset(i))
            .map(|s| SynsetView::new(db, s))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathsView {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub key: String,
    /// Each path runs from the synset up to a root.
    pub paths: Vec<Vec<String>>,
}

pub fn paths_view(db: &LexicalDatabase, g: &HypernymGraph, key: &str) -> Result<PathsView, QueryError> {
    let id = resolve_ref(db, key)?;
    Ok(PathsView {
        schema_version: API_SCHEMA_VERSION,
        key: db.display_key(id),
        paths: g
            .paths_to_roots(id)?
            .into_iter()
            .map(|p| p.into_iter().map(|s| db.display_key(s)).collect())
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommonHypernymView {
    pub ancestor: String,
    pub hops_first: u32,
    pub hops_second: u32,
}

impl CommonHypernymView {
    fn new(db: &LexicalDatabase, c: &CommonHypernym) -> Self {
        CommonHypernymView {
            ancestor: db.display_key(c.ancestor),
            hops_first: c.hops_first.0,
            hops_second: c.hops_second.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecificityView {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub a: String,
    pub b: String,
    pub verdict: String,
    pub case: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lch: Option<Vec<CommonHypernymView>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative: Option<CommonHypernymView>,
}

pub fn specificity_view(
    db: &LexicalDatabase,
    g: &HypernymGraph,
    a: &str,
    b: &str,
) -> Result<SpecificityView, QueryError> {
    let (ia, ib) = (resolve_ref(db, a)?, resolve_ref(db, b)?);
    let o = compare_specificity(g, ia, ib)?;
    let mut view = SpecificityView {
        schema_version: API_SCHEMA_VERSION,
        a: db.display_key(ia),
        b: db.display_key(ib),
        verdict: o.verdict.to_string(),
        case: o.evidence.case().to_string(),
        chain: None,
        lch: None,
        representative: None,
    };
    match &o.evidence {
        SpecificityEvidence::DirectRelation { chain } => {
            view.chain = Some(chain.iter().map(|s| db.display_key(*s)).collect());
        }
        SpecificityEvidence::CommonHypernym { lch, representative } => {
            view.lch = Some(lch.iter().map(|c| CommonHypernymView::new(db, c)).collect());
            view.representative = Some(CommonHypernymView::new(db, representative));
        }
        SpecificityEvidence::NoCommonHypernym => {}
    }
    Ok(view)
}

/// Verdict on the first line, evidence below.
pub fn specificity_text(v: &SpecificityView) -> String {
    let mut out = format!("{}\ncase: {}\n", v.verdict, v.case);
    if let Some(chain) = &v.chain {
        let _ = writeln!(out, "chain: {}", chain.join(" -> "));
    }
    let hops = |c: &CommonHypernymView| format!("{} (hops {} / {})", c.ancestor, c.hops_first, c.hops_second);
    if let Some(lch) = &v.lch {
        for c in lch {
            let _ = writeln!(out, "lowest common hypernym: {}", hops(c));
        }
    }
    if let Some(r) = &v.representative {
        let _ = writeln!(out, "decided by: {}", hops(r));
    }
    out
}

pub fn synset_text(v: &SynsetView) -> String {
    let mut out = format!("{}  {}  [{}]\n  {}\n", v.key, v.id, v.lemmas.join(", "), v.gloss);
    for e in &v.examples {
        let _ = writeln!(out, "  \"{e}\"");
    }
    out
}
