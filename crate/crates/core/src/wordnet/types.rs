use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// WordNet part of speech. `AdjSat` is the adjective satellite (`s`) type,
/// which lives in the adjective files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    AdjSat,
}

impl Pos {
    pub const ALL: [Pos; 5] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv, Pos::AdjSat];

    pub fn as_char(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::Adv => 'r',
            Pos::AdjSat => 's',
        }
    }

    pub fn from_char(c: char) -> Option<Pos> {
        match c {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            'a' => Some(Pos::Adj),
            'r' => Some(Pos::Adv),
            's' => Some(Pos::AdjSat),
            _ => None,
        }
    }

    /// The pos whose index/data files hold synsets of this type.
    pub fn file_pos(self) -> Pos {
        match self {
            Pos::AdjSat => Pos::Adj,
            p => p,
        }
    }

    /// Suffix used by the wndb file names (`data.verb`, `index.adj`, ...).
    pub fn file_suffix(self) -> &'static str {
        match self.file_pos() {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj | Pos::AdjSat => "adj",
            Pos::Adv => "adv",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Pos {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Pos::from_char(c).ok_or_else(|| IdParseError::BadPos(s.to_string())),
            _ => Err(IdParseError::BadPos(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdParseError {
    #[error("unknown part of speech {0:?} (expected one of n, v, a, r, s)")]
    BadPos(String),
    #[error("malformed synset id {0:?} (expected pos:offset)")]
    BadSynsetId(String),
    #[error("malformed sense key {0:?} (expected lemma.pos.NN)")]
    BadSenseKey(String),
}

/// Identity of a synset: part of speech plus byte offset in its data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    pub pos: Pos,
    pub offset: u64,
}

impl SynsetId {
    pub fn new(pos: Pos, offset: u64) -> Self {
        SynsetId { pos, offset }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:08}", self.pos, self.offset)
    }
}

impl FromStr for SynsetId {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (pos, offset) = s
            .split_once(':')
            .ok_or_else(|| IdParseError::BadSynsetId(s.to_string()))?;
        let pos = pos.parse::<Pos>()?;
        if offset.is_empty() || !offset.bytes().all(|b| b.is_ascii_digit()) {
            return Err(IdParseError::BadSynsetId(s.to_string()));
        }
        let offset = offset
            .parse::<u64>()
            .map_err(|_| IdParseError::BadSynsetId(s.to_string()))?;
        Ok(SynsetId { pos, offset })
    }
}

impl Serialize for SynsetId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SynsetId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `lemma.pos.NN`: the `NN`-th sense of `lemma` in index-file order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenseKey {
    pub lemma: String,
    pub pos: Pos,
    pub sense: u32,
}

impl SenseKey {
    pub fn new(lemma: &str, pos: Pos, sense: u32) -> Self {
        SenseKey {
            lemma: normalize_lemma(lemma),
            pos,
            sense,
        }
    }
}

/// Lowercases and joins multiword lemmas with underscores, as the index files do.
pub fn normalize_lemma(lemma: &str) -> String {
    lemma.trim().to_lowercase().replace(' ', "_")
}

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{:02}", self.lemma, self.pos, self.sense)
    }
}

impl FromStr for SenseKey {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || IdParseError::BadSenseKey(s.to_string());
        // lemmas may themselves contain dots ("st._john's_wort"), so split from the right
        let mut parts = s.rsplitn(3, '.');
        let number = parts.next().ok_or_else(bad)?;
        let pos = parts.next().ok_or_else(bad)?;
        let lemma = parts.next().ok_or_else(bad)?;
        if lemma.is_empty() || number.is_empty() || !number.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let sense = number.parse::<u32>().map_err(|_| bad())?;
        if sense == 0 {
            return Err(bad());
        }
        let pos = pos.parse::<Pos>().map_err(|_| bad())?;
        Ok(SenseKey::new(lemma, pos, sense))
    }
}

impl Serialize for SenseKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SenseKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Either textual form accepted wherever a user names a synset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynsetRef {
    Key(SenseKey),
    Id(SynsetId),
}

impl FromStr for SynsetRef {
    type Err = IdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(':') {
            s.parse().map(SynsetRef::Id)
        } else {
            s.parse().map(SynsetRef::Key)
        }
    }
}

impl fmt::Display for SynsetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynsetRef::Key(k) => k.fmt(f),
            SynsetRef::Id(id) => id.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointerKind {
    Hypernym,
    Hyponym,
    Other(String),
}

impl PointerKind {
    pub fn from_symbol(symbol: &str) -> PointerKind {
        match symbol {
            "@" => PointerKind::Hypernym,
            "~" => PointerKind::Hyponym,
            other => PointerKind::Other(other.to_string()),
        }
    }

    pub fn symbol(&self) -> &str {
        match self {
            PointerKind::Hypernym => "@",
            PointerKind::Hyponym => "~",
            PointerKind::Other(s) => s,
        }
    }
}

/// A pointer out of a synset. `source`/`target` are the lexical word numbers
/// from the data file (both zero for semantic pointers).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pointer {
    pub kind: PointerKind,
    pub target: SynsetId,
    pub source_word: u8,
    pub target_word: u8,
}

impl Pointer {
    pub fn semantic(kind: PointerKind, target: SynsetId) -> Self {
        Pointer {
            kind,
            target,
            source_word: 0,
            target_word: 0,
        }
    }

    pub fn is_semantic(&self) -> bool {
        self.source_word == 0 && self.target_word == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub examples: Vec<String>,
    pub pointers: Vec<Pointer>,
}

impl Synset {
    pub fn hypernyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.pointers
            .iter()
            .filter(|p| p.kind == PointerKind::Hypernym)
            .map(|p| p.target)
    }

    pub fn hyponyms(&self) -> impl Iterator<Item = SynsetId> + '_ {
        self.pointers
            .iter()
            .filter(|p| p.kind == PointerKind::Hyponym)
            .map(|p| p.target)
    }

    /// Gloss text in data-file layout: definition followed by quoted examples.
    pub fn raw_gloss(&self) -> String {
        let mut out = self.gloss.clone();
        for ex in &self.examples {
            if !out.is_empty() {
                out.push_str("; ");
            }
            out.push('"');
            out.push_str(ex);
            out.push('"');
        }
        out
    }
}

/// Splits a data-file gloss into definition and examples.
///
/// The definition ends at the first `;` outside quotes that is followed by a
/// quoted segment; every double-quoted segment after that point is an example.
pub fn split_gloss(raw: &str) -> (String, Vec<String>) {
    let raw = raw.trim();
    if raw.starts_with('"') {
        return (String::new(), quoted_segments(raw));
    }
    let mut in_quote = false;
    for (i, c) in raw.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            ';' if !in_quote && raw[i + 1..].trim_start().starts_with('"') => {
                return (raw[..i].trim_end().to_string(), quoted_segments(&raw[i + 1..]));
            }
            _ => {}
        }
    }
    (raw.to_string(), Vec::new())
}

fn quoted_segments(s: &str) -> Vec<String> {
    s.split('"')
        .skip(1)
        .step_by(2)
        .map(|seg| seg.trim().to_string())
        .filter(|seg| !seg.is_empty())
        .collect()
}
