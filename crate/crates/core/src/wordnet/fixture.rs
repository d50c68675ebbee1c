//! Line-oriented fixture format for small hand-authored hierarchies.
//!
//! ```text
//! # comment
//! id<TAB>lemma1,lemma2<TAB>gloss<TAB>hypernym1,hypernym2[<TAB>other pointers]
//! ```
//!
//! `id` is either a sense key (`rip.v.04`) or `pos:offset` (`v:00012345`);
//! `-` stands for an empty hypernym list. A lemma may carry an explicit sense
//! number (`rip#4`); a sense-key id pins its own lemma the same way. Unpinned
//! lemmas fill the remaining sense slots in file order. The optional fifth
//! column keeps non-hierarchy pointers as `symbol target wwww` items separated
//! by commas. A `# release: ...` comment records the WordNet release.
//! Hyponym pointers are never written; they are synthesized from hypernyms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::db::{LexicalDatabase, LoadError};
use super::types::{normalize_lemma, split_gloss, Pointer, PointerKind, Pos, SenseKey, Synset, SynsetId, SynsetRef};

struct Record {
    line: usize,
    byte: u64,
    id_text: String,
    id: SynsetId,
    pinned_key: Option<SenseKey>,
    lemmas: Vec<(String, Option<u32>)>,
    gloss: String,
    hypernyms: Vec<String>,
    others: Vec<(String, String, String)>,
}

pub fn load_fixture(path: &Path) -> Result<LexicalDatabase, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_fixture(&text, path)
}

/// Parses fixture text; `origin` is only used in error messages.
pub fn parse_fixture(text: &str, origin: &Path) -> Result<LexicalDatabase, LoadError> {
    let malformed = |line: usize, byte: u64, reason: String| LoadError::MalformedLine {
        path: origin.to_path_buf(),
        line,
        byte,
        reason,
    };

    let mut release = None;
    let mut records = Vec::new();
    let mut byte = 0u64;
    for (i, raw_line) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let start = byte;
        byte += raw_line.len() as u64 + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(r) = comment.trim().strip_prefix("release:") {
                release = Some(r.trim().to_string());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !(4..=5).contains(&cols.len()) {
            return Err(malformed(
                line_no,
                start,
                format!("expected 4 or 5 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id_text = cols[0].trim();
        let parsed: SynsetRef = id_text.parse().map_err(|e| malformed(line_no, start, format!("{e}")))?;
        let (id, pinned_key) = match parsed {
            SynsetRef::Id(id) => (id, None),
            SynsetRef::Key(k) => (SynsetId::new(k.pos, 0), Some(k)),
        };
        let mut lemmas = Vec::new();
        for item in cols[1].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (lemma, sense) = match item.split_once('#') {
                Some((l, n)) => {
                    let n: u32 = n
                        .parse()
                        .ok()
                        .filter(|n| *n > 0)
                        .ok_or_else(|| malformed(line_no, start, format!("bad sense number in {item:?}")))?;
                    (l.to_string(), Some(n))
                }
                None => (item.to_string(), None),
            };
            lemmas.push((lemma, sense));
        }
        if lemmas.is_empty() {
            match &pinned_key {
                Some(k) => lemmas.push((k.lemma.clone(), None)),
                None => return Err(malformed(line_no, start, "synset has no lemmas".into())),
            }
        }
        if let Some(k) = &pinned_key {
            if !lemmas.iter().any(|(l, _)| normalize_lemma(l) == k.lemma) {
                return Err(malformed(
                    line_no,
                    start,
                    format!("id {k} names a lemma not in the lemma list"),
                ));
            }
        }
        let hypernyms = split_list(cols[3]);
        let mut others = Vec::new();
        if let Some(col) = cols.get(4) {
            for item in col.split(',').map(str::trim).filter(|s| !s.is_empty() && *s != "-") {
                let parts: Vec<&str> = item.split_ascii_whitespace().collect();
                match parts.as_slice() {
                    [sym, target, words] if words.len() == 4 && u16::from_str_radix(words, 16).is_ok() => {
                        others.push((sym.to_string(), target.to_string(), words.to_string()))
                    }
                    _ => return Err(malformed(line_no, start, format!("bad pointer item {item:?}"))),
                }
            }
        }
        records.push(Record {
            line: line_no,
            byte: start,
            id_text: id_text.to_string(),
            id,
            pinned_key,
            lemmas,
            gloss: cols[2].trim().to_string(),
            hypernyms,
            others,
        });
    }

    // offsets for sense-key ids continue after the largest explicit offset of their pos
    let mut next_offset: BTreeMap<Pos, u64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.pinned_key.is_none()) {
        let n = next_offset.entry(r.id.pos).or_insert(1);
        *n = (*n).max(r.id.offset + 1);
    }
    for r in records.iter_mut().filter(|r| r.pinned_key.is_some()) {
        let n = next_offset.entry(r.id.pos).or_insert(1);
        r.id.offset = *n;
        *n += 1;
    }

    let mut by_text: BTreeMap<String, SynsetId> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for r in &records {
        if !seen.insert(r.id) || by_text.insert(r.id_text.clone(), r.id).is_some() {
            return Err(malformed(r.line, r.byte, format!("duplicate synset id {}", r.id_text)));
        }
    }

    let index = build_index(&records).map_err(|(r, reason)| malformed(r.line, r.byte, reason))?;

    let resolve = |text: &str, r: &Record| -> Result<SynsetId, LoadError> {
        let dangling = || LoadError::DanglingPointer {
            from: r.id_text.clone(),
            target: text.to_string(),
        };
        if let Some(id) = by_text.get(text) {
            return Ok(*id);
        }
        match text.parse::<SynsetRef>() {
            Ok(SynsetRef::Id(id)) if seen.contains(&id) => Ok(id),
            Ok(SynsetRef::Key(k)) => index
                .get(&(k.lemma.clone(), k.pos.file_pos()))
                .and_then(|ids| ids.get(k.sense as usize - 1))
                .copied()
                .ok_or_else(dangling),
            Ok(_) => Err(dangling()),
            Err(e) => Err(malformed(r.line, r.byte, format!("bad pointer target: {e}"))),
        }
    };

    let mut synsets = BTreeMap::new();
    for r in &records {
        let mut pointers = Vec::new();
        for h in &r.hypernyms {
            pointers.push(Pointer::semantic(PointerKind::Hypernym, resolve(h, r)?));
        }
        for (sym, target, words) in &r.others {
            let kind = PointerKind::from_symbol(sym);
            if matches!(kind, PointerKind::Hypernym | PointerKind::Hyponym) {
                return Err(malformed(
                    r.line,
                    r.byte,
                    format!("{sym} pointers belong in the hypernym column"),
                ));
            }
            let st = u16::from_str_radix(words, 16).unwrap_or(0);
            pointers.push(Pointer {
                kind,
                target: resolve(target, r)?,
                source_word: (st >> 8) as u8,
                target_word: (st & 0xff) as u8,
            });
        }
        let (gloss, examples) = split_gloss(&r.gloss);
        synsets.insert(
            r.id,
            Synset {
                id: r.id,
                lemmas: r.lemmas.iter().map(|(l, _)| l.clone()).collect(),
                gloss,
                examples,
                pointers,
            },
        );
    }
    // declared hypernyms get their hyponym inverses here rather than as repairs
    let inverses: Vec<(SynsetId, SynsetId)> = synsets
        .values()
        .flat_map(|s| s.hypernyms().map(move |h| (h, s.id)))
        .collect();
    for (parent, child) in inverses {
        if let Some(p) = synsets.get_mut(&parent) {
            p.pointers.push(Pointer::semantic(PointerKind::Hyponym, child));
        }
    }

    LexicalDatabase::assemble(synsets, index, release, Vec::new())
}

fn split_list(col: &str) -> Vec<String> {
    col.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty() && *s != "-")
        .map(str::to_string)
        .collect()
}

type LemmaIndex = BTreeMap<(String, Pos), Vec<SynsetId>>;

fn build_index(records: &[Record]) -> Result<LemmaIndex, (&Record, String)> {
    let mut pinned: BTreeMap<(String, Pos), BTreeMap<u32, SynsetId>> = BTreeMap::new();
    let mut floating: BTreeMap<(String, Pos), Vec<SynsetId>> = BTreeMap::new();
    for r in records {
        let pos = r.id.pos.file_pos();
        for (i, (lemma, sense)) in r.lemmas.iter().enumerate() {
            let lemma = normalize_lemma(lemma);
            let sense = sense.or_else(|| {
                r.pinned_key
                    .as_ref()
                    .filter(|k| k.lemma == lemma && r.lemmas[..i].iter().all(|(l, _)| normalize_lemma(l) != lemma))
                    .map(|k| k.sense)
            });
            let key = (lemma.clone(), pos);
            match sense {
                Some(n) => {
                    let slots = pinned.entry(key).or_default();
                    if let Some(prev) = slots.insert(n, r.id) {
                        if prev != r.id {
                            return Err((r, format!("sense {lemma}.{pos}.{n:02} declared twice")));
                        }
                    }
                }
                None => {
                    let list = floating.entry(key).or_default();
                    if !list.contains(&r.id) {
                        list.push(r.id);
                    }
                }
            }
        }
    }

    let mut index = BTreeMap::new();
    let keys: BTreeSet<(String, Pos)> = pinned.keys().chain(floating.keys()).cloned().collect();
    for key in keys {
        let slots = pinned.remove(&key).unwrap_or_default();
        let mut rest = floating.remove(&key).unwrap_or_default();
        rest.retain(|id| !slots.values().any(|s| s == id));
        let total = slots.len() + rest.len();
        if let Some((&n, id)) = slots.iter().find(|(n, _)| **n as usize > total) {
            let r = records.iter().find(|r| r.id == *id).expect("record exists");
            return Err((
                r,
                format!("sense {}.{}.{n:02} leaves a gap in the sense numbering", key.0, key.1),
            ));
        }
        let mut list = Vec::with_capacity(total);
        let mut rest = rest.into_iter();
        for n in 1..=total as u32 {
            match slots.get(&n) {
                Some(id) => list.push(*id),
                None => list.push(rest.next().expect("slot count matches")),
            }
        }
        index.insert(key, list);
    }
    Ok(index)
}

/// Renders a database in fixture format. Reloading the output yields an equal database.
pub fn to_fixture_string(db: &LexicalDatabase) -> String {
    let mut position: BTreeMap<(String, SynsetId), usize> = BTreeMap::new();
    for (lemma, _, ids) in db.index_entries() {
        for (i, id) in ids.iter().enumerate() {
            position.insert((lemma.to_string(), *id), i + 1);
        }
    }

    let mut out = String::from("# id\tlemmas\tgloss\thypernyms\tother pointers\n");
    if let Some(r) = db.release() {
        let _ = writeln!(out, "# release: {r}");
    }
    for s in db.synsets() {
        let lemmas: Vec<String> = s
            .lemmas
            .iter()
            .map(|l| match position.get(&(normalize_lemma(l), s.id)) {
                Some(n) => format!("{l}#{n}"),
                None => l.clone(),
            })
            .collect();
        let hypernyms: Vec<String> = s.hypernyms().map(|h| h.to_string()).collect();
        let others: Vec<String> = s
            .pointers
            .iter()
            .filter(|p| matches!(p.kind, PointerKind::Other(_)))
            .map(|p| {
                format!(
                    "{} {} {:02x}{:02x}",
                    p.kind.symbol(),
                    p.target,
                    p.source_word,
                    p.target_word
                )
            })
            .collect();
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}",
            s.id,
            lemmas.join(","),
            s.raw_gloss(),
            if hypernyms.is_empty() {
                "-".to_string()
            } else {
                hypernyms.join(",")
            }
        );
        if !others.is_empty() {
            let _ = write!(out, "\t{}", others.join(","));
        }
        out.push('\n');
    }
    out
}
