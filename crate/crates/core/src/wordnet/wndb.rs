//! Reader for the Princeton WordNet database files (`data.*` / `index.*`).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use super::db::{LexicalDatabase, LoadError};
use super::types::{normalize_lemma, split_gloss, Pointer, PointerKind, Pos, Synset, SynsetId};

const FILE_POS: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

#[derive(Debug)]
struct RawPointer {
    kind: PointerKind,
    file_pos: Pos,
    offset: u64,
    source_word: u8,
    target_word: u8,
}

#[derive(Debug)]
struct RawSynset {
    id: SynsetId,
    lemmas: Vec<String>,
    gloss: String,
    examples: Vec<String>,
    pointers: Vec<RawPointer>,
}

/// Loads a WordNet 3.0-layout directory. Any subset of the four part-of-speech
/// file pairs may be present, but the verb pair is required.
pub fn load_wndb(dir: &Path) -> Result<LexicalDatabase, LoadError> {
    let mut raw: BTreeMap<(Pos, u64), RawSynset> = BTreeMap::new();
    let mut index = BTreeMap::new();
    let mut loaded = Vec::new();
    let mut release = None;

    for pos in FILE_POS {
        let data_path = dir.join(format!("data.{}", pos.file_suffix()));
        let index_path = dir.join(format!("index.{}", pos.file_suffix()));
        match (data_path.is_file(), index_path.is_file()) {
            (false, false) if pos != Pos::Verb => continue,
            (false, _) => return Err(LoadError::MissingFile(data_path)),
            (true, false) => return Err(LoadError::MissingFile(index_path)),
            (true, true) => {}
        }
        loaded.push(pos);
        for s in parse_data_file(&data_path, pos, &mut release)? {
            raw.insert((pos, s.id.offset), s);
        }
        for (lemma, ids) in parse_index_file(&index_path, pos)? {
            index.insert((lemma, pos), ids);
        }
    }

    // ids in the index carry the file pos; satellites need their real ss_type
    let true_id: BTreeMap<(Pos, u64), SynsetId> = raw.iter().map(|(k, s)| (*k, s.id)).collect();
    let mut diagnostics = Vec::new();
    let index = index
        .into_iter()
        .map(|((lemma, pos), offsets): ((String, Pos), Vec<u64>)| {
            let ids = offsets
                .into_iter()
                .map(|off| {
                    true_id
                        .get(&(pos, off))
                        .copied()
                        .ok_or_else(|| LoadError::DanglingPointer {
                            from: format!("index entry {lemma} ({pos})"),
                            target: SynsetId::new(pos, off).to_string(),
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(((lemma, pos), ids))
        })
        .collect::<Result<BTreeMap<_, _>, LoadError>>()?;

    let mut synsets = BTreeMap::new();
    for s in raw.values() {
        let mut pointers = Vec::with_capacity(s.pointers.len());
        for p in &s.pointers {
            if !loaded.contains(&p.file_pos) {
                diagnostics.push(format!(
                    "dropped pointer {} {} -> {}:{:08} (data.{} not loaded)",
                    s.id,
                    p.kind.symbol(),
                    p.file_pos,
                    p.offset,
                    p.file_pos.file_suffix()
                ));
                continue;
            }
            let target = true_id
                .get(&(p.file_pos, p.offset))
                .copied()
                .ok_or_else(|| LoadError::DanglingPointer {
                    from: s.id.to_string(),
                    target: format!("{}:{:08}", p.file_pos, p.offset),
                })?;
            pointers.push(Pointer {
                kind: p.kind.clone(),
                target,
                source_word: p.source_word,
                target_word: p.target_word,
            });
        }
        synsets.insert(
            s.id,
            Synset {
                id: s.id,
                lemmas: s.lemmas.clone(),
                gloss: s.gloss.clone(),
                examples: s.examples.clone(),
                pointers,
            },
        );
    }

    LexicalDatabase::assemble(synsets, index, release, diagnostics)
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Yields `(line number, byte offset, text)` for every non-empty line.
fn lines(bytes: &[u8]) -> impl Iterator<Item = (usize, u64, String)> + '_ {
    let mut offset = 0u64;
    bytes.split(|b| *b == b'\n').enumerate().filter_map(move |(i, line)| {
        let start = offset;
        offset += line.len() as u64 + 1;
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.is_empty() {
            return None;
        }
        Some((i + 1, start, String::from_utf8_lossy(line).into_owned()))
    })
}

fn is_license_line(line: &str) -> bool {
    line.starts_with("  ")
}

fn release_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"WordNet\s+(\d+(?:\.\d+)*)").unwrap())
}

struct LineCtx<'a> {
    path: &'a Path,
    line: usize,
    byte: u64,
}

impl LineCtx<'_> {
    fn err(&self, reason: impl Into<String>) -> LoadError {
        LoadError::MalformedLine {
            path: self.path.to_path_buf(),
            line: self.line,
            byte: self.byte,
            reason: reason.into(),
        }
    }
}

fn parse_data_file(path: &Path, file_pos: Pos, release: &mut Option<String>) -> Result<Vec<RawSynset>, LoadError> {
    let bytes = read(path)?;
    let mut out = Vec::new();
    for (line, byte, text) in lines(&bytes) {
        if is_license_line(&text) {
            if release.is_none() {
                if let Some(c) = release_pattern().captures(&text) {
                    *release = Some(c[1].to_string());
                }
            }
            continue;
        }
        let ctx = LineCtx { path, line, byte };
        out.push(parse_data_line(&text, file_pos, &ctx)?);
    }
    Ok(out)
}

fn parse_data_line(text: &str, file_pos: Pos, ctx: &LineCtx) -> Result<RawSynset, LoadError> {
    let (fields, gloss) = match text.split_once('|') {
        Some((f, g)) => (f, g.trim()),
        None => (text, ""),
    };
    let mut tok = fields.split_ascii_whitespace();
    let mut next = |what: &str| tok.next().ok_or_else(|| ctx.err(format!("missing {what}")));

    let offset_str = next("synset_offset")?;
    let offset: u64 = offset_str
        .parse()
        .map_err(|_| ctx.err(format!("bad synset_offset {offset_str:?}")))?;
    if offset != ctx.byte {
        return Err(ctx.err(format!(
            "synset_offset {offset} does not match byte position {}",
            ctx.byte
        )));
    }
    let lex_filenum = next("lex_filenum")?;
    if lex_filenum.parse::<u32>().is_err() {
        return Err(ctx.err(format!("bad lex_filenum {lex_filenum:?}")));
    }
    let ss_type = next("ss_type")?;
    let pos = ss_type
        .parse::<Pos>()
        .map_err(|_| ctx.err(format!("bad ss_type {ss_type:?}")))?;
    if pos.file_pos() != file_pos {
        return Err(ctx.err(format!("ss_type {pos} in data.{} file", file_pos.file_suffix())));
    }
    let w_cnt_str = next("w_cnt")?;
    let w_cnt = usize::from_str_radix(w_cnt_str, 16).map_err(|_| ctx.err(format!("bad w_cnt {w_cnt_str:?}")))?;
    if w_cnt == 0 {
        return Err(ctx.err("synset with no words"));
    }
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = next("word")?;
        let lex_id = next("lex_id")?;
        if u8::from_str_radix(lex_id, 16).is_err() {
            return Err(ctx.err(format!("bad lex_id {lex_id:?}")));
        }
        lemmas.push(strip_adj_marker(word).to_string());
    }
    let p_cnt_str = next("p_cnt")?;
    let p_cnt: usize = p_cnt_str
        .parse()
        .map_err(|_| ctx.err(format!("bad p_cnt {p_cnt_str:?}")))?;
    let mut pointers = Vec::with_capacity(p_cnt);
    for _ in 0..p_cnt {
        let symbol = next("pointer_symbol")?;
        let target = next("pointer offset")?;
        let target: u64 = target
            .parse()
            .map_err(|_| ctx.err(format!("bad pointer offset {target:?}")))?;
        let tpos = next("pointer pos")?;
        let tpos = tpos
            .parse::<Pos>()
            .map_err(|_| ctx.err(format!("bad pointer pos {tpos:?}")))?;
        let st = next("pointer source/target")?;
        if st.len() != 4 {
            return Err(ctx.err(format!("bad source/target {st:?}")));
        }
        let source_word = u8::from_str_radix(&st[..2], 16).map_err(|_| ctx.err(format!("bad source/target {st:?}")))?;
        let target_word = u8::from_str_radix(&st[2..], 16).map_err(|_| ctx.err(format!("bad source/target {st:?}")))?;
        pointers.push(RawPointer {
            kind: PointerKind::from_symbol(symbol),
            file_pos: tpos.file_pos(),
            offset: target,
            source_word,
            target_word,
        });
    }
    // verb frames follow the pointers; they are not used

    let (gloss, examples) = split_gloss(gloss);
    Ok(RawSynset {
        id: SynsetId::new(pos, offset),
        lemmas,
        gloss,
        examples,
        pointers,
    })
}

/// Adjective syntactic markers: `(a)`, `(p)`, `(ip)`.
fn strip_adj_marker(word: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(w) = word.strip_suffix(marker) {
            return w;
        }
    }
    word
}

fn parse_index_file(path: &Path, file_pos: Pos) -> Result<Vec<(String, Vec<u64>)>, LoadError> {
    let bytes = read(path)?;
    let mut out = Vec::new();
    for (line, byte, text) in lines(&bytes) {
        if is_license_line(&text) {
            continue;
        }
        let ctx = LineCtx { path, line, byte };
        out.push(parse_index_line(&text, file_pos, &ctx)?);
    }
    Ok(out)
}

fn parse_index_line(text: &str, file_pos: Pos, ctx: &LineCtx) -> Result<(String, Vec<u64>), LoadError> {
    let tok: Vec<&str> = text.split_ascii_whitespace().collect();
    let get = |i: usize, what: &str| tok.get(i).copied().ok_or_else(|| ctx.err(format!("missing {what}")));
    let lemma = normalize_lemma(get(0, "lemma")?);
    let pos = get(1, "pos")?;
    if pos.parse::<Pos>().map(Pos::file_pos) != Ok(file_pos) {
        return Err(ctx.err(format!("pos {pos:?} in index.{} file", file_pos.file_suffix())));
    }
    let number = |i: usize, what: &str| -> Result<usize, LoadError> {
        let s = get(i, what)?;
        s.parse().map_err(|_| ctx.err(format!("bad {what} {s:?}")))
    };
    let synset_cnt = number(2, "synset_cnt")?;
    let p_cnt = number(3, "p_cnt")?;
    // skip pointer symbols, sense_cnt and tagsense_cnt
    let first_offset = 4 + p_cnt + 2;
    if tok.len() < first_offset {
        return Err(ctx.err("line ends before synset offsets"));
    }
    let offsets = tok[first_offset..]
        .iter()
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| ctx.err(format!("bad synset_offset {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if offsets.len() != synset_cnt {
        return Err(ctx.err(format!("synset_cnt {synset_cnt} but {} offsets", offsets.len())));
    }
    Ok((lemma, offsets))
}
