//! Annotation sessions persisted as one append-only JSON-lines log per
//! session. The first line is the session header; every following line is an
//! event whose `seq` continues 1, 2, 3, ...

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{EmotionLabel, PairKind, ParallelRecord};
use crate::wordnet::SenseKey;

pub const SESSION_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("event log {} is corrupt at line {line}: {reason}", .path.display())]
    StoreCorrupt { path: PathBuf, line: usize, reason: String },
    #[error("event log {} already exists", .0.display())]
    AlreadyExists(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SessionError + '_ {
    move |source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionHeader {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    pub corpus_ref: Option<String>,
}

impl SessionHeader {
    pub fn new(session_id: impl Into<String>, corpus_ref: Option<String>) -> Self {
        SessionHeader {
            schema_version: SESSION_SCHEMA_VERSION,
            session_id: session_id.into(),
            created_at: Utc::now(),
            corpus_ref,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParaphraseMode {
    /// A literal at the metaphor's level: yields a same-specificity pair.
    Sister,
    /// A direct hyponym of a literal: yields a more-specific-literal pair.
    Hyponym,
}

impl ParaphraseMode {
    pub fn pair_kind(self) -> PairKind {
        match self {
            ParaphraseMode::Sister => PairKind::MetaphorVsSameSpecificityLiteral,
            ParaphraseMode::Hyponym => PairKind::LiteralVsMoreSpecificLiteral,
        }
    }

    /// Side of the source record kept as the first sentence of the new pair.
    pub fn default_base(self) -> Side {
        match self {
            ParaphraseMode::Sister => Side::First,
            ParaphraseMode::Hyponym => Side::Second,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventPayload {
    RecordCreated {
        pair_kind: PairKind,
        term1: SenseKey,
        sentence1: String,
        term2: SenseKey,
        sentence2: String,
    },
    SynsetChosen {
        side: Side,
        sense_key: SenseKey,
    },
    ParaphraseCreated {
        new_record_id: String,
        mode: ParaphraseMode,
        base: Side,
        synset: SenseKey,
        sentence: String,
    },
    EmotionLabeled {
        annotator: String,
        label: EmotionLabel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        idempotency_key: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationEvent {
    pub seq: u64,
    pub record_id: String,
    #[serde(flatten)]
    pub payload: EventPayload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotationSession {
    pub session_id: String,
    pub created_at: DateTime<Utc>,
    pub corpus_ref: Option<String>,
    pub events: Vec<AnnotationEvent>,
    /// Problems that were tolerated while reading, such as a torn final line.
    pub warnings: Vec<String>,
}

struct Parsed {
    session: AnnotationSession,
    /// Byte length of the complete lines.
    valid_len: u64,
}

fn parse_log(path: &Path) -> Result<Parsed, SessionError> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    let corrupt = |line: usize, reason: String| SessionError::StoreCorrupt {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines: Vec<&[u8]> = bytes.split(|b| *b == b'\n').collect();
    // split leaves one trailing segment: empty after a final newline, otherwise a torn write
    let tail = lines.pop().unwrap_or_default();
    let mut warnings = Vec::new();
    if !tail.is_empty() {
        let msg = format!(
            "dropped torn final line {} of {} ({} bytes without newline)",
            lines.len() + 1,
            path.display(),
            tail.len()
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let valid_len = (bytes.len() - tail.len()) as u64;
    let Some(first) = lines.first() else {
        return Err(corrupt(1, "missing session header".into()));
    };
    let header: SessionHeader = serde_json::from_slice(first).map_err(|e| corrupt(1, format!("bad header: {e}")))?;
    if header.schema_version != SESSION_SCHEMA_VERSION {
        return Err(corrupt(
            1,
            format!("unsupported schemaVersion {}", header.schema_version),
        ));
    }
    let mut events = Vec::with_capacity(lines.len().saturating_sub(1));
    for (i, raw) in lines.iter().enumerate().skip(1) {
        let line = i + 1;
        let event: AnnotationEvent = serde_json::from_slice(raw).map_err(|e| corrupt(line, e.to_string()))?;
        let expected = events.len() as u64 + 1;
        if event.seq != expected {
            return Err(corrupt(line, format!("expected seq {expected}, found {}", event.seq)));
        }
        events.push(event);
    }
    Ok(Parsed {
        session: AnnotationSession {
            session_id: header.session_id,
            created_at: header.created_at,
            corpus_ref: header.corpus_ref,
            events,
            warnings,
        },
        valid_len,
    })
}

/// Reads a session log without modifying it.
pub fn replay_session(path: &Path) -> Result<AnnotationSession, SessionError> {
    parse_log(path).map(|p| p.session)
}

/// Writer for one session log.
#[derive(Debug)]
pub struct EventLog {
    path: PathBuf,
    file: File,
    next_seq: u64,
    fsync: bool,
}

impl EventLog {
    pub fn create(path: &Path, header: &SessionHeader, fsync: bool) -> Result<Self, SessionError> {
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(path)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::AlreadyExists => SessionError::AlreadyExists(path.to_path_buf()),
                _ => SessionError::Io {
                    path: path.to_path_buf(),
                    source: e,
                },
            })?;
        let mut line = serde_json::to_vec(header).expect("header serializes");
        line.push(b'\n');
        file.write_all(&line).map_err(io_err(path))?;
        if fsync {
            file.sync_all().map_err(io_err(path))?;
        }
        Ok(EventLog {
            path: path.to_path_buf(),
            file,
            next_seq: 1,
            fsync,
        })
    }

    /// Opens an existing log for appending. A torn final line is dropped and
    /// cut off the file so the next append starts on a clean line.
    pub fn open(path: &Path, fsync: bool) -> Result<(Self, AnnotationSession), SessionError> {
        let parsed = parse_log(path)?;
        let file = OpenOptions::new().append(true).open(path).map_err(io_err(path))?;
        let len = file.metadata().map_err(io_err(path))?.len();
        if len != parsed.valid_len {
            file.set_len(parsed.valid_len).map_err(io_err(path))?;
            file.sync_all().map_err(io_err(path))?;
        }
        let log = EventLog {
            path: path.to_path_buf(),
            file,
            next_seq: parsed.session.events.len() as u64 + 1,
            fsync,
        };
        Ok((log, parsed.session))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    /// Writes the event as one line and returns it once it is on disk
    /// (or in the page cache when fsync is off).
    pub fn append(&mut self, record_id: &str, payload: EventPayload) -> Result<AnnotationEvent, SessionError> {
        let event = AnnotationEvent {
            seq: self.next_seq,
            record_id: record_id.to_string(),
            payload,
        };
        let mut line = serde_json::to_vec(&event).expect("event serializes");
        line.push(b'\n');
        self.file.write_all(&line).map_err(io_err(&self.path))?;
        if self.fsync {
            self.file.sync_data().map_err(io_err(&self.path))?;
        }
        self.next_seq += 1;
        Ok(event)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("unknown record {0:?}")]
    UnknownRecord(String),
    #[error("record {0:?} already exists")]
    DuplicateRecord(String),
    #[error("idempotency key {0:?} was already used")]
    DuplicateIdempotencyKey(String),
    #[error("{0}")]
    Invalid(String),
}

/// Current records: the base corpus with every event applied in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionState {
    records: Vec<ParallelRecord>,
    by_id: HashMap<String, usize>,
    idempotency_keys: HashSet<String>,
}

impl SessionState {
    pub fn new(base: Vec<ParallelRecord>) -> Self {
        let by_id = base.iter().enumerate().map(|(i, r)| (r.record_id.clone(), i)).collect();
        SessionState {
            records: base,
            by_id,
            idempotency_keys: HashSet::new(),
        }
    }

    pub fn from_events<'a>(
        base: Vec<ParallelRecord>,
        events: impl IntoIterator<Item = &'a AnnotationEvent>,
    ) -> Result<Self, (u64, ApplyError)> {
        let mut state = SessionState::new(base);
        for e in events {
            state.apply(&e.record_id, &e.payload).map_err(|err| (e.seq, err))?;
        }
        Ok(state)
    }

    pub fn records(&self) -> &[ParallelRecord] {
        &self.records
    }

    pub fn record(&self, id: &str) -> Option<&ParallelRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// Checks that `payload` would apply cleanly, without changing anything.
    pub fn check(&self, record_id: &str, payload: &EventPayload) -> Result<(), ApplyError> {
        let existing = |id: &str| self.record(id).ok_or_else(|| ApplyError::UnknownRecord(id.to_string()));
        let fresh = |id: &str| {
            if id.trim().is_empty() {
                Err(ApplyError::Invalid("record id must not be empty".into()))
            } else if self.contains(id) {
                Err(ApplyError::DuplicateRecord(id.to_string()))
            } else {
                Ok(())
            }
        };
        let sentence = |s: &str| {
            if s.trim().is_empty() {
                Err(ApplyError::Invalid("sentence must not be empty".into()))
            } else {
                Ok(())
            }
        };
        match payload {
            EventPayload::RecordCreated {
                sentence1, sentence2, ..
            } => {
                fresh(record_id)?;
                sentence(sentence1)?;
                sentence(sentence2)
            }
            EventPayload::SynsetChosen { .. } => existing(record_id).map(drop),
            EventPayload::ParaphraseCreated {
                new_record_id,
                sentence: s,
                ..
            } => {
                existing(record_id)?;
                fresh(new_record_id)?;
                sentence(s)
            }
            EventPayload::EmotionLabeled {
                annotator,
                idempotency_key,
                ..
            } => {
                existing(record_id)?;
                if annotator.trim().is_empty() {
                    return Err(ApplyError::Invalid("annotator must not be empty".into()));
                }
                match idempotency_key {
                    Some(k) if self.idempotency_keys.contains(k) => Err(ApplyError::DuplicateIdempotencyKey(k.clone())),
                    _ => Ok(()),
                }
            }
        }
    }

    pub fn apply(&mut self, record_id: &str, payload: &EventPayload) -> Result<(), ApplyError> {
        self.check(record_id, payload)?;
        match payload.clone() {
            EventPayload::RecordCreated {
                pair_kind,
                term1,
                sentence1,
                term2,
                sentence2,
            } => self.push(ParallelRecord::new(
                record_id, pair_kind, term1, sentence1, term2, sentence2,
            )),
            EventPayload::SynsetChosen { side, sense_key } => {
                let r = self.record_mut(record_id);
                match side {
                    Side::First => r.term1 = sense_key,
                    Side::Second => r.term2 = sense_key,
                }
                r.specificity = None;
            }
            EventPayload::ParaphraseCreated {
                new_record_id,
                mode,
                base,
                synset,
                sentence,
            } => {
                let source = self.record(record_id).expect("checked");
                let (term, text) = match base {
                    Side::First => (source.term1.clone(), source.sentence1.clone()),
                    Side::Second => (source.term2.clone(), source.sentence2.clone()),
                };
                self.push(ParallelRecord::new(
                    new_record_id,
                    mode.pair_kind(),
                    term,
                    text,
                    synset,
                    sentence,
                ));
            }
            EventPayload::EmotionLabeled {
                annotator,
                label,
                idempotency_key,
            } => {
                if let Some(k) = idempotency_key {
                    self.idempotency_keys.insert(k);
                }
                // a later label by the same annotator replaces the earlier one
                self.record_mut(record_id).annotator_labels.insert(annotator, label);
            }
        }
        Ok(())
    }

    fn record_mut(&mut self, id: &str) -> &mut ParallelRecord {
        let i = self.by_id[id];
        &mut self.records[i]
    }

    fn push(&mut self, record: ParallelRecord) {
        self.by_id.insert(record.record_id.clone(), self.records.len());
        self.records.push(record);
    }
}
