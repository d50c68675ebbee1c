//! HTTP/JSON service over the shared database and one annotation session.
//!
//! The database and graph are immutable and shared; every mutation goes
//! through one mutex that validates, appends to the event log and only then
//! updates the in-memory state.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path as FsPath, PathBuf};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{analyze, attach_specificity, render_report, EmotionLabel, PairKind, ParallelRecord, ReportFormat};
use crate::hierarchy::HypernymGraph;
use crate::session::{
    AnnotationEvent, ApplyError, EventLog, EventPayload, ParaphraseMode, SessionError, SessionHeader, SessionState,
    Side,
};
use crate::views::{self, QueryError, API_SCHEMA_VERSION};
use crate::wordnet::{LexicalDatabase, SenseKey};

pub const STORE_ENV: &str = "LEXISPEC_STORE";
pub const DEFAULT_STORE: &str = "lexispec-store";
pub const DEFAULT_SESSION: &str = "default";

/// The store directory: the environment variable wins over the flag.
pub fn resolve_store_dir(flag: Option<PathBuf>) -> PathBuf {
    std::env::var_os(STORE_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(flag)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_STORE))
}

pub fn session_log_path(store: &FsPath, session: &str) -> PathBuf {
    store.join(format!("{session}.jsonl"))
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("address {addr} is already in use")]
    AddressInUse { addr: String },
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("session store is corrupt: {0}")]
    StoreCorrupt(#[source] SessionError),
    #[error(transparent)]
    Session(SessionError),
}

impl From<SessionError> for ServeError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::StoreCorrupt { .. } => ServeError::StoreCorrupt(e),
            other => ServeError::Session(other),
        }
    }
}

#[derive(Debug)]
struct Session {
    log: EventLog,
    state: SessionState,
}

/// Shared service state.
#[derive(Debug)]
pub struct AppState {
    pub db: Arc<LexicalDatabase>,
    pub graph: Arc<HypernymGraph>,
    session: Mutex<Session>,
}

impl AppState {
    /// Opens (replaying) or creates the session log under `store`.
    pub fn open(
        db: Arc<LexicalDatabase>,
        graph: Arc<HypernymGraph>,
        base: Vec<ParallelRecord>,
        corpus_ref: Option<String>,
        store: &FsPath,
        session_id: &str,
        fsync: bool,
    ) -> Result<Self, ServeError> {
        let path = session_log_path(store, session_id);
        let (log, state) = if path.exists() {
            let (log, session) = EventLog::open(&path, fsync)?;
            if session.corpus_ref != corpus_ref {
                log::warn!(
                    "session {} was recorded against corpus {:?}, now serving {:?}",
                    session.session_id,
                    session.corpus_ref,
                    corpus_ref
                );
            }
            let state = SessionState::from_events(base, &session.events).map_err(|(seq, e)| {
                ServeError::StoreCorrupt(SessionError::StoreCorrupt {
                    path: path.clone(),
                    line: seq as usize + 1,
                    reason: format!("event {seq} does not apply: {e}"),
                })
            })?;
            log::info!("replayed {} events from {}", session.events.len(), path.display());
            (log, state)
        } else {
            std::fs::create_dir_all(store).map_err(|source| {
                ServeError::Session(SessionError::Io {
                    path: store.to_path_buf(),
                    source,
                })
            })?;
            let log = EventLog::create(&path, &SessionHeader::new(session_id, corpus_ref), fsync)?;
            (log, SessionState::new(base))
        };
        Ok(AppState {
            db,
            graph,
            session: Mutex::new(Session { log, state }),
        })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Session> {
        // a panic while holding the lock cannot leave the log half-applied:
        // state only changes after a successful append
        self.session.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Current records with specificity attached.
    pub fn records(&self) -> Vec<ParallelRecord> {
        let mut records = self.lock().state.records().to_vec();
        attach_specificity(&mut records, &self.db, &self.graph);
        records
    }

    pub fn record(&self, id: &str) -> Option<ParallelRecord> {
        let mut record = self.lock().state.record(id).cloned()?;
        attach_specificity(std::slice::from_mut(&mut record), &self.db, &self.graph);
        Some(record)
    }

    pub fn report(&self, format: ReportFormat) -> String {
        let records = self.lock().state.records().to_vec();
        let (_, report) = analyze(&records, &self.db, &self.graph);
        render_report(&report, format)
    }

    /// Validates, persists, then applies one event.
    pub fn submit(&self, record_id: &str, payload: EventPayload) -> Result<AnnotationEvent, ApiError> {
        self.submit_with(|_| (record_id.to_string(), payload))
    }

    /// Like `submit`, but builds the event under the writer lock. `build` gets
    /// a generator of unused record ids, so concurrent requests never race
    /// for the same generated id.
    fn submit_with<F>(&self, build: F) -> Result<AnnotationEvent, ApiError>
    where
        F: FnOnce(&dyn Fn(&str) -> String) -> (String, EventPayload),
    {
        let mut session = self.lock();
        let (record_id, payload) = {
            let current = &*session;
            let fresh = |stem: &str| {
                let mut n = current.log.next_seq();
                loop {
                    let id = format!("{stem}{n}");
                    if !current.state.contains(&id) {
                        return id;
                    }
                    n += 1;
                }
            };
            build(&fresh)
        };
        session.state.check(&record_id, &payload)?;
        let event = session
            .log
            .append(&record_id, payload)
            .map_err(|e| ApiError::internal(e.to_string()))?;
        session
            .state
            .apply(&event.record_id, &event.payload)
            .map_err(|e| ApiError::internal(format!("persisted event {} failed to apply: {e}", event.seq)))?;
        Ok(event)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "bad_request",
            message: message.into(),
        }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            code: "not_found",
            message: message.into(),
        }
    }

    pub fn conflict(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::CONFLICT,
            code: "conflict",
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "internal",
            message: message.into(),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::BadInput(m) => ApiError::bad_request(m),
            QueryError::NotFound(m) => ApiError::not_found(m),
        }
    }
}

impl From<ApplyError> for ApiError {
    fn from(e: ApplyError) -> Self {
        match e {
            ApplyError::UnknownRecord(_) => ApiError::not_found(e.to_string()),
            ApplyError::DuplicateRecord(_) | ApplyError::DuplicateIdempotencyKey(_) => {
                ApiError::conflict(e.to_string())
            }
            ApplyError::Invalid(_) => ApiError::bad_request(e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    #[serde(rename = "schemaVersion")]
    schema_version: u32,
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = views::render_json(&ErrorBody {
            schema_version: API_SCHEMA_VERSION,
            error: ErrorDetail {
                code: self.code,
                message: &self.message,
            },
        });
        (self.status, json_headers(), body).into_response()
    }
}

fn json_headers() -> [(header::HeaderName, HeaderValue); 1] {
    [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))]
}

fn json<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (status, json_headers(), views::render_json(value)).into_response()
}

type ApiResult = Result<Response, ApiError>;
type Shared = State<Arc<AppState>>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/synsets", get(get_synsets))
        .route("/synset/{key}", get(get_synset))
        .route("/specificity", get(get_specificity))
        .route("/sisters/{key}", get(get_sisters))
        .route("/hyponyms/{key}", get(get_hyponyms))
        .route("/paths/{key}", get(get_paths))
        .route("/records", get(get_records).post(post_record))
        .route("/records/{id}", get(get_record))
        .route("/records/{id}/paraphrase", axum::routing::post(post_paraphrase))
        .route("/records/{id}/emotion", axum::routing::post(post_emotion))
        .route("/records/{id}/synset", axum::routing::post(post_synset))
        .route("/report", get(get_report))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .layer(axum::middleware::map_response(stamp_schema_version))
        .with_state(state)
}

async fn stamp_schema_version(mut response: Response) -> Response {
    response
        .headers_mut()
        .insert("x-schema-version", HeaderValue::from(API_SCHEMA_VERSION));
    response
}

fn param<'a>(q: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    q.get(name)
        .map(String::as_str)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ApiError::bad_request(format!("missing query parameter {name:?}")))
}

async fn get_synsets(State(s): Shared, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let lemma = param(&q, "lemma")?;
    let pos = views::parse_pos(param(&q, "pos")?)?;
    Ok(json(StatusCode::OK, &views::synsets_view(&s.db, lemma, pos)?))
}

async fn get_synset(State(s): Shared, Path(key): Path<String>) -> ApiResult {
    Ok(json(StatusCode::OK, &views::synset_view(&s.db, &key)?))
}

async fn get_specificity(State(s): Shared, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let view = views::specificity_view(&s.db, &s.graph, param(&q, "a")?, param(&q, "b")?)?;
    Ok(json(StatusCode::OK, &view))
}

async fn get_sisters(State(s): Shared, Path(key): Path<String>) -> ApiResult {
    Ok(json(
        StatusCode::OK,
        &views::neighbours_view(&s.db, &s.graph, &key, false)?,
    ))
}

async fn get_hyponyms(State(s): Shared, Path(key): Path<String>) -> ApiResult {
    Ok(json(
        StatusCode::OK,
        &views::neighbours_view(&s.db, &s.graph, &key, true)?,
    ))
}

async fn get_paths(State(s): Shared, Path(key): Path<String>) -> ApiResult {
    Ok(json(StatusCode::OK, &views::paths_view(&s.db, &s.graph, &key)?))
}

#[derive(Serialize)]
struct RecordsView {
    #[serde(rename = "schemaVersion")]
    schema_version: u32,
    records: Vec<ParallelRecord>,
}

#[derive(Serialize)]
struct RecordView {
    #[serde(rename = "schemaVersion")]
    schema_version: u32,
    record: ParallelRecord,
}

#[derive(Serialize)]
struct MutationView {
    #[serde(rename = "schemaVersion")]
    schema_version: u32,
    event: AnnotationEvent,
    record: ParallelRecord,
}

async fn get_records(State(s): Shared) -> ApiResult {
    Ok(json(
        StatusCode::OK,
        &RecordsView {
            schema_version: API_SCHEMA_VERSION,
            records: s.records(),
        },
    ))
}

async fn get_record(State(s): Shared, Path(id): Path<String>) -> ApiResult {
    let record = s
        .record(&id)
        .ok_or_else(|| ApiError::not_found(format!("unknown record {id:?}")))?;
    Ok(json(
        StatusCode::OK,
        &RecordView {
            schema_version: API_SCHEMA_VERSION,
            record,
        },
    ))
}

async fn get_report(State(s): Shared, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let format: ReportFormat = match q.get("format") {
        None => ReportFormat::Json,
        Some(f) => f.parse().map_err(ApiError::bad_request)?,
    };
    let content_type = match format {
        ReportFormat::Json => "application/json",
        ReportFormat::Text => "text/plain; charset=utf-8",
    };
    Ok((
        StatusCode::OK,
        [(header::CONTENT_TYPE, HeaderValue::from_static(content_type))],
        s.report(format),
    )
        .into_response())
}

fn mutation(s: &AppState, status: StatusCode, event: AnnotationEvent, shown: &str) -> ApiResult {
    let record = s
        .record(shown)
        .ok_or_else(|| ApiError::internal(format!("record {shown:?} missing after event {}", event.seq)))?;
    Ok(json(
        status,
        &MutationView {
            schema_version: API_SCHEMA_VERSION,
            event,
            record,
        },
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewRecord {
    record_id: Option<String>,
    kind: PairKind,
    term1: SenseKey,
    sentence1: String,
    term2: SenseKey,
    sentence2: String,
}

async fn post_record(State(s): Shared, body: Result<Json<NewRecord>, JsonRejection>) -> ApiResult {
    let Json(body) = body?;
    let event = s.submit_with(|fresh| {
        let id = body.record_id.unwrap_or_else(|| fresh("rec-"));
        let payload = EventPayload::RecordCreated {
            pair_kind: body.kind,
            term1: body.term1,
            sentence1: body.sentence1,
            term2: body.term2,
            sentence2: body.sentence2,
        };
        (id, payload)
    })?;
    let id = event.record_id.clone();
    mutation(&s, StatusCode::CREATED, event, &id)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewParaphrase {
    mode: ParaphraseMode,
    synset: SenseKey,
    sentence: String,
    new_record_id: Option<String>,
    base: Option<Side>,
}

async fn post_paraphrase(
    State(s): Shared,
    Path(id): Path<String>,
    body: Result<Json<NewParaphrase>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    let source = s
        .record(&id)
        .ok_or_else(|| ApiError::not_found(format!("unknown record {id:?}")))?;
    let base = body.base.unwrap_or(body.mode.default_base());
    let base_key = match base {
        Side::First => &source.term1,
        Side::Second => &source.term2,
    };
    let base_id =
        s.db.resolve_sense_key(base_key)
            .map_err(|e| ApiError::bad_request(format!("base term {base_key} does not resolve: {e}")))?;
    let chosen =
        s.db.resolve_sense_key(&body.synset)
            .map_err(|e| ApiError::from(QueryError::from(e)))?;
    let allowed = match body.mode {
        ParaphraseMode::Sister => s.graph.sister_terms(base_id),
        ParaphraseMode::Hyponym => s.graph.direct_hyponyms(base_id),
    }
    .map_err(|e| ApiError::from(QueryError::from(e)))?;
    if !allowed.contains(&chosen) {
        let relation = match body.mode {
            ParaphraseMode::Sister => "a sister term",
            ParaphraseMode::Hyponym => "a direct hyponym",
        };
        return Err(ApiError::bad_request(format!(
            "{} is not {relation} of {base_key}",
            body.synset
        )));
    }
    let mode_name = match body.mode {
        ParaphraseMode::Sister => "sister",
        ParaphraseMode::Hyponym => "hyponym",
    };
    let event = s.submit_with(|fresh| {
        let new_record_id = body
            .new_record_id
            .unwrap_or_else(|| fresh(&format!("{id}-{mode_name}-")));
        let payload = EventPayload::ParaphraseCreated {
            new_record_id,
            mode: body.mode,
            base,
            synset: body.synset,
            sentence: body.sentence,
        };
        (id.clone(), payload)
    })?;
    let EventPayload::ParaphraseCreated { new_record_id, .. } = &event.payload else {
        return Err(ApiError::internal("paraphrase produced an unexpected event"));
    };
    let new_id = new_record_id.clone();
    mutation(&s, StatusCode::CREATED, event, &new_id)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewLabel {
    annotator: String,
    label: EmotionLabel,
    idempotency_key: Option<String>,
}

async fn post_emotion(
    State(s): Shared,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Result<Json<NewLabel>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    let from_header = match headers.get("idempotency-key") {
        None => None,
        Some(v) => Some(
            v.to_str()
                .map_err(|_| ApiError::bad_request("Idempotency-Key header is not valid text"))?
                .to_string(),
        ),
    };
    let key = match (from_header, body.idempotency_key) {
        (Some(h), Some(b)) if h != b => {
            return Err(ApiError::bad_request(
                "Idempotency-Key header and idempotency_key field differ",
            ))
        }
        (h, b) => h.or(b),
    };
    let event = s.submit(
        &id,
        EventPayload::EmotionLabeled {
            annotator: body.annotator,
            label: body.label,
            idempotency_key: key,
        },
    )?;
    mutation(&s, StatusCode::OK, event, &id)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewChoice {
    side: Side,
    sense_key: SenseKey,
}

async fn post_synset(
    State(s): Shared,
    Path(id): Path<String>,
    body: Result<Json<NewChoice>, JsonRejection>,
) -> ApiResult {
    let Json(body) = body?;
    let event = s.submit(
        &id,
        EventPayload::SynsetChosen {
            side: body.side,
            sense_key: body.sense_key,
        },
    )?;
    mutation(&s, StatusCode::OK, event, &id)
}

/// What `serve` needs; loading the database and corpus is the caller's job.
#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub db: Arc<LexicalDatabase>,
    pub graph: Arc<HypernymGraph>,
    pub records: Vec<ParallelRecord>,
    pub corpus_ref: Option<String>,
    pub listen: String,
    pub store: PathBuf,
    pub session: String,
    pub fsync: bool,
}

/// A running service. Dropping the handle shuts the server down gracefully.
#[derive(Debug)]
pub struct ServiceHandle {
    addr: SocketAddr,
    shutdown: tokio::sync::oneshot::Sender<()>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl ServiceHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub async fn shutdown(self) -> std::io::Result<()> {
        let _ = self.shutdown.send(());
        self.task.await.map_err(std::io::Error::other)?
    }

    /// Runs until the server stops on its own.
    pub async fn wait(self) -> std::io::Result<()> {
        let ServiceHandle { shutdown, task, .. } = self;
        let result = task.await.map_err(std::io::Error::other)?;
        drop(shutdown);
        result
    }
}

pub async fn serve(config: ServeConfig) -> Result<ServiceHandle, ServeError> {
    let state = AppState::open(
        config.db,
        config.graph,
        config.records,
        config.corpus_ref,
        &config.store,
        &config.session,
        config.fsync,
    )?;
    let listener = tokio::net::TcpListener::bind(&config.listen)
        .await
        .map_err(|source| match source.kind() {
            std::io::ErrorKind::AddrInUse => ServeError::AddressInUse {
                addr: config.listen.clone(),
            },
            _ => ServeError::Bind {
                addr: config.listen.clone(),
                source,
            },
        })?;
    let addr = listener.local_addr().map_err(|source| ServeError::Bind {
        addr: config.listen.clone(),
        source,
    })?;
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let app = router(Arc::new(state));
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async move {
                let _ = rx.await;
            })
            .await
    });
    Ok(ServiceHandle {
        addr,
        shutdown: tx,
        task,
    })
}
