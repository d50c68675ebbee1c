//! Command-line front end. `dispatch` is the whole program minus process
//! setup, so tests can drive it with in-memory streams.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{CommandFactory, Parser, Subcommand};
use serde::Serialize;

use crate::corpus::{
    analyze, load_corpus, render_audit, render_report, AlphaSummary, PairKind, ParallelRecord, ReportFormat,
};
use crate::hierarchy::{build_graph, HypernymGraph};
use crate::service::{self, ServeConfig, DEFAULT_SESSION};
use crate::views::{self, render_json, API_SCHEMA_VERSION};
use crate::wordnet::{load_fixture, load_wndb, LexicalDatabase};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "lexispec",
    version,
    about = "Lexical specificity and emotion analysis over WordNet hierarchies"
)]
struct Cli {
    /// Directory holding WordNet data.* and index.* files
    #[arg(long, global = true, value_name = "DIR", conflicts_with = "fixture")]
    wordnet: Option<PathBuf>,
    /// Fixture file in the tab-separated synset format
    #[arg(long, global = true, value_name = "FILE")]
    fixture: Option<PathBuf>,
    /// Parallel sentence-pair corpus (TSV)
    #[arg(long, global = true, value_name = "FILE")]
    corpus: Option<PathBuf>,
    /// Output format: text or json
    #[arg(long, global = true, default_value = "text")]
    format: ReportFormat,
    /// Write machine output to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the synsets of a lemma in sense order
    Lookup {
        lemma: String,
        /// Part of speech: n, v, a, s or r
        #[arg(long, default_value = "v")]
        pos: String,
    },
    /// Compare the specificity of two senses
    Compare {
        #[arg(long, value_name = "KEY")]
        a: String,
        #[arg(long, value_name = "KEY")]
        b: String,
    },
    /// Sister terms of a sense (same-specificity paraphrase candidates)
    Sisters { key: String },
    /// Direct hyponyms of a sense (more specific paraphrase candidates)
    Hyponyms { key: String },
    /// Attach specificity to a corpus and print the summary report
    Analyze {
        /// Also write a per-pair verdict listing to FILE
        #[arg(long, value_name = "FILE")]
        audit: Option<PathBuf>,
    },
    /// Inter-annotator agreement per pair kind
    Alpha,
    /// Run the HTTP/JSON annotation service
    Serve {
        #[arg(long, value_name = "HOST:PORT", default_value = "127.0.0.1:8080")]
        listen: String,
        /// Session store directory (LEXISPEC_STORE takes precedence)
        #[arg(long, value_name = "DIR")]
        store: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_SESSION)]
        session: String,
        /// Skip fsync after each appended event
        #[arg(long)]
        no_fsync: bool,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn data(message: impl ToString) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.to_string(),
        }
    }

    fn usage(message: impl ToString) -> Self {
        let usage = Cli::command().render_usage();
        Failure {
            code: EXIT_USAGE,
            message: format!(
                "{}\n\n{usage}\n\nFor more information, try '--help'.",
                message.to_string()
            ),
        }
    }
}

/// Runs one command line. Returns the process exit status.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn load_database(cli: &Cli) -> Result<(LexicalDatabase, HypernymGraph), Failure> {
    let db = match (&cli.wordnet, &cli.fixture) {
        (Some(dir), None) => load_wndb(dir),
        (None, Some(file)) => load_fixture(file),
        _ => {
            return Err(Failure::usage(
                "exactly one of --wordnet DIR or --fixture FILE is required",
            ))
        }
    }
    .map_err(Failure::data)?;
    let graph = build_graph(&db).map_err(Failure::data)?;
    Ok((db, graph))
}

fn corpus_path(cli: &Cli) -> Result<&Path, Failure> {
    cli.corpus
        .as_deref()
        .ok_or_else(|| Failure::usage("--corpus FILE is required for this command"))
}

fn load_records(path: &Path) -> Result<Vec<ParallelRecord>, Failure> {
    load_corpus(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::data(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| Failure::data(format!("writing output: {e}"))),
    }
}

fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Lookup { lemma, pos } => {
            let (db, _) = load_database(&cli)?;
            let pos = views::parse_pos(pos).map_err(Failure::usage)?;
            let view = views::synsets_view(&db, lemma, pos).map_err(Failure::data)?;
            let text = match cli.format {
                ReportFormat::Json => render_json(&view),
                ReportFormat::Text => view.candidates.iter().map(views::synset_text).collect(),
            };
            emit(&cli, stdout, &text)
        }
        Command::Compare { a, b } => {
            let (db, graph) = load_database(&cli)?;
            let view = views::specificity_view(&db, &graph, a, b).map_err(Failure::data)?;
            let text = match cli.format {
                ReportFormat::Json => render_json(&view),
                ReportFormat::Text => views::specificity_text(&view),
            };
            emit(&cli, stdout, &text)
        }
        Command::Sisters { key } | Command::Hyponyms { key } => {
            let hyponyms = matches!(cli.command, Command::Hyponyms { .. });
            let (db, graph) = load_database(&cli)?;
            let view = views::neighbours_view(&db, &graph, key, hyponyms).map_err(Failure::data)?;
            let text = match cli.format {
                ReportFormat::Json => render_json(&view),
                ReportFormat::Text => view.candidates.iter().map(views::synset_text).collect(),
            };
            emit(&cli, stdout, &text)
        }
        Command::Analyze { audit } => {
            let path = corpus_path(&cli)?;
            let (db, graph) = load_database(&cli)?;
            let records = load_records(path)?;
            let (records, report) = analyze(&records, &db, &graph);
            if let Some(audit) = audit {
                std::fs::write(audit, render_audit(&records))
                    .map_err(|e| Failure::data(format!("{}: {e}", audit.display())))?;
            }
            emit(&cli, stdout, &render_report(&report, cli.format))
        }
        Command::Alpha => {
            let records = load_records(corpus_path(&cli)?)?;
            alpha(&cli, &records, stdout)
        }
        Command::Serve {
            listen,
            store,
            session,
            no_fsync,
        } => {
            let (db, graph) = load_database(&cli)?;
            let records = match &cli.corpus {
                Some(p) => load_records(p)?,
                None => Vec::new(),
            };
            let config = ServeConfig {
                db: Arc::new(db),
                graph: Arc::new(graph),
                records,
                corpus_ref: cli.corpus.as_ref().map(|p| p.display().to_string()),
                listen: listen.clone(),
                store: service::resolve_store_dir(store.clone()),
                session: session.clone(),
                fsync: !no_fsync,
            };
            serve_blocking(config, stdout, stderr)
        }
    }
}

#[derive(Serialize)]
struct AlphaView {
    #[serde(rename = "schemaVersion")]
    schema_version: u32,
    alpha: BTreeMap<PairKind, AlphaSummary>,
}

fn alpha(cli: &Cli, records: &[ParallelRecord], stdout: &mut dyn Write) -> Result<(), Failure> {
    let alpha: BTreeMap<PairKind, AlphaSummary> = PairKind::ALL
        .iter()
        .map(|kind| (*kind, AlphaSummary::for_kind(records, *kind)))
        .collect();
    let text = match cli.format {
        ReportFormat::Json => render_json(&AlphaView {
            schema_version: API_SCHEMA_VERSION,
            alpha: alpha.clone(),
        }),
        ReportFormat::Text => alpha
            .iter()
            .map(|(kind, a)| match (a.value, &a.error) {
                (Some(v), _) => format!("{kind}\t{v:.4}\t{} annotators\t{} items\n", a.annotators, a.items),
                (None, e) => format!("{kind}\t{}\n", e.as_deref().unwrap_or("n/a")),
            })
            .collect(),
    };
    emit(cli, stdout, &text)?;
    if alpha.values().all(|a| a.value.is_none()) {
        return Err(Failure::data("no pair kind has enough overlapping labels for alpha"));
    }
    Ok(())
}

fn serve_blocking(config: ServeConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(Failure::data)?;
    let store = config.store.clone();
    let handle = runtime.block_on(service::serve(config)).map_err(Failure::data)?;
    let _ = writeln!(stderr, "session store: {}", store.display());
    let _ = writeln!(stdout, "listening on http://{}", handle.local_addr());
    let _ = stdout.flush();
    runtime
        .block_on(async move {
            let _ = tokio::signal::ctrl_c().await;
            handle.shutdown().await
        })
        .map_err(Failure::data)
}
