//! Attach specificity verdicts to a sentence-pair corpus and print the
//! summary report as text and JSON.
//!
//! cargo run --example analyze_corpus -- [CORPUS.tsv]

use std::path::{Path, PathBuf};

use lexispec::corpus::{analyze, load_corpus, render_report, ReportFormat};
use lexispec::hierarchy::build_graph;
use lexispec::wordnet::load_fixture;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let corpus = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| fixtures.join("sample.tsv"));

    let db = load_fixture(&fixtures.join("mini.wn"))?;
    let graph = build_graph(&db)?;
    let records = load_corpus(&corpus)?;
    let (records, report) = analyze(&records, &db, &graph);

    print!("{}", render_report(&report, ReportFormat::Text));
    println!();
    for r in records.iter().filter(|r| !r.is_valid()) {
        println!("excluded {}: {:?}", r.record_id, r.specificity);
    }
    println!();
    print!("{}", render_report(&report, ReportFormat::Json));
    Ok(())
}
