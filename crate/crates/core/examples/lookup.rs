//! List the senses of a lemma from a WordNet directory (or the bundled mini
//! database) in index order.
//!
//! cargo run --example lookup -- rip [WORDNET_DIR]

use std::path::PathBuf;

use lexispec::wordnet::{load_wndb, Pos};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let lemma = args.next().unwrap_or_else(|| "rip".into());
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini_wndb"));

    let db = load_wndb(&dir)?;
    println!("WordNet release {}", db.release().unwrap_or("unknown"));
    for s in db.lookup_synsets(&lemma, Pos::Verb) {
        println!("{:<14} {}  [{}]", db.display_key(s.id), s.id, s.lemmas.join(", "));
        println!("    {}", s.gloss);
    }
    Ok(())
}
