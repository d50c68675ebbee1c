//! Candidate literal paraphrases for a metaphorical sense: sister terms keep
//! the specificity level, direct hyponyms make it more specific.
//!
//! cargo run --example paraphrase_candidates -- rip.v.04

use lexispec::hierarchy::build_graph;
use lexispec::specificity::{more_specific_candidates, same_specificity_candidates};
use lexispec::wordnet::{load_fixture, SynsetRef};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let key = std::env::args().nth(1).unwrap_or_else(|| "rip.v.04".into());
    let db = load_fixture(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini.wn"))?;
    let graph = build_graph(&db)?;
    let id = db.resolve(&key.parse::<SynsetRef>()?)?;

    let show = |title: &str, ids: std::collections::BTreeSet<_>| {
        println!("{title}:");
        for s in ids.into_iter().filter_map(|i| db.synset(i)) {
            println!("  {:<16} {}", db.display_key(s.id), s.gloss);
        }
    };
    show("same specificity", same_specificity_candidates(&graph, id)?);
    for parent in graph.direct_hypernyms(id)? {
        show(
            &format!("more specific than the literal {}", db.display_key(parent)),
            more_specific_candidates(&graph, parent)?,
        );
    }
    Ok(())
}
