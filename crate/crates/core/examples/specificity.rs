//! Decide which of two senses is more specific and show the evidence.
//!
//! cargo run --example specificity -- grade.v.01 criticize.v.01

use lexispec::hierarchy::build_graph;
use lexispec::specificity::{compare_specificity, SpecificityEvidence};
use lexispec::wordnet::{load_fixture, SynsetRef};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let a = args.next().unwrap_or_else(|| "grade.v.01".into());
    let b = args.next().unwrap_or_else(|| "criticize.v.01".into());

    let db = load_fixture(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini.wn"))?;
    let graph = build_graph(&db)?;
    let ia = db.resolve(&a.parse::<SynsetRef>()?)?;
    let ib = db.resolve(&b.parse::<SynsetRef>()?)?;

    let outcome = compare_specificity(&graph, ia, ib)?;
    println!("{a} vs {b}: {}", outcome.verdict);
    match &outcome.evidence {
        SpecificityEvidence::DirectRelation { chain } => {
            let names: Vec<String> = chain.iter().map(|id| db.display_key(*id)).collect();
            println!("one sense is a hypernym of the other: {}", names.join(" -> "));
        }
        SpecificityEvidence::CommonHypernym { lch, representative } => {
            for c in lch {
                println!(
                    "shared hypernym {} at {} hops from {a} and {} from {b}",
                    db.display_key(c.ancestor),
                    c.hops_first.0,
                    c.hops_second.0
                );
            }
            println!("decided by {}", db.display_key(representative.ancestor));
        }
        SpecificityEvidence::NoCommonHypernym => println!("the senses live in separate trees"),
    }
    Ok(())
}
