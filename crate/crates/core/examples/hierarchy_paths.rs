//! Walk the hypernym hierarchy: every path to a root, the hop distance to
//! each ancestor, and the minimum depth.
//!
//! cargo run --example hierarchy_paths -- pan.v.01

use lexispec::hierarchy::build_graph;
use lexispec::wordnet::{load_fixture, SynsetRef};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let key = std::env::args().nth(1).unwrap_or_else(|| "pan.v.01".into());
    let db = load_fixture(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mini.wn"))?;
    let graph = build_graph(&db)?;
    let id = db.resolve(&key.parse::<SynsetRef>()?)?;

    println!("{} synsets, {} hypernym edges", graph.len(), graph.edge_count());
    for path in graph.paths_to_roots(id)? {
        let names: Vec<String> = path.iter().map(|i| db.display_key(*i)).collect();
        println!("path: {}", names.join(" -> "));
    }
    for (ancestor, hops) in graph.hypernym_closure(id)? {
        println!("  {:<16} hops: {}", db.display_key(ancestor), hops.0);
    }
    println!("minimum depth {}", graph.min_depth(id)?.0);
    Ok(())
}
