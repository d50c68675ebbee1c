//! Nominal Krippendorff's alpha, from raw units and from annotator labels.

use lexispec::corpus::{krippendorff_alpha, load_corpus, nominal_alpha, AlphaInput, PairKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // four items, two coders each; one disagreement
    let units = [vec!["a", "a"], vec!["a", "b"], vec!["b", "b"], vec!["b", "b"]];
    println!("worked example: {:.4}", nominal_alpha(&units)?);

    let mut input = AlphaInput::new();
    for (annotator, item, label) in [
        ("ann", "i1", 1),
        ("bob", "i1", 1),
        ("ann", "i2", 2),
        ("bob", "i2", 2),
        ("cy", "i2", 1),
    ] {
        input.insert(annotator, item, label);
    }
    println!("three annotators, one missing cell: {:.4}", krippendorff_alpha(&input)?);

    let corpus = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/sample.tsv");
    let records = load_corpus(&corpus)?;
    for kind in PairKind::ALL {
        let input = AlphaInput::from_records(&records, kind);
        match krippendorff_alpha(&input) {
            Ok(a) => println!("{kind}: {a:.3} over {} items", input.items().len()),
            Err(e) => println!("{kind}: {e}"),
        }
    }
    Ok(())
}
