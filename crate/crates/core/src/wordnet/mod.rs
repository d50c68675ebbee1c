//! WordNet synsets with their lemma index, loaded from wndb files or the
//! fixture format.

mod db;
mod fixture;
mod types;
mod wndb;

pub use db::{LexicalDatabase, LoadError, ResolveError};
pub use fixture::{load_fixture, parse_fixture, to_fixture_string};
pub use types::{
    normalize_lemma, split_gloss, IdParseError, Pointer, PointerKind, Pos, SenseKey, Synset, SynsetId, SynsetRef,
};
pub use wndb::load_wndb;
