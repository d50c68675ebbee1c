//! Lexical specificity of word senses in a WordNet hypernym hierarchy, and
//! the emotion statistics of metaphor/literal sentence pairs built on it.

pub mod cli;
pub mod corpus;
pub mod hierarchy;
pub mod service;
pub mod session;
pub mod specificity;
pub mod views;
pub mod wordnet;
