pub mod analytics;
pub mod assoc;
pub mod corpus;
pub mod dedup;
pub mod embeddings;
pub mod error;
pub mod matching;
pub mod sexism;
pub mod text;

pub use error::{Error, Result};
