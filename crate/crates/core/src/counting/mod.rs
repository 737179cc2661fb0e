//! Exact brute-force incidence counting, incidence graphs and rich-flat detection.

mod graph;
mod incidence;
mod rich;

use thiserror::Error;

pub use graph::{incidence_graph, kst_free_check, zarankiewicz_bruteforce, BipartiteIncidenceGraph, KstWitness};
pub use incidence::{classify_by_partition, count_incidences, IncidenceRecord, IncidenceReport};
pub use rich::{detect_rich_flat2, detect_rich_hyperplane, RichFlatRecord, RichSurface};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("exhaustive search over {m}x{n} graphs is too large (m*n must be at most 25)")]
    TooLarge { m: usize, n: usize },
}
