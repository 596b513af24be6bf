//! Diversified recommendation ranking.
//!
//! The central algorithm ranks items by utility and keeps the ones that
//! contribute positive marginal diversity, which is the exact greedy optimum
//! of diversity-weighted utility maximization over a polymatroid. The crate
//! also ships the classic MMR re-ranker, the ILD/nDCG/EILD metric suite, a
//! MovieLens-style data pipeline, and an offline experiment driver.

pub mod data;
pub mod diversity;
pub mod experiment;
pub mod metrics;
pub mod rankers;
pub mod types;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use diversity::{
    capped_coverage, check_monotone_submodular, gain, normalize_diversity, topic_coverage,
    CappedCoverage,
    CheckReport, Diversity, DiversityKind, GainContext, NormalizedDiversity, TopicCoverage,
};
pub use rankers::{
    brute_force_rank, cascade_choice_probabilities, dum_rank, mmr_rank, objective_value,
    TradeoffWeight,
};
pub use types::{GroundSet, RankedList, TopicCatalog, UserProfile, UtilityVector};
