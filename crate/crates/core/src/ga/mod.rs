//! Genetic algorithm, scenario encoding and violation search.

pub mod codec;
pub mod engine;
pub mod search;

pub use codec::{alpha_from_gene, DecodedScenario, ScenarioCodec, StateMode, SystemKind};
pub use engine::{
    crossover, maximize, mutate, mutation_scale_update, GaConfig, GaOutcome, GenerationLog, Genome, SearchState,
};
pub use search::{run_search, SearchRecord, SearchTarget};
