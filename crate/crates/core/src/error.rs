use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("edge {edge} is a loop at vertex {vertex}")]
    LoopEdge { edge: u32, vertex: u32 },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not connected ({components} components)")]
    Disconnected { components: usize },

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("morphism is not harmonic: {0}")]
    NotHarmonic(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("{0} is not a member of the group")]
    NotAMember(String),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("group action is not faithful: {0}")]
    NotFaithful(String),

    #[error("invalid multiset: {0}")]
    InvalidMultiset(String),

    #[error("invalid cover specification: {0}")]
    InvalidCover(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid rotation system: {0}")]
    InvalidRotation(String),

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
