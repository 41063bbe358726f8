use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("the base graph has no vertices")]
    EmptyGraph,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge `{0}` must have a positive length")]
    NonPositiveLength(String),
    #[error("dilated edge `{0}` has an undilated endpoint")]
    DilatedEdgeEndpoint(String),
    #[error("edge `{0}` is not free and cannot carry the sign -1")]
    SignOnNonFreeEdge(String),
    #[error("the free double cover is trivial")]
    TrivialCover,
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("orientation does not reverse along the involution at half-edge {0}")]
    InvalidOrientation(usize),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("edge set is dependent in M*")]
    DependentSet,
    #[error("edge set is not a circuit")]
    NotACircuit,
    #[error("enumeration over {found} undilated edges exceeds the limit of {limit}")]
    EnumerationLimit { found: usize, limit: usize },
    #[error("circuit {0} matches none of the six circuit types")]
    UnclassifiedCircuit(String),
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
}
