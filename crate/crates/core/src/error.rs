use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid block sizes: {0}")]
    InvalidBlockSizes(String),

    #[error("block index {index} out of range for an algebra with {blocks} blocks")]
    BlockOutOfRange { index: usize, blocks: usize },

    #[error("operands live in different ambient algebras")]
    AlgebraMismatch,

    #[error("operands belong to different partial automorphisms")]
    SystemMismatch,

    #[error("element does not conform to block sizes {expected:?}")]
    ShapeMismatch { expected: Vec<usize> },

    #[error("block map is not a size-compatible bijection: {0}")]
    InvalidBlockMap(String),

    #[error("matrix for block {block} is not unitary (residual {residual:.3e})")]
    NotUnitary { block: usize, residual: f64 },

    #[error("element is not in the domain of theta^{power}: nonzero on blocks {blocks:?}")]
    DomainViolation { power: i64, blocks: Vec<usize> },

    #[error("grade mismatch: expected pure grade {expected}")]
    GradeMismatch { expected: i64 },

    #[error("domain chains do not terminate; only L-level operations are available")]
    UnboundedChain,

    #[error("level bound {level} is below the chain bound {bound}")]
    LevelTooSmall { level: usize, bound: usize },

    #[error("|z| = {modulus} is not 1")]
    NotUnitModulus { modulus: f64 },

    #[error("generated algebra is not closed under adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("central spectrum gap below tolerance after {attempts} attempts")]
    Degenerate { attempts: usize },

    #[error("map is not a *-homomorphism (residual {residual:.3e})")]
    NotHomomorphism { residual: f64 },

    #[error("invalid covariant representation: {0}")]
    InvalidRepresentation(String),

    #[error("invalid regularity witness: {0}")]
    InvalidWitness(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("element is not in the required span (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
