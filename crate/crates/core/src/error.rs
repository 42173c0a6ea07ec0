use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // ring
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("polynomial {0:?} is reducible over the prime field")]
    ReduciblePolynomial(Vec<u32>),
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("element {value} does not belong to a ring of order {order}")]
    ElementOutOfRing { value: u32, order: u32 },
    #[error("element is not invertible")]
    NotInvertible,

    // linalg
    #[error("matrix is singular over the coefficient ring")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    RingMismatch(String),
    #[error("too large: {0}")]
    TooLarge(String),

    // loops
    #[error("table is not a Latin square: {0}")]
    NotLatinSquare(String),
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("index {index} out of range for a loop of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("operator needs a second argument")]
    MissingSecondArgument,
    #[error("operator needs a third argument")]
    MissingThirdArgument,
    #[error("loop is not Moufang: witness {0:?}")]
    NotMoufang((usize, usize, usize)),
    #[error("subset is not a subloop")]
    NotASubloop,
    #[error("subloop is not normal")]
    NotNormal,
    #[error("quotient is ill-defined: {0}")]
    IllDefined(String),
    #[error("pair is not a pseudoautomorphism")]
    NotPseudoautomorphism,
    #[error("search timed out")]
    Timeout,
    #[error("malformed loop file: {0}")]
    Format(String),

    // triality
    #[error("automorphism order violation: {0}")]
    AutomorphismOrderViolation(String),
    #[error("element is not in the Moufang set of the triality group")]
    NotMoufangElement,
    #[error("operator domain mismatch: {0}")]
    OperatorDomainMismatch(String),
    #[error("base group is not associative")]
    BaseNotAssociative,
    #[error("triality fails at n={n}: basis index {index:?}")]
    TrialityFails { n: usize, index: (usize, usize, usize) },

    // products
    #[error("subset is not a group")]
    NotAGroup,
    #[error("invariance of the module under T_m and L_(n,m) was not established")]
    InvarianceNotEstablished,
    #[error("not in the construction catalog: {0}")]
    OutOfCatalog(String),
    #[error("loop of order {0} exceeds the materialization cap")]
    TooLargeToMaterialize(usize),

    // extensions
    #[error("kernel is not abelian")]
    KernelNotAbelian,
    #[error("kernel is not normal")]
    KernelNotNormal,
    #[error("kernel is not closed under the loop operations")]
    KernelNotClosed,
    #[error("too large to decide: {0}")]
    TooLargeToDecide(String),

    // descriptors
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
