use thiserror::Error;

/// Every failure mode the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("log-degree overflow: product would carry log-degree {0} (maximum is 2)")]
    LogDegreeOverflow(u32),
    #[error("incompatible operands: {0}")]
    Incompatible(String),
    #[error("no rational fit over the supplied denominator (first nonzero residual at total degree {0})")]
    NoFit(u32),
    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,
    #[error("origin is not an interior point of the polytope")]
    OriginNotInterior,
    #[error("polytope is not reflexive")]
    NotReflexive,
    #[error("unsupported polytope: {0}")]
    UnsupportedPolytope(String),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("relation leaves dangling theta for point index {0}")]
    DanglingTheta(usize),
    #[error("coefficients are not regular (rank drop in degree {0})")]
    NotRegular(usize),
    #[error("interpolation degree bound {0} exceeded")]
    InterpolationDegreeExceeded(u32),
    #[error("rank-deficient reduction: {0}")]
    RankDeficient(String),
    #[error("log-derivative system is not integrable: {0}")]
    NonIntegrable(String),
    #[error("basis too small: {0}")]
    BasisTooSmall(String),
    #[error("ansatz insufficient up to numerator degree {0}")]
    AnsatzInsufficient(u32),
    #[error("underdetermined: solution space has dimension {0}")]
    Underdetermined(usize),
    #[error("mirror map cannot be reverted: {0}")]
    ReversionFailure(String),
    #[error("non-integral invariant at degree {degree:?}: {value}")]
    NonIntegral { degree: Vec<u32>, value: String },
    #[error("missing holomorphic ambiguity '{0}' for model '{1}'")]
    MissingAmbiguity(String, String),
    #[error("propagator series has vanishing constant term")]
    VanishingPropagator,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("registry error: {0}")]
    Registry(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LogDegreeOverflow(_) => "log-degree-overflow",
            Error::Incompatible(_) => "incompatible",
            Error::NoFit(_) => "no-fit",
            Error::NotInvertible => "not-invertible",
            Error::OriginNotInterior => "origin-not-interior",
            Error::NotReflexive => "not-reflexive",
            Error::UnsupportedPolytope(_) => "unsupported-polytope",
            Error::UnknownModel(_) => "unknown-model",
            Error::DanglingTheta(_) => "dangling-theta",
            Error::NotRegular(_) => "not-regular",
            Error::InterpolationDegreeExceeded(_) => "interpolation-degree-exceeded",
            Error::RankDeficient(_) => "rank-deficient",
            Error::NonIntegrable(_) => "non-integrable",
            Error::BasisTooSmall(_) => "basis-too-small",
            Error::AnsatzInsufficient(_) => "ansatz-insufficient",
            Error::Underdetermined(_) => "underdetermined",
            Error::ReversionFailure(_) => "reversion-failure",
            Error::NonIntegral { .. } => "non-integral",
            Error::MissingAmbiguity(..) => "missing-ambiguity",
            Error::VanishingPropagator => "vanishing-propagator",
            Error::Parse(_) => "parse",
            Error::Registry(_) => "registry",
        }
    }
}
