use core::fmt;

use crate::oracle::Protocol;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// ε must be a finite, strictly positive number of nats.
    NonPositiveEpsilon(f64),
    /// Randomized protocols need at least two values in the domain.
    DegenerateDomain { k: usize },
    ValueOutOfDomain { value: usize, k: usize },
    /// A report was handed to a routine configured for another protocol.
    VariantMismatch { expected: Protocol },
    /// p == q, so the estimator has no signal to invert.
    NonIdentifiable,
    Empty(&'static str),
    InvalidDistribution(&'static str),
    /// SMP without replacement ran out of unused attributes.
    SamplingExhausted,
    ShapeMismatch(&'static str),
    InconsistentParameters(&'static str),
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveEpsilon(eps) => write!(f, "epsilon must be positive and finite, got {eps}"),
            Error::DegenerateDomain { k } => write!(f, "domain size {k} is degenerate (need k >= 2)"),
            Error::ValueOutOfDomain { value, k } => write!(f, "value index {value} outside domain of size {k}"),
            Error::VariantMismatch { expected } => {
                write!(f, "report variant does not match protocol {}", expected.name())
            }
            Error::NonIdentifiable => f.write_str("p equals q; frequencies are not identifiable"),
            Error::Empty(what) => write!(f, "empty input: {what}"),
            Error::InvalidDistribution(what) => write!(f, "invalid probability distribution: {what}"),
            Error::SamplingExhausted => f.write_str("all attributes already sampled without replacement"),
            Error::ShapeMismatch(what) => write!(f, "shape mismatch: {what}"),
            Error::InconsistentParameters(what) => write!(f, "inconsistent parameters: {what}"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

impl core::error::Error for Error {}
