use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use num_complex::Complex64;

use crate::geometry::Class;
use crate::group::OrbitCache;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone)]
pub enum Error {
    /// An argument lies outside the documented domain (non-finite, non-positive, ...).
    Domain(String),
    /// The computation would lose all significance (height underflow, singular matrix).
    Precision(String),
    /// Trace falls inside the tolerance band around `[-2, 2]`.
    AmbiguousClassification {
        trace: Complex64,
    },
    /// Operation only defined for loxodromic elements (or the identity).
    UnsupportedElement(Class),
    InvalidGroup(String),
    /// Enumeration hit its element cap; the partial cache is attached.
    BudgetExceeded(Box<OrbitCache>),
    InsufficientData(String),
    UnsupportedOrder(u32),
    /// A run was refused because the group does not meet `delta + ci < n/2`
    /// or `s` lies outside `(delta, n/2)`.
    HypothesisViolation(String),
    /// One of the distance case inequalities failed on an evaluated pair.
    CaseViolation(String),
    /// A degenerate least-squares fit (constant abscissae, too few points).
    Fit(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Precision(msg) => write!(f, "precision error: {msg}"),
            Error::AmbiguousClassification { trace } => write!(
                f,
                "ambiguous classification: trace {}{:+}i is within tolerance of [-2, 2]",
                trace.re, trace.im
            ),
            Error::UnsupportedElement(class) => {
                write!(f, "unsupported element: expected loxodromic, got {class:?}")
            }
            Error::InvalidGroup(msg) => write!(f, "invalid group: {msg}"),
            Error::BudgetExceeded(partial) => write!(
                f,
                "element budget exceeded after {} elements (radius {})",
                partial.len(),
                partial.radius()
            ),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::UnsupportedOrder(j) => write!(f, "unsupported derivative order {j} (max 4)"),
            Error::HypothesisViolation(msg) => write!(f, "hypothesis violation: {msg}"),
            Error::CaseViolation(msg) => write!(f, "case inequality violated: {msg}"),
            Error::Fit(msg) => write!(f, "fit error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
