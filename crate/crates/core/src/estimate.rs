//! Computed constants with an explicit statement of how they were obtained.

use serde::Serialize;

use crate::scalar::Real;

/// How a [`ConstantEstimate`] was obtained, and therefore what it certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exhaustive over a finite set that provably contains the extremum.
    ExactEnumeration,
    /// Closed form through an eigenvalue or singular value.
    SpectralExact,
    /// Best value over sampled points of a supremum: a lower bound on the true constant.
    SampledLowerBound,
    /// Best value over sampled points of an infimum: an upper bound on the true constant.
    SampledUpperBound,
    /// A provable upper bound (norm-equivalence or interpolation argument).
    CertifiedUpperBound,
}

impl Method {
    pub fn is_exact(self) -> bool {
        matches!(self, Method::ExactEnumeration | Method::SpectralExact)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactEnumeration => "exact-enumeration",
            Method::SpectralExact => "spectral-exact",
            Method::SampledLowerBound => "sampled-lower-bound",
            Method::SampledUpperBound => "sampled-upper-bound",
            Method::CertifiedUpperBound => "certified-upper-bound",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What achieves the reported value.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness<T> {
    None,
    Vector { vector: Vec<T> },
    Signs { signs: Vec<i8> },
    Pattern { coefficients: Vec<T>, vector: Vec<T> },
}

impl<T: Real> Witness<T> {
    pub fn vector(&self) -> Option<&[T]> {
        match self {
            Witness::Vector { vector } | Witness::Pattern { vector, .. } => Some(vector),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Witness::None => "none".to_string(),
            Witness::Vector { vector } => format!("vector[{}]", vector.len()),
            Witness::Signs { signs } => {
                let s: String = signs.iter().map(|&e| if e > 0 { '+' } else { '-' }).collect();
                format!("signs:{s}")
            }
            Witness::Pattern { coefficients, .. } => {
                let c: Vec<String> = coefficients.iter().map(|c| format!("{c}")).collect();
                format!("pattern:{}", c.join(";"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ConstantEstimate<T> {
    pub value: T,
    pub method: Method,
    pub witness: Witness<T>,
    /// Number of candidate points or patterns evaluated.
    pub trials: usize,
    /// Certified bound on the other side, when one is available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<T>,
}

impl<T: Real> ConstantEstimate<T> {
    pub fn new(value: T, method: Method, witness: Witness<T>, trials: usize) -> Self {
        ConstantEstimate { value, method, witness, trials, upper_bound: None, lower_bound: None }
    }

    pub fn with_upper_bound(mut self, bound: T) -> Self {
        self.upper_bound = Some(bound);
        self
    }

    pub fn with_lower_bound(mut self, bound: T) -> Self {
        self.lower_bound = Some(bound);
        self
    }
}
