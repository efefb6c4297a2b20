//! Conversions between ε-LDP and (𝒰, α)-PIE privacy budgets.
//!
//! α is measured in bits. An ε-LDP randomizer leaks at most
//! `min(ε·log₂e, ε²·log₂e, log₂n, log₂k)` bits about a user, and a Bayes
//! error target β for identifying a user among `n` translates into
//! `α = (1 − β)·log₂n − 1`.

use libm::{log2, sqrt};

use crate::{Error, Result};

/// log₂(e).
pub const LOG2_E: f64 = core::f64::consts::LOG2_E;

/// Budget selected for one attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonOrPassThrough {
    /// Randomize with this ε. A value of `0.0` means α left no room at all;
    /// downstream estimators treat it as non-identifiable.
    Epsilon(f64),
    /// The attribute leaks at most α bits even when reported raw.
    PassThrough,
}

impl EpsilonOrPassThrough {
    pub fn epsilon(self) -> Option<f64> {
        match self {
            EpsilonOrPassThrough::Epsilon(e) => Some(e),
            EpsilonOrPassThrough::PassThrough => None,
        }
    }
}

/// A PIE budget together with the population/domain it applies to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieBudget {
    pub alpha: f64,
    /// Bayes-error target the budget was derived from, if any.
    pub beta: Option<f64>,
    pub n: usize,
    pub k: usize,
    /// Set when the Bayes-error bound was negative and α was clamped to 0.
    pub clamped: bool,
}

impl PieBudget {
    pub fn from_bayes_error(beta: f64, n: usize, k: usize) -> Result<Self> {
        let raw = raw_alpha_from_bayes_error(beta, n)?;
        Ok(PieBudget { alpha: raw.max(0.0), beta: Some(beta), n, k, clamped: raw < 0.0 })
    }

    pub fn from_epsilon(epsilon: f64, n: usize, k: usize) -> Result<Self> {
        Ok(PieBudget { alpha: alpha_from_epsilon(epsilon, n, k)?, beta: None, n, k, clamped: false })
    }

    pub fn epsilon(&self) -> Result<EpsilonOrPassThrough> {
        epsilon_from_alpha(self.alpha, self.n, self.k)
    }
}

fn check_population(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("population size must be at least 2"));
    }
    if k < 2 {
        return Err(Error::DegenerateDomain { k });
    }
    Ok(())
}

/// `α = min(ε·log₂e, ε²·log₂e, log₂n, log₂k)`.
pub fn alpha_from_epsilon(epsilon: f64, n: usize, k: usize) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    check_population(n, k)?;
    let linear = epsilon * LOG2_E;
    let quadratic = epsilon * epsilon * LOG2_E;
    Ok(linear.min(quadratic).min(log2(n as f64)).min(log2(k as f64)))
}

fn raw_alpha_from_bayes_error(beta: f64, n: usize) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument("Bayes error must lie in (0, 1)"));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("population size must be at least 2"));
    }
    Ok((1.0 - beta) * log2(n as f64) - 1.0)
}

/// Largest α compatible with a Bayes error of at least `beta`, clamped at 0.
pub fn alpha_from_bayes_error(beta: f64, n: usize) -> Result<f64> {
    Ok(raw_alpha_from_bayes_error(beta, n)?.max(0.0))
}

/// Inverts the ε-terms of the LDP→PIE bound.
///
/// The linear and quadratic terms cross at ε = 1, so the inverse switches
/// branch at α = log₂e and is continuous there.
pub fn epsilon_from_alpha(alpha: f64, n: usize, k: usize) -> Result<EpsilonOrPassThrough> {
    if !(alpha >= 0.0) || alpha.is_infinite() {
        return Err(Error::InvalidArgument("alpha must be finite and non-negative"));
    }
    check_population(n, k)?;
    if log2(k as f64) <= alpha || log2(n as f64) <= alpha {
        return Ok(EpsilonOrPassThrough::PassThrough);
    }
    let ratio = alpha / LOG2_E;
    let epsilon = if ratio >= 1.0 { ratio } else { sqrt(ratio) };
    Ok(EpsilonOrPassThrough::Epsilon(epsilon))
}
