//! Small numeric helpers shared by the estimators and attack formulas.

use libm::{exp, lgamma, log};

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    lgamma(n as f64 + 1.0) - lgamma(k as f64 + 1.0) - lgamma((n - k) as f64 + 1.0)
}

/// Probability of exactly `successes` successes in `trials` Bernoulli(`prob`) trials.
pub fn binomial_pmf(successes: u64, trials: u64, prob: f64) -> f64 {
    if successes > trials {
        return 0.0;
    }
    if prob <= 0.0 {
        return if successes == 0 { 1.0 } else { 0.0 };
    }
    if prob >= 1.0 {
        return if successes == trials { 1.0 } else { 0.0 };
    }
    let ln = ln_choose(trials, successes)
        + successes as f64 * log(prob)
        + (trials - successes) as f64 * libm::log1p(-prob);
    exp(ln)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n − 1 denominator).
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn standard_error(xs: &[f64]) -> f64 {
    libm::sqrt(sample_variance(xs) / xs.len() as f64)
}

/// Standard deviation of a binomial proportion, in the same units as `p`.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    libm::sqrt(p * (1.0 - p) / n as f64)
}
