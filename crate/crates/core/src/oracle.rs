//! Single-attribute frequency oracles.
//!
//! Five randomizers are provided: generalized randomized response (GRR),
//! optimal local hashing (OLH), ω-subset selection (SS), symmetric unary
//! encoding (SUE, basic one-time RAPPOR) and optimized unary encoding (OUE).
//! All of them share the count-based estimator
//! `f̂(v) = (C(v) − n·q) / (n·(p − q))`, where `C(v)` counts the reports that
//! support `v` and `(p, q)` is the protocol's estimation-side pair.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::{exp, round};
use rand::Rng;

use crate::rng::splitmix64;
use crate::{Error, Result};

/// Upper bound on the OLH hash range; only reached for ε above ~21.
pub const OLH_MAX_G: usize = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Grr,
    Olh,
    Ss,
    Sue,
    Oue,
}

impl Protocol {
    pub const ALL: [Protocol; 5] = [Protocol::Grr, Protocol::Olh, Protocol::Ss, Protocol::Sue, Protocol::Oue];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Grr => "GRR",
            Protocol::Olh => "OLH",
            Protocol::Ss => "SS",
            Protocol::Sue => "SUE",
            Protocol::Oue => "OUE",
        }
    }

    pub fn is_unary(self) -> bool {
        matches!(self, Protocol::Sue | Protocol::Oue)
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GRR" => Ok(Protocol::Grr),
            "OLH" => Ok(Protocol::Olh),
            "SS" | "OMEGA-SS" => Ok(Protocol::Ss),
            "SUE" | "RAPPOR" => Ok(Protocol::Sue),
            "OUE" => Ok(Protocol::Oue),
            _ => Err(Error::InvalidArgument("unknown protocol")),
        }
    }
}

/// A named categorical attribute. Values are referred to by their index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDomain {
    name: String,
    values: Vec<String>,
}

impl AttributeDomain {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("attribute domain"));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::InvalidArgument("duplicate value label in attribute domain"));
            }
        }
        Ok(AttributeDomain { name: name.into(), values })
    }

    /// Domain whose labels are just `"0"..k`.
    pub fn indexed(name: impl Into<String>, k: usize) -> Result<Self> {
        Self::new(name, (0..k).map(|i| i.to_string()).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.values.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.values.iter().position(|v| v == label)
    }

    /// Appends a label if unseen and returns its index.
    pub fn intern(&mut self, label: &str) -> usize {
        match self.index_of(label) {
            Some(i) => i,
            None => {
                self.values.push(label.to_string());
                self.values.len() - 1
            }
        }
    }
}

/// Randomization and estimation parameters of one protocol at a given (ε, k).
///
/// `p` and `q` are the estimation-side pair plugged into the shared
/// estimator. For OLH that is `p' = e^ε/(e^ε+g−1)` and `q = 1/g`; the hashed
/// GRR step itself flips with [`ProtocolParams::perturb_q`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub protocol: Protocol,
    pub epsilon: f64,
    pub k: usize,
    pub p: f64,
    pub q: f64,
    /// `g` for OLH, `ω` for SS.
    pub aux: Option<usize>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    Ok(())
}

/// GRR probabilities over an alphabet of `size` symbols, written with e^−ε
/// so large budgets do not overflow.
fn grr_pair(epsilon: f64, size: usize) -> (f64, f64) {
    let inv = exp(-epsilon);
    let denom = 1.0 + (size as f64 - 1.0) * inv;
    (1.0 / denom, inv / denom)
}

/// `g = max(2, round(e^ε + 1))`, capped at [`OLH_MAX_G`].
pub fn olh_range(epsilon: f64) -> usize {
    let g = round(exp(epsilon) + 1.0);
    if !(g < OLH_MAX_G as f64) {
        return OLH_MAX_G;
    }
    (g as usize).max(2)
}

/// `ω = round(k/(e^ε+1))` clamped to `[1, k−1]`.
pub fn subset_size(epsilon: f64, k: usize) -> usize {
    let w = round(k as f64 / (exp(epsilon) + 1.0)) as usize;
    w.clamp(1, k.saturating_sub(1).max(1))
}

impl ProtocolParams {
    pub fn new(protocol: Protocol, epsilon: f64, k: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        if k < 2 {
            return Err(Error::DegenerateDomain { k });
        }
        let (p, q, aux) = match protocol {
            Protocol::Grr => {
                let (p, q) = grr_pair(epsilon, k);
                (p, q, None)
            }
            Protocol::Olh => {
                let g = olh_range(epsilon);
                let (p, _) = grr_pair(epsilon, g);
                (p, 1.0 / g as f64, Some(g))
            }
            Protocol::Ss => {
                let w = subset_size(epsilon, k) as f64;
                let kf = k as f64;
                let ee = exp(epsilon);
                let denom = w * ee + kf - w;
                let p = w * ee / denom;
                let q = (w * ee * (w - 1.0) + (kf - w) * w) / ((kf - 1.0) * denom);
                (p, q, Some(w as usize))
            }
            Protocol::Sue => {
                let (p, q) = grr_pair(epsilon / 2.0, 2);
                (p, q, None)
            }
            Protocol::Oue => {
                let (_, q) = grr_pair(epsilon, 2);
                (0.5, q, None)
            }
        };
        Ok(ProtocolParams { protocol, epsilon, k, p, q, aux })
    }

    /// OLH hash range `g`.
    pub fn g(&self) -> Option<usize> {
        if self.protocol == Protocol::Olh { self.aux } else { None }
    }

    /// SS subset size `ω`.
    pub fn omega(&self) -> Option<usize> {
        if self.protocol == Protocol::Ss { self.aux } else { None }
    }

    /// Probability that OLH's GRR step moves the hashed value to one specific other bucket.
    pub fn perturb_q(&self) -> f64 {
        match self.protocol {
            Protocol::Olh => {
                let g = self.aux.unwrap_or(2);
                grr_pair(self.epsilon, g).1
            }
            _ => self.q,
        }
    }

    pub fn check_value(&self, value: usize) -> Result<()> {
        if value >= self.k {
            return Err(Error::ValueOutOfDomain { value, k: self.k });
        }
        Ok(())
    }
}

/// Output of a single randomizer invocation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SanitizedReport {
    /// GRR output (also used for raw pass-through values).
    Value(usize),
    /// OLH output: the per-report hash seed and the perturbed bucket in `[0, g)`.
    Hashed { seed: u64, h: usize },
    /// SS output; sorted, distinct, in-domain.
    Subset(Vec<usize>),
    /// SUE/OUE output; one bit per domain value.
    Bits(Vec<bool>),
}

impl SanitizedReport {
    fn matches(&self, protocol: Protocol) -> bool {
        matches!(
            (self, protocol),
            (SanitizedReport::Value(_), Protocol::Grr)
                | (SanitizedReport::Hashed { .. }, Protocol::Olh)
                | (SanitizedReport::Subset(_), Protocol::Ss)
                | (SanitizedReport::Bits(_), Protocol::Sue | Protocol::Oue)
        )
    }
}

/// `SplitMix64(seed ⊕ SplitMix64(v)) mod g`.
#[inline]
pub fn olh_hash(seed: u64, value: usize, g: usize) -> usize {
    (splitmix64(seed ^ splitmix64(value as u64)) % g as u64) as usize
}

/// Uniform draw from `[0, size)` excluding `skip`.
#[inline]
pub(crate) fn uniform_other<R: Rng + ?Sized>(rng: &mut R, size: usize, skip: usize) -> usize {
    let r = rng.gen_range(0..size - 1);
    if r >= skip { r + 1 } else { r }
}

/// Perturbs the unary encoding of `one_hot` (or of the all-zero vector when
/// `None`) bit by bit: a 1 stays 1 with probability `p`, a 0 becomes 1 with
/// probability `q`.
pub fn unary_perturb<R: Rng + ?Sized>(one_hot: Option<usize>, k: usize, p: f64, q: f64, rng: &mut R) -> Vec<bool> {
    (0..k)
        .map(|i| {
            let prob = if Some(i) == one_hot { p } else { q };
            rng.gen::<f64>() < prob
        })
        .collect()
}

/// Randomizes `value` under `params`.
pub fn randomize<R: Rng + ?Sized>(value: usize, params: &ProtocolParams, rng: &mut R) -> Result<SanitizedReport> {
    params.check_value(value)?;
    let k = params.k;
    let report = match params.protocol {
        Protocol::Grr => {
            if rng.gen::<f64>() < params.p {
                SanitizedReport::Value(value)
            } else {
                SanitizedReport::Value(uniform_other(rng, k, value))
            }
        }
        Protocol::Olh => {
            let g = params.aux.unwrap_or(2);
            let seed = rng.next_u64();
            let hashed = olh_hash(seed, value, g);
            let h = if rng.gen::<f64>() < params.p { hashed } else { uniform_other(rng, g, hashed) };
            SanitizedReport::Hashed { seed, h }
        }
        Protocol::Ss => {
            let omega = params.aux.unwrap_or(1);
            let include = rng.gen::<f64>() < params.p;
            let draws = if include { omega - 1 } else { omega };
            let mut subset: Vec<usize> = rand::seq::index::sample(rng, k - 1, draws)
                .into_iter()
                .map(|i| if i >= value { i + 1 } else { i })
                .collect();
            if include {
                subset.push(value);
            }
            subset.sort_unstable();
            SanitizedReport::Subset(subset)
        }
        Protocol::Sue | Protocol::Oue => SanitizedReport::Bits(unary_perturb(Some(value), k, params.p, params.q, rng)),
    };
    Ok(report)
}

/// Whether `report` counts towards `candidate` in the estimator.
pub fn supports(report: &SanitizedReport, candidate: usize, params: &ProtocolParams) -> Result<bool> {
    if !report.matches(params.protocol) {
        return Err(Error::VariantMismatch { expected: params.protocol });
    }
    Ok(match report {
        SanitizedReport::Value(v) => *v == candidate,
        SanitizedReport::Hashed { seed, h } => olh_hash(*seed, candidate, params.aux.unwrap_or(2)) == *h,
        SanitizedReport::Subset(s) => s.binary_search(&candidate).is_ok(),
        SanitizedReport::Bits(b) => b.get(candidate).copied().unwrap_or(false),
    })
}

/// Support counts `C(v)` for every value of the domain.
pub fn support_counts<'a, I>(reports: I, params: &ProtocolParams) -> Result<Vec<u64>>
where
    I: IntoIterator<Item = &'a SanitizedReport>,
{
    let k = params.k;
    let mut counts = vec![0u64; k];
    for report in reports {
        if !report.matches(params.protocol) {
            return Err(Error::VariantMismatch { expected: params.protocol });
        }
        match report {
            SanitizedReport::Value(v) => {
                if *v < k {
                    counts[*v] += 1;
                }
            }
            SanitizedReport::Hashed { seed, h } => {
                let g = params.aux.unwrap_or(2);
                for (c, slot) in counts.iter_mut().enumerate() {
                    if olh_hash(*seed, c, g) == *h {
                        *slot += 1;
                    }
                }
            }
            SanitizedReport::Subset(s) => {
                for &v in s.iter().filter(|&&v| v < k) {
                    counts[v] += 1;
                }
            }
            SanitizedReport::Bits(b) => {
                for (slot, _) in counts.iter_mut().zip(b).filter(|(_, &bit)| bit) {
                    *slot += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// The shared unbiased estimator applied to raw counts.
pub fn estimate_from_counts(counts: &[u64], n: usize, p: f64, q: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Empty("reports"));
    }
    let gap = p - q;
    if !(gap.abs() > 0.0) {
        return Err(Error::NonIdentifiable);
    }
    let n = n as f64;
    Ok(counts.iter().map(|&c| (c as f64 - n * q) / (n * gap)).collect())
}

/// Raw (unclipped) frequency estimates for all `k` values.
pub fn estimate_frequencies(reports: &[SanitizedReport], params: &ProtocolParams) -> Result<Vec<f64>> {
    if reports.is_empty() {
        return Err(Error::Empty("reports"));
    }
    let counts = support_counts(reports, params)?;
    estimate_from_counts(&counts, reports.len(), params.p, params.q)
}

/// Optional post-processing: clip to `[0, 1]` and renormalize.
///
/// Returns `None` when every entry clips to zero.
pub fn clip_normalize(estimates: &[f64]) -> Option<Vec<f64>> {
    let clipped: Vec<f64> = estimates.iter().map(|&f| f.clamp(0.0, 1.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    Some(clipped.into_iter().map(|f| f / total).collect())
}
