//! Collecting `d` attributes per user.
//!
//! - **SPL** splits ε evenly and randomizes every attribute at ε/d.
//! - **SMP** samples one attribute, randomizes it at full ε and discloses which
//!   attribute was sampled.
//! - **RS+FD** samples one attribute, randomizes it at the amplified budget
//!   ε' = ln(d(e^ε − 1) + 1) and fills every other slot with uniform fake data,
//!   hiding the sampled index.
//! - **RS+RFD** is RS+FD with fake data drawn from per-attribute priors.
//!
//! RS+FD fake values are drawn through the same categorical sampler as RS+RFD
//! with a uniform prior, so the two solutions consume identical random streams
//! and coincide path by path when the priors are uniform.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::{expm1, log1p};
use rand::Rng;

use crate::oracle::{self, unary_perturb, AttributeDomain, Protocol, ProtocolParams, SanitizedReport};
use crate::{Error, Result};

/// The `d` attribute domains collected together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiDomain {
    domains: Vec<AttributeDomain>,
}

impl MultiDomain {
    pub fn new(domains: Vec<AttributeDomain>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::Empty("attribute list"));
        }
        Ok(MultiDomain { domains })
    }

    /// Domains with index labels and the given sizes.
    pub fn from_sizes(ks: &[usize]) -> Result<Self> {
        let domains = ks
            .iter()
            .enumerate()
            .map(|(j, &k)| AttributeDomain::indexed(alloc::format!("A{j}"), k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domains)
    }

    pub fn d(&self) -> usize {
        self.domains.len()
    }

    pub fn ks(&self) -> Vec<usize> {
        self.domains.iter().map(AttributeDomain::k).collect()
    }

    pub fn k(&self, j: usize) -> usize {
        self.domains[j].k()
    }

    pub fn domains(&self) -> &[AttributeDomain] {
        &self.domains
    }

    pub fn domains_mut(&mut self) -> &mut [AttributeDomain] {
        &mut self.domains
    }

    fn check_tuple(&self, values: &[usize]) -> Result<()> {
        if values.len() != self.d() {
            return Err(Error::ShapeMismatch("tuple length differs from attribute count"));
        }
        for (j, &v) in values.iter().enumerate() {
            if v >= self.k(j) {
                return Err(Error::ValueOutOfDomain { value: v, k: self.k(j) });
            }
        }
        Ok(())
    }
}

/// Unary-encoding parameterization used inside RS+FD / RS+RFD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UeFlavor {
    Sue,
    Oue,
}

impl UeFlavor {
    pub fn protocol(self) -> Protocol {
        match self {
            UeFlavor::Sue => Protocol::Sue,
            UeFlavor::Oue => Protocol::Oue,
        }
    }
}

/// How the non-sampled slots are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FakeVariant {
    /// Plain fake value, sampled slot randomized with GRR.
    Grr,
    /// UE applied to the all-zero vector.
    UeZero,
    /// UE applied to the one-hot encoding of a fake value.
    UeRandom,
}

/// Multidimensional collection solution tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Solution {
    Spl,
    Smp,
    RsFd(FakeVariant),
    RsRfd(FakeVariant),
}

impl Solution {
    pub fn fake_variant(self) -> Option<FakeVariant> {
        match self {
            Solution::RsFd(v) | Solution::RsRfd(v) => Some(v),
            _ => None,
        }
    }

    pub fn hides_sampled_attribute(self) -> bool {
        matches!(self, Solution::RsFd(_) | Solution::RsRfd(_))
    }

    /// Display name; UE variants need the flavor to be fully named.
    pub fn label(self, flavor: UeFlavor) -> alloc::string::String {
        let ue = match flavor {
            UeFlavor::Sue => "SUE",
            UeFlavor::Oue => "OUE",
        };
        match self {
            Solution::Spl => "SPL".into(),
            Solution::Smp => "SMP".into(),
            Solution::RsFd(FakeVariant::Grr) => "RS+FD[GRR]".into(),
            Solution::RsFd(FakeVariant::UeZero) => alloc::format!("RS+FD[{ue}-z]"),
            Solution::RsFd(FakeVariant::UeRandom) => alloc::format!("RS+FD[{ue}-r]"),
            Solution::RsRfd(FakeVariant::Grr) => "RS+RFD[GRR]".into(),
            Solution::RsRfd(FakeVariant::UeZero) => alloc::format!("RS+RFD[{ue}-z]"),
            Solution::RsRfd(FakeVariant::UeRandom) => alloc::format!("RS+RFD[{ue}-r]"),
        }
    }
}

/// A solution together with its UE flavor, parsed from names such as
/// `SMP`, `RS+FD[GRR]`, `RS+FD[SUE-z]` or `RS+RFD[OUE-r]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scheme {
    pub solution: Solution,
    pub flavor: UeFlavor,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.solution.label(self.flavor))
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        let simple = |solution| Ok(Scheme { solution, flavor: UeFlavor::Oue });
        match upper.as_str() {
            "SPL" => return simple(Solution::Spl),
            "SMP" => return simple(Solution::Smp),
            _ => {}
        }
        let (realistic, inner) = if let Some(rest) = upper.strip_prefix("RS+RFD[") {
            (true, rest)
        } else if let Some(rest) = upper.strip_prefix("RS+FD[") {
            (false, rest)
        } else {
            return Err(Error::InvalidArgument("unknown solution name"));
        };
        let inner = inner.strip_suffix(']').ok_or(Error::InvalidArgument("unterminated solution name"))?;
        let (variant, flavor) = match inner {
            "GRR" => (FakeVariant::Grr, UeFlavor::Oue),
            "SUE-Z" => (FakeVariant::UeZero, UeFlavor::Sue),
            "OUE-Z" => (FakeVariant::UeZero, UeFlavor::Oue),
            "SUE-R" => (FakeVariant::UeRandom, UeFlavor::Sue),
            "OUE-R" => (FakeVariant::UeRandom, UeFlavor::Oue),
            _ => return Err(Error::InvalidArgument("unknown fake-data variant")),
        };
        if realistic && variant == FakeVariant::UeZero {
            return Err(Error::InvalidArgument("RS+RFD is defined for GRR and UE-r only"));
        }
        let solution = if realistic { Solution::RsRfd(variant) } else { Solution::RsFd(variant) };
        Ok(Scheme { solution, flavor })
    }
}

/// What the aggregator receives from one user in one survey.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SurveyTuple {
    /// SMP: the sampled attribute index travels with its report.
    Sampled { attribute: usize, report: SanitizedReport },
    /// SPL / RS+FD / RS+RFD: one report per attribute, no sampled index.
    Full(Vec<SanitizedReport>),
}

/// RS+FD / RS+RFD client output. `sampled` is the client's private choice; it
/// is kept only so simulations can score attacks and is never part of the
/// aggregator-visible [`SurveyTuple`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sanitized {
    pub tuple: SurveyTuple,
    pub sampled: usize,
}

/// Per-attribute prior distributions used to draw realistic fake data.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSet(Vec<Vec<f64>>);

impl PriorSet {
    pub fn new(priors: Vec<Vec<f64>>) -> Result<Self> {
        for prior in &priors {
            if prior.is_empty() || prior.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidDistribution("prior entries must be finite and non-negative"));
            }
            let total: f64 = prior.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidDistribution("prior does not sum to 1"));
            }
        }
        Ok(PriorSet(priors))
    }

    pub fn uniform(ks: &[usize]) -> Self {
        PriorSet(ks.iter().map(|&k| vec![1.0 / k as f64; k]).collect())
    }

    pub fn get(&self, j: usize) -> &[f64] {
        &self.0[j]
    }

    pub fn as_slice(&self) -> &[Vec<f64>] {
        &self.0
    }

    fn check_against(&self, domain: &MultiDomain) -> Result<()> {
        if self.0.len() != domain.d() || self.0.iter().zip(domain.ks()).any(|(p, k)| p.len() != k) {
            return Err(Error::ShapeMismatch("prior shape differs from attribute domains"));
        }
        Ok(())
    }
}

/// Inverse-CDF draw from a discrete distribution using one uniform variate.
pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    last_positive
}

/// ε' = ln(d·(e^ε − 1) + 1).
pub fn amplified_epsilon(epsilon: f64, d: usize) -> f64 {
    log1p(d as f64 * expm1(epsilon))
}

/// Parameters of the randomizer applied to the sampled slot (at ε').
pub fn sampled_slot_params(variant: FakeVariant, flavor: UeFlavor, amplified: f64, k: usize) -> Result<ProtocolParams> {
    let protocol = match variant {
        FakeVariant::Grr => Protocol::Grr,
        FakeVariant::UeZero | FakeVariant::UeRandom => flavor.protocol(),
    };
    ProtocolParams::new(protocol, amplified, k)
}

/// SPL: every attribute randomized at ε/d.
pub fn spl_sanitize<R: Rng + ?Sized>(
    values: &[usize],
    domain: &MultiDomain,
    protocol: Protocol,
    epsilon: f64,
    rng: &mut R,
) -> Result<SurveyTuple> {
    domain.check_tuple(values)?;
    let share = epsilon / domain.d() as f64;
    let reports = values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let params = ProtocolParams::new(protocol, share, domain.k(j))?;
            oracle::randomize(v, &params, rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurveyTuple::Full(reports))
}

/// Attribute sampling regime for repeated SMP surveys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Every survey samples an attribute the user has not reported yet.
    WithoutReplacement,
    /// Uniform sampling each survey; repeats return the memoized report.
    WithReplacement,
}

type MemoKey = (usize, Protocol, u64);

/// Per-user SMP state carried across surveys.
#[derive(Debug, Clone)]
pub struct SmpState {
    mode: SamplingMode,
    used: Vec<bool>,
    memo: BTreeMap<MemoKey, SanitizedReport>,
}

impl SmpState {
    pub fn new(mode: SamplingMode, d: usize) -> Self {
        SmpState { mode, used: vec![false; d], memo: BTreeMap::new() }
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    /// Attributes reported so far.
    pub fn used(&self) -> impl Iterator<Item = usize> + '_ {
        self.used.iter().enumerate().filter(|(_, &u)| u).map(|(j, _)| j)
    }

    /// Picks the attribute to report among `available`.
    pub fn choose<R: Rng + ?Sized>(&mut self, available: &[usize], rng: &mut R) -> Result<usize> {
        if available.is_empty() {
            return Err(Error::Empty("survey attributes"));
        }
        if available.iter().any(|&j| j >= self.used.len()) {
            return Err(Error::InvalidArgument("survey attribute outside the domain"));
        }
        let j = match self.mode {
            SamplingMode::WithReplacement => available[rng.gen_range(0..available.len())],
            SamplingMode::WithoutReplacement => {
                let fresh: Vec<usize> = available.iter().copied().filter(|&j| !self.used[j]).collect();
                if fresh.is_empty() {
                    return Err(Error::SamplingExhausted);
                }
                fresh[rng.gen_range(0..fresh.len())]
            }
        };
        self.used[j] = true;
        Ok(j)
    }

    /// Samples an attribute and reports it through `randomizer`, reusing the
    /// memoized report when the same `(attribute, protocol, ε)` was already
    /// sent.
    pub fn sanitize_with<R, F>(
        &mut self,
        values: &[usize],
        available: &[usize],
        protocol: Protocol,
        epsilon: f64,
        rng: &mut R,
        randomizer: F,
    ) -> Result<SurveyTuple>
    where
        R: Rng + ?Sized,
        F: FnOnce(usize, usize, &mut R) -> Result<SanitizedReport>,
    {
        if values.len() != self.used.len() {
            return Err(Error::ShapeMismatch("tuple length differs from attribute count"));
        }
        let attribute = self.choose(available, rng)?;
        let key = (attribute, protocol, epsilon.to_bits());
        let report = match self.memo.get(&key) {
            Some(r) => r.clone(),
            None => {
                let r = randomizer(attribute, values[attribute], rng)?;
                self.memo.insert(key, r.clone());
                r
            }
        };
        Ok(SurveyTuple::Sampled { attribute, report })
    }

    /// SMP at full ε with the named protocol.
    pub fn sanitize<R: Rng + ?Sized>(
        &mut self,
        values: &[usize],
        domain: &MultiDomain,
        available: &[usize],
        protocol: Protocol,
        epsilon: f64,
        rng: &mut R,
    ) -> Result<SurveyTuple> {
        domain.check_tuple(values)?;
        self.sanitize_with(values, available, protocol, epsilon, rng, |j, v, rng| {
            let params = ProtocolParams::new(protocol, epsilon, domain.k(j))?;
            oracle::randomize(v, &params, rng)
        })
    }
}

/// One SMP survey over all attributes of `domain`.
pub fn smp_sanitize<R: Rng + ?Sized>(
    values: &[usize],
    domain: &MultiDomain,
    protocol: Protocol,
    epsilon: f64,
    rng: &mut R,
    state: &mut SmpState,
) -> Result<SurveyTuple> {
    let all: Vec<usize> = (0..domain.d()).collect();
    state.sanitize(values, domain, &all, protocol, epsilon, rng)
}

fn sanitize_with_fakes<R: Rng + ?Sized>(
    values: &[usize],
    domain: &MultiDomain,
    priors: &PriorSet,
    variant: FakeVariant,
    flavor: UeFlavor,
    epsilon: f64,
    rng: &mut R,
) -> Result<Sanitized> {
    domain.check_tuple(values)?;
    let d = domain.d();
    let amplified = amplified_epsilon(epsilon, d);
    let sampled = rng.gen_range(0..d);
    let mut reports = Vec::with_capacity(d);
    for (i, &v) in values.iter().enumerate() {
        let params = sampled_slot_params(variant, flavor, amplified, domain.k(i))?;
        let report = if i == sampled {
            oracle::randomize(v, &params, rng)?
        } else {
            match variant {
                FakeVariant::Grr => SanitizedReport::Value(sample_categorical(priors.get(i), rng)),
                FakeVariant::UeZero => SanitizedReport::Bits(unary_perturb(None, params.k, params.p, params.q, rng)),
                FakeVariant::UeRandom => {
                    let fake = sample_categorical(priors.get(i), rng);
                    SanitizedReport::Bits(unary_perturb(Some(fake), params.k, params.p, params.q, rng))
                }
            }
        };
        reports.push(report);
    }
    Ok(Sanitized { tuple: SurveyTuple::Full(reports), sampled })
}

/// RS+FD client: uniform fake data in every non-sampled slot.
pub fn rsfd_sanitize<R: Rng + ?Sized>(
    values: &[usize],
    domain: &MultiDomain,
    variant: FakeVariant,
    flavor: UeFlavor,
    epsilon: f64,
    rng: &mut R,
) -> Result<Sanitized> {
    let uniform = PriorSet::uniform(&domain.ks());
    sanitize_with_fakes(values, domain, &uniform, variant, flavor, epsilon, rng)
}

/// RS+RFD client: fake data drawn from `priors`.
pub fn rsrfd_sanitize<R: Rng + ?Sized>(
    values: &[usize],
    domain: &MultiDomain,
    priors: &PriorSet,
    variant: FakeVariant,
    flavor: UeFlavor,
    epsilon: f64,
    rng: &mut R,
) -> Result<Sanitized> {
    if variant == FakeVariant::UeZero {
        return Err(Error::InvalidArgument("RS+RFD is defined for GRR and UE-r only"));
    }
    priors.check_against(domain)?;
    sanitize_with_fakes(values, domain, priors, variant, flavor, epsilon, rng)
}

/// An RS+FD or RS+RFD collection at a fixed ε over one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FakeDataCollector {
    domain: MultiDomain,
    solution: Solution,
    flavor: UeFlavor,
    epsilon: f64,
    priors: PriorSet,
}

impl FakeDataCollector {
    /// `priors` is required for RS+RFD and ignored for RS+FD.
    pub fn new(domain: MultiDomain, solution: Solution, flavor: UeFlavor, epsilon: f64, priors: Option<PriorSet>) -> Result<Self> {
        let priors = match solution {
            Solution::RsFd(_) => PriorSet::uniform(&domain.ks()),
            Solution::RsRfd(FakeVariant::UeZero) => {
                return Err(Error::InvalidArgument("RS+RFD is defined for GRR and UE-r only"))
            }
            Solution::RsRfd(_) => {
                let p = priors.ok_or(Error::InvalidArgument("RS+RFD needs priors"))?;
                p.check_against(&domain)?;
                p
            }
            _ => return Err(Error::InvalidArgument("not a fake-data solution")),
        };
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        Ok(FakeDataCollector { domain, solution, flavor, epsilon, priors })
    }

    pub fn domain(&self) -> &MultiDomain {
        &self.domain
    }

    pub fn solution(&self) -> Solution {
        self.solution
    }

    pub fn variant(&self) -> FakeVariant {
        self.solution.fake_variant().unwrap_or(FakeVariant::Grr)
    }

    pub fn flavor(&self) -> UeFlavor {
        self.flavor
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn priors(&self) -> &PriorSet {
        &self.priors
    }

    pub fn is_unary(&self) -> bool {
        self.variant() != FakeVariant::Grr
    }

    /// Randomizer parameters of attribute `j` when it is the sampled slot.
    pub fn slot_params(&self, j: usize) -> Result<ProtocolParams> {
        let amplified = amplified_epsilon(self.epsilon, self.domain.d());
        sampled_slot_params(self.variant(), self.flavor, amplified, self.domain.k(j))
    }

    pub fn sanitize<R: Rng + ?Sized>(&self, values: &[usize], rng: &mut R) -> Result<Sanitized> {
        sanitize_with_fakes(values, &self.domain, &self.priors, self.variant(), self.flavor, self.epsilon, rng)
    }

    pub fn estimate(&self, tuples: &[SurveyTuple]) -> Result<Vec<Vec<f64>>> {
        match self.solution {
            Solution::RsRfd(v) => rsrfd_estimate(tuples, &self.domain, &self.priors, v, self.flavor, self.epsilon),
            _ => rsfd_estimate(tuples, &self.domain, self.variant(), self.flavor, self.epsilon),
        }
    }
}

/// Support counts per attribute over full-vector tuples.
fn full_vector_counts(
    tuples: &[SurveyTuple],
    domain: &MultiDomain,
    params: &[ProtocolParams],
) -> Result<Vec<Vec<u64>>> {
    let d = domain.d();
    let mut counts: Vec<Vec<u64>> = domain.ks().iter().map(|&k| vec![0; k]).collect();
    for tuple in tuples {
        let SurveyTuple::Full(reports) = tuple else {
            return Err(Error::InvalidArgument("expected full-vector tuples"));
        };
        if reports.len() != d {
            return Err(Error::ShapeMismatch("tuple length differs from attribute count"));
        }
        for (j, report) in reports.iter().enumerate() {
            let single = oracle::support_counts(core::iter::once(report), &params[j])?;
            for (slot, c) in counts[j].iter_mut().zip(single) {
                *slot += c;
            }
        }
    }
    Ok(counts)
}

fn slot_params(domain: &MultiDomain, variant: FakeVariant, flavor: UeFlavor, epsilon: f64) -> Result<Vec<ProtocolParams>> {
    let amplified = amplified_epsilon(epsilon, domain.d());
    (0..domain.d()).map(|j| sampled_slot_params(variant, flavor, amplified, domain.k(j))).collect()
}

/// RS+FD server-side estimator; raw (unclipped) output per attribute.
pub fn rsfd_estimate(
    tuples: &[SurveyTuple],
    domain: &MultiDomain,
    variant: FakeVariant,
    flavor: UeFlavor,
    epsilon: f64,
) -> Result<Vec<Vec<f64>>> {
    if tuples.is_empty() {
        return Err(Error::Empty("tuples"));
    }
    let params = slot_params(domain, variant, flavor, epsilon)?;
    let counts = full_vector_counts(tuples, domain, &params)?;
    let n = tuples.len() as f64;
    let d = domain.d() as f64;
    counts
        .iter()
        .zip(&params)
        .map(|(c, pp)| {
            let (p, q) = (pp.p, pp.q);
            if !((p - q).abs() > 0.0) {
                return Err(Error::NonIdentifiable);
            }
            let k = pp.k as f64;
            Ok(c.iter()
                .map(|&cv| {
                    let cv = cv as f64;
                    match variant {
                        FakeVariant::Grr => (cv * d * k - n * (d - 1.0 + q * k)) / (n * k * (p - q)),
                        FakeVariant::UeZero => d * (cv - n * q) / (n * (p - q)),
                        FakeVariant::UeRandom => {
                            (cv * d * k - n * (q * k + (p - q) * (d - 1.0) + q * k * (d - 1.0))) / (n * k * (p - q))
                        }
                    }
                })
                .collect())
        })
        .collect()
}

/// RS+RFD server-side estimator; raw (unclipped) output per attribute.
pub fn rsrfd_estimate(
    tuples: &[SurveyTuple],
    domain: &MultiDomain,
    priors: &PriorSet,
    variant: FakeVariant,
    flavor: UeFlavor,
    epsilon: f64,
) -> Result<Vec<Vec<f64>>> {
    if variant == FakeVariant::UeZero {
        return Err(Error::InvalidArgument("RS+RFD is defined for GRR and UE-r only"));
    }
    if tuples.is_empty() {
        return Err(Error::Empty("tuples"));
    }
    priors.check_against(domain)?;
    let params = slot_params(domain, variant, flavor, epsilon)?;
    let counts = full_vector_counts(tuples, domain, &params)?;
    let n = tuples.len() as f64;
    let d = domain.d() as f64;
    counts
        .iter()
        .zip(&params)
        .enumerate()
        .map(|(j, (c, pp))| {
            let (p, q) = (pp.p, pp.q);
            if !((p - q).abs() > 0.0) {
                return Err(Error::NonIdentifiable);
            }
            let prior = priors.get(j);
            Ok(c.iter()
                .zip(prior)
                .map(|(&cv, &fp)| {
                    let cv = cv as f64;
                    let bias = match variant {
                        FakeVariant::Grr => q + (d - 1.0) * fp,
                        _ => q + (p - q) * (d - 1.0) * fp + q * (d - 1.0),
                    };
                    (d * cv - n * bias) / (n * (p - q))
                })
                .collect())
        })
        .collect()
}

/// Closed-form variance of one RS+RFD estimate, `d²γ(1−γ)/(n(p−q)²)`.
///
/// `f` is the true frequency of the value, `prior` its prior probability,
/// `(p, q)` the sampled-slot pair at ε'.
pub fn rsrfd_variance(variant: FakeVariant, f: f64, prior: f64, p: f64, q: f64, d: usize, n: usize) -> Result<f64> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be positive"));
    }
    if !((p - q).abs() > 0.0) {
        return Err(Error::NonIdentifiable);
    }
    let df = d as f64;
    let gamma = match variant {
        FakeVariant::Grr => (q + f * (p - q) + (df - 1.0) * prior) / df,
        FakeVariant::UeRandom => (f * (p - q) + q + (df - 1.0) * (prior * (p - q) + q)) / df,
        FakeVariant::UeZero => return Err(Error::InvalidArgument("RS+RFD is defined for GRR and UE-r only")),
    };
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InconsistentParameters("report probability outside [0, 1]"));
    }
    Ok(df * df * gamma * (1.0 - gamma) / (n as f64 * (p - q) * (p - q)))
}

/// SMP estimator: attribute `j` is estimated from the users who sampled it.
pub fn smp_estimate(tuples: &[SurveyTuple], domain: &MultiDomain, protocol: Protocol, epsilon: f64) -> Result<Vec<Vec<f64>>> {
    let mut per_attr: Vec<Vec<&SanitizedReport>> = vec![Vec::new(); domain.d()];
    for t in tuples {
        match t {
            SurveyTuple::Sampled { attribute, report } if *attribute < domain.d() => per_attr[*attribute].push(report),
            _ => return Err(Error::InvalidArgument("expected SMP tuples")),
        }
    }
    per_attr
        .iter()
        .enumerate()
        .map(|(j, reports)| {
            let params = ProtocolParams::new(protocol, epsilon, domain.k(j))?;
            let counts = oracle::support_counts(reports.iter().copied(), &params)?;
            oracle::estimate_from_counts(&counts, reports.len(), params.p, params.q)
        })
        .collect()
}

/// SPL estimator: each attribute through the shared estimator at ε/d.
pub fn spl_estimate(tuples: &[SurveyTuple], domain: &MultiDomain, protocol: Protocol, epsilon: f64) -> Result<Vec<Vec<f64>>> {
    if tuples.is_empty() {
        return Err(Error::Empty("tuples"));
    }
    let share = epsilon / domain.d() as f64;
    let params = (0..domain.d())
        .map(|j| ProtocolParams::new(protocol, share, domain.k(j)))
        .collect::<Result<Vec<_>>>()?;
    let counts = full_vector_counts(tuples, domain, &params)?;
    counts
        .iter()
        .zip(&params)
        .map(|(c, pp)| oracle::estimate_from_counts(c, tuples.len(), pp.p, pp.q))
        .collect()
}
