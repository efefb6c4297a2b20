//! Plausible-deniability attacks: guessing a user's value from one report.
//!
//! [`analytic_acc`] evaluates the published closed forms. Those treat the OLH
//! range `g` and the SS subset size `ω` as real numbers; [`exact_acc`] gives
//! the attacker's accuracy for the integer `g` and `ω` the randomizers use.

use alloc::vec::Vec;

use libm::{exp, pow};
use rand::Rng;

use crate::oracle::{olh_hash, Protocol, ProtocolParams, SanitizedReport};
use crate::stats::binomial_pmf;
use crate::{Error, Result};

/// The attacker's guess for the value behind `report`.
///
/// GRR returns the reported value, OLH and SS a uniform member of the
/// supported set, UE the set bit (uniform among set bits when several are
/// set). An empty supported set falls back to a uniform guess over the domain.
pub fn predict_value<R: Rng + ?Sized>(report: &SanitizedReport, params: &ProtocolParams, rng: &mut R) -> Result<usize> {
    let k = params.k;
    match (report, params.protocol) {
        (SanitizedReport::Value(v), Protocol::Grr) => {
            params.check_value(*v)?;
            Ok(*v)
        }
        (SanitizedReport::Hashed { seed, h }, Protocol::Olh) => {
            let g = params.g().ok_or(Error::InconsistentParameters("OLH parameters without g"))?;
            let matches = |v: &usize| olh_hash(*seed, *v, g) == *h;
            let m = (0..k).filter(matches).count();
            if m == 0 {
                return Ok(rng.gen_range(0..k));
            }
            let pick = rng.gen_range(0..m);
            Ok((0..k).filter(matches).nth(pick).unwrap_or(0))
        }
        (SanitizedReport::Subset(omega), Protocol::Ss) => {
            if omega.is_empty() {
                return Ok(rng.gen_range(0..k));
            }
            Ok(omega[rng.gen_range(0..omega.len())])
        }
        (SanitizedReport::Bits(bits), Protocol::Sue | Protocol::Oue) => {
            if bits.len() != k {
                return Err(Error::ShapeMismatch("bit vector length differs from k"));
            }
            let ones = bits.iter().filter(|&&b| b).count();
            if ones == 0 {
                return Ok(rng.gen_range(0..k));
            }
            let pick = rng.gen_range(0..ones);
            Ok(bits.iter().enumerate().filter(|(_, &b)| b).nth(pick).map(|(i, _)| i).unwrap_or(0))
        }
        _ => Err(Error::VariantMismatch { expected: params.protocol }),
    }
}

fn check(epsilon: f64, k: usize) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    if k < 2 {
        return Err(Error::DegenerateDomain { k });
    }
    Ok(())
}

/// Σ_{i=1..k} (p/i)·Bin(i−1; k−1, q).
fn ue_hit_sum(p: f64, q: f64, k: usize) -> f64 {
    (1..=k).map(|i| p / i as f64 * binomial_pmf((i - 1) as u64, (k - 1) as u64, q)).sum()
}

/// Expected attack accuracy (percent) from the published closed forms.
pub fn analytic_acc(protocol: Protocol, epsilon: f64, k: usize) -> Result<f64> {
    check(epsilon, k)?;
    let kf = k as f64;
    let ee = exp(epsilon);
    let acc = match protocol {
        Protocol::Grr => 1.0 / (1.0 + (kf - 1.0) * exp(-epsilon)),
        Protocol::Olh => 1.0 / (2.0 * (kf / (ee + 1.0)).max(1.0)),
        Protocol::Ss => (ee + 1.0) / (2.0 * kf),
        Protocol::Sue => {
            let p = exp(epsilon / 2.0) / (exp(epsilon / 2.0) + 1.0);
            let q = 1.0 / (exp(epsilon / 2.0) + 1.0);
            q * pow(p, kf - 1.0) / kf + ue_hit_sum(p, q, k)
        }
        Protocol::Oue => {
            let q = 1.0 / (ee + 1.0);
            pow(ee / (ee + 1.0), kf - 1.0) / (2.0 * kf)
                + (1..=k).map(|i| binomial_pmf((i - 1) as u64, (k - 1) as u64, q) / (2.0 * i as f64)).sum::<f64>()
        }
    };
    Ok(100.0 * acc)
}

/// Expected accuracy (percent) of [`predict_value`] against the randomizer
/// as implemented, including integer `g` and `ω`.
pub fn exact_acc(params: &ProtocolParams) -> f64 {
    let k = params.k;
    let kf = k as f64;
    let acc = match params.protocol {
        Protocol::Grr => params.p,
        Protocol::Olh => {
            let g = params.g().unwrap_or(2) as f64;
            let inv_g = 1.0 / g;
            let p = params.p;
            // True bucket reported: the true value competes with the other
            // values that collide with it. Otherwise the guess is right only
            // through the uniform fallback on an empty preimage.
            let collide: f64 = (0..k).map(|m| binomial_pmf(m as u64, (k - 1) as u64, inv_g) / (m as f64 + 1.0)).sum();
            p * collide + (1.0 - p) * pow(1.0 - inv_g, kf - 1.0) / kf
        }
        Protocol::Ss => params.p / params.omega().unwrap_or(1) as f64,
        Protocol::Sue | Protocol::Oue => {
            let (p, q) = (params.p, params.q);
            (1.0 - p) * pow(1.0 - q, kf - 1.0) / kf + ue_hit_sum(p, q, k)
        }
    };
    100.0 * acc
}

/// Attribute-sampling regime across surveys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectionMode {
    /// A different attribute every survey.
    Uniform,
    /// Attribute sampled with replacement; only users who happened to report
    /// every attribute once are fully exposed.
    NonUniform,
}

/// Probability (percent) of guessing every reported attribute, given the
/// per-survey single-report accuracies in percent.
pub fn multi_collection_from(accs: &[f64], mode: CollectionMode) -> Result<f64> {
    if accs.is_empty() {
        return Err(Error::Empty("surveys"));
    }
    let d = accs.len() as f64;
    let mut prod = 1.0;
    for (idx, a) in accs.iter().enumerate() {
        let factor = match mode {
            CollectionMode::Uniform => 1.0,
            CollectionMode::NonUniform => (d - idx as f64) / d,
        };
        prod *= factor * a / 100.0;
    }
    Ok(100.0 * prod)
}

/// Multi-collection accuracy with closed-form per-survey accuracies.
pub fn multi_collection_acc(protocol: Protocol, epsilon: f64, ks: &[usize], mode: CollectionMode) -> Result<f64> {
    let accs = ks.iter().map(|&k| analytic_acc(protocol, epsilon, k)).collect::<Result<Vec<_>>>()?;
    multi_collection_from(&accs, mode)
}

/// Outcome of [`simulate_multi_collection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiCollectionTrial {
    pub users: usize,
    /// Users who reported every attribute once.
    pub complete: usize,
    /// Complete users whose every value was guessed correctly.
    pub hits: usize,
}

impl MultiCollectionTrial {
    pub fn accuracy(&self) -> f64 {
        100.0 * self.hits as f64 / self.users as f64
    }
}

/// Monte-Carlo counterpart of [`multi_collection_acc`]: each user holds
/// uniform values for `ks.len()` attributes, answers that many SMP surveys and
/// counts as a hit when the attacker recovers every attribute.
pub fn simulate_multi_collection<R: Rng + ?Sized>(
    protocol: Protocol,
    epsilon: f64,
    ks: &[usize],
    mode: CollectionMode,
    users: usize,
    rng: &mut R,
) -> Result<MultiCollectionTrial> {
    use crate::multidim::{smp_sanitize, MultiDomain, SamplingMode, SmpState, SurveyTuple};
    let domain = MultiDomain::from_sizes(ks)?;
    let params = ks.iter().map(|&k| ProtocolParams::new(protocol, epsilon, k)).collect::<Result<Vec<_>>>()?;
    let sampling = match mode {
        CollectionMode::Uniform => SamplingMode::WithoutReplacement,
        CollectionMode::NonUniform => SamplingMode::WithReplacement,
    };
    let d = ks.len();
    let mut trial = MultiCollectionTrial { users, complete: 0, hits: 0 };
    let mut values = alloc::vec![0usize; d];
    let mut guesses: Vec<Option<usize>> = alloc::vec![None; d];
    for _ in 0..users {
        for (v, &k) in values.iter_mut().zip(ks) {
            *v = rng.gen_range(0..k);
        }
        guesses.iter_mut().for_each(|g| *g = None);
        let mut state = SmpState::new(sampling, d);
        for _ in 0..d {
            let SurveyTuple::Sampled { attribute, report } = smp_sanitize(&values, &domain, protocol, epsilon, rng, &mut state)? else {
                unreachable!()
            };
            guesses[attribute] = Some(predict_value(&report, &params[attribute], rng)?);
        }
        if guesses.iter().all(Option::is_some) {
            trial.complete += 1;
            if guesses.iter().zip(&values).all(|(g, v)| *g == Some(*v)) {
                trial.hits += 1;
            }
        }
    }
    Ok(trial)
}
