//! Re-identification by linking attacker profiles to background records.
//!
//! After each survey the attacker guesses one value per user and keeps the
//! latest guess per attribute. Profiles are matched against background
//! records by Hamming distance over the attributes both sides know; the top-k
//! closest identities are returned, ties shuffled with a seeded RNG.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::classifier::{Classifier, Trainer};
use super::inference::{infer_sampled_attribute, synthetic_learning_set};
use super::plausible::predict_value;
use crate::budget::{epsilon_from_alpha, EpsilonOrPassThrough, PieBudget};
use crate::data::Dataset;
use crate::multidim::{FakeDataCollector, MultiDomain, PriorSet, SamplingMode, SmpState, Solution, SurveyTuple, UeFlavor};
use crate::oracle::{self, Protocol, ProtocolParams, SanitizedReport};
use crate::rng::{tag, Seed};
use crate::{Error, Result};

/// The attacker's current guess for each attribute of one user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackerProfile {
    predictions: Vec<Option<usize>>,
}

impl AttackerProfile {
    pub fn new(d: usize) -> Self {
        AttackerProfile { predictions: vec![None; d] }
    }

    pub fn from_predictions(predictions: Vec<Option<usize>>) -> Self {
        AttackerProfile { predictions }
    }

    /// Records a guess, replacing any earlier guess for the attribute.
    pub fn set(&mut self, attribute: usize, value: usize) {
        self.predictions[attribute] = Some(value);
    }

    pub fn get(&self, attribute: usize) -> Option<usize> {
        self.predictions[attribute]
    }

    pub fn known(&self) -> usize {
        self.predictions.iter().filter(|p| p.is_some()).count()
    }

    pub fn predictions(&self) -> &[Option<usize>] {
        &self.predictions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KnowledgeMode {
    /// Every attribute of every record.
    Full,
    /// A random subset of at least ⌈d/2⌉ attributes.
    Partial,
}

/// Background records, stored column-wise for the attributes the attacker
/// knows. Record `i` carries identity `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundKnowledge {
    n: usize,
    columns: Vec<Option<Vec<u32>>>,
}

impl BackgroundKnowledge {
    pub fn full(dataset: &Dataset) -> Self {
        let all: Vec<usize> = (0..dataset.d()).collect();
        Self::with_columns(dataset, &all)
    }

    /// Partial knowledge over a uniformly drawn subset of size
    /// `Uniform(⌈d/2⌉..=d)`.
    pub fn partial<R: Rng + ?Sized>(dataset: &Dataset, rng: &mut R) -> Self {
        let d = dataset.d();
        let size = rng.gen_range(d.div_ceil(2)..=d);
        let mut cols = rand::seq::index::sample(rng, d, size).into_vec();
        cols.sort_unstable();
        Self::with_columns(dataset, &cols)
    }

    pub fn with_columns(dataset: &Dataset, columns: &[usize]) -> Self {
        let mut stored = vec![None; dataset.d()];
        for &j in columns {
            stored[j] = Some(dataset.column(j).map(|v| v as u32).collect());
        }
        BackgroundKnowledge { n: dataset.n(), columns: stored }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn known_columns(&self) -> Vec<usize> {
        self.columns.iter().enumerate().filter(|(_, c)| c.is_some()).map(|(j, _)| j).collect()
    }

    fn distances(&self, profile: &AttackerProfile, out: &mut Vec<u16>) {
        out.clear();
        out.resize(self.n, 0);
        for (j, pred) in profile.predictions.iter().enumerate() {
            let (Some(v), Some(Some(col))) = (pred, self.columns.get(j)) else { continue };
            let v = *v as u32;
            for (d, &c) in out.iter_mut().zip(col) {
                *d += (c != v) as u16;
            }
        }
    }
}

/// Identities of the `top_k` records closest to `profile`, nearest first.
pub fn reident_match<R: Rng + ?Sized>(
    profile: &AttackerProfile,
    background: &BackgroundKnowledge,
    top_k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut scratch = Vec::new();
    match_with_scratch(profile, background, top_k, rng, &mut scratch)
}

fn match_with_scratch<R: Rng + ?Sized>(
    profile: &AttackerProfile,
    background: &BackgroundKnowledge,
    top_k: usize,
    rng: &mut R,
    dist: &mut Vec<u16>,
) -> Result<Vec<usize>> {
    if profile.known() == 0 {
        return Err(Error::Empty("profile"));
    }
    if profile.predictions.len() != background.columns.len() {
        return Err(Error::ShapeMismatch("profile and background differ in attribute count"));
    }
    let top_k = top_k.min(background.n);
    if top_k == 0 {
        return Ok(Vec::new());
    }
    background.distances(profile, dist);
    let max_d = profile.predictions.len();
    let mut counts = vec![0usize; max_d + 1];
    for &d in dist.iter() {
        counts[d as usize] += 1;
    }
    let mut threshold = 0;
    let mut cum = 0;
    for (d, &c) in counts.iter().enumerate() {
        cum += c;
        if cum >= top_k {
            threshold = d;
            break;
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); threshold + 1];
    for (i, &d) in dist.iter().enumerate() {
        if (d as usize) <= threshold {
            groups[d as usize].push(i);
        }
    }
    let mut ranked = Vec::with_capacity(top_k);
    for group in &mut groups {
        let need = top_k - ranked.len();
        if group.len() <= need {
            group.shuffle(rng);
            ranked.extend_from_slice(group);
        } else {
            let mut pick: Vec<usize> = rand::seq::index::sample(rng, group.len(), need).into_iter().map(|i| group[i]).collect();
            pick.shuffle(rng);
            ranked.extend(pick);
        }
    }
    Ok(ranked)
}

/// Attribute subsets offered in each survey.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyPlan {
    pub surveys: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurveyRule {
    /// Each survey covers `Uniform(⌈d/2⌉..=d)` random attributes.
    RandomSubset,
    /// Every survey covers all attributes.
    AllAttributes,
}

pub fn draw_survey_plan<R: Rng + ?Sized>(d: usize, surveys: usize, rule: SurveyRule, rng: &mut R) -> SurveyPlan {
    let surveys = (0..surveys)
        .map(|_| match rule {
            SurveyRule::AllAttributes => (0..d).collect(),
            SurveyRule::RandomSubset => {
                let size = rng.gen_range(d.div_ceil(2)..=d);
                let mut attrs = rand::seq::index::sample(rng, d, size).into_vec();
                attrs.sort_unstable();
                attrs
            }
        })
        .collect();
    SurveyPlan { surveys }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrivacySpec {
    /// ε-LDP per survey.
    Epsilon(f64),
    /// PIE budget derived from a Bayes-error target.
    BayesError(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attacker {
    /// Profile matching.
    Matching,
    /// Random top-k identities, ignoring the profile.
    Null,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReidentConfig {
    pub solution: Solution,
    pub flavor: UeFlavor,
    /// Oracle used by SMP.
    pub protocol: Protocol,
    pub privacy: PrivacySpec,
    pub surveys: usize,
    pub survey_rule: SurveyRule,
    pub sampling: SamplingMode,
    pub knowledge: KnowledgeMode,
    pub top_k: Vec<usize>,
    pub attacker: Attacker,
    /// NK synthetic profiles per survey, as a multiple of `n` (RS+FD paths).
    pub synthetic_multiplier: f64,
    /// Full-domain priors for RS+RFD.
    pub priors: Option<PriorSet>,
    /// Survey structure to use instead of drawing one from the run seed.
    pub plan: Option<SurveyPlan>,
}

/// RID-ACC (percent) after `surveys` surveys at one top-k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReidentPoint {
    pub surveys: usize,
    pub top_k: usize,
    pub rid_acc: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReidentFlags {
    /// α from the Bayes-error target was negative and clamped to 0.
    pub alpha_clamped: bool,
    /// Attributes reported raw under PIE.
    pub pass_through: Vec<usize>,
    /// Attributes left with no budget under PIE; their reports are uniform noise.
    pub zero_budget: Vec<usize>,
    /// User-surveys skipped because sampling without replacement ran out.
    pub exhausted: usize,
    /// Surveys whose sampled-attribute classifier saw a single class.
    pub degenerate_classifier: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReidentOutcome {
    pub points: Vec<ReidentPoint>,
    pub plan: SurveyPlan,
    pub background_columns: Vec<usize>,
    pub flags: ReidentFlags,
}

#[derive(Debug, Clone, Copy)]
enum AttrBudget {
    Ldp(ProtocolParams),
    PassThrough,
    Zero,
}

fn smp_budgets(config: &ReidentConfig, domain: &MultiDomain, n: usize, flags: &mut ReidentFlags) -> Result<Vec<AttrBudget>> {
    (0..domain.d())
        .map(|j| {
            let k = domain.k(j);
            match config.privacy {
                PrivacySpec::Epsilon(e) => Ok(AttrBudget::Ldp(ProtocolParams::new(config.protocol, e, k)?)),
                PrivacySpec::BayesError(beta) => {
                    let budget = PieBudget::from_bayes_error(beta, n, k)?;
                    flags.alpha_clamped |= budget.clamped;
                    match epsilon_from_alpha(budget.alpha, n, k)? {
                        EpsilonOrPassThrough::PassThrough => {
                            flags.pass_through.push(j);
                            Ok(AttrBudget::PassThrough)
                        }
                        EpsilonOrPassThrough::Epsilon(e) if e > 0.0 => {
                            Ok(AttrBudget::Ldp(ProtocolParams::new(config.protocol, e, k)?))
                        }
                        EpsilonOrPassThrough::Epsilon(_) => {
                            flags.zero_budget.push(j);
                            Ok(AttrBudget::Zero)
                        }
                    }
                }
            }
        })
        .collect()
}

/// Simulates `config.surveys` collections over `dataset` and reports
/// RID-ACC after every survey from the second one on.
pub fn run_reident_experiment<T: Trainer>(
    dataset: &Dataset,
    config: &ReidentConfig,
    trainer: &T,
    seed: Seed,
) -> Result<ReidentOutcome> {
    let n = dataset.n();
    let d = dataset.d();
    if n == 0 {
        return Err(Error::Empty("dataset"));
    }
    if config.surveys == 0 || config.top_k.is_empty() || config.top_k.contains(&0) {
        return Err(Error::InvalidArgument("surveys and top-k values must be positive"));
    }
    let hides = config.solution.hides_sampled_attribute();
    if !hides && config.solution != Solution::Smp {
        return Err(Error::InvalidArgument("re-identification supports SMP, RS+FD and RS+RFD"));
    }
    if hides && matches!(config.privacy, PrivacySpec::BayesError(_)) {
        return Err(Error::InvalidArgument("PIE budgets apply to SMP only"));
    }

    let mut flags = ReidentFlags::default();
    let plan = match &config.plan {
        Some(plan) => {
            let valid = plan.surveys.len() == config.surveys
                && plan.surveys.iter().all(|attrs| !attrs.is_empty() && attrs.iter().all(|&j| j < d));
            if !valid {
                return Err(Error::ShapeMismatch("survey plan does not fit the dataset and survey count"));
            }
            plan.clone()
        }
        None => draw_survey_plan(d, config.surveys, config.survey_rule, &mut seed.child(tag::STRUCTURE).rng()),
    };
    let background = match config.knowledge {
        KnowledgeMode::Full => BackgroundKnowledge::full(dataset),
        KnowledgeMode::Partial => BackgroundKnowledge::partial(dataset, &mut seed.path(&[tag::STRUCTURE, tag::ATTACK]).rng()),
    };
    let budgets = if hides { Vec::new() } else { smp_budgets(config, dataset.domain(), n, &mut flags)? };
    // Per-attribute budgets are fixed for the whole run, so the privacy
    // parameter alone keys the SMP memo.
    let memo_budget = match config.privacy {
        PrivacySpec::Epsilon(e) | PrivacySpec::BayesError(e) => e,
    };
    let max_k = config.top_k.iter().copied().max().unwrap_or(1);

    let mut profiles = vec![AttackerProfile::new(d); n];
    let mut smp_states = if hides { Vec::new() } else { vec![SmpState::new(config.sampling, d); n] };
    let mut points = Vec::new();
    let mut dist = Vec::new();

    for (s, attrs) in plan.surveys.iter().enumerate() {
        let s64 = s as u64;
        if hides {
            rsfd_survey(dataset, config, trainer, seed, s64, attrs, &mut profiles, &mut flags)?;
        } else {
            for (u, row) in dataset.rows().enumerate() {
                let mut rng = seed.path(&[tag::USER, u as u64, tag::SURVEY, s64]).rng();
                let state = &mut smp_states[u];
                let outcome = state.sanitize_with(row, attrs, config.protocol, memo_budget, &mut rng, |j, v, rng| match budgets[j] {
                    AttrBudget::Ldp(p) => oracle::randomize(v, &p, rng),
                    AttrBudget::PassThrough => Ok(SanitizedReport::Value(v)),
                    AttrBudget::Zero => Ok(SanitizedReport::Value(rng.gen_range(0..dataset.domain().k(j)))),
                });
                let tuple = match outcome {
                    Ok(t) => t,
                    Err(Error::SamplingExhausted) => {
                        flags.exhausted += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let SurveyTuple::Sampled { attribute, report } = tuple else { unreachable!() };
                let mut attack_rng = seed.path(&[tag::ATTACK, u as u64, s64]).rng();
                let guess = match budgets[attribute] {
                    AttrBudget::Ldp(p) => predict_value(&report, &p, &mut attack_rng)?,
                    AttrBudget::PassThrough | AttrBudget::Zero => match report {
                        SanitizedReport::Value(v) => v,
                        _ => unreachable!(),
                    },
                };
                profiles[u].set(attribute, guess);
            }
        }

        if s == 0 {
            continue;
        }
        let mut hits = vec![0usize; config.top_k.len()];
        for (u, profile) in profiles.iter().enumerate() {
            let mut rng = seed.path(&[tag::ATTACK, tag::USER, u as u64, s64]).rng();
            let ranked = match config.attacker {
                Attacker::Null => rand::seq::index::sample(&mut rng, n, max_k.min(n)).into_vec(),
                Attacker::Matching if profile.known() == 0 => continue,
                Attacker::Matching => match_with_scratch(profile, &background, max_k, &mut rng, &mut dist)?,
            };
            for (h, &k) in hits.iter_mut().zip(&config.top_k) {
                if ranked.iter().take(k).any(|&id| id == u) {
                    *h += 1;
                }
            }
        }
        for (&k, &h) in config.top_k.iter().zip(&hits) {
            points.push(ReidentPoint { surveys: s + 1, top_k: k, rid_acc: 100.0 * h as f64 / n as f64 });
        }
    }
    Ok(ReidentOutcome { points, plan, background_columns: background.known_columns(), flags })
}

#[allow(clippy::too_many_arguments)]
fn rsfd_survey<T: Trainer>(
    dataset: &Dataset,
    config: &ReidentConfig,
    trainer: &T,
    seed: Seed,
    survey: u64,
    attrs: &[usize],
    profiles: &mut [AttackerProfile],
    flags: &mut ReidentFlags,
) -> Result<()> {
    let PrivacySpec::Epsilon(epsilon) = config.privacy else {
        return Err(Error::InvalidArgument("PIE budgets apply to SMP only"));
    };
    let sub_domain = MultiDomain::new(attrs.iter().map(|&j| dataset.domain().domains()[j].clone()).collect())?;
    let priors = match (&config.solution, &config.priors) {
        (Solution::RsRfd(_), Some(p)) => Some(PriorSet::new(attrs.iter().map(|&j| p.get(j).to_vec()).collect())?),
        (Solution::RsRfd(_), None) => return Err(Error::InvalidArgument("RS+RFD needs priors")),
        _ => None,
    };
    let collector = FakeDataCollector::new(sub_domain, config.solution, config.flavor, epsilon, priors)?;
    let mut values = Vec::with_capacity(attrs.len());
    let mut tuples = Vec::with_capacity(dataset.n());
    for (u, row) in dataset.rows().enumerate() {
        values.clear();
        values.extend(attrs.iter().map(|&j| row[j]));
        let mut rng = seed.path(&[tag::USER, u as u64, tag::SURVEY, survey]).rng();
        tuples.push(collector.sanitize(&values, &mut rng)?.tuple);
    }
    let estimates = collector.estimate(&tuples)?;
    let s = libm::round(config.synthetic_multiplier * dataset.n() as f64) as usize;
    let mut synth_rng = seed.path(&[tag::SYNTH, survey]).rng();
    let set = synthetic_learning_set(&collector, &estimates, s, &mut synth_rng)?;
    let model = trainer.train(&set)?;
    if model.degenerate() {
        flags.degenerate_classifier += 1;
    }
    let inferred = infer_sampled_attribute(&model, &tuples, None)?;
    for (u, (tuple, &slot)) in tuples.iter().zip(&inferred.predictions).enumerate() {
        let SurveyTuple::Full(reports) = tuple else { unreachable!() };
        let params = collector.slot_params(slot)?;
        let mut attack_rng = seed.path(&[tag::ATTACK, u as u64, survey]).rng();
        let guess = predict_value(&reports[slot], &params, &mut attack_rng)?;
        profiles[u].set(attrs[slot], guess);
    }
    Ok(())
}
