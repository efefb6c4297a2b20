//! Inferring which attribute an RS+FD / RS+RFD user actually sampled.
//!
//! - **NK** trains on synthetic profiles drawn from the aggregator's own
//!   (clip-normalized) estimates and pushed through the same collector.
//! - **PK** trains on compromised users whose sampled attribute is known.
//! - **HM** trains on both.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use libm::round;
use rand::Rng;

use super::classifier::{encode_tuple, Classifier, FeatureSchema, LearningSet, Trainer};
use crate::data::{synthesize_profiles, Dataset, FrequencyTable, TableFlavor};
use crate::multidim::{FakeDataCollector, SurveyTuple};
use crate::rng::{tag, Seed};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttackModel {
    Nk,
    Pk,
    Hm,
}

impl AttackModel {
    pub const ALL: [AttackModel; 3] = [AttackModel::Nk, AttackModel::Pk, AttackModel::Hm];

    pub fn name(self) -> &'static str {
        match self {
            AttackModel::Nk => "NK",
            AttackModel::Pk => "PK",
            AttackModel::Hm => "HM",
        }
    }
}

impl fmt::Display for AttackModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NK" => Ok(AttackModel::Nk),
            "PK" => Ok(AttackModel::Pk),
            "HM" => Ok(AttackModel::Hm),
            _ => Err(Error::InvalidArgument("unknown attack model")),
        }
    }
}

/// Where the rows of a learning set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Synthetic,
    Compromised,
    Mixed,
}

/// Compromised users: their sanitized tuples and true sampled attributes.
#[derive(Debug, Clone, Copy)]
pub struct Compromised<'a> {
    pub tuples: &'a [SurveyTuple],
    pub labels: &'a [usize],
}

pub fn feature_schema(collector: &FakeDataCollector) -> FeatureSchema {
    FeatureSchema::for_tuples(&collector.domain().ks(), collector.is_unary())
}

/// `s` synthetic profiles from raw estimates, sanitized by `collector`.
pub fn synthetic_learning_set<R: Rng + ?Sized>(
    collector: &FakeDataCollector,
    raw_estimates: &[Vec<f64>],
    s: usize,
    rng: &mut R,
) -> Result<LearningSet> {
    let table = FrequencyTable::new(TableFlavor::EstimatedRaw, raw_estimates.to_vec())?.clipped()?;
    let profiles = synthesize_profiles(&table, collector.domain(), s, rng)?;
    let mut set = LearningSet::new(feature_schema(collector), collector.domain().d());
    for row in profiles.rows() {
        let out = collector.sanitize(row, rng)?;
        set.push_tuple(&out.tuple, out.sampled)?;
    }
    Ok(set)
}

pub fn compromised_learning_set(collector: &FakeDataCollector, rows: Compromised<'_>) -> Result<LearningSet> {
    if rows.tuples.is_empty() {
        return Err(Error::Empty("compromised rows"));
    }
    if rows.tuples.len() != rows.labels.len() {
        return Err(Error::ShapeMismatch("compromised tuples and labels differ in length"));
    }
    let mut set = LearningSet::new(feature_schema(collector), collector.domain().d());
    for (t, &l) in rows.tuples.iter().zip(rows.labels) {
        set.push_tuple(t, l)?;
    }
    Ok(set)
}

/// Learning set for `model`. NK needs `raw_estimates`, PK needs
/// `compromised`, HM needs both.
pub fn build_learning_set<R: Rng + ?Sized>(
    model: AttackModel,
    collector: &FakeDataCollector,
    raw_estimates: Option<&[Vec<f64>]>,
    compromised: Option<Compromised<'_>>,
    s: usize,
    rng: &mut R,
) -> Result<(LearningSet, Provenance)> {
    let nk = |rng: &mut R| {
        let est = raw_estimates.ok_or(Error::InvalidArgument("NK needs estimated frequencies"))?;
        synthetic_learning_set(collector, est, s, rng)
    };
    let pk = || compromised_learning_set(collector, compromised.ok_or(Error::Empty("compromised rows"))?);
    match model {
        AttackModel::Nk => Ok((nk(rng)?, Provenance::Synthetic)),
        AttackModel::Pk => Ok((pk()?, Provenance::Compromised)),
        AttackModel::Hm => {
            let mut set = nk(rng)?;
            set.extend(&pk()?)?;
            Ok((set, Provenance::Mixed))
        }
    }
}

/// Predicted sampled attributes and, given the truth, AIF-ACC in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub predictions: Vec<usize>,
    pub aif_acc: Option<f64>,
}

pub fn infer_sampled_attribute<C: Classifier + ?Sized>(
    model: &C,
    tuples: &[SurveyTuple],
    truth: Option<&[usize]>,
) -> Result<Inference> {
    let mut x = Vec::new();
    let mut predictions = Vec::with_capacity(tuples.len());
    for t in tuples {
        x.clear();
        encode_tuple(t, &mut x)?;
        predictions.push(model.predict(&x));
    }
    let aif_acc = match truth {
        Some(truth) if truth.len() != tuples.len() => {
            return Err(Error::ShapeMismatch("truth length differs from tuple count"))
        }
        Some(_) if tuples.is_empty() => return Err(Error::Empty("tuples")),
        Some(truth) => {
            let hits = predictions.iter().zip(truth).filter(|(a, b)| a == b).count();
            Some(100.0 * hits as f64 / tuples.len() as f64)
        }
        None => None,
    };
    Ok(Inference { predictions, aif_acc })
}

/// Knobs of one attribute-inference run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttrInferenceConfig {
    pub model: AttackModel,
    /// `s = round(synthetic_multiplier · n)` synthetic profiles (NK, HM).
    pub synthetic_multiplier: f64,
    /// `n_pk = round(compromised_fraction · n)` compromised users (PK, HM).
    pub compromised_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttrInferenceOutcome {
    pub aif_acc: f64,
    /// Random-guess accuracy `100/d`.
    pub baseline: f64,
    pub train_rows: usize,
    pub test_rows: usize,
    /// The classifier saw a single class and predicts a constant.
    pub degenerate_classifier: bool,
}

/// Sanitizes every user of `dataset` with `collector`, trains the configured
/// attacker and scores it on the users that were not compromised.
pub fn run_attr_inference<T: Trainer>(
    dataset: &Dataset,
    collector: &FakeDataCollector,
    config: &AttrInferenceConfig,
    trainer: &T,
    seed: Seed,
) -> Result<AttrInferenceOutcome> {
    let n = dataset.n();
    if n == 0 {
        return Err(Error::Empty("dataset"));
    }
    if dataset.domain().ks() != collector.domain().ks() {
        return Err(Error::ShapeMismatch("dataset and collector domains differ"));
    }
    let mut tuples = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (u, row) in dataset.rows().enumerate() {
        let mut rng = seed.path(&[tag::USER, u as u64]).rng();
        let out = collector.sanitize(row, &mut rng)?;
        tuples.push(out.tuple);
        labels.push(out.sampled);
    }

    let uses_pk = config.model != AttackModel::Nk;
    let n_pk = if uses_pk { round(config.compromised_fraction * n as f64) as usize } else { 0 };
    if uses_pk && n_pk == 0 {
        return Err(Error::Empty("compromised rows"));
    }
    if n_pk >= n {
        return Err(Error::InvalidArgument("compromised fraction leaves no users to test"));
    }
    let mut is_compromised = alloc::vec![false; n];
    let mut attack_rng = seed.child(tag::ATTACK).rng();
    for i in rand::seq::index::sample(&mut attack_rng, n, n_pk) {
        is_compromised[i] = true;
    }
    let (mut pk_tuples, mut pk_labels, mut test_tuples, mut test_labels) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for ((t, l), &c) in tuples.iter().zip(&labels).zip(&is_compromised) {
        if c {
            pk_tuples.push(t.clone());
            pk_labels.push(*l);
        } else {
            test_tuples.push(t.clone());
            test_labels.push(*l);
        }
    }

    let estimates = if config.model != AttackModel::Pk { Some(collector.estimate(&tuples)?) } else { None };
    let s = round(config.synthetic_multiplier * n as f64) as usize;
    let mut synth_rng = seed.child(tag::SYNTH).rng();
    let compromised = Compromised { tuples: &pk_tuples, labels: &pk_labels };
    let (set, _) = build_learning_set(
        config.model,
        collector,
        estimates.as_deref(),
        uses_pk.then_some(compromised),
        s,
        &mut synth_rng,
    )?;
    let model = trainer.train(&set)?;
    let inference = infer_sampled_attribute(&model, &test_tuples, Some(&test_labels))?;
    Ok(AttrInferenceOutcome {
        aif_acc: inference.aif_acc.unwrap_or(0.0),
        baseline: 100.0 / collector.domain().d() as f64,
        train_rows: set.len(),
        test_rows: test_tuples.len(),
        degenerate_classifier: model.degenerate(),
    })
}
