//! Sampled-attribute classifiers over sanitized tuples.
//!
//! Features are small categorical codes: one per attribute for plain-value
//! reports, one per bit for unary reports. The default model is categorical
//! Naive Bayes with add-one smoothing; other models plug in through
//! [`Classifier`] and [`Trainer`].

use alloc::vec;
use alloc::vec::Vec;

use libm::log;

use crate::multidim::SurveyTuple;
use crate::oracle::SanitizedReport;
use crate::{Error, Result};

/// Cardinality of each feature position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    cardinalities: Vec<usize>,
}

impl FeatureSchema {
    pub fn new(cardinalities: Vec<usize>) -> Self {
        FeatureSchema { cardinalities }
    }

    /// Schema of full-vector tuples: `k_j` per plain-value slot, `k_j`
    /// binary features per unary slot.
    pub fn for_tuples(ks: &[usize], unary: bool) -> Self {
        let cardinalities = if unary {
            ks.iter().flat_map(|&k| core::iter::repeat(2).take(k)).collect()
        } else {
            ks.to_vec()
        };
        FeatureSchema { cardinalities }
    }

    pub fn len(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cardinalities.is_empty()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    fn check(&self, x: &[u32]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::ShapeMismatch("feature vector length differs from schema"));
        }
        if x.iter().zip(&self.cardinalities).any(|(&v, &c)| v as usize >= c) {
            return Err(Error::InvalidArgument("feature code outside its cardinality"));
        }
        Ok(())
    }
}

/// Encodes a full-vector tuple as feature codes.
pub fn encode_tuple(tuple: &SurveyTuple, out: &mut Vec<u32>) -> Result<()> {
    let SurveyTuple::Full(reports) = tuple else {
        return Err(Error::InvalidArgument("only full-vector tuples hide the sampled attribute"));
    };
    for r in reports {
        match r {
            SanitizedReport::Value(v) => out.push(*v as u32),
            SanitizedReport::Bits(bits) => out.extend(bits.iter().map(|&b| b as u32)),
            _ => return Err(Error::InvalidArgument("unsupported report type for feature encoding")),
        }
    }
    Ok(())
}

/// Labelled rows used to train a sampled-attribute classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningSet {
    schema: FeatureSchema,
    classes: usize,
    features: Vec<u32>,
    labels: Vec<usize>,
}

impl LearningSet {
    pub fn new(schema: FeatureSchema, classes: usize) -> Self {
        LearningSet { schema, classes, features: Vec::new(), labels: Vec::new() }
    }

    pub fn push(&mut self, x: &[u32], label: usize) -> Result<()> {
        self.schema.check(x)?;
        if label >= self.classes {
            return Err(Error::InvalidArgument("label outside the class range"));
        }
        self.features.extend_from_slice(x);
        self.labels.push(label);
        Ok(())
    }

    pub fn push_tuple(&mut self, tuple: &SurveyTuple, label: usize) -> Result<()> {
        let mut x = Vec::with_capacity(self.schema.len());
        encode_tuple(tuple, &mut x)?;
        self.push(&x, label)
    }

    /// Appends every row of `other`; schemas must agree.
    pub fn extend(&mut self, other: &LearningSet) -> Result<()> {
        if other.schema != self.schema || other.classes != self.classes {
            return Err(Error::ShapeMismatch("learning sets disagree on schema"));
        }
        self.features.extend_from_slice(&other.features);
        self.labels.extend_from_slice(&other.labels);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let w = self.schema.len();
        &self.features[i * w..(i + 1) * w]
    }
}

/// A trained predictor of the sampled attribute.
pub trait Classifier {
    fn predict(&self, x: &[u32]) -> usize;

    /// Set when training saw a single class and the model is constant.
    fn degenerate(&self) -> bool {
        false
    }
}

/// Produces a [`Classifier`] from a [`LearningSet`].
pub trait Trainer {
    type Model: Classifier;

    fn train(&self, set: &LearningSet) -> Result<Self::Model>;

    fn name(&self) -> &'static str;
}

/// Categorical Naive Bayes with Laplace smoothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveBayesTrainer {
    pub alpha: f64,
}

impl Default for NaiveBayesTrainer {
    fn default() -> Self {
        NaiveBayesTrainer { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayes {
    schema: FeatureSchema,
    offsets: Vec<usize>,
    /// `classes × Σcardinalities` log-likelihood table.
    log_lik: Vec<f64>,
    log_prior: Vec<f64>,
    constant: Option<usize>,
}

impl Trainer for NaiveBayesTrainer {
    type Model = NaiveBayes;

    fn name(&self) -> &'static str {
        "naive-bayes"
    }

    fn train(&self, set: &LearningSet) -> Result<NaiveBayes> {
        if set.is_empty() {
            return Err(Error::Empty("learning set"));
        }
        let schema = set.schema.clone();
        let mut offsets = Vec::with_capacity(schema.len());
        let mut width = 0;
        for &c in schema.cardinalities() {
            offsets.push(width);
            width += c;
        }
        let classes = set.classes;
        let mut counts = vec![0u64; classes * width];
        let mut class_counts = vec![0u64; classes];
        for i in 0..set.len() {
            let c = set.labels[i];
            class_counts[c] += 1;
            let base = c * width;
            for (f, &v) in set.row(i).iter().enumerate() {
                counts[base + offsets[f] + v as usize] += 1;
            }
        }
        let seen: Vec<usize> = (0..classes).filter(|&c| class_counts[c] > 0).collect();
        let constant = if seen.len() == 1 { Some(seen[0]) } else { None };
        let n = set.len() as f64;
        let log_prior = class_counts
            .iter()
            .map(|&c| if c == 0 { f64::NEG_INFINITY } else { log(c as f64 / n) })
            .collect();
        let mut log_lik = vec![0.0; classes * width];
        for c in 0..classes {
            let nc = class_counts[c] as f64;
            for (f, &card) in schema.cardinalities().iter().enumerate() {
                let denom = log(nc + self.alpha * card as f64);
                for v in 0..card {
                    let idx = c * width + offsets[f] + v;
                    log_lik[idx] = log(counts[idx] as f64 + self.alpha) - denom;
                }
            }
        }
        Ok(NaiveBayes { schema, offsets, log_lik, log_prior, constant })
    }
}

impl NaiveBayes {
    fn width(&self) -> usize {
        self.schema.cardinalities().iter().sum()
    }

    /// Unnormalized log posterior per class.
    pub fn log_scores(&self, x: &[u32]) -> Vec<f64> {
        let width = self.width();
        self.log_prior
            .iter()
            .enumerate()
            .map(|(c, &lp)| {
                let base = c * width;
                lp + x.iter().zip(&self.offsets).map(|(&v, &o)| self.log_lik[base + o + v as usize]).sum::<f64>()
            })
            .collect()
    }
}

impl Classifier for NaiveBayes {
    /// Highest posterior; ties go to the lowest class index.
    fn predict(&self, x: &[u32]) -> usize {
        if let Some(c) = self.constant {
            return c;
        }
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (c, s) in self.log_scores(x).into_iter().enumerate() {
            if s > best_score {
                best = c;
                best_score = s;
            }
        }
        best
    }

    fn degenerate(&self) -> bool {
        self.constant.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use rand::Rng;

    #[test]
    fn separable_set_is_learned() {
        let mut set = LearningSet::new(FeatureSchema::new(vec![3, 2]), 3);
        for i in 0..60 {
            let c = i % 3;
            set.push(&[c as u32, (i % 2) as u32], c).unwrap();
        }
        let model = NaiveBayesTrainer::default().train(&set).unwrap();
        for i in 0..set.len() {
            assert_eq!(model.predict(set.row(i)), set.labels()[i]);
        }
        assert!(!model.degenerate());
    }

    #[test]
    fn single_class_is_constant() {
        let mut set = LearningSet::new(FeatureSchema::new(vec![2]), 4);
        set.push(&[0], 2).unwrap();
        set.push(&[1], 2).unwrap();
        let model = NaiveBayesTrainer::default().train(&set).unwrap();
        assert!(model.degenerate());
        assert_eq!(model.predict(&[0]), 2);
    }

    #[test]
    fn empty_set_rejected() {
        let set = LearningSet::new(FeatureSchema::new(vec![2]), 2);
        assert_eq!(NaiveBayesTrainer::default().train(&set), Err(Error::Empty("learning set")));
    }

    #[test]
    fn posterior_matches_hand_computation() {
        // Two classes, one binary feature.
        let mut set = LearningSet::new(FeatureSchema::new(vec![2]), 2);
        for (x, y) in [(0, 0), (0, 0), (1, 0), (1, 1)] {
            set.push(&[x], y).unwrap();
        }
        let model = NaiveBayesTrainer::default().train(&set).unwrap();
        let s = model.log_scores(&[1]);
        // P(c=0)=3/4, P(x=1|c=0)=(1+1)/(3+2); P(c=1)=1/4, P(x=1|c=1)=(1+1)/(1+2).
        assert!((s[0] - log(0.75 * 0.4)).abs() < 1e-12);
        assert!((s[1] - log(0.25 * 2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_lowest_class() {
        let mut set = LearningSet::new(FeatureSchema::new(vec![2]), 2);
        set.push(&[0], 0).unwrap();
        set.push(&[0], 1).unwrap();
        let model = NaiveBayesTrainer::default().train(&set).unwrap();
        assert_eq!(model.predict(&[1]), 0);
    }

    #[test]
    fn noise_features_give_prior_accuracy() {
        let mut rng = Seed::new(12).rng();
        let mut set = LearningSet::new(FeatureSchema::new(vec![4, 4]), 3);
        for _ in 0..3000 {
            let x = [rng.gen_range(0..4u32), rng.gen_range(0..4u32)];
            set.push(&x, rng.gen_range(0..3)).unwrap();
        }
        let model = NaiveBayesTrainer::default().train(&set).unwrap();
        let n = 30_000;
        let hits = (0..n)
            .filter(|_| {
                let x = [rng.gen_range(0..4u32), rng.gen_range(0..4u32)];
                model.predict(&x) == rng.gen_range(0..3)
            })
            .count();
        let rate = hits as f64 / n as f64;
        let sigma = libm::sqrt(2.0 / 9.0 / n as f64);
        assert!((rate - 1.0 / 3.0).abs() < 3.0 * sigma, "{rate}");
    }

    #[test]
    fn encodes_unary_and_plain_tuples() {
        let mut out = Vec::new();
        let t = SurveyTuple::Full(vec![SanitizedReport::Value(2), SanitizedReport::Value(0)]);
        encode_tuple(&t, &mut out).unwrap();
        assert_eq!(out, vec![2, 0]);
        out.clear();
        let t = SurveyTuple::Full(vec![SanitizedReport::Bits(vec![true, false]), SanitizedReport::Bits(vec![false, false, true])]);
        encode_tuple(&t, &mut out).unwrap();
        assert_eq!(out, vec![1, 0, 0, 0, 1]);
        assert_eq!(FeatureSchema::for_tuples(&[2, 3], true).len(), 5);
        let smp = SurveyTuple::Sampled { attribute: 0, report: SanitizedReport::Value(1) };
        assert!(encode_tuple(&smp, &mut out).is_err());
    }
}
