//! Categorical datasets, frequency tables and derived priors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::log;
use rand::Rng;

use crate::multidim::{sample_categorical, MultiDomain, PriorSet};
use crate::oracle::clip_normalize;
use crate::{Error, Result};

/// `n × d` matrix of value indices, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    domain: MultiDomain,
    cells: Vec<usize>,
    identities: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(domain: MultiDomain, cells: Vec<usize>) -> Result<Self> {
        let d = domain.d();
        if cells.len() % d != 0 {
            return Err(Error::ShapeMismatch("cell count is not a multiple of d"));
        }
        let ks = domain.ks();
        for row in cells.chunks_exact(d) {
            for (&v, &k) in row.iter().zip(&ks) {
                if v >= k {
                    return Err(Error::ValueOutOfDomain { value: v, k });
                }
            }
        }
        Ok(Dataset { domain, cells, identities: None })
    }

    pub fn from_rows(domain: MultiDomain, rows: &[Vec<usize>]) -> Result<Self> {
        let d = domain.d();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::ShapeMismatch("ragged rows"));
        }
        Self::new(domain, rows.concat())
    }

    pub fn with_identities(mut self, identities: Vec<String>) -> Result<Self> {
        if identities.len() != self.n() {
            return Err(Error::ShapeMismatch("identity column length differs from row count"));
        }
        self.identities = Some(identities);
        Ok(self)
    }

    pub fn domain(&self) -> &MultiDomain {
        &self.domain
    }

    pub fn n(&self) -> usize {
        self.cells.len() / self.domain.d()
    }

    pub fn d(&self) -> usize {
        self.domain.d()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        let d = self.d();
        &self.cells[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[usize]> {
        self.cells.chunks_exact(self.d())
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows().map(move |r| r[j])
    }

    /// Identity label of row `i`, defaulting to the row index.
    pub fn identity(&self, i: usize) -> String {
        match &self.identities {
            Some(ids) => ids[i].clone(),
            None => alloc::format!("{i}"),
        }
    }

    pub fn identities(&self) -> Option<&[String]> {
        self.identities.as_deref()
    }

    /// Rows at the given indices, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut cells = Vec::with_capacity(indices.len() * self.d());
        for &i in indices {
            cells.extend_from_slice(self.row(i));
        }
        let identities = self.identities.as_ref().map(|ids| indices.iter().map(|&i| ids[i].clone()).collect());
        Dataset { domain: self.domain.clone(), cells, identities }
    }

    /// Uniform random subsample of `m` rows without replacement.
    pub fn subsample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<Dataset> {
        if m > self.n() {
            return Err(Error::InvalidArgument("subsample larger than dataset"));
        }
        let mut idx = rand::seq::index::sample(rng, self.n(), m).into_vec();
        idx.sort_unstable();
        Ok(self.select(&idx))
    }
}

/// What a [`FrequencyTable`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableFlavor {
    True,
    EstimatedRaw,
    EstimatedClipped,
    Prior,
}

/// Per-attribute frequency vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub flavor: TableFlavor,
    pub freqs: Vec<Vec<f64>>,
}

impl FrequencyTable {
    pub fn new(flavor: TableFlavor, freqs: Vec<Vec<f64>>) -> Result<Self> {
        if flavor != TableFlavor::EstimatedRaw {
            for f in &freqs {
                let total: f64 = f.iter().sum();
                if f.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidDistribution("frequency vector is not a distribution"));
                }
            }
        }
        Ok(FrequencyTable { flavor, freqs })
    }

    /// Clip-normalizes raw estimates. Fails if any attribute clips to all zeros.
    pub fn clipped(&self) -> Result<Self> {
        let freqs = self
            .freqs
            .iter()
            .map(|f| clip_normalize(f).ok_or(Error::InvalidDistribution("estimate clips to all zeros")))
            .collect::<Result<Vec<_>>>()?;
        Ok(FrequencyTable { flavor: TableFlavor::EstimatedClipped, freqs })
    }

    pub fn d(&self) -> usize {
        self.freqs.len()
    }

    pub fn into_priors(self) -> Result<PriorSet> {
        PriorSet::new(self.freqs)
    }
}

/// Empirical per-attribute distribution.
pub fn true_frequencies(dataset: &Dataset) -> Result<FrequencyTable> {
    if dataset.n() == 0 {
        return Err(Error::Empty("dataset"));
    }
    let mut counts: Vec<Vec<u64>> = dataset.domain().ks().iter().map(|&k| vec![0; k]).collect();
    for row in dataset.rows() {
        for (c, &v) in counts.iter_mut().zip(row) {
            c[v] += 1;
        }
    }
    let n = dataset.n() as f64;
    let freqs = counts.into_iter().map(|c| c.into_iter().map(|x| x as f64 / n).collect()).collect();
    Ok(FrequencyTable { flavor: TableFlavor::True, freqs })
}

/// Draw from Laplace(0, scale) by inversion.
pub fn sample_laplace<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    // u ∈ (−1/2, 1/2); the open lower end keeps the log finite.
    let u: f64 = rng.gen::<f64>() - 0.5;
    let magnitude = -scale * log(1.0 - 2.0 * u.abs());
    if u < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

/// Outcome of [`laplace_prior`].
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyPrior {
    pub priors: PriorSet,
    /// Attributes whose noisy histogram clipped to all zeros and were
    /// replaced by the uniform distribution.
    pub uniform_fallback: Vec<usize>,
}

/// Laplace-perturbed priors: each attribute gets budget `total_epsilon / d`,
/// noise scale `2 / (n · ε_attr)`, then clip and renormalize.
pub fn laplace_prior<R: Rng + ?Sized>(
    true_freqs: &FrequencyTable,
    total_epsilon: f64,
    n: usize,
    rng: &mut R,
) -> Result<NoisyPrior> {
    if !(total_epsilon > 0.0) {
        return Err(Error::NonPositiveEpsilon(total_epsilon));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("population size must be positive"));
    }
    let d = true_freqs.d();
    let per_attr = total_epsilon / d as f64;
    let scale = 2.0 / (n as f64 * per_attr);
    let mut uniform_fallback = Vec::new();
    let mut priors = Vec::with_capacity(d);
    for (j, f) in true_freqs.freqs.iter().enumerate() {
        let noisy: Vec<f64> = f.iter().map(|&x| x + sample_laplace(scale, rng)).collect();
        match clip_normalize(&noisy) {
            Some(p) => priors.push(p),
            None => {
                uniform_fallback.push(j);
                priors.push(vec![1.0 / f.len() as f64; f.len()]);
            }
        }
    }
    Ok(NoisyPrior { priors: PriorSet::new(priors)?, uniform_fallback })
}

/// `count` rows with independent per-attribute categorical draws.
pub fn synthesize_profiles<R: Rng + ?Sized>(
    table: &FrequencyTable,
    domain: &MultiDomain,
    count: usize,
    rng: &mut R,
) -> Result<Dataset> {
    if table.flavor == TableFlavor::EstimatedRaw {
        return Err(Error::InvalidDistribution("raw estimates must be clipped before sampling"));
    }
    if table.d() != domain.d() || table.freqs.iter().zip(domain.ks()).any(|(f, k)| f.len() != k) {
        return Err(Error::ShapeMismatch("frequency table shape differs from domain"));
    }
    let mut cells = Vec::with_capacity(count * domain.d());
    for _ in 0..count {
        for f in &table.freqs {
            cells.push(sample_categorical(f, rng));
        }
    }
    Dataset::new(domain.clone(), cells)
}

/// `(1/d) Σ_j (1/k_j) Σ_v (f − f̂)²`.
pub fn mse_avg(truth: &[Vec<f64>], estimate: &[Vec<f64>]) -> Result<f64> {
    if truth.len() != estimate.len() || truth.is_empty() {
        return Err(Error::ShapeMismatch("tables differ in attribute count"));
    }
    let mut total = 0.0;
    for (a, b) in truth.iter().zip(estimate) {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::ShapeMismatch("tables differ in domain size"));
        }
        let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        total += sq / a.len() as f64;
    }
    Ok(total / truth.len() as f64)
}
