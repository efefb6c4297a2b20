//! Experiment configuration.
//!
//! A TOML file describes one experiment. Command-line flags override the
//! matching file keys (`seed`, `output`, `format`, `runs`, `threads`), and the
//! file overrides built-in defaults. The thread count additionally falls back
//! to `MDLDP_THREADS`, then to the number of available cores.

use std::fmt;
use std::path::{Path, PathBuf};

use mdldp_core::adversary::reident::{Attacker, KnowledgeMode, PrivacySpec, SurveyRule};
use mdldp_core::adversary::AttackModel;
use mdldp_core::multidim::{SamplingMode, Scheme, Solution};
use mdldp_core::Protocol;
use serde::Deserialize;

use crate::dataset::Schema;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AnalyticAcc,
    OracleAttack,
    Reident,
    AttrInfer,
    MseUtility,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::AnalyticAcc => "analytic_acc",
            ExperimentKind::OracleAttack => "oracle_attack",
            ExperimentKind::Reident => "reident",
            ExperimentKind::AttrInfer => "attr_infer",
            ExperimentKind::MseUtility => "mse_utility",
        }
    }

    fn needs_dataset(self) -> bool {
        matches!(self, ExperimentKind::Reident | ExperimentKind::AttrInfer | ExperimentKind::MseUtility)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    Adult,
    Zipf,
    Uniform,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetSection {
    path: Option<PathBuf>,
    schema: Option<PathBuf>,
    #[serde(default)]
    columns: Vec<String>,
    identity: Option<String>,
    synthetic: Option<SyntheticKind>,
    rows: Option<usize>,
    #[serde(default)]
    ks: Vec<usize>,
    zipf_exponent: Option<f64>,
    subsample: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurveySection {
    count: Option<usize>,
    rule: Option<String>,
    sampling: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorSection {
    kind: Option<String>,
    epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kind: Option<ExperimentKind>,
    seed: Option<u64>,
    runs: Option<usize>,
    output: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
    dataset: Option<DatasetSection>,
    #[serde(default)]
    protocols: Vec<String>,
    #[serde(default)]
    solutions: Vec<String>,
    #[serde(default)]
    epsilons: Vec<f64>,
    #[serde(default)]
    betas: Vec<f64>,
    #[serde(default)]
    ks: Vec<usize>,
    reports: Option<usize>,
    #[serde(default)]
    surveys: SurveySection,
    #[serde(default)]
    top_k: Vec<usize>,
    knowledge: Option<String>,
    attacker: Option<String>,
    #[serde(default)]
    models: Vec<String>,
    #[serde(default)]
    synthetic_multipliers: Vec<f64>,
    #[serde(default)]
    compromised_fractions: Vec<f64>,
    #[serde(default)]
    priors: PriorSection,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub runs: Option<usize>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Csv { path: PathBuf, schema: Schema },
    Adult { rows: usize },
    Zipf { ks: Vec<usize>, exponent: f64, rows: usize },
    Uniform { ks: Vec<usize>, rows: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub source: DatasetSource,
    /// Rows kept after a seeded subsample, if set.
    pub subsample: Option<usize>,
}

/// Priors handed to RS+RFD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorChoice {
    Uniform,
    /// Exact dataset frequencies.
    True,
    /// Laplace-perturbed dataset frequencies with this total budget.
    Laplace(f64),
}

impl PriorChoice {
    pub fn label(self) -> String {
        match self {
            PriorChoice::Uniform => "uniform".into(),
            PriorChoice::True => "true".into(),
            PriorChoice::Laplace(e) => format!("laplace(eps={e})"),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub runs: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: usize,
    pub dataset: Option<DatasetSpec>,
    pub protocols: Vec<Protocol>,
    pub schemes: Vec<Scheme>,
    pub privacy: Vec<PrivacySpec>,
    pub ks: Vec<usize>,
    pub reports: usize,
    pub surveys: usize,
    pub survey_rule: SurveyRule,
    pub sampling: SamplingMode,
    pub top_k: Vec<usize>,
    pub knowledge: KnowledgeMode,
    pub attacker: Attacker,
    pub models: Vec<AttackModel>,
    pub synthetic_multipliers: Vec<f64>,
    pub compromised_fractions: Vec<f64>,
    pub priors: PriorChoice,
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn parse_list<T: std::str::FromStr>(items: &[String], what: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    items.iter().map(|s| s.parse::<T>().map_err(|e| bad(format!("{what} `{s}`: {e}")))).collect()
}

fn positive(values: &[f64], what: &str) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => Err(bad(format!("{what} must be positive and finite, got {v}"))),
        None => Ok(()),
    }
}

fn default_threads() -> usize {
    std::env::var("MDLDP_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

impl Experiment {
    /// Reads and validates a config file. Relative dataset paths resolve
    /// against the file's directory.
    pub fn from_file(path: &Path, kind: Option<ExperimentKind>, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base, kind, overrides)
    }

    pub fn from_toml(text: &str, base_dir: &Path, kind: Option<ExperimentKind>, overrides: &Overrides) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        resolve(file, base_dir, kind, overrides)
    }
}

fn resolve(file: ConfigFile, base: &Path, cli_kind: Option<ExperimentKind>, ov: &Overrides) -> Result<Experiment> {
    let kind = match (cli_kind, file.kind) {
        (Some(a), Some(b)) if a != b => return Err(bad(format!("subcommand runs `{a}` but the config declares `{b}`"))),
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(bad("experiment kind missing")),
    };
    let seed = ov.seed.or(file.seed).ok_or_else(|| bad("a seed is required (`seed` key or --seed)"))?;
    let runs = ov.runs.or(file.runs).unwrap_or(1);
    if runs == 0 {
        return Err(bad("runs must be at least 1"));
    }
    let threads = ov.threads.or(file.threads).unwrap_or_else(default_threads);
    if threads == 0 {
        return Err(bad("threads must be at least 1"));
    }

    let protocols: Vec<Protocol> = parse_list(&file.protocols, "protocol")?;
    let schemes: Vec<Scheme> = parse_list(&file.solutions, "solution")?;
    positive(&file.epsilons, "epsilon")?;
    if let Some(b) = file.betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(bad(format!("beta must lie in [0, 1], got {b}")));
    }
    let privacy: Vec<PrivacySpec> = match (file.epsilons.is_empty(), file.betas.is_empty()) {
        (false, true) => file.epsilons.iter().map(|&e| PrivacySpec::Epsilon(e)).collect(),
        (true, false) => file.betas.iter().map(|&b| PrivacySpec::BayesError(b)).collect(),
        (true, true) => return Err(bad("an epsilon or beta grid is required")),
        (false, false) => return Err(bad("give either an epsilon grid or a beta grid, not both")),
    };
    let uses_beta = matches!(privacy[0], PrivacySpec::BayesError(_));
    if uses_beta && kind != ExperimentKind::Reident {
        return Err(bad("beta grids are only supported by reident"));
    }

    let survey_rule = match file.surveys.rule.as_deref().unwrap_or("random_subset") {
        "random_subset" => SurveyRule::RandomSubset,
        "all_attributes" => SurveyRule::AllAttributes,
        other => return Err(bad(format!("unknown survey rule `{other}`"))),
    };
    let sampling = match file.surveys.sampling.as_deref().unwrap_or("without_replacement") {
        "without_replacement" => SamplingMode::WithoutReplacement,
        "with_replacement" => SamplingMode::WithReplacement,
        other => return Err(bad(format!("unknown sampling mode `{other}`"))),
    };
    let knowledge = match file.knowledge.as_deref().unwrap_or("FK") {
        "FK" | "fk" | "full" => KnowledgeMode::Full,
        "PK" | "pk" | "partial" => KnowledgeMode::Partial,
        other => return Err(bad(format!("unknown background knowledge `{other}`"))),
    };
    let attacker = match file.attacker.as_deref().unwrap_or("matching") {
        "matching" => Attacker::Matching,
        "null" => Attacker::Null,
        other => return Err(bad(format!("unknown attacker `{other}`"))),
    };
    let priors = match file.priors.kind.as_deref().unwrap_or("laplace") {
        "uniform" => PriorChoice::Uniform,
        "true" => PriorChoice::True,
        "laplace" => {
            let e = file.priors.epsilon.unwrap_or(0.1);
            positive(&[e], "prior epsilon")?;
            PriorChoice::Laplace(e)
        }
        other => return Err(bad(format!("unknown prior kind `{other}`"))),
    };
    let models: Vec<AttackModel> =
        if file.models.is_empty() { vec![AttackModel::Nk] } else { parse_list(&file.models, "attack model")? };
    let synthetic_multipliers = if file.synthetic_multipliers.is_empty() { vec![1.0] } else { file.synthetic_multipliers };
    positive(&synthetic_multipliers, "synthetic multiplier")?;
    let compromised_fractions = if file.compromised_fractions.is_empty() { vec![0.1] } else { file.compromised_fractions };
    if let Some(f) = compromised_fractions.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
        return Err(bad(format!("compromised fraction must lie in (0, 1), got {f}")));
    }
    let top_k = if file.top_k.is_empty() { vec![1, 5, 10] } else { file.top_k };
    if top_k.contains(&0) {
        return Err(bad("top_k values must be positive"));
    }
    let surveys = file.surveys.count.unwrap_or(5);
    if surveys == 0 {
        return Err(bad("survey count must be positive"));
    }
    if let Some(k) = file.ks.iter().find(|&&k| k < 2) {
        return Err(bad(format!("domain sizes must be at least 2, got {k}")));
    }

    match kind {
        ExperimentKind::AnalyticAcc | ExperimentKind::OracleAttack => {
            if protocols.is_empty() || file.ks.is_empty() {
                return Err(bad(format!("{kind} needs non-empty `protocols` and `ks`")));
            }
        }
        ExperimentKind::Reident => {
            if schemes.is_empty() {
                return Err(bad("reident needs at least one solution"));
            }
            if schemes.iter().any(|s| s.solution == Solution::Spl) {
                return Err(bad("reident supports SMP, RS+FD and RS+RFD"));
            }
            if schemes.iter().any(|s| s.solution == Solution::Smp) && protocols.is_empty() {
                return Err(bad("SMP needs at least one protocol"));
            }
            if uses_beta && schemes.iter().any(|s| s.solution != Solution::Smp) {
                return Err(bad("beta grids apply to SMP only"));
            }
        }
        ExperimentKind::AttrInfer | ExperimentKind::MseUtility => {
            if schemes.is_empty() || schemes.iter().any(|s| !s.solution.hides_sampled_attribute()) {
                return Err(bad(format!("{kind} needs RS+FD or RS+RFD solutions")));
            }
        }
    }

    let dataset = match (kind.needs_dataset(), file.dataset) {
        (true, None) => return Err(bad(format!("{kind} needs a [dataset] section"))),
        (false, _) => None,
        (true, Some(section)) => Some(resolve_dataset(section, base)?),
    };

    Ok(Experiment {
        kind,
        seed,
        runs,
        output: ov.output.clone().or(file.output.map(|p| base.join(p))),
        format: ov.format.or(file.format).unwrap_or_default(),
        threads,
        dataset,
        protocols,
        schemes,
        privacy,
        ks: file.ks,
        reports: file.reports.unwrap_or(100_000),
        surveys,
        survey_rule,
        sampling,
        top_k,
        knowledge,
        attacker,
        models,
        synthetic_multipliers,
        compromised_fractions,
        priors,
    })
}

fn resolve_dataset(s: DatasetSection, base: &Path) -> Result<DatasetSpec> {
    let rows = || s.rows.filter(|&r| r > 0).ok_or_else(|| bad("synthetic datasets need `rows` > 0"));
    let ks = || {
        if s.ks.is_empty() || s.ks.contains(&0) {
            Err(bad("synthetic datasets need non-empty positive `ks`"))
        } else {
            Ok(s.ks.clone())
        }
    };
    let source = match (s.synthetic, &s.path) {
        (Some(_), Some(_)) => return Err(bad("dataset: give either `path` or `synthetic`")),
        (None, None) => return Err(bad("dataset: `path` or `synthetic` required")),
        (None, Some(path)) => {
            let schema = match (&s.schema, s.columns.is_empty()) {
                (Some(file), true) => Schema::from_file(&base.join(file)).map_err(|e| bad(e.to_string()))?,
                (None, false) => Schema { columns: s.columns.clone(), identity: s.identity.clone() },
                _ => return Err(bad("dataset: give exactly one of `schema` or `columns`")),
            };
            DatasetSource::Csv { path: base.join(path), schema }
        }
        (Some(SyntheticKind::Adult), None) => DatasetSource::Adult { rows: rows()? },
        (Some(SyntheticKind::Zipf), None) => {
            let exponent = s.zipf_exponent.unwrap_or(1.0);
            if !(exponent.is_finite() && exponent >= 0.0) {
                return Err(bad("zipf_exponent must be finite and non-negative"));
            }
            DatasetSource::Zipf { ks: ks()?, exponent, rows: rows()? }
        }
        (Some(SyntheticKind::Uniform), None) => DatasetSource::Uniform { ks: ks()?, rows: rows()? },
    };
    if s.subsample == Some(0) {
        return Err(bad("subsample must be positive"));
    }
    Ok(DatasetSpec { source, subsample: s.subsample })
}
