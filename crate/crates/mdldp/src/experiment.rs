//! Grid expansion and parallel execution of configured experiments.
//!
//! Every (grid point, run) pair is an independent job whose RNG streams are
//! derived from `(seed, grid index, run index)`, so the thread count never
//! changes the output. Survey plans and RS+RFD priors are drawn per run and
//! shared by all grid points of that run.

use mdldp_core::adversary::inference::{run_attr_inference, AttrInferenceConfig};
use mdldp_core::adversary::plausible::{
    analytic_acc, exact_acc, multi_collection_acc, multi_collection_from, predict_value, simulate_multi_collection,
    CollectionMode,
};
use mdldp_core::adversary::reident::{
    draw_survey_plan, run_reident_experiment, Attacker, KnowledgeMode, PrivacySpec, ReidentConfig, SurveyPlan,
};
use mdldp_core::adversary::{AttackModel, NaiveBayesTrainer};
use mdldp_core::data::{laplace_prior, mse_avg, true_frequencies, Dataset, FrequencyTable};
use mdldp_core::multidim::{FakeDataCollector, FakeVariant, PriorSet, Scheme, Solution, UeFlavor};
use mdldp_core::oracle::randomize;
use mdldp_core::rng::{tag, Seed};
use mdldp_core::{Protocol, ProtocolParams};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{DatasetSource, DatasetSpec, Experiment, ExperimentKind, PriorChoice};
use crate::dataset::load_dataset;
use crate::error::{HarnessError, Result};
use crate::export::ResultRow;
use crate::synth;

const CLASSIFIER: &str = "naive_bayes";

/// Loads or generates the dataset, then applies the seeded subsample.
pub fn materialize_dataset(spec: &DatasetSpec, seed: u64) -> Result<Dataset> {
    let gen_seed = Seed::new(seed).path(&[tag::DATA, 0]);
    let full = match &spec.source {
        DatasetSource::Csv { path, schema } => load_dataset(path, schema)?,
        DatasetSource::Adult { rows } => synth::adult_like(*rows, gen_seed),
        DatasetSource::Zipf { ks, exponent, rows } => synth::zipf_dataset(ks, *exponent, *rows, gen_seed),
        DatasetSource::Uniform { ks, rows } => synth::uniform_dataset(ks, *rows, gen_seed),
    };
    match spec.subsample {
        Some(m) if m < full.n() => full
            .subsample(m, &mut Seed::new(seed).path(&[tag::DATA, 1]).rng())
            .map_err(|e| HarnessError::core("subsample", e)),
        _ => Ok(full),
    }
}

#[derive(Debug, Clone)]
enum Point {
    Oracle { protocol: Protocol, epsilon: f64 },
    Reident { scheme: Scheme, protocol: Protocol, privacy: PrivacySpec },
    AttrInfer { scheme: Scheme, epsilon: f64, model: AttackModel, multiplier: f64, fraction: f64 },
    /// Every configured solution sharing one fake-data variant, so RS+FD and
    /// RS+RFD see identical user streams.
    Mse { schemes: Vec<Scheme>, epsilon: f64 },
}

impl Point {
    fn describe(&self) -> String {
        match self {
            Point::Oracle { protocol, epsilon } => format!("{protocol} eps={epsilon}"),
            Point::Reident { scheme, protocol, privacy } => format!("{scheme} {protocol} {privacy:?}"),
            Point::AttrInfer { scheme, epsilon, model, .. } => format!("{scheme} eps={epsilon} {model}"),
            Point::Mse { schemes, epsilon } => format!("{} eps={epsilon}", schemes[0]),
        }
    }
}

fn epsilons(exp: &Experiment) -> Vec<f64> {
    exp.privacy
        .iter()
        .filter_map(|p| match p {
            PrivacySpec::Epsilon(e) => Some(*e),
            PrivacySpec::BayesError(_) => None,
        })
        .collect()
}

fn pairing_key(s: &Scheme) -> (FakeVariant, Option<UeFlavor>) {
    let variant = s.solution.fake_variant().expect("validated as a fake-data solution");
    (variant, (variant != FakeVariant::Grr).then_some(s.flavor))
}

fn grid(exp: &Experiment) -> Vec<Point> {
    let mut points = Vec::new();
    match exp.kind {
        ExperimentKind::AnalyticAcc | ExperimentKind::OracleAttack => {
            for &protocol in &exp.protocols {
                for epsilon in epsilons(exp) {
                    points.push(Point::Oracle { protocol, epsilon });
                }
            }
        }
        ExperimentKind::Reident => {
            for &scheme in &exp.schemes {
                let protocols =
                    if scheme.solution == Solution::Smp { exp.protocols.clone() } else { vec![slot_protocol(&scheme)] };
                for protocol in protocols {
                    for &privacy in &exp.privacy {
                        points.push(Point::Reident { scheme, protocol, privacy });
                    }
                }
            }
        }
        ExperimentKind::AttrInfer => {
            for &scheme in &exp.schemes {
                for epsilon in epsilons(exp) {
                    for &model in &exp.models {
                        let multipliers = if model == AttackModel::Pk { vec![0.0] } else { exp.synthetic_multipliers.clone() };
                        let fractions = if model == AttackModel::Nk { vec![0.0] } else { exp.compromised_fractions.clone() };
                        for &multiplier in &multipliers {
                            for &fraction in &fractions {
                                points.push(Point::AttrInfer { scheme, epsilon, model, multiplier, fraction });
                            }
                        }
                    }
                }
            }
        }
        ExperimentKind::MseUtility => {
            let mut groups: Vec<Vec<Scheme>> = Vec::new();
            for s in &exp.schemes {
                match groups.iter_mut().find(|g| pairing_key(&g[0]) == pairing_key(s)) {
                    Some(g) if !g.contains(s) => g.push(*s),
                    Some(_) => {}
                    None => groups.push(vec![*s]),
                }
            }
            for g in groups {
                for epsilon in epsilons(exp) {
                    points.push(Point::Mse { schemes: g.clone(), epsilon });
                }
            }
        }
    }
    points
}

fn slot_protocol(s: &Scheme) -> Protocol {
    match s.solution.fake_variant() {
        Some(FakeVariant::Grr) => Protocol::Grr,
        Some(_) => s.flavor.protocol(),
        None => Protocol::Grr,
    }
}

/// Per-run state shared by every grid point of that run.
struct RunShared {
    plan: Option<SurveyPlan>,
    priors: Option<(PriorSet, Vec<usize>)>,
}

struct Context<'a> {
    exp: &'a Experiment,
    dataset: Option<Dataset>,
    truth: Option<FrequencyTable>,
    runs: Vec<RunShared>,
}

fn make_priors(choice: PriorChoice, dataset: &Dataset, truth: &FrequencyTable, seed: Seed) -> Result<(PriorSet, Vec<usize>)> {
    let wrap = |e| HarnessError::core("priors", e);
    match choice {
        PriorChoice::Uniform => Ok((PriorSet::uniform(&dataset.domain().ks()), Vec::new())),
        PriorChoice::True => Ok((truth.clone().into_priors().map_err(wrap)?, Vec::new())),
        PriorChoice::Laplace(eps) => {
            let noisy = laplace_prior(truth, eps, dataset.n(), &mut seed.rng()).map_err(wrap)?;
            Ok((noisy.priors, noisy.uniform_fallback))
        }
    }
}

/// Expands the grid and runs every (point, run) job on a pool of
/// `exp.threads` workers. Rows come back in grid order, then run order.
pub fn run_experiment(exp: &Experiment) -> Result<Vec<ResultRow>> {
    let dataset = exp.dataset.as_ref().map(|d| materialize_dataset(d, exp.seed)).transpose()?;
    let truth = dataset.as_ref().map(true_frequencies).transpose().map_err(|e| HarnessError::core("frequencies", e))?;
    let master = Seed::new(exp.seed);
    let mut runs = Vec::with_capacity(exp.runs);
    for r in 0..exp.runs as u64 {
        let mut shared = RunShared { plan: None, priors: None };
        if let (Some(ds), Some(t)) = (&dataset, &truth) {
            if exp.kind == ExperimentKind::Reident {
                let mut rng = master.path(&[tag::STRUCTURE, r]).rng();
                shared.plan = Some(draw_survey_plan(ds.d(), exp.surveys, exp.survey_rule, &mut rng));
            }
            if exp.kind != ExperimentKind::MseUtility && exp.schemes.iter().any(|s| matches!(s.solution, Solution::RsRfd(_))) {
                shared.priors = Some(make_priors(exp.priors, ds, t, master.path(&[tag::PRIOR, r]))?);
            }
        }
        runs.push(shared);
    }
    let ctx = Context { exp, dataset, truth, runs };
    let points = grid(exp);
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..exp.runs).map(move |r| (p, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(exp.threads).build()?;
    let results: Vec<Result<Vec<ResultRow>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, r)| {
                let seed = master.path(&[tag::GRID, p as u64, tag::RUN, r as u64]);
                run_point(&ctx, &points[p], r, seed).map_err(|e| match e {
                    HarnessError::Core { context, source } => HarnessError::Core {
                        context: format!("grid point {p} ({}), run {r}: {context}", points[p].describe()),
                        source,
                    },
                    other => other,
                })
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

struct RowBase<'a> {
    experiment: &'a str,
    protocol: String,
    solution: String,
    epsilon: Option<f64>,
    beta: Option<f64>,
    run: usize,
    seed: u64,
}

impl RowBase<'_> {
    fn row(&self, metric: String, value: f64, stderr: Option<f64>, flags: &Flags) -> ResultRow {
        ResultRow {
            experiment: self.experiment.to_string(),
            protocol: self.protocol.clone(),
            solution: self.solution.clone(),
            epsilon: self.epsilon,
            beta: self.beta,
            metric,
            value,
            stderr,
            run: self.run,
            seed: self.seed,
            flags: flags.render(),
        }
    }
}

#[derive(Default, Clone)]
struct Flags(Vec<(String, String)>);

impl Flags {
    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
    }
}

fn join(xs: &[usize], sep: &str) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(sep)
}

/// Standard error (percent) of an accuracy measured on `n` trials.
fn pct_stderr(acc_percent: f64, n: usize) -> f64 {
    let p = acc_percent / 100.0;
    100.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn param_flags(params: &ProtocolParams) -> Flags {
    let f = Flags::default();
    match params.protocol {
        Protocol::Olh => f.with("g", params.g().unwrap_or(0)),
        Protocol::Ss => f.with("omega", params.omega().unwrap_or(0)),
        _ => f,
    }
}

fn run_point(ctx: &Context<'_>, point: &Point, run: usize, seed: Seed) -> Result<Vec<ResultRow>> {
    let exp = ctx.exp;
    let core = |what: &str| {
        let what = what.to_string();
        move |e| HarnessError::core(what, e)
    };
    match point {
        Point::Oracle { protocol, epsilon } => {
            let base = RowBase {
                experiment: exp.kind.name(),
                protocol: protocol.name().into(),
                solution: "SMP".into(),
                epsilon: Some(*epsilon),
                beta: None,
                run,
                seed: seed.value(),
            };
            oracle_rows(exp, *protocol, *epsilon, &base, seed).map_err(core("oracle attack"))
        }
        Point::Reident { scheme, protocol, privacy } => {
            let dataset = ctx.dataset.as_ref().expect("validated");
            let (epsilon, beta) = match privacy {
                PrivacySpec::Epsilon(e) => (Some(*e), None),
                PrivacySpec::BayesError(b) => (None, Some(*b)),
            };
            let base = RowBase {
                experiment: exp.kind.name(),
                protocol: protocol.name().into(),
                solution: scheme.to_string(),
                epsilon,
                beta,
                run,
                seed: seed.value(),
            };
            let shared = &ctx.runs[run];
            let hides = scheme.solution.hides_sampled_attribute();
            let config = ReidentConfig {
                solution: scheme.solution,
                flavor: scheme.flavor,
                protocol: *protocol,
                privacy: *privacy,
                surveys: exp.surveys,
                survey_rule: exp.survey_rule,
                sampling: exp.sampling,
                knowledge: exp.knowledge,
                top_k: exp.top_k.clone(),
                attacker: exp.attacker,
                synthetic_multiplier: exp.synthetic_multipliers[0],
                priors: shared.priors.as_ref().map(|p| p.0.clone()).filter(|_| matches!(scheme.solution, Solution::RsRfd(_))),
                plan: shared.plan.clone(),
            };
            let out =
                run_reident_experiment(dataset, &config, &NaiveBayesTrainer::default(), seed).map_err(core("reident"))?;
            let plan: Vec<String> = out.plan.surveys.iter().map(|s| join(s, "-")).collect();
            let mut flags = Flags::default()
                .with("knowledge", if exp.knowledge == KnowledgeMode::Full { "FK" } else { "PK" })
                .with("attacker", if exp.attacker == Attacker::Matching { "matching" } else { "null" })
                .with("background", join(&out.background_columns, "-"))
                .with("plan", plan.join("|"))
                .with("exhausted", out.flags.exhausted);
            if beta.is_some() {
                flags = flags
                    .with("alpha_clamped", out.flags.alpha_clamped)
                    .with("pass_through", join(&out.flags.pass_through, "-"))
                    .with("zero_budget", join(&out.flags.zero_budget, "-"));
            }
            if hides {
                flags = flags
                    .with("classifier", CLASSIFIER)
                    .with("s", format!("{}n", config.synthetic_multiplier))
                    .with("degenerate_classifier", out.flags.degenerate_classifier);
            }
            if let (Solution::RsRfd(_), Some((_, fallback))) = (scheme.solution, &shared.priors) {
                flags = flags.with("priors", exp.priors.label()).with("prior_uniform_fallback", join(fallback, "-"));
            }
            Ok(out
                .points
                .iter()
                .map(|p| {
                    let metric = format!("RID-ACC[surveys={},top_k={}]", p.surveys, p.top_k);
                    base.row(metric, p.rid_acc, Some(pct_stderr(p.rid_acc, dataset.n())), &flags)
                })
                .collect())
        }
        Point::AttrInfer { scheme, epsilon, model, multiplier, fraction } => {
            let dataset = ctx.dataset.as_ref().expect("validated");
            let shared = &ctx.runs[run];
            let rfd = matches!(scheme.solution, Solution::RsRfd(_));
            let priors = shared.priors.as_ref().filter(|_| rfd).map(|p| p.0.clone());
            let collector = FakeDataCollector::new(dataset.domain().clone(), scheme.solution, scheme.flavor, *epsilon, priors)
                .map_err(core("collector"))?;
            let config = AttrInferenceConfig { model: *model, synthetic_multiplier: *multiplier, compromised_fraction: *fraction };
            let out = run_attr_inference(dataset, &collector, &config, &NaiveBayesTrainer::default(), seed)
                .map_err(core("attribute inference"))?;
            let base = RowBase {
                experiment: exp.kind.name(),
                protocol: slot_protocol(scheme).name().into(),
                solution: scheme.to_string(),
                epsilon: Some(*epsilon),
                beta: None,
                run,
                seed: seed.value(),
            };
            let metric = match model {
                AttackModel::Nk => format!("AIF-ACC[model=NK,s={multiplier}n]"),
                AttackModel::Pk => format!("AIF-ACC[model=PK,n_pk={fraction}n]"),
                AttackModel::Hm => format!("AIF-ACC[model=HM,s={multiplier}n,n_pk={fraction}n]"),
            };
            let mut flags = Flags::default()
                .with("classifier", CLASSIFIER)
                .with("baseline", crate::export::format_float(out.baseline))
                .with("train_rows", out.train_rows)
                .with("test_rows", out.test_rows)
                .with("degenerate_classifier", out.degenerate_classifier);
            if let (true, Some((_, fallback))) = (rfd, &shared.priors) {
                flags = flags.with("priors", exp.priors.label()).with("prior_uniform_fallback", join(fallback, "-"));
            }
            Ok(vec![base.row(metric, out.aif_acc, Some(pct_stderr(out.aif_acc, out.test_rows)), &flags)])
        }
        Point::Mse { schemes, epsilon } => {
            let dataset = ctx.dataset.as_ref().expect("validated");
            let truth = ctx.truth.as_ref().expect("validated");
            let needs_priors = schemes.iter().any(|s| matches!(s.solution, Solution::RsRfd(_)));
            let priors =
                if needs_priors { Some(make_priors(exp.priors, dataset, truth, seed.child(tag::PRIOR))?) } else { None };
            let mut rows = Vec::with_capacity(schemes.len());
            for scheme in schemes {
                let rfd = matches!(scheme.solution, Solution::RsRfd(_));
                let p = priors.as_ref().filter(|_| rfd).map(|p| p.0.clone());
                let collector = FakeDataCollector::new(dataset.domain().clone(), scheme.solution, scheme.flavor, *epsilon, p)
                    .map_err(core("collector"))?;
                let mut tuples = Vec::with_capacity(dataset.n());
                for (u, row) in dataset.rows().enumerate() {
                    let mut rng = seed.path(&[tag::USER, u as u64]).rng();
                    tuples.push(collector.sanitize(row, &mut rng).map_err(core("sanitize"))?.tuple);
                }
                let est = collector.estimate(&tuples).map_err(core("estimate"))?;
                let mse = mse_avg(&truth.freqs, &est).map_err(core("mse"))?;
                let base = RowBase {
                    experiment: exp.kind.name(),
                    protocol: slot_protocol(scheme).name().into(),
                    solution: scheme.to_string(),
                    epsilon: Some(*epsilon),
                    beta: None,
                    run,
                    seed: seed.value(),
                };
                let mut flags = Flags::default().with("n", dataset.n());
                if let (true, Some((_, fallback))) = (rfd, &priors) {
                    flags = flags.with("priors", exp.priors.label()).with("prior_uniform_fallback", join(fallback, "-"));
                }
                rows.push(base.row("MSE_avg".into(), mse, None, &flags));
            }
            Ok(rows)
        }
    }
}

fn oracle_rows(
    exp: &Experiment,
    protocol: Protocol,
    epsilon: f64,
    base: &RowBase<'_>,
    seed: Seed,
) -> mdldp_core::Result<Vec<ResultRow>> {
    let none = Flags::default();
    let mut rows = Vec::new();
    let mut exact = Vec::with_capacity(exp.ks.len());
    let mut rng = seed.rng();
    for &k in &exp.ks {
        let params = ProtocolParams::new(protocol, epsilon, k)?;
        let flags = param_flags(&params);
        let closed = analytic_acc(protocol, epsilon, k)?;
        let ex = exact_acc(&params);
        exact.push(ex);
        rows.push(base.row(format!("ACC[k={k}]"), closed, None, &none));
        rows.push(base.row(format!("ACC_exact[k={k}]"), ex, None, &flags));
        if exp.kind == ExperimentKind::OracleAttack {
            let mut hits = 0usize;
            for _ in 0..exp.reports {
                let v = rng.gen_range(0..k);
                let report = randomize(v, &params, &mut rng)?;
                hits += usize::from(predict_value(&report, &params, &mut rng)? == v);
            }
            let acc = 100.0 * hits as f64 / exp.reports as f64;
            rows.push(base.row(format!("ACC_empirical[k={k}]"), acc, Some(pct_stderr(acc, exp.reports)), &flags));
        }
    }
    if exp.ks.len() >= 2 {
        for (mode, label) in [(CollectionMode::Uniform, "uniform"), (CollectionMode::NonUniform, "non_uniform")] {
            rows.push(base.row(format!("ACC_multi[{label}]"), multi_collection_acc(protocol, epsilon, &exp.ks, mode)?, None, &none));
            rows.push(base.row(format!("ACC_multi_exact[{label}]"), multi_collection_from(&exact, mode)?, None, &none));
            if exp.kind == ExperimentKind::OracleAttack {
                let trial = simulate_multi_collection(protocol, epsilon, &exp.ks, mode, exp.reports, &mut rng)?;
                let acc = trial.accuracy();
                let flags = Flags::default().with("complete", trial.complete);
                rows.push(base.row(
                    format!("ACC_multi_empirical[{label}]"),
                    acc,
                    Some(pct_stderr(acc, exp.reports)),
                    &flags,
                ));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Overrides;
    use std::collections::HashMap;
    use std::path::Path;

    fn exp(text: &str, threads: usize) -> Experiment {
        Experiment::from_toml(text, Path::new("."), None, &Overrides { threads: Some(threads), ..Default::default() })
            .unwrap()
    }

    const MSE_UNIFORM: &str = r#"
        kind = "mse_utility"
        seed = 11
        runs = 2
        solutions = ["RS+FD[GRR]", "RS+RFD[GRR]", "RS+FD[OUE-r]", "RS+RFD[OUE-r]"]
        epsilons = [1.0, 2.0]
        [priors]
        kind = "uniform"
        [dataset]
        synthetic = "zipf"
        ks = [3, 4, 5]
        rows = 400
    "#;

    #[test]
    fn uniform_priors_make_rfd_rows_equal_fd_rows() {
        let rows = run_experiment(&exp(MSE_UNIFORM, 2)).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2 * 2);
        let mut by_key: HashMap<(String, u64, usize), Vec<f64>> = HashMap::new();
        for r in &rows {
            by_key.entry((r.protocol.clone(), r.epsilon.unwrap().to_bits(), r.run)).or_default().push(r.value);
        }
        for vals in by_key.values() {
            assert_eq!(vals.len(), 2);
            assert!((vals[0] - vals[1]).abs() < 1e-9, "{vals:?}");
        }
    }

    #[test]
    fn thread_count_does_not_change_rows() {
        let text = MSE_UNIFORM.replace("kind = \"uniform\"", "kind = \"laplace\"");
        assert_eq!(run_experiment(&exp(&text, 1)).unwrap(), run_experiment(&exp(&text, 4)).unwrap());
    }

    #[test]
    fn every_point_appears_runs_times_per_metric() {
        let text = r#"
            kind = "attr_infer"
            seed = 5
            runs = 3
            solutions = ["RS+FD[GRR]", "RS+RFD[SUE-r]"]
            epsilons = [2.0]
            models = ["NK", "PK", "HM"]
            synthetic_multipliers = [1.0, 2.0]
            compromised_fractions = [0.2]
            [dataset]
            synthetic = "zipf"
            ks = [3, 4, 2]
            rows = 300
        "#;
        let rows = run_experiment(&exp(text, 2)).unwrap();
        let mut counts: HashMap<(String, String), usize> = HashMap::new();
        for r in &rows {
            *counts.entry((r.solution.clone(), r.metric.clone())).or_default() += 1;
        }
        // NK × 2 multipliers, PK × 1 fraction, HM × 2 × 1, per solution.
        assert_eq!(counts.len(), 2 * 5);
        assert!(counts.values().all(|&c| c == 3));
    }

    #[test]
    fn reident_shares_plans_within_a_run() {
        let text = r#"
            kind = "reident"
            seed = 8
            runs = 2
            solutions = ["SMP", "RS+FD[GRR]"]
            protocols = ["GRR"]
            epsilons = [3.0]
            top_k = [1, 5]
            [surveys]
            count = 3
            [dataset]
            synthetic = "adult"
            rows = 300
        "#;
        let rows = run_experiment(&exp(text, 3)).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2 * 2);
        let plan = |r: &ResultRow| r.flags.split(';').find(|f| f.starts_with("plan=")).unwrap().to_string();
        for run in 0..2 {
            let plans: Vec<String> = rows.iter().filter(|r| r.run == run).map(plan).collect();
            assert!(plans.iter().all(|p| *p == plans[0]));
        }
        assert!(rows.iter().all(|r| r.stderr.is_some()));
    }

    #[test]
    fn oracle_attack_emits_all_metrics() {
        let text = r#"
            kind = "oracle_attack"
            seed = 2
            protocols = ["OLH", "SS"]
            epsilons = [1.0]
            ks = [4, 6]
            reports = 2000
        "#;
        let rows = run_experiment(&exp(text, 1)).unwrap();
        // Per protocol: 3 per k, plus 3 per collection mode.
        assert_eq!(rows.len(), 2 * (3 * 2 + 3 * 2));
        assert!(rows.iter().any(|r| r.flags.starts_with("g=")));
        assert!(rows.iter().any(|r| r.flags.starts_with("omega=")));
    }

    #[test]
    fn errors_name_the_grid_point() {
        let text = MSE_UNIFORM.replace("ks = [3, 4, 5]", "ks = [3, 1, 5]");
        let err = run_experiment(&exp(&text, 1)).unwrap_err();
        assert!(err.to_string().contains("grid point 0"), "{err}");
        assert_eq!(err.exit_code(), 3);
    }
}
