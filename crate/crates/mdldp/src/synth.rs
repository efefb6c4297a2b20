//! Synthetic categorical datasets for tests and desk-scale experiments.

use mdldp_core::data::Dataset;
use mdldp_core::multidim::{sample_categorical, MultiDomain};
use mdldp_core::rng::Seed;
use mdldp_core::AttributeDomain;
use rand::seq::SliceRandom;

/// Seed of the shipped `fixtures/adult_synth.csv`.
pub const FIXTURE_SEED: u64 = 45_222;
pub const FIXTURE_ROWS: usize = 1_000;

const WORKCLASS: [&str; 7] =
    ["Private", "Self-emp-not-inc", "Local-gov", "State-gov", "Self-emp-inc", "Federal-gov", "Without-pay"];
const EDUCATION: [&str; 16] = [
    "HS-grad", "Some-college", "Bachelors", "Masters", "Assoc-voc", "11th", "Assoc-acdm", "10th", "7th-8th",
    "Prof-school", "9th", "12th", "Doctorate", "5th-6th", "1st-4th", "Preschool",
];
const MARITAL: [&str; 7] = [
    "Married-civ-spouse", "Never-married", "Divorced", "Separated", "Widowed", "Married-spouse-absent",
    "Married-AF-spouse",
];
const OCCUPATION: [&str; 14] = [
    "Craft-repair", "Prof-specialty", "Exec-managerial", "Adm-clerical", "Sales", "Other-service",
    "Machine-op-inspct", "Transport-moving", "Handlers-cleaners", "Farming-fishing", "Tech-support",
    "Protective-serv", "Priv-house-serv", "Armed-Forces",
];
const RELATIONSHIP: [&str; 6] = ["Husband", "Not-in-family", "Own-child", "Unmarried", "Wife", "Other-relative"];
const RACE: [&str; 5] = ["White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"];
const SEX: [&str; 2] = ["Male", "Female"];
const COUNTRY: [&str; 41] = [
    "United-States", "Mexico", "Philippines", "Germany", "Puerto-Rico", "Canada", "El-Salvador", "India", "Cuba",
    "England", "China", "South", "Jamaica", "Italy", "Dominican-Republic", "Japan", "Guatemala", "Poland",
    "Vietnam", "Columbia", "Haiti", "Portugal", "Taiwan", "Iran", "Greece", "Nicaragua", "Peru", "Ecuador",
    "France", "Ireland", "Hong", "Thailand", "Cambodia", "Trinadad&Tobago", "Outlying-US", "Yugoslavia", "Laos",
    "Scotland", "Honduras", "Hungary", "Holand-Netherlands",
];
const INCOME: [&str; 2] = ["<=50K", ">50K"];

/// Column names of the Adult-shaped generator.
pub const ADULT_COLUMNS: [&str; 10] = [
    "age", "workclass", "education", "marital-status", "occupation", "relationship", "race", "sex",
    "native-country", "income",
];

/// Normalized `1/(i+1)^s` weights.
pub fn zipf_weights(k: usize, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|i| (i as f64 + 1.0).powf(-exponent)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn normalized(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

fn labels(values: &[&str]) -> Vec<String> {
    values.iter().map(|s| s.to_string()).collect()
}

/// Attribute domains and marginals shaped like the cleaned Adult census table.
pub fn adult_marginals() -> Vec<(AttributeDomain, Vec<f64>)> {
    let ages: Vec<String> = (17..=90).map(|a| a.to_string()).collect();
    let age_w: Vec<f64> = (17..=90)
        .map(|a| {
            let z = (a as f64 - 37.0) / 13.0;
            (-0.5 * z * z).exp() + 0.01
        })
        .collect();
    let spec: Vec<(&str, Vec<String>, Vec<f64>)> = vec![
        ("age", ages, normalized(&age_w)),
        ("workclass", labels(&WORKCLASS), zipf_weights(7, 1.8)),
        ("education", labels(&EDUCATION), zipf_weights(16, 1.1)),
        ("marital-status", labels(&MARITAL), zipf_weights(7, 1.3)),
        ("occupation", labels(&OCCUPATION), zipf_weights(14, 0.6)),
        ("relationship", labels(&RELATIONSHIP), zipf_weights(6, 1.1)),
        ("race", labels(&RACE), zipf_weights(5, 2.8)),
        ("sex", labels(&SEX), vec![0.675, 0.325]),
        ("native-country", labels(&COUNTRY), zipf_weights(41, 3.4)),
        ("income", labels(&INCOME), vec![0.752, 0.248]),
    ];
    spec.into_iter()
        .map(|(name, values, w)| (AttributeDomain::new(name, values).expect("static labels are distinct"), w))
        .collect()
}

/// Independent draws from per-attribute marginals. When `n` is at least the
/// largest domain, the first rows cycle through every label so each domain
/// is fully observed; rows are then shuffled.
pub fn from_marginals(marginals: &[(AttributeDomain, Vec<f64>)], n: usize, seed: Seed) -> Dataset {
    let d = marginals.len();
    let max_k = marginals.iter().map(|(dom, _)| dom.k()).max().unwrap_or(0);
    let cover = if n >= max_k { max_k } else { 0 };
    let mut rng = seed.rng();
    let mut rows: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            marginals
                .iter()
                .map(|(dom, w)| if i < cover { i % dom.k() } else { sample_categorical(w, &mut rng) })
                .collect()
        })
        .collect();
    rows.shuffle(&mut rng);
    let domain = MultiDomain::new(marginals.iter().map(|(dom, _)| dom.clone()).collect()).expect("d >= 1");
    let mut cells = Vec::with_capacity(n * d);
    rows.into_iter().for_each(|r| cells.extend(r));
    Dataset::new(domain, cells).expect("draws stay in domain")
}

/// Adult-shaped table: `k = [74, 7, 16, 7, 14, 6, 5, 2, 41, 2]`.
pub fn adult_like(n: usize, seed: Seed) -> Dataset {
    from_marginals(&adult_marginals(), n, seed)
}

/// Every attribute Zipf-distributed with the same exponent.
pub fn zipf_dataset(ks: &[usize], exponent: f64, n: usize, seed: Seed) -> Dataset {
    let marginals: Vec<_> = ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let dom = AttributeDomain::indexed(format!("a{j}"), k).expect("k >= 1");
            (dom, zipf_weights(k, exponent))
        })
        .collect();
    from_marginals(&marginals, n, seed)
}

pub fn uniform_dataset(ks: &[usize], n: usize, seed: Seed) -> Dataset {
    zipf_dataset(ks, 0.0, n, seed)
}
