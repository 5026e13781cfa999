//! Multiclass classifiers over preprocessed vectors.

pub mod bayes;
pub mod forest;
pub mod linear;
pub mod model;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{UserType, NUM_CLASSES};

pub use bayes::GaussianNb;
pub use forest::RandomForest;
pub use linear::LinearModel;
pub use model::{deserialize_model, read_model, serialize_model, write_model, TrainedModel, MODEL_FORMAT_VERSION};
pub use tree::{gini, gini_best_split, DecisionTree, Split};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    RandomForest,
    LinearSvmOvr,
    LogisticRegression,
    GaussianNb,
    Majority,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::RandomForest,
        Algorithm::LinearSvmOvr,
        Algorithm::LogisticRegression,
        Algorithm::GaussianNb,
        Algorithm::Majority,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::RandomForest => "random_forest",
            Algorithm::LinearSvmOvr => "linear_svm_ovr",
            Algorithm::LogisticRegression => "logistic_regression",
            Algorithm::GaussianNb => "gaussian_nb",
            Algorithm::Majority => "majority",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random_forest" | "rf" => Ok(Algorithm::RandomForest),
            "linear_svm_ovr" | "svm" => Ok(Algorithm::LinearSvmOvr),
            "logistic_regression" | "logreg" => Ok(Algorithm::LogisticRegression),
            "gaussian_nb" | "nb" => Ok(Algorithm::GaussianNb),
            "majority" => Ok(Algorithm::Majority),
            other => Err(Error::Config(format!("unknown classifier `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: usize,
    /// Features examined per split; `None` means `ceil(sqrt(dim))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            max_features: None,
            bootstrap: true,
            max_depth: None,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-4,
            epochs: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub lambda: f64,
    pub iterations: usize,
    pub step: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            lambda: 1e-4,
            iterations: 500,
            step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    pub var_smoothing: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams { var_smoothing: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub forest: ForestParams,
    pub svm: SvmParams,
    pub logistic: LogisticParams,
    pub naive_bayes: NaiveBayesParams,
}

impl ClassifierConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        ClassifierConfig {
            algorithm,
            seed,
            forest: ForestParams::default(),
            svm: SvmParams::default(),
            logistic: LogisticParams::default(),
            naive_bayes: NaiveBayesParams::default(),
        }
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("{what} must be positive")));
        let f = &self.forest;
        if f.trees == 0 {
            return bad("forest.trees");
        }
        if f.min_leaf == 0 {
            return bad("forest.min_leaf");
        }
        if f.max_features == Some(0) {
            return bad("forest.max_features");
        }
        if !(self.svm.lambda > 0.0) || self.svm.epochs == 0 {
            return bad("svm.lambda and svm.epochs");
        }
        let l = &self.logistic;
        if !(l.lambda > 0.0) || l.iterations == 0 || !(l.step > 0.0) {
            return bad("logistic.lambda, logistic.iterations and logistic.step");
        }
        if !(self.naive_bayes.var_smoothing > 0.0) {
            return bad("naive_bayes.var_smoothing");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: UserType,
    /// Per-class scores in class order. Their meaning depends on the
    /// algorithm: vote shares, probabilities or raw margins.
    pub scores: [f64; NUM_CLASSES],
}

impl Prediction {
    /// Highest score wins; ties go to the earliest class.
    pub fn argmax(scores: [f64; NUM_CLASSES]) -> Prediction {
        let mut best = 0;
        for c in 1..NUM_CLASSES {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        Prediction {
            label: UserType::ALL[best],
            scores,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedModel {
    RandomForest(RandomForest),
    LinearSvmOvr(LinearModel),
    LogisticRegression(LinearModel),
    GaussianNb(GaussianNb),
    Majority { label: UserType },
}

/// A fitted classifier together with the input dimension it expects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub dim: usize,
    pub model: FittedModel,
}

impl Classifier {
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.dim {
            return Err(Error::SchemaMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(match &self.model {
            FittedModel::RandomForest(f) => f.predict(x),
            FittedModel::LinearSvmOvr(m) => linear::predict_svm(m, x),
            FittedModel::LogisticRegression(m) => linear::predict_logistic(m, x),
            FittedModel::GaussianNb(nb) => nb.predict(x),
            FittedModel::Majority { label } => {
                let mut scores = [0.0; NUM_CLASSES];
                scores[label.index()] = 1.0;
                Prediction {
                    label: *label,
                    scores,
                }
            }
        })
    }
}

/// Fit `config.algorithm` on preprocessed rows. Every class must be present
/// except for the majority baseline. Deterministic for a given seed and row
/// order.
pub fn train(config: &ClassifierConfig, data: &[Vec<f64>], labels: &[UserType]) -> Result<Classifier> {
    config.validate()?;
    if data.len() != labels.len() {
        return Err(Error::Invariant(format!(
            "{} rows but {} labels",
            data.len(),
            labels.len()
        )));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = data[0].len();
    if let Some(row) = data.iter().find(|r| r.len() != dim) {
        return Err(Error::SchemaMismatch {
            expected: dim,
            actual: row.len(),
        });
    }
    if data.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Invariant("non-finite training feature".into()));
    }
    let mut counts = [0usize; NUM_CLASSES];
    for y in labels {
        counts[y.index()] += 1;
    }
    if config.algorithm != Algorithm::Majority {
        if let Some(c) = UserType::ALL.iter().find(|c| counts[c.index()] == 0) {
            return Err(Error::DegenerateTraining(format!("no training examples of class {c}")));
        }
    }

    let model = match config.algorithm {
        Algorithm::RandomForest => FittedModel::RandomForest(RandomForest::fit(data, labels, &config.forest, config.seed)),
        Algorithm::LinearSvmOvr => FittedModel::LinearSvmOvr(linear::fit_svm_ovr(data, labels, &config.svm, config.seed)),
        Algorithm::LogisticRegression => FittedModel::LogisticRegression(linear::fit_logistic(data, labels, &config.logistic)),
        Algorithm::GaussianNb => FittedModel::GaussianNb(GaussianNb::fit(data, labels, &config.naive_bayes)),
        Algorithm::Majority => {
            let mut best = 0;
            for c in 1..NUM_CLASSES {
                if counts[c] > counts[best] {
                    best = c;
                }
            }
            FittedModel::Majority {
                label: UserType::ALL[best],
            }
        }
    };
    Ok(Classifier { dim, model })
}

#[cfg(test)]
mod tests {
    use super::*;
    use UserType::*;

    #[test]
    fn majority_picks_most_frequent_with_class_order_ties() {
        let data = vec![vec![0.0]; 5];
        let labels = [Female, Organization, Organization, Female, Male];
        let c = train(&ClassifierConfig::new(Algorithm::Majority, 0), &data, &labels).unwrap();
        assert_eq!(c.predict(&[123.0]).unwrap().label, Female);
        let c = train(&ClassifierConfig::new(Algorithm::Majority, 0), &data[..1], &[Organization]).unwrap();
        assert_eq!(c.predict(&[-1.0]).unwrap().label, Organization);
    }

    #[test]
    fn missing_class_is_degenerate() {
        let data = vec![vec![0.0], vec![1.0]];
        let labels = [Male, Female];
        for alg in [Algorithm::RandomForest, Algorithm::LinearSvmOvr, Algorithm::LogisticRegression, Algorithm::GaussianNb] {
            assert!(matches!(
                train(&ClassifierConfig::new(alg, 0), &data, &labels),
                Err(Error::DegenerateTraining(_))
            ));
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let data = vec![vec![0.0], vec![f64::NAN], vec![1.0]];
        let labels = [Male, Female, Organization];
        assert!(matches!(
            train(&ClassifierConfig::new(Algorithm::GaussianNb, 0), &data, &labels),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn wrong_dimension_at_predict() {
        let data = vec![vec![0.0, 1.0]];
        let c = train(&ClassifierConfig::new(Algorithm::Majority, 0), &data, &[Male]).unwrap();
        assert!(matches!(c.predict(&[0.0]), Err(Error::SchemaMismatch { .. })));
    }

    #[test]
    fn single_tree_without_bootstrap_separates_two_points() {
        let data = vec![vec![0.0], vec![1.0], vec![2.0]];
        let labels = [Male, Female, Organization];
        let mut cfg = ClassifierConfig::new(Algorithm::RandomForest, 0);
        cfg.forest.trees = 1;
        cfg.forest.bootstrap = false;
        let c = train(&cfg, &data, &labels).unwrap();
        for (x, y) in data.iter().zip(&labels) {
            assert_eq!(c.predict(x).unwrap().label, *y);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = ClassifierConfig::new(Algorithm::RandomForest, 0);
        assert!(cfg.validate().is_ok());
        cfg.forest.trees = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ClassifierConfig::new(Algorithm::LinearSvmOvr, 0);
        cfg.svm.lambda = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("rf".parse::<Algorithm>().unwrap(), Algorithm::RandomForest);
    }
}
