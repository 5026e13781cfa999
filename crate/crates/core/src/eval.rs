//! Stratified k-fold cross-validation, confusion matrices and the baselines.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FeatureVector, PreprocessConfig};
use crate::learn::{Algorithm, ClassifierConfig, TrainedModel};
use crate::name::{NameConfig, NameGenderClass};
use crate::record::{UserType, NUM_CLASSES};

/// Rows are true classes, columns predicted classes, both in class order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (UserType, UserType)>,
    {
        let mut cm = Self::new();
        for (truth, predicted) in pairs {
            cm.add(truth, predicted);
        }
        cm
    }

    pub fn add(&mut self, truth: UserType, predicted: UserType) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: [f64; NUM_CLASSES],
    pub recall: [f64; NUM_CLASSES],
    pub f1: [f64; NUM_CLASSES],
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Accuracy plus one-vs-rest precision, recall and F1 per class. Any `0/0`
/// is reported as 0.
pub fn metrics_from_confusion(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut precision = [0.0; NUM_CLASSES];
    let mut recall = [0.0; NUM_CLASSES];
    let mut f1 = [0.0; NUM_CLASSES];
    for c in 0..NUM_CLASSES {
        let tp = cm.counts[c][c] as f64;
        let predicted: u64 = (0..NUM_CLASSES).map(|r| cm.counts[r][c]).sum();
        let actual: u64 = cm.counts[c].iter().sum();
        precision[c] = ratio(tp, predicted as f64);
        recall[c] = ratio(tp, actual as f64);
        f1[c] = ratio(2.0 * precision[c] * recall[c], precision[c] + recall[c]);
    }
    Ok(Metrics {
        accuracy: cm.trace() as f64 / total as f64,
        precision,
        recall,
        f1,
    })
}

fn mean_metrics(all: &[Metrics]) -> Metrics {
    let n = all.len() as f64;
    let avg = |f: &dyn Fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
    Metrics {
        accuracy: avg(&|m| m.accuracy),
        precision: std::array::from_fn(|c| avg(&|m| m.precision[c])),
        recall: std::array::from_fn(|c| avg(&|m| m.recall[c])),
        f1: std::array::from_fn(|c| avg(&|m| m.f1[c])),
    }
}

/// Split indices into `k` disjoint folds. Each class is shuffled with the
/// seed and dealt round-robin, so per-class fold sizes differ by at most one.
/// Dealing for each class starts where the previous class stopped, which
/// keeps total fold sizes balanced too. Classes absent from `labels` are
/// ignored; a present class with fewer than `k` examples is an error.
pub fn stratified_folds(labels: &[UserType], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Folds(format!("k must be at least 2, got {k}")));
    }
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in UserType::ALL {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, y)| **y == class)
            .map(|(i, _)| i)
            .collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(Error::Folds(format!(
                "class {class} has {} examples, fewer than k = {k}",
                members.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(class.index() as u64 + 1);
        members.shuffle(&mut rng);
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Indices not in `fold`, ascending.
pub fn training_indices(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut held = vec![false; n];
    for &i in fold {
        held[i] = true;
    }
    (0..n).filter(|&i| !held[i]).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub features: String,
    pub seed: u64,
    pub k: usize,
    pub folds: Vec<FoldResult>,
    /// Arithmetic mean of the per-fold metrics.
    pub mean: Metrics,
    /// Sum of the per-fold confusion matrices.
    pub pooled: ConfusionMatrix,
}

impl EvaluationReport {
    fn from_folds(method: String, features: String, seed: u64, k: usize, folds: Vec<FoldResult>) -> Self {
        let mut pooled = ConfusionMatrix::new();
        for f in &folds {
            pooled.merge(&f.confusion);
        }
        let per_fold: Vec<Metrics> = folds.iter().map(|f| f.metrics).collect();
        EvaluationReport {
            method,
            features,
            seed,
            k,
            mean: mean_metrics(&per_fold),
            folds,
            pooled,
        }
    }
}

/// Everything needed to run one cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct CvSettings {
    pub classifier: ClassifierConfig,
    pub preprocess: PreprocessConfig,
    pub name_config: NameConfig,
    pub k: usize,
    /// Seed for the fold assignment.
    pub seed: u64,
}

impl CvSettings {
    pub fn new(classifier: ClassifierConfig, preprocess: PreprocessConfig, k: usize, seed: u64) -> Self {
        CvSettings {
            classifier,
            preprocess,
            name_config: NameConfig::default(),
            k,
            seed,
        }
    }
}

pub struct CvOutcome {
    pub report: EvaluationReport,
    pub folds: Vec<Vec<usize>>,
    /// The model fitted for each fold, on that fold's training split only.
    pub models: Vec<TrainedModel>,
}

/// Fit preprocessor and classifier on the given training indices, in order.
pub fn fit_on_indices(
    schema: &FeatureSchema,
    vectors: &[FeatureVector],
    labels: &[UserType],
    indices: &[usize],
    settings: &CvSettings,
) -> Result<TrainedModel> {
    let train_vectors: Vec<&FeatureVector> = indices.iter().map(|&i| &vectors[i]).collect();
    let train_labels: Vec<UserType> = indices.iter().map(|&i| labels[i]).collect();
    TrainedModel::fit(
        &settings.classifier,
        &settings.preprocess,
        &settings.name_config,
        schema,
        &train_vectors,
        &train_labels,
    )
}

/// k-fold cross-validation. Each fold fits its own preprocessor and
/// classifier on its training split and is scored on the held-out split.
pub fn cross_validate_detailed(
    schema: &FeatureSchema,
    vectors: &[FeatureVector],
    labels: &[UserType],
    settings: &CvSettings,
) -> Result<CvOutcome> {
    if vectors.len() != labels.len() {
        return Err(Error::Invariant("vectors and labels differ in length".into()));
    }
    let folds = stratified_folds(labels, settings.k, settings.seed)?;
    let per_fold = folds
        .par_iter()
        .map(|held_out| -> Result<(FoldResult, TrainedModel)> {
            let train_idx = training_indices(vectors.len(), held_out);
            let model = fit_on_indices(schema, vectors, labels, &train_idx, settings)?;
            let mut cm = ConfusionMatrix::new();
            for &i in held_out {
                cm.add(labels[i], model.predict(&vectors[i])?.label);
            }
            let metrics = metrics_from_confusion(&cm)?;
            Ok((
                FoldResult {
                    confusion: cm,
                    metrics,
                },
                model,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (results, models): (Vec<FoldResult>, Vec<TrainedModel>) = per_fold.into_iter().unzip();
    let report = EvaluationReport::from_folds(
        settings.classifier.algorithm.to_string(),
        settings.preprocess.selection.to_string(),
        settings.seed,
        settings.k,
        results,
    );
    Ok(CvOutcome {
        report,
        folds,
        models,
    })
}

pub fn cross_validate(
    schema: &FeatureSchema,
    vectors: &[FeatureVector],
    labels: &[UserType],
    settings: &CvSettings,
) -> Result<EvaluationReport> {
    cross_validate_detailed(schema, vectors, labels, settings).map(|o| o.report)
}

/// Majority baseline under the same folds.
pub fn baseline_majority(
    schema: &FeatureSchema,
    vectors: &[FeatureVector],
    labels: &[UserType],
    k: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    let settings = CvSettings::new(
        ClassifierConfig::new(Algorithm::Majority, seed),
        PreprocessConfig {
            selection: crate::features::FeatureSelection::only(crate::features::FeatureGroup::Metadata),
            ..PreprocessConfig::default()
        },
        k,
        seed,
    );
    let mut report = cross_validate(schema, vectors, labels, &settings)?;
    report.features = "-".into();
    Ok(report)
}

/// Name-only prediction: female/male names map directly, anything else to
/// `fallback`. Never predicts organization.
pub fn name_only_prediction(class: NameGenderClass, fallback: UserType) -> UserType {
    match class {
        NameGenderClass::Female => UserType::Female,
        NameGenderClass::Male => UserType::Male,
        NameGenderClass::Unisex | NameGenderClass::None => fallback,
    }
}

/// The more frequent of male/female among `labels`; ties go to male.
pub fn majority_individual<'a, I>(labels: I) -> UserType
where
    I: IntoIterator<Item = &'a UserType>,
{
    let (mut male, mut female) = (0usize, 0usize);
    for y in labels {
        match y {
            UserType::Male => male += 1,
            UserType::Female => female += 1,
            UserType::Organization => {}
        }
    }
    if female > male {
        UserType::Female
    } else {
        UserType::Male
    }
}

/// Name-database baseline evaluated on the same stratified folds. The
/// fallback for unisex and unmatched names is the majority individual class
/// of each fold's training split.
pub fn baseline_name_only(
    name_classes: &[NameGenderClass],
    labels: &[UserType],
    k: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    if name_classes.len() != labels.len() {
        return Err(Error::Invariant("name classes and labels differ in length".into()));
    }
    let folds = stratified_folds(labels, k, seed)?;
    let results = folds
        .iter()
        .map(|held_out| {
            let train_idx = training_indices(labels.len(), held_out);
            let fallback = majority_individual(train_idx.iter().map(|&i| &labels[i]));
            let cm = ConfusionMatrix::from_pairs(
                held_out
                    .iter()
                    .map(|&i| (labels[i], name_only_prediction(name_classes[i], fallback))),
            );
            Ok(FoldResult {
                metrics: metrics_from_confusion(&cm)?,
                confusion: cm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvaluationReport::from_folds(
        "name_database".into(),
        "name".into(),
        seed,
        k,
        results,
    ))
}

/// Fixed-width results table: accuracy then F1 for
/// organization, female and male, all in percent with two decimals.
pub fn render_table(reports: &[EvaluationReport]) -> String {
    let w = reports.iter().map(|r| r.features.len()).max().unwrap_or(0).max(10);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<22} {:<w$} {:>12} {:>10} {:>13} {:>11}",
        "Method", "Features", "Accuracy(%)", "F1-Org(%)", "F1-Female(%)", "F1-Male(%)"
    );
    for r in reports {
        let m = &r.mean;
        let _ = writeln!(
            s,
            "{:<22} {:<w$} {:>12.2} {:>10.2} {:>13.2} {:>11.2}",
            r.method,
            r.features,
            m.accuracy * 100.0,
            m.f1[UserType::Organization.index()] * 100.0,
            m.f1[UserType::Female.index()] * 100.0,
            m.f1[UserType::Male.index()] * 100.0,
        );
    }
    s
}
