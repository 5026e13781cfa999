//! Command-line front end: `train`, `evaluate`, `classify`, `report` and
//! `synth`.

use std::collections::{HashMap, HashSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{baseline_majority, baseline_name_only, cross_validate, render_table, CvSettings, EvaluationReport};
use crate::features::{FeatureExtractor, FeatureSchema, FeatureSelection, FeatureVector, NormMode, PreprocessConfig};
use crate::image::FileImageProvider;
use crate::learn::{read_model, write_model, Algorithm, ClassifierConfig, TrainedModel};
use crate::name::{classify_name_with, load_name_database, NameConfig, TokenStrategy};
use crate::record::{
    dataset_summary, first_per_user, load_labels, load_users, parse_user_record, ClassDistribution, LabelMap,
    LabeledExample, UserRecord, UserType, NUM_CLASSES,
};
use crate::synthetic::{generate, SyntheticConfig};
use crate::text::load_lexicon;

#[derive(Debug, Parser)]
#[command(name = "usertype", version, about = "Classify social-media accounts as male, female or organization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on labeled users and write the artifact.
    Train(TrainArgs),
    /// Cross-validate a classifier against the baselines.
    Evaluate(EvaluateArgs),
    /// Stream predictions for a users file, one JSON line per record.
    Classify(ClassifyArgs),
    /// Per-class user, tweet, retweet and favorite distribution.
    Report(ReportArgs),
    /// Write a synthetic dataset with all input files.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    FirstMatch,
    HighestFrequency,
}

impl From<StrategyArg> for TokenStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::FirstMatch => TokenStrategy::FirstMatch,
            StrategyArg::HighestFrequency => TokenStrategy::HighestFrequency,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ResourceArgs {
    /// Name database CSV (name,gender,frequency[,country]).
    #[arg(long)]
    pub name_db: PathBuf,
    /// Word-category lexicon.
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Directory that relative image references resolve against.
    #[arg(long)]
    pub image_dir: Option<PathBuf>,
}

impl ResourceArgs {
    fn extractor(&self, name_config: NameConfig) -> Result<FeatureExtractor> {
        Ok(FeatureExtractor::new(
            load_name_database(&self.name_db)?,
            name_config,
            load_lexicon(&self.lexicon)?,
            Box::new(FileImageProvider::new(self.image_dir.clone())),
        ))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub users: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub resources: ResourceArgs,
    /// random_forest, linear_svm_ovr, logistic_regression, gaussian_nb or majority.
    #[arg(long, default_value = "random_forest")]
    pub classifier: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `all` or a comma-separated list of name, text, image, metadata.
    #[arg(long, default_value = "all")]
    pub features: FeatureSelection,
    #[arg(long, default_value = "feature")]
    pub norm: NormMode,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long, default_value_t = 0.9)]
    pub name_threshold: f64,
    #[arg(long, value_enum, default_value = "first-match")]
    pub name_strategy: StrategyArg,
}

impl FitArgs {
    fn name_config(&self) -> Result<NameConfig> {
        let c = NameConfig {
            threshold: self.name_threshold,
            strategy: self.name_strategy.into(),
        };
        c.validate()?;
        Ok(c)
    }

    fn classifier_config(&self) -> Result<ClassifierConfig> {
        let mut c = ClassifierConfig::new(self.classifier, self.seed);
        if let Some(t) = self.trees {
            c.forest.trees = t;
        }
        c.validate()?;
        Ok(c)
    }

    fn preprocess_config(&self) -> PreprocessConfig {
        PreprocessConfig {
            norm: self.norm,
            selection: self.features.clone(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    /// Where to write the model artifact.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub fit: FitArgs,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Also write the reports as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Users JSONL; `-` reads standard input.
    #[arg(long)]
    pub users: PathBuf,
    #[command(flatten)]
    pub resources: ResourceArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub users: PathBuf,
    /// Prediction JSONL written by `classify`.
    #[arg(long, conflicts_with = "labels", required_unless_present = "labels")]
    pub predictions: Option<PathBuf>,
    /// Labels CSV, as an alternative to predictions.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub per_class: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Chance that each feature group expresses a random class.
    #[arg(long, default_value_t = 0.05)]
    pub corruption: f64,
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(a).map(|_| ()),
        Command::Evaluate(a) => {
            let reports = cmd_evaluate(a)?;
            print!("{}", render_table(&reports));
            Ok(())
        }
        Command::Classify(a) => {
            let summary = cmd_classify(a)?;
            eprintln!(
                "classified {} records, skipped {} of {} lines",
                summary.predicted, summary.skipped, summary.lines
            );
            Ok(())
        }
        Command::Report(a) => {
            let report = cmd_report(a)?;
            print!("{report}");
            Ok(())
        }
        Command::Synth(a) => {
            let d = generate(&SyntheticConfig {
                per_class: a.per_class,
                seed: a.seed,
                corruption: a.corruption,
                ..SyntheticConfig::default()
            });
            std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
            d.write_to_dir(&a.out_dir)?;
            info!("wrote {} records to {}", d.records.len(), a.out_dir.display());
            Ok(())
        }
    }
}

/// Labeled examples in users-file order, one per user (its first record).
pub struct JoinedData {
    pub examples: Vec<LabeledExample>,
    pub unknown_labels: usize,
    pub skipped_lines: usize,
}

pub fn join_labels(users: &Path, labels: &Path) -> Result<JoinedData> {
    let loaded = load_users(users)?;
    for e in &loaded.skipped {
        warn!("{}: skipping {e}", users.display());
    }
    let labels: LabelMap = load_labels(labels)?;
    let firsts = first_per_user(&loaded.records);
    let known: HashSet<&str> = firsts.iter().map(|r| r.user_id.as_str()).collect();
    let mut unknown: Vec<&String> = labels.keys().filter(|id| !known.contains(id.as_str())).collect();
    unknown.sort();
    for id in &unknown {
        warn!("label for unknown user `{id}` skipped");
    }
    let examples = firsts
        .into_iter()
        .filter_map(|r| {
            labels.get(&r.user_id).map(|&label| LabeledExample {
                record: r.clone(),
                label,
            })
        })
        .collect();
    Ok(JoinedData {
        examples,
        unknown_labels: unknown.len(),
        skipped_lines: loaded.skipped.len(),
    })
}

fn extract_all(extractor: &FeatureExtractor, examples: &[LabeledExample]) -> Vec<FeatureVector> {
    examples.par_iter().map(|e| extractor.extract(&e.record)).collect()
}

pub struct TrainOutcome {
    pub model: TrainedModel,
    pub summary: ClassDistribution,
    pub unknown_labels: usize,
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainOutcome> {
    let fit = &args.fit;
    let name_config = fit.name_config()?;
    let config = fit.classifier_config()?;
    let extractor = fit.resources.extractor(name_config)?;
    let joined = join_labels(&fit.users, &fit.labels)?;
    let summary = dataset_summary(&joined.examples)?;
    println!("{summary}");
    if joined.unknown_labels > 0 {
        println!("labels for unknown users skipped: {}", joined.unknown_labels);
    }
    let vectors = extract_all(&extractor, &joined.examples);
    let refs: Vec<&FeatureVector> = vectors.iter().collect();
    let labels: Vec<UserType> = joined.examples.iter().map(|e| e.label).collect();
    let model = TrainedModel::fit(
        &config,
        &fit.preprocess_config(),
        &name_config,
        &extractor.schema(),
        &refs,
        &labels,
    )?;
    write_model(&model, &args.model)?;
    info!("model written to {}", args.model.display());
    Ok(TrainOutcome {
        model,
        summary,
        unknown_labels: joined.unknown_labels,
    })
}

/// Cross-validated classifier followed by the majority and name-only
/// baselines, all on the same folds.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<Vec<EvaluationReport>> {
    let fit = &args.fit;
    let name_config = fit.name_config()?;
    let extractor = fit.resources.extractor(name_config)?;
    let joined = join_labels(&fit.users, &fit.labels)?;
    println!("{}", dataset_summary(&joined.examples)?);
    let vectors = extract_all(&extractor, &joined.examples);
    let labels: Vec<UserType> = joined.examples.iter().map(|e| e.label).collect();
    let schema: FeatureSchema = extractor.schema();

    let mut settings = CvSettings::new(fit.classifier_config()?, fit.preprocess_config(), args.k, fit.seed);
    settings.name_config = name_config;
    let model_report = cross_validate(&schema, &vectors, &labels, &settings)?;
    let majority = baseline_majority(&schema, &vectors, &labels, args.k, fit.seed)?;
    let name_classes: Vec<_> = joined
        .examples
        .iter()
        .map(|e| classify_name_with(&e.record.screen_name, &extractor.name_db, &name_config))
        .collect();
    let names = baseline_name_only(&name_classes, &labels, args.k, fit.seed)?;
    let reports = vec![majority, names, model_report];
    if let Some(path) = &args.json {
        let body = serde_json::to_string_pretty(&reports).map_err(|e| Error::Invariant(e.to_string()))?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassifySummary {
    pub lines: usize,
    pub predicted: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub male: f64,
    pub female: f64,
    pub organization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionLine {
    pub user_id: String,
    pub label: UserType,
    pub scores: Scores,
}

/// Records scored per batch; bounds memory independently of stream length.
pub const CLASSIFY_BATCH: usize = 256;

fn score_line(model: &TrainedModel, extractor: &FeatureExtractor, line: &str, number: usize) -> Result<Option<String>> {
    let record = match parse_user_record(line, number) {
        Ok(r) => r,
        Err(e) => {
            warn!("skipping {e}");
            return Ok(None);
        }
    };
    let p = model.predict(&extractor.extract(&record))?;
    let out = PredictionLine {
        user_id: record.user_id,
        label: p.label,
        scores: Scores {
            male: p.scores[0],
            female: p.scores[1],
            organization: p.scores[2],
        },
    };
    serde_json::to_string(&out)
        .map(Some)
        .map_err(|e| Error::Invariant(e.to_string()))
}

/// Single pass over `input`. Lines are scored in parallel within a batch and
/// written in input order. Blank lines are ignored; malformed ones are
/// skipped and counted.
pub fn classify_stream<R: BufRead, W: Write>(
    model: &TrainedModel,
    extractor: &FeatureExtractor,
    input: R,
    mut output: W,
    batch_size: usize,
) -> Result<ClassifySummary> {
    model.schema().check_lexicon(&extractor.lexicon)?;
    let batch_size = batch_size.max(1);
    let mut summary = ClassifySummary::default();
    let mut batch: Vec<(usize, String)> = Vec::with_capacity(batch_size);
    let mut lines = input.lines();
    let mut number = 0;
    loop {
        batch.clear();
        for line in lines.by_ref() {
            number += 1;
            let line = line.map_err(|e| Error::io("<input>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            batch.push((number, line));
            if batch.len() == batch_size {
                break;
            }
        }
        if batch.is_empty() {
            break;
        }
        let scored: Vec<Result<Option<String>>> = if batch.len() == 1 {
            vec![score_line(model, extractor, &batch[0].1, batch[0].0)]
        } else {
            batch
                .par_iter()
                .map(|(n, l)| score_line(model, extractor, l, *n))
                .collect()
        };
        for s in scored {
            summary.lines += 1;
            match s? {
                Some(text) => {
                    writeln!(output, "{text}").map_err(|e| Error::io("<output>", e))?;
                    summary.predicted += 1;
                }
                None => summary.skipped += 1,
            }
        }
    }
    output.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(summary)
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<ClassifySummary> {
    let model = read_model(&args.model)?;
    let extractor = args.resources.extractor(model.name_config)?;
    let input: Box<dyn BufRead> = if args.users.as_os_str() == "-" {
        Box::new(io::stdin().lock())
    } else {
        let f = File::open(&args.users).map_err(|e| Error::io(&args.users, e))?;
        Box::new(BufReader::new(f))
    };
    match &args.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::io(path, e))?;
            classify_stream(&model, &extractor, input, BufWriter::new(f), CLASSIFY_BATCH)
        }
        None => classify_stream(&model, &extractor, input, BufWriter::new(io::stdout().lock()), CLASSIFY_BATCH),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTotals {
    pub users: u64,
    pub tweets: u64,
    pub retweets: u64,
    pub favorites: u64,
}

/// Per-class user, tweet, retweet and favorite totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub male: ClassTotals,
    pub female: ClassTotals,
    pub organization: ClassTotals,
    pub total: ClassTotals,
    /// Records skipped because their user has no label or prediction.
    pub unlabeled_records: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    Users,
    Tweets,
    Retweets,
    Favorites,
}

impl Column {
    pub const ALL: [Column; 4] = [Column::Users, Column::Tweets, Column::Retweets, Column::Favorites];

    fn of(self, t: &ClassTotals) -> u64 {
        match self {
            Column::Users => t.users,
            Column::Tweets => t.tweets,
            Column::Retweets => t.retweets,
            Column::Favorites => t.favorites,
        }
    }

    fn title(self) -> &'static str {
        match self {
            Column::Users => "Users",
            Column::Tweets => "Tweets",
            Column::Retweets => "Retweets",
            Column::Favorites => "Favorites",
        }
    }
}

impl DistributionReport {
    pub fn from_totals(per_class: [ClassTotals; NUM_CLASSES], unlabeled_records: u64) -> Self {
        let mut total = ClassTotals::default();
        for t in &per_class {
            total.users += t.users;
            total.tweets += t.tweets;
            total.retweets += t.retweets;
            total.favorites += t.favorites;
        }
        let [male, female, organization] = per_class;
        DistributionReport {
            male,
            female,
            organization,
            total,
            unlabeled_records,
        }
    }

    /// Aggregate `records` by the class of their user. Each user is counted
    /// once; tweets, retweets and favorites sum over all its records. Every
    /// labeled user must appear in `records`.
    pub fn build(records: &[UserRecord], labels: &HashMap<String, UserType>) -> Result<Self> {
        let present: HashSet<&str> = records.iter().map(|r| r.user_id.as_str()).collect();
        let mut missing: Vec<&String> = labels.keys().filter(|id| !present.contains(id.as_str())).collect();
        missing.sort();
        if let Some(id) = missing.first() {
            return Err(Error::UnknownUser((*id).clone()));
        }
        let mut per_class = [ClassTotals::default(); NUM_CLASSES];
        let mut seen = HashSet::new();
        let mut unlabeled = 0;
        for r in records {
            let Some(class) = labels.get(&r.user_id) else {
                unlabeled += 1;
                continue;
            };
            let t = &mut per_class[class.index()];
            if seen.insert(r.user_id.as_str()) {
                t.users += 1;
            }
            t.tweets += 1;
            t.retweets += r.retweet_count;
            t.favorites += r.favorite_count;
        }
        let report = Self::from_totals(per_class, unlabeled);
        report.check_consistency()?;
        Ok(report)
    }

    pub fn class(&self, class: UserType) -> &ClassTotals {
        match class {
            UserType::Male => &self.male,
            UserType::Female => &self.female,
            UserType::Organization => &self.organization,
        }
    }

    /// Class shares of one column, in class order. All zero for an empty
    /// column.
    pub fn shares(&self, column: Column) -> [f64; NUM_CLASSES] {
        let total = column.of(&self.total);
        UserType::ALL.map(|c| {
            if total == 0 {
                0.0
            } else {
                column.of(self.class(c)) as f64 / total as f64
            }
        })
    }

    /// Recompute shares and totals from the per-class counts.
    pub fn check_consistency(&self) -> Result<()> {
        for col in Column::ALL {
            let sum: u64 = UserType::ALL.iter().map(|&c| col.of(self.class(c))).sum();
            if sum != col.of(&self.total) {
                return Err(Error::Invariant(format!("{} total disagrees with class counts", col.title())));
            }
            let shares = self.shares(col);
            let s: f64 = shares.iter().sum();
            if sum > 0 && (s - 1.0).abs() > 1e-12 {
                return Err(Error::Invariant(format!("{} shares sum to {s}", col.title())));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut shares = serde_json::Map::new();
        for col in Column::ALL {
            let s = self.shares(col);
            shares.insert(
                col.title().to_lowercase(),
                serde_json::json!({"male": s[0], "female": s[1], "organization": s[2]}),
            );
        }
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["shares"] = serde_json::Value::Object(shares);
        v
    }
}

impl std::fmt::Display for DistributionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        let _ = write!(s, "{:<14}", "");
        for col in Column::ALL {
            let _ = write!(s, " {:>12} {:>8}", col.title(), "%");
        }
        s.push('\n');
        for class in UserType::ALL {
            let _ = write!(s, "{:<14}", class.as_str());
            let t = self.class(class);
            for col in Column::ALL {
                let _ = write!(s, " {:>12} {:>8.2}", col.of(t), self.shares(col)[class.index()] * 100.0);
            }
            s.push('\n');
        }
        let _ = write!(s, "{:<14}", "total");
        for col in Column::ALL {
            let total = col.of(&self.total);
            let _ = write!(s, " {:>12} {:>8.2}", total, if total > 0 { 100.0 } else { 0.0 });
        }
        s.push('\n');
        f.write_str(&s)
    }
}

/// First prediction per user from a `classify` output file.
pub fn load_predictions(path: &Path) -> Result<HashMap<String, UserType>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = HashMap::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: PredictionLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.entry(p.user_id).or_insert(p.label);
    }
    Ok(out)
}

pub fn cmd_report(args: &ReportArgs) -> Result<DistributionReport> {
    let labels = match (&args.predictions, &args.labels) {
        (Some(p), _) => load_predictions(p)?,
        (None, Some(l)) => load_labels(l)?,
        (None, None) => return Err(Error::Config("either --predictions or --labels is required".into())),
    };
    let loaded = load_users(&args.users)?;
    for e in &loaded.skipped {
        warn!("{}: skipping {e}", args.users.display());
    }
    let report = DistributionReport::build(&loaded.records, &labels)?;
    if report.unlabeled_records > 0 {
        warn!("{} records have no label and were not counted", report.unlabeled_records);
    }
    if let Some(path) = &args.json {
        let body = serde_json::to_string_pretty(&report.to_json()).map_err(|e| Error::Invariant(e.to_string()))?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn totals(users: u64, tweets: u64, retweets: u64, favorites: u64) -> ClassTotals {
        ClassTotals {
            users,
            tweets,
            retweets,
            favorites,
        }
    }

    #[test]
    fn table_two_and_three_shares() {
        let r = DistributionReport::from_totals(
            [
                totals(2222, 2995, 8464, 15830),
                totals(6362, 8993, 47764, 82009),
                totals(4686, 7504, 33422, 45019),
            ],
            0,
        );
        r.check_consistency().unwrap();
        assert_eq!(r.total, totals(13270, 19492, 89650, 142858));
        let expect = [
            (Column::Users, [16.74, 47.94, 35.31]),
            (Column::Retweets, [9.44, 53.28, 37.28]),
            (Column::Favorites, [11.08, 57.41, 31.51]),
        ];
        for (col, want) in expect {
            let got = r.shares(col);
            for c in 0..3 {
                assert!((got[c] * 100.0 - want[c]).abs() <= 0.01, "{col:?} {c}");
            }
        }
        let text = r.to_string();
        assert!(text.contains("13270"));
        assert!(text.contains("16.74"));
    }

    #[test]
    fn users_counted_once_tweets_aggregated() {
        let mut a = UserRecord::new("a");
        a.retweet_count = 2;
        let mut a2 = UserRecord::new("a");
        a2.favorite_count = 5;
        let b = UserRecord::new("b");
        let c = UserRecord::new("c");
        let labels: HashMap<String, UserType> =
            [("a".to_string(), UserType::Female), ("b".to_string(), UserType::Male)].into();
        let r = DistributionReport::build(&[a, b, a2, c], &labels).unwrap();
        assert_eq!(r.female, totals(1, 2, 2, 5));
        assert_eq!(r.male, totals(1, 1, 0, 0));
        assert_eq!(r.unlabeled_records, 1);
    }

    #[test]
    fn prediction_for_absent_user_is_an_error() {
        let labels: HashMap<String, UserType> = [("zz".to_string(), UserType::Male)].into();
        assert!(matches!(
            DistributionReport::build(&[UserRecord::new("a")], &labels),
            Err(Error::UnknownUser(id)) if id == "zz"
        ));
    }
}
