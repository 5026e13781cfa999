//! Feature assembly and preprocessing.
//!
//! Every record becomes one fixed-layout vector: name (3), text (2·(K+1)),
//! image (1000), metadata (4). The [`Preprocessor`] is fitted once on training
//! vectors and then applied unchanged at inference: image imputation from
//! training means, `ln(1 + x)` on count dimensions, then per-feature
//! standardization (or per-sample unit length).

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{ImageFeatureProvider, ImageLookup, IMAGE_DIM};
use crate::metadata::{extract_metadata_features, METADATA_DIM};
use crate::name::{classify_name_with, encode_name_features, NameConfig, NameDatabase, NAME_DIM};
use crate::record::UserRecord;
use crate::text::{extract_text_features, text_dim, Category, Lexicon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Name,
    Text,
    Image,
    Metadata,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 4] = [
        FeatureGroup::Name,
        FeatureGroup::Text,
        FeatureGroup::Image,
        FeatureGroup::Metadata,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::Name => "name",
            FeatureGroup::Text => "text",
            FeatureGroup::Image => "image",
            FeatureGroup::Metadata => "metadata",
        }
    }
}

impl FromStr for FeatureGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "name" => Ok(FeatureGroup::Name),
            "text" => Ok(FeatureGroup::Text),
            "image" => Ok(FeatureGroup::Image),
            "metadata" => Ok(FeatureGroup::Metadata),
            other => Err(Error::Config(format!("unknown feature group `{other}`"))),
        }
    }
}

/// A nonempty set of feature groups, kept in layout order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureGroup>", into = "Vec<FeatureGroup>")]
pub struct FeatureSelection(Vec<FeatureGroup>);

impl FeatureSelection {
    pub fn all() -> Self {
        FeatureSelection(FeatureGroup::ALL.to_vec())
    }

    pub fn only(group: FeatureGroup) -> Self {
        FeatureSelection(vec![group])
    }

    pub fn new(groups: &[FeatureGroup]) -> Result<Self> {
        let mut g = groups.to_vec();
        g.sort();
        g.dedup();
        if g.is_empty() {
            return Err(Error::Config("empty feature selection".into()));
        }
        Ok(FeatureSelection(g))
    }

    pub fn groups(&self) -> &[FeatureGroup] {
        &self.0
    }

    pub fn contains(&self, group: FeatureGroup) -> bool {
        self.0.contains(&group)
    }

    pub fn is_all(&self) -> bool {
        self.0.len() == FeatureGroup::ALL.len()
    }
}

impl TryFrom<Vec<FeatureGroup>> for FeatureSelection {
    type Error = Error;

    fn try_from(groups: Vec<FeatureGroup>) -> Result<Self> {
        FeatureSelection::new(&groups)
    }
}

impl From<FeatureSelection> for Vec<FeatureGroup> {
    fn from(s: FeatureSelection) -> Self {
        s.0
    }
}

impl FromStr for FeatureSelection {
    type Err = Error;

    /// `all` or a comma-separated list of group names.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(FeatureSelection::all());
        }
        let groups = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<FeatureGroup>>>()?;
        FeatureSelection::new(&groups)
    }
}

impl fmt::Display for FeatureSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_all() {
            return f.write_str("all");
        }
        let names: Vec<&str> = self.0.iter().map(|g| g.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

/// Layout of the assembled vector. Carries the lexicon's category table so a
/// model can refuse a lexicon it was not trained with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub categories: Vec<Category>,
}

impl FeatureSchema {
    pub fn new(categories: Vec<Category>) -> Self {
        FeatureSchema { categories }
    }

    pub fn for_lexicon(lexicon: &Lexicon) -> Self {
        Self::new(lexicon.categories().to_vec())
    }

    /// Number of lexicon categories.
    pub fn k(&self) -> usize {
        self.categories.len()
    }

    pub fn dim(&self) -> usize {
        NAME_DIM + text_dim(self.k()) + IMAGE_DIM + METADATA_DIM
    }

    pub fn range(&self, group: FeatureGroup) -> Range<usize> {
        let text = NAME_DIM..NAME_DIM + text_dim(self.k());
        let image = text.end..text.end + IMAGE_DIM;
        let meta = image.end..image.end + METADATA_DIM;
        match group {
            FeatureGroup::Name => 0..NAME_DIM,
            FeatureGroup::Text => text,
            FeatureGroup::Image => image,
            FeatureGroup::Metadata => meta,
        }
    }

    pub fn group_of(&self, dim: usize) -> Option<FeatureGroup> {
        FeatureGroup::ALL
            .into_iter()
            .find(|g| self.range(*g).contains(&dim))
    }

    /// True for the two word-count dims and the three metadata count dims.
    pub fn is_count(&self, dim: usize) -> bool {
        let text = self.range(FeatureGroup::Text);
        let meta = self.range(FeatureGroup::Metadata);
        dim == text.start || dim == text.start + self.k() + 1 || (meta.start..meta.start + 3).contains(&dim)
    }

    /// Schema dims covered by `selection`, in layout order.
    pub fn columns(&self, selection: &FeatureSelection) -> Vec<usize> {
        selection
            .groups()
            .iter()
            .flat_map(|g| self.range(*g))
            .collect()
    }

    pub fn check_lexicon(&self, lexicon: &Lexicon) -> Result<()> {
        if self.categories != lexicon.categories() {
            return Err(Error::IncompatibleResources(format!(
                "lexicon has {} categories, model was trained with {} (or names/ids differ)",
                lexicon.category_count(),
                self.k()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageStatus {
    Present,
    Missing,
    /// A reference was given but no valid vector came back. Imputed like
    /// `Missing`, counted separately.
    Invalid,
}

/// Filler for image dims when the group is missing. Never survives
/// preprocessing.
pub const MISSING_SENTINEL: f64 = f64::NAN;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub image: ImageStatus,
}

impl FeatureVector {
    pub fn image_missing(&self) -> bool {
        self.image != ImageStatus::Present
    }

    pub fn missing_groups(&self) -> Vec<FeatureGroup> {
        if self.image_missing() {
            vec![FeatureGroup::Image]
        } else {
            Vec::new()
        }
    }
}

pub fn assemble(
    record: &UserRecord,
    name_db: &NameDatabase,
    name_config: &NameConfig,
    lexicon: &Lexicon,
    images: &dyn ImageFeatureProvider,
) -> FeatureVector {
    let k = lexicon.category_count();
    let mut values = Vec::with_capacity(NAME_DIM + text_dim(k) + IMAGE_DIM + METADATA_DIM);
    values.extend(encode_name_features(classify_name_with(
        &record.screen_name,
        name_db,
        name_config,
    )));
    values.extend(extract_text_features(
        &record.tweet_text,
        &record.description,
        lexicon,
    ));
    let image = match images.lookup(record.image_vector_ref.as_deref()) {
        ImageLookup::Present(v) => {
            values.extend_from_slice(v.as_slice());
            ImageStatus::Present
        }
        other => {
            values.extend(std::iter::repeat_n(MISSING_SENTINEL, IMAGE_DIM));
            if matches!(other, ImageLookup::Missing) {
                ImageStatus::Missing
            } else {
                ImageStatus::Invalid
            }
        }
    };
    values.extend(extract_metadata_features(record).to_array());
    FeatureVector { values, image }
}

/// The loaded resources needed to turn records into feature vectors.
pub struct FeatureExtractor {
    pub name_db: NameDatabase,
    pub name_config: NameConfig,
    pub lexicon: Lexicon,
    pub images: Box<dyn ImageFeatureProvider>,
}

impl FeatureExtractor {
    pub fn new(
        name_db: NameDatabase,
        name_config: NameConfig,
        lexicon: Lexicon,
        images: Box<dyn ImageFeatureProvider>,
    ) -> Self {
        FeatureExtractor {
            name_db,
            name_config,
            lexicon,
            images,
        }
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema::for_lexicon(&self.lexicon)
    }

    pub fn extract(&self, record: &UserRecord) -> FeatureVector {
        assemble(
            record,
            &self.name_db,
            &self.name_config,
            &self.lexicon,
            self.images.as_ref(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// Subtract the training mean and divide by the training spread, per
    /// dimension.
    #[default]
    Feature,
    /// Scale each vector to unit Euclidean length.
    Sample,
}

impl FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feature" => Ok(NormMode::Feature),
            "sample" => Ok(NormMode::Sample),
            other => Err(Error::Config(format!("unknown normalization `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub norm: NormMode,
    pub selection: FeatureSelection,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            norm: NormMode::Feature,
            selection: FeatureSelection::all(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    schema: FeatureSchema,
    config: PreprocessConfig,
    columns: Vec<usize>,
    /// Training mean of each image dim over vectors with a present image.
    /// Empty when the image group is not selected.
    imputation: Vec<f64>,
    means: Vec<f64>,
    spreads: Vec<f64>,
}

impl Preprocessor {
    pub fn fit(
        schema: &FeatureSchema,
        vectors: &[&FeatureVector],
        config: &PreprocessConfig,
    ) -> Result<Preprocessor> {
        if vectors.len() < 2 {
            return Err(Error::CannotFit(format!(
                "need at least 2 training vectors, got {}",
                vectors.len()
            )));
        }
        let dim = schema.dim();
        if let Some(v) = vectors.iter().find(|v| v.values.len() != dim) {
            return Err(Error::SchemaMismatch {
                expected: dim,
                actual: v.values.len(),
            });
        }

        let mut imputation = Vec::new();
        if config.selection.contains(FeatureGroup::Image) {
            let range = schema.range(FeatureGroup::Image);
            let present: Vec<&&FeatureVector> =
                vectors.iter().filter(|v| !v.image_missing()).collect();
            if present.is_empty() {
                return Err(Error::CannotFit(
                    "no training vector has an image".into(),
                ));
            }
            imputation = vec![0.0; IMAGE_DIM];
            for v in &present {
                for (acc, x) in imputation.iter_mut().zip(&v.values[range.clone()]) {
                    *acc += x;
                }
            }
            let n = present.len() as f64;
            imputation.iter_mut().for_each(|x| *x /= n);
        }

        let mut pre = Preprocessor {
            schema: schema.clone(),
            config: config.clone(),
            columns: schema.columns(&config.selection),
            imputation,
            means: Vec::new(),
            spreads: Vec::new(),
        };

        let rows: Vec<Vec<f64>> = vectors.iter().map(|v| pre.impute_and_log(v)).collect();
        let width = pre.columns.len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; width];
        let mut spreads = vec![1.0; width];
        for j in 0..width {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let mut sum = 0.0;
            for r in &rows {
                sum += r[j];
                lo = lo.min(r[j]);
                hi = hi.max(r[j]);
            }
            if lo == hi {
                means[j] = lo;
                continue;
            }
            let mean = sum / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            means[j] = mean;
            let sd = var.sqrt();
            if sd > 0.0 && sd.is_finite() {
                spreads[j] = sd;
            }
        }
        pre.means = means;
        pre.spreads = spreads;
        Ok(pre)
    }

    pub fn fit_owned(
        schema: &FeatureSchema,
        vectors: &[FeatureVector],
        config: &PreprocessConfig,
    ) -> Result<Preprocessor> {
        let refs: Vec<&FeatureVector> = vectors.iter().collect();
        Self::fit(schema, &refs, config)
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn config(&self) -> &PreprocessConfig {
        &self.config
    }

    /// Dimension of the vectors `apply` returns.
    pub fn output_dim(&self) -> usize {
        self.columns.len()
    }

    pub fn imputation_values(&self) -> &[f64] {
        &self.imputation
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn spreads(&self) -> &[f64] {
        &self.spreads
    }

    /// Full-schema copy of `v` with a missing image group replaced by the
    /// imputation values. Image dims are left alone when the image group is
    /// not selected.
    pub fn impute(&self, v: &FeatureVector) -> Vec<f64> {
        let mut out = v.values.clone();
        if v.image_missing() && !self.imputation.is_empty() {
            let range = self.schema.range(FeatureGroup::Image);
            out[range].copy_from_slice(&self.imputation);
        }
        out
    }

    fn impute_and_log(&self, v: &FeatureVector) -> Vec<f64> {
        let image = self.schema.range(FeatureGroup::Image);
        let impute = v.image_missing() && !self.imputation.is_empty();
        self.columns
            .iter()
            .map(|&d| {
                let x = if impute && image.contains(&d) {
                    self.imputation[d - image.start]
                } else {
                    v.values[d]
                };
                if self.schema.is_count(d) {
                    x.ln_1p()
                } else {
                    x
                }
            })
            .collect()
    }

    pub fn apply(&self, v: &FeatureVector) -> Result<Vec<f64>> {
        if v.values.len() != self.schema.dim() {
            return Err(Error::SchemaMismatch {
                expected: self.schema.dim(),
                actual: v.values.len(),
            });
        }
        let mut out = self.impute_and_log(v);
        match self.config.norm {
            NormMode::Feature => {
                for ((x, m), s) in out.iter_mut().zip(&self.means).zip(&self.spreads) {
                    *x = (*x - m) / s;
                }
            }
            NormMode::Sample => {
                let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    out.iter_mut().for_each(|x| *x /= norm);
                }
            }
        }
        if let Some(i) = out.iter().position(|x| !x.is_finite()) {
            return Err(Error::Invariant(format!(
                "non-finite value after preprocessing at column {i}"
            )));
        }
        Ok(out)
    }
}
