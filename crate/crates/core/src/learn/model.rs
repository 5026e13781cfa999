//! The deployable model artifact: extraction settings, fitted preprocessor
//! and fitted classifier in one checksummed text file.
//!
//! ```text
//! usertype-model
//! format_version 1
//! sha256 <hex digest of everything after this line>
//! <JSON payload on one line>
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{train, Classifier, ClassifierConfig, Prediction};
use crate::error::{Error, Result};
use crate::features::{FeatureSchema, FeatureVector, PreprocessConfig, Preprocessor};
use crate::name::NameConfig;
use crate::record::UserType;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "usertype-model";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub class_order: Vec<UserType>,
    pub config: ClassifierConfig,
    pub name_config: NameConfig,
    pub preprocessor: Preprocessor,
    pub classifier: Classifier,
}

impl TrainedModel {
    /// Fit the preprocessor on `vectors`, then the classifier on the
    /// preprocessed rows.
    pub fn fit(
        config: &ClassifierConfig,
        preprocess: &PreprocessConfig,
        name_config: &NameConfig,
        schema: &FeatureSchema,
        vectors: &[&FeatureVector],
        labels: &[UserType],
    ) -> Result<TrainedModel> {
        let preprocessor = Preprocessor::fit(schema, vectors, preprocess)?;
        let rows = vectors
            .iter()
            .map(|v| preprocessor.apply(v))
            .collect::<Result<Vec<_>>>()?;
        let classifier = train(config, &rows, labels)?;
        Ok(TrainedModel {
            format_version: MODEL_FORMAT_VERSION,
            class_order: UserType::ALL.to_vec(),
            config: config.clone(),
            name_config: *name_config,
            preprocessor,
            classifier,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        self.preprocessor.schema()
    }

    pub fn predict(&self, v: &FeatureVector) -> Result<Prediction> {
        let x = self.preprocessor.apply(v)?;
        self.classifier.predict(&x)
    }
}

pub fn serialize_model(model: &TrainedModel) -> Result<String> {
    let payload = serde_json::to_string(model)
        .map_err(|e| Error::ModelFormat(format!("cannot encode model: {e}")))?;
    let digest = hex::encode(Sha256::digest(payload.as_bytes()));
    Ok(format!(
        "{MAGIC}\nformat_version {}\nsha256 {digest}\n{payload}\n",
        model.format_version
    ))
}

fn split_line(text: &str) -> Option<(&str, &str)> {
    text.split_once('\n')
}

pub fn deserialize_model(text: &str) -> Result<TrainedModel> {
    let malformed = |what: &str| Error::ModelFormat(what.to_string());
    let (magic, rest) = split_line(text).ok_or_else(|| malformed("missing header"))?;
    if magic.trim_end() != MAGIC {
        return Err(malformed("not a usertype model file"));
    }
    let (version_line, rest) = split_line(rest).ok_or(Error::Checksum)?;
    let version: u32 = version_line
        .strip_prefix("format_version ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| malformed("bad format_version line"))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelVersion {
            found: version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let (sum_line, payload) = split_line(rest).ok_or(Error::Checksum)?;
    let expected = sum_line
        .strip_prefix("sha256 ")
        .map(str::trim)
        .ok_or_else(|| malformed("bad sha256 line"))?;
    let payload = payload.strip_suffix('\n').unwrap_or(payload);
    if hex::encode(Sha256::digest(payload.as_bytes())) != expected {
        return Err(Error::Checksum);
    }
    let model: TrainedModel = serde_json::from_str(payload)
        .map_err(|e| Error::ModelFormat(format!("cannot decode payload: {e}")))?;
    if model.format_version != version {
        return Err(malformed("payload version disagrees with header"));
    }
    if model.class_order != UserType::ALL {
        return Err(malformed("unexpected class order"));
    }
    Ok(model)
}

pub fn write_model(model: &TrainedModel, path: &Path) -> Result<()> {
    std::fs::write(path, serialize_model(model)?).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    deserialize_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureGroup, ImageStatus};
    use crate::learn::Algorithm;
    use crate::text::Category;

    fn tiny_model(algorithm: Algorithm) -> (TrainedModel, Vec<FeatureVector>) {
        let schema = FeatureSchema::new(vec![Category {
            id: 1,
            name: "a".into(),
        }]);
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for i in 0..30 {
            let mut values = vec![0.0; schema.dim()];
            let img = schema.range(FeatureGroup::Image);
            values[img.start + (i % 3)] = 1.0;
            let meta = schema.range(FeatureGroup::Metadata);
            values[meta.start] = (i * 17 % 23) as f64;
            values[meta.start + 1] = (i % 3 * 100) as f64;
            vectors.push(FeatureVector {
                values,
                image: ImageStatus::Present,
            });
            labels.push(UserType::ALL[i % 3]);
        }
        let refs: Vec<&FeatureVector> = vectors.iter().collect();
        let mut config = ClassifierConfig::new(algorithm, 11);
        config.forest.trees = 7;
        config.svm.epochs = 5;
        config.logistic.iterations = 20;
        let model = TrainedModel::fit(
            &config,
            &PreprocessConfig::default(),
            &NameConfig::default(),
            &schema,
            &refs,
            &labels,
        )
        .unwrap();
        (model, vectors)
    }

    #[test]
    fn round_trip_preserves_model_and_predictions() {
        for alg in Algorithm::ALL {
            let (model, vectors) = tiny_model(alg);
            let text = serialize_model(&model).unwrap();
            let back = deserialize_model(&text).unwrap();
            assert_eq!(back, model, "{alg}");
            for v in &vectors {
                let (a, b) = (model.predict(v).unwrap(), back.predict(v).unwrap());
                assert_eq!(a.label, b.label);
                assert_eq!(a.scores.map(f64::to_bits), b.scores.map(f64::to_bits));
            }
            assert_eq!(serialize_model(&back).unwrap(), text);
        }
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let (model, _) = tiny_model(Algorithm::Majority);
        let text = serialize_model(&model).unwrap().replacen("format_version 1", "format_version 2", 1);
        assert!(matches!(
            deserialize_model(&text),
            Err(Error::ModelVersion { found: 2, .. })
        ));
    }

    #[test]
    fn truncation_and_corruption_fail_the_checksum() {
        let (model, _) = tiny_model(Algorithm::RandomForest);
        let text = serialize_model(&model).unwrap();
        let truncated = &text[..text.len() * 2 / 3];
        assert!(matches!(deserialize_model(truncated), Err(Error::Checksum)));
        let corrupted = text.replacen("\"seed\":11", "\"seed\":12", 1);
        assert_ne!(corrupted, text);
        assert!(matches!(deserialize_model(&corrupted), Err(Error::Checksum)));
        assert!(matches!(deserialize_model("usertype-model\n"), Err(Error::Checksum)));
        assert!(matches!(deserialize_model("hello\nworld\n"), Err(Error::ModelFormat(_))));
    }
}
