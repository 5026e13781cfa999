//! Real-time user-type inference: classify a social-media account as male,
//! female or organization from a single tweet and its profile snapshot.

pub mod cli;
pub mod error;
pub mod eval;
pub mod features;
pub mod image;
pub mod learn;
pub mod metadata;
pub mod name;
pub mod record;
pub mod synthetic;
pub mod text;

pub use error::{Error, Result};
pub use features::{FeatureExtractor, FeatureGroup, FeatureSchema, FeatureSelection, FeatureVector, Preprocessor};
pub use learn::{Algorithm, ClassifierConfig, Prediction, TrainedModel};
pub use record::{UserRecord, UserType};
