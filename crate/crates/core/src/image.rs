//! Profile-image category probabilities supplied by an external model.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const IMAGE_DIM: usize = 1000;
pub const SUM_TOLERANCE: f64 = 1e-3;

/// 1000 class probabilities, each in [0, 1], summing to 1 within
/// [`SUM_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageProbabilityVector(Vec<f64>);

impl ImageProbabilityVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != IMAGE_DIM {
            return Err(Error::ImageVector(format!(
                "expected {IMAGE_DIM} values, found {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::ImageVector(format!("value {v} at index {i} outside [0, 1]")));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::ImageVector(format!("values sum to {sum}")));
        }
        Ok(ImageProbabilityVector(values))
    }

    pub fn uniform() -> Self {
        ImageProbabilityVector(vec![1.0 / IMAGE_DIM as f64; IMAGE_DIM])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::ImageVector(format!("not a number: `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    /// Whitespace-separated text, one value per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.0.len() * 8);
        for v in &self.0 {
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }
}

/// `Ok(None)` when there is no path: the image is missing, which is not an
/// error. A path that cannot be read or fails validation is an error.
pub fn load_image_vector(path: Option<&Path>) -> Result<Option<ImageProbabilityVector>> {
    let Some(path) = path else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ImageProbabilityVector::parse(&text).map(Some)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImageLookup {
    Present(ImageProbabilityVector),
    /// No image reference on the record.
    Missing,
    /// A reference was given but produced no valid vector.
    Invalid(String),
}

/// Source of image vectors for records. Implementations must return the same
/// answer for the same reference within a run.
pub trait ImageFeatureProvider: Send + Sync {
    fn lookup(&self, reference: Option<&str>) -> ImageLookup;
}

/// Every image is missing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoImages;

impl ImageFeatureProvider for NoImages {
    fn lookup(&self, _reference: Option<&str>) -> ImageLookup {
        ImageLookup::Missing
    }
}

/// Reads vector files; relative references resolve against `root`.
#[derive(Debug, Clone, Default)]
pub struct FileImageProvider {
    root: Option<PathBuf>,
}

impl FileImageProvider {
    pub fn new(root: Option<PathBuf>) -> Self {
        FileImageProvider { root }
    }
}

impl ImageFeatureProvider for FileImageProvider {
    fn lookup(&self, reference: Option<&str>) -> ImageLookup {
        let Some(reference) = reference else {
            return ImageLookup::Missing;
        };
        let path = match &self.root {
            Some(root) if Path::new(reference).is_relative() => root.join(reference),
            _ => PathBuf::from(reference),
        };
        match load_image_vector(Some(&path)) {
            Ok(Some(v)) => ImageLookup::Present(v),
            Ok(None) => ImageLookup::Missing,
            Err(e) => ImageLookup::Invalid(e.to_string()),
        }
    }
}

/// Vectors held in memory, keyed by reference.
#[derive(Debug, Clone, Default)]
pub struct InMemoryImages {
    vectors: HashMap<String, ImageProbabilityVector>,
}

impl InMemoryImages {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, reference: impl Into<String>, vector: ImageProbabilityVector) {
        self.vectors.insert(reference.into(), vector);
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ImageProbabilityVector)> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl ImageFeatureProvider for InMemoryImages {
    fn lookup(&self, reference: Option<&str>) -> ImageLookup {
        match reference {
            None => ImageLookup::Missing,
            Some(r) => match self.vectors.get(r) {
                Some(v) => ImageLookup::Present(v.clone()),
                None => ImageLookup::Invalid(format!("no vector for `{r}`")),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_values(values: &[f64]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for v in values {
            writeln!(f, "{v}").unwrap();
        }
        f
    }

    #[test]
    fn uniform_file_loads() {
        let f = write_values(&[0.001; IMAGE_DIM]);
        let v = load_image_vector(Some(f.path())).unwrap().unwrap();
        assert_eq!(v.as_slice().len(), IMAGE_DIM);
    }

    #[test]
    fn short_file_is_rejected() {
        let f = write_values(&[0.001; 999]);
        assert!(matches!(
            load_image_vector(Some(f.path())),
            Err(Error::ImageVector(_))
        ));
    }

    #[test]
    fn absent_reference_is_missing() {
        assert_eq!(load_image_vector(None).unwrap(), None);
        assert_eq!(FileImageProvider::default().lookup(None), ImageLookup::Missing);
    }

    #[test]
    fn provider_distinguishes_invalid_from_missing() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("ok.txt"), ImageProbabilityVector::uniform().to_text()).unwrap();
        std::fs::write(dir.path().join("bad.txt"), "0.5 0.5").unwrap();
        let p = FileImageProvider::new(Some(dir.path().to_path_buf()));
        assert!(matches!(p.lookup(Some("ok.txt")), ImageLookup::Present(_)));
        assert!(matches!(p.lookup(Some("bad.txt")), ImageLookup::Invalid(_)));
        assert!(matches!(p.lookup(Some("gone.txt")), ImageLookup::Invalid(_)));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let mut vals = vec![0.0; IMAGE_DIM];
        vals[3] = 0.3;
        vals[7] = 0.7;
        let v = ImageProbabilityVector::new(vals).unwrap();
        assert_eq!(ImageProbabilityVector::parse(&v.to_text()).unwrap(), v);
    }

    fn valid_values() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, IMAGE_DIM).prop_map(|w| {
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn accepts_exactly_the_valid_vectors(
            values in valid_values(),
            corruption in 0usize..5,
            at in 0usize..IMAGE_DIM,
            delta in 0.002f64..0.5,
        ) {
            let mut v = values;
            match corruption {
                1 => { v.pop(); }
                2 => v[at] = -delta,
                3 => v[at] = 1.0 + delta,
                4 => v[at] += delta,
                _ => {}
            }
            let sum: f64 = v.iter().sum();
            let expect_ok = v.len() == IMAGE_DIM
                && v.iter().all(|x| *x >= 0.0)
                && v.iter().all(|x| *x <= 1.0)
                && (sum - 1.0).abs() <= SUM_TOLERANCE;
            prop_assert_eq!(ImageProbabilityVector::new(v).is_ok(), expect_ok);
            prop_assert_eq!(expect_ok, corruption == 0);
        }
    }
}
