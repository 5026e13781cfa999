use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use usertype::features::{FeatureExtractor, FeatureVector, PreprocessConfig};
use usertype::image::FileImageProvider;
use usertype::learn::{write_model, Algorithm, ClassifierConfig, TrainedModel};
use usertype::name::NameConfig;
use usertype::synthetic::{generate, SyntheticConfig};
use usertype_ffi::*;

struct Fixture {
    _dir: tempfile::TempDir,
    model: CString,
    names: CString,
    lexicon: CString,
    images: CString,
    trained: TrainedModel,
    extractor: FeatureExtractor,
    records: Vec<String>,
}

fn c(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(&SyntheticConfig {
        per_class: 15,
        seed: 4,
        ..SyntheticConfig::default()
    });
    data.write_to_dir(dir.path()).unwrap();
    let extractor = FeatureExtractor::new(
        data.name_db.clone(),
        NameConfig::default(),
        data.lexicon.clone(),
        Box::new(FileImageProvider::new(Some(dir.path().join("images")))),
    );
    let vectors: Vec<FeatureVector> = data.records.iter().map(|r| extractor.extract(r)).collect();
    let refs: Vec<&FeatureVector> = vectors.iter().collect();
    let mut config = ClassifierConfig::new(Algorithm::RandomForest, 3);
    config.forest.trees = 15;
    let trained = TrainedModel::fit(
        &config,
        &PreprocessConfig::default(),
        &NameConfig::default(),
        &extractor.schema(),
        &refs,
        &data.labels,
    )
    .unwrap();
    let model_path = dir.path().join("model.ut");
    write_model(&trained, &model_path).unwrap();
    Fixture {
        model: c(&model_path),
        names: c(&dir.path().join("names.csv")),
        lexicon: c(&dir.path().join("lexicon.dic")),
        images: c(&dir.path().join("images")),
        records: data.records.iter().map(|r| r.to_json_line()).collect(),
        trained,
        extractor,
        _dir: dir,
    }
}

fn last_error() -> String {
    let p = ut_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn classifies_like_the_library() {
    let f = fixture();
    let mut handle = ptr::null_mut();
    let status = unsafe {
        ut_classifier_open(f.model.as_ptr(), f.names.as_ptr(), f.lexicon.as_ptr(), f.images.as_ptr(), &mut handle)
    };
    assert_eq!(status, UtStatus::Ok);
    assert!(ut_last_error().is_null());
    for line in &f.records {
        let json = CString::new(line.as_str()).unwrap();
        let mut out = UtPrediction::default();
        assert_eq!(unsafe { ut_classify_json(handle, json.as_ptr(), &mut out) }, UtStatus::Ok);
        let record = usertype::record::parse_user_record(line, 1).unwrap();
        let expected = f.trained.predict(&f.extractor.extract(&record)).unwrap();
        assert_eq!(out.label as usize, expected.label.index());
        assert_eq!(out.scores, expected.scores);
    }
    unsafe { ut_classifier_free(handle) };
}

#[test]
fn errors_map_to_status_codes() {
    let f = fixture();
    let mut handle = ptr::null_mut();
    let missing = CString::new("/nonexistent/model.ut").unwrap();
    let s = unsafe { ut_classifier_open(missing.as_ptr(), f.names.as_ptr(), f.lexicon.as_ptr(), ptr::null(), &mut handle) };
    assert_eq!(s, UtStatus::Io);
    assert!(handle.is_null());
    assert!(last_error().contains("nonexistent"));

    let s = unsafe { ut_classifier_open(ptr::null(), f.names.as_ptr(), f.lexicon.as_ptr(), ptr::null(), &mut handle) };
    assert_eq!(s, UtStatus::NullPointer);

    let s = unsafe { ut_classifier_open(f.lexicon.as_ptr(), f.names.as_ptr(), f.lexicon.as_ptr(), ptr::null(), &mut handle) };
    assert_eq!(s, UtStatus::Model);

    let s = unsafe { ut_classifier_open(f.model.as_ptr(), f.names.as_ptr(), f.lexicon.as_ptr(), ptr::null(), &mut handle) };
    assert_eq!(s, UtStatus::Ok);
    let mut out = UtPrediction::default();
    let bad = CString::new("{not json").unwrap();
    assert_eq!(unsafe { ut_classify_json(handle, bad.as_ptr(), &mut out) }, UtStatus::Record);
    let negative = CString::new(r#"{"user_id":"x","friends_count":-1}"#).unwrap();
    assert_eq!(unsafe { ut_classify_json(handle, negative.as_ptr(), &mut out) }, UtStatus::Record);
    assert_eq!(unsafe { ut_classify_json(ptr::null(), bad.as_ptr(), &mut out) }, UtStatus::NullPointer);
    let invalid_utf8 = [0xffu8, 0xfe, 0];
    assert_eq!(
        unsafe { ut_classify_json(handle, invalid_utf8.as_ptr().cast(), &mut out) },
        UtStatus::InvalidUtf8
    );
    unsafe { ut_classifier_free(handle) };
    unsafe { ut_classifier_free(ptr::null_mut()) };
}

#[test]
fn static_strings() {
    let name = |i| unsafe { CStr::from_ptr(ut_label_name(i)) }.to_str().unwrap();
    assert_eq!(name(0), "male");
    assert_eq!(name(1), "female");
    assert_eq!(name(2), "organization");
    assert!(ut_label_name(3).is_null());
    assert!(ut_label_name(-1).is_null());
    let v = unsafe { CStr::from_ptr(ut_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/usertype.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for symbol in ["ut_classifier_open", "ut_classify_json", "ut_classifier_free", "ut_last_error", "typedef struct ut_classifier ut_classifier"] {
        assert!(text.contains(symbol), "{symbol}");
    }
    if let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
