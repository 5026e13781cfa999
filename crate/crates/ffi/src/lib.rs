//! C ABI over the usertype classifier.
//!
//! A handle bundles a loaded model with the resources feature extraction
//! needs. Every function returns a `ut_status`; on failure the message is
//! available from `ut_last_error` on the same thread. Handles may be shared
//! between threads for classification.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use usertype::features::FeatureExtractor;
use usertype::image::FileImageProvider;
use usertype::learn::{read_model, TrainedModel};
use usertype::name::load_name_database;
use usertype::record::{parse_user_record, UserType};
use usertype::text::load_lexicon;
use usertype::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Model = 4,
    Resource = 5,
    Record = 6,
    Internal = 7,
    Panic = 8,
}

/// Label indices follow the class order male, female, organization.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UtPrediction {
    pub label: i32,
    pub scores: [f64; 3],
}

/// Opaque classifier handle.
pub struct UtClassifier {
    model: TrainedModel,
    extractor: FeatureExtractor,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("nul bytes removed"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(UtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => UtStatus::Io,
            Error::ModelVersion { .. } | Error::Checksum | Error::ModelFormat(_) => UtStatus::Model,
            Error::NameDatabase { .. }
            | Error::Lexicon { .. }
            | Error::IncompatibleResources(_)
            | Error::SchemaMismatch { .. } => UtStatus::Resource,
            Error::Parse { .. } | Error::InvalidRecord { .. } => UtStatus::Record,
            _ => UtStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            UtStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(Some(message));
            status
        }
        Err(_) => {
            set_last_error(Some("panic inside usertype".into()));
            UtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(UtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(UtStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Load a model artifact plus the name database and lexicon it was trained
/// with. `image_dir` may be null. On success `*out` owns a new handle that
/// must be released with `ut_classifier_free`.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ut_classifier_open(
    model_path: *const c_char,
    name_db_path: *const c_char,
    lexicon_path: *const c_char,
    image_dir: *const c_char,
    out: *mut *mut UtClassifier,
) -> UtStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(UtStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let model = read_model(str_arg(model_path, "model_path")?.as_ref())?;
        let name_db = load_name_database(str_arg(name_db_path, "name_db_path")?.as_ref())?;
        let lexicon = load_lexicon(str_arg(lexicon_path, "lexicon_path")?.as_ref())?;
        model.schema().check_lexicon(&lexicon)?;
        let images = if image_dir.is_null() {
            None
        } else {
            Some(PathBuf::from(str_arg(image_dir, "image_dir")?))
        };
        let extractor = FeatureExtractor::new(
            name_db,
            model.name_config,
            lexicon,
            Box::new(FileImageProvider::new(images)),
        );
        *out = Box::into_raw(Box::new(UtClassifier { model, extractor }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `handle` must come from `ut_classifier_open` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ut_classifier_free(handle: *mut UtClassifier) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Classify one user record given as a JSON object.
///
/// # Safety
/// `handle` must be a live handle, `record_json` NUL-terminated and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ut_classify_json(
    handle: *const UtClassifier,
    record_json: *const c_char,
    out: *mut UtPrediction,
) -> UtStatus {
    guard(|| {
        if handle.is_null() || out.is_null() {
            return Err(Failure(UtStatus::NullPointer, "handle or out is null".into()));
        }
        let c = &*handle;
        let record = parse_user_record(str_arg(record_json, "record_json")?, 1)?;
        let p = c.model.predict(&c.extractor.extract(&record))?;
        *out = UtPrediction {
            label: p.label.index() as i32,
            scores: p.scores,
        };
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null after a success.
/// Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn ut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a label index, or null when out of range.
#[no_mangle]
pub extern "C" fn ut_label_name(label: i32) -> *const c_char {
    match usize::try_from(label).ok().and_then(UserType::from_index) {
        Some(UserType::Male) => c"male".as_ptr(),
        Some(UserType::Female) => c"female".as_ptr(),
        Some(UserType::Organization) => c"organization".as_ptr(),
        None => ptr::null(),
    }
}

#[no_mangle]
pub extern "C" fn ut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
