//! C ABI for the trip-prediction library: opaque model handles, status
//! codes, and a thread-local last-error message. The generated header lands
//! in `include/tripgen.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use tripgen::error::Error;
use tripgen::eval::{mape, ZeroPolicy};
use tripgen::nn::forward;
use tripgen::numerics::Matrix;
use tripgen::store;
use tripgen::train::TrainedModel;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgStatus {
    TgOk = 0,
    /// Bad argument: null pointer, zero rows, malformed input.
    TgInvalidArgument = 1,
    /// File could not be read or written.
    TgIo = 2,
    /// Model document failed validation.
    TgCorrupt = 3,
    /// Numeric failure (non-finite values, undefined percentage error).
    TgNumeric = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: TgStatus, message: String) -> TgStatus {
    set_error(message);
    status
}

fn status_for(e: &Error) -> TgStatus {
    match e {
        Error::Io { .. } => TgStatus::TgIo,
        Error::Corrupt(_) | Error::Version { .. } => TgStatus::TgCorrupt,
        Error::Divergence { .. } | Error::ZeroActual { .. } | Error::EmptyEvaluation => {
            TgStatus::TgNumeric
        }
        _ => TgStatus::TgInvalidArgument,
    }
}

/// Opaque handle to a loaded model.
pub struct TgModel {
    inner: TrainedModel,
}

/// Message for the most recent error on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |c| c.as_ptr())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a model document from `path` into `out`. The handle must be
/// released with `tg_model_free`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn tg_model_load(path: *const c_char, out: *mut *mut TgModel) -> TgStatus {
    if path.is_null() || out.is_null() {
        return fail(TgStatus::TgInvalidArgument, "null pointer argument".into());
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(p) => p,
        Err(_) => {
            return fail(TgStatus::TgInvalidArgument, "path is not valid UTF-8".into());
        }
    };
    match store::load(Path::new(path)) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(TgModel { inner }));
            TgStatus::TgOk
        }
        Err(e) => fail(status_for(&e), e.to_string()),
    }
}

/// Releases a handle obtained from `tg_model_load`. A null handle is a no-op.
///
/// # Safety
/// `model` must be null or a handle returned by `tg_model_load` that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn tg_model_free(model: *mut TgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of feature columns the model expects per row.
///
/// # Safety
/// `model` must be a live handle from `tg_model_load`.
#[no_mangle]
pub unsafe extern "C" fn tg_model_feature_count(model: *const TgModel) -> usize {
    if model.is_null() {
        return 0;
    }
    (*model).inner.network.input_width()
}

/// Name of the model's response variable as a static string.
///
/// # Safety
/// `model` must be a live handle from `tg_model_load`.
#[no_mangle]
pub unsafe extern "C" fn tg_model_target_name(model: *const TgModel) -> *const c_char {
    if model.is_null() {
        return ptr::null();
    }
    match (*model).inner.target_name.name() {
        "person_trips" => "person_trips\0".as_ptr().cast(),
        _ => "vehicle_trips\0".as_ptr().cast(),
    }
}

/// Predicts trips for `n_rows` rows of unscaled features (row-major,
/// `n_rows * feature_count` doubles); the model's stored scaler is applied
/// internally. Writes `n_rows` predictions to `out`.
///
/// # Safety
/// `model` must be a live handle; `features` must point to
/// `n_rows * tg_model_feature_count(model)` readable doubles; `out` must
/// point to `n_rows` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tg_model_predict(
    model: *const TgModel,
    features: *const f64,
    n_rows: usize,
    out: *mut f64,
) -> TgStatus {
    if model.is_null() || features.is_null() || out.is_null() {
        return fail(TgStatus::TgInvalidArgument, "null pointer argument".into());
    }
    if n_rows == 0 {
        return fail(TgStatus::TgInvalidArgument, "n_rows must be at least 1".into());
    }
    let model = &(*model).inner;
    let width = model.network.input_width();
    let values = std::slice::from_raw_parts(features, n_rows * width).to_vec();
    let result = (|| -> tripgen::Result<Vec<f64>> {
        let batch = Matrix::from_vec(n_rows, width, values)?;
        let scaled: Vec<f64> = batch
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let c = i % width;
                (v - model.scaler.means[c]) / model.scaler.stds[c]
            })
            .collect();
        let scaled = Matrix::from_vec(n_rows, width, scaled)?;
        let (pred, _) = forward(&model.network, &scaled)?;
        Ok(pred.values().to_vec())
    })();
    match result {
        Ok(pred) => {
            std::slice::from_raw_parts_mut(out, n_rows).copy_from_slice(&pred);
            TgStatus::TgOk
        }
        Err(e) => fail(status_for(&e), e.to_string()),
    }
}

/// Mean absolute percentage error over `n` (actual, forecast) pairs.
/// With `exclude_zero_actuals` false a zero actual is an error; with it
/// true such pairs are skipped. Writes the percentage to `out_mape`.
///
/// # Safety
/// `actual` and `forecast` must each point to `n` readable doubles;
/// `out_mape` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tg_mape(
    actual: *const f64,
    forecast: *const f64,
    n: usize,
    exclude_zero_actuals: bool,
    out_mape: *mut f64,
) -> TgStatus {
    if actual.is_null() || forecast.is_null() || out_mape.is_null() {
        return fail(TgStatus::TgInvalidArgument, "null pointer argument".into());
    }
    if n == 0 {
        return fail(TgStatus::TgInvalidArgument, "n must be at least 1".into());
    }
    let a = std::slice::from_raw_parts(actual, n);
    let f = std::slice::from_raw_parts(forecast, n);
    let policy = if exclude_zero_actuals {
        ZeroPolicy::Exclude
    } else {
        ZeroPolicy::Error
    };
    match mape(a, f, policy) {
        Ok(report) => {
            *out_mape = report.mape_percent;
            TgStatus::TgOk
        }
        Err(e) => fail(status_for(&e), e.to_string()),
    }
}
