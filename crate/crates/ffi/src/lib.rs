//! C ABI over the core library.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every fallible call returns a [`PsStatus`]; on failure the message is
//! available from [`ps_last_error`] on the same thread until the next call.
//! Strings returned through out-parameters are owned by the caller and
//! released with [`ps_string_free`]. Handle arguments must be live handles
//! from this library (null is reported, not dereferenced) and string
//! arguments NUL-terminated.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use papseries::analysis::{bounds_json, extend_default, powerlaw_pipeline, PowerLawOptions};
use papseries::da::EnsembleOptions;
use papseries::numeric::Precision;
use papseries::perm::{count_avoiders, PatternSet, Permutation};
use papseries::series::{export, import, Dataset, ExactSeries, Format};
use papseries::stieltjes::{bound_report, BoundReport};
use papseries::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    NotFound = 4,
    ComputationError = 5,
    ResourceCap = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsFormat {
    Json = 0,
    Bfile = 1,
    Csv = 2,
}

impl From<PsFormat> for Format {
    fn from(f: PsFormat) -> Self {
        match f {
            PsFormat::Json => Format::Json,
            PsFormat::Bfile => Format::Bfile,
            PsFormat::Csv => Format::Csv,
        }
    }
}

/// A coefficient sequence, optionally with predicted terms.
pub struct PsSeries(ExactSeries);

/// Growth-rate lower bounds of a series.
pub struct PsBounds(BoundReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(PsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => PsStatus::ParseError,
            Error::Invalid(_) => PsStatus::InvalidArgument,
            Error::ResourceCap(_) => PsStatus::ResourceCap,
            _ => PsStatus::ComputationError,
        };
        Fail(code, e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> PsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            PsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(PsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(PsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(PsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(PsStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn bits(digits: u32) -> Result<u32, Fail> {
    if digits == 0 {
        return Err(Fail(PsStatus::InvalidArgument, "precision must be positive".into()));
    }
    Ok(Precision::digits(digits).bits())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Count permutations of length 0..=max_n avoiding every pattern in the
/// space-separated list `patterns` (e.g. "25314" or "123 4321").
#[no_mangle]
pub unsafe extern "C" fn ps_count_avoiders(patterns: *const c_char, max_n: usize, out: *mut *mut PsSeries) -> PsStatus {
    guard(|| {
        let text = str_arg(patterns, "patterns")?;
        let perms = text.split_whitespace().map(|w| w.parse::<Permutation>()).collect::<Result<Vec<_>, _>>()?;
        let set = PatternSet::new(perms)?;
        let counts = count_avoiders(&set, max_n);
        let s = ExactSeries::from_integers(format!("Av({})", set.id()), 0, counts.counts)?;
        put(out, Box::into_raw(Box::new(PsSeries(s))))
    })
}

/// Look up an embedded class by name, member pattern or OEIS id.
#[no_mangle]
pub unsafe extern "C" fn ps_dataset_get(key: *const c_char, out: *mut *mut PsSeries) -> PsStatus {
    guard(|| {
        let k = str_arg(key, "key")?;
        let s = Dataset.get(k).ok_or_else(|| Fail(PsStatus::NotFound, format!("no embedded series '{k}'")))?;
        put(out, Box::into_raw(Box::new(PsSeries(s))))
    })
}

/// Parse a series from text; predicted values are read at `digits` decimal digits.
#[no_mangle]
pub unsafe extern "C" fn ps_series_import(
    text: *const c_char,
    format: PsFormat,
    name: *const c_char,
    digits: u32,
    out: *mut *mut PsSeries,
) -> PsStatus {
    guard(|| {
        let s = import(str_arg(text, "text")?, format.into(), str_arg(name, "name")?, bits(digits)?)?;
        put(out, Box::into_raw(Box::new(PsSeries(s))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_series_export(series: *const PsSeries, format: PsFormat, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let s = ref_arg(series, "series")?;
        put(out, to_c(export(&s.0, format.into())))
    })
}

/// Number of exact coefficients.
#[no_mangle]
pub unsafe extern "C" fn ps_series_len(series: *const PsSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Number of predicted terms following the exact ones.
#[no_mangle]
pub unsafe extern "C" fn ps_series_predicted_len(series: *const PsSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.values(64).len() - s.0.len())
}

/// Exact coefficient at position `i` (counting from the first stored term) as a decimal or p/q string.
#[no_mangle]
pub unsafe extern "C" fn ps_series_coeff(series: *const PsSeries, i: usize, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let s = &ref_arg(series, "series")?.0;
        let c = s.coeffs().get(i).ok_or_else(|| Fail(PsStatus::InvalidArgument, format!("index {i} beyond {} exact terms", s.len())))?;
        put(out, to_c(c.to_string()))
    })
}

/// Value at position `i` as a double, exact or predicted.
#[no_mangle]
pub unsafe extern "C" fn ps_series_value(series: *const PsSeries, i: usize, out: *mut f64) -> PsStatus {
    guard(|| {
        let s = &ref_arg(series, "series")?.0;
        let v = s.values(64);
        let x = v.values.get(i).ok_or_else(|| Fail(PsStatus::InvalidArgument, format!("index {i} beyond {} terms", v.len())))?;
        put(out, x.1.to_f64())
    })
}

/// The first `len` exact terms as a new series.
#[no_mangle]
pub unsafe extern "C" fn ps_series_prefix(series: *const PsSeries, len: usize, out: *mut *mut PsSeries) -> PsStatus {
    guard(|| {
        let s = ref_arg(series, "series")?.0.prefix(len)?;
        put(out, Box::into_raw(Box::new(PsSeries(s))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_series_free(series: *mut PsSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Predict `count` further terms with the default approximant ensemble.
#[no_mangle]
pub unsafe extern "C" fn ps_extend(series: *const PsSeries, count: usize, digits: u32, out: *mut *mut PsSeries) -> PsStatus {
    guard(|| {
        let s = &ref_arg(series, "series")?.0;
        let (ext, _) = extend_default(s, count, &EnsembleOptions::new(count, bits(digits)?))?;
        put(out, Box::into_raw(Box::new(PsSeries(ext))))
    })
}

/// Growth-rate lower bounds from the exact terms.
#[no_mangle]
pub unsafe extern "C" fn ps_bounds(series: *const PsSeries, digits: u32, out: *mut *mut PsBounds) -> PsStatus {
    guard(|| {
        let s = &ref_arg(series, "series")?.0;
        let b = bound_report(s, false, bits(digits)?)?;
        put(out, Box::into_raw(Box::new(PsBounds(b))))
    })
}

/// Largest continued-fraction bound.
#[no_mangle]
pub unsafe extern "C" fn ps_bounds_value(bounds: *const PsBounds, out: *mut f64) -> PsStatus {
    guard(|| put(out, ref_arg(bounds, "bounds")?.0.bound.to_f64()))
}

#[no_mangle]
pub unsafe extern "C" fn ps_bounds_to_json(bounds: *const PsBounds, sig: usize, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let b = &ref_arg(bounds, "bounds")?.0;
        put(out, to_c(bounds_json(b, sig.max(1)).to_string()))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_bounds_free(bounds: *mut PsBounds) {
    if !bounds.is_null() {
        drop(Box::from_raw(bounds));
    }
}

/// Power-law ratio analysis of all terms (exact and predicted) as a JSON report.
#[no_mangle]
pub unsafe extern "C" fn ps_analyze_powerlaw(series: *const PsSeries, digits: u32, sig: usize, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        let s = &ref_arg(series, "series")?.0;
        let rep = powerlaw_pipeline(s, &PowerLawOptions::default(), bits(digits)?)?;
        put(out, to_c(rep.to_json(sig.max(1)).to_string()))
    })
}
