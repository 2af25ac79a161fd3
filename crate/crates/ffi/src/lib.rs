//! C ABI for the `nonmarkov` library.
//!
//! Every fallible function returns an [`NmStatus`]; on failure a message is
//! kept per thread and can be read with [`nm_last_error_message`]. Datasets
//! and models are opaque handles owned by the caller and released with the
//! matching `*_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use nonmarkov::cli::io::{dataset_to_csv, read_dataset, read_text, write_atomic};
use nonmarkov::learn::{parse_model, predict, serialize_model, train_poly, Dataset, PolyModel};
use nonmarkov::process::{joint_pmf, mixed_process, non_markovianity, prepared_state, JointPmf};
use nonmarkov::simulate::{generate_dataset, standard_pairs, GenerationPlan, MeasurementSet, PmfSampling, Shots};
use nonmarkov::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    InvalidState = 4,
    Numerical = 5,
    Parse = 6,
    Io = 7,
    Panic = 8,
}

impl From<&Error> for NmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension(_) => NmStatus::Dimension,
            Error::NotHermitian(_) | Error::NotUnitary(_) | Error::InvalidState(_) => NmStatus::InvalidState,
            Error::NoConvergence { .. } | Error::InfiniteDivergence(_) | Error::Numerical(_) => NmStatus::Numerical,
            Error::InvalidArgument(_) => NmStatus::InvalidArgument,
            Error::Parse(_) => NmStatus::Parse,
            Error::Io(_) => NmStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(NmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(NmStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NmStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NmStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            NmStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| Fail(NmStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn nm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn nm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `p(i,j) = p(i)[q δ_ij + (1-q) p(j)]`, written row-major into `out[16]`.
///
/// # Safety
/// `marginal` must point to 4 doubles and `out` to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nm_joint_pmf(marginal: *const f64, q: f64, out: *mut f64) -> NmStatus {
    guard(|| {
        if marginal.is_null() || out.is_null() {
            return Err(null("marginal or out"));
        }
        let m: [f64; 4] = std::slice::from_raw_parts(marginal, 4).try_into().expect("length 4");
        let p = joint_pmf(&m, q)?;
        std::slice::from_raw_parts_mut(out, 16).copy_from_slice(&p.flat());
        Ok(())
    })
}

/// Non-Markovianity of the process built from the prepared qubit state and a
/// joint Pauli pmf (`pmf[4*i + j]`), in units of `log_base` (2 for bits).
///
/// # Safety
/// `pmf` must point to 16 doubles and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn nm_non_markovianity(pmf: *const f64, log_base: f64, out: *mut f64) -> NmStatus {
    guard(|| {
        if pmf.is_null() || out.is_null() {
            return Err(null("pmf or out"));
        }
        let flat = std::slice::from_raw_parts(pmf, 16);
        let mut table = [[0.0; 4]; 4];
        for (i, row) in table.iter_mut().enumerate() {
            row.copy_from_slice(&flat[4 * i..4 * i + 4]);
        }
        let p = JointPmf::from_table(table)?;
        *out = non_markovianity(&mixed_process(&p, &prepared_state()), log_base)?;
        Ok(())
    })
}

/// Dataset generation parameters. A zero count means "exact" for
/// `samples_per_pmf` and `shots`; `n_pairs == 0` selects the ten standard
/// `(q, R)` pairs.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NmPlanParams {
    pub q: *const f64,
    pub r: *const f64,
    pub n_pairs: usize,
    pub pmfs_per_pair: usize,
    pub samples_per_pmf: usize,
    pub shots: u64,
    pub noise_eps: f64,
    pub seed: u64,
    pub log_base: f64,
    /// 0 measures X, Y, Z; 1 measures I, X, Y.
    pub measurements: u32,
}

/// Fills `out` with the standard plan: 10 pairs × 100 pmfs, 50 samples,
/// 5000 shots, no white noise, seed 0, bits, XYZ.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nm_plan_params_default(out: *mut NmPlanParams) -> NmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let d = GenerationPlan::default();
        *out = NmPlanParams {
            q: ptr::null(),
            r: ptr::null(),
            n_pairs: 0,
            pmfs_per_pair: d.pmfs_per_pair,
            samples_per_pmf: match d.sampling {
                PmfSampling::Samples(n) => n,
                PmfSampling::Exact => 0,
            },
            shots: match d.noise.shots {
                Shots::Finite(n) => n,
                Shots::Exact => 0,
            },
            noise_eps: d.noise.white_noise_eps,
            seed: d.base_seed,
            log_base: d.log_base,
            measurements: 0,
        };
        Ok(())
    })
}

unsafe fn plan_from(p: &NmPlanParams) -> Result<GenerationPlan, Fail> {
    let qr_pairs = if p.n_pairs == 0 {
        standard_pairs()
    } else {
        if p.q.is_null() || p.r.is_null() {
            return Err(null("q or r"));
        }
        let q = std::slice::from_raw_parts(p.q, p.n_pairs);
        let r = std::slice::from_raw_parts(p.r, p.n_pairs);
        q.iter().copied().zip(r.iter().copied()).collect()
    };
    let measurements = match p.measurements {
        0 => MeasurementSet::xyz(),
        1 => MeasurementSet::ixy(),
        other => return Err(Fail(NmStatus::InvalidArgument, format!("unknown measurement set {other}"))),
    };
    let d = GenerationPlan::default();
    let mut noise = d.noise;
    noise.white_noise_eps = p.noise_eps;
    noise.shots = if p.shots == 0 { Shots::Exact } else { Shots::Finite(p.shots) };
    let plan = GenerationPlan {
        qr_pairs,
        pmfs_per_pair: p.pmfs_per_pair,
        sampling: if p.samples_per_pmf == 0 { PmfSampling::Exact } else { PmfSampling::Samples(p.samples_per_pmf) },
        probe: d.probe,
        noise,
        base_seed: p.seed,
        measurements,
        log_base: p.log_base,
    };
    plan.validate()?;
    Ok(plan)
}

/// Opaque dataset handle.
pub struct NmDataset(Dataset);

/// Opaque polynomial model handle.
pub struct NmModel {
    model: PolyModel,
    feature_names: Vec<String>,
}

fn put<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// # Safety
/// `params` must be valid; `out` must be writable. The pair arrays are read
/// only during the call.
#[no_mangle]
pub unsafe extern "C" fn nm_dataset_generate(params: *const NmPlanParams, out: *mut *mut NmDataset) -> NmStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return Err(null("params or out"));
        }
        let plan = plan_from(&*params)?;
        let rows = generate_dataset(&plan)?;
        put(out, NmDataset(Dataset::new(rows, plan.measurements.feature_names())?));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nm_dataset_read_csv(path: *const c_char, out: *mut *mut NmDataset) -> NmStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, NmDataset(read_dataset(&path)?.0));
        Ok(())
    })
}

/// # Safety
/// `ds` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nm_dataset_write_csv(ds: *const NmDataset, path: *const c_char) -> NmStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        let path = path_arg(path)?;
        write_atomic(&path, &dataset_to_csv(ds.0.rows(), ds.0.feature_names())?)?;
        Ok(())
    })
}

/// Row count; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nm_dataset_len(ds: *const NmDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// Features per row; 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nm_dataset_feature_count(ds: *const NmDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.feature_count())
}

/// Copies row `index`'s features into `features[0..cap]` and its label into
/// `label`. `cap` must be at least the feature count.
///
/// # Safety
/// `ds` must be a live handle; `features` must hold `cap` doubles; `label`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn nm_dataset_row(
    ds: *const NmDataset,
    index: usize,
    features: *mut f64,
    cap: usize,
    label: *mut f64,
) -> NmStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        if features.is_null() || label.is_null() {
            return Err(null("features or label"));
        }
        let row = ds.0.rows().get(index).ok_or_else(|| Fail(NmStatus::InvalidArgument, format!("row {index} out of range")))?;
        if cap < row.features.len() {
            return Err(Fail(NmStatus::Dimension, format!("buffer holds {cap}, row has {}", row.features.len())));
        }
        std::slice::from_raw_parts_mut(features, row.features.len()).copy_from_slice(&row.features);
        *label = row.label;
        Ok(())
    })
}

/// # Safety
/// `ds` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nm_dataset_free(ds: *mut NmDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Least-squares polynomial fit over every row of `ds`.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nm_model_fit(ds: *const NmDataset, degree: usize, ridge: f64, out: *mut *mut NmModel) -> NmStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let model = train_poly(&ds.0, degree, ridge)?;
        put(out, NmModel { model, feature_names: ds.0.feature_names().to_vec() });
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle; `x` must hold `n` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_model_predict(m: *const NmModel, x: *const f64, n: usize, out: *mut f64) -> NmStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        if x.is_null() || out.is_null() {
            return Err(null("x or out"));
        }
        *out = predict(&m.model, std::slice::from_raw_parts(x, n))?;
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nm_model_save(m: *const NmModel, path: *const c_char) -> NmStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("model"))?;
        let path = path_arg(path)?;
        write_atomic(&path, serialize_model(&m.model, &m.feature_names)?.as_bytes())?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nm_model_load(path: *const c_char, out: *mut *mut NmModel) -> NmStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (model, feature_names) = parse_model(&read_text(&path)?)?;
        put(out, NmModel { model, feature_names });
        Ok(())
    })
}

/// Number of model inputs; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nm_model_input_count(m: *const NmModel) -> usize {
    m.as_ref().map_or(0, |m| m.model.n_inputs)
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nm_model_free(m: *mut NmModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}
