//! C ABI for `sbproj`.
//!
//! Every function returns an [`SbpStatus`]. On failure a message is kept per
//! thread and can be read with [`sbp_last_error_message`]. Results are written
//! through out-pointers, which are left untouched on failure. Panics never
//! cross the boundary; they are reported as `SBP_STATUS_PANIC`.
//!
//! Vectors are `const double *` with an explicit length. Batches are
//! row-major `n × d` inputs and `n × m` outputs.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use sbproj::{bounds, moments, norms, Dataset, Error, ModelKind, ProjectionModel, Projector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    /// A bound was queried outside the range where it holds.
    OutOfDomain = 3,
    DimensionMismatch = 4,
    NonFinite = 5,
    Panic = 6,
    Other = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbpModel {
    Bernoulli = 0,
    Fixed = 1,
    Gaussian = 2,
    Achlioptas = 3,
    Ping = 4,
    Bourgain = 5,
}

/// Opaque projector handle.
pub struct SbpProjector {
    inner: Projector,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> SbpStatus {
    match e {
        Error::Parameter(_) | Error::Config(_) => SbpStatus::InvalidParameter,
        Error::Domain(_) => SbpStatus::OutOfDomain,
        Error::Dimension { .. } => SbpStatus::DimensionMismatch,
        Error::NonFinite { .. } => SbpStatus::NonFinite,
        _ => SbpStatus::Other,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SbpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SbpStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SbpStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SbpStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn input<'a>(ptr: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

/// # Safety
/// `ptr` must be null or valid for `len` writes.
unsafe fn output<'a>(ptr: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

/// # Safety
/// `out` must be null or valid for one write.
unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sbp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sbp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Draws a projection matrix. `p` is read for Bernoulli only and `c` for
/// fixed and Bourgain only.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn sbp_projector_new(
    model: SbpModel,
    d: usize,
    m: usize,
    p: f64,
    c: usize,
    seed: u64,
    out: *mut *mut SbpProjector,
) -> SbpStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let kind = match model {
            SbpModel::Bernoulli => ModelKind::Bernoulli { p },
            SbpModel::Fixed => ModelKind::FixedSparsity { c },
            SbpModel::Gaussian => ModelKind::Gaussian,
            SbpModel::Achlioptas => ModelKind::Achlioptas,
            SbpModel::Ping => ModelKind::Ping,
            SbpModel::Bourgain => ModelKind::Bourgain { c },
        };
        let inner = ProjectionModel::new(kind, d, m, seed)?.materialize()?;
        put(out, Box::into_raw(Box::new(SbpProjector { inner })))
    })
}

/// Releases a projector. Null is ignored.
///
/// # Safety
/// `handle` must come from [`sbp_projector_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sbp_projector_free(handle: *mut SbpProjector) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live projector; `d` and `m` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn sbp_projector_dims(handle: *const SbpProjector, d: *mut usize, m: *mut usize) -> SbpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Failure::Null("handle"))?;
        if d.is_null() || m.is_null() {
            return Err(Failure::Null("d/m"));
        }
        put(d, h.inner.d())?;
        put(m, h.inner.m())
    })
}

/// Projects one vector of length `d` into `out` of length `m`.
///
/// # Safety
/// `x` valid for `x_len` reads, `out` for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn sbp_project(
    handle: *const SbpProjector,
    x: *const f64,
    x_len: usize,
    out: *mut f64,
    out_len: usize,
) -> SbpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Failure::Null("handle"))?;
        let x = input(x, x_len, "x")?;
        let out = output(out, out_len, "out")?;
        h.inner.project_into(x, out)?;
        Ok(())
    })
}

/// Projects `n` row-major vectors; `out` receives `n·m` values.
///
/// # Safety
/// `x` valid for `n·d` reads, `out` for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn sbp_project_batch(
    handle: *const SbpProjector,
    x: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
) -> SbpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or(Failure::Null("handle"))?;
        let (d, m) = (h.inner.d(), h.inner.m());
        let len = n.checked_mul(d).ok_or_else(|| Error::Parameter("n·d overflows".into()))?;
        let want = n.checked_mul(m).ok_or_else(|| Error::Parameter("n·m overflows".into()))?;
        if out_len != want {
            return Err(Error::Dimension { expected: want, found: out_len }.into());
        }
        let x = input(x, len, "x")?;
        let out = output(out, out_len, "out")?;
        let projected = h.inner.project_batch(&Dataset::new(n, d, x.to_vec())?)?;
        out.copy_from_slice(projected.as_slice());
        Ok(())
    })
}

/// Centering constant `q` of the fixed-sparsity model.
///
/// # Safety
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_fixed_q(d: usize, c: usize, out: *mut f64) -> SbpStatus {
    guard(|| put(out, norms::fixed_q(d, c)?))
}

/// Variance of `‖η‖²` under the centered Bernoulli model.
///
/// # Safety
/// `x` valid for `len` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_var_bernoulli(x: *const f64, len: usize, m: usize, p: f64, out: *mut f64) -> SbpStatus {
    guard(|| put(out, moments::var_bernoulli(input(x, len, "x")?, m, p)?))
}

/// Variance of `‖η‖²` under the centered fixed-sparsity model (`d = len`).
///
/// # Safety
/// `x` valid for `len` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_var_fixed(x: *const f64, len: usize, m: usize, c: usize, out: *mut f64) -> SbpStatus {
    guard(|| put(out, moments::var_fixed(input(x, len, "x")?, m, len, c)?))
}

/// # Safety
/// `x` valid for `len` reads, `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_var_gaussian(x: *const f64, len: usize, m: usize, out: *mut f64) -> SbpStatus {
    guard(|| put(out, moments::var_gaussian(input(x, len, "x")?, m)?))
}

/// # Safety
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_min_m_bernoulli(n: u64, eps: f64, p: f64, out: *mut u64) -> SbpStatus {
    guard(|| put(out, bounds::min_m_bernoulli(n, eps, p)?))
}

/// # Safety
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_min_m_fixed(n: u64, eps: f64, d: usize, c: usize, out: *mut u64) -> SbpStatus {
    guard(|| put(out, bounds::min_m_fixed(n, eps, d, c)?))
}

/// # Safety
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_bernoulli_two_sided(eps: f64, m: usize, d: usize, p: f64, out: *mut f64) -> SbpStatus {
    guard(|| put(out, bounds::bernoulli_two_sided(eps, m, d, p)?))
}

/// # Safety
/// `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn sbp_fixed_two_sided(eps: f64, m: usize, d: usize, c: usize, out: *mut f64) -> SbpStatus {
    guard(|| put(out, bounds::fixed_two_sided(eps, m, d, c)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn panics_become_status() {
        let st = guard(|| panic!("boom"));
        assert_eq!(st, SbpStatus::Panic);
        let msg = unsafe { CStr::from_ptr(sbp_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("boom"));
    }

    #[test]
    fn version_is_terminated() {
        let v = unsafe { CStr::from_ptr(sbp_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
