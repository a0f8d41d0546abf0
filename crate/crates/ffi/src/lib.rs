//! C ABI over `tvdlab`.
//!
//! Fields and dual results are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! `TvdlabStatus`; on failure the message is kept per thread and can be read
//! with `tvdlab_last_error`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tvdlab::dual::{tv_dual, DualTvParams, DualTvResult};
use tvdlab::shape::DEFAULT_QUAD_ORDER;
use tvdlab::{project_cell_averages, Bounds, CellField, Error, Grid, ShapeKind};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TvdlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The dual solve stopped at `max_iter`; the result handle is still set.
    NotConverged = 3,
    Io = 4,
    NonFinite = 5,
    Panic = 6,
}

/// Opaque cell-average field.
pub struct TvdlabField(CellField);

/// Opaque dual TV result.
pub struct TvdlabDualResult(DualTvResult);

/// Dual solver parameters. Fill with `tvdlab_dual_params_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TvdlabDualParams {
    pub mu: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub feas_tol: f64,
    pub max_iter: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TvdlabStatus {
    match e {
        Error::Io(_) | Error::Parse { .. } => TvdlabStatus::Io,
        Error::NonFiniteField { .. } | Error::DualNonFinite { .. } | Error::NonFiniteRate { .. } => {
            TvdlabStatus::NonFinite
        }
        _ => TvdlabStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<TvdlabStatus, (TvdlabStatus, String)>>(f: F) -> TvdlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            TvdlabStatus::Panic
        }
    }
}

fn lift<T>(r: tvdlab::Result<T>) -> Result<T, (TvdlabStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TvdlabStatus, String) {
    (TvdlabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn field_ref<'a>(f: *const TvdlabField) -> Result<&'a CellField, (TvdlabStatus, String)> {
    f.as_ref().map(|f| &f.0).ok_or_else(|| null("field"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (TvdlabStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (TvdlabStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let k = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, k);
            *buf.add(k) = 0;
        }
        msg.len()
    })
}

/// Builds a field from `n * n` cell averages in row-major `(i, j)` order,
/// `i` along x.
///
/// # Safety
/// `values` must be valid for `len` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_field_new(
    n: usize,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut TvdlabField,
) -> TvdlabStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = lift(Grid::new(n, Bounds::new(xmin, xmax, ymin, ymax)))?;
        let vals = std::slice::from_raw_parts(values, len).to_vec();
        let field = lift(CellField::from_values(grid, vals))?;
        *out = Box::into_raw(Box::new(TvdlabField(field)));
        Ok(TvdlabStatus::Ok)
    })
}

/// Projects a named shape (`gaussian`, `square_pulse`, ...) onto cell
/// averages.
///
/// # Safety
/// `shape` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_field_project(
    shape: *const c_char,
    n: usize,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    out: *mut *mut TvdlabField,
) -> TvdlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind: ShapeKind = lift(c_str(shape, "shape")?.parse())?;
        let grid = lift(Grid::new(n, Bounds::new(xmin, xmax, ymin, ymax)))?;
        let field = lift(project_cell_averages(&kind.default_spec(), &grid, DEFAULT_QUAD_ORDER))?;
        *out = Box::into_raw(Box::new(TvdlabField(field)));
        Ok(TvdlabStatus::Ok)
    })
}

/// Reads a field file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_field_read(
    path: *const c_char,
    out: *mut *mut TvdlabField,
) -> TvdlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = c_str(path, "path")?;
        let field = lift(CellField::read_file(Path::new(p)))?;
        *out = Box::into_raw(Box::new(TvdlabField(field)));
        Ok(TvdlabStatus::Ok)
    })
}

/// Cells per side, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_field_n(field: *const TvdlabField) -> usize {
    field.as_ref().map_or(0, |f| f.0.n())
}

/// Copies the `n * n` values into `buf`.
///
/// # Safety
/// `field` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_field_values(
    field: *const TvdlabField,
    buf: *mut f64,
    len: usize,
) -> TvdlabStatus {
    guard(|| {
        let f = field_ref(field)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let v = f.values();
        if len < v.len() {
            return Err((
                TvdlabStatus::InvalidArgument,
                format!("buffer holds {len} values, need {}", v.len()),
            ));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, v.len());
        Ok(TvdlabStatus::Ok)
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_field_free(field: *mut TvdlabField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Anisotropic TV.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_tv_aniso(field: *const TvdlabField, out: *mut f64) -> TvdlabStatus {
    guard(|| {
        let f = field_ref(field)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = tvdlab::tv_anisotropic(f);
        Ok(TvdlabStatus::Ok)
    })
}

/// Isotropic TV.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_tv_iso(field: *const TvdlabField, out: *mut f64) -> TvdlabStatus {
    guard(|| {
        let f = field_ref(field)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = tvdlab::tv_isotropic(f);
        Ok(TvdlabStatus::Ok)
    })
}

/// Default parameters for an `n x n` grid.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_dual_params_default(n: usize, out: *mut TvdlabDualParams) -> TvdlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = DualTvParams::for_grid(n);
        *out = TvdlabDualParams {
            mu: p.mu,
            gamma: p.gamma,
            epsilon: p.epsilon,
            feas_tol: p.feas_tol,
            max_iter: p.max_iter as u64,
        };
        Ok(TvdlabStatus::Ok)
    })
}

/// Dual TV. `params` may be null for the grid defaults. Returns
/// `NotConverged` with `*out` set when the iteration cap was hit.
///
/// # Safety
/// `field` must be a live handle, `params` null or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_tv_dual(
    field: *const TvdlabField,
    params: *const TvdlabDualParams,
    out: *mut *mut TvdlabDualResult,
) -> TvdlabStatus {
    guard(|| {
        let f = field_ref(field)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut p = DualTvParams::for_grid(f.n());
        if let Some(c) = params.as_ref() {
            p.mu = c.mu;
            p.gamma = c.gamma;
            p.epsilon = c.epsilon;
            p.feas_tol = c.feas_tol;
            p.max_iter = usize::try_from(c.max_iter).unwrap_or(usize::MAX);
        }
        let r = lift(tv_dual(f, &p))?;
        let converged = r.converged;
        *out = Box::into_raw(Box::new(TvdlabDualResult(r)));
        if converged {
            Ok(TvdlabStatus::Ok)
        } else {
            set_error("dual solve reached max_iter".into());
            Ok(TvdlabStatus::NotConverged)
        }
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_dual_value(r: *const TvdlabDualResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.value)
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_dual_iterations(r: *const TvdlabDualResult) -> u64 {
    r.as_ref().map_or(0, |r| r.0.iterations as u64)
}

/// `max |F v - D U|` at exit.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_dual_residual(r: *const TvdlabDualResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.0.feasibility_residual)
}

/// 1 if converged, else 0.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_dual_converged(r: *const TvdlabDualResult) -> i32 {
    r.as_ref().map_or(0, |r| r.0.converged as i32)
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tvdlab_dual_free(r: *mut TvdlabDualResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
