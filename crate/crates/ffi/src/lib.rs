//! C ABI over the `jetbundle` engine.
//!
//! Conventions:
//! - Every fallible function returns a [`JbStatus`]. On failure, a message
//!   is available from [`jb_last_error_message`] on the same thread.
//! - Jets are flat row-major `f64` buffers: `x` has `dim` entries, and
//!   `xi`/`z` have `order * dim` entries with level `i` at offset `(i-1) * dim`.
//! - Handles are opaque and must be released with their `*_free` function.
//! - Charts are small integers: 0 is the primary chart and 1 the partner.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::slice;

use jetbundle::atlas::{ChartId, Fixture, FixtureKind, FixtureMetric, FixtureParams, LeviCivita};
use jetbundle::cli::{run_verify, OutputFormat, RunConfig};
use jetbundle::connection::ConnectionComponents;
use jetbundle::jets::CurveJet;
use jetbundle::lifts::metric_lift;
use jetbundle::linearize::{detrivialize, linear_transition, trivialize, LinearizedVector};
use jetbundle::osculating::natural_transition;
use jetbundle::Error;

/// Result codes for every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    OrderUnavailable = 4,
    OutsideOverlap = 5,
    NoOverlap = 6,
    UnknownFixture = 7,
    Singular = 8,
    Config = 9,
    Io = 10,
    ChecksFailed = 11,
    Internal = 12,
}

/// Output format for [`jb_run_verify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JbFormat {
    Tree = 0,
    Table = 1,
}

/// A built-in manifold: atlas plus metric.
pub struct JbFixture {
    inner: Fixture,
}

/// Connection components of the fixture's Levi-Civita connection up to a fixed order.
pub struct JbComponents {
    fixture: Fixture,
    components: ConnectionComponents<LeviCivita<FixtureMetric>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> JbStatus {
    match e {
        Error::DimensionMismatch { .. } => JbStatus::DimensionMismatch,
        Error::OrderMismatch { .. } | Error::OrderUnavailable { .. } => JbStatus::OrderUnavailable,
        Error::OutsideOverlap { .. } => JbStatus::OutsideOverlap,
        Error::NoOverlap(..) | Error::NoOverlapAvailable | Error::UnknownChart(_) => {
            JbStatus::NoOverlap
        }
        Error::UnknownFixture(_) => JbStatus::UnknownFixture,
        Error::SingularMetric | Error::DegenerateLagrangian => JbStatus::Singular,
        Error::Config { .. } => JbStatus::Config,
        Error::Io(_) => JbStatus::Io,
        _ => JbStatus::InvalidArgument,
    }
}

struct Failure(JbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(JbStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> JbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            JbStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            JbStatus::Internal
        }
    }
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure(JbStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn levels(flat: &[f64], dim: usize) -> Vec<Vec<f64>> {
    flat.chunks(dim).map(<[f64]>::to_vec).collect()
}

fn check_shape(dim: usize, order: usize, expected_dim: usize) -> Result<(), Failure> {
    if dim != expected_dim {
        return Err(Error::DimensionMismatch {
            expected: expected_dim,
            found: dim,
        }
        .into());
    }
    if order == 0 {
        return Err(Failure(
            JbStatus::InvalidArgument,
            "order must be at least 1".into(),
        ));
    }
    Ok(())
}

unsafe fn read_jet(
    chart: u8,
    x: *const f64,
    xi: *const f64,
    dim: usize,
    order: usize,
) -> Result<CurveJet, Failure> {
    let x = input(x, dim, "x")?;
    let xi = input(xi, dim * order, "xi")?;
    Ok(CurveJet::new(ChartId(chart), x.to_vec(), levels(xi, dim))?)
}

fn write_levels(out: &mut [f64], rows: &[Vec<f64>]) {
    for (dst, v) in out.iter_mut().zip(rows.iter().flatten()) {
        *dst = *v;
    }
}

/// Message for the most recent failure on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn jb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Builds a fixture by name (`flat_poly`, `exp_metric_1d`, `sphere_stereo`).
/// `config_path` may be NULL; otherwise it names a `key = value` override file.
///
/// # Safety
/// `name` must be a NUL-terminated string; `config_path` NULL or NUL-terminated;
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jb_fixture_new(
    name: *const c_char,
    config_path: *const c_char,
    out: *mut *mut JbFixture,
) -> JbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind: FixtureKind = text(name, "name")?.parse()?;
        let params = if config_path.is_null() {
            FixtureParams::defaults(kind)
        } else {
            FixtureParams::from_file(kind, &PathBuf::from(text(config_path, "config_path")?))?
        };
        let inner = Fixture::new(kind, params)?;
        *out = Box::into_raw(Box::new(JbFixture { inner }));
        Ok(())
    })
}

/// # Safety
/// `fixture` must be NULL or a handle from [`jb_fixture_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jb_fixture_free(fixture: *mut JbFixture) {
    if !fixture.is_null() {
        drop(Box::from_raw(fixture));
    }
}

/// Manifold dimension, or 0 for a NULL handle.
///
/// # Safety
/// `fixture` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jb_fixture_dim(fixture: *const JbFixture) -> usize {
    fixture.as_ref().map_or(0, |f| f.inner.dim())
}

/// Writes the chart overlapping the primary chart into `out_chart`
/// ([`JbStatus::NoOverlap`] for single-chart fixtures).
///
/// # Safety
/// `fixture` must be a live handle and `out_chart` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jb_fixture_partner_chart(
    fixture: *const JbFixture,
    out_chart: *mut u8,
) -> JbStatus {
    guard(|| {
        let f = fixture.as_ref().ok_or_else(|| null("fixture"))?;
        let out = out_chart.as_mut().ok_or_else(|| null("out_chart"))?;
        *out = f.inner.partner_chart().ok_or(Error::NoOverlapAvailable)?.0;
        Ok(())
    })
}

/// Transports an order-`order` jet at `(x, xi)` in `chart` to `target`,
/// writing `dim` entries to `out_x` and `order * dim` to `out_xi`.
///
/// # Safety
/// Buffers must hold the documented number of entries.
#[no_mangle]
pub unsafe extern "C" fn jb_natural_transition(
    fixture: *const JbFixture,
    chart: u8,
    target: u8,
    x: *const f64,
    xi: *const f64,
    dim: usize,
    order: usize,
    out_x: *mut f64,
    out_xi: *mut f64,
) -> JbStatus {
    guard(|| {
        let f = fixture.as_ref().ok_or_else(|| null("fixture"))?;
        check_shape(dim, order, f.inner.dim())?;
        let jet = read_jet(chart, x, xi, dim, order)?;
        let out_x = output(out_x, dim, "out_x")?;
        let out_xi = output(out_xi, dim * order, "out_xi")?;
        let moved = natural_transition(f.inner.manifold(), &jet, ChartId(target))?;
        out_x.copy_from_slice(moved.x());
        write_levels(out_xi, moved.xi());
        Ok(())
    })
}

/// Induces connection components up to `order` from the fixture's metric.
///
/// # Safety
/// `fixture` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jb_components_new(
    fixture: *const JbFixture,
    order: usize,
    out: *mut *mut JbComponents,
) -> JbStatus {
    guard(|| {
        let f = fixture.as_ref().ok_or_else(|| null("fixture"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let components = ConnectionComponents::induce(f.inner.connection(), order)?;
        *out = Box::into_raw(Box::new(JbComponents {
            fixture: f.inner.clone(),
            components,
        }));
        Ok(())
    })
}

/// # Safety
/// `components` must be NULL or a handle from [`jb_components_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jb_components_free(components: *mut JbComponents) {
    if !components.is_null() {
        drop(Box::from_raw(components));
    }
}

/// Highest level held by the handle, or 0 for NULL.
///
/// # Safety
/// `components` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jb_components_order(components: *const JbComponents) -> usize {
    components.as_ref().map_or(0, |c| c.components.order())
}

/// Linearizing coordinates `z` (`order * dim` entries) of the jet `(x, xi)`.
///
/// # Safety
/// Buffers must hold the documented number of entries.
#[no_mangle]
pub unsafe extern "C" fn jb_trivialize(
    components: *const JbComponents,
    chart: u8,
    x: *const f64,
    xi: *const f64,
    dim: usize,
    order: usize,
    out_z: *mut f64,
) -> JbStatus {
    guard(|| {
        let c = components.as_ref().ok_or_else(|| null("components"))?;
        check_shape(dim, order, c.components.dim())?;
        let jet = read_jet(chart, x, xi, dim, order)?;
        let out = output(out_z, dim * order, "out_z")?;
        write_levels(out, trivialize(&c.components, &jet)?.z());
        Ok(())
    })
}

/// Inverse of [`jb_trivialize`]: recovers `xi` from `(x, z)`.
///
/// # Safety
/// Buffers must hold the documented number of entries.
#[no_mangle]
pub unsafe extern "C" fn jb_detrivialize(
    components: *const JbComponents,
    chart: u8,
    x: *const f64,
    z: *const f64,
    dim: usize,
    order: usize,
    out_xi: *mut f64,
) -> JbStatus {
    guard(|| {
        let c = components.as_ref().ok_or_else(|| null("components"))?;
        check_shape(dim, order, c.components.dim())?;
        let x = input(x, dim, "x")?;
        let z = input(z, dim * order, "z")?;
        let out = output(out_xi, dim * order, "out_xi")?;
        let lv = LinearizedVector::new(ChartId(chart), x.to_vec(), levels(z, dim))?;
        write_levels(out, detrivialize(&c.components, &lv)?.xi());
        Ok(())
    })
}

/// Transition of linearized coordinates `(x, z)` from `chart` to `target`.
///
/// # Safety
/// Buffers must hold the documented number of entries.
#[no_mangle]
pub unsafe extern "C" fn jb_linear_transition(
    components: *const JbComponents,
    chart: u8,
    target: u8,
    x: *const f64,
    z: *const f64,
    dim: usize,
    order: usize,
    out_x: *mut f64,
    out_z: *mut f64,
) -> JbStatus {
    guard(|| {
        let c = components.as_ref().ok_or_else(|| null("components"))?;
        check_shape(dim, order, c.components.dim())?;
        let x = input(x, dim, "x")?;
        let z = input(z, dim * order, "z")?;
        let out_x = output(out_x, dim, "out_x")?;
        let out_z = output(out_z, dim * order, "out_z")?;
        let lv = LinearizedVector::new(ChartId(chart), x.to_vec(), levels(z, dim))?;
        let moved = linear_transition(c.fixture.manifold(), &c.components, &lv, ChartId(target))?;
        out_x.copy_from_slice(moved.x());
        write_levels(out_z, moved.z());
        Ok(())
    })
}

/// Lifted metric of two jets over the same base point `x`.
///
/// # Safety
/// Buffers must hold the documented number of entries.
#[no_mangle]
pub unsafe extern "C" fn jb_metric_lift(
    components: *const JbComponents,
    chart: u8,
    x: *const f64,
    xi1: *const f64,
    xi2: *const f64,
    dim: usize,
    order: usize,
    out_value: *mut f64,
) -> JbStatus {
    guard(|| {
        let c = components.as_ref().ok_or_else(|| null("components"))?;
        check_shape(dim, order, c.components.dim())?;
        let out = out_value.as_mut().ok_or_else(|| null("out_value"))?;
        let j1 = read_jet(chart, x, xi1, dim, order)?;
        let j2 = read_jet(chart, x, xi2, dim, order)?;
        *out = metric_lift(c.fixture.metric(), &c.components, &j1, &j2)?;
        Ok(())
    })
}

/// Runs the verification suite and writes the rendered report (without
/// timing) to `out_report`, to be released with [`jb_string_free`].
/// A report is produced even when checks fail; the status is then
/// [`JbStatus::ChecksFailed`].
///
/// # Safety
/// `fixture` must be NUL-terminated and `out_report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jb_run_verify(
    fixture: *const c_char,
    order: usize,
    samples: usize,
    seed: u64,
    negative_control: bool,
    format: JbFormat,
    out_report: *mut *mut c_char,
) -> JbStatus {
    let mut all_passed = true;
    let status = guard(|| {
        if out_report.is_null() {
            return Err(null("out_report"));
        }
        let cfg = RunConfig {
            fixture: text(fixture, "fixture")?.to_string(),
            order,
            samples,
            seed,
            negative_control,
            ..RunConfig::default()
        };
        let report = run_verify(&cfg)?;
        all_passed = report.passed;
        let format = match format {
            JbFormat::Tree => OutputFormat::Tree,
            JbFormat::Table => OutputFormat::Table,
        };
        let body = CString::new(report.render_body(format)).expect("report has no nul bytes");
        *out_report = body.into_raw();
        Ok(())
    });
    if status == JbStatus::Ok && !all_passed {
        set_last_error("one or more checks failed".into());
        return JbStatus::ChecksFailed;
    }
    status
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn jb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
