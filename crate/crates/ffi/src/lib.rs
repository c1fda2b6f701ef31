//! C interface to the solver side of smlab: grids, spatial fields, the map
//! energy and the Picard solver.
//!
//! Every handle is created by a `smlab_*_new`-style call and released by the
//! matching `*_free`. Functions return an [`SmlabStatus`]; results go
//! through out-pointers.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use smlab::error::Error;
use smlab::solver::{energy, energy_drift, picard_solve, MapState, NonlinearSign, Outcome, Solution, SolverConfig};
use smlab::spectral::{GridSpec, SpatialField};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    /// Data too large: the sup norm reached 1 or the smallness gate failed.
    Inadmissible = 4,
    /// Grids of two arguments disagree.
    Mismatch = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmlabOutcome {
    Converged = 0,
    MaxIterations = 1,
    Diverged = 2,
}

/// Solver settings. Obtain defaults from `smlab_solver_config_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmlabSolverConfig {
    pub s: f64,
    pub t_horizon: f64,
    pub ramp: f64,
    pub k_max: usize,
    pub tol: f64,
    pub series_order: usize,
    pub exact_q: bool,
    /// Use the σ = +1 nonlinearity instead of the energy-conserving one.
    pub printed_sign: bool,
}

impl From<SmlabSolverConfig> for SolverConfig {
    fn from(c: SmlabSolverConfig) -> Self {
        SolverConfig {
            s: c.s,
            t_horizon: c.t_horizon,
            ramp: c.ramp,
            k_max: c.k_max,
            tol: c.tol,
            series_order: c.series_order,
            exact_q: c.exact_q,
            sign: if c.printed_sign { NonlinearSign::Printed } else { NonlinearSign::Geometric },
            ..Default::default()
        }
    }
}

/// Space-time grid: dimension n, M spatial points per axis, K time points.
pub struct SmlabGrid(GridSpec);

/// Complex field on the spatial part of a grid.
pub struct SmlabField(SpatialField);

/// Result of a Picard solve.
pub struct SmlabSolution {
    sol: Solution,
    cfg: SolverConfig,
}

fn status_of(e: &Error) -> SmlabStatus {
    match e {
        Error::InvalidGrid(_) => SmlabStatus::InvalidGrid,
        Error::SupNorm { .. } | Error::Inadmissible(_) => SmlabStatus::Inadmissible,
        Error::Mismatch(_) => SmlabStatus::Mismatch,
        Error::InvalidArgument(_) | Error::Config(_) | Error::OutOfRange(_) | Error::Parse(_) => {
            SmlabStatus::InvalidArgument
        }
        Error::Truncation(_) | Error::Io(_) => SmlabStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> SmlabStatus) -> SmlabStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(SmlabStatus::Internal)
}

fn emit<T>(out: *mut *mut T, value: T) -> SmlabStatus {
    // SAFETY: callers check `out` for null before building the value
    unsafe { *out = Box::into_raw(Box::new(value)) };
    SmlabStatus::Ok
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn smlab_status_message(status: SmlabStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        SmlabStatus::Ok => b"ok\0",
        SmlabStatus::NullPointer => b"null pointer argument\0",
        SmlabStatus::InvalidArgument => b"invalid argument\0",
        SmlabStatus::InvalidGrid => b"invalid grid\0",
        SmlabStatus::Inadmissible => b"data outside the small-data regime\0",
        SmlabStatus::Mismatch => b"grids disagree\0",
        SmlabStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn smlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a grid.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle. On
/// success the handle must be released with `smlab_grid_free`.
#[no_mangle]
pub unsafe extern "C" fn smlab_grid_new(n: usize, m: usize, k: usize, out: *mut *mut SmlabGrid) -> SmlabStatus {
    if out.is_null() {
        return SmlabStatus::NullPointer;
    }
    guard(|| match GridSpec::new(n, m, k) {
        Ok(g) => emit(out, SmlabGrid(g)),
        Err(e) => status_of(&e),
    })
}

/// Release a grid. Null is ignored.
///
/// # Safety
/// `grid` must be null or a handle from `smlab_grid_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn smlab_grid_free(grid: *mut SmlabGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of spatial points, M^n; the length of field value arrays.
///
/// # Safety
/// `grid` must be a live grid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_grid_spatial_len(grid: *const SmlabGrid, out: *mut usize) -> SmlabStatus {
    if grid.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    *out = (*grid).0.spatial_len();
    SmlabStatus::Ok
}

/// Field from point values in row-major order (last axis fastest).
///
/// # Safety
/// `grid` must be a live grid handle. `re` and `im` must each point to
/// `len` readable doubles. `out` must be writable; the handle it receives
/// must be released with `smlab_field_free`.
#[no_mangle]
pub unsafe extern "C" fn smlab_field_new(
    grid: *const SmlabGrid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut SmlabField,
) -> SmlabStatus {
    if grid.is_null() || re.is_null() || im.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    let g = (*grid).0;
    if len != g.spatial_len() {
        return SmlabStatus::InvalidArgument;
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = std::slice::from_raw_parts(im, len);
    guard(|| {
        let values = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        match SpatialField::from_values(g, values) {
            Ok(f) => emit(out, SmlabField(f)),
            Err(e) => status_of(&e),
        }
    })
}

/// The plane wave amplitude·e^{i x·ξ}.
///
/// # Safety
/// `grid` must be a live grid handle, `xi` must point to `n` readable
/// integers with `n` the grid dimension, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_field_plane_wave(
    grid: *const SmlabGrid,
    xi: *const i64,
    n: usize,
    amplitude: f64,
    out: *mut *mut SmlabField,
) -> SmlabStatus {
    if grid.is_null() || xi.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    let g = (*grid).0;
    if n != g.n() || !amplitude.is_finite() {
        return SmlabStatus::InvalidArgument;
    }
    let xi: Vec<f64> = std::slice::from_raw_parts(xi, n).iter().map(|v| *v as f64).collect();
    guard(|| {
        let f = SpatialField::from_fn(g, |x| Complex64::from_polar(amplitude, x.iter().zip(&xi).map(|(a, b)| a * b).sum()));
        emit(out, SmlabField(f))
    })
}

/// Release a field. Null is ignored.
///
/// # Safety
/// `field` must be null or a field handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn smlab_field_free(field: *mut SmlabField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// ‖f‖_{H^s}.
///
/// # Safety
/// `field` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_field_hs_norm(field: *const SmlabField, s: f64, out: *mut f64) -> SmlabStatus {
    if field.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    let f = &(*field).0;
    guard(|| {
        *out = f.hs_norm(s);
        SmlabStatus::Ok
    })
}

/// Map energy ½∫|∇z|²/(1+|z|²)² dx.
///
/// # Safety
/// `field` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_field_energy(field: *const SmlabField, out: *mut f64) -> SmlabStatus {
    if field.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    let f = &(*field).0;
    guard(|| {
        *out = energy(&MapState::new(f.clone()));
        SmlabStatus::Ok
    })
}

#[no_mangle]
pub extern "C" fn smlab_solver_config_default() -> SmlabSolverConfig {
    let d = SolverConfig::default();
    SmlabSolverConfig {
        s: d.s,
        t_horizon: d.t_horizon,
        ramp: d.ramp,
        k_max: d.k_max,
        tol: d.tol,
        series_order: d.series_order,
        exact_q: d.exact_q,
        printed_sign: d.sign == NonlinearSign::Printed,
    }
}

/// Solve with data `u0` on the space-time grid `grid`. A run that stops
/// without converging still returns a solution; inspect its outcome.
///
/// # Safety
/// `u0` and `grid` must be live handles, `cfg` must point to a readable
/// config and `out` must be writable. The solution must be released with
/// `smlab_solution_free`.
#[no_mangle]
pub unsafe extern "C" fn smlab_solve(
    u0: *const SmlabField,
    grid: *const SmlabGrid,
    cfg: *const SmlabSolverConfig,
    out: *mut *mut SmlabSolution,
) -> SmlabStatus {
    if u0.is_null() || grid.is_null() || cfg.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    let (f, g, c) = (&(*u0).0, (*grid).0, SolverConfig::from(*cfg));
    guard(|| match picard_solve(f, g, &c) {
        Ok(sol) => emit(out, SmlabSolution { sol, cfg: c }),
        Err(e) => status_of(&e),
    })
}

/// Release a solution. Null is ignored.
///
/// # Safety
/// `sol` must be null or a solution handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn smlab_solution_free(sol: *mut SmlabSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// How the iteration ended.
///
/// # Safety
/// `sol` must be a live solution handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_solution_outcome(sol: *const SmlabSolution, out: *mut SmlabOutcome) -> SmlabStatus {
    if sol.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    *out = match (*sol).sol.outcome {
        Outcome::Converged { .. } => SmlabOutcome::Converged,
        Outcome::MaxIterations => SmlabOutcome::MaxIterations,
        Outcome::Diverged { .. } => SmlabOutcome::Diverged,
    };
    SmlabStatus::Ok
}

/// Number of recorded iterations.
///
/// # Safety
/// `sol` must be a live solution handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_solution_iterations(sol: *const SmlabSolution, out: *mut usize) -> SmlabStatus {
    if sol.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    *out = (*sol).sol.trace.entries.len();
    SmlabStatus::Ok
}

/// sup_t ‖u_k − u_{k−1}‖_{H^s} of iteration `index` (0-based).
///
/// # Safety
/// `sol` must be a live solution handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_solution_difference(sol: *const SmlabSolution, index: usize, out: *mut f64) -> SmlabStatus {
    if sol.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    let entries = &(*sol).sol.trace.entries;
    match entries.get(index) {
        Some(e) => {
            *out = e.difference;
            SmlabStatus::Ok
        }
        None => SmlabStatus::InvalidArgument,
    }
}

/// Residual of the truncated equation; NaN after divergence.
///
/// # Safety
/// `sol` must be a live solution handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_solution_residual(sol: *const SmlabSolution, out: *mut f64) -> SmlabStatus {
    if sol.is_null() || out.is_null() {
        return SmlabStatus::NullPointer;
    }
    *out = (*sol).sol.residual;
    SmlabStatus::Ok
}

/// Energy drift over |t| ≤ t_horizon. `relative` receives NaN when the
/// initial energy is zero.
///
/// # Safety
/// `sol` must be a live solution handle; `absolute` and `relative` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn smlab_solution_energy_drift(
    sol: *const SmlabSolution,
    absolute: *mut f64,
    relative: *mut f64,
) -> SmlabStatus {
    if sol.is_null() || absolute.is_null() || relative.is_null() {
        return SmlabStatus::NullPointer;
    }
    let s = &*sol;
    guard(|| {
        let d = energy_drift(&s.sol.u, &s.cfg);
        *absolute = d.absolute;
        *relative = d.relative.unwrap_or(f64::NAN);
        SmlabStatus::Ok
    })
}
