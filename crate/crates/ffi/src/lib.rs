//! C ABI over `cohdisp`.
//!
//! Every entry point returns a [`CohdispStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`cohdisp_last_error_message`] on the same thread. Density matrices are
//! opaque handles released with [`cohdisp_density_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cohdisp::multicopy::{kron_power, ncopy_dispersion};
use cohdisp::scan::{window_report, ScanConfig};
use cohdisp::thermal::find_tau_star;
use cohdisp::{
    dispersion_at_rank, optimal_rank, DensityMatrix, DispersionModel, Error, PsdCheck, SingleCopySummary,
    ThermalParams, C64,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CohdispStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidState = 3,
    Numerical = 4,
    FlatObjective = 5,
    Config = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CohdispModel {
    Plain = 0,
    Buffered = 1,
}

/// Opaque density matrix.
pub struct CohdispDensityMatrix {
    inner: DensityMatrix,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CohdispStats {
    pub dim: usize,
    pub mean_population: f64,
    pub predictability_sq: f64,
    pub c1: f64,
    pub c2: f64,
    pub purity: f64,
    pub dispersion: f64,
    /// In nats.
    pub rel_entropy_coherence: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CohdispOptimalRank {
    pub dim: usize,
    pub s_continuous: f64,
    pub rank: usize,
    pub dispersion: f64,
}

/// `sign * exp(ln_magnitude)`; `sign == 0` means exactly zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CohdispLogValue {
    pub sign: i8,
    pub ln_magnitude: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CohdispThermalParams {
    pub d: usize,
    pub epsilon_ev: f64,
    pub lambda: f64,
    pub n: u64,
    /// 0 means equal to `n`.
    pub total_n: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CohdispTauStar {
    pub tau_star: f64,
    pub log10_dispersion: f64,
    pub kelvin: f64,
    pub celsius: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CohdispWindow {
    pub tau_star_min: f64,
    pub tau_star_max: f64,
    pub kelvin_min: f64,
    pub kelvin_max: f64,
    pub celsius_min: f64,
    pub celsius_max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CohdispStatus {
    match e {
        Error::ShapeMismatch { .. }
        | Error::EmptyDimension
        | Error::RankOutOfRange { .. }
        | Error::DimensionTooSmall { .. }
        | Error::ParamOutOfRange { .. }
        | Error::BufferSmallerThanCoherent { .. }
        | Error::DimensionGuardExceeded { .. } => CohdispStatus::InvalidArgument,
        Error::HermiticityViolation { .. }
        | Error::TraceViolation { .. }
        | Error::PopulationOutOfRange { .. }
        | Error::NotPositiveSemidefinite { .. }
        | Error::NormalizationViolation { .. } => CohdispStatus::InvalidState,
        Error::ComplementarityViolation { .. } | Error::NegativeDispersion { .. } => CohdispStatus::Numerical,
        Error::FlatObjective => CohdispStatus::FlatObjective,
        Error::ConfigInvalid { .. } => CohdispStatus::Config,
        Error::OutputUnwritable { .. } | Error::InputUnreadable { .. } => CohdispStatus::Io,
    }
}

struct Failure(CohdispStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(CohdispStatus::NullPointer, format!("null pointer: {name}"))
}

fn guard<F>(f: F) -> CohdispStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CohdispStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("internal panic: {message}"));
            CohdispStatus::Panic
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cohdisp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a density matrix from `2 * dim * dim` doubles, row-major
/// interleaved `re, im`.
///
/// # Safety
/// `re_im` must point to `2 * dim * dim` readable doubles and `out` to a
/// writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_density_new(
    dim: usize,
    re_im: *const f64,
    check_psd: bool,
    out: *mut *mut CohdispDensityMatrix,
) -> CohdispStatus {
    guard(|| {
        if re_im.is_null() {
            return Err(null("re_im"));
        }
        let len = dim
            .checked_mul(dim)
            .and_then(|x| x.checked_mul(2))
            .ok_or_else(|| Failure(CohdispStatus::InvalidArgument, "dimension overflow".into()))?;
        let raw = std::slice::from_raw_parts(re_im, len);
        let entries = raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        let inner = DensityMatrix::new(dim, entries, PsdCheck::from(check_psd))?;
        let handle = Box::into_raw(Box::new(CohdispDensityMatrix { inner }));
        if out.is_null() {
            drop(Box::from_raw(handle));
            return Err(null("out"));
        }
        out.write(handle);
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_density_free(handle: *mut CohdispDensityMatrix) {
    if !handle.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(handle))));
    }
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_density_dim(handle: *const CohdispDensityMatrix, out: *mut usize) -> CohdispStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        write_out(out, h.inner.dim(), "out")
    })
}

/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_density_stats(
    handle: *const CohdispDensityMatrix,
    out: *mut CohdispStats,
) -> CohdispStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let s = h.inner.stats()?;
        write_out(
            out,
            CohdispStats {
                dim: s.dim,
                mean_population: s.mean_population,
                predictability_sq: s.predictability_sq,
                c1: s.c1,
                c2: s.c2,
                purity: s.purity,
                dispersion: s.dispersion,
                rel_entropy_coherence: s.rel_entropy_coherence,
            },
            "out",
        )
    })
}

/// `n`-fold tensor power as a new handle.
///
/// # Safety
/// `handle` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_density_kron_power(
    handle: *const CohdispDensityMatrix,
    n: u32,
    out: *mut *mut CohdispDensityMatrix,
) -> CohdispStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = kron_power(&h.inner, n)?;
        out.write(Box::into_raw(Box::new(CohdispDensityMatrix { inner })));
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_dispersion_at_rank(dim: usize, rank: usize, out: *mut f64) -> CohdispStatus {
    guard(|| write_out(out, dispersion_at_rank(dim, rank)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_optimal_rank(dim: usize, out: *mut CohdispOptimalRank) -> CohdispStatus {
    guard(|| {
        let r = optimal_rank(dim)?;
        write_out(
            out,
            CohdispOptimalRank {
                dim,
                s_continuous: r.s_continuous,
                rank: r.rank,
                dispersion: r.dispersion_at_rank,
            },
            "out",
        )
    })
}

/// Dispersion of `n` copies of a state with the given single-copy purity,
/// squared predictability and l1 coherence.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_ncopy_dispersion(
    dim: usize,
    purity: f64,
    predictability_sq: f64,
    c1: f64,
    n: u64,
    out: *mut CohdispLogValue,
) -> CohdispStatus {
    guard(|| {
        let summary = SingleCopySummary::new(dim, purity, predictability_sq, c1)?;
        let v = ncopy_dispersion(&summary, n)?;
        write_out(
            out,
            CohdispLogValue {
                sign: v.sign(),
                ln_magnitude: v.ln_abs(),
            },
            "out",
        )
    })
}

/// # Safety
/// `params` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_find_tau_star(
    params: *const CohdispThermalParams,
    model: CohdispModel,
    out: *mut CohdispTauStar,
) -> CohdispStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let mut tp = ThermalParams::new(p.d, p.lambda, p.n).with_epsilon(p.epsilon_ev);
        if p.total_n != 0 {
            tp = tp.with_total(p.total_n);
        }
        let model = match model {
            CohdispModel::Plain => DispersionModel::Plain,
            CohdispModel::Buffered => DispersionModel::Buffered,
        };
        let r = find_tau_star(&tp, model)?;
        write_out(
            out,
            CohdispTauStar {
                tau_star: r.tau_star,
                log10_dispersion: r.log_dispersion_at_max.log10_abs(),
                kelvin: r.kelvin,
                celsius: r.celsius,
            },
            "out",
        )
    })
}

/// Window of maximizing temperatures for the sweep in a TOML config file.
///
/// # Safety
/// `config_path` must be a NUL-terminated UTF-8 path and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cohdisp_window_report(config_path: *const c_char, out: *mut CohdispWindow) -> CohdispStatus {
    guard(|| {
        if config_path.is_null() {
            return Err(null("config_path"));
        }
        let path = CStr::from_ptr(config_path)
            .to_str()
            .map_err(|_| Failure(CohdispStatus::InvalidArgument, "config path is not UTF-8".into()))?;
        let config = ScanConfig::from_path(Path::new(path))?;
        let w = window_report(&config)?;
        write_out(
            out,
            CohdispWindow {
                tau_star_min: w.tau_star_min,
                tau_star_max: w.tau_star_max,
                kelvin_min: w.kelvin_min,
                kelvin_max: w.kelvin_max,
                celsius_min: w.celsius_min,
                celsius_max: w.celsius_max,
            },
            "out",
        )
    })
}
