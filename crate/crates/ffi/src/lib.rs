//! C interface to `awi_core`.
//!
//! Every function returns an [`AwiStatus`]; on failure a description is kept
//! per thread and can be copied out with [`awi_last_error`]. Catalogs are
//! opaque handles owned by the caller and released with [`awi_catalog_free`].
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{CStr, c_char};
use std::panic::{AssertUnwindSafe, catch_unwind};
use std::ptr;

use awi_core::config::{DriveStrength, Resolved, RunConfig};
use awi_core::doppler::velocity_average;
use awi_core::steady::{populations_for_drive, spectrum_scan};
use awi_core::threshold::{GainSearch, ThresholdKind, VaporCell, find_threshold, minimize_threshold, optimize_gain};
use awi_core::{Error, SpeciesCatalog};

/// Opaque species catalog.
pub struct AwiCatalog(SpeciesCatalog);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    UnknownSpecies = 5,
    /// A solve or search failed to converge, or the system is singular.
    Numerical = 6,
    /// The requested threshold or gain does not exist.
    NotFound = 7,
    Panic = 8,
}

/// Cell conditions. `species` and `buffer` are NUL-terminated names.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AwiConditions {
    pub species: *const c_char,
    pub buffer: *const c_char,
    pub pressure_torr: f64,
    pub temperature_k: f64,
    pub chi_raman: f64,
}

/// Rates in s^-1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AwiRates {
    pub a21: f64,
    pub a31: f64,
    pub w23: f64,
    pub w32: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma21: f64,
    pub gamma31: f64,
    pub gamma32: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AwiPopulations {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwiThresholdKind {
    Inversion = 0,
    Gain = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AwiOperatingPoint {
    pub pressure_torr: f64,
    pub kappa0: f64,
    pub peak_gain: f64,
    /// Probe detuning of the peak, s^-1.
    pub delta_p: f64,
    pub populations: AwiPopulations,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> AwiStatus {
    match e {
        Error::Io { .. } => AwiStatus::Io,
        Error::Parse { .. } => AwiStatus::Parse,
        Error::UnknownSpecies(_) | Error::UnknownBuffer(_) => AwiStatus::UnknownSpecies,
        Error::Invariant { .. } | Error::Config { .. } => AwiStatus::InvalidArgument,
        Error::NoMinimum | Error::NoGain => AwiStatus::NotFound,
        _ => AwiStatus::Numerical,
    }
}

enum Fail {
    Core(Error),
    Status(AwiStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn null() -> Fail {
    Fail::Status(AwiStatus::NullPointer, "null pointer argument".into())
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail::Status(AwiStatus::InvalidArgument, msg.into())
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AwiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            AwiStatus::Ok
        }
        Ok(Err(Fail::Core(e))) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            AwiStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    // SAFETY: caller guarantees a NUL-terminated string.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| invalid("string argument is not valid UTF-8"))
}

unsafe fn catalog_arg<'a>(p: *const AwiCatalog) -> Result<&'a SpeciesCatalog, Fail> {
    // SAFETY: non-null handles come from awi_catalog_builtin/load.
    unsafe { p.as_ref() }.map(|c| &c.0).ok_or_else(null)
}

unsafe fn conditions_arg(p: *const AwiConditions) -> Result<RunConfig, Fail> {
    // SAFETY: caller passes a valid struct or null.
    let c = unsafe { p.as_ref() }.ok_or_else(null)?;
    Ok(RunConfig {
        species: unsafe { str_arg(c.species) }?.to_string(),
        buffer: unsafe { str_arg(c.buffer) }?.to_string(),
        pressure: c.pressure_torr,
        temperature: c.temperature_k,
        chi_raman: c.chi_raman,
        ..RunConfig::default()
    })
}

unsafe fn resolve(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    kappa0: f64,
    delta: f64,
) -> Result<(RunConfig, Resolved), Fail> {
    let cat = unsafe { catalog_arg(catalog) }?;
    let cfg = RunConfig {
        drive: Some(DriveStrength::Kappa0(kappa0)),
        delta,
        ..unsafe { conditions_arg(cond) }?
    };
    let r = cfg.resolve(cat)?;
    Ok((cfg, r))
}

unsafe fn vapor_cell(catalog: *const AwiCatalog, cond: *const AwiConditions) -> Result<(VaporCell, f64), Fail> {
    let cat = unsafe { catalog_arg(catalog) }?;
    let cfg = unsafe { conditions_arg(cond) }?;
    cfg.validate()?;
    let mut cell = VaporCell::new(
        cat.atom(&cfg.species)?.clone(),
        cat.bath(&cfg.buffer, cfg.pressure, cfg.temperature)?,
    );
    cell.chi_raman = cfg.chi_raman;
    Ok((cell, cfg.pressure))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    // SAFETY: checked non-null; caller owns the storage.
    unsafe { out.write(v) };
    Ok(())
}

unsafe fn slice_arg<'a>(p: *const f64, n: usize) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null());
    }
    // SAFETY: caller guarantees `n` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, n) })
}

unsafe fn slice_out<'a>(p: *mut f64, n: usize) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(null());
    }
    // SAFETY: caller guarantees `n` writable elements.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, n) })
}

/// Library version as a static NUL-terminated string.
#[unsafe(no_mangle)]
pub extern "C" fn awi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: n + 1 <= len bytes are writable.
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast(), n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// The built-in Na/K/Rb catalog.
///
/// # Safety
/// `out` must be a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_catalog_builtin(out: *mut *mut AwiCatalog) -> AwiStatus {
    guard(|| unsafe { write(out, Box::into_raw(Box::new(AwiCatalog(SpeciesCatalog::builtin())))) })
}

/// Load a TOML catalog from `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_catalog_load(path: *const c_char, out: *mut *mut AwiCatalog) -> AwiStatus {
    guard(|| {
        let path = unsafe { str_arg(path) }?;
        let cat = awi_core::species::load_catalog(path)?;
        unsafe { write(out, Box::into_raw(Box::new(AwiCatalog(cat)))) }
    })
}

/// Release a catalog. Null is ignored.
///
/// # Safety
/// `catalog` must come from this library and not be used afterwards.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_catalog_free(catalog: *mut AwiCatalog) {
    if !catalog.is_null() {
        // SAFETY: allocated by Box::into_raw above.
        drop(unsafe { Box::from_raw(catalog) });
    }
}

/// Relaxation and dephasing rates for the given conditions.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_rates(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    out: *mut AwiRates,
) -> AwiStatus {
    guard(|| {
        let (_, r) = unsafe { resolve(catalog, cond, 0.0, 0.0) }?;
        let k = r.rates;
        let rates = AwiRates {
            a21: k.a21,
            a31: k.a31,
            w23: k.w23,
            w32: k.w32,
            gamma2: k.gamma2,
            gamma3: k.gamma3,
            gamma21: k.gamma21,
            gamma31: k.gamma31,
            gamma32: k.gamma32,
        };
        unsafe { write(out, rates) }
    })
}

/// Steady-state populations (degenerate-level model) under a drive of
/// strength `kappa0` = 4|g|^2/A21^2 and detuning `delta` (s^-1).
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_populations(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    kappa0: f64,
    delta: f64,
    out: *mut AwiPopulations,
) -> AwiStatus {
    guard(|| {
        let (_, r) = unsafe { resolve(catalog, cond, kappa0, delta) }?;
        let p = populations_for_drive(&r.drive, &r.rates, r.atom.degeneracies)?;
        unsafe {
            write(
                out,
                AwiPopulations {
                    r1: p.r1,
                    r2: p.r2,
                    r3: p.r3,
                },
            )
        }
    })
}

/// Normalised probe susceptibility at `n` probe detunings given in units of
/// Gamma31. `im_f` (absorption, negative for gain) and `re_f` each receive
/// `n` values.
///
/// # Safety
/// Pointers must be valid for `n` elements; strings NUL-terminated.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_spectrum(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    kappa0: f64,
    delta: f64,
    delta_p: *const f64,
    n: usize,
    im_f: *mut f64,
    re_f: *mut f64,
) -> AwiStatus {
    guard(|| {
        let (_, r) = unsafe { resolve(catalog, cond, kappa0, delta) }?;
        let grid = scaled(unsafe { slice_arg(delta_p, n) }?, r.rates.gamma31)?;
        let pops = populations_for_drive(&r.drive, &r.rates, r.atom.degeneracies)?;
        let samples = spectrum_scan(&grid, &r.drive, &r.rates, &pops);
        let (im, re) = unsafe { (slice_out(im_f, n)?, slice_out(re_f, n)?) };
        for (i, s) in samples.iter().enumerate() {
            im[i] = s.f.im;
            re[i] = s.f.re;
        }
        Ok(())
    })
}

/// Velocity-averaged version of [`awi_spectrum`], scaled to the averaged
/// undriven line centre. `nodes` = 0 picks the node count automatically.
///
/// # Safety
/// Pointers must be valid for `n` elements; strings NUL-terminated.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_doppler_spectrum(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    kappa0: f64,
    delta: f64,
    nodes: usize,
    delta_p: *const f64,
    n: usize,
    im_f: *mut f64,
    re_f: *mut f64,
) -> AwiStatus {
    guard(|| {
        let (cfg, r) = unsafe { resolve(catalog, cond, kappa0, delta) }?;
        let cfg = RunConfig {
            nodes: (nodes > 0).then_some(nodes),
            ..cfg
        };
        cfg.validate()?;
        let dc = cfg.doppler_config(&r);
        let grid = scaled(unsafe { slice_arg(delta_p, n) }?, r.rates.gamma31)?;
        let samples = velocity_average(&grid, &r.drive, &r.rates, &r.atom, &dc)?;
        let (im, re) = unsafe { (slice_out(im_f, n)?, slice_out(re_f, n)?) };
        for (i, s) in samples.iter().enumerate() {
            im[i] = s.f.im;
            re[i] = s.f.re;
        }
        Ok(())
    })
}

fn scaled(xs: &[f64], unit: f64) -> Result<Vec<f64>, Fail> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(invalid("probe detunings must be finite"));
    }
    Ok(xs.iter().map(|x| x * unit).collect())
}

fn kind_of(k: AwiThresholdKind) -> ThresholdKind {
    match k {
        AwiThresholdKind::Inversion => ThresholdKind::Inversion,
        AwiThresholdKind::Gain => ThresholdKind::Awi,
    }
}

/// Threshold kappa0 at the pressure in `cond`, for resonant drive and probe.
/// Returns `NotFound` when no threshold exists at that pressure.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_threshold(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    kind: AwiThresholdKind,
    kappa0: *mut f64,
) -> AwiStatus {
    guard(|| {
        let (cell, p) = unsafe { vapor_cell(catalog, cond) }?;
        match find_threshold(kind_of(kind), &cell, p)? {
            Some(k) => unsafe { write(kappa0, k) },
            None => Err(Fail::Status(
                AwiStatus::NotFound,
                format!("no {} threshold at {p} Torr", kind_of(kind).label()),
            )),
        }
    })
}

/// Lowest threshold over pressures in [`p_min`, `p_max`] Torr. The pressure
/// field of `cond` is ignored.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_threshold_minimum(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    kind: AwiThresholdKind,
    p_min: f64,
    p_max: f64,
    kappa0: *mut f64,
    pressure_torr: *mut f64,
) -> AwiStatus {
    guard(|| {
        let (cell, _) = unsafe { vapor_cell(catalog, cond) }?;
        let m = minimize_threshold(kind_of(kind), &cell, (p_min, p_max))?;
        unsafe {
            write(kappa0, m.kappa0)?;
            write(pressure_torr, m.pressure)
        }
    })
}

/// Pressure and drive that maximise the resonant-drive probe gain while
/// staying below the inversion threshold. The pressure field of `cond` is
/// ignored.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn awi_optimize_gain(
    catalog: *const AwiCatalog,
    cond: *const AwiConditions,
    out: *mut AwiOperatingPoint,
) -> AwiStatus {
    guard(|| {
        let (cell, _) = unsafe { vapor_cell(catalog, cond) }?;
        let op = optimize_gain(&cell, &GainSearch::default())?;
        let p = op.populations;
        unsafe {
            write(
                out,
                AwiOperatingPoint {
                    pressure_torr: op.pressure,
                    kappa0: op.kappa0,
                    peak_gain: op.peak_gain,
                    delta_p: op.delta_p,
                    populations: AwiPopulations {
                        r1: p.r1,
                        r2: p.r2,
                        r3: p.r3,
                    },
                },
            )
        }
    })
}
