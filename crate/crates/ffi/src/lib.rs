//! C ABI for polymap.
//!
//! Every function returns a [`PolymapStatus`]; results go through out
//! pointers. On failure a description is kept per thread and can be read with
//! [`polymap_last_error`]. Handles are opaque and owned by the caller, who
//! releases them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use polymap::bifurcation::{detect_period, find_bifurcation_value, Period, SearchOptions, SearchSlice};
use polymap::family::{family_at, preset, CanonicalFamily, FamilySpec};
use polymap::forms::{to_canonical, to_linear_factors, CanonicalMap, GeneralMap, Sign};
use polymap::stability::{classify_fixed_point, BandTable, StabilityKind};
use polymap::{Error, Polynomial, RootOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolymapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ComplexFixedPoints = 3,
    NonConvergence = 4,
    Syntax = 5,
    Poisoned = 6,
    UnknownPreset = 7,
    IndexOutOfRange = 8,
    UnsupportedDegree = 9,
    Numerical = 10,
    Io = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolymapStability {
    Attractor = 0,
    Repellor = 1,
    NonhyperbolicStable = 2,
    NonhyperbolicUnstable = 3,
    SemistableRight = 4,
    SemistableLeft = 5,
    Indeterminate = 6,
}

impl From<StabilityKind> for PolymapStability {
    fn from(k: StabilityKind) -> Self {
        match k {
            StabilityKind::Attractor => PolymapStability::Attractor,
            StabilityKind::Repellor => PolymapStability::Repellor,
            StabilityKind::NonhyperbolicStable => PolymapStability::NonhyperbolicStable,
            StabilityKind::NonhyperbolicUnstable => PolymapStability::NonhyperbolicUnstable,
            StabilityKind::SemistableRight => PolymapStability::SemistableRight,
            StabilityKind::SemistableLeft => PolymapStability::SemistableLeft,
            StabilityKind::Indeterminate => PolymapStability::Indeterminate,
        }
    }
}

/// Opaque canonical map.
pub struct PolymapMap(CanonicalMap);

/// Opaque one-parameter family.
pub struct PolymapFamily(CanonicalFamily);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PolymapStatus {
    match e {
        Error::ComplexFixedPoints { .. } => PolymapStatus::ComplexFixedPoints,
        Error::NonConvergence { .. } => PolymapStatus::NonConvergence,
        Error::Syntax { .. } => PolymapStatus::Syntax,
        Error::PoisonedExpression { .. } => PolymapStatus::Poisoned,
        Error::UnknownPreset(_) => PolymapStatus::UnknownPreset,
        Error::IndexOutOfRange { .. } | Error::BadAnchor { .. } => PolymapStatus::IndexOutOfRange,
        Error::UnsupportedDegree { .. } => PolymapStatus::UnsupportedDegree,
        Error::Io(_) => PolymapStatus::Io,
        Error::NoiseFloor { .. }
        | Error::NotACycle { .. }
        | Error::TailTooShort { .. }
        | Error::DegenerateGap { .. }
        | Error::BracketInvalid(_) => PolymapStatus::Numerical,
        Error::DegenerateMap { .. } | Error::Invalid(_) => PolymapStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), PolymapStatus>) -> PolymapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PolymapStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            PolymapStatus::Panic
        }
    }
}

fn fail(e: Error) -> PolymapStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> PolymapStatus {
    set_error(&format!("{what} is null"));
    PolymapStatus::NullPointer
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn write<T>(out: *mut T, v: T) -> Result<(), PolymapStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// # Safety
/// `p` must be null or point to `n` readable values.
unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], PolymapStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, PolymapStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        PolymapStatus::InvalidArgument
    })
}

unsafe fn map_ref<'a>(m: *const PolymapMap) -> Result<&'a CanonicalMap, PolymapStatus> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("map"))
}

/// Message for the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn polymap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Canonical map with sign `s` (+1 or -1) and nonzero fixed points `xs[0..n]`.
///
/// # Safety
/// `xs` must point to `n` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_new(s: i32, xs: *const f64, n: usize, out: *mut *mut PolymapMap) -> PolymapStatus {
    guard(|| {
        let sign = match s {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => return Err(fail(Error::Invalid(format!("sign must be +1 or -1, got {s}")))),
        };
        let xs = slice(xs, n, "xs")?;
        let c = CanonicalMap::new(sign, xs.to_vec()).map_err(fail)?;
        write(out, Box::into_raw(Box::new(PolymapMap(c))))
    })
}

/// Canonical form of `f(y) = sum coeffs[i] y^i`, anchored at the smallest
/// fixed point. `scale` and `offset` receive `y = scale x + offset`; either
/// may be null.
///
/// # Safety
/// `coeffs` must point to `n` doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_from_coefficients(
    coeffs: *const f64,
    n: usize,
    out: *mut *mut PolymapMap,
    scale: *mut f64,
    offset: *mut f64,
) -> PolymapStatus {
    guard(|| {
        let c = slice(coeffs, n, "coeffs")?;
        let g = GeneralMap::from_coefficients(&Polynomial::new(c.to_vec())).map_err(fail)?;
        let lff = to_linear_factors(&g, RootOptions::default()).map_err(fail)?;
        let (cm, t) = to_canonical(&lff, lff.anchor).map_err(fail)?;
        if !scale.is_null() {
            scale.write(t.scale);
        }
        if !offset.is_null() {
            offset.write(t.offset);
        }
        write(out, Box::into_raw(Box::new(PolymapMap(cm))))
    })
}

/// # Safety
/// `map` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_free(map: *mut PolymapMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_degree(map: *const PolymapMap, out: *mut usize) -> PolymapStatus {
    guard(|| write(out, map_ref(map)?.degree()))
}

/// Fixed point `k` (0 is the origin).
///
/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_fixed_point(map: *const PolymapMap, k: usize, out: *mut f64) -> PolymapStatus {
    guard(|| write(out, map_ref(map)?.fixed_point(k).map_err(fail)?))
}

/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_eval(map: *const PolymapMap, x: f64, out: *mut f64) -> PolymapStatus {
    guard(|| write(out, map_ref(map)?.eval(x)))
}

/// Product distance function of fixed point `k`.
///
/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_pdf(map: *const PolymapMap, k: usize, out: *mut f64) -> PolymapStatus {
    guard(|| write(out, map_ref(map)?.pdf(k).map_err(fail)?))
}

/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_multiplier(map: *const PolymapMap, k: usize, out: *mut f64) -> PolymapStatus {
    guard(|| write(out, map_ref(map)?.multiplier_fixed(k).map_err(fail)?))
}

/// # Safety
/// `map` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_map_classify(
    map: *const PolymapMap,
    k: usize,
    tol: f64,
    out: *mut PolymapStability,
) -> PolymapStatus {
    guard(|| {
        let cl = classify_fixed_point(map_ref(map)?, k, tol).map_err(fail)?;
        write(out, cl.kind.into())
    })
}

/// Named family. `arg` is `r` for harvest, `b(lambda)` for bmap, else may be null.
///
/// # Safety
/// `name` must be a NUL-terminated string, `arg` null or one; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_family_preset(
    name: *const c_char,
    arg: *const c_char,
    out: *mut *mut PolymapFamily,
) -> PolymapStatus {
    guard(|| {
        let name = string(name, "name")?;
        let arg = if arg.is_null() { None } else { Some(string(arg, "arg")?) };
        let fam = preset(name, arg).map_err(fail)?;
        write(out, Box::into_raw(Box::new(PolymapFamily(fam))))
    })
}

/// Family from a JSON specification.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_family_from_json(json: *const c_char, out: *mut *mut PolymapFamily) -> PolymapStatus {
    guard(|| {
        let spec = FamilySpec::from_json(string(json, "json")?).map_err(fail)?;
        let fam = spec.build().map_err(fail)?;
        write(out, Box::into_raw(Box::new(PolymapFamily(fam))))
    })
}

/// # Safety
/// `fam` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polymap_family_free(fam: *mut PolymapFamily) {
    if !fam.is_null() {
        drop(Box::from_raw(fam));
    }
}

/// The canonical map of `fam` at `lambda`; free it with `polymap_map_free`.
///
/// # Safety
/// `fam` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_family_at(
    fam: *const PolymapFamily,
    lambda: f64,
    out: *mut *mut PolymapMap,
) -> PolymapStatus {
    guard(|| {
        let fam = fam.as_ref().ok_or_else(|| null("family"))?;
        let c = family_at(&fam.0, lambda).map_err(fail)?;
        write(out, Box::into_raw(Box::new(PolymapMap(c))))
    })
}

/// Tabulated band edge `k` for degree 2 or 3.
///
/// # Safety
/// `value` must be valid for writes; `uncertainty` may be null.
#[no_mangle]
pub unsafe extern "C" fn polymap_band_value(
    degree: usize,
    k: usize,
    value: *mut f64,
    uncertainty: *mut f64,
) -> PolymapStatus {
    guard(|| {
        let table = BandTable::builtin(degree).map_err(fail)?;
        let t = table
            .thresholds
            .iter()
            .find(|t| t.k == k)
            .ok_or_else(|| fail(Error::IndexOutOfRange { index: k, len: table.thresholds.len() + 1 }))?;
        if !uncertainty.is_null() {
            uncertainty.write(t.uncertainty);
        }
        write(value, t.value)
    })
}

/// Bifurcation value `b_k` on the canonical slice of degree 2 or 3.
///
/// # Safety
/// `value` and `half_width` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_find_bifurcation(
    degree: usize,
    k: usize,
    bisect_tol: f64,
    value: *mut f64,
    half_width: *mut f64,
) -> PolymapStatus {
    guard(|| {
        let slice = SearchSlice::canonical(degree).map_err(fail)?;
        let opts = SearchOptions { bisect_tol, ..SearchOptions::default() };
        let e = find_bifurcation_value(degree, &slice, k, None, &opts).map_err(fail)?;
        write(half_width, e.half_width)?;
        write(value, e.value)
    })
}

/// Smallest period of `tail` within `rel_tol`; writes 0 when aperiodic.
///
/// # Safety
/// `tail` must point to `n` doubles; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn polymap_detect_period(
    tail: *const f64,
    n: usize,
    rel_tol: f64,
    p_max: usize,
    out: *mut usize,
) -> PolymapStatus {
    guard(|| {
        let t = slice(tail, n, "tail")?;
        let p = match detect_period(t, rel_tol, p_max).map_err(fail)? {
            Period::Period(p) => p,
            Period::Aperiodic => 0,
        };
        write(out, p)
    })
}
