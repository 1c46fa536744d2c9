//! C ABI for `smallpoints`.
//!
//! Every fallible function returns an [`SpStatus`] and writes its result
//! through an out pointer. On failure a message is kept per thread and can
//! be read with [`sp_last_error`]. Handles are opaque and must be released
//! with the matching `*_free` function. Strings returned by the library are
//! released with [`sp_string_free`].
//!
//! Structured inputs (curves, points, systems) are JSON strings in the same
//! format the command line reads.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use smallpoints::cli::{self, CliError};
use smallpoints::dynamics::{n_function, HeightedSystem, NValue};
use smallpoints::numeric::parse_rational;
use smallpoints::{AlgebraicNumber, ECPoint, EllipticCurveQ, IntPolynomial, SemiabelianPoint};

/// Result of a call. The first six values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpStatus {
    Ok = 0,
    Parse = 1,
    SearchSpace = 2,
    OffCurve = 3,
    Inconclusive = 4,
    Violation = 5,
    NullArgument = 10,
    InvalidUtf8 = 11,
    Panic = 12,
}

/// Kind of an N-function value.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpNKind {
    /// `N = value`.
    Finite = 0,
    /// The orbit is finite and stays below the threshold: `N` is infinite.
    Preperiodic = 1,
    /// No exceedance within `value` steps.
    CapExceeded = 2,
    /// Undecided at step `value` because of precision.
    Inconclusive = 3,
}

/// An N-function value: `kind` with its step count.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpNValue {
    pub kind: SpNKind,
    pub value: u32,
}

/// A height with its certified error bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpHeight {
    pub value: f64,
    pub error: f64,
}

/// Opaque algebraic number.
pub struct SpAlgebraic(AlgebraicNumber);

/// Opaque elliptic curve `y^2 = x^3 + a x + b` over `Q`.
pub struct SpCurve(EllipticCurveQ);

/// Opaque heighted dynamical system.
pub struct SpSystem(HeightedSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: SpStatus,
    message: String,
}

impl Failure {
    fn new(status: SpStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

fn status_of_code(code: i32) -> SpStatus {
    match code {
        0 => SpStatus::Ok,
        2 => SpStatus::SearchSpace,
        3 => SpStatus::OffCurve,
        4 => SpStatus::Inconclusive,
        5 => SpStatus::Violation,
        _ => SpStatus::Parse,
    }
}

impl<E: Into<CliError>> From<E> for Failure {
    fn from(e: E) -> Self {
        let e: CliError = e.into();
        Failure::new(status_of_code(e.code), e.message)
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F>(f: F) -> SpStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpStatus::Ok,
        Ok(Err(fail)) => {
            set_error(&fail.message);
            fail.status
        }
        Err(_) => {
            set_error("internal panic");
            SpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(SpStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(SpStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(SpStatus::NullArgument, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(SpStatus::NullArgument, format!("{name} is null")))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::new(SpStatus::Parse, format!("{what}: {e}")))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn sp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the rational number `text` (`"p/q"` or an integer).
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_algebraic_from_rational(text: *const c_char, out: *mut *mut SpAlgebraic) -> SpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let q = parse_rational(str_arg(text, "text")?).map_err(|e| Failure::new(SpStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(SpAlgebraic(AlgebraicNumber::rational(&q))));
        Ok(())
    })
}

/// Builds the root number `root_index` of the irreducible polynomial with
/// integer coefficients `coeffs[0] + coeffs[1] x + ... + coeffs[len-1] x^(len-1)`.
/// Roots are ordered as in the command line's `orbit` listing.
///
/// # Safety
/// `coeffs` must point to `len` integers and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_algebraic_from_minpoly(
    coeffs: *const i64,
    len: usize,
    root_index: usize,
    out: *mut *mut SpAlgebraic,
) -> SpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let c = ref_arg(coeffs, "coeffs")?;
        let c = std::slice::from_raw_parts(c, len);
        let a = AlgebraicNumber::from_minpoly(IntPolynomial::from_i64(c), root_index)?;
        *out = Box::into_raw(Box::new(SpAlgebraic(a)));
        Ok(())
    })
}

/// Releases an algebraic number.
///
/// # Safety
/// `a` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_algebraic_free(a: *mut SpAlgebraic) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Degree of the number over `Q`.
///
/// # Safety
/// `a` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_algebraic_degree(a: *const SpAlgebraic, out: *mut usize) -> SpStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(a, "a")?.0.degree();
        Ok(())
    })
}

/// Absolute logarithmic Weil height with its error bound.
///
/// # Safety
/// `a` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_algebraic_weil_height(a: *const SpAlgebraic, out: *mut SpHeight) -> SpStatus {
    guard(|| {
        let (value, error) = ref_arg(a, "a")?.0.weil_height_with_error();
        *out_arg(out, "out")? = SpHeight { value, error };
        Ok(())
    })
}

/// The minimal polynomial as a JSON array of coefficient strings, constant
/// term first. Free the result with [`sp_string_free`].
///
/// # Safety
/// `a` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_algebraic_minpoly_json(a: *const SpAlgebraic, out: *mut *mut c_char) -> SpStatus {
    guard(|| {
        let a = ref_arg(a, "a")?;
        let out = out_arg(out, "out")?;
        let s = serde_json::to_string(a.0.minpoly()).expect("polynomials serialise");
        *out = to_c_string(s);
        Ok(())
    })
}

/// Parses a curve from JSON, `{"a": "0", "b": "-2"}`.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_curve_from_json(json: *const c_char, out: *mut *mut SpCurve) -> SpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let e: EllipticCurveQ = parse_json(str_arg(json, "json")?, "curve")?;
        *out = Box::into_raw(Box::new(SpCurve(e)));
        Ok(())
    })
}

/// Releases a curve.
///
/// # Safety
/// `e` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_curve_free(e: *mut SpCurve) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Canonical height of a point given as JSON (`{"x": "3", "y": "5"}` or
/// `"O"`), computed to within `tol`.
///
/// # Safety
/// `e` must be a valid handle, `point_json` a valid C string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_curve_canonical_height(
    e: *const SpCurve,
    point_json: *const c_char,
    tol: f64,
    out: *mut SpHeight,
) -> SpStatus {
    guard(|| {
        let e = &ref_arg(e, "curve")?.0;
        let out = out_arg(out, "out")?;
        let p: ECPoint = parse_json(str_arg(point_json, "point_json")?, "point")?;
        if !e.contains(&p) {
            return Err(Failure::new(SpStatus::OffCurve, format!("{p} is not on the curve")));
        }
        let h = e.canonical_height(&p, tol)?;
        *out = SpHeight {
            value: h.value,
            error: h.error,
        };
        Ok(())
    })
}

/// Parses a heighted system from JSON in the command-line format.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_system_from_json(json: *const c_char, out: *mut *mut SpSystem) -> SpStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s: HeightedSystem = parse_json(str_arg(json, "json")?, "system")?;
        *out = Box::into_raw(Box::new(SpSystem(s)));
        Ok(())
    })
}

/// Releases a system.
///
/// # Safety
/// `s` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp_system_free(s: *mut SpSystem) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// N-function of `sys` at a point given as JSON (`{"ec": ..., "torus": [...]}`)
/// or as a rational, iterating at most `cap` steps.
///
/// # Safety
/// `sys` must be a valid handle, `point` a valid C string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sp_system_nfunc(
    sys: *const SpSystem,
    point: *const c_char,
    cap: u32,
    out: *mut SpNValue,
) -> SpStatus {
    guard(|| {
        let sys = &ref_arg(sys, "sys")?.0;
        let out = out_arg(out, "out")?;
        let text = str_arg(point, "point")?;
        let z = match parse_rational(text) {
            Ok(q) => SemiabelianPoint::torus_only(vec![smallpoints::TorusElement::rational(&q)]),
            Err(_) => parse_json(text, "point")?,
        };
        if cap == 0 {
            return Err(Failure::new(SpStatus::Parse, "cap must be >= 1"));
        }
        *out = match n_function(sys, &z, cap)? {
            NValue::Finite { n } => SpNValue {
                kind: SpNKind::Finite,
                value: n,
            },
            NValue::Preperiodic => SpNValue {
                kind: SpNKind::Preperiodic,
                value: 0,
            },
            NValue::CapExceeded { cap } => SpNValue {
                kind: SpNKind::CapExceeded,
                value: cap,
            },
            NValue::Inconclusive { step } => SpNValue {
                kind: SpNKind::Inconclusive,
                value: step,
            },
        };
        Ok(())
    })
}

/// Runs the command line with `argv[0..argc]` (without the program name).
/// Stores the exit code in `exit_code` and the standard output or error text
/// in `output` (free it with [`sp_string_free`]). Returns `Ok` whenever the
/// command ran, whatever its exit code.
///
/// # Safety
/// `argv` must point to `argc` valid C strings; `exit_code` and `output`
/// must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sp_run(
    argv: *const *const c_char,
    argc: usize,
    exit_code: *mut i32,
    output: *mut *mut c_char,
) -> SpStatus {
    guard(|| {
        let exit_code = out_arg(exit_code, "exit_code")?;
        let output = out_arg(output, "output")?;
        let mut args = vec!["smallpoints".to_string()];
        if argc > 0 {
            let v = std::slice::from_raw_parts(ref_arg(argv, "argv")?, argc);
            for (i, &p) in v.iter().enumerate() {
                args.push(str_arg(p, &format!("argv[{i}]"))?.to_string());
            }
        }
        let o = cli::run_from(args);
        *exit_code = o.code;
        *output = to_c_string(if o.stdout.is_empty() { o.stderr } else { o.stdout });
        Ok(())
    })
}
