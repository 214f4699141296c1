//! C ABI for `delone_core`.
//!
//! Every function returns a [`DeloneStatus`]. Objects cross the boundary as opaque handles that
//! the caller releases with the matching `_free` function. The message of the last failure on the
//! calling thread is available through [`delone_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use delone_core::algebraic::{classify, AlgebraicInteger, NumberClass};
use delone_core::cli::render::{points_csv, render_points};
use delone_core::cli::spec::SystemSpec;
use delone_core::delone::MSet;
use delone_core::error::Error;
use delone_core::geometry::Region;
use delone_core::poly::IntPolynomial;
use delone_core::substitution::validate;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeloneStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    DataError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeloneClass {
    Pisot = 0,
    Salem = 1,
    Perron = 2,
    Lind = 3,
    Unclassified = 4,
}

/// A parsed system description.
pub struct DeloneSpec {
    inner: SystemSpec,
}

/// A finite colored point set.
pub struct DelonePointSet {
    inner: MSet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DeloneStatus {
    match e {
        Error::Parse { .. } | Error::InvalidPolynomial(_) => DeloneStatus::ParseError,
        e if e.is_data_error() => DeloneStatus::DataError,
        _ => DeloneStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DeloneStatus>) -> DeloneStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DeloneStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            DeloneStatus::Panic
        }
    }
}

fn fail(e: Error) -> DeloneStatus {
    set_error(&e.to_string());
    status_of(&e)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, DeloneStatus> {
    if p.is_null() {
        set_error("null string");
        return Err(DeloneStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        DeloneStatus::InvalidUtf8
    })
}

fn non_null<T>(p: *const T) -> Result<(), DeloneStatus> {
    if p.is_null() {
        set_error("null pointer argument");
        Err(DeloneStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Copy of the last error message of this thread into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length without the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn delone_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Classify the largest real root of a monic irreducible polynomial such as `x^2-x-1`.
/// `max_conjugate_modulus` receives 0 for degree one.
///
/// # Safety
/// `poly` must be a NUL-terminated string; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn delone_classify(
    poly: *const c_char,
    class_out: *mut DeloneClass,
    max_conjugate_modulus: *mut f64,
) -> DeloneStatus {
    guard(|| {
        let t = text(poly)?;
        non_null(class_out)?;
        non_null(max_conjugate_modulus)?;
        let p = IntPolynomial::parse(t).map_err(fail)?;
        let a = AlgebraicInteger::largest_real(p).map_err(fail)?;
        let c = classify(&a).map_err(fail)?;
        *class_out = match c.class {
            NumberClass::Pisot => DeloneClass::Pisot,
            NumberClass::Salem => DeloneClass::Salem,
            NumberClass::Perron => DeloneClass::Perron,
            NumberClass::Lind => DeloneClass::Lind,
            NumberClass::None => DeloneClass::Unclassified,
        };
        *max_conjugate_modulus = c.conjugate_moduli.iter().copied().fold(0.0, f64::max);
        Ok(())
    })
}

/// Parse a system description.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn delone_spec_parse(source: *const c_char, out: *mut *mut DeloneSpec) -> DeloneStatus {
    guard(|| {
        let t = text(source)?;
        non_null(out)?;
        *out = ptr::null_mut();
        let inner = SystemSpec::parse(t).map_err(fail)?;
        *out = Box::into_raw(Box::new(DeloneSpec { inner }));
        Ok(())
    })
}

/// # Safety
/// `spec` must be null or a handle from [`delone_spec_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn delone_spec_free(spec: *mut DeloneSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Physical dimension of the described system.
///
/// # Safety
/// `spec` must be a live handle and `dim` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn delone_spec_dimension(spec: *const DeloneSpec, dim: *mut usize) -> DeloneStatus {
    guard(|| {
        non_null(spec)?;
        non_null(dim)?;
        *dim = (*spec).inner.dimension();
        Ok(())
    })
}

/// Check the substitution of a spec on its cluster (or {0}) and the cube [lo, hi]^d. `pf_gap` receives
/// |λ(S) − |det Q||; `ok` is 1 when expansion, primitivity, the eigenvalue identity and
/// disjointness all hold.
///
/// # Safety
/// `spec` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn delone_spec_validate(
    spec: *const DeloneSpec,
    lo: f64,
    hi: f64,
    pf_gap: *mut f64,
    ok: *mut i32,
) -> DeloneStatus {
    guard(|| {
        non_null(spec)?;
        non_null(pf_gap)?;
        non_null(ok)?;
        let s = &(*spec).inner;
        let phi = s.build_substitution().map_err(fail)?;
        let d = phi.frame().dim();
        let region = Region::new(vec![lo; d], vec![hi; d]).map_err(fail)?;
        let seed = match s.build_cluster(phi.frame(), phi.colors()).map_err(fail)? {
            Some(c) => c,
            None => phi.single(0, vec![0; phi.frame().rank()]),
        };
        let rep = validate(&phi, &seed, &region).map_err(fail)?;
        *pf_gap = rep.pf_gap;
        *ok = i32::from(rep.ok());
        Ok(())
    })
}

/// Generate the spec's point set on the cube [lo, hi]^d.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn delone_spec_generate(
    spec: *const DeloneSpec,
    lo: f64,
    hi: f64,
    out: *mut *mut DelonePointSet,
) -> DeloneStatus {
    guard(|| {
        non_null(spec)?;
        non_null(out)?;
        *out = ptr::null_mut();
        let s = &(*spec).inner;
        let d = s.dimension();
        let region = Region::new(vec![lo; d], vec![hi; d]).map_err(fail)?;
        let (x, _) = s.point_set(&region).map_err(fail)?;
        *out = Box::into_raw(Box::new(DelonePointSet { inner: x }));
        Ok(())
    })
}

/// # Safety
/// `set` must be null or a handle from [`delone_spec_generate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn delone_pointset_free(set: *mut DelonePointSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of (color, point) entries and the physical dimension.
///
/// # Safety
/// `set` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn delone_pointset_shape(
    set: *const DelonePointSet,
    len: *mut usize,
    dim: *mut usize,
) -> DeloneStatus {
    guard(|| {
        non_null(set)?;
        non_null(len)?;
        non_null(dim)?;
        *len = (*set).inner.len();
        *dim = (*set).inner.frame().dim();
        Ok(())
    })
}

/// Positions (row-major, `len × dim`) and color indices, ordered color by color. `cap` is the
/// number of entries the buffers can hold; either buffer may be null.
///
/// # Safety
/// Non-null buffers must hold `cap * dim` doubles and `cap` colors respectively.
#[no_mangle]
pub unsafe extern "C" fn delone_pointset_points(
    set: *const DelonePointSet,
    positions: *mut f64,
    colors: *mut u32,
    cap: usize,
) -> DeloneStatus {
    guard(|| {
        non_null(set)?;
        let x = &(*set).inner;
        if cap < x.len() {
            set_error(&format!("buffer holds {cap} entries, {} needed", x.len()));
            return Err(DeloneStatus::BufferTooSmall);
        }
        let d = x.frame().dim();
        for (k, (c, _, p)) in x.flattened().into_iter().enumerate() {
            if !positions.is_null() {
                for (j, v) in p.iter().enumerate() {
                    *positions.add(k * d + j) = *v;
                }
            }
            if !colors.is_null() {
                *colors.add(k) = c as u32;
            }
        }
        Ok(())
    })
}

/// Render as SVG (`format = 0`) or CSV (`format = 1`) into a string released with
/// [`delone_string_free`].
///
/// # Safety
/// `set` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn delone_pointset_export(
    set: *const DelonePointSet,
    format: i32,
    out: *mut *mut c_char,
) -> DeloneStatus {
    guard(|| {
        non_null(set)?;
        non_null(out)?;
        *out = ptr::null_mut();
        let x = &(*set).inner;
        let s = match format {
            0 => render_points(x).map_err(fail)?,
            1 => points_csv(x),
            _ => {
                set_error("format must be 0 (SVG) or 1 (CSV)");
                return Err(DeloneStatus::InvalidArgument);
            }
        };
        *out = CString::new(s).map_err(|_| DeloneStatus::InvalidArgument)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn delone_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
