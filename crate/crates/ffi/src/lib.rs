//! C ABI over `twodel`.
//!
//! Words cross the boundary as arrays of `uint8_t` holding 0 or 1. Every
//! call returns a [`TdStatus`]; on failure the message is available from
//! [`td_last_error_message`] on the same thread. Strings returned through
//! out-parameters are owned by the caller and released with
//! [`td_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use twodel::bitseq::{delete2, DeletionPair};
use twodel::construction::{select_targets, CodebookHeader};
use twodel::{BitString, CodeSpace, Construction, Error, TwoDeletionCode};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStatus {
    Ok = 0,
    InvalidArgument = 1,
    ConstraintViolation = 2,
    DecodeFailure = 3,
    NotCorrecting = 4,
    Internal = 5,
    Io = 6,
    NullPointer = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// A code with fixed targets. Opaque to C.
pub struct TdCode {
    code: TwoDeletionCode,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(TdStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidArgument(_) => TdStatus::InvalidArgument,
            Error::ConstraintViolation(_) | Error::SegmentTooLong { .. } => TdStatus::ConstraintViolation,
            Error::DecodeFailure(_) | Error::Classification(_) => TdStatus::DecodeFailure,
            Error::NotCorrecting { .. } => TdStatus::NotCorrecting,
            Error::InvariantViolation(_) => TdStatus::Internal,
            Error::Io(_) => TdStatus::Io,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TdStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TdStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside twodel".into());
            TdStatus::Panic
        }
    }
}

unsafe fn opt_str<'a>(p: *const c_char) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Fail(TdStatus::InvalidArgument, "string is not UTF-8".into()))
}

unsafe fn word(bits: *const u8, len: usize) -> Result<BitString, Fail> {
    if bits.is_null() && len > 0 {
        return Err(null("bits"));
    }
    let slice = if len == 0 { &[][..] } else { std::slice::from_raw_parts(bits, len) };
    Ok(BitString::new(slice.to_vec())?)
}

unsafe fn code_ref<'a>(code: *const TdCode) -> Result<&'a TwoDeletionCode, Fail> {
    code.as_ref().map(|c| &c.code).ok_or_else(|| null("code"))
}

unsafe fn write_word(w: &BitString, out: *mut u8, cap: usize, out_len: *mut usize) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    if !out_len.is_null() {
        *out_len = w.len();
    }
    if cap < w.len() {
        return Err(Fail(
            TdStatus::BufferTooSmall,
            format!("buffer holds {cap} symbols, need {}", w.len()),
        ));
    }
    ptr::copy_nonoverlapping(w.as_slice().as_ptr(), out, w.len());
    Ok(())
}

unsafe fn give_string(s: String, out: *mut *mut c_char) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).expect("no interior nul").into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn td_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds the code of length `n` with the largest codebook (`n <= 22`).
/// `s == 0` means `s = n`. `cache_dir` may be null.
///
/// # Safety
/// `cache_dir` must be null or a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn td_code_new(
    n: usize,
    s: usize,
    construction: u8,
    cache_dir: *const c_char,
    out: *mut *mut TdCode,
) -> TdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = Construction::try_from(construction)?;
        let dir = opt_str(cache_dir)?.map(PathBuf::from);
        let space = CodeSpace::for_length(n, if s == 0 { n } else { s }, c, dir.as_deref())?;
        let targets = select_targets(&space)?.targets;
        let code = space.with_targets(targets)?;
        *out = Box::into_raw(Box::new(TdCode { code }));
        Ok(())
    })
}

/// Rebuilds a code from a codebook header line.
///
/// # Safety
/// `header_json` must be a valid C string, `cache_dir` null or a valid C
/// string, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_code_from_header(
    header_json: *const c_char,
    cache_dir: *const c_char,
    out: *mut *mut TdCode,
) -> TdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let json = opt_str(header_json)?.ok_or_else(|| null("header_json"))?;
        let dir = opt_str(cache_dir)?.map(PathBuf::from);
        let code = CodebookHeader::from_json(json)?.open(dir.as_deref())?;
        *out = Box::into_raw(Box::new(TdCode { code }));
        Ok(())
    })
}

/// # Safety
/// `code` must be null or come from `td_code_new` / `td_code_from_header`,
/// and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn td_code_free(code: *mut TdCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Codeword length, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_code_length(code: *const TdCode) -> usize {
    code.as_ref().map_or(0, |c| c.code.n())
}

/// The codebook header line describing `code`.
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_code_header_json(code: *const TdCode, out: *mut *mut c_char) -> TdStatus {
    guard(|| {
        let code = code_ref(code)?;
        give_string(CodebookHeader::new(code).to_json(), out)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn td_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sets `*is_member` to whether `bits` is a codeword. A word of the wrong
/// length is simply not a member.
///
/// # Safety
/// `bits` must point to `len` readable bytes; `is_member` must be writable.
#[no_mangle]
pub unsafe extern "C" fn td_is_member(
    code: *const TdCode,
    bits: *const u8,
    len: usize,
    is_member: *mut bool,
) -> TdStatus {
    guard(|| {
        let code = code_ref(code)?;
        let x = word(bits, len)?;
        if is_member.is_null() {
            return Err(null("is_member"));
        }
        *is_member = code.is_member(&x);
        Ok(())
    })
}

/// Decodes a word of length `n - 2` into `out` (capacity `cap`, at least
/// `n`). `out_len` and `branch` may be null; `branch` receives the decoder
/// path as an owned string.
///
/// # Safety
/// `y` must point to `y_len` readable bytes, `out` to `cap` writable bytes,
/// and the other pointers must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn td_decode(
    code: *const TdCode,
    y: *const u8,
    y_len: usize,
    out: *mut u8,
    cap: usize,
    out_len: *mut usize,
    branch: *mut *mut c_char,
) -> TdStatus {
    guard(|| {
        let code = code_ref(code)?;
        let y = word(y, y_len)?;
        let outcome = code.decode(&y)?;
        write_word(&outcome.recovered, out, cap, out_len)?;
        if !branch.is_null() {
            give_string(outcome.branch.to_string(), branch)?;
        }
        Ok(())
    })
}

/// Deletes the symbols at 1-indexed positions `i1 < i2`, writing
/// `len - 2` symbols to `out`.
///
/// # Safety
/// `x` must point to `len` readable bytes and `out` to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn td_delete2(
    x: *const u8,
    len: usize,
    i1: usize,
    i2: usize,
    out: *mut u8,
    cap: usize,
) -> TdStatus {
    guard(|| {
        let x = word(x, len)?;
        let y = delete2(&x, DeletionPair::new(i1, i2)?)?;
        write_word(&y, out, cap, ptr::null_mut())
    })
}
