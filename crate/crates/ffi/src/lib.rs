//! C ABI for the polar-sofscl decoders.
//!
//! Two opaque handles: a code (`PsCode`) and a decoder bound to a code
//! (`PsDecoder`). Every fallible function returns a `PsStatus`; on failure
//! the message is kept per thread and can be read with
//! `ps_last_error_message`. Handles are freed with their `*_free` function,
//! which accepts null.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use polar_sofscl::code_model::{build_nr5g, DynFrozenCfg, PolarCodeSpec};
use polar_sofscl::soft_output::{so_fscl_decode, so_scl_decode, ArithMode};

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CodeError = 3,
    DecodeError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Arithmetic used inside the decoder.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsMode {
    Exact = 0,
    HardwareFriendly = 1,
}

/// Which list decoder a `PsDecoder` runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsDecoderKind {
    /// Node-based soft-output list decoder.
    SoFscl = 0,
    /// Bit-by-bit soft-output list decoder.
    SoScl = 1,
}

/// `fd` value selecting dynamic frozen bits on every frozen position.
pub const PS_FD_ALL: i32 = -1;
/// `fd` value selecting all-zero (static) frozen bits.
pub const PS_FD_STATIC: i32 = -2;

/// Opaque polar code.
pub struct PsCode {
    spec: PolarCodeSpec,
}

/// Opaque decoder.
pub struct PsDecoder {
    spec: PolarCodeSpec,
    list_size: usize,
    mode: ArithMode,
    kind: PsDecoderKind,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: PsStatus, msg: impl Into<String>) -> PsStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into `PsStatus::Panic`.
fn guard(f: impl FnOnce() -> PsStatus) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == PsStatus::Ok {
                set_error("");
            }
            s
        }
        Err(_) => fail(PsStatus::Panic, "internal panic"),
    }
}

fn dyn_cfg(fd: i32) -> Result<DynFrozenCfg, PsStatus> {
    match fd {
        PS_FD_STATIC => Ok(DynFrozenCfg::static_zero()),
        PS_FD_ALL => Ok(DynFrozenCfg::convolutional(None)),
        d if d >= 0 => Ok(DynFrozenCfg::convolutional(Some(d as usize))),
        d => Err(fail(PsStatus::InvalidArgument, format!("invalid fd value {d}"))),
    }
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], PsStatus> {
    if p.is_null() {
        return Err(fail(PsStatus::NullPointer, format!("{what} is null")));
    }
    if len < need {
        return Err(fail(PsStatus::BufferTooSmall, format!("{what} holds {len}, need {need}")));
    }
    Ok(slice::from_raw_parts_mut(p, need))
}

/// Status name as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ps_status_str(status: PsStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        PsStatus::Ok => b"ok\0",
        PsStatus::NullPointer => b"null pointer\0",
        PsStatus::InvalidArgument => b"invalid argument\0",
        PsStatus::CodeError => b"code error\0",
        PsStatus::DecodeError => b"decode error\0",
        PsStatus::BufferTooSmall => b"buffer too small\0",
        PsStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ps_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds an (n, k) code from the 5G reliability sequence. `fd` is the
/// number of dynamic frozen bits per node, `PS_FD_ALL` or `PS_FD_STATIC`.
///
/// # Safety
/// `out` must be a valid pointer to write the handle to.
#[no_mangle]
pub unsafe extern "C" fn ps_code_new_nr5g(n: usize, k: usize, fd: i32, out: *mut *mut PsCode) -> PsStatus {
    guard(|| {
        if out.is_null() {
            return fail(PsStatus::NullPointer, "out is null");
        }
        let cfg = match dyn_cfg(fd) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match build_nr5g(n, k, cfg) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(PsCode { spec }));
                PsStatus::Ok
            }
            Err(e) => fail(PsStatus::CodeError, e.to_string()),
        }
    })
}

/// Parses a code from its text form (as written by the CLI `construct`).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_code_from_text(text: *const c_char, out: *mut *mut PsCode) -> PsStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(PsStatus::NullPointer, "text or out is null");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(PsStatus::InvalidArgument, "text is not UTF-8");
        };
        match PolarCodeSpec::from_text(s) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(PsCode { spec }));
                PsStatus::Ok
            }
            Err(e) => fail(PsStatus::CodeError, e.to_string()),
        }
    })
}

/// # Safety
/// `code` must be null or a handle from `ps_code_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_code_free(code: *mut PsCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Block length, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_code_n(code: *const PsCode) -> usize {
    code.as_ref().map_or(0, |c| c.spec.n())
}

/// Number of information bits, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_code_k(code: *const PsCode) -> usize {
    code.as_ref().map_or(0, |c| c.spec.k())
}

/// Encodes `k` information bits (values 0/1) into `n` codeword bits.
///
/// # Safety
/// `info` must point to `info_len` bytes, `codeword` to `cw_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn ps_code_encode(
    code: *const PsCode,
    info: *const u8,
    info_len: usize,
    codeword: *mut u8,
    cw_len: usize,
) -> PsStatus {
    guard(|| {
        let (Some(code), false) = (code.as_ref(), info.is_null()) else {
            return fail(PsStatus::NullPointer, "code or info is null");
        };
        let info = slice::from_raw_parts(info, info_len);
        if info.iter().any(|&b| b > 1) {
            return fail(PsStatus::InvalidArgument, "information bits must be 0 or 1");
        }
        let out = match out_slice(codeword, cw_len, code.spec.n(), "codeword") {
            Ok(o) => o,
            Err(s) => return s,
        };
        match code.spec.encode_info(info) {
            Ok(c) => {
                out.copy_from_slice(&c);
                PsStatus::Ok
            }
            Err(e) => fail(PsStatus::CodeError, e.to_string()),
        }
    })
}

/// Creates a decoder for `code` (the code is copied; the handle may be
/// freed afterwards).
///
/// # Safety
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_decoder_new(
    code: *const PsCode,
    list_size: usize,
    mode: PsMode,
    kind: PsDecoderKind,
    out: *mut *mut PsDecoder,
) -> PsStatus {
    guard(|| {
        let (Some(code), false) = (code.as_ref(), out.is_null()) else {
            return fail(PsStatus::NullPointer, "code or out is null");
        };
        if list_size == 0 {
            return fail(PsStatus::InvalidArgument, "list size must be at least 1");
        }
        let mode = match mode {
            PsMode::Exact => ArithMode::Exact,
            PsMode::HardwareFriendly => ArithMode::Hwf,
        };
        *out = Box::into_raw(Box::new(PsDecoder { spec: code.spec.clone(), list_size, mode, kind }));
        PsStatus::Ok
    })
}

/// # Safety
/// `dec` must be null or a handle from `ps_decoder_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_decoder_free(dec: *mut PsDecoder) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Decodes one block of `n` channel LLRs (positive favours bit 0).
///
/// Writes the best candidate's `k` information bits and `n` codeword bits.
/// `app_llrs` (length `n`) and `block_error` (approximate probability that
/// the decision is wrong) are optional and may be null.
///
/// # Safety
/// All non-null pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn ps_decoder_decode(
    dec: *const PsDecoder,
    llrs: *const f64,
    llr_len: usize,
    info: *mut u8,
    info_len: usize,
    codeword: *mut u8,
    cw_len: usize,
    app_llrs: *mut f64,
    app_len: usize,
    block_error: *mut f64,
) -> PsStatus {
    guard(|| {
        let (Some(dec), false) = (dec.as_ref(), llrs.is_null()) else {
            return fail(PsStatus::NullPointer, "decoder or llrs is null");
        };
        let (n, k) = (dec.spec.n(), dec.spec.k());
        if llr_len != n {
            return fail(PsStatus::InvalidArgument, format!("expected {n} LLRs, got {llr_len}"));
        }
        let llrs = slice::from_raw_parts(llrs, llr_len);
        if llrs.iter().any(|x| x.is_nan()) {
            return fail(PsStatus::InvalidArgument, "LLRs contain NaN");
        }
        let info_out = match out_slice(info, info_len, k, "info") {
            Ok(o) => o,
            Err(s) => return s,
        };
        let cw_out = match out_slice(codeword, cw_len, n, "codeword") {
            Ok(o) => o,
            Err(s) => return s,
        };
        let app_out = if app_llrs.is_null() {
            None
        } else {
            match out_slice(app_llrs, app_len, n, "app_llrs") {
                Ok(o) => Some(o),
                Err(s) => return s,
            }
        };
        let res = match dec.kind {
            PsDecoderKind::SoFscl => so_fscl_decode(llrs, &dec.spec, dec.list_size, dec.mode),
            PsDecoderKind::SoScl => so_scl_decode(llrs, &dec.spec, dec.list_size, dec.mode),
        };
        let res = match res {
            Ok(r) => r,
            Err(e) => return fail(PsStatus::DecodeError, e.to_string()),
        };
        let best = res.best();
        info_out.copy_from_slice(&dec.spec.extract_info(&best.u));
        cw_out.copy_from_slice(&best.codeword);
        if let Some(a) = app_out {
            a.copy_from_slice(&res.app_llrs);
        }
        if !block_error.is_null() {
            *block_error = polar_sofscl::soft_output::approx_block_error(&res.candidates, res.lambda_t);
        }
        PsStatus::Ok
    })
}
