//! C ABI for the longroot library.
//!
//! Groups are opaque handles created from the same JSON descriptors the
//! CLI consumes; every run returns an exit code matching the CLI
//! convention (0 positive, 2 negative, 3 stalled, 64 bad input) plus a
//! JSON-lines transcript string the caller must free with
//! [`lr_string_free`].

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use longroot::cli::{self, RunConfig};
use longroot::matgrp::GroupSpec;

/// Opaque group handle: a validated descriptor.
pub struct LrGroup {
    spec: GroupSpec,
}

/// Status codes for handle construction and argument validation.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum LrStatus {
    LrOk = 0,
    LrParseError = 1,
    LrUnsupportedFamily = 2,
    LrBadInput = 3,
    LrNullArgument = 4,
}

/// Run outcomes, mirroring the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum LrVerdict {
    LrPositive = 0,
    LrNegative = 2,
    LrStalled = 3,
    LrInvalid = 64,
}

fn verdict_from_exit(code: i32) -> LrVerdict {
    match code {
        0 => LrVerdict::LrPositive,
        2 => LrVerdict::LrNegative,
        3 => LrVerdict::LrStalled,
        _ => LrVerdict::LrInvalid,
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn lr_version() -> *const c_char {
    concat!("longroot ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a JSON group descriptor into an opaque handle. Returns NULL on
/// error and, when `status` is non-NULL, writes the reason there.
///
/// # Safety
/// `descriptor_json` must be a valid NUL-terminated C string; `status`
/// must be NULL or point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn lr_group_from_json(
    descriptor_json: *const c_char,
    status: *mut LrStatus,
) -> *mut LrGroup {
    let set = |s: LrStatus| {
        if !status.is_null() {
            unsafe { *status = s };
        }
    };
    if descriptor_json.is_null() {
        set(LrStatus::LrNullArgument);
        return ptr::null_mut();
    }
    let text = match unsafe { CStr::from_ptr(descriptor_json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set(LrStatus::LrParseError);
            return ptr::null_mut();
        }
    };
    match cli::parse_descriptor(text) {
        Ok(spec) => {
            set(LrStatus::LrOk);
            Box::into_raw(Box::new(LrGroup { spec }))
        }
        Err(longroot::Error::UnsupportedFamily(_)) => {
            set(LrStatus::LrUnsupportedFamily);
            ptr::null_mut()
        }
        Err(longroot::Error::ParseError(_)) => {
            set(LrStatus::LrParseError);
            ptr::null_mut()
        }
        Err(_) => {
            set(LrStatus::LrBadInput);
            ptr::null_mut()
        }
    }
}

/// Frees a group handle; NULL is accepted.
///
/// # Safety
/// `group` must be NULL or a pointer from [`lr_group_from_json`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn lr_group_free(group: *mut LrGroup) {
    if !group.is_null() {
        drop(unsafe { Box::from_raw(group) });
    }
}

/// Exact order of the described group as a decimal string; free with
/// [`lr_string_free`]. NULL on error.
///
/// # Safety
/// `group` must be a live handle from [`lr_group_from_json`].
#[no_mangle]
pub unsafe extern "C" fn lr_group_order(group: *const LrGroup) -> *mut c_char {
    if group.is_null() {
        return ptr::null_mut();
    }
    let spec = &unsafe { &*group }.spec;
    match longroot::matgrp::group_order(spec) {
        Ok(o) => CString::new(o.to_string())
            .map(CString::into_raw)
            .unwrap_or(ptr::null_mut()),
        Err(_) => ptr::null_mut(),
    }
}

fn run(
    group: *const LrGroup,
    command: &str,
    seed: u64,
    epsilon: f64,
    verify: bool,
    transcript_out: *mut *mut c_char,
) -> LrVerdict {
    if group.is_null() {
        return LrVerdict::LrInvalid;
    }
    let spec = unsafe { &(*group).spec };
    let rc = RunConfig {
        seed,
        epsilon,
        verify,
        ..RunConfig::default()
    };
    if rc.validate().is_err() {
        return LrVerdict::LrInvalid;
    }
    let out = cli::dispatch(command, spec, &rc);
    if !transcript_out.is_null() {
        let text = out.transcript.to_jsonl();
        let cstr = CString::new(text).unwrap_or_default();
        unsafe { *transcript_out = cstr.into_raw() };
    }
    verdict_from_exit(out.exit_code)
}

/// Runs the long-root construction. On success returns LrPositive; when
/// `verify` is set the white-box report gates the verdict. When
/// `transcript_out` is non-NULL it receives a JSON-lines transcript to be
/// freed with [`lr_string_free`].
///
/// # Safety
/// `group` must be a live handle; `transcript_out` must be NULL or point
/// to writable pointer storage.
#[no_mangle]
pub unsafe extern "C" fn lr_find_long_root(
    group: *const LrGroup,
    seed: u64,
    epsilon: f64,
    verify: bool,
    transcript_out: *mut *mut c_char,
) -> LrVerdict {
    run(group, "find-long-root", seed, epsilon, verify, transcript_out)
}

/// Runs p-core recognition: LrPositive means a verified nontrivial
/// p-core element was produced (this answer is always correct);
/// LrNegative means "possibly trivial".
///
/// # Safety
/// As for [`lr_find_long_root`].
#[no_mangle]
pub unsafe extern "C" fn lr_check_pcore(
    group: *const LrGroup,
    seed: u64,
    epsilon: f64,
    transcript_out: *mut *mut c_char,
) -> LrVerdict {
    run(group, "check-pcore", seed, epsilon, false, transcript_out)
}

/// Runs the named pipeline ("find-long-root", "check-pcore", "verify",
/// "stats", "bench") with CLI semantics.
///
/// # Safety
/// `group` must be a live handle; `command` a valid C string;
/// `transcript_out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn lr_dispatch(
    group: *const LrGroup,
    command: *const c_char,
    seed: u64,
    epsilon: f64,
    verify: bool,
    transcript_out: *mut *mut c_char,
) -> LrVerdict {
    if command.is_null() {
        return LrVerdict::LrInvalid;
    }
    let Ok(cmd) = (unsafe { CStr::from_ptr(command) }).to_str() else {
        return LrVerdict::LrInvalid;
    };
    run(group, cmd, seed, epsilon, verify, transcript_out)
}

/// Frees a string returned by this library; NULL is accepted.
///
/// # Safety
/// `s` must be NULL or a string pointer returned by this library that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn lr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
