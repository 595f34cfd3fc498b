//! C interface: parse a problem once, run commands on it, read JSON reports.
//!
//! Handles are opaque and owned by the caller. Strings returned by this
//! library must be released with [`hderlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hderlab::cli::{run_problem, Command, Limits, Problem, Report, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};
use hderlab::Error;

/// Status of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HderlabStatus {
    Ok = 0,
    /// The command ran and reported a mathematical negative.
    Negative = 1,
    /// Malformed problem, bad arguments or size limit.
    InputError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// A parsed problem file.
pub struct HderlabProblem {
    problem: Problem,
    limits: Limits,
}

/// Outcome of one command.
pub struct HderlabReport {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg.into()));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> HderlabStatus {
    if e.is_input_error() {
        HderlabStatus::InputError
    } else {
        HderlabStatus::Negative
    }
}

fn status_of_code(code: i32) -> HderlabStatus {
    match code {
        EXIT_OK => HderlabStatus::Ok,
        EXIT_NEGATIVE => HderlabStatus::Negative,
        EXIT_INPUT => HderlabStatus::InputError,
        _ => HderlabStatus::Panic,
    }
}

fn guarded(f: impl FnOnce() -> HderlabStatus) -> HderlabStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            HderlabStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, HderlabStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(HderlabStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        HderlabStatus::InvalidUtf8
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Parses a problem document. Size limits come from `HDERLAB_MAX_DIM`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hderlab_problem_from_json(json: *const c_char, out: *mut *mut HderlabProblem) -> HderlabStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return HderlabStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let json = match text(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let parsed = Limits::from_env().and_then(|limits| Problem::parse(json, &limits).map(|p| (p, limits)));
        match parsed {
            Ok((problem, limits)) => {
                *out = Box::into_raw(Box::new(HderlabProblem { problem, limits }));
                HderlabStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                status_of(&e)
            }
        }
    })
}

/// # Safety
/// `problem` must come from [`hderlab_problem_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn hderlab_problem_free(problem: *mut HderlabProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs `command` (a CLI subcommand name such as `"cohomology"`) with
/// `nargs` extra flags, e.g. `{"--degree", "2"}`. A report is produced
/// whenever the command could be parsed, including for negative outcomes;
/// the return value mirrors the CLI exit code.
///
/// # Safety
/// `args` must point to `nargs` NUL-terminated strings (or be null when
/// `nargs` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hderlab_run(
    problem: *const HderlabProblem,
    command: *const c_char,
    args: *const *const c_char,
    nargs: usize,
    out: *mut *mut HderlabReport,
) -> HderlabStatus {
    guarded(|| {
        if problem.is_null() || out.is_null() || (args.is_null() && nargs > 0) {
            set_error("null pointer argument");
            return HderlabStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let command = match text(command) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let mut words = Vec::with_capacity(nargs);
        for i in 0..nargs {
            match text(*args.add(i)) {
                Ok(t) => words.push(t),
                Err(s) => return s,
            }
        }
        let cmd = match Command::from_words(command, &words) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return HderlabStatus::InputError;
            }
        };
        let p = &*problem;
        let report = run_problem(&cmd, &p.problem, &p.limits);
        let status = status_of_code(report.exit_code);
        if !report.ok {
            if let Some(msg) = report.violations.first().and_then(|v| v.get("message")).and_then(|m| m.as_str()) {
                set_error(msg);
            }
        }
        *out = Box::into_raw(Box::new(HderlabReport { report }));
        status
    })
}

/// The report as pretty-printed JSON; free with [`hderlab_string_free`].
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hderlab_report_json(report: *const HderlabReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => into_c_string(r.report.to_json_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hderlab_report_ok(report: *const HderlabReport) -> bool {
    report.as_ref().is_some_and(|r| r.report.ok)
}

/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hderlab_report_exit_code(report: *const HderlabReport) -> i32 {
    report.as_ref().map_or(EXIT_INPUT, |r| r.report.exit_code)
}

/// # Safety
/// `report` must come from [`hderlab_run`] or be null.
#[no_mangle]
pub unsafe extern "C" fn hderlab_report_free(report: *mut HderlabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// `dim H^degree` with the problem's bimodule (adjoint when none is given).
///
/// # Safety
/// `problem` must be a live handle; `betti` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hderlab_cohomology_betti(
    problem: *const HderlabProblem,
    degree: usize,
    betti: *mut usize,
) -> HderlabStatus {
    guarded(|| {
        let (Some(p), false) = (problem.as_ref(), betti.is_null()) else {
            set_error("null pointer argument");
            return HderlabStatus::NullPointer;
        };
        let cmd = match Command::from_words("cohomology", &["--degree".to_string(), degree.to_string()]) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return HderlabStatus::InputError;
            }
        };
        let report = run_problem(&cmd, &p.problem, &p.limits);
        match report.results.get("betti").and_then(|b| b.as_u64()) {
            Some(b) if report.ok => {
                *betti = b as usize;
                HderlabStatus::Ok
            }
            _ => {
                let msg = report.violations.first().and_then(|v| v.get("message")).and_then(|m| m.as_str());
                set_error(msg.unwrap_or("cohomology failed"));
                status_of_code(report.exit_code)
            }
        }
    })
}

/// Message for the most recent failure on this thread, or null. Free with
/// [`hderlab_string_free`].
#[no_mangle]
pub extern "C" fn hderlab_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone()).map_or(ptr::null_mut(), into_c_string)
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn hderlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn hderlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
