//! C ABI over [`lwebb::cli::Session`].
//!
//! Handles are opaque. Every fallible call returns an [`LwebbStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`lwebb_last_error_message`]. Strings returned as `char *` are owned by
//! the caller and released with [`lwebb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use lwebb::cli::{render_solution, Report, Session, SessionConfig, SessionError, Status};
use lwebb::{LoadError, SolveError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LwebbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    LoadError = 4,
    SolveError = 5,
    /// Wall-clock cap or memory guard of an unbounded query.
    ResourceLimit = 6,
    IoError = 7,
    OutOfRange = 8,
    Panic = 9,
}

/// Outcome of a query that ran to completion. Values match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LwebbOutcome {
    Success = 0,
    Failure = 1,
    BoundExhausted = 2,
}

/// A query session: resolution map, loaded pages and plain program.
pub struct LwebbSession {
    inner: Session,
}

/// Answers of one query.
pub struct LwebbResult {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', "\\0");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn session_status(e: &SessionError) -> LwebbStatus {
    match e {
        SessionError::Parse(_) => LwebbStatus::ParseError,
        SessionError::Load(LoadError::Parse(_)) => LwebbStatus::ParseError,
        SessionError::Load(_) | SessionError::Builtin { .. } => LwebbStatus::LoadError,
        SessionError::Solve(e) if e.is_resource() => LwebbStatus::ResourceLimit,
        SessionError::Solve(SolveError::Load(_)) => LwebbStatus::LoadError,
        SessionError::Solve(_) => LwebbStatus::SolveError,
        SessionError::Io { .. } => LwebbStatus::IoError,
    }
}

struct Fail(LwebbStatus, String);

impl From<SessionError> for Fail {
    fn from(e: SessionError) -> Self {
        Fail(session_status(&e), e.to_string())
    }
}

/// Runs `f`, records any failure and turns panics into `Panic`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LwebbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            LwebbStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LwebbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(LwebbStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(LwebbStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn session_arg<'a>(s: *mut LwebbSession) -> Result<&'a mut Session, Fail> {
    s.as_mut().map(|s| &mut s.inner).ok_or_else(|| Fail(LwebbStatus::NullPointer, "session is null".into()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "\\0")).map_or(ptr::null_mut(), CString::into_raw)
}

/// New session with default settings: no map, unbounded queries, one
/// answer per query, 30 s wall cap. Returns null on failure.
#[no_mangle]
pub extern "C" fn lwebb_session_new() -> *mut LwebbSession {
    let mut out = ptr::null_mut();
    guard(|| {
        let inner = Session::new(SessionConfig::default())?;
        out = Box::into_raw(Box::new(LwebbSession { inner }));
        Ok(())
    });
    out
}

/// # Safety
/// `s` is null or a handle from `lwebb_session_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_free(s: *mut LwebbSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Sets the resolution map file; null clears it.
///
/// # Safety
/// `s` is a live session; `path` is null or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_set_map_file(s: *mut LwebbSession, path: *const c_char) -> LwebbStatus {
    guard(|| {
        let session = session_arg(s)?;
        let path = if path.is_null() { None } else { Some(PathBuf::from(str_arg(path, "path")?)) };
        session.set_map(path)?;
        Ok(())
    })
}

/// Default bound for queries that give none; a negative value means unbounded.
///
/// # Safety
/// `s` is a live session.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_set_default_bound(s: *mut LwebbSession, bound: i64) -> LwebbStatus {
    guard(|| {
        session_arg(s)?.config_mut().default_bound = u64::try_from(bound).ok();
        Ok(())
    })
}

/// Answers collected per query; 0 is treated as 1.
///
/// # Safety
/// `s` is a live session.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_set_max_solutions(s: *mut LwebbSession, n: usize) -> LwebbStatus {
    guard(|| {
        session_arg(s)?.config_mut().max_solutions = n.max(1);
        Ok(())
    })
}

/// Wall-clock cap for unbounded queries, in milliseconds.
///
/// # Safety
/// `s` is a live session.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_set_wall_cap_ms(s: *mut LwebbSession, ms: u64) -> LwebbStatus {
    guard(|| {
        session_arg(s)?.config_mut().wall_cap_ms = ms;
        Ok(())
    })
}

/// # Safety
/// `s` is a live session.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_set_occurs_check(s: *mut LwebbSession, on: bool) -> LwebbStatus {
    guard(|| {
        session_arg(s)?.config_mut().occurs_check = on;
        Ok(())
    })
}

/// Records every rule application of each answer.
///
/// # Safety
/// `s` is a live session.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_set_trace(s: *mut LwebbSession, on: bool) -> LwebbStatus {
    guard(|| {
        session_arg(s)?.config_mut().trace = on;
        Ok(())
    })
}

/// Resolves a page (e.g. `www.d.com/lists`); later queries run inside it.
///
/// # Safety
/// `s` is a live session; `origin` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_load(s: *mut LwebbSession, origin: *const c_char) -> LwebbStatus {
    guard(|| {
        let session = session_arg(s)?;
        session.load(str_arg(origin, "origin")?)?;
        Ok(())
    })
}

/// Appends plain clauses to the session program.
///
/// # Safety
/// `s` is a live session; `text` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_add_program(s: *mut LwebbSession, text: *const c_char) -> LwebbStatus {
    guard(|| {
        let session = session_arg(s)?;
        session.add_program_text(str_arg(text, "text")?, "<program>")?;
        Ok(())
    })
}

/// Runs a query such as `?- (100) p(X).` (the `?-` and the final `.` are
/// optional). On `LWEBB_STATUS_OK`, `*out` holds a result to release with
/// `lwebb_result_free`; otherwise it is set to null.
///
/// # Safety
/// `s` is a live session, `query` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lwebb_session_query(
    s: *mut LwebbSession,
    query: *const c_char,
    out: *mut *mut LwebbResult,
) -> LwebbStatus {
    if out.is_null() {
        set_error("out is null");
        return LwebbStatus::NullPointer;
    }
    *out = ptr::null_mut();
    guard(|| {
        let session = session_arg(s)?;
        let report = session.run(str_arg(query, "query")?)?;
        *out = Box::into_raw(Box::new(LwebbResult { report }));
        Ok(())
    })
}

/// # Safety
/// `r` is null or a result not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lwebb_result_free(r: *mut LwebbResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` is a live result.
#[no_mangle]
pub unsafe extern "C" fn lwebb_result_outcome(r: *const LwebbResult) -> LwebbOutcome {
    match r.as_ref().map(|r| r.report.status) {
        Some(Status::Success) => LwebbOutcome::Success,
        Some(Status::BoundExhausted) => LwebbOutcome::BoundExhausted,
        _ => LwebbOutcome::Failure,
    }
}

/// Number of answers held by the result.
///
/// # Safety
/// `r` is null or a live result.
#[no_mangle]
pub unsafe extern "C" fn lwebb_result_count(r: *const LwebbResult) -> usize {
    r.as_ref().map_or(0, |r| r.report.solutions.len())
}

/// Proof length of answer `i`.
///
/// # Safety
/// `r` is a live result; `len` is writable.
#[no_mangle]
pub unsafe extern "C" fn lwebb_result_length(r: *const LwebbResult, i: usize, len: *mut u64) -> LwebbStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| Fail(LwebbStatus::NullPointer, "result is null".into()))?;
        let len = len.as_mut().ok_or_else(|| Fail(LwebbStatus::NullPointer, "len is null".into()))?;
        let s = r.report.solutions.get(i).ok_or_else(|| out_of_range(i))?;
        *len = s.length.0;
        Ok(())
    })
}

fn out_of_range(i: usize) -> Fail {
    Fail(LwebbStatus::OutOfRange, format!("no answer {i}"))
}

/// Value of query variable `name` in answer `i`, rendered as a term. Null
/// when the variable is unbound or the arguments are invalid.
///
/// # Safety
/// `r` is a live result; `name` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lwebb_result_binding(r: *const LwebbResult, i: usize, name: *const c_char) -> *mut c_char {
    let mut value = ptr::null_mut();
    guard(|| {
        let r = r.as_ref().ok_or_else(|| Fail(LwebbStatus::NullPointer, "result is null".into()))?;
        let name = str_arg(name, "name")?;
        let s = r.report.solutions.get(i).ok_or_else(|| out_of_range(i))?;
        let var = r.report.vars.iter().find(|v| v.name() == name);
        if let Some(t) = var.and_then(|v| s.answer.get(v)) {
            value = into_c_string(t.to_string());
        }
        Ok(())
    });
    value
}

/// Answer `i` as printed by the CLI: bindings, then the `yes` line.
///
/// # Safety
/// `r` is a live result.
#[no_mangle]
pub unsafe extern "C" fn lwebb_result_answer(r: *const LwebbResult, i: usize) -> *mut c_char {
    let mut text = ptr::null_mut();
    guard(|| {
        let r = r.as_ref().ok_or_else(|| Fail(LwebbStatus::NullPointer, "result is null".into()))?;
        let s = r.report.solutions.get(i).ok_or_else(|| out_of_range(i))?;
        text = into_c_string(render_solution(s, &r.report.vars, r.report.bounded));
        Ok(())
    });
    text
}

/// Whole result as printed by the CLI.
///
/// # Safety
/// `r` is a live result.
#[no_mangle]
pub unsafe extern "C" fn lwebb_result_render(r: *const LwebbResult) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| into_c_string(r.report.render()))
}

/// # Safety
/// `p` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lwebb_string_free(p: *mut c_char) {
    if !p.is_null() {
        drop(CString::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn lwebb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn lwebb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
