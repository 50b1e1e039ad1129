//! C interface to the MinTEJ editor core.
//!
//! Every function returns a [`MintejStatus`]; on failure the message is kept
//! per thread and read with [`mintej_last_error`]. Strings handed out by the
//! library are owned by the caller and released with [`mintej_string_free`].
//! Handles are opaque and released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mintej::fms;
use mintej::interp::{self, RunError};
use mintej::seqbuffer::{LineBuffer, LineRange};
use mintej::shell;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MintejStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Syntax = 4,
    Runtime = 5,
    Range = 6,
    Panic = 7,
}

/// Editable line buffer.
pub struct MintejBuffer {
    inner: LineBuffer,
}

/// Outcome of running a program.
pub struct MintejRun {
    output: Vec<String>,
    error: Option<RunError>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MintejStatus, String);

type FfiResult<T> = Result<T, Failure>;

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> MintejStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MintejStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MintejStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(MintejStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MintejStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| Failure(MintejStatus::NullArgument, format!("{what} is null")))
}

unsafe fn buffer_arg<'a>(p: *mut MintejBuffer) -> FfiResult<&'a mut MintejBuffer> {
    out_arg(p, "buffer")
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn range(start: usize, end: usize) -> FfiResult<LineRange> {
    LineRange::new(start, end).map_err(|e| Failure(MintejStatus::Range, e.to_string()))
}

fn range_status<E: std::fmt::Display>(r: Result<(), E>) -> FfiResult<()> {
    r.map_err(|e| Failure(MintejStatus::Range, e.to_string()))
}

/// Message of the last failure on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn mintej_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mintej_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads `text` into a new buffer.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_load(text: *const c_char, out: *mut *mut MintejBuffer) -> MintejStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let text = str_arg(text, "text")?;
        *out = Box::into_raw(Box::new(MintejBuffer {
            inner: LineBuffer::load(text),
        }));
        Ok(())
    })
}

/// # Safety
/// `buf` must come from [`mintej_buffer_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_free(buf: *mut MintejBuffer) {
    if !buf.is_null() {
        drop(Box::from_raw(buf));
    }
}

/// Number of lines, or 0 for a null handle.
///
/// # Safety
/// `buf` must be null or a live buffer.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_line_count(buf: *const MintejBuffer) -> usize {
    buf.as_ref().map_or(0, |b| b.inner.len())
}

/// Deletes lines `start..=end` (1-based).
///
/// # Safety
/// `buf` must be a live buffer.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_delete(buf: *mut MintejBuffer, start: usize, end: usize) -> MintejStatus {
    guard(|| {
        let b = buffer_arg(buf)?;
        range_status(b.inner.delete(range(start, end)?))
    })
}

/// Copies lines `start..=end` so the copy begins at line `dest`.
///
/// # Safety
/// `buf` must be a live buffer.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_copy(buf: *mut MintejBuffer, start: usize, end: usize, dest: usize) -> MintejStatus {
    guard(|| {
        let b = buffer_arg(buf)?;
        range_status(b.inner.copy(range(start, end)?, dest))
    })
}

/// Inserts an empty line at `at`.
///
/// # Safety
/// `buf` must be a live buffer.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_insert_blank(buf: *mut MintejBuffer, at: usize) -> MintejStatus {
    guard(|| {
        let b = buffer_arg(buf)?;
        range_status(b.inner.insert_blank(at))
    })
}

/// Comments (`uncomment == 0`) or uncomments lines `start..=end`.
///
/// # Safety
/// `buf` must be a live buffer.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_comment(
    buf: *mut MintejBuffer,
    start: usize,
    end: usize,
    uncomment: c_int,
) -> MintejStatus {
    guard(|| {
        let b = buffer_arg(buf)?;
        let r = range(start, end)?;
        range_status(if uncomment == 0 { b.inner.comment(r) } else { b.inner.uncomment(r) })
    })
}

/// File text of the buffer, or its numbered listing when `numbered` is non-zero.
///
/// # Safety
/// `buf` must be a live buffer and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mintej_buffer_render(
    buf: *const MintejBuffer,
    numbered: c_int,
    out: *mut *mut c_char,
) -> MintejStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let b = buf
            .as_ref()
            .ok_or_else(|| Failure(MintejStatus::NullArgument, "buffer is null".into()))?;
        let text = if numbered != 0 {
            b.inner.numbered().join("\n")
        } else {
            b.inner.render()
        };
        *out = to_c(text);
        Ok(())
    })
}

/// Parses and runs `source`. A handle is produced even when the program
/// fails; the status then reports the failure kind.
///
/// # Safety
/// `source` and `file` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mintej_run_program(
    source: *const c_char,
    file: *const c_char,
    out: *mut *mut MintejRun,
) -> MintejStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let source = str_arg(source, "source")?;
        let file = str_arg(file, "file")?;
        let outcome = interp::run_program(source, file);
        let failure = outcome.error.as_ref().map(|e| {
            let status = match e {
                RunError::Parse(_) => MintejStatus::Syntax,
                RunError::Runtime(_) => MintejStatus::Runtime,
            };
            Failure(status, e.to_string())
        });
        *out = Box::into_raw(Box::new(MintejRun {
            output: outcome.output,
            error: outcome.error,
        }));
        failure.map_or(Ok(()), Err)
    })
}

/// Program output, one line per `println`, joined with newlines.
///
/// # Safety
/// `run` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mintej_run_output(run: *const MintejRun, out: *mut *mut c_char) -> MintejStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = run
            .as_ref()
            .ok_or_else(|| Failure(MintejStatus::NullArgument, "run is null".into()))?;
        *out = to_c(r.output.join("\n"));
        Ok(())
    })
}

/// Error message of the run, or null when it succeeded. Line of the error
/// is stored in `line` when non-null.
///
/// # Safety
/// `run` must be a live handle, `out` a valid pointer and `line` valid or null.
#[no_mangle]
pub unsafe extern "C" fn mintej_run_error(run: *const MintejRun, line: *mut u32, out: *mut *mut c_char) -> MintejStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r = run
            .as_ref()
            .ok_or_else(|| Failure(MintejStatus::NullArgument, "run is null".into()))?;
        *out = r.error.as_ref().map_or(ptr::null_mut(), |e| to_c(e.to_string()));
        if let (Some(e), Some(l)) = (&r.error, line.as_mut()) {
            *l = e.line();
        }
        Ok(())
    })
}

/// # Safety
/// `run` must come from [`mintej_run_program`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mintej_run_free(run: *mut MintejRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Feeds `script` (one answer per line) to the editor rooted at `workdir`
/// and returns the transcript with the directory shown as `<WORKDIR>`.
///
/// # Safety
/// `script` and `workdir` must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mintej_replay(
    script: *const c_char,
    workdir: *const c_char,
    out: *mut *mut c_char,
) -> MintejStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let script = str_arg(script, "script")?;
        let dir = Path::new(str_arg(workdir, "workdir")?)
            .canonicalize()
            .map_err(|e| Failure(MintejStatus::Io, e.to_string()))?;
        let r = shell::replay(script, &dir).map_err(|e| Failure(MintejStatus::Io, e.to_string()))?;
        *out = to_c(shell::normalize_workdir(&r.transcript, &dir).join("\n"));
        Ok(())
    })
}

/// Compares two text files. `identical` receives 1 or 0 and `report` the
/// printed comparison.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `identical` and `report` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mintej_compare_files(
    a: *const c_char,
    b: *const c_char,
    identical: *mut c_int,
    report: *mut *mut c_char,
) -> MintejStatus {
    guard(|| {
        let identical = out_arg(identical, "identical")?;
        let report = out_arg(report, "report")?;
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        let r = fms::compare_files(Path::new(a), Path::new(b)).map_err(|e| Failure(MintejStatus::Io, e.to_string()))?;
        *identical = c_int::from(r.identical);
        *report = to_c(r.lines().join("\n"));
        Ok(())
    })
}
