//! C interface to the phonoparse parser.
//!
//! A `PpSession` is an opaque handle owning a loaded grammar and lexicon.
//! Every call returns a [`PpStatus`]; on failure the message is available
//! from [`pp_last_error`] on the same thread until the next call. Strings
//! handed out through `out` parameters belong to the caller and are
//! released with [`pp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use phonoparse::{Error, OutputFormat, Session};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed command text.
    Syntax = 3,
    /// A command was rejected, or the grammar is inconsistent.
    Grammar = 4,
    /// The word contains characters the alphabet cannot spell.
    Untranslatable = 5,
    /// Analysis or synthesis failed.
    Engine = 6,
    Io = 7,
    /// A bug inside the library; the session should be discarded.
    Panic = 8,
}

/// Opaque session handle.
pub struct PpSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(v) => v,
    Err(_) => panic!("version string"),
};

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PpStatus {
    use phonoparse::alphabet::AlphabetError as A;
    match e {
        Error::Syntax { .. } => PpStatus::Syntax,
        Error::Alphabet(A::UntranslatableAt(_) | A::Empty | A::BoundaryAtEdge) => PpStatus::Untranslatable,
        Error::Alphabet(_) | Error::Feature(_) | Error::Rule(_) | Error::Command(_) => PpStatus::Grammar,
        Error::Analysis(_) | Error::Synthesis(_) | Error::TooLong { .. } => PpStatus::Engine,
        Error::Io(_) => PpStatus::Io,
    }
}

struct Failure(PpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal error: {msg}"));
            PpStatus::Panic
        }
    }
}

unsafe fn session<'a>(s: *mut PpSession) -> Result<&'a mut Session, Failure> {
    // SAFETY: the caller passes a handle from `pp_session_new` that has not been freed.
    unsafe { s.as_mut() }
        .map(|s| &mut s.inner)
        .ok_or_else(|| Failure(PpStatus::NullArgument, "null session".into()))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(PpStatus::NullArgument, format!("null {what}")));
    }
    // SAFETY: non-null and NUL-terminated per the contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure(PpStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn hand_out(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Ok(());
    }
    let c = CString::new(s).map_err(|_| Failure(PpStatus::Engine, "output contains NUL".into()))?;
    // SAFETY: `out` is non-null and points to writable storage.
    unsafe { *out = c.into_raw() };
    Ok(())
}

unsafe fn clear(out: *mut *mut c_char) {
    if !out.is_null() {
        // SAFETY: as in `hand_out`.
        unsafe { *out = ptr::null_mut() };
    }
}

/// Creates an empty session. Returns null only if allocation panics.
#[no_mangle]
pub extern "C" fn pp_session_new() -> *mut PpSession {
    catch_unwind(|| Box::into_raw(Box::new(PpSession { inner: Session::new() }))).unwrap_or(ptr::null_mut())
}

/// Destroys a session. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle from [`pp_session_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_session_free(s: *mut PpSession) {
    if !s.is_null() {
        // SAFETY: ownership returns to Rust exactly once.
        let _ = catch_unwind(AssertUnwindSafe(|| drop(unsafe { Box::from_raw(s) })));
    }
}

/// Runs a string of commands. If `out` is non-null it receives what the
/// commands printed, or null on failure.
///
/// # Safety
/// `s` must be a live handle, `commands` a NUL-terminated string, and
/// `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn pp_session_run(s: *mut PpSession, commands: *const c_char, out: *mut *mut c_char) -> PpStatus {
    unsafe { clear(out) };
    guard(|| unsafe {
        let session = session(s)?;
        let printed = session.run(text(commands, "commands")?)?;
        hand_out(out, printed)
    })
}

/// Reads a command file and runs it, like [`pp_session_run`].
///
/// # Safety
/// As for [`pp_session_run`], with `path` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn pp_session_run_file(s: *mut PpSession, path: *const c_char, out: *mut *mut c_char) -> PpStatus {
    unsafe { clear(out) };
    guard(|| unsafe {
        let session = session(s)?;
        let path = text(path, "path")?;
        let src = std::fs::read_to_string(path).map_err(|e| Failure(PpStatus::Io, format!("{path}: {e}")))?;
        let printed = session.run(&src)?;
        hand_out(out, printed)
    })
}

/// Parses a surface word. `out` receives the trace, if tracing is on,
/// followed by the word analyses, in the session's output format.
///
/// # Safety
/// As for [`pp_session_run`], with `word` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pp_session_parse(s: *mut PpSession, word: *const c_char, out: *mut *mut c_char) -> PpStatus {
    unsafe { clear(out) };
    guard(|| unsafe {
        let session = session(s)?;
        let mut printed = String::new();
        session.morph_and_lookup(text(word, "word")?, &mut printed)?;
        hand_out(out, printed)
    })
}

/// Derives the surface form of a lexical shape.
///
/// # Safety
/// As for [`pp_session_run`], with `shape` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pp_session_generate(s: *mut PpSession, shape: *const c_char, out: *mut *mut c_char) -> PpStatus {
    unsafe { clear(out) };
    guard(|| unsafe {
        let session = session(s)?;
        let surface = session.generate(text(shape, "shape")?)?;
        hand_out(out, surface)
    })
}

/// Chooses between the bracket notation (false) and JSON lines (true).
///
/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_session_set_structured(s: *mut PpSession, structured: bool) -> PpStatus {
    guard(|| unsafe {
        session(s)?.format = if structured { OutputFormat::Structured } else { OutputFormat::Text };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned through an `out` parameter. Null is ignored.
///
/// # Safety
/// `p` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_string_free(p: *mut c_char) {
    if !p.is_null() {
        // SAFETY: the pointer came from `CString::into_raw`.
        drop(unsafe { CString::from_raw(p) });
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    VERSION.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_status() {
        assert_eq!(status_of(&Error::Command("x".into())), PpStatus::Grammar);
        assert_eq!(
            status_of(&Error::Syntax { line: 1, column: 2, message: "x".into() }),
            PpStatus::Syntax
        );
        assert_eq!(status_of(&Error::TooLong { len: 9, max: 8 }), PpStatus::Engine);
    }

    #[test]
    fn panics_are_contained() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, PpStatus::Panic);
        let msg = unsafe { CStr::from_ptr(pp_last_error()) }.to_str().unwrap();
        assert_eq!(msg, "internal error: boom");
    }

    #[test]
    fn version_is_the_package_version() {
        let v = unsafe { CStr::from_ptr(pp_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
