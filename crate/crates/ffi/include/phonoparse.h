#ifndef PHONOPARSE_H
#define PHONOPARSE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_ARGUMENT = 1,
  PP_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed command text.
   */
  PP_STATUS_SYNTAX = 3,
  /**
   * A command was rejected, or the grammar is inconsistent.
   */
  PP_STATUS_GRAMMAR = 4,
  /**
   * The word contains characters the alphabet cannot spell.
   */
  PP_STATUS_UNTRANSLATABLE = 5,
  /**
   * Analysis or synthesis failed.
   */
  PP_STATUS_ENGINE = 6,
  PP_STATUS_IO = 7,
  /**
   * A bug inside the library; the session should be discarded.
   */
  PP_STATUS_PANIC = 8,
} PpStatus;

/**
 * Opaque session handle.
 */
typedef struct PpSession PpSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an empty session. Returns null only if allocation panics.
 */
struct PpSession *pp_session_new(void);

/**
 * Destroys a session. Null is ignored.
 *
 * # Safety
 * `s` must be null or a handle from [`pp_session_new`] not yet freed.
 */
void pp_session_free(struct PpSession *s);

/**
 * Runs a string of commands. If `out` is non-null it receives what the
 * commands printed, or null on failure.
 *
 * # Safety
 * `s` must be a live handle, `commands` a NUL-terminated string, and
 * `out` null or writable.
 */
enum PpStatus pp_session_run(struct PpSession *s, const char *commands, char **out);

/**
 * Reads a command file and runs it, like [`pp_session_run`].
 *
 * # Safety
 * As for [`pp_session_run`], with `path` a NUL-terminated path.
 */
enum PpStatus pp_session_run_file(struct PpSession *s, const char *path, char **out);

/**
 * Parses a surface word. `out` receives the trace, if tracing is on,
 * followed by the word analyses, in the session's output format.
 *
 * # Safety
 * As for [`pp_session_run`], with `word` a NUL-terminated string.
 */
enum PpStatus pp_session_parse(struct PpSession *s, const char *word, char **out);

/**
 * Derives the surface form of a lexical shape.
 *
 * # Safety
 * As for [`pp_session_run`], with `shape` a NUL-terminated string.
 */
enum PpStatus pp_session_generate(struct PpSession *s, const char *shape, char **out);

/**
 * Chooses between the bracket notation (false) and JSON lines (true).
 *
 * # Safety
 * `s` must be a live handle.
 */
enum PpStatus pp_session_set_structured(struct PpSession *s, bool structured);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call on the same thread.
 */
const char *pp_last_error(void);

/**
 * Releases a string returned through an `out` parameter. Null is ignored.
 *
 * # Safety
 * `p` must be null or a string from this library not yet freed.
 */
void pp_string_free(char *p);

/**
 * Library version, statically allocated.
 */
const char *pp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHONOPARSE_H */
