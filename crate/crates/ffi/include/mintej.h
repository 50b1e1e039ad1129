#ifndef MINTEJ_H
#define MINTEJ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum MintejStatus {
  MINTEJ_STATUS_OK = 0,
  MINTEJ_STATUS_NULL_ARGUMENT = 1,
  MINTEJ_STATUS_INVALID_UTF8 = 2,
  MINTEJ_STATUS_IO = 3,
  MINTEJ_STATUS_SYNTAX = 4,
  MINTEJ_STATUS_RUNTIME = 5,
  MINTEJ_STATUS_RANGE = 6,
  MINTEJ_STATUS_PANIC = 7,
} MintejStatus;

/**
 * Editable line buffer.
 */
typedef struct MintejBuffer MintejBuffer;

/**
 * Outcome of running a program.
 */
typedef struct MintejRun MintejRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *mintej_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void mintej_string_free(char *s);

/**
 * Loads `text` into a new buffer.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MintejStatus mintej_buffer_load(const char *text, struct MintejBuffer **out);

/**
 * # Safety
 * `buf` must come from [`mintej_buffer_load`] and not be used afterwards.
 */
void mintej_buffer_free(struct MintejBuffer *buf);

/**
 * Number of lines, or 0 for a null handle.
 *
 * # Safety
 * `buf` must be null or a live buffer.
 */
size_t mintej_buffer_line_count(const struct MintejBuffer *buf);

/**
 * Deletes lines `start..=end` (1-based).
 *
 * # Safety
 * `buf` must be a live buffer.
 */
enum MintejStatus mintej_buffer_delete(struct MintejBuffer *buf, size_t start, size_t end);

/**
 * Copies lines `start..=end` so the copy begins at line `dest`.
 *
 * # Safety
 * `buf` must be a live buffer.
 */
enum MintejStatus mintej_buffer_copy(struct MintejBuffer *buf,
                                     size_t start,
                                     size_t end,
                                     size_t dest);

/**
 * Inserts an empty line at `at`.
 *
 * # Safety
 * `buf` must be a live buffer.
 */
enum MintejStatus mintej_buffer_insert_blank(struct MintejBuffer *buf, size_t at);

/**
 * Comments (`uncomment == 0`) or uncomments lines `start..=end`.
 *
 * # Safety
 * `buf` must be a live buffer.
 */
enum MintejStatus mintej_buffer_comment(struct MintejBuffer *buf,
                                        size_t start,
                                        size_t end,
                                        int uncomment);

/**
 * File text of the buffer, or its numbered listing when `numbered` is non-zero.
 *
 * # Safety
 * `buf` must be a live buffer and `out` a valid pointer.
 */
enum MintejStatus mintej_buffer_render(const struct MintejBuffer *buf, int numbered, char **out);

/**
 * Parses and runs `source`. A handle is produced even when the program
 * fails; the status then reports the failure kind.
 *
 * # Safety
 * `source` and `file` must be NUL-terminated strings and `out` a valid pointer.
 */
enum MintejStatus mintej_run_program(const char *source, const char *file, struct MintejRun **out);

/**
 * Program output, one line per `println`, joined with newlines.
 *
 * # Safety
 * `run` must be a live handle and `out` a valid pointer.
 */
enum MintejStatus mintej_run_output(const struct MintejRun *run, char **out);

/**
 * Error message of the run, or null when it succeeded. Line of the error
 * is stored in `line` when non-null.
 *
 * # Safety
 * `run` must be a live handle, `out` a valid pointer and `line` valid or null.
 */
enum MintejStatus mintej_run_error(const struct MintejRun *run, uint32_t *line, char **out);

/**
 * # Safety
 * `run` must come from [`mintej_run_program`] and not be used afterwards.
 */
void mintej_run_free(struct MintejRun *run);

/**
 * Feeds `script` (one answer per line) to the editor rooted at `workdir`
 * and returns the transcript with the directory shown as `<WORKDIR>`.
 *
 * # Safety
 * `script` and `workdir` must be NUL-terminated strings and `out` a valid pointer.
 */
enum MintejStatus mintej_replay(const char *script, const char *workdir, char **out);

/**
 * Compares two text files. `identical` receives 1 or 0 and `report` the
 * printed comparison.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings; `identical` and `report` valid pointers.
 */
enum MintejStatus mintej_compare_files(const char *a, const char *b, int *identical, char **report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MINTEJ_H */
