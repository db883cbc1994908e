#ifndef TWODEL_H
#define TWODEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum TdStatus {
  TD_STATUS_OK = 0,
  TD_STATUS_INVALID_ARGUMENT = 1,
  TD_STATUS_CONSTRAINT_VIOLATION = 2,
  TD_STATUS_DECODE_FAILURE = 3,
  TD_STATUS_NOT_CORRECTING = 4,
  TD_STATUS_INTERNAL = 5,
  TD_STATUS_IO = 6,
  TD_STATUS_NULL_POINTER = 7,
  TD_STATUS_BUFFER_TOO_SMALL = 8,
  TD_STATUS_PANIC = 9,
} TdStatus;

/**
 * A code with fixed targets. Opaque to C.
 */
typedef struct TdCode TdCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *td_last_error_message(void);

/**
 * Builds the code of length `n` with the largest codebook (`n <= 22`).
 * `s == 0` means `s = n`. `cache_dir` may be null.
 *
 * # Safety
 * `cache_dir` must be null or a valid C string; `out` must be writable.
 */
enum TdStatus td_code_new(size_t n,
                          size_t s,
                          uint8_t construction,
                          const char *cache_dir,
                          struct TdCode **out);

/**
 * Rebuilds a code from a codebook header line.
 *
 * # Safety
 * `header_json` must be a valid C string, `cache_dir` null or a valid C
 * string, and `out` writable.
 */
enum TdStatus td_code_from_header(const char *header_json,
                                  const char *cache_dir,
                                  struct TdCode **out);

/**
 * # Safety
 * `code` must be null or come from `td_code_new` / `td_code_from_header`,
 * and not be freed twice.
 */
void td_code_free(struct TdCode *code);

/**
 * Codeword length, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t td_code_length(const struct TdCode *code);

/**
 * The codebook header line describing `code`.
 *
 * # Safety
 * `code` must be a live handle and `out` writable.
 */
enum TdStatus td_code_header_json(const struct TdCode *code, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void td_string_free(char *s);

/**
 * Sets `*is_member` to whether `bits` is a codeword. A word of the wrong
 * length is simply not a member.
 *
 * # Safety
 * `bits` must point to `len` readable bytes; `is_member` must be writable.
 */
enum TdStatus td_is_member(const struct TdCode *code,
                           const uint8_t *bits,
                           size_t len,
                           bool *is_member);

/**
 * Decodes a word of length `n - 2` into `out` (capacity `cap`, at least
 * `n`). `out_len` and `branch` may be null; `branch` receives the decoder
 * path as an owned string.
 *
 * # Safety
 * `y` must point to `y_len` readable bytes, `out` to `cap` writable bytes,
 * and the other pointers must be null or writable.
 */
enum TdStatus td_decode(const struct TdCode *code,
                        const uint8_t *y,
                        size_t y_len,
                        uint8_t *out,
                        size_t cap,
                        size_t *out_len,
                        char **branch);

/**
 * Deletes the symbols at 1-indexed positions `i1 < i2`, writing
 * `len - 2` symbols to `out`.
 *
 * # Safety
 * `x` must point to `len` readable bytes and `out` to `cap` writable bytes.
 */
enum TdStatus td_delete2(const uint8_t *x,
                         size_t len,
                         size_t i1,
                         size_t i2,
                         uint8_t *out,
                         size_t cap);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TWODEL_H */
