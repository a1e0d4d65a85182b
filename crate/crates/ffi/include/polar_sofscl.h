#ifndef POLAR_SOFSCL_H
#define POLAR_SOFSCL_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `fd` value selecting dynamic frozen bits on every frozen position.
 */
#define PS_FD_ALL -1

/**
 * `fd` value selecting all-zero (static) frozen bits.
 */
#define PS_FD_STATIC -2

/**
 * Status codes. Zero is success.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_CODE_ERROR = 3,
  PS_STATUS_DECODE_ERROR = 4,
  PS_STATUS_BUFFER_TOO_SMALL = 5,
  PS_STATUS_PANIC = 6,
} PsStatus;

/**
 * Arithmetic used inside the decoder.
 */
typedef enum PsMode {
  PS_MODE_EXACT = 0,
  PS_MODE_HARDWARE_FRIENDLY = 1,
} PsMode;

/**
 * Which list decoder a `PsDecoder` runs.
 */
typedef enum PsDecoderKind {
  /**
   * Node-based soft-output list decoder.
   */
  PS_DECODER_KIND_SO_FSCL = 0,
  /**
   * Bit-by-bit soft-output list decoder.
   */
  PS_DECODER_KIND_SO_SCL = 1,
} PsDecoderKind;

/**
 * Opaque polar code.
 */
typedef struct PsCode PsCode;

/**
 * Opaque decoder.
 */
typedef struct PsDecoder PsDecoder;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Status name as a static NUL-terminated string.
 */
const char *ps_status_str(enum PsStatus status);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ps_last_error_message(char *buf, size_t len);

/**
 * Builds an (n, k) code from the 5G reliability sequence. `fd` is the
 * number of dynamic frozen bits per node, `PS_FD_ALL` or `PS_FD_STATIC`.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum PsStatus ps_code_new_nr5g(size_t n, size_t k, int32_t fd, struct PsCode **out);

/**
 * Parses a code from its text form (as written by the CLI `construct`).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` a valid pointer.
 */
enum PsStatus ps_code_from_text(const char *text, struct PsCode **out);

/**
 * # Safety
 * `code` must be null or a handle from `ps_code_new_*` not yet freed.
 */
void ps_code_free(struct PsCode *code);

/**
 * Block length, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t ps_code_n(const struct PsCode *code);

/**
 * Number of information bits, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t ps_code_k(const struct PsCode *code);

/**
 * Encodes `k` information bits (values 0/1) into `n` codeword bits.
 *
 * # Safety
 * `info` must point to `info_len` bytes, `codeword` to `cw_len` bytes.
 */
enum PsStatus ps_code_encode(const struct PsCode *code,
                             const uint8_t *info,
                             size_t info_len,
                             uint8_t *codeword,
                             size_t cw_len);

/**
 * Creates a decoder for `code` (the code is copied; the handle may be
 * freed afterwards).
 *
 * # Safety
 * `code` must be a live handle and `out` a valid pointer.
 */
enum PsStatus ps_decoder_new(const struct PsCode *code,
                             size_t list_size,
                             enum PsMode mode,
                             enum PsDecoderKind kind,
                             struct PsDecoder **out);

/**
 * # Safety
 * `dec` must be null or a handle from `ps_decoder_new` not yet freed.
 */
void ps_decoder_free(struct PsDecoder *dec);

/**
 * Decodes one block of `n` channel LLRs (positive favours bit 0).
 *
 * Writes the best candidate's `k` information bits and `n` codeword bits.
 * `app_llrs` (length `n`) and `block_error` (approximate probability that
 * the decision is wrong) are optional and may be null.
 *
 * # Safety
 * All non-null pointers must be valid for the stated lengths.
 */
enum PsStatus ps_decoder_decode(const struct PsDecoder *dec,
                                const double *llrs,
                                size_t llr_len,
                                uint8_t *info,
                                size_t info_len,
                                uint8_t *codeword,
                                size_t cw_len,
                                double *app_llrs,
                                size_t app_len,
                                double *block_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLAR_SOFSCL_H */
