#ifndef LONGROOT_H
#define LONGROOT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes for handle construction and argument validation.
 */
typedef enum LrStatus {
  LrOk = 0,
  LrParseError = 1,
  LrUnsupportedFamily = 2,
  LrBadInput = 3,
  LrNullArgument = 4,
} LrStatus;

/**
 * Run outcomes, mirroring the CLI exit codes.
 */
typedef enum LrVerdict {
  LrPositive = 0,
  LrNegative = 2,
  LrStalled = 3,
  LrInvalid = 64,
} LrVerdict;

/**
 * Opaque group handle: a validated descriptor.
 */
typedef struct LrGroup LrGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *lr_version(void);

/**
 * Parses a JSON group descriptor into an opaque handle. Returns NULL on
 * error and, when `status` is non-NULL, writes the reason there.
 *
 * # Safety
 * `descriptor_json` must be a valid NUL-terminated C string; `status`
 * must be NULL or point to writable memory.
 */
struct LrGroup *lr_group_from_json(const char *descriptor_json, enum LrStatus *status);

/**
 * Frees a group handle; NULL is accepted.
 *
 * # Safety
 * `group` must be NULL or a pointer from [`lr_group_from_json`] that has
 * not been freed.
 */
void lr_group_free(struct LrGroup *group);

/**
 * Exact order of the described group as a decimal string; free with
 * [`lr_string_free`]. NULL on error.
 *
 * # Safety
 * `group` must be a live handle from [`lr_group_from_json`].
 */
char *lr_group_order(const struct LrGroup *group);

/**
 * Runs the long-root construction. On success returns LrPositive; when
 * `verify` is set the white-box report gates the verdict. When
 * `transcript_out` is non-NULL it receives a JSON-lines transcript to be
 * freed with [`lr_string_free`].
 *
 * # Safety
 * `group` must be a live handle; `transcript_out` must be NULL or point
 * to writable pointer storage.
 */
enum LrVerdict lr_find_long_root(const struct LrGroup *group,
                                 uint64_t seed,
                                 double epsilon,
                                 bool verify,
                                 char **transcript_out);

/**
 * Runs p-core recognition: LrPositive means a verified nontrivial
 * p-core element was produced (this answer is always correct);
 * LrNegative means "possibly trivial".
 *
 * # Safety
 * As for [`lr_find_long_root`].
 */
enum LrVerdict lr_check_pcore(const struct LrGroup *group,
                              uint64_t seed,
                              double epsilon,
                              char **transcript_out);

/**
 * Runs the named pipeline ("find-long-root", "check-pcore", "verify",
 * "stats", "bench") with CLI semantics.
 *
 * # Safety
 * `group` must be a live handle; `command` a valid C string;
 * `transcript_out` NULL or writable.
 */
enum LrVerdict lr_dispatch(const struct LrGroup *group,
                           const char *command,
                           uint64_t seed,
                           double epsilon,
                           bool verify,
                           char **transcript_out);

/**
 * Frees a string returned by this library; NULL is accepted.
 *
 * # Safety
 * `s` must be NULL or a string pointer returned by this library that has
 * not been freed.
 */
void lr_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LONGROOT_H */
