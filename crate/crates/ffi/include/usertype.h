#ifndef USERTYPE_H
#define USERTYPE_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ut_status {
  UT_STATUS_OK = 0,
  UT_STATUS_NULL_POINTER = 1,
  UT_STATUS_INVALID_UTF8 = 2,
  UT_STATUS_IO = 3,
  UT_STATUS_MODEL = 4,
  UT_STATUS_RESOURCE = 5,
  UT_STATUS_RECORD = 6,
  UT_STATUS_INTERNAL = 7,
  UT_STATUS_PANIC = 8,
} ut_status;

/**
 * Opaque classifier handle.
 */
typedef struct ut_classifier ut_classifier;

/**
 * Label indices follow the class order male, female, organization.
 */
typedef struct ut_prediction {
  int32_t label;
  double scores[3];
} ut_prediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Load a model artifact plus the name database and lexicon it was trained
 * with. `image_dir` may be null. On success `*out` owns a new handle that
 * must be released with `ut_classifier_free`.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum ut_status ut_classifier_open(const char *model_path,
                                  const char *name_db_path,
                                  const char *lexicon_path,
                                  const char *image_dir,
                                  struct ut_classifier **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `handle` must come from `ut_classifier_open` and not be used afterwards.
 */
void ut_classifier_free(struct ut_classifier *handle);

/**
 * Classify one user record given as a JSON object.
 *
 * # Safety
 * `handle` must be a live handle, `record_json` NUL-terminated and `out`
 * writable.
 */
enum ut_status ut_classify_json(const struct ut_classifier *handle,
                                const char *record_json,
                                struct ut_prediction *out);

/**
 * Message of the last failed call on this thread, or null after a success.
 * Valid until the next call on this thread.
 */
const char *ut_last_error(void);

/**
 * Static name of a label index, or null when out of range.
 */
const char *ut_label_name(int32_t label);

const char *ut_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* USERTYPE_H */
