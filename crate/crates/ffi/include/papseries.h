#ifndef PAPSERIES_H
#define PAPSERIES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsFormat {
  PS_FORMAT_JSON = 0,
  PS_FORMAT_BFILE = 1,
  PS_FORMAT_CSV = 2,
} PsFormat;

typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_ARGUMENT = 2,
  PS_STATUS_PARSE_ERROR = 3,
  PS_STATUS_NOT_FOUND = 4,
  PS_STATUS_COMPUTATION_ERROR = 5,
  PS_STATUS_RESOURCE_CAP = 6,
  PS_STATUS_PANIC = 7,
} PsStatus;

// Growth-rate lower bounds of a series.
typedef struct PsBounds PsBounds;

// A coefficient sequence, optionally with predicted terms.
typedef struct PsSeries PsSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library from the same thread.
const char *ps_last_error(void);

void ps_string_free(char *s);

// Count permutations of length 0..=max_n avoiding every pattern in the
// space-separated list `patterns` (e.g. "25314" or "123 4321").
enum PsStatus ps_count_avoiders(const char *patterns, uintptr_t max_n, struct PsSeries **out);

// Look up an embedded class by name, member pattern or OEIS id.
enum PsStatus ps_dataset_get(const char *key, struct PsSeries **out);

// Parse a series from text; predicted values are read at `digits` decimal digits.
enum PsStatus ps_series_import(const char *text,
                               enum PsFormat format,
                               const char *name,
                               uint32_t digits,
                               struct PsSeries **out);

enum PsStatus ps_series_export(const struct PsSeries *series, enum PsFormat format, char **out);

// Number of exact coefficients.
uintptr_t ps_series_len(const struct PsSeries *series);

// Number of predicted terms following the exact ones.
uintptr_t ps_series_predicted_len(const struct PsSeries *series);

// Exact coefficient at position `i` (counting from the first stored term) as a decimal or p/q string.
enum PsStatus ps_series_coeff(const struct PsSeries *series,
                              uintptr_t i,
                              char **out);

// Value at position `i` as a double, exact or predicted.
enum PsStatus ps_series_value(const struct PsSeries *series, uintptr_t i, double *out);

// The first `len` exact terms as a new series.
enum PsStatus ps_series_prefix(const struct PsSeries *series, uintptr_t len, struct PsSeries **out);

void ps_series_free(struct PsSeries *series);

// Predict `count` further terms with the default approximant ensemble.
enum PsStatus ps_extend(const struct PsSeries *series,
                        uintptr_t count,
                        uint32_t digits,
                        struct PsSeries **out);

// Growth-rate lower bounds from the exact terms.
enum PsStatus ps_bounds(const struct PsSeries *series, uint32_t digits, struct PsBounds **out);

// Largest continued-fraction bound.
enum PsStatus ps_bounds_value(const struct PsBounds *bounds, double *out);

enum PsStatus ps_bounds_to_json(const struct PsBounds *bounds, uintptr_t sig, char **out);

void ps_bounds_free(struct PsBounds *bounds);

// Power-law ratio analysis of all terms (exact and predicted) as a JSON report.
enum PsStatus ps_analyze_powerlaw(const struct PsSeries *series,
                                  uint32_t digits,
                                  uintptr_t sig,
                                  char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAPSERIES_H */
