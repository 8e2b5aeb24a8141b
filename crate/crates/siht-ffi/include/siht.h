/* C interface for the siht sparse recovery library. */

#ifndef SIHT_H
#define SIHT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum SihtStatus {
  SIHT_STATUS_OK = 0,
  // A required pointer argument was null.
  SIHT_STATUS_NULL_POINTER = 1,
  // A parameter was outside its documented domain.
  SIHT_STATUS_INVALID_ARGUMENT = 2,
  // Buffer shapes disagree.
  SIHT_STATUS_DIMENSION_MISMATCH = 3,
  // Exact subset enumeration would exceed the cap.
  SIHT_STATUS_ENUMERATION_CAP_EXCEEDED = 4,
  // An internal numerical routine failed to converge.
  SIHT_STATUS_NUMERICAL_FAILURE = 5,
} SihtStatus;

// Opaque phase-wise recovery session. Create with [`siht_recovery_new`],
// feed phases with [`siht_recovery_run_phase`], read the estimate with
// [`siht_recovery_estimate`], release with [`siht_recovery_free`].
typedef struct SihtRecovery SihtRecovery;

// The pieces of the dynamic sample complexity for one phase configuration.
typedef struct SihtComplexityBreakdown {
  // Number of phases.
  size_t phase_count;
  // Largest phase fraction.
  double max_fraction;
  // Duration-weighted arithmetic mean of the measurement counts.
  double weighted_mean;
  // Duration-weighted geometric mean of the measurement counts.
  double weighted_geometric_mean;
  // The dynamic sample complexity itself.
  double dynamic_complexity;
} SihtComplexityBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static, nul-terminated string.
const char *siht_version(void);

// Static human-readable message for a status code. Never null; do not free.
const char *siht_status_message(enum SihtStatus status);

// Keep the `k` largest-magnitude entries of `values` and zero the rest, in
// place. Ties keep the lower index.
//
// # Safety
// `values` must point to `len` readable and writable doubles.
enum SihtStatus siht_hard_threshold(double *values, size_t len, size_t k);

// Evaluate the dynamic sample complexity of `len` phases with measurement
// counts `counts` and fractions `fractions` (positive, summing to 1 within
// 1e-9).
//
// # Safety
// `counts` and `fractions` must point to `len` readable elements each, and
// `out` to a writable [`SihtComplexityBreakdown`].
enum SihtStatus siht_complexity(const size_t *counts,
                                const double *fractions,
                                size_t len,
                                struct SihtComplexityBreakdown *out);

// Evaluate the sample-complexity threshold
// `C1 ln(6K) + C2 K ln(3Ne/K) + C3 ln(1/epsilon)` with `C1 = C3 = 96/c_tilde`
// and `C2 = 288/c_tilde`.
//
// # Safety
// `out` must point to a writable double.
enum SihtStatus siht_theorem_rhs(size_t k, size_t n, double epsilon, double c_tilde, double *out);

// Closed-form lower bound `2 b^2 / (9 (a + b))` on the expected dynamic
// complexity for counts uniform on `[a, b]`; requires `2 <= a <= b`.
//
// # Safety
// `out` must point to a writable double.
enum SihtStatus siht_expected_md_lower_bound(size_t a, size_t b, double *out);

// Exact restricted isometry constant of order `order` for the row-major
// `rows x cols` matrix `phi`, enumerating at most `cap` column subsets.
// On success writes the constant to `out_value` and, when `out_witness` is
// not null, the `order` maximizing column indices to it.
//
// # Safety
// `phi` must point to `rows * cols` readable doubles, `out_value` to a
// writable double, and `out_witness` (when not null) to `order` writable
// `size_t`s.
enum SihtStatus siht_ric(const double *phi,
                         size_t rows,
                         size_t cols,
                         size_t order,
                         size_t cap,
                         double *out_value,
                         size_t *out_witness);

// Start a recovery session for signals of the given dimension and sparsity
// budget, initialized at zero. Returns null when the parameters are invalid.
struct SihtRecovery *siht_recovery_new(size_t dimension, size_t sparsity);

// Run `steps` iterations against one phase's measurement pair. `matrix` is
// row-major `rows x dimension`; `measurement` has `rows` entries.
//
// # Safety
// `handle` must come from [`siht_recovery_new`] and not be freed; `matrix`
// and `measurement` must point to `rows * dimension` and `rows` readable
// doubles.
enum SihtStatus siht_recovery_run_phase(struct SihtRecovery *handle,
                                        const double *matrix,
                                        size_t rows,
                                        const double *measurement,
                                        size_t steps);

// Copy the current estimate into `out` (length = session dimension).
//
// # Safety
// `handle` must come from [`siht_recovery_new`] and not be freed; `out` must
// point to `dimension` writable doubles.
enum SihtStatus siht_recovery_estimate(const struct SihtRecovery *handle, double *out);

// Total iterations run so far; 0 for a null handle.
//
// # Safety
// `handle` must be null or come from [`siht_recovery_new`] and not be freed.
size_t siht_recovery_iterations(const struct SihtRecovery *handle);

// Release a session. Null is a no-op.
//
// # Safety
// `handle` must be null or come from [`siht_recovery_new`], and must not be
// used afterwards.
void siht_recovery_free(struct SihtRecovery *handle);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIHT_H */
