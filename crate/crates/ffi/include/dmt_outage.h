#ifndef DMT_OUTAGE_H
#define DMT_OUTAGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `DMT_STATUS_OK` is zero.
 */
typedef enum DmtStatus {
  DMT_STATUS_OK = 0,
  DMT_STATUS_NULL_POINTER = 1,
  DMT_STATUS_INVALID_ARGUMENT = 2,
  DMT_STATUS_INVALID_DIMENSIONS = 3,
  DMT_STATUS_INVALID_CORRELATION = 4,
  DMT_STATUS_SINGULAR_CORRELATION = 5,
  DMT_STATUS_TOO_FEW_TRIALS = 6,
  DMT_STATUS_ZERO_OUTAGE_COUNT = 7,
  DMT_STATUS_PANIC = 99,
} DmtStatus;

/**
 * Opaque channel handle.
 */
typedef struct DmtChannel DmtChannel;

/**
 * Monte Carlo outage estimate with its 95% Wilson interval.
 */
typedef struct DmtOutageEstimate {
  double p_hat;
  double ci_low;
  double ci_high;
  uint64_t trials;
  uint64_t outage_count;
  uint64_t seed;
} DmtOutageEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an i.i.d. Rayleigh channel with `m` transmit and `n` receive
 * antennas.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum DmtStatus dmt_channel_new_iid(size_t m, size_t n, struct DmtChannel **out);

/**
 * Creates a Kronecker-correlated channel with exponential correlation
 * `rho^|i-j|` on each side.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum DmtStatus dmt_channel_new_kronecker_exponential(size_t m,
                                                     size_t n,
                                                     double rho_tx,
                                                     double rho_rx,
                                                     struct DmtChannel **out);

/**
 * Creates a channel with full `mn x mn` correlation `R`, given row-major
 * real and imaginary parts. `im` may be NULL for a real matrix. `R` is
 * rescaled to trace `mn` if needed.
 *
 * # Safety
 * `re` (and `im`, when non-null) must point to `len` readable doubles;
 * `out` must be valid for writing one pointer.
 */
enum DmtStatus dmt_channel_new_full(size_t m,
                                    size_t n,
                                    const double *re,
                                    const double *im,
                                    size_t len,
                                    struct DmtChannel **out);

/**
 * Releases a channel handle. NULL is ignored.
 *
 * # Safety
 * `ch` must come from a `dmt_channel_new_*` call and not be freed twice.
 */
void dmt_channel_free(struct DmtChannel *ch);

/**
 * Reports whether the correlation input was rescaled to trace `mn`.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum DmtStatus dmt_channel_rescaled(const struct DmtChannel *ch, bool *out);

/**
 * Low-SNR outage `F_H(m r)` of the channel.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum DmtStatus dmt_low_snr_outage(const struct DmtChannel *ch, double r, double *out);

/**
 * Low-outage approximation `(m r)^{mn} / ((mn)! det R)`. Returns
 * `DMT_STATUS_SINGULAR_CORRELATION` when `R` is singular.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum DmtStatus dmt_low_outage_approx(const struct DmtChannel *ch, double r, double *out);

/**
 * Monte Carlo outage at linear SNR `gamma`. Deterministic in
 * (`trials`, `seed`) regardless of thread count.
 *
 * # Safety
 * `ch` must be a live handle and `out` valid for writing.
 */
enum DmtStatus dmt_estimate_outage(const struct DmtChannel *ch,
                                   double gamma,
                                   double r,
                                   uint64_t trials,
                                   uint64_t seed,
                                   struct DmtOutageEstimate *out);

/**
 * `F_k(x)`, the k-branch MRC outage CDF.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum DmtStatus dmt_mrc_cdf(uint32_t k, double x, double *out);

/**
 * Diversity gain `d(r)` of the i.i.d. DMT curve.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum DmtStatus dmt_diversity_gain(size_t m, size_t n, double r, double *out);

/**
 * Exact outage of the 1x1 Rayleigh channel.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum DmtStatus dmt_scalar_outage_exact(double r, double gamma, double *out);

/**
 * High-SNR boundary `10^{1/r}` (linear) of the scalar channel, `0 < r <= 1`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum DmtStatus dmt_high_snr_boundary(double r, double *out);

/**
 * Static, NUL-terminated description of a status code.
 */
const char *dmt_status_message(enum DmtStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DMT_OUTAGE_H */
