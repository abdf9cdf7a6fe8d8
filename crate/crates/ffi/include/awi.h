#ifndef AWI_H
#define AWI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AwiStatus {
  AWI_STATUS_OK = 0,
  AWI_STATUS_NULL_POINTER = 1,
  AWI_STATUS_INVALID_ARGUMENT = 2,
  AWI_STATUS_IO = 3,
  AWI_STATUS_PARSE = 4,
  AWI_STATUS_UNKNOWN_SPECIES = 5,
  // A solve or search failed to converge, or the system is singular.
  AWI_STATUS_NUMERICAL = 6,
  // The requested threshold or gain does not exist.
  AWI_STATUS_NOT_FOUND = 7,
  AWI_STATUS_PANIC = 8,
} AwiStatus;

typedef enum AwiThresholdKind {
  AWI_THRESHOLD_KIND_INVERSION = 0,
  AWI_THRESHOLD_KIND_GAIN = 1,
} AwiThresholdKind;

// Opaque species catalog.
typedef struct AwiCatalog AwiCatalog;

// Cell conditions. `species` and `buffer` are NUL-terminated names.
typedef struct AwiConditions {
  const char *species;
  const char *buffer;
  double pressure_torr;
  double temperature_k;
  double chi_raman;
} AwiConditions;

// Rates in s^-1.
typedef struct AwiRates {
  double a21;
  double a31;
  double w23;
  double w32;
  double gamma2;
  double gamma3;
  double gamma21;
  double gamma31;
  double gamma32;
} AwiRates;

typedef struct AwiPopulations {
  double r1;
  double r2;
  double r3;
} AwiPopulations;

typedef struct AwiOperatingPoint {
  double pressure_torr;
  double kappa0;
  double peak_gain;
  // Probe detuning of the peak, s^-1.
  double delta_p;
  struct AwiPopulations populations;
} AwiOperatingPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *awi_version(void);

// Copy the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length excluding the NUL.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t awi_last_error(char *buf, size_t len);

// The built-in Na/K/Rb catalog.
//
// # Safety
// `out` must be a valid pointer.
enum AwiStatus awi_catalog_builtin(struct AwiCatalog **out);

// Load a TOML catalog from `path`.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum AwiStatus awi_catalog_load(const char *path, struct AwiCatalog **out);

// Release a catalog. Null is ignored.
//
// # Safety
// `catalog` must come from this library and not be used afterwards.
void awi_catalog_free(struct AwiCatalog *catalog);

// Relaxation and dephasing rates for the given conditions.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum AwiStatus awi_rates(const struct AwiCatalog *catalog,
                         const struct AwiConditions *cond,
                         struct AwiRates *out);

// Steady-state populations (degenerate-level model) under a drive of
// strength `kappa0` = 4|g|^2/A21^2 and detuning `delta` (s^-1).
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum AwiStatus awi_populations(const struct AwiCatalog *catalog,
                               const struct AwiConditions *cond,
                               double kappa0,
                               double delta,
                               struct AwiPopulations *out);

// Normalised probe susceptibility at `n` probe detunings given in units of
// Gamma31. `im_f` (absorption, negative for gain) and `re_f` each receive
// `n` values.
//
// # Safety
// Pointers must be valid for `n` elements; strings NUL-terminated.
enum AwiStatus awi_spectrum(const struct AwiCatalog *catalog,
                            const struct AwiConditions *cond,
                            double kappa0,
                            double delta,
                            const double *delta_p,
                            size_t n,
                            double *im_f,
                            double *re_f);

// Velocity-averaged version of [`awi_spectrum`], scaled to the averaged
// undriven line centre. `nodes` = 0 picks the node count automatically.
//
// # Safety
// Pointers must be valid for `n` elements; strings NUL-terminated.
enum AwiStatus awi_doppler_spectrum(const struct AwiCatalog *catalog,
                                    const struct AwiConditions *cond,
                                    double kappa0,
                                    double delta,
                                    size_t nodes,
                                    const double *delta_p,
                                    size_t n,
                                    double *im_f,
                                    double *re_f);

// Threshold kappa0 at the pressure in `cond`, for resonant drive and probe.
// Returns `NotFound` when no threshold exists at that pressure.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum AwiStatus awi_threshold(const struct AwiCatalog *catalog,
                             const struct AwiConditions *cond,
                             enum AwiThresholdKind kind,
                             double *kappa0);

// Lowest threshold over pressures in [`p_min`, `p_max`] Torr. The pressure
// field of `cond` is ignored.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum AwiStatus awi_threshold_minimum(const struct AwiCatalog *catalog,
                                     const struct AwiConditions *cond,
                                     enum AwiThresholdKind kind,
                                     double p_min,
                                     double p_max,
                                     double *kappa0,
                                     double *pressure_torr);

// Pressure and drive that maximise the resonant-drive probe gain while
// staying below the inversion threshold. The pressure field of `cond` is
// ignored.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum AwiStatus awi_optimize_gain(const struct AwiCatalog *catalog,
                                 const struct AwiConditions *cond,
                                 struct AwiOperatingPoint *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AWI_H */
