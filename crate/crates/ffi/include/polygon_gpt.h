#ifndef POLYGON_GPT_H
#define POLYGON_GPT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum PgStatus {
  PG_STATUS_OK = 0,
  PG_STATUS_INVALID_PARAMETER = 1,
  PG_STATUS_INTERNAL_INCONSISTENCY = 2,
  PG_STATUS_UNSUPPORTED = 3,
  PG_STATUS_NULL_POINTER = 4,
  PG_STATUS_PANIC = 5,
} PgStatus;

/**
 * Extreme states of a bipartite composition with their classes.
 */
typedef struct PgEnumeration PgEnumeration;

/**
 * An n-gon model.
 */
typedef struct PgModel PgModel;

/**
 * Measurement label: effect index (1-based) and orientation.
 */
typedef struct PgLabel {
  uint32_t effect;
  /**
   * True when eᵢ carries the `+` outcome.
   */
  bool plus;
} PgLabel;

/**
 * Best Hardy witness of an exhaustive scan.
 */
typedef struct PgHardyResult {
  bool found;
  double success;
  /**
   * M1, M2, N1, N2.
   */
  struct PgLabel measurements[4];
  double residuals[3];
  size_t tie_count;
  bool post_quantum;
} PgHardyResult;

/**
 * Noise thresholds of pΦ_J + (1−p)u⊗u.
 */
typedef struct PgThresholds {
  uint32_t n;
  double b_max;
  double p_e;
  double p_nl;
  bool gap_exists;
} PgThresholds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *pg_last_error(void);

/**
 * Builds the n-gon model (`n ≥ 4`).
 */
enum PgStatus pg_model_new(uint32_t n, struct PgModel **out);

/**
 * Releases a model. Null is ignored.
 */
void pg_model_free(struct PgModel *model);

/**
 * Polygon order n, or 0 for a null handle.
 */
uint32_t pg_model_n(const struct PgModel *model);

/**
 * Pure state ωᵢ (1-based) written to `out[3]`.
 */
enum PgStatus pg_model_state(const struct PgModel *model, uint32_t i, double *out);

/**
 * Ray-extremal effect eᵢ (1-based) written to `out[3]`.
 */
enum PgStatus pg_model_effect(const struct PgModel *model, uint32_t i, double *out);

/**
 * Library state by name ("J", "H", "I".."VI") written row-major to `out[9]`.
 */
enum PgStatus pg_named_state(const struct PgModel *model, const char *name, double *out);

/**
 * Maximally entangled state Φ_J written to `out[9]`.
 */
enum PgStatus pg_phi_j(const struct PgModel *model, double *out);

/**
 * Number of D₂ₙ×D₂ₙ orbits on 8-subsets of product effects (n ≤ 8).
 */
enum PgStatus pg_burnside_orbit_count(const struct PgModel *model, uint64_t *out);

/**
 * Whether the row-major matrix `phi[9]` is a valid bipartite state.
 */
enum PgStatus pg_is_valid_state(const struct PgModel *model,
                                const double *phi,
                                double tol,
                                bool *out);

/**
 * eᵀΦf for effects `e[3]`, `f[3]` and state `phi[9]`.
 */
enum PgStatus pg_joint_prob(const double *e, const double *f, const double *phi, double *out);

/**
 * Exhaustive Hardy scan over extremal dichotomic measurements.
 */
enum PgStatus pg_hardy_scan(const struct PgModel *model,
                            const double *phi,
                            double tol,
                            struct PgHardyResult *out);

/**
 * Maximal |CHSH| over extremal dichotomic measurements.
 */
enum PgStatus pg_chsh_max(const struct PgModel *model, const double *phi, double *out);

/**
 * Entanglement and CHSH thresholds for the model's Φ_J under u⊗u noise.
 */
enum PgStatus pg_noise_thresholds(const struct PgModel *model, struct PgThresholds *out);

/**
 * Enumerates and classifies the extreme bipartite states (n ≤ 8).
 */
enum PgStatus pg_enumerate(const struct PgModel *model, struct PgEnumeration **out);

/**
 * Releases an enumeration. Null is ignored.
 */
void pg_enumeration_free(struct PgEnumeration *e);

/**
 * Total number of extreme states.
 */
size_t pg_enumeration_vertex_count(const struct PgEnumeration *e);

/**
 * Number of product extreme states.
 */
size_t pg_enumeration_product_count(const struct PgEnumeration *e);

/**
 * Vertex `index` written to `out[9]`; `is_product` tells its kind.
 */
enum PgStatus pg_enumeration_vertex(const struct PgEnumeration *e,
                                    size_t index,
                                    double *out,
                                    bool *is_product);

/**
 * Number of entanglement classes.
 */
size_t pg_enumeration_class_count(const struct PgEnumeration *e);

/**
 * Size of class `index`; classes are sorted by size.
 */
enum PgStatus pg_enumeration_class_size(const struct PgEnumeration *e, size_t index, size_t *out);

/**
 * Representative of class `index` written to `out[9]`.
 */
enum PgStatus pg_enumeration_class_representative(const struct PgEnumeration *e,
                                                  size_t index,
                                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYGON_GPT_H */
