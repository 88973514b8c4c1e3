#ifndef LYAPBAND_H
#define LYAPBAND_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(LYAPBAND_BUILDING)
#define LB_API __attribute__((visibility("default")))
#else
#define LB_API
#endif

/* Status codes. Every call returns one; on failure lb_last_error() holds a
   message for the calling thread. */
typedef enum lb_status {
  LB_OK = 0,
  LB_INVALID_ARGUMENT = 1,
  LB_DIMENSION_MISMATCH = 2,
  LB_PARSE_ERROR = 3,
  LB_IO_ERROR = 4,
  LB_NOT_SYMMETRIC = 5,
  LB_DIVERGED = 6,
  LB_NUMERICAL = 7,
  LB_INTERNAL = 99
} lb_status;

typedef struct lb_matrix lb_matrix;   /* sparse matrix with a structural pattern */
typedef struct lb_pattern lb_pattern; /* index set on a dim x dim grid */

LB_API const char* lb_version(void);
LB_API const char* lb_last_error(void);
/* Releases strings returned through char** out-parameters. */
LB_API void lb_string_free(char* s);

/* Matrices. Indices are 0-based. */
LB_API lb_status lb_matrix_read(const char* path, lb_matrix** out);
LB_API lb_status lb_matrix_write(const lb_matrix* m, const char* path);
LB_API lb_status lb_matrix_from_triplets(size_t dim, size_t count, const size_t* rows,
                                         const size_t* cols, const double* values, lb_matrix** out);
LB_API lb_status lb_matrix_info(const lb_matrix* m, size_t* dim, size_t* nnz, size_t* max_offset,
                                int* symmetric);
LB_API lb_status lb_matrix_get(const lb_matrix* m, size_t i, size_t j, double* value);
/* Same pattern and bitwise-identical values. */
LB_API lb_status lb_matrix_equal(const lb_matrix* x, const lb_matrix* y, int* equal);
LB_API void lb_matrix_free(lb_matrix* m);

/* Test models. spec_json: {"kind": "heat2d"|"heat3d"|"random", "N", "N1", "seed",
   "margin", "kappa", "diagonal", "coupling"}. metadata_json may be NULL. */
LB_API lb_status lb_model_generate(const char* spec_json, lb_matrix** a, lb_matrix** p,
                                   char** metadata_json);

/* Extreme eigenvalues of symmetric a as JSON {a, b, kappa, rel_tol, iterations, converged}. */
LB_API lb_status lb_spectrum(const lb_matrix* a, double rel_tol, char** json);

/* spec: "banded:<y>", "predicted:<z1>[:<cap>]" or "file:<path>". */
LB_API lb_status lb_pattern_build(const lb_matrix* a, const lb_matrix* p, const char* spec,
                                  lb_pattern** out);
/* reach_nnz counts the equations the pattern induces with a; pass a = NULL to skip it. */
LB_API lb_status lb_pattern_info(const lb_pattern* s, const lb_matrix* a, size_t* dim, size_t* nnz,
                                 size_t* max_offset, size_t* reach_nnz);
LB_API lb_status lb_pattern_write(const lb_pattern* s, const char* path);
LB_API void lb_pattern_free(lb_pattern* s);

/* Chebyshev approximation of exp(t a). params_json keys: "M" (degree), "R", "drop",
   "drop_period", "spectral_tol", "compare" (adds the 2-norm error against the dense
   exponential). report_json may be NULL. */
LB_API lb_status lb_expm(const lb_matrix* a, double t, const char* params_json, lb_matrix** out,
                         char** report_json);

/* Approximate solution of a x + x a = p. params_json selects "method": "cgls" or
   "cheb-gp" with its parameters. report_json may be NULL. */
LB_API lb_status lb_solve(const lb_matrix* a, const lb_matrix* p, const char* params_json,
                          lb_matrix** x, char** report_json);

/* Dense reference solution (every entry structural) and its relative residual. */
LB_API lb_status lb_oracle_solve(const lb_matrix* a, const lb_matrix* p, lb_matrix** x,
                                 double* relative_residual);

/* ||approx - truth||_2 / ||truth||_2. */
LB_API lb_status lb_accuracy(const lb_matrix* approx, const lb_matrix* truth, double* eps);

/* Decay bounds against the dense reference solution, as CSV. params_json keys:
   "mode": "offsets" (default) or "entrywise"; "samples" (sampled s above dim 200), "seed". */
LB_API lb_status lb_decay(const lb_matrix* a, const lb_matrix* p, const char* params_json,
                          char** csv);

/* out = {o1, o2, o3}. assumptions_hold reports d > m and l < d. */
LB_API lb_status lb_flop_estimates(double nn, double m, double d, double l, double degree, double q,
                                   double out[3], int* assumptions_hold);

/* Runs a sweep and writes results.csv, manifest.json and per-point files.
   output_override may be NULL. manifest_json may be NULL. */
LB_API lb_status lb_run_experiment(const char* config_json, const char* output_override,
                                   char** manifest_json, int* failed_points);

#ifdef __cplusplus
}
#endif

#endif
