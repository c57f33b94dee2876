/* C interface to the fmps multiple-scattering library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an fmps_status; on
 * failure fmps_last_error() describes what went wrong (per thread).
 */
#ifndef FMPS_FMPS_H
#define FMPS_FMPS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FMPS_API __declspec(dllexport)
#else
#define FMPS_API __attribute__((visibility("default")))
#endif

typedef enum fmps_status {
  FMPS_OK = 0,
  FMPS_E_ARGUMENT = 1,
  FMPS_E_VALIDATION = 2,
  FMPS_E_NONCONVERGENCE = 3,
  FMPS_E_IO = 4,
  FMPS_E_NUMERICAL = 5,
  FMPS_E_INTERNAL = 6
} fmps_status;

typedef struct fmps_scene fmps_scene;
typedef struct fmps_result fmps_result;
typedef struct fmps_scatmat fmps_scatmat;

/* Relative material parameters. */
typedef struct fmps_medium {
  double eps_re, eps_im;
  double mu_re, mu_im;
} fmps_medium;

typedef void (*fmps_log_fn)(const char* line, void* user);

typedef struct fmps_scan_options {
  int workers;          /* >= 1 */
  int abort_on_failure; /* nonzero: stop at the first failed frequency */
  int rebuild_cache;    /* nonzero: rebuild stale cache files instead of failing */
  fmps_log_fn log;      /* may be NULL */
  void* log_user;
} fmps_scan_options;

typedef struct fmps_record {
  double omega;
  int ok;
  fmps_status status; /* FMPS_OK when ok */
  int iterations;
  double residual;
  double c_scat, c_abs, c_ext;
} fmps_record;

FMPS_API const char* fmps_version(void);
FMPS_API const char* fmps_last_error(void);
FMPS_API const char* fmps_status_name(fmps_status status);

/* Scene configuration. On a validation failure the individual findings are
 * available through fmps_last_issue_count / fmps_last_issue until the next call
 * on this thread. */
FMPS_API fmps_status fmps_scene_load(const char* path, fmps_scene** out);
FMPS_API void fmps_scene_free(fmps_scene* scene);
FMPS_API size_t fmps_last_issue_count(void);
FMPS_API fmps_status fmps_last_issue(size_t index, int* line, const char** code, const char** field,
                                     const char** message);

FMPS_API fmps_status fmps_scene_site_count(const fmps_scene* scene, size_t* out);
FMPS_API fmps_status fmps_scene_frequency_count(const fmps_scene* scene, size_t* out);
/* Pass a value <= 0 to keep the configured setting. */
FMPS_API fmps_status fmps_scene_set_solver(fmps_scene* scene, double tol, int restart, int maxiter);
FMPS_API fmps_status fmps_scene_set_order(fmps_scene* scene, int p);
FMPS_API fmps_status fmps_scene_set_eta(fmps_scene* scene, double eta);
FMPS_API fmps_status fmps_scene_set_cache_dir(fmps_scene* scene, const char* dir);
/* Replaces the frequency list by one angular frequency; material tables must cover it. */
FMPS_API fmps_status fmps_scene_set_omega(fmps_scene* scene, double omega);
/* Canonical form of the configuration. */
FMPS_API fmps_status fmps_scene_write(const fmps_scene* scene, const char* path);

FMPS_API void fmps_scan_options_init(fmps_scan_options* options);
FMPS_API fmps_status fmps_run_scan(const fmps_scene* scene, const fmps_scan_options* options, fmps_result** out);
FMPS_API void fmps_result_free(fmps_result* result);
FMPS_API size_t fmps_result_count(const fmps_result* result);
FMPS_API fmps_status fmps_result_record(const fmps_result* result, size_t index, fmps_record* out);
/* Empty string for successful records. */
FMPS_API const char* fmps_result_error(const fmps_result* result, size_t index);
/* Writes the files requested by the scene's outputs section into outdir. */
FMPS_API fmps_status fmps_result_write(const fmps_result* result, const fmps_scene* scene, const char* outdir);

/* Builds (or refreshes) the cache file of every inclusion used by the scene at
 * every configured frequency. The scene must name a cache directory. */
FMPS_API fmps_status fmps_scene_precompute(const fmps_scene* scene, const fmps_scan_options* options);

/* Scattering matrix of a meshed dielectric body about the sphere (center, radius). */
FMPS_API fmps_status fmps_scatmat_build(const char* mesh_path, const double center[3], double radius, double omega,
                                        const fmps_medium* exterior, const fmps_medium* interior, int p, int workers,
                                        fmps_scatmat** out);
FMPS_API fmps_status fmps_scatmat_load(const char* path, fmps_scatmat** out);
FMPS_API fmps_status fmps_scatmat_save(const fmps_scatmat* s, const char* path);
FMPS_API void fmps_scatmat_free(fmps_scatmat* s);
FMPS_API int fmps_scatmat_order(const fmps_scatmat* s);
/* Side length of the dense matrix: 2 (p + 1)^2. */
FMPS_API size_t fmps_scatmat_dim(const fmps_scatmat* s);
FMPS_API fmps_status fmps_scatmat_entry(const fmps_scatmat* s, size_t row, size_t col, double* re, double* im);
FMPS_API uint64_t fmps_scatmat_fingerprint(const fmps_scatmat* s);
/* Mesh resolution warnings raised while building; empty for loaded matrices. */
FMPS_API size_t fmps_scatmat_warning_count(const fmps_scatmat* s);
FMPS_API const char* fmps_scatmat_warning(const fmps_scatmat* s, size_t index);

#ifdef __cplusplus
}
#endif

#endif
