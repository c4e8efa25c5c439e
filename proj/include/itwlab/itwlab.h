/* itwlab - fractional Brownian motion / averaging-operator laboratory.
 *
 * C API over the C++ core. All functions return ITWLAB_OK on success; on
 * failure they return an error code and itwlab_last_error() (thread-local)
 * carries the message. Handles are opaque and freed by the matching
 * _destroy call; strings returned through char** are freed with
 * itwlab_string_free.
 */
#ifndef ITWLAB_H
#define ITWLAB_H

#include <stdint.h>

#if defined(_WIN32)
#define ITWLAB_API __declspec(dllexport)
#else
#define ITWLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define ITWLAB_OK 0
#define ITWLAB_ERR_INVALID 1  /* bad arguments or config */
#define ITWLAB_ERR_DOMAIN 2   /* operation undefined for this object */
#define ITWLAB_ERR_RUNTIME 3  /* internal failure */
#define ITWLAB_ERR_CRITERIA 4 /* experiment ran; configured criteria failed */

ITWLAB_API const char* itwlab_version(void);
ITWLAB_API const char* itwlab_last_error(void);
ITWLAB_API void itwlab_string_free(char* s);

/* --- Brownian lattice ------------------------------------------------- */

typedef struct itwlab_lattice itwlab_lattice;

/* Two-sided Brownian increments on a uniform grid over [-left, right];
 * a pure function of (geometry, seed, path_index). */
ITWLAB_API int itwlab_lattice_create(int dims, double step, double left, double right,
                                     uint64_t seed, uint64_t path_index,
                                     itwlab_lattice** out);
ITWLAB_API void itwlab_lattice_destroy(itwlab_lattice* lat);
ITWLAB_API int64_t itwlab_lattice_cells(const itwlab_lattice* lat);
ITWLAB_API int itwlab_lattice_increment(const itwlab_lattice* lat, int component, int64_t cell,
                                        double* out);
/* B at non-negative grid index (0 at time 0). */
ITWLAB_API int itwlab_lattice_value(const itwlab_lattice* lat, int component,
                                    int64_t grid_index, double* out);

/* --- Fractional Brownian motion --------------------------------------- */

typedef struct itwlab_fbm itwlab_fbm;

ITWLAB_API int itwlab_fbm_create(const itwlab_lattice* lat, double hurst, itwlab_fbm** out);
ITWLAB_API void itwlab_fbm_destroy(itwlab_fbm* path);
ITWLAB_API int64_t itwlab_fbm_points(const itwlab_fbm* path);
ITWLAB_API int itwlab_fbm_value(const itwlab_fbm* path, int component, int64_t index,
                                double* out);
/* W1/W2 split between grid indices from <= to; W1 + W2 reconstructs W^H. */
ITWLAB_API int itwlab_fbm_w1(const itwlab_fbm* path, int component, int64_t from, int64_t to,
                             double* out);
ITWLAB_API int itwlab_fbm_w2(const itwlab_fbm* path, int component, int64_t from, int64_t to,
                             double* out);

/* --- Field catalog ----------------------------------------------------- */

typedef struct itwlab_field itwlab_field;

ITWLAB_API int itwlab_field_create(const char* id, itwlab_field** out);
ITWLAB_API void itwlab_field_destroy(itwlab_field* field);
ITWLAB_API int itwlab_field_dim(const itwlab_field* field);
/* Pointwise value of a deterministic field. */
ITWLAB_API int itwlab_field_eval(const itwlab_field* field, double t, const double* x, int xd,
                                 double* out);

/* --- Experiments -------------------------------------------------------- */

/* Runs the experiment described by a config JSON document and returns the
 * result JSON. Returns ITWLAB_ERR_CRITERIA when the run completed but the
 * configured pass-criteria failed (result JSON is still produced). */
ITWLAB_API int itwlab_run_experiment(const char* config_json, char** result_json_out);

/* Same, reading the config from a file and writing artifacts into the
 * output directory; returns the CLI exit code (0 pass, 1 criteria, 2 config). */
ITWLAB_API int itwlab_run_config_file(const char* path, const char* outdir_or_null);

ITWLAB_API int itwlab_catalog_json(char** out);

/* Reduced smoke suite; ITWLAB_OK when everything passes. */
ITWLAB_API int itwlab_verify_quick(int workers, char** report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* ITWLAB_H */
