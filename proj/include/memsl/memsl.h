/*
 * Copyright 2026 The MEMSL Imaging Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the MEMSL imaging library.
 *
 * Every function returning int returns a MEMSL_* status code. Constructors return
 * an opaque handle (NULL on failure) and write the code through `status` when it
 * is not NULL. After a failure, memsl_last_error() holds a message for the calling
 * thread. Handles are immutable once built and may be shared across threads.
 *
 * PSWF normalization: psi_j has norm lambda_j on [-1, 1] and norm 1 on the line.
 */

#ifndef MEMSL_H
#define MEMSL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MEMSL_BUILDING_LIBRARY)
#define MEMSL_API __declspec(dllexport)
#else
#define MEMSL_API __declspec(dllimport)
#endif
#else
#define MEMSL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. */
#define MEMSL_OK 0
#define MEMSL_INVALID_ARGUMENT 1
#define MEMSL_UNDERFLOW_ORDER 2
#define MEMSL_NON_CONVERGENCE 3
#define MEMSL_ORDER_OUT_OF_RANGE 4
#define MEMSL_EIGENVALUE_UNDERFLOW 5
#define MEMSL_GRID_TOO_COARSE 6
#define MEMSL_GRID_TOO_NARROW 7
#define MEMSL_PROTOCOL_MISMATCH 8
#define MEMSL_DOMAIN_ERROR 9
#define MEMSL_BASIS_TOO_SMALL 10
#define MEMSL_NON_POSITIVE_PARAMETER 11
#define MEMSL_INSUFFICIENT_BUDGET 12
#define MEMSL_INTERNAL_ERROR 99

/* Probe protocols. */
#define MEMSL_PROTOCOL_MEMSL 0
#define MEMSL_PROTOCOL_INDEPENDENT 1
#define MEMSL_PROTOCOL_COHERENT 2

/* Simulation modes. */
#define MEMSL_MODE_COEFFICIENT 0
#define MEMSL_MODE_POINTWISE 1

/* Series stored in a simulation run. */
#define MEMSL_SERIES_IMAGE_GRID 0
#define MEMSL_SERIES_IMAGE_MEAN 1
#define MEMSL_SERIES_TRIAL_MEAN 2
#define MEMSL_SERIES_TRIAL_STD 3
#define MEMSL_SERIES_OBJECT_GRID 4
#define MEMSL_SERIES_PHI_TRUE 5
#define MEMSL_SERIES_PHI_HAT 6
#define MEMSL_SERIES_CI_LOW 7
#define MEMSL_SERIES_CI_HIGH 8

typedef struct memsl_basis memsl_basis;
typedef struct memsl_run memsl_run;

typedef struct memsl_geometry {
    double focal_length; /* m */
    double wavelength;   /* m */
    double pupil;        /* m */
    double object_size;  /* m */
    double c;
    double shannon;
    double rayleigh; /* m */
} memsl_geometry;

typedef struct memsl_source {
    int protocol;
    int M;
    double alpha;
    double r;
    double tau;
} memsl_source;

typedef struct memsl_optimum {
    int protocol;
    double r_opt;
    double alpha_opt;
    double sigma_opt;
    double tau;
} memsl_optimum;

typedef struct memsl_sim_options {
    int mode;                 /* MEMSL_MODE_* */
    long long trials;         /* >= 1 */
    uint64_t seed;
    int truncation;           /* highest simulated order */
    double noise_scale;       /* 1 for physical noise, 0 for noiseless draws */
    size_t image_points;      /* image grid on [-image_half_width, image_half_width] */
    double image_half_width;
    size_t object_points;     /* reconstruction grid on [-1, 1] */
    int Q;                    /* cutoff; ignored in pointwise mode */
    int exact_sum;            /* predicted sigma from the full even-order sum */
    int threads;              /* 0 selects the hardware concurrency */
} memsl_sim_options;

typedef struct memsl_run_summary {
    int Q;
    int reconstructed; /* 0 in pointwise mode */
    double sigma_predicted;
    double sigma_empirical;          /* single shot, whole line */
    double sigma_empirical_interval; /* single shot, [-1, 1] */
    uint64_t seed;
    long long trials;
    int low_confidence; /* fewer than two trials */
    int small_phase_holds;
    double small_phase_margin;
} memsl_run_summary;

/* Library information and errors. */
MEMSL_API const char *memsl_version(void);
MEMSL_API const char *memsl_status_message(int status);
MEMSL_API const char *memsl_last_error(void);

/* Option defaults: coefficient mode, one trial, truncation 40, 201 image points on
 * [-1, 1], 401 object points, Q = 7. */
MEMSL_API void memsl_sim_options_init(memsl_sim_options *options);

/* PSWF basis. */
MEMSL_API memsl_basis *memsl_basis_new(double c, int j_max, int *status);
/* Copy with every eigenvalue multiplied by `factor`. Harness hook for sensitivity checks. */
MEMSL_API memsl_basis *memsl_basis_scaled_copy(const memsl_basis *basis, double factor, int *status);
MEMSL_API void memsl_basis_release(memsl_basis *basis);
MEMSL_API int memsl_largest_safe_order(double c, int cap, int *out);
MEMSL_API int memsl_basis_c(const memsl_basis *basis, double *out);
MEMSL_API int memsl_basis_jmax(const memsl_basis *basis, int *out);
MEMSL_API int memsl_basis_eigenvalue(const memsl_basis *basis, int j, double *out);
MEMSL_API int memsl_basis_log_eigenvalue(const memsl_basis *basis, int j, double *out);
MEMSL_API int memsl_basis_coupling(const memsl_basis *basis, int j, double *out);
MEMSL_API int memsl_basis_parity(const memsl_basis *basis, int j, int *out); /* 0 even, 1 odd */
MEMSL_API int memsl_basis_eval(const memsl_basis *basis, int j, size_t n, const double *s, double *out);
MEMSL_API int memsl_noise_kernel(const memsl_basis *basis, int truncation, size_t n, const double *s, double *out);
MEMSL_API int memsl_noise_kernel_constant(const memsl_basis *basis, int truncation, double *out);

/* Imaging geometry and field maps. */
MEMSL_API int memsl_geometry_derive(double focal_length, double wavelength, double pupil, double object_size,
                                    memsl_geometry *out);
MEMSL_API int memsl_object_to_image(double c, size_t n_object, const double *object_s, const double *object_phi,
                                    size_t n_image, const double *image_s, double *out);
MEMSL_API int memsl_decompose_image(const memsl_basis *basis, size_t n, const double *s, const double *values,
                                    int n_orders, double *coefficients);
MEMSL_API int memsl_reconstruct_estimate(const memsl_basis *basis, size_t n_coefficients, const double *coefficients,
                                         int Q, size_t n, const double *s, double *out);
MEMSL_API int memsl_resolution(double object_size, int Q, double *out);

/* Light states. */
MEMSL_API int memsl_photons_on_sample(const memsl_source *source, double *out);

/* Error model and optimization. */
MEMSL_API int memsl_error_scale(const memsl_basis *basis, int Q, int exact_sum, double *out);
MEMSL_API int memsl_sigma(const memsl_source *source, double scale, double *out);
MEMSL_API int memsl_optimize(int protocol, int M, double N, double tau, double scale, memsl_optimum *out);
MEMSL_API int memsl_log10_q_bound(int protocol, int M, double N, double n_avg, double *out);
MEMSL_API int memsl_select_q(const memsl_basis *basis, int protocol, int M, double N, double n_avg,
                             double slack_decades, int *out);

/* Monte Carlo. */
MEMSL_API int memsl_three_lobe_object(size_t n, double peak, double *s_out, double *phi_out);
MEMSL_API int memsl_small_phase(const memsl_basis *basis, size_t n, const double *s, const double *phi, double r,
                                int *holds, double *margin);
MEMSL_API int memsl_pointwise_variance(const memsl_basis *basis, const memsl_source *source, int truncation, size_t n,
                                       const double *s, double *out);
MEMSL_API memsl_run *memsl_simulate(const memsl_basis *basis, const memsl_source *source,
                                    const memsl_sim_options *options, size_t n_object, const double *object_s,
                                    const double *object_phi, int *status);
MEMSL_API void memsl_run_release(memsl_run *run);
MEMSL_API int memsl_run_summary_get(const memsl_run *run, memsl_run_summary *out);
/* Copies up to `capacity` values; `length` receives the series length. */
MEMSL_API int memsl_run_series(const memsl_run *run, int series, double *out, size_t capacity, size_t *length);

#ifdef __cplusplus
}
#endif

#endif
