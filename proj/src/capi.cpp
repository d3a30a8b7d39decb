// Copyright 2026 The MEMSL Imaging Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "memsl/memsl.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "memsl/imaging.hpp"
#include "memsl/light.hpp"
#include "memsl/numerics.hpp"
#include "memsl/montecarlo.hpp"
#include "memsl/optimizer.hpp"
#include "memsl/pswf.hpp"
#include "memsl/status.hpp"

struct memsl_basis {
    memsl::SlepianBasis basis;
};

struct memsl_run {
    memsl_run_summary summary{};
    std::vector<double> series[9];
};

namespace {

thread_local std::string last_error;

int fail(int code, const char *what) {
    last_error = what;
    return code;
}

// Runs `body` and turns exceptions into status codes.
template <class F>
int guarded(F &&body) noexcept {
    try {
        body();
        last_error.clear();
        return MEMSL_OK;
    } catch (const memsl::Error &e) {
        return fail(static_cast<int>(e.status()), e.what());
    } catch (const std::bad_alloc &) {
        return fail(MEMSL_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception &e) {
        return fail(MEMSL_INTERNAL_ERROR, e.what());
    } catch (...) {
        return fail(MEMSL_INTERNAL_ERROR, "unknown exception");
    }
}

void require(bool ok, const char *what) {
    if (!ok) {
        throw memsl::Error(memsl::Status::invalid_argument, what);
    }
}

memsl::Protocol to_protocol(int p) {
    require(p >= MEMSL_PROTOCOL_MEMSL && p <= MEMSL_PROTOCOL_COHERENT, "unknown protocol");
    return static_cast<memsl::Protocol>(p);
}

memsl::ProbeSource to_source(const memsl_source *s) {
    require(s != nullptr, "source is null");
    return {to_protocol(s->protocol), s->M, s->alpha, s->r, s->tau};
}

const memsl::SlepianBasis &unwrap(const memsl_basis *b) {
    require(b != nullptr, "basis is null");
    return b->basis;
}

std::span<const double> view(const double *p, std::size_t n) {
    require(p != nullptr || n == 0, "array is null");
    return {p, n};
}

memsl::FieldSamples samples(const double *s, const double *v, std::size_t n) {
    require(s != nullptr && v != nullptr, "sample arrays are null");
    return {std::vector<double>(s, s + n), std::vector<double>(v, v + n), memsl::Domain::object_plane};
}

template <class T>
T *make_handle(int *status, auto &&build) noexcept {
    T *out = nullptr;
    const int code = guarded([&] { out = build(); });
    if (status) {
        *status = code;
    }
    return out;
}

}  // namespace

extern "C" {

const char *memsl_version(void) { return "1.0.0"; }

const char *memsl_status_message(int status) {
    return memsl::status_name(static_cast<memsl::Status>(status));
}

const char *memsl_last_error(void) { return last_error.c_str(); }

void memsl_sim_options_init(memsl_sim_options *o) {
    if (!o) {
        return;
    }
    *o = memsl_sim_options{};
    o->mode = MEMSL_MODE_COEFFICIENT;
    o->trials = 1;
    o->truncation = memsl::kDefaultKernelTruncation;
    o->noise_scale = 1.0;
    o->image_points = 201;
    o->image_half_width = 1.0;
    o->object_points = 401;
    o->Q = 7;
}

memsl_basis *memsl_basis_new(double c, int j_max, int *status) {
    return make_handle<memsl_basis>(status, [&] { return new memsl_basis{memsl::build_basis(c, j_max)}; });
}

memsl_basis *memsl_basis_scaled_copy(const memsl_basis *basis, double factor, int *status) {
    return make_handle<memsl_basis>(status, [&] {
        require(std::isfinite(factor) && factor > 0, "scale factor must be positive");
        return new memsl_basis{unwrap(basis).with_scaled_eigenvalues(factor)};
    });
}

void memsl_basis_release(memsl_basis *basis) { delete basis; }

int memsl_largest_safe_order(double c, int cap, int *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::largest_safe_order(c, cap);
    });
}

int memsl_basis_c(const memsl_basis *basis, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = unwrap(basis).c();
    });
}

int memsl_basis_jmax(const memsl_basis *basis, int *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = unwrap(basis).j_max();
    });
}

int memsl_basis_eigenvalue(const memsl_basis *basis, int j, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = unwrap(basis).eigenvalue(j);
    });
}

int memsl_basis_log_eigenvalue(const memsl_basis *basis, int j, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = unwrap(basis).log_eigenvalue(j);
    });
}

int memsl_basis_coupling(const memsl_basis *basis, int j, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = unwrap(basis).coupling(j);
    });
}

int memsl_basis_parity(const memsl_basis *basis, int j, int *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = unwrap(basis).parity(j) == memsl::Parity::even ? 0 : 1;
    });
}

int memsl_basis_eval(const memsl_basis *basis, int j, size_t n, const double *s, double *out) {
    return guarded([&] {
        const auto &b = unwrap(basis);
        auto grid = view(s, n);
        require(out != nullptr || n == 0, "output is null");
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = b.eval(j, grid[i]);
        }
    });
}

int memsl_noise_kernel(const memsl_basis *basis, int truncation, size_t n, const double *s, double *out) {
    return guarded([&] {
        require(out != nullptr || n == 0, "output is null");
        const auto table = memsl::noise_kernel(unwrap(basis), view(s, n), truncation);
        std::copy(table.values.begin(), table.values.end(), out);
    });
}

int memsl_noise_kernel_constant(const memsl_basis *basis, int truncation, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::noise_kernel_constant(unwrap(basis), truncation);
    });
}

int memsl_geometry_derive(double focal_length, double wavelength, double pupil, double object_size,
                          memsl_geometry *out) {
    return guarded([&] {
        require(out, "output is null");
        const auto g = memsl::derive_dimensionless(focal_length, wavelength, pupil, object_size);
        *out = {g.focal_length, g.wavelength, g.pupil, g.object_size, g.c, g.shannon, g.rayleigh};
    });
}

int memsl_object_to_image(double c, size_t n_object, const double *object_s, const double *object_phi,
                          size_t n_image, const double *image_s, double *out) {
    return guarded([&] {
        require(out != nullptr || n_image == 0, "output is null");
        const auto image = memsl::object_to_image(c, samples(object_s, object_phi, n_object), view(image_s, n_image));
        std::copy(image.values.begin(), image.values.end(), out);
    });
}

int memsl_decompose_image(const memsl_basis *basis, size_t n, const double *s, const double *values, int n_orders,
                          double *coefficients) {
    return guarded([&] {
        require(coefficients, "output is null");
        auto image = samples(s, values, n);
        image.domain = memsl::Domain::image_plane;
        const auto coef = memsl::decompose_image(unwrap(basis), image, n_orders);
        std::copy(coef.begin(), coef.end(), coefficients);
    });
}

int memsl_reconstruct_estimate(const memsl_basis *basis, size_t n_coefficients, const double *coefficients, int Q,
                               size_t n, const double *s, double *out) {
    return guarded([&] {
        require(out != nullptr || n == 0, "output is null");
        const auto est =
            memsl::reconstruct_object_estimate(unwrap(basis), view(coefficients, n_coefficients), Q, view(s, n));
        std::copy(est.values.begin(), est.values.end(), out);
    });
}

int memsl_resolution(double object_size, int Q, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::resolution(object_size, Q);
    });
}

int memsl_photons_on_sample(const memsl_source *source, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::photons_on_sample(to_source(source));
    });
}

int memsl_error_scale(const memsl_basis *basis, int Q, int exact_sum, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::error_scale(unwrap(basis), Q, exact_sum != 0);
    });
}

int memsl_sigma(const memsl_source *source, double scale, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::sigma_at(to_source(source), scale);
    });
}

int memsl_optimize(int protocol, int M, double N, double tau, double scale, memsl_optimum *out) {
    return guarded([&] {
        require(out, "output is null");
        const auto o = memsl::optimize_lossy(to_protocol(protocol), M, N, tau, scale);
        *out = {static_cast<int>(o.protocol), o.r_opt, o.alpha_opt, o.sigma_opt, o.tau};
    });
}

int memsl_log10_q_bound(int protocol, int M, double N, double n_avg, double *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::log10_q_bound(to_protocol(protocol), {M, N, n_avg});
    });
}

int memsl_select_q(const memsl_basis *basis, int protocol, int M, double N, double n_avg, double slack_decades,
                   int *out) {
    return guarded([&] {
        require(out, "output is null");
        *out = memsl::select_Q(unwrap(basis), to_protocol(protocol), {M, N, n_avg}, slack_decades);
    });
}

int memsl_three_lobe_object(size_t n, double peak, double *s_out, double *phi_out) {
    return guarded([&] {
        require(s_out && phi_out, "output is null");
        const auto obj = memsl::three_lobe_object(n, peak);
        std::copy(obj.grid.begin(), obj.grid.end(), s_out);
        std::copy(obj.values.begin(), obj.values.end(), phi_out);
    });
}

int memsl_small_phase(const memsl_basis *basis, size_t n, const double *s, const double *phi, double r, int *holds,
                      double *margin) {
    return guarded([&] {
        const auto chk = memsl::check_small_phase(unwrap(basis), samples(s, phi, n), r);
        if (holds) {
            *holds = chk.holds ? 1 : 0;
        }
        if (margin) {
            *margin = chk.margin;
        }
    });
}

int memsl_pointwise_variance(const memsl_basis *basis, const memsl_source *source, int truncation, size_t n,
                             const double *s, double *out) {
    return guarded([&] {
        require(out != nullptr || n == 0, "output is null");
        const auto src = to_source(source);
        const auto kernel = memsl::noise_kernel(unwrap(basis), view(s, n), truncation);
        const auto var = memsl::pointwise_variance(src, kernel);
        std::copy(var.values.begin(), var.values.end(), out);
    });
}

memsl_run *memsl_simulate(const memsl_basis *basis, const memsl_source *source, const memsl_sim_options *options,
                          size_t n_object, const double *object_s, const double *object_phi, int *status) {
    return make_handle<memsl_run>(status, [&] {
        require(options != nullptr, "options are null");
        require(options->mode == MEMSL_MODE_COEFFICIENT || options->mode == MEMSL_MODE_POINTWISE,
                "unknown simulation mode");
        require(options->image_points >= 2 && options->image_half_width > 0, "image grid is empty");
        require(options->object_points >= 2, "object grid is empty");
        const auto &b = unwrap(basis);
        const auto src = to_source(source);
        const auto object = samples(object_s, object_phi, n_object);

        memsl::SimulationOptions opt;
        opt.mode = static_cast<memsl::SimulationMode>(options->mode);
        opt.trials = static_cast<long>(options->trials);
        opt.seed = options->seed;
        opt.truncation = options->truncation;
        opt.noise_scale = options->noise_scale;
        opt.threads = options->threads;
        opt.image_grid = memsl::linspace(-options->image_half_width, options->image_half_width, options->image_points);
        const auto meas = memsl::simulate_measurement(object, src, b, opt);

        auto run = std::make_unique<memsl_run>();
        auto &sum = run->summary;
        sum.seed = meas.seed;
        sum.trials = meas.trials;
        sum.low_confidence = meas.trials < 2;
        sum.Q = -1;
        sum.sigma_predicted = sum.sigma_empirical = sum.sigma_empirical_interval = std::nan("");
        const auto phase = memsl::check_small_phase(b, object, src.r);
        sum.small_phase_holds = phase.holds;
        sum.small_phase_margin = phase.margin;
        run->series[MEMSL_SERIES_IMAGE_GRID] = meas.grid;
        run->series[MEMSL_SERIES_IMAGE_MEAN] = meas.mean;
        run->series[MEMSL_SERIES_TRIAL_MEAN] = meas.trial_mean;
        run->series[MEMSL_SERIES_TRIAL_STD] = meas.trial_std;

        if (opt.mode == memsl::SimulationMode::coefficient_space) {
            const auto grid = memsl::linspace(-1.0, 1.0, options->object_points);
            auto rec = memsl::reconstruct(meas, b, options->Q, object, grid, options->exact_sum != 0);
            sum.Q = rec.Q;
            sum.reconstructed = 1;
            sum.sigma_predicted = rec.sigma_predicted;
            sum.sigma_empirical = rec.sigma_empirical;
            sum.sigma_empirical_interval = rec.sigma_empirical_interval;
            sum.low_confidence = rec.low_confidence;
            run->series[MEMSL_SERIES_OBJECT_GRID] = std::move(rec.grid);
            run->series[MEMSL_SERIES_PHI_TRUE] = std::move(rec.phi_true);
            run->series[MEMSL_SERIES_PHI_HAT] = std::move(rec.phi_hat);
            run->series[MEMSL_SERIES_CI_LOW] = std::move(rec.ci_low);
            run->series[MEMSL_SERIES_CI_HIGH] = std::move(rec.ci_high);
        }
        return run.release();
    });
}

void memsl_run_release(memsl_run *run) { delete run; }

int memsl_run_summary_get(const memsl_run *run, memsl_run_summary *out) {
    return guarded([&] {
        require(run && out, "argument is null");
        *out = run->summary;
    });
}

int memsl_run_series(const memsl_run *run, int series, double *out, size_t capacity, size_t *length) {
    return guarded([&] {
        require(run != nullptr, "run is null");
        require(series >= MEMSL_SERIES_IMAGE_GRID && series <= MEMSL_SERIES_CI_HIGH, "unknown series");
        const auto &v = run->series[series];
        if (length) {
            *length = v.size();
        }
        require(out != nullptr || capacity == 0, "output is null");
        std::copy_n(v.begin(), std::min(capacity, v.size()), out);
    });
}

}  // extern "C"
