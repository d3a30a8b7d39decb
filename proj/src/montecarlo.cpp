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

#include "memsl/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "memsl/numerics.hpp"
#include "memsl/optimizer.hpp"
#include "memsl/status.hpp"

namespace memsl {

namespace {

// Per-point running moments of one block of trials.
struct BlockStats {
    double count = 0;
    std::vector<double> mean, m2;
};

void welford_push(BlockStats &b, std::span<const double> x) {
    b.count += 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - b.mean[i];
        b.mean[i] += d / b.count;
        b.m2[i] += d * (x[i] - b.mean[i]);
    }
}

void merge_into(BlockStats &acc, const BlockStats &b) {
    if (b.count == 0) {
        return;
    }
    const double n = acc.count + b.count;
    for (std::size_t i = 0; i < acc.mean.size(); ++i) {
        const double d = b.mean[i] - acc.mean[i];
        acc.mean[i] += d * b.count / n;
        acc.m2[i] += b.m2[i] + d * d * acc.count * b.count / n;
    }
    acc.count = n;
}

// Runs body(block) for every block; each block index is handled exactly once.
template <typename Body> void for_each_block(long blocks, int threads, Body body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<long>(workers, blocks));
    if (workers <= 1) {
        for (long b = 0; b < blocks; ++b) {
            body(b);
        }
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (long b = next++; b < blocks && !failed; b = next++) {
                try {
                    body(b);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::vector<double> default_simulation_grid() { return linspace(-1.0, 1.0, 201); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(splitmix64(seed) + trial));
}

FieldSamples three_lobe_object(std::size_t points, double peak) {
    if (points < 4) {
        throw Error(Status::invalid_argument, "object needs at least 4 points");
    }
    constexpr double heights[3] = {1.0, 0.7, 0.5};
    constexpr double width = 0.08;
    FieldSamples obj;
    obj.grid = linspace(-1.0, 1.0, points);
    obj.values.resize(points);
    double top = 0;
    for (std::size_t i = 0; i < points; ++i) {
        double v = 0;
        for (int k = 0; k < 3; ++k) {
            const double z = (obj.grid[i] - kThreeLobeCentres[k]) / width;
            v += heights[k] * std::exp(-0.5 * z * z);
        }
        obj.values[i] = v;
        top = std::max(top, v);
    }
    for (double &v : obj.values) {
        v *= peak / top;
    }
    return obj;
}

FieldSamples zero_object(std::size_t points) {
    if (points < 4) {
        throw Error(Status::invalid_argument, "object needs at least 4 points");
    }
    FieldSamples obj;
    obj.grid = linspace(-1.0, 1.0, points);
    obj.values.assign(points, 0.0);
    return obj;
}

SmallPhaseCheck check_small_phase(const SlepianBasis &basis, const FieldSamples &object, double r) {
    // The interpolant is only piecewise smooth, so integrate it panel by panel.
    const GaussLegendre &g16 = gauss_legendre(16);
    ObjectInterpolant phi(object);
    constexpr int panels = 64;
    double lhs = 0;
    for (int p = 0; p < panels; ++p) {
        const double half = 1.0 / panels, mid = -1 + (2 * p + 1) * half;
        for (int q = 0; q < 16; ++q) {
            lhs += half * g16.weights[q] * phi(mid + half * g16.nodes[q]);
        }
    }
    const GaussLegendre &gl = gauss_legendre(kDefaultQuadratureOrder);
    double psi0 = 0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        psi0 += gl.weights[q] * basis.eval_inside(0, gl.nodes[q]);
    }
    SmallPhaseCheck out;
    out.lhs = std::abs(lhs);
    out.rhs = std::exp(-r) / std::abs(psi0);
    out.holds = out.lhs < out.rhs;
    out.margin = out.lhs > 0 ? out.rhs / out.lhs : std::numeric_limits<double>::infinity();
    return out;
}

FieldSamples mean_image_quadrature(const FieldSamples &object, const ProbeSource &src, double c,
                                   std::span<const double> image_grid) {
    const QuadratureStats sum = summed_statistics(src);
    FieldSamples image = object_to_image(c, object, image_grid);
    const double scale = sum.mean1 / src.M;
    for (double &v : image.values) {
        v *= scale;
    }
    return image;
}

FieldSamples pointwise_variance(const ProbeSource &src, const NoiseKernelTable &kernel) {
    if (src.protocol == Protocol::independent_squeezed) {
        throw Error(Status::protocol_mismatch, "no pointwise variance law for independent squeezed light");
    }
    const QuadratureStats sum = summed_statistics(src);
    const double M = src.M;
    FieldSamples out;
    out.domain = Domain::image_plane;
    out.grid = kernel.grid;
    out.values.resize(kernel.values.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = sum.var2 * kernel.values[i] / (M * M);
    }
    return out;
}

SimulatedMeasurement simulate_measurement(const FieldSamples &object, const ProbeSource &src,
                                          const SlepianBasis &basis, const SimulationOptions &options) {
    validate(src);
    if (options.trials < 1) {
        throw Error(Status::invalid_argument, "trials must be at least 1");
    }
    if (!(options.noise_scale >= 0) || !std::isfinite(options.noise_scale)) {
        throw Error(Status::invalid_argument, "noise scale must be finite and non-negative");
    }
    if (options.truncation < 0 || options.truncation > basis.j_max()) {
        throw Error(Status::order_out_of_range, "simulation truncation " + std::to_string(options.truncation) +
                                                    " exceeds basis order " + std::to_string(basis.j_max()));
    }
    const double c = basis.c();
    const int J = options.truncation + 1;
    const int M = src.M;

    SimulatedMeasurement out;
    out.source = src;
    out.mode = options.mode;
    out.seed = options.seed;
    out.trials = options.trials;
    out.c = c;
    out.orders = J;
    out.grid = options.image_grid.empty() ? default_simulation_grid() : options.image_grid;
    const std::size_t G = out.grid.size();
    out.mean = mean_image_quadrature(object, src, c, out.grid).values;

    const double ns = options.noise_scale;
    const double st = std::sqrt(src.tau), sl = std::sqrt(1 - src.tau);
    const QuadratureStats in = displaced_squeezed(src.alpha, src.r);
    const double sd1 = ns * std::sqrt(in.var1), sd2 = ns * std::sqrt(in.var2), sdv = ns * 0.5;

    // Coupling of each order to the source: e_j2 = b_2 X_j + b_1 Y_j.
    std::vector<double> X(J), Y = interval_moments(basis, object, J);
    for (int j = 0; j < J; ++j) {
        X[j] = std::sqrt(2 * std::numbers::pi / c) * basis.value_at_zero(j);
    }
    std::vector<double> psi(static_cast<std::size_t>(G) * J);
    for (std::size_t i = 0; i < G; ++i) {
        basis.eval_all(out.grid[i], std::span<double>(psi.data() + i * J, J));
    }

    std::vector<double> var;
    if (options.mode == SimulationMode::pointwise) {
        var = pointwise_variance(src, noise_kernel(basis, out.grid, options.truncation)).values;
    } else {
        out.coefficient_sums.assign(static_cast<std::size_t>(options.trials) * J, 0.0);
    }

    const long blocks = (options.trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<BlockStats> stats(blocks);
    for_each_block(blocks, options.threads, [&](long b) {
        BlockStats &bs = stats[b];
        bs.mean.assign(G, 0.0);
        bs.m2.assign(G, 0.0);
        std::vector<double> x1(M), x2(M), b1(M), b2(M), image(G);
        std::normal_distribution<double> normal(0.0, 1.0);
        const long first = b * kTrialBlock, last = std::min(options.trials, first + kTrialBlock);
        for (long t = first; t < last; ++t) {
            std::mt19937_64 eng = trial_engine(options.seed, static_cast<std::uint64_t>(t));
            if (options.mode == SimulationMode::pointwise) {
                for (std::size_t i = 0; i < G; ++i) {
                    image[i] = out.mean[i] + ns * std::sqrt(var[i]) * normal(eng);
                }
                welford_push(bs, image);
                continue;
            }
            double *E = out.coefficient_sums.data() + static_cast<std::size_t>(t) * J;
            for (int j = 0; j < J; ++j) {
                if (src.protocol == Protocol::memsl) {
                    // One squeezed input and M - 1 vacuum ports through a Helmert array.
                    x1[0] = in.mean1 + sd1 * normal(eng);
                    x2[0] = sd2 * normal(eng);
                    for (int k = 1; k < M; ++k) {
                        x1[k] = sdv * normal(eng);
                        x2[k] = sdv * normal(eng);
                    }
                    double tail1 = 0, tail2 = 0;
                    const double head = 1 / std::sqrt(double(M));
                    for (int m = M - 1; m >= 0; --m) {
                        b1[m] = x1[0] * head + tail1;
                        b2[m] = x2[0] * head + tail2;
                        if (m >= 1) {
                            const double h = 1 / std::sqrt(double(m) * (m + 1));
                            b1[m] -= m * h * x1[m];
                            b2[m] -= m * h * x2[m];
                            tail1 += h * x1[m];
                            tail2 += h * x2[m];
                        }
                    }
                } else {
                    for (int m = 0; m < M; ++m) {
                        b1[m] = in.mean1 + sd1 * normal(eng);
                        b2[m] = sd2 * normal(eng);
                    }
                }
                double s1 = 0, s2 = 0;
                for (int m = 0; m < M; ++m) {
                    double q1 = b1[m], q2 = b2[m];
                    if (src.tau < 1) {
                        q1 = st * q1 + sl * sdv * normal(eng);
                        q2 = st * q2 + sl * sdv * normal(eng);
                    }
                    s1 += q1;
                    s2 += q2;
                }
                E[j] = s2 * X[j] + s1 * Y[j];
            }
            for (std::size_t i = 0; i < G; ++i) {
                const double *p = psi.data() + i * J;
                double acc = 0;
                for (int j = 0; j < J; ++j) {
                    acc += E[j] * p[j];
                }
                image[i] = acc / M;
            }
            welford_push(bs, image);
        }
    });

    BlockStats total;
    total.mean.assign(G, 0.0);
    total.m2.assign(G, 0.0);
    for (const BlockStats &bs : stats) {
        merge_into(total, bs);
    }
    out.trial_mean = total.mean;
    out.trial_std.resize(G);
    for (std::size_t i = 0; i < G; ++i) {
        out.trial_std[i] = total.count > 1 ? std::sqrt(total.m2[i] / (total.count - 1)) : 0.0;
    }
    return out;
}

ReconstructionResult reconstruct(const SimulatedMeasurement &meas, const SlepianBasis &basis, int Q,
                                 const FieldSamples &object, std::span<const double> object_grid, bool exact_sum) {
    if (meas.coefficient_sums.empty()) {
        throw Error(Status::invalid_argument, "reconstruction needs coefficient-space samples");
    }
    if (meas.c != basis.c()) {
        throw Error(Status::invalid_argument, "measurement and basis use different c");
    }
    if (Q < 0 || Q >= meas.orders || Q > basis.j_max()) {
        throw Error(Status::order_out_of_range, "cutoff Q = " + std::to_string(Q) + " outside the simulated orders");
    }
    if (basis.eigenvalue(Q) < kReconstructionFloor) {
        throw Error(Status::eigenvalue_underflow, "lambda_" + std::to_string(Q) + " is below the reconstruction floor");
    }
    const double norm = summed_statistics(meas.source).mean1;
    if (!(norm > 0)) {
        throw Error(Status::invalid_argument, "reconstruction needs a nonzero displacement");
    }
    const int J = meas.orders, K = Q + 1;
    const long T = meas.trials;

    // Mean and covariance of E_j, j <= Q, over trials.
    std::vector<double> mean(K, 0.0), cov(static_cast<std::size_t>(K) * K, 0.0);
    for (long t = 0; t < T; ++t) {
        const double *E = meas.coefficient_sums.data() + static_cast<std::size_t>(t) * J;
        for (int j = 0; j < K; ++j) {
            mean[j] += E[j];
        }
    }
    for (double &m : mean) {
        m /= T;
    }
    if (T > 1) {
        std::vector<double> d(K);
        for (long t = 0; t < T; ++t) {
            const double *E = meas.coefficient_sums.data() + static_cast<std::size_t>(t) * J;
            for (int j = 0; j < K; ++j) {
                d[j] = E[j] - mean[j];
            }
            for (int j = 0; j < K; ++j) {
                for (int k = 0; k < K; ++k) {
                    cov[j * K + k] += d[j] * d[k];
                }
            }
        }
        for (double &v : cov) {
            v /= (T - 1);
        }
    }

    ReconstructionResult res;
    res.Q = Q;
    res.seed = meas.seed;
    res.trials = T;
    res.low_confidence = T < 2;
    const FieldSamples est = reconstruct_object_estimate(basis, mean, Q, object_grid);
    res.grid = est.grid;
    res.phi_hat = est.values;
    for (double &v : res.phi_hat) {
        v /= norm;
    }
    ObjectInterpolant phi(object);
    res.phi_true.resize(res.grid.size());
    res.ci_low.resize(res.grid.size());
    res.ci_high.resize(res.grid.size());
    std::vector<double> psi(K);
    for (std::size_t i = 0; i < res.grid.size(); ++i) {
        res.phi_true[i] = phi(res.grid[i]);
        basis.eval_all(res.grid[i], psi);
        double v = 0;
        for (int j = 0; j < K; ++j) {
            for (int k = 0; k < K; ++k) {
                v += psi[j] * psi[k] * cov[j * K + k] / (basis.eigenvalue(j) * basis.eigenvalue(k));
            }
        }
        const double half = 1.959963984540054 * std::sqrt(std::max(v, 0.0) / T) / norm;
        res.ci_low[i] = res.phi_hat[i] - half;
        res.ci_high[i] = res.phi_hat[i] + half;
    }
    // psi_j is orthonormal on the line and has norm lambda_j on [-1, 1].
    double whole = 0, interval = 0;
    for (int j = 0; j < K; ++j) {
        const double lj = basis.eigenvalue(j);
        whole += cov[j * K + j] / (lj * lj);
        interval += cov[j * K + j] / lj;
    }
    res.sigma_empirical = std::sqrt(whole) / norm;
    res.sigma_empirical_interval = std::sqrt(interval) / norm;
    res.sigma_predicted = sigma_at(meas.source, error_scale(basis, Q, exact_sum));
    return res;
}

}  // namespace memsl
