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

#ifndef MEMSL_MONTECARLO_HPP
#define MEMSL_MONTECARLO_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "memsl/imaging.hpp"
#include "memsl/light.hpp"
#include "memsl/pswf.hpp"

namespace memsl {

// Trials are processed in fixed blocks and merged in block order, so results do not
// depend on the thread count.
inline constexpr long kTrialBlock = 256;

std::uint64_t splitmix64(std::uint64_t x);

// Engine for one trial: mt19937_64 seeded with splitmix64(splitmix64(seed) + trial).
// Earlier trials keep their draws when the trial count changes.
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

// Stand-in test object: three Gaussians of width 0.08 centred at -0.8, 0.1, 0.6 with
// heights 1, 0.7, 0.5, scaled so the tallest peak equals `peak` radians.
FieldSamples three_lobe_object(std::size_t points = 401, double peak = 0.1);
inline constexpr double kThreeLobeCentres[3] = {-0.8, 0.1, 0.6};

FieldSamples zero_object(std::size_t points = 401);

struct SmallPhaseCheck {
    bool holds = true;
    double lhs = 0;     // |int_{-1}^{1} phi|
    double rhs = 0;     // e^{-r} / |int_{-1}^{1} psi_0|
    double margin = 0;  // rhs / lhs, infinite when lhs == 0
};

SmallPhaseCheck check_small_phase(const SlepianBasis &basis, const FieldSamples &object, double r);

// <e_2^avg(s)> = (<sum_m b_1^(m)> / M) L[phi](s), loss included.
FieldSamples mean_image_quadrature(const FieldSamples &object, const ProbeSource &src, double c,
                                   std::span<const double> image_grid);

// Var e_2^avg(s') = Var(sum_m b_2^(m)) G(c, s') / M^2, i.e. (tau e^{-2r} + 1 - tau) G / (4M)
// for MEMSL and G / (4M) for coherent light. Independent squeezed light is rejected.
FieldSamples pointwise_variance(const ProbeSource &src, const NoiseKernelTable &kernel);

enum class SimulationMode { coefficient_space = 0, pointwise = 1 };

struct SimulationOptions {
    SimulationMode mode = SimulationMode::coefficient_space;
    long trials = 1;
    std::uint64_t seed = 0;
    int truncation = kDefaultKernelTruncation;  // highest simulated order
    double noise_scale = 1.0;                   // 0 gives noiseless draws
    std::vector<double> image_grid;             // empty: 201 points on [-1, 1]
    int threads = 0;                            // 0: hardware concurrency
};

struct SimulatedMeasurement {
    ProbeSource source;
    SimulationMode mode = SimulationMode::coefficient_space;
    std::uint64_t seed = 0;
    long trials = 0;
    double c = 0;
    int orders = 0;
    std::vector<double> grid;
    std::vector<double> mean;        // analytic mean of e_2^avg
    std::vector<double> trial_mean;  // sample mean over trials
    std::vector<double> trial_std;   // sample standard deviation (0 when trials == 1)
    // Coefficient-space mode: E_j = sum_m e_j2^(m), row-major trials x orders.
    std::vector<double> coefficient_sums;
};

SimulatedMeasurement simulate_measurement(const FieldSamples &object, const ProbeSource &src,
                                          const SlepianBasis &basis, const SimulationOptions &options);

struct ReconstructionResult {
    int Q = 0;
    std::vector<double> grid;
    std::vector<double> phi_true;
    std::vector<double> phi_hat;  // estimate from the trial-averaged data
    std::vector<double> ci_low;   // 95% interval of phi_hat
    std::vector<double> ci_high;
    double sigma_predicted = 0;
    double sigma_empirical = 0;           // single shot, whole line
    double sigma_empirical_interval = 0;  // single shot, restricted to [-1, 1]
    std::uint64_t seed = 0;
    long trials = 0;
    bool low_confidence = false;  // fewer than two trials
};

// phi~(s') = sum_{j <= Q} (E_j / lambda_j) psi_j(s') / <sum_m b_1^(m)>, which reduces to
// 1 / (alpha sqrt(2 tau M)) for MEMSL and 1 / (alpha M sqrt(2 tau)) per independent mode.
ReconstructionResult reconstruct(const SimulatedMeasurement &measurement, const SlepianBasis &basis, int Q,
                                 const FieldSamples &object, std::span<const double> object_grid,
                                 bool exact_sum = false);

}  // namespace memsl

#endif
