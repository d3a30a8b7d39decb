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

#ifndef MEMSL_OPTIMIZER_HPP
#define MEMSL_OPTIMIZER_HPP

#include "memsl/imaging.hpp"
#include "memsl/light.hpp"
#include "memsl/pswf.hpp"

namespace memsl {

// Q selection accepts an order whose noise ratio exceeds the photon bound by up to
// this many decades, since the bound is an order-of-magnitude statement.
inline constexpr double kDefaultQSlackDecades = 1.0;

struct PhotonBudget {
    int M = 1;
    double N = 0;      // photons per mode on the sample
    double n_avg = 1;  // independent repetitions
};

struct OptimalConfig {
    Protocol protocol = Protocol::memsl;
    double r_opt = 0;
    double alpha_opt = 0;
    double sigma_opt = 0;
    double tau = 1;
};

// Odd Q is governed by the even order below it, where the coupling is nonzero.
int governing_order(int Q);

// Error scale A_g / (2 sqrt(2) lambda_g) at the governing order g. With
// `exact_sum` the dominant term is replaced by the root of the sum over even
// orders j <= g of A_j^2 / lambda_j^2, divided by 2 sqrt(2).
double error_scale(const SlepianBasis &basis, int Q, bool exact_sum = false);

// sigma for a given probe state; `scale` is error_scale(...).
//   MEMSL:       scale sqrt(e^{-2r} + 1/tau - 1) / alpha
//   independent: the same divided by sqrt(M)
//   coherent:    scale sqrt(1/tau) / (sqrt(M) alpha)
double sigma_at(const ProbeSource &src, double scale);

// Closed-form optimum under the photon budget, lossless.
//   MEMSL:       scale / sqrt(MN(1+MN));  independent: scale / (sqrt(M) sqrt(N(1+N)))
//   coherent:    scale / sqrt(MN)
double sigma_lossless(Protocol protocol, int M, double N, double scale);

// Throws protocol_mismatch for coherent light, which has nothing to optimize.
OptimalConfig optimize_lossless(Protocol protocol, int M, double N, double scale = 1.0);

// Lossy optimum for tau in (0, 1]; tau == 1 delegates to optimize_lossless. Coherent
// light returns alpha = sqrt(N / tau) and a tau-independent sigma.
OptimalConfig optimize_lossy(Protocol protocol, int M, double N, double tau, double scale = 1.0);

// log10 of the right-hand side of the Q criterion.
//   MEMSL:       8 M^2 N^2 n_avg^2 (1 + MN)
//   independent: 8 M^2 N^2 n_avg^2 (1 + N)
//   coherent:    8 M^2 N^2 n_avg^2
double log10_q_bound(Protocol protocol, const PhotonBudget &budget);

// Largest odd Q such that log10(A_{Q-1}^2 / lambda_{Q-1}^2) <= log10_q_bound + slack,
// scanning upward and stopping at the first violation.
int select_Q(const SlepianBasis &basis, Protocol protocol, const PhotonBudget &budget,
             double slack_decades = kDefaultQSlackDecades);

// D = Y / (Q + 1), in the unit of Y.
double resolution(double object_size, int Q);
double resolution(const ImagingSystem &sys, int Q);

// 10 log10(e^{-2r}).
double squeezing_db(double r);

}  // namespace memsl

#endif
