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

#include "memsl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "memsl/status.hpp"

namespace memsl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_budget(int M, double N) {
    if (M < 1) {
        throw Error(Status::invalid_argument, "mode count M must be at least 1");
    }
    if (!(N >= 0) || !std::isfinite(N)) {
        throw Error(Status::invalid_argument, "photon budget N must be finite and non-negative");
    }
}

void check_tau(double tau) {
    if (!(tau > 0 && tau <= 1)) {
        throw Error(Status::domain_error, "tau must lie in (0, 1]");
    }
}

}  // namespace

int governing_order(int Q) {
    if (Q < 0) {
        throw Error(Status::invalid_argument, "Q must be non-negative");
    }
    return Q % 2 == 1 ? Q - 1 : Q;
}

double error_scale(const SlepianBasis &basis, int Q, bool exact_sum) {
    const int g = governing_order(Q);
    if (g > basis.j_max()) {
        throw Error(Status::order_out_of_range, "governing order " + std::to_string(g) + " is outside the basis");
    }
    const double norm = 2 * std::sqrt(2.0);
    if (!exact_sum) {
        // Through logs so a tiny eigenvalue cannot overflow the quotient.
        return std::exp(std::log(basis.coupling(g)) - basis.log_eigenvalue(g)) / norm;
    }
    double top = -kInf;
    for (int j = 0; j <= g; j += 2) {
        top = std::max(top, std::log(basis.coupling(j)) - basis.log_eigenvalue(j));
    }
    double acc = 0;
    for (int j = 0; j <= g; j += 2) {
        acc += std::exp(2 * (std::log(basis.coupling(j)) - basis.log_eigenvalue(j) - top));
    }
    return std::exp(top) * std::sqrt(acc) / norm;
}

double sigma_at(const ProbeSource &src, double scale) {
    validate(src);
    if (src.alpha == 0) {
        return kInf;
    }
    const double excess = 1 / src.tau - 1;
    switch (src.protocol) {
    case Protocol::memsl:
        return scale * std::sqrt(std::exp(-2 * src.r) + excess) / src.alpha;
    case Protocol::independent_squeezed:
        return scale * std::sqrt(std::exp(-2 * src.r) + excess) / (std::sqrt(double(src.M)) * src.alpha);
    case Protocol::coherent:
        return scale * std::sqrt(1 + excess) / (std::sqrt(double(src.M)) * src.alpha);
    }
    return kInf;
}

double sigma_lossless(Protocol protocol, int M, double N, double scale) {
    check_budget(M, N);
    if (N == 0) {
        return kInf;
    }
    const double mn = M * N;
    switch (protocol) {
    case Protocol::memsl:
        return scale / std::sqrt(mn * (1 + mn));
    case Protocol::independent_squeezed:
        return scale / (std::sqrt(double(M)) * std::sqrt(N * (1 + N)));
    case Protocol::coherent:
        return scale / std::sqrt(mn);
    }
    return kInf;
}

OptimalConfig optimize_lossless(Protocol protocol, int M, double N, double scale) {
    check_budget(M, N);
    if (protocol == Protocol::coherent) {
        throw Error(Status::protocol_mismatch, "coherent light has no squeezing to optimize");
    }
    // Photons per squeezed input: MN for MEMSL, N for each independent mode.
    const double P = protocol == Protocol::memsl ? M * N : N;
    OptimalConfig out;
    out.protocol = protocol;
    out.tau = 1;
    out.r_opt = 0.5 * std::log1p(2 * P);
    out.alpha_opt = std::sqrt(P * (1 + P) / (1 + 2 * P));
    out.sigma_opt = sigma_lossless(protocol, M, N, scale);
    return out;
}

OptimalConfig optimize_lossy(Protocol protocol, int M, double N, double tau, double scale) {
    check_budget(M, N);
    check_tau(tau);
    OptimalConfig out;
    out.protocol = protocol;
    out.tau = tau;
    if (protocol == Protocol::coherent) {
        out.r_opt = 0;
        out.alpha_opt = std::sqrt(N / tau);
        out.sigma_opt = sigma_lossless(Protocol::coherent, M, N, scale);
        return out;
    }
    if (tau == 1) {
        return optimize_lossless(protocol, M, N, scale);
    }
    // With u = e^{-2r}, beta = 1/tau - 1 and P the photons per squeezed input over
    // tau, the constrained objective is (u + beta) / (P + 1/2 - (u + 1/u) / 4). Its
    // stationary point solves (4X + beta) u^2 - 2u - beta = 0 with X = P + 1/2; the
    // root below stays finite as tau -> 1.
    const double P = (protocol == Protocol::memsl ? M * N : N) / tau;
    const double beta = 1 / tau - 1;
    const double X = P + 0.5;
    const double den = 4 * X + beta;
    const double u = (1 + std::sqrt(1 + beta * den)) / den;
    const double sinh2 = (1 / u + u - 2) / 4;
    const double alpha2 = P - sinh2;
    out.r_opt = -0.5 * std::log(u);
    out.alpha_opt = alpha2 > 0 ? std::sqrt(alpha2) : 0.0;
    ProbeSource src{protocol, M, out.alpha_opt, out.r_opt, tau};
    out.sigma_opt = sigma_at(src, scale);
    return out;
}

double log10_q_bound(Protocol protocol, const PhotonBudget &b) {
    check_budget(b.M, b.N);
    if (!(b.n_avg >= 1) || !std::isfinite(b.n_avg)) {
        throw Error(Status::invalid_argument, "n_avg must be at least 1");
    }
    if (b.N == 0) {
        return -kInf;
    }
    const double mn = b.M * b.N;
    double lb = std::log10(8.0) + 2 * std::log10(mn) + 2 * std::log10(b.n_avg);
    if (protocol == Protocol::memsl) {
        lb += std::log10(1 + mn);
    } else if (protocol == Protocol::independent_squeezed) {
        lb += std::log10(1 + b.N);
    }
    return lb;
}

int select_Q(const SlepianBasis &basis, Protocol protocol, const PhotonBudget &budget, double slack_decades) {
    if (!(slack_decades >= 0) || !std::isfinite(slack_decades)) {
        throw Error(Status::invalid_argument, "Q slack must be finite and non-negative");
    }
    const double limit = log10_q_bound(protocol, budget) + slack_decades;
    const double ln10 = std::log(10.0);
    for (int j = 0; j <= basis.j_max(); j += 2) {
        const double a = basis.coupling(j);
        const double ratio = a > 0 ? 2 * (std::log(a) - basis.log_eigenvalue(j)) / ln10 : -kInf;
        if (!(ratio <= limit)) {
            if (j == 0) {
                throw Error(Status::insufficient_budget, "photon budget does not support even the lowest order");
            }
            return j - 1;
        }
    }
    throw Error(Status::basis_too_small, "Q criterion still satisfied at j_max = " + std::to_string(basis.j_max()) +
                                             "; build a larger basis");
}

double resolution(double object_size, int Q) {
    if (Q < 0) {
        throw Error(Status::invalid_argument, "Q must be non-negative");
    }
    if (!(object_size > 0)) {
        throw Error(Status::non_positive_parameter, "object size must be positive");
    }
    return object_size / (Q + 1);
}

double resolution(const ImagingSystem &sys, int Q) { return resolution(sys.object_size, Q); }

double squeezing_db(double r) { return -20 * r / std::log(10.0); }

}  // namespace memsl
