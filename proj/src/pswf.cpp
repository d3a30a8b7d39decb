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

#include "memsl/pswf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "memsl/numerics.hpp"
#include "memsl/status.hpp"

namespace memsl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxOrder = 2000;

struct RawSystem {
    int terms = 0;
    std::vector<std::vector<double>> beta;  // per order, length `terms`
    std::vector<double> log_lambda;
    std::vector<double> psi0_unit;  // sum_k beta_k Pbar_k(0)
};

int legendre_terms_for(double c, int j_max) {
    int k = 2 * j_max + 40 + static_cast<int>(std::ceil(2 * c));
    return k + (k % 2);
}

// Galerkin matrix of the operator (1 - x^2) d^2/dx^2 - 2x d/dx - c^2 x^2, negated,
// in the orthonormal Legendre basis. It splits into two symmetric tridiagonal blocks.
RawSystem solve_raw(double c, int j_max) {
    RawSystem raw;
    const int K = legendre_terms_for(c, j_max);
    raw.terms = K;
    const double c2 = c * c;

    std::vector<double> pbar0(K), dpbar0(K);
    normalized_legendre(0.0, pbar0);
    normalized_legendre_derivative_at_zero(dpbar0);

    std::vector<Eigen::MatrixXd> vectors(2);
    for (int p = 0; p < 2; ++p) {
        const int n = (K - p + 1) / 2;
        Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
        for (int i = 0; i < n; ++i) {
            const double k = p + 2.0 * i;
            diag(i) = k * (k + 1) + c2 * (2 * k * (k + 1) - 1) / ((2 * k + 3) * (2 * k - 1));
            if (i + 1 < n) {
                sub(i) = c2 * (k + 2) * (k + 1) / ((2 * k + 3) * std::sqrt((2 * k + 1) * (2 * k + 5)));
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success) {
            throw Error(Status::non_convergence, "tridiagonal eigensolver did not converge (c = " + std::to_string(c) + ")");
        }
        vectors[p] = solver.eigenvectors();
    }

    raw.beta.assign(j_max + 1, std::vector<double>(K, 0.0));
    raw.psi0_unit.assign(j_max + 1, 0.0);
    for (int j = 0; j <= j_max; ++j) {
        const int p = j % 2;
        const Eigen::MatrixXd &v = vectors[p];
        const int col = j / 2;
        if (col >= v.cols()) {
            throw Error(Status::internal, "Legendre expansion too short for requested order");
        }
        std::vector<double> &b = raw.beta[j];
        for (int i = 0; i < v.rows(); ++i) {
            b[p + 2 * i] = v(i, col);
        }
        double anchor = 0, at0 = 0;
        for (int k = p; k < K; k += 2) {
            anchor += b[k] * (p == 0 ? pbar0[k] : dpbar0[k]);
            at0 += b[k] * pbar0[k];
        }
        if (anchor < 0) {
            for (double &x : b) {
                x = -x;
            }
            at0 = -at0;
        }
        raw.psi0_unit[j] = (p == 0) ? at0 : 0.0;
    }

    // lambda_0 from the finite Fourier transform at the origin:
    //   int_{-1}^{1} psi = mu psi(0),  lambda = (c / 2 pi) mu^2.
    raw.log_lambda.assign(j_max + 1, 0.0);
    const double mu0 = std::sqrt(2.0) * raw.beta[0][0] / raw.psi0_unit[0];
    raw.log_lambda[0] = std::log(c / (2 * kPi) * mu0 * mu0);

    // Ratio of consecutive eigenvalues:
    //   lambda_m / lambda_{m-1} = (c <t psi_m, psi_{m-1}> / <psi_{m-1}, psi_m'>)^2.
    for (int m = 1; m <= j_max; ++m) {
        const std::vector<double> &bm = raw.beta[m], &bn = raw.beta[m - 1];
        double moment = 0;
        for (int k = 0; k < K; ++k) {
            if (bm[k] == 0) {
                continue;
            }
            // x Pbar_k = a_k Pbar_{k+1} + a_{k-1} Pbar_{k-1}
            if (k + 1 < K) {
                moment += bm[k] * (k + 1) / std::sqrt((2.0 * k + 1) * (2.0 * k + 3)) * bn[k + 1];
            }
            if (k > 0) {
                moment += bm[k] * k / std::sqrt((2.0 * k - 1) * (2.0 * k + 1)) * bn[k - 1];
            }
        }
        // <Pbar_l, Pbar_k'> = sqrt((2k+1)(2l+1)) for l < k with k - l odd.
        double cross = 0;
        double run[2] = {0, 0};  // sum over k > l of bm[k] sqrt(2k+1), split by parity of k
        for (int l = K - 1; l >= 0; --l) {
            const double w = std::sqrt(2.0 * l + 1);
            cross += bn[l] * w * run[(l + 1) % 2];
            run[l % 2] += bm[l] * w;
        }
        raw.log_lambda[m] = raw.log_lambda[m - 1] + 2 * std::log(std::abs(c * moment / cross));
    }
    return raw;
}

// out[k] = j_k(x) for x >= 0; orders past the underflow point are set to zero.
void spherical_bessel(double x, std::span<double> out) {
    const std::size_t n = out.size();
    // Upward recurrence is stable for orders below x; higher orders come from the library.
    std::size_t k = 0;
    if (n > 0 && x > 1.0) {
        const double sx = std::sin(x), cx = std::cos(x);
        double prev = sx / x;
        out[0] = prev;
        k = 1;
        if (n > 1) {
            double cur = sx / (x * x) - cx / x;
            out[1] = cur;
            k = 2;
            while (k < n && static_cast<double>(k) < x) {
                const double next = (2.0 * double(k) - 1.0) / x * cur - prev;
                prev = cur;
                cur = next;
                out[k++] = cur;
            }
        }
    }
    bool vanished = false;
    for (; k < n; ++k) {
        if (vanished) {
            out[k] = 0;
            continue;
        }
        double v = std::sph_bessel(static_cast<unsigned>(k), x);
        if (!std::isfinite(v)) {
            v = 0;
        }
        if (static_cast<double>(k) > x && std::abs(v) < 1e-300) {
            vanished = true;
        }
        out[k] = v;
    }
}

void validate(double c, int j_max) {
    if (!(c > 0) || !std::isfinite(c)) {
        throw Error(Status::non_positive_parameter, "c must be a positive finite number");
    }
    if (j_max < 0 || j_max > kMaxOrder) {
        throw Error(Status::invalid_argument, "j_max must lie in [0, " + std::to_string(kMaxOrder) + "]");
    }
}

}  // namespace

SlepianBasis build_basis(double c, int j_max) {
    validate(c, j_max);
    RawSystem raw = solve_raw(c, j_max);
    const double log_floor = std::log(kEigenvalueFloor);
    for (int j = 0; j <= j_max; ++j) {
        if (!(raw.log_lambda[j] >= log_floor)) {
            throw UnderflowOrderError(j - 1, "eigenvalue of order " + std::to_string(j) + " is below 1e-300 at c = " +
                                                 std::to_string(c) + "; largest safe order is " + std::to_string(j - 1));
        }
        if (j > 0 && !(raw.log_lambda[j] < raw.log_lambda[j - 1])) {
            throw Error(Status::non_convergence, "eigenvalues are not strictly decreasing at order " + std::to_string(j));
        }
    }
    if (raw.log_lambda[0] > 1e-12) {
        throw Error(Status::non_convergence, "leading eigenvalue exceeds 1");
    }

    SlepianBasis b;
    b.c_ = c;
    b.terms_ = raw.terms;
    b.log_lambda_ = raw.log_lambda;
    b.lambda_.resize(j_max + 1);
    b.amplitude_.resize(j_max + 1);
    b.psi0_.resize(j_max + 1);
    for (int j = 0; j <= j_max; ++j) {
        b.lambda_[j] = std::min(1.0, std::exp(raw.log_lambda[j]));
        b.amplitude_[j] = std::sqrt(b.lambda_[j]);
        b.psi0_[j] = b.amplitude_[j] * raw.psi0_unit[j];
    }
    b.beta_ = std::move(raw.beta);
    // Series length per order: coefficients decay super-exponentially past k ~ j + c,
    // and terms below 1e-20 of the unit-norm vector cannot change a double result.
    b.active_.assign(j_max + 1, 0);
    for (int j = 0; j <= j_max; ++j) {
        int last = j;
        for (int k = 0; k < b.terms_; ++k) {
            if (std::abs(b.beta_[j][k]) > 1e-20) {
                last = k;
            }
        }
        b.active_[j] = last + 1;
    }
    return b;
}

int largest_safe_order(double c, int cap) {
    validate(c, cap);
    RawSystem raw = solve_raw(c, cap);
    const double log_floor = std::log(kEigenvalueFloor);
    for (int j = 0; j <= cap; ++j) {
        if (!(raw.log_lambda[j] >= log_floor)) {
            return j - 1;
        }
    }
    return cap;
}

void SlepianBasis::check_order(int j) const {
    if (j < 0 || j >= size()) {
        throw Error(Status::order_out_of_range,
                    "order " + std::to_string(j) + " outside [0, " + std::to_string(j_max()) + "]");
    }
}

double SlepianBasis::eigenvalue(int j) const {
    check_order(j);
    return lambda_[j];
}

double SlepianBasis::log_eigenvalue(int j) const {
    check_order(j);
    return log_lambda_[j];
}

Parity SlepianBasis::parity(int j) const {
    check_order(j);
    return j % 2 == 0 ? Parity::even : Parity::odd;
}

double SlepianBasis::value_at_zero(int j) const {
    check_order(j);
    return psi0_[j];
}

double SlepianBasis::coupling(int j) const {
    check_order(j);
    if (j % 2 == 1) {
        return 0.0;
    }
    return std::sqrt(2 * kPi / c_) * std::abs(psi0_[j]);
}

std::span<const double> SlepianBasis::legendre_coefficients(int j) const {
    check_order(j);
    return beta_[j];
}

double SlepianBasis::eval(int j, double s) const {
    return std::abs(s) <= 1.0 ? eval_inside(j, s) : eval_outside(j, s);
}

double SlepianBasis::eval_inside(int j, double s) const {
    check_order(j);
    if (!(std::abs(s) <= 1.0)) {
        throw Error(Status::domain_error, "eval_inside requires |s| <= 1");
    }
    const int len = active_[j];
    std::vector<double> p(len);
    normalized_legendre(s, p);
    const std::vector<double> &b = beta_[j];
    double acc = 0;
    for (int k = j % 2; k < len; k += 2) {
        acc += b[k] * p[k];
    }
    return amplitude_[j] * acc;
}

double SlepianBasis::eval_outside(int j, double s) const {
    check_order(j);
    if (!(std::abs(s) > 1.0) || !std::isfinite(s)) {
        throw Error(Status::domain_error, "eval_outside requires finite |s| > 1");
    }
    const int len = active_[j];
    std::vector<double> jk(len);
    spherical_bessel(c_ * std::abs(s), jk);
    const std::vector<double> &b = beta_[j];
    double acc = 0;
    for (int k = j % 2; k < len; k += 2) {
        const double sign = ((k - j) / 2) % 2 == 0 ? 1.0 : -1.0;
        acc += sign * b[k] * std::sqrt(k + 0.5) * jk[k];
    }
    acc *= 2 * std::sqrt(c_ / (2 * kPi));
    return (s < 0 && j % 2 == 1) ? -acc : acc;
}

void SlepianBasis::eval_all(double s, std::span<double> out) const {
    const int n = static_cast<int>(out.size());
    if (n > size()) {
        throw Error(Status::order_out_of_range, "eval_all asked for more orders than the basis holds");
    }
    int len = 1;
    for (int j = 0; j < n; ++j) {
        len = std::max(len, active_[j]);
    }
    std::vector<double> f(len);
    const bool inside = std::abs(s) <= 1.0;
    if (inside) {
        normalized_legendre(s, f);
    } else {
        if (!std::isfinite(s)) {
            throw Error(Status::domain_error, "eval_all requires finite s");
        }
        spherical_bessel(c_ * std::abs(s), f);
    }
    const double outer = 2 * std::sqrt(c_ / (2 * kPi));
    for (int j = 0; j < n; ++j) {
        const std::vector<double> &b = beta_[j];
        double acc = 0;
        for (int k = j % 2; k < active_[j]; k += 2) {
            if (inside) {
                acc += b[k] * f[k];
            } else {
                const double sign = ((k - j) / 2) % 2 == 0 ? 1.0 : -1.0;
                acc += sign * b[k] * std::sqrt(k + 0.5) * f[k];
            }
        }
        if (inside) {
            out[j] = amplitude_[j] * acc;
        } else {
            acc *= outer;
            out[j] = (s < 0 && j % 2 == 1) ? -acc : acc;
        }
    }
}

SlepianBasis SlepianBasis::with_scaled_eigenvalues(double factor) const {
    if (!(factor > 0) || !std::isfinite(factor)) {
        throw Error(Status::non_positive_parameter, "eigenvalue scale must be positive");
    }
    SlepianBasis out = *this;
    for (int j = 0; j < size(); ++j) {
        out.lambda_[j] *= factor;
        out.log_lambda_[j] += std::log(factor);
    }
    return out;
}

NoiseKernelTable noise_kernel(const SlepianBasis &basis, std::span<const double> grid, int truncation) {
    if (truncation < 0) {
        throw Error(Status::invalid_argument, "noise-kernel truncation must be non-negative");
    }
    const int top = truncation - truncation % 2;
    if (top > basis.j_max()) {
        throw Error(Status::order_out_of_range, "noise-kernel truncation " + std::to_string(truncation) +
                                                    " exceeds basis order " + std::to_string(basis.j_max()));
    }
    NoiseKernelTable table;
    table.c = basis.c();
    table.truncation_order = top;
    table.grid.assign(grid.begin(), grid.end());
    table.values.assign(grid.size(), 0.0);
    std::vector<double> w(top + 1);
    for (int j = 0; j <= top; j += 2) {
        const double a = basis.coupling(j);
        w[j] = a * a;
    }
    std::vector<double> psi(top + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        basis.eval_all(grid[i], psi);
        double g = 0;
        for (int j = 0; j <= top; j += 2) {
            g += w[j] * psi[j] * psi[j];
        }
        table.values[i] = g;
    }
    return table;
}

double noise_kernel_constant(const SlepianBasis &basis, int truncation) {
    const int top = truncation - truncation % 2;
    if (truncation < 0 || top > basis.j_max()) {
        throw Error(Status::order_out_of_range, "noise-kernel truncation outside the basis");
    }
    double sum = 0;
    for (int j = 0; j <= top; j += 2) {
        const double a = basis.coupling(j);
        sum += a * a;
    }
    return sum;
}

}  // namespace memsl
