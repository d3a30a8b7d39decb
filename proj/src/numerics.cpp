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

#include "memsl/numerics.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "memsl/status.hpp"

namespace memsl {

namespace {

GaussLegendre compute_gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1);
        double w = 2 / ((1 - x * x) * dp * dp);
        gl.nodes[n - 1 - i] = x;
        gl.nodes[i] = -x;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        gl.nodes[n / 2] = 0;
    }
    return gl;
}

}  // namespace

const GaussLegendre &gauss_legendre(int n) {
    if (n < 1) {
        throw Error(Status::invalid_argument, "quadrature order must be positive");
    }
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto &slot = cache[n];
    if (!slot) {
        slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(n));
    }
    return *slot;
}

GaussLegendre gauss_legendre(int n, double a, double b) {
    const GaussLegendre &ref = gauss_legendre(n);
    GaussLegendre out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        out.nodes[i] = mid + half * ref.nodes[i];
        out.weights[i] = half * ref.weights[i];
    }
    return out;
}

void normalized_legendre(double x, std::span<double> out) {
    const std::size_t n = out.size();
    if (n == 0) {
        return;
    }
    double p0 = 1, p1 = x;
    out[0] = std::sqrt(0.5);
    if (n > 1) {
        out[1] = std::sqrt(1.5) * x;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double p2 = ((2.0 * k + 1) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
        out[k + 1] = std::sqrt(k + 1.5) * p2;
    }
}

void normalized_legendre_derivative_at_zero(std::span<double> out) {
    // P_k'(0) = k P_{k-1}(0), and P_m(0) is nonzero only for even m.
    double p_even = 1;  // P_0(0)
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (k % 2 == 0) {
            out[k] = 0;
            if (k > 0) {
                p_even *= -(k - 1.0) / k;  // P_k(0) from P_{k-2}(0)
            }
        } else {
            out[k] = std::sqrt(k + 0.5) * k * p_even;
        }
    }
}

std::vector<double> trapezoid_weights(std::span<const double> grid) {
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double h = 0.5 * (grid[i + 1] - grid[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    return w;
}

double sinc_kernel(double c, double x, double y) {
    const double d = x - y;
    const double t = c * d;
    if (std::abs(t) < 1e-4) {
        const double t2 = t * t;
        return c / std::numbers::pi * (1 - t2 / 6 * (1 - t2 / 20));
    }
    return std::sin(t) / (std::numbers::pi * d);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    v[n - 1] = b;
    return v;
}

}  // namespace memsl
