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

#ifndef MEMSL_NUMERICS_HPP
#define MEMSL_NUMERICS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace memsl {

// Interval integrals use this many Gauss-Legendre nodes unless a caller asks otherwise.
inline constexpr int kDefaultQuadratureOrder = 256;

struct GaussLegendre {
    std::vector<double> nodes;    // ascending, on [-1, 1]
    std::vector<double> weights;
};

// Nodes by Newton iteration on the three-term recurrence. Result for each n is cached.
const GaussLegendre &gauss_legendre(int n);

// Gauss-Legendre rule mapped to [a, b].
GaussLegendre gauss_legendre(int n, double a, double b);

// out[k] = sqrt(k + 1/2) P_k(x) for k < out.size(). These are orthonormal on [-1, 1].
void normalized_legendre(double x, std::span<double> out);

// out[k] = d/dx of sqrt(k + 1/2) P_k(x) at x = 0.
void normalized_legendre_derivative_at_zero(std::span<double> out);

// Trapezoid weights for an arbitrary strictly increasing grid.
std::vector<double> trapezoid_weights(std::span<const double> grid);

// The sinc kernel sin(c(x - y)) / (pi (x - y)), with its c/pi limit on the diagonal.
double sinc_kernel(double c, double x, double y);

// Uniform grid of n points on [a, b], endpoints included.
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace memsl

#endif
