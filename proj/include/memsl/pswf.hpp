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

#ifndef MEMSL_PSWF_HPP
#define MEMSL_PSWF_HPP

#include <span>
#include <vector>

namespace memsl {

// Orders whose eigenvalue falls below this are reported as unavailable.
inline constexpr double kEigenvalueFloor = 1e-300;

// Default noise-kernel truncation: even orders through 40.
inline constexpr int kDefaultKernelTruncation = 40;

enum class Parity { even = 0, odd = 1 };

/// Prolate spheroidal basis for the sinc kernel sin(c(x-y))/(pi(x-y)) on [-1, 1].
///
/// Normalization: the integral of psi_j^2 over [-1, 1] is lambda_j and over the
/// whole line it is 1. Signs: psi_j(0) > 0 for even j, psi_j'(0) > 0 for odd j.
///
/// Inside [-1, 1] psi_j is a Legendre series (Galerkin discretization of the
/// commuting differential operator). Outside it is the spherical Bessel series
/// obtained from the finite Fourier transform of that Legendre series, which
/// carries no 1/lambda_j amplification. Instances are immutable.
class SlepianBasis {
  public:
    double c() const { return c_; }
    int j_max() const { return static_cast<int>(lambda_.size()) - 1; }
    int size() const { return static_cast<int>(lambda_.size()); }
    int legendre_terms() const { return terms_; }

    double eigenvalue(int j) const;
    double log_eigenvalue(int j) const;  // natural log
    Parity parity(int j) const;

    // A_j = sqrt(2 pi / c) |psi_j(0)|; exactly zero for odd orders.
    double coupling(int j) const;
    double value_at_zero(int j) const;

    // Dispatches on |s| <= 1.
    double eval(int j, double s) const;
    double eval_inside(int j, double s) const;
    double eval_outside(int j, double s) const;

    // psi_0(s) .. psi_{n-1}(s) in one pass, n = out.size() <= size().
    void eval_all(double s, std::span<double> out) const;

    // Unit-norm Legendre coefficients beta_k of psi_j / sqrt(lambda_j) in the
    // orthonormal basis sqrt(k + 1/2) P_k.
    std::span<const double> legendre_coefficients(int j) const;

    // Copy whose reported eigenvalues are multiplied by `factor`; evaluators are
    // unchanged. Exists so harnesses can check that eigenvalue errors are caught.
    SlepianBasis with_scaled_eigenvalues(double factor) const;

  private:
    friend SlepianBasis build_basis(double c, int j_max);
    void check_order(int j) const;

    double c_ = 0;
    int terms_ = 0;
    std::vector<double> lambda_;
    std::vector<double> log_lambda_;
    std::vector<double> amplitude_;  // sqrt of the computed eigenvalue, never rescaled
    std::vector<double> psi0_;
    std::vector<std::vector<double>> beta_;
    std::vector<int> active_;  // significant series length per order
};

/// Throws UnderflowOrderError when lambda_{j_max} < kEigenvalueFloor and
/// Error(non_convergence) when the tridiagonal eigensolver fails.
SlepianBasis build_basis(double c, int j_max);

// Highest order whose eigenvalue stays above kEigenvalueFloor, capped at `cap`.
int largest_safe_order(double c, int cap = 400);

struct NoiseKernelTable {
    double c = 0;
    std::vector<double> grid;
    std::vector<double> values;
    int truncation_order = 0;
};

// G(c, s) = sum over even j <= truncation of (2 pi / c) psi_j(0)^2 psi_j(s)^2.
NoiseKernelTable noise_kernel(const SlepianBasis &basis, std::span<const double> grid,
                              int truncation = kDefaultKernelTruncation);

// Partial sum of (2 pi / c) psi_j(0)^2 over even j <= truncation. Tends to 2.
double noise_kernel_constant(const SlepianBasis &basis, int truncation = kDefaultKernelTruncation);

}  // namespace memsl

#endif
