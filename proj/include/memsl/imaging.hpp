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

#ifndef MEMSL_IMAGING_HPP
#define MEMSL_IMAGING_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "memsl/pswf.hpp"

namespace memsl {

// Default image grid: wide enough that the retained orders are well represented.
inline constexpr double kImageHalfWidth = 4.0;
inline constexpr std::size_t kImagePoints = 2048;

// Reconstruction refuses orders whose eigenvalue is below this. Past it, rounding
// in the coefficients is amplified by 1/sqrt(lambda) beyond about 1e-6.
inline constexpr double kReconstructionFloor = 1e-20;

/// 4-f imaging geometry in SI units plus its dimensionless parameters.
struct ImagingSystem {
    double focal_length = 0;  // f [m]
    double wavelength = 0;    // [m]
    double pupil = 0;         // d [m]
    double object_size = 0;   // Y [m]
    double c = 0;             // pi d Y / (2 wavelength f)
    double shannon = 0;       // 2c / pi
    double rayleigh = 0;      // wavelength f / d [m]
};

ImagingSystem derive_dimensionless(double focal_length, double wavelength, double pupil, double object_size);

enum class Domain { object_plane, image_plane };

// Real field samples on a strictly increasing grid.
struct FieldSamples {
    std::vector<double> grid;
    std::vector<double> values;
    Domain domain = Domain::object_plane;
};

std::vector<double> default_image_grid();

// Image of an object supported on [-1, 1] under the sinc kernel. The object is
// interpolated by local cubics and each cell is integrated by Gauss-Legendre.
FieldSamples object_to_image(double c, const FieldSamples &object, std::span<const double> image_grid);
FieldSamples object_to_image(const ImagingSystem &sys, const FieldSamples &object);

// Coefficients e_j, j < n_orders, by least squares against psi_j on the image grid.
// With psi_j orthonormal on the whole line this is the whole-line inner product
// whenever the window holds the image, and it stays exact for truncated windows.
std::vector<double> decompose_image(const SlepianBasis &basis, const FieldSamples &image, int n_orders = -1);

// sum_j e_j psi_j(s) on the grid.
FieldSamples compose_image(const SlepianBasis &basis, std::span<const double> coefficients,
                           std::span<const double> grid);

// a(s') = sum_{j <= Q} (e_j / lambda_j) psi_j(s') on a grid inside [-1, 1].
FieldSamples reconstruct_object_estimate(const SlepianBasis &basis, std::span<const double> coefficients, int Q,
                                         std::span<const double> grid);

// int_{-1}^{1} phi(s') psi_j(s') ds' for j < n_orders, with phi interpolated from samples.
std::vector<double> interval_moments(const SlepianBasis &basis, const FieldSamples &object, int n_orders);

// Rank-Q projection sum_{j <= Q} (<phi, psi_j> / lambda_j) psi_j on the grid.
FieldSamples rank_projection(const SlepianBasis &basis, const FieldSamples &object, int Q,
                             std::span<const double> grid);

// Local cubic interpolation of samples; zero outside [-1, 1].
class ObjectInterpolant {
  public:
    explicit ObjectInterpolant(const FieldSamples &object);
    double operator()(double s) const;

  private:
    const FieldSamples &object_;
};

}  // namespace memsl

#endif
