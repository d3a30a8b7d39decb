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

#include "memsl/imaging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "memsl/numerics.hpp"
#include "memsl/status.hpp"

namespace memsl {

namespace {

constexpr int kCellOrder = 8;
constexpr double kSpanTol = 1e-12;
constexpr double kMinWindowGram = 1e-4;

void check_grid(std::span<const double> grid, const char *what) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) {
            throw Error(Status::invalid_argument, std::string(what) + " grid holds a non-finite point");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw Error(Status::invalid_argument, std::string(what) + " grid must be strictly increasing");
        }
    }
}

void check_object(const FieldSamples &object) {
    if (object.grid.size() < 4 || object.values.size() != object.grid.size()) {
        throw Error(Status::invalid_argument, "object needs at least 4 samples and one value per grid point");
    }
    check_grid(object.grid, "object");
    if (object.grid.front() > -1 + kSpanTol || object.grid.back() < 1 - kSpanTol) {
        throw Error(Status::invalid_argument, "object grid must span [-1, 1]");
    }
    for (double v : object.values) {
        if (!std::isfinite(v)) {
            throw Error(Status::invalid_argument, "object holds a non-finite value");
        }
    }
}

// Gauss nodes on the cells [-1, g_1], [g_1, g_2], ..., [g_k, 1] cut by the object grid.
struct CellRule {
    std::vector<double> nodes, weights, values;
};

CellRule cell_rule(const FieldSamples &object, double c_for_spacing) {
    check_object(object);
    std::vector<double> cuts{-1.0};
    for (double g : object.grid) {
        if (g > -1 + kSpanTol && g < 1 - kSpanTol) {
            cuts.push_back(g);
        }
    }
    cuts.push_back(1.0);
    if (c_for_spacing > 0) {
        double widest = 0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            widest = std::max(widest, cuts[i + 1] - cuts[i]);
        }
        const double limit = std::numbers::pi / (8 * c_for_spacing);
        if (widest > limit) {
            throw Error(Status::grid_too_coarse, "object grid spacing " + std::to_string(widest) +
                                                     " exceeds pi/(8c) = " + std::to_string(limit));
        }
    }
    ObjectInterpolant phi(object);
    CellRule rule;
    const GaussLegendre &gl = gauss_legendre(kCellOrder);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double half = 0.5 * (cuts[i + 1] - cuts[i]), mid = 0.5 * (cuts[i + 1] + cuts[i]);
        for (int q = 0; q < kCellOrder; ++q) {
            const double x = mid + half * gl.nodes[q];
            rule.nodes.push_back(x);
            rule.weights.push_back(half * gl.weights[q]);
            rule.values.push_back(phi(x));
        }
    }
    return rule;
}

}  // namespace

ImagingSystem derive_dimensionless(double focal_length, double wavelength, double pupil, double object_size) {
    const struct {
        const char *name;
        double v;
    } fields[] = {{"focal_length", focal_length}, {"wavelength", wavelength}, {"pupil", pupil}, {"object_size", object_size}};
    for (const auto &f : fields) {
        if (!(f.v > 0) || !std::isfinite(f.v)) {
            throw Error(Status::non_positive_parameter, std::string(f.name) + " must be positive and finite");
        }
    }
    ImagingSystem sys;
    sys.focal_length = focal_length;
    sys.wavelength = wavelength;
    sys.pupil = pupil;
    sys.object_size = object_size;
    sys.c = std::numbers::pi * pupil * object_size / (2 * wavelength * focal_length);
    sys.shannon = pupil * object_size / (wavelength * focal_length);
    sys.rayleigh = wavelength * focal_length / pupil;
    return sys;
}

std::vector<double> default_image_grid() { return linspace(-kImageHalfWidth, kImageHalfWidth, kImagePoints); }

ObjectInterpolant::ObjectInterpolant(const FieldSamples &object) : object_(object) {}

double ObjectInterpolant::operator()(double s) const {
    if (s < -1 || s > 1) {
        return 0.0;
    }
    const std::vector<double> &x = object_.grid, &y = object_.values;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    std::ptrdiff_t i = std::upper_bound(x.begin(), x.end(), s) - x.begin() - 1;
    i = std::clamp<std::ptrdiff_t>(i - 1, 0, n - 4);
    double acc = 0;
    for (std::ptrdiff_t a = i; a < i + 4; ++a) {
        double l = 1;
        for (std::ptrdiff_t b = i; b < i + 4; ++b) {
            if (b != a) {
                l *= (s - x[b]) / (x[a] - x[b]);
            }
        }
        acc += l * y[a];
    }
    return acc;
}

FieldSamples object_to_image(double c, const FieldSamples &object, std::span<const double> image_grid) {
    if (!(c > 0)) {
        throw Error(Status::non_positive_parameter, "c must be positive");
    }
    check_grid(image_grid, "image");
    const CellRule rule = cell_rule(object, c);
    FieldSamples image;
    image.domain = Domain::image_plane;
    image.grid.assign(image_grid.begin(), image_grid.end());
    image.values.resize(image_grid.size());
    for (std::size_t i = 0; i < image_grid.size(); ++i) {
        double acc = 0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            acc += rule.weights[q] * rule.values[q] * sinc_kernel(c, image_grid[i], rule.nodes[q]);
        }
        image.values[i] = acc;
    }
    return image;
}

FieldSamples object_to_image(const ImagingSystem &sys, const FieldSamples &object) {
    const std::vector<double> grid = default_image_grid();
    return object_to_image(sys.c, object, grid);
}

std::vector<double> decompose_image(const SlepianBasis &basis, const FieldSamples &image, int n_orders) {
    const int J = n_orders < 0 ? basis.size() : n_orders;
    if (J < 1 || J > basis.size()) {
        throw Error(Status::order_out_of_range, "decomposition order count outside the basis");
    }
    if (image.values.size() != image.grid.size() || image.grid.size() < static_cast<std::size_t>(J)) {
        throw Error(Status::invalid_argument, "image needs one value per grid point and more points than orders");
    }
    check_grid(image.grid, "image");
    if (image.grid.front() > -1 + kSpanTol || image.grid.back() < 1 - kSpanTol) {
        throw Error(Status::grid_too_narrow, "image grid must span at least [-1, 1]");
    }
    const std::vector<double> w = trapezoid_weights(image.grid);
    const Eigen::Index N = static_cast<Eigen::Index>(image.grid.size());
    Eigen::MatrixXd A(N, J);
    Eigen::VectorXd rhs(N);
    std::vector<double> psi(J);
    for (Eigen::Index i = 0; i < N; ++i) {
        basis.eval_all(image.grid[i], psi);
        const double sw = std::sqrt(w[i]);
        for (int j = 0; j < J; ++j) {
            A(i, j) = sw * psi[j];
        }
        rhs(i) = sw * image.values[i];
    }
    // Band-limited tails fall off like 1/s, so no finite window holds all of the
    // energy. A least-squares fit is still exact on the span; the windowed Gram
    // matrix only has to stay well conditioned.
    const Eigen::MatrixXd gram = A.transpose() * A;
    const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (!(smallest >= kMinWindowGram)) {
        throw Error(Status::grid_too_narrow, "image window too narrow for " + std::to_string(J) +
                                                 " orders (Gram eigenvalue " + std::to_string(smallest) + ")");
    }
    const Eigen::VectorXd e = A.colPivHouseholderQr().solve(rhs);
    return std::vector<double>(e.data(), e.data() + J);
}

FieldSamples compose_image(const SlepianBasis &basis, std::span<const double> coefficients,
                           std::span<const double> grid) {
    const int J = static_cast<int>(coefficients.size());
    if (J > basis.size()) {
        throw Error(Status::order_out_of_range, "more coefficients than basis orders");
    }
    check_grid(grid, "image");
    FieldSamples image;
    image.domain = Domain::image_plane;
    image.grid.assign(grid.begin(), grid.end());
    image.values.resize(grid.size());
    std::vector<double> psi(J);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        basis.eval_all(grid[i], psi);
        double acc = 0;
        for (int j = 0; j < J; ++j) {
            acc += coefficients[j] * psi[j];
        }
        image.values[i] = acc;
    }
    return image;
}

FieldSamples reconstruct_object_estimate(const SlepianBasis &basis, std::span<const double> coefficients, int Q,
                                         std::span<const double> grid) {
    if (Q < 0 || Q > basis.j_max() || Q >= static_cast<int>(coefficients.size())) {
        throw Error(Status::order_out_of_range, "cutoff Q = " + std::to_string(Q) + " outside the available orders");
    }
    if (basis.eigenvalue(Q) < kReconstructionFloor) {
        throw Error(Status::eigenvalue_underflow, "lambda_" + std::to_string(Q) + " = " +
                                                      std::to_string(basis.eigenvalue(Q)) +
                                                      " is below the reconstruction floor 1e-20");
    }
    check_grid(grid, "object");
    FieldSamples out;
    out.domain = Domain::object_plane;
    out.grid.assign(grid.begin(), grid.end());
    out.values.resize(grid.size());
    std::vector<double> psi(Q + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid[i]) > 1) {
            throw Error(Status::domain_error, "reconstruction grid must lie inside [-1, 1]");
        }
        basis.eval_all(grid[i], psi);
        double acc = 0;
        for (int j = 0; j <= Q; ++j) {
            acc += coefficients[j] / basis.eigenvalue(j) * psi[j];
        }
        out.values[i] = acc;
    }
    return out;
}

std::vector<double> interval_moments(const SlepianBasis &basis, const FieldSamples &object, int n_orders) {
    if (n_orders < 1 || n_orders > basis.size()) {
        throw Error(Status::order_out_of_range, "moment count outside the basis");
    }
    const CellRule rule = cell_rule(object, 0.0);
    std::vector<double> m(n_orders, 0.0), psi(n_orders);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        basis.eval_all(rule.nodes[q], psi);
        const double wv = rule.weights[q] * rule.values[q];
        for (int j = 0; j < n_orders; ++j) {
            m[j] += wv * psi[j];
        }
    }
    return m;
}

FieldSamples rank_projection(const SlepianBasis &basis, const FieldSamples &object, int Q,
                             std::span<const double> grid) {
    const std::vector<double> m = interval_moments(basis, object, Q + 1);
    return reconstruct_object_estimate(basis, m, Q, grid);
}

}  // namespace memsl
