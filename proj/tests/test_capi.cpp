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

// Exercises the shared library through its C header only.

#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "memsl/memsl.h"

namespace {

std::vector<double> lin(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

struct Basis {
    memsl_basis *h = nullptr;
    Basis(double c, int jmax) {
        int st = -1;
        h = memsl_basis_new(c, jmax, &st);
        REQUIRE(st == MEMSL_OK);
        REQUIRE(h != nullptr);
    }
    ~Basis() { memsl_basis_release(h); }
};

}  // namespace

TEST_CASE("version and status strings") {
    CHECK(std::strlen(memsl_version()) > 0);
    CHECK(std::string(memsl_status_message(MEMSL_OK)).size() > 0);
    CHECK(std::string(memsl_status_message(MEMSL_GRID_TOO_NARROW)) != memsl_status_message(MEMSL_OK));
    CHECK(memsl_status_message(12345) != nullptr);
}

TEST_CASE("basis handle") {
    Basis b(3.07, 20);
    double c = 0, lam0 = 0, lam1 = 0, loglam = 0, a0 = 0, a1 = 0;
    int jmax = 0, parity = -1;
    CHECK(memsl_basis_c(b.h, &c) == MEMSL_OK);
    CHECK(c == 3.07);
    CHECK(memsl_basis_jmax(b.h, &jmax) == MEMSL_OK);
    CHECK(jmax == 20);
    CHECK(memsl_basis_eigenvalue(b.h, 0, &lam0) == MEMSL_OK);
    CHECK(memsl_basis_eigenvalue(b.h, 1, &lam1) == MEMSL_OK);
    CHECK(lam0 > lam1);
    CHECK(lam0 < 1);
    CHECK(memsl_basis_log_eigenvalue(b.h, 0, &loglam) == MEMSL_OK);
    CHECK(std::exp(loglam) == doctest::Approx(lam0).epsilon(1e-14));
    CHECK(memsl_basis_coupling(b.h, 0, &a0) == MEMSL_OK);
    CHECK(memsl_basis_coupling(b.h, 1, &a1) == MEMSL_OK);
    CHECK(a0 > 0);
    CHECK(a1 == 0.0);
    CHECK(memsl_basis_parity(b.h, 3, &parity) == MEMSL_OK);
    CHECK(parity == 1);

    const auto s = lin(-2, 2, 9);
    std::vector<double> v(s.size());
    CHECK(memsl_basis_eval(b.h, 2, s.size(), s.data(), v.data()) == MEMSL_OK);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(v[i] == doctest::Approx(v[s.size() - 1 - i]).epsilon(1e-13));
    }

    // Out-of-range order reports through the return code and last error.
    double x = 0;
    CHECK(memsl_basis_eigenvalue(b.h, 21, &x) == MEMSL_ORDER_OUT_OF_RANGE);
    CHECK(std::string(memsl_last_error()).size() > 0);
    CHECK(memsl_basis_eigenvalue(nullptr, 0, &x) == MEMSL_INVALID_ARGUMENT);
    CHECK(memsl_basis_eigenvalue(b.h, 0, nullptr) == MEMSL_INVALID_ARGUMENT);

    int st = 0;
    memsl_basis *scaled = memsl_basis_scaled_copy(b.h, 1.001, &st);
    REQUIRE(st == MEMSL_OK);
    double ls = 0;
    memsl_basis_eigenvalue(scaled, 0, &ls);
    CHECK(ls == doctest::Approx(1.001 * lam0).epsilon(1e-14));
    memsl_basis_release(scaled);
    memsl_basis_release(nullptr);
}

TEST_CASE("basis construction errors") {
    int st = MEMSL_OK;
    CHECK(memsl_basis_new(-1, 10, &st) == nullptr);
    CHECK(st == MEMSL_NON_POSITIVE_PARAMETER);
    CHECK(std::string(memsl_last_error()).find('c') != std::string::npos);
    CHECK(memsl_basis_new(3.07, -2, &st) == nullptr);
    CHECK(st != MEMSL_OK);
    int safe = 0;
    CHECK(memsl_largest_safe_order(3.07, 200, &safe) == MEMSL_OK);
    CHECK(safe > 12);
}

TEST_CASE("geometry, photon budget and optimizer") {
    memsl_geometry g{};
    REQUIRE(memsl_geometry_derive(0.01, 780e-9, 0.0508, 300e-9, &g) == MEMSL_OK);
    CHECK(g.c == doctest::Approx(3.07).epsilon(0.01 / 3.07));
    CHECK(g.rayleigh == doctest::Approx(153.5e-9).epsilon(0.01));
    CHECK(memsl_geometry_derive(0.01, 780e-9, 0, 300e-9, &g) == MEMSL_NON_POSITIVE_PARAMETER);
    CHECK(std::string(memsl_last_error()).find("pupil") != std::string::npos);

    memsl_optimum opt{};
    REQUIRE(memsl_optimize(MEMSL_PROTOCOL_MEMSL, 8, 6, 1, 1, &opt) == MEMSL_OK);
    CHECK(std::exp(-opt.r_opt) == doctest::Approx(0.1015).epsilon(1e-3));
    CHECK(opt.alpha_opt == doctest::Approx(4.924).epsilon(1e-3));
    memsl_source src{MEMSL_PROTOCOL_MEMSL, 8, opt.alpha_opt, opt.r_opt, 1};
    double N = 0, sigma = 0;
    CHECK(memsl_photons_on_sample(&src, &N) == MEMSL_OK);
    CHECK(N == doctest::Approx(6).epsilon(1e-12));
    CHECK(memsl_sigma(&src, 1, &sigma) == MEMSL_OK);
    CHECK(sigma == doctest::Approx(opt.sigma_opt).epsilon(1e-12));

    CHECK(memsl_optimize(MEMSL_PROTOCOL_MEMSL, 8, 6, 1.5, 1, &opt) == MEMSL_DOMAIN_ERROR);
    CHECK(memsl_optimize(7, 8, 6, 1, 1, &opt) == MEMSL_INVALID_ARGUMENT);
    memsl_source bad{MEMSL_PROTOCOL_COHERENT, 8, 2, 0.3, 1};
    CHECK(memsl_photons_on_sample(&bad, &N) == MEMSL_PROTOCOL_MISMATCH);

    double res = 0;
    CHECK(memsl_resolution(300e-9, 7, &res) == MEMSL_OK);
    CHECK(res == doctest::Approx(37.5e-9));
}

TEST_CASE("Q selection through the C API") {
    Basis b(3.07, 40);
    int Q = 0;
    CHECK(memsl_select_q(b.h, MEMSL_PROTOCOL_MEMSL, 8, 6, 1, 1, &Q) == MEMSL_OK);
    CHECK(Q == 7);
    double lb = 0;
    CHECK(memsl_log10_q_bound(MEMSL_PROTOCOL_MEMSL, 8, 6, 1, &lb) == MEMSL_OK);
    CHECK(lb == doctest::Approx(std::log10(8.0 * 48 * 48 * 49)));
    double scale = 0;
    CHECK(memsl_error_scale(b.h, 7, 0, &scale) == MEMSL_OK);
    double a6 = 0, l6 = 0;
    memsl_basis_coupling(b.h, 6, &a6);
    memsl_basis_eigenvalue(b.h, 6, &l6);
    CHECK(scale == doctest::Approx(a6 / l6 / (2 * std::sqrt(2.0))).epsilon(1e-12));
    Basis small(3.07, 6);
    CHECK(memsl_select_q(small.h, MEMSL_PROTOCOL_MEMSL, 8, 6, 1e6, 1, &Q) == MEMSL_BASIS_TOO_SMALL);
}

TEST_CASE("object-to-image, decomposition and inversion") {
    Basis b(3.07, 12);
    double lam3 = 0;
    memsl_basis_eigenvalue(b.h, 3, &lam3);
    const auto obj_s = lin(-1, 1, 1001);
    std::vector<double> obj(obj_s.size());
    REQUIRE(memsl_basis_eval(b.h, 3, obj_s.size(), obj_s.data(), obj.data()) == MEMSL_OK);
    for (double &v : obj) {
        v /= std::sqrt(lam3);
    }
    const auto img_s = lin(-4, 4, 2048);
    std::vector<double> img(img_s.size());
    REQUIRE(memsl_object_to_image(3.07, obj_s.size(), obj_s.data(), obj.data(), img_s.size(), img_s.data(),
                                  img.data()) == MEMSL_OK);
    std::vector<double> e(8);
    REQUIRE(memsl_decompose_image(b.h, img_s.size(), img_s.data(), img.data(), 8, e.data()) == MEMSL_OK);
    for (int j = 0; j < 8; ++j) {
        CHECK(std::abs(e[j] - (j == 3 ? std::sqrt(lam3) : 0.0)) < 1e-8);
    }
    const auto rs = lin(-1, 1, 21);
    std::vector<double> rec(rs.size());
    REQUIRE(memsl_reconstruct_estimate(b.h, e.size(), e.data(), 7, rs.size(), rs.data(), rec.data()) == MEMSL_OK);
    std::vector<double> psi3(rs.size());
    memsl_basis_eval(b.h, 3, rs.size(), rs.data(), psi3.data());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        CHECK(rec[i] == doctest::Approx(psi3[i] / std::sqrt(lam3)).epsilon(1e-7).scale(1e-7));
    }

    const auto narrow = lin(-0.5, 0.5, 100);
    std::vector<double> ones(100, 1.0);
    CHECK(memsl_decompose_image(b.h, narrow.size(), narrow.data(), ones.data(), 6, e.data()) == MEMSL_GRID_TOO_NARROW);
    const auto coarse = lin(-1, 1, 9);
    std::vector<double> zeros(9, 0.0);
    CHECK(memsl_object_to_image(3.07, coarse.size(), coarse.data(), zeros.data(), img_s.size(), img_s.data(),
                                img.data()) == MEMSL_GRID_TOO_COARSE);
    Basis big(3.07, 16);
    std::vector<double> wide(14, 0.0);
    CHECK(memsl_reconstruct_estimate(big.h, wide.size(), wide.data(), 13, rs.size(), rs.data(), rec.data()) ==
          MEMSL_EIGENVALUE_UNDERFLOW);
    CHECK(memsl_reconstruct_estimate(b.h, e.size(), e.data(), 9, rs.size(), rs.data(), rec.data()) ==
          MEMSL_ORDER_OUT_OF_RANGE);
}

TEST_CASE("noise kernel and pointwise variance") {
    Basis b(3.07, 40);
    const auto s = lin(-1, 1, 11);
    std::vector<double> G(s.size()), vm(s.size()), vc(s.size());
    REQUIRE(memsl_noise_kernel(b.h, 40, s.size(), s.data(), G.data()) == MEMSL_OK);
    double E = 0;
    REQUIRE(memsl_noise_kernel_constant(b.h, 40, &E) == MEMSL_OK);
    CHECK(E > 0);
    memsl_optimum opt{};
    memsl_optimize(MEMSL_PROTOCOL_MEMSL, 8, 6, 1, 1, &opt);
    memsl_source ms{MEMSL_PROTOCOL_MEMSL, 8, opt.alpha_opt, opt.r_opt, 1};
    memsl_source cs{MEMSL_PROTOCOL_COHERENT, 8, std::sqrt(6.0), 0, 1};
    REQUIRE(memsl_pointwise_variance(b.h, &ms, 40, s.size(), s.data(), vm.data()) == MEMSL_OK);
    REQUIRE(memsl_pointwise_variance(b.h, &cs, 40, s.size(), s.data(), vc.data()) == MEMSL_OK);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(vm[i] / vc[i] == doctest::Approx(1.0 / 97).epsilon(1e-12));
        CHECK(vc[i] == doctest::Approx(G[i] / 32).epsilon(1e-13));
    }
    memsl_source is{MEMSL_PROTOCOL_INDEPENDENT, 8, 2, 0.4, 1};
    CHECK(memsl_pointwise_variance(b.h, &is, 40, s.size(), s.data(), vm.data()) == MEMSL_PROTOCOL_MISMATCH);
}

TEST_CASE("simulation run handle") {
    Basis b(3.07, 40);
    std::vector<double> os(401), op(401);
    REQUIRE(memsl_three_lobe_object(os.size(), 0.1, os.data(), op.data()) == MEMSL_OK);
    memsl_optimum opt{};
    memsl_optimize(MEMSL_PROTOCOL_MEMSL, 8, 6, 1, 1, &opt);
    memsl_source src{MEMSL_PROTOCOL_MEMSL, 8, opt.alpha_opt, opt.r_opt, 1};
    int holds = 0;
    double margin = 0;
    CHECK(memsl_small_phase(b.h, os.size(), os.data(), op.data(), opt.r_opt, &holds, &margin) == MEMSL_OK);
    CHECK(holds == 1);
    CHECK(margin > 1);

    memsl_sim_options o;
    memsl_sim_options_init(&o);
    CHECK(o.Q == 7);
    CHECK(o.image_points == 201);
    o.trials = 500;
    o.seed = 99;
    o.truncation = 12;
    int st = -1;
    memsl_run *run = memsl_simulate(b.h, &src, &o, os.size(), os.data(), op.data(), &st);
    REQUIRE(st == MEMSL_OK);
    memsl_run_summary sum{};
    REQUIRE(memsl_run_summary_get(run, &sum) == MEMSL_OK);
    CHECK(sum.Q == 7);
    CHECK(sum.reconstructed == 1);
    CHECK(sum.trials == 500);
    CHECK(sum.seed == 99);
    CHECK(sum.low_confidence == 0);
    CHECK(sum.sigma_empirical > 0);
    CHECK(sum.small_phase_holds == 1);

    std::size_t len = 0;
    CHECK(memsl_run_series(run, MEMSL_SERIES_TRIAL_MEAN, nullptr, 0, &len) == MEMSL_OK);
    CHECK(len == 201);
    std::vector<double> mean(len), grid(len);
    CHECK(memsl_run_series(run, MEMSL_SERIES_TRIAL_MEAN, mean.data(), mean.size(), &len) == MEMSL_OK);
    CHECK(memsl_run_series(run, MEMSL_SERIES_IMAGE_GRID, grid.data(), grid.size(), &len) == MEMSL_OK);
    CHECK(grid.front() == -1.0);
    CHECK(grid.back() == 1.0);
    CHECK(memsl_run_series(run, MEMSL_SERIES_PHI_HAT, nullptr, 0, &len) == MEMSL_OK);
    CHECK(len == 401);
    CHECK(memsl_run_series(run, 42, nullptr, 0, &len) == MEMSL_INVALID_ARGUMENT);

    // Same inputs, same bits.
    memsl_run *again = memsl_simulate(b.h, &src, &o, os.size(), os.data(), op.data(), &st);
    REQUIRE(st == MEMSL_OK);
    std::vector<double> mean2(201);
    memsl_run_series(again, MEMSL_SERIES_TRIAL_MEAN, mean2.data(), mean2.size(), &len);
    CHECK(mean == mean2);
    memsl_run_release(again);
    memsl_run_release(run);

    // Pointwise runs carry no reconstruction.
    o.mode = MEMSL_MODE_POINTWISE;
    run = memsl_simulate(b.h, &src, &o, os.size(), os.data(), op.data(), &st);
    REQUIRE(st == MEMSL_OK);
    memsl_run_summary_get(run, &sum);
    CHECK(sum.reconstructed == 0);
    CHECK(sum.Q == -1);
    CHECK(std::isnan(sum.sigma_empirical));
    CHECK(memsl_run_series(run, MEMSL_SERIES_PHI_HAT, nullptr, 0, &len) == MEMSL_OK);
    CHECK(len == 0);
    memsl_run_release(run);

    o.trials = 0;
    CHECK(memsl_simulate(b.h, &src, &o, os.size(), os.data(), op.data(), &st) == nullptr);
    CHECK(st == MEMSL_INVALID_ARGUMENT);
    memsl_source is{MEMSL_PROTOCOL_INDEPENDENT, 8, 2, 0.4, 1};
    o.trials = 10;
    CHECK(memsl_simulate(b.h, &is, &o, os.size(), os.data(), op.data(), &st) == nullptr);
    CHECK(st == MEMSL_PROTOCOL_MISMATCH);
}
