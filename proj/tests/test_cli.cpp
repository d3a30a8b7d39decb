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

// Drives the `memsl` executable as a user would.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string &args) {
    const std::string cmd = std::string("\"") + MEMSL_CLI_PATH + "\" " + args + " 2>&1";
    Result r;
    FILE *p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) {
        r.out.append(buf, n);
    }
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

using Row = std::map<std::string, std::string>;

std::vector<Row> parse_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line.find(',') == std::string::npos) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (header.empty()) {
            header = cells;
            continue;
        }
        Row row;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) {
            row[header[i]] = cells[i];
        }
        rows.push_back(row);
    }
    return rows;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

double num(const Row &r, const std::string &key) { return std::stod(r.at(key)); }

fs::path scratch(const std::string &name) {
    const fs::path p = fs::current_path() / ("cli_scratch_" + name);
    fs::remove_all(p);
    return p;
}

const std::string kExample = std::string("--config \"") + MEMSL_EXAMPLE_CONFIG + "\"";

}  // namespace

TEST_CASE("basis table") {
    const auto r = run("basis --c 3.07 --jmax 10");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 11);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        CHECK(std::stoi(rows[j].at("j")) == static_cast<int>(j));
        CHECK(rows[j].at("parity") == (j % 2 ? "odd" : "even"));
        if (j > 0) {
            CHECK(num(rows[j], "lambda_j") < num(rows[j - 1], "lambda_j"));
        }
    }
    CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("basis table against the oracle goldens") {
    const auto r = run("basis --c 1 --jmax 6");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 7);
    const auto golden = parse_csv(slurp(fs::path(MEMSL_TEST_DATA_DIR) / "nystrom_goldens.csv"));
    int matched = 0;
    for (const auto &g : golden) {
        if (num(g, "c") != 1.0) {
            continue;
        }
        const int j = std::stoi(g.at("j"));
        if (j > 6) {
            continue;
        }
        CAPTURE(j);
        CHECK(num(rows[j], "lambda_j") == doctest::Approx(num(g, "lambda_j")).epsilon(1e-8));
        ++matched;
    }
    CHECK(matched == 7);
}

TEST_CASE("invalid bandwidth is a config error") {
    const auto r = run("basis --c -1");
    CHECK(r.code == 2);
    CHECK(r.out.find("basis.c") != std::string::npos);
    CHECK(run("basis --jmax banana --c 1").code == 2);
    CHECK(run("no-such-command").code == 2);
    CHECK(run("basis --set nonsense.key=1 --c 1").code == 2);
}

TEST_CASE("optimize sweep") {
    const auto r = run("optimize --source.M 8 --source.N 6 --optimize.tau_list 1");
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].at("protocol") == "memsl");
    CHECK(std::exp(-num(rows[0], "r_opt")) == doctest::Approx(0.10).epsilon(0.02));
    CHECK(num(rows[0], "alpha_opt") == doctest::Approx(4.92).epsilon(0.01 / 4.92));
    CHECK(num(rows[0], "Q") == 7);
    CHECK(num(rows[0], "resolution_nm") == doctest::Approx(37.5));

    const auto sweep = run("optimize --source.N 6 --optimize.tau_list 0.1,0.3,0.5,0.7,0.9,0.99");
    REQUIRE(sweep.code == 0);
    std::map<std::string, std::map<std::string, double>> sigma;
    for (const auto &row : parse_csv(sweep.out)) {
        sigma[row.at("tau")][row.at("protocol")] = num(row, "sigma_opt");
    }
    REQUIRE(sigma.size() == 6);
    for (const auto &[tau, by] : sigma) {
        CAPTURE(tau);
        CHECK(by.at("memsl") <= by.at("independent"));
        CHECK(by.at("independent") <= by.at("coherent"));
    }

    CHECK(run("optimize --source.N 6 --optimize.tau_list \"\"").code == 2);
    CHECK(run("optimize --source.N 6 --optimize.tau_list 1.5").code == 2);
}

TEST_CASE("predict one configuration") {
    const auto r = run("predict " + kExample);
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 1);
    CHECK(num(rows[0], "c") == doctest::Approx(3.07).epsilon(0.01 / 3.07));
    CHECK(num(rows[0], "rayleigh_nm") == doctest::Approx(154).epsilon(1.0 / 154));
    CHECK(num(rows[0], "Q") == 7);
    CHECK(num(rows[0], "photons_on_sample") == doctest::Approx(6).epsilon(1e-10));
    // Explicit (r, alpha) and a photon budget cannot both be given.
    CHECK(run("predict " + kExample + " --source.r 1 --source.alpha 2").code == 2);
}

TEST_CASE("simulate writes identical artifacts for identical seeds") {
    const auto a = scratch("sim_a"), b = scratch("sim_b");
    const std::string common = "simulate " + kExample + " --trials 300 --threads 3";
    REQUIRE(run(common + " --out \"" + a.string() + "\"").code == 0);
    REQUIRE(run("simulate " + kExample + " --trials 300 --threads 1 --out \"" + b.string() + "\"").code == 0);
    for (const char *f : {"config.ini", "mean.csv", "samples.csv", "reconstruction.csv", "summary.csv"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    const auto summary = parse_csv(slurp(a / "summary.csv"));
    REQUIRE(summary.size() == 1);
    CHECK(num(summary[0], "Q") == 7);
    CHECK(summary[0].at("seed") == "20260101");
    CHECK(summary[0].at("trials") == "300");
    CHECK(summary[0].at("low_confidence") == "false");
    for (const char *col : {"sigma_predicted", "sigma_empirical"}) {
        CHECK(summary[0].count(col) == 1);
    }
    const auto rec = parse_csv(slurp(a / "reconstruction.csv"));
    CHECK(rec.size() == 401);
    CHECK(rec.front().count("phi_hat") == 1);
    CHECK(parse_csv(slurp(a / "samples.csv")).front().count("trial_std") == 1);

    // A different seed changes the samples.
    const auto c = scratch("sim_c");
    REQUIRE(run(common + " --seed 7 --out \"" + c.string() + "\"").code == 0);
    CHECK(slurp(a / "samples.csv") != slurp(c / "samples.csv"));
}

TEST_CASE("echoed config reproduces the run") {
    const auto a = scratch("echo_a"), b = scratch("echo_b");
    REQUIRE(run("simulate " + kExample + " --trials 100 --source.tau 0.8 --out \"" + a.string() + "\"").code == 0);
    REQUIRE(run("simulate --config \"" + (a / "config.ini").string() + "\" --out \"" + b.string() + "\"").code == 0);
    for (const char *f : {"config.ini", "mean.csv", "samples.csv", "reconstruction.csv", "summary.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("simulate edge cases") {
    const auto one = scratch("single");
    REQUIRE(run("simulate " + kExample + " --trials 1 --out \"" + one.string() + "\"").code == 0);
    const auto s = parse_csv(slurp(one / "summary.csv"));
    REQUIRE(s.size() == 1);
    CHECK(s[0].at("low_confidence") == "true");
    CHECK(s[0].at("trials") == "1");

    // No seed, no run.
    const auto none = scratch("noseed");
    const auto r = run("simulate --source.N 6 --trials 10 --out \"" + none.string() + "\"");
    CHECK(r.code == 2);
    CHECK(r.out.find("seed") != std::string::npos);
    CHECK_FALSE(fs::exists(none));

    // Pointwise runs skip the reconstruction file.
    const auto pw = scratch("pointwise");
    REQUIRE(run("simulate " + kExample + " --trials 50 --simulation.mode pointwise --out \"" + pw.string() + "\"").code == 0);
    CHECK(fs::exists(pw / "samples.csv"));
    CHECK_FALSE(fs::exists(pw / "reconstruction.csv"));

    // Independent squeezed light has no pointwise law.
    const auto bad = scratch("pointwise_bad");
    CHECK(run("simulate " + kExample + " --trials 5 --simulation.mode pointwise --protocol independent --out \"" +
              bad.string() + "\"").code == 2);

    // An order past the eigenvalue floor is a numerical failure.
    const auto deep = scratch("deep");
    CHECK(run("simulate " + kExample + " --trials 5 --basis.q 15 --out \"" + deep.string() + "\"").code == 3);

    // A foreign directory is never overwritten.
    const auto foreign = scratch("foreign");
    fs::create_directories(foreign);
    std::ofstream(foreign / "keep.txt") << "mine";
    CHECK(run("simulate " + kExample + " --trials 5 --out \"" + foreign.string() + "\"").code != 0);
    CHECK(slurp(foreign / "keep.txt") == "mine");
}

TEST_CASE("reproduce-paper report") {
    const auto out = scratch("report");
    const auto r = run("reproduce-paper --out \"" + out.string() + "\"");
    const auto rows = parse_csv(slurp(out / "report.csv"));
    REQUIRE(!rows.empty());
    std::map<std::string, Row> by;
    bool any_fail = false;
    for (const auto &row : rows) {
        by[row.at("check_id")] = row;
        any_fail = any_fail || row.at("pass") != "true";
    }
    // Exit status follows the report.
    CHECK(r.code == (any_fail ? 1 : 0));
    for (const char *id : {"geometry_c", "rayleigh_nm", "resolution_nm", "coherent_294_photon_sigma_ratio"}) {
        CAPTURE(id);
        REQUIRE(by.count(id) == 1);
        CHECK(by[id].at("pass") == "true");
    }
    CHECK(num(by["geometry_c"], "actual") == doctest::Approx(3.07).epsilon(0.01 / 3.07));
    CHECK(num(by["rayleigh_nm"], "actual") == doctest::Approx(154).epsilon(1.0 / 154));
    CHECK(num(by["resolution_nm"], "actual") == doctest::Approx(37.5));
    CHECK(by.count("q_memsl") == 1);
    CHECK(by.count("q_coherent_navg_50000") == 1);
    for (const char *col : {"expected", "actual", "tolerance", "pass"}) {
        CHECK(rows.front().count(col) == 1);
    }
}

TEST_CASE("reproduce-paper notices a perturbed spectrum") {
    const auto clean = scratch("report_clean"), bad = scratch("report_bad");
    run("reproduce-paper --out \"" + clean.string() + "\"");
    const auto r = run("reproduce-paper --inject-lambda-scale 1.001 --out \"" + bad.string() + "\"");
    CHECK(r.code == 1);
    std::map<std::string, std::string> before, after;
    for (const auto &row : parse_csv(slurp(clean / "report.csv"))) {
        before[row.at("check_id")] = row.at("pass");
    }
    for (const auto &row : parse_csv(slurp(bad / "report.csv"))) {
        after[row.at("check_id")] = row.at("pass");
    }
    CHECK(before["eigenvalue_trace"] == "true");
    CHECK(after["eigenvalue_trace"] == "false");
    CHECK(before["interval_norm_residual"] == "true");
    CHECK(after["interval_norm_residual"] == "false");
}
