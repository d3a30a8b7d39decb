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

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace memsl_cli {

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

const KeySpec *find_key(const std::string &key) {
    for (const auto &k : known_keys()) {
        if (key == k.key) {
            return &k;
        }
    }
    return nullptr;
}

double parse_real(const std::string &key, const std::string &text) {
    double v = 0;
    const char *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(key + ": expected a finite number, got '" + text + "'");
    }
    return v;
}

std::vector<std::string> split_list(const std::string &text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

}  // namespace

const std::vector<KeySpec> &known_keys() {
    static const std::vector<KeySpec> keys = {
        {"imaging.f_m", "0.01", "lens focal length [m]"},
        {"imaging.lambda_m", "7.8e-07", "wavelength [m]"},
        {"imaging.d_m", "0.0508", "lens diameter [m]"},
        {"imaging.Y_m", "3e-07", "object size [m]"},
        {"basis.c", nullptr, "bandwidth parameter; overrides the imaging block"},
        {"basis.jmax", "40", "highest basis order"},
        {"basis.q", nullptr, "reconstruction cutoff; default selects Q from the photon budget"},
        {"basis.q_slack", "1", "decades of slack in the Q criterion"},
        {"basis.exact_sum", "false", "predicted sigma from the full even-order sum"},
        {"source.protocol", "memsl", "memsl | independent | coherent"},
        {"source.M", "8", "number of modes"},
        {"source.N", nullptr, "photons on the sample per mode; excludes source.r and source.alpha"},
        {"source.tau", "1", "transmission in (0, 1]"},
        {"source.r", nullptr, "explicit squeezing parameter"},
        {"source.alpha", nullptr, "explicit displacement"},
        {"source.n_avg", "1", "repeated measurements entering the Q criterion"},
        {"simulation.seed", nullptr, "master seed (required for simulate)"},
        {"simulation.trials", "1000", "Monte Carlo trials"},
        {"simulation.mode", "coefficient", "coefficient | pointwise"},
        {"simulation.truncation", "40", "highest simulated order"},
        {"simulation.noise_scale", "1", "multiplier on quantum noise"},
        {"simulation.image_points", "201", "image grid points"},
        {"simulation.image_half_width", "1", "image grid half width"},
        {"simulation.object", "three_lobe", "three_lobe | zero"},
        {"simulation.object_points", "401", "object grid points on [-1, 1]"},
        {"simulation.object_peak", "0.1", "peak phase of the three-lobe object [rad]"},
        {"simulation.threads", "0", "worker threads; 0 uses all cores"},
        {"optimize.tau_list", "1", "comma-separated transmissions"},
        {"optimize.protocols", "memsl,independent,coherent", "protocols in the sweep"},
        {"optimize.scale_q", nullptr, "common cutoff for sigma; default is the MEMSL Q"},
        {"output.dir", "memsl_out", "output directory"},
    };
    return keys;
}

Config Config::defaults() {
    Config c;
    for (const auto &k : known_keys()) {
        if (k.default_value) {
            c.values_[k.key] = k.default_value;
        }
    }
    return c;
}

void Config::load_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    load_text(buf.str(), path);
}

void Config::load_text(const std::string &text, const std::string &origin) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void Config::set(const std::string &key, const std::string &value) {
    if (!find_key(key)) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    if (value.empty()) {
        values_.erase(key);
    } else {
        values_[key] = value;
    }
}

bool Config::has(const std::string &key) const { return values_.count(key) != 0; }

std::string Config::text(const std::string &key) const {
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError(key + " is required");
    }
    return it->second;
}

double Config::real(const std::string &key) const { return parse_real(key, text(key)); }

double Config::positive(const std::string &key) const {
    const double v = real(key);
    if (!(v > 0)) {
        throw ConfigError(key + " must be positive, got " + text(key));
    }
    return v;
}

long long Config::integer(const std::string &key) const {
    const auto t = text(key);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": expected an integer, got '" + t + "'");
    }
    return v;
}

std::uint64_t Config::unsigned_integer(const std::string &key) const {
    const auto t = text(key);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + t + "'");
    }
    return v;
}

bool Config::flag(const std::string &key) const {
    const auto t = text(key);
    if (t == "true" || t == "1" || t == "yes" || t == "on") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no" || t == "off") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + t + "'");
}

std::vector<double> Config::real_list(const std::string &key) const {
    std::vector<double> out;
    for (const auto &item : split_list(text(key))) {
        out.push_back(parse_real(key, item));
    }
    if (out.empty()) {
        throw ConfigError(key + " must not be empty");
    }
    return out;
}

std::vector<std::string> Config::text_list(const std::string &key) const {
    auto out = split_list(text(key));
    if (out.empty()) {
        throw ConfigError(key + " must not be empty");
    }
    return out;
}

std::string Config::echo(const std::vector<std::string> &skip) const {
    std::string out;
    for (const auto &k : known_keys()) {
        auto it = values_.find(k.key);
        if (it == values_.end() || std::find(skip.begin(), skip.end(), k.key) != skip.end()) {
            continue;
        }
        out += it->first + " = " + it->second + "\n";
    }
    return out;
}

}  // namespace memsl_cli
