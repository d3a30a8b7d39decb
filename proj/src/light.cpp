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

#include "memsl/light.hpp"

#include <cmath>
#include <string>

#include "memsl/status.hpp"

namespace memsl {

const char *protocol_name(Protocol p) noexcept {
    switch (p) {
    case Protocol::memsl:
        return "memsl";
    case Protocol::independent_squeezed:
        return "independent";
    case Protocol::coherent:
        return "coherent";
    }
    return "unknown";
}

bool parse_protocol(std::string_view text, Protocol &out) noexcept {
    if (text == "memsl" || text == "MEMSL") {
        out = Protocol::memsl;
    } else if (text == "independent" || text == "independent_squeezed" || text == "IndependentSqueezed") {
        out = Protocol::independent_squeezed;
    } else if (text == "coherent" || text == "Coherent") {
        out = Protocol::coherent;
    } else {
        return false;
    }
    return true;
}

void validate(const ProbeSource &src) {
    if (src.M < 1) {
        throw Error(Status::invalid_argument, "mode count M must be at least 1");
    }
    if (!(src.alpha >= 0) || !std::isfinite(src.alpha)) {
        throw Error(Status::invalid_argument, "alpha must be finite and non-negative");
    }
    if (!(src.r >= 0) || !std::isfinite(src.r)) {
        throw Error(Status::invalid_argument, "r must be finite and non-negative");
    }
    if (!(src.tau > 0 && src.tau <= 1)) {
        throw Error(Status::domain_error, "tau must lie in (0, 1]");
    }
    if (src.protocol == Protocol::coherent && src.r != 0) {
        throw Error(Status::protocol_mismatch, "coherent light carries no squeezing (r must be 0)");
    }
}

QuadratureStats displaced_squeezed(double alpha, double r) {
    QuadratureStats s;
    s.mean1 = std::sqrt(2.0) * alpha;
    s.mean2 = 0;
    s.var1 = std::exp(2 * r) / 4;
    s.var2 = std::exp(-2 * r) / 4;
    return s;
}

QuadratureStats apply_loss(const QuadratureStats &stats, const LossChannel &channel) {
    if (!(channel.tau > 0 && channel.tau <= 1)) {
        throw Error(Status::domain_error, "tau must lie in (0, 1]");
    }
    const double t = channel.tau, st = std::sqrt(t);
    QuadratureStats out;
    out.mean1 = st * stats.mean1;
    out.mean2 = st * stats.mean2;
    out.var1 = t * stats.var1 + (1 - t) / 4;
    out.var2 = t * stats.var2 + (1 - t) / 4;
    return out;
}

double photons_on_sample(const ProbeSource &src) {
    validate(src);
    const double sh = std::sinh(src.r);
    const double per_input = src.alpha * src.alpha + sh * sh;
    if (src.protocol == Protocol::memsl) {
        return src.tau / src.M * per_input;
    }
    return src.tau * per_input;
}

QuadratureStats mode_statistics(const ProbeSource &src) {
    validate(src);
    const QuadratureStats in = displaced_squeezed(src.alpha, src.r);
    if (src.protocol != Protocol::memsl) {
        return in;
    }
    const double M = src.M;
    QuadratureStats out;
    out.mean1 = in.mean1 / std::sqrt(M);
    out.mean2 = 0;
    out.var1 = (in.var1 + (M - 1) / 4) / M;
    out.var2 = (in.var2 + (M - 1) / 4) / M;
    return out;
}

QuadratureStats summed_statistics(const ProbeSource &src) {
    validate(src);
    const QuadratureStats in = displaced_squeezed(src.alpha, src.r);
    const double M = src.M, t = src.tau, st = std::sqrt(t);
    QuadratureStats out;
    if (src.protocol == Protocol::memsl) {
        // sum_m b^(m) = sqrt(M) b_in before loss; each mode then picks up its own vacuum.
        out.mean1 = st * std::sqrt(M) * in.mean1;
        out.var1 = M * (t * in.var1 + (1 - t) / 4);
        out.var2 = M * (t * in.var2 + (1 - t) / 4);
    } else {
        out.mean1 = st * M * in.mean1;
        out.var1 = M * (t * in.var1 + (1 - t) / 4);
        out.var2 = M * (t * in.var2 + (1 - t) / 4);
    }
    return out;
}

CompositeQuadratures effective_memsl_quadratures(const ProbeSource &src) {
    validate(src);
    if (src.protocol != Protocol::memsl) {
        throw Error(Status::protocol_mismatch, std::string("effective MEMSL quadratures requested for ") +
                                                   protocol_name(src.protocol) + " light");
    }
    CompositeQuadratures out;
    out.effective = displaced_squeezed(src.alpha, src.r);
    const double M = src.M;
    out.summed.mean1 = std::sqrt(M) * out.effective.mean1;
    out.summed.mean2 = 0;
    out.summed.var1 = M * out.effective.var1;
    out.summed.var2 = M * out.effective.var2;
    return out;
}

}  // namespace memsl
