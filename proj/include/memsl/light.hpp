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

#ifndef MEMSL_LIGHT_HPP
#define MEMSL_LIGHT_HPP

#include <string_view>

namespace memsl {

enum class Protocol { memsl = 0, independent_squeezed = 1, coherent = 2 };

const char *protocol_name(Protocol p) noexcept;
// Accepts "memsl", "independent", "independent_squeezed", "coherent".
bool parse_protocol(std::string_view text, Protocol &out) noexcept;

/// Probe light. For MEMSL, alpha and r describe the single squeezed input that the
/// balanced beam-splitter array spreads over M modes. For the other protocols they
/// describe every one of the M independent modes.
struct ProbeSource {
    Protocol protocol = Protocol::memsl;
    int M = 1;
    double alpha = 0;
    double r = 0;
    double tau = 1;
};

// Throws on M < 1, negative alpha or r, tau outside (0, 1], or coherent with r != 0.
void validate(const ProbeSource &src);

// Gaussian statistics of the two quadratures of one mode.
struct QuadratureStats {
    double mean1 = 0;
    double mean2 = 0;
    double var1 = 0.25;
    double var2 = 0.25;
};

// Displaced squeezed state: <b1> = sqrt(2) alpha, Var(b1) = e^{2r}/4, Var(b2) = e^{-2r}/4.
QuadratureStats displaced_squeezed(double alpha, double r);

struct LossChannel {
    double tau = 1;
};

// b -> sqrt(tau) b + sqrt(1 - tau) v with v in vacuum.
QuadratureStats apply_loss(const QuadratureStats &stats, const LossChannel &channel);

// Mean photons per mode reaching the sample.
double photons_on_sample(const ProbeSource &src);

// Statistics of one probe mode before loss. MEMSL mode m carries 1/sqrt(M) of the
// squeezed input plus vacuum from the other ports.
QuadratureStats mode_statistics(const ProbeSource &src);

// Statistics of the quadrature sum over all M modes, loss included.
QuadratureStats summed_statistics(const ProbeSource &src);

/// MEMSL only: b_e = (1/sqrt(M)) sum_m b^(m) has the input's statistics, so the
/// summed quadrature has M times its variance.
struct CompositeQuadratures {
    QuadratureStats effective;  // b_e
    QuadratureStats summed;     // sum_m b^(m)
};
CompositeQuadratures effective_memsl_quadratures(const ProbeSource &src);

}  // namespace memsl

#endif
