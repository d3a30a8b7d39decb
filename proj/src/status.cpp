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

#include "memsl/status.hpp"

namespace memsl {

const char *status_name(Status s) noexcept {
    switch (s) {
    case Status::ok:
        return "ok";
    case Status::invalid_argument:
        return "invalid argument";
    case Status::underflow_order:
        return "eigenvalue underflow at requested order";
    case Status::non_convergence:
        return "eigensolver did not converge";
    case Status::order_out_of_range:
        return "order out of range";
    case Status::eigenvalue_underflow:
        return "eigenvalue below the safe dynamic range";
    case Status::grid_too_coarse:
        return "grid too coarse";
    case Status::grid_too_narrow:
        return "grid too narrow";
    case Status::protocol_mismatch:
        return "protocol mismatch";
    case Status::domain_error:
        return "argument outside its domain";
    case Status::basis_too_small:
        return "basis too small";
    case Status::non_positive_parameter:
        return "non-positive parameter";
    case Status::insufficient_budget:
        return "photon budget too small";
    case Status::internal:
        return "internal error";
    }
    return "unknown status";
}

}  // namespace memsl
