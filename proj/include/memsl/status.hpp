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

#ifndef MEMSL_STATUS_HPP
#define MEMSL_STATUS_HPP

#include <stdexcept>
#include <string>

namespace memsl {

// Values mirror the MEMSL_* codes of the C interface.
enum class Status : int {
    ok = 0,
    invalid_argument = 1,
    underflow_order = 2,
    non_convergence = 3,
    order_out_of_range = 4,
    eigenvalue_underflow = 5,
    grid_too_coarse = 6,
    grid_too_narrow = 7,
    protocol_mismatch = 8,
    domain_error = 9,
    basis_too_small = 10,
    non_positive_parameter = 11,
    insufficient_budget = 12,
    internal = 99,
};

const char *status_name(Status s) noexcept;

class Error : public std::runtime_error {
  public:
    Error(Status status, const std::string &what) : std::runtime_error(what), status_(status) {}
    Status status() const noexcept { return status_; }

  private:
    Status status_;
};

// Raised by build_basis; carries the highest order whose eigenvalue stays above the floor.
class UnderflowOrderError : public Error {
  public:
    UnderflowOrderError(int largest_safe_order, const std::string &what)
        : Error(Status::underflow_order, what), largest_safe_order_(largest_safe_order) {}
    int largest_safe_order() const noexcept { return largest_safe_order_; }

  private:
    int largest_safe_order_;
};

}  // namespace memsl

#endif
