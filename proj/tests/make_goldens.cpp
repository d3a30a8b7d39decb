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

// Regenerates tests/data/nystrom_goldens.csv from the quad-precision oracle:
//   make_goldens > tests/data/nystrom_goldens.csv
// Orders with lambda below 1e-14 are omitted.

#include <cstdio>

#include "oracle.hpp"

int main() {
    std::printf("c,j,lambda_j\n");
    for (double c : {0.5, 1.0, 3.07, 6.0}) {
        const auto lam = oracle::quad_eigenvalues(c, 13);
        for (int j = 0; j < 13; ++j) {
            if (lam[j] < 1e-14) {
                break;
            }
            std::printf("%.17g,%d,%.17g\n", c, j, lam[j]);
        }
    }
    return 0;
}
