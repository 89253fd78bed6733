// mimosim - multicell massive MIMO uplink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "mimosim/common.hpp"

#include <cstdint>
#include <vector>

namespace mimo {

/// Normalized Frobenius inner product of two correlation matrices, in (0, 1].
/// Throws DomainError if either matrix has zero norm.
double similarity(const MatC& Ra, const MatC& Rb);

/// Partition of one cell's devices into clusters around medoid devices.
struct Clustering {
    std::vector<int> medoids;  // C device indices
    std::vector<int> assign;   // K -> cluster index
    int cap = 0;               // N; 0 means uncapped

    int num_clusters() const { return static_cast<int>(medoids.size()); }
    std::vector<std::vector<int>> members() const;
    std::vector<int> sizes() const;
};

/// Capacitated k-medoids with eager swapping. S is the K x K similarity
/// matrix; distances are d = 1 - S. With capped == true every cluster holds
/// at most N devices (N * C >= K required). Deterministic given the seed.
Clustering cluster(const MatD& S, int C, int N, bool capped, std::uint64_t seed);

/// Sum over devices of the distance to the nearest medoid (uncapped
/// assignment); the objective the swap phase minimizes.
double total_deviation(const MatD& S, const std::vector<int>& medoids);

/// Deviation of an explicit (possibly capped) assignment.
double assignment_deviation(const MatD& S, const Clustering& cl);

}  // namespace mimo
