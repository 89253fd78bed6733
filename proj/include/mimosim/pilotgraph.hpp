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

#include "mimosim/clusterer.hpp"
#include "mimosim/common.hpp"
#include "mimosim/netgen.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace mimo {

/// Pairwise cross-to-serving interference weight between cluster c of cell i
/// and cluster c' of cell j, from the per-device large-scale gains.
double cluster_pair_weight(const CorrelationSet& corr, int cell_i,
                           const std::vector<int>& cluster_c, int cell_j,
                           const std::vector<int>& cluster_cp);

/// C x C weight matrices for every ordered cell pair (i, j), i != j.
/// weights(i, j)(c, c') is the mutual interference of (cell i, cluster c)
/// with (cell j, cluster c').
class InterferenceWeights {
public:
    InterferenceWeights() = default;
    InterferenceWeights(int L, int C) : L_(L), C_(C), w_(static_cast<std::size_t>(L) * L) {}
    int cells() const { return L_; }
    int clusters() const { return C_; }
    MatD& at(int i, int j) { return w_[static_cast<std::size_t>(i) * L_ + j]; }
    const MatD& at(int i, int j) const { return w_[static_cast<std::size_t>(i) * L_ + j]; }

private:
    int L_ = 0, C_ = 0;
    std::vector<MatD> w_;
};

InterferenceWeights build_interference_weights(const CorrelationSet& corr,
                                               const std::vector<Clustering>& clusterings);

/// Map (cell, cluster) -> pilot; within a cell the map is a bijection, and
/// pilot p's subgraph V_p holds exactly one cluster per cell.
struct PilotPartition {
    int cells = 0;
    int pilots = 0;
    std::vector<int> pilot_of_flat;  // cell * pilots + cluster -> pilot

    int pilot_of(int cell, int cluster) const { return pilot_of_flat[cell * pilots + cluster]; }
    int cluster_on(int cell, int pilot) const;  // inverse map
    bool valid() const;
};

/// Greedy max-k-cut pilot assignment. Cells are processed in row-major grid
/// order; the first cell's bijection is drawn from the seed. neighbors(i, j)
/// gates which already-assigned cells contribute interference.
PilotPartition assign_pilots(const InterferenceWeights& weights, int L, int C,
                             const std::function<bool(int, int)>& neighbors, std::uint64_t seed);

/// 8-neighborhood predicate on the wrap-around grid.
std::function<bool(int, int)> grid_neighbors(const Placement& placement);

/// Total weight between same-pilot cluster pairs across neighboring cells;
/// the quantity the greedy assignment minimizes (used by tests/benchmarks).
double partition_interference(const InterferenceWeights& weights, const PilotPartition& part,
                              const std::function<bool(int, int)>& neighbors);

}  // namespace mimo
