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

#include "mimosim/pilotgraph.hpp"

#include "mimosim/rng.hpp"

#include <algorithm>
#include <numeric>

namespace mimo {

namespace {

double mean_beta(const CorrelationSet& corr, int bs, int cell, const std::vector<int>& cluster) {
    double s = 0.0;
    for (int k : cluster) s += corr.beta(bs, cell, k);
    return s / static_cast<double>(cluster.size());
}

}  // namespace

double cluster_pair_weight(const CorrelationSet& corr, int cell_i,
                           const std::vector<int>& cluster_c, int cell_j,
                           const std::vector<int>& cluster_cp) {
    if (cluster_c.empty() || cluster_cp.empty())
        throw DomainError("cluster_pair_weight: empty cluster");
    const double serve_i = mean_beta(corr, cell_i, cell_i, cluster_c);
    const double serve_j = mean_beta(corr, cell_j, cell_j, cluster_cp);
    if (!(serve_i > 0.0) || !(serve_j > 0.0))
        throw DomainError("cluster_pair_weight: zero serving gain");
    const double cross_into_i = mean_beta(corr, cell_i, cell_j, cluster_cp);
    const double cross_into_j = mean_beta(corr, cell_j, cell_i, cluster_c);
    return std::abs(cross_into_i / serve_i + cross_into_j / serve_j);
}

InterferenceWeights build_interference_weights(const CorrelationSet& corr,
                                               const std::vector<Clustering>& clusterings) {
    const int L = corr.cells();
    const int C = clusterings.empty() ? 0 : clusterings.front().num_clusters();
    InterferenceWeights w(L, C);
    std::vector<std::vector<std::vector<int>>> members(L);
    for (int l = 0; l < L; ++l) members[l] = clusterings[l].members();
#pragma omp parallel for schedule(dynamic) collapse(2)
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            if (i == j) continue;
            MatD m(C, C);
            for (int c = 0; c < C; ++c)
                for (int cp = 0; cp < C; ++cp)
                    m(c, cp) = cluster_pair_weight(corr, i, members[i][c], j, members[j][cp]);
            w.at(i, j) = std::move(m);
        }
    return w;
}

int PilotPartition::cluster_on(int cell, int pilot) const {
    for (int c = 0; c < pilots; ++c)
        if (pilot_of(cell, c) == pilot) return c;
    return -1;
}

bool PilotPartition::valid() const {
    for (int l = 0; l < cells; ++l) {
        std::vector<char> seen(pilots, 0);
        for (int c = 0; c < pilots; ++c) {
            const int p = pilot_of(l, c);
            if (p < 0 || p >= pilots || seen[p]) return false;
            seen[p] = 1;
        }
    }
    return true;
}

PilotPartition assign_pilots(const InterferenceWeights& weights, int L, int C,
                             const std::function<bool(int, int)>& neighbors, std::uint64_t seed) {
    if (C < 1) throw ConfigError("assign_pilots: need C >= 1");
    PilotPartition part;
    part.cells = L;
    part.pilots = C;
    part.pilot_of_flat.assign(static_cast<std::size_t>(L) * C, -1);

    // First cell: arbitrary bijection.
    std::vector<int> first(C);
    std::iota(first.begin(), first.end(), 0);
    Rng rng = make_rng(seed, Stream::pilot_init);
    std::shuffle(first.begin(), first.end(), rng);
    for (int c = 0; c < C; ++c) part.pilot_of_flat[c] = first[c];

    for (int i = 1; i < L; ++i) {
        // Accumulated interference of each local cluster against each
        // subgroup, over already-assigned neighbor cells.
        MatD acc = MatD::Zero(C, C);  // (cluster, pilot)
        for (int j = 0; j < i; ++j) {
            if (!neighbors(i, j)) continue;
            const MatD& w = weights.at(i, j);
            for (int c = 0; c < C; ++c)
                for (int cp = 0; cp < C; ++cp) acc(c, part.pilot_of(j, cp)) += w(c, cp);
        }
        std::vector<int> order(C);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return acc.row(a).sum() > acc.row(b).sum();
        });
        std::vector<char> used(C, 0);
        for (int c : order) {
            int best = -1;
            for (int p = 0; p < C; ++p) {
                if (used[p]) continue;
                if (best < 0 || acc(c, p) < acc(c, best)) best = p;
            }
            part.pilot_of_flat[static_cast<std::size_t>(i) * C + c] = best;
            used[best] = 1;
        }
    }
    return part;
}

std::function<bool(int, int)> grid_neighbors(const Placement& placement) {
    const int cols = placement.grid_cols;
    const int rows = placement.grid_rows;
    return [cols, rows](int a, int b) {
        if (a == b) return false;
        const int ax = a % cols, ay = a / cols;
        const int bx = b % cols, by = b / cols;
        auto torus_delta = [](int u, int v, int n) {
            int d = std::abs(u - v) % n;
            return std::min(d, n - d);
        };
        return torus_delta(ax, bx, cols) <= 1 && torus_delta(ay, by, rows) <= 1;
    };
}

double partition_interference(const InterferenceWeights& weights, const PilotPartition& part,
                              const std::function<bool(int, int)>& neighbors) {
    double total = 0.0;
    const int L = part.cells;
    const int C = part.pilots;
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            if (!neighbors(i, j)) continue;
            for (int p = 0; p < C; ++p) {
                const int c = part.cluster_on(i, p);
                const int cp = part.cluster_on(j, p);
                total += weights.at(i, j)(c, cp);
            }
        }
    return total;
}

}  // namespace mimo
