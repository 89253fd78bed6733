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

#include "mimosim/chanest.hpp"
#include "mimosim/clusterer.hpp"
#include "mimosim/netgen.hpp"
#include "mimosim/pilotgraph.hpp"
#include "mimosim/receiver.hpp"
#include "mimosim/scheduler.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mimo {

enum class Mode { unclustered, clustered };

struct EngineOptions {
    // Links whose large-scale gain falls below beta_floor_rel * sigma2/rho
    // are dropped from the per-link statistics; their average interference
    // power is folded back into the combiner floor as spatially white
    // loading. Serving links are always kept.
    double beta_floor_rel = 0.05;
    // Relative eigenvalue clamp of the correlation square-root factors.
    double factor_clamp_rel = 1e-12;
    // Turn order inside a cluster: strongest serving gain first, or FIFO.
    bool fifo_turn_order = false;
    // Clustered trials: rebuild pilot-group statistics exactly on every
    // schedule advancement (reference behavior) instead of the cheap
    // update that is exact for the advancing cell and first-order for the
    // cross-cell view of its weak link.
    bool exact_stats = false;
    int threads = 1;
};

/// Statistics of one pilot group seen from one victim base station:
/// members, the despreading matrix psi, and the summed estimation-error
/// covariance that feeds the interference floor.
struct GroupMember {
    int cell = -1;
    int device = -1;
};

struct GroupStats {
    std::vector<GroupMember> members;
    int serving_idx = -1;  // member index with cell == victim, -1 if none
    double c = 0.0;        // sigma2 / (tau_p rho)
    MatC psi;
    Eigen::LLT<MatC> psi_llt;
    MatC err_sum;          // sum over members of R - R psi^{-1} R
    // Per-member error covariance, parallel to members. Only materialized
    // on request; incremental group edits need it to keep err_sum an exact
    // sum of PSD terms.
    std::vector<MatC> member_err;
    double serving_nmse = 0.0;
};

/// Everything derived from one layout draw; immutable once built and safe
/// to share read-only across concurrently running trials.
struct LayoutContext {
    NetworkConfig cfg;
    EngineOptions opts;
    Mode mode = Mode::unclustered;
    std::uint64_t layout_seed = 0;
    double beta_floor = 0.0;

    Placement placement;
    CorrelationSet corr;

    // Channel square-root factors for significant links, M x r each; an
    // empty matrix marks a link excluded from the statistics.
    std::vector<MatC> factors;  // (i*L + j)*K + k
    const MatC& factor(int i, int j, int k) const {
        return factors[(static_cast<std::size_t>(i) * cfg.cells + j) * cfg.devices_per_cell + k];
    }
    bool significant(int i, int j, int k) const {
        return i == j || corr.beta(i, j, k) >= beta_floor;
    }

    // Clustered mode: both cluster variants plus their pilot partitions and
    // turn orders. turn_order[cell][cluster] lists devices in transmit order.
    std::vector<Clustering> clusters_capped, clusters_uncapped;
    PilotPartition pilots_capped, pilots_uncapped;
    std::vector<std::vector<std::vector<int>>> turns_capped, turns_uncapped;

    // Total interference power per victim of the links dropped by the
    // significance floor. Consumers scale it to the devices actually
    // transmitting and add it to the combiner floor as white loading.
    std::vector<double> white_floor;  // per victim

    // Unclustered mode: static per-(victim, pilot) statistics and floors.
    std::vector<GroupStats> static_groups;  // victim * K + pilot
    std::vector<MatC> static_Z;             // per victim
};

/// K x K similarity matrix of one cell's serving-link correlation matrices,
/// computed from the Toeplitz generators in O(M) per pair instead of
/// materializing M x M matrices.
MatD serving_similarity_matrix(const CorrelationSet& corr, int cell);

/// Builds a layout, its large-scale statistics and (for clustered mode) the
/// clustering and pilot assignment. Deterministic given (cfg, seed, opts).
LayoutContext make_layout_context(const NetworkConfig& cfg, const EngineOptions& opts, Mode mode,
                                  std::uint64_t layout_seed);

/// Optimized group-statistics construction (low-rank factor path).
GroupStats build_group_stats(const LayoutContext& ctx, int victim,
                             const std::vector<GroupMember>& members, double c,
                             bool want_member_err = false);

/// Dense reference implementation of the same computation, kept for tests
/// and the kernel benchmark. Always fills member_err.
GroupStats build_group_stats_reference(const LayoutContext& ctx, int victim,
                                       const std::vector<GroupMember>& members, double c);

struct TrialOutput {
    double cell_se = 0.0;    // bits/s/Hz/cell, mean over cells (and blocks)
    double nmse_mean = 0.0;  // mean serving-link NMSE
    std::optional<ScheduleReport> report;
};

/// One coherence block of the full static-pilot pipeline (every device has
/// its own pilot, tau_p = K).
TrialOutput run_unclustered_trial(const LayoutContext& ctx, std::uint64_t trial_index);

/// One reporting period of the clustered pipeline: per-block estimation,
/// M-MMSE combining and SINR for the active device of every cluster, with
/// the in-cluster schedule advancing as payloads complete.
TrialOutput run_clustered_trial(const LayoutContext& ctx, std::uint64_t trial_index, bool capped);

}  // namespace mimo
