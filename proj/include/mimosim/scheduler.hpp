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

#include <functional>
#include <vector>

namespace mimo {

struct TrafficModel {
    double payload_bits = 4000.0;  // 500 bytes
    double period_s = 1.0;
    double bandwidth_hz = 12500.0;
};

/// Air time needed to deliver one payload at the given spectral efficiency;
/// +infinity when se == 0 (device unservable this period).
double tx_time(double se, const TrafficModel& traffic);

/// Per-cell outcome of one reporting period.
struct ScheduleReport {
    int cells = 0;
    int devices_per_cell = 0;
    std::vector<int> served;   // per cell
    std::vector<int> omitted;  // per cell
    std::vector<std::vector<double>> per_device_time;  // seconds, inf when omitted
    std::vector<std::vector<double>> per_device_se;    // mean SE over transmitted blocks
    double cell_se_mean = 0.0;  // mean per-device SE times clusters per cell

    int total_served() const;
    int total_omitted() const;
    double omit_rate() const;
};

/// Continuous-time serving decision for one cluster: walk devices in turn
/// order accumulating transmit times; a device is served iff the cumulative
/// time after its transmission fits in the period.
struct ClusterSchedule {
    std::vector<int> served_turns;   // indices into the turn order
    std::vector<int> omitted_turns;
};
ClusterSchedule schedule_cluster(const std::vector<double>& se_in_turn_order,
                                 const TrafficModel& traffic);

/// Block-granular period simulation with continuous time accounting.
/// turn_order[cell][cluster] lists device indices in their transmit order.
/// block_se is called once per coherence block with the active device of
/// every (cell, cluster) (-1 when the cluster is exhausted) and returns
/// their spectral efficiencies. A device transmits se * tau_c payload bits
/// per block-time and completes once the payload is delivered; the unused
/// remainder of its last block carries over to its successor. Time is
/// continuous: the period need not be a whole number of blocks, and the
/// final block contributes only its in-period fraction. Devices still
/// unfinished when the period ends are omitted.
using BlockSeFn =
    std::function<MatD(int block, const std::vector<std::vector<int>>& active)>;

ScheduleReport run_period(const std::vector<std::vector<std::vector<int>>>& turn_order,
                          const TrafficModel& traffic, int tau_c, const BlockSeFn& block_se);

/// Number of whole coherence blocks in one reporting period.
int blocks_per_period(const TrafficModel& traffic, int tau_c);

}  // namespace mimo
