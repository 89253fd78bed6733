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

#include "mimosim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mimo {

double tx_time(double se, const TrafficModel& traffic) {
    if (se < 0) throw DomainError("tx_time: se must be nonnegative");
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    return traffic.payload_bits / (se * traffic.bandwidth_hz);
}

int ScheduleReport::total_served() const {
    int s = 0;
    for (int v : served) s += v;
    return s;
}

int ScheduleReport::total_omitted() const {
    int s = 0;
    for (int v : omitted) s += v;
    return s;
}

double ScheduleReport::omit_rate() const {
    const double total = static_cast<double>(cells) * devices_per_cell;
    return total > 0 ? total_omitted() / total : 0.0;
}

ClusterSchedule schedule_cluster(const std::vector<double>& se_in_turn_order,
                                 const TrafficModel& traffic) {
    ClusterSchedule out;
    double t = 0.0;
    bool open = true;
    for (std::size_t i = 0; i < se_in_turn_order.size(); ++i) {
        const double T = tx_time(se_in_turn_order[i], traffic);
        if (open && t + T <= traffic.period_s) {
            t += T;
            out.served_turns.push_back(static_cast<int>(i));
        } else {
            open = false;  // served devices form a prefix of the turn order
            out.omitted_turns.push_back(static_cast<int>(i));
        }
    }
    return out;
}

int blocks_per_period(const TrafficModel& traffic, int tau_c) {
    return static_cast<int>(traffic.period_s * traffic.bandwidth_hz / tau_c);
}

ScheduleReport run_period(const std::vector<std::vector<std::vector<int>>>& turn_order,
                          const TrafficModel& traffic, int tau_c, const BlockSeFn& block_se) {
    const int L = static_cast<int>(turn_order.size());
    // Continuous budget in block-times; the final block may be fractional.
    const double budget = traffic.period_s * traffic.bandwidth_hz / tau_c;
    const int n_blocks = static_cast<int>(std::ceil(budget));

    ScheduleReport rep;
    rep.cells = L;
    rep.served.assign(L, 0);
    rep.omitted.assign(L, 0);
    rep.per_device_time.resize(L);
    rep.per_device_se.resize(L);
    int K = 0;
    for (int l = 0; l < L; ++l)
        for (const auto& cl : turn_order[l]) K += static_cast<int>(cl.size());
    K = L > 0 ? K / L : 0;
    rep.devices_per_cell = K;
    for (int l = 0; l < L; ++l) {
        rep.per_device_time[l].assign(K, std::numeric_limits<double>::infinity());
        rep.per_device_se[l].assign(K, 0.0);
    }

    struct ClusterState {
        std::size_t turn = 0;   // index into the turn order
        double bits = 0.0;      // delivered for the current device
        double time = 0.0;      // block-times used by the current device
        double se_sum = 0.0;    // SE weighted by block-time
        // Leftover fraction of the block in which the predecessor finished.
        // Time accounting is continuous: the successor spends that fraction
        // too, credited at its next measured SE.
        double carry = 0.0;
    };
    std::vector<std::vector<ClusterState>> state(L);
    for (int l = 0; l < L; ++l) state[l].resize(turn_order[l].size());

    for (int b = 0; b < n_blocks; ++b) {
        std::vector<std::vector<int>> active(L);
        for (int l = 0; l < L; ++l) {
            active[l].resize(turn_order[l].size());
            for (std::size_t c = 0; c < turn_order[l].size(); ++c) {
                const auto& st = state[l][c];
                active[l][c] = st.turn < turn_order[l][c].size()
                                   ? turn_order[l][c][st.turn]
                                   : -1;
            }
        }
        const MatD se = block_se(b, active);
        for (int l = 0; l < L; ++l)
            for (std::size_t c = 0; c < turn_order[l].size(); ++c) {
                const int dev = active[l][c];
                if (dev < 0) continue;
                auto& st = state[l][c];
                const double s = se(l, static_cast<int>(c));
                const double avail = std::min(1.0, budget - b) + st.carry;
                st.carry = 0.0;
                const double rate = s * tau_c;  // bits per block-time
                if (rate <= 0.0 || st.bits + avail * rate < traffic.payload_bits) {
                    st.bits += avail * rate;
                    st.se_sum += s * avail;
                    st.time += avail;
                    continue;
                }
                const double used = (traffic.payload_bits - st.bits) / rate;
                st.se_sum += s * used;
                st.time += used;
                const double se_avg = st.se_sum / st.time;
                rep.per_device_se[l][dev] = se_avg;
                rep.per_device_time[l][dev] = tx_time(se_avg, traffic);
                ++rep.served[l];
                st.carry = avail - used;
                st.bits = 0.0;
                st.time = 0.0;
                st.se_sum = 0.0;
                ++st.turn;
            }
    }
    // Anything not completed (including devices that never got a turn).
    for (int l = 0; l < L; ++l) {
        rep.omitted[l] = K - rep.served[l];
        // record the partial mean SE of in-flight devices
        for (std::size_t c = 0; c < turn_order[l].size(); ++c) {
            const auto& st = state[l][c];
            if (st.turn < turn_order[l][c].size() && st.time > 0.0) {
                const int dev = turn_order[l][c][st.turn];
                rep.per_device_se[l][dev] = st.se_sum / st.time;
            }
        }
    }
    // Fully loaded cell SE: mean per-device SE scaled by the number of
    // simultaneously schedulable devices (one per cluster). Devices are
    // weighted equally; weighting by occupied blocks would overcount slow
    // devices, and raw per-block sums would mix load levels as cells drain
    // their clusters at different times.
    double mean_clusters = 0.0;
    for (int l = 0; l < L; ++l) mean_clusters += static_cast<double>(turn_order[l].size());
    mean_clusters = L > 0 ? mean_clusters / L : 0.0;
    double dev_se_acc = 0.0;
    long dev_se_cnt = 0;
    for (int l = 0; l < L; ++l)
        for (double v : rep.per_device_se[l])
            if (v > 0.0) {
                dev_se_acc += v;
                ++dev_se_cnt;
            }
    rep.cell_se_mean = dev_se_cnt > 0 ? mean_clusters * dev_se_acc / dev_se_cnt : 0.0;
    return rep;
}

}  // namespace mimo
