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

#include <doctest.h>

#include <cmath>

using namespace mimo;

TEST_CASE("tx_time reference points") {
    TrafficModel t;  // 4000 bits, 12.5 kHz
    CHECK(tx_time(1.0, t) == doctest::Approx(0.32));
    CHECK(tx_time(4.0, t) == doctest::Approx(0.08));
    CHECK(std::isinf(tx_time(0.0, t)));
    CHECK_THROWS_AS(tx_time(-1.0, t), DomainError);
}

TEST_CASE("blocks_per_period reference points") {
    TrafficModel t;
    CHECK(blocks_per_period(t, 200) == 62);
    t.period_s = 1.5;
    CHECK(blocks_per_period(t, 200) == 93);
}

TEST_CASE("schedule_cluster serves a prefix that fits the period") {
    TrafficModel t;  // 0.32 s per device at SE 1
    const ClusterSchedule s = schedule_cluster({1.0, 1.0, 1.0, 1.0}, t);
    CHECK(s.served_turns == std::vector<int>{0, 1, 2});
    CHECK(s.omitted_turns == std::vector<int>{3});
}

TEST_CASE("schedule_cluster zero-SE device blocks its successors") {
    TrafficModel t;
    const ClusterSchedule s = schedule_cluster({4.0, 0.0, 4.0}, t);
    CHECK(s.served_turns == std::vector<int>{0});
    CHECK(s.omitted_turns == std::vector<int>{1, 2});
}

TEST_CASE("schedule_cluster exact boundary fits") {
    TrafficModel t;
    t.period_s = 0.32;
    const ClusterSchedule s = schedule_cluster({1.0}, t);
    CHECK(s.served_turns.size() == 1);
}

TEST_CASE("run_period constant-SE exact accounting") {
    // One cell, one cluster of 5 devices, constant SE 0.5:
    // a device needs ceil(4000 / (0.5 * 200)) = 40 blocks, so exactly one
    // device finishes within the 62-block period.
    TrafficModel t;
    const std::vector<std::vector<std::vector<int>>> turns = {{{0, 1, 2, 3, 4}}};
    const auto fn = [](int, const std::vector<std::vector<int>>&) {
        MatD se(1, 1);
        se(0, 0) = 0.5;
        return se;
    };
    const ScheduleReport rep = run_period(turns, t, 200, fn);
    CHECK(rep.cells == 1);
    CHECK(rep.devices_per_cell == 5);
    CHECK(rep.served[0] == 1);
    CHECK(rep.omitted[0] == 4);
    CHECK(rep.total_served() + rep.total_omitted() == 5);
    CHECK(rep.omit_rate() == doctest::Approx(0.8));
    CHECK(rep.per_device_se[0][0] == doctest::Approx(0.5));
    CHECK(rep.per_device_time[0][0] == doctest::Approx(tx_time(0.5, t)));
    CHECK(std::isinf(rep.per_device_time[0][2]));
}

TEST_CASE("run_period serves turn-order prefixes") {
    // SE rises with the block index; whatever happens, the served set of a
    // cluster must be a prefix of its turn order.
    TrafficModel t;
    const std::vector<std::vector<std::vector<int>>> turns = {{{2, 0, 1}, {3, 4}}};
    const auto fn = [](int b, const std::vector<std::vector<int>>& active) {
        MatD se(1, 2);
        for (int c = 0; c < 2; ++c) se(0, c) = active[0][c] >= 0 ? 0.1 + 0.05 * b : 0.0;
        return se;
    };
    const ScheduleReport rep = run_period(turns, t, 200, fn);
    for (const auto& cluster : turns[0]) {
        bool seen_unserved = false;
        for (int dev : cluster) {
            const bool done = std::isfinite(rep.per_device_time[0][dev]);
            if (!done) seen_unserved = true;
            if (seen_unserved) CHECK_FALSE(done);
        }
    }
    CHECK(rep.served[0] + rep.omitted[0] == 5);
}

TEST_CASE("run_period all devices complete under high SE") {
    TrafficModel t;
    const std::vector<std::vector<std::vector<int>>> turns = {{{0, 1}, {2, 3}},
                                                              {{0, 2}, {1, 3}}};
    const auto fn = [](int, const std::vector<std::vector<int>>& active) {
        MatD se(2, 2);
        for (int l = 0; l < 2; ++l)
            for (int c = 0; c < 2; ++c) se(l, c) = active[l][c] >= 0 ? 4.0 : 0.0;
        return se;
    };
    const ScheduleReport rep = run_period(turns, t, 200, fn);
    CHECK(rep.total_omitted() == 0);
    CHECK(rep.total_served() == 8);
    // Constant SE across devices: fully loaded cell SE = clusters * SE.
    CHECK(rep.cell_se_mean == doctest::Approx(2.0 * 4.0));
}

TEST_CASE("run_period exhausted clusters report inactive slots") {
    TrafficModel t;
    const std::vector<std::vector<std::vector<int>>> turns = {{{0}}};
    int saw_inactive = 0;
    const auto fn = [&](int, const std::vector<std::vector<int>>& active) {
        MatD se(1, 1);
        if (active[0][0] < 0) {
            ++saw_inactive;
            se(0, 0) = 0.0;
        } else {
            se(0, 0) = 10.0;
        }
        return se;
    };
    const ScheduleReport rep = run_period(turns, t, 200, fn);
    CHECK(rep.served[0] == 1);
    // Device 0 finishes in ceil(4000/2000) = 2 blocks; the rest of the
    // 62.5-block period (60 whole blocks plus the fractional tail block)
    // must present the cluster as exhausted.
    CHECK(saw_inactive == 61);
}

TEST_CASE("longer period serves at least as many devices") {
    TrafficModel t1, t2;
    t2.period_s = 1.5;
    const std::vector<std::vector<std::vector<int>>> turns = {{{0, 1, 2, 3, 4, 5, 6, 7}}};
    const auto fn = [](int, const std::vector<std::vector<int>>&) {
        MatD se(1, 1);
        se(0, 0) = 0.25;
        return se;
    };
    const ScheduleReport r1 = run_period(turns, t1, 200, fn);
    const ScheduleReport r2 = run_period(turns, t2, 200, fn);
    CHECK(r2.total_served() >= r1.total_served());
    CHECK(r2.total_omitted() <= r1.total_omitted());
}
