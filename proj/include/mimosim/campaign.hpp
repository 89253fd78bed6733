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

#include "mimosim/engine.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mimo {

enum class CapSweep { capped, uncapped, both };
enum class ModeSweep { clustered, unclustered, both };

/// One Monte-Carlo sweep: a base configuration plus the grid axes.
struct Campaign {
    NetworkConfig base;
    EngineOptions engine;
    ModeSweep mode = ModeSweep::clustered;
    CapSweep capping = CapSweep::capped;
    std::vector<int> k_list;
    std::vector<int> c_list;
    std::vector<double> period_list;
    int trials = 50;
    int layout_every = 10;  // trials per layout draw
    std::string out_dir = ".";
    std::string csv_name = "results.csv";

    void validate() const;  // throws ConfigError
};

/// Aggregated outcome of one grid point.
struct ResultRow {
    int K = 0;
    int C = 0;
    double period_s = 0.0;
    Mode mode = Mode::clustered;
    bool capped = true;
    int trials = 0;
    double se_mean = 0.0;      // bits/s/Hz/cell
    double se_std = 0.0;
    double omitted_mean = 0.0;  // network-wide omitted devices per period
    double omit_rate = 0.0;
    double nmse_mean = 0.0;
    double wall_s = 0.0;
    bool ok = true;
    std::string error;
};

/// Parses a key=value config file with [network], [engine] and [sweep]
/// sections. Unknown keys and malformed lines are rejected with the line
/// number; missing keys keep their defaults.
Campaign load_config(const std::string& path);
Campaign parse_config(std::istream& in, const std::string& name);

/// Effective configuration in the same format load_config accepts.
void emit_config(const Campaign& c, std::ostream& out);

/// Runs the full pipeline for one grid point: layouts are redrawn every
/// layout_every trials, fast fading every trial; trials aggregate in index
/// order regardless of worker count.
ResultRow run_point(const NetworkConfig& cfg, const EngineOptions& opts, Mode mode, bool capped,
                    int trials, int layout_every);

/// Runs every grid point, writes <csv_name> and summary.txt into out_dir.
/// Returns 0 when every point succeeded, 1 otherwise; failed points are
/// logged and skipped in the CSV.
int run_campaign(const Campaign& campaign, std::ostream& log, bool quiet);

/// Canonical sweeps behind the figure subcommand. Known names: fig2, fig3,
/// fig4. With desk == true the network shrinks to the CI-speed preset
/// (L=4, M=32, 10 trials).
Campaign figure_campaign(const std::string& name, bool desk);

/// Brute-force-oracle property suites on tiny instances; prints one line
/// per suite. Returns true when every suite passes.
bool run_selftest(std::ostream& out, std::uint64_t seed);

std::vector<ResultRow> campaign_rows(const Campaign& campaign, std::ostream& log, bool quiet,
                                     int& failures);
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_summary(const Campaign& campaign, const std::vector<ResultRow>& rows,
                   std::ostream& out);

}  // namespace mimo
