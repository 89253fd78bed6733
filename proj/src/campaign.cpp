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

#include "mimosim/campaign.hpp"

#include "mimosim/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mimo {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& msg) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, const std::string& name, int line) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        parse_fail(name, line, "expected a number, got '" + v + "'");
    }
    if (pos != v.size()) parse_fail(name, line, "trailing characters in number '" + v + "'");
    return d;
}

long long to_int(const std::string& v, const std::string& name, int line) {
    std::size_t pos = 0;
    long long i = 0;
    try {
        i = std::stoll(v, &pos);
    } catch (const std::exception&) {
        parse_fail(name, line, "expected an integer, got '" + v + "'");
    }
    if (pos != v.size()) parse_fail(name, line, "trailing characters in integer '" + v + "'");
    return i;
}

bool to_bool(const std::string& v, const std::string& name, int line) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    parse_fail(name, line, "expected a boolean, got '" + v + "'");
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& v, const std::string& name, int line, F conv) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) parse_fail(name, line, "empty list element");
        out.push_back(static_cast<T>(conv(item, name, line)));
    }
    if (out.empty()) parse_fail(name, line, "empty list");
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

const char* mode_name(Mode m) { return m == Mode::clustered ? "clustered" : "unclustered"; }

std::string cap_name(Mode m, bool capped) {
    if (m == Mode::unclustered) return "none";
    return capped ? "capped" : "uncapped";
}

}  // namespace

void Campaign::validate() const {
    if (k_list.empty() || c_list.empty() || period_list.empty())
        throw ConfigError("campaign: sweep axes must be nonempty");
    if (trials < 1) throw ConfigError("campaign: trials must be >= 1");
    if (layout_every < 1) throw ConfigError("campaign: layout_every must be >= 1");
    for (int k : k_list)
        if (k < 1) throw ConfigError("campaign: K values must be >= 1");
    for (int c : c_list)
        if (c < 1) throw ConfigError("campaign: C values must be >= 1");
    for (double p : period_list)
        if (!(p > 0)) throw ConfigError("campaign: period values must be > 0");
    NetworkConfig probe = base;
    probe.devices_per_cell = k_list.front();
    probe.clusters_per_cell = c_list.front();
    probe.period_s = period_list.front();
    probe.validate();
}

Campaign parse_config(std::istream& in, const std::string& name) {
    Campaign c;
    c.k_list.clear();
    c.c_list.clear();
    c.period_list.clear();
    std::string section = "network";
    std::string line;
    int ln = 0;
    bool trials_set = false;
    while (std::getline(in, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(name, ln, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "network" && section != "engine" && section != "sweep")
                parse_fail(name, ln, "unknown section '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(name, ln, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(name, ln, "empty key");
        if (val.empty()) parse_fail(name, ln, "empty value for '" + key + "'");

        if (section == "network") {
            NetworkConfig& n = c.base;
            if (key == "cells") n.cells = static_cast<int>(to_int(val, name, ln));
            else if (key == "devices_per_cell") n.devices_per_cell = static_cast<int>(to_int(val, name, ln));
            else if (key == "clusters_per_cell") n.clusters_per_cell = static_cast<int>(to_int(val, name, ln));
            else if (key == "antennas") n.antennas = static_cast<int>(to_int(val, name, ln));
            else if (key == "cell_edge_m") n.cell_edge_m = to_double(val, name, ln);
            else if (key == "min_bs_distance_m") n.min_bs_distance_m = to_double(val, name, ln);
            else if (key == "pathloss_exp") n.pathloss_exp = to_double(val, name, ln);
            else if (key == "gain_ref_db") n.gain_ref_db = to_double(val, name, ln);
            else if (key == "shadow_std_db") n.shadow_std_db = to_double(val, name, ln);
            else if (key == "noise_dbm") n.noise_dbm = to_double(val, name, ln);
            else if (key == "ul_power_dbm") n.ul_power_dbm = to_double(val, name, ln);
            else if (key == "tau_c") n.tau_c = static_cast<int>(to_int(val, name, ln));
            else if (key == "bandwidth_hz") n.bandwidth_hz = to_double(val, name, ln);
            else if (key == "payload_bytes") n.payload_bytes = static_cast<int>(to_int(val, name, ln));
            else if (key == "period_s") n.period_s = to_double(val, name, ln);
            else if (key == "asd_deg") n.asd_deg = to_double(val, name, ln);
            else if (key == "shadow_serving_strongest")
                n.shadow_serving_strongest = to_bool(val, name, ln);
            else if (key == "seed") n.seed = static_cast<std::uint64_t>(to_int(val, name, ln));
            else parse_fail(name, ln, "unknown key '" + key + "' in [network]");
        } else if (section == "engine") {
            EngineOptions& e = c.engine;
            if (key == "beta_floor_rel") e.beta_floor_rel = to_double(val, name, ln);
            else if (key == "factor_clamp_rel") e.factor_clamp_rel = to_double(val, name, ln);
            else if (key == "fifo_turn_order") e.fifo_turn_order = to_bool(val, name, ln);
            else if (key == "exact_stats") e.exact_stats = to_bool(val, name, ln);
            else if (key == "threads") e.threads = static_cast<int>(to_int(val, name, ln));
            else parse_fail(name, ln, "unknown key '" + key + "' in [engine]");
        } else {
            if (key == "mode") {
                if (val == "clustered") c.mode = ModeSweep::clustered;
                else if (val == "unclustered") c.mode = ModeSweep::unclustered;
                else if (val == "both") c.mode = ModeSweep::both;
                else parse_fail(name, ln, "mode must be clustered, unclustered or both");
            } else if (key == "capping") {
                if (val == "capped") c.capping = CapSweep::capped;
                else if (val == "uncapped") c.capping = CapSweep::uncapped;
                else if (val == "both") c.capping = CapSweep::both;
                else parse_fail(name, ln, "capping must be capped, uncapped or both");
            } else if (key == "k") {
                c.k_list = to_list<int>(val, name, ln, to_int);
            } else if (key == "c") {
                c.c_list = to_list<int>(val, name, ln, to_int);
            } else if (key == "period") {
                c.period_list = to_list<double>(val, name, ln, to_double);
            } else if (key == "trials") {
                c.trials = static_cast<int>(to_int(val, name, ln));
                trials_set = true;
            } else if (key == "layout_every") {
                c.layout_every = static_cast<int>(to_int(val, name, ln));
            } else if (key == "out_dir") {
                c.out_dir = val;
            } else if (key == "csv_name") {
                c.csv_name = val;
            } else {
                parse_fail(name, ln, "unknown key '" + key + "' in [sweep]");
            }
        }
    }
    if (c.k_list.empty()) c.k_list = {c.base.devices_per_cell};
    if (c.c_list.empty()) c.c_list = {c.base.clusters_per_cell};
    if (c.period_list.empty()) c.period_list = {c.base.period_s};
    if (!trials_set) c.trials = c.base.trials;
    c.validate();
    return c;
}

Campaign load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

void emit_config(const Campaign& c, std::ostream& out) {
    const NetworkConfig& n = c.base;
    out << "[network]\n";
    out << "cells = " << n.cells << "\n";
    out << "devices_per_cell = " << n.devices_per_cell << "\n";
    out << "clusters_per_cell = " << n.clusters_per_cell << "\n";
    out << "antennas = " << n.antennas << "\n";
    out << "cell_edge_m = " << fmt(n.cell_edge_m) << "\n";
    out << "min_bs_distance_m = " << fmt(n.min_bs_distance_m) << "\n";
    out << "pathloss_exp = " << fmt(n.pathloss_exp) << "\n";
    out << "gain_ref_db = " << fmt(n.gain_ref_db) << "\n";
    out << "shadow_std_db = " << fmt(n.shadow_std_db) << "\n";
    out << "noise_dbm = " << fmt(n.noise_dbm) << "\n";
    out << "ul_power_dbm = " << fmt(n.ul_power_dbm) << "\n";
    out << "tau_c = " << n.tau_c << "\n";
    out << "bandwidth_hz = " << fmt(n.bandwidth_hz) << "\n";
    out << "payload_bytes = " << n.payload_bytes << "\n";
    out << "period_s = " << fmt(n.period_s) << "\n";
    out << "asd_deg = " << fmt(n.asd_deg) << "\n";
    out << "shadow_serving_strongest = " << (n.shadow_serving_strongest ? "true" : "false") << "\n";
    out << "seed = " << n.seed << "\n";
    out << "\n[engine]\n";
    out << "beta_floor_rel = " << fmt(c.engine.beta_floor_rel) << "\n";
    out << "factor_clamp_rel = " << fmt(c.engine.factor_clamp_rel) << "\n";
    out << "fifo_turn_order = " << (c.engine.fifo_turn_order ? "true" : "false") << "\n";
    out << "exact_stats = " << (c.engine.exact_stats ? "true" : "false") << "\n";
    out << "threads = " << c.engine.threads << "\n";
    out << "\n[sweep]\n";
    out << "mode = "
        << (c.mode == ModeSweep::clustered
                ? "clustered"
                : c.mode == ModeSweep::unclustered ? "unclustered" : "both")
        << "\n";
    out << "capping = "
        << (c.capping == CapSweep::capped ? "capped"
                                          : c.capping == CapSweep::uncapped ? "uncapped" : "both")
        << "\n";
    auto join_i = [&out](const char* key, const std::vector<int>& v) {
        out << key << " = ";
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
        out << "\n";
    };
    join_i("k", c.k_list);
    join_i("c", c.c_list);
    out << "period = ";
    for (std::size_t i = 0; i < c.period_list.size(); ++i)
        out << (i ? "," : "") << fmt(c.period_list[i]);
    out << "\n";
    out << "trials = " << c.trials << "\n";
    out << "layout_every = " << c.layout_every << "\n";
    out << "out_dir = " << c.out_dir << "\n";
    out << "csv_name = " << c.csv_name << "\n";
}

ResultRow run_point(const NetworkConfig& cfg, const EngineOptions& opts, Mode mode, bool capped,
                    int trials, int layout_every) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRow row;
    row.K = cfg.devices_per_cell;
    row.C = cfg.clusters_per_cell;
    row.period_s = cfg.period_s;
    row.mode = mode;
    row.capped = capped;
    row.trials = trials;

    std::vector<double> se(trials, 0.0), nm(trials, 0.0), om(trials, 0.0);
    const int n_groups = (trials + layout_every - 1) / layout_every;
    for (int g = 0; g < n_groups; ++g) {
        const std::uint64_t layout_seed = sub_seed(cfg.seed, Stream::layout, g);
        const LayoutContext ctx = make_layout_context(cfg, opts, mode, layout_seed);
        const int t_lo = g * layout_every;
        const int t_hi = std::min(trials, t_lo + layout_every);
#pragma omp parallel for schedule(dynamic, 1)
        for (int t = t_lo; t < t_hi; ++t) {
            const TrialOutput out = mode == Mode::clustered
                                        ? run_clustered_trial(ctx, t, capped)
                                        : run_unclustered_trial(ctx, t);
            se[t] = out.cell_se;
            nm[t] = out.nmse_mean;
            if (out.report) om[t] = out.report->total_omitted();
        }
    }
    const double n = trials;
    row.se_mean = std::accumulate(se.begin(), se.end(), 0.0) / n;
    double var = 0.0;
    for (double v : se) var += (v - row.se_mean) * (v - row.se_mean);
    row.se_std = std::sqrt(var / n);
    row.nmse_mean = std::accumulate(nm.begin(), nm.end(), 0.0) / n;
    row.omitted_mean = std::accumulate(om.begin(), om.end(), 0.0) / n;
    row.omit_rate = row.omitted_mean / (static_cast<double>(cfg.cells) * cfg.devices_per_cell);
    row.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<ResultRow> campaign_rows(const Campaign& campaign, std::ostream& log, bool quiet,
                                     int& failures) {
    campaign.validate();
#ifdef _OPENMP
    if (campaign.engine.threads > 0) omp_set_num_threads(campaign.engine.threads);
#endif
    std::vector<Mode> modes;
    if (campaign.mode != ModeSweep::unclustered) modes.push_back(Mode::clustered);
    if (campaign.mode != ModeSweep::clustered) modes.push_back(Mode::unclustered);

    std::vector<ResultRow> rows;
    failures = 0;
    for (Mode m : modes) {
        std::vector<bool> caps;
        if (m == Mode::unclustered) caps = {true};
        else if (campaign.capping == CapSweep::capped) caps = {true};
        else if (campaign.capping == CapSweep::uncapped) caps = {false};
        else caps = {true, false};
        const std::vector<int> c_axis =
            m == Mode::unclustered ? std::vector<int>{campaign.c_list.front()} : campaign.c_list;
        for (bool capped : caps)
            for (int C : c_axis)
                for (int K : campaign.k_list)
                    for (double period : campaign.period_list) {
                        NetworkConfig cfg = campaign.base;
                        cfg.devices_per_cell = K;
                        cfg.clusters_per_cell = C;
                        cfg.period_s = period;
                        ResultRow row;
                        try {
                            row = run_point(cfg, campaign.engine, m, capped, campaign.trials,
                                            campaign.layout_every);
                        } catch (const std::exception& e) {
                            row.K = K;
                            row.C = C;
                            row.period_s = period;
                            row.mode = m;
                            row.capped = capped;
                            row.ok = false;
                            row.error = e.what();
                            ++failures;
                            log << "point K=" << K << " C=" << C << " period=" << period
                                << " mode=" << mode_name(m) << " failed: " << e.what() << "\n";
                        }
                        if (!quiet && row.ok)
                            log << "K=" << K << " C=" << C << " period=" << fmt(period)
                                << " mode=" << mode_name(m) << " cap=" << cap_name(m, capped)
                                << " se=" << fmt(row.se_mean)
                                << " omit_rate=" << fmt(row.omit_rate) << " ("
                                << fmt(row.wall_s) << " s)\n";
                        rows.push_back(std::move(row));
                    }
    }
    return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << "K,C,period_s,mode,capping,trials,se_mean,se_std,omitted_mean,omit_rate,nmse_mean\n";
    for (const ResultRow& r : rows) {
        if (!r.ok) continue;
        out << r.K << "," << r.C << "," << fmt(r.period_s) << "," << mode_name(r.mode) << ","
            << cap_name(r.mode, r.capped) << "," << r.trials << "," << fmt(r.se_mean) << ","
            << fmt(r.se_std) << "," << fmt(r.omitted_mean) << "," << fmt(r.omit_rate) << ","
            << fmt(r.nmse_mean) << "\n";
    }
}

void write_summary(const Campaign& campaign, const std::vector<ResultRow>& rows,
                   std::ostream& out) {
    out << "mimosim campaign summary\n";
    out << "cells=" << campaign.base.cells << " antennas=" << campaign.base.antennas
        << " trials=" << campaign.trials << " seed=" << campaign.base.seed << "\n\n";
    double total_wall = 0.0;
    for (const ResultRow& r : rows) {
        total_wall += r.wall_s;
        out << "K=" << r.K << " C=" << r.C << " period=" << fmt(r.period_s)
            << " mode=" << mode_name(r.mode) << " cap=" << cap_name(r.mode, r.capped);
        if (!r.ok) {
            out << "  FAILED: " << r.error << "\n";
            continue;
        }
        out << "  se=" << fmt(r.se_mean) << " (std " << fmt(r.se_std) << ")"
            << " omitted=" << fmt(r.omitted_mean) << " (" << fmt(100.0 * r.omit_rate) << "%)"
            << " nmse=" << fmt(r.nmse_mean) << " wall=" << fmt(r.wall_s) << " s\n";
    }
    out << "\ntotal wall time: " << fmt(total_wall) << " s\n";
    out << "plot recipe: any CSV tool, e.g. "
           "`python3 -c \"import pandas as pd; "
           "pd.read_csv('<csv>').pivot_table(index='K', columns='C', "
           "values='omitted_mean').plot()\"`\n";
}

int run_campaign(const Campaign& campaign, std::ostream& log, bool quiet) {
    int failures = 0;
    const std::vector<ResultRow> rows = campaign_rows(campaign, log, quiet, failures);
    std::filesystem::create_directories(campaign.out_dir);
    const auto csv_path = std::filesystem::path(campaign.out_dir) / campaign.csv_name;
    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw ConfigError("cannot write " + csv_path.string());
        write_csv(rows, csv);
    }
    {
        std::ofstream sum(std::filesystem::path(campaign.out_dir) / "summary.txt",
                          std::ios::binary);
        write_summary(campaign, rows, sum);
    }
    if (!quiet) log << "wrote " << csv_path.string() << "\n";
    return failures == 0 ? 0 : 1;
}

Campaign figure_campaign(const std::string& name, bool desk) {
    Campaign c;
    if (name == "fig2") {
        c.mode = ModeSweep::clustered;
        c.capping = CapSweep::both;
        c.k_list = {50, 75, 100, 125, 150, 175, 200};
        c.c_list = {10};
        c.period_list = {1.0};
        c.csv_name = "fig2_omitted_capped.csv";
    } else if (name == "fig3") {
        c.mode = ModeSweep::clustered;
        c.capping = CapSweep::capped;
        c.k_list = {25, 50, 75, 100, 125, 150, 175, 200};
        c.c_list = {10, 15, 20, 25};
        c.period_list = {1.0, 1.5};
        c.csv_name = "fig3_omitted.csv";
    } else if (name == "fig4") {
        c.mode = ModeSweep::both;
        c.capping = CapSweep::capped;
        c.k_list = {10, 22, 34, 46, 58, 70, 85, 100, 115, 130, 145, 160, 175, 190};
        c.c_list = {25};
        c.period_list = {1.0};
        c.csv_name = "fig4_se.csv";
    } else {
        throw ConfigError("unknown figure '" + name + "' (expected fig2, fig3 or fig4)");
    }
    if (desk) {
        c.base.cells = 4;
        c.base.antennas = 32;
        c.trials = 10;
    } else {
        c.trials = c.base.trials;
    }
    return c;
}

}  // namespace mimo
