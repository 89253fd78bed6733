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

#include "mimosim/netgen.hpp"

#include "mimosim/rng.hpp"

#include <random>

namespace mimo {

void NetworkConfig::validate() const {
    if (cells < 1) throw ConfigError("cells must be >= 1");
    if (devices_per_cell < 1) throw ConfigError("devices_per_cell must be >= 1");
    if (clusters_per_cell < 1 || clusters_per_cell > devices_per_cell)
        throw ConfigError("clusters_per_cell must be in [1, devices_per_cell]");
    if (clusters_per_cell > tau_c) throw ConfigError("clusters_per_cell must be <= tau_c");
    if (antennas < 1) throw ConfigError("antennas must be >= 1");
    if (cell_edge_m <= 0) throw ConfigError("cell_edge_m must be positive");
    if (!(min_bs_distance_m < cell_edge_m / 2.0))
        throw ConfigError("min_bs_distance_m must be < cell_edge_m / 2");
    if (tau_c < 2) throw ConfigError("tau_c must be >= 2");
    if (bandwidth_hz <= 0) throw ConfigError("bandwidth_hz must be positive");
    if (payload_bytes <= 0) throw ConfigError("payload_bytes must be positive");
    if (period_s <= 0) throw ConfigError("period_s must be positive");
    if (asd_deg < 0) throw ConfigError("asd_deg must be nonnegative");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (!std::isfinite(gain_ref_db) || !std::isfinite(noise_dbm) || !std::isfinite(ul_power_dbm) ||
        !std::isfinite(shadow_std_db) || !std::isfinite(pathloss_exp))
        throw ConfigError("powers and gains must be finite");
}

namespace {

// Largest factor pair of L that is closest to square, so the wrap-around
// torus stays rectangular for any supported cell count.
std::pair<int, int> grid_shape(int L) {
    int best = 1;
    for (int g = 1; g * g <= L; ++g)
        if (L % g == 0) best = g;
    return {L / best, best};  // cols, rows
}

}  // namespace

double wrap_distance(const Point& a, const Point& b, const std::vector<Point>& wrap_offsets) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& o : wrap_offsets) {
        const double dx = a.x - (b.x + o.x);
        const double dy = a.y - (b.y + o.y);
        best = std::min(best, std::hypot(dx, dy));
    }
    return best;
}

Point nearest_wrap_image(const Point& a, const Point& b, const std::vector<Point>& wrap_offsets) {
    double best = std::numeric_limits<double>::infinity();
    Point img = b;
    for (const Point& o : wrap_offsets) {
        const Point cand{b.x + o.x, b.y + o.y};
        const double d = std::hypot(a.x - cand.x, a.y - cand.y);
        if (d < best) {
            best = d;
            img = cand;
        }
    }
    return img;
}

double large_scale_gain(double d_m, double shadow_db, double pathloss_exp, double gain_ref_db) {
    if (d_m <= 0) throw DomainError("large_scale_gain: distance must be positive");
    const double gain_db = gain_ref_db - 10.0 * pathloss_exp * std::log10(d_m / 1000.0) + shadow_db;
    return db_to_lin(gain_db);
}

std::vector<cxd> spatial_correlation_coeffs(double theta, double asd_deg, int M, double beta) {
    const double sigma_phi = asd_deg * pi / 180.0;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    std::vector<cxd> coeffs(2 * M - 1);
    for (int d = -(M - 1); d <= M - 1; ++d) {
        const double phase = pi * d * s;
        const double damp = sigma_phi * pi * d * c;
        coeffs[d + M - 1] = beta * std::exp(-0.5 * damp * damp) * cxd(std::cos(phase), std::sin(phase));
    }
    return coeffs;
}

MatC spatial_correlation(double theta, double asd_deg, int M, double beta) {
    const auto coeffs = spatial_correlation_coeffs(theta, asd_deg, M, beta);
    MatC R(M, M);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < M; ++n) R(m, n) = coeffs[m - n + M - 1];
    return R;
}

MatC CorrelationSet::R(int i, int j, int k) const {
    return spatial_correlation(angle(i, j, k), asd_deg_, M_, beta(i, j, k));
}

Placement build_layout(const NetworkConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto [cols, rows] = grid_shape(cfg.cells);
    Placement p;
    p.grid_cols = cols;
    p.grid_rows = rows;
    p.span_x = cols * cfg.cell_edge_m;
    p.span_y = rows * cfg.cell_edge_m;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            p.wrap_offsets.push_back({dx * p.span_x, dy * p.span_y});

    p.bs.resize(cfg.cells);
    p.devices.resize(cfg.cells);
    Rng rng = make_rng(seed, Stream::layout);
    std::uniform_real_distribution<double> u(0.0, cfg.cell_edge_m);
    for (int l = 0; l < cfg.cells; ++l) {
        const int cx = l % cols;
        const int cy = l / cols;
        const double x0 = cx * cfg.cell_edge_m;
        const double y0 = cy * cfg.cell_edge_m;
        p.bs[l] = {x0 + cfg.cell_edge_m / 2.0, y0 + cfg.cell_edge_m / 2.0};
        p.devices[l].resize(cfg.devices_per_cell);
        for (int k = 0; k < cfg.devices_per_cell; ++k) {
            int attempts = 0;
            for (;;) {
                const Point cand{x0 + u(rng), y0 + u(rng)};
                if (std::hypot(cand.x - p.bs[l].x, cand.y - p.bs[l].y) >= cfg.min_bs_distance_m) {
                    p.devices[l][k] = cand;
                    break;
                }
                if (++attempts >= 1000)
                    throw ConfigError("build_layout: min_bs_distance rejection sampling failed");
            }
        }
    }
    return p;
}

CorrelationSet build_correlation_set(const NetworkConfig& cfg, const Placement& placement,
                                     std::uint64_t seed) {
    CorrelationSet corr(cfg.cells, cfg.devices_per_cell, cfg.antennas, cfg.asd_deg);
    for (int j = 0; j < cfg.cells; ++j) {
        for (int k = 0; k < cfg.devices_per_cell; ++k) {
            // One shadowing stream per device, one draw per victim BS.
            Rng rng = make_rng(seed, Stream::shadowing,
                               static_cast<std::uint64_t>(j) * cfg.devices_per_cell + k);
            std::normal_distribution<double> sf(0.0, cfg.shadow_std_db);
            for (int attempt = 0;; ++attempt) {
                for (int i = 0; i < cfg.cells; ++i) {
                    const Point img = nearest_wrap_image(placement.bs[i], placement.devices[j][k],
                                                         placement.wrap_offsets);
                    const double d = std::hypot(placement.bs[i].x - img.x, placement.bs[i].y - img.y);
                    corr.beta(i, j, k) =
                        large_scale_gain(d, sf(rng), cfg.pathloss_exp, cfg.gain_ref_db);
                    corr.angle(i, j, k) =
                        std::atan2(img.y - placement.bs[i].y, img.x - placement.bs[i].x);
                }
                if (!cfg.shadow_serving_strongest || attempt >= 10000) break;
                bool strongest = true;
                for (int i = 0; i < cfg.cells && strongest; ++i)
                    if (i != j && corr.beta(i, j, k) > corr.beta(j, j, k)) strongest = false;
                if (strongest) break;
            }
        }
    }
    return corr;
}

}  // namespace mimo
