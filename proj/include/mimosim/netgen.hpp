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

/// Full parameter set of the simulated network. Defaults follow the
/// standard urban-macro values used throughout the evaluation.
struct NetworkConfig {
    int cells = 16;              // L
    int devices_per_cell = 100;  // K
    int clusters_per_cell = 10;  // C, also the number of pilots per cell
    int antennas = 64;           // M
    double cell_edge_m = 250.0;
    double min_bs_distance_m = 35.0;
    double pathloss_exp = 3.76;       // alpha
    double gain_ref_db = -148.1;      // channel gain at 1 km
    double shadow_std_db = 10.0;      // sigma_sf
    double noise_dbm = -94.0;         // receiver noise power
    double ul_power_dbm = 20.0;       // uplink transmit power
    int tau_c = 200;                  // coherence block samples
    double bandwidth_hz = 12500.0;
    int payload_bytes = 500;
    double period_s = 1.0;            // reporting period
    double asd_deg = 10.0;            // angular standard deviation
    // Condition shadowing so the serving BS keeps the largest large-scale
    // gain of each device (rejection sampling per device). Off draws every
    // link independently.
    bool shadow_serving_strongest = true;
    int trials = 50;
    std::uint64_t seed = 1;

    double noise_over_power() const { return dbm_to_mw(noise_dbm) / dbm_to_mw(ul_power_dbm); }
    double payload_bits() const { return 8.0 * payload_bytes; }

    /// Throws ConfigError on an invalid combination.
    void validate() const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Cell/device geometry on the wrap-around torus.
struct Placement {
    int grid_cols = 0;
    int grid_rows = 0;
    double span_x = 0.0;  // torus extent in meters
    double span_y = 0.0;
    std::vector<Point> bs;                     // L base stations
    std::vector<std::vector<Point>> devices;   // L x K
    std::vector<Point> wrap_offsets;           // 9 translations incl. identity
};

/// Large-scale statistics of every device-BS link. Spatial correlation
/// matrices follow the Gaussian local scattering model for a half-wavelength
/// ULA and are materialized on demand from (beta, angle, asd).
class CorrelationSet {
public:
    CorrelationSet() = default;
    CorrelationSet(int L, int K, int M, double asd_deg)
        : L_(L), K_(K), M_(M), asd_deg_(asd_deg),
          beta_(static_cast<std::size_t>(L) * L * K, 0.0),
          angle_(static_cast<std::size_t>(L) * L * K, 0.0) {}

    int cells() const { return L_; }
    int devices_per_cell() const { return K_; }
    int antennas() const { return M_; }
    double asd_deg() const { return asd_deg_; }

    // beta(i,j,k): linear gain from device k of cell j to BS i.
    double& beta(int i, int j, int k) { return beta_[idx(i, j, k)]; }
    double beta(int i, int j, int k) const { return beta_[idx(i, j, k)]; }
    double& angle(int i, int j, int k) { return angle_[idx(i, j, k)]; }
    double angle(int i, int j, int k) const { return angle_[idx(i, j, k)]; }

    /// Materializes the M x M Hermitian correlation matrix of one link.
    MatC R(int i, int j, int k) const;

private:
    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * L_ + j) * K_ + k;
    }
    int L_ = 0, K_ = 0, M_ = 0;
    double asd_deg_ = 0.0;
    std::vector<double> beta_;
    std::vector<double> angle_;
};

/// Torus-minimal distance between two points.
double wrap_distance(const Point& a, const Point& b, const std::vector<Point>& wrap_offsets);

/// Wrap image of b closest to a (used for distances and bearings alike).
Point nearest_wrap_image(const Point& a, const Point& b, const std::vector<Point>& wrap_offsets);

/// Pathloss + shadowing in linear scale. Throws DomainError for d <= 0.
double large_scale_gain(double d_m, double shadow_db, double pathloss_exp, double gain_ref_db);

/// Gaussian local scattering correlation matrix for a half-wavelength ULA.
/// theta is the nominal angle in radians measured from broadside.
MatC spatial_correlation(double theta, double asd_deg, int M, double beta);

/// First row/column generator of the (Toeplitz) correlation matrix:
/// coeffs[d] = R(m, n) for m - n = d - (M-1), d in [0, 2M-2].
std::vector<cxd> spatial_correlation_coeffs(double theta, double asd_deg, int M, double beta);

Placement build_layout(const NetworkConfig& cfg, std::uint64_t seed);

CorrelationSet build_correlation_set(const NetworkConfig& cfg, const Placement& placement,
                                     std::uint64_t seed);

}  // namespace mimo
