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
#include "mimosim/netgen.hpp"

#include <functional>
#include <vector>

namespace mimo {

/// Orthogonal unit-modulus pilot sequences (DFT family).
/// sequences.row(p) is pilot p; rows satisfy phi_a phi_b^H = tau_p * delta_ab.
struct PilotBook {
    int tau_p = 0;
    MatC sequences;  // tau_p x tau_p
};

PilotBook make_pilot_book(int tau_p);

/// One fast-fading draw per device-BS link.
struct ChannelRealization {
    int L = 0, K = 0, M = 0;
    std::vector<VecC> h;  // (i*L + j)*K + k -> channel from device k of cell j to BS i

    VecC& at(int i, int j, int k) { return h[(static_cast<std::size_t>(i) * L + j) * K + k]; }
    const VecC& at(int i, int j, int k) const {
        return h[(static_cast<std::size_t>(i) * L + j) * K + k];
    }
};

/// Hermitian square-root factor F with F F^H = R. Eigendecomposition with
/// eigenvalues below -clamp_rel * lambda_max treated as round-off and
/// clamped to zero; columns with negligible eigenvalues are dropped, so F
/// is M x r with r the numerical rank.
MatC hermitian_sqrt_factor(const MatC& R, double clamp_rel = 1e-12);

ChannelRealization realize_channels(const CorrelationSet& corr, std::uint64_t seed);

/// Synchronous uplink pilot phase at every base station: the returned
/// matrix for BS i is sum over all cells and devices of
/// sqrt(rho) h phi plus AWGN with per-entry variance sigma2.
std::vector<MatC> receive_pilots(const ChannelRealization& ch, const PilotBook& book,
                                 const std::function<int(int, int)>& pilot_of, double rho_ul,
                                 double sigma2, std::uint64_t seed);

/// Despreading: (1 / (tau_p sqrt(rho))) Y' phi^H.
VecC despread(const MatC& Yp, const Eigen::RowVectorXcd& phi, int tau_p, double rho_ul);

/// MMSE estimation output for one pilot group observed at one base station.
/// group_R lists R_jk^i for every pilot-sharing device, serving link first
/// by convention of the caller.
struct ChannelEstimate {
    MatC psi;                    // sum of group R + (sigma2 / (tau_p rho)) I
    Eigen::LDLT<MatC> psi_ldlt;
    std::vector<VecC> h_hat;     // one estimate per group member
    std::vector<MatC> err_cov;   // R - R psi^{-1} R per group member
};

ChannelEstimate mmse_estimate(const std::vector<MatC>& group_R, const VecC& y, int tau_p,
                              double rho_ul, double sigma2);

/// Normalized estimation error 1 - tr(R psi^{-1} R) / tr(R), in [0, 1].
double nmse(const MatC& R, const MatC& psi);

}  // namespace mimo
