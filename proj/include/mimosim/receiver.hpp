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

#include <vector>

namespace mimo {

/// SINR and the resulting spectral-efficiency point of one device.
struct RatePoint {
    double gamma = 0.0;   // linear SINR
    double se = 0.0;      // bits/s/Hz
    int tau_up = 0;       // uplink data samples
    double prelog = 0.0;  // tau_up / tau_c
};

/// Estimation-error floor: sum of error covariances of every active link
/// plus the scaled identity noise term.
MatC interference_floor(const std::vector<MatC>& err_covs, double noise_over_power, int M);

/// Multicell MMSE combining matrix. Hhat_all stacks the estimated channels
/// of every active device across all cells (columns), Hhat_serving those of
/// the own cell. Solved as a Hermitian linear system.
MatC mmmse_combiner(const MatC& Hhat_all, const MatC& Hhat_serving, const MatC& Z);

/// SINR of one device after combining. intra/inter are the estimated
/// channels of the competing in-cell and other-cell active devices.
double sinr(const VecC& w, const VecC& h_hat_serving, const MatC& intra, const MatC& inter,
            const MatC& Z);

RatePoint spectral_efficiency(double gamma, int tau_p, int tau_c);

}  // namespace mimo
