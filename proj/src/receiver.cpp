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

#include "mimosim/receiver.hpp"

namespace mimo {

MatC interference_floor(const std::vector<MatC>& err_covs, double noise_over_power, int M) {
    MatC Z = noise_over_power * MatC::Identity(M, M);
    for (const MatC& C : err_covs) Z += C;
    return Z;
}

MatC mmmse_combiner(const MatC& Hhat_all, const MatC& Hhat_serving, const MatC& Z) {
    MatC A = Z;
    A.noalias() += Hhat_all * Hhat_all.adjoint();
    Eigen::LDLT<MatC> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw NumericError("mmmse_combiner: Gram matrix is numerically singular");
    return ldlt.solve(Hhat_serving);
}

double sinr(const VecC& w, const VecC& h_hat_serving, const MatC& intra, const MatC& inter,
            const MatC& Z) {
    const double wn = w.squaredNorm();
    if (!(wn > 0.0)) throw DomainError("sinr: combining vector must be nonzero");
    const double num = std::norm(w.dot(h_hat_serving));
    double den = 0.0;
    if (intra.cols() > 0) den += (w.adjoint() * intra).squaredNorm();
    if (inter.cols() > 0) den += (w.adjoint() * inter).squaredNorm();
    den += (w.adjoint() * Z * w)(0, 0).real();
    return num / den;
}

RatePoint spectral_efficiency(double gamma, int tau_p, int tau_c) {
    if (tau_p < 0 || tau_p >= tau_c)
        throw ConfigError("spectral_efficiency: need 0 <= tau_p < tau_c");
    if (gamma < 0) throw DomainError("spectral_efficiency: gamma must be nonnegative");
    RatePoint rp;
    rp.gamma = gamma;
    rp.tau_up = tau_c - tau_p;
    rp.prelog = static_cast<double>(rp.tau_up) / tau_c;
    rp.se = rp.prelog * std::log2(1.0 + gamma);
    return rp;
}

}  // namespace mimo
