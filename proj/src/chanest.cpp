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

#include "mimosim/chanest.hpp"

#include "mimosim/rng.hpp"

namespace mimo {

PilotBook make_pilot_book(int tau_p) {
    if (tau_p < 1) throw ConfigError("make_pilot_book: tau_p must be >= 1");
    PilotBook book;
    book.tau_p = tau_p;
    book.sequences.resize(tau_p, tau_p);
    for (int p = 0; p < tau_p; ++p)
        for (int t = 0; t < tau_p; ++t) {
            const double arg = -2.0 * pi * p * t / tau_p;
            book.sequences(p, t) = cxd(std::cos(arg), std::sin(arg));
        }
    return book;
}

MatC hermitian_sqrt_factor(const MatC& R, double clamp_rel) {
    Eigen::SelfAdjointEigenSolver<MatC> eig(R);
    if (eig.info() != Eigen::Success)
        throw NumericError("hermitian_sqrt_factor: eigendecomposition failed");
    const VecD& ev = eig.eigenvalues();
    const double lam_max = ev.size() ? ev.maxCoeff() : 0.0;
    if (lam_max <= 0.0) return MatC::Zero(R.rows(), 0);
    const double floor = clamp_rel * lam_max;
    std::vector<int> keep;
    for (int n = 0; n < ev.size(); ++n)
        if (ev[n] > floor) keep.push_back(n);
    MatC F(R.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        F.col(static_cast<Eigen::Index>(c)) =
            eig.eigenvectors().col(keep[c]) * std::sqrt(ev[keep[c]]);
    return F;
}

ChannelRealization realize_channels(const CorrelationSet& corr, std::uint64_t seed) {
    ChannelRealization ch;
    ch.L = corr.cells();
    ch.K = corr.devices_per_cell();
    ch.M = corr.antennas();
    ch.h.resize(static_cast<std::size_t>(ch.L) * ch.L * ch.K);
    Rng rng = make_rng(seed, Stream::fading);
    for (int i = 0; i < ch.L; ++i)
        for (int j = 0; j < ch.L; ++j)
            for (int k = 0; k < ch.K; ++k) {
                const MatC F = hermitian_sqrt_factor(corr.R(i, j, k));
                ch.at(i, j, k) = F * randcn_vec(rng, F.cols());
            }
    return ch;
}

std::vector<MatC> receive_pilots(const ChannelRealization& ch, const PilotBook& book,
                                 const std::function<int(int, int)>& pilot_of, double rho_ul,
                                 double sigma2, std::uint64_t seed) {
    const int L = ch.L, K = ch.K, M = ch.M;
    const double amp = std::sqrt(rho_ul);
    Rng rng = make_rng(seed, Stream::noise);
    std::vector<MatC> out(L);
    for (int i = 0; i < L; ++i) {
        MatC Y = MatC::Zero(M, book.tau_p);
        for (int j = 0; j < L; ++j)
            for (int k = 0; k < K; ++k) {
                const int p = pilot_of(j, k);
                if (p < 0) continue;  // silent device
                if (p >= book.tau_p)
                    throw ConfigError("receive_pilots: pilot index out of range");
                if (ch.at(i, j, k).size() != M)
                    throw ConfigError("receive_pilots: channel dimension mismatch");
                Y.noalias() += amp * ch.at(i, j, k) * book.sequences.row(p);
            }
        const double namp = std::sqrt(sigma2);
        for (int t = 0; t < book.tau_p; ++t)
            for (int m = 0; m < M; ++m) Y(m, t) += namp * randcn(rng);
        out[i] = std::move(Y);
    }
    return out;
}

VecC despread(const MatC& Yp, const Eigen::RowVectorXcd& phi, int tau_p, double rho_ul) {
    return (Yp * phi.conjugate().transpose()) / (tau_p * std::sqrt(rho_ul));
}

ChannelEstimate mmse_estimate(const std::vector<MatC>& group_R, const VecC& y, int tau_p,
                              double rho_ul, double sigma2) {
    if (group_R.empty()) throw ConfigError("mmse_estimate: empty pilot group");
    const int M = static_cast<int>(group_R.front().rows());
    ChannelEstimate est;
    est.psi = MatC::Zero(M, M);
    for (const MatC& R : group_R) est.psi += R;
    est.psi += (sigma2 / (tau_p * rho_ul)) * MatC::Identity(M, M);
    est.psi_ldlt.compute(est.psi);
    if (est.psi_ldlt.info() != Eigen::Success)
        throw NumericError("mmse_estimate: psi is numerically singular");
    const VecC z = est.psi_ldlt.solve(y);
    est.h_hat.reserve(group_R.size());
    est.err_cov.reserve(group_R.size());
    for (const MatC& R : group_R) {
        est.h_hat.push_back(R * z);
        est.err_cov.push_back(R - R * est.psi_ldlt.solve(R));
    }
    return est;
}

double nmse(const MatC& R, const MatC& psi) {
    const double trR = R.trace().real();
    if (trR <= 0.0) throw DomainError("nmse: tr(R) must be positive");
    Eigen::LDLT<MatC> ldlt(psi);
    if (ldlt.info() != Eigen::Success) throw NumericError("nmse: psi is numerically singular");
    const double num = (R * ldlt.solve(R)).trace().real();
    return 1.0 - num / trR;
}

}  // namespace mimo
