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
#include <cmath>
#include <numeric>
#include <ostream>
#include <vector>

namespace mimo {

namespace {

MatC random_corr(Rng& rng, int M) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double theta = (2.0 * u(rng) - 1.0) * pi / 3.0;
    const double beta = 0.1 + u(rng);
    return spatial_correlation(theta, 5.0 + 25.0 * u(rng), M, beta);
}

bool estimator_oracle(Rng& rng) {
    const int M = 4, tau_p = 3;
    const double rho = 0.5, sigma2 = 0.2;
    for (int it = 0; it < 20; ++it) {
        const MatC R1 = random_corr(rng, M);
        const MatC R2 = random_corr(rng, M);
        const VecC y = randcn_vec(rng, M);
        const ChannelEstimate est = mmse_estimate({R1, R2}, y, tau_p, rho, sigma2);
        const MatC psi =
            R1 + R2 + (sigma2 / (tau_p * rho)) * MatC::Identity(M, M);
        const MatC inv = psi.inverse();
        if ((est.h_hat[0] - R1 * inv * y).norm() > 1e-10) return false;
        if ((est.h_hat[1] - R2 * inv * y).norm() > 1e-10) return false;
        if ((est.err_cov[0] - (R1 - R1 * inv * R1)).norm() > 1e-10) return false;
    }
    return true;
}

bool nmse_identity() {
    const int M = 4;
    const MatC R = MatC::Identity(M, M);
    const MatC psi = 2.0 * MatC::Identity(M, M);  // two cells, noiseless
    return std::abs(nmse(R, psi) - 0.5) < 1e-12;
}

bool sinr_oracle(Rng& rng) {
    const int M = 6;
    for (int it = 0; it < 20; ++it) {
        const VecC w = randcn_vec(rng, M);
        const VecC h = randcn_vec(rng, M);
        MatC intra(M, 2), inter(M, 3);
        for (int c = 0; c < 2; ++c) intra.col(c) = randcn_vec(rng, M);
        for (int c = 0; c < 3; ++c) inter.col(c) = randcn_vec(rng, M);
        const MatC A = MatC::Random(M, M);
        const MatC Z = A * A.adjoint() + MatC::Identity(M, M);
        double den = w.dot(Z.selfadjointView<Eigen::Lower>() * w).real();
        for (int c = 0; c < 2; ++c) den += std::norm(w.dot(intra.col(c)));
        for (int c = 0; c < 3; ++c) den += std::norm(w.dot(inter.col(c)));
        const double expect = std::norm(w.dot(h)) / den;
        const double got = sinr(w, h, intra, inter, Z);
        if (std::abs(got - expect) > 1e-12 * expect) return false;
        const double scaled = sinr(2.0 * w, h, intra, inter, Z);
        if (std::abs(scaled - got) > 1e-12 * got) return false;
    }
    return true;
}

bool combiner_beats_matched_filter(Rng& rng) {
    const int M = 8, Kc = 3, L = 2;
    for (int it = 0; it < 20; ++it) {
        MatC Hall(M, L * Kc);
        for (int c = 0; c < L * Kc; ++c) Hall.col(c) = randcn_vec(rng, M);
        const MatC Hserv = Hall.leftCols(Kc);
        const MatC A = MatC::Random(M, M);
        const MatC Z = 0.1 * (A * A.adjoint()) + 0.5 * MatC::Identity(M, M);
        const MatC W = mmmse_combiner(Hall, Hserv, Z);
        for (int k = 0; k < Kc; ++k) {
            MatC intra(M, Kc - 1), inter = Hall.rightCols(Kc);
            int c0 = 0;
            for (int c = 0; c < Kc; ++c)
                if (c != k) intra.col(c0++) = Hserv.col(c);
            const double g_mmse = sinr(W.col(k), Hserv.col(k), intra, inter, Z);
            const double g_mf = sinr(Hserv.col(k), Hserv.col(k), intra, inter, Z);
            if (g_mmse + 1e-12 < g_mf) return false;
        }
    }
    return true;
}

double brute_force_capped_td(const MatD& S, int C, int N) {
    const int K = static_cast<int>(S.rows());
    std::vector<int> medoids(C);
    double best = std::numeric_limits<double>::infinity();
    // C == 2 only: enumerate medoid pairs and all capped assignments.
    for (int m1 = 0; m1 < K; ++m1)
        for (int m2 = m1 + 1; m2 < K; ++m2) {
            for (int mask = 0; mask < (1 << K); ++mask) {
                int n1 = 0;
                double td = 0.0;
                bool feasible = ((mask >> m1) & 1) == 0 && ((mask >> m2) & 1) == 1;
                if (!feasible) continue;
                for (int k = 0; k < K && feasible; ++k) {
                    const int c = (mask >> k) & 1;
                    if (c == 0) ++n1;
                    td += 1.0 - S(k, c == 0 ? m1 : m2);
                }
                if (n1 > N || K - n1 > N) continue;
                best = std::min(best, td);
            }
        }
    return best;
}

bool clusterer_oracle(Rng& rng) {
    const int K = 8, C = 2, N = 4;
    int close = 0;
    for (int it = 0; it < 20; ++it) {
        std::vector<MatC> R(K);
        for (int k = 0; k < K; ++k) R[k] = random_corr(rng, 16);
        MatD S(K, K);
        for (int a = 0; a < K; ++a) {
            S(a, a) = 1.0;
            for (int b = a + 1; b < K; ++b) {
                const double v = similarity(R[a], R[b]);
                S(a, b) = v;
                S(b, a) = v;
            }
        }
        const Clustering cl = cluster(S, C, N, true, rng());
        for (int sz : cl.sizes())
            if (sz > N) return false;
        const double td = assignment_deviation(S, cl);
        const double opt = brute_force_capped_td(S, C, N);
        if (td <= 1.10 * opt + 1e-12) ++close;
    }
    return close >= 14;  // 70% of the tiny-instance suite
}

bool pilot_oracle(Rng& rng) {
    const int L = 2, C = 3;
    int close = 0, beat_median = 0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto all_pairs = [](int a, int b) { return a != b; };
    for (int it = 0; it < 20; ++it) {
        InterferenceWeights w(L, C);
        MatD m01(C, C), m10(C, C);
        for (int a = 0; a < C; ++a)
            for (int b = 0; b < C; ++b) {
                m01(a, b) = u(rng);
                m10(b, a) = m01(a, b);
            }
        w.at(0, 1) = m01;
        w.at(1, 0) = m10;
        const PilotPartition greedy = assign_pilots(w, L, C, all_pairs, rng());
        if (!greedy.valid()) return false;
        const double got = partition_interference(w, greedy, all_pairs);

        // Exhaustive optimum over the second cell's bijections.
        std::vector<int> perm(C);
        std::iota(perm.begin(), perm.end(), 0);
        double opt = std::numeric_limits<double>::infinity();
        PilotPartition probe = greedy;
        do {
            for (int c = 0; c < C; ++c)
                probe.pilot_of_flat[static_cast<std::size_t>(1) * C + c] = perm[c];
            opt = std::min(opt, partition_interference(w, probe, all_pairs));
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (got <= 1.5 * opt + 1e-12) ++close;

        std::vector<double> randoms;
        for (int r = 0; r < 100; ++r) {
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            for (int c = 0; c < C; ++c)
                probe.pilot_of_flat[static_cast<std::size_t>(1) * C + c] = perm[c];
            randoms.push_back(partition_interference(w, probe, all_pairs));
        }
        std::nth_element(randoms.begin(), randoms.begin() + 50, randoms.end());
        if (got <= randoms[50] + 1e-12) ++beat_median;
    }
    return close >= 18 && beat_median >= 18;
}

bool scheduler_properties(Rng& rng) {
    TrafficModel t;
    if (blocks_per_period(t, 200) != 62) return false;
    t.period_s = 1.5;
    if (blocks_per_period(t, 200) != 93) return false;
    t.period_s = 1.0;
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int it = 0; it < 20; ++it) {
        std::vector<double> se(12);
        for (double& v : se) v = u(rng);
        const ClusterSchedule s = schedule_cluster(se, t);
        // Served turns form a prefix whose cumulative time fits the period.
        double acc = 0.0;
        for (std::size_t i = 0; i < s.served_turns.size(); ++i) {
            if (s.served_turns[i] != static_cast<int>(i)) return false;
            acc += tx_time(se[i], t);
        }
        if (acc > t.period_s + 1e-12) return false;
        if (s.served_turns.size() + s.omitted_turns.size() != se.size()) return false;
    }
    return true;
}

bool report(std::ostream& out, const char* name, bool ok) {
    out << name << ": " << (ok ? "pass" : "FAIL") << "\n";
    return ok;
}

}  // namespace

bool run_selftest(std::ostream& out, std::uint64_t seed) {
    Rng rng = make_rng(seed, Stream::selftest);
    bool ok = true;
    ok &= report(out, "estimator-oracle", estimator_oracle(rng));
    ok &= report(out, "nmse-identity", nmse_identity());
    ok &= report(out, "sinr-oracle", sinr_oracle(rng));
    ok &= report(out, "combiner-vs-matched-filter", combiner_beats_matched_filter(rng));
    ok &= report(out, "capped-k-medoids-oracle", clusterer_oracle(rng));
    ok &= report(out, "pilot-assignment-oracle", pilot_oracle(rng));
    ok &= report(out, "scheduler-properties", scheduler_properties(rng));
    return ok;
}

}  // namespace mimo
