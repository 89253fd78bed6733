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

#include "mimosim/clusterer.hpp"
#include "mimosim/netgen.hpp"
#include "mimosim/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace mimo;

namespace {

// Similarity matrix drawn from the deployment distribution: random angles
// and gains through the spatial correlation model.
MatD domain_similarity(Rng& rng, int K, int M = 16) {
    std::uniform_real_distribution<double> ang(-pi / 2, pi / 2);
    std::uniform_real_distribution<double> gain(0.1, 2.0);
    std::vector<MatC> R(K);
    for (int k = 0; k < K; ++k) R[k] = spatial_correlation(ang(rng), 10.0, M, gain(rng));
    MatD S(K, K);
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b) S(a, b) = similarity(R[a], R[b]);
    return S;
}

// Exhaustive optimum over medoid subsets with optimal capped assignment
// found by enumerating all C^K device-to-cluster maps. Tiny K only.
double brute_force_capped(const MatD& S, int C, int N) {
    const int K = static_cast<int>(S.rows());
    std::vector<int> medoids(C);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> comb(C);
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
        std::vector<int> asgn(K);
        const auto total = [&] {
            std::vector<int> load(C, 0);
            double d = 0.0;
            for (int k = 0; k < K; ++k) {
                ++load[asgn[k]];
                d += 1.0 - S(k, comb[asgn[k]]);
            }
            for (int c = 0; c < C; ++c)
                if (load[c] > N) return std::numeric_limits<double>::infinity();
            return d;
        };
        for (long code = 0; code < static_cast<long>(std::pow(C, K)); ++code) {
            long r = code;
            for (int k = 0; k < K; ++k) {
                asgn[k] = static_cast<int>(r % C);
                r /= C;
            }
            best = std::min(best, total());
        }
        int i = C - 1;
        while (i >= 0 && comb[i] == K - C + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < C; ++j) comb[j] = comb[j - 1] + 1;
    }
    return best;
}

double brute_force_uncapped(const MatD& S, int C) {
    const int K = static_cast<int>(S.rows());
    std::vector<int> comb(C);
    std::iota(comb.begin(), comb.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        best = std::min(best, total_deviation(S, comb));
        int i = C - 1;
        while (i >= 0 && comb[i] == K - C + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < C; ++j) comb[j] = comb[j - 1] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("similarity basic identities") {
    Rng rng = make_rng(71, Stream::selftest);
    const MatC R = spatial_correlation(0.3, 10.0, 16, 1.2);
    CHECK(similarity(R, R) == doctest::Approx(1.0));
    CHECK(similarity(R, MatC(2.5 * R)) == doctest::Approx(1.0));

    // Orthogonal steering directions at zero spread are near-orthogonal
    // matrices.
    const MatC Ra = spatial_correlation(0.0, 0.0, 16, 1.0);
    const MatC Rb = spatial_correlation(pi / 2, 0.0, 16, 1.0);
    CHECK(similarity(Ra, Rb) < 0.2);
    CHECK(similarity(Ra, Rb) >= 0.0);

    CHECK_THROWS_AS(similarity(MatC::Zero(4, 4), R), DomainError);
}

TEST_CASE("similarity is symmetric and bounded") {
    Rng rng = make_rng(72, Stream::selftest);
    const MatD S = domain_similarity(rng, 12);
    for (int a = 0; a < 12; ++a) {
        CHECK(S(a, a) == doctest::Approx(1.0));
        for (int b = 0; b < 12; ++b) {
            CHECK(S(a, b) == doctest::Approx(S(b, a)));
            CHECK(S(a, b) > 0.0);
            CHECK(S(a, b) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("clustering output is a valid partition") {
    Rng rng = make_rng(73, Stream::selftest);
    const int K = 30, C = 5, N = 7;
    const MatD S = domain_similarity(rng, K);
    for (bool capped : {false, true}) {
        const Clustering cl = cluster(S, C, N, capped, 5);
        CHECK(cl.num_clusters() == C);
        CHECK(static_cast<int>(cl.assign.size()) == K);
        std::vector<int> load(C, 0);
        for (int k = 0; k < K; ++k) {
            REQUIRE(cl.assign[k] >= 0);
            REQUIRE(cl.assign[k] < C);
            ++load[cl.assign[k]];
        }
        for (int c = 0; c < C; ++c) {
            // Medoids belong to their own cluster.
            CHECK(cl.assign[cl.medoids[c]] == c);
            if (capped) CHECK(load[c] <= N);
        }
        // Medoids are distinct devices.
        std::vector<int> med = cl.medoids;
        std::sort(med.begin(), med.end());
        CHECK(std::adjacent_find(med.begin(), med.end()) == med.end());
    }
}

TEST_CASE("cap is honored at the tight boundary N*C == K") {
    Rng rng = make_rng(74, Stream::selftest);
    const int K = 20, C = 4, N = 5;
    const MatD S = domain_similarity(rng, K);
    const Clustering cl = cluster(S, C, N, true, 1);
    const auto sizes = cl.sizes();
    for (int c = 0; c < C; ++c) CHECK(sizes[c] == N);
}

TEST_CASE("infeasible cap rejected") {
    Rng rng = make_rng(75, Stream::selftest);
    const MatD S = domain_similarity(rng, 10);
    CHECK_THROWS_AS(cluster(S, 3, 3, true, 1), ConfigError);
    CHECK_THROWS_AS(cluster(S, 11, 1, false, 1), ConfigError);
}

TEST_CASE("uncapped search matches the exhaustive optimum on tiny instances") {
    Rng rng = make_rng(76, Stream::selftest);
    int hits = 0;
    const int runs = 20;
    for (int it = 0; it < runs; ++it) {
        const int K = 8, C = 2;
        const MatD S = domain_similarity(rng, K);
        const Clustering cl = cluster(S, C, K, false, it);
        const double got = total_deviation(S, cl.medoids);
        const double opt = brute_force_uncapped(S, C);
        CHECK(got >= opt - 1e-12);
        if (got <= opt * 1.10 + 1e-12) ++hits;
    }
    CHECK(hits >= runs * 8 / 10);
}

TEST_CASE("capped search stays near the exhaustive capped optimum") {
    Rng rng = make_rng(77, Stream::selftest);
    int hits = 0;
    const int runs = 12;
    for (int it = 0; it < runs; ++it) {
        const int K = 7, C = 2, N = 4;
        const MatD S = domain_similarity(rng, K);
        const Clustering cl = cluster(S, C, N, true, it);
        const double got = assignment_deviation(S, cl);
        const double opt = brute_force_capped(S, C, N);
        CHECK(got >= opt - 1e-12);
        if (got <= opt * 1.10 + 1e-12) ++hits;
    }
    CHECK(hits >= runs * 8 / 10);
}

TEST_CASE("capped deviation never beats the uncapped one") {
    Rng rng = make_rng(78, Stream::selftest);
    for (int it = 0; it < 5; ++it) {
        const int K = 18, C = 3, N = 7;
        const MatD S = domain_similarity(rng, K);
        const Clustering cu = cluster(S, C, K, false, it);
        const Clustering cc = cluster(S, C, N, true, it);
        CHECK(assignment_deviation(S, cc) >= assignment_deviation(S, cu) - 1e-9);
    }
}

TEST_CASE("clustering is deterministic in the seed") {
    Rng rng = make_rng(79, Stream::selftest);
    const MatD S = domain_similarity(rng, 25);
    const Clustering a = cluster(S, 4, 8, true, 42);
    const Clustering b = cluster(S, 4, 8, true, 42);
    CHECK(a.medoids == b.medoids);
    CHECK(a.assign == b.assign);
}
