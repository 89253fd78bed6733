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

#include "mimosim/rng.hpp"

#include <algorithm>
#include <numeric>

namespace mimo {

double similarity(const MatC& Ra, const MatC& Rb) {
    const double na = Ra.norm();
    const double nb = Rb.norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw DomainError("similarity: zero-norm matrix");
    // tr(Ra Rb^H) equals the Frobenius inner product; real for Hermitian pairs.
    const double ip = (Ra.array() * Rb.array().conjugate()).sum().real();
    return ip / (na * nb);
}

std::vector<std::vector<int>> Clustering::members() const {
    std::vector<std::vector<int>> m(medoids.size());
    for (std::size_t k = 0; k < assign.size(); ++k) m[assign[k]].push_back(static_cast<int>(k));
    return m;
}

std::vector<int> Clustering::sizes() const {
    std::vector<int> s(medoids.size(), 0);
    for (int c : assign) ++s[c];
    return s;
}

namespace {

struct Caches {
    std::vector<int> nearest, second;
    std::vector<double> d_nearest, d_second;
};

double dist(const MatD& S, int a, int b) { return a == b ? 0.0 : 1.0 - S(a, b); }

Caches compute_caches(const MatD& S, const std::vector<int>& medoids) {
    const int K = static_cast<int>(S.rows());
    const int C = static_cast<int>(medoids.size());
    Caches c;
    c.nearest.assign(K, -1);
    c.second.assign(K, -1);
    c.d_nearest.assign(K, 0.0);
    c.d_second.assign(K, 0.0);
    for (int k = 0; k < K; ++k) {
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = d1;
        int m1 = -1, m2 = -1;
        for (int c_i = 0; c_i < C; ++c_i) {
            const double d = dist(S, k, medoids[c_i]);
            if (d < d1) {
                d2 = d1; m2 = m1;
                d1 = d; m1 = c_i;
            } else if (d < d2) {
                d2 = d; m2 = c_i;
            }
        }
        c.nearest[k] = m1;
        c.second[k] = m2;
        c.d_nearest[k] = d1;
        c.d_second[k] = m2 >= 0 ? d2 : d1;
    }
    return c;
}

std::vector<double> removal_losses(const Caches& c, int C) {
    std::vector<double> loss(C, 0.0);
    for (std::size_t k = 0; k < c.nearest.size(); ++k)
        loss[c.nearest[k]] += c.d_second[k] - c.d_nearest[k];
    return loss;
}

// Cap-aware assignment: nearest medoid if its cluster has room, otherwise
// second nearest, cascading to the closest medoid with room when both are
// full. Devices with the most to lose from a demotion (largest gap between
// nearest and next-best medoid) claim their spot first. cap <= 0 disables
// the constraint.
void capped_assign(const MatD& S, const std::vector<int>& medoids, int cap, Clustering& out) {
    const int K = static_cast<int>(S.rows());
    const int C = static_cast<int>(medoids.size());
    out.assign.assign(K, -1);
    std::vector<int> load(C, 0);
    std::vector<int> which(K, -1);
    for (int c = 0; c < C; ++c) {
        out.assign[medoids[c]] = c;
        ++load[c];
        which[medoids[c]] = c;
    }
    std::vector<int> devices;
    std::vector<double> regret(K, 0.0);
    for (int k = 0; k < K; ++k) {
        if (which[k] >= 0) continue;
        devices.push_back(k);
        if (C > 1) {
            double d1 = std::numeric_limits<double>::infinity();
            double d2 = d1;
            for (int c = 0; c < C; ++c) {
                const double d = dist(S, k, medoids[c]);
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                } else if (d < d2) {
                    d2 = d;
                }
            }
            regret[k] = d2 - d1;
        }
    }
    std::stable_sort(devices.begin(), devices.end(),
                     [&](int a, int b) { return regret[a] > regret[b]; });
    for (int k : devices) {
        std::vector<int> order(C);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return dist(S, k, medoids[a]) < dist(S, k, medoids[b]);
        });
        int chosen = -1;
        if (cap <= 0) {
            chosen = order[0];
        } else {
            for (int c : order)
                if (load[c] < cap) {
                    chosen = c;
                    break;
                }
            if (chosen < 0) throw ConfigError("cluster: capacity exhausted");
        }
        out.assign[k] = chosen;
        ++load[chosen];
    }
}

}  // namespace

double total_deviation(const MatD& S, const std::vector<int>& medoids) {
    double td = 0.0;
    for (int k = 0; k < S.rows(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (int m : medoids) best = std::min(best, dist(S, k, m));
        td += best;
    }
    return td;
}

double assignment_deviation(const MatD& S, const Clustering& cl) {
    double td = 0.0;
    for (std::size_t k = 0; k < cl.assign.size(); ++k)
        td += dist(S, static_cast<int>(k), cl.medoids[cl.assign[k]]);
    return td;
}

Clustering cluster(const MatD& S, int C, int N, bool capped, std::uint64_t seed) {
    const int K = static_cast<int>(S.rows());
    if (S.cols() != K) throw ConfigError("cluster: similarity matrix must be square");
    if (C < 1 || C > K) throw ConfigError("cluster: need 1 <= C <= K");
    if (capped && static_cast<long long>(N) * C < K)
        throw ConfigError("cluster: infeasible capacity N*C < K");

    // Line 1: random distinct medoids.
    std::vector<int> pool(K);
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng = make_rng(seed, Stream::medoid_init);
    for (int c = 0; c < C; ++c) {
        std::uniform_int_distribution<int> u(c, K - 1);
        std::swap(pool[c], pool[u(rng)]);
    }
    std::vector<int> medoids(pool.begin(), pool.begin() + C);
    std::sort(medoids.begin(), medoids.end());

    std::vector<char> is_medoid(K, 0);
    for (int m : medoids) is_medoid[m] = 1;

    // Eager swap loop on the uncapped objective.
    if (C < K) {
        Caches caches = compute_caches(S, medoids);
        std::vector<double> base_loss = removal_losses(caches, C);
        int u_last = -1;
        long long evals = 0;
        const long long eval_cap = 100LL * K * K;  // hard termination bound
        bool done = false;
        while (!done) {
            bool swapped_this_pass = false;
            for (int cand = 0; cand < K && !done; ++cand) {
                if (is_medoid[cand]) continue;
                if (cand == u_last) {
                    done = true;  // full cycle without improvement
                    break;
                }
                if (++evals > eval_cap) {
                    done = true;
                    break;
                }
                std::vector<double> loss = base_loss;
                double gain_cand = 0.0;
                // o == cand contributes too: its own deviation vanishes
                // once it becomes a medoid (d_oc == 0).
                for (int o = 0; o < K; ++o) {
                    const double d_oc = dist(S, o, cand);
                    if (d_oc < caches.d_nearest[o]) {
                        gain_cand += d_oc - caches.d_nearest[o];
                        loss[caches.nearest[o]] += caches.d_nearest[o] - caches.d_second[o];
                    } else if (d_oc < caches.d_second[o]) {
                        loss[caches.nearest[o]] += d_oc - caches.d_second[o];
                    }
                }
                int best = 0;
                for (int c = 1; c < C; ++c)
                    if (loss[c] < loss[best]) best = c;
                const double delta = loss[best] + gain_cand;
                if (delta < 0.0) {
                    is_medoid[medoids[best]] = 0;
                    medoids[best] = cand;
                    is_medoid[cand] = 1;
                    caches = compute_caches(S, medoids);
                    base_loss = removal_losses(caches, C);
                    u_last = cand;
                    swapped_this_pass = true;
                } else if (u_last < 0) {
                    u_last = cand;  // arm the sentinel on the first evaluation
                }
            }
            if (!swapped_this_pass && u_last < 0) done = true;
            if (!swapped_this_pass) done = true;
        }
    }

    Clustering out;
    out.medoids = medoids;
    out.cap = capped ? N : 0;
    capped_assign(S, medoids, capped ? N : 0, out);
    return out;
}

}  // namespace mimo
