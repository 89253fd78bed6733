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

#include <random>

namespace mimo {

// Purpose tags keep the sub-streams of one master seed independent:
// layout, shadowing, fading and measurement noise never share a stream.
enum class Stream : std::uint64_t {
    layout = 1,
    shadowing = 2,
    fading = 3,
    noise = 4,
    medoid_init = 5,
    pilot_init = 6,
    selftest = 7,
};

// SplitMix64 finalizer; used to derive well-mixed sub-seeds from
// (master, stream, indices) tuples.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t master, Stream s, std::uint64_t a = 0,
                              std::uint64_t b = 0) {
    std::uint64_t h = mix64(master ^ 0x8f1bbcdcbfa53e0bULL);
    h = mix64(h ^ static_cast<std::uint64_t>(s));
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, Stream s, std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(sub_seed(master, s, a, b));
}

/// Standard circularly-symmetric complex Gaussian, unit variance per entry.
inline cxd randcn(Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    return {n(rng), n(rng)};
}

inline VecC randcn_vec(Rng& rng, Eigen::Index n) {
    VecC v(n);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cxd(nd(rng), nd(rng));
    return v;
}

}  // namespace mimo
