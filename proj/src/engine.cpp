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

#include "mimosim/engine.hpp"

#include "mimosim/rng.hpp"

#include <algorithm>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mimo {

namespace {

// Frobenius inner product of two Toeplitz matrices from their generator
// coefficients: diagonal d carries weight M - |d|.
double toeplitz_inner(const std::vector<cxd>& a, const std::vector<cxd>& b, int M) {
    double s = 0.0;
    for (int d = -(M - 1); d <= M - 1; ++d) {
        const int w = M - std::abs(d);
        s += w * (a[d + M - 1] * std::conj(b[d + M - 1])).real();
    }
    return s;
}

std::vector<std::vector<std::vector<int>>> make_turn_orders(const CorrelationSet& corr,
                                                            const std::vector<Clustering>& cls,
                                                            bool fifo) {
    const int L = corr.cells();
    std::vector<std::vector<std::vector<int>>> turns(L);
    for (int l = 0; l < L; ++l) {
        turns[l] = cls[l].members();
        if (!fifo) {
            for (auto& cluster : turns[l])
                std::stable_sort(cluster.begin(), cluster.end(), [&](int a, int b) {
                    return corr.beta(l, l, a) > corr.beta(l, l, b);
                });
        }
    }
    return turns;
}

}  // namespace

MatD serving_similarity_matrix(const CorrelationSet& corr, int cell) {
    const int K = corr.devices_per_cell();
    const int M = corr.antennas();
    std::vector<std::vector<cxd>> coeffs(K);
    std::vector<double> norms(K);
    for (int k = 0; k < K; ++k) {
        coeffs[k] = spatial_correlation_coeffs(corr.angle(cell, cell, k), corr.asd_deg(), M,
                                               corr.beta(cell, cell, k));
        norms[k] = std::sqrt(toeplitz_inner(coeffs[k], coeffs[k], M));
    }
    MatD S(K, K);
    for (int a = 0; a < K; ++a) {
        S(a, a) = 1.0;
        for (int b = a + 1; b < K; ++b) {
            const double v = toeplitz_inner(coeffs[a], coeffs[b], M) / (norms[a] * norms[b]);
            S(a, b) = v;
            S(b, a) = v;
        }
    }
    return S;
}

GroupStats build_group_stats(const LayoutContext& ctx, int victim,
                             const std::vector<GroupMember>& members, double c,
                             bool want_member_err) {
    const int M = ctx.cfg.antennas;
    GroupStats g;
    g.members = members;
    g.c = c;
    g.psi = c * MatC::Identity(M, M);
    Eigen::Index rt = 0;
    for (std::size_t t = 0; t < members.size(); ++t) {
        const auto& m = members[t];
        g.psi += ctx.corr.R(victim, m.cell, m.device);
        if (m.cell == victim) g.serving_idx = static_cast<int>(t);
        rt += ctx.factor(victim, m.cell, m.device).cols();
    }
    g.psi_llt.compute(g.psi);
    if (g.psi_llt.info() != Eigen::Success)
        throw NumericError("build_group_stats: psi factorization failed");

    double serving_err_trace = 0.0;
    if (rt > 0) {
        MatC G(M, rt), Cst(M, rt);
        Eigen::Index off = 0;
        for (const auto& m : members) {
            const MatC& F = ctx.factor(victim, m.cell, m.device);
            G.middleCols(off, F.cols()) = F;
            off += F.cols();
        }
        const MatC W = g.psi_llt.solve(G);
        if (want_member_err) g.member_err.reserve(members.size());
        off = 0;
        for (std::size_t t = 0; t < members.size(); ++t) {
            const MatC& F = ctx.factor(victim, members[t].cell, members[t].device);
            const MatC B = F.adjoint() * W.middleCols(off, F.cols());
            Cst.middleCols(off, F.cols()).noalias() = F * B;
            if (static_cast<int>(t) == g.serving_idx)
                serving_err_trace =
                    (Cst.middleCols(off, F.cols()).cwiseProduct(F.conjugate())).sum().real();
            if (want_member_err) {
                MatC err = F * ((MatC::Identity(B.rows(), B.cols()) - B) * F.adjoint());
                g.member_err.push_back((0.5 * (err + err.adjoint())).eval());
            }
            off += F.cols();
        }
        MatC T(M, M);
        T.noalias() = Cst * G.adjoint();
        g.err_sum = g.psi - c * MatC::Identity(M, M) - T;
        g.err_sum = (0.5 * (g.err_sum + g.err_sum.adjoint())).eval();
    } else {
        g.err_sum = MatC::Zero(M, M);
    }
    if (g.serving_idx >= 0) {
        const auto& m = members[g.serving_idx];
        const double trR = M * ctx.corr.beta(victim, m.cell, m.device);
        g.serving_nmse = 1.0 - serving_err_trace / trR;
    }
    return g;
}

GroupStats build_group_stats_reference(const LayoutContext& ctx, int victim,
                                       const std::vector<GroupMember>& members, double c) {
    const int M = ctx.cfg.antennas;
    GroupStats g;
    g.members = members;
    g.c = c;
    std::vector<MatC> Rs;
    Rs.reserve(members.size());
    for (std::size_t t = 0; t < members.size(); ++t) {
        Rs.push_back(ctx.corr.R(victim, members[t].cell, members[t].device));
        if (members[t].cell == victim) g.serving_idx = static_cast<int>(t);
    }
    g.psi = c * MatC::Identity(M, M);
    for (const MatC& R : Rs) g.psi += R;
    g.psi_llt.compute(g.psi);
    if (g.psi_llt.info() != Eigen::Success)
        throw NumericError("build_group_stats_reference: psi factorization failed");
    g.err_sum = MatC::Zero(M, M);
    g.member_err.reserve(Rs.size());
    for (std::size_t t = 0; t < Rs.size(); ++t) {
        const MatC err = Rs[t] - Rs[t] * g.psi_llt.solve(Rs[t]);
        g.err_sum += err;
        g.member_err.push_back(err);
        if (static_cast<int>(t) == g.serving_idx)
            g.serving_nmse = err.trace().real() / Rs[t].trace().real();
    }
    return g;
}

LayoutContext make_layout_context(const NetworkConfig& cfg, const EngineOptions& opts, Mode mode,
                                  std::uint64_t layout_seed) {
    cfg.validate();
    LayoutContext ctx;
    ctx.cfg = cfg;
    ctx.opts = opts;
    ctx.mode = mode;
    ctx.layout_seed = layout_seed;
    const int L = cfg.cells;
    const int K = cfg.devices_per_cell;
    const int C = cfg.clusters_per_cell;
    const int tau_p = mode == Mode::clustered ? C : K;
    if (mode == Mode::unclustered && K >= cfg.tau_c)
        throw ConfigError("unclustered mode requires K < tau_c (no data samples left)");
    const double c_noise = cfg.noise_over_power() / tau_p;
    ctx.beta_floor = opts.beta_floor_rel * cfg.noise_over_power();

    ctx.placement = build_layout(cfg, layout_seed);
    ctx.corr = build_correlation_set(cfg, ctx.placement, layout_seed);

    // Dropped links still interfere in the data phase; the full per-victim
    // power sum is stored here and the consumers scale it to the devices
    // actually transmitting (all of them in unclustered mode, the live
    // active set per block in clustered mode).
    ctx.white_floor.assign(L, 0.0);
    for (int i = 0; i < L; ++i) {
        double s = 0.0;
        for (int j = 0; j < L; ++j)
            for (int k = 0; k < K; ++k)
                if (!ctx.significant(i, j, k)) s += ctx.corr.beta(i, j, k);
        ctx.white_floor[i] = s;
    }

    // Square-root factors for every link that stays in the statistics.
    ctx.factors.resize(static_cast<std::size_t>(L) * L * K);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long idx = 0; idx < static_cast<long long>(L) * L * K; ++idx) {
        const int i = static_cast<int>(idx / (static_cast<long long>(L) * K));
        const int j = static_cast<int>((idx / K) % L);
        const int k = static_cast<int>(idx % K);
        if (ctx.corr.beta(i, j, k) >= ctx.beta_floor || i == j)
            ctx.factors[idx] = hermitian_sqrt_factor(ctx.corr.R(i, j, k), opts.factor_clamp_rel);
    }

    if (mode == Mode::clustered) {
        const int cap = (K + C - 1) / C;
        ctx.clusters_capped.resize(L);
        ctx.clusters_uncapped.resize(L);
#pragma omp parallel for schedule(dynamic)
        for (int l = 0; l < L; ++l) {
            const MatD S = serving_similarity_matrix(ctx.corr, l);
            const std::uint64_t s = sub_seed(layout_seed, Stream::medoid_init, l);
            ctx.clusters_capped[l] = cluster(S, C, cap, true, s);
            ctx.clusters_uncapped[l] = cluster(S, C, cap, false, s);
        }
        const auto neigh = grid_neighbors(ctx.placement);
        const auto w_capped = build_interference_weights(ctx.corr, ctx.clusters_capped);
        const auto w_uncapped = build_interference_weights(ctx.corr, ctx.clusters_uncapped);
        ctx.pilots_capped = assign_pilots(w_capped, L, C, neigh, layout_seed);
        ctx.pilots_uncapped = assign_pilots(w_uncapped, L, C, neigh, layout_seed);
        ctx.turns_capped = make_turn_orders(ctx.corr, ctx.clusters_capped, opts.fifo_turn_order);
        ctx.turns_uncapped =
            make_turn_orders(ctx.corr, ctx.clusters_uncapped, opts.fifo_turn_order);
    } else {
        // Static pilot groups: device k of every cell shares pilot k.
        ctx.static_groups.resize(static_cast<std::size_t>(L) * K);
#pragma omp parallel for schedule(dynamic, 8) collapse(2)
        for (int i = 0; i < L; ++i)
            for (int k = 0; k < K; ++k) {
                std::vector<GroupMember> members;
                for (int j = 0; j < L; ++j)
                    if (ctx.significant(i, j, k)) members.push_back({j, k});
                ctx.static_groups[static_cast<std::size_t>(i) * K + k] =
                    build_group_stats(ctx, i, members, c_noise);
            }
        ctx.static_Z.resize(L);
        const int M = cfg.antennas;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < L; ++i) {
            MatC Z = (cfg.noise_over_power() + ctx.white_floor[i]) * MatC::Identity(M, M);
            for (int k = 0; k < K; ++k) Z += ctx.static_groups[static_cast<std::size_t>(i) * K + k].err_sum;
            ctx.static_Z[i] = std::move(Z);
        }
    }
    return ctx;
}

namespace {

// Fading + noise + estimation for one pilot group in one coherence block.
struct GroupBlock {
    std::vector<VecC> h_hat;  // one per member
};

GroupBlock estimate_group(const LayoutContext& ctx, int victim, const GroupStats& g, Rng& rng) {
    const int M = ctx.cfg.antennas;
    GroupBlock out;
    VecC y = std::sqrt(g.c) * randcn_vec(rng, M);
    for (const auto& m : g.members) {
        const MatC& F = ctx.factor(victim, m.cell, m.device);
        y.noalias() += F * randcn_vec(rng, F.cols());
    }
    const VecC z = g.psi_llt.solve(y);
    out.h_hat.reserve(g.members.size());
    for (const auto& m : g.members) {
        const MatC& F = ctx.factor(victim, m.cell, m.device);
        out.h_hat.push_back(F * (F.adjoint() * z));
    }
    return out;
}

}  // namespace

TrialOutput run_unclustered_trial(const LayoutContext& ctx, std::uint64_t trial_index) {
    const int L = ctx.cfg.cells;
    const int K = ctx.cfg.devices_per_cell;
    const int M = ctx.cfg.antennas;
    Rng rng = make_rng(ctx.layout_seed, Stream::fading, trial_index);

    double se_sum = 0.0;
    double nmse_sum = 0.0;
    for (int i = 0; i < L; ++i) {
        // Estimates of every device in every cell, one column per link.
        std::vector<GroupBlock> blocks(K);
        int cols = 0;
        for (int k = 0; k < K; ++k) {
            const GroupStats& g = ctx.static_groups[static_cast<std::size_t>(i) * K + k];
            blocks[k] = estimate_group(ctx, i, g, rng);
            cols += static_cast<int>(blocks[k].h_hat.size());
            nmse_sum += g.serving_nmse;
        }
        MatC Hall(M, cols);
        MatC Hserv(M, K);
        std::vector<int> serv_col(K, -1);
        std::vector<int> col_group(cols), col_cell(cols);
        int c0 = 0;
        for (int k = 0; k < K; ++k) {
            const GroupStats& g = ctx.static_groups[static_cast<std::size_t>(i) * K + k];
            for (std::size_t t = 0; t < blocks[k].h_hat.size(); ++t) {
                Hall.col(c0) = blocks[k].h_hat[t];
                col_group[c0] = k;
                col_cell[c0] = g.members[t].cell;
                if (static_cast<int>(t) == g.serving_idx) {
                    Hserv.col(k) = blocks[k].h_hat[t];
                    serv_col[k] = c0;
                }
                ++c0;
            }
        }
        const MatC& Z = ctx.static_Z[i];
        MatC A = Z;
        A.noalias() += Hall * Hall.adjoint();
        Eigen::LLT<MatC> llt(A);
        if (llt.info() != Eigen::Success)
            throw NumericError("run_unclustered_trial: combiner system singular");
        const MatC W = llt.solve(Hserv);
        const MatC G = W.adjoint() * Hall;       // K x cols
        const MatC ZW = Z.selfadjointView<Eigen::Lower>() * W;
        for (int k = 0; k < K; ++k) {
            const double num = std::norm(G(k, serv_col[k]));
            const double floor = W.col(k).dot(ZW.col(k)).real();
            // Interference: the victim cell's own devices plus the
            // pilot-sharing devices of other cells.
            double interf = 0.0;
            for (int col = 0; col < cols; ++col)
                if (col != serv_col[k] && (col_cell[col] == i || col_group[col] == k))
                    interf += std::norm(G(k, col));
            const double gamma = num / (interf + floor);
            se_sum += spectral_efficiency(gamma, K, ctx.cfg.tau_c).se;
        }
    }
    TrialOutput out;
    out.cell_se = se_sum / L;
    out.nmse_mean = nmse_sum / (static_cast<double>(L) * K);
    return out;
}

namespace {

class ClusteredTrial {
public:
    ClusteredTrial(const LayoutContext& ctx, std::uint64_t trial, bool capped)
        : ctx_(ctx), trial_(trial),
          part_(capped ? ctx.pilots_capped : ctx.pilots_uncapped),
          L_(ctx.cfg.cells), C_(ctx.cfg.clusters_per_cell), M_(ctx.cfg.antennas),
          c_noise_(ctx.cfg.noise_over_power() / C_),
          groups_(static_cast<std::size_t>(L_) * C_),
          Z_(L_), cur_active_(L_, std::vector<int>(C_, -2)),
          cluster_of_(L_, std::vector<int>(C_, -1)) {
        for (int l = 0; l < L_; ++l)
            for (int c = 0; c < C_; ++c) cluster_of_[l][part_.pilot_of(l, c)] = c;
        for (int i = 0; i < L_; ++i)
            Z_[i] = ctx.cfg.noise_over_power() * MatC::Identity(M_, M_);
    }

    MatD block(int b, const std::vector<std::vector<int>>& active) {
        refresh_stats(active);
        Rng rng = make_rng(ctx_.layout_seed, Stream::fading, trial_, static_cast<std::uint64_t>(b));

        MatD se = MatD::Zero(L_, C_);
        for (int i = 0; i < L_; ++i) {
            // Exact white-noise load of the dropped links that transmit in
            // this block.
            double wf = 0.0;
            for (int j = 0; j < L_; ++j)
                for (int c = 0; c < C_; ++c) {
                    const int dev = cur_active_[j][c];
                    if (dev >= 0 && !ctx_.significant(i, j, dev))
                        wf += ctx_.corr.beta(i, j, dev);
                }
            int cols = 0;
            std::vector<GroupBlock> gb(C_);
            for (int p = 0; p < C_; ++p) {
                const GroupStats& g = group(i, p);
                gb[p] = estimate_group(ctx_, i, g, rng);
                cols += static_cast<int>(gb[p].h_hat.size());
                if (g.serving_idx >= 0) {
                    nmse_acc_ += g.serving_nmse;
                    ++nmse_cnt_;
                }
            }
            if (cols == 0) continue;
            MatC Hall(M_, cols);
            std::vector<int> serv_col(C_, -1);
            std::vector<int> serv_pilots;
            std::vector<int> col_group(cols), col_cell(cols);
            int c0 = 0;
            for (int p = 0; p < C_; ++p) {
                const GroupStats& g = group(i, p);
                for (std::size_t t = 0; t < gb[p].h_hat.size(); ++t) {
                    Hall.col(c0) = gb[p].h_hat[t];
                    col_group[c0] = p;
                    col_cell[c0] = g.members[t].cell;
                    if (static_cast<int>(t) == g.serving_idx) {
                        serv_col[p] = c0;
                        serv_pilots.push_back(p);
                    }
                    ++c0;
                }
            }
            if (serv_pilots.empty()) continue;
            MatC Hserv(M_, serv_pilots.size());
            for (std::size_t s = 0; s < serv_pilots.size(); ++s)
                Hserv.col(s) = Hall.col(serv_col[serv_pilots[s]]);
            MatC A = Z_[i];
            A.diagonal().array() += wf;
            A.noalias() += Hall * Hall.adjoint();
            Eigen::LLT<MatC> llt(A);
            if (llt.info() != Eigen::Success) {
                throw NumericError("clustered trial: combiner system singular");
            }
            const MatC W = llt.solve(Hserv);
            const MatC G = W.adjoint() * Hall;
            MatC ZW = Z_[i].selfadjointView<Eigen::Lower>() * W;
            ZW.noalias() += wf * W;
            for (std::size_t s = 0; s < serv_pilots.size(); ++s) {
                const int p = serv_pilots[s];
                const Eigen::Index row = static_cast<Eigen::Index>(s);
                const double num = std::norm(G(row, serv_col[p]));
                const double floor = W.col(row).dot(ZW.col(row)).real();
                // Interference: the victim cell's other active devices plus
                // the pilot-sharing devices of other cells.
                double interf = 0.0;
                for (int col = 0; col < cols; ++col)
                    if (col != serv_col[p] && (col_cell[col] == i || col_group[col] == p))
                        interf += std::norm(G(row, col));
                const double gamma = num / (interf + floor);
                se(i, cluster_of_[i][p]) = spectral_efficiency(gamma, C_, ctx_.cfg.tau_c).se;
            }
        }
        return se;
    }

    double nmse_mean() const { return nmse_cnt_ ? nmse_acc_ / nmse_cnt_ : 0.0; }

private:
    GroupStats& group(int victim, int pilot) {
        return groups_[static_cast<std::size_t>(victim) * C_ + pilot];
    }

    void full_rebuild(int victim, int p, const std::vector<std::vector<int>>& active) {
        std::vector<GroupMember> members;
        for (int j = 0; j < L_; ++j) {
            const int dev = active[j][cluster_of_[j][p]];
            if (dev >= 0 && ctx_.significant(victim, j, dev)) members.push_back({j, dev});
        }
        GroupStats& g = group(victim, p);
        if (g.err_sum.size() > 0) Z_[victim] -= g.err_sum;
        g = build_group_stats(ctx_, victim, members, c_noise_, true);
        Z_[victim] += g.err_sum;
    }

    // Cross-cell view of a schedule advancement in cell `cell`: swap the
    // weak member in place. psi stays exact (refactored). A departing
    // member takes back exactly the error term it contributed, and the
    // newcomer's error is computed against the refreshed psi, so err_sum
    // remains a sum of PSD terms and the combiner floor stays PSD. Other
    // members' stored terms go stale until the group's next full rebuild.
    void lazy_update(int victim, int p, int cell, int dev_old, int dev_new) {
        GroupStats& g = group(victim, p);
        if (dev_old >= 0) {
            g.psi -= ctx_.corr.R(victim, cell, dev_old);
            for (std::size_t t = 0; t < g.members.size(); ++t)
                if (g.members[t].cell == cell && g.members[t].device == dev_old) {
                    g.err_sum -= g.member_err[t];
                    Z_[victim] -= g.member_err[t];
                    g.members.erase(g.members.begin() + static_cast<std::ptrdiff_t>(t));
                    g.member_err.erase(g.member_err.begin() + static_cast<std::ptrdiff_t>(t));
                    break;
                }
        }
        MatC Rnew;
        if (dev_new >= 0) {
            Rnew = ctx_.corr.R(victim, cell, dev_new);
            g.psi += Rnew;
        }
        g.psi_llt.compute(g.psi);
        if (g.psi_llt.info() != Eigen::Success)
            throw NumericError("clustered trial: psi refactorization failed");
        if (dev_new >= 0) {
            MatC err = Rnew - Rnew * g.psi_llt.solve(Rnew);
            err = (0.5 * (err + err.adjoint())).eval();
            g.err_sum += err;
            Z_[victim] += err;
            g.members.push_back({cell, dev_new});
            g.member_err.push_back(std::move(err));
        }
        g.serving_idx = -1;
        for (std::size_t t = 0; t < g.members.size(); ++t)
            if (g.members[t].cell == victim) g.serving_idx = static_cast<int>(t);
    }

    // Apply the schedule advancements since the previous block. The
    // advancing cell's own group is rebuilt exactly; other victims see a
    // weak cross link swapped and get the cheap update unless exact
    // statistics were requested.
    void refresh_stats(const std::vector<std::vector<int>>& active) {
        if (!init_) {
            for (int i = 0; i < L_; ++i)
                for (int p = 0; p < C_; ++p) full_rebuild(i, p, active);
            for (int l = 0; l < L_; ++l) cur_active_[l] = active[l];
            init_ = true;
            return;
        }
        std::vector<char> full(static_cast<std::size_t>(L_) * C_, 0);
        struct Change {
            int cell, pilot, dev_old, dev_new;
        };
        std::vector<Change> changes;
        // A swapped link qualifies for the cheap update only while it is
        // weak next to the despread noise; err = R then holds to first
        // order. Stronger links (border devices) get the exact rebuild.
        const double t_lazy = c_noise_;
        for (int l = 0; l < L_; ++l)
            for (int c = 0; c < C_; ++c)
                if (active[l][c] != cur_active_[l][c]) {
                    const int p = part_.pilot_of(l, c);
                    changes.push_back({l, p, cur_active_[l][c], active[l][c]});
                    for (int i = 0; i < L_; ++i) {
                        if (i == l || ctx_.opts.exact_stats) {
                            full[static_cast<std::size_t>(i) * C_ + p] = 1;
                            continue;
                        }
                        const int d_old = changes.back().dev_old;
                        const int d_new = changes.back().dev_new;
                        const bool strong =
                            (d_old >= 0 && ctx_.significant(i, l, d_old) &&
                             ctx_.corr.beta(i, l, d_old) > t_lazy) ||
                            (d_new >= 0 && ctx_.significant(i, l, d_new) &&
                             ctx_.corr.beta(i, l, d_new) > t_lazy);
                        if (strong) full[static_cast<std::size_t>(i) * C_ + p] = 1;
                    }
                }
        for (int l = 0; l < L_; ++l) cur_active_[l] = active[l];
        for (const auto& ch : changes)
            for (int i = 0; i < L_; ++i) {
                if (full[static_cast<std::size_t>(i) * C_ + ch.pilot]) continue;
                const bool old_sig = ch.dev_old >= 0 && ctx_.significant(i, ch.cell, ch.dev_old);
                const bool new_sig = ch.dev_new >= 0 && ctx_.significant(i, ch.cell, ch.dev_new);
                if (old_sig || new_sig)
                    lazy_update(i, ch.pilot, ch.cell, old_sig ? ch.dev_old : -1,
                                new_sig ? ch.dev_new : -1);
            }
        for (int i = 0; i < L_; ++i)
            for (int p = 0; p < C_; ++p)
                if (full[static_cast<std::size_t>(i) * C_ + p]) full_rebuild(i, p, active);
    }

    const LayoutContext& ctx_;
    std::uint64_t trial_;
    const PilotPartition& part_;
    int L_, C_, M_;
    double c_noise_;
    std::vector<GroupStats> groups_;
    std::vector<MatC> Z_;
    std::vector<std::vector<int>> cur_active_;
    std::vector<std::vector<int>> cluster_of_;
    bool init_ = false;
    double nmse_acc_ = 0.0;
    long nmse_cnt_ = 0;
};

}  // namespace

TrialOutput run_clustered_trial(const LayoutContext& ctx, std::uint64_t trial_index, bool capped) {
    if (ctx.mode != Mode::clustered)
        throw ConfigError("run_clustered_trial: layout context built for a different mode");
    ClusteredTrial trial(ctx, trial_index, capped);
    TrafficModel traffic{ctx.cfg.payload_bits(), ctx.cfg.period_s, ctx.cfg.bandwidth_hz};
    const auto& turns = capped ? ctx.turns_capped : ctx.turns_uncapped;
    ScheduleReport rep = run_period(
        turns, traffic, ctx.cfg.tau_c,
        [&trial](int b, const std::vector<std::vector<int>>& act) { return trial.block(b, act); });
    TrialOutput out;
    out.cell_se = rep.cell_se_mean;
    out.nmse_mean = trial.nmse_mean();
    out.report = std::move(rep);
    return out;
}

}  // namespace mimo
