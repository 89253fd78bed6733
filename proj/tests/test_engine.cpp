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

#include <doctest.h>

using namespace mimo;

namespace {

// Desk-size network: small enough for repeated trials in CI.
NetworkConfig desk_config() {
    NetworkConfig cfg;
    cfg.cells = 4;
    cfg.devices_per_cell = 12;
    cfg.clusters_per_cell = 3;
    cfg.antennas = 16;
    return cfg;
}

}  // namespace

TEST_CASE("fast group statistics match the dense reference") {
    NetworkConfig cfg = desk_config();
    EngineOptions opts;
    const LayoutContext ctx = make_layout_context(cfg, opts, Mode::unclustered, 3);

    const double c = cfg.noise_over_power() / (cfg.devices_per_cell * 1.0);
    for (int victim = 0; victim < cfg.cells; ++victim) {
        std::vector<GroupMember> members;
        for (int j = 0; j < cfg.cells; ++j)
            if (ctx.significant(victim, j, victim + j))
                members.push_back({j, victim + j});
        const GroupStats fast = build_group_stats(ctx, victim, members, c, true);
        const GroupStats ref = build_group_stats_reference(ctx, victim, members, c);
        CHECK((fast.psi - ref.psi).norm() < 1e-8 * ref.psi.norm());
        CHECK((fast.err_sum - ref.err_sum).norm() < 1e-8 * (ref.err_sum.norm() + 1e-30));
        REQUIRE(fast.member_err.size() == ref.member_err.size());
        for (std::size_t t = 0; t < ref.member_err.size(); ++t)
            CHECK((fast.member_err[t] - ref.member_err[t]).norm() <
                  1e-8 * (ref.member_err[t].norm() + 1e-30));
        CHECK(fast.serving_nmse == doctest::Approx(ref.serving_nmse).epsilon(1e-8));
        CHECK(fast.serving_idx == ref.serving_idx);
    }
}

TEST_CASE("group error covariances are PSD and bounded by R") {
    NetworkConfig cfg = desk_config();
    EngineOptions opts;
    const LayoutContext ctx = make_layout_context(cfg, opts, Mode::unclustered, 4);
    std::vector<GroupMember> members;
    for (int j = 0; j < cfg.cells; ++j) members.push_back({j, 2});
    const double c = cfg.noise_over_power() / cfg.devices_per_cell;
    const GroupStats g = build_group_stats(ctx, 0, members, c, true);
    for (std::size_t t = 0; t < g.member_err.size(); ++t) {
        Eigen::SelfAdjointEigenSolver<MatC> es(g.member_err[t]);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
        const MatC R = ctx.corr.R(0, g.members[t].cell, g.members[t].device);
        Eigen::SelfAdjointEigenSolver<MatC> es2(MatC(R - g.member_err[t]));
        CHECK(es2.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("layout context is deterministic") {
    NetworkConfig cfg = desk_config();
    EngineOptions opts;
    const LayoutContext a = make_layout_context(cfg, opts, Mode::clustered, 5);
    const LayoutContext b = make_layout_context(cfg, opts, Mode::clustered, 5);
    CHECK(a.beta_floor == b.beta_floor);
    for (int l = 0; l < cfg.cells; ++l) {
        CHECK(a.clusters_capped[l].medoids == b.clusters_capped[l].medoids);
        CHECK(a.clusters_capped[l].assign == b.clusters_capped[l].assign);
    }
    CHECK(a.pilots_capped.pilot_of_flat == b.pilots_capped.pilot_of_flat);
    CHECK(a.white_floor == b.white_floor);
}

TEST_CASE("capped clustering honors the device cap") {
    NetworkConfig cfg = desk_config();
    EngineOptions opts;
    const LayoutContext ctx = make_layout_context(cfg, opts, Mode::clustered, 6);
    const int cap = (cfg.devices_per_cell + cfg.clusters_per_cell - 1) / cfg.clusters_per_cell;
    for (int l = 0; l < cfg.cells; ++l) {
        for (int s : ctx.clusters_capped[l].sizes()) CHECK(s <= cap);
        CHECK(ctx.pilots_capped.valid());
        CHECK(ctx.pilots_uncapped.valid());
        // Turn orders enumerate every device exactly once.
        std::vector<int> seen(cfg.devices_per_cell, 0);
        for (const auto& turn : ctx.turns_capped[l])
            for (int dev : turn) ++seen[dev];
        for (int k = 0; k < cfg.devices_per_cell; ++k) CHECK(seen[k] == 1);
    }
}

TEST_CASE("unclustered trials are reproducible") {
    NetworkConfig cfg = desk_config();
    EngineOptions opts;
    const LayoutContext ctx = make_layout_context(cfg, opts, Mode::unclustered, 7);
    const TrialOutput a = run_unclustered_trial(ctx, 0);
    const TrialOutput b = run_unclustered_trial(ctx, 0);
    CHECK(a.cell_se == b.cell_se);
    CHECK(a.nmse_mean == b.nmse_mean);
    const TrialOutput c = run_unclustered_trial(ctx, 1);
    CHECK(a.cell_se != c.cell_se);
    CHECK(a.cell_se > 0.0);
    CHECK(a.nmse_mean > 0.0);
    CHECK(a.nmse_mean < 1.0);
}

TEST_CASE("clustered trials are reproducible and thread invariant") {
    NetworkConfig cfg = desk_config();
    EngineOptions opts;
    const LayoutContext ctx = make_layout_context(cfg, opts, Mode::clustered, 8);
    const TrialOutput a = run_clustered_trial(ctx, 0, true);
    EngineOptions opts4 = opts;
    opts4.threads = 4;
    const LayoutContext ctx4 = make_layout_context(cfg, opts4, Mode::clustered, 8);
    const TrialOutput b = run_clustered_trial(ctx4, 0, true);
    CHECK(a.cell_se == b.cell_se);
    CHECK(a.nmse_mean == b.nmse_mean);
    REQUIRE(a.report.has_value());
    REQUIRE(b.report.has_value());
    CHECK(a.report->total_omitted() == b.report->total_omitted());
    CHECK(a.report->total_served() + a.report->total_omitted() ==
          cfg.cells * cfg.devices_per_cell);
}

TEST_CASE("incremental statistics agree with exact rebuilds") {
    NetworkConfig cfg = desk_config();
    EngineOptions fast_opts;
    EngineOptions exact_opts;
    exact_opts.exact_stats = true;
    const LayoutContext fast_ctx = make_layout_context(cfg, fast_opts, Mode::clustered, 9);
    const LayoutContext exact_ctx = make_layout_context(cfg, exact_opts, Mode::clustered, 9);
    const TrialOutput a = run_clustered_trial(fast_ctx, 0, true);
    const TrialOutput b = run_clustered_trial(exact_ctx, 0, true);
    REQUIRE(a.report.has_value());
    REQUIRE(b.report.has_value());
    // The cheap update is first-order in the dropped weak links; outcomes
    // must stay close and the discrete schedule identical.
    CHECK(a.report->total_omitted() == b.report->total_omitted());
    CHECK(a.cell_se == doctest::Approx(b.cell_se).epsilon(0.02));
}

TEST_CASE("longer period never increases omissions") {
    NetworkConfig cfg = desk_config();
    cfg.devices_per_cell = 16;
    cfg.clusters_per_cell = 2;  // overload so some devices are omitted
    EngineOptions opts;
    const LayoutContext c1 = make_layout_context(cfg, opts, Mode::clustered, 10);
    cfg.period_s = 1.5;
    const LayoutContext c2 = make_layout_context(cfg, opts, Mode::clustered, 10);
    const TrialOutput a = run_clustered_trial(c1, 0, true);
    const TrialOutput b = run_clustered_trial(c2, 0, true);
    REQUIRE(a.report.has_value());
    REQUIRE(b.report.has_value());
    CHECK(b.report->total_omitted() <= a.report->total_omitted());
}

TEST_CASE("significance floor has a small effect on the outcome") {
    NetworkConfig cfg = desk_config();
    EngineOptions loose, tight;
    tight.beta_floor_rel = 1e-4;
    const LayoutContext cl = make_layout_context(cfg, loose, Mode::unclustered, 11);
    const LayoutContext ct = make_layout_context(cfg, tight, Mode::unclustered, 11);
    const TrialOutput a = run_unclustered_trial(cl, 0);
    const TrialOutput b = run_unclustered_trial(ct, 0);
    CHECK(a.cell_se == doctest::Approx(b.cell_se).epsilon(0.05));
}
