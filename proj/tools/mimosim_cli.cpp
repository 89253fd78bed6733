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

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    bool quiet = false;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "Master seed");
    cmd->add_option("--trials", ov.trials, "Monte-Carlo trials per grid point");
    cmd->add_option("--out-dir", ov.out_dir, "Output directory");
    cmd->add_option("--threads", ov.threads, "Worker threads (results are thread-count invariant)");
    cmd->add_flag("--quiet", ov.quiet, "Suppress per-point progress");
}

void apply(mimo::Campaign& c, const Overrides& ov) {
    if (ov.seed) c.base.seed = *ov.seed;
    if (ov.trials) c.trials = *ov.trials;
    if (ov.out_dir) c.out_dir = *ov.out_dir;
    if (ov.threads) c.engine.threads = *ov.threads;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mimosim: multicell massive MIMO uplink simulator"};
    app.require_subcommand(1);

    std::string config_path, fig_name, preset;
    Overrides ov_run, ov_fig, ov_self;

    CLI::App* run = app.add_subcommand("run", "Run the campaign described by a config file");
    run->add_option("config", config_path, "Config file path")->required();
    add_common_flags(run, ov_run);

    CLI::App* validate =
        app.add_subcommand("validate", "Check a config file and print the effective settings");
    validate->add_option("config", config_path, "Config file path")->required();

    CLI::App* figure = app.add_subcommand("figure", "Run a canonical sweep (fig2, fig3, fig4)");
    figure->add_option("name", fig_name, "Figure name")->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
    figure->add_option("--preset", preset, "Scale preset")->check(CLI::IsMember({"full", "desk"}));
    add_common_flags(figure, ov_fig);

    CLI::App* selftest =
        app.add_subcommand("selftest", "Run the brute-force-oracle property suites");
    selftest->add_option("--seed", ov_self.seed, "Suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            mimo::Campaign c = mimo::load_config(config_path);
            apply(c, ov_run);
            return mimo::run_campaign(c, std::cout, ov_run.quiet);
        }
        if (validate->parsed()) {
            const mimo::Campaign c = mimo::load_config(config_path);
            mimo::emit_config(c, std::cout);
            return 0;
        }
        if (figure->parsed()) {
            mimo::Campaign c = mimo::figure_campaign(fig_name, preset == "desk");
            apply(c, ov_fig);
            return mimo::run_campaign(c, std::cout, ov_fig.quiet);
        }
        const std::uint64_t seed = ov_self.seed.value_or(1);
        return mimo::run_selftest(std::cout, seed) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
