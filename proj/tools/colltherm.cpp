// Copyright 2026 The colltherm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// colltherm: command-line front end.
//
//   colltherm run    --scenario fig2 --out fig2.csv
//   colltherm run    --config configs/single.json --out single.csv
//   colltherm sweep  --config configs/single.json --axis g_t2_over_pi --start 0 --stop 1 --step 0.05
//   colltherm verify --group theorem1 --trials 500 --seed 7
//
// Exit codes: 0 success, 1 verify failure, 2 configuration or usage error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "colltherm/config.hpp"
#include "colltherm/report_io.hpp"
#include "colltherm/testing/verify.hpp"

namespace {

using namespace colltherm;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunArgs {
    std::string scenario;
    std::string config;
    std::string out;
    std::string summary;
    unsigned long long seed = 0;
    unsigned threads = 0;
    // sweep overrides
    std::string axis;
    std::optional<double> start, stop, step;
    std::vector<double> values;
};

/// Loads the run from --config and/or --scenario. A preset name selects the
/// preset; a scenario name overrides the config's scenario.
RunSpec resolve(const RunArgs &a, std::string &manifest_scenario) {
    json j;
    std::string name;
    if (!a.config.empty()) {
        j = read_json_file(a.config);
        name = fs::path(a.config).stem().string();
        if (!a.scenario.empty()) {
            if (is_preset(a.scenario)) {
                throw ConfigError("--scenario", "a preset cannot be combined with --config");
            }
            if (j.is_object()) {
                j["scenario"] = a.scenario;
            }
        }
    } else if (!a.scenario.empty()) {
        if (!is_preset(a.scenario)) {
            throw ConfigError("--scenario", "'" + a.scenario + "' is not a preset (fig2, fig3, fig4, fig5); "
                                            "scenario names need --config");
        }
        j = preset_json(a.scenario);
        name = a.scenario;
    } else {
        throw ConfigError("--config", "give --config FILE or --scenario PRESET");
    }

    if (!a.axis.empty()) {
        if (!j.is_object()) {
            throw ConfigError("", "expected an object");
        }
        json s = {{"axis", a.axis}};
        if (!a.values.empty()) {
            s["values"] = a.values;
        } else {
            if (!a.start || !a.stop || !a.step) {
                throw ConfigError("--axis", "needs --values or all of --start, --stop, --step");
            }
            s["start"] = *a.start;
            s["stop"] = *a.stop;
            s["step"] = *a.step;
        }
        j["sweep"] = s;
    } else if (a.start || a.stop || a.step || !a.values.empty()) {
        throw ConfigError("--axis", "sweep ranges need --axis");
    }

    RunSpec spec = parse_run_spec(j, name);
    manifest_scenario = is_preset(name) && a.config.empty() ? name : j.value("scenario", std::string());
    return spec;
}

fs::path summary_path(const RunArgs &a) {
    if (!a.summary.empty()) return a.summary;
    fs::path p(a.out);
    p.replace_extension(".json");
    return p;
}

int cmd_run(const RunArgs &a, bool require_sweep) {
    try {
        std::string manifest_scenario;
        const RunSpec spec = resolve(a, manifest_scenario);
        if (require_sweep && !spec.sweep) {
            throw ConfigError("--axis", "sweep needs an axis from the config or the command line");
        }
        const unsigned threads = a.threads > 0 ? a.threads : default_thread_count();
        const RunResult result = execute(spec, threads);
        const std::string csv = render_csv(result);

        if (a.out.empty()) {
            std::cout << csv;
        } else {
            write_atomic(a.out, csv);
            const RunManifest m{a.config, manifest_scenario, a.out, a.seed, utc_timestamp()};
            write_atomic(summary_path(a), summary_json(result, m).dump(2) + "\n");
            std::size_t rows = 0;
            for (const auto &s : result.series) rows += s.points.size();
            std::cerr << "wrote " << rows << " rows to " << a.out << " and summary to " << summary_path(a).string()
                      << "\n";
        }

        for (const auto &s : result.series) {
            for (const auto &p : s.points) {
                if (!p.row.ok()) {
                    std::cerr << "point " << result.axis << "=" << format_number(p.row.axis_value) << " of series '"
                              << s.label << "' failed: " << p.row.error << "\n";
                }
            }
        }
        if (result.any_numerical_error()) return kExitNumerical;
        if (result.failed_points() > 0) return kExitConfig;
        return kExitOk;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_verify(const std::vector<std::string> &groups, int trials, unsigned long long seed) {
    const std::vector<std::string> &run = groups.empty() ? verify::group_names() : groups;
    const verify::Options opts{trials, seed};
    const verify::CheckResult *first = nullptr;
    std::vector<verify::GroupResult> results;
    results.reserve(run.size());
    for (const auto &name : run) {
        results.push_back(verify::run_group(name, opts));
        const auto &g = results.back();
        for (const auto &c : g.checks) {
            std::printf("  %s %-70s residual %.3e (tol %.1e)\n", c.passed() ? "ok  " : "FAIL", c.name.c_str(),
                        c.residual, c.tolerance);
        }
        std::printf("%s %s\n", g.passed() ? "PASS" : "FAIL", g.group.c_str());
        if (!first) first = g.first_failure();
    }
    if (first) {
        std::fprintf(stderr, "first failing oracle: %s, residual %.6e > %.1e\n", first->name.c_str(),
                     first->residual, first->tolerance);
        return kExitVerifyFailed;
    }
    return kExitOk;
}

void add_run_options(CLI::App *cmd, RunArgs &a) {
    cmd->add_option("--scenario", a.scenario,
                    "preset (fig2, fig3, fig4, fig5) or, with --config, a scenario override "
                    "(single, uncorrelated, correlated, qutrit)");
    cmd->add_option("--config", a.config, "JSON run description")->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out, "CSV output path (default: stdout, no summary)");
    cmd->add_option("--summary", a.summary, "JSON summary path (default: --out with .json)");
    cmd->add_option("--seed", a.seed, "seed recorded in the manifest");
    cmd->add_option("--threads", a.threads,
                    std::string("worker threads (default: $") + kThreadsEnvVar + " or hardware concurrency)");
    cmd->add_option("--axis", a.axis,
                    "sweep axis: g_tK_over_pi, TK, theta_over_pi, gamma_t, n, ancilla_dim");
    cmd->add_option("--start", a.start, "sweep start");
    cmd->add_option("--stop", a.stop, "sweep stop (inclusive)");
    cmd->add_option("--step", a.step, "sweep step");
    cmd->add_option("--values", a.values, "explicit sweep values")->delimiter(',');
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Joint temperature estimation with collisional ancilla streams"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto *run = app.add_subcommand("run", "evaluate a preset or config and write CSV + JSON summary");
    add_run_options(run, run_args);

    RunArgs sweep_args;
    auto *sweep = app.add_subcommand("sweep", "like run, but requires a sweep axis (from config or flags)");
    add_run_options(sweep, sweep_args);

    std::vector<std::string> groups;
    int trials = 500;
    unsigned long long seed = 7;
    auto *ver = app.add_subcommand("verify", "run the oracle suite");
    ver->add_option("--group", groups, "oracle group(s)")->check(CLI::IsMember(verify::group_names()));
    ver->add_option("--trials", trials, "randomized trials for the theorem1 group")->check(CLI::PositiveNumber);
    ver->add_option("--seed", seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    if (run->parsed()) return cmd_run(run_args, false);
    if (sweep->parsed()) return cmd_run(sweep_args, true);
    return cmd_verify(groups, trials, seed);
}
