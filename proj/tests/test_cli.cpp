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

// Config parsing, CSV / JSON output, and the command-line tool end to end.

#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "colltherm/config.hpp"
#include "colltherm/report_io.hpp"

using namespace colltherm;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
    return json::parse(R"({
        "scenario": "single",
        "baths": [
            {"temperature": 2.0, "frequency": 1.0, "gamma": 1.0, "therm_time": 0.5},
            {"temperature": 1.0, "frequency": 1.0, "gamma": 1.0, "therm_time": 0.5}
        ],
        "collision_angles_over_pi": [0.5, 0.3]
    })");
}

std::string config_error_field(const json &j) {
    try {
        parse_run_spec(j);
    } catch (const ConfigError &e) {
        return e.field();
    }
    return "<accepted>";
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / ("colltherm_test_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string &args) {
    const fs::path d = scratch_dir();
    const fs::path out = d / "stdout.txt";
    const fs::path err = d / "stderr.txt";
    const std::string cmd = std::string("\"") + COLLTHERM_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_temp(const std::string &name, const json &j) {
    const fs::path p = scratch_dir() / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

} // namespace

TEST_CASE("minimal config parses with defaults") {
    const RunSpec s = parse_run_spec(minimal_config());
    REQUIRE(s.series.size() == 1);
    CHECK_FALSE(s.sweep.has_value());
    const auto &c = s.series[0].config;
    CHECK(s.series[0].scenario == Scenario::Single);
    CHECK(c.ancilla_dim == 2);
    CHECK(c.ancilla_count == 1);
    CHECK(c.initial_level() == 1);
    CHECK(c.rotation_enabled);
    CHECK(c.rotation.theta == Catch::Approx(std::numbers::pi / 4));
    CHECK(c.collision_angles[1] == Catch::Approx(0.3 * std::numbers::pi));
}

TEST_CASE("config errors name the offending field") {
    SECTION("negative temperature") {
        json j = minimal_config();
        j["baths"][0]["temperature"] = -1.0;
        CHECK(config_error_field(j) == "baths[0].temperature");
    }
    SECTION("zero frequency") {
        json j = minimal_config();
        j["baths"][1]["frequency"] = 0.0;
        CHECK(config_error_field(j) == "baths[1].frequency");
    }
    SECTION("unknown top-level key") {
        json j = minimal_config();
        j["temprature"] = 1.0;
        CHECK(config_error_field(j) == "temprature");
    }
    SECTION("unknown bath key") {
        json j = minimal_config();
        j["baths"][0]["omega"] = 1.0;
        CHECK(config_error_field(j) == "baths[0].omega");
    }
    SECTION("missing scenario") {
        json j = minimal_config();
        j.erase("scenario");
        CHECK(config_error_field(j) == "scenario");
    }
    SECTION("unknown scenario") {
        json j = minimal_config();
        j["scenario"] = "entangled";
        CHECK(config_error_field(j) == "scenario");
    }
    SECTION("angle count mismatch") {
        json j = minimal_config();
        j["collision_angles_over_pi"] = {0.5};
        CHECK(config_error_field(j) == "collision_angles_over_pi");
    }
    SECTION("negative angle") {
        json j = minimal_config();
        j["collision_angles_over_pi"][1] = -0.1;
        CHECK(config_error_field(j) == "collision_angles_over_pi[1]");
    }
    SECTION("wrong type") {
        json j = minimal_config();
        j["baths"][0]["gamma"] = "fast";
        CHECK(config_error_field(j) == "baths[0].gamma");
    }
    SECTION("single scenario with several ancillas") {
        json j = minimal_config();
        j["ancilla"] = {{"count", 3}};
        CHECK_THROWS_AS(parse_run_spec(j), ConfigError);
    }
    SECTION("qutrit scenario needs three baths") {
        json j = minimal_config();
        j["scenario"] = "qutrit";
        CHECK_THROWS_AS(parse_run_spec(j), ConfigError);
    }
    SECTION("unknown sweep axis") {
        json j = minimal_config();
        j["sweep"] = {{"axis", "g_t9_over_pi"}, {"values", {0.1, 0.2}}};
        CHECK(config_error_field(j) == "sweep.axis");
    }
    SECTION("non-increasing sweep values") {
        json j = minimal_config();
        j["sweep"] = {{"axis", "g_t2_over_pi"}, {"values", {0.2, 0.1}}};
        CHECK_THROWS_AS(parse_run_spec(j), ConfigError);
    }
    SECTION("series set key unknown") {
        json j = minimal_config();
        j["series"] = json::array({{{"label", "a"}, {"set", {{"bogus", 1.0}}}}});
        CHECK(config_error_field(j) == "series[0].set.bogus");
    }
}

TEST_CASE("presets parse and match the shipped configs") {
    for (const auto &name : preset_names()) {
        INFO(name);
        const RunSpec s = preset(name);
        CHECK_FALSE(s.series.empty());
        REQUIRE(s.sweep.has_value());
        const fs::path shipped = fs::path(COLLTHERM_SOURCE_DIR) / "configs" / (name + ".json");
        REQUIRE(fs::exists(shipped));
        CHECK(read_json_file(shipped) == preset_json(name));
    }
    CHECK(preset("fig2").sweep->values.size() == 101);
    CHECK(preset("fig2").series.size() == 11);
    CHECK(preset("fig3").series.size() == 18);
    CHECK(preset("fig4").series.size() == 6);
    CHECK(preset("fig5").series.size() == 4);
    CHECK_THROWS_AS(preset_json("fig9"), ConfigError);
}

TEST_CASE("every shipped config parses") {
    for (const auto &e : fs::directory_iterator(fs::path(COLLTHERM_SOURCE_DIR) / "configs")) {
        if (e.path().extension() != ".json") continue;
        INFO(e.path().string());
        CHECK_NOTHROW(load_run_spec(e.path()));
    }
}

TEST_CASE("number formatting and CSV quoting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(-2.5e-7) == "-2.5e-07");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("rendered CSV has one row per point and one maximum per series") {
    json j = minimal_config();
    j["sweep"] = {{"axis", "g_t2_over_pi"}, {"start", 0.0}, {"stop", 0.5}, {"step", 0.1}};
    j["series"] = json::array({{{"label", "theta=pi/4, plain"}},
                               {{"label", "theta=pi/6"}, {"set", {{"theta_over_pi", 1.0 / 6.0}}}}});
    const RunResult r = execute(parse_run_spec(j), 1);
    const std::string csv = render_csv(r);
    CHECK(csv.find('\r') == std::string::npos);

    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "g_t2_over_pi,eta_acc,eta_joint,det_qfim,trace_qfim,singular,max_eta_acc,series,error");
    int rows = 0, maxima = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.find(",1,\"theta=pi/4, plain\",") != std::string::npos ||
            line.find(",1,theta=pi/6,") != std::string::npos) {
            ++maxima;
        }
    }
    CHECK(rows == 12);
    CHECK(maxima == 2);
    // g tau_2 = 0 is singular: eta_acc is -inf and flagged.
    CHECK(csv.find("\n0,-inf,") != std::string::npos);
}

TEST_CASE("failed points are reported in-row") {
    json j = minimal_config();
    j["scenario"] = "correlated";
    j["ancilla"] = {{"count", 2}};
    j["sweep"] = {{"axis", "n"}, {"values", {2, 7}}};
    const RunResult r = execute(parse_run_spec(j), 1);
    REQUIRE(r.series[0].points.size() == 2);
    CHECK(r.series[0].points[0].row.ok());
    CHECK_FALSE(r.series[0].points[1].row.ok());
    CHECK(r.failed_points() == 1);
    CHECK_FALSE(r.any_numerical_error());
    CHECK(render_csv(r).find("\n7,,,,,,0,correlated,") != std::string::npos);
}

TEST_CASE("results do not depend on the thread count") {
    const RunSpec s = preset("fig4");
    RunSpec small = s;
    small.sweep->values = {0.1, 0.2, 0.27, 0.4, 0.6};
    CHECK(render_csv(execute(small, 1)) == render_csv(execute(small, 4)));
}

TEST_CASE("summary JSON passes its schema check") {
    json j = minimal_config();
    j["sweep"] = {{"axis", "g_t2_over_pi"}, {"values", {0.0, 0.25, 0.5}}};
    const RunResult r = execute(parse_run_spec(j), 1);
    const RunManifest m{"cfg.json", "single", "out.csv", 42, utc_timestamp()};
    const json s = json::parse(summary_json(r, m).dump());
    const auto errs = validate_summary(s);
    for (const auto &e : errs) UNSCOPED_INFO(e);
    CHECK(errs.empty());
    CHECK(s["manifest"]["seed"] == 42);
    CHECK(s["axis"] == "g_t2_over_pi");
    CHECK(s["optimum"]["axis_value"] == 0.25);
    CHECK(s["optimum"].contains("qfim"));

    json broken = s;
    broken["optimum"].erase("det_qfim");
    broken["manifest"]["seed"] = "x";
    CHECK(validate_summary(broken).size() == 2);
}

TEST_CASE("atomic write replaces the file") {
    const fs::path p = scratch_dir() / "atomic.txt";
    write_atomic(p, "first\n");
    write_atomic(p, "second\n");
    CHECK(slurp(p) == "second\n");
    CHECK_FALSE(fs::exists(scratch_dir() / ".atomic.txt.tmp"));
    CHECK_THROWS(write_atomic(scratch_dir() / "no_such_dir" / "x.txt", "x"));
}

TEST_CASE("cli: run writes CSV and summary") {
    const fs::path csv = scratch_dir() / "single.csv";
    const fs::path cfg = fs::path(COLLTHERM_SOURCE_DIR) / "configs" / "single.json";
    const auto r = run_cli("run --config \"" + cfg.string() + "\" --out \"" + csv.string() + "\" --seed 3");
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(csv));
    const json summary = read_json_file(scratch_dir() / "single.json");
    CHECK(validate_summary(summary).empty());
    CHECK(summary["manifest"]["seed"] == 3);
    CHECK(summary["manifest"]["config_path"] == cfg.string());

    // Same input, different thread counts: byte-identical CSV.
    const auto a = run_cli("run --config \"" + cfg.string() + "\" --threads 1");
    const auto b = run_cli("run --config \"" + cfg.string() + "\" --threads 3");
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == slurp(csv));
}

TEST_CASE("cli: sweep flags override the config") {
    const fs::path cfg = fs::path(COLLTHERM_SOURCE_DIR) / "configs" / "single.json";
    const auto r = run_cli("sweep --config \"" + cfg.string() + "\" --axis theta_over_pi --values 0.1,0.2,0.3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("theta_over_pi,", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);

    const auto missing = run_cli("sweep --config \"" + write_temp("nosweep.json", minimal_config()).string() + "\"");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("cli: configuration errors exit with code 2") {
    json bad = minimal_config();
    bad["baths"][0]["temperature"] = -1.0;
    const auto r = run_cli("run --config \"" + write_temp("bad.json", bad).string() + "\"");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("baths[0].temperature") != std::string::npos);

    const fs::path malformed = scratch_dir() / "malformed.json";
    std::ofstream(malformed) << "{ \"scenario\": ";
    CHECK(run_cli("run --config \"" + malformed.string() + "\"").exit_code == 2);

    CHECK(run_cli("run --scenario fig9").exit_code == 2);
    CHECK(run_cli("run --scenario fig2 --bogus-flag").exit_code == 2);
    CHECK(run_cli("run").exit_code == 2);
    CHECK(run_cli("verify --group nope").exit_code == 2);
}

TEST_CASE("cli: verify groups pass and are reproducible") {
    const auto a = run_cli("verify --group theorem1 --trials 500 --seed 7");
    CHECK(a.exit_code == 0);
    CHECK(a.out.find("PASS theorem1") != std::string::npos);
    const auto b = run_cli("verify --group theorem1 --trials 500 --seed 7");
    CHECK(a.out == b.out);

    const auto all = run_cli("verify");
    CHECK(all.exit_code == 0);
    for (const char *g : {"appendix", "theorem1", "channels", "estimation", "protocols"}) {
        CHECK(all.out.find(std::string("PASS ") + g) != std::string::npos);
    }
}
