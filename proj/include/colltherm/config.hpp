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

/**
 * @file config.hpp
 * JSON run descriptions and the built-in figure presets.
 *
 * A run is a list of series sharing one optional sweep axis. Schema (all
 * angles in units of pi, temperatures in units of hbar omega / k_B):
 *
 *   scenario                  "single" | "uncorrelated" | "correlated" | "qutrit"
 *   baths[]                   { temperature, frequency = 1, gamma = 1, therm_time = 0 }
 *   collision_angles_over_pi  one g tau / pi per bath
 *   ancilla                   { dim = 2, count = 1, init = last level }
 *   rotation                  { enabled = true, theta_over_pi = 0.25, axis = "x", after_last = false }
 *   correlated                bool, optional; true requires scenario "correlated"
 *   sweep                     { axis, start, stop, step } or { axis, values[] }
 *   series[]                  { label, scenario?, set: { <axis>: value, ... } }
 *   description               free text, ignored
 *
 * Unknown keys are rejected. Every error names the offending field.
 */
#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "colltherm/protocols.hpp"
#include "colltherm/sweep.hpp"

namespace colltherm {

using json = nlohmann::json;

/// Invalid configuration; field() is a path such as "baths[0].temperature".
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string &message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

struct SeriesSpec {
    std::string label;
    Scenario scenario = Scenario::Single;
    ProtocolConfig config;
};

struct SweepSpec {
    std::string axis;
    std::vector<double> values;
};

struct RunSpec {
    std::string name;
    std::vector<SeriesSpec> series;
    std::optional<SweepSpec> sweep;
};

namespace detail {

inline std::string join_path(const std::string &path, const std::string &key) {
    return path.empty() ? key : path + "." + key;
}

inline void check_object(const json &j, const std::string &path) {
    if (!j.is_object()) {
        throw ConfigError(path, "expected an object");
    }
}

inline void check_keys(const json &j, const std::string &path, std::initializer_list<const char *> allowed) {
    for (const auto &item : j.items()) {
        bool ok = false;
        for (const char *a : allowed) {
            ok = ok || item.key() == a;
        }
        if (!ok) {
            throw ConfigError(join_path(path, item.key()), "unknown field");
        }
    }
}

inline double number(const json &j, const std::string &path) {
    if (!j.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ConfigError(path, "must be finite");
    }
    return v;
}

inline double number_or(const json &obj, const char *key, const std::string &path, double fallback) {
    return obj.contains(key) ? number(obj.at(key), join_path(path, key)) : fallback;
}

inline int integer(const json &j, const std::string &path) {
    if (!j.is_number_integer()) {
        throw ConfigError(path, "expected an integer");
    }
    return j.get<int>();
}

inline bool boolean_or(const json &obj, const char *key, const std::string &path, bool fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_boolean()) {
        throw ConfigError(join_path(path, key), "expected true or false");
    }
    return obj.at(key).get<bool>();
}

inline std::string string(const json &j, const std::string &path) {
    if (!j.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    return j.get<std::string>();
}

inline const json &required(const json &obj, const char *key, const std::string &path) {
    if (!obj.contains(key)) {
        throw ConfigError(join_path(path, key), "required field missing");
    }
    return obj.at(key);
}

inline Scenario scenario(const json &j, const std::string &path) {
    try {
        return parse_scenario(string(j, path));
    } catch (const std::invalid_argument &e) {
        throw ConfigError(path, e.what());
    }
}

inline BathSpec bath(const json &j, const std::string &path) {
    check_object(j, path);
    check_keys(j, path, {"temperature", "frequency", "gamma", "therm_time"});
    BathSpec b;
    b.temperature = number(required(j, "temperature", path), join_path(path, "temperature"));
    b.frequency = number_or(j, "frequency", path, b.frequency);
    b.gamma = number_or(j, "gamma", path, b.gamma);
    b.therm_time = number_or(j, "therm_time", path, b.therm_time);
    if (!(b.temperature > 0.0)) throw ConfigError(join_path(path, "temperature"), "must be positive");
    if (!(b.frequency > 0.0)) throw ConfigError(join_path(path, "frequency"), "must be positive");
    if (b.gamma < 0.0) throw ConfigError(join_path(path, "gamma"), "must be nonnegative");
    if (b.therm_time < 0.0) throw ConfigError(join_path(path, "therm_time"), "must be nonnegative");
    return b;
}

inline std::vector<double> number_list(const json &j, const std::string &path) {
    if (!j.is_array()) {
        throw ConfigError(path, "expected an array of numbers");
    }
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return v;
}

inline ProtocolConfig protocol(const json &j, Scenario sc) {
    ProtocolConfig c;
    const json &baths = required(j, "baths", "");
    if (!baths.is_array()) {
        throw ConfigError("baths", "expected an array");
    }
    if (baths.size() < 2 || baths.size() > 3) {
        throw ConfigError("baths", "expected 2 or 3 baths, got " + std::to_string(baths.size()));
    }
    for (std::size_t i = 0; i < baths.size(); ++i) {
        c.baths.push_back(bath(baths[i], "baths[" + std::to_string(i) + "]"));
    }

    const auto angles = number_list(required(j, "collision_angles_over_pi", ""), "collision_angles_over_pi");
    if (angles.size() != c.baths.size()) {
        throw ConfigError("collision_angles_over_pi", "expected one angle per bath");
    }
    for (std::size_t i = 0; i < angles.size(); ++i) {
        if (angles[i] < 0.0) {
            throw ConfigError("collision_angles_over_pi[" + std::to_string(i) + "]", "must be nonnegative");
        }
        c.collision_angles.push_back(angles[i] * std::numbers::pi);
    }

    if (sc == Scenario::Qutrit) {
        c.ancilla_dim = 3;
    }
    if (j.contains("ancilla")) {
        const json &a = j.at("ancilla");
        check_object(a, "ancilla");
        check_keys(a, "ancilla", {"dim", "count", "init"});
        if (a.contains("dim")) {
            c.ancilla_dim = integer(a.at("dim"), "ancilla.dim");
            if (c.ancilla_dim != 2 && c.ancilla_dim != 3) throw ConfigError("ancilla.dim", "must be 2 or 3");
        }
        if (a.contains("count")) {
            c.ancilla_count = integer(a.at("count"), "ancilla.count");
            if (c.ancilla_count < 1) throw ConfigError("ancilla.count", "must be at least 1");
        }
        if (a.contains("init")) {
            c.ancilla_init = integer(a.at("init"), "ancilla.init");
            if (c.ancilla_init < 0 || c.ancilla_init >= c.ancilla_dim) {
                throw ConfigError("ancilla.init", "must be a level below ancilla.dim");
            }
        }
    }

    if (j.contains("rotation")) {
        const json &r = j.at("rotation");
        check_object(r, "rotation");
        check_keys(r, "rotation", {"enabled", "theta_over_pi", "axis", "after_last"});
        c.rotation_enabled = boolean_or(r, "enabled", "rotation", true);
        c.rotation.theta = number_or(r, "theta_over_pi", "rotation", 0.25) * std::numbers::pi;
        c.apply_rotation_after_last = boolean_or(r, "after_last", "rotation", false);
        if (r.contains("axis")) {
            try {
                c.rotation.axis = parse_axis(string(r.at("axis"), "rotation.axis"));
            } catch (const std::invalid_argument &e) {
                throw ConfigError("rotation.axis", e.what());
            }
        }
    }

    c.correlated = sc == Scenario::Correlated;
    if (j.contains("correlated") && boolean_or(j, "correlated", "", false) != c.correlated) {
        throw ConfigError("correlated", "must agree with the scenario");
    }
    if (sc == Scenario::Single && c.ancilla_count != 1) {
        throw ConfigError("ancilla.count", "scenario single takes exactly one ancilla");
    }
    if (sc == Scenario::Qutrit && c.baths.size() != 3) {
        throw ConfigError("baths", "scenario qutrit takes three baths");
    }
    return c;
}

inline std::optional<SweepSpec> sweep(const json &j) {
    if (!j.contains("sweep")) {
        return std::nullopt;
    }
    const json &s = j.at("sweep");
    check_object(s, "sweep");
    check_keys(s, "sweep", {"axis", "start", "stop", "step", "values"});
    SweepSpec out;
    out.axis = string(required(s, "axis", "sweep"), "sweep.axis");
    if (s.contains("values")) {
        if (s.contains("start") || s.contains("stop") || s.contains("step")) {
            throw ConfigError("sweep.values", "give either values or start/stop/step, not both");
        }
        out.values = number_list(s.at("values"), "sweep.values");
    } else {
        const double start = number(required(s, "start", "sweep"), "sweep.start");
        const double stop = number(required(s, "stop", "sweep"), "sweep.stop");
        const double step = number(required(s, "step", "sweep"), "sweep.step");
        if (!(step > 0.0)) throw ConfigError("sweep.step", "must be positive");
        if (stop < start) throw ConfigError("sweep.stop", "must not be below sweep.start");
        out.values = linear_grid(start, stop, step);
    }
    for (std::size_t i = 1; i < out.values.size(); ++i) {
        if (!(out.values[i] > out.values[i - 1])) {
            throw ConfigError("sweep.values", "must be strictly increasing");
        }
    }
    return out;
}

/// Applies an axis value, reporting failures against `path`.
inline void apply_checked(ProtocolConfig &c, const std::string &axis, double value, const std::string &path) {
    try {
        apply_axis(c, axis, value);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(path, e.what());
    }
}

inline void validate_checked(const ProtocolConfig &c, Scenario sc, const std::string &path) {
    try {
        c.validate();
        if (sc == Scenario::Qutrit && c.baths.size() != 3) {
            throw std::invalid_argument("scenario qutrit takes three baths");
        }
        if (sc == Scenario::Single && c.ancilla_count != 1) {
            throw std::invalid_argument("scenario single takes exactly one ancilla");
        }
        if (sc == Scenario::Correlated && correlated_dimension(c) > kMaxDimension) {
            throw std::invalid_argument("correlated joint dimension " + std::to_string(correlated_dimension(c)) +
                                        " exceeds " + std::to_string(kMaxDimension));
        }
    } catch (const std::invalid_argument &e) {
        throw ConfigError(path, e.what());
    }
}

} // namespace detail

/// Parses and validates a run description.
inline RunSpec parse_run_spec(const json &j, std::string name = "run") {
    detail::check_object(j, "");
    detail::check_keys(j, "", {"scenario", "baths", "collision_angles_over_pi", "ancilla", "rotation", "correlated",
                               "sweep", "series", "description"});
    const Scenario base_scenario = detail::scenario(detail::required(j, "scenario", ""), "scenario");
    const ProtocolConfig base = detail::protocol(j, base_scenario);

    RunSpec spec;
    spec.name = std::move(name);
    spec.sweep = detail::sweep(j);

    if (!j.contains("series")) {
        spec.series.push_back({scenario_name(base_scenario), base_scenario, base});
    } else {
        const json &list = j.at("series");
        if (!list.is_array() || list.empty()) {
            throw ConfigError("series", "expected a nonempty array");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string path = "series[" + std::to_string(i) + "]";
            const json &s = list[i];
            detail::check_object(s, path);
            detail::check_keys(s, path, {"label", "scenario", "set"});
            SeriesSpec ss{detail::string(detail::required(s, "label", path), path + ".label"), base_scenario, base};
            if (s.contains("scenario")) {
                ss.scenario = detail::scenario(s.at("scenario"), path + ".scenario");
                ss.config.correlated = ss.scenario == Scenario::Correlated;
                if (ss.scenario == Scenario::Qutrit && base_scenario != Scenario::Qutrit) {
                    ss.config.ancilla_dim = 3;
                }
            }
            if (s.contains("set")) {
                const json &set = s.at("set");
                detail::check_object(set, path + ".set");
                for (const auto &item : set.items()) {
                    const std::string p = path + ".set." + item.key();
                    detail::apply_checked(ss.config, item.key(), detail::number(item.value(), p), p);
                }
            }
            spec.series.push_back(std::move(ss));
        }
    }

    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto &s = spec.series[i];
        const std::string path = j.contains("series") ? "series[" + std::to_string(i) + "]" : "";
        detail::validate_checked(s.config, s.scenario, path);
        if (spec.sweep && !spec.sweep->values.empty()) {
            // The axis must be meaningful for every series; point values may
            // still fail individually and are then reported in-row.
            ProtocolConfig probe = s.config;
            detail::apply_checked(probe, spec.sweep->axis, spec.sweep->values.front(), "sweep.axis");
        }
    }
    return spec;
}

inline json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open config file");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
    }
}

inline RunSpec load_run_spec(const std::filesystem::path &path) {
    return parse_run_spec(read_json_file(path), path.stem().string());
}

// ---------------------------------------------------------------------------
// Presets for the four figures.

inline const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5"};
    return names;
}

inline bool is_preset(const std::string &name) {
    for (const auto &n : preset_names()) {
        if (n == name) return true;
    }
    return false;
}

inline json preset_json(const std::string &name) {
    const json two_baths = json::array({{{"temperature", 2.0}, {"frequency", 1.0}, {"gamma", 1.0}, {"therm_time", 0.5}},
                                        {{"temperature", 1.0}, {"frequency", 1.0}, {"gamma", 1.0}, {"therm_time", 0.5}}});
    const json gt2_sweep = {{"axis", "g_t2_over_pi"}, {"start", 0.0}, {"stop", 1.0}, {"step", 0.01}};
    const json quarter_x = {{"enabled", true}, {"theta_over_pi", 0.25}, {"axis", "x"}, {"after_last", false}};

    if (name == "fig2") {
        json series = json::array();
        for (int k = 0; k <= 10; ++k) {
            const double g1 = k / 10.0;
            series.push_back({{"label", "g_t1_over_pi=" + json(g1).dump()}, {"set", {{"g_t1_over_pi", g1}}}});
        }
        return {{"description", "single ancilla, eta_acc over both collision angles (rows: g_t2, series: g_t1)"},
                {"scenario", "single"},
                {"baths", two_baths},
                {"collision_angles_over_pi", {0.5, 0.0}},
                {"ancilla", {{"dim", 2}, {"count", 1}}},
                {"rotation", quarter_x},
                {"sweep", gt2_sweep},
                {"series", series}};
    }
    if (name == "fig3") {
        json series = json::array();
        const std::pair<const char *, double> thetas[] = {{"pi/6", 1.0 / 6.0}, {"pi/4", 0.25}, {"pi/3", 1.0 / 3.0}};
        for (const auto &[label, theta] : thetas) {
            for (int n = 1; n <= 6; ++n) {
                series.push_back({{"label", std::string("theta=") + label + " n=" + std::to_string(n)},
                                  {"set", {{"theta_over_pi", theta}, {"n", n}}}});
            }
        }
        return {{"description", "uncorrelated ancilla stream, n = 1..6 for three rotation angles"},
                {"scenario", "uncorrelated"},
                {"baths", two_baths},
                {"collision_angles_over_pi", {0.5, 0.0}},
                {"ancilla", {{"dim", 2}, {"count", 1}}},
                {"rotation", quarter_x},
                {"sweep", gt2_sweep},
                {"series", series}};
    }
    if (name == "fig4") {
        json series = json::array();
        for (const char *sc : {"uncorrelated", "correlated"}) {
            for (int n = 2; n <= 4; ++n) {
                series.push_back({{"label", std::string(sc) + " n=" + std::to_string(n)},
                                  {"scenario", sc},
                                  {"set", {{"n", n}}}});
            }
        }
        return {{"description", "correlated versus uncorrelated ancillas, n = 2, 3, 4"},
                {"scenario", "uncorrelated"},
                {"baths", two_baths},
                {"collision_angles_over_pi", {0.5, 0.0}},
                {"ancilla", {{"dim", 2}, {"count", 2}}},
                {"rotation", quarter_x},
                {"sweep", gt2_sweep},
                {"series", series}};
    }
    if (name == "fig5") {
        json series = json::array();
        for (int n : {1, 3, 5}) {
            series.push_back({{"label", "qutrit n=" + std::to_string(n)}, {"set", {{"n", n}}}});
        }
        series.push_back({{"label", "qubit n=5"}, {"set", {{"n", 5}, {"ancilla_dim", 2}}}});
        json baths = two_baths;
        baths.push_back({{"temperature", 3.0}, {"frequency", 1.0}, {"gamma", 1.0}, {"therm_time", 0.5}});
        return {{"description", "three baths probed by qutrit ancillas, with the qubit-ancilla diagnostic"},
                {"scenario", "qutrit"},
                {"baths", baths},
                {"collision_angles_over_pi", {0.5, 0.2, 0.0}},
                {"ancilla", {{"dim", 3}, {"count", 1}}},
                {"rotation", quarter_x},
                {"sweep", {{"axis", "g_t3_over_pi"}, {"start", 0.0}, {"stop", 1.0}, {"step", 0.01}}},
                {"series", series}};
    }
    throw ConfigError("scenario", "unknown preset '" + name + "'");
}

inline RunSpec preset(const std::string &name) { return parse_run_spec(preset_json(name), name); }

} // namespace colltherm
