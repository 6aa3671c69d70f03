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
 * @file report_io.hpp
 * Executing run descriptions and writing their results: a CSV table with one
 * row per (series, axis value) and a JSON summary of the optimum.
 */
#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "colltherm/config.hpp"
#include "colltherm/sweep.hpp"

namespace colltherm {

struct SeriesResult {
    std::string label;
    Scenario scenario = Scenario::Single;
    std::vector<SweepPoint> points;
    long best = -1; ///< index of the max-eta_acc row, -1 if every point failed

    [[nodiscard]] std::vector<SweepRow> rows() const {
        std::vector<SweepRow> r;
        for (const auto &p : points) r.push_back(p.row);
        return r;
    }
};

struct RunResult {
    std::string name;
    std::string axis; ///< "point" for runs without a sweep
    std::vector<SeriesResult> series;

    [[nodiscard]] std::size_t failed_points() const {
        std::size_t n = 0;
        for (const auto &s : series)
            for (const auto &p : s.points) n += p.row.ok() ? 0 : 1;
        return n;
    }
    [[nodiscard]] bool any_numerical_error() const {
        for (const auto &s : series)
            for (const auto &p : s.points)
                if (p.row.numerical_error) return true;
        return false;
    }
};

/// Evaluates every series over the sweep (or at its single configured point).
inline RunResult execute(const RunSpec &spec, unsigned threads = 1) {
    RunResult out;
    out.name = spec.name;
    out.axis = spec.sweep ? spec.sweep->axis : "point";
    for (const auto &s : spec.series) {
        SeriesResult sr{s.label, s.scenario, {}, -1};
        if (spec.sweep) {
            sr.points = sweep_points(SweepGrid{spec.sweep->axis, spec.sweep->values, s.config}, s.scenario, threads);
        } else {
            SweepPoint p;
            try {
                auto r = evaluate(s.config, s.scenario);
                p.row = {0.0, r.report.eta_joint, r.report.eta_acc, r.report.det_qfim(), r.report.trace_qfim(),
                         r.report.singular, {}, false};
                p.report = std::move(r.report);
            } catch (const NumericalError &e) {
                p.row.error = e.what();
                p.row.numerical_error = true;
            } catch (const std::exception &e) {
                p.row.error = e.what();
            }
            sr.points.push_back(std::move(p));
        }
        sr.best = best_row(sr.rows());
        out.series.push_back(std::move(sr));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV.

/// 12 significant digits, '.' decimal separator; infinities as "inf"/"-inf".
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

inline std::vector<std::string> csv_header(const std::string &axis) {
    return {axis, "eta_acc", "eta_joint", "det_qfim", "trace_qfim", "singular", "max_eta_acc", "series", "error"};
}

/// Header row plus one row per point, series in order; LF line endings.
inline std::string render_csv(const RunResult &r) {
    std::ostringstream os;
    const auto header = csv_header(r.axis);
    for (std::size_t i = 0; i < header.size(); ++i) {
        os << (i ? "," : "") << csv_field(header[i]);
    }
    os << '\n';
    for (const auto &s : r.series) {
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto &row = s.points[i].row;
            const bool is_best = static_cast<long>(i) == s.best;
            if (row.ok()) {
                os << format_number(row.axis_value) << ',' << format_number(row.eta_acc) << ','
                   << format_number(row.eta_joint) << ',' << format_number(row.det_qfim) << ','
                   << format_number(row.trace_qfim) << ',' << (row.singular ? 1 : 0) << ',' << (is_best ? 1 : 0)
                   << ',' << csv_field(s.label) << ",\n";
            } else {
                os << format_number(row.axis_value) << ",,,,,,0," << csv_field(s.label) << ','
                   << csv_field(row.error) << '\n';
            }
        }
    }
    return os.str();
}

/// Writes via a sibling temporary file and rename, so readers never observe
/// a partial file.
inline void write_atomic(const std::filesystem::path &path, const std::string &content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// JSON summary.

struct RunManifest {
    std::string config_path; ///< empty for presets
    std::string scenario;    ///< preset name or scenario of the config
    std::string output_path;
    unsigned long long seed = 0;
    std::string emitted_at; ///< UTC, ISO 8601
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

/// Finite numbers as JSON numbers, -inf / inf / nan as null.
inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json matrix_json(const RealMatrix &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline json point_json(const SeriesResult &s, std::size_t index) {
    const SweepPoint &p = s.points[index];
    json j = {{"series", s.label},
              {"scenario", scenario_name(s.scenario)},
              {"axis_value", p.row.axis_value},
              {"eta_joint", p.row.eta_joint},
              {"eta_acc", finite_or_null(p.row.eta_acc)},
              {"det_qfim", p.row.det_qfim},
              {"trace_qfim", p.row.trace_qfim},
              {"singular", p.row.singular}};
    if (p.report) {
        j["qfim"] = matrix_json(p.report->qfim.matrix);
        json th = json::array();
        for (Eigen::Index i = 0; i < p.report->thermal.diagonal.size(); ++i) th.push_back(p.report->thermal.diagonal(i));
        j["thermal_fim"] = th;
        j["sld_commutator_norm"] = p.report->sld_commutator_norm;
    }
    return j;
}

} // namespace detail

/**
 * Summary with the overall optimum (largest eta_acc across all series, ties
 * by eta_joint) and the optimum of each series. eta_acc is null when the
 * QFIM is singular.
 */
inline json summary_json(const RunResult &r, const RunManifest &m) {
    json j;
    j["manifest"] = {{"config_path", m.config_path},
                     {"scenario", m.scenario},
                     {"output_path", m.output_path},
                     {"seed", m.seed},
                     {"emitted_at", m.emitted_at}};
    j["axis"] = r.axis;
    j["failed_points"] = r.failed_points();
    json per_series = json::array();
    const SeriesResult *best_series = nullptr;
    for (const auto &s : r.series) {
        if (s.best < 0) {
            per_series.push_back({{"series", s.label}, {"scenario", scenario_name(s.scenario)}, {"optimum", nullptr}});
            continue;
        }
        per_series.push_back({{"series", s.label},
                              {"scenario", scenario_name(s.scenario)},
                              {"optimum", detail::point_json(s, static_cast<std::size_t>(s.best))}});
        if (best_series == nullptr) {
            best_series = &s;
            continue;
        }
        const auto &a = s.points[static_cast<std::size_t>(s.best)].row;
        const auto &b = best_series->points[static_cast<std::size_t>(best_series->best)].row;
        if (a.eta_acc > b.eta_acc || (a.eta_acc == b.eta_acc && a.eta_joint > b.eta_joint)) {
            best_series = &s;
        }
    }
    j["optimum"] = best_series ? detail::point_json(*best_series, static_cast<std::size_t>(best_series->best))
                               : json(nullptr);
    j["series"] = per_series;
    return j;
}

/// Schema check for summary_json output; returns the list of violations.
inline std::vector<std::string> validate_summary(const json &j) {
    std::vector<std::string> errs;
    const auto need = [&](const json &obj, const std::string &path, const char *key, auto pred, const char *what) {
        if (!obj.is_object() || !obj.contains(key) || !pred(obj.at(key))) {
            errs.push_back(path + key + ": expected " + what);
        }
    };
    const auto is_str = [](const json &x) { return x.is_string(); };
    const auto is_num = [](const json &x) { return x.is_number(); };
    const auto is_num_or_null = [](const json &x) { return x.is_number() || x.is_null(); };
    const auto is_bool = [](const json &x) { return x.is_boolean(); };
    const auto is_uint = [](const json &x) { return x.is_number_unsigned(); };
    const auto check_point = [&](const json &p, const std::string &path) {
        need(p, path, "series", is_str, "string");
        need(p, path, "scenario", is_str, "string");
        need(p, path, "axis_value", is_num, "number");
        need(p, path, "eta_joint", is_num, "number");
        need(p, path, "eta_acc", is_num_or_null, "number or null");
        need(p, path, "det_qfim", is_num, "number");
        need(p, path, "trace_qfim", is_num, "number");
        need(p, path, "singular", is_bool, "boolean");
        if (p.is_object() && p.contains("eta_acc") && p.contains("singular") && p.at("eta_acc").is_null() &&
            p.at("singular").is_boolean() && !p.at("singular").get<bool>()) {
            errs.push_back(path + "eta_acc: null requires singular = true");
        }
    };
    need(j, "", "manifest", [](const json &x) { return x.is_object(); }, "object");
    if (j.contains("manifest")) {
        const json &m = j.at("manifest");
        for (const char *k : {"config_path", "scenario", "output_path", "emitted_at"}) {
            need(m, "manifest.", k, is_str, "string");
        }
        need(m, "manifest.", "seed", is_uint, "unsigned integer");
    }
    need(j, "", "axis", is_str, "string");
    need(j, "", "failed_points", is_uint, "unsigned integer");
    need(j, "", "optimum", [](const json &x) { return x.is_object() || x.is_null(); }, "object or null");
    if (j.contains("optimum") && j.at("optimum").is_object()) {
        check_point(j.at("optimum"), "optimum.");
    }
    need(j, "", "series", [](const json &x) { return x.is_array(); }, "array");
    if (j.contains("series") && j.at("series").is_array()) {
        for (std::size_t i = 0; i < j.at("series").size(); ++i) {
            const json &s = j.at("series")[i];
            const std::string path = "series[" + std::to_string(i) + "].";
            need(s, path, "series", is_str, "string");
            if (s.is_object() && s.contains("optimum") && s.at("optimum").is_object()) {
                check_point(s.at("optimum"), path + "optimum.");
            }
        }
    }
    return errs;
}

} // namespace colltherm
