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

/// @file sweep.hpp
/// Parameter sweeps over protocol configurations.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "colltherm/protocols.hpp"

namespace colltherm {

inline constexpr const char *kThreadsEnvVar = "COLLTHERM_THREADS";

/// Thread count from COLLTHERM_THREADS, else the hardware concurrency.
inline unsigned default_thread_count() {
    if (const char *env = std::getenv(kThreadsEnvVar)) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return static_cast<unsigned>(n);
            }
        } catch (const std::exception &) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers. fn must not
/// throw and must only write to slot i of its output.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn &&fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                fn(i);
            }
        });
    }
}

struct SweepGrid {
    std::string axis_name;
    std::vector<double> values;
    ProtocolConfig fixed;

    void validate() const {
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (!(values[i] > values[i - 1])) {
                throw std::invalid_argument("SweepGrid: values must be strictly increasing");
            }
        }
    }
};

/// start, start + step, ... up to stop inclusive (with a half-step tolerance
/// so decimal steps land on stop).
inline std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) {
        throw std::invalid_argument("linear_grid: need step > 0 and stop >= start");
    }
    std::vector<double> v;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 0.5));
    // For steps like 0.01, k / 100 is the double nearest the decimal value,
    // while k * 0.01 may not be.
    const double inv = 1.0 / step;
    const double inv_round = std::round(inv);
    const bool integral_inverse = inv_round >= 1.0 && std::abs(inv - inv_round) <= 1e-9 * inv_round;
    for (long k = 0; k <= n; ++k) {
        const auto kd = static_cast<double>(k);
        v.push_back(start + (integral_inverse ? kd / inv_round : kd * step));
    }
    return v;
}

/**
 * Sets one named parameter of a config. Axes:
 *   g_tK_over_pi  collision angle of bath K (1-based) in units of pi
 *   theta_over_pi rotation angle in units of pi
 *   gamma_t       gamma * therm_time for every bath
 *   n             ancilla count
 *   ancilla_dim   2 or 3 (the initial level follows unless set explicitly)
 *   TK            temperature of bath K
 */
inline void apply_axis(ProtocolConfig &c, const std::string &axis, double value) {
    static const std::regex gt_re(R"(g_t([1-9])_over_pi)");
    static const std::regex t_re(R"(T([1-9]))");
    std::smatch m;
    if (std::regex_match(axis, m, gt_re)) {
        const auto k = static_cast<std::size_t>(std::stoi(m[1].str()) - 1);
        if (k >= c.collision_angles.size()) {
            throw std::invalid_argument("axis '" + axis + "' names a missing bath");
        }
        c.collision_angles[k] = value * std::numbers::pi;
    } else if (std::regex_match(axis, m, t_re)) {
        const auto k = static_cast<std::size_t>(std::stoi(m[1].str()) - 1);
        if (k >= c.baths.size()) {
            throw std::invalid_argument("axis '" + axis + "' names a missing bath");
        }
        c.baths[k].temperature = value;
    } else if (axis == "theta_over_pi") {
        c.rotation.theta = value * std::numbers::pi;
    } else if (axis == "gamma_t") {
        for (auto &b : c.baths) {
            if (!(b.gamma > 0.0)) {
                throw std::invalid_argument("axis gamma_t requires gamma > 0");
            }
            b.therm_time = value / b.gamma;
        }
    } else if (axis == "n") {
        if (value < 1.0 || value != std::floor(value)) {
            throw std::invalid_argument("axis n takes positive integers");
        }
        c.ancilla_count = static_cast<int>(value);
    } else if (axis == "ancilla_dim") {
        if (value != 2.0 && value != 3.0) {
            throw std::invalid_argument("axis ancilla_dim takes 2 or 3");
        }
        c.ancilla_dim = static_cast<int>(value);
    } else {
        throw std::invalid_argument("unknown sweep axis '" + axis + "'");
    }
}

struct SweepRow {
    double axis_value = 0.0;
    double eta_joint = 0.0;
    double eta_acc = 0.0;
    double det_qfim = 0.0;
    double trace_qfim = 0.0;
    bool singular = false;
    std::string error;            ///< empty on success
    bool numerical_error = false; ///< error came from a NumericalError

    [[nodiscard]] bool ok() const noexcept { return error.empty(); }
};

/// Full per-point result, for callers that need more than the table.
struct SweepPoint {
    SweepRow row;
    std::optional<EstimationReport> report;
};

/**
 * Evaluates every grid value independently; results are in grid order. A
 * point that fails records its message in the row and the sweep continues.
 */
inline std::vector<SweepPoint> sweep_points(const SweepGrid &grid, Scenario scenario,
                                            unsigned threads = 1) {
    grid.validate();
    std::vector<SweepPoint> out(grid.values.size());
    parallel_for(grid.values.size(), threads, [&](std::size_t i) {
        SweepPoint &p = out[i];
        p.row.axis_value = grid.values[i];
        try {
            ProtocolConfig c = grid.fixed;
            apply_axis(c, grid.axis_name, grid.values[i]);
            auto r = evaluate(c, scenario);
            p.row.eta_joint = r.report.eta_joint;
            p.row.eta_acc = r.report.eta_acc;
            p.row.det_qfim = r.report.det_qfim();
            p.row.trace_qfim = r.report.trace_qfim();
            p.row.singular = r.report.singular;
            p.report = std::move(r.report);
        } catch (const NumericalError &e) {
            p.row.error = e.what();
            p.row.numerical_error = true;
        } catch (const std::exception &e) {
            p.row.error = e.what();
        }
    });
    return out;
}

inline std::vector<SweepRow> sweep(const SweepGrid &grid, Scenario scenario, unsigned threads = 1) {
    std::vector<SweepRow> rows;
    for (auto &p : sweep_points(grid, scenario, threads)) {
        rows.push_back(std::move(p.row));
    }
    return rows;
}

/// Index of the successful row with the largest eta_acc; ties and all-(-inf)
/// tables fall back to the largest eta_joint. Returns -1 if no row succeeded.
inline long best_row(const std::vector<SweepRow> &rows) {
    long best = -1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        if (!r.ok()) continue;
        if (best < 0) {
            best = static_cast<long>(i);
            continue;
        }
        const auto &b = rows[static_cast<std::size_t>(best)];
        if (r.eta_acc > b.eta_acc || (r.eta_acc == b.eta_acc && r.eta_joint > b.eta_joint)) {
            best = static_cast<long>(i);
        }
    }
    return best;
}

} // namespace colltherm
