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
 * @file protocols.hpp
 * Collisional estimation protocols for several bath temperatures.
 *
 * Each ancilla visits the probes in bath order. A visit is an exchange
 * collision, a partial thermalization of the probe toward its bath, and a
 * rotation of the ancilla (skipped after the final visit unless
 * apply_rotation_after_last is set). Probe states persist from one ancilla
 * to the next.
 *
 * Temperature derivatives are taken numerically through the whole protocol,
 * so both the initial Gibbs states and the thermalization channels carry
 * the dependence.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "colltherm/channels.hpp"
#include "colltherm/estimation.hpp"
#include "colltherm/linalg.hpp"

namespace colltherm {

enum class Scenario { Single, Uncorrelated, Correlated, Qutrit };

inline Scenario parse_scenario(const std::string &s) {
    if (s == "single") return Scenario::Single;
    if (s == "uncorrelated") return Scenario::Uncorrelated;
    if (s == "correlated") return Scenario::Correlated;
    if (s == "qutrit") return Scenario::Qutrit;
    throw std::invalid_argument("unknown scenario '" + s + "'");
}

inline const char *scenario_name(Scenario s) {
    switch (s) {
    case Scenario::Single: return "single";
    case Scenario::Uncorrelated: return "uncorrelated";
    case Scenario::Correlated: return "correlated";
    case Scenario::Qutrit: return "qutrit";
    }
    return "?";
}

struct ProtocolConfig {
    std::vector<BathSpec> baths;
    int ancilla_dim = 2;
    int ancilla_count = 1;
    int ancilla_init = -1; ///< basis index; negative selects the last level
    std::vector<double> collision_angles; ///< g tau per bath, radians
    RotationSpec rotation{std::numbers::pi / 4.0, Axis::X};
    bool rotation_enabled = true;
    bool apply_rotation_after_last = false;
    bool correlated = false;

    [[nodiscard]] int initial_level() const { return ancilla_init < 0 ? ancilla_dim - 1 : ancilla_init; }

    [[nodiscard]] std::vector<double> temperatures() const {
        std::vector<double> t;
        for (const auto &b : baths) {
            t.push_back(b.temperature);
        }
        return t;
    }

    void validate() const {
        if (baths.size() < 2 || baths.size() > 3) {
            throw std::invalid_argument("ProtocolConfig: baths must list 2 or 3 baths");
        }
        for (const auto &b : baths) {
            b.validate();
        }
        if (ancilla_dim != 2 && ancilla_dim != 3) {
            throw std::invalid_argument("ProtocolConfig: ancilla_dim must be 2 or 3");
        }
        if (ancilla_count < 1) {
            throw std::invalid_argument("ProtocolConfig: ancilla_count must be at least 1");
        }
        if (initial_level() >= ancilla_dim) {
            throw std::invalid_argument("ProtocolConfig: ancilla_init must be below ancilla_dim");
        }
        if (collision_angles.size() != baths.size()) {
            throw std::invalid_argument("ProtocolConfig: one collision angle per bath required");
        }
        for (double a : collision_angles) {
            if (!(a >= 0.0) || !std::isfinite(a)) {
                throw std::invalid_argument("ProtocolConfig: collision angles must be nonnegative");
            }
        }
        if (!std::isfinite(rotation.theta)) {
            throw std::invalid_argument("ProtocolConfig: rotation angle must be finite");
        }
    }
};

/// Joint probes-plus-ancillas dimension of the correlated simulation.
inline std::size_t correlated_dimension(const ProtocolConfig &c) {
    std::size_t d = 1;
    for (std::size_t i = 0; i < c.baths.size(); ++i) d *= 2;
    for (int k = 0; k < c.ancilla_count; ++k) d *= static_cast<std::size_t>(c.ancilla_dim);
    return d;
}

namespace detail {

/// Operators of one protocol instance at a given temperature vector.
struct ProtocolOps {
    std::vector<BathSpec> baths;
    std::vector<ComplexMatrix> collisions;
    std::vector<Superoperator> relax;
    ComplexMatrix rotation;

    ProtocolOps(const ProtocolConfig &c, std::span<const double> temps) : baths(c.baths) {
        if (temps.size() != baths.size()) {
            throw std::invalid_argument("protocol: one temperature per bath required");
        }
        for (std::size_t i = 0; i < baths.size(); ++i) {
            baths[i].temperature = temps[i];
            baths[i].validate();
            collisions.push_back(collision_unitary(CollisionSpec::from_angle(c.collision_angles[i]), c.ancilla_dim));
            relax.push_back(thermalization_channel(baths[i]));
        }
        rotation = rotation_unitary(c.rotation, c.ancilla_dim);
    }

    [[nodiscard]] bool rotate_after(const ProtocolConfig &c, std::size_t stage) const {
        return c.rotation_enabled && (stage + 1 < baths.size() || c.apply_rotation_after_last);
    }
};

} // namespace detail

/**
 * Final ancilla states of the stream with ancilla-ancilla correlations
 * discarded: each ancilla is traced out after its pass, and the probes keep
 * only their marginal states.
 */
inline std::vector<DensityMatrix> ancilla_marginals(const ProtocolConfig &c, std::span<const double> temps) {
    const detail::ProtocolOps ops(c, temps);
    std::vector<DensityMatrix> probes;
    for (const auto &b : ops.baths) {
        probes.push_back(thermal_state(b));
    }
    std::vector<DensityMatrix> out;
    out.reserve(static_cast<std::size_t>(c.ancilla_count));
    for (int k = 0; k < c.ancilla_count; ++k) {
        DensityMatrix anc = basis_state(c.ancilla_dim, c.initial_level());
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const DensityMatrix joint = apply_unitary(tensor(probes[i], anc), ops.collisions[i]);
            anc = partial_trace(joint, {1});
            probes[i] = ops.relax[i].apply(partial_trace(joint, {0}));
            if (ops.rotate_after(c, i)) {
                anc = apply_unitary(anc, ops.rotation);
            }
        }
        out.push_back(std::move(anc));
    }
    return out;
}

/**
 * Joint state of all ancillas from the full dilation: probes and ancillas
 * evolve together, probes partially rethermalize after each of their
 * collisions, and the probes are traced out only at the end.
 */
inline DensityMatrix correlated_ancilla_state(const ProtocolConfig &c, std::span<const double> temps) {
    if (correlated_dimension(c) > kMaxDimension) {
        throw std::invalid_argument("correlated protocol: joint dimension " +
                                    std::to_string(correlated_dimension(c)) + " exceeds " +
                                    std::to_string(kMaxDimension));
    }
    const detail::ProtocolOps ops(c, temps);
    const int nb = static_cast<int>(ops.baths.size());
    DensityMatrix state = thermal_state(ops.baths.front());
    for (int i = 1; i < nb; ++i) {
        state = tensor(state, thermal_state(ops.baths[static_cast<std::size_t>(i)]));
    }
    const DensityMatrix anc0 = basis_state(c.ancilla_dim, c.initial_level());
    for (int k = 0; k < c.ancilla_count; ++k) {
        state = tensor(state, anc0);
    }
    for (int k = 0; k < c.ancilla_count; ++k) {
        const int anc_site = nb + k;
        for (int i = 0; i < nb; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            state = apply_unitary(state, ops.collisions[iu], {i, anc_site});
            state = apply_superoperator(state, ops.relax[iu], i);
            if (ops.rotate_after(c, iu)) {
                state = apply_unitary(state, ops.rotation, {anc_site});
            }
        }
    }
    std::vector<int> keep;
    for (int k = 0; k < c.ancilla_count; ++k) {
        keep.push_back(nb + k);
    }
    return partial_trace(state, keep);
}

struct ScenarioResult {
    std::vector<DensityMatrix> states; ///< per-ancilla marginals, or one joint state
    EstimationReport report;
};

inline ScenarioResult multi_ancilla_uncorrelated(const ProtocolConfig &c) {
    c.validate();
    if (c.correlated) {
        throw std::invalid_argument("multi_ancilla_uncorrelated: config is marked correlated");
    }
    const StateListFamily family = [&c](std::span<const double> t) { return ancilla_marginals(c, t); };
    const auto temps = c.temperatures();
    auto pds = finite_diff_derivatives_multi(family, temps);
    ScenarioResult r;
    r.report = make_report(pds, c.baths);
    for (auto &pd : pds) {
        r.states.push_back(std::move(pd.base_state));
    }
    return r;
}

inline ScenarioResult multi_ancilla_correlated(const ProtocolConfig &c) {
    c.validate();
    const StateFamily family = [&c](std::span<const double> t) { return correlated_ancilla_state(c, t); };
    const auto temps = c.temperatures();
    auto pd = finite_diff_derivatives(family, temps);
    ScenarioResult r;
    r.report = make_report({pd}, c.baths);
    r.states.push_back(std::move(pd.base_state));
    return r;
}

struct SingleRunResult {
    DensityMatrix final_ancilla;
    EstimationReport report;
};

inline SingleRunResult single_run(const ProtocolConfig &c) {
    if (c.ancilla_count != 1) {
        throw std::invalid_argument("single_run: ancilla_count must be 1");
    }
    auto r = multi_ancilla_uncorrelated(c);
    return {std::move(r.states.front()), std::move(r.report)};
}

/// Three baths probed by a stream of uncorrelated ancillas. Qutrit ancillas
/// are the intended mode; ancilla_dim = 2 runs the qubit diagnostic.
inline ScenarioResult three_bath_qutrit(const ProtocolConfig &c) {
    if (c.baths.size() != 3) {
        throw std::invalid_argument("three_bath_qutrit: exactly three baths required");
    }
    return multi_ancilla_uncorrelated(c);
}

inline ScenarioResult evaluate(const ProtocolConfig &c, Scenario s) {
    switch (s) {
    case Scenario::Single: {
        auto r = single_run(c);
        return {{std::move(r.final_ancilla)}, std::move(r.report)};
    }
    case Scenario::Uncorrelated: return multi_ancilla_uncorrelated(c);
    case Scenario::Correlated: return multi_ancilla_correlated(c);
    case Scenario::Qutrit: return three_bath_qutrit(c);
    }
    throw std::invalid_argument("evaluate: unknown scenario");
}

} // namespace colltherm
