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
 * @file channels.hpp
 * Physical maps of the collisional thermometry protocol.
 *
 * Energy convention (k_B = hbar = 1): a probe has H = omega sigma_z / 2 with
 * |0> the +omega/2 level and |1> the -omega/2 level, so lambda_0 is the
 * excited population. sigma_+ = |0><1|, sigma_- = |1><0|. Spin-1 operators
 * use the basis (m = +1, 0, -1).
 */
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "colltherm/linalg.hpp"

namespace colltherm {

/// One thermal bath and the probe thermalized by it.
struct BathSpec {
    double temperature = 1.0; ///< units of hbar omega / k_B
    double frequency = 1.0;   ///< probe angular frequency omega
    double gamma = 1.0;       ///< probe-bath coupling rate
    double therm_time = 0.0;  ///< partial thermalization time between collisions

    void validate() const {
        if (!(temperature > 0.0)) {
            throw std::invalid_argument("BathSpec: temperature must be positive");
        }
        if (!(frequency > 0.0) || !std::isfinite(frequency)) {
            throw std::invalid_argument("BathSpec: frequency must be positive");
        }
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
            throw std::invalid_argument("BathSpec: gamma must be nonnegative");
        }
        if (!(therm_time >= 0.0) || !std::isfinite(therm_time)) {
            throw std::invalid_argument("BathSpec: therm_time must be nonnegative");
        }
    }
};

/// Probe-ancilla exchange interaction. Only g * tau enters the dynamics.
struct CollisionSpec {
    double g = 1.0;
    double tau = 0.0;

    static CollisionSpec from_angle(double g_tau) { return {1.0, g_tau}; }
    [[nodiscard]] double angle() const noexcept { return g * tau; }
};

enum class Axis { X, Y, Z };

inline Axis parse_axis(const std::string &s) {
    if (s == "x" || s == "X") return Axis::X;
    if (s == "y" || s == "Y") return Axis::Y;
    if (s == "z" || s == "Z") return Axis::Z;
    throw std::invalid_argument("unknown rotation axis '" + s + "'");
}

inline const char *axis_name(Axis a) {
    switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
    }
    return "?";
}

/// Ancilla rotation exp(-i theta G) with G = sigma_axis (qubit) or S_axis (qutrit).
struct RotationSpec {
    double theta = 0.0;
    Axis axis = Axis::X;
};

struct KrausSet {
    std::vector<ComplexMatrix> operators;

    [[nodiscard]] double completeness_residual() const {
        if (operators.empty()) {
            return 0.0;
        }
        const auto d = operators.front().cols();
        ComplexMatrix acc = ComplexMatrix::Zero(d, d);
        for (const auto &k : operators) {
            acc += k.adjoint() * k;
        }
        return max_abs(acc - ComplexMatrix::Identity(d, d));
    }

    [[nodiscard]] ComplexMatrix apply(const ComplexMatrix &rho) const {
        ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
        for (const auto &k : operators) {
            out += k * rho * k.adjoint();
        }
        return out;
    }

    [[nodiscard]] Superoperator superoperator() const {
        const auto d = operators.front().cols();
        ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
        for (const auto &k : operators) {
            s += kron(k, k.conjugate());
        }
        return Superoperator(std::move(s));
    }
};

// ---------------------------------------------------------------------------
// Operators.

namespace ops {

inline ComplexMatrix sigma_plus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

inline ComplexMatrix sigma_minus() { return sigma_plus().transpose(); }

inline ComplexMatrix pauli(Axis a) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    switch (a) {
    case Axis::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case Axis::Y: m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
    case Axis::Z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    }
    return m;
}

/// Spin-1 raising operator S_+ = S_x + i S_y.
inline ComplexMatrix spin1_raise() {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 1) = std::sqrt(2.0);
    m(1, 2) = std::sqrt(2.0);
    return m;
}

inline ComplexMatrix spin1(Axis a) {
    const ComplexMatrix sp = spin1_raise();
    const ComplexMatrix sm = sp.adjoint();
    switch (a) {
    case Axis::X: return 0.5 * (sp + sm);
    case Axis::Y: return cplx(0, -0.5) * (sp - sm);
    case Axis::Z: {
        ComplexMatrix m = ComplexMatrix::Zero(3, 3);
        m(0, 0) = 1.0;
        m(2, 2) = -1.0;
        return m;
    }
    }
    return {};
}

/// Rotation generator for an ancilla of dimension 2 or 3.
inline ComplexMatrix rotation_generator(Axis a, int dim) {
    if (dim == 2) return pauli(a);
    if (dim == 3) return spin1(a);
    throw std::invalid_argument("rotation_generator: ancilla dimension must be 2 or 3");
}

/// Probe-ancilla exchange Hamiltonian (g = 1), probe factor first.
/// Qubit ancilla: sigma_+ sigma_- + h.c.; qutrit: sigma_+ Q_- + sigma_- Q_+,
/// Q_+- = (S_x +- i S_y) / 2.
inline ComplexMatrix exchange_hamiltonian(int ancilla_dim) {
    if (ancilla_dim == 2) {
        return kron(sigma_plus(), sigma_minus()) + kron(sigma_minus(), sigma_plus());
    }
    if (ancilla_dim == 3) {
        const ComplexMatrix qp = 0.5 * spin1_raise();
        const ComplexMatrix qm = qp.adjoint();
        return kron(sigma_plus(), qm) + kron(sigma_minus(), qp);
    }
    throw std::invalid_argument("exchange_hamiltonian: ancilla dimension must be 2 or 3");
}

/// Generator of the ancilla-probe excitation number, sigma_z/2 (x) I + I (x) J_z.
inline ComplexMatrix excitation_number(int ancilla_dim) {
    const ComplexMatrix jz = ancilla_dim == 2 ? ComplexMatrix(0.5 * pauli(Axis::Z)) : spin1(Axis::Z);
    return kron(0.5 * pauli(Axis::Z), ComplexMatrix::Identity(ancilla_dim, ancilla_dim)) +
           kron(ComplexMatrix::Identity(2, 2), jz);
}

} // namespace ops

// ---------------------------------------------------------------------------
// States.

/// Gibbs populations (lambda_0, lambda_1) of H = omega sigma_z / 2.
inline std::pair<double, double> thermal_populations(double omega, double temperature) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("thermal_state: temperature must be positive");
    }
    if (!(omega > 0.0)) {
        throw std::invalid_argument("thermal_state: frequency must be positive");
    }
    const double x = omega / temperature;
    return {1.0 / (1.0 + std::exp(x)), 1.0 / (1.0 + std::exp(-x))};
}

inline DensityMatrix thermal_state(double omega, double temperature) {
    const auto [l0, l1] = thermal_populations(omega, temperature);
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = l0;
    m(1, 1) = l1;
    return DensityMatrix(std::move(m));
}

inline DensityMatrix thermal_state(const BathSpec &bath) {
    return thermal_state(bath.frequency, bath.temperature);
}

/// Bose occupation at the probe frequency.
inline double mean_occupation(const BathSpec &bath) {
    bath.validate();
    return 1.0 / std::expm1(bath.frequency / bath.temperature);
}

// ---------------------------------------------------------------------------
// Unitaries.

/// exp(-i g tau H) for H = sigma_+ sigma_- + h.c. on probe (x) qubit ancilla.
inline ComplexMatrix collision_unitary_qubit(const CollisionSpec &spec) {
    return matrix_exp(ops::exchange_hamiltonian(2), cplx(0.0, -spec.angle()));
}

/// exp(-i g tau H) for H = sigma_+ Q_- + sigma_- Q_+ on probe (x) qutrit ancilla.
inline ComplexMatrix collision_unitary_qubit_qutrit(const CollisionSpec &spec) {
    return matrix_exp(ops::exchange_hamiltonian(3), cplx(0.0, -spec.angle()));
}

inline ComplexMatrix collision_unitary(const CollisionSpec &spec, int ancilla_dim) {
    return ancilla_dim == 2 ? collision_unitary_qubit(spec) : collision_unitary_qubit_qutrit(spec);
}

inline ComplexMatrix rotation_unitary(const RotationSpec &spec, int dim) {
    return matrix_exp(ops::rotation_generator(spec.axis, dim), cplx(0.0, -spec.theta));
}

// ---------------------------------------------------------------------------
// Channels.

/**
 * Kraus operators K_ij = sqrt(lambda_j) <i|U|j> of the ancilla channel
 * Tr_env[U (rho_env (x) rho) U^dagger]. U acts on env (x) ancilla with the
 * environment first; rho_env must be diagonal in the computational basis.
 * Operators are ordered i-major (K_00, K_01, K_10, K_11 for a qubit env).
 */
inline KrausSet kraus_from_collision(const ComplexMatrix &u, const DensityMatrix &rho_env) {
    const auto de = static_cast<Eigen::Index>(rho_env.dim());
    if (u.rows() != u.cols() || u.rows() % de != 0) {
        throw std::invalid_argument("kraus_from_collision: unitary does not factor over environment");
    }
    const ComplexMatrix &env = rho_env.matrix();
    const ComplexMatrix off = env - ComplexMatrix(env.diagonal().asDiagonal());
    if (max_abs(off) > 1e-12) {
        throw std::invalid_argument("kraus_from_collision: environment state must be diagonal");
    }
    const Eigen::Index da = u.rows() / de;
    KrausSet set;
    for (Eigen::Index i = 0; i < de; ++i) {
        for (Eigen::Index j = 0; j < de; ++j) {
            const double lambda = std::max(0.0, env(j, j).real());
            set.operators.emplace_back(std::sqrt(lambda) * u.block(i * da, j * da, da, da));
        }
    }
    return set;
}

/// Ancilla channel of one collision with a thermal probe, as sum_k K (x) K*.
inline Superoperator collision_superoperator(const CollisionSpec &spec, const BathSpec &bath,
                                             int ancilla_dim = 2) {
    bath.validate();
    return kraus_from_collision(collision_unitary(spec, ancilla_dim), thermal_state(bath)).superoperator();
}

inline Superoperator rotation_superoperator(const RotationSpec &spec, int dim) {
    return Superoperator::conjugation(rotation_unitary(spec, dim));
}

/// Vectorized GKSL dissipator D[O] rho = O rho O^dagger - {O^dagger O, rho} / 2.
inline ComplexMatrix dissipator(const ComplexMatrix &o) {
    const auto d = o.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const ComplexMatrix odo = o.adjoint() * o;
    return kron(o, o.conjugate()) - 0.5 * kron(odo, id) - 0.5 * kron(id, odo.transpose());
}

/// gamma (nbar + 1) D[sigma_-] + gamma nbar D[sigma_+], vectorized.
inline ComplexMatrix thermal_liouvillian(const BathSpec &bath) {
    const double nbar = mean_occupation(bath);
    return bath.gamma * (nbar + 1.0) * dissipator(ops::sigma_minus()) +
           bath.gamma * nbar * dissipator(ops::sigma_plus());
}

/// Partial thermalization of a probe over bath.therm_time.
inline Superoperator thermalization_channel(const BathSpec &bath) {
    return Superoperator(matrix_exp(thermal_liouvillian(bath), bath.therm_time));
}

} // namespace colltherm
