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
 * @file estimation.hpp
 * Quantum and classical Fisher information for temperature vectors.
 *
 * The quantum Fisher information matrix is built from symmetric logarithmic
 * derivatives computed in the eigenbasis of the state; eigenvalue pairs whose
 * sum falls below kSupportCutoff are dropped (Moore-Penrose convention), so
 * rank-deficient states give finite results.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "colltherm/channels.hpp"
#include "colltherm/linalg.hpp"

namespace colltherm {

inline constexpr double kSupportCutoff = 1e-12;
inline constexpr double kKernelLeakTol = 1e-8;
inline constexpr double kSingularDetTol = 1e-12;
inline constexpr double kEtaAccDetFloor = 1e-14;
inline constexpr double kRichardsonTol = 1e-6;
inline constexpr double kRichardsonAbsFloor = 1e-9;

/// A state together with its derivatives with respect to each parameter.
struct ParamDerivatives {
    DensityMatrix base_state;
    std::vector<ComplexMatrix> derivs;

    [[nodiscard]] std::size_t num_params() const noexcept { return derivs.size(); }
};

struct Qfim {
    RealMatrix matrix;
    std::vector<ComplexMatrix> slds;
    int support_dim = 0;
};

/// Benchmark from fully thermalized probes measured separately.
struct ThermalFim {
    RealVector diagonal;

    [[nodiscard]] RealMatrix matrix() const { return diagonal.asDiagonal(); }
    [[nodiscard]] double trace() const { return diagonal.sum(); }
    [[nodiscard]] double determinant() const { return diagonal.prod(); }
};

struct EstimationReport {
    Qfim qfim;
    ThermalFim thermal;
    double eta_joint = 0.0;
    double eta_acc = -std::numeric_limits<double>::infinity(); ///< natural log
    double sld_commutator_norm = 0.0;
    bool singular = true;

    [[nodiscard]] double det_qfim() const { return qfim.matrix.determinant(); }
    [[nodiscard]] double trace_qfim() const { return qfim.matrix.trace(); }
};

// ---------------------------------------------------------------------------
// SLDs and QFIM.

namespace detail {

/// Matrix of 2 / (a_j + a_k) over the support, zero elsewhere; validates
/// that the derivative does not couple kernel to kernel.
inline ComplexMatrix sld_in_eigenbasis(const HermitianEigen &eig, const ComplexMatrix &drho) {
    const ComplexMatrix m = eig.vectors.adjoint() * drho * eig.vectors;
    const Eigen::Index d = m.rows();
    ComplexMatrix l = ComplexMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            const double s = eig.values(j) + eig.values(k);
            if (s > kSupportCutoff) {
                l(j, k) = 2.0 * m(j, k) / s;
            } else if (std::abs(m(j, k)) > kKernelLeakTol) {
                throw NumericalError("sld: derivative has weight " + std::to_string(std::abs(m(j, k))) +
                                     " on the kernel of the state");
            }
        }
    }
    return l;
}

inline int support_dim(const HermitianEigen &eig) {
    int n = 0;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        if (2.0 * eig.values(k) > kSupportCutoff) {
            ++n;
        }
    }
    return n;
}

} // namespace detail

/**
 * Symmetric logarithmic derivative L with (L rho + rho L) / 2 = drho on the
 * support of rho. Throws NumericalError if drho has kernel-to-kernel weight
 * above 1e-8.
 */
inline ComplexMatrix sld(const DensityMatrix &rho, const ComplexMatrix &drho) {
    if (drho.rows() != rho.dim() || drho.cols() != rho.dim()) {
        throw std::invalid_argument("sld: derivative dimension mismatch");
    }
    const auto eig = herm_eig(rho.matrix());
    const ComplexMatrix l = detail::sld_in_eigenbasis(eig, hermitian_part(drho));
    return hermitian_part(eig.vectors * l * eig.vectors.adjoint());
}

inline Qfim qfim(const ParamDerivatives &pd) {
    const auto &rho = pd.base_state;
    const auto eig = herm_eig(rho.matrix());
    const auto n = static_cast<Eigen::Index>(pd.num_params());
    std::vector<ComplexMatrix> local;
    Qfim out;
    out.support_dim = detail::support_dim(eig);
    for (const auto &d : pd.derivs) {
        if (d.rows() != rho.dim() || d.cols() != rho.dim()) {
            throw std::invalid_argument("qfim: derivative dimension mismatch");
        }
        local.push_back(detail::sld_in_eigenbasis(eig, hermitian_part(d)));
        out.slds.push_back(hermitian_part(eig.vectors * local.back() * eig.vectors.adjoint()));
    }
    // F_ij = Re sum_ab alpha_a L_i(a,b) L_j(b,a) in the eigenbasis.
    out.matrix = RealMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const auto &li = local[static_cast<std::size_t>(i)];
            const auto &lj = local[static_cast<std::size_t>(j)];
            double acc = 0.0;
            for (Eigen::Index a = 0; a < li.rows(); ++a) {
                const double w = eig.values(a);
                if (w <= 0.0) {
                    continue;
                }
                acc += w * (li.row(a) * lj.col(a)).value().real();
            }
            out.matrix(i, j) = acc;
            out.matrix(j, i) = acc;
        }
    }
    return out;
}

/// Max-norm of the pairwise SLD commutators.
inline double sld_commutator_norm(const std::vector<ComplexMatrix> &slds) {
    double worst = 0.0;
    for (std::size_t i = 0; i < slds.size(); ++i) {
        for (std::size_t j = i + 1; j < slds.size(); ++j) {
            worst = std::max(worst, max_abs(commutator(slds[i], slds[j])));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Benchmarks and figures of merit.

/// Var(H) / T^4 per bath for H = omega sigma_z / 2 in its Gibbs state.
inline ThermalFim thermal_fim(const std::vector<BathSpec> &baths) {
    ThermalFim out{RealVector::Zero(static_cast<Eigen::Index>(baths.size()))};
    for (std::size_t i = 0; i < baths.size(); ++i) {
        const auto &b = baths[i];
        b.validate();
        const ComplexMatrix h = 0.5 * b.frequency * ops::pauli(Axis::Z);
        const ComplexMatrix rho = thermal_state(b).matrix();
        const double mean = (rho * h).trace().real();
        const double second = (rho * h * h).trace().real();
        out.diagonal(static_cast<Eigen::Index>(i)) =
            (second - mean * mean) / std::pow(b.temperature, 4);
    }
    return out;
}

struct EtaMetrics {
    double eta_joint = 0.0;
    double eta_acc = 0.0;
};

/// eta_joint = Tr F_Q / Tr F_th and eta_acc = ln(det F_Q / det F_th), with
/// eta_acc = -inf when det F_Q <= 1e-14.
inline EtaMetrics eta_metrics(const RealMatrix &fq, const ThermalFim &thermal) {
    if (fq.rows() != thermal.diagonal.size() || fq.cols() != fq.rows()) {
        throw std::invalid_argument("eta_metrics: dimension mismatch");
    }
    const double tr_th = thermal.trace();
    const double det_th = thermal.determinant();
    if (!(tr_th > 0.0) || !(det_th > 0.0)) {
        throw std::invalid_argument("eta_metrics: degenerate thermal benchmark");
    }
    EtaMetrics m;
    m.eta_joint = fq.trace() / tr_th;
    const double det = fq.determinant();
    m.eta_acc = det > kEtaAccDetFloor ? std::log(det / det_th)
                                      : -std::numeric_limits<double>::infinity();
    return m;
}

inline EtaMetrics eta_metrics(const Qfim &q, const ThermalFim &thermal) {
    return eta_metrics(q.matrix, thermal);
}

/// Determinant threshold below which a QFIM counts as singular: 1e-12 for
/// N <= 2, scaled by max|F|^N beyond.
inline double singular_threshold(const RealMatrix &fq) {
    if (fq.rows() <= 2) {
        return kSingularDetTol;
    }
    const double scale = fq.size() == 0 ? 0.0 : fq.cwiseAbs().maxCoeff();
    return kSingularDetTol * std::pow(scale, static_cast<double>(fq.rows()));
}

inline bool is_singular(const RealMatrix &fq) {
    return fq.determinant() <= singular_threshold(fq);
}

struct SingularityResult {
    bool singular = false;
    std::optional<double> c;
};

/**
 * Proportionality test for a two-parameter qubit family: singular iff
 * drho_1 = c drho_2 for real c, judged by Cauchy-Schwarz equality in the
 * Frobenius inner product. A zero derivative is the trivial case c = 0.
 */
inline SingularityResult singularity_test(const ParamDerivatives &pd) {
    if (pd.base_state.dim() != 2) {
        throw std::invalid_argument("singularity_test: state must be a qubit");
    }
    if (pd.num_params() != 2) {
        throw std::invalid_argument("singularity_test: exactly two parameters required");
    }
    const ComplexMatrix &d1 = pd.derivs[0];
    const ComplexMatrix &d2 = pd.derivs[1];
    const double n1 = d1.squaredNorm();
    const double n2 = d2.squaredNorm();
    constexpr double zero = 1e-24;
    if (n1 <= zero || n2 <= zero) {
        return {true, 0.0};
    }
    const cplx inner = (d2.adjoint() * d1).trace(); // <d2, d1>_F
    const bool equality = std::abs(std::norm(inner) - n1 * n2) <= 1e-10 * n1 * n2;
    const cplx ratio = inner / n2;
    const bool real = std::abs(ratio.imag()) <= 1e-10 * std::max(1.0, std::abs(ratio));
    if (equality && real) {
        return {true, ratio.real()};
    }
    return {false, std::nullopt};
}

// ---------------------------------------------------------------------------
// Numerical derivatives.

using StateFamily = std::function<DensityMatrix(std::span<const double>)>;
using StateListFamily = std::function<std::vector<DensityMatrix>(std::span<const double>)>;

inline double default_step(double theta) { return std::max(1e-5, 1e-6 * std::abs(theta)); }

namespace detail {

inline std::vector<ComplexMatrix> central_difference(const StateListFamily &family,
                                                     std::vector<double> point, std::size_t mu,
                                                     double h) {
    const double x0 = point[mu];
    point[mu] = x0 + h;
    const auto plus = family(point);
    point[mu] = x0 - h;
    const auto minus = family(point);
    if (plus.size() != minus.size()) {
        throw NumericalError("finite_diff_derivatives: evaluator changed output count");
    }
    std::vector<ComplexMatrix> d;
    d.reserve(plus.size());
    for (std::size_t k = 0; k < plus.size(); ++k) {
        d.emplace_back((plus[k].matrix() - minus[k].matrix()) / (2.0 * h));
    }
    return d;
}

} // namespace detail

/**
 * Central-difference derivatives of every state returned by `family`.
 * Each derivative is checked against the half-step estimate; a change above
 * 1e-6 relative to the derivative's scale (plus a 1e-9 absolute floor)
 * throws NumericalError.
 */
inline std::vector<ParamDerivatives> finite_diff_derivatives_multi(const StateListFamily &family,
                                                                   std::span<const double> theta,
                                                                   std::span<const double> steps = {}) {
    if (!steps.empty() && steps.size() != theta.size()) {
        throw std::invalid_argument("finite_diff_derivatives: one step per parameter required");
    }
    const std::vector<double> point(theta.begin(), theta.end());
    const auto base = family(point);
    std::vector<ParamDerivatives> out;
    out.reserve(base.size());
    for (const auto &b : base) {
        out.push_back({b, {}});
    }
    for (std::size_t mu = 0; mu < point.size(); ++mu) {
        const double h = steps.empty() ? default_step(point[mu]) : steps[mu];
        if (!(h > 0.0)) {
            throw std::invalid_argument("finite_diff_derivatives: steps must be positive");
        }
        auto coarse = detail::central_difference(family, point, mu, h);
        const auto fine = detail::central_difference(family, point, mu, 0.5 * h);
        for (std::size_t k = 0; k < coarse.size(); ++k) {
            const double scale = max_abs(fine[k]);
            const double change = max_abs(coarse[k] - fine[k]);
            if (change > kRichardsonTol * scale + kRichardsonAbsFloor) {
                throw NumericalError("finite_diff_derivatives: step halving changed derivative " +
                                     std::to_string(mu) + " by " + std::to_string(change));
            }
            out[k].derivs.push_back(std::move(coarse[k]));
        }
    }
    return out;
}

inline ParamDerivatives finite_diff_derivatives(const StateFamily &family, std::span<const double> theta,
                                                std::span<const double> steps = {}) {
    const StateListFamily wrapped = [&family](std::span<const double> x) {
        return std::vector<DensityMatrix>{family(x)};
    };
    return std::move(finite_diff_derivatives_multi(wrapped, theta, steps).front());
}

// ---------------------------------------------------------------------------
// Classical Fisher information for a fixed POVM.

inline void validate_povm(const std::vector<ComplexMatrix> &povm, int dim) {
    if (povm.empty()) {
        throw std::invalid_argument("classical_fim: POVM must have at least one effect");
    }
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (const auto &e : povm) {
        if (e.rows() != dim || e.cols() != dim) {
            throw std::invalid_argument("classical_fim: effect dimension mismatch");
        }
        if (hermiticity_residual(e) > 1e-10) {
            throw std::invalid_argument("classical_fim: effect is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(e), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw std::invalid_argument("classical_fim: effect is not positive semidefinite");
        }
        total += e;
    }
    if (max_abs(total - ComplexMatrix::Identity(dim, dim)) > 1e-10) {
        throw std::invalid_argument("classical_fim: effects do not sum to the identity");
    }
}

/**
 * Classical Fisher information of the outcome distribution p_j = Tr[rho Pi_j],
 * with central-difference probability derivatives. Outcomes with
 * p_j < 1e-12 are skipped.
 */
inline RealMatrix classical_fim(const StateFamily &family, std::span<const double> theta,
                                const std::vector<ComplexMatrix> &povm,
                                std::span<const double> steps = {}) {
    if (!steps.empty() && steps.size() != theta.size()) {
        throw std::invalid_argument("classical_fim: one step per parameter required");
    }
    std::vector<double> point(theta.begin(), theta.end());
    const auto rho = family(point);
    validate_povm(povm, rho.dim());
    const auto probs = [&povm](const DensityMatrix &r) {
        RealVector p(static_cast<Eigen::Index>(povm.size()));
        for (std::size_t j = 0; j < povm.size(); ++j) {
            p(static_cast<Eigen::Index>(j)) = (r.matrix() * povm[j]).trace().real();
        }
        return p;
    };
    const RealVector p0 = probs(rho);
    const auto n = static_cast<Eigen::Index>(point.size());
    RealMatrix dp(n, p0.size());
    for (Eigen::Index mu = 0; mu < n; ++mu) {
        const auto m = static_cast<std::size_t>(mu);
        const double h = steps.empty() ? default_step(point[m]) : steps[m];
        const double x0 = point[m];
        point[m] = x0 + h;
        const RealVector pp = probs(family(point));
        point[m] = x0 - h;
        const RealVector pm = probs(family(point));
        point[m] = x0;
        dp.row(mu) = (pp - pm).transpose() / (2.0 * h);
    }
    RealMatrix f = RealMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < p0.size(); ++j) {
        if (p0(j) < 1e-12) {
            continue;
        }
        f += dp.col(j) * dp.col(j).transpose() / p0(j);
    }
    return f;
}

// ---------------------------------------------------------------------------

/**
 * Report for a product state whose factors are listed in `factors`: the QFIM
 * is the sum of the factor QFIMs. For a single factor the SLDs are kept.
 */
inline EstimationReport make_report(const std::vector<ParamDerivatives> &factors,
                                    const std::vector<BathSpec> &baths) {
    if (factors.empty()) {
        throw std::invalid_argument("make_report: no states");
    }
    const auto n = static_cast<Eigen::Index>(baths.size());
    EstimationReport rep;
    rep.qfim.matrix = RealMatrix::Zero(n, n);
    for (const auto &f : factors) {
        if (static_cast<Eigen::Index>(f.num_params()) != n) {
            throw std::invalid_argument("make_report: derivative count does not match bath count");
        }
        auto q = qfim(f);
        rep.qfim.matrix += q.matrix;
        rep.qfim.support_dim = std::max(rep.qfim.support_dim, q.support_dim);
        rep.sld_commutator_norm = std::max(rep.sld_commutator_norm, sld_commutator_norm(q.slds));
        if (factors.size() == 1) {
            rep.qfim.slds = std::move(q.slds);
        }
    }
    rep.thermal = thermal_fim(baths);
    const auto eta = eta_metrics(rep.qfim.matrix, rep.thermal);
    rep.eta_joint = eta.eta_joint;
    rep.eta_acc = eta.eta_acc;
    rep.singular = is_singular(rep.qfim.matrix);
    return rep;
}

} // namespace colltherm
