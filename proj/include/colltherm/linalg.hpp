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
 * @file linalg.hpp
 * Dense complex linear algebra for small multipartite Hilbert spaces.
 *
 * Tensor factors are ordered most-significant first, matching kron(A, B):
 * the composite index of (a, b) is a * dim(B) + b. Vectorization is
 * row-major, |i><j| -> D * i + j, so conjugation by U acts on vectorized
 * states as kron(U, conj(U)).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace colltherm {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kEigInputTol = 1e-10;
inline constexpr std::size_t kMaxDimension = 256;

/// Thrown when a computation leaves its numerically meaningful regime.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Largest absolute entry.
inline double max_abs(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const ComplexMatrix &m) {
    return max_abs(m - m.adjoint());
}

inline ComplexMatrix hermitian_part(const ComplexMatrix &m) {
    return 0.5 * (m + m.adjoint());
}

inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) {
    return a * b - b * a;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline std::size_t product(std::span<const int> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

/**
 * Quantum state on a composite space. Holds the matrix together with the
 * dimensions of its tensor factors. Construction checks shapes only; the
 * physical invariants are checked by check_state().
 */
class DensityMatrix {
  public:
    DensityMatrix() = default;

    explicit DensityMatrix(ComplexMatrix matrix)
        : DensityMatrix(std::move(matrix), std::vector<int>{}) {}

    DensityMatrix(ComplexMatrix matrix, std::vector<int> factor_dims)
        : matrix_(std::move(matrix)), dims_(std::move(factor_dims)) {
        if (matrix_.rows() != matrix_.cols()) {
            throw std::invalid_argument("DensityMatrix: matrix must be square");
        }
        if (dims_.empty()) {
            dims_.push_back(static_cast<int>(matrix_.rows()));
        }
        for (int d : dims_) {
            if (d < 1) {
                throw std::invalid_argument("DensityMatrix: factor dimensions must be positive");
            }
        }
        if (product(dims_) != static_cast<std::size_t>(matrix_.rows())) {
            throw std::invalid_argument("DensityMatrix: factor dimensions do not multiply to " +
                                        std::to_string(matrix_.rows()));
        }
    }

    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] const std::vector<int> &factor_dims() const noexcept { return dims_; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
    [[nodiscard]] std::size_t num_factors() const noexcept { return dims_.size(); }
    [[nodiscard]] cplx operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }
    [[nodiscard]] cplx trace() const { return matrix_.trace(); }

  private:
    ComplexMatrix matrix_;
    std::vector<int> dims_;
};

/// |k><k| on a single factor of dimension dim.
inline DensityMatrix basis_state(int dim, int k) {
    if (k < 0 || k >= dim) {
        throw std::invalid_argument("basis_state: index out of range");
    }
    ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return DensityMatrix(std::move(m));
}

inline DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    std::vector<int> dims = a.factor_dims();
    dims.insert(dims.end(), b.factor_dims().begin(), b.factor_dims().end());
    return DensityMatrix(kron(a.matrix(), b.matrix()), std::move(dims));
}

struct StateResiduals {
    double hermiticity = 0.0;
    double trace = 0.0;
    double min_eigenvalue = 0.0;
};

inline StateResiduals state_residuals(const DensityMatrix &rho) {
    StateResiduals r;
    r.hermiticity = hermiticity_residual(rho.matrix());
    r.trace = std::abs(rho.trace() - 1.0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho.matrix()),
                                                    Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues().minCoeff();
    return r;
}

/// True when rho is Hermitian, unit trace and positive semidefinite within the
/// library tolerances.
inline bool check_state(const DensityMatrix &rho, double herm_tol = kHermitianTol,
                        double trace_tol = kTraceTol, double pos_tol = kPositivityTol) {
    const auto r = state_residuals(rho);
    return r.hermiticity <= herm_tol && r.trace <= trace_tol && r.min_eigenvalue >= -pos_tol;
}

// ---------------------------------------------------------------------------
// Site bookkeeping for operators acting on a subset of tensor factors.

namespace detail {

/// Decomposes composite indices into (digits on `sites`, remainder) for fast
/// local operator application. offset[a] is the composite-index contribution
/// of the local multi-index a; base[i] is i with the site digits zeroed.
struct SiteMap {
    std::size_t local_dim = 1;
    std::vector<std::size_t> offset; // size local_dim
    std::vector<std::size_t> local;  // size D: local multi-index of i
    std::vector<std::size_t> base;   // size D: i minus its site contribution

    SiteMap(std::span<const int> dims, std::span<const int> sites) {
        const std::size_t nf = dims.size();
        std::vector<std::size_t> stride(nf, 1);
        for (std::size_t k = nf; k-- > 1;) {
            stride[k - 1] = stride[k] * static_cast<std::size_t>(dims[k]);
        }
        std::vector<bool> seen(nf, false);
        for (int s : sites) {
            if (s < 0 || static_cast<std::size_t>(s) >= nf) {
                throw std::out_of_range("site index " + std::to_string(s) + " out of range");
            }
            if (seen[static_cast<std::size_t>(s)]) {
                throw std::invalid_argument("duplicate site index " + std::to_string(s));
            }
            seen[static_cast<std::size_t>(s)] = true;
            local_dim *= static_cast<std::size_t>(dims[static_cast<std::size_t>(s)]);
        }
        offset.assign(local_dim, 0);
        for (std::size_t a = 0; a < local_dim; ++a) {
            std::size_t rem = a;
            std::size_t off = 0;
            for (std::size_t k = sites.size(); k-- > 0;) {
                const auto s = static_cast<std::size_t>(sites[k]);
                const auto d = static_cast<std::size_t>(dims[s]);
                off += (rem % d) * stride[s];
                rem /= d;
            }
            offset[a] = off;
        }
        const std::size_t total = product(dims);
        local.assign(total, 0);
        base.assign(total, 0);
        for (std::size_t i = 0; i < total; ++i) {
            std::size_t loc = 0;
            std::size_t contrib = 0;
            for (int s : sites) {
                const auto su = static_cast<std::size_t>(s);
                const auto d = static_cast<std::size_t>(dims[su]);
                const std::size_t digit = (i / stride[su]) % d;
                loc = loc * d + digit;
                contrib += digit * stride[su];
            }
            local[i] = loc;
            base[i] = i - contrib;
        }
    }
};

inline std::vector<int> complement(std::size_t num_factors, std::span<const int> sites) {
    std::vector<int> rest;
    for (std::size_t k = 0; k < num_factors; ++k) {
        if (std::find(sites.begin(), sites.end(), static_cast<int>(k)) == sites.end()) {
            rest.push_back(static_cast<int>(k));
        }
    }
    return rest;
}

} // namespace detail

/**
 * Reduced state on the factors listed in `keep` (in increasing factor
 * order). Throws std::out_of_range for a bad index and std::invalid_argument
 * for an empty or repeated index set.
 */
inline DensityMatrix partial_trace(const DensityMatrix &rho, std::vector<int> keep) {
    if (keep.empty()) {
        throw std::invalid_argument("partial_trace: keep set must be nonempty");
    }
    std::sort(keep.begin(), keep.end());
    const auto &dims = rho.factor_dims();
    for (int k : keep) {
        if (k < 0 || static_cast<std::size_t>(k) >= dims.size()) {
            throw std::out_of_range("partial_trace: factor index " + std::to_string(k) +
                                    " out of range");
        }
    }
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
        throw std::invalid_argument("partial_trace: repeated factor index");
    }
    const auto traced = detail::complement(dims.size(), keep);
    const detail::SiteMap km(dims, keep);
    const detail::SiteMap tm(dims, traced);

    const auto dk = static_cast<Eigen::Index>(km.local_dim);
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    const auto &m = rho.matrix();
    for (Eigen::Index b = 0; b < dk; ++b) {
        for (Eigen::Index a = 0; a < dk; ++a) {
            cplx acc{0.0, 0.0};
            for (std::size_t t = 0; t < tm.local_dim; ++t) {
                acc += m(static_cast<Eigen::Index>(km.offset[static_cast<std::size_t>(a)] + tm.offset[t]),
                         static_cast<Eigen::Index>(km.offset[static_cast<std::size_t>(b)] + tm.offset[t]));
            }
            out(a, b) = acc;
        }
    }
    std::vector<int> kept_dims;
    for (int k : keep) {
        kept_dims.push_back(dims[static_cast<std::size_t>(k)]);
    }
    return DensityMatrix(std::move(out), std::move(kept_dims));
}

/// rho -> (U on `sites`) rho (U on `sites`)^dagger. U acts on the listed sites
/// in the order given.
inline DensityMatrix apply_unitary(const DensityMatrix &rho, const ComplexMatrix &u,
                                   std::span<const int> sites) {
    const detail::SiteMap sm(rho.factor_dims(), sites);
    if (static_cast<std::size_t>(u.rows()) != sm.local_dim || u.rows() != u.cols()) {
        throw std::invalid_argument("apply_unitary: operator dimension does not match sites");
    }
    const auto &m = rho.matrix();
    const Eigen::Index dim = m.rows();
    const auto ld = static_cast<Eigen::Index>(sm.local_dim);

    ComplexMatrix left(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            cplx acc{0.0, 0.0};
            for (Eigen::Index a = 0; a < ld; ++a) {
                acc += u(static_cast<Eigen::Index>(sm.local[iu]), a) *
                       m(static_cast<Eigen::Index>(sm.base[iu] + sm.offset[static_cast<std::size_t>(a)]), j);
            }
            left(i, j) = acc;
        }
    }
    ComplexMatrix out(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        for (Eigen::Index i = 0; i < dim; ++i) {
            cplx acc{0.0, 0.0};
            for (Eigen::Index b = 0; b < ld; ++b) {
                acc += left(i, static_cast<Eigen::Index>(sm.base[ju] + sm.offset[static_cast<std::size_t>(b)])) *
                       std::conj(u(static_cast<Eigen::Index>(sm.local[ju]), b));
            }
            out(i, j) = acc;
        }
    }
    return DensityMatrix(std::move(out), rho.factor_dims());
}

inline DensityMatrix apply_unitary(const DensityMatrix &rho, const ComplexMatrix &u,
                                   std::initializer_list<int> sites) {
    return apply_unitary(rho, u, std::span<const int>(sites.begin(), sites.size()));
}

inline DensityMatrix apply_unitary(const DensityMatrix &rho, const ComplexMatrix &u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw std::invalid_argument("apply_unitary: dimension mismatch");
    }
    return DensityMatrix(u * rho.matrix() * u.adjoint(), rho.factor_dims());
}

// ---------------------------------------------------------------------------
// Vectorization.

struct VectorizedState {
    int dim = 0;
    ComplexVector entries; // size dim * dim, |i><j| at dim * i + j
};

inline VectorizedState vectorize(const DensityMatrix &rho) {
    const int d = rho.dim();
    VectorizedState v{d, ComplexVector(static_cast<Eigen::Index>(d) * d)};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            v.entries(static_cast<Eigen::Index>(d) * i + j) = rho(i, j);
        }
    }
    return v;
}

inline ComplexVector vectorize(const ComplexMatrix &m) {
    ComplexVector v(m.rows() * m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            v(m.cols() * i + j) = m(i, j);
        }
    }
    return v;
}

inline ComplexMatrix devectorize_matrix(const ComplexVector &v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
        throw std::invalid_argument("devectorize: entry count is not dim^2");
    }
    ComplexMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            m(i, j) = v(static_cast<Eigen::Index>(dim) * i + j);
        }
    }
    return m;
}

inline DensityMatrix devectorize(const VectorizedState &v, std::vector<int> factor_dims = {}) {
    if (v.entries.size() != static_cast<Eigen::Index>(v.dim) * v.dim) {
        throw std::invalid_argument("devectorize: entry count is not dim^2");
    }
    if (!factor_dims.empty() && product(factor_dims) != static_cast<std::size_t>(v.dim)) {
        throw std::invalid_argument("devectorize: factor dimensions do not match");
    }
    return DensityMatrix(devectorize_matrix(v.entries, v.dim), std::move(factor_dims));
}

/// Linear map on vectorized D x D matrices.
class Superoperator {
  public:
    Superoperator() = default;
    explicit Superoperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
        const auto n = matrix_.rows();
        const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
        if (matrix_.rows() != matrix_.cols() || d * d != n) {
            throw std::invalid_argument("Superoperator: matrix must be D^2 x D^2");
        }
        dim_ = static_cast<int>(d);
    }

    static Superoperator identity(int dim) {
        return Superoperator(ComplexMatrix::Identity(static_cast<Eigen::Index>(dim) * dim,
                                                     static_cast<Eigen::Index>(dim) * dim));
    }

    /// Conjugation rho -> U rho U^dagger.
    static Superoperator conjugation(const ComplexMatrix &u) {
        return Superoperator(kron(u, u.conjugate()));
    }

    [[nodiscard]] const ComplexMatrix &matrix() const noexcept { return matrix_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }

    [[nodiscard]] ComplexMatrix apply(const ComplexMatrix &m) const {
        if (m.rows() != dim_ || m.cols() != dim_) {
            throw std::invalid_argument("Superoperator::apply: dimension mismatch");
        }
        return devectorize_matrix(matrix_ * vectorize(m), dim_);
    }

    [[nodiscard]] DensityMatrix apply(const DensityMatrix &rho) const {
        return DensityMatrix(apply(rho.matrix()), rho.factor_dims());
    }

    /// Composition: (*this) after `first`.
    [[nodiscard]] Superoperator after(const Superoperator &first) const {
        return Superoperator(matrix_ * first.matrix_);
    }

    /// Choi matrix sum_ij |i><j| (x) S(|i><j|).
    [[nodiscard]] ComplexMatrix choi() const {
        const Eigen::Index d = dim_;
        ComplexMatrix c = ComplexMatrix::Zero(d * d, d * d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                ComplexMatrix e = ComplexMatrix::Zero(d, d);
                e(i, j) = 1.0;
                c.block(i * d, j * d, d, d) = apply(e);
            }
        }
        return c;
    }

  private:
    ComplexMatrix matrix_;
    int dim_ = 0;
};

/// Applies a superoperator to a single tensor factor of rho.
inline DensityMatrix apply_superoperator(const DensityMatrix &rho, const Superoperator &s, int site) {
    const int sites_arr[] = {site};
    const detail::SiteMap sm(rho.factor_dims(), sites_arr);
    if (static_cast<int>(sm.local_dim) != s.dim()) {
        throw std::invalid_argument("apply_superoperator: dimension mismatch");
    }
    const auto &m = rho.matrix();
    const auto &sup = s.matrix();
    const Eigen::Index dim = m.rows();
    const auto ld = static_cast<Eigen::Index>(sm.local_dim);
    ComplexMatrix out(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        for (Eigen::Index i = 0; i < dim; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            const Eigen::Index row = static_cast<Eigen::Index>(sm.local[iu]) * ld +
                                     static_cast<Eigen::Index>(sm.local[ju]);
            cplx acc{0.0, 0.0};
            for (Eigen::Index a = 0; a < ld; ++a) {
                const auto ri = static_cast<Eigen::Index>(sm.base[iu] + sm.offset[static_cast<std::size_t>(a)]);
                for (Eigen::Index b = 0; b < ld; ++b) {
                    const cplx coeff = sup(row, a * ld + b);
                    if (coeff != cplx{0.0, 0.0}) {
                        acc += coeff * m(ri, static_cast<Eigen::Index>(sm.base[ju] + sm.offset[static_cast<std::size_t>(b)]));
                    }
                }
            }
            out(i, j) = acc;
        }
    }
    return DensityMatrix(std::move(out), rho.factor_dims());
}

// ---------------------------------------------------------------------------
// Spectral tools.

struct HermitianEigen {
    RealVector values;    // ascending
    ComplexMatrix vectors; // orthonormal columns
};

/**
 * Eigendecomposition of a Hermitian matrix, eigenvalues ascending. Each
 * eigenvector is rephased so its first component with modulus above 1e-12 is
 * real and positive, which makes downstream SLDs reproducible.
 */
inline HermitianEigen herm_eig(const ComplexMatrix &h) {
    if (h.rows() != h.cols()) {
        throw std::invalid_argument("herm_eig: matrix must be square");
    }
    if (hermiticity_residual(h) > kEigInputTol) {
        throw std::invalid_argument("herm_eig: input is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
    if (es.info() != Eigen::Success) {
        throw NumericalError("herm_eig: eigensolver did not converge");
    }
    HermitianEigen out{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
        for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
            const cplx c = out.vectors(r, k);
            if (std::abs(c) > 1e-12) {
                out.vectors.col(k) *= std::conj(c) / std::abs(c);
                out.vectors(r, k) = std::abs(c);
                break;
            }
        }
    }
    return out;
}

/// exp(scale * m), Pade scaling-and-squaring.
inline ComplexMatrix matrix_exp(const ComplexMatrix &m, cplx scale = 1.0) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("matrix_exp: matrix must be square");
    }
    const ComplexMatrix a = scale * m;
    return a.exp();
}

} // namespace colltherm
