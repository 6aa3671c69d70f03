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

#include <catch_amalgamated.hpp>

#include <random>

#include "colltherm/channels.hpp"
#include "colltherm/linalg.hpp"
#include "colltherm/testing/oracles.hpp"
#include "colltherm/testing/random.hpp"

using namespace colltherm;
using colltherm::testing::random_hermitian;
using colltherm::testing::random_state;
using colltherm::testing::random_unitary;

TEST_CASE("kron of identities and diagonals", "[linalg][kron]") {
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    CHECK(max_abs(kron(i2, i2) - ComplexMatrix::Identity(4, 4)) == 0.0);

    const ComplexMatrix z = ops::pauli(Axis::Z);
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected.diagonal() << 1.0, -1.0, -1.0, 1.0;
    CHECK(max_abs(kron(z, z) - expected) == 0.0);
}

TEST_CASE("kron of a quarter-pi x rotation with its conjugate", "[linalg][kron]") {
    const ComplexMatrix u = oracles::rotation_quarter_pi();
    CHECK(max_abs(kron(u, u.conjugate()) - oracles::rotation_superoperator_quarter_pi()) < 1e-15);
}

TEST_CASE("kron is associative on random triples", "[linalg][kron][property]") {
    // Small-integer entries make every product exact, so any difference is a
    // layout error rather than rounding.
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_int_distribution<int> entry(-9, 9);
    const auto random_int = [&](int rows, int cols) {
        ComplexMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = cplx(entry(rng), entry(rng));
        return m;
    };
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix a = random_int(dim(rng), dim(rng));
        const ComplexMatrix b = random_int(dim(rng), dim(rng));
        const ComplexMatrix c = random_int(dim(rng), dim(rng));
        CHECK(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) == 0.0);
    }
}

TEST_CASE("partial trace of product and Bell states", "[linalg][partial_trace]") {
    std::mt19937_64 rng(3);
    const DensityMatrix a = random_state(rng, 2);
    const DensityMatrix b = random_state(rng, 3);
    const DensityMatrix ab = tensor(a, b);
    REQUIRE(ab.factor_dims() == std::vector<int>{2, 3});
    const DensityMatrix rb = partial_trace(ab, {1});
    CHECK(rb.factor_dims() == std::vector<int>{3});
    CHECK(max_abs(rb.matrix() - b.matrix()) < 1e-14);
    CHECK(max_abs(partial_trace(ab, {0}).matrix() - a.matrix()) < 1e-14);

    ComplexVector phi = ComplexVector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const DensityMatrix bell(phi * phi.adjoint(), {2, 2});
    CHECK(max_abs(partial_trace(bell, {1}).matrix() - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-15);
}

TEST_CASE("partial trace after a full swap transfers the thermal populations", "[linalg][partial_trace]") {
    const DensityMatrix probe = thermal_state(1.0, 2.0);
    const DensityMatrix joint = tensor(probe, basis_state(2, 1));
    const DensityMatrix out = apply_unitary(joint, oracles::collision_unitary(std::numbers::pi / 2));
    const DensityMatrix anc = partial_trace(out, {1});
    const double l0 = oracles::lambda0(1.0, 2.0);
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = l0;
    expected(1, 1) = 1.0 - l0;
    CHECK(max_abs(anc.matrix() - expected) < 1e-14);
}

TEST_CASE("partial trace rejects bad index sets", "[linalg][partial_trace]") {
    const DensityMatrix rho = tensor(basis_state(2, 0), basis_state(2, 1));
    CHECK_THROWS_AS(partial_trace(rho, {2}), std::out_of_range);
    CHECK_THROWS_AS(partial_trace(rho, {-1}), std::out_of_range);
    CHECK_THROWS_AS(partial_trace(rho, {}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, {0, 0}), std::invalid_argument);
}

TEST_CASE("partial trace keeps multi-factor order", "[linalg][partial_trace]") {
    std::mt19937_64 rng(5);
    const DensityMatrix a = random_state(rng, 2);
    const DensityMatrix b = random_state(rng, 3);
    const DensityMatrix c = random_state(rng, 2);
    const DensityMatrix abc = tensor(tensor(a, b), c);
    const DensityMatrix ac = partial_trace(abc, {2, 0});
    CHECK(ac.factor_dims() == std::vector<int>{2, 2});
    CHECK(max_abs(ac.matrix() - tensor(a, c).matrix()) < 1e-14);
}

TEST_CASE("partial trace preserves trace and hermiticity under random evolution",
          "[linalg][partial_trace][property]") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        const DensityMatrix rho(random_state(rng, 8).matrix(), {2, 2, 2});
        const DensityMatrix evolved = apply_unitary(rho, random_unitary(rng, 8));
        for (const auto &keep : {std::vector<int>{0}, std::vector<int>{1, 2}, std::vector<int>{0, 2}}) {
            const DensityMatrix r = partial_trace(evolved, keep);
            CHECK(std::abs(r.trace() - 1.0) <= 1e-12);
            CHECK(hermiticity_residual(r.matrix()) <= 1e-12);
        }
    }
}

TEST_CASE("local unitaries agree with the full Kronecker embedding", "[linalg][apply_unitary]") {
    std::mt19937_64 rng(23);
    const DensityMatrix rho(random_state(rng, 12).matrix(), {2, 3, 2});
    const ComplexMatrix u = random_unitary(rng, 4);
    // Acting on sites {0, 2} equals conjugation by the permuted embedding.
    const DensityMatrix local = apply_unitary(rho, u, {0, 2});
    ComplexMatrix full = ComplexMatrix::Zero(12, 12);
    for (int i0 = 0; i0 < 2; ++i0)
        for (int i1 = 0; i1 < 3; ++i1)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int j0 = 0; j0 < 2; ++j0)
                    for (int j2 = 0; j2 < 2; ++j2)
                        full(i0 * 6 + i1 * 2 + i2, j0 * 6 + i1 * 2 + j2) = u(i0 * 2 + i2, j0 * 2 + j2);
    CHECK(max_abs(local.matrix() - full * rho.matrix() * full.adjoint()) < 1e-14);

    const ComplexMatrix v = random_unitary(rng, 3);
    const ComplexMatrix emb = kron(kron(ComplexMatrix::Identity(2, 2), v), ComplexMatrix::Identity(2, 2));
    CHECK(max_abs(apply_unitary(rho, v, {1}).matrix() - emb * rho.matrix() * emb.adjoint()) < 1e-14);
}

TEST_CASE("vectorization is row-major and round-trips exactly", "[linalg][vectorize]") {
    const VectorizedState v0 = vectorize(basis_state(2, 0));
    const VectorizedState v1 = vectorize(basis_state(2, 1));
    CHECK(v0.entries == ComplexVector::Unit(4, 0));
    CHECK(v1.entries == ComplexVector::Unit(4, 3));

    const ComplexVector sx = vectorize(ComplexMatrix(0.5 * ops::pauli(Axis::X)));
    ComplexVector expected(4);
    expected << 0.0, 0.5, 0.5, 0.0;
    CHECK(sx == expected);

    std::mt19937_64 rng(29);
    for (int t = 0; t < 20; ++t) {
        const DensityMatrix rho(random_state(rng, 6).matrix(), {2, 3});
        const DensityMatrix back = devectorize(vectorize(rho), rho.factor_dims());
        CHECK(back.matrix() == rho.matrix());
        CHECK(back.factor_dims() == rho.factor_dims());
    }
    CHECK_THROWS_AS(devectorize(VectorizedState{3, ComplexVector::Zero(4)}), std::invalid_argument);
    CHECK_THROWS_AS(devectorize(VectorizedState{2, ComplexVector::Zero(4)}, {3}), std::invalid_argument);
}

TEST_CASE("conjugation superoperator matches U rho U^dagger", "[linalg][superoperator][property]") {
    std::mt19937_64 rng(31);
    for (int d : {2, 3, 4}) {
        for (int t = 0; t < 10; ++t) {
            const ComplexMatrix u = random_unitary(rng, d);
            const DensityMatrix rho = random_state(rng, d);
            const ComplexVector lhs = Superoperator::conjugation(u).matrix() * vectorize(rho).entries;
            const ComplexVector rhs = vectorize(ComplexMatrix(u * rho.matrix() * u.adjoint()));
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("local superoperators agree with embedded unitaries", "[linalg][superoperator]") {
    std::mt19937_64 rng(37);
    const DensityMatrix rho(random_state(rng, 8).matrix(), {2, 2, 2});
    const ComplexMatrix u = random_unitary(rng, 2);
    const DensityMatrix a = apply_superoperator(rho, Superoperator::conjugation(u), 1);
    const DensityMatrix b = apply_unitary(rho, u, {1});
    CHECK(max_abs(a.matrix() - b.matrix()) < 1e-14);
}

TEST_CASE("Hermitian eigendecomposition", "[linalg][herm_eig]") {
    const auto ez = herm_eig(ops::pauli(Axis::Z));
    CHECK(ez.values(0) == Catch::Approx(-1.0));
    CHECK(ez.values(1) == Catch::Approx(1.0));

    const double m = 0.3;
    const double x = 0.2;
    const auto e = herm_eig(oracles::rotated_final_state(m, x));
    const double det = m * (1.0 - m) - x * x;
    CHECK(std::abs(e.values(1) - 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * det))) < 1e-14);
    CHECK(std::abs(e.values(0) - 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * det))) < 1e-14);

    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix h = random_hermitian(rng, 4);
        const auto r = herm_eig(h);
        CHECK(max_abs(h * r.vectors - r.vectors * r.values.asDiagonal()) <= 1e-10);
        CHECK(max_abs(r.vectors.adjoint() * r.vectors - ComplexMatrix::Identity(4, 4)) <= 1e-12);
        for (Eigen::Index k = 1; k < 4; ++k) {
            CHECK(r.values(k) >= r.values(k - 1));
        }
        // Phase convention: first significant component real and positive.
        for (Eigen::Index k = 0; k < 4; ++k) {
            Eigen::Index i = 0;
            while (std::abs(r.vectors(i, k)) <= 1e-12) ++i;
            CHECK(r.vectors(i, k).real() > 0.0);
            CHECK(r.vectors(i, k).imag() == 0.0);
        }
    }
    ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(herm_eig(bad), std::invalid_argument);
}

TEST_CASE("matrix exponential", "[linalg][matrix_exp]") {
    const ComplexMatrix r = matrix_exp(ops::pauli(Axis::X), cplx(0.0, -std::numbers::pi / 4));
    CHECK(max_abs(r - oracles::rotation_quarter_pi()) < 1e-15);

    std::mt19937_64 rng(43);
    const ComplexMatrix h = random_hermitian(rng, 3);
    CHECK(max_abs(matrix_exp(h, 0.0) - ComplexMatrix::Identity(3, 3)) == 0.0);

    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix m = random_hermitian(rng, 2);
        const cplx scale(0.3, -0.7);
        const ComplexMatrix series = oracles::taylor_exp(m, scale);
        CHECK(max_abs(matrix_exp(m, scale) - series) <= 1e-12 * std::max(1.0, max_abs(series)));
    }
}

TEST_CASE("state checks", "[linalg][state]") {
    std::mt19937_64 rng(47);
    CHECK(check_state(random_state(rng, 4)));
    ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_FALSE(check_state(DensityMatrix(neg)));
    CHECK_FALSE(check_state(DensityMatrix(ComplexMatrix(2.0 * basis_state(2, 0).matrix()))));
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Zero(4, 4), {3}), std::invalid_argument);
}
