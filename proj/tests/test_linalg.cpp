#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "linalg/matrix.hpp"

using namespace kvt::lin;

namespace {

const ScalarMode Q{0};

Matrix mk(const std::vector<std::vector<long>>& rows, std::size_t ncols,
          ScalarMode m = Q) {
    Matrix a(rows.size(), ncols, m);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < ncols; ++j)
            a.at(i, j) = ExactScalar::from_int(rows[i][j], m);
    return a;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c,
                     ScalarMode m = Q) {
    std::uniform_int_distribution<long> d(-9, 9);
    Matrix a(r, c, m);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            a.at(i, j) = ExactScalar::from_int(d(rng), m);
    return a;
}

}  // namespace

TEST_CASE("rational scalars reduce and compare structurally") {
    auto half = ExactScalar::from_rational(mpq_class(2, 4));
    CHECK(half == ExactScalar::from_rational(mpq_class(1, 2)));
    CHECK(half.rat().get_den() == 2);
    auto neg = ExactScalar::from_rational(mpq_class(3, -6));
    CHECK(neg.rat().get_den() == 2);  // canonical form keeps denominator positive
    CHECK(neg.rat().get_num() == -1);
    CHECK((half + neg).is_zero());
    CHECK(half.inverse() == ExactScalar::from_int(2, Q));
    CHECK_THROWS_AS(ExactScalar::zero(Q).inverse(), std::domain_error);
}

TEST_CASE("prime field scalars wrap, invert, and refuse mixing") {
    const ScalarMode F7{7};
    auto a = ExactScalar::from_int(-3, F7);
    CHECK(a.residue() == 4);
    auto b = ExactScalar::from_int(5, F7);
    CHECK((a + b).residue() == 2);
    CHECK((a * b).residue() == 6);
    CHECK((-b).residue() == 2);
    for (std::uint64_t r = 1; r < 7; ++r) {
        auto x = ExactScalar::from_residue(r, 7);
        CHECK((x * x.inverse()).is_one());
    }
    CHECK_THROWS_AS(a + ExactScalar::one(Q), std::invalid_argument);
    CHECK_THROWS_AS(a + ExactScalar::one(ScalarMode{5}), std::invalid_argument);
    CHECK_THROWS_AS(ExactScalar::from_int(1, ScalarMode{1}), std::invalid_argument);
}

TEST_CASE("mat_mul matches fixed examples") {
    auto a = mk({{1, 2}, {3, 4}}, 2);
    CHECK(mat_mul(a, Matrix::identity(2, Q)) == a);
    CHECK(mat_mul(Matrix::identity(2, Q), a) == a);
    CHECK(mat_mul(mk({{1, 2}}, 2), mk({{3}, {4}}, 1)) == mk({{11}}, 1));
    Matrix empty_rows(0, 2, Q);
    Matrix r = mat_mul(empty_rows, mk({{1, 2, 3}, {4, 5, 6}}, 3));
    CHECK(r.rows() == 0);
    CHECK(r.cols() == 3);
    CHECK_THROWS_AS(mat_mul(a, mk({{1, 2, 3}}, 3)), std::invalid_argument);
}

TEST_CASE("kron matches fixed examples and uses left-major ordering") {
    CHECK(kron(Matrix::identity(2, Q), Matrix::identity(3, Q)) ==
          Matrix::identity(6, Q));
    CHECK(kron(mk({{2}}, 1), mk({{0, 1}, {1, 0}}, 2)) ==
          mk({{0, 2}, {2, 0}}, 2));
    CHECK(kron(mk({{1}, {0}}, 1), mk({{1, 1}}, 2)) ==
          mk({{1, 1}, {0, 0}}, 2));
}

TEST_CASE("direct_sum matches fixed examples") {
    CHECK(direct_sum(Matrix::identity(1, Q), Matrix::identity(2, Q)) ==
          Matrix::identity(3, Q));
    auto m = mk({{1, 2}, {3, 4}}, 2);
    CHECK(direct_sum(Matrix(0, 0, Q), m) == m);
    CHECK(direct_sum(m, Matrix(0, 0, Q)) == m);
    CHECK(direct_sum(mk({{2}}, 1), mk({{3}}, 1)) == mk({{2, 0}, {0, 3}}, 2));
}

TEST_CASE("mat_trace matches fixed examples") {
    CHECK(mat_trace(Matrix::identity(5, Q)) == ExactScalar::from_int(5, Q));
    CHECK(mat_trace(mk({{0, 1}, {1, 0}}, 2)).is_zero());
    CHECK(mat_trace(Matrix(0, 0, Q)).is_zero());
    CHECK_THROWS_AS(mat_trace(Matrix(2, 3, Q)), std::invalid_argument);
}

TEST_CASE("permutation matrices represent composition covariantly") {
    CHECK(permutation_matrix({0, 1, 2}, Q) == Matrix::identity(3, Q));
    CHECK(permutation_matrix({1, 0}, Q) == mk({{0, 1}, {1, 0}}, 2));
    CHECK_THROWS_AS(permutation_matrix({0, 0}, Q), std::invalid_argument);

    // P(sigma after tau) = P(sigma)*P(tau), brute force over all of S_3.
    std::vector<std::vector<std::size_t>> s3;
    std::vector<std::size_t> base{0, 1, 2};
    do {
        s3.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    CHECK(s3.size() == 6);
    for (const auto& sigma : s3)
        for (const auto& tau : s3) {
            std::vector<std::size_t> comp(3);
            for (std::size_t i = 0; i < 3; ++i) comp[i] = sigma[tau[i]];
            CHECK(permutation_matrix(comp, Q) ==
                  mat_mul(permutation_matrix(sigma, Q),
                          permutation_matrix(tau, Q)));
        }
}

TEST_CASE("algebraic laws hold on random matrices") {
    std::mt19937_64 rng(12345);
    for (int it = 0; it < 25; ++it) {
        std::uniform_int_distribution<std::size_t> dim(0, 4);
        std::size_t m = dim(rng), k = dim(rng), n = dim(rng), q = dim(rng);
        auto a = random_matrix(rng, m, k);
        auto b = random_matrix(rng, k, n);
        auto c = random_matrix(rng, n, q);
        CHECK(mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c)));
        CHECK(mat_mul(a, Matrix::identity(k, Q)) == a);
        CHECK(mat_mul(Matrix::identity(m, Q), a) == a);

        // tr(AB) = tr(BA) whenever both products are square.
        auto ab = mat_mul(a, b);
        if (m == n) CHECK(mat_trace(ab) == mat_trace(mat_mul(b, a)));

        // tr(kron(X, Y)) = tr(X) tr(Y)
        auto x = random_matrix(rng, m, m);
        auto y = random_matrix(rng, n, n);
        CHECK(mat_trace(kron(x, y)) == mat_trace(x) * mat_trace(y));

        // kron interchange: kron(A,C) * kron(B,D) = kron(AB, CD)
        auto e = random_matrix(rng, q, m);
        auto d = random_matrix(rng, m, k);
        auto lhs = mat_mul(kron(a, e), kron(b, d));
        CHECK(lhs == kron(mat_mul(a, b), mat_mul(e, d)));

        // strict associativity, as equalities of stored matrices
        CHECK(kron(kron(a, b), c) == kron(a, kron(b, c)));
        CHECK(direct_sum(direct_sum(a, b), c) == direct_sum(a, direct_sum(b, c)));

        // transpose is an anti-homomorphism
        CHECK(transpose(mat_mul(a, b)) == mat_mul(transpose(b), transpose(a)));
        CHECK(transpose(transpose(a)) == a);
    }
}

TEST_CASE("laws hold over a prime field too") {
    const ScalarMode F5{5};
    std::mt19937_64 rng(777);
    for (int it = 0; it < 25; ++it) {
        std::uniform_int_distribution<std::size_t> dim(0, 4);
        std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
        auto a = random_matrix(rng, m, k, F5);
        auto b = random_matrix(rng, k, m, F5);
        auto c = random_matrix(rng, m, n, F5);
        CHECK(mat_mul(mat_mul(a, b), c) == mat_mul(a, mat_mul(b, c)));
        CHECK(mat_trace(mat_mul(a, b)) == mat_trace(mat_mul(b, a)));
    }
    CHECK_THROWS_AS(mat_mul(Matrix::identity(2, F5), Matrix::identity(2, Q)),
                    std::invalid_argument);
}

TEST_CASE("zero-dimensional shapes behave as units") {
    std::mt19937_64 rng(1);
    Matrix z02(0, 2, Q), z20(2, 0, Q), z00(0, 0, Q);
    CHECK(mat_mul(z02, random_matrix(rng, 2, 2)).rows() == 0);
    auto outer = mat_mul(z20, z02);
    CHECK(outer == Matrix(2, 2, Q));  // empty inner sum is the zero matrix
    CHECK(kron(z00, Matrix::identity(3, Q)).rows() == 0);
    CHECK(kron(Matrix::identity(3, Q), z02) == Matrix(0, 6, Q));
    CHECK(mat_trace(z00).is_zero());
}
