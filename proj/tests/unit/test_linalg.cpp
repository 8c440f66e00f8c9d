#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "tfred/linalg.hpp"

using namespace tfred;

namespace {

Mat companion(const std::vector<double>& lower) {
    const auto n = static_cast<Eigen::Index>(lower.size());
    Mat C = Mat::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) C(i, n - 1) = -lower[static_cast<std::size_t>(i)];
    return C;
}

bool roots_in_left_half_plane(const Mat& M) {
    Eigen::EigenSolver<Mat> es(M, false);
    return (es.eigenvalues().real().array() < 0.0).all();
}

}  // namespace

TEST_CASE("characteristic polynomial matches det(lambda I - M)") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    for (int n = 1; n <= 8; ++n) {
        Mat M(n, n);
        for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = N(rng);
        const CharPoly p = char_poly(M);
        CHECK(p.degree() == static_cast<std::size_t>(n));
        for (double lam : {-1.7, 0.3, 2.1}) {
            const double det = (lam * Mat::Identity(n, n) - M).determinant();
            CHECK(p(lam) == doctest::Approx(det).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("characteristic polynomial size limit") {
    CHECK_THROWS_AS(char_poly(Mat::Identity(13, 13)), SizeOverflow);
}

TEST_CASE("numeric rank") {
    Mat M(3, 3);
    M << 1, 2, 3, 2, 4, 6, 0, 1, 1;
    CHECK(numeric_rank(M) == 2);
    CHECK(numeric_rank(Mat::Zero(2, 2)) == 0);
    CHECK(numeric_rank(Mat::Identity(4, 4)) == 4);
}

TEST_CASE("zero-root deflation") {
    // x^2 (x + 1)(x + 2) = x^4 + 3x^3 + 2x^2
    const CharPoly p({0.0, 0.0, 2.0, 3.0});
    const CharPoly q = deflate_zero_roots(p, 2, 1e-12);
    CHECK(q.degree() == 2);
    CHECK(q[0] == 2.0);
    CHECK(q[1] == 3.0);
    CHECK_THROWS_AS(deflate_zero_roots(p, 1, 1e-12), MultiplicityMismatch);  // c1 also vanishes
    try {
        deflate_zero_roots(p, 3, 1e-12);
        FAIL("expected a mismatch");
    } catch (const MultiplicityMismatch& e) {
        CHECK(e.index == 2);
    }
}

TEST_CASE("Routh-Hurwitz on textbook polynomials") {
    // (x+1)^3 = x^3 + 3x^2 + 3x + 1: Delta_1 = 3, Delta_2 = 9 - 1 = 8
    const HurwitzReport r = routh_hurwitz(CharPoly({1.0, 3.0, 3.0}));
    CHECK(r.stable);
    REQUIRE(r.determinants.size() == 3);
    CHECK(r.determinants[0] == doctest::Approx(3.0));
    CHECK(r.determinants[1] == doctest::Approx(8.0));
    CHECK(r.determinants[2] == doctest::Approx(1.0));

    // x^3 + x^2 + x + 1 has roots +-i: Delta_2 = 0
    const HurwitzReport m = routh_hurwitz(CharPoly({1.0, 1.0, 1.0}), 1e-12);
    CHECK(!m.stable);
    CHECK(m.marginal);
    REQUIRE(m.first_failure);
    CHECK(m.first_failure->kind == HurwitzFailure::Kind::minor);

    // negative coefficient is reported before any minor
    const HurwitzReport u = routh_hurwitz(CharPoly({1.0, -1.0, 2.0}));
    CHECK(!u.stable);
    CHECK(u.first_failure->kind == HurwitzFailure::Kind::coefficient);
    CHECK(u.first_failure->index == 1);
}

TEST_CASE("Routh-Hurwitz agrees with eigenvalues on random polynomials") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 4.0);
    int stable = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + trial % 6;
        std::vector<double> c(static_cast<std::size_t>(n));
        for (auto& x : c) x = U(rng);
        const bool expected = roots_in_left_half_plane(companion(c));
        const HurwitzReport r = routh_hurwitz(CharPoly(c));
        CHECK(r.stable == expected);
        stable += expected;
    }
    CHECK(stable > 20);
}
