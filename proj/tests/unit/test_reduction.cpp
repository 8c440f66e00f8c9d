#include <doctest.h>

#include <random>

#include "tfred/examples.hpp"
#include "tfred/reduction.hpp"
#include "test_systems.hpp"

using namespace tfred;

namespace {

const char* kExamples[] = {"mm_reversible_small_e0", "mm_irrev_slow_k2", "comp_inhibition_small_e0",
                           "comp_inhibition_2d", "maltose_transport"};

std::vector<Vec> ambient_points(const ExampleSystem& ex, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return ex.manifold.region.sample_interior(n, rng);
}

}  // namespace

TEST_CASE("projection algebra at ambient points") {
    for (const char* name : kExamples) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
        const auto m = static_cast<Eigen::Index>(ex.system.dim);
        const double s = static_cast<double>(ex.system.dim - ex.decomposition.rank);
        for (const Vec& x : ambient_points(ex, 100, 2)) {
            const Mat Q = projection_Q(ex.decomposition, x);
            const Mat P = ex.decomposition.P_at(x);
            const Mat Dmu = ex.decomposition.mu.jacobian(x);
            CHECK((Q * Q - Q).cwiseAbs().maxCoeff() < 1e-9);
            CHECK((Q * P).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(Q.trace() == doctest::Approx(s).epsilon(1e-9));
            const Vec q = reduced_rhs(rf, x);
            CHECK((Dmu * q).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + q.norm()));
            CHECK((q - Q * ex.system.h1(x)).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + q.norm()));
            CHECK(Q.rows() == m);
        }
    }
}

TEST_CASE("product decomposition reproduces h0") {
    for (const char* name : kExamples) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const DecompositionReport r = verify_decomposition(ex.decomposition, ex.system, ambient_points(ex, 50, 4));
        CHECK(r.ok);
        CHECK(r.max_residual < 1e-12);
        CHECK(r.rank_P == static_cast<int>(ex.decomposition.rank));
    }
}

TEST_CASE("reduced field Jacobian by duals matches finite differences") {
    const ExampleSystem ex = get_example("maltose_transport");
    const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
    for (const Vec& x : ambient_points(ex, 10, 8)) {
        const Mat J = rf.q.jacobian(x);
        const Mat Jfd = finite_difference_jacobian(rf.q, x, 1e-6);
        CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("structural decomposition rejects dependent fast reactions") {
    Mat S(2, 2);
    S << -1, 1, 1, -1;  // second fast column is the first reversed
    const Field rates = Field::make(2, 2, []<class T>(std::span<const T> x) -> std::vector<T> { return {x[0], x[1]}; });
    CHECK_THROWS_WITH(decompose_structural(S, {0, 1}, rates), doctest::Contains("merge"));
    CHECK_THROWS(decompose_structural(S, {0, 5}, rates));
}

TEST_CASE("singular pencil is reported with its location") {
    const ExampleSystem ex = testing::jordan_block();
    const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
    Vec x(2);
    x << 0.5, 0.0;
    try {
        reduced_rhs(rf, x);
        FAIL("expected a singular pencil");
    } catch (const SingularPencil& e) {
        CHECK(e.where.isApprox(x));
    }
    const DecompositionReport r = verify_decomposition(ex.decomposition, ex.system, {x});
    CHECK(!r.ok);
}

TEST_CASE("user decompositions need second-order fields") {
    const Field P = Field::make_first_order(1, 1, []<class T>(std::span<const T>) -> std::vector<T> { return {T(1.0)}; });
    const Field mu = Field::make(1, 1, []<class T>(std::span<const T> x) -> std::vector<T> { return {x[0]}; });
    CHECK_THROWS(decompose_user(1, 1, P, mu));
}
