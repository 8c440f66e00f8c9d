#include <doctest.h>

#include "tfred/examples.hpp"
#include "tfred/manifold.hpp"

using namespace tfred;

TEST_CASE("reversible Michaelis-Menten manifold is the substrate axis") {
    const ExampleSystem ex = get_example("mm_reversible_small_e0");
    const CurveTrace ct = CurveTrace::trace(ex.manifold);
    CHECK(ct.complete());
    CHECK(ct.length() == doctest::Approx(1.0).epsilon(1e-8));
    for (const auto& n : ct.nodes()) CHECK(std::abs(n.x[1]) < 1e-12);
    const Vec x = ct.point(ct.sigma_begin() + 0.3);
    CHECK(ct.sigma_of(x) == doctest::Approx(ct.sigma_begin() + 0.3));
    CHECK(std::abs(ct.tangent(0.0).norm() - 1.0) < 1e-12);
}

TEST_CASE("curve samples lie on Y inside the region") {
    for (const char* name : {"mm_irrev_slow_k2", "comp_inhibition_small_e0", "maltose_transport"}) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const ManifoldSample s = sample_manifold(ex.manifold, 100);
        CHECK(s.complete);
        CHECK(s.points.size() == 100);
        for (const auto& x : s.points) {
            CHECK(ex.manifold.residual(x) <= 1e-10);
            CHECK(ex.manifold.region.violation(x) <= 1e-9);
        }
    }
}

TEST_CASE("irreversible manifold follows the quasi-steady relation") {
    const ExampleSystem ex = get_example("mm_irrev_slow_k2");
    for (const auto& x : sample_manifold(ex.manifold, 50).points) {
        const double s = x[0], c = x[1];
        CHECK(c == doctest::Approx(s / (s + 1.0)).epsilon(1e-10).scale(1e-12));
    }
}

TEST_CASE("graph chart samples") {
    const ExampleSystem ex = get_example("comp_inhibition_2d");
    const ManifoldSample s = sample_manifold(ex.manifold, 20);
    CHECK(!s.points.empty());
    CHECK(s.points.size() <= 400);
    for (const auto& x : s.points) {
        CHECK(ex.manifold.residual(x) <= 1e-10);
        CHECK(ex.manifold.region.contains(x, 1e-9));
        CHECK(tangent_space(ex.manifold, x).cols() == 2);
    }
}

TEST_CASE("fast fiber projection conserves the fast first integrals") {
    const ExampleSystem ex = get_example("mm_irrev_slow_k2");
    Vec x0(2);
    x0 << 1.0, 0.0;
    const Vec y = fast_fiber_project(ex.system, ex.manifold, x0);
    CHECK(ex.manifold.residual(y) <= 1e-10);
    // P = (-1, 1): s + c is constant along the fast flow.
    CHECK(y.sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(y[0] == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-9));

    const ExampleSystem ci = get_example("comp_inhibition_small_e0");
    Vec z0(3);
    z0 << 0.5, 0.2, 0.3;
    const Vec z = fast_fiber_project(ci.system, ci.manifold, z0);
    CHECK(z.tail(2).norm() < 1e-10);
}

TEST_CASE("Newton correction onto Y") {
    const ExampleSystem ex = get_example("maltose_transport");
    const Vec y = sample_manifold(ex.manifold, 10).points[5];
    const Vec off = y + 1e-3 * Vec::Ones(4);
    const auto c = correct_onto(ex.manifold, off);
    REQUIRE(c);
    CHECK(ex.manifold.residual(*c) <= 1e-10);
    CHECK((*c - off).norm() < 1e-2);
}
