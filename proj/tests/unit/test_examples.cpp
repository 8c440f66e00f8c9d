#include <doctest.h>

#include <random>

#include "tfred/conditions.hpp"
#include "tfred/examples.hpp"
#include "tfred/integrate.hpp"

using namespace tfred;

namespace {

const char* kExamples[] = {"mm_reversible_small_e0", "mm_irrev_slow_k2", "comp_inhibition_small_e0",
                           "comp_inhibition_2d", "maltose_transport"};

double rel(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff()); }

Vec v(std::initializer_list<double> xs) {
    Vec out(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) out[i++] = x;
    return out;
}

OdeRhs numeric_rhs(std::function<Vec(const Vec&)> f) {
    return {f, [f](const Vec& x) -> Mat {
                Mat J(x.size(), x.size());
                for (Eigen::Index j = 0; j < x.size(); ++j) {
                    const double h = 1e-7 * (1.0 + std::abs(x[j]));
                    Vec xp = x, xm = x;
                    xp[j] += h;
                    xm[j] -= h;
                    J.col(j) = (f(xp) - f(xm)) / (2 * h);
                }
                return J;
            }};
}

}  // namespace

TEST_CASE("reduction agrees with the closed forms on Y") {
    for (const char* name : kExamples) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
        const auto pts = sample_manifold(ex.manifold, ex.manifold.dim() == 1 ? 100 : 10).points;
        CHECK(pts.size() >= 50);
        for (const Vec& x : pts) CHECK(rel(rf.q(x), oracle_reduced_rhs(ex, x)) < 1e-9);
    }
}

TEST_CASE("closed forms at random rate constants") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.3, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        for (const char* name : {"mm_reversible_small_e0", "mm_irrev_slow_k2", "comp_inhibition_small_e0",
                                 "comp_inhibition_2d"}) {
            CAPTURE(name);
            ParamMap p = Registry::builtin().defaults(name);
            for (auto& [k, val] : p)
                if (k != "alpha") val = U(rng);
            const ExampleSystem ex = get_example(name, p);
            const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
            for (const Vec& x : sample_manifold(ex.manifold, 8).points)
                CHECK(rel(rf.q(x), oracle_reduced_rhs(ex, x)) < 1e-9);
        }
    }
}

TEST_CASE("spot values of the closed forms") {
    const ExampleSystem mm = get_example("mm_reversible_small_e0");
    const Vec q = oracle_reduced_rhs(mm, v({1.0, 0.0}));
    CHECK(q[0] == doctest::Approx(-1.0 / 3.0));
    CHECK(q[1] == 0.0);
    CHECK(oracle_stationary(mm)[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(oracle_reduced_rhs(mm, v({0.5, 0.1})), std::domain_error);

    const ExampleSystem irr = get_example("mm_reversible_small_e0", {{"km2", 0.0}});
    CHECK(oracle_stationary(irr)[0] == 0.0);

    const ExampleSystem ci = get_example("comp_inhibition_small_e0");
    CHECK(oracle_reduced_rhs(ci, v({0.0, 0.0, 0.0})).norm() == 0.0);
    CHECK(oracle_stationary(ci).norm() == 0.0);

    const ExampleSystem mt = get_example("maltose_transport");
    for (const Vec& x : sample_manifold(mt.manifold, 40).points) {
        if (std::abs(x[2]) < 1e-13) CHECK(oracle_reduced_rhs(mt, x).norm() < 1e-13);
    }
    CHECK(std::abs(oracle_stationary(mt)[2]) < 1e-10);
}

TEST_CASE("stationary point of the reversible mechanism across parameters") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(0.2, 5.0);
    for (int i = 0; i < 20; ++i) {
        const ParamMap p{{"k1", U(rng)}, {"km1", U(rng)}, {"k2", U(rng)}, {"km2", U(rng)}, {"s0", U(rng)}};
        const ExampleSystem ex = get_example("mm_reversible_small_e0", p);
        const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
        const auto pts = find_stationary_points(rf, ex.manifold);
        REQUIRE(pts.size() == 1);
        const double s_star = p.at("km1") * p.at("km2") * p.at("s0") / (p.at("k1") * p.at("k2") + p.at("km1") * p.at("km2"));
        CHECK(std::abs(pts[0][0] - s_star) < 1e-10);
    }
}

TEST_CASE("maltose Hurwitz quantities") {
    const HurwitzTriple o = maltose_hurwitz_computed(0, 0, 0, 0);
    CHECK(o.A1 == doctest::Approx(3.0));
    CHECK(o.H2 == doctest::Approx(8.0));
    CHECK(o.A3 == doctest::Approx(1.0));
    const HurwitzMatch m = check_hurwitz_symbolic_match(200);
    CHECK(m.tuples == 200);
    CHECK(m.max_deviation < 1e-9);
    CHECK(m.all_positive);
}

TEST_CASE("maltose fast block is the lower Jacobian block on the manifold") {
    const ExampleSystem ex = get_example("maltose_transport");
    for (const Vec& x : sample_manifold(ex.manifold, 10).points) {
        const double xi = x[0], y1 = x[1], y2 = x[2], y3 = x[3];
        const double a = 1 + 1 - (xi + y1 + y2), b = 1 - (y1 + y2 + y3), c = 1 - (y2 + y3), d = y1;
        const Mat J = ex.system.h0.jacobian(x);
        CHECK((J.bottomRightCorner(3, 3) - maltose_fast_block(a, b, c, d)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("two-dimensional inhibition guards") {
    const ExampleSystem ex = get_example("comp_inhibition_2d");
    const InhibitionGuards g = inhibition_2d_guards(ex, sample_manifold(ex.manifold, 50).points);
    CHECK(g.samples > 1000);
    CHECK(g.ok());
    CHECK(g.min_free_enzyme >= 0.5);
}

TEST_CASE("stoichiometric first integrals of the full competitive inhibition network") {
    // species e, s, c1, c2, p, i with unit rates
    const double eps = 0.05, e0 = eps * 1.0;
    auto f = [](const Vec& y) -> Vec {
        const double e = y[0], s = y[1], c1 = y[2], c2 = y[3], i = y[5];
        const double v1 = e * s - c1, v2 = c1, v3 = e * i - c2;
        Vec d(6);
        d << -v1 + v2 - v3, -v1, v1 - v2, v3, v2, -v3;
        return d;
    };
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-13;
    const Trajectory tr = integrate(numeric_rhs(f), v({e0, 1.0, 0.0, 0.0, 0.0, 1.0}), 0.0, 5.0, cfg);
    for (const Vec& y : tr.states()) {
        CHECK(std::abs(y[0] + y[2] + y[3] - e0) < 1e-8);
        CHECK(std::abs(y[1] + y[2] + y[4] - 1.0) < 1e-8);
        CHECK(std::abs(y[5] + y[3] - 1.0) < 1e-8);
    }
    // the reduced coordinates follow the shipped three-dimensional system
    const ExampleSystem ex = get_example("comp_inhibition_small_e0");
    OdeRhs sys{[&](const Vec& x) -> Vec { return eval_h(ex.system, x, eps); },
               [&](const Vec& x) -> Mat { return jacobian_h(ex.system, x, eps); }};
    const Trajectory red = integrate(sys, v({1.0, 0.0, 0.0}), 0.0, 5.0, cfg);
    for (double t : {0.5, 2.0, 5.0}) {
        const Vec y = tr.at(t);
        CHECK((red.at(t) - v({y[1], y[2], y[3]})).norm() < 1e-7);
    }
}

TEST_CASE("stoichiometric first integrals of the full maltose network") {
    // species x, z, r, xi, y1, y2, y3
    const double eps = 0.1;
    auto f = [eps](const Vec& s) -> Vec {
        const double x = s[0], z = s[1], r = s[2], y1 = s[4], y2 = s[5], y3 = s[6];
        const double v1 = eps * y2, v2 = z * x - y1, v3 = y1 * r - y2, v4 = z * r - y3;
        Vec d(7);
        d << -v2, v1 - v2 - v4, v1 - v3 - v4, v1, v2 - v3, v3 - v1, v4;
        return d;
    };
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-13;
    const Trajectory tr = integrate(numeric_rhs(f), v({1, 1, 1, 1, 0, 0, 0}), 0.0, 5.0, cfg);
    for (const Vec& s : tr.states()) {
        CHECK(std::abs(s[1] + s[4] + s[5] + s[6] - 1.0) < 1e-8);
        CHECK(std::abs(s[2] + s[5] + s[6] - 1.0) < 1e-8);
        CHECK(std::abs(s[0] + s[3] + s[4] + s[5] - 2.0) < 1e-8);
    }
    const ExampleSystem ex = get_example("maltose_transport");
    OdeRhs sys{[&](const Vec& x) -> Vec { return eval_h(ex.system, x, eps); },
               [&](const Vec& x) -> Mat { return jacobian_h(ex.system, x, eps); }};
    const Trajectory red = integrate(sys, v({1, 0, 0, 0}), 0.0, 5.0, cfg);
    for (double t : {0.5, 2.0, 5.0}) {
        const Vec s = tr.at(t);
        CHECK((red.at(t) - s.tail(4)).norm() < 1e-7);
    }
}

TEST_CASE("registry") {
    const Registry r = Registry::builtin();
    CHECK(r.size() == 5);
    CHECK(r.names().front() == "mm_reversible_small_e0");
    CHECK_THROWS_WITH_AS(get_example("nope"), doctest::Contains("maltose_transport"), UnknownSystem);
    CHECK_THROWS(get_example("mm_irrev_slow_k2", {{"k9", 1.0}}));
    const ExampleSystem ex = get_example("mm_irrev_slow_k2", {{"s0", 2.0}});
    CHECK(ex.system.params.at("s0") == 2.0);
    CHECK(ex.system.name == "mm_irrev_slow_k2");
    Registry mine;
    CHECK(mine.size() == 0);
    mine.add("copy", r.defaults("mm_irrev_slow_k2"), [&](const ParamMap& p) { return r.make("mm_irrev_slow_k2", p); });
    CHECK_THROWS(mine.add("copy", {}, nullptr));
    CHECK(mine.make("copy").system.dim == 2);
}
