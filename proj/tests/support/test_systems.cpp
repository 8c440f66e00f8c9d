#include "test_systems.hpp"

namespace tfred::testing {

namespace {

template <class T>
using Span = std::span<const T>;

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

std::function<Polytope(double)> fixed(const Polytope& p) {
    return [p](double) { return p; };
}

}  // namespace

ExampleSystem linear_toy(const ParamMap&) {
    PerturbedSystem sys;
    sys.name = "linear_toy";
    sys.dim = 2;
    sys.h0 = Field::make(2, 2, []<class T>(Span<T> x) -> std::vector<T> { return {T(0.0), -x[1]}; });
    sys.h1 = Field::make(2, 2, []<class T>(Span<T> x) -> std::vector<T> { return {-x[0], T(0.0)}; });
    Field P = Field::make(2, 2, []<class T>(Span<T>) -> std::vector<T> { return {T(0.0), T(-1.0)}; });
    Field mu = Field::make(2, 1, []<class T>(Span<T> x) -> std::vector<T> { return {x[1]}; });
    Decomposition d = decompose_user(2, 1, P, mu);
    Polytope box = Polytope::box(vec({0.0, -1.0}), vec({1.0, 1.0}), "box");
    ExampleSystem ex{sys, d, SlowManifold{d, box, Curve1dChart{vec({0.5, 0.0}), 1}}, fixed(box), {}, {}, {},
                     vec({1.0, 1.0}), "linear toy"};
    ex.closed_form_reduced = [](const Vec& x) { return vec({-x[0], 0.0}); };
    ex.closed_form_stationary = vec({0.0, 0.0});
    return ex;
}

ExampleSystem jordan_block(const ParamMap&) {
    PerturbedSystem sys;
    sys.name = "jordan_block";
    sys.dim = 2;
    sys.h0 = Field::make(2, 2, []<class T>(Span<T> x) -> std::vector<T> { return {x[1], T(0.0)}; });
    sys.h1 = Field::make(2, 2, []<class T>(Span<T> x) -> std::vector<T> { return {-x[0], -x[1]}; });
    Field P = Field::make(2, 2, []<class T>(Span<T>) -> std::vector<T> { return {T(1.0), T(0.0)}; });
    Field mu = Field::make(2, 1, []<class T>(Span<T> x) -> std::vector<T> { return {x[1]}; });
    Decomposition d = decompose_user(2, 1, P, mu);
    Polytope box = Polytope::box(vec({0.0, -1.0}), vec({1.0, 1.0}), "box");
    return ExampleSystem{sys, d, SlowManifold{d, box, Curve1dChart{vec({0.5, 0.0}), 1}}, fixed(box), {}, {}, {},
                         vec({1.0, 0.5}), "nilpotent fast part"};
}

ExampleSystem vdp_nonexample(const ParamMap&) {
    PerturbedSystem sys;
    sys.name = "vdp_nonexample";
    sys.dim = 3;
    sys.h0 = Field::make(3, 3, []<class T>(Span<T> x) -> std::vector<T> { return {T(0.0), T(0.0), x[0] - x[2]}; });
    sys.h1 = Field::make(3, 3, []<class T>(Span<T> x) -> std::vector<T> {
        const T& u = x[0];
        const T& v = x[1];
        const T& w = x[2];
        return {v, -u + (1.0 - w * w) * v, T(0.0)};
    });
    Mat S = Mat::Zero(3, 1);
    S(2, 0) = -1.0;
    Decomposition d = decompose_structural(
        S, {0}, Field::make(3, 1, []<class T>(Span<T> x) -> std::vector<T> { return {x[2] - x[0]}; }));
    Polytope box = Polytope::box(vec({-3.0, -4.0, -3.0}), vec({3.0, 4.0, 3.0}), "box");
    GraphChart chart{{0, 1},
                     {2},
                     Field::make(2, 1, []<class T>(Span<T> w) -> std::vector<T> { return {w[0]}; }),
                     Polytope::box(vec({-3.0, -4.0}), vec({3.0, 4.0}), "W")};
    ExampleSystem ex{sys, d, SlowManifold{d, box, chart}, fixed(box), {}, {}, {}, vec({2.0, 0.0, 2.0}),
                     "van der Pol on a slow plane (limit cycle)"};
    ex.closed_form_reduced = [](const Vec& x) {
        const double u = x[0], v = x[1];
        const double dv = -u + (1 - u * u) * v;
        return vec({v, dv, v});
    };
    return ex;
}

ExampleSystem mm_shrunken(const ParamMap& p) {
    ExampleSystem ex = Registry::builtin().make("mm_reversible_small_e0", p);
    const double s0 = param(p, "s0");
    Polytope cut(2,
                 {{vec({-1, 0}), 0.0, "s >= 0"}, {vec({0, -1}), 0.0, "c >= 0"},
                  {vec({1, 1}), 0.8 * s0, "s + c <= 0.8 s0"}},
                 "shrunken");
    ex.cis_region = fixed(cut);
    ex.description = "reversible Michaelis-Menten, region cut below s0";
    return ex;
}

Registry test_registry() {
    Registry r = Registry::builtin();
    r.add("linear_toy", {}, linear_toy);
    r.add("jordan_block", {}, jordan_block);
    r.add("vdp_nonexample", {}, vdp_nonexample);
    r.add("mm_shrunken", Registry::builtin().defaults("mm_reversible_small_e0"), mm_shrunken);
    return r;
}

}  // namespace tfred::testing
