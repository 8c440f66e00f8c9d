#include "tfred/examples.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tfred/conditions.hpp"
#include "tfred/linalg.hpp"

namespace tfred {

namespace {

template <class T>
using Span = std::span<const T>;

Halfspace hs(std::initializer_list<double> n, double b, std::string label) {
    Vec v(static_cast<Eigen::Index>(n.size()));
    Eigen::Index i = 0;
    for (double x : n) v[i++] = x;
    return {v, b, std::move(label)};
}

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

std::function<Polytope(double)> constant_region(const Polytope& p) {
    return [p](double) { return p; };
}

// Reversible Michaelis-Menten with low enzyme: x = (s, c), e0 = eps e0*.
ExampleSystem mm_reversible(const ParamMap& p) {
    const double k1 = param(p, "k1"), km1 = param(p, "km1"), k2 = param(p, "k2"), km2 = param(p, "km2");
    const double e0s = param(p, "e0star"), s0 = param(p, "s0");

    PerturbedSystem sys;
    sys.dim = 2;
    sys.h0 = Field::make(2, 2, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c = x[1];
        return {(k1 * s + km1) * c, -(k1 * s + km1 + k2) * c - km2 * c * (s0 - s - c)};
    });
    sys.h1 = Field::make(2, 2, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c = x[1];
        return {-k1 * e0s * s, k1 * e0s * s + km2 * e0s * (s0 - s - c)};
    });
    Field P = Field::make(2, 2, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c = x[1];
        return {k1 * s + km1, -(k1 * s + km1 + k2) - km2 * (s0 - s - c)};
    });
    Field mu = Field::make(2, 1, []<class T>(Span<T> x) -> std::vector<T> { return {x[1]}; });
    Decomposition d = decompose_user(2, 1, P, mu);

    Polytope region(2, {hs({-1, 0}, 0, "s >= 0"), hs({0, -1}, 0, "c >= 0"), hs({1, 1}, s0, "s + c <= s0")},
                    "triangle");
    ExampleSystem ex{sys, d, SlowManifold{d, region, Curve1dChart{vec({0.5 * s0, 0.0}), 1}}, constant_region(region),
                     {}, {}, {}, vec({s0, 0.0}), "reversible Michaelis-Menten, low enzyme"};
    ex.closed_form_reduced = [=](const Vec& x) {
        const double s = x[0];
        const double num = (k1 * k2 + km1 * km2) * s - km1 * km2 * s0;
        const double den = k1 * s + km1 + k2 + km2 * (s0 - s);
        return vec({-e0s * num / den, 0.0});
    };
    ex.closed_form_stationary = vec({km1 * km2 * s0 / (k1 * k2 + km1 * km2), 0.0});
    return ex;
}

// Irreversible Michaelis-Menten with slow product formation: x = (s, c), k2 = eps k2*.
ExampleSystem mm_irrev(const ParamMap& p) {
    const double k1 = param(p, "k1"), km1 = param(p, "km1"), k2s = param(p, "k2star");
    const double e0 = param(p, "e0"), s0 = param(p, "s0");

    PerturbedSystem sys;
    sys.dim = 2;
    auto rate = [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c = x[1];
        return {k1 * e0 * s - (k1 * s + km1) * c};
    };
    sys.h0 = Field::make(2, 2, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T v = rate(x)[0];
        return {-v, v};
    });
    sys.h1 = Field::make(2, 2, [=]<class T>(Span<T> x) -> std::vector<T> { return {T(0.0), -k2s * x[1]}; });
    Mat S(2, 2);
    S << -1, 0, 1, -1;
    Decomposition d = decompose_structural(S, {0}, Field::make(2, 1, rate));

    Polytope region(2,
                    {hs({-1, 0}, 0, "s >= 0"), hs({0, -1}, 0, "c >= 0"), hs({0, 1}, e0, "c <= e0"),
                     hs({1, 1}, s0, "s + c <= s0")},
                    "stoichiometric");
    // seed on the curve, halfway in s unless that leaves the region when e0 > s0
    auto on_curve = [=](double s) { return k1 * e0 * s / (k1 * s + km1); };
    double sh = 0.5 * s0;
    while (sh + on_curve(sh) >= s0 || on_curve(sh) >= e0) sh *= 0.5;
    ExampleSystem ex{sys, d, SlowManifold{d, region, Curve1dChart{vec({sh, on_curve(sh)}), 1}},
                     constant_region(region), {}, {}, {}, vec({s0, 0.0}),
                     "irreversible Michaelis-Menten, slow product formation"};
    ex.closed_form_reduced = [=](const Vec& x) {
        const double s = x[0];
        const double u = k1 * s + km1;
        const double ds = -u * k1 * k2s * e0 * s / (k1 * km1 * e0 + u * u);
        // c follows s along k1 e0 s = (k1 s + km1) c.
        const double dc_ds = k1 * e0 * km1 / (u * u);
        return vec({ds, dc_ds * ds});
    };
    ex.closed_form_stationary = vec({0.0, 0.0});
    return ex;
}

// Competitive inhibition with low enzyme: x = (s, c1, c2).
ExampleSystem comp_inhibition(const ParamMap& p) {
    const double k1 = param(p, "k1"), km1 = param(p, "km1"), k2 = param(p, "k2");
    const double k3 = param(p, "k3"), km3 = param(p, "km3");
    const double e0s = param(p, "e0star"), s0 = param(p, "s0"), i0 = param(p, "i0");

    PerturbedSystem sys;
    sys.dim = 3;
    sys.h0 = Field::make(3, 3, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c1 = x[1];
        const T& c2 = x[2];
        return {km1 * c1 + k1 * s * (c1 + c2), -k1 * s * (c1 + c2) - (km1 + k2) * c1,
                -k3 * (c1 + c2) * (i0 - c2) - km3 * c2};
    });
    sys.h1 = Field::make(3, 3, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c2 = x[2];
        return {-e0s * k1 * s, e0s * k1 * s, e0s * k3 * (i0 - c2)};
    });
    Field P = Field::make(3, 6, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c2 = x[2];
        return {k1 * s + km1,           k1 * s,  //
                -k1 * s - km1 - k2,     -k1 * s,  //
                -k3 * (i0 - c2),        -k3 * (i0 - c2) - km3};
    });
    Field mu = Field::make(3, 2, []<class T>(Span<T> x) -> std::vector<T> { return {x[1], x[2]}; });
    Decomposition d = decompose_user(3, 2, P, mu);

    auto region_at = [=](double enzyme) {
        return Polytope(3,
                        {hs({-1, 0, 0}, 0, "s >= 0"), hs({0, -1, 0}, 0, "c1 >= 0"), hs({0, 0, -1}, 0, "c2 >= 0"),
                         hs({1, 1, 0}, s0, "s + c1 <= s0"), hs({0, 0, 1}, i0, "c2 <= i0"),
                         hs({0, 1, 1}, enzyme, "c1 + c2 <= e0")},
                        "stoichiometric");
    };
    ExampleSystem ex{sys,
                     d,
                     SlowManifold{d, region_at(e0s), Curve1dChart{vec({0.5 * s0, 0.0, 0.0}), 1}},
                     [=](double eps) { return region_at(eps * e0s); },
                     {},
                     {},
                     {},
                     vec({s0, 0.0, 0.0}),
                     "competitive inhibition, low enzyme"};
    ex.closed_form_reduced = [=](const Vec& x) {
        const double s = x[0];
        const double den = km3 * (k1 * s + km1) + (km1 + k2) * k3 * i0 + k2 * km3;
        return vec({-e0s * k1 * k2 * km3 * s / den, 0.0, 0.0});
    };
    ex.closed_form_stationary = vec({0.0, 0.0, 0.0});
    return ex;
}

// Maltose transport: x = (xi, y1, y2, y3), k1 = eps k1*.
ExampleSystem maltose(const ParamMap& p) {
    const double k1s = param(p, "k1star");
    const double k2 = param(p, "k2"), km2 = param(p, "km2"), k3 = param(p, "k3"), km3 = param(p, "km3");
    const double k4 = param(p, "k4"), km4 = param(p, "km4");
    const double x0 = param(p, "x0"), xi0 = param(p, "xi0"), z0 = param(p, "z0"), r0 = param(p, "r0");

    auto rates = [=]<class T>(Span<T> v) -> std::vector<T> {
        const T& xi = v[0];
        const T& y1 = v[1];
        const T& y2 = v[2];
        const T& y3 = v[3];
        const T z = z0 - (y1 + y2 + y3);
        const T x = x0 + xi0 - (xi + y1 + y2);
        const T r = r0 - (y2 + y3);
        return {km2 * y1 - k2 * z * x, km3 * y2 - k3 * y1 * r, km4 * y3 - k4 * z * r};
    };
    PerturbedSystem sys;
    sys.dim = 4;
    sys.h0 = Field::make(4, 4, [=]<class T>(Span<T> v) -> std::vector<T> {
        const auto E = rates(v);
        return {T(0.0), -E[0] + E[1], -E[1], -E[2]};
    });
    sys.h1 = Field::make(4, 4, [=]<class T>(Span<T> v) -> std::vector<T> {
        return {k1s * v[2], T(0.0), -k1s * v[2], T(0.0)};
    });
    Mat S(4, 4);
    S << 1, 0, 0, 0,  //
        0, -1, 1, 0,  //
        -1, 0, -1, 0,  //
        0, 0, 0, -1;
    Decomposition d = decompose_structural(S, {1, 2, 3}, Field::make(4, 3, rates));

    Polytope region(4,
                    {hs({-1, 0, 0, 0}, 0, "xi >= 0"), hs({0, -1, 0, 0}, 0, "y1 >= 0"),
                     hs({0, 0, -1, 0}, 0, "y2 >= 0"), hs({0, 0, 0, -1}, 0, "y3 >= 0"),
                     hs({0, 1, 1, 1}, z0, "z >= 0"), hs({0, 0, 1, 1}, r0, "r >= 0"),
                     hs({1, 1, 1, 0}, xi0 + x0, "x >= 0")},
                    "stoichiometric");
    const Vec start = vec({xi0, 0.0, 0.0, 0.0});
    SlowManifold mf{d, region, ImplicitOnly{}};
    // No explicit parametrization of Y is known; the fast fiber of the
    // initial state gives a point on it to start the curve from.
    mf.chart = Curve1dChart{fast_fiber_project(sys, mf, start), 1};

    ExampleSystem ex{sys, d, mf, constant_region(region), {}, {}, {}, start, "maltose transport"};
    const bool unit_rates = k2 == 1 && km2 == 1 && k3 == 1 && km3 == 1 && k4 == 1 && km4 == 1;
    if (unit_rates) {
        ex.closed_form_reduced = [=](const Vec& v) {
            const double xi = v[0], y1 = v[1], y2 = v[2], y3 = v[3];
            const double n = xi0 - xi + (y1 + y2 + y3 - z0) * (y2 + y3 - r0 - 1) - (y1 + y2) + 1 + x0;
            Vec out(4);
            out[0] = y2;
            out[1] = y2 * (y1 + y2 + y3 - z0) / n;
            out[2] = -y2 - y2 * (xi - xi0 + 2 * (y1 + y2) + y3 - (x0 + z0 + 1)) / n;
            out[3] = y2 * ((y2 + y3) * (y1 + y2 + y3 - r0 - z0) + r0 * (z0 - y1)) / n;
            return Vec(k1s * out);
        };
    }
    return ex;
}

// Competitive inhibition with a two-dimensional slow manifold: x = (s, c1, c2).
ExampleSystem comp_inhibition_2d(const ParamMap& p) {
    const double k1 = param(p, "k1star"), km1 = param(p, "km1star"), k2 = param(p, "k2star");
    const double k3 = param(p, "k3"), km3 = param(p, "km3");
    const double e0 = param(p, "e0"), s0 = param(p, "s0"), i0 = param(p, "i0");
    double alpha = param(p, "alpha");
    if (alpha <= 0.0) alpha = 0.5 * k2 / (km1 + k1 * s0);
    const double kappa = km3 / k3;

    PerturbedSystem sys;
    sys.dim = 3;
    auto rate = [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& c1 = x[1];
        const T& c2 = x[2];
        return {k3 * (e0 - c1 - c2) * (i0 - c2) - km3 * c2};
    };
    sys.h0 = Field::make(3, 3, [=]<class T>(Span<T> x) -> std::vector<T> { return {T(0.0), T(0.0), rate(x)[0]}; });
    sys.h1 = Field::make(3, 3, [=]<class T>(Span<T> x) -> std::vector<T> {
        const T& s = x[0];
        const T& c1 = x[1];
        const T& c2 = x[2];
        const T bind = k1 * s * (e0 - c1 - c2);
        return {km1 * c1 - bind, bind - (km1 + k2) * c1, T(0.0)};
    });
    Mat S = Mat::Zero(3, 1);
    S(2, 0) = 1.0;
    Decomposition d = decompose_structural(S, {0}, Field::make(3, 1, rate));

    Field gamma = Field::make(2, 1, [=]<class T>(Span<T> w) -> std::vector<T> {
        const T& c1 = w[1];
        using std::sqrt;
        const T b = kappa + e0 + i0 - c1;
        return {0.5 * (b - sqrt(b * b - 4.0 * i0 * (e0 - c1)))};
    });
    Polytope region(3,
                    {hs({-1, 0, 0}, 0, "s >= 0"), hs({0, -1, 0}, 0, "c1 >= 0"), hs({0, 0, -1}, 0, "c2 >= 0"),
                     hs({0, 1, 1}, e0, "c1 + c2 <= e0"), hs({1, 1, 0}, s0, "s + c1 <= s0"),
                     hs({0, 0, 1}, i0, "c2 <= i0")},
                    "stoichiometric");
    GraphChart chart{{0, 1}, {2}, gamma, Polytope::box(vec({0.0, 0.0}), vec({s0, e0}), "W")};

    ExampleSystem ex{sys, d, SlowManifold{d, region, chart}, constant_region(region), {}, {}, {},
                     vec({s0, 0.0, 0.0}), "competitive inhibition, two-dimensional slow manifold"};
    ex.closed_form_reduced = [=](const Vec& x) {
        const double s = x[0], c1 = x[1], c2 = x[2];
        const double dc1 = k1 * s * (e0 - c1 - c2) - (km1 + k2) * c1;
        const double ds = km1 * c1 - k1 * s * (e0 - c1 - c2);
        const double dc2 = -(i0 - c2) * dc1 / (kappa + e0 + i0 - c1 - 2 * c2);
        return vec({ds, dc1, dc2});
    };
    ex.closed_form_stationary = vec({0.0, 0.0, gamma(vec({0.0, 0.0}))[0]});
    ex.lyapunov_candidate = LyapunovCandidate{
        Field::make(3, 1, [=]<class T>(Span<T> x) -> std::vector<T> { return {(1.0 + alpha) * x[0] + x[1]}; }), 1,
        1.0};
    return ex;
}

}  // namespace

void Registry::add(std::string name, ParamMap defaults, ExampleFactory make) {
    if (contains(name)) throw std::invalid_argument("system '" + name + "' is already registered");
    entries_.push_back({std::move(name), std::move(defaults), std::move(make)});
}

bool Registry::contains(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return true;
    return false;
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
}

const Registry::Entry& Registry::find(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e;
    std::ostringstream os;
    os << "unknown system '" << name << "'; known systems:";
    for (const auto& e : entries_) os << ' ' << e.name;
    throw UnknownSystem(os.str());
}

const ParamMap& Registry::defaults(const std::string& name) const { return find(name).defaults; }

ExampleSystem Registry::make(const std::string& name, const ParamMap& overrides) const {
    const Entry& e = find(name);
    ParamMap params = merge_params(e.defaults, overrides);
    ExampleSystem ex = e.make(params);
    ex.system.name = name;
    ex.system.params = std::move(params);
    return ex;
}

Registry Registry::builtin() {
    Registry r;
    r.add("mm_reversible_small_e0", {{"k1", 1}, {"km1", 1}, {"k2", 1}, {"km2", 1}, {"e0star", 1}, {"s0", 1}},
          mm_reversible);
    r.add("mm_irrev_slow_k2", {{"k1", 1}, {"km1", 1}, {"k2star", 1}, {"e0", 1}, {"s0", 1}}, mm_irrev);
    r.add("comp_inhibition_small_e0",
          {{"k1", 1}, {"km1", 1}, {"k2", 1}, {"k3", 1}, {"km3", 1}, {"e0star", 1}, {"s0", 1}, {"i0", 1}},
          comp_inhibition);
    r.add("comp_inhibition_2d",
          {{"k1star", 1}, {"km1star", 1}, {"k2star", 1}, {"k3", 1}, {"km3", 1}, {"e0", 1}, {"s0", 1}, {"i0", 1},
           {"alpha", 0}},
          comp_inhibition_2d);
    r.add("maltose_transport",
          {{"k1star", 1}, {"k2", 1}, {"km2", 1}, {"k3", 1}, {"km3", 1}, {"k4", 1}, {"km4", 1}, {"x0", 1}, {"xi0", 1},
           {"z0", 1}, {"r0", 1}},
          maltose);
    return r;
}

ExampleSystem get_example(const std::string& name, const ParamMap& overrides) {
    static const Registry registry = Registry::builtin();
    return registry.make(name, overrides);
}

Vec oracle_reduced_rhs(const ExampleSystem& ex, const Vec& x, double residual_tol) {
    if (!ex.closed_form_reduced)
        throw std::logic_error("system '" + ex.system.name + "' has no closed-form reduction at these parameters");
    if (static_cast<std::size_t>(x.size()) != ex.system.dim) throw DimensionError("point has the wrong dimension");
    const double res = ex.manifold.residual(x);
    if (!(res <= residual_tol))
        throw std::domain_error("point is off the slow manifold (|mu| = " + std::to_string(res) + ")");
    return ex.closed_form_reduced(x);
}

Vec oracle_stationary(const ExampleSystem& ex) {
    if (ex.closed_form_stationary) return *ex.closed_form_stationary;
    const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
    const auto pts = find_stationary_points(rf, ex.manifold);
    if (pts.size() != 1)
        throw std::runtime_error("expected one stationary point in the region, found " + std::to_string(pts.size()));
    return pts.front();
}

Mat maltose_fast_block(double a, double b, double c, double d) {
    Mat J(3, 3);
    J << -1 - a - b - c, -a - b + 1 + d, -a + d,  //
        c, -1 - d, -d,                          //
        -c, -b - c, -1 - b - c;
    return J;
}

HurwitzTriple maltose_hurwitz_computed(double a, double b, double c, double d) {
    const CharPoly p = char_poly(maltose_fast_block(a, b, c, d));
    HurwitzTriple t;
    t.A1 = p[2];
    t.A3 = p[0];
    t.H2 = p[2] * p[1] - p[0];
    return t;
}

HurwitzTriple maltose_hurwitz_closed_form(double a, double b, double c, double d) {
    HurwitzTriple t;
    t.A1 = 3 + 2 * b + 2 * c + d + a;
    t.H2 = a * a * b + a * a * c + a * a * d + 3 * a * b * b + 7 * a * b * c + 4 * a * b * d + 3 * a * c * c +
           4 * a * c * d + a * d * d + 2 * b * b * b + 7 * b * b * c + 3 * b * b * d + 7 * b * c * c +
           6 * b * c * d + b * d * d + 2 * c * c * c + 3 * c * c * d + c * d * d + 2 * a * a + 10 * b * a +
           9 * c * a + 6 * d * a + 10 * b * b + 21 * c * b + 10 * d * b + 9 * c * c + 10 * c * d + 2 * d * d +
           8 * a + 16 * b + 14 * c + 8 * d + 8;
    t.A3 = b * b * c + b * c * c + b * c * d + b * a + c * a + d * a + b * b + 2 * c * b + d * b + a + 2 * b + c +
           d + 1;
    return t;
}

HurwitzMatch check_hurwitz_symbolic_match(std::size_t n, std::uint64_t seed, double upper) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, upper);
    HurwitzMatch m;
    auto dev = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
    for (std::size_t i = 0; i < n; ++i) {
        const double a = U(rng), b = U(rng), c = U(rng), d = U(rng);
        const HurwitzTriple got = maltose_hurwitz_computed(a, b, c, d);
        const HurwitzTriple want = maltose_hurwitz_closed_form(a, b, c, d);
        m.max_deviation = std::max({m.max_deviation, dev(got.A1, want.A1), dev(got.H2, want.H2), dev(got.A3, want.A3)});
        m.all_positive = m.all_positive && got.A1 > 0 && got.H2 > 0 && got.A3 > 0;
        ++m.tuples;
    }
    return m;
}

InhibitionGuards inhibition_2d_guards(const ExampleSystem& ex, const std::vector<Vec>& samples) {
    const auto& p = ex.system.params;
    const double kappa = param(p, "km3") / param(p, "k3");
    const double e0 = param(p, "e0"), i0 = param(p, "i0");
    InhibitionGuards g;
    g.min_denominator = std::numeric_limits<double>::infinity();
    g.min_free_enzyme = std::numeric_limits<double>::infinity();
    for (const Vec& x : samples) {
        g.min_denominator = std::min(g.min_denominator, kappa + e0 + i0 - x[1] - 2 * x[2]);
        g.min_free_enzyme = std::min(g.min_free_enzyme, e0 - x[2]);
        ++g.samples;
    }
    return g;
}

}  // namespace tfred
