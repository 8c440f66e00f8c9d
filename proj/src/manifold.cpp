#include "tfred/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tfred/linalg.hpp"

namespace tfred {

namespace {

constexpr double kBoundaryTol = 1e-10;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

std::string SlowManifold::chart_name() const {
    if (std::holds_alternative<GraphChart>(chart)) return "graph";
    if (std::holds_alternative<Curve1dChart>(chart)) return "curve1d";
    return "implicit";
}

std::optional<Vec> correct_onto(const SlowManifold& mf, const Vec& x0, int max_iter) {
    Vec x = x0;
    for (int it = 0; it < max_iter; ++it) {
        Vec r;
        Mat J;
        try {
            r = mf.decomposition.mu(x);
            J = mf.decomposition.mu.jacobian(x);
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (r.lpNorm<Eigen::Infinity>() == 0.0) break;
        const Mat JJt = J * J.transpose();
        Eigen::FullPivLU<Mat> lu(JJt);
        if (!lu.isInvertible()) return std::nullopt;
        const Vec dx = -J.transpose() * lu.solve(r);
        x += dx;
        if (!x.allFinite()) return std::nullopt;
        if (dx.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
    }
    if (!(mf.residual(x) <= mf.tol_Y)) return std::nullopt;
    return x;
}

Mat tangent_space(const SlowManifold& mf, const Vec& x) {
    const Mat J = mf.decomposition.mu.jacobian(x);
    const int r = static_cast<int>(mf.decomposition.rank);
    if (numeric_rank(J) != r)
        throw std::runtime_error("D mu has rank " + std::to_string(numeric_rank(J)) + " instead of " +
                                 std::to_string(r) + " (constant-rank violation)");
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(static_cast<Eigen::Index>(mf.dim()));
}

Vec curve_tangent(const SlowManifold& mf, const Vec& x) {
    const Mat J = mf.decomposition.mu.jacobian(x);
    const Eigen::Index m = J.cols();
    if (J.rows() != m - 1) throw std::invalid_argument("curve tangent needs a one-dimensional manifold");
    Vec t(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Mat minor(m - 1, m - 1);
        for (Eigen::Index c = 0, k = 0; c < m; ++c) {
            if (c == j) continue;
            minor.col(k++) = J.col(c);
        }
        const double det = m == 1 ? 1.0 : minor.determinant();
        t[j] = (j % 2 == 0 ? 1.0 : -1.0) * det;
    }
    const double nrm = t.norm();
    if (!(nrm > 1e-14 * std::max(1.0, J.norm())))
        throw std::runtime_error("D mu loses rank; no tangent direction");
    return t / nrm;
}

Vec fast_fiber_project(const PerturbedSystem& sys, const SlowManifold& mf, const Vec& x,
                       const ProjectionOptions& opt) {
    auto converged = [&](const Vec& y) {
        return sys.h0(y).lpNorm<Eigen::Infinity>() < opt.tol_fp && mf.residual(y) <= mf.tol_Y;
    };
    if (converged(x)) return x;

    OdeRhs rhs = rhs_from_field(sys.h0);
    IntegratorConfig cfg;
    cfg.rtol = opt.rtol;
    cfg.atol = opt.atol;
    cfg.method = Method::implicit_l_stable;
    Vec y = x;
    double t = 0.0, chunk = 1.0;
    while (t < opt.t_max) {
        try {
            Trajectory tr = integrate(rhs, y, t, t + chunk, cfg);
            y = tr.states().back();
        } catch (const IntegrationError& e) {
            Vec last = e.partial.empty() ? y : e.partial.states().back();
            throw ProjectionDiverged(std::string("fast flow integration failed: ") + e.what(), last);
        }
        t += chunk;
        chunk *= 2.0;
        if (!y.allFinite()) throw ProjectionDiverged("fast flow left the domain", y);
        if (converged(y)) {
            if (auto c = correct_onto(mf, y)) return *c;
            return y;
        }
    }
    throw ProjectionDiverged("fast flow did not settle within t_max = " + fmt(opt.t_max) +
                                 " (|h0| = " + fmt(sys.h0(y).lpNorm<Eigen::Infinity>()) + ")",
                             y);
}

CurveTrace CurveTrace::trace(const SlowManifold& mf) {
    const auto* chart = std::get_if<Curve1dChart>(&mf.chart);
    if (!chart || mf.dim() != 1) throw std::invalid_argument("curve tracing needs a one-dimensional curve chart");
    CurveTrace ct(mf);
    const double orient = chart->orientation >= 0 ? 1.0 : -1.0;

    auto seed = correct_onto(mf, chart->seed);
    if (!seed) throw std::runtime_error("curve seed could not be corrected onto the manifold");
    if (mf.region.violation(*seed) > kBoundaryTol) throw std::runtime_error("curve seed lies outside the region");

    const double diam = std::max(mf.region.diameter(), 1e-6);
    const double chunk = diam / 4.0;
    const double max_length = 50.0 * diam;

    auto branch = [&](double dir, std::vector<Node>& out) {
        OdeRhs rhs{[&mf, dir, orient](const Vec& x) -> Vec { return (dir * orient) * curve_tangent(mf, x); }, {}};
        IntegratorConfig cfg;
        cfg.method = Method::explicit_adaptive;
        cfg.rtol = 1e-11;
        cfg.atol = 1e-13;
        cfg.h_max = chunk / 8.0;
        Vec x = *seed;
        double s = 0.0;
        int stalls = 0;
        auto inside = [&](const Vec& y) { return mf.region.violation(y) <= kBoundaryTol; };
        while (s < max_length) {
            Trajectory tr;
            bool failed = false;
            try {
                tr = integrate(rhs, x, s, s + chunk, cfg);
            } catch (const IntegrationError& e) {
                tr = e.partial;
                failed = true;
                ct.complete_ = false;
                ct.diagnostic_ = std::string("continuation stalled: ") + e.what();
            }
            const auto& ts = tr.times();
            const auto& xs = tr.states();
            for (std::size_t k = 1; k < ts.size(); ++k) {
                if (inside(xs[k])) {
                    out.push_back({ts[k], xs[k], orient * curve_tangent(mf, xs[k])});
                    continue;
                }
                double lo = ts[k - 1], hi = ts[k];
                for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (inside(tr.at(mid)) ? lo : hi) = mid;
                }
                Vec xe = tr.at(lo);
                if (auto c = correct_onto(mf, xe)) xe = *c;
                if (lo > ts[k - 1]) out.push_back({lo, xe, orient * curve_tangent(mf, xe)});
                return;
            }
            if (failed || ts.size() < 2) return;
            s = ts.back();
            if (auto c = correct_onto(mf, xs.back())) {
                x = *c;
                out.back().x = x;
                out.back().t = orient * curve_tangent(mf, x);
                stalls = 0;
            } else if (++stalls >= 3) {
                ct.complete_ = false;
                ct.diagnostic_ = "Newton correction failed on three consecutive continuation steps";
                return;
            } else {
                x = xs.back();
            }
        }
        ct.complete_ = false;
        ct.diagnostic_ = "curve longer than " + fmt(max_length) + "; stopped (closed curve?)";
    };

    std::vector<Node> fwd, bwd;
    branch(1.0, fwd);
    branch(-1.0, bwd);

    std::vector<Node> nodes;
    for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) nodes.push_back({-it->sigma, it->x, it->t});
    nodes.push_back({0.0, *seed, orient * curve_tangent(mf, *seed)});
    for (auto& n : fwd) nodes.push_back(std::move(n));
    const double s0 = nodes.front().sigma;
    for (auto& n : nodes) {
        n.sigma -= s0;
        if (!ct.nodes_.empty() && n.sigma - ct.nodes_.back().sigma <= 1e-13) continue;
        ct.nodes_.push_back(std::move(n));
    }
    if (ct.nodes_.size() < 2) throw std::runtime_error("curve has no extent inside the region");
    return ct;
}

Vec CurveTrace::interpolate(double sigma, std::size_t* segment) const {
    sigma = std::clamp(sigma, sigma_begin(), sigma_end());
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), sigma,
                               [](double s, const Node& n) { return s < n.sigma; });
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    i = std::clamp<std::size_t>(i, 1, nodes_.size() - 1);
    const Node& a = nodes_[i - 1];
    const Node& b = nodes_[i];
    if (segment) *segment = i - 1;
    const double h = b.sigma - a.sigma;
    const double th = (sigma - a.sigma) / h;
    const double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
    const double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
    return h00 * a.x + (h10 * h) * a.t + h01 * b.x + (h11 * h) * b.t;
}

Vec CurveTrace::point(double sigma) const {
    Vec x = interpolate(sigma);
    if (auto c = correct_onto(mf_, x)) return *c;
    return x;
}

Vec CurveTrace::tangent(double sigma) const {
    const auto& chart = std::get<Curve1dChart>(mf_.chart);
    return (chart.orientation >= 0 ? 1.0 : -1.0) * curve_tangent(mf_, point(sigma));
}

double CurveTrace::sigma_of(const Vec& x) const {
    std::size_t best = 0;
    double dbest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const double d = (nodes_[k].x - x).squaredNorm();
        if (d < dbest) dbest = d, best = k;
    }
    double s = nodes_[best].sigma;
    const auto& chart = std::get<Curve1dChart>(mf_.chart);
    const double orient = chart.orientation >= 0 ? 1.0 : -1.0;
    for (int it = 0; it < 50; ++it) {
        const Vec p = interpolate(s);
        const Vec t = orient * curve_tangent(mf_, p);
        const double ds = t.dot(x - p);
        const double s_new = std::clamp(s + ds, sigma_begin(), sigma_end());
        const bool done = std::abs(s_new - s) <= 1e-15 * std::max(1.0, length());
        s = s_new;
        if (done) break;
    }
    return s;
}

ManifoldSample sample_manifold(const SlowManifold& mf, std::size_t n) {
    if (n < 2) throw std::invalid_argument("sample_manifold needs n >= 2");
    ManifoldSample out;
    const auto m = static_cast<Eigen::Index>(mf.ambient_dim());

    if (std::holds_alternative<Curve1dChart>(mf.chart)) {
        const CurveTrace ct = CurveTrace::trace(mf);
        out.complete = ct.complete();
        out.diagnostic = ct.diagnostic();
        for (std::size_t i = 0; i < n; ++i) {
            const double s = ct.sigma_begin() + ct.length() * static_cast<double>(i) / static_cast<double>(n - 1);
            Vec x = ct.point(s);
            if (mf.residual(x) > mf.tol_Y) {
                out.complete = false;
                out.diagnostic = "point at arc length " + fmt(s) + " failed the manifold residual check";
                continue;
            }
            out.points.push_back(std::move(x));
            out.params.push_back(Vec::Constant(1, s));
        }
        return out;
    }

    if (const auto* g = std::get_if<GraphChart>(&mf.chart)) {
        const auto s = g->free_coords.size();
        Vec lo = g->domain.vertices().front(), hi = lo;
        for (const auto& v : g->domain.vertices()) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        std::size_t total = 1;
        for (std::size_t k = 0; k < s; ++k) total *= n;
        std::size_t skipped = 0;
        for (std::size_t idx = 0; idx < total; ++idx) {
            Vec w(static_cast<Eigen::Index>(s));
            std::size_t rest = idx;
            // first free coordinate varies slowest
            for (std::size_t k = s; k-- > 0;) {
                const std::size_t ik = rest % n;
                rest /= n;
                w[k] = lo[k] + (hi[k] - lo[k]) * static_cast<double>(ik) / static_cast<double>(n - 1);
            }
            if (g->domain.violation(w) > 1e-12) continue;
            Vec gx;
            try {
                gx = g->gamma(w);
            } catch (const std::exception&) {
                ++skipped;
                continue;
            }
            Vec x(m);
            for (std::size_t k = 0; k < s; ++k) x[g->free_coords[k]] = w[k];
            for (std::size_t k = 0; k < g->dependent_coords.size(); ++k) x[g->dependent_coords[k]] = gx[k];
            if (mf.region.violation(x) > 1e-12) continue;
            if (mf.residual(x) > mf.tol_Y) {
                ++skipped;
                continue;
            }
            out.points.push_back(std::move(x));
            out.params.push_back(std::move(w));
        }
        if (skipped) {
            out.complete = false;
            out.diagnostic = std::to_string(skipped) + " grid points rejected by the manifold residual check";
        }
        return out;
    }

    // Implicit only: project random region points and keep those that land inside.
    std::mt19937_64 rng(n);
    for (const auto& x : mf.region.sample_interior(4 * n, rng)) {
        if (out.points.size() >= n) break;
        if (auto c = correct_onto(mf, x); c && mf.region.violation(*c) <= 1e-12) {
            out.points.push_back(*c);
            out.params.push_back(Vec());
        }
    }
    out.complete = out.points.size() == n;
    if (!out.complete) out.diagnostic = "only " + std::to_string(out.points.size()) + " projected points inside the region";
    return out;
}

}  // namespace tfred
