#include "tfred/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tfred/linalg.hpp"

namespace tfred {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string vec_text(const Vec& x) {
    std::ostringstream os;
    os.precision(10);
    os << '(';
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

double max_abs(const Mat& J) { return J.size() ? J.cwiseAbs().maxCoeff() : 0.0; }

std::vector<Vec> manifold_points(const SlowManifold& mf, std::size_t n, std::string& note) {
    ManifoldSample s = sample_manifold(mf, n);
    if (!s.complete) note = s.diagnostic;
    return std::move(s.points);
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified-at-samples";
        case Verdict::failed: return "failed";
        case Verdict::skipped: return "skipped";
    }
    return "?";
}

bool ConditionReport::passed() const {
    return std::none_of(conditions.begin(), conditions.end(),
                        [](const ConditionVerdict& c) { return c.verdict == Verdict::failed; });
}

std::pair<ConditionVerdict, ConditionVerdict> check_tf0_tfi(const PerturbedSystem& sys, const Decomposition& d,
                                                            const SlowManifold& mf, std::size_t n_samples,
                                                            const CheckTolerances& tol) {
    ConditionVerdict tf0{"TF0"}, tfi{"TFI"};
    std::string note;
    std::vector<Vec> pts;
    try {
        pts = manifold_points(mf, n_samples, note);
    } catch (const std::exception& e) {
        tf0.detail = tfi.detail = std::string("manifold sampling failed: ") + e.what();
        tf0.verdict = tfi.verdict = Verdict::failed;
        return {tf0, tfi};
    }
    if (pts.empty()) {
        tf0.verdict = tfi.verdict = Verdict::failed;
        tf0.detail = tfi.detail = "no manifold samples";
        return {tf0, tfi};
    }
    const auto m = sys.dim;
    const auto r = d.rank;
    const std::size_t s = m - r;
    double min_gap = kInf, max_tail = 0.0, min_cs = kInf;
    tf0.verdict = tfi.verdict = Verdict::certified;
    for (const auto& x : pts) {
        const Mat J = sys.h0.jacobian(x);
        const int rank = numeric_rank(J, tol.rank_tol);
        Eigen::JacobiSVD<Mat> svd(J);
        const auto& sv = svd.singularValues();
        if (sv[0] > 0.0) {
            min_gap = std::min(min_gap, sv[static_cast<Eigen::Index>(r) - 1] / sv[0]);
            if (r < m) max_tail = std::max(max_tail, sv[static_cast<Eigen::Index>(r)] / sv[0]);
        }
        if (rank != static_cast<int>(r) && tf0.ok()) {
            tf0.verdict = Verdict::failed;
            tf0.witness = x;
            tf0.detail = "rank Dh0 = " + std::to_string(rank) + " != " + std::to_string(r) + " at " + vec_text(x);
        }

        // Route 1: the characteristic polynomial has exactly s zero roots.
        const double scale = max_abs(J);
        const Mat Jn = scale > 0.0 ? Mat(J / scale) : J;
        bool deflates = true;
        std::string why;
        try {
            const CharPoly p = char_poly(Jn);
            deflate_zero_roots(p, s, tol.deflation_tol);
            if (s < m) min_cs = std::min(min_cs, std::abs(p[s]));
        } catch (const MultiplicityMismatch& e) {
            deflates = false;
            why = e.what();
        }
        // Route 2: rank J^2 == rank J, i.e. ker J meets im J trivially.
        const bool semisimple = numeric_rank(Jn * Jn, tol.rank_tol) == numeric_rank(Jn, tol.rank_tol) &&
                                static_cast<int>(m) - rank == static_cast<int>(s);
        if ((!deflates || !semisimple) && tfi.ok()) {
            tfi.verdict = Verdict::failed;
            tfi.witness = x;
            std::ostringstream os;
            os << "at " << vec_text(x) << ": ";
            if (!deflates) os << "deflation by x^" << s << " fails (" << why << ")";
            if (!deflates && !semisimple) os << "; ";
            if (!semisimple) os << "rank(J^2) != rank(J) or kernel dimension != " << s;
            if (deflates != semisimple) os << " [routes disagree]";
            tfi.detail = os.str();
        }
    }
    tf0.samples = tfi.samples = pts.size();
    tf0.margins["min_rank_gap"] = min_gap;
    tf0.margins["max_null_singular_ratio"] = max_tail;
    tfi.margins["min_deflated_constant"] = min_cs;
    if (tf0.ok()) tf0.detail = "rank Dh0 = " + std::to_string(r) + " at all samples";
    if (tfi.ok()) tfi.detail = "zero eigenvalue of multiplicity " + std::to_string(s) + ", semisimple, at all samples";
    if (!note.empty()) tf0.detail += " (sampling: " + note + ")";
    return {tf0, tfi};
}

ConditionVerdict check_tfii(const PerturbedSystem& sys, const SlowManifold& mf, std::size_t n_samples,
                            const CheckTolerances& tol) {
    ConditionVerdict v{"TFII"};
    std::string note;
    std::vector<Vec> pts;
    try {
        pts = manifold_points(mf, n_samples, note);
    } catch (const std::exception& e) {
        v.verdict = Verdict::failed;
        v.detail = std::string("manifold sampling failed: ") + e.what();
        return v;
    }
    const std::size_t m = sys.dim, r = mf.decomposition.rank, s = m - r;
    double min_scaled = kInf, min_minor = kInf;
    v.verdict = Verdict::certified;
    for (const auto& x : pts) {
        const Mat J = sys.h0.jacobian(x);
        const double scale = max_abs(J);
        try {
            if (scale == 0.0) throw MultiplicityMismatch(0, "Dh0 vanishes");
            const CharPoly q = deflate_zero_roots(char_poly(J / scale), s, tol.deflation_tol);
            const HurwitzReport scaled = routh_hurwitz(q, tol.hurwitz_tol);
            // Undo the scaling: the deflated coefficient of x^j carries scale^(r-j).
            std::vector<double> lower(r);
            for (std::size_t j = 0; j < r; ++j) lower[j] = q[j] * std::pow(scale, static_cast<double>(r - j));
            const HurwitzReport raw = routh_hurwitz(CharPoly(lower));
            min_scaled = std::min(min_scaled, scaled.margin());
            min_minor = std::min(min_minor, raw.margin());
            if (!scaled.stable && v.ok()) {
                v.verdict = Verdict::failed;
                v.witness = x;
                std::ostringstream os;
                os << (scaled.marginal ? "marginal" : "unstable") << " Hurwitz test at " << vec_text(x);
                if (scaled.first_failure) {
                    os << " (first failure: "
                       << (scaled.first_failure->kind == HurwitzFailure::Kind::coefficient ? "coefficient c" : "minor ")
                       << scaled.first_failure->index << ")";
                }
                v.detail = os.str();
            }
        } catch (const MultiplicityMismatch& e) {
            if (v.ok()) {
                v.verdict = Verdict::failed;
                v.witness = x;
                v.detail = std::string("zero eigenvalue pattern broken at ") + vec_text(x) + ": " + e.what();
            }
        }
    }
    v.samples = pts.size();
    v.margins["min_hurwitz_minor"] = min_minor;
    v.margins["min_hurwitz_minor_scaled"] = min_scaled;
    if (v.ok()) v.detail = "nonzero eigenvalues of Dh0 in the open left half plane at all samples";
    if (!note.empty()) v.detail += " (sampling: " + note + ")";
    return v;
}

ConditionVerdict check_cis(const PerturbedSystem& sys, const std::function<Polytope(double)>& region_at,
                           const std::vector<double>& eps_list, std::size_t n_per_face, std::uint64_t seed,
                           const CheckTolerances& tol) {
    ConditionVerdict v{"CIS"};
    if (eps_list.empty()) {
        v.detail = "no eps values";
        return v;
    }
    std::mt19937_64 rng(seed);
    double min_margin = kInf;
    double worst_flux = -kInf;
    std::string worst_face;
    double worst_eps = 0.0;
    Vec worst_x;
    std::size_t count = 0;
    for (double eps : eps_list) {
        const Polytope poly = region_at(eps);
        for (std::size_t i = 0; i < poly.faces().size(); ++i) {
            const auto& f = poly.faces()[i];
            const Vec n = f.normal / f.normal.norm();
            for (const auto& x : poly.sample_face(i, n_per_face, rng)) {
                const double flux = n.dot(eval_h(sys, x, eps));
                ++count;
                min_margin = std::min(min_margin, -flux);
                if (flux > worst_flux) {
                    worst_flux = flux;
                    worst_face = f.label;
                    worst_eps = eps;
                    worst_x = x;
                }
            }
        }
    }
    v.samples = count;
    v.margins["min_inward_margin"] = min_margin + 0.0;  // no negative zero in reports
    if (worst_flux > tol.flux_tol) {
        v.verdict = Verdict::failed;
        v.witness = worst_x;
        std::ostringstream os;
        os << "outward flux " << worst_flux << " through face '" << worst_face << "' at eps = " << worst_eps
           << ", x = " << vec_text(worst_x);
        v.detail = os.str();
    } else {
        v.verdict = Verdict::certified;
        v.detail = "no outward flux on any sampled face point (sampling certificate, not a proof)";
    }
    return v;
}

ConditionVerdict check_cis(const PerturbedSystem& sys, const Polytope& poly, const std::vector<double>& eps_list,
                           std::size_t n_per_face, std::uint64_t seed, const CheckTolerances& tol) {
    return check_cis(sys, [&poly](double) { return poly; }, eps_list, n_per_face, seed, tol);
}

std::vector<Vec> find_stationary_points(const ReducedField& rf, const SlowManifold& mf,
                                        const StationaryOptions& opt) {
    const std::size_t per_dim = mf.dim() == 1 || std::holds_alternative<ImplicitOnly>(mf.chart)
                                    ? opt.n_starts
                                    : std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(
                                                                   std::pow(static_cast<double>(opt.n_starts),
                                                                            1.0 / static_cast<double>(mf.dim())))));
    const ManifoldSample starts = sample_manifold(mf, per_dim);
    const double diam = std::max(mf.region.diameter(), 1e-12);
    const auto m = static_cast<Eigen::Index>(mf.ambient_dim());

    std::vector<Vec> roots;
    for (const auto& x0 : starts.points) {
        Vec x = x0;
        bool converged = false;
        try {
            for (int it = 0; it < opt.max_iter; ++it) {
                const Mat B = tangent_space(mf, x);
                const Vec q = rf.q(x);
                Vec G(m);
                G << mf.decomposition.mu(x), B.transpose() * q;
                Mat JG(m, m);
                JG << mf.decomposition.mu.jacobian(x), B.transpose() * rf.q.jacobian(x);
                if (q.lpNorm<Eigen::Infinity>() < 1e-3 * opt.q_tol && mf.residual(x) <= 1e-3 * mf.tol_Y) {
                    converged = true;
                    break;
                }
                Eigen::FullPivLU<Mat> lu(JG);
                if (!lu.isInvertible()) break;
                Vec dx = -lu.solve(G);
                const double len = dx.norm();
                if (len > 0.25 * diam) dx *= 0.25 * diam / len;
                x += dx;
                if (!x.allFinite()) break;
                if (dx.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
                    converged = true;
                    break;
                }
            }
        } catch (const std::exception&) {
            continue;  // divergence at this start; other starts cover it
        }
        if (!converged) continue;
        if (auto c = correct_onto(mf, x)) x = *c;
        if (mf.residual(x) > mf.tol_Y) continue;
        if (rf.q(x).lpNorm<Eigen::Infinity>() >= opt.q_tol) continue;
        if (mf.region.violation(x) > 1e-8) continue;
        const bool seen = std::any_of(roots.begin(), roots.end(),
                                      [&](const Vec& y) { return (y - x).norm() < opt.dedupe; });
        if (!seen) roots.push_back(x);
    }
    return roots;
}

}  // namespace tfred
