#include "tfred/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tfred/linalg.hpp"

namespace tfred {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double integrate_gk(const std::function<double(double)>& f, double a, double b) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 4, 1e-10);
}

}  // namespace

double LyapunovCertificate::envelope_constant() const {
    return std::pow(c2_star / c1_star, 1.0 / static_cast<double>(a));
}

LyapunovCertificate fit_certificate(std::function<double(const Vec&)> phi, std::function<double(const Vec&)> lie,
                                    const Vec& z, int a, double k, const std::vector<Vec>& samples,
                                    const FitOptions& opt) {
    if (a < 1) throw std::invalid_argument("norm-equivalence exponent a must be a positive integer");
    if (k < 1.0) throw std::domain_error("decay exponent k must be >= 1");
    LyapunovCertificate c;
    c.phi = std::move(phi);
    c.lie = std::move(lie);
    c.z = z;
    c.a = a;
    c.k = k;

    double diam = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = i + 1; j < samples.size(); ++j) diam = std::max(diam, (samples[i] - samples[j]).norm());
    c.rho = opt.rho > 0.0 ? opt.rho : 0.25 * diam;

    double rate = kInf;
    double lo = kInf, hi = 0.0, lo_all = kInf, hi_all = 0.0;
    for (const auto& x : samples) {
        const double d = (x - z).norm();
        if (d < 1e-9) continue;
        const double f = c.phi(x);
        if (f >= opt.phi_floor) rate = std::min(rate, -c.lie(x) / std::pow(f, k));
        const double ratio = f / std::pow(d, a);
        lo_all = std::min(lo_all, ratio);
        hi_all = std::max(hi_all, ratio);
        if (d <= c.rho) {
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    c.nu = std::isfinite(rate) ? opt.nu_factor * rate : 0.0;
    if (!std::isfinite(lo)) lo = lo_all, hi = hi_all;
    c.c1 = (1.0 - opt.bound_safety) * lo;
    c.c2 = (1.0 + opt.bound_safety) * hi;
    c.c1_star = (1.0 - opt.bound_safety) * lo_all;
    c.c2_star = (1.0 + opt.bound_safety) * hi_all;
    return c;
}

LyapunovCertificate certificate_from_field(const Field& phi, const ReducedField& rf, const Vec& z, int a, double k,
                                           const std::vector<Vec>& samples, const FitOptions& opt) {
    auto f = [phi](const Vec& x) { return phi(x)[0]; };
    auto lie = [phi, q = rf.q](const Vec& x) { return (phi.jacobian(x) * q(x))(0, 0); };
    return fit_certificate(f, lie, z, a, k, samples, opt);
}

LyapunovCertificate check_lc_1d(const ReducedField& rf, const SlowManifold& mf, const Vec& z, std::size_t n_fit) {
    if (mf.dim() != 1 || !std::holds_alternative<Curve1dChart>(mf.chart))
        throw std::invalid_argument("check_lc_1d needs a one-dimensional curve chart");
    const std::size_t m = mf.ambient_dim();

    // Spectrum of Dq(z): zero with multiplicity m-1 and one negative eigenvalue
    // whose eigenvector is tangent to Y.
    const Mat J = rf.q.jacobian(z);
    const double scale = J.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) throw NotLinearlyStable("Dq(z) vanishes; linearization is degenerate");
    double lambda = 0.0;
    try {
        const CharPoly p = deflate_zero_roots(char_poly(J / scale), m - 1, 1e-8);
        lambda = -p[0] * scale;
    } catch (const MultiplicityMismatch& e) {
        throw NotLinearlyStable(std::string("Dq(z) does not have a simple nonzero eigenvalue: ") + e.what());
    }
    if (!(lambda < -1e-8))
        throw NotLinearlyStable("nonzero eigenvalue of Dq(z) is " + std::to_string(lambda) + " (needs < -1e-8)");
    const Vec t_z = tangent_space(mf, z).col(0);
    const double eig_res = (J * t_z - lambda * t_z).norm();
    if (eig_res > 1e-6 * (std::abs(lambda) + J.norm()))
        throw NotLinearlyStable("eigenvector of the nonzero eigenvalue is not tangent to Y (residual " +
                                std::to_string(eig_res) + ")");

    auto trace = std::make_shared<const CurveTrace>(CurveTrace::trace(mf));
    const double sz = trace->sigma_of(z);
    auto p = [trace, q = rf.q](double s) {
        const Vec x = trace->point(s);
        return trace->tangent(s).dot(q(x));
    };

    // p must point towards z everywhere else on the curve.
    const auto& nodes = trace->nodes();
    const double delta = 1e-6 * std::max(trace->length(), 1e-12);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (double s : {nodes[i].sigma, i + 1 < nodes.size() ? 0.5 * (nodes[i].sigma + nodes[i + 1].sigma) : nodes[i].sigma}) {
            if (std::abs(s - sz) <= delta) continue;
            const double v = p(s) * (s > sz ? 1.0 : -1.0);
            if (!(v < 0.0))
                throw MultipleEquilibria("reduced field does not point towards z at arc length " + std::to_string(s),
                                         trace->point(s));
        }
    }

    // phi at every node, accumulated outward from z.
    auto table = std::make_shared<std::vector<double>>(nodes.size(), 0.0);
    std::size_t iz = 0;
    while (iz + 1 < nodes.size() && nodes[iz + 1].sigma <= sz) ++iz;
    auto integrand = [&p](double s) { return -p(s); };
    {
        double acc = integrate_gk(integrand, sz, nodes[iz].sigma);
        (*table)[iz] = acc;
        for (std::size_t i = iz; i-- > 0;) {
            acc += integrate_gk(integrand, nodes[i + 1].sigma, nodes[i].sigma);
            (*table)[i] = acc;
        }
        if (iz + 1 < nodes.size()) {
            acc = integrate_gk(integrand, sz, nodes[iz + 1].sigma);
            (*table)[iz + 1] = acc;
            for (std::size_t i = iz + 2; i < nodes.size(); ++i) {
                acc += integrate_gk(integrand, nodes[i - 1].sigma, nodes[i].sigma);
                (*table)[i] = acc;
            }
        }
    }

    auto phi_sigma = [trace, table, sz, p](double s) {
        const auto& ns = trace->nodes();
        // start from the nearest node on the same side of z
        std::size_t best = 0;
        double dbest = kInf;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if ((ns[i].sigma - sz) * (s - sz) < 0.0) continue;
            const double d = std::abs(ns[i].sigma - s);
            if (d < dbest) dbest = d, best = i;
        }
        double base = (*table)[best], from = ns[best].sigma;
        if (std::abs(s - sz) < std::abs(s - from)) base = 0.0, from = sz;
        return base + integrate_gk([&p](double u) { return -p(u); }, from, s);
    };
    auto phi = [trace, phi_sigma](const Vec& x) { return phi_sigma(trace->sigma_of(x)); };
    auto lie = [trace, p](const Vec& x) {
        const double v = p(trace->sigma_of(x));
        return -v * v;
    };

    std::vector<Vec> samples;
    samples.reserve(n_fit);
    for (std::size_t i = 0; i < n_fit; ++i)
        samples.push_back(trace->point(trace->sigma_begin() +
                                       trace->length() * static_cast<double>(i) / static_cast<double>(n_fit - 1)));
    FitOptions opt;
    opt.rho = 0.25 * trace->length();
    LyapunovCertificate cert = fit_certificate(phi, lie, z, 2, 1.0, samples, opt);
    cert.eigenvalue = lambda;
    if (!(cert.nu > 0.0)) throw MultipleEquilibria("no positive decay rate could be fitted", z);
    return cert;
}

LyapunovCheck verify_lyapunov(const LyapunovCertificate& cert, const std::vector<Vec>& samples) {
    LyapunovCheck out;
    out.samples = samples.size();
    const double phi_z = cert.phi(cert.z);
    double pos = kInf, bounds = kInf, dec = kInf, worst_rate = kInf;
    std::optional<Vec> worst_rate_x;
    std::ostringstream detail;
    for (const auto& x : samples) {
        const double d = (x - cert.z).norm();
        const double f = cert.phi(x);
        if (d < 1e-9) continue;
        // (i) positive away from z
        if (f < pos) {
            pos = f;
            if (f <= 0.0 && !out.witness) out.witness = x;
        }
        // (ii) c1 d^a <= phi <= c2 d^a, near z
        if (d <= cert.rho) {
            const double da = std::pow(d, cert.a);
            const double sl = std::min(f - cert.c1 * da, cert.c2 * da - f) / da;
            if (sl < bounds) {
                bounds = sl;
                if (sl < 0.0 && !out.witness) out.witness = x;
            }
        }
        // (iii) L_q phi <= -nu phi^k
        if (f > 0.0) {
            const double rate = -cert.lie(x) / std::pow(f, cert.k);
            if (rate < worst_rate) worst_rate = rate, worst_rate_x = x;
        }
        const double sl = -cert.nu * std::pow(std::max(f, 0.0), cert.k) - cert.lie(x);
        const double scaled = sl / std::max(std::abs(f), 1e-300);
        if (scaled < dec) {
            dec = scaled;
            if (sl < -1e-14 * (1.0 + std::abs(f)) && !out.witness) out.witness = x;
        }
    }
    out.positivity_slack = pos;
    out.bounds_slack = bounds;
    out.decrease_slack = dec;
    out.positivity = std::abs(phi_z) <= 1e-12 && pos > 0.0;
    out.power_bounds = !(bounds < 0.0);
    // relative slack per unit phi; tolerate roundoff only
    out.decrease = cert.nu > 0.0 && !(dec < -1e-10);
    // with no positive rate the witness is where phi decays slowest (or grows)
    if (!(cert.nu > 0.0) && !out.witness) out.witness = worst_rate_x;
    if (!out.positivity) detail << "phi(z) = " << phi_z << ", min phi away from z = " << pos << "; ";
    if (!out.power_bounds) detail << "power bounds violated (slack " << bounds << "); ";
    if (!out.decrease) detail << "L_q phi <= -nu phi^k violated (relative slack " << dec << ", nu = " << cert.nu << "); ";
    out.detail = detail.str();
    if (out.ok()) out.witness.reset();
    return out;
}

LyapunovCheck verify_lyapunov(const LyapunovCertificate& cert, const ReducedField&, const SlowManifold& mf,
                              std::size_t n_samples) {
    ManifoldSample s = sample_manifold(mf, n_samples);
    return verify_lyapunov(cert, s.points);
}

double decay_envelope(const LyapunovCertificate& cert, double phi0, double tau) {
    if (cert.k < 1.0) throw std::domain_error("decay envelope needs k >= 1");
    if (tau < 0.0) throw std::invalid_argument("decay envelope needs tau >= 0");
    if (!(phi0 > 0.0)) throw std::invalid_argument("decay envelope needs phi0 > 0");
    const double a = static_cast<double>(cert.a);
    if (cert.k == 1.0) return std::exp(-cert.nu * tau / a);
    const double k = cert.k;
    return std::pow((k - 1.0) * cert.nu * tau * std::pow(phi0, k - 1.0) + 1.0, 1.0 / (a * (1.0 - k)));
}

ConditionVerdict lc_verdict(const LyapunovCertificate& cert, const LyapunovCheck& check) {
    ConditionVerdict v{"LC"};
    v.samples = check.samples;
    v.margins["nu"] = cert.nu;
    v.margins["positivity_slack"] = check.positivity_slack;
    v.margins["power_bound_slack"] = check.bounds_slack;
    v.margins["decrease_slack"] = check.decrease_slack;
    v.margins["c1"] = cert.c1;
    v.margins["c2"] = cert.c2;
    v.margins["c1_star"] = cert.c1_star;
    v.margins["c2_star"] = cert.c2_star;
    v.margins["rho"] = cert.rho;
    if (cert.eigenvalue != 0.0) v.margins["eigenvalue"] = cert.eigenvalue;
    if (check.ok()) {
        v.verdict = Verdict::certified;
        std::ostringstream os;
        os << "Lyapunov certificate verified (a = " << cert.a << ", k = " << cert.k << ", nu = " << cert.nu << ")";
        v.detail = os.str();
    } else {
        v.verdict = Verdict::failed;
        v.witness = check.witness ? check.witness : std::optional<Vec>(cert.z);
        v.detail = check.detail;
    }
    return v;
}

}  // namespace tfred
