#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfred/conditions.hpp"
#include "tfred/manifold.hpp"
#include "tfred/reduction.hpp"

namespace tfred {

/// Everything the exponential (k = 1) or algebraic (k > 1) decay bound needs.
struct LyapunovCertificate {
    std::function<double(const Vec&)> phi;
    std::function<double(const Vec&)> lie;  // L_q phi
    Vec z;
    double nu = 0.0;
    double k = 1.0;
    int a = 2;
    double c1 = 0.0, c2 = 0.0;            // power bounds on the ball of radius rho
    double c1_star = 0.0, c2_star = 0.0;  // the same bounds over all of Y in the region
    double rho = 0.0;
    double eigenvalue = 0.0;  // nonzero eigenvalue of Dq(z) when built from a curve

    /// (c2*/c1*)^(1/a): ||x(t) - z|| <= c ||x0 - z|| gamma(t).
    double envelope_constant() const;
};

class NotLinearlyStable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MultipleEquilibria : public std::runtime_error {
public:
    MultipleEquilibria(const std::string& what, Vec where) : std::runtime_error(what), where(std::move(where)) {}
    Vec where;
};

struct FitOptions {
    double rho = 0.0;           // 0: a quarter of the sample diameter
    double nu_factor = 0.9;
    double bound_safety = 0.1;  // c1 shrunk and c2 grown by this fraction
    double phi_floor = 1e-12;
};

/// Fits nu, c1, c2, rho from samples of Y.
LyapunovCertificate fit_certificate(std::function<double(const Vec&)> phi, std::function<double(const Vec&)> lie,
                                    const Vec& z, int a, double k, const std::vector<Vec>& samples,
                                    const FitOptions& opt = {});

/// Certificate for a user-supplied phi given as a field on R^m.
LyapunovCertificate certificate_from_field(const Field& phi, const ReducedField& rf, const Vec& z, int a, double k,
                                           const std::vector<Vec>& samples, const FitOptions& opt = {});

/// One-dimensional construction: phi(sigma) = -int_{sigma_z}^{sigma} p along arc length,
/// with p the tangential component of q.
LyapunovCertificate check_lc_1d(const ReducedField& rf, const SlowManifold& mf, const Vec& z,
                                std::size_t n_fit = 200);

struct LyapunovCheck {
    bool positivity = false;
    bool power_bounds = false;
    bool decrease = false;
    double positivity_slack = 0.0;
    double bounds_slack = 0.0;
    double decrease_slack = 0.0;
    std::size_t samples = 0;
    std::optional<Vec> witness;
    std::string detail;
    bool ok() const { return positivity && power_bounds && decrease; }
};

LyapunovCheck verify_lyapunov(const LyapunovCertificate& cert, const std::vector<Vec>& samples);
LyapunovCheck verify_lyapunov(const LyapunovCertificate& cert, const ReducedField& rf, const SlowManifold& mf,
                              std::size_t n_samples);

/// gamma(tau): exp(-nu tau / a) for k = 1, ((k-1) nu tau phi0^(k-1) + 1)^(1/(a(1-k))) for k > 1.
double decay_envelope(const LyapunovCertificate& cert, double phi0, double tau);

ConditionVerdict lc_verdict(const LyapunovCertificate& cert, const LyapunovCheck& check);

}  // namespace tfred
