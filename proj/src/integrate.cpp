#include "tfred/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace tfred {

namespace {

// RODAS 4(3) of Hairer & Wanner, in the form used by the classic Fortran
// code: M = I/(gamma h) - J, stages g_i = M^{-1}(f(x + sum a_ij g_j) + sum c_ij g_j / h).
namespace rodas {
constexpr double gamma = 0.25;
constexpr double a21 = 1.544;
constexpr double a31 = 0.9466785280815826, a32 = 0.2557011698983284;
constexpr double a41 = 3.314825187068521, a42 = 2.896124015972201, a43 = 0.9986419139977817;
constexpr double a51 = 1.221224509226641, a52 = 6.019134481288629, a53 = 12.53708332932087,
                 a54 = -0.6878860361058950;
constexpr double c21 = -5.6688;
constexpr double c31 = -2.430093356833875, c32 = -0.2063599157091915;
constexpr double c41 = -0.1073529058151375, c42 = -9.594562251023355, c43 = -20.47028614809616;
constexpr double c51 = 7.496443313967647, c52 = -10.24680431464352, c53 = -33.99990352819905,
                 c54 = 11.70890893206160;
constexpr double c61 = 8.083246795921522, c62 = -7.981132988064893, c63 = -31.52159432874371,
                 c64 = 16.31930543123136, c65 = -6.058818238834054;
constexpr double d21 = 10.12623508344586, d22 = -7.487995877610167, d23 = -34.80091861555747,
                 d24 = -7.992771707568823, d25 = 1.025137723295662;
constexpr double d31 = -0.6762803392801253, d32 = 6.087714651680015, d33 = 16.43084320892478,
                 d34 = 24.76722511418386, d35 = -6.594389125716872;
}  // namespace rodas

namespace dopri {
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dopri

bool all_finite(const Vec& v) { return v.allFinite(); }

double error_norm(const Vec& err, const Vec& x0, const Vec& x1, double rtol, double atol) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(x0[i]), std::abs(x1[i]));
        e = std::max(e, std::abs(err[i]) / sc);
    }
    return e;
}

struct StepResult {
    bool ok = false;  // false: evaluation failed, shrink and retry
    Vec x1, a, b;
    double err = 0.0;
};

double initial_step(const OdeRhs& rhs, const Vec& x0, const Vec& f0, double span, int order,
                    const IntegratorConfig& cfg) {
    auto scaled = [&](const Vec& v) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = cfg.atol + cfg.rtol * std::abs(x0[i]);
            s = std::max(s, std::abs(v[i]) / sc);
        }
        return s;
    };
    const double d0 = scaled(x0), d1 = scaled(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    double d2 = 0.0;
    try {
        const Vec f1 = rhs.f(x0 + h0 * f0);
        d2 = all_finite(f1) ? scaled(f1 - f0) / h0 : 0.0;
    } catch (const std::exception&) {
        return h0 * 1e-3;
    }
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / (order + 1));
    return std::min({100.0 * h0, h1, span});
}

class Rodas {
public:
    explicit Rodas(const OdeRhs& rhs) : rhs_(rhs) {}

    StepResult step(const Vec& x, const Vec& fx, double h, StepStats& st, const IntegratorConfig& cfg) {
        using namespace rodas;
        StepResult out;
        try {
            if (!jac_valid_) {
                J_ = rhs_.jacobian(x);
                ++st.jac_evals;
                jac_valid_ = true;
            }
            const auto n = x.size();
            Mat M = Mat::Identity(n, n) / (gamma * h) - J_;
            Eigen::PartialPivLU<Mat> lu(M);
            auto f = [&](const Vec& y) {
                ++st.f_evals;
                return rhs_.f(y);
            };
            const double ih = 1.0 / h;
            Vec g1 = lu.solve(fx);
            Vec g2 = lu.solve(f(x + a21 * g1) + (c21 * ih) * g1);
            Vec g3 = lu.solve(f(x + a31 * g1 + a32 * g2) + ih * (c31 * g1 + c32 * g2));
            Vec g4 = lu.solve(f(x + a41 * g1 + a42 * g2 + a43 * g3) + ih * (c41 * g1 + c42 * g2 + c43 * g3));
            Vec xt = x + a51 * g1 + a52 * g2 + a53 * g3 + a54 * g4;
            Vec g5 = lu.solve(f(xt) + ih * (c51 * g1 + c52 * g2 + c53 * g3 + c54 * g4));
            xt += g5;
            Vec err = lu.solve(f(xt) + ih * (c61 * g1 + c62 * g2 + c63 * g3 + c64 * g4 + c65 * g5));
            out.x1 = xt + err;
            if (!all_finite(out.x1) || !all_finite(err)) return out;
            out.a = d21 * g1 + d22 * g2 + d23 * g3 + d24 * g4 + d25 * g5;
            out.b = d31 * g1 + d32 * g2 + d33 * g3 + d34 * g4 + d35 * g5;
            out.err = error_norm(err, x, out.x1, cfg.rtol, cfg.atol);
            out.ok = std::isfinite(out.err);
        } catch (const std::exception&) {
            out.ok = false;
        }
        return out;
    }

    void accepted() { jac_valid_ = false; }
    static constexpr int order = 4;
    static constexpr double err_exponent = 0.25;

private:
    const OdeRhs& rhs_;
    Mat J_;
    bool jac_valid_ = false;
};

class Dopri {
public:
    explicit Dopri(const OdeRhs& rhs) : rhs_(rhs) {}

    StepResult step(const Vec& x, const Vec& k1, double h, StepStats& st, const IntegratorConfig& cfg) {
        using namespace dopri;
        StepResult out;
        try {
            auto f = [&](const Vec& y) {
                ++st.f_evals;
                return rhs_.f(y);
            };
            Vec k2 = f(x + h * (a21 * k1));
            Vec k3 = f(x + h * (a31 * k1 + a32 * k2));
            Vec k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
            Vec k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            Vec k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            out.x1 = x + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            if (!all_finite(out.x1)) return out;
            k7_ = f(out.x1);
            Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7_);
            // Cubic Hermite interpolant through both end slopes.
            const Vec delta = out.x1 - x;
            out.a = h * k1 - delta;
            out.b = -(out.a + (h * k7_ - delta));
            out.err = error_norm(err, x, out.x1, cfg.rtol, cfg.atol);
            out.ok = std::isfinite(out.err) && all_finite(k7_);
        } catch (const std::exception&) {
            out.ok = false;
        }
        return out;
    }

    void accepted() {}
    const Vec& last_slope() const { return k7_; }
    static constexpr int order = 5;
    static constexpr double err_exponent = 0.2;

private:
    const OdeRhs& rhs_;
    Vec k7_;
};

template <class Stepper>
Trajectory run(Stepper& stepper, const OdeRhs& rhs, const Vec& x0, double t0, double t1,
               const IntegratorConfig& cfg) {
    Trajectory traj(t0, x0);
    const double span = t1 - t0;
    Vec x = x0;
    Vec fx = rhs.f(x);
    ++traj.stats.f_evals;
    if (!all_finite(fx))
        throw IntegrationError(IntegrationError::Kind::bad_input, "right-hand side is not finite at the initial state",
                               traj);
    double h = cfg.h_init > 0.0 ? cfg.h_init : initial_step(rhs, x, fx, span, Stepper::order, cfg);
    h = std::min(h, cfg.h_max);
    const double h_min = 1e-14 * std::max(span, 1e-300);
    double t = t0;
    bool last_rejected = false;

    while (t < t1) {
        if (traj.stats.steps >= cfg.max_steps)
            throw IntegrationError(IntegrationError::Kind::max_steps,
                                   "maximum number of steps (" + std::to_string(cfg.max_steps) + ") exceeded at t = " +
                                       std::to_string(t),
                                   traj);
        bool final_step = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }
        if (h < h_min)
            throw IntegrationError(IntegrationError::Kind::step_underflow,
                                   "step size underflow at t = " + std::to_string(t) +
                                       " (stiffness or singularity detected)",
                                   traj);
        StepResult r = stepper.step(x, fx, h, traj.stats, cfg);
        if (!r.ok) {
            ++traj.stats.rejections;
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        double fac = std::clamp(std::pow(r.err, Stepper::err_exponent) / 0.9, 0.2, 5.0);
        if (r.err <= 1.0) {
            const double t_new = final_step ? t1 : t + h;
            x = r.x1;
            if constexpr (std::is_same_v<Stepper, Dopri>) {
                fx = stepper.last_slope();
            } else {
                fx = rhs.f(x);
                ++traj.stats.f_evals;
            }
            traj.append(t_new, x, std::move(r.a), std::move(r.b));
            ++traj.stats.steps;
            stepper.accepted();
            t = t_new;
            if (last_rejected) fac = std::max(fac, 1.0);  // no growth right after a rejection
            last_rejected = false;
            h = std::min(h / fac, cfg.h_max);
        } else {
            ++traj.stats.rejections;
            last_rejected = true;
            h /= std::max(fac, 1.0 / 0.9);
        }
    }
    return traj;
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(rtol > 0.0 && rtol <= 1e-2)) throw std::invalid_argument("rtol must lie in (0, 1e-2]");
    if (!(atol > 0.0)) throw std::invalid_argument("atol must be positive");
    if (h_init < 0.0 || !(h_max > 0.0)) throw std::invalid_argument("step bounds must be positive");
    if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

OdeRhs rhs_from_field(const Field& f, double scale) {
    return {[f, scale](const Vec& x) -> Vec { return scale * f(x); },
            [f, scale](const Vec& x) -> Mat { return scale * f.jacobian(x); }};
}

Trajectory::Trajectory(double t0, Vec x0) {
    times_.push_back(t0);
    states_.push_back(std::move(x0));
}

void Trajectory::append(double t, Vec x, Vec a, Vec b) {
    if (t <= times_.back()) throw std::invalid_argument("trajectory times must increase");
    times_.push_back(t);
    states_.push_back(std::move(x));
    a_.push_back(std::move(a));
    b_.push_back(std::move(b));
}

Vec Trajectory::at(double t) const {
    if (times_.empty()) throw std::out_of_range("empty trajectory");
    const double span = times_.back() - times_.front();
    const double slack = 1e-12 * std::max(1.0, std::abs(times_.back()));
    if (t < times_.front() - slack || t > times_.back() + slack)
        throw std::out_of_range("time " + std::to_string(t) + " outside trajectory range [" +
                                std::to_string(times_.front()) + ", " + std::to_string(times_.back()) + "]");
    if (times_.size() == 1 || span == 0.0) return states_.front();
    t = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i == 0) i = 1;
    if (i >= times_.size()) i = times_.size() - 1;
    const std::size_t k = i - 1;
    const double h = times_[i] - times_[k];
    const double th = (t - times_[k]) / h;
    if (th == 0.0) return states_[k];
    if (th == 1.0) return states_[i];
    return (1.0 - th) * states_[k] + th * (states_[i] + (1.0 - th) * (a_[k] + th * b_[k]));
}

Trajectory integrate(const OdeRhs& rhs, const Vec& x0, double t0, double t1, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!(t1 > t0)) throw IntegrationError(IntegrationError::Kind::bad_input, "empty time span", Trajectory(t0, x0));
    if (!all_finite(x0))
        throw IntegrationError(IntegrationError::Kind::bad_input, "initial state is not finite", Trajectory(t0, x0));
    if (cfg.method == Method::implicit_l_stable) {
        if (!rhs.jacobian) throw std::invalid_argument("the implicit method needs a Jacobian");
        Rodas s(rhs);
        return run(s, rhs, x0, t0, t1, cfg);
    }
    Dopri s(rhs);
    return run(s, rhs, x0, t0, t1, cfg);
}

int method_order(Method m) { return m == Method::implicit_l_stable ? Rodas::order : Dopri::order; }

double WindowErrors::sup() const {
    double s = 0.0;
    for (double e : errors) s = std::max(s, e);
    return s;
}

double WindowErrors::sup_from(double t_from) const {
    double s = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_from) s = std::max(s, errors[i]);
    return s;
}

double WindowErrors::sup_before(double t_from) const {
    double s = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] < t_from) s = std::max(s, errors[i]);
    return s;
}

WindowErrors window_errors(const Trajectory& full, const Trajectory& reduced, double tau0, double T, std::size_t grid) {
    if (!(tau0 < T)) throw std::invalid_argument("comparison window needs tau0 < T");
    if (grid < 2) throw std::invalid_argument("comparison grid needs at least two points");
    auto covers = [&](const Trajectory& tr) {
        const double slack = 1e-12 * std::max(1.0, std::abs(T));
        return !tr.empty() && tr.t_begin() <= tau0 + slack && tr.t_end() >= T - slack;
    };
    if (!covers(full) || !covers(reduced)) throw std::invalid_argument("trajectories do not cover the comparison window");
    WindowErrors w;
    w.times.reserve(grid);
    w.errors.reserve(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        const double t = i + 1 == grid ? T : tau0 + (T - tau0) * static_cast<double>(i) / static_cast<double>(grid - 1);
        w.times.push_back(t);
        w.errors.push_back((full.at(t) - reduced.at(t)).lpNorm<Eigen::Infinity>());
    }
    return w;
}

double compare_on_window(const Trajectory& full, const Trajectory& reduced, double tau0, double T, std::size_t grid) {
    return window_errors(full, reduced, tau0, T, grid).sup();
}

}  // namespace tfred
