#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfred/field.hpp"

namespace tfred {

enum class Method {
    implicit_l_stable,  // Rosenbrock RODAS 4(3), L-stable, Jacobian required
    explicit_adaptive,  // Dormand-Prince 5(4)
};

struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 0.0;  // 0 selects a starting step automatically
    double h_max = std::numeric_limits<double>::infinity();
    Method method = Method::implicit_l_stable;
    std::size_t max_steps = 200000;

    void validate() const;
};

/// Autonomous right-hand side x' = f(x), with optional Jacobian.
struct OdeRhs {
    std::function<Vec(const Vec&)> f;
    std::function<Mat(const Vec&)> jacobian;
};

OdeRhs rhs_from_field(const Field& f, double scale = 1.0);

struct StepStats {
    std::size_t steps = 0;
    std::size_t rejections = 0;
    std::size_t f_evals = 0;
    std::size_t jac_evals = 0;
};

/// Accepted steps with a dense interpolant on every interval:
/// x(t0 + th h) = (1-th) x0 + th (x1 + (1-th)(a + th b)).
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(double t0, Vec x0);

    void append(double t, Vec x, Vec a, Vec b);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Vec>& states() const { return states_; }
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    /// Dense output; t must lie in [t_begin, t_end].
    Vec at(double t) const;

    StepStats stats;

private:
    std::vector<double> times_;
    std::vector<Vec> states_;
    std::vector<Vec> a_, b_;
};

class IntegrationError : public std::runtime_error {
public:
    enum class Kind { step_underflow, max_steps, bad_input };
    IntegrationError(Kind kind, const std::string& what, Trajectory partial)
        : std::runtime_error(what), kind(kind), partial(std::move(partial)) {}
    Kind kind;
    Trajectory partial;
};

Trajectory integrate(const OdeRhs& rhs, const Vec& x0, double t0, double t1, const IntegratorConfig& cfg);

/// Advertised convergence order of the propagated solution.
int method_order(Method m);

/// ||full(t) - reduced(t)||_inf on a uniform grid of `grid` points over [tau0, T].
struct WindowErrors {
    std::vector<double> times;
    std::vector<double> errors;
    double sup() const;
    /// Largest error over grid points with t >= t_from (or t < t_from for `before`).
    double sup_from(double t_from) const;
    double sup_before(double t_from) const;
};

WindowErrors window_errors(const Trajectory& full, const Trajectory& reduced, double tau0, double T, std::size_t grid);
double compare_on_window(const Trajectory& full, const Trajectory& reduced, double tau0, double T, std::size_t grid = 512);

}  // namespace tfred
