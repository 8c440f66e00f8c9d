#include "tfred/convergence.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tfred {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

bool ConvergenceTable::monotone() const {
    if (rows.empty()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].failed) return false;
        if (i > 0 && !(rows[i].sup_err < rows[i - 1].sup_err)) return false;
    }
    return true;
}

bool ConvergenceTable::tails_ok() const {
    if (rows.empty()) return false;
    for (const auto& r : rows)
        if (r.failed || !r.tail_ok) return false;
    return true;
}

double ConvergenceTable::empirical_slope() const {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : rows) {
        if (r.failed || !(r.sup_err > 0.0)) continue;
        const double x = std::log(r.eps), y = std::log(r.sup_err);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

std::string ConvergenceTable::to_csv() const {
    std::ostringstream os;
    os << "eps,sup_err,tail_err,n_steps_full,n_steps_reduced,wall_ms\n";
    for (const auto& r : rows) {
        if (r.failed) {
            os << num(r.eps) << ",nan,nan," << r.n_steps_full << ',' << r.n_steps_reduced << ',' << num(r.wall_ms)
               << '\n';
            continue;
        }
        os << num(r.eps) << ',' << num(r.sup_err) << ',' << num(r.tail_err) << ',' << r.n_steps_full << ','
           << r.n_steps_reduced << ',' << num(r.wall_ms) << '\n';
    }
    return os.str();
}

std::string ConvergenceTable::summary() const {
    std::ostringstream os;
    os.precision(6);
    os << "rows = " << rows.size() << '\n';
    os << "monotone_decrease = " << (monotone() ? "yes" : "no") << '\n';
    os << "tail_check = " << (tails_ok() ? "pass" : "fail") << '\n';
    os << "noise_floor = " << noise_floor << '\n';
    const double slope = empirical_slope();
    os << "empirical_slope = " << (std::isnan(slope) ? std::string("n/a") : num(slope)) << '\n';
    for (const auto& r : rows) {
        os << "eps = " << r.eps << ": ";
        if (r.failed) {
            os << "FAILED (" << r.message << ")\n";
            continue;
        }
        os << "sup_err = " << r.sup_err << ", head_err = " << r.head_err << ", tail_err = " << r.tail_err
           << ", tail " << (r.tail_ok ? "ok" : "GROWS") << '\n';
    }
    os << "verdict = " << (passed() ? "converging" : "not converging") << '\n';
    return os.str();
}

ConvergenceTable convergence_sweep(const PerturbedSystem& sys, const ReducedField& rf, const SlowManifold& mf,
                                   const Vec& x0, const std::vector<double>& eps_list, const SweepOptions& opt) {
    if (eps_list.empty()) throw std::invalid_argument("eps list is empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0)) throw std::invalid_argument("eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("eps list must be strictly decreasing");
    }
    if (!(opt.tau0 > 0.0) || !(opt.tau0 < opt.T)) throw std::invalid_argument("need 0 < tau0 < T");
    opt.integrator.validate();

    ConvergenceTable table;
    table.projected_x0 = fast_fiber_project(sys, mf, x0, opt.projection);

    const Trajectory reduced = integrate(rhs_from_field(rf.q), table.projected_x0, 0.0, opt.T, opt.integrator);
    double scale = 0.0;
    for (const auto& x : reduced.states()) scale = std::max(scale, x.lpNorm<Eigen::Infinity>());
    // Differences at the level of the integration tolerance carry no information.
    table.noise_floor = 10.0 * (opt.integrator.atol + opt.integrator.rtol * scale);
    const double t_half = 0.5 * opt.T;

    for (double eps : eps_list) {
        ConvergenceRow row;
        row.eps = eps;
        row.n_steps_reduced = reduced.stats.steps;
        const auto start = std::chrono::steady_clock::now();
        try {
            OdeRhs full{[&sys, eps](const Vec& x) -> Vec { return eval_h(sys, x, eps) / eps; },
                        [&sys, eps](const Vec& x) -> Mat { return jacobian_h(sys, x, eps) / eps; }};
            const Trajectory tr = integrate(full, x0, 0.0, opt.T, opt.integrator);
            row.n_steps_full = tr.stats.steps;
            const WindowErrors w = window_errors(tr, reduced, opt.tau0, opt.T, opt.grid);
            row.sup_err = w.sup();
            row.tail_err = w.sup_from(t_half);
            row.head_err = w.sup_before(t_half);
            row.tail_ok = row.tail_err <= row.sup_err &&
                          row.tail_err <= (1.0 + opt.tail_slack) * row.head_err + table.noise_floor;
        } catch (const IntegrationError& e) {
            row.failed = true;
            row.n_steps_full = e.partial.stats.steps;
            row.message = e.what();
        } catch (const std::exception& e) {
            row.failed = true;
            row.message = e.what();
        }
        if (opt.record_timing)
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace tfred
