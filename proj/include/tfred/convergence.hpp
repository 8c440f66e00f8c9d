#pragma once

#include <string>
#include <vector>

#include "tfred/integrate.hpp"
#include "tfred/manifold.hpp"
#include "tfred/reduction.hpp"
#include "tfred/system.hpp"

namespace tfred {

struct SweepOptions {
    double tau0 = 0.1;
    double T = 50.0;
    std::size_t grid = 512;
    IntegratorConfig integrator{};
    ProjectionOptions projection{};
    bool record_timing = true;
    /// Relative slack of the secular-growth test (tail against head window).
    double tail_slack = 1e-3;
};

struct ConvergenceRow {
    double eps = 0.0;
    double sup_err = 0.0;   // over [tau0, T]
    double tail_err = 0.0;  // over [T/2, T]
    double head_err = 0.0;  // over [tau0, T/2)
    std::size_t n_steps_full = 0;
    std::size_t n_steps_reduced = 0;
    double wall_ms = 0.0;
    bool failed = false;
    bool tail_ok = false;
    std::string message;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    Vec projected_x0;
    double noise_floor = 0.0;

    bool monotone() const;
    bool tails_ok() const;
    bool passed() const { return monotone() && tails_ok(); }
    /// Least-squares slope of log(sup_err) against log(eps); NaN with fewer than two usable rows.
    double empirical_slope() const;

    std::string to_csv() const;
    std::string summary() const;
};

/// Full system in slow time (field h / eps) against the reduced system started
/// at the fast-fiber projection of x0, for each eps.
ConvergenceTable convergence_sweep(const PerturbedSystem& sys, const ReducedField& rf, const SlowManifold& mf,
                                   const Vec& x0, const std::vector<double>& eps_list, const SweepOptions& opt = {});

}  // namespace tfred
