#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfred/manifold.hpp"
#include "tfred/polytope.hpp"
#include "tfred/reduction.hpp"
#include "tfred/system.hpp"

namespace tfred {

enum class Verdict { certified, failed, skipped };

const char* verdict_name(Verdict v);

struct ConditionVerdict {
    std::string name;
    Verdict verdict = Verdict::skipped;
    std::string detail;
    std::optional<Vec> witness;
    std::map<std::string, double> margins;
    std::size_t samples = 0;

    bool ok() const { return verdict == Verdict::certified; }
};

struct ConditionReport {
    std::string system;
    std::vector<ConditionVerdict> conditions;
    std::map<std::string, std::string> info;

    /// No condition failed (skipped ones are named but do not fail the run).
    bool passed() const;
    std::string to_text() const;
};

struct CheckTolerances {
    double rank_tol = 1e-8;
    double deflation_tol = 1e-8;  // on the Jacobian scaled to unit max entry
    double hurwitz_tol = 1e-10;
    double flux_tol = 1e-10;
};

/// TF0 (rank r on Y) and TFI (zero eigenvalue semisimple), both at manifold samples.
std::pair<ConditionVerdict, ConditionVerdict> check_tf0_tfi(const PerturbedSystem& sys, const Decomposition& d,
                                                            const SlowManifold& mf, std::size_t n_samples,
                                                            const CheckTolerances& tol = {});

ConditionVerdict check_tfii(const PerturbedSystem& sys, const SlowManifold& mf, std::size_t n_samples,
                            const CheckTolerances& tol = {});

/// Sampling certificate of positive invariance: n . h(x, eps) <= flux_tol on every face.
ConditionVerdict check_cis(const PerturbedSystem& sys, const std::function<Polytope(double)>& region_at,
                           const std::vector<double>& eps_list, std::size_t n_per_face, std::uint64_t seed = 1,
                           const CheckTolerances& tol = {});
ConditionVerdict check_cis(const PerturbedSystem& sys, const Polytope& poly, const std::vector<double>& eps_list,
                           std::size_t n_per_face, std::uint64_t seed = 1, const CheckTolerances& tol = {});

struct StationaryOptions {
    std::size_t n_starts = 100;  // per chart dimension for graphs
    double q_tol = 1e-10;
    double dedupe = 1e-6;
    int max_iter = 60;
};

/// Multistart Newton on (mu(x) = 0, B(x)^T q(x) = 0) with B a tangent basis.
std::vector<Vec> find_stationary_points(const ReducedField& rf, const SlowManifold& mf,
                                        const StationaryOptions& opt = {});

}  // namespace tfred
