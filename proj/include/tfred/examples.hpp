#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfred/manifold.hpp"
#include "tfred/polytope.hpp"
#include "tfred/reduction.hpp"
#include "tfred/system.hpp"

namespace tfred {

struct LyapunovCandidate {
    Field phi;  // R^m -> R
    int a = 1;
    double k = 1.0;
};

struct ExampleSystem {
    PerturbedSystem system;
    Decomposition decomposition;
    SlowManifold manifold;
    /// Region for the invariance check; may depend on eps (enzyme bounds that scale with eps).
    std::function<Polytope(double)> cis_region;
    /// Closed-form reduced field, meaningful on Y only. Empty when unknown.
    std::function<Vec(const Vec&)> closed_form_reduced;
    std::optional<Vec> closed_form_stationary;
    std::optional<LyapunovCandidate> lyapunov_candidate;
    Vec initial_state;
    std::string description;
};

class UnknownSystem : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using ExampleFactory = std::function<ExampleSystem(const ParamMap&)>;

/// Named systems in insertion order.
class Registry {
public:
    static Registry builtin();

    void add(std::string name, ParamMap defaults, ExampleFactory make);
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;
    const ParamMap& defaults(const std::string& name) const;
    ExampleSystem make(const std::string& name, const ParamMap& overrides = {}) const;
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        std::string name;
        ParamMap defaults;
        ExampleFactory make;
    };
    const Entry& find(const std::string& name) const;
    std::vector<Entry> entries_;
};

ExampleSystem get_example(const std::string& name, const ParamMap& overrides = {});

/// The closed-form reduced field at x; x must lie on Y.
Vec oracle_reduced_rhs(const ExampleSystem& ex, const Vec& x, double residual_tol = 1e-8);

/// Closed-form stationary point, or the unique numerically located one.
Vec oracle_stationary(const ExampleSystem& ex);

/// (A1, H2, A3) of the lower 3x3 block of the maltose Jacobian, in terms of
/// the nonnegative quantities a, b, c, d.
struct HurwitzTriple {
    double A1 = 0.0, H2 = 0.0, A3 = 0.0;
};
HurwitzTriple maltose_hurwitz_computed(double a, double b, double c, double d);
HurwitzTriple maltose_hurwitz_closed_form(double a, double b, double c, double d);
Mat maltose_fast_block(double a, double b, double c, double d);

struct HurwitzMatch {
    double max_deviation = 0.0;  // relative, max over tuples and quantities
    bool all_positive = true;
    std::size_t tuples = 0;
};
HurwitzMatch check_hurwitz_symbolic_match(std::size_t n = 200, std::uint64_t seed = 7, double upper = 5.0);

/// Guards of the two-dimensional inhibition example at points of L and Y.
struct InhibitionGuards {
    double min_denominator = 0.0;  // kappa + e0 + i0 - c1 - 2 c2
    double min_free_enzyme = 0.0;  // e0 - c2
    std::size_t samples = 0;
    bool ok() const { return min_denominator > 0.0 && min_free_enzyme > 0.0; }
};
InhibitionGuards inhibition_2d_guards(const ExampleSystem& ex, const std::vector<Vec>& samples);

}  // namespace tfred
