#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tfred/integrate.hpp"
#include "tfred/polytope.hpp"
#include "tfred/reduction.hpp"
#include "tfred/system.hpp"

namespace tfred {

/// Y as the graph of gamma: x[dependent] = gamma(x[free]) over w in domain.
struct GraphChart {
    std::vector<std::size_t> free_coords;
    std::vector<std::size_t> dependent_coords;
    Field gamma;
    Polytope domain;
};

/// Y as a curve traced by arc length from a seed near it.
struct Curve1dChart {
    Vec seed;
    int orientation = 1;
};

struct ImplicitOnly {};

using Chart = std::variant<ImplicitOnly, GraphChart, Curve1dChart>;

inline constexpr double kDefaultTolY = 1e-10;
inline constexpr double kDefaultTolFp = 1e-12;

struct SlowManifold {
    Decomposition decomposition;
    Polytope region;
    Chart chart = ImplicitOnly{};
    double tol_Y = kDefaultTolY;

    std::size_t ambient_dim() const { return decomposition.dim; }
    std::size_t dim() const { return decomposition.dim - decomposition.rank; }
    double residual(const Vec& x) const { return decomposition.mu(x).lpNorm<Eigen::Infinity>(); }
    std::string chart_name() const;
};

struct ManifoldSample {
    std::vector<Vec> points;
    std::vector<Vec> params;  // arc length (1-d) or w in W (graph)
    bool complete = true;
    std::string diagnostic;
};

ManifoldSample sample_manifold(const SlowManifold& mf, std::size_t n);

/// Orthonormal basis of ker D mu(x), m x s.
Mat tangent_space(const SlowManifold& mf, const Vec& x);

/// Minimum-norm Newton correction onto mu = 0. Returns nullopt on failure.
std::optional<Vec> correct_onto(const SlowManifold& mf, const Vec& x, int max_iter = 30);

class ProjectionDiverged : public std::runtime_error {
public:
    ProjectionDiverged(const std::string& what, Vec last) : std::runtime_error(what), last_state(std::move(last)) {}
    Vec last_state;
};

struct ProjectionOptions {
    double tol_fp = kDefaultTolFp;
    double t_max = 1e6;
    double rtol = 1e-10;
    double atol = 1e-14;
};

/// omega-limit of x' = h0(x) started at x.
Vec fast_fiber_project(const PerturbedSystem& sys, const SlowManifold& mf, const Vec& x,
                       const ProjectionOptions& opt = {});

/// Arc-length parametrization of a one-dimensional Y inside its region,
/// obtained by integrating the unit tangent field from the seed in both
/// directions until the region boundary.
class CurveTrace {
public:
    struct Node {
        double sigma;
        Vec x;
        Vec t;
    };

    static CurveTrace trace(const SlowManifold& mf);

    double sigma_begin() const { return nodes_.front().sigma; }
    double sigma_end() const { return nodes_.back().sigma; }
    double length() const { return sigma_end() - sigma_begin(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    bool complete() const { return complete_; }
    const std::string& diagnostic() const { return diagnostic_; }

    /// Point of Y at arc length sigma, corrected onto mu = 0.
    Vec point(double sigma) const;
    /// Unit tangent at arc length sigma, oriented with increasing sigma.
    Vec tangent(double sigma) const;
    /// Arc length of a point on (or very near) the curve.
    double sigma_of(const Vec& x) const;

private:
    explicit CurveTrace(SlowManifold mf) : mf_(std::move(mf)) {}
    Vec interpolate(double sigma, std::size_t* segment = nullptr) const;

    SlowManifold mf_;
    std::vector<Node> nodes_;
    bool complete_ = true;
    std::string diagnostic_;
};

/// Generalized cross product of the rows of D mu(x) (r = m - 1), normalized.
Vec curve_tangent(const SlowManifold& mf, const Vec& x);

}  // namespace tfred
