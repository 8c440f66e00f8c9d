#include "tfred/system.hpp"

#include <cmath>
#include <stdexcept>

namespace tfred {

namespace {

void check_point(const PerturbedSystem& sys, const Vec& x) {
    if (static_cast<std::size_t>(x.size()) != sys.dim)
        throw DimensionError(sys.name + ": point has length " + std::to_string(x.size()) + ", expected " +
                             std::to_string(sys.dim));
}

Vec with_eps(const Vec& x, double eps) {
    Vec xe(x.size() + 1);
    xe << x, eps;
    return xe;
}

}  // namespace

Vec eval_h(const PerturbedSystem& sys, const Vec& x, double eps) {
    check_point(sys, x);
    if (eps < 0.0) throw std::invalid_argument("eps must be nonnegative");
    Vec h = sys.h0(x);
    if (eps != 0.0) {
        h += eps * sys.h1(x);
        if (sys.hstar) h += eps * eps * (*sys.hstar)(with_eps(x, eps));
    }
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        if (!std::isfinite(h[i]))
            throw EvaluationError(sys.name + ": non-finite value in component " + std::to_string(i));
    }
    return h;
}

Mat jacobian_h(const PerturbedSystem& sys, const Vec& x, double eps) {
    check_point(sys, x);
    Mat J = sys.h0.jacobian(x);
    if (eps != 0.0) {
        J += eps * sys.h1.jacobian(x);
        if (sys.hstar) {
            Mat Js = sys.hstar->jacobian(with_eps(x, eps));
            J += eps * eps * Js.leftCols(static_cast<Eigen::Index>(sys.dim));
        }
    }
    return J;
}

double param(const ParamMap& params, const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) {
        std::string names;
        for (const auto& [k, v] : params) names += (names.empty() ? "" : ", ") + k;
        throw std::invalid_argument("unknown parameter '" + key + "' (known: " + names + ")");
    }
    return it->second;
}

ParamMap merge_params(const ParamMap& defaults, const ParamMap& overrides) {
    ParamMap out = defaults;
    for (const auto& [k, v] : overrides) {
        if (!out.contains(k)) param(defaults, k);  // throws with the list of names
        if (!std::isfinite(v)) throw std::invalid_argument("parameter '" + k + "' must be finite");
        out[k] = v;
    }
    return out;
}

}  // namespace tfred
