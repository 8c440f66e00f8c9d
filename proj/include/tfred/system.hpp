#pragma once

#include <map>
#include <optional>
#include <string>

#include "tfred/field.hpp"

namespace tfred {

using ParamMap = std::map<std::string, double>;

/// h(x, eps) = h0(x) + eps h1(x) + eps^2 hstar(x, eps).
///
/// hstar, when present, is a field on R^{m+1} whose last input is eps.
struct PerturbedSystem {
    std::string name;
    std::size_t dim = 0;
    Field h0;
    Field h1;
    std::optional<Field> hstar;
    ParamMap params;
    double eps_max = 1.0;
};

Vec eval_h(const PerturbedSystem& sys, const Vec& x, double eps);

/// Jacobian of h(., eps) with respect to x.
Mat jacobian_h(const PerturbedSystem& sys, const Vec& x, double eps);

/// Looks up a parameter, throwing with the available names if absent.
double param(const ParamMap& params, const std::string& key);

/// Applies name=value overrides; unknown names are rejected.
ParamMap merge_params(const ParamMap& defaults, const ParamMap& overrides);

}  // namespace tfred
