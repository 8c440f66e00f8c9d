#include "tfred/field.hpp"

#include <cmath>

namespace tfred {

Field Field::zero(std::size_t in, std::size_t out) {
    return make(in, out, [out]<class T>(std::span<const T>) { return std::vector<T>(out, T(0.0)); });
}

Vec Field::operator()(const Vec& x) const {
    auto xs = to_std(x);
    auto y = eval<double>(std::span<const double>(xs));
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]))
            throw EvaluationError("non-finite value in component " + std::to_string(i));
    }
    return to_eigen(y);
}

Mat Field::jacobian(const Vec& x) const {
    auto xs = to_std(x);
    auto J = jacobian_t<double>(std::span<const double>(xs));
    Mat out(static_cast<Eigen::Index>(out_), static_cast<Eigen::Index>(in_));
    for (std::size_t i = 0; i < out_; ++i)
        for (std::size_t j = 0; j < in_; ++j) out(i, j) = J[i * in_ + j];
    return out;
}

Mat finite_difference_jacobian(const Field& f, const Vec& x, double step) {
    Mat J(f.out_dim(), f.in_dim());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        Vec xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * step);
    }
    return J;
}

}  // namespace tfred
