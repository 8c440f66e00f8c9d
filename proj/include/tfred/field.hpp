#pragma once

// A smooth map R^n -> R^k that can be evaluated on doubles and on (nested)
// dual numbers. Jacobians come from forward passes, one seed per coordinate.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfred/dual.hpp"

namespace tfred {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <class T>
using EvalFn = std::function<std::vector<T>(std::span<const T>)>;

class Field {
public:
    Field() = default;

    /// Wraps a generic callable `[]<class T>(std::span<const T>) -> std::vector<T>`;
    /// instantiated for double, Dual and Dual2.
    template <class F>
    static Field make(std::size_t in, std::size_t out, F f) {
        Field g(in, out);
        g.f0_ = f;
        g.f1_ = f;
        g.f2_ = f;
        return g;
    }

    /// Same but only double and Dual; for maps whose own definition already
    /// consumes one derivative level.
    template <class F>
    static Field make_first_order(std::size_t in, std::size_t out, F f) {
        Field g(in, out);
        g.f0_ = f;
        g.f1_ = f;
        return g;
    }

    static Field zero(std::size_t in, std::size_t out);

    std::size_t in_dim() const { return in_; }
    std::size_t out_dim() const { return out_; }
    bool has_second_order() const { return static_cast<bool>(f2_); }
    bool empty() const { return !f0_; }

    Vec operator()(const Vec& x) const;

    template <class T>
    std::vector<T> eval(std::span<const T> x) const;

    /// k x n Jacobian at a real point.
    Mat jacobian(const Vec& x) const;

    /// Row-major k x n Jacobian at a point of scalar type T, obtained with
    /// DualNumber<T> passes.
    template <class T>
    std::vector<T> jacobian_t(std::span<const T> x) const;

private:
    Field(std::size_t in, std::size_t out) : in_(in), out_(out) {}

    template <class T>
    const EvalFn<T>& fn() const;

    void check_in(std::size_t n) const {
        if (n != in_)
            throw DimensionError("field expects input of length " + std::to_string(in_) + ", got " +
                                 std::to_string(n));
    }

    std::size_t in_ = 0;
    std::size_t out_ = 0;
    EvalFn<double> f0_;
    EvalFn<Dual> f1_;
    EvalFn<Dual2> f2_;
};

template <class T>
const EvalFn<T>& Field::fn() const {
    if constexpr (std::is_same_v<T, double>) {
        return f0_;
    } else if constexpr (std::is_same_v<T, Dual>) {
        if (!f1_) throw EvaluationError("field has no first-order evaluation");
        return f1_;
    } else {
        static_assert(std::is_same_v<T, Dual2>, "unsupported scalar type");
        if (!f2_) throw EvaluationError("field has no second-order evaluation");
        return f2_;
    }
}

template <class T>
std::vector<T> Field::eval(std::span<const T> x) const {
    check_in(x.size());
    auto y = fn<T>()(x);
    if (y.size() != out_)
        throw DimensionError("field returned " + std::to_string(y.size()) + " components, expected " +
                             std::to_string(out_));
    return y;
}

template <class T>
std::vector<T> Field::jacobian_t(std::span<const T> x) const {
    using D = DualNumber<T>;
    check_in(x.size());
    std::vector<T> J(out_ * in_);
    std::vector<D> xd(in_);
    for (std::size_t i = 0; i < in_; ++i) xd[i] = D(x[i], T(0.0));
    for (std::size_t j = 0; j < in_; ++j) {
        xd[j].deriv = T(1.0);
        std::vector<D> y;
        try {
            y = eval<D>(std::span<const D>(xd));
        } catch (const EvaluationError& e) {
            throw EvaluationError(std::string(e.what()) + " (seed " + std::to_string(j) + ")");
        }
        for (std::size_t i = 0; i < out_; ++i) J[i * in_ + j] = y[i].deriv;
        xd[j].deriv = T(0.0);
    }
    return J;
}

/// Central differences; used as an independent check of the dual path.
Mat finite_difference_jacobian(const Field& f, const Vec& x, double step);

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }
inline Vec to_eigen(std::span<const double> v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace tfred
