#pragma once

// Forward-mode dual numbers. A DualNumber<T> carries one directional
// derivative; nesting DualNumber<DualNumber<double>> gives mixed second
// derivatives, which the reduced field needs (it already contains a Jacobian).

#include <cmath>
#include <ostream>
#include <type_traits>

namespace tfred {

template <class T>
struct DualNumber {
    T value{};
    T deriv{};

    constexpr DualNumber() = default;
    constexpr DualNumber(double v) : value(v), deriv(0.0) {}  // NOLINT: implicit by design
    constexpr DualNumber(T v, T d) requires(!std::is_same_v<T, double>) : value(std::move(v)), deriv(std::move(d)) {}
    constexpr DualNumber(double v, double d) requires std::is_same_v<T, double> : value(v), deriv(d) {}

    DualNumber& operator+=(const DualNumber& o) { value += o.value; deriv += o.deriv; return *this; }
    DualNumber& operator-=(const DualNumber& o) { value -= o.value; deriv -= o.deriv; return *this; }
    DualNumber& operator*=(const DualNumber& o) {
        deriv = deriv * o.value + value * o.deriv;
        value *= o.value;
        return *this;
    }
    DualNumber& operator/=(const DualNumber& o) {
        T inv = T(1.0) / o.value;
        value *= inv;
        deriv = (deriv - value * o.deriv) * inv;
        return *this;
    }
};

using Dual = DualNumber<double>;
using Dual2 = DualNumber<Dual>;

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<DualNumber<T>> : std::true_type {};

/// Innermost real value of a possibly nested dual.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const DualNumber<T>& x) { return value_of(x.value); }

template <class T> DualNumber<T> operator+(DualNumber<T> a, const DualNumber<T>& b) { return a += b; }
template <class T> DualNumber<T> operator-(DualNumber<T> a, const DualNumber<T>& b) { return a -= b; }
template <class T> DualNumber<T> operator*(DualNumber<T> a, const DualNumber<T>& b) { return a *= b; }
template <class T> DualNumber<T> operator/(DualNumber<T> a, const DualNumber<T>& b) { return a /= b; }
template <class T> DualNumber<T> operator-(const DualNumber<T>& a) { return {-a.value, -a.deriv}; }
template <class T> DualNumber<T> operator+(const DualNumber<T>& a) { return a; }

// Mixed operations with plain doubles (needed because the implicit
// conversion does not take part in template deduction).
template <class T> DualNumber<T> operator+(DualNumber<T> a, double b) { a.value += b; return a; }
template <class T> DualNumber<T> operator+(double b, DualNumber<T> a) { a.value += b; return a; }
template <class T> DualNumber<T> operator-(DualNumber<T> a, double b) { a.value -= b; return a; }
template <class T> DualNumber<T> operator-(double b, const DualNumber<T>& a) { return {b - a.value, -a.deriv}; }
template <class T> DualNumber<T> operator*(DualNumber<T> a, double b) { a.value *= b; a.deriv *= b; return a; }
template <class T> DualNumber<T> operator*(double b, DualNumber<T> a) { a.value *= b; a.deriv *= b; return a; }
template <class T> DualNumber<T> operator/(DualNumber<T> a, double b) { a.value /= b; a.deriv /= b; return a; }
template <class T> DualNumber<T> operator/(double b, const DualNumber<T>& a) {
    T inv = T(1.0) / a.value;
    return {b * inv, -b * a.deriv * inv * inv};
}

// Comparisons look at the value only; branches in user code follow the
// primal path, which is what forward mode differentiates.
template <class T> bool operator<(const DualNumber<T>& a, const DualNumber<T>& b) { return value_of(a) < value_of(b); }
template <class T> bool operator>(const DualNumber<T>& a, const DualNumber<T>& b) { return value_of(a) > value_of(b); }
template <class T> bool operator<(const DualNumber<T>& a, double b) { return value_of(a) < b; }
template <class T> bool operator>(const DualNumber<T>& a, double b) { return value_of(a) > b; }

template <class T>
DualNumber<T> sqrt(const DualNumber<T>& a) {
    using std::sqrt;
    T r = sqrt(a.value);
    return {r, a.deriv / (2.0 * r)};
}

template <class T>
DualNumber<T> exp(const DualNumber<T>& a) {
    using std::exp;
    T e = exp(a.value);
    return {e, a.deriv * e};
}

template <class T>
DualNumber<T> log(const DualNumber<T>& a) {
    using std::log;
    return {log(a.value), a.deriv / a.value};
}

template <class T>
DualNumber<T> sin(const DualNumber<T>& a) {
    using std::cos;
    using std::sin;
    return {sin(a.value), a.deriv * cos(a.value)};
}

template <class T>
DualNumber<T> cos(const DualNumber<T>& a) {
    using std::cos;
    using std::sin;
    return {cos(a.value), -(a.deriv * sin(a.value))};
}

template <class T>
DualNumber<T> pow(const DualNumber<T>& a, double p) {
    using std::pow;
    T base = pow(a.value, p - 1.0);
    return {base * a.value, p * base * a.deriv};
}

template <class T>
DualNumber<T> abs(const DualNumber<T>& a) {
    return value_of(a) < 0.0 ? -a : a;
}

template <class T>
std::ostream& operator<<(std::ostream& os, const DualNumber<T>& a) {
    return os << a.value << " + " << a.deriv << "e";
}

}  // namespace tfred
