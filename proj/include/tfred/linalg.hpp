#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "tfred/field.hpp"

namespace tfred {

/// Monic x^n + c_{n-1} x^{n-1} + ... + c_0, stored as c_0..c_n with c_n = 1.
class CharPoly {
public:
    CharPoly() : c_{1.0} {}
    /// Takes c_0..c_{n-1}; the leading 1 is appended.
    explicit CharPoly(std::vector<double> lower);

    std::size_t degree() const { return c_.size() - 1; }
    double operator[](std::size_t k) const { return c_.at(k); }
    const std::vector<double>& coefficients() const { return c_; }

    template <class S>
    S operator()(const S& x) const {
        S acc(1.0);
        for (std::size_t k = c_.size() - 1; k-- > 0;) acc = acc * x + c_[k];
        return acc;
    }

private:
    std::vector<double> c_;
};

struct HurwitzFailure {
    enum class Kind { coefficient, minor };
    Kind kind;
    std::size_t index;  // c_index for coefficients, k for the k-th leading minor
};

struct HurwitzReport {
    bool stable = false;
    bool marginal = false;
    /// Leading Hurwitz minors Delta_1..Delta_{n-1} followed by Delta_n / Delta_{n-1} = c_0.
    std::vector<double> determinants;
    std::optional<HurwitzFailure> first_failure;
    double margin() const;
};

class MultiplicityMismatch : public std::runtime_error {
public:
    MultiplicityMismatch(std::size_t index, const std::string& what) : std::runtime_error(what), index(index) {}
    std::size_t index;
};

class SizeOverflow : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultRankTol = 1e-8;
inline constexpr std::size_t kMaxCharPolyDim = 12;

/// Singular values above tol * sigma_max.
int numeric_rank(const Mat& M, double tol = kDefaultRankTol);

/// Via orthogonal Hessenberg reduction followed by the Hessenberg
/// determinant recurrence.
CharPoly char_poly(const Mat& M);

CharPoly deflate_zero_roots(const CharPoly& p, std::size_t s, double tol);

/// Minors within tol of zero are reported as marginal, never stable.
HurwitzReport routh_hurwitz(const CharPoly& p, double tol = 0.0);

}  // namespace tfred
