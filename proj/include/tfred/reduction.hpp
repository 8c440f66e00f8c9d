#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tfred/field.hpp"
#include "tfred/system.hpp"

namespace tfred {

enum class DecompositionSource { structural, user_supplied };

/// h0(x) = P(x) mu(x). P is a field R^m -> R^{m*r} read row-major.
struct Decomposition {
    std::size_t dim = 0;
    std::size_t rank = 0;
    Field P;
    Field mu;
    DecompositionSource source = DecompositionSource::user_supplied;

    Mat P_at(const Vec& x) const;
};

/// Raised when D mu P is singular or ill-conditioned at a point.
class SingularPencil : public std::runtime_error {
public:
    SingularPencil(const std::string& what, double condition, Vec where)
        : std::runtime_error(what), condition(condition), where(std::move(where)) {}
    double condition;
    Vec where;
};

inline constexpr double kMaxPencilCondition = 1e10;

/// Mass-action split h0 = S_fast v_fast: P is the (constant) fast
/// stoichiometric block, mu the fast rates.
Decomposition decompose_structural(const Mat& S, const std::vector<std::size_t>& fast_columns, Field rates);

Decomposition decompose_user(std::size_t dim, std::size_t rank, Field P, Field mu);

/// q = Q h1 with Q = I - P (D mu P)^{-1} D mu.
struct ReducedField {
    Decomposition decomposition;
    Field h1;
    Field q;  // first order only: its definition already contains D mu
};

ReducedField make_reduced_field(const Decomposition& d, const PerturbedSystem& sys);

Mat projection_Q(const Decomposition& d, const Vec& x);
Vec reduced_rhs(const ReducedField& f, const Vec& x);

/// Condition number of D mu(x) P(x).
double pencil_condition(const Decomposition& d, const Vec& x);

struct DecompositionReport {
    bool ok = false;
    double max_residual = 0.0;  // max |h0 - P mu| / (1 + |h0|)
    Vec worst_residual_point;
    int rank_P = 0;
    int rank_Dmu = 0;
    double worst_condition = 0.0;
    Vec worst_condition_point;
    std::string message;
};

DecompositionReport verify_decomposition(const Decomposition& d, const PerturbedSystem& sys,
                                         const std::vector<Vec>& samples, double residual_tol = 1e-10);

namespace detail {

/// Solves A X = B for small dense systems of arbitrary scalar type, with
/// partial pivoting on the real parts. A is n x n, B is n x k, row-major.
template <class T>
std::vector<T> small_solve(std::vector<T> A, std::vector<T> B, std::size_t n, std::size_t k) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(value_of(A[col * n + col]));
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(value_of(A[r * n + col]));
            if (v > best) best = v, piv = r;
        }
        if (best == 0.0) throw std::runtime_error("singular system");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
            for (std::size_t j = 0; j < k; ++j) std::swap(B[col * k + j], B[piv * k + j]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            T f = A[r * n + col] / A[col * n + col];
            for (std::size_t j = col; j < n; ++j) A[r * n + j] = A[r * n + j] - f * A[col * n + j];
            for (std::size_t j = 0; j < k; ++j) B[r * k + j] = B[r * k + j] - f * B[col * k + j];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        for (std::size_t j = 0; j < k; ++j) {
            T acc = B[col * k + j];
            for (std::size_t c = col + 1; c < n; ++c) acc = acc - A[col * n + c] * B[c * k + j];
            B[col * k + j] = acc / A[col * n + col];
        }
    }
    return B;
}

template <class T>
std::vector<T> reduced_rhs_t(const Decomposition& d, const Field& h1, std::span<const T> x);

}  // namespace detail

}  // namespace tfred
