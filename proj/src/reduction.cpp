#include "tfred/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tfred/linalg.hpp"

namespace tfred {

namespace {

Mat to_mat(std::span<const double> flat, std::size_t rows, std::size_t cols) {
    Mat M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) M(i, j) = flat[i * cols + j];
    return M;
}

double condition_number(const Mat& A) {
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double smin = s[s.size() - 1];
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : s[0] / smin;
}

std::string point_text(const Vec& x) {
    std::ostringstream os;
    os.precision(10);
    os << '(';
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ')';
    return os.str();
}

}  // namespace

Mat Decomposition::P_at(const Vec& x) const {
    auto flat = to_std(P(x));
    return to_mat(flat, dim, rank);
}

Decomposition decompose_structural(const Mat& S, const std::vector<std::size_t>& fast_columns, Field rates) {
    if (fast_columns.empty()) throw std::invalid_argument("decompose_structural: no fast reactions given");
    const auto m = static_cast<std::size_t>(S.rows());
    const auto r = fast_columns.size();
    if (rates.in_dim() != m || rates.out_dim() != r)
        throw DimensionError("decompose_structural: rate field must map R^" + std::to_string(m) + " to R^" +
                             std::to_string(r));
    Mat Sf(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(r));
    for (std::size_t k = 0; k < r; ++k) {
        if (fast_columns[k] >= static_cast<std::size_t>(S.cols()))
            throw std::invalid_argument("decompose_structural: fast column index out of range");
        Sf.col(static_cast<Eigen::Index>(k)) = S.col(static_cast<Eigen::Index>(fast_columns[k]));
    }
    if (numeric_rank(Sf) != static_cast<int>(r))
        throw std::invalid_argument("decompose_structural: fast stoichiometric block has rank " +
                                    std::to_string(numeric_rank(Sf)) + " < " + std::to_string(r) +
                                    "; merge dependent fast reactions into one rate");
    std::vector<double> flat(m * r);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < r; ++j) flat[i * r + j] = Sf(i, j);
    Decomposition d;
    d.dim = m;
    d.rank = r;
    d.P = Field::make(m, m * r, [flat]<class T>(std::span<const T>) {
        std::vector<T> out;
        out.reserve(flat.size());
        for (double v : flat) out.emplace_back(v);
        return out;
    });
    d.mu = std::move(rates);
    d.source = DecompositionSource::structural;
    return d;
}

Decomposition decompose_user(std::size_t dim, std::size_t rank, Field P, Field mu) {
    if (rank == 0 || rank >= dim) throw std::invalid_argument("decomposition rank must satisfy 0 < r < m");
    if (P.in_dim() != dim || P.out_dim() != dim * rank) throw DimensionError("P must map R^m to R^{m x r}");
    if (mu.in_dim() != dim || mu.out_dim() != rank) throw DimensionError("mu must map R^m to R^r");
    if (!P.has_second_order() || !mu.has_second_order())
        throw std::invalid_argument("P and mu must support second-order evaluation");
    return {dim, rank, std::move(P), std::move(mu), DecompositionSource::user_supplied};
}

namespace detail {

template <class T>
std::vector<T> reduced_rhs_t(const Decomposition& d, const Field& h1, std::span<const T> x) {
    const std::size_t m = d.dim, r = d.rank;
    const auto P = d.P.eval<T>(x);
    const auto Dmu = d.mu.jacobian_t<T>(x);
    const auto h = h1.eval<T>(x);

    std::vector<T> A(r * r, T(0.0)), b(r, T(0.0));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            T acc(0.0);
            for (std::size_t k = 0; k < m; ++k) acc = acc + Dmu[i * m + k] * P[k * r + j];
            A[i * r + j] = acc;
        }
        T acc(0.0);
        for (std::size_t k = 0; k < m; ++k) acc = acc + Dmu[i * m + k] * h[k];
        b[i] = acc;
    }

    Mat Av(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) Av(i, j) = value_of(A[i * r + j]);
    const double cond = condition_number(Av);
    if (!(cond <= kMaxPencilCondition)) {
        Vec xv(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) xv[i] = value_of(x[i]);
        throw SingularPencil("D mu P is singular at " + point_text(xv) + " (condition " + std::to_string(cond) + ")",
                             cond, xv);
    }
    const auto y = small_solve<T>(std::move(A), std::move(b), r, 1);
    std::vector<T> q(h);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < r; ++j) q[i] = q[i] - P[i * r + j] * y[j];
    return q;
}

template std::vector<double> reduced_rhs_t<double>(const Decomposition&, const Field&, std::span<const double>);
template std::vector<Dual> reduced_rhs_t<Dual>(const Decomposition&, const Field&, std::span<const Dual>);

}  // namespace detail

ReducedField make_reduced_field(const Decomposition& d, const PerturbedSystem& sys) {
    if (d.dim != sys.dim) throw DimensionError("decomposition and system dimensions differ");
    ReducedField f{d, sys.h1, {}};
    f.q = Field::make_first_order(d.dim, d.dim, [d, h1 = sys.h1]<class T>(std::span<const T> x) {
        return detail::reduced_rhs_t<T>(d, h1, x);
    });
    return f;
}

double pencil_condition(const Decomposition& d, const Vec& x) {
    return condition_number(d.mu.jacobian(x) * d.P_at(x));
}

Mat projection_Q(const Decomposition& d, const Vec& x) {
    const Mat P = d.P_at(x);
    const Mat Dmu = d.mu.jacobian(x);
    const Mat A = Dmu * P;
    const double cond = condition_number(A);
    if (!(cond <= kMaxPencilCondition))
        throw SingularPencil("D mu P is singular at " + point_text(x) + " (condition " + std::to_string(cond) + ")",
                             cond, x);
    const auto n = static_cast<Eigen::Index>(d.dim);
    return Mat::Identity(n, n) - P * A.partialPivLu().solve(Dmu);
}

Vec reduced_rhs(const ReducedField& f, const Vec& x) { return f.q(x); }

DecompositionReport verify_decomposition(const Decomposition& d, const PerturbedSystem& sys,
                                         const std::vector<Vec>& samples, double residual_tol) {
    DecompositionReport rep;
    if (samples.empty()) {
        rep.message = "no samples";
        return rep;
    }
    if (d.dim != sys.dim) {
        rep.message = "dimension mismatch between decomposition and system";
        return rep;
    }
    try {
        const Vec& x0 = samples.front();
        rep.rank_P = numeric_rank(d.P_at(x0));
        rep.rank_Dmu = numeric_rank(d.mu.jacobian(x0));
        rep.worst_residual_point = x0;
        rep.worst_condition_point = x0;
        for (const auto& x : samples) {
            const Vec h0 = sys.h0(x);
            const Vec pm = d.P_at(x) * d.mu(x);
            const double res = (h0 - pm).lpNorm<Eigen::Infinity>() / (1.0 + h0.lpNorm<Eigen::Infinity>());
            if (res > rep.max_residual || !std::isfinite(res)) {
                rep.max_residual = res;
                rep.worst_residual_point = x;
            }
            const double cond = pencil_condition(d, x);
            if (cond > rep.worst_condition || !std::isfinite(cond)) {
                rep.worst_condition = cond;
                rep.worst_condition_point = x;
            }
        }
    } catch (const std::exception& e) {
        rep.message = e.what();
        return rep;
    }
    const int r = static_cast<int>(d.rank);
    std::ostringstream msg;
    if (rep.max_residual > residual_tol) msg << "residual h0 - P mu = " << rep.max_residual << " at " << point_text(rep.worst_residual_point) << "; ";
    if (rep.rank_P != r) msg << "rank P = " << rep.rank_P << " != " << r << "; ";
    if (rep.rank_Dmu != r) msg << "rank D mu = " << rep.rank_Dmu << " != " << r << "; ";
    if (!(rep.worst_condition <= kMaxPencilCondition))
        msg << "D mu P ill-conditioned (" << rep.worst_condition << ") at " << point_text(rep.worst_condition_point) << "; ";
    rep.message = msg.str();
    rep.ok = rep.message.empty();
    if (rep.ok) rep.message = "ok";
    return rep;
}

}  // namespace tfred
