#include "tfred/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tfred {

CharPoly::CharPoly(std::vector<double> lower) : c_(std::move(lower)) { c_.push_back(1.0); }

double HurwitzReport::margin() const {
    if (determinants.empty()) return std::numeric_limits<double>::infinity();
    return *std::min_element(determinants.begin(), determinants.end());
}

int numeric_rank(const Mat& M, double tol) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tol * s[0]) ++r;
    return r;
}

CharPoly char_poly(const Mat& M) {
    if (M.rows() != M.cols()) throw DimensionError("char_poly needs a square matrix");
    const auto n = static_cast<std::size_t>(M.rows());
    if (n > kMaxCharPolyDim)
        throw SizeOverflow("char_poly supports n <= " + std::to_string(kMaxCharPolyDim) + ", got " + std::to_string(n));
    if (n == 0) return CharPoly{};

    Mat H = n > 2 ? Mat(Eigen::HessenbergDecomposition<Mat>(M).matrixH()) : M;

    // p[k] holds the coefficients (ascending) of det(xI - H[0:k, 0:k]).
    std::vector<std::vector<double>> p(n + 1);
    p[0] = {1.0};
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t kk = k - 1;
        std::vector<double> next(k + 1, 0.0);
        // (x - h_kk) p_{k-1}
        for (std::size_t j = 0; j < k; ++j) {
            next[j + 1] += p[k - 1][j];
            next[j] -= H(kk, kk) * p[k - 1][j];
        }
        // - sum_i h_{i,k} (prod of subdiagonal entries between i and k) p_{i-1}
        double prod = 1.0;
        for (std::size_t i = kk; i-- > 0;) {
            prod *= H(i + 1, i);
            const double w = H(i, kk) * prod;
            if (w == 0.0) continue;
            for (std::size_t j = 0; j < p[i].size(); ++j) next[j] -= w * p[i][j];
        }
        p[k] = std::move(next);
    }
    std::vector<double> lower(p[n].begin(), p[n].end() - 1);
    return CharPoly(std::move(lower));
}

CharPoly deflate_zero_roots(const CharPoly& p, std::size_t s, double tol) {
    const auto n = p.degree();
    if (s > n) throw std::invalid_argument("cannot deflate more roots than the degree");
    for (std::size_t k = 0; k < s; ++k) {
        if (std::abs(p[k]) > tol)
            throw MultiplicityMismatch(k, "coefficient c" + std::to_string(k) + " = " + std::to_string(p[k]) +
                                              " is not zero; fewer than " + std::to_string(s) + " zero roots");
    }
    if (s < n && std::abs(p[s]) <= tol)
        throw MultiplicityMismatch(s, "coefficient c" + std::to_string(s) +
                                          " vanishes; zero root has multiplicity above " + std::to_string(s));
    std::vector<double> lower(p.coefficients().begin() + static_cast<std::ptrdiff_t>(s), p.coefficients().end() - 1);
    return CharPoly(std::move(lower));
}

HurwitzReport routh_hurwitz(const CharPoly& p, double tol) {
    const auto n = p.degree();
    if (n < 1) throw std::invalid_argument("routh_hurwitz needs degree >= 1");
    HurwitzReport rep;
    // a_0 = 1, a_k = c_{n-k}
    auto a = [&](long k) -> double {
        if (k < 0 || k > static_cast<long>(n)) return 0.0;
        return p[n - static_cast<std::size_t>(k)];
    };

    bool ok = true, marginal = false;
    auto note = [&](double v, HurwitzFailure f) {
        if (v > tol) return;
        if (std::abs(v) <= tol) marginal = true;
        if (ok) rep.first_failure = f;
        ok = false;
    };
    for (std::size_t k = n; k-- > 0;) note(p[k], {HurwitzFailure::Kind::coefficient, k});

    Mat H = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < H.rows(); ++i)
        for (Eigen::Index j = 0; j < H.cols(); ++j) H(i, j) = a(2 * j - i + 1);
    for (std::size_t k = 1; k < n; ++k) {
        const double d = H.topLeftCorner(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).determinant();
        rep.determinants.push_back(d);
        note(d, {HurwitzFailure::Kind::minor, k});
    }
    rep.determinants.push_back(p[0]);
    rep.stable = ok;
    rep.marginal = !ok && marginal;
    return rep;
}

}  // namespace tfred
