#include "tfred/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tfred {

namespace {

constexpr double kFeasTol = 1e-9;

// Calls visit(indices) for every k-subset of {0..n-1}, in lexicographic order.
template <class Visit>
void for_each_subset(std::size_t n, std::size_t k, Visit&& visit) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        visit(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

Polytope::Polytope(std::size_t dim, std::vector<Halfspace> faces, std::string label)
    : dim_(dim), faces_(std::move(faces)), label_(std::move(label)) {
    if (dim_ == 0) throw std::invalid_argument("polytope dimension must be positive");
    for (std::size_t i = 0; i < faces_.size(); ++i) {
        auto& f = faces_[i];
        if (static_cast<std::size_t>(f.normal.size()) != dim_)
            throw DimensionError("face " + std::to_string(i) + " normal has wrong length");
        if (f.normal.norm() == 0.0) throw std::invalid_argument("face " + std::to_string(i) + " has zero normal");
        if (f.label.empty()) f.label = "face" + std::to_string(i);
    }
    check_bounded();
    enumerate_vertices();
    if (vertices_.empty()) throw std::invalid_argument("polytope '" + label_ + "' is empty");
}

Polytope Polytope::box(const Vec& lo, const Vec& hi, std::string label) {
    const auto m = static_cast<std::size_t>(lo.size());
    std::vector<Halfspace> faces;
    for (std::size_t i = 0; i < m; ++i) {
        Vec n = Vec::Zero(lo.size());
        n[i] = -1.0;
        faces.push_back({n, -lo[i], "x" + std::to_string(i + 1) + ">=" + std::to_string(lo[i])});
        n[i] = 1.0;
        faces.push_back({n, hi[i], "x" + std::to_string(i + 1) + "<=" + std::to_string(hi[i])});
    }
    return Polytope(m, std::move(faces), std::move(label));
}

void Polytope::check_bounded() const {
    const auto nf = faces_.size();
    Mat A(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < nf; ++i) A.row(i) = faces_[i].normal.transpose() / faces_[i].normal.norm();
    if (nf < dim_ + 1 || Eigen::FullPivLU<Mat>(A).rank() < static_cast<Eigen::Index>(dim_))
        throw std::invalid_argument("polytope '" + label_ + "' is unbounded");

    // The recession cone {d : A d <= 0} is pointed; it is nontrivial iff it
    // has an extreme ray, i.e. a direction on dim-1 independent active rows.
    bool unbounded = false;
    if (dim_ == 1) {
        for (double sgn : {1.0, -1.0}) {
            Vec d = Vec::Constant(1, sgn);
            if (((A * d).array() <= kFeasTol).all()) unbounded = true;
        }
    } else {
        for_each_subset(nf, dim_ - 1, [&](const std::vector<std::size_t>& rows) {
            if (unbounded) return;
            Mat S(static_cast<Eigen::Index>(rows.size()), A.cols());
            for (std::size_t k = 0; k < rows.size(); ++k) S.row(k) = A.row(rows[k]);
            Eigen::FullPivLU<Mat> lu(S);
            if (lu.rank() != static_cast<Eigen::Index>(dim_ - 1)) return;
            Vec d = lu.kernel().col(0).normalized();
            for (double sgn : {1.0, -1.0})
                if (((A * (sgn * d)).array() <= kFeasTol).all()) unbounded = true;
        });
    }
    if (unbounded) throw std::invalid_argument("polytope '" + label_ + "' is unbounded");
}

void Polytope::enumerate_vertices() {
    const auto nf = faces_.size();
    for_each_subset(nf, dim_, [&](const std::vector<std::size_t>& rows) {
        Mat A(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
        Vec b(static_cast<Eigen::Index>(dim_));
        for (std::size_t k = 0; k < dim_; ++k) {
            A.row(k) = faces_[rows[k]].normal.transpose();
            b[k] = faces_[rows[k]].offset;
        }
        Eigen::FullPivLU<Mat> lu(A);
        if (!lu.isInvertible()) return;
        Vec v = lu.solve(b);
        if (violation(v) > kFeasTol * (1.0 + v.lpNorm<Eigen::Infinity>())) return;
        for (const auto& w : vertices_)
            if ((w - v).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + v.lpNorm<Eigen::Infinity>())) return;
        vertices_.push_back(v);
    });
}

double Polytope::violation(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != dim_) throw DimensionError("point has wrong dimension");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : faces_) worst = std::max(worst, f.normal.dot(x) - f.offset);
    return worst;
}

Membership Polytope::membership(const Vec& x, double tol) const {
    if (static_cast<std::size_t>(x.size()) != dim_) throw DimensionError("point has wrong dimension");
    Membership out;
    std::vector<std::size_t> active, violated;
    for (std::size_t i = 0; i < faces_.size(); ++i) {
        double g = faces_[i].normal.dot(x) - faces_[i].offset;
        if (g > tol)
            violated.push_back(i);
        else if (g >= -tol)
            active.push_back(i);
    }
    if (!violated.empty()) {
        out.kind = Membership::Kind::outside;
        out.faces = std::move(violated);
    } else if (!active.empty()) {
        out.kind = Membership::Kind::boundary;
        out.faces = std::move(active);
    }
    return out;
}

std::vector<Vec> Polytope::face_vertices(std::size_t i, double tol) const {
    std::vector<Vec> out;
    const auto& f = faces_.at(i);
    for (const auto& v : vertices_)
        if (std::abs(f.normal.dot(v) - f.offset) <= tol * (1.0 + std::abs(f.offset))) out.push_back(v);
    return out;
}

std::vector<Vec> Polytope::sample_face(std::size_t i, std::size_t n, std::mt19937_64& rng) const {
    auto verts = face_vertices(i);
    std::vector<Vec> out;
    if (verts.empty()) return out;
    for (const auto& v : verts) {
        if (out.size() >= n) return out;
        out.push_back(v);
    }
    if (verts.size() == 1) return out;
    Vec centroid = Vec::Zero(static_cast<Eigen::Index>(dim_));
    for (const auto& v : verts) centroid += v;
    if (out.size() < n) out.push_back(centroid / static_cast<double>(verts.size()));
    std::exponential_distribution<double> expo(1.0);
    while (out.size() < n) {
        std::vector<double> w(verts.size());
        double total = 0.0;
        for (auto& wi : w) total += (wi = expo(rng));
        Vec p = Vec::Zero(static_cast<Eigen::Index>(dim_));
        for (std::size_t k = 0; k < verts.size(); ++k) p += (w[k] / total) * verts[k];
        out.push_back(p);
    }
    return out;
}

std::vector<Vec> Polytope::sample_interior(std::size_t n, std::mt19937_64& rng) const {
    Vec lo = vertices_.front(), hi = vertices_.front();
    for (const auto& v : vertices_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec> out;
    std::size_t attempts = 0;
    while (out.size() < n) {
        if (++attempts > 1000 * (n + 10)) throw std::runtime_error("polytope '" + label_ + "' has no volume to sample");
        Vec x(static_cast<Eigen::Index>(dim_));
        for (std::size_t k = 0; k < dim_; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * u(rng);
        if (violation(x) < 0.0) out.push_back(x);
    }
    return out;
}

double Polytope::diameter() const {
    double d = 0.0;
    for (const auto& a : vertices_)
        for (const auto& b : vertices_) d = std::max(d, (a - b).norm());
    return d;
}

}  // namespace tfred
