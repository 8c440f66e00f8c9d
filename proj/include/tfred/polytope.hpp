#pragma once

#include <random>
#include <string>
#include <vector>

#include "tfred/field.hpp"

namespace tfred {

/// normal . x <= offset
struct Halfspace {
    Vec normal;
    double offset = 0.0;
    std::string label;
};

struct Membership {
    enum class Kind { inside, boundary, outside };
    Kind kind = Kind::inside;
    std::vector<std::size_t> faces;  // active faces for boundary, violated ones for outside
};

/// Bounded, nonempty H-polytope. Construction enumerates the vertices and
/// rejects unbounded or empty descriptions.
class Polytope {
public:
    Polytope(std::size_t dim, std::vector<Halfspace> faces, std::string label = {});

    static Polytope box(const Vec& lo, const Vec& hi, std::string label = {});

    std::size_t dim() const { return dim_; }
    const std::vector<Halfspace>& faces() const { return faces_; }
    const std::vector<Vec>& vertices() const { return vertices_; }
    const std::string& label() const { return label_; }

    Membership membership(const Vec& x, double tol) const;
    bool contains(const Vec& x, double tol) const { return violation(x) <= tol; }

    /// max_j (n_j . x - b_j); nonpositive inside.
    double violation(const Vec& x) const;

    /// Vertices lying on face i.
    std::vector<Vec> face_vertices(std::size_t i, double tol = 1e-9) const;

    /// Random points of face i: Dirichlet-weighted combinations of its
    /// vertices, preceded by the vertices themselves and their centroid.
    std::vector<Vec> sample_face(std::size_t i, std::size_t n, std::mt19937_64& rng) const;

    /// Uniform-ish interior samples by rejection from the bounding box.
    std::vector<Vec> sample_interior(std::size_t n, std::mt19937_64& rng) const;

    double diameter() const;

private:
    void enumerate_vertices();
    void check_bounded() const;

    std::size_t dim_;
    std::vector<Halfspace> faces_;
    std::string label_;
    std::vector<Vec> vertices_;
};

}  // namespace tfred
