#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geom.hpp"
#include "quadrature.hpp"

namespace peri {

//----------------------------------------------------------------------------
// Conforming linear-triangle mesh: node coordinates, connectivity, per-node
// element adjacency (E_j), optional structured-grid metadata. Immutable
// after construction.
//----------------------------------------------------------------------------

struct StructuredInfo {
    Vec2 origin;
    double h = 0.0; // grid spacing
    int nx = 0;     // cells per side (x)
    int ny = 0;     // cells per side (y)
};

class TriMesh {
  public:
    TriMesh(std::vector<double> nodes_xy, std::vector<int32_t> tri_nodes,
            std::optional<StructuredInfo> structured = std::nullopt)
        : X_(std::move(nodes_xy)), tri_(std::move(tri_nodes)),
          structured_(structured) {
        if (X_.size() % 2 != 0)
            throw std::invalid_argument("TriMesh: odd coordinate count");
        if (tri_.size() % 3 != 0)
            throw std::invalid_argument("TriMesh: triangle list not a multiple of 3");
        validate_and_orient();
        build_adjacency();
        if (structured_) check_lattice();
    }

    int32_t num_nodes() const { return static_cast<int32_t>(X_.size() / 2); }
    int32_t num_elements() const { return static_cast<int32_t>(tri_.size() / 3); }

    Vec2 node(int32_t i) const { return {X_[2 * i], X_[2 * i + 1]}; }
    const std::vector<double>& coords() const { return X_; }
    const std::vector<int32_t>& connectivity() const { return tri_; }

    std::array<int32_t, 3> element(int32_t e) const {
        return {tri_[3 * e], tri_[3 * e + 1], tri_[3 * e + 2]};
    }

    // Elements having node j as a vertex, ascending element id.
    std::pair<const int32_t*, const int32_t*> elements_of(int32_t j) const {
        return {adj_elems_.data() + adj_off_[j],
                adj_elems_.data() + adj_off_[j + 1]};
    }

    const Box& bounding_box() const { return bbox_; }
    const std::optional<StructuredInfo>& structured() const { return structured_; }

    double area(int32_t e) const {
        const Vec2 a = node(tri_[3 * e]), b = node(tri_[3 * e + 1]),
                   c = node(tri_[3 * e + 2]);
        return 0.5 * (b - a).cross(c - a);
    }

    Vec2 centroid(int32_t e) const {
        const Vec2 a = node(tri_[3 * e]), b = node(tri_[3 * e + 1]),
                   c = node(tri_[3 * e + 2]);
        return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
    }

    double total_area() const {
        double s = 0.0;
        for (int32_t e = 0; e < num_elements(); ++e) s += area(e);
        return s;
    }

    // Barycentric coordinates of p w.r.t. element e (may be negative outside).
    std::array<double, 3> barycentric(int32_t e, const Vec2& p) const {
        const Vec2 a = node(tri_[3 * e]), b = node(tri_[3 * e + 1]),
                   c = node(tri_[3 * e + 2]);
        const double det = (b - a).cross(c - a);
        const double l1 = (b - p).cross(c - p) / det;
        const double l2 = (c - p).cross(a - p) / det;
        return {l1, l2, 1.0 - l1 - l2};
    }

    // Shape function of local vertex v of element e at p; p must lie in the
    // closed element (tolerance scales with the local edge length).
    double shape_value(int32_t e, int v, const Vec2& p) const {
        if (v < 0 || v > 2)
            throw std::invalid_argument("shape_value: vertex index out of range");
        const auto l = barycentric(e, p);
        const double tol = 1e-10; // barycentric coords are edge-length relative
        if (l[0] < -tol || l[1] < -tol || l[2] < -tol)
            throw std::invalid_argument("shape_value: point outside element");
        return std::min(1.0, std::max(0.0, l[v]));
    }

    // Physical quadrature points and weights; weights sum to the element area.
    std::vector<std::pair<Vec2, double>>
    quadrature_points(int32_t e, const QuadRule& rule) const {
        const Vec2 a = node(tri_[3 * e]), b = node(tri_[3 * e + 1]),
                   c = node(tri_[3 * e + 2]);
        const double A = area(e);
        std::vector<std::pair<Vec2, double>> out;
        out.reserve(rule.points.size());
        for (const auto& q : rule.points) {
            const Vec2 p = q.bary[0] * a + q.bary[1] * b + q.bary[2] * c;
            out.emplace_back(p, q.weight * A);
        }
        return out;
    }

    bool element_contains(int32_t e, const Vec2& p, double tol = 1e-10) const {
        const auto l = barycentric(e, p);
        return l[0] >= -tol && l[1] >= -tol && l[2] >= -tol;
    }

    // Element whose closure contains p; lowest element id wins ties.
    // Not-found (outside the domain or inside a hole) is not an error.
    std::optional<int32_t> locate_point(const Vec2& p) const {
        if (structured_) return locate_structured(p);
        for (int32_t e = 0; e < num_elements(); ++e)
            if (element_contains(e, p)) return e;
        return std::nullopt;
    }

    Vec2 interpolate(const std::vector<double>& nodal_xy, const Vec2& p,
                     int32_t e) const {
        const auto l = barycentric(e, p);
        Vec2 out{0.0, 0.0};
        for (int v = 0; v < 3; ++v) {
            const int32_t j = tri_[3 * e + v];
            out.x += l[v] * nodal_xy[2 * j];
            out.y += l[v] * nodal_xy[2 * j + 1];
        }
        return out;
    }

    std::optional<Vec2> interpolate_field(const std::vector<double>& nodal_xy,
                                          const Vec2& p) const {
        const auto e = locate_point(p);
        if (!e) return std::nullopt;
        return interpolate(nodal_xy, p, *e);
    }

    // Lumped nodal area: each element contributes a third to each vertex.
    std::vector<double> node_areas() const {
        std::vector<double> a(num_nodes(), 0.0);
        for (int32_t e = 0; e < num_elements(); ++e) {
            const double third = area(e) / 3.0;
            for (int v = 0; v < 3; ++v) a[tri_[3 * e + v]] += third;
        }
        return a;
    }

    // Nearest node to p (linear scan; convenience for probes and seeds).
    int32_t locate_node_near(const Vec2& p) const {
        if (num_nodes() == 0) throw std::invalid_argument("locate_node_near: empty mesh");
        int32_t best = 0;
        double d2 = (node(0) - p).norm2();
        for (int32_t i = 1; i < num_nodes(); ++i) {
            const double q = (node(i) - p).norm2();
            if (q < d2) { d2 = q; best = i; }
        }
        return best;
    }

    // Shortest edge over all elements (used for stability hints).
    double min_edge_length() const {
        double m = bbox_.diameter();
        for (int32_t e = 0; e < num_elements(); ++e) {
            const Vec2 a = node(tri_[3 * e]), b = node(tri_[3 * e + 1]),
                       c = node(tri_[3 * e + 2]);
            m = std::min({m, (b - a).norm(), (c - b).norm(), (a - c).norm()});
        }
        return m;
    }

  private:
    void validate_and_orient() {
        const int32_t n = num_nodes();
        bbox_ = {X_.empty() ? 0.0 : X_[0], X_.empty() ? 0.0 : X_[0],
                 X_.empty() ? 0.0 : X_[1], X_.empty() ? 0.0 : X_[1]};
        for (int32_t i = 0; i < n; ++i) bbox_.expand(node(i));
        const double area_floor = 1e-14 * std::max(bbox_.width() * bbox_.height(), 1e-300);

        for (int32_t e = 0; e < num_elements(); ++e) {
            int32_t* t = &tri_[3 * e];
            for (int v = 0; v < 3; ++v)
                if (t[v] < 0 || t[v] >= n)
                    throw std::invalid_argument("TriMesh: node id out of range in element " +
                                                std::to_string(e));
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
                throw std::invalid_argument("TriMesh: repeated node in element " +
                                            std::to_string(e));
            double A = area(e);
            if (A < 0.0) { // enforce CCW orientation
                std::swap(t[1], t[2]);
                A = -A;
            }
            if (A < area_floor)
                throw std::invalid_argument("TriMesh: degenerate element " +
                                            std::to_string(e));
        }
    }

    void build_adjacency() {
        const int32_t n = num_nodes();
        adj_off_.assign(n + 1, 0);
        for (const int32_t j : tri_) ++adj_off_[j + 1];
        for (int32_t i = 0; i < n; ++i) adj_off_[i + 1] += adj_off_[i];
        adj_elems_.resize(tri_.size());
        std::vector<int32_t> cursor(adj_off_.begin(), adj_off_.end() - 1);
        for (int32_t e = 0; e < num_elements(); ++e)
            for (int v = 0; v < 3; ++v)
                adj_elems_[cursor[tri_[3 * e + v]]++] = e; // e ascending per node
    }

    void check_lattice() const {
        const auto& s = *structured_;
        if (s.h <= 0.0 || s.nx < 1 || s.ny < 1)
            throw std::invalid_argument("TriMesh: bad structured info");
        const double scale = std::max(std::abs(s.h) * std::max(s.nx, s.ny), 1e-300);
        for (int32_t i = 0; i < num_nodes(); ++i) {
            const Vec2 p = node(i);
            const double fx = (p.x - s.origin.x) / s.h;
            const double fy = (p.y - s.origin.y) / s.h;
            if (std::abs(fx - std::round(fx)) * s.h > 1e-12 * scale ||
                std::abs(fy - std::round(fy)) * s.h > 1e-12 * scale)
                throw std::invalid_argument("TriMesh: node off the declared lattice");
        }
    }

    std::optional<int32_t> locate_structured(const Vec2& p) const {
        const auto& s = *structured_;
        if (!bbox_.contains(p, 1e-10 * s.h)) return std::nullopt;
        const double fx = (p.x - s.origin.x) / s.h;
        const double fy = (p.y - s.origin.y) / s.h;
        // Candidate cells around p (handles points on cell boundaries);
        // test their elements in ascending id so the tie rule holds.
        const int ix0 = std::max(0, static_cast<int>(std::floor(fx)) - 1);
        const int iy0 = std::max(0, static_cast<int>(std::floor(fy)) - 1);
        const int ix1 = std::min(s.nx - 1, static_cast<int>(std::floor(fx)) + 1);
        const int iy1 = std::min(s.ny - 1, static_cast<int>(std::floor(fy)) + 1);
        std::optional<int32_t> best;
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix) {
                const int32_t c = iy * s.nx + ix;
                for (int32_t e = 2 * c; e <= 2 * c + 1; ++e)
                    if (element_contains(e, p) && (!best || e < *best)) best = e;
            }
        return best;
    }

    std::vector<double> X_;
    std::vector<int32_t> tri_;
    std::vector<int32_t> adj_off_, adj_elems_;
    Box bbox_;
    std::optional<StructuredInfo> structured_;
};

//----------------------------------------------------------------------------
// Uniform square [0,side]^2: (n+1)^2 nodes, each grid cell split along the
// lower-left/upper-right diagonal into elements 2c (lower) and 2c+1 (upper).
//----------------------------------------------------------------------------
inline TriMesh build_uniform_square_mesh(double side, double h) {
    if (side <= 0.0 || h <= 0.0)
        throw std::invalid_argument("build_uniform_square_mesh: nonpositive size");
    const double ratio = side / h;
    const int n = static_cast<int>(std::round(ratio));
    if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("build_uniform_square_mesh: side/h is not an integer");

    const int np = n + 1;
    std::vector<double> X;
    X.reserve(static_cast<size_t>(np) * np * 2);
    for (int iy = 0; iy < np; ++iy)
        for (int ix = 0; ix < np; ++ix) {
            X.push_back(ix == n ? side : ix * h);
            X.push_back(iy == n ? side : iy * h);
        }

    std::vector<int32_t> tri;
    tri.reserve(static_cast<size_t>(n) * n * 6);
    auto id = [np](int ix, int iy) { return static_cast<int32_t>(iy * np + ix); };
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const int32_t a = id(ix, iy), b = id(ix + 1, iy),
                          c = id(ix + 1, iy + 1), d = id(ix, iy + 1);
            tri.insert(tri.end(), {a, b, c}); // lower, id 2*(iy*n+ix)
            tri.insert(tri.end(), {a, c, d}); // upper, id 2*(iy*n+ix)+1
        }

    return TriMesh(std::move(X), std::move(tri),
                   StructuredInfo{{0.0, 0.0}, h, n, n});
}

} // namespace peri
