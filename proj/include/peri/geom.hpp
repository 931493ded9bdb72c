#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace peri {

//----------------------------------------------------------------------------
// Small 2-D vector / box helpers shared by every module.
//----------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

struct Box {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

    bool contains(const Vec2& p, double tol = 0.0) const {
        return p.x >= xmin - tol && p.x <= xmax + tol &&
               p.y >= ymin - tol && p.y <= ymax + tol;
    }
    void expand(const Vec2& p) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diameter() const { return std::hypot(width(), height()); }
};

struct Segment {
    Vec2 a, b;
};

// Sign of the signed area of triangle (a,b,c): +1 CCW, -1 CW, 0 collinear.
inline int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d = (b - a).cross(c - a);
    return (d > 0.0) - (d < 0.0);
}

// Proper segment crossing: interiors of (p1,p2) and (q1,q2) meet.
// Collinear segments count as intersecting only when their overlap has
// positive length; a shared endpoint alone does not intersect.
inline bool segments_intersect(const Vec2& p1, const Vec2& p2,
                               const Vec2& q1, const Vec2& q2) {
    if (!(std::isfinite(p1.x) && std::isfinite(p1.y) && std::isfinite(p2.x) &&
          std::isfinite(p2.y) && std::isfinite(q1.x) && std::isfinite(q1.y) &&
          std::isfinite(q2.x) && std::isfinite(q2.y)))
        throw std::invalid_argument("segments_intersect: non-finite endpoint");

    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);

    if (o1 != o2 && o3 != o4) {
        // A touching contact leaves one orientation zero; that is not a
        // proper crossing (bond endpoints may sit on the crack line).
        return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
    }

    if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
        // All collinear: intersect iff the 1-D overlap has positive length.
        const Vec2 d = p2 - p1;
        const bool use_x = std::abs(d.x) >= std::abs(d.y);
        auto coord = [use_x](const Vec2& v) { return use_x ? v.x : v.y; };
        const double lo1 = std::min(coord(p1), coord(p2));
        const double hi1 = std::max(coord(p1), coord(p2));
        const double lo2 = std::min(coord(q1), coord(q2));
        const double hi2 = std::max(coord(q1), coord(q2));
        return std::min(hi1, hi2) > std::max(lo1, lo2);
    }
    return false;
}

inline bool segments_intersect(const Segment& s, const Segment& t) {
    return segments_intersect(s.a, s.b, t.a, t.b);
}

} // namespace peri
