#ifndef GFP_GEOM_HPP
#define GFP_GEOM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace gfp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double diameter() const { return std::hypot(width(), height()); }
    bool contains(const Vec2& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
    bool contains(const Rect& r) const {
        return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
    }
    static Rect square(double cx, double cy, double side) {
        return {cx - side / 2, cy - side / 2, cx + side / 2, cy + side / 2};
    }
};

// Euclidean gap between two axis-aligned rectangles (0 if they overlap).
inline double rect_distance(const Rect& a, const Rect& b) {
    double dx = std::max({a.x0 - b.x1, b.x0 - a.x1, 0.0});
    double dy = std::max({a.y0 - b.y1, b.y0 - a.y1, 0.0});
    return std::hypot(dx, dy);
}

// Oriented rectangle: center, axis direction (unit), full length along the
// axis and full height across it.
struct OrientedRect {
    Vec2 center;
    double angle = 0.0;   // axis angle in radians
    double length = 0.0;  // extent along the axis
    double height = 0.0;  // extent across the axis

    Vec2 axis() const { return {std::cos(angle), std::sin(angle)}; }
    Vec2 normal() const { return {-std::sin(angle), std::cos(angle)}; }
    // Centers of the two small sides.
    Vec2 side_center_lo() const { return center - axis() * (length / 2); }
    Vec2 side_center_hi() const { return center + axis() * (length / 2); }
    bool contains(const Vec2& p, double tol = 0.0) const {
        Vec2 d = p - center;
        double u = d.dot(axis());
        double v = d.dot(normal());
        return std::abs(u) <= length / 2 + tol && std::abs(v) <= height / 2 + tol;
    }
    std::array<Vec2, 4> corners() const {
        Vec2 a = axis() * (length / 2), n = normal() * (height / 2);
        return {center + a + n, center + a - n, center - a + n, center - a - n};
    }
    // True if every corner of r lies inside *this.
    bool contains_rect(const OrientedRect& r) const {
        for (const Vec2& c : r.corners())
            if (!contains(c, 1e-12)) return false;
        return true;
    }
};

inline double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = ab.norm2() > 0 ? std::clamp((p - a).dot(ab) / ab.norm2(), 0.0, 1.0) : 0.0;
    return dist(p, a + ab * t);
}

double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Diameter of a point set, with the realizing pair. Exact (rotating-calipers
// on the convex hull).
struct DiameterResult {
    double value = 0.0;
    Vec2 p, q;
};
DiameterResult point_set_diameter(const std::vector<Vec2>& pts);

}  // namespace gfp

#endif
