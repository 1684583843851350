#include "gfp/geom.hpp"

namespace gfp {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    double d1 = cross(c, d, a), d2 = cross(c, d, b);
    double d3 = cross(a, b, c), d4 = cross(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    return false;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Vec2> h(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(point_segment_dist(a, c, d), point_segment_dist(b, c, d)),
                    std::min(point_segment_dist(c, a, b), point_segment_dist(d, a, b)));
}

DiameterResult point_set_diameter(const std::vector<Vec2>& pts) {
    DiameterResult res;
    if (pts.empty()) return res;
    if (pts.size() == 1) {
        res.p = res.q = pts[0];
        return res;
    }
    std::vector<Vec2> h = convex_hull(pts);
    size_t m = h.size();
    if (m == 1) {
        res.p = res.q = h[0];
        return res;
    }
    if (m == 2) {
        res = {dist(h[0], h[1]), h[0], h[1]};
        return res;
    }
    // rotating calipers
    size_t j = 1;
    for (size_t i = 0; i < m; ++i) {
        size_t ni = (i + 1) % m;
        while (true) {
            size_t nj = (j + 1) % m;
            double c1 = std::abs(cross(h[i], h[ni], h[j]));
            double c2 = std::abs(cross(h[i], h[ni], h[nj]));
            if (c2 > c1)
                j = nj;
            else
                break;
        }
        for (size_t cand : {i, ni}) {
            double d = dist(h[cand], h[j]);
            if (d > res.value) res = {d, h[cand], h[j]};
        }
    }
    return res;
}

}  // namespace gfp
