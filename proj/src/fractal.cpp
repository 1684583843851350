#include "gfp/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "gfp/errors.hpp"

namespace gfp {

namespace {

constexpr double kTol = 1e-9;

double pow_d(double base, double e) { return std::pow(base, e); }

}  // namespace

TripletCheck validate_triplet(int m, double gamma, double s) {
    TripletCheck c;
    char buf[256];
    if (s <= 1.0) {
        c.diagnostics = "requires s > 1";
        return c;
    }
    if (m < 1) {
        c.diagnostics = "requires m >= 1";
        return c;
    }
    if (!(gamma > m)) {
        std::snprintf(buf, sizeof buf, "requires gamma > m: gamma=%.6g, m=%d", gamma, m);
        c.diagnostics = buf;
        return c;
    }
    double gs = pow_d(gamma, s);
    if (!(gs > gamma)) {
        c.diagnostics = "requires gamma^s > gamma";
        return c;
    }
    double beta = std::sqrt(static_cast<double>(m) * (m + 1));
    if (!(gs < beta)) {
        std::snprintf(buf, sizeof buf, "requires gamma^s < sqrt(m(m+1)): gamma^s=%.6g, bound=%.6g",
                      gs, beta);
        c.diagnostics = buf;
        return c;
    }
    c.ok = true;
    return c;
}

RenormTriplet make_triplet(int m, double gamma, double s) {
    TripletCheck c = validate_triplet(m, gamma, s);
    if (!c.ok) throw ConfigError("invalid renormalization triplet: " + c.diagnostics);
    return {m, gamma, s};
}

Scales scales(const RenormTriplet& t, double lambda) {
    if (lambda <= 1.0) throw UsageError("scales requires lambda > 1");
    Scales sc;
    double eps = t.eps();
    int k_max = 0;
    for (int k = 1;; ++k) {
        if (eps * lambda / pow_d(t.gamma, k) >= 1.0)
            k_max = k;
        else
            break;
    }
    sc.k_max = k_max;
    sc.L.resize(k_max + 1);
    for (int k = 0; k <= k_max; ++k) sc.L[k] = lambda / pow_d(t.gamma, k);
    return sc;
}

Curve Curve::from_points(std::vector<Vec2> pts) {
    Curve c;
    // drop repeated consecutive vertices
    for (const Vec2& p : pts)
        if (c.pts.empty() || dist(c.pts.back(), p) > 0.0) c.pts.push_back(p);
    c.cumlen.resize(c.pts.size());
    double acc = 0.0;
    for (size_t i = 0; i < c.pts.size(); ++i) {
        if (i > 0) acc += dist(c.pts[i - 1], c.pts[i]);
        c.cumlen[i] = acc;
    }
    return c;
}

Vec2 Curve::at_arclen(double l) const {
    if (pts.empty()) return {};
    if (l <= 0.0) return pts.front();
    if (l >= length()) return pts.back();
    auto it = std::upper_bound(cumlen.begin(), cumlen.end(), l);
    size_t i = it - cumlen.begin();  // cumlen[i-1] <= l < cumlen[i]
    double seg = cumlen[i] - cumlen[i - 1];
    double f = seg > 0 ? (l - cumlen[i - 1]) / seg : 0.0;
    return pts[i - 1] + (pts[i] - pts[i - 1]) * f;
}

namespace {

void koch_rec(int depth, double tan_a, double sec_a, const Vec2& a, const Vec2& b,
              std::vector<Vec2>& out) {
    if (depth == 0) {
        out.push_back(b);
        return;
    }
    Vec2 d = b - a;
    Vec2 p1 = a + d * (1.0 / 3.0);
    Vec2 p2 = a + d * (2.0 / 3.0);
    Vec2 mid = a + d * 0.5;
    Vec2 n{-d.y, d.x};
    Vec2 apex = mid + n * (tan_a / 6.0);
    koch_rec(depth - 1, tan_a, sec_a, a, p1, out);
    koch_rec(depth - 1, tan_a, sec_a, p1, apex, out);
    koch_rec(depth - 1, tan_a, sec_a, apex, p2, out);
    koch_rec(depth - 1, tan_a, sec_a, p2, b, out);
}

}  // namespace

Curve koch_curve(int depth, double bend_angle_deg, double base_length) {
    if (depth < 0) throw UsageError("koch_curve: depth must be >= 0");
    if (bend_angle_deg < 0.0 || bend_angle_deg >= 90.0)
        throw UsageError("koch_curve: bend angle must be in [0, 90)");
    double a = bend_angle_deg * 3.14159265358979323846 / 180.0;
    std::vector<Vec2> pts{{0.0, 0.0}};
    koch_rec(depth, std::tan(a), 1.0 / std::cos(a), {0.0, 0.0}, {base_length, 0.0}, pts);
    return Curve::from_points(std::move(pts));
}

// --- straight runs --------------------------------------------------------

namespace {

// True if the polyline piece pts[ia..] contains a straight run at scale L:
// two curve points exactly L apart whose connecting traversal stays inside the
// L x height rectangle spanned between them. Anchors are subsampled; the
// diameter endpoints are always included.
bool piece_has_run(const std::vector<Vec2>& pts, double L, double height,
                   const std::vector<size_t>& anchor_ids) {
    size_t n = pts.size();
    double L_eff = L * (1 - 1e-9);
    for (size_t a : anchor_ids) {
        const Vec2& pa = pts[a];
        int crossings = 0;
        for (size_t i = a + 1; i < n && crossings < 8; ++i) {
            double r_prev = dist(pts[i - 1], pa);
            double r_cur = dist(pts[i], pa);
            if (!(r_prev < L_eff && r_cur >= L_eff)) continue;
            ++crossings;
            // the far side center b* with |b* - pa| = L on segment (i-1, i);
            // when the curve only reaches L within rounding, use its far point
            Vec2 bstar = pts[i];
            if (r_cur >= L) {
                Vec2 d = pts[i] - pts[i - 1];
                Vec2 w = pts[i - 1] - pa;
                double A = d.norm2(), B = 2 * w.dot(d), C = w.norm2() - L * L;
                double disc = B * B - 4 * A * C;
                if (disc < 0 || A == 0) continue;
                double tt = (-B + std::sqrt(disc)) / (2 * A);
                if (tt < -1e-6 || tt > 1 + 1e-6) continue;
                bstar = pts[i - 1] + d * std::clamp(tt, 0.0, 1.0);
            }
            Vec2 u = bstar - pa;
            u = u * (1.0 / u.norm());
            // the traversal [a .. b*] must stay in the rect spanned by pa, b*
            bool inside = true;
            double lo = -1e-6 * L, hi = L + 1e-6 * L, half = height / 2 + 1e-6 * L;
            for (size_t j = a + 1; j < i && inside; ++j) {
                Vec2 rel = pts[j] - pa;
                double pu = rel.dot(u);
                double pv = rel.x * (-u.y) + rel.y * u.x;
                if (pu < lo || pu > hi || std::abs(pv) > half) inside = false;
            }
            if (inside) return true;
        }
    }
    return false;
}

std::vector<size_t> run_anchors(const std::vector<Vec2>& pts, size_t max_anchors,
                                const DiameterResult& diam) {
    std::vector<size_t> ids;
    size_t n = pts.size();
    size_t stride = std::max<size_t>(1, n / max_anchors);
    for (size_t i = 0; i < n; i += stride) ids.push_back(i);
    for (size_t i = 0; i < n; ++i) {
        if ((pts[i].x == diam.p.x && pts[i].y == diam.p.y) ||
            (pts[i].x == diam.q.x && pts[i].y == diam.q.y)) {
            ids.push_back(i);
            if (ids.size() > max_anchors + 2) break;
        }
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

bool segment_has_straight_run(const std::vector<Vec2>& pts, double L, double height) {
    if (pts.size() < 2) return false;
    DiameterResult d = point_set_diameter(pts);
    if (d.value < L * (1 - 1e-9)) return false;
    return piece_has_run(pts, L, height, run_anchors(pts, 48, d));
}

// hash grid over curve points for near-point queries
struct PointHash {
    double cell;
    std::unordered_map<int64_t, std::vector<int32_t>> buckets;

    static int64_t key(int ix, int iy) { return (static_cast<int64_t>(ix) << 32) ^ (iy & 0xffffffffLL); }
    void build(const std::vector<Vec2>& pts, double cell_size) {
        cell = cell_size;
        for (size_t i = 0; i < pts.size(); ++i) {
            int ix = static_cast<int>(std::floor(pts[i].x / cell));
            int iy = static_cast<int>(std::floor(pts[i].y / cell));
            buckets[key(ix, iy)].push_back(static_cast<int32_t>(i));
        }
    }
    bool any_within(const std::vector<Vec2>& pts, const Vec2& p, double r) const {
        int ix = static_cast<int>(std::floor(p.x / cell));
        int iy = static_cast<int>(std::floor(p.y / cell));
        int span = static_cast<int>(std::ceil(r / cell));
        for (int dy = -span; dy <= span; ++dy)
            for (int dx = -span; dx <= span; ++dx) {
                auto it = buckets.find(key(ix + dx, iy + dy));
                if (it == buckets.end()) continue;
                for (int32_t i : it->second)
                    if (dist(pts[i], p) <= r) return true;
            }
        return false;
    }
};

}  // namespace

std::vector<StraightRunCertificate> detect_straight_runs(const Curve& curve,
                                                         const RenormTriplet& t, double lambda,
                                                         const Rect& window,
                                                         const RunDetectionParams& params) {
    std::vector<StraightRunCertificate> out;
    if (curve.pts.size() < 2) return out;
    Scales sc = scales(t, lambda);
    double sqg = std::sqrt(t.gamma);
    // contact tests are point-based: resample coarse polylines first
    std::vector<Vec2> pts;
    double max_step = std::max(params.contact_tol, 1e-6);
    pts.push_back(curve.pts.front());
    for (size_t i = 1; i < curve.pts.size(); ++i) {
        double seg = dist(curve.pts[i - 1], curve.pts[i]);
        int pieces = std::max(1, static_cast<int>(std::ceil(seg / max_step)));
        for (int p = 1; p <= pieces; ++p)
            pts.push_back(curve.pts[i - 1] +
                          (curve.pts[i] - curve.pts[i - 1]) * (static_cast<double>(p) / pieces));
    }
    // The orientation family quantizes angles to pi/n, which displaces the far
    // side center of a true run by up to 2 L sin(pi/(4n)); the contact and
    // containment tolerances absorb that so genuine runs still certify.
    double quant = 2.0 * std::sin(3.14159265358979323846 / (4.0 * params.n_orientations));

    // coarse occupancy grid per scale: prefilter for far-contact queries
    std::unordered_set<int64_t> occupancy;
    double occ_cell = 1.0;
    auto occ_key = [](int ix, int iy) {
        return (static_cast<int64_t>(ix) << 32) ^ (iy & 0xffffffffLL);
    };
    auto occ_near = [&](const Vec2& p) {
        int ix = static_cast<int>(std::floor(p.x / occ_cell));
        int iy = static_cast<int>(std::floor(p.y / occ_cell));
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (occupancy.count(occ_key(ix + dx, iy + dy))) return true;
        return false;
    };

    // The connected piece of curve-in-rect through the anchor must reach the
    // far side center. Walking outward from the anchor keeps the cost at the
    // piece length instead of the whole curve.
    auto try_cert = [&](size_t a, const Vec2& ud, double ang, double L, double height) -> bool {
        const Vec2& pa = pts[a];
        double tol = params.contact_tol + quant * L;
        Vec2 c_far = pa + ud * L;
        if (!occ_near(c_far)) return false;
        OrientedRect rect{pa + ud * (L / 2), ang, L, height};
        if (!window.contains(rect.center)) return false;
        for (size_t i = a; i < pts.size() && rect.contains(pts[i], tol); ++i)
            if (dist(pts[i], c_far) <= tol) return true;
        for (size_t i = a; i-- > 0 && rect.contains(pts[i], tol);)
            if (dist(pts[i], c_far) <= tol) return true;
        return false;
    };

    for (int k = 0; k <= sc.k_max; ++k) {
        double L = sc.L[k];
        double height = params.tube_mult * L / sqg;
        double step = L / t.gamma;  // placement lattice granularity

        // rebuild the occupancy grid at this scale's contact tolerance
        occ_cell = std::max(params.contact_tol + quant * L, 1e-6);
        occupancy.clear();
        for (const Vec2& p : pts)
            occupancy.insert(occ_key(static_cast<int>(std::floor(p.x / occ_cell)),
                                     static_cast<int>(std::floor(p.y / occ_cell))));

        // anchors: first curve point per lattice cell
        std::vector<int32_t> anchors;
        std::unordered_set<int64_t> seen;
        for (size_t i = 0; i < pts.size(); ++i) {
            int ix = static_cast<int>(std::floor(pts[i].x / step));
            int iy = static_cast<int>(std::floor(pts[i].y / step));
            if (seen.insert(occ_key(ix, iy)).second) anchors.push_back(static_cast<int32_t>(i));
        }

        for (int32_t a : anchors) {
            const Vec2& pa = pts[a];
            bool found = false;
            for (int j = 0; j < params.n_orientations && !found; ++j) {
                double ang = j * 3.14159265358979323846 / params.n_orientations;
                Vec2 u{std::cos(ang), std::sin(ang)};
                for (int dirsign : {1, -1}) {
                    Vec2 ud = u * static_cast<double>(dirsign);
                    if (!try_cert(a, ud, ang, L, height)) continue;
                    out.push_back({k, {pa + ud * (L / 2), ang, L, height}});
                    found = true;
                    // extend co-anchored down the scales: these rectangles
                    // nest by construction, so a straight stretch shows up
                    // as a full chain rather than isolated certificates
                    for (int k2 = k + 1; k2 <= sc.k_max; ++k2) {
                        double L2 = sc.L[k2];
                        double h2 = params.tube_mult * L2 / sqg;
                        if (try_cert(a, ud, ang, L2, h2))
                            out.push_back({k2, {pa + ud * (L2 / 2), ang, L2, h2}});
                    }
                    break;
                }
            }
        }
    }
    return out;
}

namespace {

// Longest nested chain ending at each certificate (nesting = rectangle
// containment, deeper scales inside shallower ones). Certificates are grouped
// by scale with a center hash so only nearby pairs are tested.
struct ChainStats {
    std::vector<int> ids;   // certificate indices, sorted by scale
    std::vector<int> best;  // chain length ending here
    std::vector<int> pred;  // predecessor position in ids, -1 at chain start
};

ChainStats compute_chain_stats(const std::vector<StraightRunCertificate>& runs,
                               const RenormTriplet& t, double lambda, const Rect& window) {
    (void)window;
    Scales sc = scales(t, lambda);
    ChainStats cs;
    for (size_t i = 0; i < runs.size(); ++i)
        if (runs[i].scale_index >= 0 && runs[i].scale_index <= sc.k_max)
            cs.ids.push_back(static_cast<int>(i));
    std::sort(cs.ids.begin(), cs.ids.end(),
              [&](int a, int b) { return runs[a].scale_index < runs[b].scale_index; });
    size_t n = cs.ids.size();
    cs.best.assign(n, 1);
    cs.pred.assign(n, -1);

    // per-scale hash over certificate centers
    struct ScaleHash {
        double cell = 1.0;
        double half_diag = 0.0;  // largest half-diagonal among this scale's rects
        std::unordered_map<int64_t, std::vector<int>> buckets;  // positions in ids
    };
    std::vector<ScaleHash> hashes(sc.k_max + 1);
    auto key = [](int ix, int iy) {
        return (static_cast<int64_t>(ix) << 32) ^ (iy & 0xffffffffLL);
    };
    for (size_t i = 0; i < n; ++i) {
        const auto& r = runs[cs.ids[i]];
        ScaleHash& h = hashes[r.scale_index];
        h.half_diag = std::max(h.half_diag, std::hypot(r.rect.length, r.rect.height) / 2);
    }
    for (int k = 0; k <= sc.k_max; ++k) hashes[k].cell = std::max(hashes[k].half_diag, 1e-9);
    for (size_t i = 0; i < n; ++i) {
        const auto& r = runs[cs.ids[i]];
        ScaleHash& h = hashes[r.scale_index];
        h.buckets[key(static_cast<int>(std::floor(r.rect.center.x / h.cell)),
                      static_cast<int>(std::floor(r.rect.center.y / h.cell)))]
            .push_back(static_cast<int>(i));
    }
    // Chains descend through containment. Straight stretches certify at
    // consecutive scales, so a bounded scale lookback loses nothing real
    // while keeping the search near-linear.
    const int kLookback = 8;
    for (size_t i = 0; i < n; ++i) {
        const auto& ri = runs[cs.ids[i]];
        for (int kj = std::max(0, ri.scale_index - kLookback); kj < ri.scale_index; ++kj) {
            const ScaleHash& h = hashes[kj];
            if (h.buckets.empty()) continue;
            // a containing rect's center lies within its own half-diagonal of
            // the contained rect's center
            int ix = static_cast<int>(std::floor(ri.rect.center.x / h.cell));
            int iy = static_cast<int>(std::floor(ri.rect.center.y / h.cell));
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    auto it = h.buckets.find(key(ix + dx, iy + dy));
                    if (it == h.buckets.end()) continue;
                    for (int jpos : it->second) {
                        if (cs.best[jpos] + 1 <= cs.best[i]) continue;
                        const auto& rj = runs[cs.ids[jpos]];
                        if (dist(rj.rect.center, ri.rect.center) > h.half_diag) continue;
                        if (rj.rect.contains_rect(ri.rect)) {
                            cs.best[i] = cs.best[jpos] + 1;
                            cs.pred[i] = jpos;
                        }
                    }
                }
        }
    }
    return cs;
}

}  // namespace

SparsityResult is_sparse(const std::vector<StraightRunCertificate>& runs, const RenormTriplet& t,
                         int k0, double lambda, const Rect& window) {
    ChainStats cs = compute_chain_stats(runs, t, lambda, window);
    SparsityResult res;
    for (size_t i = 0; i < cs.ids.size(); ++i) {
        int k_i = runs[cs.ids[i]].scale_index;
        if (2 * cs.best[i] >= std::max(k_i, k0)) {
            res.sparse = false;
            for (int c = static_cast<int>(i); c >= 0; c = cs.pred[c]) res.witness.push_back(cs.ids[c]);
            std::reverse(res.witness.begin(), res.witness.end());
            return res;
        }
    }
    return res;
}

int min_sparse_k0(const std::vector<StraightRunCertificate>& runs, const RenormTriplet& t,
                  double lambda, const Rect& window) {
    ChainStats cs = compute_chain_stats(runs, t, lambda, window);
    int min_k0 = 0;
    for (size_t i = 0; i < cs.ids.size(); ++i) {
        int k_i = runs[cs.ids[i]].scale_index;
        // a chain of length n ending at scale k blocks every k0 <= 2n when
        // the chain already disqualifies its own deepest scale (2n >= k)
        if (2 * cs.best[i] >= k_i) min_k0 = std::max(min_k0, 2 * cs.best[i] + 1);
    }
    return min_k0;
}

// --- hierarchical decomposition// --- hierarchical decomposition -------------------------------------------

namespace {

struct BBox {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    void add(const Vec2& p) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    double dist_to(const BBox& o) const {
        double dx = std::max({x0 - o.x1, o.x0 - x1, 0.0});
        double dy = std::max({y0 - o.y1, o.y0 - y1, 0.0});
        return std::hypot(dx, dy);
    }
    double dist_to(const Vec2& p) const {
        double dx = std::max({x0 - p.x, p.x - x1, 0.0});
        double dy = std::max({y0 - p.y, p.y - y1, 0.0});
        return std::hypot(dx, dy);
    }
};

BBox bbox_of(const std::vector<Vec2>& pts) {
    BBox b;
    for (const Vec2& p : pts) b.add(p);
    return b;
}

double point_polyline_dist(const Vec2& p, const std::vector<Vec2>& poly) {
    double best = 1e300;
    for (size_t i = 1; i < poly.size(); ++i)
        best = std::min(best, point_segment_dist(p, poly[i - 1], poly[i]));
    if (poly.size() == 1) best = dist(p, poly[0]);
    return best;
}

double polyline_polyline_dist(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                              double early_exit) {
    double best = 1e300;
    for (size_t i = 1; i < a.size(); ++i) {
        for (size_t j = 1; j < b.size(); ++j) {
            best = std::min(best, segment_segment_dist(a[i - 1], a[i], b[j - 1], b[j]));
            if (best < early_exit) return best;
        }
    }
    if (a.size() == 1) best = point_polyline_dist(a[0], b);
    if (b.size() == 1) best = std::min(best, point_polyline_dist(b[0], a));
    return best;
}

// Spatial hash over polyline segments for near-point queries during the
// hierarchy construction.
struct SegmentHash {
    double cell = 1.0;
    std::unordered_map<int64_t, std::vector<std::pair<Vec2, Vec2>>> buckets;

    static int64_t key(int ix, int iy) {
        return (static_cast<int64_t>(ix) << 32) ^ (iy & 0xffffffffLL);
    }
    void add_polyline(const std::vector<Vec2>& pts) {
        for (size_t i = 0; i + 1 < pts.size(); ++i) add_segment(pts[i], pts[i + 1]);
        if (pts.size() == 1) add_segment(pts[0], pts[0]);
    }
    void add_segment(const Vec2& a, const Vec2& b) {
        int x0 = static_cast<int>(std::floor(std::min(a.x, b.x) / cell));
        int x1 = static_cast<int>(std::floor(std::max(a.x, b.x) / cell));
        int y0 = static_cast<int>(std::floor(std::min(a.y, b.y) / cell));
        int y1 = static_cast<int>(std::floor(std::max(a.y, b.y) / cell));
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix) buckets[key(ix, iy)].push_back({a, b});
    }
    bool any_within(const Vec2& p, double r) const {
        int ix = static_cast<int>(std::floor(p.x / cell));
        int iy = static_cast<int>(std::floor(p.y / cell));
        int span = static_cast<int>(std::ceil(r / cell));
        for (int dy = -span; dy <= span; ++dy)
            for (int dx = -span; dx <= span; ++dx) {
                auto it = buckets.find(key(ix + dx, iy + dy));
                if (it == buckets.end()) continue;
                for (const auto& [a, b] : it->second)
                    if (point_segment_dist(p, a, b) <= r) return true;
            }
        return false;
    }
};

}  // namespace

std::vector<Vec2> node_points(const Curve& root, double arc_lo, double arc_hi) {
    std::vector<Vec2> pts;
    Vec2 lo = root.at_arclen(arc_lo);
    Vec2 hi = root.at_arclen(arc_hi);
    pts.push_back(lo);
    auto it0 = std::upper_bound(root.cumlen.begin(), root.cumlen.end(), arc_lo + 1e-12);
    auto it1 = std::lower_bound(root.cumlen.begin(), root.cumlen.end(), arc_hi - 1e-12);
    for (auto it = it0; it < it1; ++it) {
        const Vec2& p = root.pts[it - root.cumlen.begin()];
        if (dist(pts.back(), p) > 0) pts.push_back(p);
    }
    if (dist(pts.back(), hi) > 0) pts.push_back(hi);
    return pts;
}

namespace {

struct Builder {
    const Curve& root;
    RenormTriplet trip;
    double lambda;
    Scales sc;
    RunDetectionParams params;
    CurveHierarchy h;

    Builder(const Curve& c, const RenormTriplet& t, double lam, const RunDetectionParams& p)
        : root(c), trip(t), lambda(lam), params(p) {}

    int add_node(int level, int parent, double arc_lo, double arc_hi) {
        HierarchyNode n;
        n.level = level;
        n.parent = parent;
        n.arc_lo = arc_lo;
        n.arc_hi = arc_hi;
        n.pts = node_points(root, arc_lo, arc_hi);
        DiameterResult d = point_set_diameter(n.pts);
        n.diam = d.value;
        n.diam_p = d.p;
        n.diam_q = d.q;
        int id = static_cast<int>(h.nodes.size());
        h.nodes.push_back(std::move(n));
        if (parent >= 0) h.nodes[parent].children.push_back(id);
        h.levels[level].push_back(id);
        return id;
    }

    // Chord-window construction: m children always exist along the diameter
    // chord (projection windows of width L_child separated by gap), plus at
    // most one extra child harvested from leftover material.
    std::vector<std::pair<double, double>> chord_children(int node, double L_child, double gap) {
        HierarchyNode& parent = h.nodes[node];
        const std::vector<Vec2>& P = parent.pts;
        size_t n = P.size();

        // locate the diameter endpoints in traversal order
        size_t ia = n, ib = n;
        for (size_t i = 0; i < n; ++i) {
            if (ia == n && P[i].x == parent.diam_p.x && P[i].y == parent.diam_p.y) ia = i;
            if (ib == n && P[i].x == parent.diam_q.x && P[i].y == parent.diam_q.y) ib = i;
        }
        if (ia == n || ib == n)
            throw DecompositionError("diameter endpoints not found on the node polyline");
        if (ia > ib) std::swap(ia, ib);
        Vec2 pa = P[ia];
        Vec2 u = (P[ib] - P[ia]) * (1.0 / dist(P[ia], P[ib]));

        std::vector<double> arc(n);
        arc[0] = parent.arc_lo;
        for (size_t i = 1; i < n; ++i) arc[i] = arc[i - 1] + dist(P[i - 1], P[i]);
        std::vector<double> g(n);
        for (size_t i = 0; i < n; ++i) g[i] = (P[i] - pa).dot(u);

        double D = dist(P[ia], P[ib]);
        int windows = static_cast<int>(std::floor((D + gap + 1e-12) / (L_child + gap)));
        std::vector<std::pair<double, double>> child_arcs;
        size_t scan = ia;
        for (int wdx = 0; wdx < windows; ++wdx) {
            double c = wdx * (L_child + gap);
            double top = c + L_child;
            // first edge reaching `top`
            while (scan + 1 <= ib && !(g[scan] < top && g[scan + 1] >= top)) ++scan;
            if (scan + 1 > ib) throw DecompositionError("projection window not crossed");
            double tt = (top - g[scan]) / (g[scan + 1] - g[scan]);
            double arc_t = arc[scan] + tt * (arc[scan + 1] - arc[scan]);
            // last position before it with projection <= c
            size_t back = scan;
            while (back > ia && !(g[back] <= c && g[back + 1] > c)) --back;
            double tb = g[back + 1] > g[back] ? (c - g[back]) / (g[back + 1] - g[back]) : 0.0;
            tb = std::clamp(tb, 0.0, 1.0);
            double arc_s = arc[back] + tb * (arc[back + 1] - arc[back]);
            child_arcs.emplace_back(arc_s, arc_t);
        }

        // try one extra child separated from the selected ones; vertex-level
        // distance checks carry a half-step margin so segment-level
        // separation is implied
        double max_step = 0.0;
        for (size_t i = 1; i < n; ++i) max_step = std::max(max_step, dist(P[i - 1], P[i]));
        double far_need = gap * (1 + 1e-9) + max_step / 2;
        SegmentHash hash;
        hash.cell = std::max(gap, 1e-9);
        for (auto& [alo, ahi] : child_arcs) hash.add_polyline(node_points(root, alo, ahi));

        bool extra_found = false;
        size_t run_start = 0;
        bool in_run = false;
        for (size_t i = 0; i <= n && !extra_found; ++i) {
            bool far = i < n && !hash.any_within(P[i], far_need);
            if (far && !in_run) {
                in_run = true;
                run_start = i;
            }
            if (!far && in_run) {
                in_run = false;
                size_t run_end = i;  // exclusive
                if (run_end - run_start >= 2) {
                    std::vector<Vec2> run(P.begin() + run_start, P.begin() + run_end);
                    if (point_set_diameter(run).value >= L_child * (1 + 1e-12)) {
                        child_arcs.emplace_back(arc[run_start], arc[run_end - 1]);
                        extra_found = true;
                    }
                }
            }
        }
        return child_arcs;
    }

    // Greedy arc-walk construction: march the traversal, cutting minimal
    // sub-arcs of diameter L_child whenever the material is gap-far from every
    // child selected so far. Folding curves yield more children this way than
    // the chord windows do.
    std::vector<std::pair<double, double>> greedy_children(int node, double L_child, double gap) {
        HierarchyNode& parent = h.nodes[node];
        const std::vector<Vec2>& P = parent.pts;
        size_t n = P.size();
        std::vector<double> arc(n);
        arc[0] = parent.arc_lo;
        for (size_t i = 1; i < n; ++i) arc[i] = arc[i - 1] + dist(P[i - 1], P[i]);

        std::vector<std::pair<double, double>> child_arcs;
        std::vector<std::pair<size_t, size_t>> idx_ranges;
        double max_step = 0.0;
        for (size_t i = 1; i < n; ++i) max_step = std::max(max_step, dist(P[i - 1], P[i]));
        double far_need = gap * (1 + 1e-9) + max_step / 2;
        SegmentHash hash;
        hash.cell = std::max(gap, 1e-9);
        bool has_selection = false;

        size_t from = 0;
        while (from < n) {
            // next maximal far run [i, j)
            size_t i = from;
            while (i < n && has_selection && hash.any_within(P[i], far_need)) ++i;
            if (i >= n) break;
            size_t j = i;
            BBox grow;
            while (j < n && !(has_selection && hash.any_within(P[j], far_need))) {
                grow.add(P[j]);
                ++j;
            }
            if (j - i < 2 || std::hypot(grow.x1 - grow.x0, grow.y1 - grow.y0) < L_child) {
                from = j + 1;
                continue;
            }
            std::vector<Vec2> run(P.begin() + i, P.begin() + j);
            if (point_set_diameter(run).value < L_child * (1 + 1e-12)) {
                from = j + 1;
                continue;
            }
            // minimal prefix [i, e] with diameter >= L_child (binary search)
            size_t lo = i + 1, hi = j - 1;
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                std::vector<Vec2> pre(P.begin() + i, P.begin() + mid + 1);
                if (point_set_diameter(pre).value >= L_child * (1 + 1e-12))
                    hi = mid;
                else
                    lo = mid + 1;
            }
            size_t e = lo;
            child_arcs.emplace_back(arc[i], arc[e]);
            idx_ranges.emplace_back(i, e);
            hash.add_polyline({P.begin() + i, P.begin() + e + 1});
            has_selection = true;
            from = e + 1;
        }

        // expansion pass: grow each child into the surrounding material while
        // staying clear of its siblings, so children keep enough interior
        // structure for their own splits
        for (size_t c = 0; c < idx_ranges.size(); ++c) {
            SegmentHash others;
            others.cell = hash.cell;
            for (size_t o = 0; o < idx_ranges.size(); ++o) {
                if (o == c) continue;
                others.add_polyline(
                    {P.begin() + idx_ranges[o].first, P.begin() + idx_ranges[o].second + 1});
            }
            auto& [ci, ce] = idx_ranges[c];
            if (idx_ranges.size() > 1) {
                while (ce + 1 < n && !others.any_within(P[ce + 1], far_need)) ++ce;
                while (ci > 0 && !others.any_within(P[ci - 1], far_need)) --ci;
            } else {
                ci = 0;
                ce = n - 1;
            }
            child_arcs[c] = {arc[ci], arc[ce]};
        }
        return child_arcs;
    }

    // children of `node` at scale L_child with gap eps*L_child
    void split(int node, double L_child, double gap) {
        std::vector<std::pair<double, double>> chord = chord_children(node, L_child, gap);
        std::vector<std::pair<double, double>> greedy = greedy_children(node, L_child, gap);
        std::vector<std::pair<double, double>>& pick = greedy.size() > chord.size() ? greedy : chord;
        std::sort(pick.begin(), pick.end());
        for (auto& [alo, ahi] : pick) add_node(h.nodes[node].level + 1, node, alo, ahi);
    }
};

}  // namespace

CurveHierarchy decompose(const Curve& curve, const RenormTriplet& t, double lambda,
                         const RunDetectionParams& params) {
    if (curve.pts.size() < 2) throw UsageError("decompose: empty curve");
    DiameterResult d0 = point_set_diameter(curve.pts);
    if (d0.value < lambda * (1 - 1e-9))
        throw UsageError("decompose: curve diameter below lambda");

    Builder b(curve, t, lambda, params);
    b.sc = scales(t, lambda);
    b.h.triplet = t;
    b.h.lambda = lambda;
    b.h.scale = b.sc;
    b.h.levels.resize(b.sc.k_max + 1);
    b.add_node(0, -1, 0.0, curve.length());

    double eps = t.eps();
    double sqg = std::sqrt(t.gamma);
    for (int k = 0; k < b.sc.k_max; ++k) {
        double L_child = b.sc.L[k + 1];
        double gap = eps * L_child;
        std::vector<int> level_nodes = b.h.levels[k];
        for (int id : level_nodes) {
            b.split(id, L_child, gap);
            HierarchyNode& node = b.h.nodes[id];
            node.has_run =
                segment_has_straight_run(node.pts, b.sc.L[k], params.tube_mult * b.sc.L[k] / sqg);
            if (static_cast<int>(node.children.size()) < t.m + 1 && !node.has_run) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "node %d (level %d) is run-free but has %zu <= m children", id, k,
                              node.children.size());
                throw DecompositionError(buf);
            }
        }
    }
    // leaf-level run flags (reported, not used for child counts)
    for (int id : b.h.levels[b.sc.k_max]) {
        HierarchyNode& node = b.h.nodes[id];
        node.has_run = segment_has_straight_run(node.pts, b.sc.L[node.level],
                                                params.tube_mult * b.sc.L[node.level] / sqg);
    }

    std::vector<std::string> violations = verify_hierarchy(b.h, params);
    if (!violations.empty())
        throw DecompositionError("hierarchy postcondition failed: " + violations.front());
    return b.h;
}

std::vector<std::string> verify_hierarchy(const CurveHierarchy& h,
                                          const RunDetectionParams& params) {
    std::vector<std::string> out;
    char buf[256];
    const RenormTriplet& t = h.triplet;
    double eps = t.eps();
    double sqg = std::sqrt(t.gamma);

    if (h.levels.empty() || h.levels[0].size() != 1) {
        out.push_back("Gamma_0 must contain exactly one segment");
        return out;
    }
    for (int k = 0; k < static_cast<int>(h.levels.size()); ++k) {
        double Lk = h.scale.L[k];
        // diameters
        for (int id : h.levels[k])
            if (h.nodes[id].diam < Lk * (1 - kTol)) {
                std::snprintf(buf, sizeof buf, "node %d at level %d has diameter %.6g < L_k=%.6g",
                              id, k, h.nodes[id].diam, Lk);
                out.push_back(buf);
            }
        // pairwise separation within the level (x-sorted sweep over bboxes)
        double need = eps * Lk * (1 - kTol);
        const std::vector<int>& lev = h.levels[k];
        std::vector<BBox> boxes(lev.size());
        std::vector<size_t> order(lev.size());
        for (size_t i = 0; i < lev.size(); ++i) {
            boxes[i] = bbox_of(h.nodes[lev[i]].pts);
            order[i] = i;
        }
        std::sort(order.begin(), order.end(),
                  [&](size_t a, size_t b) { return boxes[a].x0 < boxes[b].x0; });
        for (size_t oi = 0; oi < order.size(); ++oi) {
            size_t i = order[oi];
            for (size_t oj = oi + 1; oj < order.size(); ++oj) {
                size_t j = order[oj];
                if (boxes[j].x0 - boxes[i].x1 >= need) break;  // sorted by x0
                if (boxes[i].dist_to(boxes[j]) >= need) continue;
                double dd =
                    polyline_polyline_dist(h.nodes[lev[i]].pts, h.nodes[lev[j]].pts, need);
                if (dd < need) {
                    std::snprintf(buf, sizeof buf,
                                  "nodes %d,%d at level %d are %.6g apart < eps*L_k=%.6g", lev[i],
                                  lev[j], k, dd, eps * Lk);
                    out.push_back(buf);
                    if (out.size() > 20) return out;
                }
            }
        }
        // nesting and child counts
        for (int id : lev) {
            const HierarchyNode& n = h.nodes[id];
            if (k > 0) {
                const HierarchyNode& p = h.nodes[n.parent];
                if (n.arc_lo < p.arc_lo - 1e-9 || n.arc_hi > p.arc_hi + 1e-9) {
                    std::snprintf(buf, sizeof buf, "node %d is not included in its parent", id);
                    out.push_back(buf);
                }
            }
            if (k <= h.scale.k_max - 1) {
                int nc = static_cast<int>(n.children.size());
                if (nc < t.m) {
                    std::snprintf(buf, sizeof buf, "node %d has %d < m children", id, nc);
                    out.push_back(buf);
                } else if (nc < t.m + 1) {
                    bool run = segment_has_straight_run(n.pts, h.scale.L[k],
                                                        params.tube_mult * h.scale.L[k] / sqg);
                    if (!run) {
                        std::snprintf(buf, sizeof buf,
                                      "node %d is run-free at its scale but has only m children",
                                      id);
                        out.push_back(buf);
                    }
                }
            }
        }
    }
    return out;
}

AtomicMeasure build_measure(const CurveHierarchy& h) {
    if (h.nodes.empty()) throw UsageError("build_measure: empty hierarchy");
    AtomicMeasure mu;
    for (int leaf : h.leaves()) {
        const HierarchyNode& n = h.nodes[leaf];
        Vec2 rep = n.pts.front();
        for (const Vec2& p : n.pts)
            if (p.x < rep.x || (p.x == rep.x && p.y > rep.y)) rep = p;
        double mass = 1.0;
        for (int a = h.nodes[leaf].parent; a >= 0; a = h.nodes[a].parent)
            mass /= static_cast<double>(h.nodes[a].children.size());
        mu.atoms.push_back(rep);
        mu.mass.push_back(mass);
    }
    return mu;
}

double energy(const AtomicMeasure& mu, double s, double lambda) {
    if (s <= 1.0) throw UsageError("energy requires s > 1");
    size_t n = mu.atoms.size();
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        acc += mu.mass[i] * mu.mass[i];  // diagonal, max(0,1) = 1
        for (size_t j = i + 1; j < n; ++j) {
            double d = dist(mu.atoms[i], mu.atoms[j]);
            double denom = d > 1.0 ? pow_d(d, s) : 1.0;
            acc += 2.0 * mu.mass[i] * mu.mass[j] / denom;
        }
    }
    return pow_d(lambda, s) * acc;
}

double length_lower_bound(double energy_value, double s, double lambda) {
    if (energy_value <= 0.0) throw UsageError("length_lower_bound requires positive energy");
    return pow_d(lambda, s) / energy_value - pow_d(2.0, s);
}

double sparse_energy_bound(const RenormTriplet& t, int k0) {
    double eps = t.eps();
    double beta = t.beta();
    double gs = pow_d(t.gamma, t.s);
    return (pow_d(t.gamma, t.s * (k0 + 1)) + beta / (1.0 - gs / beta)) / pow_d(eps, t.s);
}

double partition_energy_check(const std::vector<std::vector<Vec2>>& parts, const AtomicMeasure& mu,
                              double s, double lambda) {
    double sum = 0.0;
    for (const auto& part : parts) {
        if (part.empty()) throw UsageError("partition_energy_check: empty part");
        double d = point_set_diameter(part).value;
        if (d < 1.0 - 1e-12) throw UsageError("partition_energy_check: part diameter below 1");
        sum += pow_d(d, s);
    }
    for (const Vec2& a : mu.atoms) {
        bool covered = false;
        for (const auto& part : parts) {
            if (part.size() == 1 ? dist(a, part[0]) <= 1e-6
                                 : point_polyline_dist(a, part) <= 1e-6) {
                covered = true;
                break;
            }
        }
        if (!covered) throw UsageError("partition_energy_check: an atom is not covered");
    }
    return energy(mu, s, lambda) * sum / pow_d(lambda, s);
}

std::vector<CurvePart> unit_diameter_partition(const Curve& curve) {
    if (point_set_diameter(curve.pts).value < 1.0)
        throw UsageError("unit_diameter_partition requires curve diameter >= 1");
    std::vector<double> exits;  // arc positions where distance from part start hits 1
    double cur_arc = 0.0;
    Vec2 cur = curve.pts.front();
    for (;;) {
        // first arc position > cur_arc with |gamma(t) - cur| = 1
        auto it = std::upper_bound(curve.cumlen.begin(), curve.cumlen.end(), cur_arc);
        size_t i = it - curve.cumlen.begin();
        double found = -1.0;
        for (; i < curve.pts.size(); ++i) {
            double base = std::max(cur_arc, curve.cumlen[i - 1]);
            Vec2 a = curve.at_arclen(base);
            Vec2 b = curve.pts[i];
            Vec2 dvec = b - a;
            Vec2 w = a - cur;
            double A = dvec.norm2(), B = 2 * w.dot(dvec), C = w.norm2() - 1.0;
            if (A == 0) continue;
            double disc = B * B - 4 * A * C;
            if (disc < 0) continue;
            double tt = (-B + std::sqrt(disc)) / (2 * A);
            if (tt < 0 || tt > 1) continue;
            found = base + tt * (curve.cumlen[i] - base);
            break;
        }
        if (found < 0) break;  // no further exit: the tail stays in the unit ball
        exits.push_back(found);
        cur_arc = found;
        cur = curve.at_arclen(found);
    }
    // the tail past the last exit has diameter < 2; if it is too small to
    // stand alone (diameter < 1) it merges into the previous part
    if (!exits.empty()) {
        std::vector<Vec2> tail = node_points(curve, exits.back(), curve.length());
        if (tail.size() < 2 || point_set_diameter(tail).value < 1.0) exits.pop_back();
    }
    std::vector<CurvePart> parts;
    double lo = 0.0;
    for (size_t i = 0; i < exits.size(); ++i) {
        CurvePart p;
        p.pts = node_points(curve, lo, exits[i]);
        p.diam = point_set_diameter(p.pts).value;
        parts.push_back(std::move(p));
        lo = exits[i];
    }
    CurvePart last;
    last.pts = node_points(curve, lo, curve.length());
    last.diam = point_set_diameter(last.pts).value;
    parts.push_back(std::move(last));
    return parts;
}

bool claim1_check(const CurveHierarchy& h, int k0) {
    double beta = h.triplet.beta();
    for (int leaf : h.leaves()) {
        std::vector<int> counts;  // n_i along the ancestry, i = 0 .. k_max-1
        for (int a = h.nodes[leaf].parent; a >= 0; a = h.nodes[a].parent)
            counts.push_back(static_cast<int>(h.nodes[a].children.size()));
        std::reverse(counts.begin(), counts.end());
        double prod = 1.0;
        for (int k = 1; k <= static_cast<int>(counts.size()); ++k) {
            prod *= counts[k - 1];
            if (k >= k0 && prod < pow_d(beta, k) * (1 - 1e-12)) return false;
        }
    }
    return true;
}

SparsityConstants min_gamma_for_sparsity_bound() {
    auto g = [](double gamma) {
        return std::log(2.0) + 4.0 * std::log(gamma) + 1.0 - std::sqrt(gamma) / 160.0;
    };
    double lo = 1e4, hi = 1e10;
    if (!(g(lo) > 0 && g(hi) < 0)) throw ModelError("sparsity bound root not bracketed");
    while ((hi - lo) / (0.5 * (hi + lo)) > 1e-9) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? lo : hi) = mid;
    }
    SparsityConstants c;
    c.gamma_star = 0.5 * (lo + hi);
    c.M = std::sqrt(c.gamma_star) / 80.0 - 2.0;
    return c;
}

std::string hierarchy_to_text(const CurveHierarchy& h) {
    std::string out;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    char buf[160];
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        const HierarchyNode& n = h.nodes[id];
        std::snprintf(buf, sizeof buf, "%*snode %d  L%d  diam=%.4g  children=%zu  run=%d\n",
                      2 * depth, "", id, n.level, n.diam, n.children.size(), n.has_run ? 1 : 0);
        out += buf;
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
            stack.push_back({*it, depth + 1});
    }
    return out;
}

std::string hierarchy_to_csv(const CurveHierarchy& h) {
    std::string out = "node_id,parent_id,level,diameter,n_children,run_flag\n";
    char buf[160];
    for (size_t i = 0; i < h.nodes.size(); ++i) {
        const HierarchyNode& n = h.nodes[i];
        std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.9g,%zu,%d\n", i, n.parent, n.level, n.diam,
                      n.children.size(), n.has_run ? 1 : 0);
        out += buf;
    }
    return out;
}

std::string certificates_to_csv(const std::vector<StraightRunCertificate>& runs) {
    std::string out = "scale_index,center_x,center_y,angle,length,height\n";
    char buf[200];
    for (const auto& r : runs) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.scale_index,
                      r.rect.center.x, r.rect.center.y, r.rect.angle, r.rect.length,
                      r.rect.height);
        out += buf;
    }
    return out;
}

}  // namespace gfp
