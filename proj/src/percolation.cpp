#include "gfp/percolation.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "gfp/dsu.hpp"
#include "gfp/errors.hpp"

namespace gfp {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// 16-neighborhood: king + knight moves with Euclidean weights (in units of h).
struct Move {
    int dx, dy;
    double w;
};
const Move kMoves16[16] = {
    {1, 0, 1.0},  {-1, 0, 1.0},  {0, 1, 1.0},  {0, -1, 1.0},
    {1, 1, std::sqrt(2.0)},  {1, -1, std::sqrt(2.0)},  {-1, 1, std::sqrt(2.0)},  {-1, -1, std::sqrt(2.0)},
    {1, 2, std::sqrt(5.0)},  {1, -2, std::sqrt(5.0)},  {-1, 2, std::sqrt(5.0)},  {-1, -2, std::sqrt(5.0)},
    {2, 1, std::sqrt(5.0)},  {2, -1, std::sqrt(5.0)},  {-2, 1, std::sqrt(5.0)},  {-2, -1, std::sqrt(5.0)},
};

// Which pair of rect sides a crossing must join.
bool crossing_is_horizontal(const Rect& rect, CrossDirection dir) {
    switch (dir) {
        case CrossDirection::Horizontal: return true;
        case CrossDirection::Vertical: return false;
        case CrossDirection::Length:
            if (std::abs(rect.width() - rect.height()) < kEps)
                throw UsageError("Length-direction crossing requires a non-square rectangle");
            return rect.width() > rect.height();
    }
    return true;
}

// Vertex index window of the mask covered by rect.
struct SubGrid {
    int ix0, ix1, iy0, iy1;  // inclusive
    int w, ht;

    size_t size() const { return static_cast<size_t>(w) * ht; }
    int local(int ix, int iy) const { return (iy - iy0) * w + (ix - ix0); }
};

SubGrid subgrid(const ExcursionMask& m, const Rect& rect) {
    Rect win = m.window();
    if (rect.x0 < win.x0 - kEps || rect.x1 > win.x1 + kEps || rect.y0 < win.y0 - kEps ||
        rect.y1 > win.y1 + kEps)
        throw UsageError("query rectangle exceeds the sampled window");
    SubGrid s;
    s.ix0 = std::max(0, static_cast<int>(std::ceil((rect.x0 - m.origin.x) / m.h - kEps)));
    s.ix1 = std::min(m.nx - 1, static_cast<int>(std::floor((rect.x1 - m.origin.x) / m.h + kEps)));
    s.iy0 = std::max(0, static_cast<int>(std::ceil((rect.y0 - m.origin.y) / m.h - kEps)));
    s.iy1 = std::min(m.ny - 1, static_cast<int>(std::floor((rect.y1 - m.origin.y) / m.h + kEps)));
    s.w = s.ix1 - s.ix0 + 1;
    s.ht = s.iy1 - s.iy0 + 1;
    if (s.w <= 0 || s.ht <= 0) throw UsageError("query rectangle covers no grid vertices");
    return s;
}

// Union-find over the true vertices of the subgrid under the requested
// connectivity (components of set-intersect-rect, not global components).
DSU build_local_dsu(const ExcursionMask& m, const SubGrid& s, MaskConnectivity conn) {
    DSU dsu(s.size());
    for (int iy = s.iy0; iy <= s.iy1; ++iy)
        for (int ix = s.ix0; ix <= s.ix1; ++ix) {
            if (!m.bit(ix, iy)) continue;
            int li = s.local(ix, iy);
            if (ix + 1 <= s.ix1 && m.bit(ix + 1, iy)) dsu.unite(li, s.local(ix + 1, iy));
            if (iy + 1 <= s.iy1 && m.bit(ix, iy + 1)) dsu.unite(li, s.local(ix, iy + 1));
        }
    if (conn == MaskConnectivity::Topological) {
        for (int iy = s.iy0; iy < s.iy1; ++iy)
            for (int ix = s.ix0; ix < s.ix1; ++ix) {
                uint8_t d = m.cell_diag[static_cast<size_t>(iy) * (m.nx - 1) + ix];
                if (d == 1)
                    dsu.unite(s.local(ix, iy), s.local(ix + 1, iy + 1));
                else if (d == 2)
                    dsu.unite(s.local(ix, iy + 1), s.local(ix + 1, iy));
            }
    }
    return dsu;
}

struct MaskCrossing {
    bool crossed = false;
    std::vector<uint8_t> root_crossing;  // per local root: realizes the crossing
    DSU dsu;
    SubGrid sg;

    MaskCrossing(DSU d, SubGrid s) : dsu(std::move(d)), sg(s) {}
};

MaskCrossing mask_crossing(const ExcursionMask& m, const CrossingQuery& q, MaskConnectivity conn) {
    bool horiz = crossing_is_horizontal(q.rect, q.direction);
    SubGrid s = subgrid(m, q.rect);
    MaskCrossing res(build_local_dsu(m, s, conn), s);
    std::vector<uint8_t> touch_a(s.size(), 0), touch_b(s.size(), 0);
    // side contact: the outermost vertex layer inside the rect (within h/2 of
    // the side when the rect is grid-aligned, the nearest layer otherwise)
    for (int iy = s.iy0; iy <= s.iy1; ++iy)
        for (int ix = s.ix0; ix <= s.ix1; ++ix) {
            if (!m.bit(ix, iy)) continue;
            bool a = horiz ? ix == s.ix0 : iy == s.iy0;
            bool b = horiz ? ix == s.ix1 : iy == s.iy1;
            int r = res.dsu.find(s.local(ix, iy));
            if (a) touch_a[r] = 1;
            if (b) touch_b[r] = 1;
        }
    res.root_crossing.assign(s.size(), 0);
    for (size_t r = 0; r < s.size(); ++r)
        if (touch_a[r] && touch_b[r]) {
            res.root_crossing[r] = 1;
            res.crossed = true;
        }
    return res;
}

// --- clipped nodal graph ---------------------------------------------------

bool clip_segment(const Rect& r, const Vec2& a, const Vec2& b, double& t0, double& t1) {
    t0 = 0.0;
    t1 = 1.0;
    double dx = b.x - a.x, dy = b.y - a.y;
    bool keep = true;
    auto clip = [&](double p, double q) {
        if (p == 0.0) {
            if (q < 0.0) keep = false;
            return;
        }
        double t = q / p;
        if (p < 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
    };
    clip(-dx, a.x - r.x0);
    clip(dx, r.x1 - a.x);
    clip(-dy, a.y - r.y0);
    clip(dy, r.y1 - a.y);
    return keep && t0 < t1 + 1e-15;
}

// The nodal graph clipped to a rectangle, as a node/edge net. Original
// in-rect vertices keep their ids; clip points on the rect boundary become
// virtual nodes, so side contact and path lengths are exact.
struct ClipNet {
    int32_t n_graph = 0;
    std::vector<Vec2> virtual_pos;
    std::vector<std::array<int32_t, 2>> edges;
    std::vector<double> weights;
    std::vector<int32_t> nodes;  // all node ids present

    int32_t n_nodes() const { return n_graph + static_cast<int32_t>(virtual_pos.size()); }
    Vec2 pos(const NodalGraph& g, int32_t id) const {
        return id < n_graph ? g.vertices[id] : virtual_pos[id - n_graph];
    }
};

ClipNet clip_net(const NodalGraph& g, const Rect& rect) {
    ClipNet net;
    net.n_graph = static_cast<int32_t>(g.vertices.size());
    std::vector<uint8_t> present(g.vertices.size(), 0);
    for (size_t i = 0; i < g.segments.size(); ++i) {
        int32_t a = g.segments[i][0], b = g.segments[i][1];
        const Vec2& pa = g.vertices[a];
        const Vec2& pb = g.vertices[b];
        bool ia = rect.contains(pa), ib = rect.contains(pb);
        if (ia && ib) {
            net.edges.push_back({a, b});
            net.weights.push_back(g.seg_length[i]);
            present[a] = present[b] = 1;
            continue;
        }
        double t0, t1;
        if (!clip_segment(rect, pa, pb, t0, t1)) continue;
        int32_t na, nb;
        if (ia) {
            na = a;
            present[a] = 1;
        } else {
            na = net.n_graph + static_cast<int32_t>(net.virtual_pos.size());
            net.virtual_pos.push_back(pa + (pb - pa) * t0);
        }
        if (ib) {
            nb = b;
            present[b] = 1;
        } else {
            nb = net.n_graph + static_cast<int32_t>(net.virtual_pos.size());
            net.virtual_pos.push_back(pa + (pb - pa) * t1);
        }
        net.edges.push_back({na, nb});
        net.weights.push_back(g.seg_length[i] * (t1 - t0));
    }
    for (int32_t v = 0; v < net.n_graph; ++v)
        if (present[v]) net.nodes.push_back(v);
    for (size_t j = 0; j < net.virtual_pos.size(); ++j)
        net.nodes.push_back(net.n_graph + static_cast<int32_t>(j));
    return net;
}

double side_distance(const Vec2& p, const Rect& rect, bool horiz, bool low) {
    if (horiz) return low ? p.x - rect.x0 : rect.x1 - p.x;
    return low ? p.y - rect.y0 : rect.y1 - p.y;
}

void require_in_window(const NodalGraph& g, const Rect& rect) {
    Rect win = g.window();
    if (rect.x0 < win.x0 - kEps || rect.x1 > win.x1 + kEps || rect.y0 < win.y0 - kEps ||
        rect.y1 > win.y1 + kEps)
        throw UsageError("query rectangle exceeds the sampled window");
}

struct GraphCrossing {
    bool crossed = false;
    std::vector<int32_t> contacts_a, contacts_b;
    std::vector<uint8_t> root_crossing;  // indexed by DSU root
    DSU dsu;
    ClipNet net;

    GraphCrossing(DSU d, ClipNet n) : dsu(std::move(d)), net(std::move(n)) {}
};

// Side contact is exact touching: a node on the rect side (graph vertices on
// the window boundary, or clip points produced on the side).
GraphCrossing graph_crossing(const NodalGraph& g, const CrossingQuery& q) {
    bool horiz = crossing_is_horizontal(q.rect, q.direction);
    require_in_window(g, q.rect);
    ClipNet net = clip_net(g, q.rect);
    DSU dsu(net.n_nodes());
    for (auto& e : net.edges) dsu.unite(e[0], e[1]);
    GraphCrossing res(std::move(dsu), std::move(net));

    double tol = 1e-6 * g.h;
    std::vector<uint8_t> ta(res.net.n_nodes(), 0), tb(res.net.n_nodes(), 0);
    for (int32_t v : res.net.nodes) {
        Vec2 p = res.net.pos(g, v);
        bool a = side_distance(p, q.rect, horiz, true) <= tol;
        bool b = side_distance(p, q.rect, horiz, false) <= tol;
        if (a) res.contacts_a.push_back(v);
        if (b) res.contacts_b.push_back(v);
        if (a) ta[res.dsu.find(v)] = 1;
        if (b) tb[res.dsu.find(v)] = 1;
    }
    res.root_crossing.assign(res.net.n_nodes(), 0);
    for (int32_t r = 0; r < res.net.n_nodes(); ++r)
        if (ta[r] && tb[r]) {
            res.root_crossing[r] = 1;
            res.crossed = true;
        }
    return res;
}

// Dijkstra over the net; dist/parent indexed by node id.
void net_dijkstra(const ClipNet& net, const std::vector<int32_t>& sources,
                  std::vector<double>& dist, std::vector<int32_t>& parent) {
    std::vector<std::vector<int32_t>> adj(net.n_nodes());
    for (size_t e = 0; e < net.edges.size(); ++e) {
        adj[net.edges[e][0]].push_back(static_cast<int32_t>(e));
        adj[net.edges[e][1]].push_back(static_cast<int32_t>(e));
    }
    dist.assign(net.n_nodes(), kInf);
    parent.assign(net.n_nodes(), -1);
    using Item = std::pair<double, int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int32_t s : sources) {
        dist[s] = 0.0;
        pq.push({0.0, s});
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v] + 1e-15) continue;
        for (int32_t e : adj[v]) {
            int32_t u = net.edges[e][0] == v ? net.edges[e][1] : net.edges[e][0];
            double nd = d + net.weights[e];
            if (nd < dist[u] - 1e-15) {
                dist[u] = nd;
                parent[u] = v;
                pq.push({nd, u});
            }
        }
    }
}

}  // namespace

bool crosses(const ExcursionMask& mask, const CrossingQuery& q, MaskConnectivity conn) {
    return mask_crossing(mask, q, conn).crossed;
}

bool crosses(const NodalGraph& graph, const CrossingQuery& q) {
    return graph_crossing(graph, q).crossed;
}

bool one_arm(const ExcursionMask& mask, const ArmQuery& q, MaskConnectivity conn) {
    if (q.s < 1.0 || q.s >= q.t) throw UsageError("one_arm requires 1 <= s < t");
    Rect outer = Rect::square(q.center.x, q.center.y, q.t);
    Rect inner = Rect::square(q.center.x, q.center.y, q.s);
    SubGrid sg = subgrid(mask, outer);
    DSU dsu = build_local_dsu(mask, sg, conn);
    std::vector<uint8_t> touch_in(sg.size(), 0), touch_out(sg.size(), 0);
    for (int iy = sg.iy0; iy <= sg.iy1; ++iy)
        for (int ix = sg.ix0; ix <= sg.ix1; ++ix) {
            if (!mask.bit(ix, iy)) continue;
            Vec2 p = mask.point(ix, iy);
            int r = dsu.find(sg.local(ix, iy));
            if (inner.contains(p)) touch_in[r] = 1;
            // outer-boundary contact: the outermost vertex layer inside the box
            if (ix == sg.ix0 || ix == sg.ix1 || iy == sg.iy0 || iy == sg.iy1) touch_out[r] = 1;
        }
    for (size_t r = 0; r < sg.size(); ++r)
        if (touch_in[r] && touch_out[r]) return true;
    return false;
}

bool one_arm(const NodalGraph& graph, const ArmQuery& q) {
    if (q.s < 1.0 || q.s >= q.t) throw UsageError("one_arm requires 1 <= s < t");
    Rect outer = Rect::square(q.center.x, q.center.y, q.t);
    Rect inner = Rect::square(q.center.x, q.center.y, q.s);
    require_in_window(graph, outer);
    ClipNet net = clip_net(graph, outer);
    DSU dsu(net.n_nodes());
    for (auto& e : net.edges) dsu.unite(e[0], e[1]);
    double tol = 1e-6 * graph.h;
    std::vector<uint8_t> touch_in(net.n_nodes(), 0), touch_out(net.n_nodes(), 0);
    for (int32_t v : net.nodes) {
        Vec2 p = net.pos(graph, v);
        if (inner.contains(p)) touch_in[dsu.find(v)] = 1;
        if (p.x - outer.x0 <= tol || outer.x1 - p.x <= tol || p.y - outer.y0 <= tol ||
            outer.y1 - p.y <= tol)
            touch_out[dsu.find(v)] = 1;
    }
    // an edge may cross the inner box without carrying a node inside it
    for (size_t e = 0; e < net.edges.size(); ++e) {
        int32_t r = dsu.find(net.edges[e][0]);
        if (touch_in[r]) continue;
        double t0, t1;
        if (clip_segment(inner, net.pos(graph, net.edges[e][0]), net.pos(graph, net.edges[e][1]),
                         t0, t1))
            touch_in[r] = 1;
    }
    for (int32_t r = 0; r < net.n_nodes(); ++r)
        if (touch_in[r] && touch_out[r]) return true;
    return false;
}

std::optional<double> shortest_crossing(const ExcursionMask& mask, const CrossingQuery& q,
                                        MaskConnectivity conn) {
    MaskCrossing mc = mask_crossing(mask, q, conn);
    if (!mc.crossed) return std::nullopt;
    bool horiz = crossing_is_horizontal(q.rect, q.direction);
    const SubGrid& s = mc.sg;

    std::vector<double> dist(s.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int iy = s.iy0; iy <= s.iy1; ++iy)
        for (int ix = s.ix0; ix <= s.ix1; ++ix) {
            if (!mask.bit(ix, iy)) continue;
            bool a = horiz ? ix == s.ix0 : iy == s.iy0;
            if (a) {
                int li = s.local(ix, iy);
                dist[li] = 0.0;
                pq.push({0.0, li});
            }
        }
    while (!pq.empty()) {
        auto [d, li] = pq.top();
        pq.pop();
        if (d > dist[li] + 1e-15) continue;
        int ix = s.ix0 + li % s.w;
        int iy = s.iy0 + li / s.w;
        bool b = horiz ? ix == s.ix1 : iy == s.iy1;
        if (b) return d;
        for (const Move& mv : kMoves16) {
            int jx = ix + mv.dx, jy = iy + mv.dy;
            if (jx < s.ix0 || jx > s.ix1 || jy < s.iy0 || jy > s.iy1) continue;
            if (!mask.bit(jx, jy)) continue;
            int lj = s.local(jx, jy);
            double nd = d + mv.w * mask.h;
            if (nd < dist[lj] - 1e-15) {
                dist[lj] = nd;
                pq.push({nd, lj});
            }
        }
    }
    return std::nullopt;  // unreachable when crossed
}

std::optional<double> shortest_crossing(const NodalGraph& graph, const CrossingQuery& q) {
    GraphCrossing gc = graph_crossing(graph, q);
    if (!gc.crossed) return std::nullopt;
    std::vector<double> dist;
    std::vector<int32_t> parent;
    net_dijkstra(gc.net, gc.contacts_a, dist, parent);
    double best = kInf;
    for (int32_t v : gc.contacts_b) best = std::min(best, dist[v]);
    if (best == kInf) return std::nullopt;
    return best;
}

std::optional<std::vector<Vec2>> shortest_crossing_path(const NodalGraph& graph,
                                                        const CrossingQuery& q) {
    GraphCrossing gc = graph_crossing(graph, q);
    if (!gc.crossed) return std::nullopt;
    std::vector<double> dist;
    std::vector<int32_t> parent;
    net_dijkstra(gc.net, gc.contacts_a, dist, parent);
    double best = kInf;
    int32_t end = -1;
    for (int32_t v : gc.contacts_b)
        if (dist[v] < best) {
            best = dist[v];
            end = v;
        }
    if (end < 0) return std::nullopt;
    std::vector<Vec2> path;
    for (int32_t v = end; v >= 0; v = parent[v]) path.push_back(gc.net.pos(graph, v));
    std::reverse(path.begin(), path.end());
    return path;
}

ChemicalResult chemical_quantities(const NodalGraph& graph, const Rect& box) {
    if (std::abs(box.width() - 1.0) > 1e-6 || std::abs(box.height() - 1.0) > 1e-6)
        throw UsageError("chemical_quantities expects a unit box");
    require_in_window(graph, box);
    ClipNet net = clip_net(graph, box);
    ChemicalResult res;
    if (net.nodes.empty()) return res;

    DSU dsu(net.n_nodes());
    std::vector<std::vector<int32_t>> adj(net.n_nodes());
    for (size_t e = 0; e < net.edges.size(); ++e) {
        dsu.unite(net.edges[e][0], net.edges[e][1]);
        adj[net.edges[e][0]].push_back(static_cast<int32_t>(e));
        adj[net.edges[e][1]].push_back(static_cast<int32_t>(e));
    }
    std::vector<double> d(net.n_nodes());
    auto sweep = [&](int32_t start) {
        std::fill(d.begin(), d.end(), kInf);
        using Item = std::pair<double, int32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        d[start] = 0.0;
        pq.push({0.0, start});
        int32_t far = start;
        while (!pq.empty()) {
            auto [dd, v] = pq.top();
            pq.pop();
            if (dd > d[v] + 1e-15) continue;
            if (dd > d[far]) far = v;
            for (int32_t e : adj[v]) {
                int32_t u = net.edges[e][0] == v ? net.edges[e][1] : net.edges[e][0];
                double nd = dd + net.weights[e];
                if (nd < d[u] - 1e-15) {
                    d[u] = nd;
                    pq.push({nd, u});
                }
            }
        }
        return far;
    };
    std::unordered_map<int32_t, int32_t> root_rep;
    for (int32_t v : net.nodes) root_rep.emplace(dsu.find(v), v);
    for (auto& [root, rep] : root_rep) {
        int32_t far1 = sweep(rep);
        int32_t far2 = sweep(far1);
        res.diameters.push_back(d[far2]);
        res.total += d[far2];
    }
    return res;
}

ChemicalResult chemical_quantities(const ExcursionMask& mask, const Rect& box,
                                   MaskConnectivity conn) {
    if (std::abs(box.width() - 1.0) > 1e-6 || std::abs(box.height() - 1.0) > 1e-6)
        throw UsageError("chemical_quantities expects a unit box");
    SubGrid s = subgrid(mask, box);
    DSU dsu = build_local_dsu(mask, s, conn);
    ChemicalResult res;
    std::unordered_map<int32_t, int32_t> root_rep;
    for (int iy = s.iy0; iy <= s.iy1; ++iy)
        for (int ix = s.ix0; ix <= s.ix1; ++ix)
            if (mask.bit(ix, iy)) root_rep.emplace(dsu.find(s.local(ix, iy)), s.local(ix, iy));
    std::vector<double> d(s.size());
    auto sweep = [&](int32_t start, int32_t root) {
        std::fill(d.begin(), d.end(), kInf);
        using Item = std::pair<double, int32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        d[start] = 0.0;
        pq.push({0.0, start});
        int32_t far = start;
        while (!pq.empty()) {
            auto [dd, li] = pq.top();
            pq.pop();
            if (dd > d[li] + 1e-15) continue;
            if (dd > d[far]) far = li;
            int ix = s.ix0 + li % s.w, iy = s.iy0 + li / s.w;
            for (const Move& mv : kMoves16) {
                int jx = ix + mv.dx, jy = iy + mv.dy;
                if (jx < s.ix0 || jx > s.ix1 || jy < s.iy0 || jy > s.iy1) continue;
                if (!mask.bit(jx, jy)) continue;
                int lj = s.local(jx, jy);
                if (dsu.find(lj) != root) continue;
                double nd = dd + mv.w * mask.h;
                if (nd < d[lj] - 1e-15) {
                    d[lj] = nd;
                    pq.push({nd, lj});
                }
            }
        }
        return far;
    };
    for (auto& [root, rep] : root_rep) {
        int32_t far1 = sweep(rep, root);
        int32_t far2 = sweep(far1, root);
        res.diameters.push_back(d[far2]);
        res.total += d[far2];
    }
    return res;
}

bool well_separated(const std::vector<Rect>& rects) {
    for (size_t i = 0; i < rects.size(); ++i) {
        double diam = rects[i].diameter();
        double mind = kInf;
        for (size_t j = 0; j < rects.size(); ++j)
            if (j != i) mind = std::min(mind, rect_distance(rects[i], rects[j]));
        if (rects.size() > 1 && mind < diam - 1e-12) return false;
    }
    return true;
}

JointCrossingEstimate joint_crossings(const std::vector<ExcursionMask>& masks,
                                      const std::vector<Rect>& rects, MaskConnectivity conn) {
    for (const Rect& r : rects) {
        double len = std::max(r.width(), r.height());
        double hgt = std::min(r.width(), r.height());
        if (std::abs(len - 2.0 * hgt) > 1e-6 * len)
            throw UsageError("joint_crossings expects aspect 2:1 rectangles");
    }
    for (size_t i = 1; i < rects.size(); ++i) {
        double l0 = std::max(rects[i - 1].width(), rects[i - 1].height());
        double l1 = std::max(rects[i].width(), rects[i].height());
        if (l1 < l0 - 1e-12) throw UsageError("joint_crossings expects increasing lengths");
    }
    if (!well_separated(rects)) throw UsageError("rectangles are not well-separated");

    JointCrossingEstimate est;
    est.n_replicas = static_cast<int>(masks.size());
    if (rects.empty()) {  // empty intersection has probability 1
        est.p_hat = 1.0;
        est.n_hits = est.n_replicas;
        return est;
    }
    for (const ExcursionMask& m : masks) {
        bool all = true;
        for (const Rect& r : rects)
            if (!crosses(m, {r, SetKind::Excursion, CrossDirection::Length}, conn)) {
                all = false;
                break;
            }
        if (all) ++est.n_hits;
    }
    if (est.n_replicas > 0) {
        est.p_hat = static_cast<double>(est.n_hits) / est.n_replicas;
        est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / est.n_replicas);
    }
    return est;
}

int crossing_component_boxes(const NodalGraph& graph, const CrossingQuery& q) {
    GraphCrossing gc = graph_crossing(graph, q);
    if (!gc.crossed) return 0;
    int nbx = std::max(1, static_cast<int>(std::lround(q.rect.width())));
    int nby = std::max(1, static_cast<int>(std::lround(q.rect.height())));
    std::vector<uint8_t> touched(static_cast<size_t>(nbx) * nby, 0);
    for (int32_t v : gc.net.nodes) {
        if (!gc.root_crossing[gc.dsu.find(v)]) continue;
        Vec2 p = gc.net.pos(graph, v);
        int bx = std::min(nbx - 1, std::max(0, static_cast<int>((p.x - q.rect.x0))));
        int by = std::min(nby - 1, std::max(0, static_cast<int>((p.y - q.rect.y0))));
        touched[static_cast<size_t>(by) * nbx + bx] = 1;
    }
    int count = 0;
    for (uint8_t t : touched) count += t;
    return count;
}

int crossing_component_boxes(const ExcursionMask& mask, const CrossingQuery& q,
                             MaskConnectivity conn) {
    MaskCrossing mc = mask_crossing(mask, q, conn);
    if (!mc.crossed) return 0;
    int nbx = std::max(1, static_cast<int>(std::lround(q.rect.width())));
    int nby = std::max(1, static_cast<int>(std::lround(q.rect.height())));
    std::vector<uint8_t> touched(static_cast<size_t>(nbx) * nby, 0);
    const SubGrid& s = mc.sg;
    for (int iy = s.iy0; iy <= s.iy1; ++iy)
        for (int ix = s.ix0; ix <= s.ix1; ++ix) {
            if (!mask.bit(ix, iy)) continue;
            int li = s.local(ix, iy);
            if (!mc.root_crossing[mc.dsu.find(li)]) continue;
            Vec2 p = mask.point(ix, iy);
            int bx = std::min(nbx - 1, std::max(0, static_cast<int>((p.x - q.rect.x0))));
            int by = std::min(nby - 1, std::max(0, static_cast<int>((p.y - q.rect.y0))));
            touched[static_cast<size_t>(by) * nbx + bx] = 1;
        }
    int count = 0;
    for (uint8_t t : touched) count += t;
    return count;
}

}  // namespace gfp
