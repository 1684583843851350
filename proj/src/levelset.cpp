#include "gfp/levelset.hpp"

#include <cmath>

#include "gfp/dsu.hpp"
#include "gfp/errors.hpp"

namespace gfp {

namespace {

// Shifted field value with the measure-zero tie perturbed off zero.
inline double shifted(const FieldGrid& f, int ix, int iy, double level) {
    double g = f.at(ix, iy) + level;
    return g == 0.0 ? 1e-12 : g;
}

int compress_labels(DSU& dsu, const std::vector<uint8_t>& keep, std::vector<int32_t>& labels) {
    std::vector<int32_t> remap(dsu.parent.size(), -1);
    int next = 0;
    for (size_t i = 0; i < dsu.parent.size(); ++i) {
        if (!keep[i]) continue;
        int32_t r = dsu.find(static_cast<int32_t>(i));
        if (remap[r] < 0) remap[r] = next++;
        labels[i] = remap[r];
    }
    return next;
}

}  // namespace

int label_components_4(const std::vector<uint8_t>& bits, int nx, int ny,
                       std::vector<int32_t>& out_labels) {
    DSU dsu(bits.size());
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            size_t i = static_cast<size_t>(iy) * nx + ix;
            if (!bits[i]) continue;
            if (ix + 1 < nx && bits[i + 1]) dsu.unite(i, i + 1);
            if (iy + 1 < ny && bits[i + nx]) dsu.unite(i, i + nx);
        }
    out_labels.assign(bits.size(), -1);
    return compress_labels(dsu, bits, out_labels);
}

ExcursionMask excursion_mask(const FieldGrid& field, double level) {
    ExcursionMask m;
    m.origin = field.origin;
    m.h = field.h;
    m.nx = field.nx;
    m.ny = field.ny;
    size_t n = static_cast<size_t>(m.nx) * m.ny;
    m.bits.resize(n);
    for (int iy = 0; iy < m.ny; ++iy)
        for (int ix = 0; ix < m.nx; ++ix)
            m.bits[m.idx(ix, iy)] = shifted(field, ix, iy, level) >= 0.0 ? 1 : 0;

    m.n_components = label_components_4(m.bits, m.nx, m.ny, m.labels);

    // complement under 8-connectivity
    {
        DSU dsu(n);
        std::vector<uint8_t> neg(n);
        for (size_t i = 0; i < n; ++i) neg[i] = m.bits[i] ? 0 : 1;
        for (int iy = 0; iy < m.ny; ++iy)
            for (int ix = 0; ix < m.nx; ++ix) {
                size_t i = m.idx(ix, iy);
                if (!neg[i]) continue;
                if (ix + 1 < m.nx && neg[i + 1]) dsu.unite(i, i + 1);
                if (iy + 1 < m.ny) {
                    if (neg[i + m.nx]) dsu.unite(i, i + m.nx);
                    if (ix + 1 < m.nx && neg[i + m.nx + 1]) dsu.unite(i, i + m.nx + 1);
                    if (ix > 0 && neg[i + m.nx - 1]) dsu.unite(i, i + m.nx - 1);
                }
            }
        m.labels_co.assign(n, -1);
        compress_labels(dsu, neg, m.labels_co);
    }

    // saddle cells: alternating corners; the center value decides which true
    // diagonal the bilinear interpolation connects
    m.cell_diag.assign(static_cast<size_t>(m.nx - 1) * (m.ny - 1), 0);
    {
        DSU dsu(n);
        for (int iy = 0; iy < m.ny; ++iy)
            for (int ix = 0; ix < m.nx; ++ix) {
                size_t i = m.idx(ix, iy);
                if (!m.bits[i]) continue;
                if (ix + 1 < m.nx && m.bits[i + 1]) dsu.unite(i, i + 1);
                if (iy + 1 < m.ny && m.bits[i + m.nx]) dsu.unite(i, i + m.nx);
            }
        for (int iy = 0; iy + 1 < m.ny; ++iy)
            for (int ix = 0; ix + 1 < m.nx; ++ix) {
                bool sw = m.bit(ix, iy), se = m.bit(ix + 1, iy);
                bool ne = m.bit(ix + 1, iy + 1), nw = m.bit(ix, iy + 1);
                if (sw == ne && se == nw && sw != se) {
                    double center = (shifted(field, ix, iy, level) + shifted(field, ix + 1, iy, level) +
                                     shifted(field, ix + 1, iy + 1, level) +
                                     shifted(field, ix, iy + 1, level)) /
                                    4.0;
                    if (center >= 0.0) {
                        size_t c = static_cast<size_t>(iy) * (m.nx - 1) + ix;
                        if (sw) {  // SW-NE are the true corners
                            m.cell_diag[c] = 1;
                            dsu.unite(m.idx(ix, iy), m.idx(ix + 1, iy + 1));
                        } else {  // NW-SE
                            m.cell_diag[c] = 2;
                            dsu.unite(m.idx(ix, iy + 1), m.idx(ix + 1, iy));
                        }
                    }
                }
            }
        m.labels_topo.assign(n, -1);
        compress_labels(dsu, m.bits, m.labels_topo);
    }
    return m;
}

double NodalGraph::total_length() const {
    double s = 0.0;
    for (double l : seg_length) s += l;
    return s;
}

NodalGraph nodal_graph(const FieldGrid& field, double level) {
    NodalGraph g;
    g.origin = field.origin;
    g.h = field.h;
    g.nx = field.nx;
    g.ny = field.ny;

    const int nx = field.nx, ny = field.ny;
    // vertex ids on cell edges; shared between incident cells
    std::vector<int32_t> hedge(static_cast<size_t>(nx - 1) * ny, -1);     // (ix,iy)-(ix+1,iy)
    std::vector<int32_t> vedge(static_cast<size_t>(nx) * (ny - 1), -1);   // (ix,iy)-(ix,iy+1)

    auto edge_vertex = [&](bool horizontal, int ix, int iy) -> int32_t {
        int32_t& slot = horizontal ? hedge[static_cast<size_t>(iy) * (nx - 1) + ix]
                                   : vedge[static_cast<size_t>(iy) * nx + ix];
        if (slot >= 0) return slot;
        double ga = shifted(field, ix, iy, level);
        double gb = horizontal ? shifted(field, ix + 1, iy, level) : shifted(field, ix, iy + 1, level);
        double t = ga / (ga - gb);
        Vec2 p = field.point(ix, iy);
        if (horizontal)
            p.x += t * field.h;
        else
            p.y += t * field.h;
        slot = static_cast<int32_t>(g.vertices.size());
        g.vertices.push_back(p);
        return slot;
    };

    // edge slots within a cell: 0 bottom, 1 right, 2 top, 3 left
    auto cell_edge_vertex = [&](int ix, int iy, int e) -> int32_t {
        switch (e) {
            case 0: return edge_vertex(true, ix, iy);
            case 1: return edge_vertex(false, ix + 1, iy);
            case 2: return edge_vertex(true, ix, iy + 1);
            default: return edge_vertex(false, ix, iy);
        }
    };

    auto emit = [&](int ix, int iy, int e1, int e2) {
        int32_t a = cell_edge_vertex(ix, iy, e1);
        int32_t b = cell_edge_vertex(ix, iy, e2);
        g.segments.push_back({a, b});
        g.seg_length.push_back(dist(g.vertices[a], g.vertices[b]));
    };

    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            double gsw = shifted(field, ix, iy, level);
            double gse = shifted(field, ix + 1, iy, level);
            double gne = shifted(field, ix + 1, iy + 1, level);
            double gnw = shifted(field, ix, iy + 1, level);
            int code = (gsw >= 0 ? 1 : 0) | (gse >= 0 ? 2 : 0) | (gne >= 0 ? 4 : 0) |
                       (gnw >= 0 ? 8 : 0);
            switch (code) {
                case 0:
                case 15: break;
                case 1: emit(ix, iy, 3, 0); break;   // SW
                case 2: emit(ix, iy, 0, 1); break;   // SE
                case 4: emit(ix, iy, 1, 2); break;   // NE
                case 8: emit(ix, iy, 2, 3); break;   // NW
                case 14: emit(ix, iy, 3, 0); break;  // all but SW
                case 13: emit(ix, iy, 0, 1); break;  // all but SE
                case 11: emit(ix, iy, 1, 2); break;  // all but NE
                case 7: emit(ix, iy, 2, 3); break;   // all but NW
                case 3: emit(ix, iy, 3, 1); break;   // bottom row true
                case 12: emit(ix, iy, 3, 1); break;  // top row true
                case 6: emit(ix, iy, 0, 2); break;   // right column true
                case 9: emit(ix, iy, 0, 2); break;   // left column true
                case 5: {                            // SW,NE true saddle
                    double c = (gsw + gse + gne + gnw) / 4.0;
                    if (c >= 0.0) {  // true phase connects through the center
                        emit(ix, iy, 3, 2);
                        emit(ix, iy, 0, 1);
                    } else {
                        emit(ix, iy, 3, 0);
                        emit(ix, iy, 1, 2);
                    }
                    break;
                }
                case 10: {  // SE,NW true saddle
                    double c = (gsw + gse + gne + gnw) / 4.0;
                    if (c >= 0.0) {
                        emit(ix, iy, 3, 0);
                        emit(ix, iy, 1, 2);
                    } else {
                        emit(ix, iy, 0, 1);
                        emit(ix, iy, 2, 3);
                    }
                    break;
                }
            }
        }
    }

    g.vertex_degree.assign(g.vertices.size(), 0);
    DSU dsu(g.vertices.size());
    for (const auto& s : g.segments) {
        dsu.unite(s[0], s[1]);
        ++g.vertex_degree[s[0]];
        ++g.vertex_degree[s[1]];
    }
    g.vertex_component.assign(g.vertices.size(), -1);
    std::vector<int32_t> remap(g.vertices.size(), -1);
    int next = 0;
    for (size_t i = 0; i < g.vertices.size(); ++i) {
        int32_t r = dsu.find(static_cast<int32_t>(i));
        if (remap[r] < 0) remap[r] = next++;
        g.vertex_component[i] = remap[r];
    }
    g.n_components = next;
    return g;
}

double total_nodal_length(const NodalGraph& graph, const Rect& window) {
    double total = 0.0;
    for (size_t s = 0; s < graph.segments.size(); ++s) {
        Vec2 a = graph.vertices[graph.segments[s][0]];
        Vec2 b = graph.vertices[graph.segments[s][1]];
        // Liang-Barsky clip of [a,b] to the window
        double t0 = 0.0, t1 = 1.0;
        double dx = b.x - a.x, dy = b.y - a.y;
        bool keep = true;
        auto clip = [&](double p, double q) {
            if (p == 0.0) {
                if (q < 0.0) keep = false;
                return;
            }
            double r = q / p;
            if (p < 0.0)
                t0 = std::max(t0, r);
            else
                t1 = std::min(t1, r);
        };
        clip(-dx, a.x - window.x0);
        clip(dx, window.x1 - a.x);
        clip(-dy, a.y - window.y0);
        clip(dy, window.y1 - a.y);
        if (keep && t0 < t1) total += graph.seg_length[s] * (t1 - t0);
    }
    return total;
}

std::vector<std::vector<int32_t>> build_adjacency(const NodalGraph& g) {
    std::vector<std::vector<int32_t>> adj(g.vertices.size());
    for (size_t s = 0; s < g.segments.size(); ++s) {
        adj[g.segments[s][0]].push_back(static_cast<int32_t>(s));
        adj[g.segments[s][1]].push_back(static_cast<int32_t>(s));
    }
    return adj;
}

}  // namespace gfp
