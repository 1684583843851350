#ifndef GFP_LEVELSET_HPP
#define GFP_LEVELSET_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "gfp/geom.hpp"
#include "gfp/sampler.hpp"

namespace gfp {

// Binary mask of the excursion set {f >= -level} on the field's vertex grid,
// with component labels. The excursion phase is labeled under 4-connectivity
// and its complement under 8-connectivity. `cell_diag` records, for each grid
// cell whose corners alternate in phase (a saddle cell), which diagonal of
// true vertices the cell-center value connects; `labels_topo` is the
// excursion labeling augmented with those diagonal links, which matches the
// topology of the bilinear interpolation.
struct ExcursionMask {
    Vec2 origin;
    double h = 0.25;
    int nx = 0, ny = 0;
    std::vector<uint8_t> bits;        // 1 where f >= -level
    std::vector<int32_t> labels;      // true vertices: 4-conn component id, else -1
    std::vector<int32_t> labels_co;   // false vertices: 8-conn component id, else -1
    std::vector<int32_t> labels_topo; // 4-conn + saddle diagonal links
    int n_components = 0;             // excursion components (4-conn)
    std::vector<uint8_t> cell_diag;   // per cell: 0 none, 1 SW-NE linked, 2 NW-SE linked

    bool bit(int ix, int iy) const { return bits[static_cast<size_t>(iy) * nx + ix] != 0; }
    size_t idx(int ix, int iy) const { return static_cast<size_t>(iy) * nx + ix; }
    Vec2 point(int ix, int iy) const { return {origin.x + ix * h, origin.y + iy * h}; }
    Rect window() const { return {origin.x, origin.y, origin.x + (nx - 1) * h, origin.y + (ny - 1) * h}; }
};

// Polyline graph of the nodal set {f = -level}, extracted by marching squares
// with linear interpolation. Vertices sit on grid cell edges and are shared
// between the two cells incident to the edge.
struct NodalGraph {
    Vec2 origin;
    double h = 0.25;
    int nx = 0, ny = 0;
    std::vector<Vec2> vertices;
    std::vector<std::array<int32_t, 2>> segments;
    std::vector<double> seg_length;
    std::vector<int32_t> vertex_component;
    std::vector<int32_t> vertex_degree;
    int n_components = 0;

    Rect window() const { return {origin.x, origin.y, origin.x + (nx - 1) * h, origin.y + (ny - 1) * h}; }
    double total_length() const;
};

ExcursionMask excursion_mask(const FieldGrid& field, double level);
NodalGraph nodal_graph(const FieldGrid& field, double level);

// Sum of segment lengths clipped to `window`.
double total_nodal_length(const NodalGraph& graph, const Rect& window);

// Standalone 4-connectivity labeling of a bit mask (ids into out_labels,
// -1 on false vertices); returns the component count.
int label_components_4(const std::vector<uint8_t>& bits, int nx, int ny,
                       std::vector<int32_t>& out_labels);

// Adjacency: vertex id -> incident segment ids (built on demand).
std::vector<std::vector<int32_t>> build_adjacency(const NodalGraph& g);

}  // namespace gfp

#endif
