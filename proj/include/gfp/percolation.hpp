#ifndef GFP_PERCOLATION_HPP
#define GFP_PERCOLATION_HPP

#include <optional>
#include <vector>

#include "gfp/geom.hpp"
#include "gfp/levelset.hpp"

namespace gfp {

enum class SetKind { Excursion, Nodal };
enum class CrossDirection { Length, Horizontal, Vertical };

// Connectivity used for excursion clusters. FourConn is the plain site
// convention (4-connectivity for the excursion phase, 8 for its complement).
// Topological adds the saddle-cell diagonal links resolved by the cell center
// value, which reproduces the connectivity of the bilinear interpolation and
// makes a nodal crossing imply an excursion crossing cell by cell.
enum class MaskConnectivity { FourConn, Topological };

struct CrossingQuery {
    Rect rect;
    SetKind set_kind = SetKind::Excursion;
    CrossDirection direction = CrossDirection::Length;
};

struct ArmQuery {
    Vec2 center;
    double s = 1.0;  // inner box side
    double t = 8.0;  // outer box side
};

bool crosses(const ExcursionMask& mask, const CrossingQuery& q,
             MaskConnectivity conn = MaskConnectivity::Topological);
bool crosses(const NodalGraph& graph, const CrossingQuery& q);

bool one_arm(const ExcursionMask& mask, const ArmQuery& q,
             MaskConnectivity conn = MaskConnectivity::Topological);
bool one_arm(const NodalGraph& graph, const ArmQuery& q);

// Shortest crossing length; absent iff crosses() is false. Excursion paths
// run on the vertex grid with a 16-neighborhood (king + knight moves,
// Euclidean weights, <= 2.8% metrication overestimate); nodal paths are exact
// shortest paths on the clipped polyline graph between side-contact vertices.
std::optional<double> shortest_crossing(const ExcursionMask& mask, const CrossingQuery& q,
                                        MaskConnectivity conn = MaskConnectivity::Topological);
std::optional<double> shortest_crossing(const NodalGraph& graph, const CrossingQuery& q);

// The vertex sequence of a shortest nodal crossing path (for curve analysis).
std::optional<std::vector<Vec2>> shortest_crossing_path(const NodalGraph& graph,
                                                        const CrossingQuery& q);

// Chemical diameters of the components of the set clipped to a unit box,
// estimated by a double-sweep farthest-point search (exact on trees, a lower
// bound in general), and their sum S.
struct ChemicalResult {
    std::vector<double> diameters;
    double total = 0.0;  // S(A, B)
};
ChemicalResult chemical_quantities(const NodalGraph& graph, const Rect& unit_box);
ChemicalResult chemical_quantities(const ExcursionMask& mask, const Rect& unit_box,
                                   MaskConnectivity conn = MaskConnectivity::Topological);

// d(A_i, union of the others) >= diam(A_i) for every i.
bool well_separated(const std::vector<Rect>& rects);

// Fraction of masks crossing every rectangle in the length direction.
struct JointCrossingEstimate {
    double p_hat = 0.0;
    double std_error = 0.0;
    int n_hits = 0;
    int n_replicas = 0;
};
JointCrossingEstimate joint_crossings(const std::vector<ExcursionMask>& masks,
                                      const std::vector<Rect>& rects,
                                      MaskConnectivity conn = MaskConnectivity::Topological);

// Number of unit boxes (1x1 tiling of q.rect) touched by components that
// realize the crossing.
int crossing_component_boxes(const ExcursionMask& mask, const CrossingQuery& q,
                             MaskConnectivity conn = MaskConnectivity::Topological);
int crossing_component_boxes(const NodalGraph& graph, const CrossingQuery& q);

}  // namespace gfp

#endif
