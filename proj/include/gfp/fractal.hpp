#ifndef GFP_FRACTAL_HPP
#define GFP_FRACTAL_HPP

#include <string>
#include <vector>

#include "gfp/geom.hpp"

namespace gfp {

// Renormalization triplet (m, gamma, s): s > 1 and
// 1 <= m < gamma < gamma^s < sqrt(m(m+1)).
struct RenormTriplet {
    int m = 1;
    double gamma = 1.2;
    double s = 1.05;

    double eps() const { return gamma / m - 1.0; }
    double beta() const { return std::sqrt(static_cast<double>(m) * (m + 1)); }
};

struct TripletCheck {
    bool ok = false;
    std::string diagnostics;
};
TripletCheck validate_triplet(int m, double gamma, double s);
RenormTriplet make_triplet(int m, double gamma, double s);  // throws ConfigError when invalid

// Scales L_k = lambda / gamma^k for k = 0..k_max, k_max maximal with
// eps * L_k >= 1 (clamped to 0).
struct Scales {
    std::vector<double> L;
    int k_max = 0;
};
Scales scales(const RenormTriplet& t, double lambda);

// A polyline curve with cached cumulative arc length.
struct Curve {
    std::vector<Vec2> pts;
    std::vector<double> cumlen;

    static Curve from_points(std::vector<Vec2> pts);
    double length() const { return cumlen.empty() ? 0.0 : cumlen.back(); }
    DiameterResult diameter() const { return point_set_diameter(pts); }
    // point at arc-length position l (linear interpolation)
    Vec2 at_arclen(double l) const;
};

// Replace-middle-third construction; bend_angle 60 degrees gives the classic
// curve of length base * (4/3)^depth. Generic angles scale each inserted
// segment to keep endpoints fixed: length factor 2/3 + 1/(3 cos(angle)).
Curve koch_curve(int depth, double bend_angle_deg, double base_length);

struct StraightRunCertificate {
    int scale_index = 0;  // k of L_k
    OrientedRect rect;
};

struct RunDetectionParams {
    double tube_mult = 9.0;    // tube height = tube_mult * L / sqrt(gamma)
    double contact_tol = 0.25; // side-center contact tolerance (grid h scale)
    int n_orientations = 32;
};

// Straight-run certificates of the curve at every scale L_0..L_kmax.
// Candidate rectangles are anchored on curve points (deduplicated on the
// (L_k/gamma) placement lattice) with orientations j*pi/n; a certificate
// requires a connected piece of curve-in-rectangle passing within
// contact_tol of both small-side centers.
std::vector<StraightRunCertificate> detect_straight_runs(const Curve& curve,
                                                         const RenormTriplet& t, double lambda,
                                                         const Rect& window,
                                                         const RunDetectionParams& params = {});

struct SparsityResult {
    bool sparse = true;
    std::vector<int> witness;  // certificate indices of a disqualifying chain
};
// (gamma, k0)-sparsity: no nested chain at scales 1 <= k_1 < ... < k_n <= k_max
// with n >= max(k_n, k0)/2. Nesting is rectangle containment.
SparsityResult is_sparse(const std::vector<StraightRunCertificate>& runs, const RenormTriplet& t,
                         int k0, double lambda, const Rect& window);
// Smallest k0 for which the runs are sparse.
int min_sparse_k0(const std::vector<StraightRunCertificate>& runs, const RenormTriplet& t,
                  double lambda, const Rect& window);

// Hierarchical decomposition of a curve (Gamma_0..Gamma_kmax).
struct HierarchyNode {
    int level = 0;
    int parent = -1;
    std::vector<int> children;
    std::vector<Vec2> pts;  // the sub-curve polyline
    double arc_lo = 0.0, arc_hi = 0.0;  // arc-length interval in the root curve
    double diam = 0.0;
    Vec2 diam_p, diam_q;
    bool has_run = false;  // straight run at this node's scale L_level
};

struct CurveHierarchy {
    RenormTriplet triplet;
    double lambda = 0.0;
    Scales scale;
    std::vector<HierarchyNode> nodes;          // nodes[0] is the root
    std::vector<std::vector<int>> levels;      // node ids per level

    int n_children(int node) const { return static_cast<int>(nodes[node].children.size()); }
    const std::vector<int>& leaves() const { return levels.back(); }
};

// Builds the hierarchy and re-verifies its postconditions: per-level diameters
// >= L_k, pairwise distance >= eps*L_k within a level, nesting, child counts
// (>= m, and >= m+1 for run-free nodes), single root. A violation throws
// DecompositionError naming the offending node.
CurveHierarchy decompose(const Curve& curve, const RenormTriplet& t, double lambda,
                         const RunDetectionParams& params = {});

// Independent re-verification pass; returns human-readable violations
// (empty when the hierarchy satisfies every postcondition).
std::vector<std::string> verify_hierarchy(const CurveHierarchy& h,
                                          const RunDetectionParams& params = {});

// Atomic measure on leaf representative points: mass(leaf) = prod 1/n_i
// along its ancestry, atom at the leftmost-uppermost leaf point.
struct AtomicMeasure {
    std::vector<Vec2> atoms;
    std::vector<double> mass;
};
AtomicMeasure build_measure(const CurveHierarchy& h);

// E_s(mu) = lambda^s * sum_ij m_i m_j / max(d_ij^s, 1), exact pairwise sum.
double energy(const AtomicMeasure& mu, double s, double lambda);

// length(C) >= lambda^s / E - 2^s
double length_lower_bound(double energy_value, double s, double lambda);

// Energy bound of the low-energy measure under (gamma,k0)-sparsity:
// (1/eps^s) (gamma^{s(k0+1)} + beta/(1 - gamma^s/beta)).
double sparse_energy_bound(const RenormTriplet& t, int k0);

// E_s(mu) * sum_i diam(C_i)^s / lambda^s  (>= 1 for any disjoint cover with
// part diameters >= 1). Parts are point sets; atoms are matched to parts.
double partition_energy_check(const std::vector<std::vector<Vec2>>& parts, const AtomicMeasure& mu,
                              double s, double lambda);

// Exit-time partition of a curve into parts of chord diameter 1 (last part
// in [1,2)).
struct CurvePart {
    std::vector<Vec2> pts;
    double diam = 0.0;
};
std::vector<CurvePart> unit_diameter_partition(const Curve& curve);

// Claim check: prod_{i<k} n_i(leaf) >= beta^k for every leaf and every
// k0 <= k <= k_max.
bool claim1_check(const CurveHierarchy& h, int k0);

// Root of ln(2) + 4 ln(gamma) + 1 - sqrt(gamma)/160 = 0 by bisection, and the
// implied well-separated rectangle count M = sqrt(gamma)/80 - 2.
struct SparsityConstants {
    double gamma_star = 0.0;
    double M = 0.0;
};
SparsityConstants min_gamma_for_sparsity_bound();

// Hierarchy exports: indented text and CSV (node id, parent, level, diameter,
// n_children, run flag).
std::string hierarchy_to_text(const CurveHierarchy& h);
std::string hierarchy_to_csv(const CurveHierarchy& h);
std::string certificates_to_csv(const std::vector<StraightRunCertificate>& runs);

}  // namespace gfp

#endif
