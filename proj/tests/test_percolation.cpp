#include <doctest.h>

#include <cmath>
#include <functional>

#include "gfp/errors.hpp"
#include "gfp/percolation.hpp"
#include "gfp/rng.hpp"
#include "gfp/sampler.hpp"

using namespace gfp;

namespace {

FieldGrid make_field(double w, double ht, double h, const std::function<double(double, double)>& fn) {
    FieldGrid f;
    f.origin = {0, 0};
    f.h = h;
    f.nx = static_cast<int>(std::lround(w / h)) + 1;
    f.ny = static_cast<int>(std::lround(ht / h)) + 1;
    f.kernel_id = "synthetic";
    f.values.resize(static_cast<size_t>(f.nx) * f.ny);
    for (int iy = 0; iy < f.ny; ++iy)
        for (int ix = 0; ix < f.nx; ++ix)
            f.values[static_cast<size_t>(iy) * f.nx + ix] = fn(ix * h, iy * h);
    return f;
}

}  // namespace

TEST_CASE("full mask crosses in every direction") {
    FieldGrid f = make_field(8, 4, 0.25, [](double, double) { return 1.0; });
    ExcursionMask m = excursion_mask(f, 0.0);
    CHECK(crosses(m, {{0, 0, 8, 4}, SetKind::Excursion, CrossDirection::Length}));
    CHECK(crosses(m, {{0, 0, 8, 4}, SetKind::Excursion, CrossDirection::Horizontal}));
    CHECK(crosses(m, {{0, 0, 8, 4}, SetKind::Excursion, CrossDirection::Vertical}));
    CHECK(crosses(m, {{1, 1, 5, 3}, SetKind::Excursion, CrossDirection::Horizontal}));
}

TEST_CASE("crossing query validation") {
    FieldGrid f = make_field(8, 8, 0.25, [](double, double) { return 1.0; });
    ExcursionMask m = excursion_mask(f, 0.0);
    CHECK_THROWS_AS(crosses(m, {{0, 0, 8, 8}, SetKind::Excursion, CrossDirection::Length}),
                    UsageError);
    CHECK_THROWS_AS(crosses(m, {{0, 0, 9, 4}, SetKind::Excursion, CrossDirection::Length}),
                    UsageError);
}

TEST_CASE("linear field: nodal line crosses horizontally only") {
    FieldGrid f = make_field(8, 4, 0.25, [](double, double y) { return y - 2.1; });
    NodalGraph g = nodal_graph(f, 0.0);
    CHECK(crosses(g, {{0, 0, 8, 4}, SetKind::Nodal, CrossDirection::Horizontal}));
    CHECK(!crosses(g, {{0, 0, 8, 4}, SetKind::Nodal, CrossDirection::Vertical}));
    CHECK(crosses(g, {{0, 0, 8, 4}, SetKind::Nodal, CrossDirection::Length}));
}

TEST_CASE("shortest crossing of a straight nodal line is the rect width") {
    FieldGrid f = make_field(8, 4, 0.25, [](double, double y) { return y - 2.1; });
    NodalGraph g = nodal_graph(f, 0.0);
    auto s = shortest_crossing(g, {{1, 0, 6, 4}, SetKind::Nodal, CrossDirection::Horizontal});
    REQUIRE(s.has_value());
    CHECK(*s == doctest::Approx(5.0).epsilon(1e-6 / 5.0));
    auto none = shortest_crossing(g, {{1, 0, 6, 4}, SetKind::Nodal, CrossDirection::Vertical});
    CHECK(!none.has_value());
}

TEST_CASE("shortest crossing on the full mask has bounded metrication error") {
    FieldGrid f = make_field(12, 4, 0.25, [](double, double) { return 1.0; });
    ExcursionMask m = excursion_mask(f, 0.0);
    CrossingQuery q{{0, 0, 12, 4}, SetKind::Excursion, CrossDirection::Length};
    auto s = shortest_crossing(m, q);
    REQUIRE(s.has_value());
    CHECK(*s >= 12.0 - 1e-9);
    CHECK(*s <= 12.0 * 1.028);
}

TEST_CASE("one_arm basics") {
    FieldGrid full = make_field(16, 16, 0.25, [](double, double) { return 1.0; });
    ExcursionMask m = excursion_mask(full, 0.0);
    CHECK(one_arm(m, {{8, 8}, 1.0, 2.0}));
    CHECK(one_arm(m, {{8, 8}, 1.0, 15.9}));
    FieldGrid neg = make_field(16, 16, 0.25, [](double, double) { return -1.0; });
    ExcursionMask e = excursion_mask(neg, 0.0);
    CHECK(!one_arm(e, {{8, 8}, 1.0, 8.0}));
    CHECK_THROWS_AS(one_arm(m, {{8, 8}, 4.0, 2.0}), UsageError);
    CHECK_THROWS_AS(one_arm(m, {{8, 8}, 0.5, 2.0}), UsageError);
}

TEST_CASE("one_arm is monotone in t on sampled fields") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    for (int r = 0; r < 20; ++r) {
        FieldGrid f = sample_field(k, {-16, -16, 16, 16}, 0.25, replica_key(41, r));
        ExcursionMask m = excursion_mask(f, 0.0);
        bool prev = true;
        for (double t : {8.0, 16.0, 32.0}) {
            bool arm = one_arm(m, {{0, 0}, 1.0, t});
            if (!prev) CHECK(!arm);  // arm at larger t implies arm at smaller t
            prev = arm;
        }
    }
}

TEST_CASE("nodal crossing implies excursion crossing on every replica") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    Rect win{0, 0, 24, 24};
    for (int r = 0; r < 100; ++r) {
        FieldGrid f = sample_field(k, win, 0.25, replica_key(43, r));
        NodalGraph g = nodal_graph(f, 0.0);
        if (crosses(g, {win, SetKind::Nodal, CrossDirection::Horizontal})) {
            ExcursionMask m = excursion_mask(f, 0.0);
            CHECK(crosses(m, {win, SetKind::Excursion, CrossDirection::Horizontal}));
        }
    }
}

TEST_CASE("shortest crossing dominates the rect length") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    Rect win{0, 0, 16, 16};
    CrossingQuery q{win, SetKind::Excursion, CrossDirection::Horizontal};
    for (int r = 0; r < 40; ++r) {
        FieldGrid f = sample_field(k, win, 0.25, replica_key(47, r));
        ExcursionMask m = excursion_mask(f, 0.0);
        auto s = shortest_crossing(m, q);
        if (s) CHECK(*s >= 16.0 - 1e-9);
        NodalGraph g = nodal_graph(f, 0.0);
        auto sn = shortest_crossing(g, {win, SetKind::Nodal, CrossDirection::Horizontal});
        if (sn) CHECK(*sn >= 16.0 - 1e-9);
    }
}

TEST_CASE("crossing probability is symmetric under direction and sign") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    Rect win{0, 0, 16, 16};
    int n = 400;
    int ch = 0, cv = 0, cneg = 0;
    for (int r = 0; r < n; ++r) {
        FieldGrid f = sample_field(k, win, 0.25, replica_key(53, r));
        ExcursionMask m = excursion_mask(f, 0.0);
        ch += crosses(m, {win, SetKind::Excursion, CrossDirection::Horizontal});
        cv += crosses(m, {win, SetKind::Excursion, CrossDirection::Vertical});
        FieldGrid neg = f;
        for (double& v : neg.values) v = -v;
        ExcursionMask mn = excursion_mask(neg, 0.0);
        cneg += crosses(mn, {win, SetKind::Excursion, CrossDirection::Horizontal});
    }
    double se = std::sqrt(0.25 / n);
    CHECK(std::abs(ch - cv) / static_cast<double>(n) < 4 * se);
    CHECK(std::abs(ch - cneg) / static_cast<double>(n) < 4 * se);
    CHECK(std::abs(static_cast<double>(ch) / n - 0.5) < 0.08);
}

TEST_CASE("chemical quantities on synthetic graphs") {
    // empty intersection
    FieldGrid pos = make_field(4, 4, 0.25, [](double, double) { return 1.0; });
    NodalGraph g0 = nodal_graph(pos, 0.0);
    ChemicalResult r0 = chemical_quantities(g0, {1, 1, 2, 2});
    CHECK(r0.total == 0.0);
    CHECK(r0.diameters.empty());

    // one straight segment of length 0.7 inside the box
    NodalGraph g;
    g.origin = {0, 0};
    g.h = 0.25;
    g.nx = g.ny = 17;
    g.vertices = {{1.2, 1.5}, {1.55, 1.5}, {1.9, 1.5}};
    g.segments = {{0, 1}, {1, 2}};
    g.seg_length = {0.35, 0.35};
    ChemicalResult r1 = chemical_quantities(g, {1, 1, 2, 2});
    REQUIRE(r1.diameters.size() == 1);
    CHECK(r1.total == doctest::Approx(0.7).epsilon(0.25 / 0.7));

    CHECK_THROWS_AS(chemical_quantities(g, {1, 1, 3, 2}), UsageError);
}

TEST_CASE("chemical quantities on a mask component") {
    FieldGrid f = make_field(4, 4, 0.125, [](double, double y) {
        return 0.25 - std::abs(y - 2.0);  // positive band along y = 2
    });
    ExcursionMask m = excursion_mask(f, 0.0);
    ChemicalResult r = chemical_quantities(m, {1.5, 1.5, 2.5, 2.5});
    REQUIRE(r.diameters.size() == 1);
    // farthest pair: opposite band corners, a straight in-band path
    double oracle = std::hypot(1.0, 0.5);
    CHECK(r.total >= oracle - 0.13);  // grid quantization of the corner positions
    CHECK(r.total <= oracle * 1.028 + 1e-9);
}

TEST_CASE("well-separated rectangles") {
    Rect a{0, 0, 2, 1};
    Rect b{4.3, 0, 6.3, 1};  // gap 2.3 >= diam sqrt(5) ~ 2.236
    CHECK(well_separated({a, b}));
    Rect c{2.5, 0, 4.5, 1};  // gap 0.5 < diam
    CHECK(!well_separated({a, c}));
    CHECK(well_separated({a}));
    CHECK(well_separated({}));
}

TEST_CASE("joint crossings validation and empty collection") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    std::vector<ExcursionMask> masks;
    for (int r = 0; r < 10; ++r) {
        FieldGrid f = sample_field(k, {0, 0, 10, 10}, 0.25, replica_key(59, r));
        masks.push_back(excursion_mask(f, 0.0));
    }
    JointCrossingEstimate empty = joint_crossings(masks, {});
    CHECK(empty.p_hat == 1.0);

    CHECK_THROWS_AS(joint_crossings(masks, {{0, 0, 3, 1}}), UsageError);  // not 2:1
    std::vector<Rect> close{{0, 0, 2, 1}, {2.5, 0, 6.5, 2}};
    CHECK_THROWS_AS(joint_crossings(masks, close), UsageError);  // not separated
    std::vector<Rect> dec{{0, 0, 8, 4}, {30, 0, 34, 2}};
    CHECK_THROWS_AS(joint_crossings(masks, dec), UsageError);  // decreasing

    JointCrossingEstimate one = joint_crossings(masks, {{1, 4, 9, 8}});
    CHECK(one.n_replicas == 10);
    CHECK(one.p_hat >= 0.0);
    CHECK(one.p_hat <= 1.0);
}

TEST_CASE("crossing component boxes") {
    FieldGrid full = make_field(8, 8, 0.25, [](double, double) { return 1.0; });
    ExcursionMask m = excursion_mask(full, 0.0);
    CrossingQuery q{{0, 0, 8, 8}, SetKind::Excursion, CrossDirection::Horizontal};
    CHECK(crossing_component_boxes(m, q) == 64);
    FieldGrid neg = make_field(8, 8, 0.25, [](double, double) { return -1.0; });
    ExcursionMask e = excursion_mask(neg, 0.0);
    CHECK(crossing_component_boxes(e, q) == 0);

    // a single horizontal nodal line touches one row of boxes
    FieldGrid lin = make_field(8, 8, 0.25, [](double, double y) { return y - 4.1; });
    NodalGraph g = nodal_graph(lin, 0.0);
    CHECK(crossing_component_boxes(g, {{0, 0, 8, 8}, SetKind::Nodal, CrossDirection::Horizontal}) ==
          8);
}
