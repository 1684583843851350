#include <doctest.h>

#include <cmath>

#include "gfp/errors.hpp"
#include "gfp/harness.hpp"
#include "gfp/rng.hpp"

using namespace gfp;

TEST_CASE("config parsing and validation") {
    ExperimentConfig cfg = config_from_json(R"({
        "kernel": "BargmannFock", "h": 0.25, "lambdas": [16, 32],
        "replicas": 10, "seed": 7, "threads": 2,
        "analyses": ["crossing", "one-arm"],
        "triplet": {"m": 1, "gamma": 1.2, "s": 1.05}, "k0": 2
    })");
    CHECK(cfg.kernel_name == "BargmannFock");
    CHECK(cfg.lambdas.size() == 2);
    CHECK(cfg.replicas == 10);
    CHECK(cfg.do_crossing);
    CHECK(cfg.do_one_arm);
    CHECK(!cfg.do_fractal);
    cfg.validate();

    ExperimentConfig bad = cfg;
    bad.replicas = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.triplet_gamma = 1.5;
    bad.triplet_s = 1.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    try {
        bad.validate();
    } catch (const ConfigError& e) {
        // diagnostics name the violated inequality
        CHECK(std::string(e.what()).find("sqrt(m(m+1))") != std::string::npos);
    }
    bad = cfg;
    bad.lambdas = {4.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"set": "sideways"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"analyses": ["nope"]})"), ConfigError);
}

TEST_CASE("exact power law fits") {
    std::vector<FitPoint> pts;
    for (double lam : {16.0, 32.0, 64.0}) pts.push_back({lam, 7.0 * std::pow(lam, 1.5), 0.0});
    ExponentFit f = fit_exponent(pts);
    CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(f.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-9));

    std::vector<FitPoint> flat;
    for (double lam : {16.0, 32.0, 64.0}) flat.push_back({lam, 3.3, 0.0});
    CHECK(std::abs(fit_exponent(flat).slope) < 1e-9);

    CHECK_THROWS_AS(fit_exponent({{1, 1, 0}, {2, 2, 0}}), UsageError);
}

TEST_CASE("bootstrap confidence interval covers a noisy power law") {
    // slope 1.3, 5% multiplicative noise, 500 replicas per lambda;
    // the 95% CI should contain the true slope in nearly all meta-trials
    std::vector<double> xs{16, 32, 64};
    int covered = 0;
    const int meta = 100;
    for (int trial = 0; trial < meta; ++trial) {
        std::vector<std::vector<double>> samples(xs.size());
        uint64_t key = replica_key(9000, trial);
        for (size_t i = 0; i < xs.size(); ++i)
            for (int r = 0; r < 500; ++r) {
                double u1, u2;
                Philox::uniform2(key, i, r, u1, u2);
                double noise = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307 * u2);
                samples[i].push_back(std::pow(xs[i], 1.3) * (1.0 + 0.05 * noise));
            }
        ExponentFit f = fit_exponent_bootstrap(xs, samples, 1000, replica_key(17, trial));
        if (f.ci_lo <= 1.3 && 1.3 <= f.ci_hi) ++covered;
    }
    CHECK(covered >= 93);
}

TEST_CASE("crossing run is deterministic and independent of threads") {
    ExperimentConfig cfg;
    cfg.lambdas = {12.0};
    cfg.replicas = 12;
    cfg.master_seed = 5;
    cfg.do_crossing = true;
    cfg.threads = 1;
    CrossingRun a = run_crossing(cfg);
    CrossingRun b = run_crossing(cfg);
    CHECK(a.csv == b.csv);
    cfg.threads = 3;
    CrossingRun c = run_crossing(cfg);
    CHECK(a.csv == c.csv);
    CHECK(a.csv.rfind("seed,lambda,kernel,crossed_excursion,crossed_nodal\n", 0) == 0);
    CHECK(a.nodal_implies_excursion_violations == 0);
}

TEST_CASE("joint rectangle layout is well separated with 2:1 aspects") {
    std::vector<Rect> rects = joint_rect_layout({8, 12, 16});
    REQUIRE(rects.size() == 3);
    CHECK(well_separated(rects));
    for (size_t i = 0; i < rects.size(); ++i) {
        CHECK(rects[i].width() == doctest::Approx(2.0 * rects[i].height()));
    }
}

TEST_CASE("one-arm run produces monotone estimates") {
    ExperimentConfig cfg;
    cfg.replicas = 60;
    cfg.master_seed = 21;
    cfg.arm_pairs = {{1, 8}, {1, 16}};
    OneArmRun r = run_one_arm(cfg);
    CHECK(r.pi_hat(0) >= r.pi_hat(1));  // nested events
    CHECK(r.pi_hat(0) > 0.0);
    CHECK(r.pi_hat(0) <= 1.0);
}

TEST_CASE("shortest run collects conditioned lengths") {
    ExperimentConfig cfg;
    cfg.lambdas = {16.0};
    cfg.replicas = 30;
    cfg.master_seed = 31;
    ShortestRun r = run_shortest(cfg);
    REQUIRE(r.lengths.size() == 1);
    CHECK(r.denominators[0] == 30);
    for (double s : r.lengths[0]) CHECK(s >= 16.0 - 1e-9);
    for (double nb : r.n_boxes[0]) CHECK(nb >= 16.0 - 1e-9);  // boxes >= lambda on a crossing
}

TEST_CASE("fractal run verifies hierarchies on sampled curves") {
    ExperimentConfig cfg;
    cfg.master_seed = 77;
    FractalRun r = run_fractal(cfg, 32.0, 5);
    CHECK(r.replicas.size() >= 1);
    for (const auto& rep : r.replicas) {
        CHECK(rep.hierarchy_ok);
        CHECK(rep.length_bound_ok);
        CHECK(rep.claim1_ok);
        CHECK(rep.energy_bound_ok);
        CHECK(rep.curve_diameter >= 32.0 - 0.5);
    }
}

TEST_CASE("full run writes csv and summary") {
    ExperimentConfig cfg;
    cfg.lambdas = {12.0};
    cfg.replicas = 6;
    cfg.master_seed = 3;
    cfg.do_crossing = true;
    cfg.out_dir = "/tmp/gfp_test_run";
    std::string summary = run(cfg);
    CHECK(summary.find("\"crossing\"") != std::string::npos);
    std::FILE* fp = std::fopen("/tmp/gfp_test_run/crossing.csv", "rb");
    REQUIRE(fp);
    std::fclose(fp);
    fp = std::fopen("/tmp/gfp_test_run/summary.json", "rb");
    REQUIRE(fp);
    std::fclose(fp);
}

TEST_CASE("chemical run pools unit boxes") {
    ExperimentConfig cfg;
    cfg.master_seed = 41;
    cfg.chem_boxes = 64;
    cfg.set_kind = SetKind::Nodal;
    ChemicalRun r = run_chemical(cfg);
    CHECK(static_cast<int>(r.S_values.size()) == 64);
    double m = 0.0;
    for (double s : r.S_values) {
        CHECK(s >= 0.0);
        m += s;
    }
    CHECK(m / r.S_values.size() > 0.1);  // nodal lines are present in most boxes
}
