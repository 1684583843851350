// Acceptance suite: runs every verification target at its stated tolerance
// and prints one PASS/FAIL line per criterion.
//
//   ./acceptance            run everything
//   ./acceptance --only 7   run a single criterion

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "gfp/fit.hpp"
#include "gfp/fractal.hpp"
#include "gfp/harness.hpp"
#include "gfp/kernels.hpp"
#include "gfp/levelset.hpp"
#include "gfp/percolation.hpp"
#include "gfp/rng.hpp"
#include "gfp/sampler.hpp"

using namespace gfp;

namespace {

char g_detail[1024];

#define DETAIL(...) std::snprintf(g_detail, sizeof g_detail, __VA_ARGS__)

// 1. (q*q)(r) matches kappa(r) for BargmannFock within 5e-3 on [0, 5].
bool criterion_1() {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    const double step = 0.05;
    const int n = static_cast<int>((k.truncation_radius() + 5.0 + step) / step);
    std::vector<std::vector<double>> q(2 * n + 1, std::vector<double>(2 * n + 1));
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j) q[i + n][j + n] = k.q_of(std::hypot(i * step, j * step));
    double max_err = 0.0;
    for (int shift = 0; shift <= 100; ++shift) {
        double acc = 0.0;
        for (int i = -n; i <= n; ++i) {
            if (i + shift > n) continue;
            for (int j = -n; j <= n; ++j) acc += q[i + n][j + n] * q[i + shift + n][j + n];
        }
        max_err = std::max(max_err, std::abs(acc * step * step - k.kappa(shift * step)));
    }
    DETAIL("max |q*q - kappa| = %.2e on r in [0,5] (tol 5e-3)", max_err);
    return max_err < 5e-3;
}

// 2. Pooled empirical covariance at lags {0, 1, 2}.
bool criterion_2() {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    const int replicas = 800;  // spec floor is 200; the budget allows more
    double win = 127 * 0.25;   // 128^2 vertices
    std::vector<FieldGrid> fields;
    fields.reserve(replicas);
    for (int r = 0; r < replicas; ++r)
        fields.push_back(sample_field(k, {0, 0, win, win}, 0.25, replica_key(1001, r)));
    double c0 = empirical_covariance(fields, 0, 0);
    double c1 = empirical_covariance(fields, 4, 0);
    double c2 = empirical_covariance(fields, 8, 0);
    double e0 = std::abs(c0 - 1.0), e1 = std::abs(c1 - 0.60653066), e2 = std::abs(c2 - 0.13533528);
    DETAIL("cov = {%.4f, %.4f, %.4f} vs {1, 0.6065, 0.1353}, max err %.4f (tol 0.01), %d replicas",
           c0, c1, c2, std::max({e0, e1, e2}), replicas);
    return e0 < 0.01 && e1 < 0.01 && e2 < 0.01;
}

struct CrossingStats {
    double p32 = 0, p64 = 0;
    long violations = 0;
};
CrossingStats g_crossing;
bool g_crossing_done = false;

void run_criterion_3_4() {
    if (g_crossing_done) return;
    ExperimentConfig cfg;
    cfg.lambdas = {32.0, 64.0};
    cfg.replicas = 4000;
    cfg.master_seed = 1003;
    CrossingRun r = run_crossing(cfg);
    g_crossing.p32 = r.fraction(0);
    g_crossing.p64 = r.fraction(1);
    g_crossing.violations = r.nodal_implies_excursion_violations;
    g_crossing_done = true;
}

// 3. Square-crossing probability one half.
bool criterion_3() {
    run_criterion_3_4();
    DETAIL("P(cross) = %.4f (lambda 32), %.4f (lambda 64); 4000 replicas each (tol 0.02)",
           g_crossing.p32, g_crossing.p64);
    return std::abs(g_crossing.p32 - 0.5) < 0.02 && std::abs(g_crossing.p64 - 0.5) < 0.02;
}

// 4. Nodal crossing implies excursion crossing on every replica.
bool criterion_4() {
    run_criterion_3_4();
    DETAIL("%ld violations in 8000 replicas (required: 0)", g_crossing.violations);
    return g_crossing.violations == 0;
}

// 5. Nodal length per unit area at h = 0.125.
bool criterion_5() {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    double len = 0.0, area = 0.0;
    const int windows = 50;
    for (int r = 0; r < windows; ++r) {
        FieldGrid f = sample_field(k, {0, 0, 64, 64}, 0.125, replica_key(1005, r));
        NodalGraph g = nodal_graph(f, 0.0);
        len += g.total_length();
        area += 64.0 * 64.0;
    }
    double density = len / area;
    DETAIL("nodal length density %.4f over %d windows of area 64^2 (target 0.500 +- 0.010)",
           density, windows);
    return std::abs(density - 0.5) < 0.010;
}

struct ArmStats {
    double slope = 0, se = 0, ci_lo = 0, ci_hi = 0;
    std::vector<double> pi, pi_se;
    bool monotone = true;
};
ArmStats g_arm;
bool g_arm_done = false;

void run_criterion_6() {
    if (g_arm_done) return;
    ExperimentConfig cfg;
    cfg.replicas = 4000;
    cfg.master_seed = 1006;
    cfg.arm_pairs = {{1, 8}, {1, 16}, {1, 32}, {1, 64}};
    OneArmRun r = run_one_arm(cfg);
    std::vector<double> ts;
    std::vector<std::vector<double>> samples;
    for (size_t i = 0; i < r.pairs.size(); ++i) {
        g_arm.pi.push_back(r.pi_hat(i));
        g_arm.pi_se.push_back(r.std_err(i));
        ts.push_back(r.pairs[i].second);
        samples.emplace_back(r.flags[i].begin(), r.flags[i].end());
        if (i > 0) {
            double se2 = std::sqrt(r.std_err(i) * r.std_err(i) +
                                   r.std_err(i - 1) * r.std_err(i - 1));
            if (r.pi_hat(i) > r.pi_hat(i - 1) + 2 * se2) g_arm.monotone = false;
        }
    }
    ExponentFit fit = fit_exponent_bootstrap(ts, samples, 2000, 1106);
    g_arm.slope = fit.slope;
    g_arm.se = fit.slope_se;
    g_arm.ci_lo = fit.ci_lo;
    g_arm.ci_hi = fit.ci_hi;
    g_arm_done = true;
}

// 6. One-arm decay: negative fitted slope, CI excluding 0, monotone pi-hat.
bool criterion_6() {
    run_criterion_6();
    DETAIL("pi = {%.3f, %.3f, %.3f, %.3f}; slope %.4f, 95%% CI [%.4f, %.4f]; monotone %d",
           g_arm.pi[0], g_arm.pi[1], g_arm.pi[2], g_arm.pi[3], g_arm.slope, g_arm.ci_lo,
           g_arm.ci_hi, g_arm.monotone ? 1 : 0);
    return g_arm.slope < 0 && g_arm.ci_hi < 0 && g_arm.monotone;
}

struct ShortestStats {
    double slope = 0, se = 0;
    double box_slope = 0, box_se = 0;
    int min_crossings = 0;
};
ShortestStats g_shortest;
bool g_shortest_done = false;

void run_criterion_7_8() {
    if (g_shortest_done) return;
    ExperimentConfig cfg;
    cfg.lambdas = {16.0, 32.0, 64.0, 128.0};
    cfg.replicas = 1100;  // ~550 crossings per lambda at P = 1/2
    cfg.master_seed = 1007;
    ShortestRun r = run_shortest(cfg);
    g_shortest.min_crossings = 1 << 30;
    for (auto& v : r.lengths)
        g_shortest.min_crossings = std::min(g_shortest.min_crossings, static_cast<int>(v.size()));
    ExponentFit fit = fit_exponent_bootstrap(r.lambdas, r.lengths, 2000, 1107);
    g_shortest.slope = fit.slope;
    g_shortest.se = fit.slope_se;
    ExponentFit bfit = fit_exponent_bootstrap(r.lambdas, r.n_boxes, 2000, 1108);
    g_shortest.box_slope = bfit.slope;
    g_shortest.box_se = bfit.slope_se;
    g_shortest_done = true;
}

// 7. Conditioned shortest-crossing exponent strictly inside (1, 2).
bool criterion_7() {
    run_criterion_7_8();
    double lo_gap = (g_shortest.slope - 1.0) / g_shortest.se;
    double hi_gap = (2.0 - g_shortest.slope) / g_shortest.se;
    DETAIL("s-hat = %.4f +- %.4f; gaps: (s-1)/se = %.1f, (2-s)/se = %.1f (need > 3); >= %d "
           "crossings per lambda (need >= 500)",
           g_shortest.slope, g_shortest.se, lo_gap, hi_gap, g_shortest.min_crossings);
    return g_shortest.slope > 1.0 && g_shortest.slope < 2.0 && lo_gap > 3.0 && hi_gap > 3.0 &&
           g_shortest.min_crossings >= 500;
}

// 8. Box-count exponent bounded by 2 - |arm slope|/2 + 3 SE.
bool criterion_8() {
    run_criterion_6();
    run_criterion_7_8();
    double bound_center = 2.0 - 0.5 * std::abs(g_arm.slope);
    double se = std::sqrt(g_shortest.box_se * g_shortest.box_se + 0.25 * g_arm.se * g_arm.se);
    double bound = bound_center + 3.0 * se;
    DETAIL("box exponent %.4f <= 2 - |%.4f|/2 + 3 SE = %.4f", g_shortest.box_slope, g_arm.slope,
           bound);
    return g_shortest.box_slope <= bound;
}

// 9. Deterministic machinery suite.
bool criterion_9() {
    // triplet chain validation
    if (!validate_triplet(1, 1.2, 1.05).ok) return DETAIL("triplet (1,1.2,1.05) rejected"), false;
    if (validate_triplet(1, 1.5, 1.2).ok) return DETAIL("triplet (1,1.5,1.2) accepted"), false;
    // scales example
    RenormTriplet t = make_triplet(1, 1.2, 1.05);
    if (scales(t, 100.0).k_max != 16) return DETAIL("k_max at lambda=100 is not 16"), false;

    // koch ladder: all five bullets re-verified, masses sum to 1
    for (int depth = 0; depth <= 8; ++depth) {
        double base = std::max(9.0, std::pow(3.0, depth));
        Curve koch = koch_curve(depth, 60, base);
        CurveHierarchy h;
        try {
            h = decompose(koch, t, base);
        } catch (const std::exception& e) {
            return DETAIL("koch depth %d: %s", depth, e.what()), false;
        }
        if (!verify_hierarchy(h).empty()) return DETAIL("koch depth %d bullets", depth), false;
        AtomicMeasure mu = build_measure(h);
        double total = 0.0;
        for (double m : mu.mass) total += m;
        if (std::abs(total - 1.0) > 1e-12) return DETAIL("koch depth %d mass", depth), false;
        double e = energy(mu, t.s, base);
        if (koch.length() < length_lower_bound(e, t.s, base) - 1e-9)
            return DETAIL("koch depth %d length bound", depth), false;
        Rect window{0, -base / 2, base, base / 2};
        auto runs = detect_straight_runs(koch, t, base, window);
        int k0 = min_sparse_k0(runs, t, base, window);
        if (is_sparse(runs, t, k0, base, window).sparse) {
            if (!claim1_check(h, k0)) return DETAIL("koch depth %d claim", depth), false;
            if (e > sparse_energy_bound(t, k0) + 1e-9)
                return DETAIL("koch depth %d energy bound", depth), false;
        }
    }

    // sampled nodal crossing curves at lambda = 64
    ExperimentConfig cfg;
    cfg.master_seed = 1009;
    cfg.k0 = 2;
    FractalRun fr = run_fractal(cfg, 64.0, 100);
    if (static_cast<int>(fr.replicas.size()) < 100)
        return DETAIL("only %zu crossing curves found", fr.replicas.size()), false;
    int sparse_count = 0;
    for (const auto& rep : fr.replicas) {
        if (!rep.hierarchy_ok) return DETAIL("sampled curve bullets (seed %llu)",
                                             (unsigned long long)rep.seed),
                                      false;
        if (!rep.mass_ok) return DETAIL("sampled curve masses"), false;
        if (!rep.length_bound_ok) return DETAIL("sampled curve length bound"), false;
        if (!rep.claim1_ok) return DETAIL("sampled curve claim"), false;
        if (!rep.energy_bound_ok) return DETAIL("sampled curve energy bound"), false;
        sparse_count += rep.sparse_at_k0;
    }

    // partition-energy inequality fuzz
    int fuzz_n = 10000;
    for (int trial = 0; trial < fuzz_n; ++trial) {
        uint64_t key = replica_key(1010, trial);
        AtomicMeasure mu;
        double total = 0.0;
        int n = 3 + static_cast<int>(9 * Philox::u01(Philox::to_u64(trial + 3, 11)));
        for (int i = 0; i < n; ++i) {
            double u1, u2, u3, u4;
            Philox::uniform2(key, 0, i, u1, u2);
            Philox::uniform2(key, 1, i, u3, u4);
            mu.atoms.push_back({15 * u1, 15 * u2});
            mu.mass.push_back(u3 + 0.05);
            total += u3 + 0.05;
        }
        for (double& m : mu.mass) m /= total;
        int n_parts = 1 + trial % 3;
        std::vector<std::vector<Vec2>> parts(n_parts);
        for (int i = 0; i < n; ++i) {
            double u1, u2;
            Philox::uniform2(key, 2, i, u1, u2);
            parts[static_cast<int>(u1 * n_parts)].push_back(mu.atoms[i]);
        }
        for (auto& p : parts) {
            if (p.empty()) p.push_back({0, 0});
            p.push_back(p.front() + Vec2{1.0 + 1e-9, 0.0});
        }
        double v = partition_energy_check(parts, mu, 1.05, 20.0);
        if (v < 1.0 - 1e-9) return DETAIL("partition fuzz trial %d: %.12f", trial, v), false;
    }

    DETAIL("koch depths 0-8, %zu sampled curves (%d sparse at k0=2), %d fuzz cases all verified",
           fr.replicas.size(), sparse_count, fuzz_n);
    return true;
}

// 10. Quasi-independence functional form for joint crossings.
bool criterion_10() {
    ExperimentConfig cfg;
    cfg.replicas = 3000;
    cfg.master_seed = 1011;
    cfg.joint_lengths = {8, 12, 16};
    JointRun r = run_joint(cfg);
    JointCrossingEstimate e1 = r.estimate(1), e2 = r.estimate(2), e3 = r.estimate(3);

    if (e1.p_hat > 0.5 + 3 * e1.std_error) {
        DETAIL("single 2:1 crossing p = %.4f exceeds 1/2 + 3 SE", e1.p_hat);
        return false;
    }
    // slack sums over the rectangle heights l_k, weights k 2^k kappa~(l_k) l_k^4
    CovarianceKernel kern = cfg.kernel();
    auto slack_sum = [&](size_t n) {
        double s = 0.0;
        for (size_t k = 1; k <= n; ++k) {
            double l = cfg.joint_lengths[k - 1] / 2.0;  // height of the 2:1 rect
            s += std::pow(l, 4.0) * kern.kappa_tilde(l) * k * std::pow(2.0, k);
        }
        return s;
    };
    // calibrate C on n = 2, verify the bound on n = 3
    double c2 = std::max(0.0, (4.0 * e2.p_hat - 1.0) / slack_sum(2));
    double bound3 = (1.0 / 8.0) * (1.0 + c2 * slack_sum(3));
    DETAIL("p1 = %.4f (<= 0.5 + 3SE), p2 = %.4f -> C = %.3g, p3 = %.4f <= bound %.4f ? %d",
           e1.p_hat, e2.p_hat, c2, e3.p_hat, bound3, e3.p_hat <= bound3);
    return e3.p_hat <= bound3;
}

// 11. Moment stability of S(Z_0(f), unit box).
bool criterion_11() {
    ExperimentConfig cfg;
    cfg.master_seed = 1012;
    cfg.set_kind = SetKind::Nodal;
    cfg.chem_boxes = 4000;
    cfg.h = 0.125;
    ChemicalRun r = run_chemical(cfg);
    if (static_cast<int>(r.S_values.size()) < 4000) {
        DETAIL("only %zu boxes", r.S_values.size());
        return false;
    }
    bool ok = true;
    double worst = 0.0;
    char moments[256] = "";
    for (int k : {1, 2, 4}) {
        double half = 0.0, full = 0.0;
        for (int i = 0; i < 2000; ++i) half += std::pow(r.S_values[i], k);
        for (int i = 0; i < 4000; ++i) full += std::pow(r.S_values[i], k);
        half /= 2000;
        full /= 4000;
        double change = std::abs(full - half) / half;
        worst = std::max(worst, change);
        char buf[96];
        std::snprintf(buf, sizeof buf, " m%d: %.3f->%.3f (%.1f%%)", k, half, full, 100 * change);
        std::strncat(moments, buf, sizeof moments - std::strlen(moments) - 1);
        if (change >= 0.10) ok = false;
    }
    DETAIL("moments on 2000 vs 4000 boxes:%s (tol 10%%)", moments);
    return ok;
}

// 12. Asymptotic sparsity constants.
bool criterion_12() {
    auto g = [](double gamma) {
        return std::log(2.0) + 4.0 * std::log(gamma) + 1.0 - std::sqrt(gamma) / 160.0;
    };
    if (!(g(1e8) > 0 && g(2e8) < 0)) {
        DETAIL("bracket check failed");
        return false;
    }
    SparsityConstants c = min_gamma_for_sparsity_bound();
    bool ok = std::abs(g(c.gamma_star)) < 1e-6 && c.gamma_star > 1.4e8 && c.gamma_star < 1.6e8;
    DETAIL("gamma* = %.6e (root of ln2 + 4 ln g + 1 - sqrt(g)/160), M = sqrt(gamma*)/80 - 2 = "
           "%.2f; far beyond any desk-scale lattice, hence desk triplets elsewhere",
           c.gamma_star, c.M);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

    struct Entry {
        int id;
        const char* name;
        std::function<bool()> fn;
    };
    std::vector<Entry> entries = {
        {1, "kernel identity q*q = kappa", criterion_1},
        {2, "sampler covariance at lags 0,1,2", criterion_2},
        {3, "square-crossing probability 1/2", criterion_3},
        {4, "nodal crossing implies excursion crossing", criterion_4},
        {5, "nodal length density 1/2 (Kac-Rice)", criterion_5},
        {6, "one-arm probability decay", criterion_6},
        {7, "shortest-crossing exponent in (1,2)", criterion_7},
        {8, "box-count exponent link", criterion_8},
        {9, "deterministic multiscale machinery", criterion_9},
        {10, "quasi-independence of joint crossings", criterion_10},
        {11, "chemical diameter moment stability", criterion_11},
        {12, "asymptotic sparsity constants", criterion_12},
    };

    int failures = 0;
    for (auto& e : entries) {
        if (only != 0 && e.id != only) continue;
        auto start = std::chrono::steady_clock::now();
        g_detail[0] = '\0';
        bool ok = false;
        try {
            ok = e.fn();
        } catch (const std::exception& ex) {
            DETAIL("exception: %s", ex.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s (%.1fs)\n    %s\n", ok ? "PASS" : "FAIL", e.id, e.name,
                    secs, g_detail);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}
