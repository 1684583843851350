#ifndef GFP_HARNESS_HPP
#define GFP_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gfp/fit.hpp"
#include "gfp/fractal.hpp"
#include "gfp/kernels.hpp"
#include "gfp/percolation.hpp"

namespace gfp {

struct ExperimentConfig {
    std::string kernel_name = "BargmannFock";
    double tw_center = 1.0;
    double tw_width = 0.3;
    double h = 0.25;
    std::vector<double> lambdas = {32.0};
    int replicas = 100;
    uint64_t master_seed = 1;
    int threads = 1;
    std::string out_dir;
    SetKind set_kind = SetKind::Excursion;
    MaskConnectivity connectivity = MaskConnectivity::Topological;

    bool do_crossing = false;
    bool do_one_arm = false;
    bool do_shortest = false;
    bool do_fractal = false;
    bool do_chemical = false;
    bool do_joint = false;

    std::vector<std::pair<double, double>> arm_pairs = {{1, 8}, {1, 16}, {1, 32}, {1, 64}};
    int triplet_m = 1;
    double triplet_gamma = 1.2;
    double triplet_s = 1.05;
    int k0 = 2;
    double tube_mult = 9.0;
    int chem_boxes = 2000;
    std::vector<double> joint_lengths = {8, 12, 16};
    int n_waves = 2048;

    CovarianceKernel kernel() const;
    void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig config_from_json_file(const std::string& path);

// Runs replicas 0..n-1 on a small worker pool; fn must be safe to call
// concurrently for distinct replica indices. Results are deterministic in
// replica order regardless of thread count.
void for_each_replica(int n, int threads, const std::function<void(int)>& fn);

// --- analysis runners ------------------------------------------------------

struct CrossingRun {
    std::vector<double> lambdas;
    // per lambda, per replica
    std::vector<std::vector<uint8_t>> crossed_excursion;
    std::vector<std::vector<uint8_t>> crossed_nodal;
    long nodal_implies_excursion_violations = 0;
    std::string csv;

    double fraction(size_t lam_idx, bool nodal = false) const;
    double std_err(size_t lam_idx, bool nodal = false) const;
};
CrossingRun run_crossing(const ExperimentConfig& cfg);

struct ShortestRun {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> lengths;  // per lambda, crossing replicas only
    std::vector<std::vector<double>> n_boxes;  // unit boxes touched, crossing replicas only
    std::vector<int> denominators;             // replicas attempted per lambda
    std::string csv;
};
ShortestRun run_shortest(const ExperimentConfig& cfg);

struct OneArmRun {
    std::vector<std::pair<double, double>> pairs;   // (s, t)
    std::vector<std::vector<uint8_t>> flags;        // per pair, per replica
    std::string csv;

    double pi_hat(size_t pair_idx) const;
    double std_err(size_t pair_idx) const;
};
OneArmRun run_one_arm(const ExperimentConfig& cfg);

struct ChemicalRun {
    std::vector<double> S_values;  // one per unit box
    std::string csv;
};
ChemicalRun run_chemical(const ExperimentConfig& cfg);

struct JointRun {
    std::vector<Rect> rects;
    // all_crossed[n-1][replica]: all of the first n rects crossed
    std::vector<std::vector<uint8_t>> prefix_crossed;
    std::string csv;

    JointCrossingEstimate estimate(size_t n_rects) const;
};
JointRun run_joint(const ExperimentConfig& cfg);
std::vector<Rect> joint_rect_layout(const std::vector<double>& lengths, double gap_factor = 2.0);

struct FractalReplica {
    uint64_t seed = 0;
    bool crossed = false;
    bool hierarchy_ok = false;
    double curve_length = 0.0;
    double curve_diameter = 0.0;
    double energy_value = 0.0;
    double length_bound = 0.0;
    bool length_bound_ok = false;
    int min_k0 = -1;          // smallest k0 at which the runs are sparse
    bool sparse_at_k0 = false;  // sparse at the configured k0
    bool claim1_ok = false;     // vacuously true when not sparse at k0
    bool energy_bound_ok = false;
    bool mass_ok = false;  // measure masses sum to 1 within 1e-12
    int n_leaves = 0;
};
struct FractalRun {
    std::vector<FractalReplica> replicas;  // crossing replicas only
    int attempted = 0;
    std::string csv;
};
FractalRun run_fractal(const ExperimentConfig& cfg, double lambda, int want_curves);

// Writes text to out_dir/name when out_dir is set.
void write_output(const ExperimentConfig& cfg, const std::string& name, const std::string& text);

// Full configured run: executes every enabled analysis, writes CSVs and a
// JSON summary into out_dir, returns the summary text.
std::string run(const ExperimentConfig& cfg);

}  // namespace gfp

#endif
