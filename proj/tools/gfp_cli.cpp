// Command line surface for the Gaussian field percolation laboratory.
//
// Subcommands: sample, crossing-prob, one-arm, shortest-crossing,
// fractal-analyze, chemical, joint-crossing, fit-exponent, validate.
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "gfp/errors.hpp"
#include "gfp/harness.hpp"
#include "gfp/levelset.hpp"
#include "gfp/rng.hpp"
#include "gfp/sampler.hpp"

using namespace gfp;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string kernel;
    std::string out;
    std::string set_kind;
    std::vector<double> lambdas;
    int64_t seed = -1;
    int replicas = -1;
    int threads = -1;
    double h = -1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--kernel", kernel, "kernel name (BargmannFock|TruncatedWave|BesselJ0)");
        cmd->add_option("--lambda", lambdas, "window sizes")->delimiter(',');
        cmd->add_option("--replicas", replicas, "replica count");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--h", h, "grid spacing");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--threads", threads, "worker threads");
        cmd->add_option("--set", set_kind, "excursion|nodal");
    }

    // flags override config keys
    ExperimentConfig merge() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = config_from_json_file(config_path);
        if (!kernel.empty()) cfg.kernel_name = kernel;
        if (!lambdas.empty()) cfg.lambdas = lambdas;
        if (replicas >= 0) cfg.replicas = replicas;
        if (seed >= 0) cfg.master_seed = static_cast<uint64_t>(seed);
        if (threads >= 0) cfg.threads = threads;
        if (h > 0) cfg.h = h;
        if (!out.empty()) cfg.out_dir = out;
        if (!set_kind.empty()) {
            if (set_kind == "excursion")
                cfg.set_kind = SetKind::Excursion;
            else if (set_kind == "nodal")
                cfg.set_kind = SetKind::Nodal;
            else
                throw ConfigError("--set must be excursion or nodal");
        }
        return cfg;
    }
};

int do_sample(const CommonFlags& flags) {
    ExperimentConfig cfg = flags.merge();
    cfg.validate();
    double lam = cfg.lambdas.empty() ? 32.0 : cfg.lambdas.front();
    FieldGrid f = sample_field(cfg.kernel(), {0, 0, lam, lam}, cfg.h,
                               replica_key(cfg.master_seed, 0), cfg.n_waves);
    std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
    write_output(cfg, "", "");  // ensures the directory exists when set
    write_field_binary(f, dir + "/field.bin");
    write_sign_pgm(f, dir + "/field.pgm");
    std::printf("wrote %s/field.bin and field.pgm (%dx%d, sigma2=%.6f)\n", dir.c_str(), f.nx, f.ny,
                f.sigma2);
    return 0;
}

int do_fit(const std::string& input, const std::string& xcol, const std::string& ycol) {
    std::ifstream in(input);
    if (!in) throw ConfigError("cannot read " + input);
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("empty CSV: " + input);
    std::vector<std::string> cols;
    {
        std::stringstream ss(header);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    int xi = -1, yi = -1;
    for (size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == xcol) xi = static_cast<int>(i);
        if (cols[i] == ycol) yi = static_cast<int>(i);
    }
    if (xi < 0 || yi < 0) throw ConfigError("columns not found: " + xcol + ", " + ycol);
    std::map<double, std::vector<double>> groups;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string c;
        std::vector<std::string> fields;
        while (std::getline(ss, c, ',')) fields.push_back(c);
        if (static_cast<int>(fields.size()) <= std::max(xi, yi)) continue;
        double x = std::atof(fields[xi].c_str());
        double y = std::atof(fields[yi].c_str());
        if (x > 0 && y > 0) groups[x].push_back(y);
    }
    if (groups.size() < 3) throw UsageError("fit-exponent needs >= 3 distinct x values");
    std::vector<double> xs;
    std::vector<std::vector<double>> samples;
    for (auto& [x, v] : groups) {
        xs.push_back(x);
        samples.push_back(v);
    }
    ExponentFit fit = fit_exponent_bootstrap(xs, samples);
    std::printf("points:");
    for (size_t i = 0; i < xs.size(); ++i)
        std::printf(" (%g, n=%zu, mean=%.6g)", xs[i], samples[i].size(), mean(samples[i]));
    std::printf("\nslope %.6f  se %.6f  ci95 [%.6f, %.6f]  (bootstrap n=%d)\n", fit.slope,
                fit.slope_se, fit.ci_lo, fit.ci_hi, fit.n_boot);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian field percolation laboratory"};
    app.require_subcommand(1);

    std::map<std::string, CommonFlags> flags;
    std::map<std::string, CLI::App*> cmds;
    for (const char* name : {"sample", "crossing-prob", "one-arm", "shortest-crossing",
                             "fractal-analyze", "chemical", "joint-crossing", "validate"}) {
        CLI::App* cmd = app.add_subcommand(name);
        flags[name].add_to(cmd);
        cmds[name] = cmd;
    }
    std::string fit_input, fit_x = "lambda", fit_y = "shortest_crossing";
    CLI::App* fit_cmd = app.add_subcommand("fit-exponent");
    fit_cmd->add_option("--input", fit_input, "CSV produced by a run")->required();
    fit_cmd->add_option("--x", fit_x, "x column name");
    fit_cmd->add_option("--y", fit_y, "y column name");

    CLI11_PARSE(app, argc, argv);

    try {
        std::string name = app.get_subcommands().front()->get_name();
        if (name == "fit-exponent") return do_fit(fit_input, fit_x, fit_y);
        if (name == "sample") return do_sample(flags[name]);

        ExperimentConfig cfg = flags[name].merge();
        if (name == "validate") {
            cfg.validate();
            std::printf("configuration valid\n");
            return 0;
        }
        if (name == "crossing-prob") cfg.do_crossing = true;
        if (name == "one-arm") cfg.do_one_arm = true;
        if (name == "shortest-crossing") cfg.do_shortest = true;
        if (name == "fractal-analyze") cfg.do_fractal = true;
        if (name == "chemical") cfg.do_chemical = true;
        if (name == "joint-crossing") cfg.do_joint = true;
        std::string summary = run(cfg);
        std::printf("%s\n", summary.c_str());
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 1;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
