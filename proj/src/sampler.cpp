#include "gfp/sampler.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <mutex>

#include "gfp/errors.hpp"
#include "gfp/rng.hpp"

namespace gfp {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

struct ConvPlan {
    int nxp = 0, nyp = 0;
    std::vector<std::complex<double>> kernel_hat;  // r2c layout, ny x (nx/2+1)
    fftw_plan fwd = nullptr, bwd = nullptr;
};

// One cached plan per (grid size, h, kernel). Replica loops over a fixed
// geometry reuse the kernel transform and the FFTW plans.
ConvPlan& conv_plan(const CovarianceKernel& kernel, double h, int nxp, int nyp, int pad_cells) {
    static std::map<std::string, ConvPlan> cache;
    char key[128];
    std::snprintf(key, sizeof key, "%s:%g:%dx%d", kernel.name().c_str(), h, nxp, nyp);
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    ConvPlan& plan = cache[key];
    plan.nxp = nxp;
    plan.nyp = nyp;
    size_t nc = static_cast<size_t>(nyp) * (nxp / 2 + 1);
    std::vector<double> taps(static_cast<size_t>(nxp) * nyp, 0.0);
    // q sampled at grid nodes, wrapped so the tap at offset 0 sits at index 0
    for (int dy = -pad_cells; dy <= pad_cells; ++dy) {
        for (int dx = -pad_cells; dx <= pad_cells; ++dx) {
            double qv = kernel.q_of(std::hypot(dx * h, dy * h));
            if (qv == 0.0) continue;
            int ix = (dx % nxp + nxp) % nxp;
            int iy = (dy % nyp + nyp) % nyp;
            taps[static_cast<size_t>(iy) * nxp + ix] = qv;
        }
    }
    plan.kernel_hat.resize(nc);
    fftw_plan p = fftw_plan_dft_r2c_2d(nyp, nxp, taps.data(),
                                       reinterpret_cast<fftw_complex*>(plan.kernel_hat.data()),
                                       FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);

    std::vector<double> probe_r(static_cast<size_t>(nxp) * nyp);
    std::vector<std::complex<double>> probe_c(nc);
    plan.fwd = fftw_plan_dft_r2c_2d(nyp, nxp, probe_r.data(),
                                    reinterpret_cast<fftw_complex*>(probe_c.data()), FFTW_ESTIMATE);
    plan.bwd = fftw_plan_dft_c2r_2d(nyp, nxp, reinterpret_cast<fftw_complex*>(probe_c.data()),
                                    probe_r.data(), FFTW_ESTIMATE);
    return plan;
}

FieldGrid sample_by_convolution(const CovarianceKernel& kernel, const Rect& window, double h,
                                uint64_t seed) {
    FieldGrid f;
    f.origin = {window.x0, window.y0};
    f.h = h;
    f.nx = static_cast<int>(std::lround(window.width() / h)) + 1;
    f.ny = static_cast<int>(std::lround(window.height() / h)) + 1;
    f.seed = seed;
    f.kernel_id = kernel.name();

    int pad_cells = static_cast<int>(std::ceil(kernel.truncation_radius() / h));
    int nxp = f.nx + 2 * pad_cells;
    int nyp = f.ny + 2 * pad_cells;
    ConvPlan& plan = conv_plan(kernel, h, nxp, nyp, pad_cells);

    // White noise on the padded grid, keyed by absolute cell indices so that
    // overlapping windows of the same seed agree.
    int64_t ax0 = static_cast<int64_t>(std::llround(window.x0 / h)) - pad_cells;
    int64_t ay0 = static_cast<int64_t>(std::llround(window.y0 / h)) - pad_cells;
    std::vector<double> noise(static_cast<size_t>(nxp) * nyp);
    for (int iy = 0; iy < nyp; ++iy) {
        uint64_t cy = static_cast<uint64_t>(ay0 + iy);
        for (int ix = 0; ix < nxp; ++ix) {
            uint64_t cx = static_cast<uint64_t>(ax0 + ix);
            noise[static_cast<size_t>(iy) * nxp + ix] = h * Philox::gaussian(seed, cy, cx);
        }
    }

    size_t nc = static_cast<size_t>(nyp) * (nxp / 2 + 1);
    std::vector<std::complex<double>> spec(nc);
    fftw_execute_dft_r2c(plan.fwd, noise.data(), reinterpret_cast<fftw_complex*>(spec.data()));
    double scale = 1.0 / (static_cast<double>(nxp) * nyp);
    for (size_t i = 0; i < nc; ++i) spec[i] *= plan.kernel_hat[i] * scale;
    fftw_execute_dft_c2r(plan.bwd, reinterpret_cast<fftw_complex*>(spec.data()), noise.data());

    f.values.resize(static_cast<size_t>(f.nx) * f.ny);
    for (int iy = 0; iy < f.ny; ++iy)
        for (int ix = 0; ix < f.nx; ++ix)
            f.values[static_cast<size_t>(iy) * f.nx + ix] =
                noise[static_cast<size_t>(iy + pad_cells) * nxp + (ix + pad_cells)];

    double s2 = 0.0;
    for (int dy = -pad_cells; dy <= pad_cells; ++dy)
        for (int dx = -pad_cells; dx <= pad_cells; ++dx) {
            double qv = kernel.q_of(std::hypot(dx * h, dy * h));
            s2 += qv * qv;
        }
    f.sigma2 = s2 * h * h;
    return f;
}

FieldGrid sample_by_synthesis(const CovarianceKernel& kernel, const Rect& window, double h,
                              uint64_t seed, int n_waves) {
    FieldGrid f;
    f.origin = {window.x0, window.y0};
    f.h = h;
    f.nx = static_cast<int>(std::lround(window.width() / h)) + 1;
    f.ny = static_cast<int>(std::lround(window.height() / h)) + 1;
    f.seed = seed;
    f.kernel_id = kernel.name();
    f.sigma2 = 1.0;
    f.values.assign(static_cast<size_t>(f.nx) * f.ny, 0.0);

    double t_lo, t_hi;
    kernel.spectral_support(t_lo, t_hi);

    // Inverse CDF of the radial frequency density ~ chi(t^2) t dt.
    std::vector<double> cdf;
    if (t_hi > t_lo) {
        const int kCdfN = 2048;
        cdf.resize(kCdfN + 1);
        cdf[0] = 0.0;
        double dt = (t_hi - t_lo) / kCdfN;
        for (int i = 1; i <= kCdfN; ++i) {
            double t = t_lo + (i - 0.5) * dt;
            double xi = t / kTwoPi;
            cdf[i] = cdf[i - 1] + kernel.spectral_density_radial(xi) * t * dt;
        }
        for (int i = 0; i <= kCdfN; ++i) cdf[i] /= cdf[kCdfN];
    }

    double amp = std::sqrt(2.0 / n_waves);
    for (int k = 0; k < n_waves; ++k) {
        double u1, u2;
        Philox::uniform2(seed, 0x8000000000000000ull, static_cast<uint64_t>(k), u1, u2);
        double t = t_lo;
        if (!cdf.empty()) {
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u1);
            size_t j = std::max<size_t>(1, it - cdf.begin());
            double frac = (u1 - cdf[j - 1]) / std::max(cdf[j] - cdf[j - 1], 1e-300);
            t = t_lo + (j - 1 + frac) * (t_hi - t_lo) / (cdf.size() - 1);
        }
        double theta = kTwoPi * u2;
        double u3, u4;
        Philox::uniform2(seed, 0xC000000000000000ull, static_cast<uint64_t>(k), u3, u4);
        double phase0 = kTwoPi * u3;

        double wx = t * std::cos(theta), wy = t * std::sin(theta);
        // incremental rotation along rows/columns
        std::complex<double> step_x(std::cos(wx * h), std::sin(wx * h));
        std::complex<double> step_y(std::cos(wy * h), std::sin(wy * h));
        std::complex<double> row_start(std::cos(phase0 + wx * f.origin.x + wy * f.origin.y),
                                       std::sin(phase0 + wx * f.origin.x + wy * f.origin.y));
        for (int iy = 0; iy < f.ny; ++iy) {
            std::complex<double> z = row_start;
            double* row = &f.values[static_cast<size_t>(iy) * f.nx];
            for (int ix = 0; ix < f.nx; ++ix) {
                row[ix] += amp * z.real();
                z *= step_x;
            }
            row_start *= step_y;
        }
    }
    return f;
}

}  // namespace

FieldGrid sample_field(const CovarianceKernel& kernel, const Rect& window, double h, uint64_t seed,
                       int n_waves) {
    if (h > 0.5) throw ConfigError("grid spacing h > 0.5 undersamples the unit-scale field");
    if (h <= 0.0) throw ConfigError("grid spacing must be positive");
    if (window.width() <= 0 || window.height() <= 0) throw ConfigError("degenerate window");
    if (kernel.sampled_by_convolution()) return sample_by_convolution(kernel, window, h, seed);
    return sample_by_synthesis(kernel, window, h, seed, n_waves);
}

double empirical_covariance(const std::vector<FieldGrid>& fields, int lag_x, int lag_y) {
    if (fields.empty()) throw UsageError("empirical_covariance: no fields");
    const FieldGrid& f0 = fields.front();
    for (const FieldGrid& f : fields)
        if (f.nx != f0.nx || f.ny != f0.ny || f.h != f0.h || f.kernel_id != f0.kernel_id)
            throw UsageError("empirical_covariance: fields do not share a geometry");
    if (std::abs(lag_x) >= f0.nx || std::abs(lag_y) >= f0.ny)
        throw UsageError("empirical_covariance: lag exceeds the grid");

    double sum_a = 0.0, sum_b = 0.0, sum_ab = 0.0;
    size_t n = 0;
    for (const FieldGrid& f : fields) {
        int x0 = std::max(0, -lag_x), x1 = std::min(f.nx, f.nx - lag_x);
        int y0 = std::max(0, -lag_y), y1 = std::min(f.ny, f.ny - lag_y);
        for (int iy = y0; iy < y1; ++iy)
            for (int ix = x0; ix < x1; ++ix) {
                double a = f.at(ix, iy);
                double b = f.at(ix + lag_x, iy + lag_y);
                sum_a += a;
                sum_b += b;
                sum_ab += a * b;
                ++n;
            }
    }
    double ma = sum_a / n, mb = sum_b / n;
    return (sum_ab - static_cast<double>(n) * ma * mb) / (n - 1);
}

void write_field_binary(const FieldGrid& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw ConfigError("cannot open for writing: " + path);
    uint64_t dims[2] = {static_cast<uint64_t>(f.nx), static_cast<uint64_t>(f.ny)};
    std::fwrite(dims, sizeof(uint64_t), 2, fp);
    std::vector<float> row(f.nx);
    for (int iy = 0; iy < f.ny; ++iy) {
        for (int ix = 0; ix < f.nx; ++ix) row[ix] = static_cast<float>(f.at(ix, iy));
        std::fwrite(row.data(), sizeof(float), row.size(), fp);
    }
    std::fclose(fp);
}

void write_sign_pgm(const FieldGrid& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw ConfigError("cannot open for writing: " + path);
    std::fprintf(fp, "P5\n%d %d\n255\n", f.nx, f.ny);
    std::vector<unsigned char> row(f.nx);
    for (int iy = f.ny - 1; iy >= 0; --iy) {  // top row first
        for (int ix = 0; ix < f.nx; ++ix) row[ix] = f.at(ix, iy) >= 0.0 ? 255 : 0;
        std::fwrite(row.data(), 1, row.size(), fp);
    }
    std::fclose(fp);
}

}  // namespace gfp
