#include "gfp/fit.hpp"

#include <algorithm>
#include <cmath>

#include "gfp/errors.hpp"
#include "gfp/rng.hpp"

namespace gfp {

double mean(const std::vector<double>& v) {
    if (v.empty()) throw UsageError("mean of empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double std_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= (v.size() - 1);
    return std::sqrt(s2 / v.size());
}

namespace {

struct Wls {
    double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};

Wls wls_loglog(const std::vector<FitPoint>& pts) {
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (const FitPoint& p : pts) {
        if (p.x <= 0 || p.y <= 0) throw UsageError("fit_exponent requires positive x and y");
        double lx = std::log(p.x), ly = std::log(p.y);
        double se_log = p.se > 0 ? p.se / p.y : 0.0;
        double w = se_log > 0 ? 1.0 / (se_log * se_log) : 1.0;
        sw += w;
        swx += w * lx;
        swy += w * ly;
        swxx += w * lx * lx;
        swxy += w * lx * ly;
    }
    double det = sw * swxx - swx * swx;
    if (det <= 0) throw UsageError("fit_exponent: degenerate design (need distinct x)");
    Wls r;
    r.slope = (sw * swxy - swx * swy) / det;
    r.intercept = (swxx * swy - swx * swxy) / det;
    r.slope_se = std::sqrt(sw / det);
    return r;
}

}  // namespace

ExponentFit fit_exponent(const std::vector<FitPoint>& points) {
    if (points.size() < 3) throw UsageError("fit_exponent requires >= 3 points");
    Wls w = wls_loglog(points);
    ExponentFit f;
    f.slope = w.slope;
    f.intercept = w.intercept;
    f.slope_se = w.slope_se;
    f.ci_lo = w.slope - 1.959964 * w.slope_se;
    f.ci_hi = w.slope + 1.959964 * w.slope_se;
    return f;
}

ExponentFit fit_exponent_bootstrap(const std::vector<double>& xs,
                                   const std::vector<std::vector<double>>& samples, int n_boot,
                                   uint64_t seed) {
    if (xs.size() != samples.size()) throw UsageError("bootstrap: xs/samples size mismatch");
    if (xs.size() < 3) throw UsageError("fit_exponent requires >= 3 points");
    std::vector<FitPoint> pts(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        if (samples[i].empty()) throw UsageError("bootstrap: empty sample bin");
        pts[i] = {xs[i], mean(samples[i]), std_error(samples[i])};
    }
    ExponentFit f = fit_exponent(pts);

    n_boot = std::max(n_boot, 1000);
    std::vector<double> slopes;
    slopes.reserve(n_boot);
    std::vector<FitPoint> bp(xs.size());
    for (int b = 0; b < n_boot; ++b) {
        bool ok = true;
        for (size_t i = 0; i < xs.size(); ++i) {
            const std::vector<double>& bin = samples[i];
            double acc = 0.0;
            for (size_t r = 0; r < bin.size(); ++r) {
                double u1, u2;
                Philox::uniform2(replica_key(seed, b),
                                 (static_cast<uint64_t>(i) << 32) | static_cast<uint64_t>(r), 0,
                                 u1, u2);
                acc += bin[static_cast<size_t>(u1 * bin.size())];
            }
            double m = acc / bin.size();
            if (m <= 0) {
                ok = false;
                break;
            }
            bp[i] = {xs[i], m, 0.0};
        }
        if (ok) slopes.push_back(wls_loglog(bp).slope);
    }
    if (slopes.size() >= 100) {
        std::sort(slopes.begin(), slopes.end());
        auto quantile = [&](double q) {
            double pos = q * (slopes.size() - 1);
            size_t i = static_cast<size_t>(pos);
            double fr = pos - i;
            return i + 1 < slopes.size() ? slopes[i] * (1 - fr) + slopes[i + 1] * fr : slopes[i];
        };
        f.ci_lo = quantile(0.025);
        f.ci_hi = quantile(0.975);
        double bm = mean(slopes);
        double s2 = 0.0;
        for (double s : slopes) s2 += (s - bm) * (s - bm);
        f.slope_se = std::sqrt(s2 / (slopes.size() - 1));
        f.n_boot = static_cast<int>(slopes.size());
    }
    return f;
}

}  // namespace gfp
