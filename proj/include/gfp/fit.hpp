#ifndef GFP_FIT_HPP
#define GFP_FIT_HPP

#include <cstdint>
#include <vector>

namespace gfp {

struct FitPoint {
    double x = 0.0;   // e.g. lambda
    double y = 0.0;   // positive observable
    double se = 0.0;  // standard error of y (0 = unweighted)
};

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;  // of log y vs log x
    double slope_se = 0.0;   // from the WLS normal equations
    double ci_lo = 0.0;      // 95% CI (bootstrap when available, else normal)
    double ci_hi = 0.0;
    int n_boot = 0;
};

// Weighted least squares of log y on log x; weights 1/se_log^2 with
// se_log = se/y (unweighted when all se are 0).
ExponentFit fit_exponent(const std::vector<FitPoint>& points);

// Same fit, with a nonparametric bootstrap over replicas: samples[i] holds the
// per-replica values observed at x[i]; each resample redraws replicas within
// every x bin, refits, and the CI is the 2.5/97.5 percentile of the slopes.
ExponentFit fit_exponent_bootstrap(const std::vector<double>& xs,
                                   const std::vector<std::vector<double>>& samples,
                                   int n_boot = 1000, uint64_t seed = 1);

double mean(const std::vector<double>& v);
double std_error(const std::vector<double>& v);  // of the mean

}  // namespace gfp

#endif
