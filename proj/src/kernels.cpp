#include "gfp/kernels.hpp"

#include <cmath>
#include <mutex>

#include "gfp/errors.hpp"

namespace gfp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQTruncEps = 1e-8;

// 8-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGlX[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                            0.7966664774136267,  0.9602898564975363};
constexpr double kGlW[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

// Panelled Gauss-Legendre for oscillatory radial integrands; panel count is
// scaled with the oscillation count so each panel covers at most ~half a
// period of J0(rt).
double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels) {
    double total = 0.0;
    double len = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * len;
        double mid = lo + len / 2, half = len / 2;
        double acc = 0.0;
        for (int i = 0; i < 8; ++i) acc += kGlW[i] * f(mid + half * kGlX[i]);
        total += acc * half;
    }
    return total;
}

double simpson(const std::function<double(double)>& f, double a, double m, double b, double fa,
               double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                            double fa, double fm, double fb, double whole, double tol, int depth) {
    double lm = (a + m) / 2, rm = (m + b) / 2;
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, lm, m, fa, flm, fm);
    double right = simpson(f, m, rm, b, fm, frm, fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    double m = (a + b) / 2;
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = simpson(f, a, m, b, fa, fm, fb);
    double scale = std::max(std::abs(whole), 1e-12);
    return adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole, rel_tol * scale, 40);
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "BargmannFock" || name == "bargmann-fock" || name == "bf")
        return KernelKind::BargmannFock;
    if (name == "TruncatedWave" || name == "truncated-wave" || name == "tw")
        return KernelKind::TruncatedWave;
    if (name == "BesselJ0" || name == "bessel-j0" || name == "j0") return KernelKind::BesselJ0;
    throw ConfigError("unknown kernel name: " + name);
}

std::string kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::BargmannFock: return "BargmannFock";
        case KernelKind::TruncatedWave: return "TruncatedWave";
        case KernelKind::BesselJ0: return "BesselJ0";
    }
    return "?";
}

struct CovarianceKernel::TwCache {
    double k0 = 0.0;  // unnormalized variance 2*pi*int chi(t^2) t dt

    std::once_flag kappa_once;
    std::vector<double> kappa_tab;  // normalized, step kKappaStep on [0, kKappaRmax]

    std::once_flag q_once;
    std::vector<double> q_tab;  // step kQStep on [0, kQRmax]
    double trunc_radius = 0.0;

    static constexpr double kKappaStep = 0.01;
    static constexpr double kKappaRmax = 200.0;
    static constexpr double kQStep = 0.0125;
    static constexpr double kQRmax = 512.0;
};

CovarianceKernel::CovarianceKernel(KernelKind kind, double t0, double w)
    : kind_(kind), t0_(t0), w_(w) {
    if (kind_ == KernelKind::TruncatedWave) {
        if (w_ <= 0.0) throw ConfigError("TruncatedWave bump width must be positive");
        if (t0_ <= 0.0) throw ConfigError("TruncatedWave bump center must be positive");
        if (t0_ - w_ < 0.0) throw ConfigError("TruncatedWave bump must stay in t^2 > 0");
        tw_ = std::make_shared<TwCache>();
        tw_->k0 = 2.0 * kPi * integrate([this](double t) { return chi(t * t) * t; },
                                        std::sqrt(t0_ - w_), std::sqrt(t0_ + w_));
        if (!(tw_->k0 > 0.0)) throw ConfigError("TruncatedWave bump integrates to zero");
    }
}

CovarianceKernel CovarianceKernel::bargmann_fock() {
    return CovarianceKernel(KernelKind::BargmannFock, 0, 0);
}
CovarianceKernel CovarianceKernel::truncated_wave(double bump_center, double bump_width) {
    return CovarianceKernel(KernelKind::TruncatedWave, bump_center, bump_width);
}
CovarianceKernel CovarianceKernel::bessel_j0() {
    return CovarianceKernel(KernelKind::BesselJ0, 0, 0);
}
CovarianceKernel CovarianceKernel::from_name(const std::string& name) {
    switch (kernel_kind_from_name(name)) {
        case KernelKind::BargmannFock: return bargmann_fock();
        case KernelKind::TruncatedWave: return truncated_wave();
        case KernelKind::BesselJ0: return bessel_j0();
    }
    throw ConfigError("unknown kernel");
}

double CovarianceKernel::chi(double u) const {
    double d = u - t0_;
    if (std::abs(d) >= w_) return 0.0;
    return std::exp(-w_ * w_ / (w_ * w_ - d * d));
}

double CovarianceKernel::tw_kappa_raw(double r) const {
    double t_lo = std::sqrt(t0_ - w_), t_hi = std::sqrt(t0_ + w_);
    int panels = std::max(8, static_cast<int>(std::ceil(r * (t_hi - t_lo) / kPi)) * 2);
    return 2.0 * kPi *
           integrate_gl([this, r](double t) { return chi(t * t) * std::cyl_bessel_j(0.0, r * t) * t; },
                        t_lo, t_hi, panels);
}

double CovarianceKernel::tw_q_raw(double r) const {
    double t_lo = std::sqrt(t0_ - w_), t_hi = std::sqrt(t0_ + w_);
    int panels = std::max(8, static_cast<int>(std::ceil(r * (t_hi - t_lo) / kPi)) * 2);
    return integrate_gl(
        [this, r](double t) { return std::sqrt(chi(t * t)) * std::cyl_bessel_j(0.0, r * t) * t; },
        t_lo, t_hi, panels);
}

void CovarianceKernel::ensure_tw_tables() const {
    std::call_once(tw_->kappa_once, [this] {
        size_t n = static_cast<size_t>(TwCache::kKappaRmax / TwCache::kKappaStep) + 1;
        tw_->kappa_tab.resize(n);
        for (size_t i = 0; i < n; ++i)
            tw_->kappa_tab[i] = tw_kappa_raw(i * TwCache::kKappaStep) / tw_->k0;
    });
}

void CovarianceKernel::ensure_tw_q_table() const {
    std::call_once(tw_->q_once, [this] {
        size_t n = static_cast<size_t>(TwCache::kQRmax / TwCache::kQStep) + 1;
        double norm = 1.0 / std::sqrt(tw_->k0);
        tw_->q_tab.resize(n);
        for (size_t i = 0; i < n; ++i) tw_->q_tab[i] = norm * tw_q_raw(i * TwCache::kQStep);
        // truncation radius: last radius where |q| reaches 1e-8, then round up
        size_t last = 0;
        for (size_t i = 0; i < n; ++i)
            if (std::abs(tw_->q_tab[i]) >= kQTruncEps) last = i;
        tw_->trunc_radius = std::min((last + 1) * TwCache::kQStep, TwCache::kQRmax);
    });
}

static double table_interp(const std::vector<double>& tab, double step, double r) {
    double s = r / step;
    size_t i = static_cast<size_t>(s);
    if (i + 1 >= tab.size()) return 0.0;
    double f = s - i;
    return tab[i] * (1 - f) + tab[i + 1] * f;
}

double CovarianceKernel::kappa(double r) const {
    if (r < 0) throw UsageError("kappa: radius must be nonnegative");
    switch (kind_) {
        case KernelKind::BargmannFock: return std::exp(-0.5 * r * r);
        case KernelKind::BesselJ0: return r == 0.0 ? 1.0 : std::cyl_bessel_j(0.0, r);
        case KernelKind::TruncatedWave: {
            ensure_tw_tables();
            if (r >= TwCache::kKappaRmax) return 0.0;
            return table_interp(tw_->kappa_tab, TwCache::kKappaStep, r);
        }
    }
    return 0.0;
}

double CovarianceKernel::q_of(double r) const {
    if (r < 0) throw UsageError("q_of: radius must be nonnegative");
    switch (kind_) {
        case KernelKind::BargmannFock: {
            if (r >= truncation_radius()) return 0.0;
            return std::sqrt(2.0 / kPi) * std::exp(-r * r);
        }
        case KernelKind::BesselJ0:
            throw ConfigError("BesselJ0 has a singular spectral measure; no L2 kernel q exists");
        case KernelKind::TruncatedWave: {
            ensure_tw_q_table();
            if (r >= tw_->trunc_radius) return 0.0;
            return table_interp(tw_->q_tab, TwCache::kQStep, r);
        }
    }
    return 0.0;
}

double CovarianceKernel::truncation_radius() const {
    switch (kind_) {
        case KernelKind::BargmannFock:
            // sqrt(2/pi) exp(-r^2) = 1e-8
            return std::sqrt(std::log(std::sqrt(2.0 / kPi) / kQTruncEps));
        case KernelKind::BesselJ0:
            throw ConfigError("BesselJ0 has no convolution kernel q");
        case KernelKind::TruncatedWave: ensure_tw_q_table(); return tw_->trunc_radius;
    }
    return 0.0;
}

double CovarianceKernel::kappa_tilde(double x) const {
    if (x < 0) throw UsageError("kappa_tilde: argument must be nonnegative");
    if (kind_ == KernelKind::BargmannFock) return kappa(x);  // radially decreasing
    // dense grid search over [x, 200], then an asymptotic tail envelope
    constexpr double kStep = 0.01;
    constexpr double kRmax = 200.0;
    double best = 0.0;
    if (x <= kRmax) {
        best = kappa(x);
        for (double r = std::ceil(x / kStep) * kStep; r <= kRmax; r += kStep)
            best = std::max(best, kappa(r));
    }
    double tail_from = std::max(x, kRmax);
    if (kind_ == KernelKind::BesselJ0) {
        // |J0(r)| <= sqrt(2/(pi r))
        best = std::max(best, std::sqrt(2.0 / (kPi * tail_from)));
    } else {
        // TruncatedWave decays super-polynomially; dominated by the last table
        // values by r = 200 (|kappa| there is far below any slack we use).
        ensure_tw_tables();
        double m = 0.0;
        for (size_t i = tw_->kappa_tab.size() - 100; i < tw_->kappa_tab.size(); ++i)
            m = std::max(m, std::abs(tw_->kappa_tab[i]));
        best = std::max(best, m);
    }
    return best;
}

double CovarianceKernel::spectral_density_radial(double xi_norm) const {
    double rho2 = 0.0;
    switch (kind_) {
        case KernelKind::BargmannFock:
            rho2 = 2.0 * kPi * std::exp(-2.0 * kPi * kPi * xi_norm * xi_norm);
            break;
        case KernelKind::TruncatedWave: {
            double t = 2.0 * kPi * xi_norm;
            rho2 = 4.0 * kPi * kPi * chi(t * t) / tw_->k0;
            break;
        }
        case KernelKind::BesselJ0:
            throw ConfigError("BesselJ0 spectral measure is singular (uniform on a circle)");
    }
    if (rho2 < -1e-9) throw ModelError("negative spectral density: kernel not positive definite");
    return rho2;
}

double CovarianceKernel::spectral_density(const Vec2& xi) const {
    return spectral_density_radial(xi.norm());
}

void CovarianceKernel::spectral_support(double& t_lo, double& t_hi) const {
    switch (kind_) {
        case KernelKind::BesselJ0: t_lo = t_hi = 1.0; return;
        case KernelKind::TruncatedWave:
            t_lo = std::sqrt(t0_ - w_);
            t_hi = std::sqrt(t0_ + w_);
            return;
        case KernelKind::BargmannFock:
            throw ConfigError("BargmannFock is sampled by convolution, not spectral synthesis");
    }
}

}  // namespace gfp
