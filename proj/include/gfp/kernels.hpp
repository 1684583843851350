#ifndef GFP_KERNELS_HPP
#define GFP_KERNELS_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gfp/geom.hpp"

namespace gfp {

enum class KernelKind { BargmannFock, TruncatedWave, BesselJ0 };

KernelKind kernel_kind_from_name(const std::string& name);
std::string kernel_name(KernelKind kind);

// A radial covariance model, normalized to unit variance kappa(0) = 1.
//
// BargmannFock:  kappa(r) = exp(-r^2/2),  q(r) = sqrt(2/pi) exp(-r^2)
// TruncatedWave: kappa from the radial integral of a smooth spectral bump
//                chi(t^2) = exp(-w^2/(w^2-(t^2-t0)^2)) on |t^2-t0| < w
// BesselJ0:      kappa(r) = J0(r); singular spectral measure, no L^2 q
//
// Evaluation is pure and thread-safe. TruncatedWave caches radial tables
// lazily (guarded by a mutex) since each entry costs a quadrature.
class CovarianceKernel {
  public:
    static CovarianceKernel bargmann_fock();
    static CovarianceKernel truncated_wave(double bump_center = 1.0, double bump_width = 0.3);
    static CovarianceKernel bessel_j0();
    static CovarianceKernel from_name(const std::string& name);

    KernelKind kind() const { return kind_; }
    std::string name() const { return kernel_name(kind_); }
    double bump_center() const { return t0_; }
    double bump_width() const { return w_; }

    // Covariance at radius r, kappa(0) = 1.
    double kappa(double r) const;

    // Convolution square root q (kappa = q*q), zero beyond truncation_radius().
    // Throws ConfigError for BesselJ0 (its spectral measure is singular).
    double q_of(double r) const;

    // Smallest radius beyond which |q| < 1e-8 and q is treated as 0.
    double truncation_radius() const;

    // sup of kappa over radii >= x. Exact for radially monotone kernels,
    // dense grid search (step 0.01) with an asymptotic tail envelope otherwise.
    double kappa_tilde(double x) const;

    // Spectral density rho^2(xi) in the exp(2*i*pi*<x,xi>) convention.
    // Throws ConfigError for BesselJ0.
    double spectral_density(const Vec2& xi) const;
    double spectral_density_radial(double xi_norm) const;

    // Radius of spectral support in the angular-frequency variable t = 2*pi*|xi|
    // (used by the spectral synthesis sampler). [t_lo, t_hi] for TruncatedWave,
    // {1} for BesselJ0.
    void spectral_support(double& t_lo, double& t_hi) const;

    bool has_density() const { return kind_ != KernelKind::BesselJ0; }
    bool has_q() const { return kind_ != KernelKind::BesselJ0; }
    // Fields with slowly decaying q are sampled by spectral synthesis.
    bool sampled_by_convolution() const { return kind_ == KernelKind::BargmannFock; }

  private:
    CovarianceKernel(KernelKind kind, double t0, double w);

    double chi(double u) const;        // spectral bump, argument u = t^2
    double tw_kappa_raw(double r) const;  // unnormalized 2*pi*int chi(t^2) J0(rt) t dt
    double tw_q_raw(double r) const;      // int sqrt(chi(t^2)) J0(rt) t dt
    void ensure_tw_tables() const;
    void ensure_tw_q_table() const;

    KernelKind kind_;
    double t0_ = 1.0;
    double w_ = 0.3;

    // lazy TruncatedWave state
    struct TwCache;
    std::shared_ptr<TwCache> tw_;
};

// Adaptive Simpson quadrature with relative tolerance 1e-8.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8);

}  // namespace gfp

#endif
