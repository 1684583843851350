#include <doctest.h>

#include <cmath>

#include "gfp/errors.hpp"
#include "gfp/kernels.hpp"

using namespace gfp;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("BargmannFock kappa") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    CHECK(k.kappa(0.0) == doctest::Approx(1.0));
    CHECK(k.kappa(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(k.kappa(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("BesselJ0 kappa and negativity") {
    CovarianceKernel k = CovarianceKernel::bessel_j0();
    CHECK(k.kappa(0.0) == doctest::Approx(1.0));
    // weak positivity fails: kappa dips below -0.1
    CHECK(k.kappa(3.8317) == doctest::Approx(-0.402759).epsilon(1e-4));
    CHECK(k.kappa(3.8317) < -0.1);
}

TEST_CASE("TruncatedWave kappa approaches J0 for a narrow bump") {
    CovarianceKernel k = CovarianceKernel::truncated_wave(1.0, 0.05);
    double r = 3.8317;
    double j0 = std::cyl_bessel_j(0.0, r);
    CHECK(k.kappa(0.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(k.kappa(r) - j0) < 0.05);
}

TEST_CASE("q_of values and truncation contract") {
    CovarianceKernel bf = CovarianceKernel::bargmann_fock();
    CHECK(bf.q_of(0.0) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-12));
    double rt = bf.truncation_radius();
    CHECK(std::abs(bf.q_of(rt)) < 1e-8);
    CHECK(std::abs(bf.q_of(rt + 1.0)) < 1e-8);

    CovarianceKernel j0 = CovarianceKernel::bessel_j0();
    CHECK_THROWS_AS(j0.q_of(1.0), ConfigError);
}

TEST_CASE("BargmannFock discrete self-convolution reproduces kappa") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    // q sampled on a grid of step 0.05; (q*q)(r) compared to kappa on [0, 5]
    const double step = 0.05;
    const double extent = k.truncation_radius() + 5.0 + step;
    const int n = static_cast<int>(extent / step);
    double max_err = 0.0;
    std::vector<std::vector<double>> q(2 * n + 1, std::vector<double>(2 * n + 1));
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j)
            q[i + n][j + n] = k.q_of(std::hypot(i * step, j * step));
    for (int shift = 0; shift <= 100; ++shift) {  // r = shift*0.05 in [0,5]
        double acc = 0.0;
        for (int i = -n; i <= n; ++i) {
            if (i + shift > n) continue;
            for (int j = -n; j <= n; ++j) acc += q[i + n][j + n] * q[i + shift + n][j + n];
        }
        acc *= step * step;
        max_err = std::max(max_err, std::abs(acc - k.kappa(shift * step)));
    }
    CHECK(max_err < 5e-3);
}

TEST_CASE("BargmannFock q*q at r=1 against kappa(1)") {
    CovarianceKernel k = CovarianceKernel::bargmann_fock();
    const double step = 0.02;
    const int n = static_cast<int>(5.0 / step);
    double acc = 0.0;
    int shift = static_cast<int>(1.0 / step);
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j) {
            double qa = k.q_of(std::hypot(i * step, j * step));
            double x2 = (i + shift) * step;
            if (std::abs(x2) > 5.0) continue;
            acc += qa * k.q_of(std::hypot(x2, j * step));
        }
    acc *= step * step;
    CHECK(acc == doctest::Approx(0.6065306597).epsilon(2e-3));
}

TEST_CASE("kappa_tilde: monotone kernels and grid search") {
    CovarianceKernel bf = CovarianceKernel::bargmann_fock();
    CHECK(bf.kappa_tilde(0.0) == doctest::Approx(1.0));
    CHECK(bf.kappa_tilde(2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

    CovarianceKernel j0 = CovarianceKernel::bessel_j0();
    CHECK(j0.kappa_tilde(0.0) == doctest::Approx(1.0));
    // sup of J0 over r >= 3 is the local max near r = 7.0156
    CHECK(j0.kappa_tilde(3.0) == doctest::Approx(0.300116).epsilon(1e-3));
}

TEST_CASE("kappa_tilde is non-increasing and dominates kappa") {
    for (auto kernel : {CovarianceKernel::bargmann_fock(), CovarianceKernel::bessel_j0(),
                        CovarianceKernel::truncated_wave()}) {
        double prev = kernel.kappa_tilde(0.0);
        for (double x = 0.0; x <= 12.0; x += 0.37) {
            double kt = kernel.kappa_tilde(x);
            CHECK(kt <= prev + 1e-9);
            CHECK(kt >= kernel.kappa(x) - 1e-9);
            prev = kt;
        }
    }
}

TEST_CASE("spectral density: values, mass, support") {
    CovarianceKernel bf = CovarianceKernel::bargmann_fock();
    CHECK(bf.spectral_density({0, 0}) == doctest::Approx(2 * kPi).epsilon(1e-12));

    // integrates to kappa(0) = 1
    double mass = 2 * kPi *
                  integrate([&](double u) { return bf.spectral_density_radial(u) * u; }, 0.0, 2.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));

    CovarianceKernel tw = CovarianceKernel::truncated_wave();
    double t_lo, t_hi;
    tw.spectral_support(t_lo, t_hi);
    CHECK(tw.spectral_density_radial(t_lo / (2 * kPi) * 0.9) == 0.0);
    CHECK(tw.spectral_density_radial(t_hi / (2 * kPi) * 1.1) == 0.0);
    CHECK(tw.spectral_density_radial(1.0 / (2 * kPi)) > 0.0);
    double tw_mass = 2 * kPi *
                     integrate([&](double u) { return tw.spectral_density_radial(u) * u; },
                               t_lo / (2 * kPi), t_hi / (2 * kPi));
    CHECK(tw_mass == doctest::Approx(1.0).epsilon(1e-3));

    CHECK_THROWS_AS(CovarianceKernel::bessel_j0().spectral_density({0, 0}), ConfigError);
}

TEST_CASE("Fourier inversion of the spectral density reproduces kappa") {
    for (auto kernel : {CovarianceKernel::bargmann_fock(), CovarianceKernel::truncated_wave()}) {
        double t_lo = 0.0, t_hi = 2.0;
        if (kernel.kind() == KernelKind::TruncatedWave) {
            kernel.spectral_support(t_lo, t_hi);
            t_lo /= 2 * kPi;
            t_hi /= 2 * kPi;
        }
        for (double r : {0.0, 0.7, 1.9, 3.3, 5.0}) {
            double inv = 2 * kPi *
                         integrate(
                             [&](double u) {
                                 return kernel.spectral_density_radial(u) *
                                        std::cyl_bessel_j(0.0, 2 * kPi * r * u) * u;
                             },
                             t_lo, t_hi);
            CHECK(std::abs(inv - kernel.kappa(r)) < 1e-3);
        }
    }
}

TEST_CASE("strong positivity of the BargmannFock q") {
    CovarianceKernel bf = CovarianceKernel::bargmann_fock();
    for (double r = 0.0; r < bf.truncation_radius(); r += 0.1) CHECK(bf.q_of(r) >= 0.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(CovarianceKernel::truncated_wave(1.0, -0.5), ConfigError);
    CHECK_THROWS_AS(CovarianceKernel::truncated_wave(0.2, 0.5), ConfigError);
    CHECK_THROWS_AS(kernel_kind_from_name("nope"), ConfigError);
}
