#ifndef GFP_SAMPLER_HPP
#define GFP_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gfp/geom.hpp"
#include "gfp/kernels.hpp"

namespace gfp {

// Field values on a uniform vertex grid covering an analysis window.
// Immutable after creation; safe to share across threads.
struct FieldGrid {
    Vec2 origin;  // lower-left window corner
    double h = 0.25;
    int nx = 0, ny = 0;  // vertex counts
    std::vector<double> values;  // row-major, index iy*nx + ix
    uint64_t seed = 0;
    std::string kernel_id;
    double sigma2 = 0.0;  // one-point variance of the discretized field

    double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * nx + ix]; }
    Vec2 point(int ix, int iy) const { return {origin.x + ix * h, origin.y + iy * h}; }
    Rect window() const { return {origin.x, origin.y, origin.x + (nx - 1) * h, origin.y + (ny - 1) * h}; }
};

// Samples the stationary centered Gaussian field on `window` with spacing h.
// BargmannFock uses the white-noise convolution f = q*W evaluated by FFT on a
// padded grid (padding = truncation radius, discarded afterwards). Kernels
// whose q decays too slowly for convolution (TruncatedWave) or does not exist
// (BesselJ0) are sampled by spectral synthesis: a sum of `n_waves` random
// plane waves drawn from the spectral measure, which reproduces kappa exactly
// in expectation for any wave count.
//
// Deterministic given (kernel, window, h, seed); replicas are independent
// when seeds come from replica_key(master_seed, replica_index).
FieldGrid sample_field(const CovarianceKernel& kernel, const Rect& window, double h,
                       uint64_t seed, int n_waves = 2048);

// Pooled unbiased covariance estimate between f(x) and f(x + lag), lag in
// grid offsets. All fields must share kernel, h and dimensions.
double empirical_covariance(const std::vector<FieldGrid>& fields, int lag_x, int lag_y);

// Flat binary dump: two little-endian u64 dims then row-major f32 values.
void write_field_binary(const FieldGrid& f, const std::string& path);
// 8-bit PGM of sign(f): 255 where f >= 0, 0 elsewhere.
void write_sign_pgm(const FieldGrid& f, const std::string& path);

}  // namespace gfp

#endif
