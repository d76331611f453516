#ifndef NLDISP_KERNEL_HPP
#define NLDISP_KERNEL_HPP

#include <span>
#include <string>
#include <vector>

#include "nldisp/grid.hpp"

namespace nldisp {

enum class KernelShape { uniform, triangle, cosine_bump };

/// Compactly supported dispersal kernel: kappa(z) > 0 for |z| < r0,
/// kappa(z) = 0 for |z| >= r0, integral 1.
struct KernelSpec {
    KernelShape shape = KernelShape::uniform;
    double r0 = 1.0;
};

KernelShape kernel_shape_from_string(const std::string& name);
std::string kernel_shape_to_string(KernelShape shape);

/// Density on the open support; zero outside.
double kernel_density(const KernelSpec& ks, double z);
/// One-sided limit of the density as |z| -> r0 from inside (nonzero only for
/// the uniform shape).
double kernel_edge_value(const KernelSpec& ks);

/// Discretized convolution weights on lattice offsets z_m = m*dx.
///
/// Unwrapped: w[m + radius] is the weight of offset m in [-radius, radius].
/// Wrapped: w[j] for j in [0, nx) is the total weight of all offsets congruent
/// to j modulo the cell, so a circular sum reproduces the line convolution of
/// the periodic extension exactly.
struct SampledKernel {
    double dx = 0.0;
    int radius = 0;
    std::vector<double> w;
    int xi = +1;
    double mu = 0.0;
    bool twisted = false;
    bool wrapped = false;
    int nx = 0;          // valid when wrapped
    double weight_sum = 0.0;  // 1 untwisted (renormalized); discrete moment when twisted

    double weight(int m) const { return w[static_cast<std::size_t>(m + radius)]; }
};

/// Samples kappa on the offset lattice and renormalizes so the weights sum
/// to 1. When the support edge r0 falls on the lattice, the two edge nodes
/// get Gregory-corrected trapezoid closure weights (factors 5/12 and 13/12);
/// this keeps the discrete exponential moments of the uniform kernel within
/// O(dx^3) of the continuum ones, which the spectral tolerances need.
SampledKernel sample_kernel(const KernelSpec& ks, double dx);

/// Twisted weights w_m * exp(-mu * z_m * xi). Not renormalized; the weight
/// sum becomes the discrete moment kappa_hat(mu).
SampledKernel twist(const SampledKernel& k, int xi, double mu);

/// Folds offsets modulo the cell.
SampledKernel wrap_to_cell(const SampledKernel& k, const CellGrid& g);

/// Circular weighted sum on the cell; k must be wrapped on a grid of size
/// f.size().
void convolve_cell(const SampledKernel& k, std::span<const double> f, std::span<double> out);

/// Line convolution with pad values beyond each end: lpad[j] is the value at
/// node -radius+j (j in [0, radius)), rpad[j] the value at node n+j.
void convolve_line(const SampledKernel& k, std::span<const double> f,
                   std::span<const double> lpad, std::span<const double> rpad,
                   std::span<double> out);

}  // namespace nldisp

#endif
