#include "nldisp/kernel.hpp"

#include <cmath>

#include "nldisp/errors.hpp"

namespace nldisp {

KernelShape kernel_shape_from_string(const std::string& name) {
    if (name == "uniform") return KernelShape::uniform;
    if (name == "triangle") return KernelShape::triangle;
    if (name == "cosine-bump") return KernelShape::cosine_bump;
    throw ConfigError("unknown kernel shape '" + name +
                      "' (expected uniform | triangle | cosine-bump)");
}

std::string kernel_shape_to_string(KernelShape shape) {
    switch (shape) {
        case KernelShape::uniform: return "uniform";
        case KernelShape::triangle: return "triangle";
        case KernelShape::cosine_bump: return "cosine-bump";
    }
    return "?";
}

double kernel_density(const KernelSpec& ks, double z) {
    double a = std::fabs(z);
    if (a >= ks.r0) return 0.0;
    switch (ks.shape) {
        case KernelShape::uniform: return 0.5 / ks.r0;
        case KernelShape::triangle: return (1.0 - a / ks.r0) / ks.r0;
        case KernelShape::cosine_bump:
            return (1.0 + std::cos(3.14159265358979323846 * z / ks.r0)) / (2.0 * ks.r0);
    }
    return 0.0;
}

double kernel_edge_value(const KernelSpec& ks) {
    return ks.shape == KernelShape::uniform ? 0.5 / ks.r0 : 0.0;
}

namespace {

// Pairwise-symmetric sum: bit-identical for mirrored weight arrays, which
// makes the twisted-moment symmetry (xi <-> -xi) exact.
double symmetric_sum(const std::vector<double>& w, int radius) {
    double s = w[static_cast<std::size_t>(radius)];
    for (int m = 1; m <= radius; ++m)
        s += w[static_cast<std::size_t>(radius + m)] + w[static_cast<std::size_t>(radius - m)];
    return s;
}

}  // namespace

SampledKernel sample_kernel(const KernelSpec& ks, double dx) {
    if (!(ks.r0 > 0.0)) throw ConfigError("kernel radius must be positive");
    if (!(dx > 0.0) || dx >= ks.r0)
        throw GridTooCoarse("dx = " + std::to_string(dx) + " must be smaller than r0 = " +
                            std::to_string(ks.r0));

    const double ratio = ks.r0 / dx;
    const int nearest = static_cast<int>(std::lround(ratio));
    const bool edge_aligned =
        nearest >= 1 && std::fabs(nearest * dx - ks.r0) <= 1e-9 * std::max(1.0, ks.r0);

    SampledKernel k;
    k.dx = dx;
    k.radius = edge_aligned ? nearest : static_cast<int>(std::floor(ratio));
    k.w.assign(static_cast<std::size_t>(2 * k.radius + 1), 0.0);

    for (int m = -k.radius; m <= k.radius; ++m) {
        double z = m * dx;
        double density = kernel_density(ks, z);
        double factor = 1.0;
        if (edge_aligned) {
            if (std::abs(m) == k.radius) {
                density = kernel_edge_value(ks);
                factor = k.radius >= 2 ? 5.0 / 12.0 : 0.5;
            } else if (std::abs(m) == k.radius - 1 && k.radius >= 2) {
                factor = 13.0 / 12.0;
            }
        }
        k.w[static_cast<std::size_t>(m + k.radius)] = density * dx * factor;
    }

    double total = symmetric_sum(k.w, k.radius);
    if (!(total > 0.0)) throw GridTooCoarse("sampled kernel has zero mass");
    for (double& v : k.w) v /= total;
    k.weight_sum = symmetric_sum(k.w, k.radius);
    return k;
}

SampledKernel twist(const SampledKernel& k, int xi, double mu) {
    if (k.twisted) throw Error("kernel is already twisted");
    if (k.wrapped) throw Error("twist must precede wrapping");
    if (xi != 1 && xi != -1) throw Error("xi must be +1 or -1");

    SampledKernel out = k;
    out.xi = xi;
    out.mu = mu;
    out.twisted = true;
    for (int m = -k.radius; m <= k.radius; ++m) {
        double factor = std::exp(-mu * (m * k.dx) * xi);
        double v = k.w[static_cast<std::size_t>(m + k.radius)] * factor;
        if (!std::isfinite(v))
            throw NonFiniteWeight("exp(-mu*z*xi) overflows at offset z = " +
                                  std::to_string(m * k.dx) + ", mu = " + std::to_string(mu));
        out.w[static_cast<std::size_t>(m + k.radius)] = v;
    }
    out.weight_sum = symmetric_sum(out.w, out.radius);
    return out;
}

SampledKernel wrap_to_cell(const SampledKernel& k, const CellGrid& g) {
    if (k.wrapped) return k;
    SampledKernel out;
    out.dx = k.dx;
    out.radius = k.radius;
    out.xi = k.xi;
    out.mu = k.mu;
    out.twisted = k.twisted;
    out.wrapped = true;
    out.nx = g.nx;
    out.w.assign(static_cast<std::size_t>(g.nx), 0.0);
    for (int m = -k.radius; m <= k.radius; ++m) {
        int j = ((m % g.nx) + g.nx) % g.nx;
        out.w[static_cast<std::size_t>(j)] += k.w[static_cast<std::size_t>(m + k.radius)];
    }
    double s = 0.0;
    for (double v : out.w) s += v;
    out.weight_sum = s;
    return out;
}

void convolve_cell(const SampledKernel& k, std::span<const double> f, std::span<double> out) {
    if (!k.wrapped || k.nx != static_cast<int>(f.size()) || f.size() != out.size())
        throw Error("convolve_cell: kernel not wrapped on this grid");
    const int nx = k.nx;
    for (int i = 0; i < nx; ++i) {
        double s = 0.0;
        int split = nx - i;  // j < split -> i+j < nx
        for (int j = 0; j < split; ++j) s += k.w[static_cast<std::size_t>(j)] * f[i + j];
        for (int j = split; j < nx; ++j) s += k.w[static_cast<std::size_t>(j)] * f[i + j - nx];
        out[static_cast<std::size_t>(i)] = s;
    }
}

void convolve_line(const SampledKernel& k, std::span<const double> f,
                   std::span<const double> lpad, std::span<const double> rpad,
                   std::span<double> out) {
    if (k.wrapped) throw Error("convolve_line: kernel must be unwrapped");
    const int n = static_cast<int>(f.size());
    const int R = k.radius;
    if (static_cast<int>(lpad.size()) < R || static_cast<int>(rpad.size()) < R ||
        out.size() != f.size())
        throw Error("convolve_line: pads must cover the kernel radius");
    auto value = [&](int q) -> double {
        if (q < 0) return lpad[static_cast<std::size_t>(q + R)];
        if (q >= n) return rpad[static_cast<std::size_t>(q - n)];
        return f[static_cast<std::size_t>(q)];
    };
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        if (i >= R && i + R < n) {
            for (int m = -R; m <= R; ++m)
                s += k.w[static_cast<std::size_t>(m + R)] * f[static_cast<std::size_t>(i + m)];
        } else {
            for (int m = -R; m <= R; ++m)
                s += k.w[static_cast<std::size_t>(m + R)] * value(i + m);
        }
        out[static_cast<std::size_t>(i)] = s;
    }
}

}  // namespace nldisp
