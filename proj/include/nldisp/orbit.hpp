#ifndef NLDISP_ORBIT_HPP
#define NLDISP_ORBIT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "nldisp/grid.hpp"

namespace nldisp {

/// A time-periodic field sampled on (TimeGrid x CellGrid): row k holds the
/// values at t_k = k*dt. Periodic in k.
struct PeriodicOrbit {
    CellGrid grid{16, 1.0};
    TimeGrid tg{1, 1.0};
    std::vector<double> data;  // tg.nt * grid.nx, row-major
    double vmin = 0.0, vmax = 0.0;
    int periods_marched = 0;
    double drift = 0.0;  // final period-to-period sup distance

    std::span<const double> row(int k) const {
        int kk = ((k % tg.nt) + tg.nt) % tg.nt;
        return {data.data() + static_cast<std::size_t>(kk) * grid.nx,
                static_cast<std::size_t>(grid.nx)};
    }

    double at(int k, int j) const { return row(k)[static_cast<std::size_t>(j)]; }

    /// Periodic linear interpolation in t at cell node j.
    double value(double t, int j) const {
        double s = t / tg.dt();
        double k0 = std::floor(s);
        double theta = s - k0;
        int k = static_cast<int>(k0) % tg.nt;
        if (k < 0) k += tg.nt;
        int k1 = k + 1 == tg.nt ? 0 : k + 1;
        return (1.0 - theta) * at(k, j) + theta * at(k1, j);
    }

    void finalize_stats() {
        vmin = data.empty() ? 0.0 : data[0];
        vmax = vmin;
        for (double v : data) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
};

/// Fills out[j] = a(t, x_j) over the cell nodes; the coefficient samplers the
/// spectral module consumes (habitat expressions, effective coefficients
/// built from orbits) all reduce to this signature.
using CoeffSampler = std::function<void(double t, std::span<double> out)>;

}  // namespace nldisp

#endif
