// Test-only oracles, independent of the library's computation paths:
// adaptive quadrature for kernel moments, dense mu-scans for speeds, and a
// fine-step RK4 integrator for scalar periodic orbits.
#ifndef NLDISP_TEST_ORACLES_HPP
#define NLDISP_TEST_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "nldisp/kernel.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double left = simpson(f, a, m);
    double right = simpson(f, m, b);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, right, 0.5 * tol, depth - 1);
}

inline double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-12) {
    return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, 48);
}

/// kappa_hat(mu) = integral of e^{-mu z} kappa(z) dz by adaptive quadrature,
/// split at the kink z = 0.
inline double kernel_moment(const nldisp::KernelSpec& ks, double mu) {
    auto f = [&](double z) { return std::exp(-mu * z) * nldisp::kernel_density(ks, z); };
    return adaptive_quad(f, -ks.r0, 0.0) + adaptive_quad(f, 0.0, ks.r0);
}

/// Dense mu-scan of (kappa_hat(mu) - 1 + a)/mu; independent route to the
/// constant-coefficient spreading speed.
struct ScanResult {
    double c_star, mu_star;
};

inline ScanResult dense_scan_speed(const nldisp::KernelSpec& ks, double a, double mu_lo = 1e-3,
                                   double mu_hi = 12.0, double step = 1e-4) {
    ScanResult best{1e300, 0.0};
    for (double mu = mu_lo; mu <= mu_hi; mu += step) {
        double c = (kernel_moment(ks, mu) - 1.0 + a) / mu;
        if (c < best.c_star) best = ScanResult{c, mu};
    }
    return best;
}

/// Periodic orbit of the scalar ODE u' = f(t, u) with period T: fine-step
/// RK4, iterated until the period map contracts below tol. Returns u(t_k)
/// at nt_out equally spaced times.
inline std::vector<double> rk4_periodic_orbit(const std::function<double(double, double)>& f,
                                              double T, double u0, int steps_per_period,
                                              int nt_out, double tol = 1e-12,
                                              int max_periods = 100000) {
    double u = u0;
    double dt = T / steps_per_period;
    auto rk4_step = [&](double t, double y) {
        double k1 = f(t, y);
        double k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1);
        double k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2);
        double k4 = f(t + dt, y + dt * k3);
        return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    for (int period = 0; period < max_periods; ++period) {
        double start = u;
        for (int k = 0; k < steps_per_period; ++k) u = rk4_step(k * dt, u);
        if (std::fabs(u - start) < tol) break;
    }
    std::vector<double> out(static_cast<std::size_t>(nt_out));
    int per_out = steps_per_period / nt_out;
    double t = 0.0;
    for (int k = 0; k < nt_out; ++k) {
        out[static_cast<std::size_t>(k)] = u;
        for (int s = 0; s < per_out; ++s) {
            u = rk4_step(t, u);
            t += dt;
        }
    }
    return out;
}

}  // namespace oracle

#endif
