#ifndef NLDISP_SPECTRAL_HPP
#define NLDISP_SPECTRAL_HPP

#include <utility>

#include "nldisp/evolve.hpp"
#include "nldisp/habitat.hpp"
#include "nldisp/orbit.hpp"

namespace nldisp {

struct SpectralOptions {
    double tol_lambda = 1e-10;   // successive per-period log-growth difference
    double tol_residual = 1e-8;  // ||Phi_T phi - e^{lambda T} phi||_inf
    int max_periods = 10000;
};

struct SpectralResult {
    double lambda = 0.0;
    Field eigenfunction;  // strictly positive, sup-normalized, at t = 0
    int iterations = 0;   // periods marched
    double residual = 0.0;
};

/// Coefficient samplers for the linear problems. The returned closures hold
/// references; keep the habitat/orbits alive while using them.
CoeffSampler coeff_sampler(const HabitatSpec& h, Coeff c, const CellGrid& g);
/// a1 - c1 v* (linearization at the invaded state, Eq. driving lambda_xi).
CoeffSampler effective_a1(const HabitatSpec& h, const PeriodicOrbit& vstar, const CellGrid& g);
/// a2 - b2 u* (stability of the u-only state).
CoeffSampler stability_a2(const HabitatSpec& h, const PeriodicOrbit& ustar, const CellGrid& g);
/// a2 - 2 c2 v* (v-equation of the cooperative linearization).
CoeffSampler transformed_a2(const HabitatSpec& h, const PeriodicOrbit& vstar, const CellGrid& g);
CoeffSampler shifted_sampler(CoeffSampler base, double shift);

/// Principal spectrum point lambda_0(xi, mu, a) of -d_t + K_{xi,mu} - I + aI
/// on time-space periodic functions: power iteration on the discrete period
/// map, built from per-step exponential propagation (midpoint coefficients,
/// substepped shifted Taylor; positive by construction).
SpectralResult principal_spectrum_point(const HabitatSpec& h, const CellGrid& g,
                                        const TimeGrid& tg, int xi, double mu,
                                        const CoeffSampler& a, const SpectralOptions& opt = {});

/// Same, also returning the eigenfunction's time course over one period
/// (globally sup-normalized): the witness field u_{xi,mu}.
std::pair<SpectralResult, PeriodicOrbit> principal_eigen_course(const HabitatSpec& h,
                                                                const CellGrid& g,
                                                                const TimeGrid& tg, int xi,
                                                                double mu, const CoeffSampler& a,
                                                                const SpectralOptions& opt = {});

/// Gershgorin-style bracket for lambda_0 from the operator's row sums:
/// [min_t(kappa_hat - 1 + min_x a), max_t(kappa_hat - 1 + max_x a)].
struct LambdaBounds {
    double lo = 0.0, hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
};
LambdaBounds lambda_row_sum_bounds(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                   int xi, double mu, const CoeffSampler& a);

/// Power iteration is run exactly while T * (row-sum bound) stays below this;
/// beyond it the period-map norm is e^600-scale and samples fall back to the
/// row-sum bracket midpoint (flagged approx by the speeds module).
constexpr double exact_log_growth_cap = 600.0;
bool lambda_exactly_computable(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                               int xi, double mu, const CoeffSampler& a);

struct OrbitOptions {
    double tol_orbit = 1e-8;  // period-to-period sup drift
    int max_periods = 100000;
    CellStepper::Scheme scheme = CellStepper::Scheme::euler;
    int substeps = 1;  // internal steps per stored row
};

/// Positive periodic attractor u* (species 1) or v* (species 2) of the
/// single-species equation, marched from the constant a_M/b_L (resp.
/// a_M/c_L) until the period map contracts below tol_orbit. Checks (HB1)
/// first. Production call sites use the default Euler scheme at the grid dt,
/// which keeps the orbit exactly consistent with the evolve stencil.
PeriodicOrbit periodic_attractor(const HabitatSpec& h, int species, const CellGrid& g,
                                 const TimeGrid& tg, const OrbitOptions& opt = {});

/// Unique periodic solution of u_t = K_{xi,mu} u - u + a u + forcing, valid
/// when lambda_0(xi, mu, a) < 0 (checked; the orbit is its global attractor).
PeriodicOrbit nonhomogeneous_periodic(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                      int xi, double mu, const CoeffSampler& a,
                                      const CoeffSampler& forcing, const OrbitOptions& opt = {},
                                      double* lambda_out = nullptr);

/// Numeric (HB1)/(HB2) verdicts and the orbits they need.
struct HbReport {
    double lambda_a1 = 0.0, lambda_a2 = 0.0;
    double lambda_invasion = 0.0;   // lambda_0(a1 - c1 v*)
    double lambda_stability = 0.0;  // lambda_0(a2 - b2 u*)
    bool hb1_ok = false;
    bool hb2_ok = false;
};

struct HbContext {
    HbReport report;
    PeriodicOrbit ustar, vstar;
};

HbContext check_hb(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                   const OrbitOptions& opt = {});

}  // namespace nldisp

#endif
