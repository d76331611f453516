#ifndef NLDISP_SPEEDS_HPP
#define NLDISP_SPEEDS_HPP

#include "nldisp/spectral.hpp"

namespace nldisp {

struct SpeedSample {
    double mu = 0.0;
    double lambda = 0.0;
    double c = 0.0;  // lambda / mu
    bool approx = false;
};

struct SpeedResult {
    double c_star = 0.0;
    double mu_star = 0.0;
    double lambda_star = 0.0;
    std::vector<SpeedSample> samples;  // geometric grid plus the refined minimum
    double bracket_lo = 0.0, bracket_hi = 0.0;
};

struct SpeedOptions {
    int k_min = -8, k_max = 8;      // mu grid mu0 * 2^k, mu0 = 1/r0
    double golden_rel_tol = 1e-5;   // stop when the bracket width < tol * mu*
    int max_bracket_expansions = 2;
    int jobs = 1;
    SpectralOptions spectral;
};

/// inf_{mu>0} lambda_0(xi, mu, a)/mu for an arbitrary effective coefficient.
SpeedResult minimize_speed(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                           const CoeffSampler& a, const SpeedOptions& opt = {});

/// Linear spreading-speed lower bound c_bar*_inf(xi): effective coefficient
/// a1 - c1 v*.
SpeedResult linear_speed(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                         const PeriodicOrbit& vstar, const SpeedOptions& opt = {});

/// Single-species spreading speed (coefficient a_k alone; b never enters).
SpeedResult single_species_speed(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                 int xi, int species, const SpeedOptions& opt = {});

struct C0Options {
    double tol = 1e-6;
    double cap = 50.0;
    double resolution = 0.01;
};

/// Smallest C on the resolution grid for which the translating profile
/// u* (1 - eta(x xi - C t)), v* (1 - eta(x xi - C t)) has nonnegative
/// discrete evolution residual (same Euler stencil as evolve) over one
/// period; upper-bounds the fast edge of the spreading interval.
double supersolution_C0(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                        const PeriodicOrbit& ustar, const PeriodicOrbit& vstar,
                        const C0Options& opt = {});

/// Minimum over the window of the Lemma-3.5 discrete residual at speed C
/// (diagnostic surface behind supersolution_C0).
double supersolution_min_residual(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                  int xi, const PeriodicOrbit& ustar, const PeriodicOrbit& vstar,
                                  double C);

/// Front ramp eta(s) = (1 + tanh(s/2))/2; saturates exactly to {0, 1} in
/// floating point, so far fields of profiles built from it are exact.
double front_ramp(double s);

}  // namespace nldisp

#endif
