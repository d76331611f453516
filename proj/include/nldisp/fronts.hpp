#ifndef NLDISP_FRONTS_HPP
#define NLDISP_FRONTS_HPP

#include "nldisp/evolve.hpp"
#include "nldisp/orbit.hpp"

namespace nldisp {

/// Distance beyond the interface at which front initial data is hard-zeroed.
constexpr double front_cutoff = 20.0;

/// Front-like initial data in transformed (cooperative) coordinates:
/// u0 = (1-delta) u*(0,x) (1 - eta(sharpness (x xi - s0))), zeroed for
/// x xi >= s0 + cutoff; same construction for v0 against v*.
struct FrontInit {
    Field u0, v0;
    double s0 = 0.0;
    double delta = 0.5;
    double sharpness = 1.0;
};

FrontInit make_front(const HabitatSpec& h, const LineGrid& g, int xi, double s0, double delta,
                     double sharpness, const PeriodicOrbit& ustar, const PeriodicOrbit& vstar);

struct FrontRun {
    Trajectory traj;           // transformed coordinates
    bool soft_margin_warning;  // L below the conservative (c+1) t_end + cutoff margin
    double t_end;
    int xi;
};

/// Long-time cooperative simulation on the line: behind-side pad is the
/// (u*, v*) periodic extension, ahead-side pad is (0, 0). Snapshots every
/// T/stride. Errors with FrontHitBoundary if the 1% level comes within
/// r0 + 5 dx of the ahead boundary.
FrontRun run_front(const HabitatSpec& h, const LineGrid& g, const TimeGrid& tg, int xi,
                   const PeriodicOrbit& ustar, const PeriodicOrbit& vstar, const FrontInit& init,
                   double t_end, int stride, double c_estimate);

struct LevelTrack {
    double theta = 0.0;
    std::vector<double> times;      // all recorded snapshot times
    std::vector<double> positions;  // X_theta(t), measured along x*xi
    double slope = 0.0, intercept = 0.0, r2 = 0.0;  // fit over t >= t_end/2
};

/// X_theta(t) = sup{ x xi : u(t,x) >= theta u*(t,x) } by linear
/// interpolation; least-squares slope over the second half of the run.
std::vector<LevelTrack> track_levels(const FrontRun& run, const HabitatSpec& h,
                                     const LineGrid& g, const PeriodicOrbit& ustar,
                                     const std::vector<double>& levels);

struct SpeedIntervalEstimate {
    LevelTrack low;   // theta = 0.99: lags the front; slope estimates c*_inf
    LevelTrack high;  // theta = 0.01: leads the front; slope estimates c*_sup
    double c_low_hat = 0.0;
    double c_high_hat = 0.0;
};

/// Empirical spreading-speed interval surrogates from the 0.99 / 0.01
/// relative levels; requires both fits to reach r^2 >= 0.99.
SpeedIntervalEstimate estimate_interval(const FrontRun& run, const HabitatSpec& h,
                                        const LineGrid& g, const PeriodicOrbit& ustar);

}  // namespace nldisp

#endif
