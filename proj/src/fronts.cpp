#include "nldisp/fronts.hpp"

#include <cmath>
#include <limits>

#include "nldisp/errors.hpp"
#include "nldisp/speeds.hpp"

namespace nldisp {

FrontInit make_front(const HabitatSpec& h, const LineGrid& g, int xi, double s0, double delta,
                     double sharpness, const PeriodicOrbit& ustar, const PeriodicOrbit& vstar) {
    if (xi != 1 && xi != -1) throw UsageError("xi must be +1 or -1");
    if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must be in (0,1)");
    if (!(sharpness > 0.0)) throw UsageError("sharpness must be positive");
    if (std::fabs(s0) + front_cutoff >= g.half_length())
        throw DomainTooSmall("|s0| + cutoff = " + std::to_string(std::fabs(s0) + front_cutoff) +
                             " must stay below L = " + std::to_string(g.half_length()));
    (void)h;
    const int n = g.n();
    const int nx = g.cell.nx;
    FrontInit init;
    init.s0 = s0;
    init.delta = delta;
    init.sharpness = sharpness;
    init.u0.resize(static_cast<std::size_t>(n));
    init.v0.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = g.x(i) * xi - s0;
        double ramp = s >= front_cutoff ? 0.0 : 1.0 - front_ramp(sharpness * s);
        int ph = ((i % nx) + nx) % nx;
        init.u0[static_cast<std::size_t>(i)] = (1.0 - delta) * ustar.at(0, ph) * ramp;
        init.v0[static_cast<std::size_t>(i)] = (1.0 - delta) * vstar.at(0, ph) * ramp;
    }
    return init;
}

namespace {

// Rightmost (in x*xi) crossing of u = theta * u_ref; NaN when not bracketed.
double level_position(std::span<const double> u, const LineGrid& g, int xi, int krow,
                      const PeriodicOrbit& ustar, double theta) {
    const int n = g.n();
    const int nx = g.cell.nx;
    auto phi = [&](int i) {
        int ph = ((i % nx) + nx) % nx;
        return u[static_cast<std::size_t>(i)] - theta * ustar.at(krow, ph);
    };
    if (xi > 0) {
        if (phi(n - 1) >= 0.0) return std::numeric_limits<double>::infinity();
        for (int i = n - 2; i >= 0; --i) {
            double a = phi(i), b = phi(i + 1);
            if (a >= 0.0) return g.x(i) + g.dx() * a / (a - b);
        }
    } else {
        if (phi(0) >= 0.0) return std::numeric_limits<double>::infinity();
        for (int i = 1; i < n; ++i) {
            double a = phi(i), b = phi(i - 1);
            if (a >= 0.0) return -(g.x(i) - g.dx() * a / (a - b));
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void linear_fit(std::span<const double> t, std::span<const double> y, double& slope,
                double& intercept, double& r2) {
    const std::size_t n = t.size();
    double st = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
    }
    double mt = st / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (t[i] - mt) * (t[i] - mt);
        sxy += (t[i] - mt) * (y[i] - my);
    }
    slope = sxx > 0 ? sxy / sxx : 0.0;
    intercept = my - slope * mt;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (intercept + slope * t[i]);
        ss_res += e * e;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-18 ? 1.0 : 0.0);
}

}  // namespace

FrontRun run_front(const HabitatSpec& h, const LineGrid& g, const TimeGrid& tg, int xi,
                   const PeriodicOrbit& ustar, const PeriodicOrbit& vstar, const FrontInit& init,
                   double t_end, int stride, double c_estimate) {
    if (!(t_end > 0.0)) throw UsageError("t_end must be positive");
    const double L = g.half_length();
    const double r0 = h.kernel().r0;
    const double guard = r0 + 5.0 * g.dx();
    double predicted = init.s0 + std::max(0.0, c_estimate) * t_end + front_cutoff + guard;
    if (predicted > L)
        throw DomainTooSmall("predicted front extent " + std::to_string(predicted) +
                             " exceeds L = " + std::to_string(L) +
                             "; increase L or shorten t_end");
    bool soft_warning = L < (std::max(0.0, c_estimate) + 1.0) * t_end + front_cutoff;

    if (ustar.tg.nt != tg.nt || vstar.tg.nt != tg.nt)
        throw Error("orbit time grids must match the simulation grid");

    LineStepper::Pad left = xi > 0 ? LineStepper::Pad::orbit : LineStepper::Pad::zero;
    LineStepper::Pad right = xi > 0 ? LineStepper::Pad::zero : LineStepper::Pad::orbit;
    LineStepper stepper(h, SystemTag::cooperative, g, tg, &ustar, &vstar, left, right);

    long long steps = static_cast<long long>(std::llround(t_end / tg.dt()));
    long long record_every = std::max(1LL, static_cast<long long>(tg.nt / std::max(1, stride)));

    FrontRun run;
    run.t_end = t_end;
    run.xi = xi;
    run.soft_margin_warning = soft_warning;

    Field u = init.u0, v = init.v0;
    run.traj.times.push_back(0.0);
    run.traj.u.push_back(u);
    run.traj.v.push_back(v);
    for (long long k = 0; k < steps; ++k) {
        stepper.step(k, u, v);
        if ((k + 1) % record_every == 0 || k + 1 == steps) {
            double t = (k + 1) * tg.dt();
            run.traj.times.push_back(t);
            run.traj.u.push_back(u);
            run.traj.v.push_back(v);
            int krow = static_cast<int>((k + 1) % tg.nt);
            double lead = level_position(u, g, xi, krow, ustar, 0.01);
            if (std::isinf(lead) || (std::isfinite(lead) && lead > L - guard))
                throw FrontHitBoundary("1% level at x*xi = " + std::to_string(lead) + " by t = " +
                                       std::to_string(t));
        }
    }
    run.traj.stats = stepper.stats();
    return run;
}

std::vector<LevelTrack> track_levels(const FrontRun& run, const HabitatSpec& h,
                                     const LineGrid& g, const PeriodicOrbit& ustar,
                                     const std::vector<double>& levels) {
    (void)h;
    const Trajectory& traj = run.traj;
    if (traj.times.size() < 10)
        throw UsageError("level tracking needs at least 10 recorded snapshots");
    std::vector<LevelTrack> tracks;
    const double dt = ustar.tg.dt();
    for (double theta : levels) {
        LevelTrack tr;
        tr.theta = theta;
        for (std::size_t s = 0; s < traj.times.size(); ++s) {
            double t = traj.times[s];
            int krow = static_cast<int>(std::llround(t / dt)) % ustar.tg.nt;
            double pos = level_position(traj.u[s], g, run.xi, krow, ustar, theta);
            if (!std::isfinite(pos)) {
                // the 0.99 level only appears once the state has grown toward
                // u* behind the interface; missing early snapshots are fine
                if (t >= 0.5 * run.t_end)
                    throw LevelNotBracketed("theta = " + std::to_string(theta) + " at t = " +
                                            std::to_string(t));
                continue;
            }
            tr.times.push_back(t);
            tr.positions.push_back(pos);
        }
        // fit over the second half of the run only
        std::vector<double> ft, fy;
        for (std::size_t s = 0; s < tr.times.size(); ++s) {
            if (tr.times[s] >= 0.5 * run.t_end) {
                ft.push_back(tr.times[s]);
                fy.push_back(tr.positions[s]);
            }
        }
        if (ft.size() < 3) throw UsageError("too few snapshots in the fit window");
        linear_fit(ft, fy, tr.slope, tr.intercept, tr.r2);
        tracks.push_back(std::move(tr));
    }
    return tracks;
}

SpeedIntervalEstimate estimate_interval(const FrontRun& run, const HabitatSpec& h,
                                        const LineGrid& g, const PeriodicOrbit& ustar) {
    auto tracks = track_levels(run, h, g, ustar, {0.99, 0.01});
    SpeedIntervalEstimate est;
    est.low = std::move(tracks[0]);
    est.high = std::move(tracks[1]);
    est.c_low_hat = est.low.slope;
    est.c_high_hat = est.high.slope;
    if (est.low.r2 < 0.99 || est.high.r2 < 0.99)
        throw PoorFit("level fits r2(0.99-level) = " + std::to_string(est.low.r2) +
                      ", r2(0.01-level) = " + std::to_string(est.high.r2) +
                      " (need both >= 0.99); slopes " + std::to_string(est.low.slope) + ", " +
                      std::to_string(est.high.slope));
    return est;
}

}  // namespace nldisp
