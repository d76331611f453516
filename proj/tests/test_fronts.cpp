#include <cmath>

#include "doctest.h"
#include "nldisp/errors.hpp"
#include "nldisp/fronts.hpp"
#include "nldisp/speeds.hpp"
#include "nldisp/spectral.hpp"

using namespace nldisp;

namespace {

LoadedConfig example_habitat() {
    return load_habitat(
        "[periods]\nT = 1\np = 1\n[kernel]\nshape = uniform\nr0 = 1\n"
        "[coefficients]\na1 = \"2\"\nb1 = \"1\"\nc1 = \"0.5\"\na2 = \"1\"\nb2 = \"1\"\nc2 = "
        "\"1\"\n");
}

struct Orbits {
    PeriodicOrbit ustar, vstar;
};

Orbits orbits_for(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg) {
    return Orbits{periodic_attractor(h, 1, g, tg), periodic_attractor(h, 2, g, tg)};
}

// synthetic run: piecewise-linear profile translating at exactly speed c, so
// level interpolation is exact
FrontRun synthetic_translating_run(const LineGrid& g, double c, double t_end, int snapshots,
                                   double u_top) {
    FrontRun run;
    run.t_end = t_end;
    run.xi = +1;
    run.soft_margin_warning = false;
    auto profile = [&](double x, double t) {
        double s = x - c * t;
        double ramp = std::clamp(0.5 - 0.1 * s, 0.0, 1.0);
        return u_top * ramp;
    };
    for (int k = 0; k <= snapshots; ++k) {
        double t = t_end * k / snapshots;
        Field u(static_cast<std::size_t>(g.n()));
        for (int i = 0; i < g.n(); ++i) u[static_cast<std::size_t>(i)] = profile(g.x(i), t);
        run.traj.times.push_back(t);
        run.traj.u.push_back(u);
        run.traj.v.push_back(u);
    }
    return run;
}

PeriodicOrbit constant_orbit(const CellGrid& g, const TimeGrid& tg, double value) {
    PeriodicOrbit orbit;
    orbit.grid = g;
    orbit.tg = tg;
    orbit.data.assign(static_cast<std::size_t>(tg.nt) * g.nx, value);
    orbit.finalize_stats();
    return orbit;
}

}  // namespace

TEST_CASE("make_front satisfies the membership invariants") {
    LoadedConfig cfg = example_habitat();
    CellGrid g = make_cell_grid(32, 1.0);
    TimeGrid tg = make_time_grid(1.0, 64, 12.0);
    Orbits orb = orbits_for(cfg.habitat, g, tg);

    SUBCASE("delta = 0.5, s0 = 0") {
        LineGrid line = make_line_grid(g, 60.0);
        FrontInit init = make_front(cfg.habitat, line, +1, 0.0, 0.5, 1.0, orb.ustar, orb.vstar);
        for (int i = 0; i < line.n(); ++i) {
            double x = line.x(i);
            int ph = ((i % 32) + 32) % 32;
            CHECK(init.u0[static_cast<std::size_t>(i)] <= 0.5 * orb.ustar.at(0, ph));
            CHECK(init.u0[static_cast<std::size_t>(i)] < orb.ustar.at(0, ph));  // strict
            if (x >= front_cutoff) CHECK(init.u0[static_cast<std::size_t>(i)] == 0.0);
            if (x <= -front_cutoff)
                CHECK(init.u0[static_cast<std::size_t>(i)] ==
                      doctest::Approx(0.5 * orb.ustar.at(0, ph)).epsilon(1e-8));
        }
        double inf_behind = 1e300;
        for (int i = 0; i < line.n(); ++i)
            if (line.x(i) <= -front_cutoff)
                inf_behind = std::min(inf_behind, init.u0[static_cast<std::size_t>(i)]);
        CHECK(inf_behind > 0.0);
    }

    SUBCASE("delta = 0.1, s0 = -10, L = 200") {
        LineGrid line = make_line_grid(g, 200.0);
        FrontInit init = make_front(cfg.habitat, line, +1, -10.0, 0.1, 1.0, orb.ustar, orb.vstar);
        for (int i = 0; i < line.n(); ++i) {
            double x = line.x(i);
            int ph = ((i % 32) + 32) % 32;
            CHECK(init.u0[static_cast<std::size_t>(i)] <= 0.9 * orb.ustar.at(0, ph) + 1e-15);
            CHECK(init.v0[static_cast<std::size_t>(i)] <= 0.9 * orb.vstar.at(0, ph) + 1e-15);
            if (x + 10.0 >= front_cutoff) CHECK(init.u0[static_cast<std::size_t>(i)] == 0.0);
        }
    }

    SUBCASE("domain too small") {
        LineGrid line = make_line_grid(g, 24.0);
        CHECK_THROWS_AS(make_front(cfg.habitat, line, +1, 10.0, 0.5, 1.0, orb.ustar, orb.vstar),
                        DomainTooSmall);
    }
}

TEST_CASE("level tracking on synthetic profiles") {
    CellGrid g = make_cell_grid(32, 1.0);
    LineGrid line = make_line_grid(g, 50.0);
    TimeGrid tg{64, 1.0};
    PeriodicOrbit uref = constant_orbit(g, tg, 2.0);

    SUBCASE("translating ramp: slope equals c to 1e-10 at every level") {
        FrontRun run = synthetic_translating_run(line, 0.7, 20.0, 40, 2.0);
        auto tracks = track_levels(run, example_habitat().habitat, line, uref,
                                   {0.9, 0.5, 0.1});
        for (const LevelTrack& tr : tracks) {
            CHECK(std::fabs(tr.slope - 0.7) < 1e-10);
            CHECK(tr.r2 == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("stationary profile: slope 0") {
        FrontRun run = synthetic_translating_run(line, 0.0, 20.0, 40, 2.0);
        auto tracks = track_levels(run, example_habitat().habitat, line, uref, {0.5});
        CHECK(tracks[0].slope == 0.0);
    }

    SUBCASE("estimate_interval on a clean translation: both slopes equal c") {
        FrontRun run = synthetic_translating_run(line, 0.7, 20.0, 40, 2.0);
        SpeedIntervalEstimate est =
            estimate_interval(run, example_habitat().habitat, line, uref);
        CHECK(std::fabs(est.c_low_hat - 0.7) < 1e-10);
        CHECK(std::fabs(est.c_high_hat - 0.7) < 1e-10);
    }

    SUBCASE("incoherent data is rejected as PoorFit") {
        FrontRun run = synthetic_translating_run(line, 0.7, 20.0, 40, 2.0);
        // scramble the second half: positions no longer follow a line
        for (std::size_t s = run.traj.times.size() / 2; s < run.traj.times.size(); ++s) {
            double wobble = 12.0 * std::sin(7.0 * static_cast<double>(s));
            for (double& v : run.traj.u[s]) v *= 1.0;
            // translate the whole profile by the wobble
            Field& u = run.traj.u[s];
            Field orig = u;
            int shift = static_cast<int>(wobble / line.dx());
            for (int i = 0; i < line.n(); ++i) {
                int q = std::clamp(i - shift, 0, line.n() - 1);
                u[static_cast<std::size_t>(i)] = orig[static_cast<std::size_t>(q)];
            }
        }
        CHECK_THROWS_AS(estimate_interval(run, example_habitat().habitat, line, uref), PoorFit);
    }
}

TEST_CASE("line steady states: all-zero and all-(u*,v*) with consistent pads") {
    LoadedConfig cfg = example_habitat();
    CellGrid g = make_cell_grid(32, 1.0);
    TimeGrid tg = make_time_grid(1.0, 64, 12.0);
    Orbits orb = orbits_for(cfg.habitat, g, tg);
    LineGrid line = make_line_grid(g, 10.0);
    const int n = line.n();

    SUBCASE("zero stays zero with zero pads") {
        LineStepper st(cfg.habitat, SystemTag::cooperative, line, tg, &orb.ustar, &orb.vstar,
                       LineStepper::Pad::zero, LineStepper::Pad::zero);
        Field u(static_cast<std::size_t>(n), 0.0), v(static_cast<std::size_t>(n), 0.0);
        for (long long k = 0; k < 2 * tg.nt; ++k) st.step(k, u, v);
        for (double x : u) CHECK(x == 0.0);
        for (double x : v) CHECK(x == 0.0);
    }

    SUBCASE("the coexistence state is stationary with orbit pads") {
        LineStepper st(cfg.habitat, SystemTag::cooperative, line, tg, &orb.ustar, &orb.vstar,
                       LineStepper::Pad::orbit, LineStepper::Pad::orbit);
        Field u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            int ph = ((i % 32) + 32) % 32;
            u[static_cast<std::size_t>(i)] = orb.ustar.at(0, ph);
            v[static_cast<std::size_t>(i)] = orb.vstar.at(0, ph);
        }
        for (long long k = 0; k < 3 * tg.nt; ++k) st.step(k, u, v);
        for (int i = 0; i < n; ++i) {
            int ph = ((i % 32) + 32) % 32;
            CHECK(std::fabs(u[static_cast<std::size_t>(i)] - orb.ustar.at(0, ph)) < 1e-10);
            CHECK(std::fabs(v[static_cast<std::size_t>(i)] - orb.vstar.at(0, ph)) < 1e-10);
        }
    }
}

TEST_CASE("front run on the constants habitat approaches the linear speed") {
    LoadedConfig cfg = example_habitat();
    CellGrid g = make_cell_grid(32, 1.0);
    TimeGrid tg = make_time_grid(1.0, 64, 12.0);
    Orbits orb = orbits_for(cfg.habitat, g, tg);
    SpeedResult sp = linear_speed(cfg.habitat, g, tg, +1, orb.vstar);

    LineGrid line = make_line_grid(g, 80.0);
    FrontInit init = make_front(cfg.habitat, line, +1, -20.0, 0.5, 1.0, orb.ustar, orb.vstar);
    FrontRun run = run_front(cfg.habitat, line, tg, +1, orb.ustar, orb.vstar, init, 40.0, 1,
                             sp.c_star);
    SpeedIntervalEstimate est = estimate_interval(run, cfg.habitat, line, orb.ustar);

    CHECK(std::fabs(est.c_low_hat - sp.c_star) < 0.05 * sp.c_star + 0.05);
    CHECK(std::fabs(est.c_high_hat - sp.c_star) < 0.05 * sp.c_star + 0.05);
    CHECK(est.c_low_hat <= est.c_high_hat + 0.05);  // short-run transient gap

    SUBCASE("behind the front the state approaches (u*, v*)") {
        double worst = 0.0;
        const Field& u = run.traj.u.back();
        const Field& v = run.traj.v.back();
        int i_behind = static_cast<int>(0.25 * line.periods_per_side * g.nx);  // x = -0.75 L
        for (int i = i_behind - 5; i <= i_behind + 5; ++i) {
            int ph = ((i % 32) + 32) % 32;
            worst = std::max(worst, std::fabs(u[static_cast<std::size_t>(i)] -
                                              orb.ustar.at(0, ph)));
            worst = std::max(worst, std::fabs(v[static_cast<std::size_t>(i)] -
                                              orb.vstar.at(0, ph)));
        }
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("front boundary collision raises FrontHitBoundary") {
    LoadedConfig cfg = example_habitat();
    CellGrid g = make_cell_grid(32, 1.0);
    TimeGrid tg = make_time_grid(1.0, 64, 12.0);
    Orbits orb = orbits_for(cfg.habitat, g, tg);
    LineGrid line = make_line_grid(g, 30.0);
    FrontInit init = make_front(cfg.habitat, line, +1, 0.0, 0.5, 1.0, orb.ustar, orb.vstar);
    // lie about the speed estimate so the precondition passes
    CHECK_THROWS_AS(run_front(cfg.habitat, line, tg, +1, orb.ustar, orb.vstar, init, 45.0, 1, 0.0),
                    FrontHitBoundary);
}

TEST_CASE("run_front refuses a domain the front would certainly escape") {
    LoadedConfig cfg = example_habitat();
    CellGrid g = make_cell_grid(32, 1.0);
    TimeGrid tg = make_time_grid(1.0, 64, 12.0);
    Orbits orb = orbits_for(cfg.habitat, g, tg);
    LineGrid line = make_line_grid(g, 30.0);
    FrontInit init = make_front(cfg.habitat, line, +1, 0.0, 0.5, 1.0, orb.ustar, orb.vstar);
    CHECK_THROWS_AS(
        run_front(cfg.habitat, line, tg, +1, orb.ustar, orb.vstar, init, 100.0, 1, 1.2),
        DomainTooSmall);
}
