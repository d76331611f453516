#include "nldisp/determinacy.hpp"

#include <cmath>
#include <limits>

#include "nldisp/errors.hpp"

namespace nldisp {

namespace {

template <class F>
HlCheck sweep_orbit_grid(const PeriodicOrbit& ref, F&& slack_at) {
    HlCheck out;
    out.slack = std::numeric_limits<double>::infinity();
    const TimeGrid& tg = ref.tg;
    const CellGrid& g = ref.grid;
    for (int k = 0; k < tg.nt; ++k) {
        double t = k * tg.dt();
        for (int j = 0; j < g.nx; ++j) {
            double s = slack_at(k, j, t, g.x(j));
            if (s < out.slack) {
                out.slack = s;
                out.t_at = t;
                out.x_at = g.x(j);
            }
        }
    }
    out.ok = out.slack >= -tol_hyp;
    return out;
}

}  // namespace

HlCheck check_HL(const HabitatSpec& h, const PeriodicOrbit& ustar, const PeriodicOrbit& vstar,
                 int which) {
    if (ustar.tg.nt != vstar.tg.nt || ustar.grid.nx != vstar.grid.nx)
        throw Error("orbits must share the sampling grid");
    auto C = [&](Coeff c, double t, double x) { return h.coeff(c, t, x); };
    switch (which) {
        case 0:
            return sweep_orbit_grid(ustar, [&](int k, int j, double t, double x) {
                return C(Coeff::b2, t, x) * ustar.at(k, j) - C(Coeff::c2, t, x) * vstar.at(k, j);
            });
        case 1:
            return sweep_orbit_grid(ustar, [&](int k, int j, double t, double x) {
                double vs = vstar.at(k, j);
                double main = C(Coeff::a1, t, x) - C(Coeff::c1, t, x) * vs - C(Coeff::a2, t, x) +
                              2.0 * C(Coeff::c2, t, x) * vs - C(Coeff::b2, t, x) * vs;
                double f1 = C(Coeff::b1, t, x) - C(Coeff::c1, t, x);
                double f2 = C(Coeff::b2, t, x) - C(Coeff::c2, t, x);
                return std::min({main, f1, f2});
            });
        case 2: {
            CoefficientBounds bd = bounds(h, ustar.tg.nt, ustar.grid.nx);
            double ratio1 = bd.c1M / bd.b1L;
            double ratio2 = bd.c2M / bd.b2L;
            return sweep_orbit_grid(ustar, [&](int k, int j, double t, double x) {
                double vs = vstar.at(k, j);
                double common = C(Coeff::a1, t, x) - C(Coeff::c1, t, x) * vs -
                                C(Coeff::a2, t, x) + 2.0 * C(Coeff::c2, t, x) * vs;
                double b2vs = C(Coeff::b2, t, x) * vs;
                return std::min(common - b2vs * ratio1, common - b2vs * ratio2);
            });
        }
        default:
            throw UsageError("which must be 0, 1, or 2");
    }
}

WitnessFields witness_fields(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                             const SpeedResult& speed, const PeriodicOrbit& vstar,
                             const SpectralOptions& sopt) {
    WitnessFields w;
    w.mu_star = speed.mu_star;

    auto [eig, course] = principal_eigen_course(h, g, tg, xi, w.mu_star,
                                                effective_a1(h, vstar, g), sopt);
    w.lambda_star = eig.lambda;
    w.u_w = std::move(course);

    CoeffSampler a2t = transformed_a2(h, vstar, g);
    double lambda_shifted =
        principal_spectrum_point(h, g, tg, xi, w.mu_star, a2t, sopt).lambda;
    w.lambda2 = lambda_shifted - w.lambda_star;
    if (!(w.lambda2 < 0.0)) throw Lemma41Fails(w.lambda2);

    CoeffSampler forcing = [&h, &vstar, uw = &w.u_w, g](double t, std::span<double> out) {
        h.sample_row(Coeff::b2, t, g, out);
        for (int j = 0; j < g.nx; ++j) out[j] *= vstar.value(t, j) * uw->value(t, j);
    };
    w.v_w = nonhomogeneous_periodic(h, g, tg, xi, w.mu_star,
                                    shifted_sampler(a2t, -w.lambda_star), forcing);
    return w;
}

Lemma42Report check_lemma42(const HabitatSpec& h, const PeriodicOrbit& u_w,
                            const PeriodicOrbit& v_w) {
    Lemma42Report rep;
    auto C = [&](Coeff c, double t, double x) { return h.coeff(c, t, x); };
    rep.first = sweep_orbit_grid(u_w, [&](int k, int j, double t, double x) {
        return C(Coeff::b1, t, x) * u_w.at(k, j) - C(Coeff::c1, t, x) * v_w.at(k, j);
    });
    rep.second = sweep_orbit_grid(u_w, [&](int k, int j, double t, double x) {
        return C(Coeff::b2, t, x) * u_w.at(k, j) - C(Coeff::c2, t, x) * v_w.at(k, j);
    });
    return rep;
}

DeterminacyReport determinacy_verdict(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                      int xi, const DeterminacyOptions& opt) {
    DeterminacyReport rep;
    rep.xi = xi;
    rep.verdict = "not established";
    rep.primed = check_primed_hypotheses(h, std::max(8, tg.nt), std::max(8, g.nx));

    HbContext hb = check_hb(h, g, tg);
    rep.hb = hb.report;
    if (!rep.hb.hb1_ok) {
        rep.witness_error = "HB1 fails; orbits and witnesses unavailable";
        return rep;
    }
    rep.ustar = std::move(hb.ustar);
    rep.vstar = std::move(hb.vstar);
    const PeriodicOrbit& ustar = *rep.ustar;
    const PeriodicOrbit& vstar = *rep.vstar;

    rep.hl0 = check_HL(h, ustar, vstar, 0);
    rep.hl1 = check_HL(h, ustar, vstar, 1);
    rep.hl2 = check_HL(h, ustar, vstar, 2);

    rep.speed = linear_speed(h, g, tg, xi, vstar, opt.speed);

    try {
        WitnessFields w = witness_fields(h, g, tg, xi, rep.speed, vstar, opt.speed.spectral);
        rep.lambda2 = w.lambda2;
        rep.witness_ok = true;
        rep.lemma42 = check_lemma42(h, w.u_w, w.v_w);
    } catch (const Lemma41Fails& e) {
        rep.lambda2 = std::numeric_limits<double>::quiet_NaN();
        rep.witness_error = e.what();
    }

    try {
        rep.C0 = supersolution_C0(h, g, tg, xi, ustar, vstar, opt.c0);
    } catch (const Error& e) {
        rep.C0 = std::numeric_limits<double>::quiet_NaN();
        rep.c0_error = e.what();
    }

    if (opt.run_fronts) {
        try {
            double t_end = opt.t_end > 0.0 ? opt.t_end : 100.0 * tg.T;
            double L = opt.L;
            if (L <= 0.0)
                L = std::fabs(opt.s0) + front_cutoff +
                    (std::max(0.0, rep.speed.c_star) + 0.5) * t_end + 4.0 * h.kernel().r0 + 2.0;
            LineGrid line = make_line_grid(g, L);
            FrontInit init =
                make_front(h, line, xi, opt.s0, opt.delta, opt.sharpness, ustar, vstar);
            FrontRun run = run_front(h, line, tg, xi, ustar, vstar, init, t_end, opt.stride,
                                     rep.speed.c_star);
            rep.front_margin_warning = run.soft_margin_warning;
            SpeedIntervalEstimate est = estimate_interval(run, h, line, ustar);
            rep.c_low_hat = est.c_low_hat;
            rep.c_high_hat = est.c_high_hat;
            rep.r2_low = est.low.r2;
            rep.r2_high = est.high.r2;
            double scale = std::max(std::fabs(rep.speed.c_star), 1e-12);
            rep.gap_low_rel = std::fabs(rep.c_low_hat - rep.speed.c_star) / scale;
            rep.gap_high_rel = std::fabs(rep.c_high_hat - rep.speed.c_star) / scale;
            rep.front_ok = true;
            rep.interval = std::move(est);
        } catch (const Error& e) {
            rep.front_error = e.what();
        }
    }

    rep.determinate = rep.hb.hb1_ok && rep.hb.hb2_ok && rep.hl0.ok &&
                      (rep.hl1.ok || rep.hl2.ok) && rep.witness_ok && rep.lambda2 < 0.0 &&
                      rep.lemma42.ok();
    rep.verdict = rep.determinate ? "determinate" : "not established";
    return rep;
}

}  // namespace nldisp
