#include "nldisp/spectral.hpp"

#include <cmath>
#include <limits>

#include "nldisp/errors.hpp"

namespace nldisp {

CoeffSampler coeff_sampler(const HabitatSpec& h, Coeff c, const CellGrid& g) {
    return [&h, c, g](double t, std::span<double> out) { h.sample_row(c, t, g, out); };
}

CoeffSampler effective_a1(const HabitatSpec& h, const PeriodicOrbit& vstar, const CellGrid& g) {
    return [&h, &vstar, g](double t, std::span<double> out) {
        h.sample_row(Coeff::a1, t, g, out);
        std::vector<double> c1(static_cast<std::size_t>(g.nx));
        h.sample_row(Coeff::c1, t, g, c1);
        for (int j = 0; j < g.nx; ++j) out[j] -= c1[static_cast<std::size_t>(j)] * vstar.value(t, j);
    };
}

CoeffSampler stability_a2(const HabitatSpec& h, const PeriodicOrbit& ustar, const CellGrid& g) {
    return [&h, &ustar, g](double t, std::span<double> out) {
        h.sample_row(Coeff::a2, t, g, out);
        std::vector<double> b2(static_cast<std::size_t>(g.nx));
        h.sample_row(Coeff::b2, t, g, b2);
        for (int j = 0; j < g.nx; ++j) out[j] -= b2[static_cast<std::size_t>(j)] * ustar.value(t, j);
    };
}

CoeffSampler transformed_a2(const HabitatSpec& h, const PeriodicOrbit& vstar, const CellGrid& g) {
    return [&h, &vstar, g](double t, std::span<double> out) {
        h.sample_row(Coeff::a2, t, g, out);
        std::vector<double> c2(static_cast<std::size_t>(g.nx));
        h.sample_row(Coeff::c2, t, g, c2);
        for (int j = 0; j < g.nx; ++j)
            out[j] -= 2.0 * c2[static_cast<std::size_t>(j)] * vstar.value(t, j);
    };
}

CoeffSampler shifted_sampler(CoeffSampler base, double shift) {
    return [base = std::move(base), shift](double t, std::span<double> out) {
        base(t, out);
        for (double& v : out) v += shift;
    };
}

namespace {

// Per-step exponential propagator for u_t = K_{xi,mu} u - u + a(t,x) u: each
// step applies exp(dt * A(t_mid)) via a Taylor series of the nonnegatively
// shifted matrix, substepped so the shifted norm stays small. All arithmetic
// on nonnegative terms, so positivity survives rounding.
class LinearPropagator {
public:
    LinearPropagator(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                     double mu, const CoeffSampler& a)
        : g_(g), tg_(tg) {
        kernel_ = wrap_to_cell(twist(sample_kernel(h.kernel(), g.dx()), xi, mu), g);
        const int nx = g.nx;
        a_mid_.resize(static_cast<std::size_t>(tg.nt) * nx);
        a_min_.resize(static_cast<std::size_t>(tg.nt));
        a_max_.resize(static_cast<std::size_t>(tg.nt));
        for (int k = 0; k < tg.nt; ++k) {
            std::span<double> row(a_mid_.data() + static_cast<std::size_t>(k) * nx,
                                  static_cast<std::size_t>(nx));
            a((k + 0.5) * tg.dt(), row);
            double lo = row[0], hi = row[0];
            for (double v : row) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            a_min_[static_cast<std::size_t>(k)] = lo;
            a_max_[static_cast<std::size_t>(k)] = hi;
        }
        work_y_.resize(static_cast<std::size_t>(nx));
        work_conv_.resize(static_cast<std::size_t>(nx));
        work_acc_.resize(static_cast<std::size_t>(nx));
    }

    double max_row_sum() const {
        double m = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < tg_.nt; ++k)
            m = std::max(m, kernel_.weight_sum - 1.0 + a_max_[static_cast<std::size_t>(k)]);
        return m;
    }
    double min_row_sum() const {
        double m = std::numeric_limits<double>::infinity();
        for (int k = 0; k < tg_.nt; ++k)
            m = std::min(m, kernel_.weight_sum - 1.0 + a_min_[static_cast<std::size_t>(k)]);
        return m;
    }

    // Advances one step; v is renormalized when it leaves [1e-100, 1e100]
    // and the removed log magnitude is accumulated into log_acc.
    void step(int k, Field& v, double& log_acc) {
        const int nx = g_.nx;
        const double dt = tg_.dt();
        const double* a_row = a_mid_.data() + static_cast<std::size_t>(k) * nx;
        const double amin = a_min_[static_cast<std::size_t>(k)];
        const double shift_dt = dt * (amin - 1.0);
        double norm_shifted = dt * (kernel_.weight_sum + a_max_[static_cast<std::size_t>(k)] - amin);
        int nsub = std::max(1, static_cast<int>(std::ceil(norm_shifted / 2.0)));
        const double dts = dt / nsub;
        const double shift_sub = shift_dt / nsub;
        const double eshift = std::exp(shift_sub);

        for (int s = 0; s < nsub; ++s) {
            // acc = exp(M') v with M' = dts*(K + (a - amin) I), all entries >= 0
            work_acc_ = v;
            work_y_ = v;
            for (int term = 1; term <= 120; ++term) {
                convolve_cell(kernel_, work_y_, work_conv_);
                double inv = 1.0 / term;
                double ymax = 0.0;
                for (int j = 0; j < nx; ++j) {
                    double y = (dts * work_conv_[j] + dts * (a_row[j] - amin) * work_y_[j]) * inv;
                    work_y_[j] = y;
                    work_acc_[j] += y;
                    ymax = std::max(ymax, y);
                }
                double accmax = 0.0;
                for (int j = 0; j < nx; ++j) accmax = std::max(accmax, work_acc_[j]);
                if (ymax <= 1e-17 * accmax) break;
            }
            double vmax = 0.0;
            for (int j = 0; j < nx; ++j) {
                v[j] = work_acc_[j] * eshift;
                vmax = std::max(vmax, v[j]);
            }
            if (!(vmax > 0.0) || !std::isfinite(vmax))
                throw NonFiniteState("linear period map produced a non-positive iterate");
            if (vmax > 1e100 || vmax < 1e-100) {
                log_acc += std::log(vmax);
                for (int j = 0; j < nx; ++j) v[j] /= vmax;
            }
        }
    }

    // One full period; returns the log growth. v comes back sup-normalized.
    double advance_period(Field& v) {
        double log_acc = 0.0;
        for (int k = 0; k < tg_.nt; ++k) step(k, v, log_acc);
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, x);
        if (!(vmax > 0.0)) throw NonFiniteState("iterate collapsed to zero");
        for (double& x : v) x /= vmax;
        return log_acc + std::log(vmax);
    }

    const CellGrid& grid() const { return g_; }
    const TimeGrid& tg() const { return tg_; }

private:
    CellGrid g_;
    TimeGrid tg_;
    SampledKernel kernel_;
    std::vector<double> a_mid_, a_min_, a_max_;
    Field work_y_, work_conv_, work_acc_;
};

struct PowerIterationOutcome {
    SpectralResult result;
    Field phi;           // converged eigenfunction (= result.eigenfunction)
    double log_period;   // converged per-period log growth
};

PowerIterationOutcome run_power_iteration(LinearPropagator& op, const SpectralOptions& opt) {
    const int nx = op.grid().nx;
    const double T = op.tg().T;
    Field v(static_cast<std::size_t>(nx), 1.0);
    Field prev = v;
    double lambda_prev = std::numeric_limits<double>::quiet_NaN();
    for (int period = 1; period <= opt.max_periods; ++period) {
        prev = v;
        double log_p = op.advance_period(v);
        double lambda = log_p / T;
        double delta = 0.0;
        for (int j = 0; j < nx; ++j) delta = std::max(delta, std::fabs(v[j] - prev[j]));
        double growth = log_p <= 690.0 ? std::exp(log_p) : std::numeric_limits<double>::infinity();
        double residual = std::isfinite(growth) ? growth * delta
                                                : std::exp(690.0) * delta;
        bool resid_ok = residual <= opt.tol_residual || delta <= 1e-13;
        if (std::isfinite(lambda_prev) && std::fabs(lambda - lambda_prev) < opt.tol_lambda &&
            resid_ok) {
            for (double x : v)
                if (!(x > 0.0)) throw NonFiniteState("eigenfunction lost positivity");
            PowerIterationOutcome out;
            out.result = SpectralResult{lambda, v, period, residual};
            out.phi = v;
            out.log_period = log_p;
            return out;
        }
        lambda_prev = lambda;
    }
    throw NoConvergence("power iteration did not converge within " +
                        std::to_string(opt.max_periods) + " periods");
}

}  // namespace

SpectralResult principal_spectrum_point(const HabitatSpec& h, const CellGrid& g,
                                        const TimeGrid& tg, int xi, double mu,
                                        const CoeffSampler& a, const SpectralOptions& opt) {
    LinearPropagator op(h, g, tg, xi, mu, a);
    return run_power_iteration(op, opt).result;
}

std::pair<SpectralResult, PeriodicOrbit> principal_eigen_course(const HabitatSpec& h,
                                                                const CellGrid& g,
                                                                const TimeGrid& tg, int xi,
                                                                double mu, const CoeffSampler& a,
                                                                const SpectralOptions& opt) {
    LinearPropagator op(h, g, tg, xi, mu, a);
    PowerIterationOutcome outcome = run_power_iteration(op, opt);
    const double lambda = outcome.result.lambda;

    PeriodicOrbit orbit;
    orbit.grid = g;
    orbit.tg = tg;
    orbit.data.resize(static_cast<std::size_t>(tg.nt) * g.nx);
    Field v = outcome.phi;
    double log_acc = 0.0;
    for (int k = 0; k < tg.nt; ++k) {
        double scale = std::exp(log_acc - lambda * (k * tg.dt()));
        for (int j = 0; j < g.nx; ++j)
            orbit.data[static_cast<std::size_t>(k) * g.nx + j] = v[static_cast<std::size_t>(j)] * scale;
        op.step(k, v, log_acc);
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, x);
        log_acc += std::log(vmax);
        for (double& x : v) x /= vmax;
    }
    // periodicity defect of the stored course
    double drift = 0.0;
    double end_scale = std::exp(log_acc - lambda * tg.T);
    for (int j = 0; j < g.nx; ++j)
        drift = std::max(drift, std::fabs(v[static_cast<std::size_t>(j)] * end_scale -
                                          orbit.data[static_cast<std::size_t>(j)]));
    orbit.periods_marched = outcome.result.iterations;
    orbit.finalize_stats();
    if (orbit.vmax > 0.0) {
        drift /= orbit.vmax;
        for (double& x : orbit.data) x /= orbit.vmax;
        orbit.finalize_stats();
    }
    orbit.drift = drift;
    return {outcome.result, std::move(orbit)};
}

LambdaBounds lambda_row_sum_bounds(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                   int xi, double mu, const CoeffSampler& a) {
    LinearPropagator op(h, g, tg, xi, mu, a);
    return LambdaBounds{op.min_row_sum(), op.max_row_sum()};
}

bool lambda_exactly_computable(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                               int xi, double mu, const CoeffSampler& a) {
    LambdaBounds b = lambda_row_sum_bounds(h, g, tg, xi, mu, a);
    return tg.T * b.hi <= exact_log_growth_cap;
}

PeriodicOrbit periodic_attractor(const HabitatSpec& h, int species, const CellGrid& g,
                                 const TimeGrid& tg, const OrbitOptions& opt) {
    if (species != 1 && species != 2) throw Error("species must be 1 or 2");
    Coeff growth = species == 1 ? Coeff::a1 : Coeff::a2;
    Coeff selfreg = species == 1 ? Coeff::b1 : Coeff::c2;

    CoeffSampler a = coeff_sampler(h, growth, g);
    double lambda = principal_spectrum_point(h, g, tg, +1, 0.0, a).lambda;
    if (!(lambda > tol_hyp))
        throw HB1Violated("lambda_0(" + std::string(coeff_name(growth)) +
                          ") = " + std::to_string(lambda) + " is not positive");

    CoefficientBounds bd = bounds(h, std::max(8, tg.nt), std::max(8, g.nx));
    double init = species == 1 ? bd.a1M / bd.b1L : bd.a2M / bd.c2L;

    int substeps = std::max(1, opt.substeps);
    SystemTag tag = species == 1 ? SystemTag::single1 : SystemTag::single2;
    double cap = 0.5 / (1.0 + reaction_bound(bd, tag, init, init));
    // keep the stored rows on tg; refine only the internal stepping
    while (tg.dt() / substeps > cap) ++substeps;
    TimeGrid fine{tg.nt * substeps, tg.T};
    CellStepper stepper(h, tag, g, fine, nullptr, nullptr, opt.scheme);

    const int nx = g.nx;
    Field u(static_cast<std::size_t>(nx), init);
    PeriodicOrbit orbit;
    orbit.grid = g;
    orbit.tg = tg;
    orbit.data.assign(static_cast<std::size_t>(tg.nt) * nx, 0.0);
    Field none;

    for (int period = 1; period <= opt.max_periods; ++period) {
        Field start = u;
        for (int k = 0; k < fine.nt; ++k) {
            if (k % substeps == 0) {
                int row = k / substeps;
                std::copy(u.begin(), u.end(),
                          orbit.data.begin() + static_cast<std::size_t>(row) * nx);
            }
            stepper.step(static_cast<long long>(k), u, none);
        }
        double drift = 0.0, sup = 0.0;
        for (int j = 0; j < nx; ++j) {
            drift = std::max(drift, std::fabs(u[static_cast<std::size_t>(j)] -
                                              start[static_cast<std::size_t>(j)]));
            sup = std::max(sup, u[static_cast<std::size_t>(j)]);
        }
        if (sup < 1e-12)
            throw ExtinctionDetected("species " + std::to_string(species) +
                                     " orbit collapsed below 1e-12");
        if (drift < opt.tol_orbit) {
            orbit.drift = drift;
            orbit.periods_marched = period;
            orbit.finalize_stats();
            if (!(orbit.vmin > 0.0))
                throw ExtinctionDetected("periodic attractor is not strictly positive");
            return orbit;
        }
    }
    throw NoConvergence("periodic attractor drift did not fall below tolerance within " +
                        std::to_string(opt.max_periods) + " periods");
}

PeriodicOrbit nonhomogeneous_periodic(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                      int xi, double mu, const CoeffSampler& a,
                                      const CoeffSampler& forcing, const OrbitOptions& opt,
                                      double* lambda_out) {
    double lambda = principal_spectrum_point(h, g, tg, xi, mu, a).lambda;
    if (lambda_out) *lambda_out = lambda;
    if (!(lambda < 0.0)) throw PreconditionLambdaNonnegative(lambda);

    const int nx = g.nx;
    const double dt = tg.dt();
    SampledKernel kernel = wrap_to_cell(twist(sample_kernel(h.kernel(), g.dx()), xi, mu), g);

    // midpoint coefficient and forcing tables
    std::vector<double> a_mid(static_cast<std::size_t>(tg.nt) * nx);
    std::vector<double> h_mid(static_cast<std::size_t>(tg.nt) * nx);
    std::vector<double> a_min(static_cast<std::size_t>(tg.nt));
    std::vector<double> a_max(static_cast<std::size_t>(tg.nt));
    double h_min = std::numeric_limits<double>::infinity(), h_max = 0.0;
    for (int k = 0; k < tg.nt; ++k) {
        std::span<double> arow(a_mid.data() + static_cast<std::size_t>(k) * nx,
                               static_cast<std::size_t>(nx));
        std::span<double> hrow(h_mid.data() + static_cast<std::size_t>(k) * nx,
                               static_cast<std::size_t>(nx));
        a((k + 0.5) * dt, arow);
        forcing((k + 0.5) * dt, hrow);
        double lo = arow[0], hi = arow[0];
        for (double v : arow) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        a_min[static_cast<std::size_t>(k)] = lo;
        a_max[static_cast<std::size_t>(k)] = hi;
        for (double v : hrow) {
            h_min = std::min(h_min, v);
            h_max = std::max(h_max, std::fabs(v));
        }
    }

    // Augmented exponential step: y = (u, z), y' = [[A, h],[0, 0]] y, z == 1.
    Field u(static_cast<std::size_t>(nx), 0.0);
    Field yu(static_cast<std::size_t>(nx)), accu(static_cast<std::size_t>(nx)),
        conv(static_cast<std::size_t>(nx));
    auto advance_step = [&](int k) {
        const double* arow = a_mid.data() + static_cast<std::size_t>(k) * nx;
        const double* hrow = h_mid.data() + static_cast<std::size_t>(k) * nx;
        const double amin = std::min(a_min[static_cast<std::size_t>(k)], 1.0);
        double norm_shifted =
            dt * (kernel.weight_sum + a_max[static_cast<std::size_t>(k)] - amin);
        int nsub = std::max(1, static_cast<int>(std::ceil(norm_shifted / 2.0)));
        const double dts = dt / nsub;
        const double shift_sub = dts * (amin - 1.0);  // z-diagonal shift is -shift >= 0
        const double eshift = std::exp(shift_sub);
        for (int s = 0; s < nsub; ++s) {
            // shifted matrix: [[dts(K - I + aI) - shift, dts h],[0, -shift]]
            accu = u;
            yu = u;
            double yz = 1.0, accz = 1.0;
            for (int term = 1; term <= 120; ++term) {
                convolve_cell(kernel, yu, conv);
                double inv = 1.0 / term;
                double ymax = 0.0;
                for (int j = 0; j < nx; ++j) {
                    double y = (dts * conv[j] + dts * (arow[j] - amin) * yu[j] +
                                dts * hrow[j] * yz) *
                               inv;
                    yu[j] = y;
                    accu[j] += y;
                    ymax = std::max(ymax, std::fabs(y));
                }
                yz = -shift_sub * yz * inv;
                accz += yz;
                double accmax = std::fabs(accz);
                for (int j = 0; j < nx; ++j) accmax = std::max(accmax, std::fabs(accu[j]));
                if (std::max(ymax, std::fabs(yz)) <= 1e-17 * accmax) break;
            }
            for (int j = 0; j < nx; ++j) u[static_cast<std::size_t>(j)] = accu[j] * eshift;
            // z returns to accz * eshift = 1 exactly in real arithmetic; re-pin it
        }
    };

    PeriodicOrbit orbit;
    orbit.grid = g;
    orbit.tg = tg;
    orbit.data.assign(static_cast<std::size_t>(tg.nt) * nx, 0.0);
    for (int period = 1; period <= opt.max_periods; ++period) {
        Field start = u;
        for (int k = 0; k < tg.nt; ++k) {
            std::copy(u.begin(), u.end(), orbit.data.begin() + static_cast<std::size_t>(k) * nx);
            advance_step(k);
        }
        double drift = 0.0;
        for (int j = 0; j < nx; ++j)
            drift = std::max(drift, std::fabs(u[static_cast<std::size_t>(j)] -
                                              start[static_cast<std::size_t>(j)]));
        if (drift < opt.tol_orbit) {
            orbit.drift = drift;
            orbit.periods_marched = period;
            orbit.finalize_stats();
            if (h_min >= 0.0 && h_max > 0.0 && !(orbit.vmin > 0.0))
                throw Error("nonhomogeneous periodic solution lost strict positivity");
            return orbit;
        }
    }
    throw NoConvergence("nonhomogeneous periodic solve did not converge within " +
                        std::to_string(opt.max_periods) + " periods");
}

HbContext check_hb(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                   const OrbitOptions& opt) {
    HbContext ctx;
    ctx.report.lambda_a1 =
        principal_spectrum_point(h, g, tg, +1, 0.0, coeff_sampler(h, Coeff::a1, g)).lambda;
    ctx.report.lambda_a2 =
        principal_spectrum_point(h, g, tg, +1, 0.0, coeff_sampler(h, Coeff::a2, g)).lambda;
    ctx.report.hb1_ok = ctx.report.lambda_a1 > tol_hyp && ctx.report.lambda_a2 > tol_hyp;
    if (!ctx.report.hb1_ok) return ctx;

    ctx.ustar = periodic_attractor(h, 1, g, tg, opt);
    ctx.vstar = periodic_attractor(h, 2, g, tg, opt);
    ctx.report.lambda_invasion =
        principal_spectrum_point(h, g, tg, +1, 0.0, effective_a1(h, ctx.vstar, g)).lambda;
    ctx.report.lambda_stability =
        principal_spectrum_point(h, g, tg, +1, 0.0, stability_a2(h, ctx.ustar, g)).lambda;
    ctx.report.hb2_ok =
        ctx.report.lambda_invasion > tol_hyp && ctx.report.lambda_stability < tol_hyp;
    return ctx;
}

}  // namespace nldisp
