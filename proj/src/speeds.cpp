#include "nldisp/speeds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "nldisp/errors.hpp"

namespace nldisp {

double front_ramp(double s) { return 0.5 * (1.0 + std::tanh(0.5 * s)); }

namespace {

struct GridEval {
    double mu, lambda;
    bool approx;
};

GridEval eval_lambda(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                     double mu, const CoeffSampler& a, const SpectralOptions& sopt) {
    LambdaBounds b = lambda_row_sum_bounds(h, g, tg, xi, mu, a);
    if (tg.T * b.hi > exact_log_growth_cap) return GridEval{mu, b.mid(), true};
    return GridEval{mu, principal_spectrum_point(h, g, tg, xi, mu, a, sopt).lambda, false};
}

// golden-section minimization of lambda(mu)/mu on [lo, hi]
struct GoldenResult {
    double mu, value, lambda;
};

GoldenResult golden_minimize(const std::function<double(double)>& lambda_of_mu, double lo,
                             double hi, double rel_tol) {
    const double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double l1 = lambda_of_mu(x1), l2 = lambda_of_mu(x2);
    double f1 = l1 / x1, f2 = l2 / x2;
    while (hi - lo > rel_tol * 0.5 * (lo + hi)) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            l2 = l1;
            x1 = hi - inv_phi * (hi - lo);
            l1 = lambda_of_mu(x1);
            f1 = l1 / x1;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            l1 = l2;
            x2 = lo + inv_phi * (hi - lo);
            l2 = lambda_of_mu(x2);
            f2 = l2 / x2;
        }
    }
    return f1 <= f2 ? GoldenResult{x1, f1, l1} : GoldenResult{x2, f2, l2};
}

}  // namespace

SpeedResult minimize_speed(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                           const CoeffSampler& a, const SpeedOptions& opt) {
    if (xi != 1 && xi != -1) throw UsageError("xi must be +1 or -1");
    const double mu0 = 1.0 / h.kernel().r0;

    int k_min = opt.k_min, k_max = opt.k_max;
    std::vector<GridEval> evals;
    for (int expansion = 0;; ++expansion) {
        std::vector<double> mus;
        for (int k = k_min; k <= k_max; ++k) mus.push_back(mu0 * std::ldexp(1.0, k));

        evals.assign(mus.size(), GridEval{});
        int jobs = std::max(1, opt.jobs);
        if (jobs == 1) {
            for (std::size_t i = 0; i < mus.size(); ++i)
                evals[i] = eval_lambda(h, g, tg, xi, mus[i], a, opt.spectral);
        } else {
            std::vector<std::thread> pool;
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
            for (int w = 0; w < jobs; ++w) {
                pool.emplace_back([&, w]() {
                    try {
                        for (std::size_t i = static_cast<std::size_t>(w); i < mus.size();
                             i += static_cast<std::size_t>(jobs))
                            evals[i] = eval_lambda(h, g, tg, xi, mus[i], a, opt.spectral);
                    } catch (...) {
                        errors[static_cast<std::size_t>(w)] = std::current_exception();
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }

        std::size_t best = 0;
        double best_c = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < evals.size(); ++i) {
            double c = evals[i].lambda / evals[i].mu;
            if (c < best_c) {
                best_c = c;
                best = i;
            }
        }
        if (best > 0 && best + 1 < evals.size()) {
            // interior minimum triple found
            double lo = evals[best - 1].mu, hi = evals[best + 1].mu;
            if (evals[best].approx)
                throw NoInteriorMinimum(
                    "minimum landed on an approximate large-mu sample; habitat growth is too "
                    "large for the exact window");
            auto lambda_of_mu = [&](double mu) {
                return principal_spectrum_point(h, g, tg, xi, mu, a, opt.spectral).lambda;
            };
            GoldenResult gr = golden_minimize(lambda_of_mu, lo, hi, opt.golden_rel_tol);

            SpeedResult out;
            // keep the better of the grid center and the refined point
            if (gr.value <= best_c) {
                out.c_star = gr.value;
                out.mu_star = gr.mu;
                out.lambda_star = gr.lambda;
            } else {
                out.c_star = best_c;
                out.mu_star = evals[best].mu;
                out.lambda_star = evals[best].lambda;
            }
            out.bracket_lo = lo;
            out.bracket_hi = hi;
            for (const GridEval& e : evals)
                out.samples.push_back(SpeedSample{e.mu, e.lambda, e.lambda / e.mu, e.approx});
            out.samples.push_back(SpeedSample{out.mu_star, out.lambda_star, out.c_star, false});
            return out;
        }
        if (expansion >= opt.max_bracket_expansions)
            throw NoInteriorMinimum("lambda(mu)/mu is monotone over mu in [" +
                                    std::to_string(mu0 * std::ldexp(1.0, k_min)) + ", " +
                                    std::to_string(mu0 * std::ldexp(1.0, k_max)) + "]");
        if (best == 0)
            k_min -= 4;
        else
            k_max += 4;
    }
}

SpeedResult linear_speed(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                         const PeriodicOrbit& vstar, const SpeedOptions& opt) {
    return minimize_speed(h, g, tg, xi, effective_a1(h, vstar, g), opt);
}

SpeedResult single_species_speed(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                 int xi, int species, const SpeedOptions& opt) {
    if (species != 1 && species != 2) throw UsageError("species must be 1 or 2");
    Coeff growth = species == 1 ? Coeff::a1 : Coeff::a2;
    double lambda0 =
        principal_spectrum_point(h, g, tg, +1, 0.0, coeff_sampler(h, growth, g), opt.spectral)
            .lambda;
    if (!(lambda0 > tol_hyp))
        throw HB1Violated("lambda_0(" + std::string(coeff_name(growth)) +
                          ") = " + std::to_string(lambda0) + " is not positive");
    return minimize_speed(h, g, tg, xi, coeff_sampler(h, growth, g), opt);
}

namespace {

// Discrete Lemma-3.5 residual of the translating super-solution profile at
// speed C, minimized over one period and the moving window.
class SupersolutionResidual {
public:
    SupersolutionResidual(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                          const PeriodicOrbit& ustar, const PeriodicOrbit& vstar)
        : h_(h), cell_(g), tg_(tg), xi_(xi), ustar_(ustar), vstar_(vstar) {
        kernel_ = sample_kernel(h.kernel(), g.dx());
    }

    double min_residual(double C) const {
        const double r0 = h_.kernel().r0;
        LineGrid line = make_line_grid(cell_, 4.0 * r0 + std::max(0.0, C) * tg_.T + 1.0);
        const int n = line.n();
        const int nx = cell_.nx;
        const int R = kernel_.radius;
        const double dt = tg_.dt();

        std::vector<double> a1(n), b1(n), c1(n), a2(n), b2(n), c2(n);
        std::vector<double> up(n), vp(n), up_next(n), vp_next(n), conv_u(n), conv_v(n);
        std::vector<double> lpad_u(R), lpad_v(R), rpad_u(R), rpad_v(R);

        auto phase = [&](int q) { return ((q % nx) + nx) % nx; };
        auto profile = [&](int krow, double t, int q, double& pu, double& pv) {
            double x = (q - line.periods_per_side * nx) * line.dx();
            double ramp = 1.0 - front_ramp(x * xi_ - C * t);
            int ph = phase(q);
            pu = ustar_.at(krow, ph) * ramp;
            pv = vstar_.at(krow, ph) * ramp;
        };

        double worst = std::numeric_limits<double>::infinity();
        for (int k = 0; k < tg_.nt; ++k) {
            double t = k * dt;
            double t1 = (k + 1) * dt;
            h_.sample_row_line(Coeff::a1, t, line, a1);
            h_.sample_row_line(Coeff::b1, t, line, b1);
            h_.sample_row_line(Coeff::c1, t, line, c1);
            h_.sample_row_line(Coeff::a2, t, line, a2);
            h_.sample_row_line(Coeff::b2, t, line, b2);
            h_.sample_row_line(Coeff::c2, t, line, c2);
            for (int i = 0; i < n; ++i) {
                profile(k, t, i, up[i], vp[i]);
                profile(k + 1, t1, i, up_next[i], vp_next[i]);
            }
            // pads: (u*, v*) behind, (0,0) ahead
            for (int j = 0; j < R; ++j) {
                int ql = j - R, qr = n + j;
                if (xi_ > 0) {
                    lpad_u[j] = ustar_.at(k, phase(ql));
                    lpad_v[j] = vstar_.at(k, phase(ql));
                    rpad_u[j] = 0.0;
                    rpad_v[j] = 0.0;
                } else {
                    lpad_u[j] = 0.0;
                    lpad_v[j] = 0.0;
                    rpad_u[j] = ustar_.at(k, phase(qr));
                    rpad_v[j] = vstar_.at(k, phase(qr));
                }
            }
            convolve_line(kernel_, up, lpad_u, rpad_u, conv_u);
            convolve_line(kernel_, vp, lpad_v, rpad_v, conv_v);
            for (int i = 0; i < n; ++i) {
                double vs = vstar_.at(k, phase(i));
                double fu = up[i] * (a1[i] - b1[i] * up[i] - c1[i] * (vs - vp[i]));
                double gv = b2[i] * (vs - vp[i]) * up[i] +
                            vp[i] * (a2[i] - 2.0 * c2[i] * vs + c2[i] * vp[i]);
                double ru = (up_next[i] - up[i]) / dt - (conv_u[i] - up[i] + fu);
                double rv = (vp_next[i] - vp[i]) / dt - (conv_v[i] - vp[i] + gv);
                worst = std::min(worst, std::min(ru, rv));
            }
        }
        return worst;
    }

private:
    const HabitatSpec& h_;
    CellGrid cell_;
    TimeGrid tg_;
    int xi_;
    const PeriodicOrbit& ustar_;
    const PeriodicOrbit& vstar_;
    SampledKernel kernel_;
};

}  // namespace

double supersolution_min_residual(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                  int xi, const PeriodicOrbit& ustar, const PeriodicOrbit& vstar,
                                  double C) {
    return SupersolutionResidual(h, g, tg, xi, ustar, vstar).min_residual(C);
}

double supersolution_C0(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                        const PeriodicOrbit& ustar, const PeriodicOrbit& vstar,
                        const C0Options& opt) {
    SupersolutionResidual res(h, g, tg, xi, ustar, vstar);
    auto ok = [&](double C) { return res.min_residual(C) >= -opt.tol; };

    long long hi = static_cast<long long>(std::llround(opt.cap / opt.resolution));
    if (!ok(hi * opt.resolution))
        throw NotFoundBelowCap("no super-solution speed found below the cap C = " +
                               std::to_string(opt.cap));
    if (ok(0.0)) return 0.0;
    long long lo = 0;  // predicate false at lo, true at hi
    while (hi - lo > 1) {
        long long mid = lo + (hi - lo) / 2;
        if (ok(mid * opt.resolution))
            hi = mid;
        else
            lo = mid;
    }
    return hi * opt.resolution;
}

}  // namespace nldisp
