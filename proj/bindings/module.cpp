#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nldisp/determinacy.hpp"
#include "nldisp/errors.hpp"
#include "nldisp/report.hpp"

namespace py = pybind11;
using namespace nldisp;

namespace {

struct Session {
    LoadedConfig cfg;
    CellGrid g;
    TimeGrid tg;

    explicit Session(LoadedConfig c)
        : cfg(std::move(c)),
          g(make_cell_grid(cfg.grid.nx, cfg.habitat.p())),
          tg{cfg.grid.nt, cfg.habitat.T()} {}
};

py::dict orbit_to_dict(const PeriodicOrbit& orbit) {
    py::dict d;
    d["nt"] = orbit.tg.nt;
    d["nx"] = orbit.grid.nx;
    d["T"] = orbit.tg.T;
    d["p"] = orbit.grid.p;
    d["min"] = orbit.vmin;
    d["max"] = orbit.vmax;
    d["drift"] = orbit.drift;
    d["periods"] = orbit.periods_marched;
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < orbit.tg.nt; ++k)
        rows.emplace_back(orbit.row(k).begin(), orbit.row(k).end());
    d["values"] = rows;
    return d;
}

py::dict speed_to_dict(const SpeedResult& r) {
    py::dict d;
    d["c_star"] = r.c_star;
    d["mu_star"] = r.mu_star;
    d["lambda_star"] = r.lambda_star;
    std::vector<py::dict> samples;
    for (const SpeedSample& s : r.samples) {
        py::dict e;
        e["mu"] = s.mu;
        e["lambda"] = s.lambda;
        e["c"] = s.c;
        e["approx"] = s.approx;
        samples.push_back(e);
    }
    d["samples"] = samples;
    return d;
}

CoeffSampler sampler_for(const Session& s, const std::string& which,
                         std::shared_ptr<PeriodicOrbit>& keepalive) {
    if (which == "a1") return coeff_sampler(s.cfg.habitat, Coeff::a1, s.g);
    if (which == "a2") return coeff_sampler(s.cfg.habitat, Coeff::a2, s.g);
    if (which == "eff1") {
        keepalive = std::make_shared<PeriodicOrbit>(
            periodic_attractor(s.cfg.habitat, 2, s.g, s.tg));
        auto orbit = keepalive;
        const HabitatSpec& h = s.cfg.habitat;
        CellGrid g = s.g;
        return [&h, orbit, g](double t, std::span<double> out) {
            h.sample_row(Coeff::a1, t, g, out);
            std::vector<double> c1(static_cast<std::size_t>(g.nx));
            h.sample_row(Coeff::c1, t, g, c1);
            for (int j = 0; j < g.nx; ++j)
                out[j] -= c1[static_cast<std::size_t>(j)] * orbit->value(t, j);
        };
    }
    if (which == "eff2") {
        keepalive = std::make_shared<PeriodicOrbit>(
            periodic_attractor(s.cfg.habitat, 1, s.g, s.tg));
        auto orbit = keepalive;
        const HabitatSpec& h = s.cfg.habitat;
        CellGrid g = s.g;
        return [&h, orbit, g](double t, std::span<double> out) {
            h.sample_row(Coeff::a2, t, g, out);
            std::vector<double> b2(static_cast<std::size_t>(g.nx));
            h.sample_row(Coeff::b2, t, g, b2);
            for (int j = 0; j < g.nx; ++j)
                out[j] -= b2[static_cast<std::size_t>(j)] * orbit->value(t, j);
        };
    }
    throw UsageError("which must be a1 | a2 | eff1 | eff2");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spreading speeds and linear determinacy for two-species competition systems "
              "with nonlocal dispersal in periodic habitats";

    py::register_exception<Error>(m, "NldispError");

    py::class_<Session, std::shared_ptr<Session>>(m, "Habitat")
        .def_static(
            "from_text",
            [](const std::string& text) { return std::make_shared<Session>(load_habitat(text)); },
            py::arg("config_text"))
        .def_static(
            "from_file",
            [](const std::string& path) {
                return std::make_shared<Session>(load_habitat_file(path));
            },
            py::arg("path"))
        .def_property_readonly("T", [](const Session& s) { return s.cfg.habitat.T(); })
        .def_property_readonly("p", [](const Session& s) { return s.cfg.habitat.p(); })
        .def_property_readonly("nx", [](const Session& s) { return s.g.nx; })
        .def_property_readonly("nt", [](const Session& s) { return s.tg.nt; })
        .def("coeff",
             [](const Session& s, const std::string& name, double t, double x) {
                 for (Coeff c : all_coeffs)
                     if (name == coeff_name(c)) return s.cfg.habitat.coeff(c, t, x);
                 throw UsageError("unknown coefficient '" + name + "'");
             },
             py::arg("name"), py::arg("t"), py::arg("x"))
        .def("bounds",
             [](const Session& s) {
                 CoefficientBounds b = bounds(s.cfg.habitat, s.tg.nt, s.g.nx);
                 py::dict d;
                 for (Coeff c : all_coeffs) {
                     d[(std::string(coeff_name(c)) + "L").c_str()] = b.lo(c);
                     d[(std::string(coeff_name(c)) + "M").c_str()] = b.hi(c);
                 }
                 return d;
             })
        .def("check_primed",
             [](const Session& s) {
                 PrimedReport r = check_primed_hypotheses(s.cfg.habitat, s.tg.nt, s.g.nx);
                 py::dict d;
                 d["hb2_prime"] = r.hb2_prime.ok;
                 d["hl0_prime"] = r.hl0_prime.ok;
                 d["hl1_prime"] = r.hl1_prime.ok;
                 d["hl2_prime"] = r.hl2_prime.ok;
                 d["hb2_prime_slack"] = r.hb2_prime.slack;
                 d["hl0_prime_slack"] = r.hl0_prime.slack;
                 d["hl1_prime_slack"] = r.hl1_prime.slack;
                 d["hl2_prime_slack"] = r.hl2_prime.slack;
                 return d;
             })
        .def("check_hb",
             [](const Session& s) {
                 HbContext ctx = check_hb(s.cfg.habitat, s.g, s.tg);
                 py::dict d;
                 d["lambda_a1"] = ctx.report.lambda_a1;
                 d["lambda_a2"] = ctx.report.lambda_a2;
                 d["lambda_invasion"] = ctx.report.lambda_invasion;
                 d["lambda_stability"] = ctx.report.lambda_stability;
                 d["hb1"] = ctx.report.hb1_ok;
                 d["hb2"] = ctx.report.hb2_ok;
                 return d;
             })
        .def("lambda0",
             [](const Session& s, int xi, double mu, const std::string& which) {
                 std::shared_ptr<PeriodicOrbit> keep;
                 CoeffSampler a = sampler_for(s, which, keep);
                 SpectralResult r = principal_spectrum_point(s.cfg.habitat, s.g, s.tg, xi, mu, a);
                 py::dict d;
                 d["lambda"] = r.lambda;
                 d["iterations"] = r.iterations;
                 d["residual"] = r.residual;
                 d["eigenfunction"] = r.eigenfunction;
                 return d;
             },
             py::arg("xi") = 1, py::arg("mu") = 0.0, py::arg("which") = "a1")
        .def("attractor",
             [](const Session& s, int species) {
                 return orbit_to_dict(periodic_attractor(s.cfg.habitat, species, s.g, s.tg));
             },
             py::arg("species"))
        .def("speed",
             [](const Session& s, int xi, const std::string& which, int jobs) {
                 SpeedOptions opt;
                 opt.jobs = jobs;
                 if (which == "linear") {
                     PeriodicOrbit vstar = periodic_attractor(s.cfg.habitat, 2, s.g, s.tg);
                     return speed_to_dict(
                         linear_speed(s.cfg.habitat, s.g, s.tg, xi, vstar, opt));
                 }
                 if (which == "species1")
                     return speed_to_dict(
                         single_species_speed(s.cfg.habitat, s.g, s.tg, xi, 1, opt));
                 if (which == "species2")
                     return speed_to_dict(
                         single_species_speed(s.cfg.habitat, s.g, s.tg, xi, 2, opt));
                 throw UsageError("which must be linear | species1 | species2");
             },
             py::arg("xi") = 1, py::arg("which") = "linear", py::arg("jobs") = 1)
        .def("supersolution_c0",
             [](const Session& s, int xi) {
                 PeriodicOrbit ustar = periodic_attractor(s.cfg.habitat, 1, s.g, s.tg);
                 PeriodicOrbit vstar = periodic_attractor(s.cfg.habitat, 2, s.g, s.tg);
                 return supersolution_C0(s.cfg.habitat, s.g, s.tg, xi, ustar, vstar);
             },
             py::arg("xi") = 1)
        .def("front",
             [](const Session& s, int xi, double t_end, double L, double delta, double s0) {
                 PeriodicOrbit ustar = periodic_attractor(s.cfg.habitat, 1, s.g, s.tg);
                 PeriodicOrbit vstar = periodic_attractor(s.cfg.habitat, 2, s.g, s.tg);
                 SpeedResult sp = linear_speed(s.cfg.habitat, s.g, s.tg, xi, vstar);
                 if (t_end <= 0.0)
                     t_end = s.cfg.run.t_end > 0.0 ? s.cfg.run.t_end : 100.0 * s.tg.T;
                 if (L <= 0.0) L = s.cfg.grid.L;
                 if (L <= 0.0)
                     L = std::fabs(s0) + front_cutoff + (sp.c_star + 0.5) * t_end +
                         4.0 * s.cfg.habitat.kernel().r0 + 2.0;
                 LineGrid line = make_line_grid(s.g, L);
                 FrontInit init =
                     make_front(s.cfg.habitat, line, xi, s0, delta, 1.0, ustar, vstar);
                 FrontRun run = run_front(s.cfg.habitat, line, s.tg, xi, ustar, vstar, init,
                                          t_end, 1, sp.c_star);
                 SpeedIntervalEstimate est = estimate_interval(run, s.cfg.habitat, line, ustar);
                 py::dict d;
                 d["c_low_hat"] = est.c_low_hat;
                 d["c_high_hat"] = est.c_high_hat;
                 d["r2_low"] = est.low.r2;
                 d["r2_high"] = est.high.r2;
                 d["c_star_linear"] = sp.c_star;
                 d["mu_star"] = sp.mu_star;
                 return d;
             },
             py::arg("xi") = 1, py::arg("t_end") = 0.0, py::arg("L") = 0.0,
             py::arg("delta") = 0.5, py::arg("s0") = 0.0)
        .def("determinacy",
             [](const Session& s, int xi, bool fronts, int jobs) {
                 DeterminacyOptions opt;
                 opt.run_fronts = fronts;
                 opt.t_end = s.cfg.run.t_end;
                 opt.L = s.cfg.grid.L;
                 opt.delta = s.cfg.run.delta;
                 opt.s0 = s.cfg.run.s0;
                 opt.speed.jobs = jobs;
                 DeterminacyReport r = determinacy_verdict(s.cfg.habitat, s.g, s.tg, xi, opt);
                 py::dict d;
                 d["verdict"] = r.verdict;
                 d["hb1"] = r.hb.hb1_ok;
                 d["hb2"] = r.hb.hb2_ok;
                 d["hl0"] = r.hl0.ok;
                 d["hl1"] = r.hl1.ok;
                 d["hl2"] = r.hl2.ok;
                 d["lambda2"] = r.lambda2;
                 d["lemma42"] = r.lemma42.ok();
                 d["c_bar_star_inf"] = r.speed.c_star;
                 d["mu_star"] = r.speed.mu_star;
                 d["C0"] = r.C0;
                 d["c_low_hat"] = r.c_low_hat;
                 d["c_high_hat"] = r.c_high_hat;
                 d["front_ok"] = r.front_ok;
                 d["front_error"] = r.front_error;
                 return d;
             },
             py::arg("xi") = 1, py::arg("fronts") = false, py::arg("jobs") = 1);

    m.def(
        "eval_expr",
        [](const std::string& text, const std::map<std::string, double>& vars) {
            EvalContext ctx;
            for (const auto& [k, v] : vars) ctx.bind(k, v);
            return eval(*parse(text), ctx);
        },
        py::arg("text"), py::arg("vars") = std::map<std::string, double>{},
        "parse and evaluate an expression with the given bindings");
    m.def(
        "expr_free_vars",
        [](const std::string& text) {
            auto vars = free_vars(*parse(text));
            return std::vector<std::string>(vars.begin(), vars.end());
        },
        py::arg("text"));
    m.def("kernel_moment",
          [](const std::string& shape, double r0, double dx, double mu) {
              KernelSpec ks{kernel_shape_from_string(shape), r0};
              return twist(sample_kernel(ks, dx), +1, mu).weight_sum;
          },
          py::arg("shape"), py::arg("r0"), py::arg("dx"), py::arg("mu"),
          "discrete twisted kernel moment kappa_hat(mu)");
}
