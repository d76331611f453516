// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 1-9 drive the library directly; criterion 10 runs the
// CLI and byte-compares its CSV outputs across parallelism degrees.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nldisp/determinacy.hpp"
#include "nldisp/errors.hpp"
#include "nldisp/report.hpp"
#include "oracles.hpp"

using namespace nldisp;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void record(const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << "  " << detail << std::endl;
    if (!pass) ++g_failures;
}

std::string fd(double v) { return format_double(v); }

LoadedConfig load_cfg(const std::string& configs_dir, const std::string& name) {
    return load_habitat_file(configs_dir + "/" + name);
}

std::string constant_habitat_text(double a1, double b1, double c1, double a2, double b2,
                                  double c2) {
    std::ostringstream ss;
    ss << "[periods]\nT = 1\np = 1\n[kernel]\nshape = uniform\nr0 = 1\n[coefficients]\n"
       << "a1 = \"" << a1 << "\"\nb1 = \"" << b1 << "\"\nc1 = \"" << c1 << "\"\n"
       << "a2 = \"" << a2 << "\"\nb2 = \"" << b2 << "\"\nc2 = \"" << c2 << "\"\n";
    return ss.str();
}

struct Pipeline {
    LoadedConfig cfg;
    CellGrid g;
    TimeGrid tg;
    DeterminacyReport rep;
};

Pipeline run_pipeline(LoadedConfig cfg, bool fronts) {
    CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
    TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};
    DeterminacyOptions opt;
    opt.run_fronts = fronts;
    opt.t_end = cfg.run.t_end;
    opt.L = cfg.grid.L;
    opt.delta = cfg.run.delta;
    opt.s0 = cfg.run.s0;
    opt.speed.jobs = 4;
    DeterminacyReport rep = determinacy_verdict(cfg.habitat, g, tg, cfg.run.xi, opt);
    return Pipeline{std::move(cfg), g, tg, std::move(rep)};
}

// ---------------------------------------------------------------------------

void criterion_1() {
    Timer timer;
    LoadedConfig cfg = load_habitat(constant_habitat_text(1, 1, 1, 1, 1, 1));
    CellGrid g = make_cell_grid(64, 1.0);
    TimeGrid tg{64, 1.0};
    CoeffSampler a_one = [](double, std::span<double> out) {
        for (double& v : out) v = 1.0;
    };
    KernelSpec ks{KernelShape::uniform, 1.0};
    double worst = 0.0, worst_mu = 0.0;
    for (double mu : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        double lambda = principal_spectrum_point(cfg.habitat, g, tg, +1, mu, a_one).lambda;
        double expect = oracle::kernel_moment(ks, mu) - 1.0 + 1.0;
        double err = std::fabs(lambda - expect);
        if (err > worst) {
            worst = err;
            worst_mu = mu;
        }
    }
    double secs = timer.seconds();
    record("C1 constant-coefficient spectral oracle",
           worst < 2e-3 && secs < 10.0,
           "(max |lambda - (kappa_hat - 1 + 1)| = " + fd(worst) + " at mu = " + fd(worst_mu) +
               ", thr 2e-3; " + fd(secs) + " s, cap 10 s)");
}

void criterion_2(const std::string& configs) {
    Timer timer;
    LoadedConfig cfg = load_cfg(configs, "accept2.cfg");
    CellGrid g = make_cell_grid(cfg.grid.nx, 1.0);
    TimeGrid tg{cfg.grid.nt, 1.0};
    SpeedResult r = single_species_speed(cfg.habitat, g, tg, +1, 1);
    oracle::ScanResult scan = oracle::dense_scan_speed(KernelSpec{KernelShape::uniform, 1.0}, 1.0);
    double err = std::fabs(r.c_star - scan.c_star);
    double secs = timer.seconds();
    record("C2 single-species speed oracle",
           err < 5e-3 && secs < 30.0,
           "(c* = " + fd(r.c_star) + " vs dense scan " + fd(scan.c_star) + ", err " + fd(err) +
               ", thr 5e-3; mu* = " + fd(r.mu_star) + " vs " + fd(scan.mu_star) + "; " +
               fd(secs) + " s, cap 30 s)");
}

void criterion_3(const std::string& configs) {
    Timer timer;
    Pipeline p = run_pipeline(load_cfg(configs, "accept3.cfg"), true);
    double c = p.rep.speed.c_star;
    double tol = 0.05 * std::fabs(c) + 0.02;
    bool verdict_ok = p.rep.verdict == "determinate";
    bool gaps_ok = p.rep.front_ok && std::fabs(p.rep.c_low_hat - c) <= tol &&
                   std::fabs(p.rep.c_high_hat - c) <= tol;
    double secs = timer.seconds();
    record("C3 linear determinacy on the constant habitat",
           verdict_ok && gaps_ok && secs < 300.0,
           "(verdict " + p.rep.verdict + "; c_bar*_inf = " + fd(c) + ", c_low_hat = " +
               fd(p.rep.c_low_hat) + ", c_high_hat = " + fd(p.rep.c_high_hat) + ", tol " +
               fd(tol) + "; " + fd(secs) + " s, cap 300 s)");
}

void criterion_4(const std::string& configs, double* c0_out) {
    Timer timer;
    Pipeline p = run_pipeline(load_cfg(configs, "accept4.cfg"), true);
    double c = p.rep.speed.c_star;
    bool lower_ok = p.rep.front_ok && p.rep.c_low_hat >= c - 0.05 * std::fabs(c) - 0.02;
    bool upper_ok = p.rep.front_ok && !std::isnan(p.rep.C0) &&
                    p.rep.c_high_hat <= p.rep.C0 + 0.02;
    if (c0_out) *c0_out = p.rep.C0;
    double secs = timer.seconds();
    record("C4 Theorem 1.1 sandwich on a space-time periodic habitat",
           lower_ok && upper_ok && secs < 600.0,
           "(c_bar*_inf = " + fd(c) + ", c_low_hat = " + fd(p.rep.c_low_hat) +
               ", c_high_hat = " + fd(p.rep.c_high_hat) + ", C0 = " + fd(p.rep.C0) + "; " +
               fd(secs) + " s, cap 600 s)");
}

void criterion_5(const std::string& configs) {
    Timer timer;
    LoadedConfig cfg = load_cfg(configs, "accept5.cfg");
    CellGrid g = make_cell_grid(cfg.grid.nx, 1.0);
    TimeGrid tg{cfg.grid.nt, 1.0};
    PeriodicOrbit ustar = periodic_attractor(cfg.habitat, 1, g, tg);
    PeriodicOrbit vstar = periodic_attractor(cfg.habitat, 2, g, tg);
    SpeedOptions sopt;
    sopt.jobs = 4;
    SpeedResult sp = linear_speed(cfg.habitat, g, tg, +1, vstar, sopt);
    LineGrid line = make_line_grid(g, cfg.grid.L);
    double t_end = cfg.run.t_end;

    auto run_with = [&](double delta, double s0) {
        FrontInit init = make_front(cfg.habitat, line, +1, s0, delta, 1.0, ustar, vstar);
        FrontRun run =
            run_front(cfg.habitat, line, tg, +1, ustar, vstar, init, t_end, 1, sp.c_star);
        return estimate_interval(run, cfg.habitat, line, ustar);
    };
    SpeedIntervalEstimate e1 = run_with(0.5, 0.0);
    SpeedIntervalEstimate e2 = run_with(0.1, -10.0);

    double rel_high =
        std::fabs(e1.c_high_hat - e2.c_high_hat) / std::max(std::fabs(e1.c_high_hat), 1e-12);
    double rel_levels_1 =
        std::fabs(e1.c_low_hat - e1.c_high_hat) / std::max(std::fabs(e1.c_high_hat), 1e-12);
    double rel_levels_2 =
        std::fabs(e2.c_low_hat - e2.c_high_hat) / std::max(std::fabs(e2.c_high_hat), 1e-12);
    double secs = timer.seconds();
    record("C5 single-speed regime: initial-data robustness",
           rel_high <= 0.02 && rel_levels_1 <= 0.05 && rel_levels_2 <= 0.05 && secs < 600.0,
           "(c_high_hat: " + fd(e1.c_high_hat) + " vs " + fd(e2.c_high_hat) + ", rel " +
               fd(rel_high) + ", thr 0.02; level-slope gaps " + fd(rel_levels_1) + ", " +
               fd(rel_levels_2) + ", thr 0.05; " + fd(secs) + " s, cap 600 s)");
}

void criterion_6() {
    Timer timer;
    LoadedConfig cfg = load_habitat(constant_habitat_text(2, 1, 0.5, 1, 1, 1));
    CellGrid g = make_cell_grid(32, 1.0);
    TimeGrid tg = make_time_grid(1.0, 64, 12.0);
    PeriodicOrbit ustar = periodic_attractor(cfg.habitat, 1, g, tg);
    PeriodicOrbit vstar = periodic_attractor(cfg.habitat, 2, g, tg);
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Field ulo(32), vlo(32), uhi(32), vhi(32);
        for (int j = 0; j < 32; ++j) {
            double hu = unit(rng) * ustar.at(0, j), hv = unit(rng) * vstar.at(0, j);
            uhi[static_cast<std::size_t>(j)] = hu;
            vhi[static_cast<std::size_t>(j)] = hv;
            ulo[static_cast<std::size_t>(j)] = unit(rng) * hu;
            vlo[static_cast<std::size_t>(j)] = unit(rng) * hv;
        }
        worst = std::max(worst,
                         check_order_preservation(cfg.habitat, SystemTag::cooperative, g, tg,
                                                  &ustar, &vstar, ulo, vlo, uhi, vhi, 2.0));
    }
    double secs = timer.seconds();
    record("C6 comparison-principle suite (200 ordered pairs)",
           worst <= 1e-10 && secs < 120.0,
           "(max order violation " + fd(worst) + ", thr 1e-10; " + fd(secs) + " s, cap 120 s)");
}

void criterion_7() {
    Timer timer;
    CellGrid g = make_cell_grid(64, 1.0);
    TimeGrid tg{64, 1.0};
    std::mt19937 rng(555);
    std::uniform_real_distribution<double> adist(0.5, 2.0);
    bool monotone_ok = true, bitexact_ok = true;
    double min_gain = 1e300;
    for (int trial = 0; trial < 10; ++trial) {
        double a = adist(rng);
        LoadedConfig c1 = load_habitat(constant_habitat_text(a, 1, 1, 1, 1, 1));
        LoadedConfig c2 = load_habitat(constant_habitat_text(a + 0.2, 1, 1, 1, 1, 1));
        LoadedConfig c3 = load_habitat(constant_habitat_text(a, 2.5, 1, 1, 1, 1));  // b changed
        SpeedResult r1 = single_species_speed(c1.habitat, g, tg, +1, 1);
        SpeedResult r2 = single_species_speed(c2.habitat, g, tg, +1, 1);
        SpeedResult r3 = single_species_speed(c3.habitat, g, tg, +1, 1);
        min_gain = std::min(min_gain, r2.c_star - r1.c_star);
        if (!(r2.c_star > r1.c_star + 1e-3)) monotone_ok = false;
        if (r1.c_star != r3.c_star || r1.mu_star != r3.mu_star ||
            r1.lambda_star != r3.lambda_star)
            bitexact_ok = false;
        for (std::size_t i = 0; i < r1.samples.size() && bitexact_ok; ++i)
            if (r1.samples[i].lambda != r3.samples[i].lambda) bitexact_ok = false;
    }
    double secs = timer.seconds();
    record("C7 speed monotonicity and b-independence",
           monotone_ok && bitexact_ok,
           "(min speed gain from a -> a+0.2: " + fd(min_gain) + ", thr 1e-3; bit-identical " +
               "under b change: " + (bitexact_ok ? "yes" : "no") + "; " + fd(secs) + " s)");
}

void criterion_8() {
    Timer timer;
    CellGrid g = make_cell_grid(32, 1.0);
    TimeGrid tg{64, 1.0};
    std::mt19937 rng(888);
    std::uniform_real_distribution<double> rdist(0.5, 2.0), adist(0.1, 0.9);
    int tested = 0, counterexamples = 0;
    double min_slack = 1e300;
    while (tested < 20) {
        double r1 = rdist(rng), r2 = rdist(rng), a1t = adist(rng);
        double margin = 0.9 * (r1 / r2) * (1.0 - a1t);
        double a2t = 1.0 + std::min(margin, 1.0) * adist(rng);
        LoadedConfig cfg = load_habitat(
            constant_habitat_text(r1, r1, a1t * r1, r2, a2t * r2, r2));
        PeriodicOrbit ustar = periodic_attractor(cfg.habitat, 1, g, tg);
        PeriodicOrbit vstar = periodic_attractor(cfg.habitat, 2, g, tg);
        if (!check_HL(cfg.habitat, ustar, vstar, 1).ok) continue;  // family guarantees HL1
        SpeedResult sp = linear_speed(cfg.habitat, g, tg, +1, vstar);
        WitnessFields w = witness_fields(cfg.habitat, g, tg, +1, sp, vstar);
        Lemma42Report rep = check_lemma42(cfg.habitat, w.u_w, w.v_w);
        if (!rep.first.ok || !rep.second.ok) ++counterexamples;
        min_slack = std::min({min_slack, rep.first.slack, rep.second.slack});
        ++tested;
    }
    double secs = timer.seconds();
    record("C8 Lemma 4.2 witness suite (20 HL1-passing habitats)",
           counterexamples == 0,
           "(counterexamples " + std::to_string(counterexamples) + ", min slack " +
               fd(min_slack) + "; " + fd(secs) + " s)");
}

void criterion_9(const std::string& configs) {
    Timer timer;
    bool all_ok = true;
    std::string detail;
    std::vector<std::pair<std::string, LoadedConfig>> habitats;
    habitats.emplace_back("module-example",
                          load_habitat(constant_habitat_text(2, 1, 0.5, 1, 1, 1)));
    habitats.emplace_back("accept3", load_cfg(configs, "accept3.cfg"));
    habitats.emplace_back("accept4", load_cfg(configs, "accept4.cfg"));
    habitats.emplace_back("accept5", load_cfg(configs, "accept5.cfg"));
    for (auto& [name, cfg] : habitats) {
        CellGrid g = make_cell_grid(cfg.grid.nx, 1.0);
        TimeGrid tg = make_time_grid(1.0, cfg.grid.nt, 12.0);
        PeriodicOrbit ustar = periodic_attractor(cfg.habitat, 1, g, tg);
        PeriodicOrbit vstar = periodic_attractor(cfg.habitat, 2, g, tg);
        SpeedOptions sopt;
        sopt.jobs = 4;
        SpeedResult sp = linear_speed(cfg.habitat, g, tg, +1, vstar, sopt);
        double C0 = supersolution_C0(cfg.habitat, g, tg, +1, ustar, vstar);
        double resid = supersolution_min_residual(cfg.habitat, g, tg, +1, ustar, vstar, C0 + 1.0);
        bool ok = C0 >= sp.c_star && resid >= 0.0;
        all_ok = all_ok && ok;
        detail += name + ": C0 = " + fd(C0) + " >= c* = " + fd(sp.c_star) +
                  ", resid(C0+1) = " + fd(resid) + (ok ? "; " : " <- FAIL; ");
    }
    double secs = timer.seconds();
    record("C9 super-solution bound", all_ok, "(" + detail + fd(secs) + " s)");
}

bool file_bytes_equal(const std::string& a, const std::string& b, std::string& why) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) {
        why = "missing " + (fa ? b : a);
        return false;
    }
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
        why = a + " differs from " + b;
        return false;
    }
    return true;
}

void criterion_10(const std::string& cli, const std::string& configs, const std::string& out) {
    Timer timer;
    bool all_ok = true;
    std::string detail;
    struct Job {
        std::string name, command;
        std::vector<std::string> csvs;
    };
    std::vector<Job> jobs_list = {
        {"speed-c2", "speed --which species1 --config " + configs + "/accept2.cfg",
         {"speed.csv", "speed_summary.csv"}},
        {"determinacy-c3", "determinacy --config " + configs + "/accept3.cfg",
         {"determinacy.csv"}},
        {"front-c4", "front --config " + configs + "/accept4.cfg",
         {"trajectory.csv", "levels.csv", "front_summary.csv"}},
    };
    for (const Job& job : jobs_list) {
        for (int jn : {1, 8}) {
            std::string dir = out + "/" + job.name + "-j" + std::to_string(jn);
            std::string cmd = cli + " " + job.command + " --jobs " + std::to_string(jn) +
                              " --out " + dir + " --force > " + dir + ".log 2>&1";
            ensure_output_dir(dir, true);
            int rc = std::system(cmd.c_str());
            if (rc != 0) {
                all_ok = false;
                detail += job.name + " exited " + std::to_string(rc) + "; ";
            }
        }
        for (const std::string& csv : job.csvs) {
            std::string a = out + "/" + job.name + "-j1/" + csv;
            std::string b = out + "/" + job.name + "-j8/" + csv;
            std::string why;
            if (!file_bytes_equal(a, b, why)) {
                all_ok = false;
                detail += why + "; ";
            }
        }
    }
    double secs = timer.seconds();
    if (detail.empty()) detail = "all CSVs byte-identical across --jobs 1/8; ";
    record("C10 determinism across parallelism degrees", all_ok, "(" + detail + fd(secs) + " s)");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli, configs, out = "acceptance-out";
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string key = argv[i];
        if (key == "--cli") cli = argv[i + 1];
        else if (key == "--configs") configs = argv[i + 1];
        else if (key == "--out") out = argv[i + 1];
    }
    if (configs.empty()) {
        std::cerr << "usage: nldisp_acceptance --cli PATH --configs DIR [--out DIR]\n";
        return 64;
    }
    ensure_output_dir(out, true);

    try {
        criterion_1();
        criterion_2(configs);
        criterion_3(configs);
        double c0 = 0.0;
        criterion_4(configs, &c0);
        criterion_5(configs);
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9(configs);
        if (!cli.empty())
            criterion_10(cli, configs, out);
        else
            record("C10 determinism across parallelism degrees", false, "(no --cli path given)");
    } catch (const std::exception& e) {
        std::cout << "[FAIL] acceptance aborted: " << e.what() << std::endl;
        return 1 + g_failures;
    }

    std::cout << (g_failures == 0 ? "acceptance: all criteria pass"
                                  : "acceptance: " + std::to_string(g_failures) + " failure(s)")
              << std::endl;
    return g_failures;
}
