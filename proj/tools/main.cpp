// nldisp: spreading speeds and linear-determinacy diagnostics for two-species
// competition systems with nonlocal dispersal in time/space-periodic habitats.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "nldisp/determinacy.hpp"
#include "nldisp/errors.hpp"
#include "nldisp/report.hpp"

using namespace nldisp;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    int xi = 0;  // 0 = take from config
    int jobs = 1;
    bool force = false;
    long long seed = -1;
    double t_end = 0.0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_t_end = false) {
    cmd->add_option("--config", args.config_path, "habitat config file")->required();
    cmd->add_option("--out", args.out_dir, "output directory (default $NLDISP_OUT_DIR)");
    cmd->add_option("--override", args.overrides, "config override section.key=value");
    cmd->add_option("--xi", args.xi, "direction, +1 or -1")
        ->check(CLI::IsMember({1, -1}));
    cmd->add_option("--jobs", args.jobs, "parallel workers")->check(CLI::PositiveNumber);
    cmd->add_flag("--force", args.force, "allow writing into a non-empty output directory");
    cmd->add_option("--seed", args.seed, "seed recorded in run metadata");
    if (with_t_end) cmd->add_option("--t-end", args.t_end, "simulation horizon");
}

std::string resolve_out_dir(const CommonArgs& args, const std::string& command) {
    if (!args.out_dir.empty()) return args.out_dir;
    if (const char* env = std::getenv("NLDISP_OUT_DIR")) return std::string(env) + "/" + command;
    return "nldisp-out/" + command;
}

LoadedConfig load_from_args(const CommonArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("cannot open config file '" + args.config_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::vector<std::pair<std::string, std::string>> ov;
    for (const std::string& o : args.overrides) {
        std::size_t eq = o.find('=');
        if (eq == std::string::npos)
            throw UsageError("override '" + o + "' must be section.key=value");
        ov.emplace_back(o.substr(0, eq), o.substr(eq + 1));
    }
    LoadedConfig cfg = load_habitat(ss.str(), ov);
    if (args.xi != 0) cfg.run.xi = args.xi;
    if (args.seed >= 0) cfg.run.seed = args.seed;
    if (args.t_end > 0.0) cfg.run.t_end = args.t_end;
    return cfg;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

// ---- check ----------------------------------------------------------------

int cmd_check(const CommonArgs& args) {
    std::string out = resolve_out_dir(args, "check");
    ensure_output_dir(out, args.force);

    Csv csv("nldisp.check.v1", {"key", "value"});
    std::ostringstream txt;
    bool all_ok = true;
    try {
        LoadedConfig cfg = load_from_args(args);
        CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
        TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};

        PrimedReport primed = check_primed_hypotheses(cfg.habitat, tg.nt, g.nx);
        HbContext hb = check_hb(cfg.habitat, g, tg);

        csv.cell("hb0").cell("pass");
        csv.end_row();
        auto put = [&](const std::string& key, bool ok, double slack) {
            csv.cell(key).cell(ok ? "pass" : "fail");
            csv.end_row();
            csv.cell(key + "_slack").cell(slack);
            csv.end_row();
            all_ok = all_ok && ok;
        };
        put("hb2_prime", primed.hb2_prime.ok, primed.hb2_prime.slack);
        put("hl0_prime", primed.hl0_prime.ok, primed.hl0_prime.slack);
        put("hl1_prime", primed.hl1_prime.ok, primed.hl1_prime.slack);
        put("hl2_prime", primed.hl2_prime.ok, primed.hl2_prime.slack);
        csv.cell("lambda_a1").cell(hb.report.lambda_a1);
        csv.end_row();
        csv.cell("lambda_a2").cell(hb.report.lambda_a2);
        csv.end_row();
        csv.cell("hb1").cell(hb.report.hb1_ok ? "pass" : "fail");
        csv.end_row();
        all_ok = all_ok && hb.report.hb1_ok;
        if (hb.report.hb1_ok) {
            csv.cell("lambda_a1_minus_c1vstar").cell(hb.report.lambda_invasion);
            csv.end_row();
            csv.cell("lambda_a2_minus_b2ustar").cell(hb.report.lambda_stability);
            csv.end_row();
            csv.cell("hb2").cell(hb.report.hb2_ok ? "pass" : "fail");
            csv.end_row();
            all_ok = all_ok && hb.report.hb2_ok;
        }

        txt << "hypothesis report\n"
            << "  HB0 (positivity, periodicity): pass (checked at load)\n"
            << "  (HB2)' coefficient bounds:     " << yes_no(primed.hb2_prime.ok)
            << "  (min slack " << format_double(primed.hb2_prime.slack) << ")\n"
            << "  (HL0)' pointwise:              " << yes_no(primed.hl0_prime.ok) << "\n"
            << "  (HL1)' pointwise:              " << yes_no(primed.hl1_prime.ok) << "\n"
            << "  (HL2)' pointwise:              " << yes_no(primed.hl2_prime.ok) << "\n"
            << "  HB1: lambda_0(a1) = " << format_double(hb.report.lambda_a1)
            << ", lambda_0(a2) = " << format_double(hb.report.lambda_a2) << " -> "
            << yes_no(hb.report.hb1_ok) << "\n";
        if (hb.report.hb1_ok) {
            txt << "  HB2: lambda_0(a1 - c1 v*) = " << format_double(hb.report.lambda_invasion)
                << ", lambda_0(a2 - b2 u*) = " << format_double(hb.report.lambda_stability)
                << " -> " << yes_no(hb.report.hb2_ok) << "\n"
                << "  note: HB2's global-stability clause is sampled, not proven; the two\n"
                << "  linear verdicts above are the numeric content.\n";
        }
    } catch (const HypothesisHB0Violated& e) {
        csv.cell("hb0").cell("fail");
        csv.end_row();
        csv.cell("hb0_detail").cell(std::string(e.what()));
        csv.end_row();
        txt << "HB0: FAIL -- " << e.what() << "\n";
        all_ok = false;
    }

    csv.write(out + "/check.csv");
    write_text_file(out + "/check.txt", txt.str());
    std::cout << txt.str();
    std::cout << (all_ok ? "all checks pass" : "hypothesis failure") << "\n";
    return all_ok ? 0 : 2;
}

// ---- steady ----------------------------------------------------------------

void write_orbit_csv(const std::string& path, const PeriodicOrbit& orbit) {
    Csv csv("nldisp.orbit.v1", {"t", "x", "value"});
    for (int k = 0; k < orbit.tg.nt; ++k)
        for (int j = 0; j < orbit.grid.nx; ++j) {
            csv.cell(k * orbit.tg.dt()).cell(orbit.grid.x(j)).cell(orbit.at(k, j));
            csv.end_row();
        }
    csv.write(path);
}

int cmd_steady(const CommonArgs& args) {
    LoadedConfig cfg = load_from_args(args);
    std::string out = resolve_out_dir(args, "steady");
    ensure_output_dir(out, args.force);
    CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
    TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};
    PeriodicOrbit ustar = periodic_attractor(cfg.habitat, 1, g, tg);
    PeriodicOrbit vstar = periodic_attractor(cfg.habitat, 2, g, tg);
    write_orbit_csv(out + "/ustar.csv", ustar);
    write_orbit_csv(out + "/vstar.csv", vstar);
    Csv csv("nldisp.steady-summary.v1", {"key", "value"});
    csv.cell("ustar_min").cell(ustar.vmin);
    csv.end_row();
    csv.cell("ustar_max").cell(ustar.vmax);
    csv.end_row();
    csv.cell("ustar_periods").cell(static_cast<long long>(ustar.periods_marched));
    csv.end_row();
    csv.cell("ustar_drift").cell(ustar.drift);
    csv.end_row();
    csv.cell("vstar_min").cell(vstar.vmin);
    csv.end_row();
    csv.cell("vstar_max").cell(vstar.vmax);
    csv.end_row();
    csv.cell("vstar_periods").cell(static_cast<long long>(vstar.periods_marched));
    csv.end_row();
    csv.cell("vstar_drift").cell(vstar.drift);
    csv.end_row();
    csv.write(out + "/steady.csv");
    std::cout << "u*: range [" << format_double(ustar.vmin) << ", " << format_double(ustar.vmax)
              << "], " << ustar.periods_marched << " periods, drift "
              << format_double(ustar.drift) << "\n";
    std::cout << "v*: range [" << format_double(vstar.vmin) << ", " << format_double(vstar.vmax)
              << "], " << vstar.periods_marched << " periods, drift "
              << format_double(vstar.drift) << "\n";
    return 0;
}

// ---- lambda ----------------------------------------------------------------

int cmd_lambda(const CommonArgs& args, const std::vector<double>& mus, const std::string& which) {
    LoadedConfig cfg = load_from_args(args);
    std::string out = resolve_out_dir(args, "lambda");
    ensure_output_dir(out, args.force);
    CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
    TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};

    PeriodicOrbit ustar, vstar;
    CoeffSampler a;
    if (which == "a1") {
        a = coeff_sampler(cfg.habitat, Coeff::a1, g);
    } else if (which == "a2") {
        a = coeff_sampler(cfg.habitat, Coeff::a2, g);
    } else if (which == "eff1") {
        vstar = periodic_attractor(cfg.habitat, 2, g, tg);
        a = effective_a1(cfg.habitat, vstar, g);
    } else if (which == "eff2") {
        ustar = periodic_attractor(cfg.habitat, 1, g, tg);
        a = stability_a2(cfg.habitat, ustar, g);
    } else {
        throw UsageError("--which must be a1 | a2 | eff1 | eff2");
    }

    Csv csv("nldisp.lambda.v1", {"mu", "lambda", "iterations", "residual"});
    for (double mu : mus) {
        SpectralResult r = principal_spectrum_point(cfg.habitat, g, tg, cfg.run.xi, mu, a);
        csv.cell(mu).cell(r.lambda).cell(static_cast<long long>(r.iterations)).cell(r.residual);
        csv.end_row();
        std::cout << "lambda_0(xi=" << cfg.run.xi << ", mu=" << format_double(mu) << ", " << which
                  << ") = " << format_double(r.lambda) << "\n";
    }
    csv.write(out + "/lambda.csv");
    return 0;
}

// ---- speed -----------------------------------------------------------------

void write_speed_csvs(const std::string& out, const SpeedResult& r) {
    Csv csv("nldisp.speed.v1", {"mu", "lambda", "c", "approx"});
    for (const SpeedSample& s : r.samples) {
        csv.cell(s.mu).cell(s.lambda).cell(s.c).cell(static_cast<long long>(s.approx ? 1 : 0));
        csv.end_row();
    }
    csv.write(out + "/speed.csv");
    Csv summary("nldisp.speed-summary.v1", {"key", "value"});
    summary.cell("c_star").cell(r.c_star);
    summary.end_row();
    summary.cell("mu_star").cell(r.mu_star);
    summary.end_row();
    summary.cell("lambda_star").cell(r.lambda_star);
    summary.end_row();
    summary.cell("bracket_lo").cell(r.bracket_lo);
    summary.end_row();
    summary.cell("bracket_hi").cell(r.bracket_hi);
    summary.end_row();
    summary.write(out + "/speed_summary.csv");
}

int cmd_speed(const CommonArgs& args, const std::string& which) {
    LoadedConfig cfg = load_from_args(args);
    std::string out = resolve_out_dir(args, "speed");
    ensure_output_dir(out, args.force);
    CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
    TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};
    SpeedOptions opt;
    opt.jobs = args.jobs;

    SpeedResult r;
    if (which == "linear") {
        PeriodicOrbit vstar = periodic_attractor(cfg.habitat, 2, g, tg);
        double l1 = principal_spectrum_point(cfg.habitat, g, tg, +1, 0.0,
                                             coeff_sampler(cfg.habitat, Coeff::a1, g))
                        .lambda;
        if (!(l1 > tol_hyp)) throw HB1Violated("lambda_0(a1) = " + std::to_string(l1));
        r = linear_speed(cfg.habitat, g, tg, cfg.run.xi, vstar, opt);
    } else if (which == "species1") {
        r = single_species_speed(cfg.habitat, g, tg, cfg.run.xi, 1, opt);
    } else if (which == "species2") {
        r = single_species_speed(cfg.habitat, g, tg, cfg.run.xi, 2, opt);
    } else {
        throw UsageError("--which must be linear | species1 | species2");
    }
    write_speed_csvs(out, r);
    std::cout << "c_star = " << format_double(r.c_star) << " at mu_star = "
              << format_double(r.mu_star) << " (xi = " << cfg.run.xi << ", " << which << ")\n";
    return 0;
}

// ---- front -----------------------------------------------------------------

struct FrontArtifacts {
    SpeedResult speed;
    SpeedIntervalEstimate est;
    FrontRun run;
    LineGrid line;
    PeriodicOrbit ustar, vstar;
};

FrontArtifacts run_front_pipeline(const LoadedConfig& cfg, int jobs) {
    CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
    TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};
    FrontArtifacts art{
        {}, {}, {{}, false, 0.0, cfg.run.xi}, make_line_grid(g, std::max(cfg.grid.L, 1.0)),
        {}, {}};
    art.ustar = periodic_attractor(cfg.habitat, 1, g, tg);
    art.vstar = periodic_attractor(cfg.habitat, 2, g, tg);
    SpeedOptions sopt;
    sopt.jobs = jobs;
    art.speed = linear_speed(cfg.habitat, g, tg, cfg.run.xi, art.vstar, sopt);

    double t_end = cfg.run.t_end > 0.0 ? cfg.run.t_end : 100.0 * tg.T;
    double L = cfg.grid.L;
    if (L <= 0.0)
        L = std::fabs(cfg.run.s0) + front_cutoff +
            (std::max(0.0, art.speed.c_star) + 0.5) * t_end + 4.0 * cfg.habitat.kernel().r0 + 2.0;
    art.line = make_line_grid(g, L);
    FrontInit init = make_front(cfg.habitat, art.line, cfg.run.xi, cfg.run.s0, cfg.run.delta,
                                cfg.run.sharpness, art.ustar, art.vstar);
    art.run = run_front(cfg.habitat, art.line, tg, cfg.run.xi, art.ustar, art.vstar, init, t_end,
                        cfg.run.stride, art.speed.c_star);
    art.est = estimate_interval(art.run, cfg.habitat, art.line, art.ustar);
    return art;
}

void write_front_artifacts(const std::string& out, const LoadedConfig& cfg,
                           const FrontArtifacts& art) {
    // trajectory CSV (thinned in x; full resolution feeds the level tracker)
    int n = art.line.n();
    int stride_x = cfg.run.traj_stride_x > 0 ? cfg.run.traj_stride_x
                                             : std::max(1, (n + 511) / 512);
    Csv traj("nldisp.trajectory.v1", {"t", "x", "u", "v_transformed", "v_original"});
    const double dt = cfg.habitat.T() / cfg.grid.nt;
    for (std::size_t s = 0; s < art.run.traj.times.size(); ++s) {
        double t = art.run.traj.times[s];
        int krow = static_cast<int>(std::llround(t / dt)) % cfg.grid.nt;
        for (int i = 0; i < n; i += stride_x) {
            double vt = art.run.traj.v[s][static_cast<std::size_t>(i)];
            double vorig = art.vstar.at(krow, i % art.line.cell.nx) - vt;
            traj.cell(t)
                .cell(art.line.x(i))
                .cell(art.run.traj.u[s][static_cast<std::size_t>(i)])
                .cell(vt)
                .cell(vorig);
            traj.end_row();
        }
    }
    traj.write(out + "/trajectory.csv");

    Csv levels("nldisp.levels.v1", {"theta", "t", "position"});
    for (const LevelTrack* tr : {&art.est.low, &art.est.high})
        for (std::size_t i = 0; i < tr->times.size(); ++i) {
            levels.cell(tr->theta).cell(tr->times[i]).cell(tr->positions[i]);
            levels.end_row();
        }
    levels.write(out + "/levels.csv");

    Csv summary("nldisp.front-summary.v1", {"key", "value"});
    summary.cell("c_low_hat").cell(art.est.c_low_hat);
    summary.end_row();
    summary.cell("c_high_hat").cell(art.est.c_high_hat);
    summary.end_row();
    summary.cell("r2_low").cell(art.est.low.r2);
    summary.end_row();
    summary.cell("r2_high").cell(art.est.high.r2);
    summary.end_row();
    summary.cell("c_star_linear").cell(art.speed.c_star);
    summary.end_row();
    summary.cell("soft_margin_warning")
        .cell(static_cast<long long>(art.run.soft_margin_warning ? 1 : 0));
    summary.end_row();
    summary.cell("max_clamp").cell(art.run.traj.stats.max_clamp);
    summary.end_row();
    summary.write(out + "/front_summary.csv");

    SvgPlot plot("front position vs time", "t", "x * xi");
    plot.add_series(art.est.low.times, art.est.low.positions, "#1f77b4", "0.99 level", true);
    plot.add_series(art.est.high.times, art.est.high.positions, "#d62728", "0.01 level", true);
    plot.add_fit_line(art.est.low.slope, art.est.low.intercept, "#1f77b4", "fit 0.99");
    plot.add_fit_line(art.est.high.slope, art.est.high.intercept, "#d62728", "fit 0.01");
    // reference line with the linear-speed slope through the first fitted point
    double t0 = art.est.high.times.empty() ? 0.0 : art.est.high.times.front();
    double x0 = art.est.high.positions.empty() ? 0.0 : art.est.high.positions.front();
    plot.add_fit_line(art.speed.c_star, x0 - art.speed.c_star * t0, "#2ca02c",
                      "reference c_bar*_inf");
    plot.write(out + "/front.svg");
}

int cmd_front(const CommonArgs& args) {
    LoadedConfig cfg = load_from_args(args);
    std::string out = resolve_out_dir(args, "front");
    ensure_output_dir(out, args.force);
    FrontArtifacts art = run_front_pipeline(cfg, args.jobs);
    write_front_artifacts(out, cfg, art);
    std::cout << "c_low_hat = " << format_double(art.est.c_low_hat)
              << ", c_high_hat = " << format_double(art.est.c_high_hat)
              << " (reference c_bar*_inf = " << format_double(art.speed.c_star) << ")\n";
    return 0;
}

// ---- determinacy -----------------------------------------------------------

int cmd_determinacy(const CommonArgs& args) {
    LoadedConfig cfg = load_from_args(args);
    std::string out = resolve_out_dir(args, "determinacy");
    ensure_output_dir(out, args.force);
    CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
    TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};

    DeterminacyOptions opt;
    opt.speed.jobs = args.jobs;
    opt.t_end = cfg.run.t_end;
    opt.L = cfg.grid.L;
    opt.delta = cfg.run.delta;
    opt.s0 = cfg.run.s0;
    opt.sharpness = cfg.run.sharpness;
    opt.stride = cfg.run.stride;
    DeterminacyReport rep = determinacy_verdict(cfg.habitat, g, tg, cfg.run.xi, opt);

    Csv csv("nldisp.determinacy.v1", {"key", "value"});
    auto kv = [&](const std::string& k, const std::string& v) {
        csv.cell(k).cell(v);
        csv.end_row();
    };
    auto kvd = [&](const std::string& k, double v) { kv(k, format_double(v)); };
    kv("verdict", rep.verdict);
    kv("xi", std::to_string(rep.xi));
    kv("hb1", yes_no(rep.hb.hb1_ok));
    kv("hb2", yes_no(rep.hb.hb2_ok));
    kvd("lambda_a1", rep.hb.lambda_a1);
    kvd("lambda_a2", rep.hb.lambda_a2);
    kvd("lambda_invasion", rep.hb.lambda_invasion);
    kvd("lambda_stability", rep.hb.lambda_stability);
    kv("hl0", yes_no(rep.hl0.ok));
    kvd("hl0_slack", rep.hl0.slack);
    kv("hl1", yes_no(rep.hl1.ok));
    kvd("hl1_slack", rep.hl1.slack);
    kv("hl2", yes_no(rep.hl2.ok));
    kvd("hl2_slack", rep.hl2.slack);
    kvd("c_bar_star_inf", rep.speed.c_star);
    kvd("mu_star", rep.speed.mu_star);
    kv("witness_ok", yes_no(rep.witness_ok));
    kvd("lambda2", rep.lambda2);
    if (!rep.witness_error.empty()) kv("witness_error", rep.witness_error);
    kv("lemma42", yes_no(rep.lemma42.ok()));
    kvd("lemma42_slack_c1v_b1u", rep.lemma42.first.slack);
    kvd("lemma42_slack_c2v_b2u", rep.lemma42.second.slack);
    kvd("C0", rep.C0);
    if (!rep.c0_error.empty()) kv("c0_error", rep.c0_error);
    kv("front_ok", yes_no(rep.front_ok));
    if (!rep.front_error.empty()) kv("front_error", rep.front_error);
    kvd("c_low_hat", rep.c_low_hat);
    kvd("c_high_hat", rep.c_high_hat);
    kvd("r2_low", rep.r2_low);
    kvd("r2_high", rep.r2_high);
    kvd("gap_low_rel", rep.gap_low_rel);
    kvd("gap_high_rel", rep.gap_high_rel);
    kv("front_estimates_scope", "empirical over tested family");
    csv.write(out + "/determinacy.csv");

    std::ostringstream txt;
    txt << "linear determinacy report (xi = " << rep.xi << ")\n"
        << "  verdict: " << rep.verdict << "\n"
        << "  HB1: " << yes_no(rep.hb.hb1_ok) << "  (lambda_0(a1) = "
        << format_double(rep.hb.lambda_a1) << ", lambda_0(a2) = "
        << format_double(rep.hb.lambda_a2) << ")\n"
        << "  HB2: " << yes_no(rep.hb.hb2_ok) << "  (lambda_0(a1 - c1 v*) = "
        << format_double(rep.hb.lambda_invasion) << ", lambda_0(a2 - b2 u*) = "
        << format_double(rep.hb.lambda_stability)
        << "; global-stability clause sampled, not proven)\n"
        << "  HL0: " << yes_no(rep.hl0.ok) << " (slack " << format_double(rep.hl0.slack)
        << "), HL1: " << yes_no(rep.hl1.ok) << " (slack " << format_double(rep.hl1.slack)
        << "), HL2: " << yes_no(rep.hl2.ok) << " (slack " << format_double(rep.hl2.slack)
        << ")\n"
        << "  c_bar*_inf = " << format_double(rep.speed.c_star) << " at mu* = "
        << format_double(rep.speed.mu_star) << "\n"
        << "  eigen witness: " << (rep.witness_ok ? "ok" : rep.witness_error)
        << ", lambda2 = " << format_double(rep.lambda2) << "\n"
        << "  Lemma 4.2: " << yes_no(rep.lemma42.ok()) << "\n"
        << "  C0 (super-solution bound) = " << format_double(rep.C0) << "\n";
    if (rep.front_ok)
        txt << "  fronts: c_low_hat = " << format_double(rep.c_low_hat) << ", c_high_hat = "
            << format_double(rep.c_high_hat) << " (gaps "
            << format_double(100.0 * rep.gap_low_rel) << "%, "
            << format_double(100.0 * rep.gap_high_rel)
            << "%; empirical over tested family)\n";
    else if (!rep.front_error.empty())
        txt << "  fronts: failed -- " << rep.front_error << "\n";
    write_text_file(out + "/determinacy.txt", txt.str());
    std::cout << txt.str();
    return rep.determinate ? 0 : 2;
}

// ---- sweep -----------------------------------------------------------------

int cmd_sweep(const CommonArgs& args, const std::string& param, std::vector<double> values) {
    if (param.empty()) throw UsageError("--param is required");
    if (values.empty()) throw UsageError("--values is required");
    std::sort(values.begin(), values.end());

    std::string out = resolve_out_dir(args, "sweep");
    ensure_output_dir(out, args.force);

    struct Row {
        double value;
        double c_star = 0.0, mu_star = 0.0, lambda2 = 0.0;
        bool hl0 = false, hl1 = false, hl2 = false;
        std::string verdict = "error";
        std::string error;
    };
    std::vector<Row> rows(values.size());

    auto work = [&](std::size_t i) {
        Row& row = rows[i];
        row.value = values[i];
        try {
            CommonArgs sub = args;
            sub.overrides.push_back("params." + param + "=" + format_double(values[i]));
            LoadedConfig cfg = load_from_args(sub);
            CellGrid g = make_cell_grid(cfg.grid.nx, cfg.habitat.p());
            TimeGrid tg{cfg.grid.nt, cfg.habitat.T()};
            DeterminacyOptions opt;
            opt.run_fronts = false;
            DeterminacyReport rep = determinacy_verdict(cfg.habitat, g, tg, cfg.run.xi, opt);
            row.c_star = rep.speed.c_star;
            row.mu_star = rep.speed.mu_star;
            row.lambda2 = rep.lambda2;
            row.hl0 = rep.hl0.ok;
            row.hl1 = rep.hl1.ok;
            row.hl2 = rep.hl2.ok;
            row.verdict = rep.verdict;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    int jobs = std::max(1, args.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < values.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w]() {
                for (std::size_t i = static_cast<std::size_t>(w); i < values.size();
                     i += static_cast<std::size_t>(jobs))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }

    Csv csv("nldisp.sweep.v1",
            {"value", "c_star", "mu_star", "lambda2", "hl0", "hl1", "hl2", "verdict", "error"});
    for (const Row& row : rows) {
        csv.cell(row.value)
            .cell(row.c_star)
            .cell(row.mu_star)
            .cell(row.lambda2)
            .cell(static_cast<long long>(row.hl0 ? 1 : 0))
            .cell(static_cast<long long>(row.hl1 ? 1 : 0))
            .cell(static_cast<long long>(row.hl2 ? 1 : 0))
            .cell(row.verdict)
            .cell(row.error);
        csv.end_row();
        std::cout << param << " = " << format_double(row.value) << ": "
                  << (row.error.empty() ? "c_star = " + format_double(row.c_star) + ", " +
                                              row.verdict
                                        : "error: " + row.error)
                  << "\n";
    }
    csv.write(out + "/sweep.csv");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spreading speeds and linear determinacy for two-species competition systems "
                 "with nonlocal dispersal in periodic habitats"};
    app.require_subcommand(1);

    CommonArgs check_args, steady_args, lambda_args, speed_args, front_args, det_args, sweep_args;
    std::vector<double> mus{0.0};
    std::string lambda_which = "a1", speed_which = "linear", sweep_param;
    std::vector<double> sweep_values;

    add_common(app.add_subcommand("check", "hypothesis report"), check_args);
    add_common(app.add_subcommand("steady", "periodic attractors u*, v*"), steady_args);
    CLI::App* lam = app.add_subcommand("lambda", "principal spectrum points");
    add_common(lam, lambda_args);
    lam->add_option("--mu", mus, "decay rates to evaluate");
    lam->add_option("--which", lambda_which, "coefficient: a1 | a2 | eff1 | eff2");
    CLI::App* spd = app.add_subcommand("speed", "linear spreading speed");
    add_common(spd, speed_args);
    spd->add_option("--which", speed_which, "linear | species1 | species2");
    add_common(app.add_subcommand("front", "front simulation and interval estimate"), front_args,
               true);
    add_common(app.add_subcommand("determinacy", "full linear-determinacy diagnostics"), det_args,
               true);
    CLI::App* swp = app.add_subcommand("sweep", "parameter sweep of speed and verdict");
    add_common(swp, sweep_args);
    swp->add_option("--param", sweep_param, "name from [params] to sweep");
    swp->add_option("--values", sweep_values, "values to sweep");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("check")) return cmd_check(check_args);
        if (app.got_subcommand("steady")) return cmd_steady(steady_args);
        if (app.got_subcommand("lambda")) return cmd_lambda(lambda_args, mus, lambda_which);
        if (app.got_subcommand("speed")) return cmd_speed(speed_args, speed_which);
        if (app.got_subcommand("front")) return cmd_front(front_args);
        if (app.got_subcommand("determinacy")) return cmd_determinacy(det_args);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args, sweep_param, sweep_values);
    } catch (const HypothesisHB0Violated& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const HB1Violated& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const FrontHitBoundary& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
