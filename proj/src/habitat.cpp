#include "nldisp/habitat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nldisp/errors.hpp"

namespace nldisp {

const char* coeff_name(Coeff c) {
    switch (c) {
        case Coeff::a1: return "a1";
        case Coeff::b1: return "b1";
        case Coeff::c1: return "c1";
        case Coeff::a2: return "a2";
        case Coeff::b2: return "b2";
        case Coeff::c2: return "c2";
    }
    return "?";
}

HabitatSpec::HabitatSpec(std::array<ExprPtr, 6> coeffs, double T, double p, KernelSpec kernel,
                         std::map<std::string, double> params)
    : coeffs_(std::move(coeffs)), T_(T), p_(p), kernel_(kernel), params_(std::move(params)) {
    if (!(T_ > 0.0)) throw ConfigError("T must be positive");
    if (!(p_ > 0.0)) throw ConfigError("p must be positive");
    for (const auto& [name, value] : params_) {
        if (name == "t" || name == "x" || name == "T" || name == "p" || name == "pi")
            throw ConfigError("parameter name '" + name + "' is reserved");
        base_ctx_.bind(name, value);
    }
    base_ctx_.bind("T", T_);
    base_ctx_.bind("p", p_);
    base_ctx_.bind("t", 0.0);
    base_ctx_.bind("x", 0.0);
}

double HabitatSpec::coeff(Coeff c, double t, double x) const {
    EvalContext ctx = base_ctx_;
    ctx.rebind("t", t);
    ctx.rebind("x", x);
    return eval(coeff_expr(c), ctx);
}

void HabitatSpec::sample_row(Coeff c, double t, const CellGrid& g, std::span<double> out) const {
    EvalContext ctx = base_ctx_;
    ctx.rebind("t", t);
    const Expr& e = coeff_expr(c);
    for (int j = 0; j < g.nx; ++j) {
        ctx.rebind("x", g.x(j));
        out[static_cast<std::size_t>(j)] = eval(e, ctx);
    }
}

void HabitatSpec::sample_row_line(Coeff c, double t, const LineGrid& g,
                                  std::span<double> out) const {
    EvalContext ctx = base_ctx_;
    ctx.rebind("t", t);
    const Expr& e = coeff_expr(c);
    for (int i = 0; i < g.n(); ++i) {
        ctx.rebind("x", g.x(i));
        out[static_cast<std::size_t>(i)] = eval(e, ctx);
    }
}

namespace {

struct ConfigEntry {
    std::string value;
    bool quoted = false;
    int line = 0;
};

using Section = std::map<std::string, ConfigEntry>;
using ConfigData = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

ConfigData parse_config_text(const std::string& text) {
    ConfigData data;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments, but not inside quotes
        bool in_quote = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            if (line[i] == '#' && !in_quote) {
                line.erase(i);
                break;
            }
        }
        std::string s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            data[section];  // sections may be empty
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": entry outside any section");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        ConfigEntry entry;
        entry.line = lineno;
        if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated quote");
            entry.value = value.substr(1, value.size() - 2);
            entry.quoted = true;
        } else {
            entry.value = value;
        }
        if (data[section].count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "]");
        data[section][key] = std::move(entry);
    }
    return data;
}

double parse_number_entry(const std::string& section, const std::string& key,
                          const ConfigEntry& entry) {
    try {
        std::size_t used = 0;
        double v = std::stod(entry.value, &used);
        if (used != entry.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": '" + entry.value + "' is not a number");
    }
}

class SectionReader {
public:
    SectionReader(const ConfigData& data, std::string name) : name_(std::move(name)) {
        auto it = data.find(name_);
        if (it != data.end()) section_ = &it->second;
    }

    bool present() const { return section_ != nullptr; }

    const ConfigEntry* get(const std::string& key) {
        used_.insert(key);
        if (!section_) return nullptr;
        auto it = section_->find(key);
        return it == section_->end() ? nullptr : &it->second;
    }

    const ConfigEntry& require(const std::string& key) {
        const ConfigEntry* e = get(key);
        if (!e) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
        return *e;
    }

    double number(const std::string& key, double fallback) {
        const ConfigEntry* e = get(key);
        return e ? parse_number_entry(name_, key, *e) : fallback;
    }

    double require_number(const std::string& key) {
        return parse_number_entry(name_, key, require(key));
    }

    void check_no_unknown_keys() const {
        if (!section_) return;
        for (const auto& [key, entry] : *section_) {
            if (!used_.count(key))
                throw ConfigError("unknown key '" + key + "' in [" + name_ + "] (line " +
                                  std::to_string(entry.line) + ")");
        }
    }

private:
    std::string name_;
    const Section* section_ = nullptr;
    std::set<std::string> used_;
};

void verify_hb0_and_periodicity(const HabitatSpec& h) {
    const int nt = 64, nx = 64;
    const double T = h.T(), p = h.p();
    for (Coeff c : all_coeffs) {
        bool positivity_required =
            c == Coeff::b1 || c == Coeff::c1 || c == Coeff::b2 || c == Coeff::c2;
        double max_abs = 0.0;
        for (int i = 0; i < nt; ++i) {
            double t = i * T / nt;
            for (int j = 0; j < nx; ++j) {
                double x = j * p / nx;
                double v = h.coeff(c, t, x);
                max_abs = std::max(max_abs, std::fabs(v));
                if (positivity_required && !(v > 0.0))
                    throw HypothesisHB0Violated(std::string(coeff_name(c)) + "(" +
                                                std::to_string(t) + ", " + std::to_string(x) +
                                                ") = " + std::to_string(v) + " is not positive");
            }
        }
        double tol = 1e-9 * (1.0 + max_abs);
        for (int i = 0; i < nt; ++i) {
            double t = i * T / nt;
            for (int j = 0; j < nx; ++j) {
                double x = j * p / nx;
                double v = h.coeff(c, t, x);
                if (std::fabs(h.coeff(c, t + T, x) - v) > tol ||
                    std::fabs(h.coeff(c, t, x + p) - v) > tol)
                    throw ConfigError(std::string(coeff_name(c)) +
                                      " is not (T,p)-periodic at t = " + std::to_string(t) +
                                      ", x = " + std::to_string(x));
            }
        }
    }
}

}  // namespace

LoadedConfig load_habitat(const std::string& config_text) {
    return load_habitat(config_text, {});
}

LoadedConfig load_habitat(const std::string& config_text,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
    ConfigData data = parse_config_text(config_text);

    for (const auto& [path, value] : overrides) {
        std::size_t dot = path.find('.');
        if (dot == std::string::npos)
            throw ConfigError("override '" + path + "' must be section.key");
        std::string section = path.substr(0, dot);
        std::string key = path.substr(dot + 1);
        ConfigEntry entry;
        entry.value = value;
        if (!value.empty() && value.front() == '"' && value.back() == '"' && value.size() >= 2) {
            entry.value = value.substr(1, value.size() - 2);
            entry.quoted = true;
        } else if (section == "coefficients") {
            entry.quoted = true;  // expressions arrive already unquoted from the shell
        }
        data[section][key] = std::move(entry);
    }

    static const std::set<std::string> known_sections{"kernel", "coefficients", "periods",
                                                      "params", "grid", "run"};
    for (const auto& [name, section] : data) {
        if (!known_sections.count(name)) throw ConfigError("unknown section [" + name + "]");
    }

    SectionReader periods(data, "periods");
    if (!periods.present()) throw ConfigError("missing section [periods]");
    double T = periods.require_number("T");
    double p = periods.require_number("p");
    periods.check_no_unknown_keys();
    if (!(T > 0.0)) throw ConfigError("[periods] T must be positive");
    if (!(p > 0.0)) throw ConfigError("[periods] p must be positive");

    SectionReader kernel_sec(data, "kernel");
    if (!kernel_sec.present()) throw ConfigError("missing section [kernel]");
    KernelSpec kernel;
    kernel.shape = kernel_shape_from_string(kernel_sec.require("shape").value);
    kernel.r0 = kernel_sec.require_number("r0");
    kernel_sec.check_no_unknown_keys();
    if (!(kernel.r0 > 0.0)) throw ConfigError("[kernel] r0 must be positive");

    std::map<std::string, double> params;
    SectionReader params_sec(data, "params");
    if (params_sec.present()) {
        for (const auto& [key, entry] : data.at("params"))
            params[key] = parse_number_entry("params", key, entry);
    }

    SectionReader coeff_sec(data, "coefficients");
    if (!coeff_sec.present()) throw ConfigError("missing section [coefficients]");
    std::array<ExprPtr, 6> exprs;
    for (Coeff c : all_coeffs) {
        const ConfigEntry& entry = coeff_sec.require(coeff_name(c));
        if (!entry.quoted)
            throw ConfigError(std::string("[coefficients] ") + coeff_name(c) +
                              " must be a quoted expression");
        try {
            exprs[static_cast<std::size_t>(static_cast<int>(c))] = parse(entry.value);
        } catch (const Error& e) {
            throw ConfigError(std::string("[coefficients] ") + coeff_name(c) + ": " + e.what());
        }
        for (const std::string& v : free_vars(*exprs[static_cast<int>(c)])) {
            if (v != "t" && v != "x" && v != "T" && v != "p" && !params.count(v))
                throw ConfigError(std::string("[coefficients] ") + coeff_name(c) +
                                  " references undefined parameter '" + v + "'");
        }
    }
    coeff_sec.check_no_unknown_keys();

    GridConfig grid;
    SectionReader grid_sec(data, "grid");
    grid.nx = static_cast<int>(grid_sec.number("nx", 64));
    grid.nt = static_cast<int>(grid_sec.number("nt", 64));
    grid.L = grid_sec.number("L", 0.0);
    grid_sec.check_no_unknown_keys();
    if (grid.nx < 16) throw ConfigError("[grid] nx must be >= 16");
    if (grid.nt < 1) throw ConfigError("[grid] nt must be >= 1");

    RunSettings run;
    SectionReader run_sec(data, "run");
    run.t_end = run_sec.number("t_end", 0.0);
    run.xi = static_cast<int>(run_sec.number("xi", 1.0));
    run.delta = run_sec.number("delta", 0.5);
    run.s0 = run_sec.number("s0", 0.0);
    run.sharpness = run_sec.number("sharpness", 1.0);
    run.stride = static_cast<int>(run_sec.number("stride", 1.0));
    run.seed = static_cast<long long>(run_sec.number("seed", 0.0));
    run.traj_stride_x = static_cast<int>(run_sec.number("traj_stride_x", 0.0));
    run_sec.check_no_unknown_keys();
    if (run.xi != 1 && run.xi != -1) throw ConfigError("[run] xi must be +1 or -1");
    if (!(run.delta > 0.0 && run.delta < 1.0)) throw ConfigError("[run] delta must be in (0,1)");
    if (run.stride < 1) throw ConfigError("[run] stride must be >= 1");

    HabitatSpec habitat(std::move(exprs), T, p, kernel, std::move(params));
    verify_hb0_and_periodicity(habitat);
    return LoadedConfig{std::move(habitat), grid, run};
}

LoadedConfig load_habitat_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_habitat(ss.str());
}

double CoefficientBounds::lo(Coeff c) const {
    switch (c) {
        case Coeff::a1: return a1L;
        case Coeff::b1: return b1L;
        case Coeff::c1: return c1L;
        case Coeff::a2: return a2L;
        case Coeff::b2: return b2L;
        case Coeff::c2: return c2L;
    }
    return 0;
}

double CoefficientBounds::hi(Coeff c) const {
    switch (c) {
        case Coeff::a1: return a1M;
        case Coeff::b1: return b1M;
        case Coeff::c1: return c1M;
        case Coeff::a2: return a2M;
        case Coeff::b2: return b2M;
        case Coeff::c2: return c2M;
    }
    return 0;
}

CoefficientBounds bounds(const HabitatSpec& h, int nt, int nx) {
    if (nt < 8 || nx < 8) throw ConfigError("bounds need nt, nx >= 8");
    double lo[6], hi[6];
    for (int c = 0; c < 6; ++c) {
        lo[c] = std::numeric_limits<double>::infinity();
        hi[c] = -std::numeric_limits<double>::infinity();
    }
    for (int i = 0; i < nt; ++i) {
        double t = i * h.T() / nt;
        for (int j = 0; j < nx; ++j) {
            double x = j * h.p() / nx;
            for (int c = 0; c < 6; ++c) {
                double v = h.coeff(static_cast<Coeff>(c), t, x);
                lo[c] = std::min(lo[c], v);
                hi[c] = std::max(hi[c], v);
            }
        }
    }
    return CoefficientBounds{lo[0], hi[0], lo[1], hi[1], lo[2], hi[2],
                             lo[3], hi[3], lo[4], hi[4], lo[5], hi[5]};
}

PrimedReport check_primed_hypotheses(const HabitatSpec& h, int nt, int nx) {
    PrimedReport rep;
    rep.bd = bounds(h, nt, nx);
    const CoefficientBounds& b = rep.bd;

    // (HB2)' coefficient part: a1L > c1M*a2M/c2L and a2M <= a1L*b2L/b1M.
    {
        double s1 = b.a1L - b.c1M * b.a2M / b.c2L;
        double s2 = b.a1L * b.b2L / b.b1M - b.a2M;
        rep.hb2_prime.slack = std::min(s1, s2);
        rep.hb2_prime.ok = rep.hb2_prime.slack >= -tol_hyp;
    }

    auto sweep = [&](auto&& lhs_minus_rhs) {
        HypCheck out;
        out.slack = std::numeric_limits<double>::infinity();
        for (int i = 0; i < nt; ++i) {
            double t = i * h.T() / nt;
            for (int j = 0; j < nx; ++j) {
                double x = j * h.p() / nx;
                double s = lhs_minus_rhs(t, x);
                if (s < out.slack) {
                    out.slack = s;
                    out.t_at = t;
                    out.x_at = x;
                }
            }
        }
        out.ok = out.slack >= -tol_hyp;
        return out;
    };

    auto C = [&](Coeff c, double t, double x) { return h.coeff(c, t, x); };

    rep.hl0_prime = sweep([&](double t, double x) {
        return C(Coeff::b2, t, x) * b.a1L / b.b1M - C(Coeff::c2, t, x) * b.a2M / b.c2L;
    });

    rep.hl1_prime = sweep([&](double t, double x) {
        double main = C(Coeff::a1, t, x) - C(Coeff::c1, t, x) * b.a2M / b.c2L -
                      C(Coeff::a2, t, x) + 2.0 * C(Coeff::c2, t, x) * b.a2L / b.c2M -
                      C(Coeff::b2, t, x) * b.a2M / b.c2L;
        double f1 = C(Coeff::b1, t, x) - C(Coeff::c1, t, x);
        double f2 = C(Coeff::b2, t, x) - C(Coeff::c2, t, x);
        return std::min({main, f1, f2});
    });

    rep.hl2_prime = sweep([&](double t, double x) {
        double common = C(Coeff::a1, t, x) - C(Coeff::c1, t, x) * b.a2M / b.c2L -
                        C(Coeff::a2, t, x) + 2.0 * C(Coeff::c2, t, x) * b.a2L / b.c2M;
        double s1 = common - C(Coeff::b2, t, x) * (b.a2M / b.c2L) * (b.c1M / b.b1L);
        double s2 = common - C(Coeff::b2, t, x) * (b.a2M / b.c2L) * (b.c2M / b.b2L);
        return std::min(s1, s2);
    });

    return rep;
}

}  // namespace nldisp
