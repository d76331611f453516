#ifndef NLDISP_HABITAT_HPP
#define NLDISP_HABITAT_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "nldisp/expr.hpp"
#include "nldisp/grid.hpp"
#include "nldisp/kernel.hpp"

namespace nldisp {

/// Coefficient slots of the competition system, in config order.
enum class Coeff { a1, b1, c1, a2, b2, c2 };
constexpr std::array<Coeff, 6> all_coeffs{Coeff::a1, Coeff::b1, Coeff::c1,
                                          Coeff::a2, Coeff::b2, Coeff::c2};
const char* coeff_name(Coeff c);

/// A periodic habitat: six coefficient expressions in (t, x), the periods,
/// and the dispersal kernel. Immutable after load; safe to share across
/// threads.
class HabitatSpec {
public:
    HabitatSpec(std::array<ExprPtr, 6> coeffs, double T, double p, KernelSpec kernel,
                std::map<std::string, double> params);

    double T() const { return T_; }
    double p() const { return p_; }
    const KernelSpec& kernel() const { return kernel_; }
    const std::map<std::string, double>& params() const { return params_; }
    const Expr& coeff_expr(Coeff c) const { return *coeffs_[static_cast<int>(c)]; }

    double coeff(Coeff c, double t, double x) const;

    /// Fills out[j] = coefficient(t, x_j) for all cell nodes.
    void sample_row(Coeff c, double t, const CellGrid& g, std::span<double> out) const;
    /// Same on line nodes.
    void sample_row_line(Coeff c, double t, const LineGrid& g, std::span<double> out) const;

private:
    std::array<ExprPtr, 6> coeffs_;
    double T_, p_;
    KernelSpec kernel_;
    std::map<std::string, double> params_;
    EvalContext base_ctx_;  // params + T + p
};

/// Grid/run settings carried alongside the habitat in a config file.
struct GridConfig {
    int nx = 64;
    int nt = 64;
    double L = 0.0;  // 0 = choose automatically for front runs
};

struct RunSettings {
    double t_end = 0.0;  // 0 = 100*T
    int xi = +1;
    double delta = 0.5;
    double s0 = 0.0;
    double sharpness = 1.0;
    int stride = 1;            // snapshots per period
    long long seed = 0;
    int traj_stride_x = 0;     // CSV spatial thinning; 0 = auto (<= 512 columns)
};

struct LoadedConfig {
    HabitatSpec habitat;
    GridConfig grid;
    RunSettings run;
};

/// Parses the plain-text config (sections [kernel], [coefficients],
/// [periods], [params], [grid], [run]) and validates HB0: positivity of
/// b1, c1, b2, c2 and (T, p)-periodicity of all six coefficients on a
/// 64 x 64 sampling grid. Unknown sections or keys are errors.
LoadedConfig load_habitat(const std::string& config_text);
LoadedConfig load_habitat_file(const std::string& path);

/// Applies "section.key=value" overrides to the config text representation
/// before parsing.
LoadedConfig load_habitat(const std::string& config_text,
                          const std::vector<std::pair<std::string, std::string>>& overrides);

/// Coefficient infima/suprema over the {iT/nt} x {jp/nx} sampling grid.
struct CoefficientBounds {
    double a1L, a1M, b1L, b1M, c1L, c1M;
    double a2L, a2M, b2L, b2M, c2L, c2M;

    double lo(Coeff c) const;
    double hi(Coeff c) const;
};

CoefficientBounds bounds(const HabitatSpec& h, int nt, int nx);

/// One sampled-inequality verdict: holds iff slack >= -tol_hyp everywhere.
struct HypCheck {
    bool ok = false;
    double slack = 0.0;  // min over samples of (lhs - rhs)
    double t_at = 0.0, x_at = 0.0;
};

/// Slack tolerance for every sampled hypothesis inequality (boundary-family
/// habitats have exactly zero slack; rounding noise must not flip verdicts).
constexpr double tol_hyp = 1e-6;

struct PrimedReport {
    HypCheck hb2_prime;  // coefficient-bound inequalities of (HB2)'
    HypCheck hl0_prime;
    HypCheck hl1_prime;
    HypCheck hl2_prime;
    CoefficientBounds bd;
};

/// Evaluates (HB2)', (HL0)', (HL1)', (HL2)' with bounds from the same grid;
/// the (HL0)'/(HL1)'/(HL2)' pointwise forms are swept over every sample.
PrimedReport check_primed_hypotheses(const HabitatSpec& h, int nt = 64, int nx = 64);

}  // namespace nldisp

#endif
