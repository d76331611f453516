#ifndef NLDISP_DETERMINACY_HPP
#define NLDISP_DETERMINACY_HPP

#include <optional>
#include <string>

#include "nldisp/fronts.hpp"
#include "nldisp/speeds.hpp"

namespace nldisp {

/// Pointwise hypothesis check over the orbit grid (nt x nx nodes at the
/// orbit row times); ok iff the minimal slack >= -tol_hyp.
struct HlCheck {
    bool ok = false;
    double slack = 0.0;
    double t_at = 0.0, x_at = 0.0;
};

/// which = 0, 1, 2 selects (HL0), (HL1), (HL2).
HlCheck check_HL(const HabitatSpec& h, const PeriodicOrbit& ustar, const PeriodicOrbit& vstar,
                 int which);

struct WitnessFields {
    PeriodicOrbit u_w;      // eigenfunction time course of the u-equation at mu*
    PeriodicOrbit v_w;      // periodic solution of the forced v-equation
    double lambda2 = 0.0;   // shifted principal spectrum point (must be < 0)
    double mu_star = 0.0;
    double lambda_star = 0.0;
};

/// Builds the eigen-witness pair (u_{xi,mu*}, v_{xi,mu*}): u_w from the
/// principal eigen course of the u-equation, v_w from the forced v-equation
/// with forcing b2 v* u_w and zero-order shift -lambda_xi(mu*). Throws
/// Lemma41Fails when the shifted spectrum point is nonnegative.
WitnessFields witness_fields(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg, int xi,
                             const SpeedResult& speed, const PeriodicOrbit& vstar,
                             const SpectralOptions& sopt = {});

struct Lemma42Report {
    HlCheck first;   // c1 v_w <= b1 u_w
    HlCheck second;  // c2 v_w <= b2 u_w
    bool ok() const { return first.ok && second.ok; }
};

Lemma42Report check_lemma42(const HabitatSpec& h, const PeriodicOrbit& u_w,
                            const PeriodicOrbit& v_w);

struct DeterminacyReport {
    int xi = +1;
    PrimedReport primed;
    HbReport hb;
    HlCheck hl0, hl1, hl2;
    SpeedResult speed;  // c_bar*_inf and mu*
    bool witness_ok = false;
    double lambda2 = 0.0;
    std::string witness_error;
    Lemma42Report lemma42;
    double C0 = 0.0;
    std::string c0_error;
    bool front_ok = false;
    std::string front_error;
    double c_low_hat = 0.0, c_high_hat = 0.0;
    double r2_low = 0.0, r2_high = 0.0;
    double gap_low_rel = 0.0, gap_high_rel = 0.0;
    bool front_margin_warning = false;
    bool determinate = false;
    std::string verdict;  // "determinate" | "not established"

    std::optional<SpeedIntervalEstimate> interval;
    std::optional<PeriodicOrbit> ustar, vstar;
};

struct DeterminacyOptions {
    SpeedOptions speed;
    C0Options c0;
    double t_end = 0.0;  // 0 -> 100 T
    double L = 0.0;      // 0 -> automatic from the linear speed
    double delta = 0.5;
    double s0 = 0.0;
    double sharpness = 1.0;
    int stride = 1;
    bool run_fronts = true;
};

/// The full pipeline: hypothesis checks, linear speed, eigen witnesses,
/// Lemma 4.2, super-solution bound, and the empirical front interval.
/// Verdict is "determinate" iff the HB checks pass, HL0 and (HL1 or HL2)
/// hold, lambda2 < 0, and both Lemma 4.2 inequalities hold; front gaps are
/// reported but never gate the verdict. Sub-step failures are embedded as
/// report entries rather than aborts where possible.
DeterminacyReport determinacy_verdict(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                      int xi, const DeterminacyOptions& opt = {});

}  // namespace nldisp

#endif
