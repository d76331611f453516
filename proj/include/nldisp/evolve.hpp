#ifndef NLDISP_EVOLVE_HPP
#define NLDISP_EVOLVE_HPP

#include <memory>
#include <optional>

#include "nldisp/habitat.hpp"
#include "nldisp/orbit.hpp"

namespace nldisp {

enum class SystemTag { single1, single2, competitive, cooperative, linear };

inline bool is_pair_form(SystemTag t) {
    return t == SystemTag::competitive || t == SystemTag::cooperative;
}

/// Jacobian bound of the reaction over the invariant region, used for the
/// explicit-Euler dt cap. u_cap/v_cap are the state ceilings (orbit maxima or
/// initial-data maxima, whichever is larger).
double reaction_bound(const CoefficientBounds& bd, SystemTag tag, double u_cap, double v_cap);

struct StepStats {
    double max_clamp = 0.0;      // applied clamp magnitude (cooperative form)
    double max_excursion = 0.0;  // pre-clamp exit from the invariant region
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> u;
    std::vector<Field> v;  // empty for single-species forms
    StepStats stats;
};

/// Forward-Euler stepper on the period cell. Coefficients are sampled once
/// per period at the left endpoint of each step and reused. The optional
/// Heun scheme exists only for the single-species forms, where orbit oracles
/// need second-order accuracy; everything nonlinear in production runs Euler.
class CellStepper {
public:
    enum class Scheme { euler, heun };

    CellStepper(const HabitatSpec& h, SystemTag tag, const CellGrid& g, const TimeGrid& tg,
                const PeriodicOrbit* ustar = nullptr, const PeriodicOrbit* vstar = nullptr,
                Scheme scheme = Scheme::euler);

    /// Linear twisted form u_t = K_{xi,mu} u - u + a(t,x) u.
    static CellStepper linear(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                              int xi, double mu, const CoeffSampler& a);

    void step(long long k, std::span<double> u, std::span<double> v);
    const TimeGrid& tg() const { return tg_; }
    const CellGrid& grid() const { return grid_; }
    SystemTag tag() const { return tag_; }
    const StepStats& stats() const { return stats_; }
    const SampledKernel& kernel() const { return kernel_; }

private:
    void reaction(long long k, std::span<const double> u, std::span<const double> v,
                  std::span<double> ru, std::span<double> rv) const;

    SystemTag tag_;
    CellGrid grid_;
    TimeGrid tg_;
    Scheme scheme_;
    SampledKernel kernel_;  // wrapped; twisted for the linear form
    const PeriodicOrbit* ustar_ = nullptr;
    const PeriodicOrbit* vstar_ = nullptr;
    // coefficient tables, nt rows each (sampled at left endpoints)
    std::array<std::vector<double>, 6> coeff_;
    std::vector<double> a_table_;  // linear form
    StepStats stats_;
    mutable Field conv_u_, conv_v_, pred_u_, pred_v_, ru_, rv_, ru2_, rv2_;

    std::span<const double> coeff_row(Coeff c, long long k) const;
};

/// Forward-Euler stepper on the truncated line. Pads supply values beyond
/// each end: zero, or the periodic extension of an orbit.
class LineStepper {
public:
    enum class Pad { zero, orbit };

    LineStepper(const HabitatSpec& h, SystemTag tag, const LineGrid& g, const TimeGrid& tg,
                const PeriodicOrbit* ustar, const PeriodicOrbit* vstar, Pad left, Pad right);

    void step(long long k, std::span<double> u, std::span<double> v);
    const TimeGrid& tg() const { return tg_; }
    const LineGrid& grid() const { return grid_; }
    SystemTag tag() const { return tag_; }
    const StepStats& stats() const { return stats_; }
    const SampledKernel& kernel() const { return kernel_; }

private:
    void fill_pads(long long k);

    SystemTag tag_;
    LineGrid grid_;
    TimeGrid tg_;
    SampledKernel kernel_;
    const PeriodicOrbit* ustar_;
    const PeriodicOrbit* vstar_;
    Pad left_, right_;
    std::array<std::vector<double>, 6> coeff_;  // nt rows x n nodes
    Field lpad_u_, rpad_u_, lpad_v_, rpad_v_, conv_u_, conv_v_;
    StepStats stats_;

    std::span<const double> coeff_row(Coeff c, long long k) const;
};

/// Marches `steps` Euler steps from (u0, v0), recording every record_every
/// steps (and always the final state).
Trajectory simulate(CellStepper& st, Field u0, Field v0, long long steps, long long record_every);
Trajectory simulate(LineStepper& st, Field u0, Field v0, long long steps, long long record_every);

/// Max over time and space of (lo - hi)^+ along two lockstep simulations;
/// the comparison-principle contract is <= 1e-10.
double check_order_preservation(const HabitatSpec& h, SystemTag tag, const CellGrid& g,
                                const TimeGrid& tg, const PeriodicOrbit* ustar,
                                const PeriodicOrbit* vstar, const Field& u_lo, const Field& v_lo,
                                const Field& u_hi, const Field& v_hi, double t_end);

}  // namespace nldisp

#endif
