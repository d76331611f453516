#include "nldisp/evolve.hpp"

#include <cmath>

#include "nldisp/errors.hpp"

namespace nldisp {

double reaction_bound(const CoefficientBounds& bd, SystemTag tag, double u_cap, double v_cap) {
    switch (tag) {
        case SystemTag::single1:
            return bd.a1M + 2.0 * bd.b1M * u_cap;
        case SystemTag::single2:
            return bd.a2M + 2.0 * bd.c2M * v_cap;
        case SystemTag::competitive:
            return std::max(bd.a1M + 2.0 * bd.b1M * u_cap + 2.0 * bd.c1M * v_cap,
                            bd.a2M + 2.0 * bd.b2M * u_cap + 2.0 * bd.c2M * v_cap);
        case SystemTag::cooperative:
            return std::max(bd.a1M + 2.0 * bd.b1M * u_cap + bd.c1M * v_cap,
                            bd.a2M + 2.0 * bd.c2M * v_cap + bd.b2M * (u_cap + v_cap));
        case SystemTag::linear:
            return 0.0;  // unconditionally handled by the caller's coefficient size
    }
    return 0.0;
}

namespace {

void require_finite(std::span<const double> f, const char* what) {
    for (double x : f)
        if (!std::isfinite(x)) throw NonFiniteState(what);
}

std::array<bool, 6> coeffs_needed(SystemTag tag) {
    switch (tag) {
        case SystemTag::single1:
            return {true, true, false, false, false, false};
        case SystemTag::single2:
            return {false, false, false, true, false, true};
        case SystemTag::competitive:
        case SystemTag::cooperative:
            return {true, true, true, true, true, true};
        case SystemTag::linear:
            return {false, false, false, false, false, false};
    }
    return {};
}

}  // namespace

CellStepper::CellStepper(const HabitatSpec& h, SystemTag tag, const CellGrid& g,
                         const TimeGrid& tg, const PeriodicOrbit* ustar,
                         const PeriodicOrbit* vstar, Scheme scheme)
    : tag_(tag), grid_(g), tg_(tg), scheme_(scheme), ustar_(ustar), vstar_(vstar) {
    if (tag == SystemTag::linear)
        throw Error("use CellStepper::linear for the linear form");
    if (tag == SystemTag::cooperative && (!ustar_ || !vstar_))
        throw Error("cooperative form requires the u*, v* orbits");
    if (scheme == Scheme::heun && is_pair_form(tag))
        throw Error("Heun scheme is restricted to the single-species forms");

    kernel_ = wrap_to_cell(sample_kernel(h.kernel(), g.dx()), g);
    auto need = coeffs_needed(tag);
    int rows = tg_.nt;
    for (int c = 0; c < 6; ++c) {
        if (!need[static_cast<std::size_t>(c)]) continue;
        coeff_[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(rows) * g.nx);
        for (int k = 0; k < rows; ++k)
            h.sample_row(static_cast<Coeff>(c), k * tg_.dt(), g,
                         {coeff_[static_cast<std::size_t>(c)].data() +
                              static_cast<std::size_t>(k) * g.nx,
                          static_cast<std::size_t>(g.nx)});
    }
    conv_u_.resize(static_cast<std::size_t>(g.nx));
    conv_v_.resize(static_cast<std::size_t>(g.nx));
    if (scheme_ == Scheme::heun) {
        pred_u_.resize(static_cast<std::size_t>(g.nx));
        ru2_.resize(static_cast<std::size_t>(g.nx));
    }
    ru_.resize(static_cast<std::size_t>(g.nx));
    rv_.resize(static_cast<std::size_t>(g.nx));
}

CellStepper CellStepper::linear(const HabitatSpec& h, const CellGrid& g, const TimeGrid& tg,
                                int xi, double mu, const CoeffSampler& a) {
    CellStepper st(h, SystemTag::single1, g, tg);  // placeholder layout
    st.tag_ = SystemTag::linear;
    st.kernel_ = wrap_to_cell(twist(sample_kernel(h.kernel(), g.dx()), xi, mu), g);
    for (auto& t : st.coeff_) t.clear();
    st.a_table_.resize(static_cast<std::size_t>(tg.nt) * g.nx);
    for (int k = 0; k < tg.nt; ++k)
        a(k * tg.dt(),
          {st.a_table_.data() + static_cast<std::size_t>(k) * g.nx, static_cast<std::size_t>(g.nx)});
    return st;
}

std::span<const double> CellStepper::coeff_row(Coeff c, long long k) const {
    long long kk = k % tg_.nt;
    if (kk < 0) kk += tg_.nt;
    const auto& table = coeff_[static_cast<std::size_t>(static_cast<int>(c))];
    return {table.data() + static_cast<std::size_t>(kk) * grid_.nx,
            static_cast<std::size_t>(grid_.nx)};
}

void CellStepper::reaction(long long k, std::span<const double> u, std::span<const double> v,
                           std::span<double> ru, std::span<double> rv) const {
    const int nx = grid_.nx;
    switch (tag_) {
        case SystemTag::single1: {
            auto a = coeff_row(Coeff::a1, k), b = coeff_row(Coeff::b1, k);
            for (int j = 0; j < nx; ++j) ru[j] = u[j] * (a[j] - b[j] * u[j]);
            break;
        }
        case SystemTag::single2: {
            auto a = coeff_row(Coeff::a2, k), c = coeff_row(Coeff::c2, k);
            for (int j = 0; j < nx; ++j) ru[j] = u[j] * (a[j] - c[j] * u[j]);
            break;
        }
        case SystemTag::competitive: {
            auto a1 = coeff_row(Coeff::a1, k), b1 = coeff_row(Coeff::b1, k),
                 c1 = coeff_row(Coeff::c1, k), a2 = coeff_row(Coeff::a2, k),
                 b2 = coeff_row(Coeff::b2, k), c2 = coeff_row(Coeff::c2, k);
            for (int j = 0; j < nx; ++j) {
                ru[j] = u[j] * (a1[j] - b1[j] * u[j] - c1[j] * v[j]);
                rv[j] = v[j] * (a2[j] - b2[j] * u[j] - c2[j] * v[j]);
            }
            break;
        }
        case SystemTag::cooperative: {
            auto a1 = coeff_row(Coeff::a1, k), b1 = coeff_row(Coeff::b1, k),
                 c1 = coeff_row(Coeff::c1, k), a2 = coeff_row(Coeff::a2, k),
                 b2 = coeff_row(Coeff::b2, k), c2 = coeff_row(Coeff::c2, k);
            auto vs = vstar_->row(static_cast<int>(k % tg_.nt));
            for (int j = 0; j < nx; ++j) {
                ru[j] = u[j] * (a1[j] - b1[j] * u[j] - c1[j] * (vs[j] - v[j]));
                rv[j] = b2[j] * (vs[j] - v[j]) * u[j] +
                        v[j] * (a2[j] - 2.0 * c2[j] * vs[j] + c2[j] * v[j]);
            }
            break;
        }
        case SystemTag::linear: {
            const double* a = a_table_.data() +
                              static_cast<std::size_t>((k % tg_.nt + tg_.nt) % tg_.nt) * nx;
            for (int j = 0; j < nx; ++j) ru[j] = a[j] * u[j];
            break;
        }
    }
}

void CellStepper::step(long long k, std::span<double> u, std::span<double> v) {
    const int nx = grid_.nx;
    const double dt = tg_.dt();
    convolve_cell(kernel_, u, conv_u_);
    bool pair = is_pair_form(tag_);
    if (pair) convolve_cell(kernel_, v, conv_v_);

    if (scheme_ == Scheme::euler) {
        reaction(k, u, v, ru_, rv_);
        for (int j = 0; j < nx; ++j) u[j] += dt * (conv_u_[j] - u[j] + ru_[j]);
        if (pair)
            for (int j = 0; j < nx; ++j) v[j] += dt * (conv_v_[j] - v[j] + rv_[j]);
    } else {
        // Heun: single-species forms only.
        reaction(k, u, v, ru_, rv_);
        for (int j = 0; j < nx; ++j) pred_u_[j] = u[j] + dt * (conv_u_[j] - u[j] + ru_[j]);
        convolve_cell(kernel_, pred_u_, conv_v_);
        reaction(k + 1, pred_u_, v, ru2_, rv_);
        for (int j = 0; j < nx; ++j)
            u[j] += 0.5 * dt * ((conv_u_[j] - u[j] + ru_[j]) +
                                (conv_v_[j] - pred_u_[j] + ru2_[j]));
    }

    if (tag_ == SystemTag::cooperative) {
        auto us = ustar_->row(static_cast<int>((k + 1) % tg_.nt));
        auto vs = vstar_->row(static_cast<int>((k + 1) % tg_.nt));
        for (int j = 0; j < nx; ++j) {
            double eu = std::max(std::max(-u[j], u[j] - us[j]), 0.0);
            double ev = std::max(std::max(-v[j], v[j] - vs[j]), 0.0);
            double e = std::max(eu, ev);
            if (e > 0.0) {
                stats_.max_excursion = std::max(stats_.max_excursion, e);
                if (e > 1e-6)
                    throw InvariantRegionExit("cooperative state excursion " + std::to_string(e) +
                                              " at step " + std::to_string(k));
                u[j] = std::min(std::max(u[j], 0.0), us[j]);
                v[j] = std::min(std::max(v[j], 0.0), vs[j]);
                stats_.max_clamp = std::max(stats_.max_clamp, e);
            }
        }
    }
    require_finite(u, "u on the cell");
    if (pair) require_finite(v, "v on the cell");
}

LineStepper::LineStepper(const HabitatSpec& h, SystemTag tag, const LineGrid& g,
                         const TimeGrid& tg, const PeriodicOrbit* ustar,
                         const PeriodicOrbit* vstar, Pad left, Pad right)
    : tag_(tag), grid_(g), tg_(tg), ustar_(ustar), vstar_(vstar), left_(left), right_(right) {
    if (tag == SystemTag::linear) throw Error("line stepper does not take the linear form");
    if (tag == SystemTag::cooperative && (!ustar_ || !vstar_))
        throw Error("cooperative form requires the u*, v* orbits");
    if ((left == Pad::orbit || right == Pad::orbit) && (!ustar_ || !vstar_))
        throw Error("orbit pads require the u*, v* orbits");

    kernel_ = sample_kernel(h.kernel(), g.dx());
    auto need = coeffs_needed(tag);
    const int n = g.n();
    for (int c = 0; c < 6; ++c) {
        if (!need[static_cast<std::size_t>(c)]) continue;
        coeff_[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(tg.nt) * n);
        for (int k = 0; k < tg.nt; ++k)
            h.sample_row_line(static_cast<Coeff>(c), k * tg.dt(), g,
                              {coeff_[static_cast<std::size_t>(c)].data() +
                                   static_cast<std::size_t>(k) * n,
                               static_cast<std::size_t>(n)});
    }
    const std::size_t R = static_cast<std::size_t>(kernel_.radius);
    lpad_u_.assign(R, 0.0);
    rpad_u_.assign(R, 0.0);
    lpad_v_.assign(R, 0.0);
    rpad_v_.assign(R, 0.0);
    conv_u_.resize(static_cast<std::size_t>(n));
    conv_v_.resize(static_cast<std::size_t>(n));
}

std::span<const double> LineStepper::coeff_row(Coeff c, long long k) const {
    long long kk = (k % tg_.nt + tg_.nt) % tg_.nt;
    const auto& table = coeff_[static_cast<std::size_t>(static_cast<int>(c))];
    return {table.data() + static_cast<std::size_t>(kk) * grid_.n(),
            static_cast<std::size_t>(grid_.n())};
}

void LineStepper::fill_pads(long long k) {
    const int R = kernel_.radius;
    const int nx = grid_.cell.nx;
    const int n = grid_.n();
    int krow = static_cast<int>((k % tg_.nt + tg_.nt) % tg_.nt);
    for (int j = 0; j < R; ++j) {
        int q = j - R;  // node index left of 0
        int phase = ((q % nx) + nx) % nx;
        if (left_ == Pad::orbit) {
            lpad_u_[static_cast<std::size_t>(j)] = ustar_->at(krow, phase);
            lpad_v_[static_cast<std::size_t>(j)] = vstar_->at(krow, phase);
        }
        int q2 = n + j;
        int phase2 = q2 % nx;
        if (right_ == Pad::orbit) {
            rpad_u_[static_cast<std::size_t>(j)] = ustar_->at(krow, phase2);
            rpad_v_[static_cast<std::size_t>(j)] = vstar_->at(krow, phase2);
        }
    }
}

void LineStepper::step(long long k, std::span<double> u, std::span<double> v) {
    const int n = grid_.n();
    const int nx = grid_.cell.nx;
    const double dt = tg_.dt();
    fill_pads(k);
    convolve_line(kernel_, u, lpad_u_, rpad_u_, conv_u_);
    bool pair = is_pair_form(tag_);
    if (pair) convolve_line(kernel_, v, lpad_v_, rpad_v_, conv_v_);

    switch (tag_) {
        case SystemTag::single1: {
            auto a = coeff_row(Coeff::a1, k), b = coeff_row(Coeff::b1, k);
            for (int i = 0; i < n; ++i)
                u[i] += dt * (conv_u_[i] - u[i] + u[i] * (a[i] - b[i] * u[i]));
            break;
        }
        case SystemTag::single2: {
            auto a = coeff_row(Coeff::a2, k), c = coeff_row(Coeff::c2, k);
            for (int i = 0; i < n; ++i)
                u[i] += dt * (conv_u_[i] - u[i] + u[i] * (a[i] - c[i] * u[i]));
            break;
        }
        case SystemTag::competitive: {
            auto a1 = coeff_row(Coeff::a1, k), b1 = coeff_row(Coeff::b1, k),
                 c1 = coeff_row(Coeff::c1, k), a2 = coeff_row(Coeff::a2, k),
                 b2 = coeff_row(Coeff::b2, k), c2 = coeff_row(Coeff::c2, k);
            for (int i = 0; i < n; ++i) {
                double du = u[i] * (a1[i] - b1[i] * u[i] - c1[i] * v[i]);
                double dv = v[i] * (a2[i] - b2[i] * u[i] - c2[i] * v[i]);
                u[i] += dt * (conv_u_[i] - u[i] + du);
                v[i] += dt * (conv_v_[i] - v[i] + dv);
            }
            break;
        }
        case SystemTag::cooperative: {
            auto a1 = coeff_row(Coeff::a1, k), b1 = coeff_row(Coeff::b1, k),
                 c1 = coeff_row(Coeff::c1, k), a2 = coeff_row(Coeff::a2, k),
                 b2 = coeff_row(Coeff::b2, k), c2 = coeff_row(Coeff::c2, k);
            int krow = static_cast<int>((k % tg_.nt + tg_.nt) % tg_.nt);
            for (int i = 0; i < n; ++i) {
                double vs = vstar_->at(krow, i % nx);
                double du = u[i] * (a1[i] - b1[i] * u[i] - c1[i] * (vs - v[i]));
                double dv = b2[i] * (vs - v[i]) * u[i] +
                            v[i] * (a2[i] - 2.0 * c2[i] * vs + c2[i] * v[i]);
                u[i] += dt * (conv_u_[i] - u[i] + du);
                v[i] += dt * (conv_v_[i] - v[i] + dv);
            }
            // clamp to [0, u*] x [0, v*] at the new time
            int krow1 = static_cast<int>((k + 1) % tg_.nt);
            for (int i = 0; i < n; ++i) {
                double us = ustar_->at(krow1, i % nx);
                double vs = vstar_->at(krow1, i % nx);
                double e = std::max(std::max(-u[i], u[i] - us), std::max(-v[i], v[i] - vs));
                if (e > 0.0) {
                    stats_.max_excursion = std::max(stats_.max_excursion, e);
                    if (e > 1e-6)
                        throw InvariantRegionExit("cooperative state excursion " +
                                                  std::to_string(e) + " at step " +
                                                  std::to_string(k));
                    u[i] = std::min(std::max(u[i], 0.0), us);
                    v[i] = std::min(std::max(v[i], 0.0), vs);
                    stats_.max_clamp = std::max(stats_.max_clamp, e);
                }
            }
            break;
        }
        case SystemTag::linear:
            break;
    }
    require_finite(u, "u on the line");
    if (pair) require_finite(v, "v on the line");
}

namespace {

template <class Stepper>
Trajectory simulate_impl(Stepper& st, Field u0, Field v0, long long steps,
                         long long record_every) {
    Trajectory traj;
    bool pair = is_pair_form(st.tag());
    if (record_every < 1) record_every = 1;
    double dt = st.tg().dt();
    traj.times.push_back(0.0);
    traj.u.push_back(u0);
    if (pair) traj.v.push_back(v0);
    for (long long k = 0; k < steps; ++k) {
        st.step(k, u0, v0);
        if ((k + 1) % record_every == 0 || k + 1 == steps) {
            traj.times.push_back((k + 1) * dt);
            traj.u.push_back(u0);
            if (pair) traj.v.push_back(v0);
        }
    }
    traj.stats = st.stats();
    return traj;
}

}  // namespace

Trajectory simulate(CellStepper& st, Field u0, Field v0, long long steps, long long record_every) {
    return simulate_impl(st, std::move(u0), std::move(v0), steps, record_every);
}

Trajectory simulate(LineStepper& st, Field u0, Field v0, long long steps, long long record_every) {
    return simulate_impl(st, std::move(u0), std::move(v0), steps, record_every);
}

double check_order_preservation(const HabitatSpec& h, SystemTag tag, const CellGrid& g,
                                const TimeGrid& tg, const PeriodicOrbit* ustar,
                                const PeriodicOrbit* vstar, const Field& u_lo, const Field& v_lo,
                                const Field& u_hi, const Field& v_hi, double t_end) {
    CellStepper lo(h, tag, g, tg, ustar, vstar);
    CellStepper hi(h, tag, g, tg, ustar, vstar);
    Field ul = u_lo, vl = v_lo, uh = u_hi, vh = v_hi;
    long long steps = static_cast<long long>(std::ceil(t_end / tg.dt() - 1e-12));
    double worst = 0.0;
    bool pair = is_pair_form(tag);
    for (long long k = 0; k < steps; ++k) {
        lo.step(k, ul, vl);
        hi.step(k, uh, vh);
        for (std::size_t j = 0; j < ul.size(); ++j) {
            worst = std::max(worst, ul[j] - uh[j]);
            if (pair) worst = std::max(worst, vl[j] - vh[j]);
        }
    }
    return std::max(worst, 0.0);
}

}  // namespace nldisp
