#include "nldisp/grid.hpp"

#include <cmath>

#include "nldisp/errors.hpp"

namespace nldisp {

CellGrid make_cell_grid(int nx, double p) {
    if (nx < 16) throw ConfigError("cell grid needs nx >= 16, got " + std::to_string(nx));
    if (!(p > 0.0)) throw ConfigError("spatial period p must be positive");
    return CellGrid{nx, p};
}

LineGrid make_line_grid(const CellGrid& cell, double min_half_length) {
    if (!(min_half_length > 0.0)) throw ConfigError("line half-length must be positive");
    int k = static_cast<int>(std::ceil(min_half_length / cell.p - 1e-12));
    if (k < 1) k = 1;
    return LineGrid{cell, k};
}

TimeGrid make_time_grid(double T, int nt_requested, double reaction_bound) {
    if (!(T > 0.0)) throw ConfigError("time period T must be positive");
    if (nt_requested < 1) throw ConfigError("nt must be >= 1");
    double dt_max = 0.5 / (1.0 + std::max(0.0, reaction_bound));
    int nt = nt_requested;
    int needed = static_cast<int>(std::ceil(T / dt_max - 1e-12));
    if (needed > nt) nt = needed;
    return TimeGrid{nt, T};
}

}  // namespace nldisp
