#ifndef NLDISP_GRID_HPP
#define NLDISP_GRID_HPP

#include <vector>

namespace nldisp {

/// Field values on a grid at one time instant.
using Field = std::vector<double>;

/// One spatial period [0, p) with nx nodes, x_j = j * p/nx.
struct CellGrid {
    int nx;
    double p;

    double dx() const { return p / nx; }
    double x(int j) const { return j * dx(); }
};

CellGrid make_cell_grid(int nx, double p);

/// Symmetric truncated line [-L, L], L an integer multiple of p, sharing dx
/// with the underlying cell grid. Node count is odd; node i mod nx gives the
/// phase of x_i within the period cell.
struct LineGrid {
    CellGrid cell;
    int periods_per_side;  // L = periods_per_side * p

    double half_length() const { return periods_per_side * cell.p; }
    int n() const { return 2 * periods_per_side * cell.nx + 1; }
    double dx() const { return cell.dx(); }
    double x(int i) const { return (i - periods_per_side * cell.nx) * cell.dx(); }
    int cell_index(int i) const { return i % cell.nx; }
};

LineGrid make_line_grid(const CellGrid& cell, double min_half_length);

/// nt time steps per period T.
struct TimeGrid {
    int nt;
    double T;

    double dt() const { return T / nt; }
};

/// Builds a time grid with at least nt_requested steps, refined if necessary
/// so dt <= 0.5/(1 + reaction_bound) (the explicit-Euler monotonicity cap).
TimeGrid make_time_grid(double T, int nt_requested, double reaction_bound);

}  // namespace nldisp

#endif
