#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "subsuper/errors.hpp"

namespace subsuper {

enum class GridKind { Interval01, RadialBall };

// One-dimensional mesh of [0,1], either the unit interval with Dirichlet
// conditions at both ends or the radial coordinate of the unit ball in R^N
// (Dirichlet at r = 1 only, symmetry at r = 0). Cells grade geometrically
// toward each Dirichlet boundary; immutable after construction.
struct Grid {
    GridKind kind = GridKind::Interval01;
    int dimension = 1; // N for RadialBall, 1 for Interval01
    std::vector<double> nodes;
    double grading_ratio = 1.0;
    int quadrature_order = 3;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t cell_count() const { return nodes.size() - 1; }
    double cell_width(std::size_t c) const { return nodes[c + 1] - nodes[c]; }

    bool is_dirichlet_node(std::size_t j) const {
        if (kind == GridKind::Interval01) return j == 0 || j + 1 == nodes.size();
        return j + 1 == nodes.size();
    }

    // Distance to the Dirichlet boundary; linear on every cell by construction.
    double distance(double x) const;

    // |S^{N-1}| for the ball, 1 for the interval.
    double angular_measure() const;

    // dV = angular_measure * x^{N-1} dx on the ball, dx on the interval.
    double volume_factor(double x) const;

    // Exact cell volume \int_cell dV.
    double cell_volume(std::size_t c) const;
};

using GridPtr = std::shared_ptr<const Grid>;

// Nodal scalar function on a grid. Piecewise linear between nodes.
struct Field {
    GridPtr grid;
    std::vector<double> values;
    bool dirichlet_zero = false;
};

Field make_field(GridPtr grid, double fill = 0.0, bool dirichlet_zero = false);
Field make_field(GridPtr grid, std::vector<double> values, bool dirichlet_zero = false);

// Throws std::invalid_argument if values are non-finite, the length is
// wrong, or the dirichlet_zero flag is violated.
void validate_field(const Field& f);

struct Norms {
    double lp_gradient = 0.0;
    double sup_gradient = 0.0;
    double lp_value = 0.0;
    double sup_value = 0.0;
};

// n_cells >= 4 (even for Interval01 so a node lands on x = 1/2, keeping the
// distance function linear per cell); grading_ratio >= 1; quadrature_order
// in [1,10]. grading_ratio = 1 gives a uniform mesh.
GridPtr build_grid(GridKind kind, int n_cells, double grading_ratio,
                   int quadrature_order, int ball_dimension = 3);

Field distance_field(GridPtr grid);

// Node j flagged iff distance(node_j) < delta; requires 0 < delta < 1/2.
std::vector<bool> boundary_layer_mask(const Grid& grid, double delta);

// Nearest interior-node distance value to the requested delta, in (0, 1/2).
double snap_delta(const Grid& grid, double delta);

// Cell c lies inside the boundary layer {d < delta}; delta must be snapped
// to a node so every cell is entirely in or out.
std::vector<bool> layer_cells(const Grid& grid, double snapped_delta);

// Per-cell difference quotients; exact gradients of the piecewise-linear field.
std::vector<double> gradient(const Field& f);

Norms norms(const Field& f, double p);

// Gauss-Legendre rule on the reference cell [0,1], 1 <= q <= 10.
struct QuadRule {
    std::vector<double> points;
    std::vector<double> weights;
};
const QuadRule& gauss_rule(int q);

// All quadrature points of the grid, cell-major, grid.quadrature_order per cell.
std::vector<double> quadrature_points(const Grid& grid);

// \int f(x) d(x)^mu dV from per-quadrature-point samples of f (layout as
// quadrature_points). mu > -1 or absent. The d^mu factor is integrated
// analytically on every cell (d is linear per cell) against the polynomial
// interpolant of the samples; d^0 == 1 exactly.
double integrate(const Grid& grid, std::span<const double> integrand,
                 std::optional<double> weight_mu = std::nullopt);

// Exact \int_cell p(t) d(x(t))^mu dV with p given by monomial coefficients
// in the local coordinate t in [0,1] (ascending powers).
double weighted_poly_cell_integral(const Grid& grid, std::size_t cell,
                                   std::span<const double> coeff_t, double mu);

} // namespace subsuper
