#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "subsuper/grid.hpp"

namespace subsuper {

// Right-hand side c + d(x)^mu, replaced by layer_value on the boundary
// layer {d < delta} when layer_value is set. delta must be snapped to a
// node (snap_delta) so cells are entirely in or out of the layer.
struct SymbolicRhs {
    double constant = 0.0;
    std::optional<double> mu;          // requires mu > -1
    std::optional<double> layer_value;
    double delta = 0.0;
};

using Rhs = std::variant<Field, SymbolicRhs>;

struct PlapSettings {
    double regularization_eps = 1e-3;
    double tol = 1e-10;
    int max_newton_iter = 200; // per continuation stage
};

// Dirichlet problem -div(|u'|^{p-2} u') = g, u = 0 on the Dirichlet
// boundary, posed as minimization of J(u) = (1/p) int |grad u|^p - int g u
// over piecewise-linear fields.
struct PlapProblem {
    GridPtr grid;
    double p = 2.0;
    Rhs rhs;
    PlapSettings settings;
};

struct PlapResult {
    Field u;
    int iterations = 0;                // accepted Newton steps over all stages
    double final_gradient_norm = 0.0;  // unregularized optimality residual
    std::vector<double> energy_trace;  // regularized energy per accepted step, final p-stage
};

// Sensible defaults per grid kind: 1e-10 on the interval, 1e-8 on the ball.
PlapSettings default_plap_settings(const Grid& grid);

// (1/p) int |grad u|^p dV - int g u dV; singular parts of g use the
// weighted quadrature.
double energy(const PlapProblem& problem, const Field& u);

// Damped Newton on the eps-regularized energy, |grad u|^{p-2} replaced by
// (|grad u|^2 + eps^2)^{(p-2)/2}, then eps-continuation until the
// unregularized optimality residual (max |dJ/du_j| over interior nodes)
// meets settings.tol. Initial guess is the p = 2 solution of the same rhs,
// with continuation in p when |p - 2| > 1. Throws NonConvergence with the
// last iterate when the budget runs out.
PlapResult solve(const PlapProblem& problem);

// max over interior hat functions of |int |u'|^{p-2} u' phi' - int g phi|,
// normalized by (1 + ||g||_L1).
double weak_residual(const PlapProblem& problem, const Field& u);

// Hat-function loads b_j = int g phi_j dV for the problem's rhs.
std::vector<double> assemble_load(const Grid& grid, const Rhs& rhs);

// int |g| dV.
double rhs_l1_norm(const Grid& grid, const Rhs& rhs);

} // namespace subsuper
