#include "subsuper/plap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subsuper {

namespace {

// a_eps(s) = s (s^2 + eps^2)^{(p-2)/2}; eps = 0 gives |s|^{p-2} s.
double flux(double s, double p, double eps) {
    if (eps == 0.0) {
        if (s == 0.0) return 0.0;
        return std::copysign(std::pow(std::abs(s), p - 1.0), s);
    }
    return s * std::pow(s * s + eps * eps, 0.5 * (p - 2.0));
}

// a_eps'(s) = (s^2+eps^2)^{(p-4)/2} (eps^2 + (p-1) s^2) > 0 for p > 1.
double flux_derivative(double s, double p, double eps) {
    if (p == 2.0) return 1.0;
    const double q = s * s + eps * eps;
    return std::pow(q, 0.5 * (p - 4.0)) * (eps * eps + (p - 1.0) * s * s);
}

// (1/p)(s^2+eps^2)^{p/2}: decreases with eps for every p, so the recorded
// energy stays nonincreasing across continuation stages.
double energy_density(double s, double p, double eps) {
    return std::pow(s * s + eps * eps, 0.5 * p) / p;
}

struct Workspace {
    const Grid* grid;
    double p;
    std::vector<double> load;
    std::vector<char> interior; // per node
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// dJ/du_j over interior nodes; zero at Dirichlet slots.
std::vector<double> energy_gradient(const Workspace& w, const std::vector<double>& u,
                                    double eps) {
    const Grid& g = *w.grid;
    const std::size_t nc = g.cell_count();
    std::vector<double> flx(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        const double s = (u[c + 1] - u[c]) / g.cell_width(c);
        flx[c] = flux(s, w.p, eps) * g.cell_volume(c) / g.cell_width(c);
    }
    std::vector<double> grad(g.node_count(), 0.0);
    for (std::size_t j = 0; j < g.node_count(); ++j) {
        if (!w.interior[j]) continue;
        double v = -w.load[j];
        if (j > 0) v += flx[j - 1];
        if (j < nc) v -= flx[j];
        grad[j] = v;
    }
    return grad;
}

double residual_inf(const std::vector<double>& grad) {
    double m = 0.0;
    for (double v : grad) m = std::max(m, std::abs(v));
    return m;
}

double regularized_energy(const Workspace& w, const std::vector<double>& u, double eps) {
    const Grid& g = *w.grid;
    double e = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double s = (u[c + 1] - u[c]) / g.cell_width(c);
        e += energy_density(s, w.p, eps) * g.cell_volume(c);
    }
    return e - dot(w.load, u);
}

// Newton system on interior nodes; SPD tridiagonal, Thomas solve.
std::vector<double> newton_direction(const Workspace& w, const std::vector<double>& u,
                                     double eps, const std::vector<double>& grad) {
    const Grid& g = *w.grid;
    const std::size_t n = g.node_count();
    std::vector<double> dcell(g.cell_count());
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double s = (u[c + 1] - u[c]) / g.cell_width(c);
        dcell[c] = flux_derivative(s, w.p, eps) * g.cell_volume(c) /
                   (g.cell_width(c) * g.cell_width(c));
    }
    std::vector<std::size_t> idx;
    idx.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        if (w.interior[j]) idx.push_back(j);
    const std::size_t m = idx.size();
    std::vector<double> diag(m), lower(m, 0.0), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = idx[k];
        double dj = 0.0;
        if (j > 0) dj += dcell[j - 1];
        if (j < g.cell_count()) dj += dcell[j];
        diag[k] = dj;
        rhs[k] = -grad[j];
        if (k > 0 && idx[k - 1] + 1 == j) lower[k] = -dcell[j - 1];
    }
    for (std::size_t k = 1; k < m; ++k) {
        const double f = lower[k] / diag[k - 1];
        diag[k] -= f * lower[k];
        rhs[k] -= f * rhs[k - 1];
    }
    rhs[m - 1] /= diag[m - 1];
    for (std::size_t k = m - 1; k-- > 0;) rhs[k] = (rhs[k] - lower[k + 1] * rhs[k + 1]) / diag[k];
    std::vector<double> dir(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) dir[idx[k]] = rhs[k];
    return dir;
}

struct StageResult {
    int accepted = 0;
    bool hit_tol = false;
};

StageResult newton_stage(const Workspace& w, std::vector<double>& u, double eps,
                         double stage_tol, int max_iter, std::vector<double>* trace) {
    StageResult r;
    for (int it = 0; it < max_iter; ++it) {
        const auto grad = energy_gradient(w, u, eps);
        if (residual_inf(grad) <= stage_tol) {
            r.hit_tol = true;
            return r;
        }
        const auto dir = newton_direction(w, u, eps, grad);
        const double slope = dot(grad, dir); // negative: SPD system
        const double e0 = regularized_energy(w, u, eps);
        std::vector<double> candidate(u.size());
        bool accepted = false;
        if (std::abs(slope) <= 1e-13 * std::max(1.0, std::abs(e0))) {
            // predicted decrease below energy roundoff: inside the Newton
            // basin, accept the full step iff it reduces the residual
            for (std::size_t j = 0; j < u.size(); ++j) candidate[j] = u[j] + dir[j];
            accepted = residual_inf(energy_gradient(w, candidate, eps)) < residual_inf(grad);
        } else {
            double lambda = 1.0;
            while (lambda >= 1e-14) {
                for (std::size_t j = 0; j < u.size(); ++j) candidate[j] = u[j] + lambda * dir[j];
                const double e1 = regularized_energy(w, candidate, eps);
                if (e1 <= e0 + 1e-4 * lambda * slope) {
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if (!accepted) return r; // descent stalled at this eps
        u.swap(candidate);
        ++r.accepted;
        if (trace) trace->push_back(regularized_energy(w, u, eps));
    }
    return r;
}

void validate(const PlapProblem& problem) {
    if (!problem.grid) throw std::invalid_argument("plap: missing grid");
    const Grid& g = *problem.grid;
    if (!std::isfinite(problem.p) || problem.p <= 1.0)
        throw std::invalid_argument("plap: p must be > 1");
    if (g.kind == GridKind::RadialBall && problem.p >= g.dimension)
        throw std::invalid_argument("plap: radial problems require p < N");
    const PlapSettings& s = problem.settings;
    if (!(s.regularization_eps > 0.0) || !std::isfinite(s.regularization_eps))
        throw std::invalid_argument("plap: regularization_eps must be positive");
    if (!(s.tol > 0.0) || !std::isfinite(s.tol))
        throw std::invalid_argument("plap: tol must be positive");
    if (s.max_newton_iter < 1) throw std::invalid_argument("plap: max_newton_iter must be >= 1");
    if (const auto* sym = std::get_if<SymbolicRhs>(&problem.rhs)) {
        if (!std::isfinite(sym->constant)) throw std::invalid_argument("plap: non-finite rhs constant");
        if (sym->mu && !(*sym->mu > -1.0))
            throw std::invalid_argument("plap: rhs exponent must be > -1");
        if (sym->layer_value && !(sym->delta > 0.0 && sym->delta < 0.5))
            throw std::invalid_argument("plap: layer rhs needs delta in (0, 1/2)");
    } else {
        const auto& f = std::get<Field>(problem.rhs);
        validate_field(f);
        if (f.grid.get() != problem.grid.get())
            throw std::invalid_argument("plap: rhs field lives on a different grid");
    }
}

Workspace make_workspace(const PlapProblem& problem) {
    Workspace w;
    w.grid = problem.grid.get();
    w.p = problem.p;
    w.load = assemble_load(*problem.grid, problem.rhs);
    w.interior.resize(problem.grid->node_count());
    for (std::size_t j = 0; j < w.interior.size(); ++j)
        w.interior[j] = !problem.grid->is_dirichlet_node(j);
    return w;
}

} // namespace

PlapSettings default_plap_settings(const Grid& grid) {
    PlapSettings s;
    s.tol = (grid.kind == GridKind::Interval01) ? 1e-10 : 1e-8;
    return s;
}

std::vector<double> assemble_load(const Grid& grid, const Rhs& rhs) {
    const std::size_t n = grid.node_count();
    std::vector<double> b(n, 0.0);
    // local hats on a cell: phi_left = 1 - t, phi_right = t
    const double hat_left[2] = {1.0, -1.0};
    const double hat_right[2] = {0.0, 1.0};

    auto add_poly = [&](std::size_t c, std::span<const double> poly, double mu, double scale) {
        if (scale == 0.0) return;
        double left[4] = {0, 0, 0, 0}, right[4] = {0, 0, 0, 0};
        for (int i = 0; i < 2; ++i) {
            for (std::size_t k = 0; k < poly.size(); ++k) {
                left[k + i] += hat_left[i] * poly[k];
                right[k + i] += hat_right[i] * poly[k];
            }
        }
        const std::size_t deg = poly.size() + 1;
        b[c] += scale * weighted_poly_cell_integral(grid, c, std::span<const double>(left, deg), mu);
        b[c + 1] += scale * weighted_poly_cell_integral(grid, c, std::span<const double>(right, deg), mu);
    };

    if (const auto* f = std::get_if<Field>(&rhs)) {
        for (std::size_t c = 0; c < grid.cell_count(); ++c) {
            const double ga = f->values[c], gb = f->values[c + 1];
            const double poly[2] = {ga, gb - ga};
            add_poly(c, std::span<const double>(poly, 2), 0.0, 1.0);
        }
        return b;
    }
    const auto& sym = std::get<SymbolicRhs>(rhs);
    std::vector<bool> in_layer;
    if (sym.layer_value) in_layer = layer_cells(grid, sym.delta);
    const double one[1] = {1.0};
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        if (sym.layer_value && in_layer[c]) {
            add_poly(c, std::span<const double>(one, 1), 0.0, *sym.layer_value);
            continue;
        }
        add_poly(c, std::span<const double>(one, 1), 0.0, sym.constant);
        if (sym.mu) add_poly(c, std::span<const double>(one, 1), *sym.mu, 1.0);
    }
    return b;
}

double rhs_l1_norm(const Grid& grid, const Rhs& rhs) {
    if (const auto* f = std::get_if<Field>(&rhs)) {
        auto pts = quadrature_points(grid);
        const QuadRule& rule = gauss_rule(grid.quadrature_order);
        const std::size_t q = rule.points.size();
        for (std::size_t c = 0; c < grid.cell_count(); ++c)
            for (std::size_t j = 0; j < q; ++j) {
                const double t = rule.points[j];
                pts[c * q + j] = std::abs((1.0 - t) * f->values[c] + t * f->values[c + 1]);
            }
        return integrate(grid, pts);
    }
    const auto& sym = std::get<SymbolicRhs>(rhs);
    std::vector<bool> in_layer;
    if (sym.layer_value) in_layer = layer_cells(grid, sym.delta);
    const double one[1] = {1.0};
    double total = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        if (sym.layer_value && in_layer[c]) {
            total += std::abs(*sym.layer_value) * grid.cell_volume(c);
            continue;
        }
        if (sym.constant >= 0.0) {
            total += sym.constant * grid.cell_volume(c);
            if (sym.mu)
                total += weighted_poly_cell_integral(grid, c, std::span<const double>(one, 1), *sym.mu);
        } else {
            // mixed-sign off-layer rhs: sample |.|; only used as a normalizer
            const QuadRule& rule = gauss_rule(grid.quadrature_order);
            double s = 0.0;
            for (std::size_t j = 0; j < rule.points.size(); ++j) {
                const double x = grid.nodes[c] + grid.cell_width(c) * rule.points[j];
                double v = sym.constant;
                if (sym.mu) v += std::pow(grid.distance(x), *sym.mu);
                s += rule.weights[j] * std::abs(v) * grid.volume_factor(x);
            }
            total += s * grid.cell_width(c);
        }
    }
    return total;
}

double energy(const PlapProblem& problem, const Field& u) {
    validate(problem);
    validate_field(u);
    if (u.grid.get() != problem.grid.get())
        throw std::invalid_argument("energy: field lives on a different grid");
    const Grid& g = *problem.grid;
    double e = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double s = (u.values[c + 1] - u.values[c]) / g.cell_width(c);
        e += std::pow(std::abs(s), problem.p) / problem.p * g.cell_volume(c);
    }
    const auto b = assemble_load(g, problem.rhs);
    return e - dot(b, u.values);
}

PlapResult solve(const PlapProblem& problem) {
    validate(problem);
    const Grid& g = *problem.grid;
    Workspace w = make_workspace(problem);
    const PlapSettings& st = problem.settings;

    // p = 2 start: one exact Newton step from zero is the linear solve
    std::vector<double> u(g.node_count(), 0.0);
    {
        Workspace w2 = w;
        w2.p = 2.0;
        const auto grad = energy_gradient(w2, u, 0.0);
        const auto dir = newton_direction(w2, u, 0.0, grad);
        for (std::size_t j = 0; j < u.size(); ++j) u[j] += dir[j];
    }

    int total_accepted = 0;
    PlapResult result;

    // continuation in p toward the target when it sits far from 2
    if (std::abs(problem.p - 2.0) > 1.0) {
        const double step = (problem.p > 2.0) ? 1.0 : -0.5;
        for (double pc = 2.0 + step;
             (step > 0.0) ? pc < problem.p - 1e-12 : pc > problem.p + 1e-12; pc += step) {
            Workspace wc = w;
            wc.p = pc;
            auto sr = newton_stage(wc, u, st.regularization_eps, 1e-6, st.max_newton_iter, nullptr);
            total_accepted += sr.accepted;
        }
    }

    double eps = st.regularization_eps;
    const double inner_tol = 0.1 * st.tol;
    while (true) {
        auto sr = newton_stage(w, u, eps, inner_tol, st.max_newton_iter, &result.energy_trace);
        total_accepted += sr.accepted;
        const double res0 = residual_inf(energy_gradient(w, u, 0.0));
        if (res0 <= st.tol) {
            result.final_gradient_norm = res0;
            break;
        }
        if (eps < 1e-15 || total_accepted > 50 * st.max_newton_iter)
            throw NonConvergence("plap solve: continuation exhausted before meeting tol", u,
                                 res0, total_accepted);
        eps *= 0.1;
    }

    result.u = Field{problem.grid, std::move(u), true};
    for (std::size_t j = 0; j < result.u.values.size(); ++j)
        if (g.is_dirichlet_node(j)) result.u.values[j] = 0.0;
    result.iterations = total_accepted;
    return result;
}

double weak_residual(const PlapProblem& problem, const Field& u) {
    validate(problem);
    validate_field(u);
    if (u.grid.get() != problem.grid.get())
        throw std::invalid_argument("weak_residual: field lives on a different grid");
    Workspace w = make_workspace(problem);
    const double res = residual_inf(energy_gradient(w, u.values, 0.0));
    return res / (1.0 + rhs_l1_norm(*problem.grid, problem.rhs));
}

} // namespace subsuper
