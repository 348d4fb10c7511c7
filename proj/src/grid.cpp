#include "subsuper/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace subsuper {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Monomial coefficients (ascending, long double) of the Lagrange interpolant
// through (t_j, f_j). Master polynomial + synthetic division; t_j in [0,1].
std::vector<long double> lagrange_to_monomials(std::span<const double> t,
                                               std::span<const double> f) {
    const std::size_t q = t.size();
    std::vector<long double> master(q + 1, 0.0L); // prod (x - t_j)
    master[0] = 1.0L;
    std::size_t deg = 0;
    for (std::size_t j = 0; j < q; ++j) {
        master[deg + 1] = master[deg];
        for (std::size_t i = deg; i > 0; --i)
            master[i] = master[i - 1] - (long double)t[j] * master[i];
        master[0] *= -(long double)t[j];
        ++deg;
    }
    std::vector<long double> out(q, 0.0L);
    std::vector<long double> quot(q, 0.0L);
    for (std::size_t j = 0; j < q; ++j) {
        // quot = master / (x - t_j)
        quot[q - 1] = master[q];
        for (std::size_t i = q - 1; i > 0; --i)
            quot[i - 1] = master[i] + (long double)t[j] * quot[i];
        long double denom = 0.0L; // quot(t_j) == master'(t_j)
        for (std::size_t i = q; i-- > 0;)
            denom = denom * (long double)t[j] + quot[i];
        const long double scale = (long double)f[j] / denom;
        for (std::size_t i = 0; i < q; ++i) out[i] += scale * quot[i];
    }
    return out;
}

// M_k = \int_0^1 t^k (da + (db-da) t)^mu dt, mu > -1, da, db >= 0 with at
// most one of them zero. Three exact routes chosen for numerical safety:
// vanishing endpoint -> power/Beta moments; strong variation -> substitution
// u = d(t) (cancellation bounded by (da/|db-da| + 1)^k); weak variation ->
// binomial series in (db-da)/da.
long double weight_moment(int k, long double da, long double db, long double mu) {
    if (da == 0.0L) { // d = db * t
        return std::pow(db, mu) / (mu + k + 1);
    }
    if (db == 0.0L) { // d = da * (1 - t):  \int t^k (1-t)^mu = k!/((mu+1)...(mu+k+1))
        long double v = std::pow(da, mu) / (mu + k + 1);
        for (int j = 1; j <= k; ++j) v *= (long double)j / (mu + j);
        return v;
    }
    const long double e = db - da;
    if (std::abs(e) > 0.5L * da) {
        // (1/e^{k+1}) sum_j C(k,j) (-da)^{k-j} [u^{mu+j+1}/(mu+j+1)]_{da}^{db}
        long double sum = 0.0L, binom = 1.0L;
        for (int j = 0; j <= k; ++j) {
            const long double prim =
                (std::pow(db, mu + j + 1) - std::pow(da, mu + j + 1)) / (mu + j + 1);
            const long double sign = ((k - j) % 2 == 0) ? 1.0L : -1.0L;
            sum += binom * sign * std::pow(da, (long double)(k - j)) * prim;
            binom = binom * (long double)(k - j) / (long double)(j + 1);
        }
        return sum / std::pow(e, (long double)(k + 1));
    }
    // da^mu sum_m C(mu,m) (e/da)^m / (k+m+1), geometric at rate |e|/da <= 1/2
    const long double r = e / da;
    long double term = 1.0L, sum = 1.0L / (k + 1);
    for (int m = 1; m < 200; ++m) {
        term *= (mu - (m - 1)) / (long double)m * r;
        const long double add = term / (k + m + 1);
        sum += add;
        if (std::abs(add) < 1e-22L * std::abs(sum)) break;
    }
    return std::pow(da, mu) * sum;
}

// (a + h t)^m expanded in ascending powers of t, long double.
std::vector<long double> shifted_power_coeffs(long double a, long double h, int m) {
    std::vector<long double> c(m + 1, 0.0L);
    long double binom = 1.0L;
    for (int j = 0; j <= m; ++j) {
        c[j] = binom * std::pow(a, (long double)(m - j)) * std::pow(h, (long double)j);
        binom = binom * (long double)(m - j) / (long double)(j + 1);
    }
    if (m == 0) c[0] = 1.0L;
    return c;
}

std::vector<long double> poly_multiply(std::span<const long double> a,
                                       std::span<const long double> b) {
    std::vector<long double> c(a.size() + b.size() - 1, 0.0L);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

// Geometric widths, index 0 at the boundary, normalized to `length`. A
// floor of 1e-14 * length keeps nodes representable under extreme grading
// (the sequence plateaus instead of underflowing).
std::vector<double> graded_widths(int n, double ratio, double length) {
    std::vector<long double> w(n);
    long double sum = 0.0L;
    for (int i = 0; i < n; ++i) {
        w[i] = std::pow((long double)ratio, i);
        sum += w[i];
    }
    const long double floor_w = 1e-14L * (long double)length;
    long double sum2 = 0.0L;
    for (int i = 0; i < n; ++i) {
        w[i] = std::max(w[i] / sum * (long double)length, floor_w);
        sum2 += w[i];
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = (double)(w[i] / sum2 * (long double)length);
    return out;
}

QuadRule compute_gauss_rule(int q) {
    // Roots of the Legendre polynomial by Newton from Chebyshev guesses,
    // then mapped from [-1,1] to [0,1].
    QuadRule rule;
    rule.points.resize(q);
    rule.weights.resize(q);
    for (int i = 0; i < (q + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int n = 2; n <= q; ++n) {
                const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            pp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.points[i] = 0.5 * (1.0 - x); // descending root -> ascending point
        rule.points[q - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[q - 1 - i] = 0.5 * w;
    }
    if (q % 2 == 1) rule.points[q / 2] = 0.5;
    return rule;
}

} // namespace

const QuadRule& gauss_rule(int q) {
    if (q < 1 || q > 10) throw std::invalid_argument("gauss_rule: order must be in [1,10]");
    static const std::array<QuadRule, 11> rules = [] {
        std::array<QuadRule, 11> r;
        for (int i = 1; i <= 10; ++i) r[i] = compute_gauss_rule(i);
        return r;
    }();
    return rules[q];
}

double Grid::distance(double x) const {
    if (kind == GridKind::Interval01) return std::min(x, 1.0 - x);
    return 1.0 - x;
}

double Grid::angular_measure() const {
    if (kind == GridKind::Interval01) return 1.0;
    const double n = dimension;
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double Grid::volume_factor(double x) const {
    if (kind == GridKind::Interval01) return 1.0;
    return angular_measure() * std::pow(x, dimension - 1);
}

double Grid::cell_volume(std::size_t c) const {
    const double a = nodes[c], b = nodes[c + 1];
    if (kind == GridKind::Interval01) return b - a;
    const double n = dimension;
    return angular_measure() * (std::pow(b, n) - std::pow(a, n)) / n;
}

GridPtr build_grid(GridKind kind, int n_cells, double grading_ratio,
                   int quadrature_order, int ball_dimension) {
    if (n_cells < 4) throw std::invalid_argument("build_grid: n_cells must be >= 4");
    if (!finite(grading_ratio) || grading_ratio < 1.0)
        throw std::invalid_argument("build_grid: grading_ratio must be finite and >= 1");
    if (quadrature_order < 1 || quadrature_order > 10)
        throw std::invalid_argument("build_grid: quadrature_order must be in [1,10]");

    auto g = std::make_shared<Grid>();
    g->kind = kind;
    g->grading_ratio = grading_ratio;
    g->quadrature_order = quadrature_order;

    if (kind == GridKind::Interval01) {
        if (n_cells % 2 != 0)
            throw std::invalid_argument(
                "build_grid: Interval01 needs an even n_cells (a node must land on x = 1/2)");
        g->dimension = 1;
        const int half = n_cells / 2;
        const auto widths = graded_widths(half, grading_ratio, 0.5);
        g->nodes.resize(n_cells + 1);
        g->nodes[0] = 0.0;
        for (int i = 0; i < half; ++i) g->nodes[i + 1] = g->nodes[i] + widths[i];
        g->nodes[half] = 0.5;
        for (int i = 0; i < half; ++i) g->nodes[n_cells - i] = 1.0 - g->nodes[i];
        g->nodes[n_cells] = 1.0;
    } else {
        if (ball_dimension < 2)
            throw std::invalid_argument("build_grid: RadialBall needs dimension N >= 2");
        g->dimension = ball_dimension;
        const auto widths = graded_widths(n_cells, grading_ratio, 1.0);
        g->nodes.resize(n_cells + 1);
        // widths shrink toward r = 1
        g->nodes[n_cells] = 1.0;
        for (int i = 0; i < n_cells; ++i) g->nodes[n_cells - 1 - i] = g->nodes[n_cells - i] - widths[i];
        g->nodes[0] = 0.0;
    }
    for (std::size_t j = 0; j + 1 < g->nodes.size(); ++j)
        if (!(g->nodes[j + 1] > g->nodes[j]))
            throw Error("build_grid: degenerate cell (grading too extreme for this cell count)");
    return g;
}

Field make_field(GridPtr grid, double fill, bool dirichlet_zero) {
    Field f{std::move(grid), {}, dirichlet_zero};
    f.values.assign(f.grid->node_count(), fill);
    if (dirichlet_zero)
        for (std::size_t j = 0; j < f.values.size(); ++j)
            if (f.grid->is_dirichlet_node(j)) f.values[j] = 0.0;
    return f;
}

Field make_field(GridPtr grid, std::vector<double> values, bool dirichlet_zero) {
    Field f{std::move(grid), std::move(values), dirichlet_zero};
    validate_field(f);
    return f;
}

void validate_field(const Field& f) {
    if (!f.grid) throw std::invalid_argument("field: missing grid");
    if (f.values.size() != f.grid->node_count())
        throw std::invalid_argument("field: values length does not match node count");
    for (double v : f.values)
        if (!finite(v)) throw std::invalid_argument("field: non-finite value");
    if (f.dirichlet_zero)
        for (std::size_t j = 0; j < f.values.size(); ++j)
            if (f.grid->is_dirichlet_node(j) && f.values[j] != 0.0)
                throw std::invalid_argument("field: nonzero value at a Dirichlet node");
}

Field distance_field(GridPtr grid) {
    Field f{grid, {}, true};
    f.values.reserve(grid->node_count());
    for (double x : grid->nodes) f.values.push_back(grid->distance(x));
    return f;
}

std::vector<bool> boundary_layer_mask(const Grid& grid, double delta) {
    if (!finite(delta) || delta <= 0.0 || delta >= 0.5)
        throw std::invalid_argument("boundary_layer_mask: delta must lie in (0, 1/2)");
    std::vector<bool> mask(grid.node_count());
    for (std::size_t j = 0; j < grid.node_count(); ++j)
        mask[j] = grid.distance(grid.nodes[j]) < delta;
    return mask;
}

double snap_delta(const Grid& grid, double delta) {
    if (!finite(delta) || delta <= 0.0 || delta >= 0.5)
        throw std::invalid_argument("snap_delta: delta must lie in (0, 1/2)");
    double best = -1.0, best_err = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.node_count(); ++j) {
        const double d = grid.distance(grid.nodes[j]);
        if (d <= 0.0 || d >= 0.5) continue;
        const double err = std::abs(d - delta);
        if (err < best_err) {
            best_err = err;
            best = d;
        }
    }
    if (best < 0.0) throw Error("snap_delta: no interior node with distance in (0, 1/2)");
    return best;
}

std::vector<bool> layer_cells(const Grid& grid, double snapped_delta) {
    std::vector<bool> in(grid.cell_count());
    const double tol = snapped_delta * 1e-12;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double da = grid.distance(grid.nodes[c]);
        const double db = grid.distance(grid.nodes[c + 1]);
        in[c] = std::max(da, db) <= snapped_delta + tol;
    }
    return in;
}

std::vector<double> gradient(const Field& f) {
    validate_field(f);
    const Grid& g = *f.grid;
    std::vector<double> out(g.cell_count());
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        out[c] = (f.values[c + 1] - f.values[c]) / g.cell_width(c);
    return out;
}

Norms norms(const Field& f, double p) {
    if (!finite(p) || p <= 1.0) throw std::invalid_argument("norms: p must be > 1");
    validate_field(f);
    const Grid& g = *f.grid;
    Norms n;
    double grad_int = 0.0;
    const auto grads = gradient(f);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        grad_int += std::pow(std::abs(grads[c]), p) * g.cell_volume(c);
        n.sup_gradient = std::max(n.sup_gradient, std::abs(grads[c]));
    }
    n.lp_gradient = std::pow(grad_int, 1.0 / p);
    const QuadRule& rule = gauss_rule(g.quadrature_order);
    double val_int = 0.0;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        const double a = g.nodes[c], h = g.cell_width(c);
        for (std::size_t j = 0; j < rule.points.size(); ++j) {
            const double t = rule.points[j];
            const double u = (1.0 - t) * f.values[c] + t * f.values[c + 1];
            val_int += rule.weights[j] * std::pow(std::abs(u), p) *
                       g.volume_factor(a + h * t) * h;
        }
    }
    n.lp_value = std::pow(val_int, 1.0 / p);
    for (double v : f.values) n.sup_value = std::max(n.sup_value, std::abs(v));
    return n;
}

std::vector<double> quadrature_points(const Grid& grid) {
    const QuadRule& rule = gauss_rule(grid.quadrature_order);
    std::vector<double> pts;
    pts.reserve(grid.cell_count() * rule.points.size());
    for (std::size_t c = 0; c < grid.cell_count(); ++c)
        for (double t : rule.points) pts.push_back(grid.nodes[c] + grid.cell_width(c) * t);
    return pts;
}

double weighted_poly_cell_integral(const Grid& grid, std::size_t cell,
                                   std::span<const double> coeff_t, double mu) {
    if (!finite(mu) || mu <= -1.0)
        throw std::invalid_argument("weighted integral: exponent must be > -1");
    const double a = grid.nodes[cell], h = grid.cell_width(cell);
    const double da = grid.distance(a), db = grid.distance(a + h);

    std::vector<long double> poly(coeff_t.begin(), coeff_t.end());
    if (grid.kind == GridKind::RadialBall) {
        const auto vol = shifted_power_coeffs(a, h, grid.dimension - 1);
        poly = poly_multiply(poly, vol);
        for (auto& c : poly) c *= (long double)grid.angular_measure();
    }

    long double sum = 0.0L;
    for (std::size_t k = 0; k < poly.size(); ++k)
        sum += poly[k] * weight_moment((int)k, da, db, mu);
    return (double)(sum * (long double)h);
}

double integrate(const Grid& grid, std::span<const double> integrand,
                 std::optional<double> weight_mu) {
    const QuadRule& rule = gauss_rule(grid.quadrature_order);
    const std::size_t q = rule.points.size();
    if (integrand.size() != grid.cell_count() * q)
        throw std::invalid_argument("integrate: sample count must be cells * quadrature_order");
    if (weight_mu) {
        if (!finite(*weight_mu)) throw std::invalid_argument("integrate: non-finite weight exponent");
        if (*weight_mu <= -1.0)
            throw std::invalid_argument("integrate: weight exponent must be > -1 (non-integrable singularity)");
    }
    const double mu = weight_mu.value_or(0.0);

    double total = 0.0;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const double a = grid.nodes[c], h = grid.cell_width(c);
        const std::span<const double> f = integrand.subspan(c * q, q);
        if (mu == 0.0) { // d^0 == 1 exactly
            double s = 0.0;
            for (std::size_t j = 0; j < q; ++j)
                s += rule.weights[j] * f[j] * grid.volume_factor(a + h * rule.points[j]);
            total += s * h;
            continue;
        }
        const auto mono = lagrange_to_monomials(rule.points, f);
        std::vector<double> coeffs(mono.begin(), mono.end());
        total += weighted_poly_cell_integral(grid, c, coeffs, mu);
    }
    return total;
}

} // namespace subsuper
