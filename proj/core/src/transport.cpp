#include "retroscatter/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "retroscatter/error.hpp"
#include "retroscatter/geom.hpp"

namespace retroscatter
{
namespace
{
// Antiderivatives of cos^2 and sin cos
double big_a(double phi)
{
    return 0.5 * phi + 0.25 * std::sin(2 * phi);
}

double big_b(double phi)
{
    double s = std::sin(phi);
    return 0.5 * s * s;
}

struct CellMoments
{
    std::vector<double> a;
    std::vector<double> b;
};

CellMoments moments(int m)
{
    CellMoments out{std::vector<double>(m), std::vector<double>(m)};
    for (int i = 0; i < m; ++i)
    {
        double lo = theta(i, m);
        double hi = theta(i + 1, m);
        out.a[i] = big_a(hi) - big_a(lo);
        out.b[i] = big_b(hi) - big_b(lo);
    }
    return out;
}

// Integral of 1 + cos(phi - phi_plus) along the graph of one cell exchange,
// in s = sin(phi) where lambda is Lebesgue.
double graph_integral(std::vector<int> const& table)
{
    static boost::math::quadrature::tanh_sinh<double> integrator;
    int m = static_cast<int>(table.size());
    double cell = 2.0 / m;
    double total = 0;
    for (int k = 0; k < m; ++k)
    {
        double lo = -1.0 + k * cell;
        double hi = -1.0 + (k + 1) * cell;
        if (table[k] == k)
        {
            total += 2 * (hi - lo);
            continue;
        }
        double c = -2.0 + (k + table[k] + 1) * cell;
        auto f = [c](double s) {
            double t = c - s;
            return 1 + std::sqrt(std::max(0.0, 1 - s * s)) * std::sqrt(std::max(0.0, 1 - t * t))
                   + s * t;
        };
        total += integrator.integrate(f, lo, hi, 1e-14);
    }
    return total;
}

std::vector<std::pair<double, std::vector<int>>> graph_parts_of(MeasureGrid const& g)
{
    if (!g.provenance.graph.empty())
    {
        return {{1.0, g.provenance.graph}};
    }
    return g.provenance.graph_parts;
}

// Masses not carried by graph parts
std::vector<double> remainder_masses(MeasureGrid const& g)
{
    std::vector<double> rest = g.masses;
    for (auto const& [w, table] : graph_parts_of(g))
    {
        MeasureGrid part = nu_exchange(table, g.m_bins);
        for (std::size_t k = 0; k < rest.size(); ++k)
        {
            rest[k] -= w * part.masses[k];
        }
    }
    return rest;
}

void check_mass(MeasureGrid const& g)
{
    if (g.m_bins < 1 || g.masses.size() != std::size_t(g.m_bins) * g.m_bins)
    {
        fail(ErrorCode::grid_mismatch, "grid storage does not match its resolution");
    }
    if (std::abs(g.total() - 2) > 1e-6)
    {
        fail(ErrorCode::mass_mismatch,
             "total mass " + std::to_string(g.total()) + " differs from 2");
    }
}

}  // namespace

double cell_cost(int i, int j, int m_bins)
{
    double lo_i = theta(i, m_bins), hi_i = theta(i + 1, m_bins);
    double lo_j = theta(j, m_bins), hi_j = theta(j + 1, m_bins);
    double ai = big_a(hi_i) - big_a(lo_i), bi = big_b(hi_i) - big_b(lo_i);
    double aj = big_a(hi_j) - big_a(lo_j), bj = big_b(hi_j) - big_b(lo_j);
    double w = 2.0 / m_bins;
    return 1 + (ai * aj + bi * bj) / (w * w);
}

std::vector<double> cell_costs(int m_bins)
{
    if (m_bins < 1)
    {
        fail(ErrorCode::invalid_argument, "m_bins must be positive");
    }
    CellMoments mo = moments(m_bins);
    double w = 2.0 / m_bins;
    std::vector<double> c(std::size_t(m_bins) * m_bins);
    for (int i = 0; i < m_bins; ++i)
    {
        for (int j = 0; j < m_bins; ++j)
        {
            c[std::size_t(i) * m_bins + j] = 1 + (mo.a[i] * mo.a[j] + mo.b[i] * mo.b[j]) / (w * w);
        }
    }
    return c;
}

double functional_F(MeasureGrid const& g)
{
    check_mass(g);
    double value = 0;
    for (auto const& [w, table] : graph_parts_of(g))
    {
        value += w * graph_integral(table);
    }
    std::vector<double> rest = remainder_masses(g);
    std::vector<double> c = cell_costs(g.m_bins);
    for (std::size_t k = 0; k < rest.size(); ++k)
    {
        value += c[k] * rest[k];
    }
    return value;
}

double functional_F_error_bound(MeasureGrid const& g)
{
    check_mass(g);
    int m = g.m_bins;
    std::vector<double> width(m);
    for (int i = 0; i < m; ++i)
    {
        width[i] = theta(i + 1, m) - theta(i, m);
    }
    std::vector<double> rest = remainder_masses(g);
    double bound = 0;
    for (int i = 0; i < m; ++i)
    {
        for (int j = 0; j < m; ++j)
        {
            bound += std::abs(rest[std::size_t(i) * m + j]) * (width[i] + width[j]);
        }
    }
    return bound;
}

//---------------------------------------------------------------------------//
// Monge-Kantorovich problem
//---------------------------------------------------------------------------//

TransportSolution solve_mk(TransportProblem const& p)
{
    int m = p.m_bins;
    if (m < 1)
    {
        fail(ErrorCode::invalid_argument, "transport needs m_bins >= 1");
    }
    double sign = p.sense == TransportProblem::Sense::min ? 1.0 : -1.0;
    double marginal = 2.0 / m;
    std::vector<double> cost = cell_costs(m);

    Provenance prov;
    prov.kind = Provenance::Kind::transport_solution;
    prov.note = std::string(p.sense == TransportProblem::Sense::min ? "min" : "max")
                + (p.symmetric ? " symmetric" : " plain");
    TransportSolution sol;
    sol.grid = MeasureGrid(m, prov);

    if (!p.symmetric)
    {
        std::vector<double> c(cost.size());
        for (std::size_t k = 0; k < c.size(); ++k)
        {
            c[k] = sign * cost[k];
        }
        auto col = solve_assignment(c, m);
        for (int i = 0; i < m; ++i)
        {
            sol.grid.at(i, col[i]) = marginal;
        }
    }
    else
    {
        // Folded variables y_ij, i <= j; row i sums x_ij = y_min(i,j),max(i,j)
        std::vector<LpColumn> columns;
        std::vector<double> c;
        std::vector<std::pair<int, int>> cell;
        std::vector<int> basis(m);
        for (int i = 0; i < m; ++i)
        {
            for (int j = i; j < m; ++j)
            {
                if (i == j)
                {
                    basis[i] = static_cast<int>(columns.size());
                    columns.push_back({{i, 1.0}});
                    c.push_back(sign * cost[std::size_t(i) * m + i]);
                }
                else
                {
                    columns.push_back({{i, 1.0}, {j, 1.0}});
                    c.push_back(sign * 2 * cost[std::size_t(i) * m + j]);
                }
                cell.emplace_back(i, j);
            }
        }
        std::vector<double> b(m, marginal);
        LpResult lp = revised_simplex(columns, b, c, basis);
        sol.iterations = lp.iterations;
        for (std::size_t k = 0; k < cell.size(); ++k)
        {
            auto [i, j] = cell[k];
            sol.grid.at(i, j) = lp.x[k];
            sol.grid.at(j, i) = lp.x[k];
        }
    }
    for (std::size_t k = 0; k < cost.size(); ++k)
    {
        sol.value += cost[k] * sol.grid.masses[k];
    }
    return sol;
}

//---------------------------------------------------------------------------//
// Mean resistance
//---------------------------------------------------------------------------//

ConvexOutline ConvexOutline::polygon(ConvexPolygon const& k)
{
    k.validate();
    return {k.perimeter()};
}

ConvexOutline ConvexOutline::circle(double radius)
{
    if (!(radius > 0))
    {
        fail(ErrorCode::invalid_argument, "circle radius must be positive");
    }
    return {2 * pi * radius};
}

ConvexOutline ConvexOutline::circle_of_area(double area)
{
    if (!(area > 0))
    {
        fail(ErrorCode::invalid_argument, "area must be positive");
    }
    return {2 * std::sqrt(pi * area)};
}

ResistanceReport mean_resistance(ConvexOutline const& hull, MeasureGrid const& g)
{
    ResistanceReport r;
    r.perimeter = hull.perimeter;
    r.f_value = functional_F(g);
    r.resistance = r.perimeter * r.f_value;
    r.ratio_to_nu_zero = r.f_value / f_nu_zero;
    r.ratio_to_reference = r.resistance / (r.perimeter * f_nu_zero);
    return r;
}

ResistanceReport mean_resistance(PolygonBody const& body, MeasureGrid const& g)
{
    return mean_resistance(ConvexOutline::polygon(body.k0), g);
}

MeasureGrid mixture(std::vector<std::pair<double, MeasureGrid>> const& parts)
{
    if (parts.empty())
    {
        fail(ErrorCode::empty_input, "mixture needs at least one grid");
    }
    int m = parts.front().second.m_bins;
    double total = 0;
    bool any_errors = false;
    for (auto const& [w, g] : parts)
    {
        if (!(w >= 0))
        {
            fail(ErrorCode::weight_mismatch, "mixture weights must be nonnegative");
        }
        if (g.m_bins != m)
        {
            fail(ErrorCode::grid_mismatch, "mixture components have different resolutions");
        }
        total += w;
        any_errors = any_errors || !g.std_errors.empty();
    }
    if (std::abs(total - 1) > 1e-9)
    {
        fail(ErrorCode::weight_mismatch,
             "mixture weights sum to " + std::to_string(total) + ", not 1");
    }

    Provenance prov;
    prov.kind = Provenance::Kind::mixture;
    prov.note = "mixture of " + std::to_string(parts.size());
    MeasureGrid out(m, prov);
    std::vector<double> variance(out.masses.size(), 0.0);
    for (auto const& [w, g] : parts)
    {
        for (std::size_t k = 0; k < out.masses.size(); ++k)
        {
            out.masses[k] += w * g.masses[k];
            if (!g.std_errors.empty())
            {
                variance[k] += w * w * g.std_errors[k] * g.std_errors[k];
            }
        }
        for (auto const& [pw, table] : graph_parts_of(g))
        {
            out.provenance.graph_parts.emplace_back(w * pw, table);
        }
        out.provenance.samples += g.provenance.samples;
    }
    if (any_errors)
    {
        out.std_errors.resize(variance.size());
        for (std::size_t k = 0; k < variance.size(); ++k)
        {
            out.std_errors[k] = std::sqrt(variance[k]);
        }
    }
    return out;
}

}  // namespace retroscatter
