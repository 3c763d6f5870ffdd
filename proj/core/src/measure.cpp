#include "retroscatter/measure.hpp"

#include <algorithm>
#include <cmath>

#include "retroscatter/error.hpp"
#include "retroscatter/geom.hpp"

namespace retroscatter
{
namespace
{
// Position of sin(phi) on the m-partition, in units of cells.
double cell_coordinate(double phi, int m)
{
    return 0.5 * (std::sin(phi) + 1) * m;
}

double overlap(double a0, double a1, double b0, double b1)
{
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

void fill_standard_errors(MeasureGrid& g)
{
    double n = static_cast<double>(g.provenance.samples);
    g.std_errors.assign(g.masses.size(), 0.0);
    if (n <= 0)
    {
        return;
    }
    for (std::size_t k = 0; k < g.masses.size(); ++k)
    {
        double p = 0.5 * g.masses[k];
        g.std_errors[k] = 2 * std::sqrt(std::max(0.0, p * (1 - p)) / n);
    }
}

}  // namespace

//---------------------------------------------------------------------------//
// Involution
//---------------------------------------------------------------------------//

Involution::Involution(std::vector<int> one_based)
{
    int m = static_cast<int>(one_based.size());
    if (m < 2)
    {
        fail(ErrorCode::invalid_involution, "involution needs m >= 2");
    }
    table_.resize(m);
    for (int i = 0; i < m; ++i)
    {
        int image = one_based[i];
        if (image < 1 || image > m)
        {
            fail(ErrorCode::invalid_involution,
                 "image " + std::to_string(image) + " outside {1.." + std::to_string(m) + "}");
        }
        table_[i] = image - 1;
    }
    for (int i = 0; i < m; ++i)
    {
        if (table_[table_[i]] != i)
        {
            fail(ErrorCode::invalid_involution,
                 "sigma(sigma(" + std::to_string(i + 1) + ")) != " + std::to_string(i + 1));
        }
    }
    if (table_[0] == m - 1)
    {
        fail(ErrorCode::invalid_involution, "sigma(1) = m is not allowed");
    }
}

Involution Involution::identity(int m)
{
    std::vector<int> t(m);
    for (int i = 0; i < m; ++i)
    {
        t[i] = i + 1;
    }
    return Involution(std::move(t));
}

std::vector<int> Involution::one_based() const
{
    std::vector<int> out(table_.size());
    for (std::size_t i = 0; i < table_.size(); ++i)
    {
        out[i] = table_[i] + 1;
    }
    return out;
}

//---------------------------------------------------------------------------//
// Partition and cell maps
//---------------------------------------------------------------------------//

double lambda_mass(double a, double b)
{
    constexpr double slack = 1e-15;
    if (!(a >= -half_pi - slack && a <= b && b <= half_pi + slack))
    {
        fail(ErrorCode::out_of_range, "lambda_mass requires -pi/2 <= a <= b <= pi/2");
    }
    return std::sin(b) - std::sin(a);
}

double theta(int i, int m)
{
    if (m < 1 || i < 0 || i > m)
    {
        fail(ErrorCode::index_out_of_range,
             "theta index " + std::to_string(i) + " outside [0, " + std::to_string(m) + "]");
    }
    if (2 * i == m)
    {
        return 0.0;
    }
    return std::asin(-1.0 + 2.0 * i / m);
}

int lower_cell(double phi, int m)
{
    double c = cell_coordinate(phi, m);
    double nearest = std::round(c);
    if (std::abs(c - nearest) < 1e-12 * m)
    {
        c = nearest;
    }
    return std::clamp(static_cast<int>(std::ceil(c)), 1, m);
}

int histogram_cell(double phi, int m)
{
    return std::clamp(static_cast<int>(std::floor(cell_coordinate(phi, m))) + 1, 1, m);
}

double phi_sigma(double phi, Involution const& sigma)
{
    if (!(std::abs(phi) <= half_pi))
    {
        fail(ErrorCode::out_of_range, "phi_sigma requires |phi| <= pi/2");
    }
    int m = sigma.size();
    int i = lower_cell(phi, m);
    int j = sigma(i);
    if (i == j)
    {
        return phi;
    }
    double s = -2.0 + 2.0 * (i + j - 1) / m - std::sin(phi);
    return std::asin(std::clamp(s, -1.0, 1.0));
}

//---------------------------------------------------------------------------//
// Grids
//---------------------------------------------------------------------------//

const char* to_string(Provenance::Kind kind)
{
    switch (kind)
    {
        case Provenance::Kind::analytic: return "analytic";
        case Provenance::Kind::empirical: return "empirical";
        case Provenance::Kind::transport_solution: return "transport-solution";
        case Provenance::Kind::mixture: return "mixture";
    }
    return "unknown";
}

MeasureGrid::MeasureGrid(int m, Provenance p)
    : m_bins(m), masses(static_cast<std::size_t>(m) * m, 0.0), provenance(std::move(p))
{
    if (m < 1)
    {
        fail(ErrorCode::invalid_argument, "grid resolution must be >= 1");
    }
}

double MeasureGrid::total() const
{
    double t = 0;
    for (double v : masses)
    {
        t += v;
    }
    return t;
}

double MeasureGrid::row_sum(int i) const
{
    double t = 0;
    for (int j = 0; j < m_bins; ++j)
    {
        t += this->at(i, j);
    }
    return t;
}

double MeasureGrid::col_sum(int j) const
{
    double t = 0;
    for (int i = 0; i < m_bins; ++i)
    {
        t += this->at(i, j);
    }
    return t;
}

MeasureGrid nu_exchange(std::span<int const> table, int m_bins)
{
    int m = static_cast<int>(table.size());
    Provenance p;
    p.kind = Provenance::Kind::analytic;
    p.note = "cell exchange";
    p.graph.assign(table.begin(), table.end());
    MeasureGrid g(m_bins, p);

    // In s = sin(phi) the measure lambda is Lebesgue, source cell k is
    // [-1 + 2k/m, -1 + 2(k+1)/m] and the exchange is s -> c_k - s.
    double cell = 2.0 / m;
    double bin = 2.0 / m_bins;
    auto bin_lo = [&](int i) { return -1.0 + i * bin; };
    auto bin_of = [&](double s) {
        return std::clamp(static_cast<int>(std::floor((s + 1) / bin)), 0, m_bins - 1);
    };
    for (int k = 0; k < m; ++k)
    {
        double lo = -1.0 + k * cell;
        double hi = -1.0 + (k + 1) * cell;
        bool fixed = table[k] == k;
        double c = -2.0 + (k + table[k] + 1) * cell;
        int i_end = bin_of(hi - 1e-15);
        for (int i = bin_of(lo); i <= i_end; ++i)
        {
            double a = std::max(lo, bin_lo(i));
            double b = std::min(hi, bin_lo(i + 1));
            if (b <= a)
            {
                continue;
            }
            if (fixed)
            {
                g.at(i, i) += b - a;
                continue;
            }
            // Images of [a, b] form [c - b, c - a]
            int j_end = bin_of(c - a - 1e-15);
            for (int j = bin_of(c - b); j <= j_end; ++j)
            {
                g.at(i, j) += overlap(a, b, c - bin_lo(j + 1), c - bin_lo(j));
            }
        }
    }
    return g;
}

MeasureGrid nu_sigma(Involution const& sigma, int m_bins)
{
    if (m_bins < 1 || m_bins % sigma.size() != 0)
    {
        fail(ErrorCode::grid_mismatch,
             "m_bins = " + std::to_string(m_bins) + " is not a multiple of m = "
                 + std::to_string(sigma.size()));
    }
    return nu_sigma_resampled(sigma, m_bins);
}

MeasureGrid nu_sigma_resampled(Involution const& sigma, int m_bins)
{
    auto g = nu_exchange(sigma.zero_based(), m_bins);
    g.provenance.note = "nu_sigma";
    return g;
}

MeasureGrid nu_zero(int m_bins)
{
    Provenance p;
    p.note = "nu_zero";
    p.graph = {1, 0};
    MeasureGrid g(m_bins, p);
    for (int i = 0; i < m_bins; ++i)
    {
        g.at(i, m_bins - 1 - i) = 2.0 / m_bins;
    }
    return g;
}

MeasureGrid nu_star(int m_bins)
{
    Provenance p;
    p.note = "nu_star";
    p.graph = {0};
    MeasureGrid g(m_bins, p);
    for (int i = 0; i < m_bins; ++i)
    {
        g.at(i, i) = 2.0 / m_bins;
    }
    return g;
}

MeasureGrid independent_coupling(int m_bins)
{
    Provenance p;
    p.note = "independent coupling";
    MeasureGrid g(m_bins, p);
    std::fill(g.masses.begin(), g.masses.end(), 2.0 / (double(m_bins) * m_bins));
    return g;
}

MeasureGrid empirical_measure(std::span<AnglePair const> samples,
                              int m_bins,
                              std::uint64_t seed)
{
    if (samples.empty())
    {
        fail(ErrorCode::empty_input, "no samples for the empirical measure");
    }
    Provenance p;
    p.kind = Provenance::Kind::empirical;
    p.samples = samples.size();
    p.seed = seed;
    MeasureGrid g(m_bins, p);
    std::vector<std::uint64_t> counts(g.masses.size(), 0);
    for (auto const& s : samples)
    {
        int i = histogram_cell(s.phi, m_bins) - 1;
        int j = histogram_cell(s.phi_plus, m_bins) - 1;
        ++counts[i * m_bins + j];
    }
    double n = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < counts.size(); ++k)
    {
        g.masses[k] = 2.0 * static_cast<double>(counts[k]) / n;
    }
    fill_standard_errors(g);
    return g;
}

MeasureReport check_measure(MeasureGrid const& g)
{
    MeasureReport r;
    double target = 2.0 / g.m_bins;
    for (int i = 0; i < g.m_bins; ++i)
    {
        r.a1_residual = std::max(r.a1_residual, std::abs(g.row_sum(i) - target));
        r.a1_residual = std::max(r.a1_residual, std::abs(g.col_sum(i) - target));
        for (int j = i + 1; j < g.m_bins; ++j)
        {
            r.a2_residual = std::max(r.a2_residual, std::abs(g.at(i, j) - g.at(j, i)));
        }
    }
    r.mass_residual = std::abs(g.total() - 2.0);
    return r;
}

bool check_measure_statistical(MeasureGrid const& g, double k_sigma)
{
    double n = static_cast<double>(g.provenance.samples);
    if (n <= 0 || g.std_errors.size() != g.masses.size())
    {
        return check_measure(g).passes(1e-9);
    }
    int m = g.m_bins;
    double p = 1.0 / m;
    double marginal_se = 2 * std::sqrt(p * (1 - p) / n);
    double target = 2.0 / m;
    for (int i = 0; i < m; ++i)
    {
        if (std::abs(g.row_sum(i) - target) > k_sigma * marginal_se
            || std::abs(g.col_sum(i) - target) > k_sigma * marginal_se)
        {
            return false;
        }
        for (int j = i + 1; j < m; ++j)
        {
            double se = std::hypot(g.std_errors[i * m + j], g.std_errors[j * m + i]);
            // A cell pair with no counts has zero estimated error; one count
            // is the resolution floor.
            se = std::max(se, 2.0 / n);
            if (std::abs(g.at(i, j) - g.at(j, i)) > k_sigma * se)
            {
                return false;
            }
        }
    }
    return std::abs(g.total() - 2.0) <= 1e-9;
}

double grid_distance(MeasureGrid const& a, MeasureGrid const& b)
{
    if (a.m_bins != b.m_bins)
    {
        fail(ErrorCode::grid_mismatch, "grid_distance needs equal resolutions");
    }
    double total = 0;
    for (std::size_t k = 0; k < a.masses.size(); ++k)
    {
        total += std::abs(a.masses[k] - b.masses[k]);
    }
    return 0.5 * total;
}

MeasureGrid coarsen(MeasureGrid const& g, int m_bins)
{
    if (m_bins < 1 || g.m_bins % m_bins != 0)
    {
        fail(ErrorCode::grid_mismatch, "coarse resolution must divide the fine one");
    }
    int f = g.m_bins / m_bins;
    MeasureGrid out(m_bins, g.provenance);
    for (int i = 0; i < g.m_bins; ++i)
    {
        for (int j = 0; j < g.m_bins; ++j)
        {
            out.at(i / f, j / f) += g.at(i, j);
        }
    }
    if (!g.std_errors.empty())
    {
        fill_standard_errors(out);
    }
    return out;
}

}  // namespace retroscatter
