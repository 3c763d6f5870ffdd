#include "retroscatter/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "retroscatter/error.hpp"

namespace retroscatter
{
namespace
{
// Block index of every row for the given offsets.
std::vector<int> block_of_rows(std::vector<std::int64_t> const& offsets)
{
    std::vector<int> out(static_cast<std::size_t>(offsets.back()));
    for (std::size_t b = 0; b + 1 < offsets.size(); ++b)
    {
        std::fill(out.begin() + offsets[b], out.begin() + offsets[b + 1], static_cast<int>(b));
    }
    return out;
}

}  // namespace

//---------------------------------------------------------------------------//
// SymmetricIntMatrix
//---------------------------------------------------------------------------//

SymmetricIntMatrix::SymmetricIntMatrix(int m, std::vector<std::int64_t> values)
    : order(m), entries(std::move(values))
{
    if (m < 1 || entries.size() != std::size_t(m) * m)
    {
        fail(ErrorCode::invalid_argument, "matrix needs order >= 1 and order^2 entries");
    }
}

std::int64_t SymmetricIntMatrix::row_sum(int i) const
{
    std::int64_t s = 0;
    for (int j = 0; j < order; ++j)
    {
        s += this->at(i, j);
    }
    return s;
}

void SymmetricIntMatrix::validate() const
{
    for (int i = 0; i < order; ++i)
    {
        for (int j = 0; j < order; ++j)
        {
            if (this->at(i, j) < 0)
            {
                fail(ErrorCode::negative_entry, "entry (" + std::to_string(i + 1) + ", "
                                                    + std::to_string(j + 1) + ") is negative");
            }
            if (this->at(i, j) != this->at(j, i))
            {
                fail(ErrorCode::not_symmetric, "entries (" + std::to_string(i + 1) + ", "
                                                   + std::to_string(j + 1)
                                                   + ") and its transpose differ");
            }
        }
    }
}

//---------------------------------------------------------------------------//
// BlockPermutationMatrix
//---------------------------------------------------------------------------//

std::vector<std::int64_t> BlockPermutationMatrix::block_offsets() const
{
    std::vector<std::int64_t> off(block_sizes.size() + 1, 0);
    for (std::size_t b = 0; b < block_sizes.size(); ++b)
    {
        off[b + 1] = off[b] + block_sizes[b];
    }
    return off;
}

std::int64_t BlockPermutationMatrix::block_sum(int i, int j) const
{
    auto off = this->block_offsets();
    std::int64_t count = 0;
    for (std::int64_t r = off[i]; r < off[i + 1]; ++r)
    {
        std::int64_t c = col_of_row[r];
        if (c >= off[j] && c < off[j + 1])
        {
            ++count;
        }
    }
    return count;
}

BlockPermutationMatrix discretize_matrix(SymmetricIntMatrix const& a)
{
    a.validate();
    int m = a.order;
    BlockPermutationMatrix b;
    b.block_sizes.resize(m);
    for (int i = 0; i < m; ++i)
    {
        std::int64_t n = a.row_sum(i);
        if (n > std::numeric_limits<int>::max())
        {
            fail(ErrorCode::invalid_argument, "row sum too large for a block");
        }
        b.block_sizes[i] = static_cast<int>(n);
    }
    auto off = b.block_offsets();
    b.col_of_row.assign(static_cast<std::size_t>(off.back()), -1);

    // used[j]: rows (equivalently columns) of block j consumed by earlier
    // steps; step s works on the lower-right corners below them.
    std::vector<std::int64_t> used(m, 0);
    for (int s = 0; s < m; ++s)
    {
        std::int64_t row = off[s] + used[s];
        for (std::int64_t k = 0; k < a.at(s, s); ++k, ++row)
        {
            b.col_of_row[row] = row;
        }
        for (int j = s + 1; j < m; ++j)
        {
            std::int64_t col = off[j] + used[j];
            for (std::int64_t k = 0; k < a.at(s, j); ++k, ++row, ++col)
            {
                b.col_of_row[row] = col;
                b.col_of_row[col] = row;
            }
            used[j] += a.at(s, j);
        }
        used[s] = b.block_sizes[s];
    }
    return b;
}

BlockPermutationMatrix double_matrix(BlockPermutationMatrix const& b)
{
    BlockPermutationMatrix d;
    d.block_sizes.reserve(b.block_sizes.size());
    for (int s : b.block_sizes)
    {
        d.block_sizes.push_back(2 * s);
    }
    d.col_of_row.assign(2 * b.col_of_row.size(), -1);
    for (std::size_t r = 0; r < b.col_of_row.size(); ++r)
    {
        std::int64_t c = b.col_of_row[r];
        if (c >= 0)
        {
            d.col_of_row[2 * r] = 2 * c;
            d.col_of_row[2 * r + 1] = 2 * c + 1;
        }
    }
    return d;
}

Involution matrix_to_involution(BlockPermutationMatrix const& d)
{
    std::int64_t m = d.order();
    if (m < 2)
    {
        fail(ErrorCode::not_permutation_matrix, "matrix order must be at least 2");
    }
    if (m > std::numeric_limits<int>::max())
    {
        fail(ErrorCode::invalid_argument, "matrix order too large for an involution");
    }
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (std::int64_t r = 0; r < m; ++r)
    {
        std::int64_t c = d.col_of_row[r];
        if (c < 0 || c >= m || seen[c])
        {
            fail(ErrorCode::not_permutation_matrix,
                 "row " + std::to_string(r + 1) + " breaks the one-per-row/column rule");
        }
        seen[c] = 1;
    }
    for (std::int64_t r = 0; r < m; ++r)
    {
        if (d.col_of_row[d.col_of_row[r]] != r)
        {
            fail(ErrorCode::not_involution,
                 "sigma(sigma(" + std::to_string(r + 1) + ")) != " + std::to_string(r + 1));
        }
    }
    if (d.col_of_row[0] == m - 1)
    {
        fail(ErrorCode::forbidden_corner, "d_1m = 1");
    }
    std::vector<int> table(static_cast<std::size_t>(m));
    for (std::int64_t r = 0; r < m; ++r)
    {
        table[r] = static_cast<int>(d.col_of_row[r] + 1);
    }
    return Involution(std::move(table));
}

//---------------------------------------------------------------------------//
// Approximation
//---------------------------------------------------------------------------//

InvolutionApproximation approximate_by_involution(MeasureGrid const& g,
                                                  std::int64_t denominator_cap)
{
    int n = g.m_bins;
    if (n < 1)
    {
        fail(ErrorCode::invalid_argument, "grid has no cells");
    }
    if (!check_measure(g).passes(1e-9))
    {
        fail(ErrorCode::not_normalized, "grid must satisfy A1, A2 and mass 2 within 1e-9");
    }
    if (denominator_cap < 1)
    {
        fail(ErrorCode::invalid_argument, "denominator cap must be positive");
    }
    double window = std::pow(static_cast<double>(n), -4.0);
    // Masses are known to 1e-9; allow that much above a cell value
    double snap = 1e-9;

    // Symmetrized free cells i > j
    std::vector<double> x;
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < i; ++j)
        {
            x.push_back(std::max(0.0, 0.5 * (g.at(i, j) + g.at(j, i))));
            cells.emplace_back(i, j);
        }
    }

    // Row targets 2N/n must be integers
    std::int64_t step = n / std::gcd(n, 2);
    std::int64_t denom = 0;
    std::vector<std::int64_t> numer(x.size());
    for (std::int64_t cand = step; cand <= denominator_cap; cand += step)
    {
        double nd = static_cast<double>(cand);
        bool good = true;
        for (std::size_t k = 0; k < x.size() && good; ++k)
        {
            double v = std::floor(nd * (x[k] + snap));
            numer[k] = static_cast<std::int64_t>(v);
            good = v >= nd * (x[k] - window);
        }
        if (good)
        {
            denom = cand;
            break;
        }
    }
    if (denom == 0)
    {
        fail(ErrorCode::denominator_overflow,
             "no common denominator <= " + std::to_string(denominator_cap)
                 + " places every cell within n^-4; coarsen the rationalization");
    }

    SymmetricIntMatrix a(n);
    for (std::size_t k = 0; k < cells.size(); ++k)
    {
        auto [i, j] = cells[k];
        a.at(i, j) = numer[k];
        a.at(j, i) = numer[k];
    }
    std::int64_t target = 2 * denom / n;
    for (bool changed = true; changed;)
    {
        changed = false;
        for (int i = 0; i < n; ++i)
        {
            std::int64_t off = a.row_sum(i) - a.at(i, i);
            if (off <= target)
            {
                a.at(i, i) = target - off;
                continue;
            }
            // Forced diagonal would be negative: shrink the free entries
            double f = static_cast<double>(target) / static_cast<double>(off);
            for (int j = 0; j < n; ++j)
            {
                if (j != i)
                {
                    auto v = static_cast<std::int64_t>(std::floor(a.at(i, j) * f));
                    a.at(i, j) = v;
                    a.at(j, i) = v;
                }
            }
            changed = true;
        }
    }

    BlockPermutationMatrix d = double_matrix(discretize_matrix(a));
    InvolutionApproximation out;
    out.sigma = matrix_to_involution(d);
    out.denominator = denom;
    out.counts = a;

    Provenance p;
    p.kind = Provenance::Kind::analytic;
    p.note = "nu_sigma supercells";
    out.grid = MeasureGrid(n, p);
    auto offsets = d.block_offsets();
    auto block = block_of_rows(offsets);
    double cell = 2.0 / static_cast<double>(d.order());
    for (std::int64_t r = 0; r < d.order(); ++r)
    {
        out.grid.at(block[r], block[d.col_of_row[r]]) += cell;
    }
    for (std::size_t k = 0; k < g.masses.size(); ++k)
    {
        out.error = std::max(out.error, std::abs(out.grid.masses[k] - g.masses[k]));
    }
    return out;
}

}  // namespace retroscatter
