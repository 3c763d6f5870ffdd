#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "retroscatter/error.hpp"
#include "retroscatter/transport.hpp"

namespace retroscatter
{
namespace
{
constexpr double reduced_cost_tol = 1e-12;
constexpr double pivot_tol = 1e-11;
constexpr int refactor_period = 64;
constexpr int degenerate_run_for_bland = 50;

// Dense inverse of the basis matrix by Gauss-Jordan with partial pivoting.
std::vector<double> invert_basis(std::vector<LpColumn> const& columns,
                                 std::vector<int> const& basis,
                                 int m)
{
    std::vector<double> a(std::size_t(m) * m, 0.0);
    for (int k = 0; k < m; ++k)
    {
        for (auto [row, v] : columns[basis[k]])
        {
            a[std::size_t(row) * m + k] = v;
        }
    }
    std::vector<double> inv(std::size_t(m) * m, 0.0);
    for (int i = 0; i < m; ++i)
    {
        inv[std::size_t(i) * m + i] = 1.0;
    }
    for (int col = 0; col < m; ++col)
    {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
        {
            if (std::abs(a[std::size_t(r) * m + col]) > std::abs(a[std::size_t(piv) * m + col]))
            {
                piv = r;
            }
        }
        double p = a[std::size_t(piv) * m + col];
        if (std::abs(p) < 1e-14)
        {
            fail(ErrorCode::infeasible, "simplex basis became singular");
        }
        if (piv != col)
        {
            for (int k = 0; k < m; ++k)
            {
                std::swap(a[std::size_t(piv) * m + k], a[std::size_t(col) * m + k]);
                std::swap(inv[std::size_t(piv) * m + k], inv[std::size_t(col) * m + k]);
            }
        }
        for (int k = 0; k < m; ++k)
        {
            a[std::size_t(col) * m + k] /= p;
            inv[std::size_t(col) * m + k] /= p;
        }
        for (int r = 0; r < m; ++r)
        {
            double f = a[std::size_t(r) * m + col];
            if (r == col || f == 0)
            {
                continue;
            }
            for (int k = 0; k < m; ++k)
            {
                a[std::size_t(r) * m + k] -= f * a[std::size_t(col) * m + k];
                inv[std::size_t(r) * m + k] -= f * inv[std::size_t(col) * m + k];
            }
        }
    }
    return inv;
}

}  // namespace

LpResult revised_simplex(std::vector<LpColumn> const& columns,
                         std::vector<double> const& b,
                         std::vector<double> const& c,
                         std::vector<int> basis)
{
    int m = static_cast<int>(b.size());
    int n = static_cast<int>(columns.size());
    if (static_cast<int>(c.size()) != n || static_cast<int>(basis.size()) != m)
    {
        fail(ErrorCode::invalid_argument, "simplex dimensions disagree");
    }
    std::vector<char> in_basis(n, 0);
    for (int k : basis)
    {
        in_basis.at(k) = 1;
    }

    std::vector<double> inv;
    std::vector<double> xb(m);
    auto refactor = [&] {
        inv = invert_basis(columns, basis, m);
        for (int i = 0; i < m; ++i)
        {
            double s = 0;
            for (int k = 0; k < m; ++k)
            {
                s += inv[std::size_t(i) * m + k] * b[k];
            }
            if (s < -1e-9)
            {
                fail(ErrorCode::infeasible, "starting basis is not primal feasible");
            }
            xb[i] = std::max(0.0, s);
        }
    };
    refactor();

    std::vector<double> y(m);
    std::vector<double> u(m);
    LpResult out;
    int degenerate_run = 0;
    int max_iterations = 50 * (m + n) + 1000;
    for (;; ++out.iterations)
    {
        if (out.iterations > max_iterations)
        {
            fail(ErrorCode::infeasible,
                 "simplex exceeded " + std::to_string(max_iterations) + " iterations");
        }
        if (out.iterations % refactor_period == 0 && out.iterations > 0)
        {
            refactor();
        }
        // Duals y^T = c_B^T B^-1
        std::fill(y.begin(), y.end(), 0.0);
        for (int k = 0; k < m; ++k)
        {
            double cb = c[basis[k]];
            if (cb == 0)
            {
                continue;
            }
            for (int i = 0; i < m; ++i)
            {
                y[i] += cb * inv[std::size_t(k) * m + i];
            }
        }

        bool bland = degenerate_run >= degenerate_run_for_bland;
        int entering = -1;
        double best = -reduced_cost_tol;
        for (int j = 0; j < n; ++j)
        {
            if (in_basis[j])
            {
                continue;
            }
            double d = c[j];
            for (auto [row, v] : columns[j])
            {
                d -= y[row] * v;
            }
            double scale = 1 + std::abs(c[j]);
            if (d < best * scale)
            {
                entering = j;
                if (bland)
                {
                    break;
                }
                best = d / scale;
            }
        }
        if (entering < 0)
        {
            break;
        }

        std::fill(u.begin(), u.end(), 0.0);
        for (auto [row, v] : columns[entering])
        {
            for (int k = 0; k < m; ++k)
            {
                u[k] += inv[std::size_t(k) * m + row] * v;
            }
        }
        int leaving = -1;
        double step = std::numeric_limits<double>::infinity();
        for (int k = 0; k < m; ++k)
        {
            if (u[k] > pivot_tol)
            {
                double ratio = xb[k] / u[k];
                if (ratio < step - 1e-15
                    || (ratio <= step + 1e-15 && leaving >= 0 && basis[k] < basis[leaving]))
                {
                    step = ratio;
                    leaving = k;
                }
            }
        }
        if (leaving < 0)
        {
            fail(ErrorCode::infeasible, "linear program is unbounded");
        }
        degenerate_run = step <= 1e-15 ? degenerate_run + 1 : 0;

        for (int k = 0; k < m; ++k)
        {
            xb[k] = std::max(0.0, xb[k] - step * u[k]);
        }
        xb[leaving] = step;
        double p = u[leaving];
        for (int i = 0; i < m; ++i)
        {
            inv[std::size_t(leaving) * m + i] /= p;
        }
        for (int k = 0; k < m; ++k)
        {
            if (k == leaving || u[k] == 0)
            {
                continue;
            }
            double f = u[k];
            for (int i = 0; i < m; ++i)
            {
                inv[std::size_t(k) * m + i] -= f * inv[std::size_t(leaving) * m + i];
            }
        }
        in_basis[basis[leaving]] = 0;
        in_basis[entering] = 1;
        basis[leaving] = entering;
    }

    refactor();
    out.x.assign(n, 0.0);
    for (int k = 0; k < m; ++k)
    {
        out.x[basis[k]] = xb[k];
    }
    for (int j = 0; j < n; ++j)
    {
        out.value += c[j] * out.x[j];
    }
    return out;
}

}  // namespace retroscatter
