#include <limits>

#include "retroscatter/error.hpp"
#include "retroscatter/transport.hpp"

namespace retroscatter
{

// Hungarian method with row potentials u, column potentials v and
// shortest augmenting paths; O(n^3).
std::vector<int> solve_assignment(std::vector<double> const& cost, int n)
{
    if (n < 1 || cost.size() != std::size_t(n) * n)
    {
        fail(ErrorCode::invalid_argument, "assignment needs an n x n cost matrix");
    }
    double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    // owner[j]: one-based row matched to column j (0 = free)
    std::vector<int> owner(n + 1, 0);
    std::vector<int> way(n + 1, 0);
    for (int i = 1; i <= n; ++i)
    {
        owner[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do
        {
            used[j0] = 1;
            int i0 = owner[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j)
            {
                if (used[j])
                {
                    continue;
                }
                double cur = cost[std::size_t(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j])
                {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j)
            {
                if (used[j])
                {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                }
                else
                {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do
        {
            int j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j)
    {
        col_of_row[owner[j] - 1] = j - 1;
    }
    return col_of_row;
}

}  // namespace retroscatter
