#pragma once

#include <utility>
#include <vector>

#include "retroscatter/cavity.hpp"
#include "retroscatter/measure.hpp"

namespace retroscatter
{

//! Resistance of the convex reference: F(nu^0).
inline constexpr double f_nu_zero = 8.0 / 3.0;

//! Average of 1 + cos(phi - phi_plus) over cell (i, j) against lambda x lambda.
double cell_cost(int i, int j, int m_bins);

//! All cell costs, row-major.
std::vector<double> cell_costs(int m_bins);

//! Integral of 1 + cos(phi - phi_plus) against the grid's measure. Graph
//! measures (and graph parts of mixtures) are integrated exactly along the
//! graph; the remaining mass uses cell-averaged costs.
double functional_F(MeasureGrid const& g);

//! Bound on the error of the cell-averaged part of functional_F: the cost
//! is 1-Lipschitz in each angle, so each cell contributes at most its mass
//! times the sum of its angular widths.
double functional_F_error_bound(MeasureGrid const& g);

struct TransportProblem
{
    enum class Sense
    {
        min,
        max
    };
    int m_bins = 16;
    Sense sense = Sense::min;
    //! Impose x_ij = x_ji.
    bool symmetric = true;
};

struct TransportSolution
{
    MeasureGrid grid;
    double value = 0;
    int iterations = 0;
};

//! Exact optimum of the discrete problem: cell costs, row and column sums
//! 2/m_bins and optional symmetry. The symmetric problem runs a revised
//! simplex over the folded variables i <= j; the plain problem has
//! permutation vertices and is solved as an assignment problem.
TransportSolution solve_mk(TransportProblem const& p);

//! Boundary of a convex hull: polygon or circle.
struct ConvexOutline
{
    double perimeter = 0;

    static ConvexOutline polygon(ConvexPolygon const& k);
    static ConvexOutline circle(double radius);
    static ConvexOutline circle_of_area(double area);
};

struct ResistanceReport
{
    double perimeter = 0;
    double f_value = 0;
    double resistance = 0;
    //! F(g) / F(nu^0).
    double ratio_to_nu_zero = 0;
    //! Resistance over that of the convex hull itself.
    double ratio_to_reference = 0;
};

ResistanceReport mean_resistance(ConvexOutline const& hull, MeasureGrid const& g);
ResistanceReport mean_resistance(PolygonBody const& body, MeasureGrid const& g);

//! Convex combination of grids of equal resolution.
MeasureGrid mixture(std::vector<std::pair<double, MeasureGrid>> const& parts);

//---------------------------------------------------------------------------//
// Solvers
//---------------------------------------------------------------------------//

struct LpResult
{
    std::vector<double> x;
    double value = 0;
    int iterations = 0;
};

//! Sparse constraint column: (row, coefficient) pairs.
using LpColumn = std::vector<std::pair<int, double>>;

//! Minimize c.x subject to A x = b, x >= 0 from a feasible starting basis
//! (one column index per row). Dantzig pricing, switching to Bland's rule
//! after a run of degenerate pivots.
LpResult revised_simplex(std::vector<LpColumn> const& columns,
                         std::vector<double> const& b,
                         std::vector<double> const& c,
                         std::vector<int> basis);

//! Minimum-cost perfect assignment on an n x n row-major cost matrix;
//! returns the column of each row.
std::vector<int> solve_assignment(std::vector<double> const& cost, int n);

}  // namespace retroscatter
