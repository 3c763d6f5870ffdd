#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace retroscatter
{

//! Permutation of {1..m} with sigma^2 = id and sigma(1) != m.
//! Stored zero-based; the public accessor is one-based.
class Involution
{
  public:
    //! One-based table [sigma(1), ..., sigma(m)].
    explicit Involution(std::vector<int> one_based);

    static Involution identity(int m);

    int size() const { return static_cast<int>(table_.size()); }
    //! One-based image sigma(i).
    int operator()(int i) const { return table_[i - 1] + 1; }
    //! Zero-based image table.
    std::vector<int> const& zero_based() const { return table_; }
    std::vector<int> one_based() const;
    bool fixes(int i) const { return (*this)(i) == i; }

  private:
    std::vector<int> table_;
};

//! Lambda mass sin(b) - sin(a) of [a, b].
double lambda_mass(double a, double b);

//! Cell boundary arcsin(-1 + 2i/m).
double theta(int i, int m);

//! One-based cell of phi in the m-partition; ties go to the lower cell.
int lower_cell(double phi, int m);

//! One-based cell of phi with lower-closed cells [theta_{i-1}, theta_i).
int histogram_cell(double phi, int m);

//! The lambda-preserving cell exchange phi_sigma.
double phi_sigma(double phi, Involution const& sigma);

struct Provenance
{
    enum class Kind
    {
        analytic,
        empirical,
        transport_solution,
        mixture
    };
    Kind kind = Kind::analytic;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string note;
    //! Zero-based cell exchange whose graph carries the measure, if any.
    std::vector<int> graph;
    //! Weighted graph components of a mixture.
    std::vector<std::pair<double, std::vector<int>>> graph_parts;
};

const char* to_string(Provenance::Kind kind);

//! Cell masses on the lambda-equal grid of Q, row index = entry angle.
struct MeasureGrid
{
    int m_bins = 0;
    std::vector<double> masses;
    Provenance provenance;
    //! Binomial standard error per cell (empirical grids only).
    std::vector<double> std_errors;

    MeasureGrid() = default;
    explicit MeasureGrid(int m, Provenance p = {});

    double& at(int i, int j) { return masses[i * m_bins + j]; }
    double at(int i, int j) const { return masses[i * m_bins + j]; }
    double total() const;
    double row_sum(int i) const;
    double col_sum(int j) const;
};

//! Masses of nu^sigma for an arbitrary zero-based cell exchange table of
//! size m, at any resolution m_bins (not necessarily a multiple of m).
MeasureGrid nu_exchange(std::span<int const> table, int m_bins);

//! nu^sigma on the m_bins grid; m_bins must be a multiple of sigma.size().
MeasureGrid nu_sigma(Involution const& sigma, int m_bins);

//! Same as nu_sigma without the divisibility requirement (coarsening).
MeasureGrid nu_sigma_resampled(Involution const& sigma, int m_bins);

MeasureGrid nu_zero(int m_bins);
MeasureGrid nu_star(int m_bins);
//! The independent coupling (lambda x lambda) / 2.
MeasureGrid independent_coupling(int m_bins);

struct AnglePair
{
    double phi;
    double phi_plus;
};

//! Histogram of (phi, phi_plus) normalized to mass 2.
MeasureGrid empirical_measure(std::span<AnglePair const> samples,
                              int m_bins,
                              std::uint64_t seed = 0);

struct MeasureReport
{
    double a1_residual = 0;
    double a2_residual = 0;
    double mass_residual = 0;

    bool passes(double tol) const
    {
        return a1_residual <= tol && a2_residual <= tol && mass_residual <= tol;
    }
};

MeasureReport check_measure(MeasureGrid const& g);

//! Statistical check: every residual within k standard errors, using the
//! per-cell errors of an empirical grid.
bool check_measure_statistical(MeasureGrid const& g, double k_sigma = 3);

//! Half the L1 distance between cell masses.
double grid_distance(MeasureGrid const& a, MeasureGrid const& b);

//! Aggregate an m_bins grid to a coarser resolution dividing it.
MeasureGrid coarsen(MeasureGrid const& g, int m_bins);

}  // namespace retroscatter
