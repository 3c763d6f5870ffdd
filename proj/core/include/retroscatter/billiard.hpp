#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "retroscatter/cavity.hpp"
#include "retroscatter/geom.hpp"
#include "retroscatter/measure.hpp"

namespace retroscatter
{

struct ParticleState
{
    Vec2 position;
    Vec2 velocity{0, 1};
};

enum class ScatterStatus
{
    ok,
    max_bounces,
    singular_hit
};

const char* to_string(ScatterStatus s);

//! One pass through a cavity, entering and leaving through I. Positions are
//! signed arclength from the midpoint of I; n counts every reflection
//! including the final one at I.
struct ScatterRecord
{
    double xi = 0;
    double phi = 0;
    double xi_plus = 0;
    double phi_plus = 0;
    int bounces = 0;
    ScatterStatus status = ScatterStatus::ok;
};

//! v - 2 (v, n) n.
inline Vec2 reflect(Vec2 v, Vec2 n)
{
    return v - 2 * dot(v, n) * n;
}

inline constexpr int default_max_bounces = 10000;

//! Launch from xi at angle phi (clockwise from the inward normal of I) and
//! follow elastic reflections until the particle reaches I again.
ScatterRecord trace_return(Cavity const& cavity,
                           double xi,
                           double phi,
                           int max_bounces = default_max_bounces);

//! As trace_return, also reporting every reflection point.
ScatterRecord trace_return_path(Cavity const& cavity,
                                double xi,
                                double phi,
                                int max_bounces,
                                std::vector<ParticleState>& path);

//---------------------------------------------------------------------------//
// Ensembles
//---------------------------------------------------------------------------//

struct SamplingScheme
{
    enum class Generator
    {
        //! xi uniform on I and sin(phi) uniform on (-1, 1).
        lambda_importance,
        //! Jittered strata in (xi, sin(phi)); also lambda-distributed.
        stratified
    };
    std::uint64_t count = 0;
    Generator generator = Generator::lambda_importance;
    std::uint64_t seed = 1;
};

//! Sample stream split into fixed blocks; block b depends only on the seed
//! and b, so results do not depend on how blocks are spread over workers.
class SampleSource
{
  public:
    SampleSource(SamplingScheme const& scheme, double half_length);

    //! (xi, phi) pairs of block b.
    std::vector<std::pair<double, double>> block(std::uint64_t b) const;
    std::uint64_t block_count() const;

    static constexpr std::uint64_t block_size = 4096;

  private:
    SamplingScheme scheme_;
    double half_length_;
    std::uint64_t strata_xi_ = 1;
    std::uint64_t strata_s_ = 1;
};

struct EnsembleSummary
{
    std::uint64_t total = 0;
    std::uint64_t ok = 0;
    std::uint64_t max_bounces = 0;
    std::uint64_t singular = 0;
    double mean_bounces = 0;

    double excluded_fraction() const
    {
        return total ? double(max_bounces + singular) / double(total) : 0;
    }
};

struct Ensemble
{
    std::vector<ScatterRecord> records;
    EnsembleSummary summary;
};

struct EnsembleOptions
{
    int max_bounces = default_max_bounces;
    //! 0 selects the hardware concurrency.
    unsigned workers = 0;
};

//! Run job(i) for i < count on a pool of workers. Jobs must write their
//! results by index so the outcome does not depend on scheduling.
void parallel_for(std::uint64_t count,
                  unsigned workers,
                  std::function<void(std::uint64_t)> const& job);

Ensemble scatter_ensemble(Cavity const& cavity,
                          SamplingScheme const& scheme,
                          EnsembleOptions const& options = {});

EnsembleSummary summarize(std::span<ScatterRecord const> records);

//! Histogram of the ok records, normalized to mass 2.
MeasureGrid empirical_measure(std::span<ScatterRecord const> records,
                              int m_bins,
                              std::uint64_t seed = 0);

//! CSV with header xi,phi,xi_plus,phi_plus,n,status.
std::string records_csv(std::span<ScatterRecord const> records);

//---------------------------------------------------------------------------//
// Reflector checks
//---------------------------------------------------------------------------//

struct TwoBounceDerivatives
{
    double dphi_plus_dphi = 0;
    double dxi_plus_dxi = 0;
    //! Closed-form comparison value -cos(phi1) / cos(phi2).
    double expected_dphi = 0;
};

//! Central differences of the two-bounce map of R(phi1, phi2) at
//! (xi = 0, phi = phi1), with the delta = 0 geometry and the return read on
//! the base line.
TwoBounceDerivatives two_bounce_derivatives(double phi1, double phi2, double h = 1e-5);

//! Two-bounce map of R(phi1, phi2) with delta = 0: (xi, phi) ->
//! (xi_plus, phi_plus). Throws NotInA unless the reflections come in the
//! order p1, p2, base line.
std::pair<double, double> two_bounce_map(Reflector const& r, double xi, double phi);

//! Entry points of the reflector cavity with |xi| <= base_fraction times
//! the half-base count as the shrunk base.
inline constexpr double default_base_fraction = 0.5;

//! Largest w found by bisection such that every point of a (xi, phi) grid
//! over the shrunk base and [phi1 - w, phi1 + w] returns with n = 3.
double empirical_c0(Reflector const& r,
                    double base_fraction = default_base_fraction,
                    int grid = 17);

struct ThreeBounceReport
{
    std::uint64_t traced = 0;
    std::uint64_t three = 0;
    //! Largest |phi_plus - phi2 + (cos phi1 / cos phi2)(phi - phi1)|.
    double max_residual = 0;

    double fraction() const { return traced ? double(three) / double(traced) : 0; }
};

//! Random particles from the shrunk base with |phi - phi1| <= window.
ThreeBounceReport three_bounce_sweep(Reflector const& r,
                                     double window,
                                     std::uint64_t count,
                                     std::uint64_t seed,
                                     double base_fraction = default_base_fraction);

//---------------------------------------------------------------------------//
// Bodies
//---------------------------------------------------------------------------//

//! Sample a point of the boundary of K0 and an angle; entries falling on a
//! carving are traced through the prototype, the rest reflect specularly.
Ensemble scatter_body(PolygonBody const& body,
                      SamplingScheme const& scheme,
                      EnsembleOptions const& options = {});

}  // namespace retroscatter
