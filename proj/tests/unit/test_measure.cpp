#include <cmath>
#include <random>

#include <doctest.h>

#include <retroscatter/error.hpp>
#include <retroscatter/geom.hpp>
#include <retroscatter/measure.hpp>

using namespace retroscatter;

namespace
{
ErrorCode code_of(auto&& f)
{
    try
    {
        f();
    }
    catch (Error const& e)
    {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::parse_error;
}

// Push lambda forward through phi -> (phi, phi_sigma(phi)) by midpoint
// quadrature in s = sin(phi).
MeasureGrid quadrature_oracle(Involution const& sigma, int m_bins, int points)
{
    MeasureGrid g(m_bins);
    double ds = 2.0 / points;
    for (int k = 0; k < points; ++k)
    {
        double phi = std::asin(-1 + (k + 0.5) * ds);
        int i = histogram_cell(phi, m_bins) - 1;
        int j = histogram_cell(phi_sigma(phi, sigma), m_bins) - 1;
        g.at(i, j) += ds;
    }
    return g;
}

}  // namespace

TEST_SUITE("measure")
{
TEST_CASE("involution validation")
{
    Involution s({1, 3, 2, 4});
    CHECK(s.size() == 4);
    CHECK(s(2) == 3);
    CHECK(s(3) == 2);
    CHECK(s.fixes(1));
    CHECK_FALSE(s.fixes(2));
    CHECK(s.zero_based() == std::vector<int>{0, 2, 1, 3});
    CHECK(s.one_based() == std::vector<int>{1, 3, 2, 4});
    CHECK(Involution::identity(3).one_based() == std::vector<int>{1, 2, 3});

    CHECK(code_of([] { Involution({1}); }) == ErrorCode::invalid_involution);
    CHECK(code_of([] { Involution({2, 3, 1}); }) == ErrorCode::invalid_involution);
    CHECK(code_of([] { Involution({1, 1, 3}); }) == ErrorCode::invalid_involution);
    CHECK(code_of([] { Involution({0, 2}); }) == ErrorCode::invalid_involution);
    CHECK(code_of([] { Involution({4, 2, 3, 1}); }) == ErrorCode::invalid_involution);
    CHECK(code_of([] { Involution({2, 1}); }) == ErrorCode::invalid_involution);
}

TEST_CASE("cell boundaries split lambda evenly")
{
    CHECK(theta(0, 4) == doctest::Approx(-half_pi));
    CHECK(theta(4, 4) == doctest::Approx(half_pi));
    CHECK(theta(2, 4) == 0.0);
    CHECK(theta(1, 4) == doctest::Approx(-pi / 6));
    CHECK(theta(3, 4) == doctest::Approx(pi / 6));
    for (int m : {3, 7, 16})
    {
        for (int i = 1; i <= m; ++i)
        {
            CHECK(lambda_mass(theta(i - 1, m), theta(i, m)) == doctest::Approx(2.0 / m));
        }
    }
    CHECK(lambda_mass(-half_pi, half_pi) == doctest::Approx(2));
    CHECK(code_of([] { theta(5, 4); }) == ErrorCode::index_out_of_range);
    CHECK(code_of([] { theta(-1, 4); }) == ErrorCode::index_out_of_range);
    CHECK(code_of([] { lambda_mass(0.5, 0.1); }) == ErrorCode::out_of_range);
}

TEST_CASE("cells and ties")
{
    CHECK(lower_cell(-half_pi, 4) == 1);
    CHECK(lower_cell(half_pi, 4) == 4);
    CHECK(lower_cell(0.0, 4) == 2);
    CHECK(histogram_cell(0.0, 4) == 3);
    CHECK(lower_cell(theta(1, 4), 4) == 1);
    CHECK(histogram_cell(theta(1, 4), 4) == 2);
    CHECK(lower_cell(0.1, 4) == 3);
    CHECK(histogram_cell(-0.1, 4) == 2);
    CHECK(histogram_cell(half_pi, 4) == 4);
}

TEST_CASE("phi_sigma is a lambda-preserving involution")
{
    Involution s({1, 4, 3, 2, 5});
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 10000; ++k)
    {
        double phi = std::asin(u(rng));
        double img = phi_sigma(phi, s);
        CHECK(phi_sigma(img, s) == doctest::Approx(phi).epsilon(1e-9));
        int cell = histogram_cell(phi, 5);
        if (s.fixes(cell))
        {
            CHECK(img == phi);
        }
        else
        {
            CHECK(histogram_cell(img, 5) == s(cell));
        }
    }
    // The endpoints of cell 2 swap with those of cell 4
    CHECK(phi_sigma(theta(1, 5) + 1e-9, s) == doctest::Approx(theta(4, 5)).epsilon(1e-6));
    CHECK(phi_sigma(0.0, Involution::identity(4)) == 0.0);
    CHECK(code_of([&] { phi_sigma(2.0, s); }) == ErrorCode::out_of_range);
}

TEST_CASE("nu_sigma matches a quadrature oracle")
{
    for (auto const& s : {Involution({1, 3, 2, 4}), Involution({1, 4, 3, 2, 5}),
                          Involution({3, 2, 1, 4, 6, 5})})
    {
        for (int mult : {1, 2, 3})
        {
            int bins = s.size() * mult;
            MeasureGrid g = nu_sigma(s, bins);
            MeasureGrid oracle = quadrature_oracle(s, bins, 600'000);
            CHECK(grid_distance(g, oracle) < 1e-4);
            CHECK(check_measure(g).passes(1e-12));
            CHECK(g.provenance.graph == s.zero_based());
        }
        // Off-multiple resolutions go through the resampled variant
        MeasureGrid r = nu_sigma_resampled(s, 7);
        CHECK(grid_distance(r, quadrature_oracle(s, 7, 600'000)) < 1e-4);
        CHECK(check_measure(r).passes(1e-12));
    }
    CHECK(code_of([] { nu_sigma(Involution({1, 3, 2, 4}), 6); }) == ErrorCode::grid_mismatch);
}

TEST_CASE("reference measures")
{
    MeasureGrid z = nu_zero(6), d = nu_star(6), ind = independent_coupling(6);
    for (auto const* g : {&z, &d, &ind})
    {
        CHECK(check_measure(*g).passes(1e-12));
    }
    CHECK(z.at(0, 5) == doctest::Approx(1.0 / 3));
    CHECK(d.at(2, 2) == doctest::Approx(1.0 / 3));
    CHECK(ind.at(1, 4) == doctest::Approx(2.0 / 36));
    CHECK(grid_distance(z, d) == doctest::Approx(2));
    CHECK(grid_distance(nu_zero(5), nu_star(5)) == doctest::Approx(2 - 2.0 / 5));
    CHECK(grid_distance(z, z) == 0);
    CHECK(grid_distance(nu_sigma(Involution::identity(3), 6), d) < 1e-15);
    CHECK(code_of([] { grid_distance(nu_zero(4), nu_zero(5)); }) == ErrorCode::grid_mismatch);
}

TEST_CASE("check_measure detects each violation")
{
    MeasureGrid g = nu_star(4);
    g.at(0, 1) += 0.1;
    g.at(0, 0) -= 0.1;
    MeasureReport r = check_measure(g);
    CHECK(r.a2_residual == doctest::Approx(0.1));
    CHECK(r.a1_residual == doctest::Approx(0.1));
    CHECK(r.mass_residual < 1e-15);
    g.at(1, 0) += 0.1;
    g.at(1, 1) -= 0.1;
    r = check_measure(g);
    CHECK(r.a2_residual < 1e-15);
    CHECK(r.a1_residual < 1e-15);
    g.at(3, 3) += 0.5;
    CHECK(check_measure(g).mass_residual == doctest::Approx(0.5));
    CHECK_FALSE(check_measure(g).passes(1e-9));
}

TEST_CASE("empirical histograms and the statistical check")
{
    Involution s({1, 3, 2, 4});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<AnglePair> pairs;
    for (int k = 0; k < 200'000; ++k)
    {
        double phi = std::asin(u(rng));
        pairs.push_back({phi, phi_sigma(phi, s)});
    }
    MeasureGrid g = empirical_measure(pairs, 8, 3);
    CHECK(g.provenance.kind == Provenance::Kind::empirical);
    CHECK(g.provenance.samples == 200'000);
    CHECK(g.total() == doctest::Approx(2));
    REQUIRE(g.std_errors.size() == 64);
    CHECK(grid_distance(g, nu_sigma(s, 8)) < 0.01);
    CHECK(check_measure_statistical(g));
    // Every cell lies within five standard errors of the exact mass
    MeasureGrid exact = nu_sigma(s, 8);
    for (std::size_t k = 0; k < 64; ++k)
    {
        CHECK(std::abs(g.masses[k] - exact.masses[k]) <= 5 * g.std_errors[k] + 1e-12);
    }

    // A clearly asymmetric sample fails
    std::vector<AnglePair> skew;
    for (int k = 0; k < 100'000; ++k)
    {
        double phi = std::asin(u(rng));
        skew.push_back({phi, std::asin(0.5 * (std::sin(phi) + 1))});
    }
    CHECK_FALSE(check_measure_statistical(empirical_measure(skew, 8)));
    CHECK(code_of([] { empirical_measure(std::span<AnglePair const>(), 4); })
          == ErrorCode::empty_input);
}

TEST_CASE("coarsening aggregates cells")
{
    Involution s({1, 4, 3, 2, 5});
    MeasureGrid fine = nu_sigma(s, 20);
    MeasureGrid coarse = coarsen(fine, 5);
    CHECK(grid_distance(coarse, nu_sigma(s, 5)) < 1e-14);
    CHECK(coarsen(fine, 20).masses == fine.masses);
    CHECK(code_of([&] { coarsen(fine, 3); }) == ErrorCode::grid_mismatch);
    CHECK(code_of([] { MeasureGrid(0); }) == ErrorCode::invalid_argument);
}
}
