#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include <retroscatter/billiard.hpp>
#include <retroscatter/cavity.hpp>
#include <retroscatter/error.hpp>

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

// Pearson statistic of counts against equal expectations
double chi_square(std::vector<double> const& counts)
{
    double total = 0;
    for (double c : counts)
    {
        total += c;
    }
    double expected = total / static_cast<double>(counts.size());
    double stat = 0;
    for (double c : counts)
    {
        stat += (c - expected) * (c - expected) / expected;
    }
    return stat;
}

// Upper 0.999 quantile of chi-square with 31 degrees of freedom
constexpr double chi2_31_999 = 61.098;

}  // namespace

TEST_SUITE("billiard")
{
TEST_CASE("reflection examples")
{
    Vec2 r = reflect({1, -1}, {0, 1});
    CHECK(r.x == doctest::Approx(1));
    CHECK(r.y == doctest::Approx(1));
    Vec2 s = reflect(e_phi(0.3), normalized(Vec2{1, 1}));
    CHECK(norm(s) == doctest::Approx(1).epsilon(1e-15));
    Vec2 back = reflect(s, normalized(Vec2{1, 1}));
    CHECK(back.x == doctest::Approx(std::sin(0.3)));
    CHECK(back.y == doctest::Approx(std::cos(0.3)));
}

TEST_CASE("speed is conserved along every path")
{
    Cavity c = build_cavity(Involution({1, 4, 3, 2, 5}), 2.5, 0.4);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 200; ++k)
    {
        std::vector<ParticleState> path;
        trace_return_path(c, 0.49 * u(rng), std::asin(u(rng)), 2000, path);
        for (auto const& s : path)
        {
            CHECK(std::abs(norm(s.velocity) - 1) < 1e-12);
        }
    }
}

TEST_CASE("trajectories are reversible")
{
    Cavity c = build_cavity(Involution({1, 4, 3, 2, 5}), 2.5, 0.4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    int compared = 0;
    for (int k = 0; k < 2000; ++k)
    {
        double xi = 0.49 * u(rng);
        double phi = std::asin(u(rng));
        ScatterRecord fwd = trace_return(c, xi, phi);
        if (fwd.status != ScatterStatus::ok || fwd.bounces > 6 || std::abs(fwd.xi_plus) > 0.49)
        {
            continue;
        }
        // Time reversal: (xi+, phi+) maps back to (xi, phi)
        ScatterRecord rev = trace_return(c, fwd.xi_plus, fwd.phi_plus);
        REQUIRE(rev.status == ScatterStatus::ok);
        CHECK(rev.bounces == fwd.bounces);
        CHECK(std::abs(rev.xi_plus - xi) < 1e-7);
        CHECK(std::abs(rev.phi_plus - phi) < 1e-7);
        ++compared;
    }
    CHECK(compared > 500);
}

TEST_CASE("invalid launches are rejected")
{
    Cavity c = make_half_disc(5);
    CHECK(code_of([&] { trace_return(c, 0.5, 0.1); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { trace_return(c, 0.0, half_pi); }) == ErrorCode::angle_out_of_range);
    CHECK(code_of([&] { trace_return(c, 0.0, 0.1, 1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("the scattering map preserves the invariant measure")
{
    // Entries drawn from dxi d(sin phi); exits must follow the same law.
    Cavity c = make_half_disc(5);
    SamplingScheme scheme{1'000'000, SamplingScheme::Generator::lambda_importance, 7};
    Ensemble e = scatter_ensemble(c, scheme);
    REQUIRE(e.summary.excluded_fraction() < 1e-4);
    std::vector<double> joint(32, 0.0);
    for (auto const& r : e.records)
    {
        if (r.status != ScatterStatus::ok)
        {
            continue;
        }
        int bx = std::clamp(static_cast<int>((r.xi_plus + 0.5) * 4), 0, 3);
        int bs = std::clamp(static_cast<int>((std::sin(r.phi_plus) + 1) * 4), 0, 7);
        joint[bx * 8 + bs] += 1;
    }
    CHECK(chi_square(joint) < chi2_31_999);

    std::vector<double> angles(32, 0.0);
    for (auto const& r : e.records)
    {
        if (r.status == ScatterStatus::ok)
        {
            angles[std::clamp(static_cast<int>((std::sin(r.phi_plus) + 1) * 16), 0, 31)] += 1;
        }
    }
    CHECK(chi_square(angles) < chi2_31_999);
}

TEST_CASE("two-bounce derivatives at the focal chord")
{
    struct Case
    {
        double phi1, phi2;
    };
    for (Case p : {Case{0.0, 1.0472}, Case{0.7854, -0.7854}, Case{0.3, -0.5}, Case{-0.6, 0.4}})
    {
        TwoBounceDerivatives r = two_bounce_derivatives(p.phi1, p.phi2);
        CHECK(r.expected_dphi == doctest::Approx(-std::cos(p.phi1) / std::cos(p.phi2)));
        CHECK(std::abs(r.dphi_plus_dphi - r.expected_dphi) < 1e-6);
        // Area preservation in (xi, sin phi) fixes the other diagonal entry
        double det = r.dxi_plus_dxi * r.dphi_plus_dphi * std::cos(p.phi2) / std::cos(p.phi1);
        CHECK(std::abs(det + 1) < 1e-4);
    }
    CHECK(two_bounce_derivatives(0.0, 1.0472).dphi_plus_dphi == doctest::Approx(-2).epsilon(1e-4));
    CHECK(two_bounce_derivatives(0.7854, -0.7854).dphi_plus_dphi == doctest::Approx(-1).epsilon(1e-6));
    CHECK(code_of([] { two_bounce_map(make_reflector(0.3, -0.5, 0), 0, 1.5); })
          == ErrorCode::not_in_a);
    CHECK(code_of([] { two_bounce_derivatives(0.3, -0.5, 0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("three-bounce window and linearized exit angle")
{
    for (auto [phi1, phi2] : {std::pair{0.3, -0.5}, {0.0, 1.0}})
    {
        for (double delta : {1e-2, 1e-3})
        {
            Reflector r = make_reflector(phi1, phi2, delta);
            double c0 = empirical_c0(r);
            REQUIRE(c0 > 0.1);
            for (double w : {0.25 * c0, 0.5 * c0})
            {
                ThreeBounceReport s = three_bounce_sweep(r, w, 20000, 11);
                CHECK(s.fraction() == 1.0);
                // Residual of the linear law is O(delta + w^2); the constant
                // depends on the angles and was frozen from a sweep
                CHECK(s.max_residual <= 2.0 * (delta + w * w));
            }
        }
    }
}

TEST_CASE("rectangle: unfolding predicts every return")
{
    double a = 0.5, h = 0.7;
    Cavity c = make_rectangle(a, h);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 5000; ++k)
    {
        double xi = 0.499 * u(rng);
        double phi = 1.4 * u(rng);
        double x = xi + a + 2 * h * std::tan(phi);
        double cell = std::floor(x / (2 * a));
        int crossings = static_cast<int>(std::abs(cell));
        double folded = std::fmod(x, 4 * a);
        if (folded < 0)
        {
            folded += 4 * a;
        }
        if (folded > 2 * a)
        {
            folded = 4 * a - folded;
        }
        // Skip landings next to a corner
        if (std::abs(folded) < 1e-6 || std::abs(folded - 2 * a) < 1e-6)
        {
            continue;
        }
        ScatterRecord rec = trace_return(c, xi, phi);
        REQUIRE(rec.status == ScatterStatus::ok);
        CHECK(rec.bounces == crossings + 2);
        double sign = crossings % 2 == 0 ? -1 : 1;
        CHECK(rec.phi_plus == doctest::Approx(sign * phi).epsilon(1e-10));
        CHECK(std::abs(rec.xi_plus - (folded - a)) < 1e-9);
    }
}

TEST_CASE("half-disc: central wedge returns after one reflection")
{
    for (double r : {5.0, 20.0})
    {
        Cavity c = make_half_disc(r);
        double xi_max = 1 / (2 + 4 / r);
        double phi_max = half_pi - std::asin(1 / (2 * r));
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int k = 0; k < 5000; ++k)
        {
            double xi = xi_max * u(rng);
            double phi = phi_max * u(rng);
            if (std::abs(xi) < 1e-3)
            {
                continue;
            }
            std::vector<ParticleState> path;
            ScatterRecord rec = trace_return_path(c, xi, phi, 16, path);
            REQUIRE(rec.status == ScatterStatus::ok);
            REQUIRE(rec.bounces == 2);
            Vec2 p = path[1].position;
            double th = std::atan2(p.x, p.y);
            // Mirror relation for a point reflector on a circle about its center
            double lhs = 1 / xi + 1 / rec.xi_plus;
            CHECK(std::abs(lhs - 2 * std::sin(th) / r) < 1e-9 * (1 + std::abs(1 / xi)));
        }
    }
}

TEST_CASE("excluded fraction is small on reflector cavities")
{
    Cavity c = build_cavity(Involution({1, 4, 3, 2, 5}), 2.5, 0.4);
    SamplingScheme scheme{100'000, SamplingScheme::Generator::stratified, 3};
    Ensemble e = scatter_ensemble(c, scheme);
    CHECK(e.summary.total == 100'000);
    CHECK(e.summary.excluded_fraction() < 1e-4);
    CHECK(e.summary.mean_bounces >= 2);
}

TEST_CASE("ensembles do not depend on the worker count")
{
    Cavity c = build_cavity(Involution({1, 3, 2, 4}), 2.5, 0.4);
    SamplingScheme scheme{30'000, SamplingScheme::Generator::lambda_importance, 42};
    Ensemble one = scatter_ensemble(c, scheme, {default_max_bounces, 1});
    Ensemble three = scatter_ensemble(c, scheme, {default_max_bounces, 3});
    CHECK(records_csv(one.records) == records_csv(three.records));
}

TEST_CASE("records CSV layout")
{
    std::vector<ScatterRecord> recs{{0.25, 0.5, -0.25, -0.5, 2, ScatterStatus::ok},
                                    {0.1, 0.2, 0, 0, 10000, ScatterStatus::max_bounces}};
    std::string csv = records_csv(recs);
    CHECK(csv.rfind("xi,phi,xi_plus,phi_plus,n,status\n", 0) == 0);
    CHECK(csv.find("0.25,0.5,-0.25,-0.5,2,ok\n") != std::string::npos);
    CHECK(csv.find(",10000,max_bounces\n") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("sampling generators are lambda-distributed")
{
    for (auto gen : {SamplingScheme::Generator::lambda_importance,
                     SamplingScheme::Generator::stratified})
    {
        SamplingScheme scheme{200'000, gen, 9};
        SampleSource src(scheme, 0.5);
        std::vector<double> s_bins(32, 0.0), x_bins(32, 0.0);
        std::uint64_t n = 0;
        for (std::uint64_t b = 0; b < src.block_count(); ++b)
        {
            for (auto [xi, phi] : src.block(b))
            {
                REQUIRE(std::abs(xi) < 0.5);
                REQUIRE(std::abs(phi) < half_pi);
                s_bins[std::clamp(static_cast<int>((std::sin(phi) + 1) * 16), 0, 31)] += 1;
                x_bins[std::clamp(static_cast<int>((xi + 0.5) * 32), 0, 31)] += 1;
                ++n;
            }
        }
        CHECK(n == 200'000);
        CHECK(chi_square(s_bins) < chi2_31_999);
        CHECK(chi_square(x_bins) < chi2_31_999);
    }
    // Blocks depend only on the seed and the block index
    SamplingScheme scheme{10'000, SamplingScheme::Generator::lambda_importance, 5};
    CHECK(SampleSource(scheme, 0.5).block(1) == SampleSource(scheme, 0.5).block(1));
    CHECK(SampleSource(scheme, 0.5).block(0) != SampleSource(scheme, 0.5).block(1));
}

TEST_CASE("empirical measure of a specular mirror is the anti-diagonal")
{
    std::vector<ScatterRecord> recs;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 20000; ++k)
    {
        double phi = std::asin(u(rng));
        recs.push_back({0, phi, 0, -phi, 1, ScatterStatus::ok});
    }
    recs.push_back({0, 0.1, 0, 0.3, 7, ScatterStatus::singular_hit});
    MeasureGrid g = empirical_measure(std::span<ScatterRecord const>(recs), 8);
    CHECK(g.total() == doctest::Approx(2));
    double anti = 0;
    for (int i = 0; i < 8; ++i)
    {
        anti += g.at(i, 7 - i);
    }
    CHECK(anti == doctest::Approx(2).epsilon(1e-12));
    CHECK(grid_distance(g, nu_zero(8)) < 0.05);
}

TEST_CASE("body scattering")
{
    Cavity omega = extend_with_channel(make_half_disc(1.25), 1);
    PolygonBody body = assemble_body(square(2), omega, 0.1);
    SamplingScheme scheme{200'000, SamplingScheme::Generator::lambda_importance, 1};
    Ensemble e = scatter_body(body, scheme);
    CHECK(e.summary.total == 200'000);
    CHECK(e.summary.excluded_fraction() < 1e-3);
    std::uint64_t flat = 0;
    for (auto const& r : e.records)
    {
        CHECK(std::abs(r.xi) <= 4);
        if (r.bounces == 1)
        {
            ++flat;
            CHECK(r.phi_plus == -r.phi);
            CHECK(r.xi_plus == r.xi);
        }
    }
    // Only the uncovered part kappa0 of the perimeter reflects specularly
    double frac = double(flat) / 200'000.0;
    CHECK(frac <= body.kappa0 + 5 * std::sqrt(body.kappa0 / 200'000.0) + 1e-4);
}
}
