// Acceptance checks. Run with a criterion number (1-12) to evaluate one
// criterion, or without arguments to evaluate all. Each criterion prints one
// line "criterion N: PASS|FAIL ..." and the exit status is nonzero if any
// evaluated criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <retroscatter/billiard.hpp>
#include <retroscatter/cavity.hpp>
#include <retroscatter/discretize.hpp>
#include <retroscatter/error.hpp>
#include <retroscatter/measure.hpp>
#include <retroscatter/transport.hpp>

using namespace retroscatter;

namespace
{
struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(char const* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

constexpr std::uint64_t million = 1'000'000;

//---------------------------------------------------------------------------//
// 1. F(nu0) = 8/3
//---------------------------------------------------------------------------//
Outcome criterion_1()
{
    constexpr double tol = 1e-9;
    using boost::math::quadrature::gauss_kronrod;
    // On the anti-diagonal 1 + cos(2 phi) against cos(phi) d(phi)
    double quad = gauss_kronrod<double, 61>::integrate(
        [](double p) { return (1 + std::cos(2 * p)) * std::cos(p); }, -half_pi, half_pi, 15,
        1e-15);
    double lib = functional_F(nu_zero(16));
    double err = std::max(std::abs(quad - 8.0 / 3.0), std::abs(lib - 8.0 / 3.0));
    return {err < tol, fmt("quadrature %.15f, functional %.15f, max error %.2e (tol %.0e)", quad,
                           lib, err, tol)};
}

//---------------------------------------------------------------------------//
// 2. max F over admissible measures = 4
//---------------------------------------------------------------------------//
Outcome criterion_2()
{
    constexpr double tol = 2e-3;
    constexpr double diag_tol = 1e-9;
    TransportSolution s = solve_mk({64, TransportProblem::Sense::max});
    double off = 0;
    for (int i = 0; i < 64; ++i)
    {
        for (int j = 0; j < 64; ++j)
        {
            off += i == j ? 0 : s.grid.at(i, j);
        }
    }
    bool ok = std::abs(s.value - 4) < tol && off < diag_tol;
    return {ok, fmt("m_bins 64 value %.8f (|v-4| %.2e, tol %.0e), off-diagonal mass %.2e "
                    "(tol %.0e)",
                    s.value, std::abs(s.value - 4), tol, off, diag_tol)};
}

//---------------------------------------------------------------------------//
// 3. min ratio 0.9878, monotone in m_bins
//---------------------------------------------------------------------------//
Outcome criterion_3()
{
    constexpr double target = 0.9878;
    constexpr double tol = 5e-3;
    std::vector<double> ratios;
    std::string detail = "ratios";
    for (int m : {16, 32, 64, 128})
    {
        ratios.push_back(solve_mk({m, TransportProblem::Sense::min}).value / f_nu_zero);
        detail += fmt(" %d:%.6f", m, ratios.back());
    }
    bool monotone = true;
    for (std::size_t k = 1; k < ratios.size(); ++k)
    {
        monotone = monotone && ratios[k] <= ratios[k - 1] + 1e-12;
    }
    double err = std::abs(ratios.back() - target);
    detail += fmt("; |r128 - %.4f| = %.2e (tol %.0e); monotone %s", target, err, tol,
                  monotone ? "yes" : "no");
    return {monotone && err < tol, detail};
}

//---------------------------------------------------------------------------//
// 4. maximal resistance ratio 1.5
//---------------------------------------------------------------------------//
Outcome criterion_4()
{
    constexpr double tol = 1e-9;
    ConvexOutline hull = ConvexOutline::circle_of_area(1.0);
    double star = mean_resistance(hull, nu_star(16)).resistance;
    double zero = mean_resistance(hull, nu_zero(16)).resistance;
    double ratio = star / zero;
    return {std::abs(ratio - 1.5) < tol,
            fmt("R(nu*) / R(nu0) = %.15f (tol %.0e)", ratio, tol)};
}

//---------------------------------------------------------------------------//
// 5. two-bounce derivatives
//---------------------------------------------------------------------------//
Outcome criterion_5()
{
    constexpr double tol = 1e-4;
    std::vector<double> grid{-1.2, -0.6, 0.0, 0.6, 1.2};
    int pairs = 0;
    double worst_phi = 0, worst_xi = 0;
    std::string failures;
    for (double p1 : grid)
    {
        for (double p2 : grid)
        {
            if (std::abs(p2 - p1) < 0.3)
            {
                continue;
            }
            ++pairs;
            try
            {
                TwoBounceDerivatives r = two_bounce_derivatives(p1, p2);
                double e_phi = std::abs(r.dphi_plus_dphi / r.expected_dphi - 1);
                double e_xi = std::abs(std::abs(r.dxi_plus_dxi) - 1);
                worst_phi = std::max(worst_phi, e_phi);
                worst_xi = std::max(worst_xi, e_xi);
            }
            catch (Error const& e)
            {
                failures += fmt(" (%.1f,%.1f):%s", p1, p2, to_string(e.code()));
                worst_phi = worst_xi = INFINITY;
            }
        }
    }
    bool ok = pairs == 20 && worst_phi < tol && worst_xi < tol;
    return {ok, fmt("%d pairs; max relative dphi error %.2e, max ||dxi|-1| %.2e (tol %.0e)%s",
                    pairs, worst_phi, worst_xi, tol, failures.c_str())};
}

//---------------------------------------------------------------------------//
// 6. three-bounce property
//---------------------------------------------------------------------------//
Outcome criterion_6()
{
    constexpr std::uint64_t particles = 20000;
    bool ok = true;
    std::string detail;
    for (auto [p1, p2] : {std::pair{0.3, -0.5}, {0.0, 1.0}, {-0.7, 0.4}})
    {
        for (double delta : {1e-2, 1e-3})
        {
            Reflector r = make_reflector(p1, p2, delta);
            double c0 = empirical_c0(r);
            ThreeBounceReport s = three_bounce_sweep(r, 0.5 * c0, particles, 6);
            ok = ok && c0 > 0 && s.three == s.traced;
            detail += fmt("%sR(%.1f,%.1f,%.0e): c0 %.4f, n=3 %llu/%llu", detail.empty() ? "" : "; ",
                          p1, p2, delta, c0, (unsigned long long)s.three,
                          (unsigned long long)s.traced);
        }
    }
    return {ok, detail};
}

//---------------------------------------------------------------------------//
// 7. convex case (half-disc)
//---------------------------------------------------------------------------//
Outcome criterion_7()
{
    constexpr double tol = 0.02;
    constexpr double r = 1000;
    Cavity c = build_cavity(Involution::identity(4), r, std::pow(r, -1.5));
    Ensemble e = scatter_ensemble(c, {million, SamplingScheme::Generator::lambda_importance, 7});
    MeasureGrid g = empirical_measure(std::span<ScatterRecord const>(e.records), 16, 7);
    double d_zero = grid_distance(g, nu_zero(16));
    double d_star = grid_distance(g, nu_star(16));

    // Wedge of entries whose chord to the rim and back stays on I
    double xi_max = 1 / (2 + 4 / r);
    double phi_max = half_pi - std::asin(1 / (2 * r));
    std::uint64_t in_wedge = 0, two = 0;
    for (auto const& rec : e.records)
    {
        if (rec.status == ScatterStatus::ok && std::abs(rec.xi) < xi_max
            && std::abs(rec.phi) < phi_max)
        {
            ++in_wedge;
            two += rec.bounces == 2;
        }
    }
    bool ok = d_zero < tol && two == in_wedge;
    return {ok, fmt("r %.0f, N %llu: distance to nu0 %.4f (tol %.2f); n=2 in wedge %llu/%llu; "
                    "distance to nu* %.4f",
                    r, (unsigned long long)million, d_zero, tol, (unsigned long long)two,
                    (unsigned long long)in_wedge, d_star)};
}

//---------------------------------------------------------------------------//
// 8. convergence to nu_sigma
//---------------------------------------------------------------------------//
Outcome criterion_8()
{
    Involution sigma({1, 3, 2, 4});
    MeasureGrid target = nu_sigma(sigma, 8);
    std::vector<double> dist;
    double frac_last = 0;
    std::string detail;
    bool built = true;
    for (double r : {10.0, 30.0, 100.0})
    {
        try
        {
            Cavity c = build_cavity(sigma, r, std::pow(r, -1.5));
            Ensemble e = scatter_ensemble(c, {million, SamplingScheme::Generator::lambda_importance, 8});
            MeasureGrid g = empirical_measure(std::span<ScatterRecord const>(e.records), 8, 8);
            dist.push_back(grid_distance(g, target));
            std::uint64_t hit = 0;
            for (auto const& rec : e.records)
            {
                int cell = lower_cell(rec.phi, 4);
                int expected = sigma.fixes(cell) ? 2 : 5;
                hit += rec.status == ScatterStatus::ok && rec.bounces == expected;
            }
            frac_last = double(hit) / double(million);
            detail += fmt("%sr %.0f: distance %.4f, n=n_sigma %.4f", detail.empty() ? "" : "; ", r,
                          dist.back(), frac_last);
        }
        catch (Error const& e)
        {
            built = false;
            detail += fmt("%sr %.0f: %s", detail.empty() ? "" : "; ", r, e.what());
        }
    }
    if (!built)
    {
        return {false, detail};
    }
    bool decreasing = dist[0] > dist[1] && dist[1] > dist[2];
    return {decreasing && dist[2] < 0.1 && frac_last > 0.9, detail};
}

//---------------------------------------------------------------------------//
// 9. measure invariants
//---------------------------------------------------------------------------//
Outcome criterion_9()
{
    constexpr double tol = 1e-9;
    int analytic = 0, analytic_ok = 0;
    auto check = [&](MeasureGrid const& g) {
        ++analytic;
        analytic_ok += check_measure(g).passes(tol);
    };
    for (auto const& s : {Involution::identity(3), Involution({1, 3, 2, 4}),
                          Involution({1, 4, 3, 2, 5}), Involution({3, 2, 1, 4, 6, 5})})
    {
        for (int mult : {1, 2, 4})
        {
            check(nu_sigma(s, s.size() * mult));
        }
    }
    for (int m : {1, 7, 16, 64})
    {
        check(nu_zero(m));
        check(nu_star(m));
        check(independent_coupling(m));
    }
    for (int m : {1, 16, 32, 64})
    {
        check(solve_mk({m, TransportProblem::Sense::min}).grid);
        check(solve_mk({m, TransportProblem::Sense::max}).grid);
        check(solve_mk({m, TransportProblem::Sense::min, false}).grid);
    }

    int empirical = 0, empirical_ok = 0;
    auto check_emp = [&](Cavity const& c, std::uint64_t seed) {
        Ensemble e = scatter_ensemble(c, {200'000, SamplingScheme::Generator::lambda_importance, seed});
        for (int m : {4, 8})
        {
            ++empirical;
            empirical_ok += check_measure_statistical(
                empirical_measure(std::span<ScatterRecord const>(e.records), m, seed), 3.0);
        }
    };
    check_emp(make_half_disc(5), 91);
    check_emp(build_cavity(Involution({1, 4, 3, 2, 5}), 2.5, 0.4), 92);
    check_emp(extend_with_channel(make_half_disc(5), 4), 93);
    check_emp(make_rectangle(0.5, 0.7), 94);

    bool ok = analytic == analytic_ok && empirical == empirical_ok;
    return {ok, fmt("analytic grids %d/%d at %.0e; empirical grids %d/%d at 3 standard errors",
                    analytic_ok, analytic, tol, empirical_ok, empirical)};
}

//---------------------------------------------------------------------------//
// 10. block permutation matrices
//---------------------------------------------------------------------------//
Outcome criterion_10()
{
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> order(1, 6), entry(0, 5);
    int tested = 0, good = 0;
    for (int k = 0; k < 1000; ++k)
    {
        int m = order(rng);
        SymmetricIntMatrix a(m);
        for (int i = 0; i < m; ++i)
        {
            for (int j = i; j < m; ++j)
            {
                a.at(i, j) = a.at(j, i) = entry(rng);
            }
        }
        std::int64_t total = std::accumulate(a.entries.begin(), a.entries.end(), std::int64_t(0));
        if (total == 0)
        {
            continue;
        }
        ++tested;
        BlockPermutationMatrix b = discretize_matrix(a);
        std::int64_t n = b.order();
        // Independent counting of the full 0/1 matrix
        std::vector<std::int64_t> start(m + 1, 0);
        for (int i = 0; i < m; ++i)
        {
            start[i + 1] = start[i] + a.row_sum(i);
        }
        bool ok = start[m] == n;
        std::vector<int> col_count(n, 0);
        std::vector<std::int64_t> sums(std::size_t(m) * m, 0);
        auto block_of = [&](std::int64_t r) {
            return int(std::upper_bound(start.begin(), start.end(), r) - start.begin() - 1);
        };
        for (std::int64_t r = 0; ok && r < n; ++r)
        {
            std::int64_t c = b.col_of_row[r];
            ok = c >= 0 && c < n && b.col_of_row[c] == r;
            if (ok)
            {
                ++col_count[c];
                ++sums[block_of(r) * m + block_of(c)];
            }
        }
        for (std::int64_t c = 0; ok && c < n; ++c)
        {
            ok = col_count[c] == 1;
        }
        for (int i = 0; ok && i < m; ++i)
        {
            for (int j = 0; ok && j < m; ++j)
            {
                ok = sums[i * m + j] == a.at(i, j);
            }
        }
        try
        {
            Involution s = matrix_to_involution(double_matrix(b));
            for (int i = 1; ok && i <= s.size(); ++i)
            {
                ok = s(s(i)) == i;
            }
            ok = ok && s(1) != s.size();
        }
        catch (Error const&)
        {
            ok = false;
        }
        good += ok;
    }
    return {tested == good && tested > 900,
            fmt("%d/%d random matrices satisfy all invariants and yield involutions", good, tested)};
}

//---------------------------------------------------------------------------//
// 11. channel extension
//---------------------------------------------------------------------------//
Outcome criterion_11()
{
    constexpr int bins = 16;
    Cavity omega = make_half_disc(5);
    auto measure_of = [&](Cavity const& c, std::uint64_t seed) {
        Ensemble e = scatter_ensemble(c, {million, SamplingScheme::Generator::lambda_importance, seed});
        return empirical_measure(std::span<ScatterRecord const>(e.records), bins, seed);
    };
    MeasureGrid base = measure_of(omega, 110);
    std::vector<double> dist;
    std::string detail = "half-disc r 5";
    for (int n : {4, 16, 64})
    {
        dist.push_back(grid_distance(measure_of(extend_with_channel(omega, n), 110 + n), base));
        detail += fmt("; n %d: distance %.4f", n, dist.back());
    }
    return {dist[0] > dist[1] && dist[1] > dist[2], detail};
}

//---------------------------------------------------------------------------//
// 12. body assembly
//---------------------------------------------------------------------------//
Outcome criterion_12()
{
    constexpr double eps = 0.1;
    constexpr double noise = 0.03;
    constexpr int bins = 8;
    Cavity omega = extend_with_channel(make_half_disc(1.25), 1);
    ConvexPolygon k0 = square(2);
    PolygonBody body = assemble_body(k0, omega, eps);
    DisjointnessReport rep = check_carvings(body);

    Ensemble proto = scatter_ensemble(body.prototype,
                                      {million, SamplingScheme::Generator::lambda_importance, 120});
    MeasureGrid nu_omega = empirical_measure(std::span<ScatterRecord const>(proto.records), bins);
    MeasureGrid predicted = mixture({{body.kappa0, nu_zero(bins)}, {1 - body.kappa0, nu_omega}});

    Ensemble e = scatter_body(body, {million, SamplingScheme::Generator::lambda_importance, 121});
    MeasureGrid nu_body = empirical_measure(std::span<ScatterRecord const>(e.records), bins);
    double dist = grid_distance(nu_body, predicted);
    double bound = 2 * body.kappa0 + noise;
    double kappa_cap = eps / k0.perimeter();
    bool ok = body.kappa0 <= kappa_cap && dist <= bound && rep.ok();
    return {ok, fmt("kappa0 %.6f (cap %.4f), carvings %zu, disjoint %s; distance %.4f "
                    "(bound 2 kappa0 + %.2f = %.4f)",
                    body.kappa0, kappa_cap, body.carving_count(), rep.ok() ? "yes" : "no", dist,
                    noise, bound)};
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::function<Outcome()>> criteria{
        criterion_1, criterion_2, criterion_3,  criterion_4,  criterion_5,  criterion_6,
        criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12};
    std::vector<int> selected;
    if (argc > 1)
    {
        for (int k = 1; k < argc; ++k)
        {
            int n = std::atoi(argv[k]);
            if (n < 1 || n > 12)
            {
                std::fprintf(stderr, "usage: %s [criterion 1-12 ...]\n", argv[0]);
                return 64;
            }
            selected.push_back(n);
        }
    }
    else
    {
        selected.resize(12);
        std::iota(selected.begin(), selected.end(), 1);
    }
    bool all = true;
    for (int n : selected)
    {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[n - 1]();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s %s [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
