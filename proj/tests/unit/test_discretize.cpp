#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include <retroscatter/discretize.hpp>
#include <retroscatter/error.hpp>
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

// Dense 0/1 view of a block matrix, built only from the row-to-column table.
struct Dense
{
    std::int64_t order = 0;
    std::vector<char> cells;

    explicit Dense(BlockPermutationMatrix const& b) : order(b.order()), cells(order * order, 0)
    {
        for (std::int64_t r = 0; r < order; ++r)
        {
            if (b.col_of_row[r] >= 0)
            {
                cells[r * order + b.col_of_row[r]] = 1;
            }
        }
    }
    int at(std::int64_t r, std::int64_t c) const { return cells[r * order + c]; }
};

// Check the three block-matrix invariants without using the library's
// own block arithmetic.
void check_invariants(SymmetricIntMatrix const& a, BlockPermutationMatrix const& b)
{
    Dense d(b);
    REQUIRE(static_cast<int>(b.block_sizes.size()) == a.order);
    std::vector<std::int64_t> start(a.order + 1, 0);
    for (int i = 0; i < a.order; ++i)
    {
        CHECK(b.block_sizes[i] == a.row_sum(i));
        start[i + 1] = start[i] + b.block_sizes[i];
    }
    REQUIRE(start[a.order] == d.order);
    for (std::int64_t r = 0; r < d.order; ++r)
    {
        int row = 0, col = 0;
        for (std::int64_t c = 0; c < d.order; ++c)
        {
            row += d.at(r, c);
            col += d.at(c, r);
            CHECK(d.at(r, c) == d.at(c, r));
        }
        CHECK(row == 1);
        CHECK(col == 1);
    }
    for (int i = 0; i < a.order; ++i)
    {
        for (int j = 0; j < a.order; ++j)
        {
            std::int64_t sum = 0;
            for (std::int64_t r = start[i]; r < start[i + 1]; ++r)
            {
                for (std::int64_t c = start[j]; c < start[j + 1]; ++c)
                {
                    sum += d.at(r, c);
                }
            }
            CHECK(sum == a.at(i, j));
        }
    }
}

SymmetricIntMatrix random_symmetric(std::mt19937_64& rng, int m, int max_entry)
{
    std::uniform_int_distribution<int> u(0, max_entry);
    SymmetricIntMatrix a(m);
    for (int i = 0; i < m; ++i)
    {
        for (int j = i; j < m; ++j)
        {
            a.at(i, j) = a.at(j, i) = u(rng);
        }
    }
    return a;
}

// Random member of the A1 + A2 set: a mixture of symmetrized permutations.
MeasureGrid random_measure(std::mt19937_64& rng, int n, int parts)
{
    MeasureGrid g(n);
    std::vector<double> w(parts);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    double total = 0;
    for (double& x : w)
    {
        x = u(rng);
        total += x;
    }
    for (int k = 0; k < parts; ++k)
    {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        for (int i = 0; i < n; ++i)
        {
            double v = 0.5 * (w[k] / total) * (2.0 / n);
            g.at(i, p[i]) += v;
            g.at(p[i], i) += v;
        }
    }
    return g;
}

MeasureGrid mixture_like(MeasureGrid const& a, MeasureGrid const& b, double w)
{
    MeasureGrid g(a.m_bins);
    for (std::size_t k = 0; k < g.masses.size(); ++k)
    {
        g.masses[k] = w * a.masses[k] + (1 - w) * b.masses[k];
    }
    return g;
}

}  // namespace

TEST_SUITE("discretize")
{
TEST_CASE("matrix construction examples")
{
    BlockPermutationMatrix b = discretize_matrix(SymmetricIntMatrix(1, {2}));
    CHECK(b.col_of_row == std::vector<std::int64_t>{0, 1});
    CHECK(b.block_sizes == std::vector<int>{2});

    BlockPermutationMatrix s = discretize_matrix(SymmetricIntMatrix(2, {0, 1, 1, 0}));
    CHECK(s.col_of_row == std::vector<std::int64_t>{1, 0});
    CHECK(s.block_sum(0, 1) == 1);
    CHECK(s.block_sum(0, 0) == 0);

    // Staircase: row sums 3 = 1 + 2 in the first row
    SymmetricIntMatrix a(2, {1, 2, 2, 0});
    BlockPermutationMatrix t = discretize_matrix(a);
    CHECK(t.col_of_row == std::vector<std::int64_t>{0, 3, 4, 1, 2});
    check_invariants(a, t);

    // Empty blocks are zero-sized
    SymmetricIntMatrix e(3, {1, 0, 1, 0, 0, 0, 1, 0, 0});
    BlockPermutationMatrix eb = discretize_matrix(e);
    CHECK(eb.block_sizes == std::vector<int>{2, 0, 1});
    check_invariants(e, eb);

    CHECK(code_of([] { SymmetricIntMatrix(2, {0, 1, 2, 0}).validate(); })
          == ErrorCode::not_symmetric);
    CHECK(code_of([] { discretize_matrix(SymmetricIntMatrix(2, {0, 1, 2, 0})); })
          == ErrorCode::not_symmetric);
    CHECK(code_of([] { discretize_matrix(SymmetricIntMatrix(2, {-1, 0, 0, 1})); })
          == ErrorCode::negative_entry);
}

TEST_CASE("doubling examples")
{
    BlockPermutationMatrix one{{1}, {0}};
    CHECK(double_matrix(one).col_of_row == std::vector<std::int64_t>{0, 1});

    BlockPermutationMatrix swap = discretize_matrix(SymmetricIntMatrix(2, {0, 1, 1, 0}));
    BlockPermutationMatrix d = double_matrix(swap);
    CHECK(d.col_of_row == std::vector<std::int64_t>{2, 3, 0, 1});
    CHECK_FALSE(d.entry(0, 3));
    CHECK(d.block_sizes == std::vector<int>{2, 2});
    for (int i = 0; i < 2; ++i)
    {
        for (int j = 0; j < 2; ++j)
        {
            CHECK(d.block_sum(i, j) == 2 * swap.block_sum(i, j));
        }
    }
    CHECK(matrix_to_involution(d).one_based() == std::vector<int>{3, 4, 1, 2});
}

TEST_CASE("reading involutions from matrices")
{
    BlockPermutationMatrix id{{4}, {0, 1, 2, 3}};
    CHECK(matrix_to_involution(id).one_based() == std::vector<int>{1, 2, 3, 4});

    BlockPermutationMatrix corner{{4}, {3, 1, 2, 0}};
    CHECK(code_of([&] { matrix_to_involution(corner); }) == ErrorCode::forbidden_corner);
    BlockPermutationMatrix cycle{{3}, {1, 2, 0}};
    CHECK(code_of([&] { matrix_to_involution(cycle); }) == ErrorCode::not_involution);
    BlockPermutationMatrix twice{{3}, {0, 0, 2}};
    CHECK(code_of([&] { matrix_to_involution(twice); }) == ErrorCode::not_permutation_matrix);
    BlockPermutationMatrix hole{{3}, {0, -1, 2}};
    CHECK(code_of([&] { matrix_to_involution(hole); }) == ErrorCode::not_permutation_matrix);
}

TEST_CASE("random matrices against a dense oracle")
{
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<int> order(1, 6);
    for (int k = 0; k < 1000; ++k)
    {
        SymmetricIntMatrix a = random_symmetric(rng, order(rng), 5);
        bool empty = true;
        for (int i = 0; i < a.order; ++i)
        {
            empty = empty && a.row_sum(i) == 0;
        }
        if (empty)
        {
            continue;
        }
        BlockPermutationMatrix b = discretize_matrix(a);
        check_invariants(a, b);
        BlockPermutationMatrix d = double_matrix(b);
        Involution s = matrix_to_involution(d);
        for (int i = 1; i <= s.size(); ++i)
        {
            CHECK(s(s(i)) == i);
        }
        CHECK(s(1) != s.size());
    }
}

TEST_CASE("approximation examples")
{
    InvolutionApproximation a = approximate_by_involution(nu_zero(2), 1000);
    CHECK(a.sigma.one_based() == std::vector<int>{3, 4, 1, 2});
    CHECK(a.error == 0);
    CHECK(a.denominator == 1);

    for (int n : {2, 3, 5})
    {
        InvolutionApproximation s = approximate_by_involution(nu_star(n), 1000);
        for (int i = 1; i <= s.sigma.size(); ++i)
        {
            CHECK(s.sigma.fixes(i));
        }
        CHECK(s.sigma.size() == 4 * s.denominator);
        CHECK(s.error < 1e-15);
    }

    MeasureGrid bad = nu_star(3);
    bad.at(0, 1) += 0.1;
    CHECK(code_of([&] { approximate_by_involution(bad, 1000); }) == ErrorCode::not_normalized);

    // Irrational masses need a large denominator at fine windows
    MeasureGrid g = mixture_like(nu_star(4), nu_zero(4), 1 / std::sqrt(2.0));
    CHECK(code_of([&] { approximate_by_involution(g, 10); }) == ErrorCode::denominator_overflow);
    InvolutionApproximation ok = approximate_by_involution(g, 1'000'000);
    CHECK(ok.error < std::pow(4.0, -3));
}

TEST_CASE("round trip through nu_sigma")
{
    std::mt19937_64 rng(12);
    for (int k = 0; k < 100; ++k)
    {
        int n = 2 + k % 4;
        MeasureGrid g = random_measure(rng, n, 3);
        REQUIRE(check_measure(g).passes(1e-12));
        InvolutionApproximation a = approximate_by_involution(g, 1'000'000);
        CHECK(a.error < std::pow(double(n), -3) + 1e-9);
        CHECK(a.sigma.size() == 4 * a.denominator);
        CHECK(a.sigma(1) != a.sigma.size());
        // sigma acts on a multiple of n cells, so resampling at n is exact
        MeasureGrid back = nu_sigma_resampled(a.sigma, n);
        double worst = 0;
        for (std::size_t c = 0; c < g.masses.size(); ++c)
        {
            worst = std::max(worst, std::abs(back.masses[c] - g.masses[c]));
            CHECK(std::abs(back.masses[c] - a.grid.masses[c]) < 1e-12);
        }
        CHECK(worst <= a.error + 1e-12);
    }
}
}
