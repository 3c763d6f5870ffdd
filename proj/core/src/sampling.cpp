#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "retroscatter/billiard.hpp"
#include "retroscatter/error.hpp"
#include "numeric.hpp"

namespace retroscatter
{
namespace
{
// Uniform on the open interval (0, 1) from the top 53 bits.
double open_unit(std::uint64_t bits)
{
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

SampleSource::SampleSource(SamplingScheme const& scheme, double half_length)
    : scheme_(scheme), half_length_(half_length)
{
    if (scheme.generator == SamplingScheme::Generator::stratified && scheme.count > 0)
    {
        strata_xi_ = static_cast<std::uint64_t>(
            std::ceil(std::sqrt(static_cast<double>(scheme.count))));
        strata_s_ = (scheme.count + strata_xi_ - 1) / strata_xi_;
    }
}

std::vector<std::pair<double, double>> SampleSource::block(std::uint64_t b) const
{
    std::uint64_t begin = b * block_size;
    std::uint64_t end = std::min<std::uint64_t>(scheme_.count, begin + block_size);
    std::vector<std::pair<double, double>> out;
    if (begin >= end)
    {
        return out;
    }
    out.reserve(end - begin);
    std::mt19937_64 rng(splitmix64(scheme_.seed ^ splitmix64(b)));
    for (std::uint64_t i = begin; i < end; ++i)
    {
        double u = open_unit(rng());
        double v = open_unit(rng());
        if (scheme_.generator == SamplingScheme::Generator::stratified)
        {
            double ix = static_cast<double>(i % strata_xi_);
            double is = static_cast<double>(i / strata_xi_);
            u = (ix + u) / static_cast<double>(strata_xi_);
            v = (is + v) / static_cast<double>(strata_s_);
        }
        double xi = half_length_ * (2 * u - 1);
        double phi = std::asin(2 * v - 1);
        out.emplace_back(xi, phi);
    }
    return out;
}

std::uint64_t SampleSource::block_count() const
{
    return (scheme_.count + block_size - 1) / block_size;
}

void parallel_for(std::uint64_t count,
                  unsigned workers,
                  std::function<void(std::uint64_t)> const& job)
{
    if (workers == 0)
    {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    if (workers <= 1)
    {
        for (std::uint64_t i = 0; i < count; ++i)
        {
            job(i);
        }
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
    {
        pool.emplace_back([&] {
            for (std::uint64_t i = next++; i < count; i = next++)
            {
                job(i);
            }
        });
    }
    for (auto& t : pool)
    {
        t.join();
    }
}

Ensemble scatter_ensemble(Cavity const& cavity,
                          SamplingScheme const& scheme,
                          EnsembleOptions const& options)
{
    if (scheme.count < 1)
    {
        fail(ErrorCode::invalid_argument, "sampling needs at least one sample");
    }
    // Keep samples strictly inside I
    double half = cavity.entry_half_length() * (1 - 1e-12);
    SampleSource source(scheme, half);
    Ensemble e;
    e.records.resize(scheme.count);
    parallel_for(source.block_count(), options.workers, [&](std::uint64_t b) {
        auto samples = source.block(b);
        std::uint64_t base = b * SampleSource::block_size;
        for (std::size_t k = 0; k < samples.size(); ++k)
        {
            e.records[base + k] = trace_return(cavity, samples[k].first,
                                               samples[k].second, options.max_bounces);
        }
    });
    e.summary = summarize(e.records);
    return e;
}

EnsembleSummary summarize(std::span<ScatterRecord const> records)
{
    EnsembleSummary s;
    s.total = records.size();
    double bounces = 0;
    for (auto const& r : records)
    {
        switch (r.status)
        {
            case ScatterStatus::ok:
                ++s.ok;
                bounces += r.bounces;
                break;
            case ScatterStatus::max_bounces: ++s.max_bounces; break;
            case ScatterStatus::singular_hit: ++s.singular; break;
        }
    }
    s.mean_bounces = s.ok ? bounces / static_cast<double>(s.ok) : 0;
    return s;
}

}  // namespace retroscatter
