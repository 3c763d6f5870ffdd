#include "retroscatter/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "retroscatter/error.hpp"

namespace retroscatter
{
namespace
{
ScatterRecord trace_impl(Cavity const& cavity,
                         double xi,
                         double phi,
                         int max_bounces,
                         std::vector<ParticleState>* path)
{
    double a = cavity.entry_half_length();
    if (!(std::abs(xi) < a))
    {
        fail(ErrorCode::invalid_argument, "entry coordinate must be interior to I");
    }
    if (!(std::abs(phi) < half_pi))
    {
        fail(ErrorCode::angle_out_of_range, "entry angle must lie in (-pi/2, pi/2)");
    }
    if (max_bounces < 2)
    {
        fail(ErrorCode::invalid_argument, "max_bounces must be at least 2");
    }
    Vec2 mid = cavity.entry_midpoint();
    Vec2 t = cavity.entry_tangent();
    Vec2 n = perp(t);

    ScatterRecord rec;
    rec.xi = xi;
    rec.phi = phi;
    Vec2 p = mid + xi * t;
    Vec2 v = std::sin(phi) * t + std::cos(phi) * n;
    std::size_t from = cavity.entry_index();
    if (path)
    {
        path->push_back({p, v});
    }
    for (int bounce = 1; bounce <= max_bounces; ++bounce)
    {
        auto hit = cavity.first_hit(p, v, from);
        if (!hit || hit->singular)
        {
            rec.status = ScatterStatus::singular_hit;
            rec.bounces = bounce;
            return rec;
        }
        if (path)
        {
            path->push_back({hit->point, v});
        }
        if (hit->arc == cavity.entry_index())
        {
            rec.xi_plus = dot(hit->point - mid, t);
            rec.phi_plus = std::atan2(-dot(v, t), -dot(v, n));
            rec.bounces = bounce;
            rec.status = ScatterStatus::ok;
            return rec;
        }
        Vec2 normal = cavity.boundary()[hit->arc].interior_normal(hit->param);
        v = normalized(reflect(v, normal));
        p = hit->point;
        from = hit->arc;
    }
    rec.status = ScatterStatus::max_bounces;
    rec.bounces = max_bounces;
    return rec;
}

ParabolaArc unbounded(ParabolaArc p)
{
    p.w_begin = -std::numeric_limits<double>::infinity();
    p.w_end = std::numeric_limits<double>::infinity();
    return p;
}

}  // namespace

const char* to_string(ScatterStatus s)
{
    switch (s)
    {
        case ScatterStatus::ok: return "ok";
        case ScatterStatus::max_bounces: return "max_bounces";
        case ScatterStatus::singular_hit: return "singular_hit";
    }
    return "unknown";
}

ScatterRecord trace_return(Cavity const& cavity, double xi, double phi, int max_bounces)
{
    return trace_impl(cavity, xi, phi, max_bounces, nullptr);
}

ScatterRecord trace_return_path(Cavity const& cavity,
                                double xi,
                                double phi,
                                int max_bounces,
                                std::vector<ParticleState>& path)
{
    path.clear();
    return trace_impl(cavity, xi, phi, max_bounces, &path);
}

MeasureGrid empirical_measure(std::span<ScatterRecord const> records,
                              int m_bins,
                              std::uint64_t seed)
{
    std::vector<AnglePair> pairs;
    pairs.reserve(records.size());
    for (auto const& r : records)
    {
        if (r.status == ScatterStatus::ok)
        {
            pairs.push_back({r.phi, r.phi_plus});
        }
    }
    return empirical_measure(std::span<AnglePair const>(pairs), m_bins, seed);
}

std::string records_csv(std::span<ScatterRecord const> records)
{
    std::string out = "xi,phi,xi_plus,phi_plus,n,status\n";
    out.reserve(out.size() + records.size() * 96);
    char line[160];
    for (auto const& r : records)
    {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%d,%s\n", r.xi, r.phi,
                      r.xi_plus, r.phi_plus, r.bounces, to_string(r.status));
        out += line;
    }
    return out;
}

//---------------------------------------------------------------------------//
// Reflector checks
//---------------------------------------------------------------------------//

std::pair<double, double> two_bounce_map(Reflector const& r, double xi, double phi)
{
    // Full parabolas p1 (axis d) and p2 (axis -d) in the local frame
    std::optional<BoundaryArc> p1;
    std::optional<BoundaryArc> p2;
    Similarity to_local = r.similarity().inverse();
    Vec2 d = normalized(to_local.apply_vector(r.axis));
    for (auto const& arc : r.boundary)
    {
        if (arc.kind() != BoundaryArc::Kind::parabola)
        {
            continue;
        }
        BoundaryArc local = arc.transformed(to_local);
        BoundaryArc full = unbounded(local.parabola());
        (dot(local.parabola().axis, d) > 0 ? p1 : p2) = full;
    }
    if (!p1 || !p2)
    {
        fail(ErrorCode::not_in_a, "reflector lacks one of its parabolas");
    }
    BoundaryArc base = Segment{{-1e6, 0}, {1e6, 0}};
    std::array<BoundaryArc const*, 3> surfaces{&*p1, &*p2, &base};

    Vec2 p{xi, 0};
    Vec2 v = e_phi(phi);
    int from = 2;
    for (int expected = 0; expected < 3; ++expected)
    {
        int best = -1;
        double best_t = std::numeric_limits<double>::infinity();
        double best_param = 0;
        for (int s = 0; s < 3; ++s)
        {
            auto h = s == from ? intersect_ray_from_arc(*surfaces[s], p, v)
                               : intersect_ray(*surfaces[s], p, v, 0);
            if (h && h->t < best_t)
            {
                best = s;
                best_t = h->t;
                best_param = h->param;
            }
        }
        if (best != expected)
        {
            fail(ErrorCode::not_in_a, "reflection order differs from p1, p2, base");
        }
        Vec2 q = surfaces[best]->point(best_param);
        if (best == 2)
        {
            return {q.x, std::atan2(-v.x, -v.y)};
        }
        v = normalized(reflect(v, surfaces[best]->interior_normal(best_param)));
        p = q;
        from = best;
    }
    fail(ErrorCode::not_in_a, "particle did not return to the base line");
}

TwoBounceDerivatives two_bounce_derivatives(double phi1, double phi2, double h)
{
    if (!(h > 0))
    {
        fail(ErrorCode::invalid_argument, "finite-difference step must be positive");
    }
    Reflector r = make_reflector(phi1, phi2, 0.0);
    TwoBounceDerivatives out;
    double up = two_bounce_map(r, 0, phi1 + h).second;
    double down = two_bounce_map(r, 0, phi1 - h).second;
    out.dphi_plus_dphi = (up - down) / (2 * h);
    double right = two_bounce_map(r, h, phi1).first;
    double left = two_bounce_map(r, -h, phi1).first;
    out.dxi_plus_dxi = (right - left) / (2 * h);
    out.expected_dphi = -std::cos(phi1) / std::cos(phi2);
    return out;
}

double empirical_c0(Reflector const& r, double base_fraction, int grid)
{
    if (!(base_fraction > 0) || !(base_fraction < 1) || grid < 2)
    {
        fail(ErrorCode::invalid_argument, "c0 search needs 0 < fraction < 1 and grid >= 2");
    }
    Cavity cavity = reflector_cavity(r);
    double half = base_fraction * cavity.entry_half_length();
    auto all_three = [&](double w) {
        for (int k = 0; k < grid; ++k)
        {
            double xi = half * (2.0 * k / (grid - 1) - 1);
            for (int l = 0; l < grid; ++l)
            {
                double phi = r.phi1 + w * (2.0 * l / (grid - 1) - 1);
                ScatterRecord rec = trace_return(cavity, xi, phi, 16);
                if (rec.status != ScatterStatus::ok || rec.bounces != 3)
                {
                    return false;
                }
            }
        }
        return true;
    };
    double hi = half_pi - std::abs(r.phi1) - 1e-6;
    if (all_three(hi))
    {
        return hi;
    }
    if (!all_three(0))
    {
        return 0;
    }
    double lo = 0;
    for (int it = 0; it < 40; ++it)
    {
        double mid = 0.5 * (lo + hi);
        (all_three(mid) ? lo : hi) = mid;
    }
    return lo;
}

ThreeBounceReport three_bounce_sweep(Reflector const& r,
                                     double window,
                                     std::uint64_t count,
                                     std::uint64_t seed,
                                     double base_fraction)
{
    if (!(window >= 0) || !(base_fraction > 0) || !(base_fraction < 1))
    {
        fail(ErrorCode::invalid_argument, "sweep needs window >= 0 and 0 < fraction < 1");
    }
    Cavity cavity = reflector_cavity(r);
    double half = base_fraction * cavity.entry_half_length();
    double ratio = std::cos(r.phi1) / std::cos(r.phi2);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ThreeBounceReport out;
    for (std::uint64_t k = 0; k < count; ++k)
    {
        double xi = half * unit(rng);
        double phi = std::clamp(r.phi1 + window * unit(rng), -half_pi + 1e-9, half_pi - 1e-9);
        ScatterRecord rec = trace_return(cavity, xi, phi, 16);
        ++out.traced;
        if (rec.status == ScatterStatus::ok && rec.bounces == 3)
        {
            ++out.three;
            double res = std::abs(rec.phi_plus - r.phi2 + ratio * (phi - r.phi1));
            out.max_residual = std::max(out.max_residual, res);
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
// Bodies
//---------------------------------------------------------------------------//

Ensemble scatter_body(PolygonBody const& body,
                      SamplingScheme const& scheme,
                      EnsembleOptions const& options)
{
    if (scheme.count < 1)
    {
        fail(ErrorCode::invalid_argument, "sampling needs at least one sample");
    }
    std::size_t m = body.k0.size();
    std::vector<double> cumulative(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
    {
        cumulative[i + 1] = cumulative[i] + body.k0.side_length(i);
    }
    double perimeter = cumulative[m];
    double half = 0.5 * perimeter;
    SampleSource source(scheme, half);

    Ensemble e;
    e.records.resize(scheme.count);
    parallel_for(source.block_count(), options.workers, [&](std::uint64_t b) {
        auto samples = source.block(b);
        std::uint64_t base = b * SampleSource::block_size;
        for (std::size_t k = 0; k < samples.size(); ++k)
        {
            auto [xi, phi] = samples[k];
            double arc = xi + half;
            auto it = std::upper_bound(cumulative.begin(), cumulative.end(), arc);
            std::size_t side = std::min<std::size_t>(
                static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative.begin() - 1, 0)),
                m - 1);
            double u = arc - cumulative[side];

            ScatterRecord rec;
            rec.xi = xi;
            rec.phi = phi;
            if (Carving const* c = body.carving_at(static_cast<int>(side), u))
            {
                double local = (u - c->center) / c->scale;
                ScatterRecord inner = trace_return(body.prototype, local, phi, options.max_bounces);
                rec.xi_plus = cumulative[side] + c->center + c->scale * inner.xi_plus - half;
                rec.phi_plus = inner.phi_plus;
                rec.bounces = inner.bounces;
                rec.status = inner.status;
            }
            else
            {
                rec.xi_plus = xi;
                rec.phi_plus = -phi;
                rec.bounces = 1;
            }
            e.records[base + k] = rec;
        }
    });
    e.summary = summarize(e.records);
    return e;
}

}  // namespace retroscatter
