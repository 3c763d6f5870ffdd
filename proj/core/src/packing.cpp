#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "retroscatter/cavity.hpp"
#include "retroscatter/error.hpp"

namespace retroscatter
{
namespace
{
bool trapezium_fits(double k, double half_base, double delta)
{
    double slope = std::tan(delta);
    double h = k * trapezium_height();
    double top = k * delta + h / slope;
    // Triangle over [-half_base, half_base] with base angles delta
    auto inside = [&](double x, double y) {
        return y >= 0 && y <= slope * (x + half_base) && y <= slope * (half_base - x);
    };
    return inside(-k * delta, 0) && inside(k * delta, 0) && inside(top, h)
           && inside(-top, h);
}

struct PlacedSlot
{
    double center;
    double ratio;
};

}  // namespace

double trapezium_fit_ratio(double base_length, double delta)
{
    if (!(base_length > 0) || !(delta > 0) || !(delta < half_pi))
    {
        fail(ErrorCode::invalid_argument, "fit ratio needs base > 0 and 0 < delta < pi/2");
    }
    double half = 0.5 * base_length;
    if (trapezium_fits(1.0, half, delta))
    {
        return 1.0;
    }
    double lo = 0;
    double hi = 1;
    while (hi - lo > 1e-13 * hi)
    {
        double mid = 0.5 * (lo + hi);
        (trapezium_fits(mid, half, delta) ? lo : hi) = mid;
    }
    return lo;
}

ChordPacking plan_chord_packing(double chord_length,
                                double delta,
                                CavityOptions const& options)
{
    ChordPacking plan;
    plan.chord_length = chord_length;
    double uncovered = chord_length;
    double base = chord_length;
    std::size_t reflectors = 0;
    for (int level = 0;; ++level)
    {
        plan.uncovered.push_back(uncovered);
        std::size_t count = std::size_t(1) << std::min(level, 62);
        reflectors += count;
        if (level > 62 || reflectors > options.max_reflectors_per_chord)
        {
            // Estimate the depth for the message: |J| shrinks by 1 - rho per level.
            double rho = plan.ratios.empty() ? 0 : 1 - plan.uncovered.back()
                                                           / plan.uncovered[plan.uncovered.size() - 2];
            double needed = rho > 0 ? std::log(chord_length / options.uncovered_budget)
                                          / -std::log1p(-rho)
                                    : std::numeric_limits<double>::infinity();
            fail(ErrorCode::packing_failure,
                 "covering a chord of length " + std::to_string(chord_length)
                     + " to uncovered length < " + std::to_string(options.uncovered_budget)
                     + " needs about " + std::to_string(needed)
                     + " packing levels; the cap is " + std::to_string(options.max_reflectors_per_chord)
                     + " reflectors per chord");
        }
        double k = trapezium_fit_ratio(base, delta);
        if (!(k > 0))
        {
            fail(ErrorCode::packing_failure, "no admissible trapezium ratio at level "
                                                 + std::to_string(level));
        }
        plan.ratios.push_back(k);
        base = 0.5 * (base - 2 * k * delta);
        double next = 2.0 * static_cast<double>(count) * base;
        bool done = uncovered < options.uncovered_budget;
        uncovered = next;
        if (done)
        {
            plan.uncovered.push_back(uncovered);
            plan.levels = level + 1;
            return plan;
        }
    }
}

ReflectorCavity build_reflector_cavity(Involution const& sigma,
                                       double r,
                                       double delta,
                                       CavityOptions const& options)
{
    int m = sigma.size();
    if (!(r > 1))
    {
        fail(ErrorCode::invalid_argument, "cavity radius must exceed 1");
    }
    if (!(delta > 0) || !(delta < half_pi))
    {
        fail(ErrorCode::invalid_argument, "cavity requires 0 < delta < pi/2");
    }

    std::vector<double> th(m + 1);
    std::vector<Vec2> corner(m + 1);
    for (int i = 0; i <= m; ++i)
    {
        th[i] = theta(i, m);
        corner[i] = r * e_phi(th[i]);
    }
    corner[0] = {-r, 0};
    corner[m] = {r, 0};

    // Plan every chord first so infeasible requests fail before any geometry
    ReflectorCavity result{Cavity(make_half_disc(r)), {}, {}, {}};
    std::vector<std::optional<ChordPacking>> plans(m + 1);
    for (int i = 1; i <= m; ++i)
    {
        if (!sigma.fixes(i))
        {
            ChordPacking plan
                = plan_chord_packing(distance(corner[i - 1], corner[i]), delta, options);
            plan.cell = i;
            plan.partner = sigma(i);
            plans[i] = plan;
            result.chords.push_back(plan);
        }
    }

    std::vector<BoundaryArc> arcs;
    arcs.push_back(Segment{{-0.5, 0}, {0.5, 0}});
    arcs.push_back(Segment{{0.5, 0}, corner[m]});

    std::optional<CircleArc> open_rim;
    auto flush_rim = [&] {
        if (open_rim)
        {
            arcs.push_back(*open_rim);
            open_rim.reset();
        }
    };
    auto push_segment = [&](Vec2 a, Vec2 b) {
        if (distance(a, b) > 1e-14 * r)
        {
            arcs.push_back(Segment{a, b});
        }
    };

    for (int i = m; i >= 1; --i)
    {
        if (sigma.fixes(i))
        {
            double begin = half_pi - th[i];
            double end = half_pi - th[i - 1];
            if (open_rim)
            {
                open_rim->angle_end = end;
            }
            else
            {
                open_rim = CircleArc{{0, 0}, r, begin, end};
            }
            continue;
        }
        flush_rim();

        ChordPacking const& plan = *plans[i];
        int j = sigma(i);
        Vec2 p0 = corner[i - 1];
        Vec2 dir = (corner[i] - p0) / plan.chord_length;
        double mid_angle = 0.5 * (th[i - 1] + th[i]);
        Vec2 outer = e_phi(mid_angle);
        Vec2 q0 = corner[j - 1];
        Vec2 q1 = corner[j];
        double sin_lo = -1.0 + 2.0 * (i - 1) / m;
        double sin_hi_j = -1.0 + 2.0 * j / m;

        // Centers and ratios of the recursive triangle packing
        std::vector<PlacedSlot> slots;
        std::vector<std::pair<double, double>> intervals{{0.0, plan.chord_length}};
        for (int level = 0; level < plan.levels; ++level)
        {
            double k = plan.ratios[level];
            std::vector<std::pair<double, double>> children;
            children.reserve(2 * intervals.size());
            for (auto [lo, hi] : intervals)
            {
                double c = 0.5 * (lo + hi);
                slots.push_back({c, k});
                children.emplace_back(lo, c - k * delta);
                children.emplace_back(c + k * delta, hi);
            }
            intervals = std::move(children);
        }
        std::sort(slots.begin(), slots.end(),
                  [](PlacedSlot const& a, PlacedSlot const& b) { return a.center > b.center; });

        Vec2 cursor = corner[i];
        for (auto const& slot : slots)
        {
            Vec2 x = p0 + slot.center * dir;
            double th_x = std::atan2(x.x, x.y);
            double sin_target = sin_hi_j - (std::sin(th_x) - sin_lo);
            Vec2 aim = e_phi(std::asin(std::clamp(sin_target, -1.0, 1.0)));
            Vec2 edge = q1 - q0;
            Vec2 x_prime = (cross(q0, edge) / cross(aim, edge)) * aim;
            double phi1 = th_x - mid_angle;
            double phi2 = clockwise_angle(outer, x - x_prime);

            Reflector refl = make_reflector(phi1, phi2, delta, slot.ratio,
                                            Isometry(-mid_angle, x));
            Segment const& base = refl.base();
            push_segment(cursor, base.b);
            for (std::size_t k = 1; k < refl.boundary.size(); ++k)
            {
                arcs.push_back(refl.boundary[k]);
            }
            cursor = base.a;
            result.reflectors.push_back(std::move(refl));
            result.reflector_cell.push_back(i);
        }
        push_segment(cursor, p0);
    }
    flush_rim();
    arcs.push_back(Segment{corner[0], {-0.5, 0}});

    CavityConstruction c;
    c.kind = sigma.zero_based() == Involution::identity(m).zero_based()
                 ? CavityConstruction::Kind::half_disc
                 : CavityConstruction::Kind::reflector_cavity;
    c.sigma = sigma.one_based();
    c.r = r;
    c.delta = delta;
    result.cavity = Cavity(std::move(arcs), 0, c);
    return result;
}

Cavity build_cavity(Involution const& sigma,
                    double r,
                    double delta,
                    CavityOptions const& options)
{
    return build_reflector_cavity(sigma, r, delta, options).cavity;
}

}  // namespace retroscatter
