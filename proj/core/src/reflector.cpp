#include <algorithm>
#include <string>

#include "retroscatter/error.hpp"
#include "retroscatter/geom.hpp"
#include "numeric.hpp"

namespace retroscatter
{
namespace
{
//! Boundary curve of one convex constraint: a line n.x + c >= 0 or the
//! inside of a parabola |x - F| <= (x - F, d) + l.
struct Constraint
{
    bool is_line = true;
    Vec2 normal;
    double offset = 0;
    Vec2 focus;
    Vec2 axis;
    double semi_latus = 0;

    double value(Vec2 p) const
    {
        if (is_line)
        {
            return dot(normal, p) + offset;
        }
        Vec2 r = p - focus;
        return semi_latus + dot(r, axis) - norm(r);
    }

    //! Distance from an interior point along u to the curve.
    double exit_distance(Vec2 p, Vec2 u) const
    {
        double inf = std::numeric_limits<double>::infinity();
        if (is_line)
        {
            double s = dot(normal, u);
            return s < 0 ? -(dot(normal, p) + offset) / s : inf;
        }
        Vec2 side = perp(axis);
        Vec2 r = p - focus;
        double x0 = dot(r, axis);
        double w0 = dot(r, side);
        double ux = dot(u, axis);
        double uw = dot(u, side);
        auto roots = solve_quadratic(
            uw * uw, 2 * (w0 * uw - semi_latus * ux),
            w0 * w0 - 2 * semi_latus * x0 - semi_latus * semi_latus);
        double best = inf;
        for (int i = 0; i < roots.count; ++i)
        {
            if (roots.values[i] > 0)
            {
                best = std::min(best, roots.values[i]);
            }
        }
        return best;
    }

    double lateral(Vec2 p) const { return dot(p - focus, perp(axis)); }
};

Constraint line(Vec2 normal, double offset)
{
    Constraint c;
    c.normal = normal;
    c.offset = offset;
    return c;
}

Constraint parabola(Vec2 focus, Vec2 axis, double semi_latus)
{
    Constraint c;
    c.is_line = false;
    c.focus = focus;
    c.axis = axis;
    c.semi_latus = semi_latus;
    return c;
}

void intersect(Constraint const& a, Constraint const& b, std::vector<Vec2>& out)
{
    if (a.is_line && b.is_line)
    {
        double det = cross(a.normal, b.normal);
        if (std::abs(det) < 1e-14)
        {
            return;
        }
        // Solve n_a.x = -c_a, n_b.x = -c_b
        out.push_back(Vec2{-a.offset * b.normal.y + b.offset * a.normal.y,
                           -b.offset * a.normal.x + a.offset * b.normal.x}
                      / det);
        return;
    }
    if (!a.is_line && b.is_line)
    {
        intersect(b, a, out);
        return;
    }
    if (a.is_line)
    {
        Vec2 side = perp(b.axis);
        double l = b.semi_latus;
        double nd = dot(a.normal, b.axis);
        auto roots = solve_quadratic(nd / (2 * l),
                                     dot(a.normal, side),
                                     dot(a.normal, b.focus) + a.offset
                                         - 0.5 * nd * l);
        for (int i = 0; i < roots.count; ++i)
        {
            double w = roots.values[i];
            out.push_back(b.focus + ((w * w - l * l) / (2 * l)) * b.axis
                          + w * side);
        }
        return;
    }
    // Confocal parabolas with opposite axes: |x| = (x, d) + l1 = -(x, d) + l2
    Vec2 d = a.axis;
    double along = 0.5 * (b.semi_latus - a.semi_latus);
    double radius = 0.5 * (a.semi_latus + b.semi_latus);
    double s2 = radius * radius - along * along;
    if (s2 < 0)
    {
        return;
    }
    double s = std::sqrt(s2);
    out.push_back(a.focus + along * d + s * perp(d));
    out.push_back(a.focus + along * d - s * perp(d));
}

}  // namespace

Reflector make_reflector(double phi1,
                         double phi2,
                         double delta,
                         double scale,
                         Isometry const& placement)
{
    if (!(std::abs(phi1) < half_pi) || !(std::abs(phi2) < half_pi))
    {
        fail(ErrorCode::angle_out_of_range,
             "reflector angles must lie in (-pi/2, pi/2)");
    }
    if (std::abs(phi1 - phi2) < 1e-12)
    {
        fail(ErrorCode::degenerate_angles, "reflector requires phi1 != phi2");
    }
    if (!(delta >= 0) || !(delta < half_pi))
    {
        fail(ErrorCode::invalid_argument, "reflector requires 0 <= delta < pi/2");
    }
    if (!(scale > 0))
    {
        fail(ErrorCode::invalid_argument, "reflector requires scale > 0");
    }

    Vec2 x1 = reflector_focal_point(phi1);
    Vec2 x2 = reflector_focal_point(phi2);
    Vec2 d = normalized(x2 - x1);
    Vec2 origin{0, 0};

    enum
    {
        base_id = 0
    };
    std::vector<Constraint> constraints;
    constraints.push_back(line({0, 1}, 0));
    if (delta > 0)
    {
        double shift = delta * std::sin(delta);
        constraints.push_back(line(e_phi(-delta), shift));
        constraints.push_back(line(e_phi(delta), shift));
    }
    constraints.push_back(parabola(origin, d, norm(x1) - dot(x1, d)));
    constraints.push_back(parabola(origin, -d, norm(x2) + dot(x2, d)));

    // Vertices of the convex region
    std::vector<Vec2> candidates;
    for (std::size_t i = 0; i < constraints.size(); ++i)
    {
        for (std::size_t j = i + 1; j < constraints.size(); ++j)
        {
            intersect(constraints[i], constraints[j], candidates);
        }
    }
    constexpr double tol = 1e-10;
    std::vector<Vec2> vertices;
    for (Vec2 p : candidates)
    {
        bool feasible = std::all_of(
            constraints.begin(), constraints.end(),
            [&](Constraint const& c) { return c.value(p) >= -tol; });
        bool duplicate = std::any_of(vertices.begin(), vertices.end(),
                                     [&](Vec2 q) { return distance(p, q) < tol; });
        if (feasible && !duplicate)
        {
            vertices.push_back(p);
        }
    }
    if (vertices.size() < 3)
    {
        fail(ErrorCode::invalid_argument, "reflector region is degenerate");
    }

    Vec2 inner = (origin + x1 + x2) / 3.0;
    auto angle_of = [&](Vec2 p) { return std::atan2(p.y - inner.y, p.x - inner.x); };
    std::sort(vertices.begin(), vertices.end(),
              [&](Vec2 a, Vec2 b) { return angle_of(a) < angle_of(b); });

    std::vector<BoundaryArc> local;
    std::size_t base_index = 0;
    bool found_base = false;
    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        Vec2 a = vertices[i];
        Vec2 b = vertices[(i + 1) % vertices.size()];
        double ta = angle_of(a);
        double tb = angle_of(b);
        if (tb <= ta)
        {
            tb += 2 * pi;
        }
        double mid = 0.5 * (ta + tb);
        Vec2 u{std::cos(mid), std::sin(mid)};
        std::size_t active = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < constraints.size(); ++c)
        {
            double t = constraints[c].exit_distance(inner, u);
            if (t < best)
            {
                best = t;
                active = c;
            }
        }
        Constraint const& c = constraints[active];
        if (c.is_line)
        {
            if (active == base_id)
            {
                base_index = local.size();
                found_base = true;
            }
            local.push_back(Segment{a, b});
        }
        else
        {
            ParabolaArc arc;
            arc.focus = c.focus;
            arc.axis = c.axis;
            arc.semi_latus = c.semi_latus;
            arc.w_begin = c.lateral(a);
            arc.w_end = c.lateral(b);
            local.push_back(arc);
        }
    }
    if (!found_base)
    {
        fail(ErrorCode::invalid_argument, "reflector region has no base");
    }
    std::rotate(local.begin(), local.begin() + base_index, local.end());

    Reflector r;
    r.phi1 = phi1;
    r.phi2 = phi2;
    r.delta = delta;
    r.scale = scale;
    r.placement = placement;
    Similarity sim{scale, placement};
    r.boundary.reserve(local.size());
    for (auto const& arc : local)
    {
        r.boundary.push_back(arc.transformed(sim));
    }
    r.base_index = 0;
    r.center = sim(origin);
    r.focal_points = {sim(x1), sim(x2)};
    r.axis = normalized(sim.apply_vector(d));
    return r;
}

}  // namespace retroscatter
