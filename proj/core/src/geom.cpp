#include "retroscatter/geom.hpp"

#include <algorithm>

#include "retroscatter/error.hpp"
#include "numeric.hpp"

namespace retroscatter
{
namespace
{
// Relative slack on arc parameter ranges so that hits exactly at a junction
// are reported (and then classified by the caller) instead of slipping
// through the gap between two arcs.
constexpr double range_slack = 1e-12;

bool in_range(double value, double a, double b)
{
    double lo = std::min(a, b);
    double hi = std::max(a, b);
    double slack = range_slack * std::max({1.0, std::abs(lo), std::abs(hi)});
    return value >= lo - slack && value <= hi + slack;
}

// Representative of angle plus a multiple of 2 pi inside [a, b] if any.
std::optional<double> angle_in_range(double angle, double a, double b)
{
    double lo = std::min(a, b);
    double hi = std::max(a, b);
    double slack = range_slack * std::max(1.0, std::abs(hi));
    double k = std::ceil((lo - slack - angle) / (2 * pi));
    double candidate = angle + k * 2 * pi;
    if (candidate <= hi + slack)
    {
        return candidate;
    }
    return std::nullopt;
}

Vec2 parabola_point(ParabolaArc const& p, double w)
{
    double l = p.semi_latus;
    return p.focus + ((w * w - l * l) / (2 * l)) * p.axis + w * perp(p.axis);
}

}  // namespace

//---------------------------------------------------------------------------//
// Isometry
//---------------------------------------------------------------------------//

Isometry::Isometry(double rotation, Vec2 translation, bool mirror)
    : rotation_(rotation)
    , translation_(translation)
    , mirror_(mirror)
    , cos_(std::cos(rotation))
    , sin_(std::sin(rotation))
{
}

Vec2 Isometry::apply_vector(Vec2 v) const
{
    if (mirror_)
    {
        v.y = -v.y;
    }
    return {cos_ * v.x - sin_ * v.y, sin_ * v.x + cos_ * v.y};
}

Isometry Isometry::inverse() const
{
    Isometry result(mirror_ ? rotation_ : -rotation_, {}, mirror_);
    result.translation_ = -result.apply_vector(translation_);
    return result;
}

Isometry Isometry::then(Isometry const& next) const
{
    double rotation = next.rotation_
                      + (next.mirror_ ? -rotation_ : rotation_);
    return Isometry(rotation, next(translation_), mirror_ != next.mirror_);
}

Similarity Similarity::inverse() const
{
    // p = iso^-1(q) / s
    Isometry inv = iso.inverse();
    Isometry shrunk(inv.rotation(), inv.translation() / scale, inv.mirror());
    return {1 / scale, shrunk};
}

//---------------------------------------------------------------------------//
// Box
//---------------------------------------------------------------------------//

void Box::expand(Vec2 p)
{
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
}

void Box::expand(Box const& b)
{
    this->expand(b.lo);
    this->expand(b.hi);
}

//---------------------------------------------------------------------------//
// BoundaryArc
//---------------------------------------------------------------------------//

double BoundaryArc::param_begin() const
{
    switch (this->kind())
    {
        case Kind::segment: return 0;
        case Kind::circle: return this->circle().angle_begin;
        case Kind::parabola: return this->parabola().w_begin;
    }
    return 0;
}

double BoundaryArc::param_end() const
{
    switch (this->kind())
    {
        case Kind::segment: return 1;
        case Kind::circle: return this->circle().angle_end;
        case Kind::parabola: return this->parabola().w_end;
    }
    return 1;
}

Vec2 BoundaryArc::point(double param) const
{
    switch (this->kind())
    {
        case Kind::segment: {
            auto const& s = this->segment();
            return s.a + param * (s.b - s.a);
        }
        case Kind::circle: {
            auto const& c = this->circle();
            return c.center
                   + c.radius * Vec2{std::cos(param), std::sin(param)};
        }
        case Kind::parabola: return parabola_point(this->parabola(), param);
    }
    return {};
}

Vec2 BoundaryArc::tangent(double param) const
{
    switch (this->kind())
    {
        case Kind::segment: {
            auto const& s = this->segment();
            return normalized(s.b - s.a);
        }
        case Kind::circle: {
            auto const& c = this->circle();
            double sign = c.angle_end >= c.angle_begin ? 1 : -1;
            return sign * Vec2{-std::sin(param), std::cos(param)};
        }
        case Kind::parabola: {
            auto const& p = this->parabola();
            double sign = p.w_end >= p.w_begin ? 1 : -1;
            Vec2 dp = (param / p.semi_latus) * p.axis + perp(p.axis);
            return sign * normalized(dp);
        }
    }
    return {};
}

std::pair<double, double> BoundaryArc::support(Vec2 u) const
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto consider = [&](Vec2 p) {
        double v = dot(p, u);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    consider(this->start());
    consider(this->end());
    switch (this->kind())
    {
        case Kind::segment: break;
        case Kind::circle: {
            auto const& c = this->circle();
            double alpha = std::atan2(u.y, u.x);
            for (double target : {alpha, alpha + pi})
            {
                if (auto a = angle_in_range(target, c.angle_begin, c.angle_end))
                {
                    consider(this->point(*a));
                }
            }
            break;
        }
        case Kind::parabola: {
            auto const& p = this->parabola();
            double du = dot(p.axis, u);
            if (du != 0)
            {
                double w = -p.semi_latus * dot(perp(p.axis), u) / du;
                if (in_range(w, p.w_begin, p.w_end))
                {
                    consider(this->point(w));
                }
            }
            break;
        }
    }
    return {lo, hi};
}

Box BoundaryArc::bounds() const
{
    auto [xlo, xhi] = this->support({1, 0});
    auto [ylo, yhi] = this->support({0, 1});
    Box b;
    b.lo = {xlo, ylo};
    b.hi = {xhi, yhi};
    return b;
}

double BoundaryArc::residual(Vec2 p) const
{
    switch (this->kind())
    {
        case Kind::segment: {
            auto const& s = this->segment();
            Vec2 d = s.b - s.a;
            return std::abs(cross(d, p - s.a)) / norm(d);
        }
        case Kind::circle: {
            auto const& c = this->circle();
            return std::abs(distance(p, c.center) - c.radius);
        }
        case Kind::parabola: {
            auto const& q = this->parabola();
            Vec2 r = p - q.focus;
            return std::abs(norm(r) - dot(r, q.axis) - q.semi_latus);
        }
    }
    return 0;
}

BoundaryArc BoundaryArc::transformed(Similarity const& s) const
{
    switch (this->kind())
    {
        case Kind::segment: {
            auto const& seg = this->segment();
            return Segment{s(seg.a), s(seg.b)};
        }
        case Kind::circle: {
            auto const& c = this->circle();
            double rot = s.iso.rotation();
            bool m = s.iso.mirror();
            CircleArc out;
            out.center = s(c.center);
            out.radius = s.scale * c.radius;
            out.angle_begin = m ? rot - c.angle_begin : rot + c.angle_begin;
            out.angle_end = m ? rot - c.angle_end : rot + c.angle_end;
            return out;
        }
        case Kind::parabola: {
            auto const& p = this->parabola();
            double sign = s.iso.mirror() ? -1 : 1;
            ParabolaArc out;
            out.focus = s(p.focus);
            out.axis = normalized(s.apply_vector(p.axis));
            out.semi_latus = s.scale * p.semi_latus;
            out.w_begin = sign * s.scale * p.w_begin;
            out.w_end = sign * s.scale * p.w_end;
            return out;
        }
    }
    return *this;
}

BoundaryArc BoundaryArc::reversed() const
{
    switch (this->kind())
    {
        case Kind::segment: {
            auto const& seg = this->segment();
            return Segment{seg.b, seg.a};
        }
        case Kind::circle: {
            CircleArc c = this->circle();
            std::swap(c.angle_begin, c.angle_end);
            return c;
        }
        case Kind::parabola: {
            ParabolaArc p = this->parabola();
            std::swap(p.w_begin, p.w_end);
            return p;
        }
    }
    return *this;
}

//---------------------------------------------------------------------------//
// Ray intersection
//---------------------------------------------------------------------------//

namespace
{
std::optional<RayHit> hit_segment(Segment const& s, Vec2 o, Vec2 v, double t_min)
{
    Vec2 e = s.b - s.a;
    double denom = cross(v, e);
    if (std::abs(denom) <= 1e-15 * norm(e))
    {
        return std::nullopt;
    }
    Vec2 w = s.a - o;
    double t = cross(w, e) / denom;
    double u = cross(w, v) / denom;
    if (t > t_min && u >= -range_slack && u <= 1 + range_slack)
    {
        return RayHit{t, std::clamp(u, 0.0, 1.0)};
    }
    return std::nullopt;
}

template<class Accept>
std::optional<RayHit> first_accepted(QuadraticRoots const& roots,
                                     double t_min,
                                     Accept&& accept)
{
    for (int i = 0; i < roots.count; ++i)
    {
        double t = roots.values[i];
        if (t > t_min)
        {
            if (auto param = accept(t))
            {
                return RayHit{t, *param};
            }
        }
    }
    return std::nullopt;
}

std::optional<RayHit>
hit_circle(CircleArc const& c, Vec2 o, Vec2 v, double t_min, bool on_arc)
{
    Vec2 r = o - c.center;
    double beta = dot(r, v);
    auto accept = [&](double t) -> std::optional<double> {
        Vec2 p = r + t * v;
        return angle_in_range(std::atan2(p.y, p.x), c.angle_begin, c.angle_end);
    };
    QuadraticRoots roots;
    if (on_arc)
    {
        roots.count = 1;
        roots.values[0] = -2 * beta;
    }
    else
    {
        roots = solve_quadratic(1, 2 * beta, dot(r, r) - c.radius * c.radius);
    }
    return first_accepted(roots, t_min, accept);
}

std::optional<RayHit>
hit_parabola(ParabolaArc const& p, Vec2 o, Vec2 v, double t_min, bool on_arc)
{
    Vec2 side = perp(p.axis);
    Vec2 r = o - p.focus;
    double l = p.semi_latus;
    double x0 = dot(r, p.axis);
    double w0 = dot(r, side);
    double vx = dot(v, p.axis);
    double vw = dot(v, side);
    // (w0 + t vw)^2 = 2 l (x0 + t vx) + l^2
    double a = vw * vw;
    double b = 2 * (w0 * vw - l * vx);
    auto accept = [&](double t) -> std::optional<double> {
        double w = w0 + t * vw;
        if (in_range(w, p.w_begin, p.w_end))
        {
            return w;
        }
        return std::nullopt;
    };
    QuadraticRoots roots;
    if (on_arc)
    {
        if (a > 0)
        {
            roots.count = 1;
            roots.values[0] = -b / a;
        }
    }
    else
    {
        roots = solve_quadratic(a, b, w0 * w0 - 2 * l * x0 - l * l);
    }
    return first_accepted(roots, t_min, accept);
}

}  // namespace

std::optional<RayHit>
intersect_ray(BoundaryArc const& arc, Vec2 origin, Vec2 dir, double t_min)
{
    switch (arc.kind())
    {
        case BoundaryArc::Kind::segment:
            return hit_segment(arc.segment(), origin, dir, t_min);
        case BoundaryArc::Kind::circle:
            return hit_circle(arc.circle(), origin, dir, t_min, false);
        case BoundaryArc::Kind::parabola:
            return hit_parabola(arc.parabola(), origin, dir, t_min, false);
    }
    return std::nullopt;
}

std::optional<RayHit>
intersect_ray_from_arc(BoundaryArc const& arc, Vec2 origin, Vec2 dir)
{
    switch (arc.kind())
    {
        case BoundaryArc::Kind::segment: return std::nullopt;
        case BoundaryArc::Kind::circle:
            return hit_circle(arc.circle(), origin, dir, 0, true);
        case BoundaryArc::Kind::parabola:
            return hit_parabola(arc.parabola(), origin, dir, 0, true);
    }
    return std::nullopt;
}

//---------------------------------------------------------------------------//
// Trapezium
//---------------------------------------------------------------------------//

bool Trapezium::contains(Vec2 p, double tol) const
{
    return std::all_of(constraints.begin(),
                       constraints.end(),
                       [&](HalfPlane const& h) { return h.contains(p, tol); });
}

std::vector<Vec2> Trapezium::vertices() const
{
    if (delta <= 0)
    {
        return {};
    }
    double h = trapezium_height();
    double top = delta + h / std::tan(delta);
    return {{-delta, 0}, {delta, 0}, {top, h}, {-top, h}};
}

Trapezium trapezium(double delta)
{
    if (!(delta >= 0))
    {
        fail(ErrorCode::invalid_argument, "trapezium requires delta >= 0");
    }
    double shift = delta * std::sin(delta);
    Trapezium t;
    t.delta = delta;
    t.constraints = {
        HalfPlane{{0, 1}, 0, false},
        HalfPlane{{0, -1}, trapezium_height(), true},
        HalfPlane{e_phi(-delta), shift, false},
        HalfPlane{e_phi(delta), shift, false},
    };
    return t;
}

}  // namespace retroscatter
