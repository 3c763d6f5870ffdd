#include "retroscatter/cavity.hpp"

#include <algorithm>
#include <string>

#include "retroscatter/error.hpp"
#include "bvh.hpp"

namespace retroscatter
{

const char* to_string(CavityConstruction::Kind kind)
{
    switch (kind)
    {
        case CavityConstruction::Kind::custom: return "custom";
        case CavityConstruction::Kind::half_disc: return "half-disc";
        case CavityConstruction::Kind::reflector: return "reflector";
        case CavityConstruction::Kind::reflector_cavity: return "reflector-cavity";
        case CavityConstruction::Kind::channel: return "channel";
    }
    return "unknown";
}

//---------------------------------------------------------------------------//
// Cavity
//---------------------------------------------------------------------------//

Cavity::Cavity(std::vector<BoundaryArc> boundary,
               std::size_t entry_index,
               CavityConstruction construction)
    : arcs_(std::move(boundary))
    , entry_(entry_index)
    , construction_(std::move(construction))
{
    if (arcs_.size() < 2)
    {
        fail(ErrorCode::invalid_argument, "cavity boundary needs at least two arcs");
    }
    if (entry_ >= arcs_.size()
        || arcs_[entry_].kind() != BoundaryArc::Kind::segment)
    {
        fail(ErrorCode::invalid_argument, "cavity entry must be a boundary segment");
    }
    std::vector<Box> boxes;
    boxes.reserve(arcs_.size());
    arc_scale_.reserve(arcs_.size());
    for (auto const& arc : arcs_)
    {
        Box b = arc.bounds();
        bounds_.expand(b);
        boxes.push_back(b);
        arc_scale_.push_back(b.diagonal());
    }
    scale_ = bounds_.diagonal();

    double tol = this->junction_tolerance();
    for (std::size_t k = 0; k < arcs_.size(); ++k)
    {
        Vec2 end = arcs_[k].end();
        Vec2 next = arcs_[(k + 1) % arcs_.size()].start();
        if (distance(end, next) > tol)
        {
            fail(ErrorCode::invalid_argument,
                 "cavity boundary is not closed after arc " + std::to_string(k));
        }
    }
    // The cavity lies on the interior side of the line through I
    Vec2 n = this->entry_normal();
    double level = dot(this->entry_midpoint(), n);
    for (std::size_t k = 0; k < arcs_.size(); ++k)
    {
        if (arcs_[k].support(n).first < level - tol)
        {
            fail(ErrorCode::invalid_argument,
                 "arc " + std::to_string(k) + " crosses the line through the entry");
        }
    }
    bvh_ = std::make_shared<Bvh const>(std::move(boxes));
}

Vec2 Cavity::entry_midpoint() const
{
    auto const& e = this->entry();
    return 0.5 * (e.a + e.b);
}

Vec2 Cavity::entry_tangent() const
{
    auto const& e = this->entry();
    return normalized(e.b - e.a);
}

double Cavity::entry_half_length() const
{
    auto const& e = this->entry();
    return 0.5 * distance(e.a, e.b);
}

BoundaryHit
Cavity::finish_hit(std::size_t arc, RayHit const& h, Vec2 o, Vec2 v) const
{
    (void)o;
    (void)v;
    BoundaryHit hit;
    hit.arc = arc;
    hit.t = h.t;
    hit.param = h.param;
    BoundaryArc const& a = arcs_[arc];
    hit.point = a.point(h.param);
    double tol = this->junction_tolerance();
    hit.singular = distance(hit.point, a.start()) < tol
                   || distance(hit.point, a.end()) < tol;
    return hit;
}

std::optional<BoundaryHit>
Cavity::first_hit(Vec2 origin, Vec2 dir, std::size_t from_arc) const
{
    std::size_t best_arc = no_arc;
    RayHit best;
    bvh_->traverse(origin, dir, std::numeric_limits<double>::infinity(),
                   [&](std::int32_t k, double t_max) {
                       std::size_t idx = static_cast<std::size_t>(k);
                       auto h = idx == from_arc
                                    ? intersect_ray_from_arc(arcs_[idx], origin, dir)
                                    : intersect_ray(arcs_[idx], origin, dir,
                                                    1e-9 * arc_scale_[idx]);
                       if (h && h->t < t_max)
                       {
                           best = *h;
                           best_arc = idx;
                           return h->t;
                       }
                       return t_max;
                   });
    if (best_arc == no_arc)
    {
        return std::nullopt;
    }
    return this->finish_hit(best_arc, best, origin, dir);
}

std::optional<BoundaryHit>
Cavity::first_hit_linear(Vec2 origin, Vec2 dir, std::size_t from_arc) const
{
    std::size_t best_arc = no_arc;
    RayHit best;
    best.t = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < arcs_.size(); ++k)
    {
        auto h = k == from_arc ? intersect_ray_from_arc(arcs_[k], origin, dir)
                               : intersect_ray(arcs_[k], origin, dir, 1e-9 * arc_scale_[k]);
        if (h && h->t < best.t)
        {
            best = *h;
            best_arc = k;
        }
    }
    if (best_arc == no_arc)
    {
        return std::nullopt;
    }
    return this->finish_hit(best_arc, best, origin, dir);
}

Cavity Cavity::transformed(Similarity const& s) const
{
    std::vector<BoundaryArc> arcs;
    arcs.reserve(arcs_.size());
    for (auto const& arc : arcs_)
    {
        arcs.push_back(arc.transformed(s));
    }
    std::size_t entry = entry_;
    if (s.iso.mirror())
    {
        // Mirroring flips orientation; restore counterclockwise traversal
        std::reverse(arcs.begin(), arcs.end());
        for (auto& arc : arcs)
        {
            arc = arc.reversed();
        }
        entry = arcs.size() - 1 - entry_;
    }
    return Cavity(std::move(arcs), entry, construction_);
}

//---------------------------------------------------------------------------//
// Simple cavities
//---------------------------------------------------------------------------//

Cavity make_half_disc(double r, double a)
{
    if (!(a > 0) || !(r > a))
    {
        fail(ErrorCode::invalid_argument, "half-disc requires 0 < a < r");
    }
    CircleArc rim;
    rim.center = {0, 0};
    rim.radius = r;
    rim.angle_begin = 0;
    rim.angle_end = pi;
    std::vector<BoundaryArc> arcs{
        Segment{{-a, 0}, {a, 0}},
        Segment{{a, 0}, {r, 0}},
        rim,
        Segment{{-r, 0}, {-a, 0}},
    };
    CavityConstruction c;
    c.kind = CavityConstruction::Kind::half_disc;
    c.r = r;
    return Cavity(std::move(arcs), 0, c);
}

Cavity make_rectangle(double a, double h)
{
    if (!(a > 0) || !(h > 0))
    {
        fail(ErrorCode::invalid_argument, "rectangle requires a > 0 and h > 0");
    }
    std::vector<BoundaryArc> arcs{
        Segment{{-a, 0}, {a, 0}},
        Segment{{a, 0}, {a, h}},
        Segment{{a, h}, {-a, h}},
        Segment{{-a, h}, {-a, 0}},
    };
    return Cavity(std::move(arcs), 0);
}

Cavity reflector_cavity(Reflector const& reflector)
{
    CavityConstruction c;
    c.kind = CavityConstruction::Kind::reflector;
    c.delta = reflector.delta;
    return Cavity(reflector.boundary, reflector.base_index, c);
}

//---------------------------------------------------------------------------//
// Normalization and channels
//---------------------------------------------------------------------------//

Cavity normalize(Cavity const& omega)
{
    Vec2 t = omega.entry_tangent();
    Isometry rot(-std::atan2(t.y, t.x), {});
    Isometry iso(rot.rotation(), -rot(omega.entry_midpoint()));
    return omega.transformed({1, iso});
}

Cavity extend_with_channel_depth(Cavity const& omega, double depth)
{
    if (!(depth > 0))
    {
        fail(ErrorCode::invalid_argument, "channel depth must be positive");
    }
    double tol = omega.junction_tolerance();
    auto const& e = omega.entry();
    bool on_axis = std::abs(e.a.y) <= tol && std::abs(e.b.y) <= tol
                   && e.a.x < 0 && std::abs(e.a.x + e.b.x) <= tol;
    if (!on_axis)
    {
        fail(ErrorCode::not_normalized,
             "entry must be [-a, a] x {0} traversed left to right");
    }
    for (auto const& arc : omega.boundary())
    {
        if (arc.support({0, 1}).first < -tol)
        {
            fail(ErrorCode::not_normalized, "cavity must lie in the upper half-plane");
        }
    }
    double a = 0.5 * (e.b.x - e.a.x);
    Vec2 left{-a, 0};
    Vec2 right{a, 0};
    Vec2 left_low{-a, -depth};
    Vec2 right_low{a, -depth};

    std::vector<BoundaryArc> arcs;
    std::size_t entry = 0;
    for (std::size_t k = 0; k < omega.boundary().size(); ++k)
    {
        if (k != omega.entry_index())
        {
            arcs.push_back(omega.boundary()[k]);
            continue;
        }
        arcs.push_back(Segment{left, left_low});
        entry = arcs.size();
        arcs.push_back(Segment{left_low, right_low});
        arcs.push_back(Segment{right_low, right});
    }
    CavityConstruction c = omega.construction();
    if (c.kind != CavityConstruction::Kind::channel)
    {
        c.base_kind = c.kind;
    }
    c.kind = CavityConstruction::Kind::channel;
    c.channel_depth = depth;
    c.channel_n = 0;
    return Cavity(std::move(arcs), entry, c);
}

Cavity extend_with_channel(Cavity const& omega, int n)
{
    if (n < 1)
    {
        fail(ErrorCode::invalid_argument, "channel index n must be >= 1");
    }
    Cavity result = extend_with_channel_depth(omega, 1.0 / n);
    CavityConstruction c = result.construction();
    c.channel_n = n;
    return Cavity(result.boundary(), result.entry_index(), c);
}

}  // namespace retroscatter
