#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "retroscatter/cavity.hpp"
#include "retroscatter/error.hpp"

namespace retroscatter
{
namespace
{
using Quad = std::array<Vec2, 4>;

// Separating-axis test for convex polygons; touching counts as separated.
template<class A, class B>
bool overlaps(A const& a, B const& b, double tol)
{
    auto separated_along = [&](auto const& poly) {
        std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            Vec2 edge = poly[(i + 1) % n] - poly[i];
            Vec2 axis = perp(edge);
            double amin = std::numeric_limits<double>::infinity();
            double amax = -amin;
            double bmin = amin;
            double bmax = -amin;
            for (Vec2 p : a)
            {
                amin = std::min(amin, dot(axis, p));
                amax = std::max(amax, dot(axis, p));
            }
            for (Vec2 p : b)
            {
                bmin = std::min(bmin, dot(axis, p));
                bmax = std::max(bmax, dot(axis, p));
            }
            double scale = norm(axis);
            if (amax <= bmin + tol * scale || bmax <= amin + tol * scale)
            {
                return true;
            }
        }
        return false;
    };
    return !separated_along(a) && !separated_along(b);
}

struct SideFrame
{
    Vec2 start;
    Vec2 tangent;
    Vec2 normal;
    double length;

    Vec2 world(double u, double w) const { return start + u * tangent + w * normal; }
    Quad rect(double u0, double u1, double w0, double w1) const
    {
        return {world(u0, w0), world(u1, w0), world(u1, w1), world(u0, w1)};
    }
};

SideFrame side_frame(ConvexPolygon const& k, std::size_t i)
{
    Vec2 a = k.vertex(i);
    Vec2 b = k.vertex(i + 1);
    Vec2 t = normalized(b - a);
    return {a, t, perp(t), distance(a, b)};
}

// Local (u, w) rectangles bounding one carving: stem and top box.
std::array<std::array<double, 4>, 2> carving_rects(Carving const& c, ChannelForm const& f)
{
    double k = c.scale;
    return {{{c.center - f.a * k, c.center + f.a * k, 0, f.b * k},
             {c.center - f.c * k, c.center + f.c * k, f.b * k, (f.b + f.c) * k}}};
}

}  // namespace

//---------------------------------------------------------------------------//
// Convex polygons
//---------------------------------------------------------------------------//

double ConvexPolygon::side_length(std::size_t i) const
{
    return distance(this->vertex(i), this->vertex(i + 1));
}

double ConvexPolygon::perimeter() const
{
    double p = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        p += this->side_length(i);
    }
    return p;
}

Vec2 ConvexPolygon::centroid() const
{
    Vec2 c;
    for (Vec2 v : vertices)
    {
        c += v;
    }
    return c / static_cast<double>(vertices.size());
}

bool ConvexPolygon::contains(Vec2 p, double tol) const
{
    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        Vec2 a = this->vertex(i);
        Vec2 e = this->vertex(i + 1) - a;
        if (cross(e, p - a) < -tol * norm(e))
        {
            return false;
        }
    }
    return true;
}

void ConvexPolygon::validate() const
{
    if (vertices.size() < 3)
    {
        fail(ErrorCode::invalid_argument, "polygon needs at least three vertices");
    }
    for (std::size_t i = 0; i < vertices.size(); ++i)
    {
        Vec2 e0 = this->vertex(i + 1) - this->vertex(i);
        Vec2 e1 = this->vertex(i + 2) - this->vertex(i + 1);
        if (!(cross(e0, e1) > 0))
        {
            fail(ErrorCode::invalid_argument,
                 "polygon is not strictly convex and counterclockwise at vertex "
                     + std::to_string((i + 1) % vertices.size()));
        }
    }
}

ConvexPolygon square(double side)
{
    double h = 0.5 * side;
    return {{{-h, -h}, {h, -h}, {h, h}, {-h, h}}};
}

ConvexPolygon shrink(ConvexPolygon const& k0, double margin)
{
    Vec2 c = k0.centroid();
    ConvexPolygon out;
    for (Vec2 v : k0.vertices)
    {
        out.vertices.push_back(c + (1 - margin) * (v - c));
    }
    return out;
}

//---------------------------------------------------------------------------//
// Channel form
//---------------------------------------------------------------------------//

ChannelForm channel_form(Cavity const& omega)
{
    double tol = omega.junction_tolerance();
    auto const& e = omega.entry();
    double b = -0.5 * (e.a.y + e.b.y);
    bool ok = std::abs(e.a.y - e.b.y) <= tol && b > tol && e.a.x < 0
              && std::abs(e.a.x + e.b.x) <= tol;
    if (!ok)
    {
        fail(ErrorCode::not_normalized, "entry must be [-a, a] x {-b} with b > 0");
    }
    ChannelForm f;
    f.a = 0.5 * (e.b.x - e.a.x);
    f.b = b;
    double extent = 0;
    for (std::size_t k = 0; k < omega.boundary().size(); ++k)
    {
        if (k == omega.entry_index())
        {
            continue;
        }
        auto const& arc = omega.boundary()[k];
        auto [ylo, yhi] = arc.support({0, 1});
        if (ylo < -tol)
        {
            bool wall = arc.kind() == BoundaryArc::Kind::segment
                        && std::abs(std::abs(arc.segment().a.x) - f.a) <= tol
                        && std::abs(arc.segment().b.x - arc.segment().a.x) <= tol
                        && ylo >= -b - tol && yhi <= tol;
            if (!wall)
            {
                fail(ErrorCode::not_normalized,
                     "below the x-axis the cavity must be the rectangle over its entry");
            }
            continue;
        }
        auto [xlo, xhi] = arc.support({1, 0});
        extent = std::max({extent, -xlo, xhi, yhi});
    }
    f.c = extent <= f.a ? f.a : extent * (1 + 1e-12);
    return f;
}

//---------------------------------------------------------------------------//
// PolygonBody
//---------------------------------------------------------------------------//

std::size_t PolygonBody::carving_count() const
{
    std::size_t n = 0;
    for (auto const& s : sides)
    {
        n += s.size();
    }
    return n;
}

double PolygonBody::kappa(Carving const& c) const
{
    return 2 * form.a * c.scale / k0.perimeter();
}

double PolygonBody::kappa_sum() const
{
    return carved_length / k0.perimeter();
}

Similarity PolygonBody::placement(Carving const& c) const
{
    SideFrame f = side_frame(k0, static_cast<std::size_t>(c.side));
    double rotation = std::atan2(f.tangent.y, f.tangent.x);
    Vec2 shift = f.world(c.center, c.scale * form.b);
    return {c.scale, Isometry(rotation, shift)};
}

Carving const* PolygonBody::carving_at(int side, double u) const
{
    auto const& list = sides[static_cast<std::size_t>(side)];
    auto it = std::upper_bound(list.begin(), list.end(), u,
                               [](double v, Carving const& c) { return v < c.center; });
    for (auto cand : {it, it == list.begin() ? list.end() : it - 1})
    {
        if (cand != list.end() && std::abs(u - cand->center) < form.a * cand->scale)
        {
            return &*cand;
        }
    }
    return nullptr;
}

PolygonBody assemble_body(ConvexPolygon const& k0,
                          Cavity const& omega,
                          double epsilon,
                          std::optional<ConvexPolygon> protected_region,
                          BodyOptions const& options)
{
    k0.validate();
    if (!(epsilon > 0))
    {
        fail(ErrorCode::invalid_argument, "epsilon must be positive");
    }
    ChannelForm form = channel_form(omega);
    ConvexPolygon inner = protected_region ? *protected_region
                                           : shrink(k0, options.protected_margin);
    inner.validate();
    double scale = k0.perimeter();
    for (Vec2 v : inner.vertices)
    {
        if (!k0.contains(v, -1e-12 * scale))
        {
            fail(ErrorCode::invalid_argument, "protected region must lie strictly inside K0");
        }
    }

    std::size_t m = k0.size();
    double inset = epsilon / (4.0 * m);
    std::vector<SideFrame> frames;
    for (std::size_t i = 0; i < m; ++i)
    {
        frames.push_back(side_frame(k0, i));
        if (frames.back().length <= 2 * inset)
        {
            fail(ErrorCode::budget_infeasible,
                 "side " + std::to_string(i) + " is shorter than its two insets");
        }
    }

    // Deepest strip such that the inset rectangles stay inside K0, pairwise
    // disjoint and clear of the protected region.
    auto strips_fit = [&](double h) -> std::optional<std::size_t> {
        std::vector<Quad> rects;
        for (std::size_t i = 0; i < m; ++i)
        {
            rects.push_back(frames[i].rect(inset, frames[i].length - inset, 0, h));
            for (Vec2 p : rects.back())
            {
                if (!k0.contains(p, 1e-12))
                {
                    return i;
                }
            }
            if (overlaps(rects.back(), inner.vertices, 0))
            {
                return i;
            }
        }
        for (std::size_t i = 0; i < m; ++i)
        {
            for (std::size_t j = i + 1; j < m; ++j)
            {
                if (overlaps(rects[i], rects[j], 0))
                {
                    return i;
                }
            }
        }
        return std::nullopt;
    };
    double lo = 0;
    double hi = scale;
    std::size_t offending = 0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * scale; ++iter)
    {
        double mid = 0.5 * (lo + hi);
        if (auto bad = strips_fit(mid))
        {
            hi = mid;
            offending = *bad;
        }
        else
        {
            lo = mid;
        }
    }
    double strip = 0.999 * lo;
    if (!(strip > 0))
    {
        fail(ErrorCode::budget_infeasible,
             "no strip fits between side " + std::to_string(offending)
                 + " and the protected region");
    }

    double a = form.a;
    double b = form.b;
    double c = form.c;
    double leftover_budget = epsilon / (2.0 * m);
    int q = 1;
    if (c > a)
    {
        q = std::max(1, static_cast<int>(std::ceil((b + c) * (c - a) / (2 * b * c) - 1e-12)));
    }

    // Count first so oversized requests fail before allocation
    std::vector<std::size_t> q1(m);
    std::vector<int> side_ranks(m);
    std::size_t total = 0;
    for (std::size_t i = 0; i < m; ++i)
    {
        double usable = frames[i].length - 2 * inset;
        double k_max = strip / (b + c);
        q1[i] = static_cast<std::size_t>(std::ceil(usable / (2 * c * k_max) - 1e-12));
        q1[i] = std::max<std::size_t>(q1[i], 1);
        std::size_t per = 1;
        std::size_t count = q1[i];
        double leftover = usable * (1 - a / c);
        int ranks = 1;
        while (leftover > leftover_budget)
        {
            per *= 2 * static_cast<std::size_t>(q);
            count += q1[i] * per;
            leftover *= 1 - a / c;
            ++ranks;
            if (count > options.max_carvings)
            {
                break;
            }
        }
        side_ranks[i] = ranks;
        total += count;
        if (total > options.max_carvings)
        {
            fail(ErrorCode::budget_infeasible,
                 "side " + std::to_string(i) + " needs more than "
                     + std::to_string(options.max_carvings) + " carvings in total");
        }
    }

    PolygonBody body{k0, inner, omega, form, epsilon, strip, 0, 0, 0, {}};
    body.sides.resize(m);
    double carved = 0;
    for (std::size_t i = 0; i < m; ++i)
    {
        auto& list = body.sides[i];
        double usable = frames[i].length - 2 * inset;
        double k = usable / (2 * c * static_cast<double>(q1[i]));
        // Free rectangles [u, u + width] beside the stems of the last rank
        std::vector<double> starts;
        for (std::size_t j = 0; j < q1[i]; ++j)
        {
            double u = inset + (2 * static_cast<double>(j) + 1) * c * k;
            list.push_back({static_cast<int>(i), u, k, 1});
            starts.push_back(u - c * k);
            starts.push_back(u + a * k);
        }
        carved += static_cast<double>(q1[i]) * 2 * a * k;
        for (int rank = 2; rank <= side_ranks[i] && a < c; ++rank)
        {
            double k_next = (c - a) * k / (2 * c * q);
            std::vector<double> next_starts;
            next_starts.reserve(starts.size() * 2 * q);
            for (double s : starts)
            {
                for (int j = 0; j < q; ++j)
                {
                    double u = s + (2 * j + 1) * c * k_next;
                    list.push_back({static_cast<int>(i), u, k_next, rank});
                    next_starts.push_back(u - c * k_next);
                    next_starts.push_back(u + a * k_next);
                }
            }
            carved += static_cast<double>(starts.size() * q) * 2 * a * k_next;
            starts = std::move(next_starts);
            k = k_next;
        }
        std::sort(list.begin(), list.end(),
                  [](Carving const& x, Carving const& y) { return x.center < y.center; });
        body.ranks = std::max(body.ranks, side_ranks[i]);
    }
    body.carved_length = carved;
    body.kappa0 = 1 - carved / scale;
    return body;
}

DisjointnessReport check_carvings(PolygonBody const& body)
{
    DisjointnessReport report;
    ConvexPolygon const& k0 = body.k0;
    std::size_t m = k0.size();
    double tol = 1e-12 * k0.perimeter();

    struct LocalRect
    {
        std::array<double, 4> box;  // u0, u1, w0, w1
    };
    std::vector<std::vector<LocalRect>> local(m);
    std::vector<SideFrame> frames;
    for (std::size_t i = 0; i < m; ++i)
    {
        frames.push_back(side_frame(k0, i));
        for (auto const& c : body.sides[i])
        {
            for (auto const& r : carving_rects(c, body.form))
            {
                local[i].push_back({r});
            }
        }
    }

    for (std::size_t i = 0; i < m; ++i)
    {
        auto& rects = local[i];
        SideFrame const& f = frames[i];
        for (auto const& r : rects)
        {
            Quad q = f.rect(r.box[0], r.box[1], r.box[2], r.box[3]);
            for (Vec2 p : q)
            {
                if (!k0.contains(p, tol))
                {
                    report.inside_k0 = false;
                }
            }
            if (overlaps(q, body.protected_region.vertices, tol))
            {
                report.avoids_protected = false;
            }
        }
        // Sweep along the side: rectangles are axis-aligned in (u, w)
        std::sort(rects.begin(), rects.end(),
                  [](LocalRect const& x, LocalRect const& y) { return x.box[0] < y.box[0]; });
        std::vector<std::size_t> active;
        for (std::size_t k = 0; k < rects.size(); ++k)
        {
            auto const& r = rects[k].box;
            std::erase_if(active, [&](std::size_t idx) {
                return rects[idx].box[1] <= r[0] + tol;
            });
            for (std::size_t idx : active)
            {
                auto const& s = rects[idx].box;
                ++report.pairs_tested;
                bool u_overlap = std::min(r[1], s[1]) - std::max(r[0], s[0]) > tol;
                bool w_overlap = std::min(r[3], s[3]) - std::max(r[2], s[2]) > tol;
                if (u_overlap && w_overlap)
                {
                    report.disjoint = false;
                }
            }
            active.push_back(k);
        }
    }

    // Carvings of different sides can only meet near shared regions: test
    // every rectangle of side i against those of side j whose world boxes
    // intersect the strip box of side i.
    auto world_box = [](Quad const& q) {
        Box b;
        for (Vec2 p : q)
        {
            b.expand(p);
        }
        return b;
    };
    auto boxes_meet = [&](Box const& x, Box const& y) {
        return x.lo.x < y.hi.x - tol && y.lo.x < x.hi.x - tol && x.lo.y < y.hi.y - tol
               && y.lo.y < x.hi.y - tol;
    };
    std::vector<Box> strip_boxes(m);
    std::vector<std::vector<Quad>> quads(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        for (auto const& r : local[i])
        {
            Quad q = frames[i].rect(r.box[0], r.box[1], r.box[2], r.box[3]);
            quads[i].push_back(q);
            strip_boxes[i].expand(world_box(q));
        }
    }
    for (std::size_t i = 0; i < m; ++i)
    {
        for (std::size_t j = i + 1; j < m; ++j)
        {
            std::vector<Quad const*> from_i;
            std::vector<Quad const*> from_j;
            for (auto const& q : quads[i])
            {
                if (boxes_meet(world_box(q), strip_boxes[j]))
                {
                    from_i.push_back(&q);
                }
            }
            for (auto const& q : quads[j])
            {
                if (boxes_meet(world_box(q), strip_boxes[i]))
                {
                    from_j.push_back(&q);
                }
            }
            for (auto const* x : from_i)
            {
                for (auto const* y : from_j)
                {
                    ++report.pairs_tested;
                    if (overlaps(*x, *y, tol))
                    {
                        report.disjoint = false;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace retroscatter
