#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "retroscatter/geom.hpp"
#include "retroscatter/measure.hpp"

namespace retroscatter
{

class Bvh;

inline constexpr std::size_t no_arc = static_cast<std::size_t>(-1);

//! How a cavity was produced.
struct CavityConstruction
{
    enum class Kind
    {
        custom,
        half_disc,
        reflector,
        reflector_cavity,
        channel
    };
    Kind kind = Kind::custom;
    //! Kind of the cavity a channel was attached to.
    Kind base_kind = Kind::custom;
    std::vector<int> sigma;
    double r = 0;
    double delta = 0;
    int channel_n = 0;
    double channel_depth = 0;
};

const char* to_string(CavityConstruction::Kind kind);

struct BoundaryHit
{
    std::size_t arc = no_arc;
    double t = 0;
    double param = 0;
    Vec2 point;
    bool singular = false;
};

//! Closed counterclockwise boundary with a distinguished entry segment I.
//! Immutable after construction and safe to share between threads.
class Cavity
{
  public:
    Cavity(std::vector<BoundaryArc> boundary,
           std::size_t entry_index,
           CavityConstruction construction = {});

    std::vector<BoundaryArc> const& boundary() const { return arcs_; }
    std::size_t entry_index() const { return entry_; }
    Segment const& entry() const { return arcs_[entry_].segment(); }
    CavityConstruction const& construction() const { return construction_; }

    Box const& bounds() const { return bounds_; }
    double scale() const { return scale_; }
    double junction_tolerance() const { return 1e-9 * scale_; }

    //! Frame of I: midpoint, unit tangent (start to end), inward normal.
    Vec2 entry_midpoint() const;
    Vec2 entry_tangent() const;
    Vec2 entry_normal() const { return perp(this->entry_tangent()); }
    double entry_half_length() const;

    //! Nearest boundary hit along the ray; \c from_arc is the arc the origin
    //! lies on, or no_arc.
    std::optional<BoundaryHit>
    first_hit(Vec2 origin, Vec2 dir, std::size_t from_arc) const;

    //! Brute-force version of first_hit used to validate the BVH.
    std::optional<BoundaryHit>
    first_hit_linear(Vec2 origin, Vec2 dir, std::size_t from_arc) const;

    Cavity transformed(Similarity const& s) const;

  private:
    std::vector<BoundaryArc> arcs_;
    std::vector<double> arc_scale_;
    std::size_t entry_;
    CavityConstruction construction_;
    Box bounds_;
    double scale_ = 1;
    std::shared_ptr<Bvh const> bvh_;

    BoundaryHit finish_hit(std::size_t arc, RayHit const& h, Vec2 o, Vec2 v) const;
};

//! Upper half-disc of radius r with entry [-a, a] x {0}.
Cavity make_half_disc(double r, double a = 0.5);

//! Rectangle [-a, a] x [0, h] entered through its bottom side.
Cavity make_rectangle(double a, double h);

//! The reflector region entered through its base.
Cavity reflector_cavity(Reflector const& reflector);

//---------------------------------------------------------------------------//
// Reflector-packed cavity
//---------------------------------------------------------------------------//

struct CavityOptions
{
    //! Packing stops at the first level whose uncovered length is below this.
    double uncovered_budget = 1.0;
    //! Refuse packings with more reflectors on a single chord.
    std::size_t max_reflectors_per_chord = std::size_t(1) << 16;
};

//! Packing statistics of one moved cell's chord.
struct ChordPacking
{
    int cell = 0;
    int partner = 0;
    double chord_length = 0;
    //! Number of packing levels (deepest level is levels - 1).
    int levels = 0;
    //! Uncovered length |J_l| before level l, for l = 0..levels.
    std::vector<double> uncovered;
    //! Scale ratio k_l at each level.
    std::vector<double> ratios;
};

struct ReflectorCavity
{
    Cavity cavity;
    std::vector<Reflector> reflectors;
    //! One-based cell of each reflector.
    std::vector<int> reflector_cell;
    std::vector<ChordPacking> chords;
};

//! Largest k <= 1 such that k T(delta), based at the midpoint of a segment of
//! the given length, fits in the isosceles triangle over the segment with
//! base angles delta. Found by bisection on vertex containment.
double trapezium_fit_ratio(double base_length, double delta);

//! Plan the packing of one chord without building geometry.
ChordPacking plan_chord_packing(double chord_length,
                                double delta,
                                CavityOptions const& options = {});

ReflectorCavity build_reflector_cavity(Involution const& sigma,
                                       double r,
                                       double delta,
                                       CavityOptions const& options = {});

Cavity build_cavity(Involution const& sigma,
                    double r,
                    double delta,
                    CavityOptions const& options = {});

//---------------------------------------------------------------------------//
// Normalization and channels
//---------------------------------------------------------------------------//

//! Isometric image with entry [-a, a] x {0} and interior above it.
Cavity normalize(Cavity const& omega);

//! Attach [-a, a] x [-depth, 0]; the new entry is [-a, a] x {-depth}.
Cavity extend_with_channel_depth(Cavity const& omega, double depth);

//! Channel of depth 1/n.
Cavity extend_with_channel(Cavity const& omega, int n);

//---------------------------------------------------------------------------//
// Body assembly
//---------------------------------------------------------------------------//

//! Convex polygon with counterclockwise vertices.
struct ConvexPolygon
{
    std::vector<Vec2> vertices;

    std::size_t size() const { return vertices.size(); }
    Vec2 vertex(std::size_t i) const { return vertices[i % vertices.size()]; }
    double side_length(std::size_t i) const;
    double perimeter() const;
    Vec2 centroid() const;
    bool contains(Vec2 p, double tol = 0) const;
    //! Throws unless the vertices form a strictly convex counterclockwise loop.
    void validate() const;
};

ConvexPolygon square(double side);

//! Homothetic copy about the vertex centroid, scaled by (1 - margin).
ConvexPolygon shrink(ConvexPolygon const& k0, double margin);

//! One carved copy of the prototype cavity.
struct Carving
{
    int side = 0;
    //! Arclength coordinate of the copy's entry midpoint along its side.
    double center = 0;
    double scale = 0;
    int rank = 0;
};

struct BodyOptions
{
    //! Protected region is K0 shrunk by this margin unless given.
    double protected_margin = 0.25;
    std::size_t max_carvings = 8'000'000;
};

//! Shape data of a cavity in normalized channel form: entry [-a, a] x {-b}
//! and top part inside (-c, c) x [0, c).
struct ChannelForm
{
    double a = 0;
    double b = 0;
    double c = 0;
};

//! Checks the channel form and measures a, b, c.
ChannelForm channel_form(Cavity const& omega);

class PolygonBody
{
  public:
    ConvexPolygon k0;
    ConvexPolygon protected_region;
    Cavity prototype;
    ChannelForm form;
    double epsilon = 0;
    double strip_depth = 0;
    double kappa0 = 0;
    double carved_length = 0;
    int ranks = 0;
    //! Carvings grouped by side, each group sorted by center.
    std::vector<std::vector<Carving>> sides;

    std::size_t carving_count() const;
    //! Base-length fraction of one carving, 2 a k / |boundary of K0|.
    double kappa(Carving const& c) const;
    double kappa_sum() const;

    //! Map from prototype coordinates to the world.
    Similarity placement(Carving const& c) const;
    //! Carving whose entry contains arclength u on side, if any.
    Carving const* carving_at(int side, double u) const;
};

PolygonBody assemble_body(ConvexPolygon const& k0,
                          Cavity const& omega,
                          double epsilon,
                          std::optional<ConvexPolygon> protected_region = {},
                          BodyOptions const& options = {});

struct DisjointnessReport
{
    bool disjoint = true;
    bool inside_k0 = true;
    bool avoids_protected = true;
    std::size_t pairs_tested = 0;

    bool ok() const { return disjoint && inside_k0 && avoids_protected; }
};

//! Exhaustive check over the bounding T-shapes of all carvings.
DisjointnessReport check_carvings(PolygonBody const& body);

}  // namespace retroscatter
