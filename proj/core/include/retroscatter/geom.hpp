#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace retroscatter
{

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double half_pi = 0.5 * pi;

//---------------------------------------------------------------------------//
// Vectors
//---------------------------------------------------------------------------//

struct Vec2
{
    double x = 0;
    double y = 0;

    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }

//! Counterclockwise quarter turn.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

//! Counterclockwise rotation by \c angle radians.
inline Vec2 rotated(Vec2 a, double angle)
{
    double c = std::cos(angle);
    double s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

//! e_phi = (sin phi, cos phi): phi counts clockwise from (0, 1).
inline Vec2 e_phi(double phi) { return {std::sin(phi), std::cos(phi)}; }

//! Clockwise angle in (-pi, pi] from \c reference to \c v.
inline double clockwise_angle(Vec2 reference, Vec2 v)
{
    return std::atan2(-cross(reference, v), dot(reference, v));
}

//! Angle paired with its unit vector e_phi.
struct Direction
{
    double angle = 0;
    Vec2 unit{0, 1};

    static Direction from_angle(double phi) { return {phi, e_phi(phi)}; }
};

//---------------------------------------------------------------------------//
// Rigid motions
//---------------------------------------------------------------------------//

//! p -> R(rotation) M p + translation, with M the reflection y -> -y when
//! mirrored. Rotation is counterclockwise.
class Isometry
{
  public:
    Isometry() = default;
    Isometry(double rotation, Vec2 translation, bool mirror = false);

    static Isometry identity() { return {}; }

    Vec2 operator()(Vec2 p) const { return this->apply_vector(p) + translation_; }
    Vec2 apply_vector(Vec2 v) const;

    Isometry inverse() const;
    //! Composite map: first \c *this, then \c next.
    Isometry then(Isometry const& next) const;

    double rotation() const { return rotation_; }
    Vec2 translation() const { return translation_; }
    bool mirror() const { return mirror_; }

  private:
    double rotation_ = 0;
    Vec2 translation_{};
    bool mirror_ = false;
    double cos_ = 1;
    double sin_ = 0;
};

//! Uniform scaling about the origin followed by an isometry.
struct Similarity
{
    double scale = 1;
    Isometry iso;

    Vec2 operator()(Vec2 p) const { return iso(scale * p); }
    Vec2 apply_vector(Vec2 v) const { return iso.apply_vector(v); }
    Similarity inverse() const;
};

//---------------------------------------------------------------------------//
// Boundary arcs
//---------------------------------------------------------------------------//

struct Box
{
    Vec2 lo{std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec2 hi{-std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void expand(Vec2 p);
    void expand(Box const& b);
    Vec2 center() const { return 0.5 * (lo + hi); }
    double diagonal() const { return norm(hi - lo); }
};

//! Straight piece traversed from a to b.
struct Segment
{
    Vec2 a;
    Vec2 b;
};

//! Circular piece; counterclockwise when angle_end > angle_begin.
struct CircleArc
{
    Vec2 center;
    double radius = 1;
    double angle_begin = 0;
    double angle_end = 0;
};

//! Parabola with focus F and unit axis d: |p - F| = (p - F, d) + semi_latus.
//! Points are parametrized by the lateral coordinate w = (p - F, perp(d)):
//! p(w) = F + (w^2 - l^2) / (2 l) d + w perp(d).
struct ParabolaArc
{
    Vec2 focus;
    Vec2 axis{1, 0};
    double semi_latus = 1;
    double w_begin = 0;
    double w_end = 0;
};

//! One smooth piece of a billiard boundary. The interior lies to the left
//! of the traversal direction.
class BoundaryArc
{
  public:
    enum class Kind
    {
        segment,
        circle,
        parabola
    };
    using Geometry = std::variant<Segment, CircleArc, ParabolaArc>;

    BoundaryArc(Segment s) : geometry_(s) {}
    BoundaryArc(CircleArc c) : geometry_(c) {}
    BoundaryArc(ParabolaArc p) : geometry_(p) {}

    Kind kind() const { return static_cast<Kind>(geometry_.index()); }
    Geometry const& geometry() const { return geometry_; }
    Segment const& segment() const { return std::get<Segment>(geometry_); }
    CircleArc const& circle() const { return std::get<CircleArc>(geometry_); }
    ParabolaArc const& parabola() const
    {
        return std::get<ParabolaArc>(geometry_);
    }

    double param_begin() const;
    double param_end() const;
    Vec2 point(double param) const;
    Vec2 start() const { return this->point(this->param_begin()); }
    Vec2 end() const { return this->point(this->param_end()); }

    //! Unit tangent along the traversal direction.
    Vec2 tangent(double param) const;
    //! Unit normal pointing to the interior side.
    Vec2 interior_normal(double param) const { return perp(this->tangent(param)); }

    //! Exact min and max of (p, u) over the arc.
    std::pair<double, double> support(Vec2 u) const;
    Box bounds() const;
    double scale() const { return this->bounds().diagonal(); }

    //! Distance-like violation of the curve equation at p.
    double residual(Vec2 p) const;

    BoundaryArc transformed(Similarity const& s) const;
    BoundaryArc reversed() const;

  private:
    Geometry geometry_;
};

struct RayHit
{
    double t = 0;
    double param = 0;
};

//! Smallest t > t_min with origin + t dir on the arc.
std::optional<RayHit>
intersect_ray(BoundaryArc const& arc, Vec2 origin, Vec2 dir, double t_min);

//! As intersect_ray for an origin lying on the arc: the root at t = 0 is
//! factored out so no tolerance is needed to leave the surface.
std::optional<RayHit>
intersect_ray_from_arc(BoundaryArc const& arc, Vec2 origin, Vec2 dir);

//---------------------------------------------------------------------------//
// Reflector and trapezium
//---------------------------------------------------------------------------//

//! Half-plane (normal, p) + offset >= 0, or > 0 when strict.
struct HalfPlane
{
    Vec2 normal;
    double offset = 0;
    bool strict = false;

    double value(Vec2 p) const { return dot(normal, p) + offset; }
    bool contains(Vec2 p, double tol = 0) const
    {
        return strict ? this->value(p) > -tol : this->value(p) >= -tol;
    }
};

//! Height of the bounding trapezium, 3 sqrt(3) / 2.
inline double trapezium_height() { return 1.5 * std::sqrt(3.0); }

struct Trapezium
{
    double delta = 0;
    std::vector<HalfPlane> constraints;

    bool contains(Vec2 p, double tol = 0) const;
    //! Corners counterclockwise from (-delta, 0); empty when delta = 0.
    std::vector<Vec2> vertices() const;
};

Trapezium trapezium(double delta);

//! Pre-placement focal point 2 cos(phi) e_phi.
inline Vec2 reflector_focal_point(double phi)
{
    return 2 * std::cos(phi) * e_phi(phi);
}

struct Reflector
{
    double phi1 = 0;
    double phi2 = 0;
    double delta = 0;
    double scale = 1;
    Isometry placement;

    //! Closed counterclockwise boundary starting with the base segment.
    std::vector<BoundaryArc> boundary;
    std::size_t base_index = 0;
    Vec2 center;
    std::array<Vec2, 2> focal_points;
    //! Unit direction of x2 - x1 after placement.
    Vec2 axis;

    Segment const& base() const { return boundary[base_index].segment(); }
    Similarity similarity() const { return {scale, placement}; }
};

Reflector make_reflector(double phi1,
                         double phi2,
                         double delta,
                         double scale = 1,
                         Isometry const& placement = Isometry::identity());

}  // namespace retroscatter
