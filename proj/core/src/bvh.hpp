#pragma once

#include <cstdint>
#include <vector>

#include "retroscatter/geom.hpp"

namespace retroscatter
{

//! Bounding-volume hierarchy over axis-aligned boxes for ray queries.
class Bvh
{
  public:
    explicit Bvh(std::vector<Box> boxes);

    //! Visit items whose box the ray enters before \c t_max. The visitor
    //! returns the (possibly reduced) t_max.
    template<class Visit>
    void traverse(Vec2 origin, Vec2 dir, double t_max, Visit&& visit) const;

  private:
    struct Node
    {
        Box box;
        // Children for interior nodes, item range for leaves
        std::int32_t first = 0;
        std::int32_t count = 0;
        std::int32_t right = -1;
    };
    std::vector<Node> nodes_;
    std::vector<std::int32_t> items_;

    std::int32_t build(std::vector<Box> const& boxes,
                       std::vector<Vec2> const& centers,
                       std::int32_t begin,
                       std::int32_t end);
};

namespace detail
{
inline bool slab_hit(Box const& b, Vec2 o, Vec2 inv, double t_max)
{
    double t0 = 0;
    double t1 = t_max;
    double tx0 = (b.lo.x - o.x) * inv.x;
    double tx1 = (b.hi.x - o.x) * inv.x;
    if (tx0 > tx1) std::swap(tx0, tx1);
    double ty0 = (b.lo.y - o.y) * inv.y;
    double ty1 = (b.hi.y - o.y) * inv.y;
    if (ty0 > ty1) std::swap(ty0, ty1);
    // NaN from 0 * inf compares false and leaves the interval unchanged
    if (tx0 > t0) t0 = tx0;
    if (ty0 > t0) t0 = ty0;
    if (tx1 < t1) t1 = tx1;
    if (ty1 < t1) t1 = ty1;
    return t0 <= t1;
}
}  // namespace detail

template<class Visit>
void Bvh::traverse(Vec2 origin, Vec2 dir, double t_max, Visit&& visit) const
{
    if (nodes_.empty())
    {
        return;
    }
    Vec2 inv{1 / dir.x, 1 / dir.y};
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0)
    {
        Node const& node = nodes_[stack[--top]];
        if (!detail::slab_hit(node.box, origin, inv, t_max))
        {
            continue;
        }
        if (node.right < 0)
        {
            for (std::int32_t k = 0; k < node.count; ++k)
            {
                t_max = visit(items_[node.first + k], t_max);
            }
        }
        else
        {
            stack[top++] = node.right;
            stack[top++] = node.first;
        }
    }
}

}  // namespace retroscatter
