#include "bvh.hpp"

#include <algorithm>
#include <numeric>

namespace retroscatter
{
namespace
{
constexpr std::int32_t leaf_size = 4;

// Small slack so rays grazing an axis-aligned arc still visit it.
Box padded(Box b)
{
    double pad = 1e-12 * std::max({1.0, std::abs(b.lo.x), std::abs(b.lo.y),
                                   std::abs(b.hi.x), std::abs(b.hi.y)});
    b.lo = b.lo - Vec2{pad, pad};
    b.hi = b.hi + Vec2{pad, pad};
    return b;
}
}  // namespace

Bvh::Bvh(std::vector<Box> boxes)
{
    for (auto& b : boxes)
    {
        b = padded(b);
    }
    std::vector<Vec2> centers(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i)
    {
        centers[i] = boxes[i].center();
    }
    items_.resize(boxes.size());
    std::iota(items_.begin(), items_.end(), 0);
    nodes_.reserve(2 * boxes.size() / leaf_size + 2);
    if (!boxes.empty())
    {
        this->build(boxes, centers, 0, static_cast<std::int32_t>(boxes.size()));
    }
}

std::int32_t Bvh::build(std::vector<Box> const& boxes,
                        std::vector<Vec2> const& centers,
                        std::int32_t begin,
                        std::int32_t end)
{
    std::int32_t index = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();
    Box box;
    Box centroid_box;
    for (std::int32_t k = begin; k < end; ++k)
    {
        box.expand(boxes[items_[k]]);
        centroid_box.expand(centers[items_[k]]);
    }
    nodes_[index].box = box;
    if (end - begin <= leaf_size)
    {
        nodes_[index].first = begin;
        nodes_[index].count = end - begin;
        return index;
    }
    Vec2 extent = centroid_box.hi - centroid_box.lo;
    bool split_x = extent.x >= extent.y;
    std::int32_t mid = begin + (end - begin) / 2;
    std::nth_element(items_.begin() + begin, items_.begin() + mid, items_.begin() + end,
                     [&](std::int32_t a, std::int32_t b) {
                         return split_x ? centers[a].x < centers[b].x
                                        : centers[a].y < centers[b].y;
                     });
    std::int32_t left = this->build(boxes, centers, begin, mid);
    std::int32_t right = this->build(boxes, centers, mid, end);
    nodes_[index].first = left;
    nodes_[index].right = right;
    return index;
}

}  // namespace retroscatter
