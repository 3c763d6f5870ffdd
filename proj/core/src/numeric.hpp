#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace retroscatter
{

//! Real roots in increasing order.
struct QuadraticRoots
{
    int count = 0;
    std::array<double, 2> values{0, 0};
};

//! Roots of a t^2 + b t + c using the cancellation-free form.
inline QuadraticRoots solve_quadratic(double a, double b, double c)
{
    QuadraticRoots r;
    if (a == 0)
    {
        if (b != 0)
        {
            r.count = 1;
            r.values[0] = -c / b;
        }
        return r;
    }
    double disc = b * b - 4 * a * c;
    if (disc < 0)
    {
        return r;
    }
    double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0)
    {
        r.count = 1;
        r.values[0] = 0;
        return r;
    }
    r.count = 2;
    r.values[0] = q / a;
    r.values[1] = c / q;
    if (r.values[0] > r.values[1])
    {
        std::swap(r.values[0], r.values[1]);
    }
    return r;
}

//! SplitMix64 step, used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace retroscatter
