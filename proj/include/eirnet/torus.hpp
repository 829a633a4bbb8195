#pragma once

#include <cmath>
#include <limits>

namespace eirnet {

/// Reduce a real number to its representative in [0,1).
inline double wrap(double x) noexcept
{
    double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.0
    if (r >= 1.0)
        r = 0.0;
    return r;
}

/// Shortest distance between two points of T = R/Z.
inline double circle_distance(double a, double b) noexcept
{
    const double d = std::fabs(wrap(a) - wrap(b));
    return std::fmin(d, 1.0 - d);
}

/// Signed representative of (a - b) in [-1/2, 1/2).
inline double circle_difference(double a, double b) noexcept
{
    return wrap(a - b + 0.5) - 0.5;
}

/// True iff z lies in the open arc (1/2, 1) of T.
inline bool in_inhibiting_arc(double z) noexcept
{
    const double w = wrap(z);
    return w > 0.5 && w < 1.0;
}

/// Distance from z to the pole set {0, 1/2}.
inline double distance_to_poles(double z) noexcept
{
    return std::fmin(circle_distance(z, 0.0), circle_distance(z, 0.5));
}

} // namespace eirnet
