#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>

#include "eirnet/errors.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

using IntMatrix2 = std::array<std::array<std::int64_t, 2>, 2>;
using Vec2 = std::array<double, 2>;

/// Linear hyperbolic toral automorphism together with its splitting data.
struct AnosovSpec {
    IntMatrix2 entries{};
    double lambda = 0.0;         ///< log of the spectral radius
    double leading_eigenvalue = 0.0;
    Vec2 unstable_dir{};         ///< unit vector, x-component >= 0
    Vec2 stable_dir{};           ///< unit vector, x-component >= 0
    double beta = 0.0;           ///< |cos| of the angle between unstable_dir and the x-axis

    std::int64_t trace() const noexcept { return entries[0][0] + entries[1][1]; }
    std::int64_t determinant() const noexcept
    {
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
    }

    /// A(x,y) mod 1.
    std::pair<double, double> apply(double x, double y) const noexcept
    {
        const double a = static_cast<double>(entries[0][0]);
        const double b = static_cast<double>(entries[0][1]);
        const double c = static_cast<double>(entries[1][0]);
        const double d = static_cast<double>(entries[1][1]);
        return {wrap(a * x + b * y), wrap(c * x + d * y)};
    }

    /// Inverse map; det = +-1 so the inverse is again an integer matrix.
    std::pair<double, double> apply_inverse(double x, double y) const noexcept
    {
        const double det = static_cast<double>(determinant());
        const double a = static_cast<double>(entries[0][0]);
        const double b = static_cast<double>(entries[0][1]);
        const double c = static_cast<double>(entries[1][0]);
        const double d = static_cast<double>(entries[1][1]);
        return {wrap((d * x - b * y) * det), wrap((-c * x + a * y) * det)};
    }

    /// Linear action on tangent vectors.
    Vec2 tangent(const Vec2& v) const noexcept
    {
        return {static_cast<double>(entries[0][0]) * v[0] + static_cast<double>(entries[0][1]) * v[1],
                static_cast<double>(entries[1][0]) * v[0] + static_cast<double>(entries[1][1]) * v[1]};
    }
};

namespace detail {

inline Vec2 eigenvector(const IntMatrix2& m, double mu)
{
    const double a = static_cast<double>(m[0][0]);
    const double b = static_cast<double>(m[0][1]);
    const double c = static_cast<double>(m[1][0]);
    const double d = static_cast<double>(m[1][1]);
    Vec2 v = (std::fabs(b) >= std::fabs(c)) ? Vec2{b, mu - a} : Vec2{mu - d, c};
    const double n = std::hypot(v[0], v[1]);
    v = {v[0] / n, v[1] / n};
    if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0))
        v = {-v[0], -v[1]};
    return v;
}

} // namespace detail

/// Fill in exponent, eigen-directions and beta for an integer matrix.
/// Throws NotHyperbolic unless |det| = 1 and |trace| > 2.
inline AnosovSpec anosov_data(const IntMatrix2& entries)
{
    AnosovSpec spec;
    spec.entries = entries;
    const std::int64_t det = spec.determinant();
    const std::int64_t tr = spec.trace();
    if (std::llabs(det) != 1)
        throw NotHyperbolic("matrix determinant is " + std::to_string(det) + ", expected +-1");
    if (std::llabs(tr) <= 2)
        throw NotHyperbolic("matrix trace is " + std::to_string(tr) + ", need |trace| > 2");

    const double t = static_cast<double>(tr);
    const double disc = std::sqrt(t * t - 4.0 * static_cast<double>(det));
    // Leading root computed without cancellation, the other from the product det.
    const double mu_u = (t > 0.0) ? (t + disc) / 2.0 : (t - disc) / 2.0;
    const double mu_s = static_cast<double>(det) / mu_u;

    spec.leading_eigenvalue = mu_u;
    spec.lambda = std::log(std::fabs(mu_u));
    spec.unstable_dir = detail::eigenvector(entries, mu_u);
    spec.stable_dir = detail::eigenvector(entries, mu_s);
    spec.beta = std::fabs(spec.unstable_dir[0]);
    return spec;
}

} // namespace eirnet
