#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "eirnet/errors.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

/// Polynomial piece c0 + c1 s + c2 s^2 + c3 s^3 with s = x - x0, valid on [x0, x1].
struct SplinePiece {
    double x0 = 0.0;
    double x1 = 0.0;
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;

    double value(double x) const noexcept
    {
        const double s = x - x0;
        return c0 + s * (c1 + s * (c2 + s * c3));
    }
    double slope(double x) const noexcept
    {
        const double s = x - x0;
        return c1 + s * (2.0 * c2 + 3.0 * s * c3);
    }
    double curvature(double x) const noexcept { return 2.0 * c2 + 6.0 * c3 * (x - x0); }
};

/// Lift r^ : R -> R of an increasing degree-kappa circle map, stored as a monotone
/// C^1 spline with Lipschitz derivative over one period.
///
/// Layout: kappa affine steep arcs of length epsilon(1 - 2d) and slope 1/epsilon,
/// arc l mapping onto [d + l, 1 - d + l]; between consecutive arcs a connector
/// rises by 2d through two quadratic blends and a linear middle part whose
/// slope stays above the requested floor.
class RotationMapSpec {
public:
    int kappa = 1;
    double epsilon = 0.0;
    double d = 0.0;
    double slope_floor = 0.0;
    double phase = 0.0;

    /// r^ on the line: r^(x + 1) = r^(x) + kappa, r^(0) in [0,1).
    double lift(double x) const noexcept
    {
        const double xb = x - offset_;
        const double m = std::floor(xb - start_);
        const double local = xb - m;
        return piece_at(local).value(local) + static_cast<double>(kappa) * m + shift_;
    }

    double slope(double x) const noexcept
    {
        const double xb = x - offset_;
        const double local = xb - std::floor(xb - start_);
        return piece_at(local).slope(local);
    }

    double curvature(double x) const noexcept
    {
        const double xb = x - offset_;
        const double local = xb - std::floor(xb - start_);
        return piece_at(local).curvature(local);
    }

    /// lift(x) and slope(x) with one piece lookup.
    void evaluate(double x, double& value, double& slope_out) const noexcept
    {
        const double xb = x - offset_;
        const double m = std::floor(xb - start_);
        const double local = xb - m;
        const SplinePiece& p = piece_at(local);
        value = p.value(local) + static_cast<double>(kappa) * m + shift_;
        slope_out = p.slope(local);
    }

    /// Value of the lift on the fundamental domain x in [0,1).
    double operator()(double x) const noexcept { return lift(wrap(x)); }

    /// Spline knots, reduced to [0,1) and sorted.
    std::vector<double> breakpoints() const
    {
        std::vector<double> out;
        out.reserve(pieces_.size());
        for (const auto& p : pieces_)
            out.push_back(wrap(p.x0 + offset_));
        std::sort(out.begin(), out.end());
        return out;
    }

    /// x-intervals (in [0,1), possibly wrapping) carrying the affine steep arcs.
    std::vector<std::pair<double, double>> steep_arcs() const
    {
        std::vector<std::pair<double, double>> out;
        for (const auto& [a, b] : arcs_)
            out.emplace_back(wrap(a + offset_), wrap(b + offset_));
        return out;
    }

    double arc_length() const noexcept { return epsilon * (1.0 - 2.0 * d); }
    double connector_slope() const noexcept { return connector_slope_; }
    double blend_length() const noexcept { return blend_; }

    double min_slope() const noexcept
    {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& p : pieces_)
            m = std::min({m, p.slope(p.x0), p.slope(p.x1)});
        return m;
    }

    double max_curvature() const noexcept
    {
        double m = 0.0;
        for (const auto& p : pieces_)
            m = std::max({m, std::fabs(p.curvature(p.x0)), std::fabs(p.curvature(p.x1))});
        return m;
    }

    /// Circle distance from x to the nearest spline knot.
    double distance_to_breakpoint(double x) const noexcept
    {
        double best = 1.0;
        for (const auto& p : pieces_)
            best = std::min(best, circle_distance(x, p.x0 + offset_));
        return best;
    }

    const std::vector<SplinePiece>& pieces() const noexcept { return pieces_; }

private:
    friend RotationMapSpec build_rotation_map(int, double, double, double, double);

    const SplinePiece& piece_at(double local) const noexcept
    {
        // pieces_ are contiguous on [start_, start_ + 1)
        auto it = std::upper_bound(knots_.begin(), knots_.end(), local);
        std::size_t idx = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
        if (idx >= pieces_.size())
            idx = pieces_.size() - 1;
        return pieces_[idx];
    }

    std::vector<SplinePiece> pieces_;
    std::vector<double> knots_;
    std::vector<std::pair<double, double>> arcs_;
    double start_ = 0.0;  // left end of the stored period (base coordinates)
    double offset_ = 0.0; // base coordinates = x - offset_
    double shift_ = 0.0;  // integer added so that lift(0) lies in [0,1)
    double connector_slope_ = 0.0;
    double blend_ = 0.0;
};

/// Build the steep-arc rotation lift. Throws InfeasibleGeometry when the arcs do
/// not fit disjointly or no connector can respect the slope floor.
inline RotationMapSpec build_rotation_map(int kappa, double epsilon, double d,
                                          double connector_slope_floor, double phase = 0.0)
{
    if (kappa < 1)
        throw InvalidArgument("rotation degree must be >= 1");
    if (!(epsilon > 0.0))
        throw InvalidArgument("epsilon must be positive");
    if (!(d > 0.0 && d < 0.5))
        throw InvalidArgument("d must lie in (0, 1/2)");

    const double k = static_cast<double>(kappa);
    const double arc = epsilon * (1.0 - 2.0 * d);
    const double gap = (1.0 - k * arc) / k;
    if (!(gap > 0.0))
        throw InfeasibleGeometry("steep arcs of total length " + std::to_string(k * arc) +
                                 " do not fit on the circle");
    const double steep = 1.0 / epsilon;
    const double mean = 2.0 * d / gap;
    if (!(mean < steep))
        throw InfeasibleGeometry("connector mean slope exceeds the steep-arc slope");
    if (!(connector_slope_floor < mean))
        throw InfeasibleGeometry("connector slope floor " + std::to_string(connector_slope_floor) +
                                 " is not below the mean connector slope " + std::to_string(mean));
    const double s_mid = 0.5 * (std::max(connector_slope_floor, 0.0) + mean);
    const double blend = (2.0 * d - s_mid * gap) / (steep - s_mid);
    if (!(blend > 0.0 && 2.0 * blend < gap))
        throw InfeasibleGeometry("connector blends do not fit in the gap");

    RotationMapSpec r;
    r.kappa = kappa;
    r.epsilon = epsilon;
    r.d = d;
    r.slope_floor = connector_slope_floor;
    r.phase = phase;
    r.connector_slope_ = s_mid;
    r.blend_ = blend;

    // Base period [-gap, 1 - gap): connector -1, then arc 0, connector 0, ..., arc kappa-1.
    const double period = arc + gap;
    auto add_connector = [&](double x0, double y0) {
        const double q = (s_mid - steep) / (2.0 * blend);
        r.pieces_.push_back({x0, x0 + blend, y0, steep, q, 0.0});
        const double y1 = y0 + blend * (steep + s_mid) / 2.0;
        const double xm = x0 + blend;
        const double xe = x0 + gap - blend;
        r.pieces_.push_back({xm, xe, y1, s_mid, 0.0, 0.0});
        const double y2 = y1 + s_mid * (xe - xm);
        r.pieces_.push_back({xe, x0 + gap, y2, s_mid, (steep - s_mid) / (2.0 * blend), 0.0});
    };
    add_connector(-gap, -d);
    for (int l = 0; l < kappa; ++l) {
        const double xa = static_cast<double>(l) * period;
        r.pieces_.push_back({xa, xa + arc, d + static_cast<double>(l), steep, 0.0, 0.0});
        r.arcs_.emplace_back(xa, xa + arc);
        if (l + 1 < kappa)
            add_connector(xa + arc, 1.0 - d + static_cast<double>(l));
    }
    r.start_ = -gap;
    r.knots_.reserve(r.pieces_.size());
    for (const auto& p : r.pieces_)
        r.knots_.push_back(p.x0);

    // Midpoint of connector -1 (value 0) sits at x = phase.
    r.offset_ = gap / 2.0 + phase;
    r.shift_ = 0.0;
    r.shift_ = -std::floor(r.lift(0.0));
    return r;
}

} // namespace eirnet
