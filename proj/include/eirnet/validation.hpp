#pragma once

// Numerical certification of the hyperbolicity assumptions on a parameter set.
// Every check reports a worst-case margin over a grid; a check passes when its
// margin is non-negative (strictly positive where the assumption is strict).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "eirnet/fiber_flow.hpp"
#include "eirnet/model.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    double margin = 0.0;
    std::string reason; ///< empty when passed
    std::map<std::string, double> details;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    std::vector<std::string> warnings;
    std::vector<double> d_computed; ///< dist(boundary of I-, boundary of g^{1-b}(I+)) per unit

    bool all_passed() const noexcept
    {
        return std::all_of(checks.begin(), checks.end(),
                           [](const AssumptionCheck& c) { return c.passed; });
    }

    const AssumptionCheck* find(const std::string& name) const noexcept
    {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

struct GridResolution {
    double points_per_unit = 1e4;
    std::size_t time_samples = 100;
    std::size_t min_points_per_interval = 101;
};

namespace detail {

inline std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k)
        out[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

inline std::size_t grid_count(double width, const GridResolution& grid)
{
    const double n = std::ceil(width * grid.points_per_unit) + 1.0;
    return std::max<std::size_t>(grid.min_points_per_interval, static_cast<std::size_t>(n));
}

/// g^t(z) and (g^t)'(z) for every t in the sorted list, chaining the semigroup.
inline std::vector<FlowEvaluation> evolve_over_times(const NSFlowSpec& flow, double z,
                                                     const std::vector<double>& times)
{
    std::vector<FlowEvaluation> out;
    out.reserve(times.size());
    if (flow.has_closed_form()) {
        for (double t : times)
            out.push_back(ns_evolve(flow, z, t));
        return out;
    }
    double prev_t = 0.0;
    FlowEvaluation acc{wrap(z), 1.0, FlowMethod::rk_integrated, 0.0};
    for (double t : times) {
        const FlowEvaluation inc = ns_evolve(flow, acc.z_end, t - prev_t);
        acc.z_end = inc.z_end;
        acc.dz *= inc.dz;
        acc.est_error += inc.est_error;
        out.push_back(acc);
        prev_t = t;
    }
    return out;
}

inline AssumptionCheck make_check(std::string name, double margin, bool passed,
                                  std::string failure_reason)
{
    AssumptionCheck c;
    c.name = std::move(name);
    c.margin = margin;
    c.passed = passed;
    if (!passed)
        c.reason = std::move(failure_reason);
    return c;
}

} // namespace detail

/// dist(boundary of I-, boundary of g^{1-b}(I+)) for one unit.
inline double separation_margin(const NSFlowSpec& flow, double b)
{
    const double t = 1.0 - b;
    const double lo = ns_evolve(flow, 0.5 - flow.delta_plus, t).z_end;
    const double hi = ns_evolve(flow, 0.5 + flow.delta_plus, t).z_end;
    double best = std::numeric_limits<double>::infinity();
    for (double e : {flow.delta_minus, 1.0 - flow.delta_minus})
        for (double f : {lo, hi})
            best = std::min(best, circle_distance(e, f));
    return best;
}

/// Check (A1)-(A4), the inhibition table and the expansion hypothesis.
/// Failures are report entries; nothing here throws for a bad parameter set
/// except an inconsistent container shape.
inline ValidationReport validate_params(const ModelParams& params,
                                        const GridResolution& grid = {})
{
    ValidationReport report;
    params.check_shape();
    const std::size_t n = params.n_units;
    const double lambda = params.anosov.lambda;

    // Inhibition table.
    {
        const auto& tab = params.phi.table;
        std::vector<std::string> reasons;
        if (tab.front() != 0.0)
            reasons.emplace_back("Φ(0)=0 violated");
        bool increasing = true;
        for (std::size_t k = 1; k < tab.size(); ++k)
            increasing = increasing && tab[k] > tab[k - 1];
        if (!increasing)
            reasons.emplace_back("Φ increasing violated");
        if (!(tab.back() < 1.0))
            reasons.emplace_back("Φ<1 violated");
        std::string joined;
        for (const auto& r : reasons)
            joined += (joined.empty() ? "" : "; ") + r;
        auto c = detail::make_check("phi", 1.0 - tab.back(), reasons.empty(), joined);
        c.details["phi_max"] = tab.back();
        report.checks.push_back(std::move(c));
    }

    // Expansion hypothesis for the range bound (stated for N = 2).
    {
        const double e_lambda = std::exp(lambda);
        if (!(e_lambda > 3.0)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "e^λ ≈ %.3f ≤ 3: range-growth hypothesis fails", e_lambda);
            report.warnings.emplace_back(buf);
        }
        if (n > 2)
            report.warnings.emplace_back(
                "N > 2: the range bound needs a larger expansion than e^λ > 3; threshold not "
                "known in closed form, only e^λ > 3 is checked");
        auto c = detail::make_check("expansion", e_lambda - 3.0, true, "");
        c.details["e_lambda"] = e_lambda;
        c.details["lambda"] = lambda;
        report.checks.push_back(std::move(c));
    }

    const bool phi_ok = report.checks.front().passed;
    const double t_min = 1.0 - params.b;
    const double t_max = phi_ok ? params.tau_max() : t_min;
    const auto times = detail::linspace(t_min, t_max, grid.time_samples);

    for (std::size_t i = 0; i < n; ++i) {
        const NSFlowSpec& flow = params.fibers[i];
        const RotationMapSpec& rot = params.rotations[i];
        const std::string tag = "[" + std::to_string(i) + "]";

        // North-South structure.
        {
            std::vector<std::string> reasons;
            const auto zs = detail::linspace(0.0, 1.0, 2001);
            double scale = 0.0;
            for (double z : zs)
                scale = std::max(scale, std::fabs(flow.field(z)));
            // sin(pi) is not exactly zero in floating point
            const double pole_tol = 1e-12 * scale;
            if (std::fabs(flow.field(0.0)) > pole_tol || std::fabs(flow.field(0.5)) > pole_tol)
                reasons.emplace_back("field does not vanish at the poles");
            if (!(flow.lambda_minus() < 0.0 && flow.lambda_plus() > 0.0))
                reasons.emplace_back("pole derivatives do not satisfy λ⁻ < 0 < λ⁺");
            for (double z : zs) {
                if (z == 0.0 || z == 0.5 || z == 1.0)
                    continue;
                const double v = flow.field(z);
                if ((z < 0.5 && !(v < 0.0)) || (z > 0.5 && !(v > 0.0))) {
                    reasons.emplace_back("field has an extra zero or wrong sign near z=" +
                                         std::to_string(z));
                    break;
                }
            }
            if (!(flow.delta_plus > 0.0 && flow.delta_minus > 0.0 &&
                  0.5 - flow.delta_plus > flow.delta_minus))
                reasons.emplace_back("I+ and I- are not disjoint non-empty arcs");
            std::string joined;
            for (const auto& r : reasons)
                joined += (joined.empty() ? "" : "; ") + r;
            const double ns_margin = std::min(-flow.lambda_minus(), flow.lambda_plus());
            auto c = detail::make_check("ns_flow" + tag, ns_margin, reasons.empty(), joined);
            c.details["lambda_minus"] = flow.lambda_minus();
            c.details["lambda_plus"] = flow.lambda_plus();
            report.checks.push_back(std::move(c));
        }

        // (A1): expansion on I+ beyond e^lambda, contraction on I- below c.
        {
            const auto zs = detail::linspace(0.5 - flow.delta_plus, 0.5 + flow.delta_plus,
                                             detail::grid_count(2.0 * flow.delta_plus, grid));
            double min_log = std::numeric_limits<double>::infinity();
            for (double z : zs)
                for (const auto& ev : detail::evolve_over_times(flow, z, times))
                    min_log = std::min(min_log, std::log(ev.dz));
            const double margin = min_log - lambda;
            auto c = detail::make_check("A1+" + tag, margin, margin > 0.0,
                                        "(g^t)' on I+ does not exceed e^λ");
            c.details["min_log_derivative"] = min_log;
            report.checks.push_back(std::move(c));
        }
        {
            const auto zs = detail::linspace(-flow.delta_minus, flow.delta_minus,
                                             detail::grid_count(2.0 * flow.delta_minus, grid));
            double max_d = 0.0;
            for (double z : zs)
                for (const auto& ev : detail::evolve_over_times(flow, z, times))
                    max_d = std::max(max_d, ev.dz);
            const double margin = flow.contraction_c - max_d;
            auto c = detail::make_check("A1-" + tag, margin,
                                        margin >= 0.0 && flow.contraction_c < 1.0 &&
                                            flow.contraction_c > 0.0,
                                        "(g^t)' on I- exceeds c");
            c.details["max_derivative"] = max_d;
            c.details["c"] = flow.contraction_c;
            report.checks.push_back(std::move(c));
        }

        // (A2): g^t(I+) covers T \ I-, checked through the endpoint images.
        {
            double margin = std::numeric_limits<double>::infinity();
            for (double t : times) {
                const Arc img = ns_image_of_arc(
                    flow, {0.5 - flow.delta_plus, 0.5 + flow.delta_plus}, t);
                const double lo_margin = flow.delta_minus - img.start; // lo endpoint sits in [0, delta-]
                const double hi_margin = img.end - (1.0 - flow.delta_minus);
                margin = std::min({margin, lo_margin, hi_margin});
            }
            auto c = detail::make_check("A2" + tag, margin, margin >= 0.0,
                                        "g^t(I+) does not cover the complement of I-");
            report.checks.push_back(std::move(c));
        }

        // d_i and the cross-check against the rotation map's own margin.
        const double d_i = separation_margin(flow, params.b);
        report.d_computed.push_back(d_i);
        {
            const double margin = d_i - rot.d;
            auto c = detail::make_check("d_margin" + tag, margin, margin > 0.0,
                                        "rotation map steep band is narrower than the flow requires");
            c.details["d_computed"] = d_i;
            c.details["d_rotation"] = rot.d;
            report.checks.push_back(std::move(c));
        }

        // (A3)/(A4) on the rotation lift.
        {
            const std::size_t m = static_cast<std::size_t>(grid.points_per_unit);
            const double inv_eps = 1.0 / params.assumptions.epsilon;
            double min_steep_ratio = std::numeric_limits<double>::infinity();
            double min_slope = std::numeric_limits<double>::infinity();
            std::size_t steep_points = 0;
            for (std::size_t k = 0; k < m; ++k) {
                const double x = static_cast<double>(k) / static_cast<double>(m);
                const double s = rot.slope(x);
                min_slope = std::min(min_slope, s);
                const double r = wrap(rot.lift(x));
                if (r > d_i && r < 1.0 - d_i) {
                    ++steep_points;
                    min_steep_ratio = std::min(min_steep_ratio, s / inv_eps);
                }
            }
            // The affine arcs have slope exactly 1/epsilon, so the slope test is
            // non-strict up to rounding; the margin is how far the steep band
            // extends past the band where steepness is required.
            const bool slope_ok = steep_points > 0 && min_steep_ratio >= 1.0 - 1e-12;
            const double region_margin = d_i - rot.d;
            auto c3 = detail::make_check("A3" + tag, region_margin, slope_ok && region_margin > 0.0,
                                         slope_ok ? "steep band does not cover (d_i, 1-d_i)"
                                                  : "r' <= 1/ε where r mod 1 in (d_i, 1-d_i)");
            c3.details["min_slope_ratio"] = min_steep_ratio;
            c3.details["steep_points"] = static_cast<double>(steep_points);
            c3.details["max_curvature"] = rot.max_curvature();
            report.checks.push_back(std::move(c3));

            const double margin4 = min_slope - params.assumptions.c_prime;
            auto c4 = detail::make_check("A4" + tag, margin4, margin4 > 0.0, "r' <= c' somewhere");
            c4.details["min_slope"] = min_slope;
            report.checks.push_back(std::move(c4));
        }
    }
    return report;
}

} // namespace eirnet
