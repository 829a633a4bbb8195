#pragma once

// North-South circle flows: vector fields on T vanishing at the S-pole 0
// (attracting) and the N-pole 1/2 (repelling), their time-t maps and the
// spatial derivative of those maps.

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "eirnet/errors.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

enum class FlowKind { sine_family, projective, tabulated_field };

inline const char* to_string(FlowKind k) noexcept
{
    switch (k) {
    case FlowKind::sine_family: return "sine_family";
    case FlowKind::projective: return "projective";
    case FlowKind::tabulated_field: return "tabulated_field";
    }
    return "?";
}

/// C^2 periodic interpolant of a field sampled on the uniform grid k/M.
class PeriodicCubicSpline {
public:
    PeriodicCubicSpline() = default;

    explicit PeriodicCubicSpline(std::vector<double> values) : values_(std::move(values))
    {
        const std::size_t m = values_.size();
        if (m < 4)
            throw InvalidArgument("tabulated field needs at least 4 samples");
        h_ = 1.0 / static_cast<double>(m);
        curv_.assign(m, 0.0);
        std::vector<double> rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double prev = values_[(k + m - 1) % m];
            const double next = values_[(k + 1) % m];
            rhs[k] = 6.0 * (next - 2.0 * values_[k] + prev) / (h_ * h_);
        }
        // Cyclic system M[k-1] + 4 M[k] + M[k+1] = rhs[k]; strictly diagonally
        // dominant, so Gauss-Seidel contracts by at least 1/2 per sweep.
        double scale = 0.0;
        for (double r : rhs)
            scale = std::max(scale, std::fabs(r));
        for (int sweep = 0; sweep < 400; ++sweep) {
            double change = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double updated =
                    (rhs[k] - curv_[(k + m - 1) % m] - curv_[(k + 1) % m]) / 4.0;
                change = std::max(change, std::fabs(updated - curv_[k]));
                curv_[k] = updated;
            }
            if (change <= 1e-16 * (scale + 1.0))
                break;
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& samples() const noexcept { return values_; }

    double value(double z) const noexcept { return eval<0>(z); }
    double derivative(double z) const noexcept { return eval<1>(z); }

private:
    template <int Order>
    double eval(double z) const noexcept
    {
        const std::size_t m = values_.size();
        const double s = wrap(z) / h_;
        std::size_t k = static_cast<std::size_t>(s);
        if (k >= m)
            k = m - 1;
        const double t = s - static_cast<double>(k);
        const std::size_t k1 = (k + 1) % m;
        const double a = 1.0 - t;
        const double b = t;
        const double mk = curv_[k];
        const double mk1 = curv_[k1];
        if constexpr (Order == 0) {
            return a * values_[k] + b * values_[k1] +
                   ((a * a * a - a) * mk + (b * b * b - b) * mk1) * h_ * h_ / 6.0;
        } else {
            return (values_[k1] - values_[k]) / h_ +
                   ((-3.0 * a * a + 1.0) * mk + (3.0 * b * b - 1.0) * mk1) * h_ / 6.0;
        }
    }

    std::vector<double> values_;
    std::vector<double> curv_;
    double h_ = 0.0;
};

/// One North-South fiber flow with the arcs used by the hyperbolicity assumptions.
struct NSFlowSpec {
    FlowKind kind = FlowKind::sine_family;
    double amplitude = 0.0;   ///< sine_family: v(z) = -amplitude sin(2 pi z)
    double alpha = 0.0;       ///< projective: flow induced by exp(t diag(alpha, -alpha)) on P^1
    PeriodicCubicSpline table; ///< tabulated_field samples of v at k/M
    double delta_plus = 0.0;  ///< half-width of I+ around 1/2
    double delta_minus = 0.0; ///< half-width of I- around 0
    double contraction_c = 0.5;

    static NSFlowSpec sine_family(double amplitude, double delta_plus, double delta_minus,
                                  double c = 0.5)
    {
        NSFlowSpec f;
        f.kind = FlowKind::sine_family;
        f.amplitude = amplitude;
        f.delta_plus = delta_plus;
        f.delta_minus = delta_minus;
        f.contraction_c = c;
        return f;
    }

    static NSFlowSpec projective(double alpha, double delta_plus, double delta_minus,
                                 double c = 0.5)
    {
        NSFlowSpec f;
        f.kind = FlowKind::projective;
        f.alpha = alpha;
        f.delta_plus = delta_plus;
        f.delta_minus = delta_minus;
        f.contraction_c = c;
        return f;
    }

    /// Samples must be taken at z = k/M with M even so that both poles are nodes.
    static NSFlowSpec tabulated(std::vector<double> samples, double delta_plus,
                                double delta_minus, double c = 0.5)
    {
        if (samples.size() % 2 != 0)
            throw InvalidArgument("tabulated field needs an even number of samples");
        const std::size_t half = samples.size() / 2;
        if (std::fabs(samples[0]) > 1e-12 || std::fabs(samples[half]) > 1e-12)
            throw InvalidArgument("tabulated field must vanish at z = 0 and z = 1/2");
        samples[0] = 0.0;
        samples[half] = 0.0;
        NSFlowSpec f;
        f.kind = FlowKind::tabulated_field;
        f.table = PeriodicCubicSpline(std::move(samples));
        f.delta_plus = delta_plus;
        f.delta_minus = delta_minus;
        f.contraction_c = c;
        return f;
    }

    /// Rate k of the closed-form families: tan(pi z(t)) = tan(pi z0) e^{-k t}.
    double closed_form_rate() const noexcept
    {
        return kind == FlowKind::sine_family ? 2.0 * std::numbers::pi * amplitude : 2.0 * alpha;
    }

    bool has_closed_form() const noexcept { return kind != FlowKind::tabulated_field; }

    double field(double z) const noexcept
    {
        if (kind == FlowKind::tabulated_field)
            return table.value(z);
        return -closed_form_rate() / (2.0 * std::numbers::pi) *
               std::sin(2.0 * std::numbers::pi * z);
    }

    double field_derivative(double z) const noexcept
    {
        if (kind == FlowKind::tabulated_field)
            return table.derivative(z);
        return -closed_form_rate() * std::cos(2.0 * std::numbers::pi * z);
    }

    double lambda_minus() const noexcept { return field_derivative(0.0); }
    double lambda_plus() const noexcept { return field_derivative(0.5); }
};

enum class FlowMethod { closed_form, rk_integrated };

struct FlowEvaluation {
    double z_end = 0.0;
    double dz = 1.0;
    FlowMethod method = FlowMethod::closed_form;
    double est_error = 0.0;
};

namespace detail {

// Keep the image in the same open half-circle as the start point: the poles are
// invariant, so rounding must never move a point onto or across one.
inline double keep_in_half_circle(double z0, double z)
{
    if (z0 > 0.0 && z0 < 0.5) {
        if (z <= 0.0)
            return std::numeric_limits<double>::denorm_min();
        if (z >= 0.5)
            return std::nextafter(0.5, 0.0);
    } else if (z0 > 0.5) {
        if (z <= 0.5)
            return std::nextafter(0.5, 1.0);
        if (z >= 1.0)
            return std::nextafter(1.0, 0.0);
    }
    return z;
}

/// Closed form for fields conjugate to -k/(2 pi) sin(2 pi z); t may be negative.
inline FlowEvaluation closed_form_evolve(double k, double z0, double t)
{
    const double z = wrap(z0);
    FlowEvaluation out;
    out.method = FlowMethod::closed_form;
    const double e = std::exp(-k * t);
    if (z == 0.0 || z == 0.5) {
        out.z_end = z;
        out.dz = (z == 0.0) ? e : 1.0 / e;
        out.est_error = 0.0;
        return out;
    }
    // sin and cos of pi z computed from the distance to the nearest pole so that
    // points within 1e-13 of a pole keep full relative precision.
    constexpr double pi = std::numbers::pi;
    double s0, c0;
    if (z <= 0.25) {
        s0 = std::sin(pi * z);
        c0 = std::cos(pi * z);
    } else if (z < 0.75) {
        const double r = 0.5 - z;
        s0 = std::cos(pi * r);
        c0 = std::sin(pi * r);
    } else {
        const double r = 1.0 - z;
        s0 = std::sin(pi * r);
        c0 = -std::cos(pi * r);
    }
    const double se = s0 * e;
    double theta = std::atan2(se, c0); // in (0, pi): same half-circle as z
    out.z_end = keep_in_half_circle(z, theta / pi);
    // (1 + y0^2)/(1 + y^2) e^{-kt} with y = tan(pi z), rewritten to stay finite at 1/2.
    out.dz = e / (se * se + c0 * c0);
    out.est_error = 4.0 * std::numeric_limits<double>::epsilon();
    return out;
}

inline FlowEvaluation integrate_field(const NSFlowSpec& flow, double z0, double t,
                                      std::size_t step_budget)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 2>; // (z unwrapped, log dz)
    const double start = wrap(z0);
    FlowEvaluation out;
    out.method = FlowMethod::rk_integrated;
    if (t == 0.0) {
        out.z_end = start;
        return out;
    }
    auto rhs = [&flow](const State& s, State& ds, double /*time*/) {
        ds[0] = flow.field(s[0]);
        ds[1] = flow.field_derivative(s[0]);
    };
    constexpr double abs_tol = 1e-13;
    constexpr double rel_tol = 1e-12;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(abs_tol, rel_tol);
    State s{start, 0.0};
    const double dir = t > 0.0 ? 1.0 : -1.0;
    double time = 0.0;
    double dt = dir * std::min(1e-3, std::fabs(t));
    std::size_t accepted = 0;
    std::size_t attempts = 0;
    while (dir * (t - time) > 0.0) {
        if (dir * (time + dt - t) > 0.0)
            dt = t - time;
        if (++attempts > step_budget)
            throw NonConvergence("tabulated field integration exceeded step budget of " +
                                 std::to_string(step_budget));
        if (stepper.try_step(rhs, s, time, dt) == odeint::success)
            ++accepted;
    }
    out.z_end = keep_in_half_circle(start, wrap(s[0]));
    out.dz = std::exp(s[1]);
    out.est_error = static_cast<double>(accepted) * abs_tol;
    return out;
}

} // namespace detail

/// Time-t map g^t(z0) of a North-South flow and its derivative (g^t)'(z0).
inline FlowEvaluation ns_evolve(const NSFlowSpec& flow, double z0, double t,
                                std::size_t step_budget = 200000)
{
    if (!(t >= 0.0))
        throw InvalidArgument("ns_evolve requires t >= 0");
    if (flow.has_closed_form())
        return detail::closed_form_evolve(flow.closed_form_rate(), z0, t);
    return detail::integrate_field(flow, z0, t, step_budget);
}

/// Backward flow g^{-t}; only used to invert the return map in tests.
inline FlowEvaluation ns_evolve_backward(const NSFlowSpec& flow, double z0, double t,
                                         std::size_t step_budget = 200000)
{
    if (flow.has_closed_form())
        return detail::closed_form_evolve(flow.closed_form_rate(), z0, -t);
    return detail::integrate_field(flow, z0, -t, step_budget);
}

/// Counter-clockwise arc from start to end. start == end is a single point.
struct Arc {
    double start = 0.0;
    double end = 0.0;

    double length() const noexcept { return wrap(end - start); }
    bool contains(double z) const noexcept { return wrap(z - start) <= length(); }
};

/// True iff `inner` is a sub-arc of `outer`.
inline bool arc_contains(const Arc& outer, const Arc& inner) noexcept
{
    const double off = wrap(inner.start - outer.start);
    return off + inner.length() <= outer.length();
}

/// Image of an arc under g^t; flow maps preserve orientation so endpoints suffice.
inline Arc ns_image_of_arc(const NSFlowSpec& flow, const Arc& arc, double t)
{
    if (t == 0.0)
        return {wrap(arc.start), wrap(arc.end)};
    return {ns_evolve(flow, arc.start, t).z_end, ns_evolve(flow, arc.end, t).z_end};
}

} // namespace eirnet
