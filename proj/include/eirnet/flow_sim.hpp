#pragma once

// Continuous-time flow on M = M_f x T^N. Both phases have closed-form
// w-progress, so section hits are solved algebraically rather than located by
// an integrator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "eirnet/errors.hpp"
#include "eirnet/fiber_flow.hpp"
#include "eirnet/model.hpp"
#include "eirnet/return_map.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

struct FlowState {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0; ///< suspension height in [0,1)
    std::vector<double> z;
    double t = 0.0; ///< absolute time

    bool on_section0() const noexcept { return w == 0.0; }
    SectionPoint section_point() const { return {x, y, z}; }

    static FlowState from_section(const SectionPoint& p, double t0 = 0.0)
    {
        return {p.x, p.y, 0.0, p.z, t0};
    }
};

enum class FlowEventKind { reached_section_b, reached_section_0, activation };

struct FlowEvent {
    FlowEventKind kind;
    double t = 0.0;
    std::size_t unit = 0;          ///< activations only
    const FlowState* state = nullptr; ///< state at the event (section events only)
};

using FlowEventSink = std::function<void(const FlowEvent&)>;

/// Advance s by dt >= 0. Rotation phase: w' = 1, z_i moves linearly at rate
/// r_i(x)/b. Inhibition phase: w' = speed_factor(z), constant over the phase
/// because the arc (1/2,1) is invariant, and z_i follows its fiber flow.
inline void evolve_in_place(FlowState& s, double dt, const ModelParams& params,
                            const FlowEventSink& sink = {})
{
    if (!(dt >= 0.0))
        throw InvalidArgument("evolve requires dt >= 0");
    const double b = params.b;
    const double t_end = s.t + dt;
    double remaining = dt;
    while (remaining > 0.0) {
        if (s.w < b) {
            const double to_b = b - s.w;
            const bool full = remaining >= to_b;
            const double used = full ? to_b : remaining;
            const bool from_start = s.w == 0.0;
            for (std::size_t i = 0; i < s.z.size(); ++i) {
                const double r = params.rotations[i].lift(s.x);
                const double shift = (full && from_start) ? r : r * (used / b);
                if (sink) {
                    // crossings in [z, z + shift)
                    double h = std::ceil(s.z[i] - 0.5) + 0.5;
                    for (; h < s.z[i] + shift; h += 1.0)
                        sink({FlowEventKind::activation, s.t + b * (h - s.z[i]) / r, i, nullptr});
                }
                s.z[i] = wrap(s.z[i] + shift);
            }
            remaining -= used;
            if (full) {
                s.w = b;
                s.t = remaining > 0.0 ? s.t + used : t_end;
                if (sink)
                    sink({FlowEventKind::reached_section_b, s.t, 0, &s});
            } else {
                s.w += used;
                s.t = t_end;
            }
        } else {
            const double rate = speed_factor(s.z, params.phi);
            const double to_one = (1.0 - s.w) / rate;
            const bool full = remaining >= to_one;
            const double used = full ? to_one : remaining;
            for (std::size_t i = 0; i < s.z.size(); ++i)
                s.z[i] = ns_evolve(params.fibers[i], s.z[i], used).z_end;
            remaining -= used;
            if (full) {
                std::tie(s.x, s.y) = params.anosov.apply(s.x, s.y);
                s.w = 0.0;
                s.t = remaining > 0.0 ? s.t + used : t_end;
                if (sink)
                    sink({FlowEventKind::reached_section_0, s.t, 0, &s});
            } else {
                s.w += rate * used;
                if (s.w >= 1.0) // rounding guard; the event belongs to the next call
                    s.w = std::nextafter(1.0, 0.0);
                s.t = t_end;
            }
        }
    }
}

inline FlowState evolve(FlowState s, double dt, const ModelParams& params,
                        const FlowEventSink& sink = {})
{
    evolve_in_place(s, dt, params, sink);
    return s;
}

struct TrajectoryRow {
    double t = 0.0;
    double w = 0.0;
    std::vector<double> z;
};

/// Samples at t0 + k dt_out for k = 0 .. floor((t_end - t0)/dt_out).
inline std::vector<TrajectoryRow> sample_trajectory(const FlowState& s0, double t_end,
                                                    double dt_out, const ModelParams& params)
{
    if (!(dt_out > 0.0))
        throw InvalidArgument("dt_out must be positive");
    std::vector<TrajectoryRow> rows;
    FlowState s = s0;
    const double t0 = s0.t;
    const auto count = static_cast<std::size_t>(std::floor((t_end - t0) / dt_out + 1e-9));
    rows.reserve(count + 1);
    for (std::size_t k = 0; k <= count; ++k) {
        const double target = t0 + static_cast<double>(k) * dt_out;
        if (target > s.t)
            evolve_in_place(s, target - s.t, params);
        rows.push_back({target, s.w, s.z});
    }
    return rows;
}

struct RasterEvent {
    double t = 0.0;
    std::size_t unit = 0;
};

/// Every 0.5-crossing of every fiber coordinate on [s0.t, t_end], time-ordered.
inline std::vector<RasterEvent> activation_raster(const FlowState& s0, double t_end,
                                                  const ModelParams& params)
{
    std::vector<RasterEvent> events;
    FlowState s = s0;
    if (t_end > s.t)
        evolve_in_place(s, t_end - s.t, params, [&](const FlowEvent& e) {
            if (e.kind == FlowEventKind::activation)
                events.push_back({e.t, e.unit});
        });
    std::stable_sort(events.begin(), events.end(), [](const RasterEvent& a, const RasterEvent& b) {
        return a.t < b.t || (a.t == b.t && a.unit < b.unit);
    });
    return events;
}

/// Pearson correlation of two units' activation counts in bins of width `bin`.
inline double activation_correlation(const std::vector<RasterEvent>& raster, std::size_t unit_a,
                                     std::size_t unit_b, double t0, double t1, double bin)
{
    const auto nbins = static_cast<std::size_t>(std::ceil((t1 - t0) / bin));
    std::vector<double> a(nbins, 0.0), b(nbins, 0.0);
    for (const auto& e : raster) {
        if (e.t < t0 || e.t >= t1)
            continue;
        const auto k = std::min(nbins - 1, static_cast<std::size_t>((e.t - t0) / bin));
        if (e.unit == unit_a)
            a[k] += 1.0;
        if (e.unit == unit_b)
            b[k] += 1.0;
    }
    double ma = 0.0, mb = 0.0;
    for (std::size_t k = 0; k < nbins; ++k) {
        ma += a[k];
        mb += b[k];
    }
    ma /= static_cast<double>(nbins);
    mb /= static_cast<double>(nbins);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t k = 0; k < nbins; ++k) {
        sab += (a[k] - ma) * (b[k] - mb);
        saa += (a[k] - ma) * (a[k] - ma);
        sbb += (b[k] - mb) * (b[k] - mb);
    }
    if (saa == 0.0 || sbb == 0.0)
        return 0.0;
    return sab / std::sqrt(saa * sbb);
}

} // namespace eirnet
