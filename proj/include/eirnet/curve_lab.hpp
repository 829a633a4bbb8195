#pragma once

// Push-forward of a curve along the unstable direction of A under H, written
// in (u; z_1..z_N) coordinates as the composition Phi3 o Phi2 o Phi1 acting on
// graphs u -> z. Graph values are exact at every stored sample: samples are
// carried by the pointwise maps and new ones are evaluated from the orbit of
// the corresponding point of gamma_0, so refinement never interpolates.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "eirnet/errors.hpp"
#include "eirnet/fiber_flow.hpp"
#include "eirnet/model.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

enum class CurveStage { theta, psi, zeta };
enum class MarkerTag : std::uint8_t { none, jump_up, jump_down, kink };

inline const char* to_string(MarkerTag t) noexcept
{
    switch (t) {
    case MarkerTag::none: return "";
    case MarkerTag::jump_up: return "jump_up";
    case MarkerTag::jump_down: return "jump_down";
    case MarkerTag::kink: return "kink";
    }
    return "?";
}

struct CurveMarker {
    double u0 = 0.0;            ///< generation-0 parameter; position is scale * u0
    std::size_t component = 0;  ///< component whose pole crossing created it
    double pole = 0.0;          ///< 0 or 1/2
    int generation = 0;
    std::vector<MarkerTag> tags; ///< effect on each component
};

/// Geometry shared by every graph of one experiment: iota_k(u) = x_k + beta u
/// with x_k the x-coordinate of A^k(anchor), and u = e^{lambda k} u0.
struct CurveContext {
    double beta = 0.0;
    double lambda = 0.0;
    double inv_growth = 0.0; ///< e^{-lambda}
    std::vector<double> anchor_x;
    std::vector<double> anchor_y;
    std::vector<double> scales;

    static CurveContext make(const AnosovSpec& anosov, double x_anchor, double y_anchor)
    {
        if (!(anosov.leading_eigenvalue > 0.0))
            throw InvalidArgument("curve pushing needs a positive leading eigenvalue");
        CurveContext c;
        c.beta = anosov.beta;
        c.lambda = anosov.lambda;
        c.inv_growth = std::exp(-anosov.lambda);
        c.anchor_x.push_back(wrap(x_anchor));
        c.anchor_y.push_back(wrap(y_anchor));
        c.scales.push_back(1.0);
        return c;
    }

    void extend(std::size_t n, const AnosovSpec& anosov)
    {
        while (anchor_x.size() <= n) {
            const auto [x, y] = anosov.apply(anchor_x.back(), anchor_y.back());
            anchor_x.push_back(x);
            anchor_y.push_back(y);
            scales.push_back(std::exp(lambda * static_cast<double>(scales.size())));
        }
    }

    double iota(std::size_t k, double u0) const noexcept
    {
        return wrap(anchor_x[k] + beta * (scales[k] * u0));
    }
};

/// Graph u -> (z_1..z_N) over [scale u0_begin, scale u0_end], sampled. Two
/// consecutive samples with the same u0 hold the left and right limits at a
/// marker; samples between such pairs form segments on which every component
/// is C^1 and increasing.
class PiecewiseGraph {
public:
    std::size_t n_components = 0;
    int generation = 0;
    CurveStage stage = CurveStage::theta;
    double u0_begin = 0.0;
    double u0_end = 0.0;
    CurveContext ctx;

    std::vector<double> u0;
    std::vector<double> value; ///< sample-major, n_components per sample
    std::vector<double> slope;
    std::vector<std::int32_t> side_count; ///< one-sided inhibiting count at fresh markers, else -1
    std::vector<CurveMarker> markers;
    std::size_t floor_hits = 0; ///< refinements stopped by the u resolution

    std::size_t size() const noexcept { return u0.size(); }
    double scale() const noexcept { return ctx.scales[static_cast<std::size_t>(generation)]; }
    double u(std::size_t k) const noexcept { return scale() * u0[k]; }
    double domain_begin() const noexcept { return scale() * u0_begin; }
    double domain_end() const noexcept { return scale() * u0_end; }
    double domain_length() const noexcept { return scale() * (u0_end - u0_begin); }
    double iota_offset() const noexcept { return ctx.anchor_x[static_cast<std::size_t>(generation)]; }

    double v(std::size_t k, std::size_t i) const noexcept { return value[k * n_components + i]; }
    double s(std::size_t k, std::size_t i) const noexcept { return slope[k * n_components + i]; }

    /// True when samples k and k+1 are the two sides of a marker.
    bool is_break(std::size_t k) const noexcept { return u0[k + 1] == u0[k]; }

    void reserve(std::size_t n)
    {
        u0.reserve(n);
        value.reserve(n * n_components);
        slope.reserve(n * n_components);
        side_count.reserve(n);
    }

    void push(double u0v, const double* vals, const double* slps, std::int32_t side = -1)
    {
        u0.push_back(u0v);
        value.insert(value.end(), vals, vals + n_components);
        slope.insert(slope.end(), slps, slps + n_components);
        side_count.push_back(side);
    }
};

namespace detail {

inline double stage_tau(const ModelParams& params, std::size_t count)
{
    return (1.0 - params.b) / (1.0 - params.phi(count));
}

inline std::size_t count_inhibiting(const double* z, std::size_t n) noexcept
{
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        c += in_inhibiting_arc(z[i]) ? 1 : 0;
    return c;
}

// psi = theta + r(iota_n(u)) in place.
inline void add_rotation(const CurveContext& ctx, const ModelParams& params, std::size_t gen,
                         double u0, double* val, double* slp)
{
    const double x = ctx.iota(gen, u0);
    for (std::size_t i = 0; i < params.n_units; ++i) {
        double r = 0.0, rs = 0.0;
        params.rotations[i].evaluate(x, r, rs);
        val[i] = wrap(val[i] + r);
        slp[i] += ctx.beta * rs;
    }
}

// zeta = g^tau(psi) in place; `side` overrides the inhibiting count.
inline void apply_flow(const ModelParams& params, double* val, double* slp, std::int32_t side)
{
    const std::size_t n = params.n_units;
    const std::size_t count =
        side >= 0 ? static_cast<std::size_t>(side) : count_inhibiting(val, n);
    const double tau = stage_tau(params, count);
    for (std::size_t i = 0; i < n; ++i) {
        const FlowEvaluation ev = ns_evolve(params.fibers[i], val[i], tau);
        val[i] = ev.z_end;
        slp[i] = ev.dz * slp[i];
    }
}

} // namespace detail

/// theta_n(u0) and its u-derivative, from the orbit of gamma_0(u0).
inline void exact_theta(const CurveContext& ctx, const ModelParams& params, double u0, int n,
                        double* val, double* slp)
{
    const std::size_t nu = params.n_units;
    std::fill(val, val + nu, 0.0);
    std::fill(slp, slp + nu, 0.0);
    for (int k = 0; k < n; ++k) {
        detail::add_rotation(ctx, params, static_cast<std::size_t>(k), u0, val, slp);
        detail::apply_flow(params, val, slp, -1);
        for (std::size_t i = 0; i < nu; ++i)
            slp[i] = slp[i] * ctx.inv_growth;
    }
}

/// psi_n(u0) evaluated exactly.
inline void exact_psi(const CurveContext& ctx, const ModelParams& params, double u0, int n,
                      double* val, double* slp)
{
    exact_theta(ctx, params, u0, n, val, slp);
    detail::add_rotation(ctx, params, static_cast<std::size_t>(n), u0, val, slp);
}

/// Generation-0 graph theta_0 = 0 on [u0_begin, u0_end] (a subinterval of
/// [0, a]); u = 0 sits at the anchor point of W^u_A.
inline PiecewiseGraph init_curve_piece(double u0_begin, double u0_end, double x_anchor,
                                       double y_anchor, const ModelParams& params)
{
    if (!(u0_end > u0_begin))
        throw InvalidArgument("curve domain must have positive length");
    PiecewiseGraph g;
    g.n_components = params.n_units;
    g.ctx = CurveContext::make(params.anosov, x_anchor, y_anchor);
    g.u0_begin = u0_begin;
    g.u0_end = u0_end;
    const std::vector<double> zeros(params.n_units, 0.0);
    g.push(u0_begin, zeros.data(), zeros.data());
    g.push(u0_end, zeros.data(), zeros.data());
    return g;
}

inline PiecewiseGraph init_curve(double a, double x_anchor, const ModelParams& params,
                                 double y_anchor = 0.0)
{
    return init_curve_piece(0.0, a, x_anchor, y_anchor, params);
}

struct RefineOptions {
    double tolerance = 1e-3; ///< max change of any component between neighbours
    double du_min = 1e-12;   ///< no splitting below this spacing in u
    std::size_t max_samples = std::numeric_limits<std::size_t>::max();
};

/// Thrown by apply_phi1 when the refined graph would exceed max_samples.
class SampleCapReached : public Error {
public:
    SampleCapReached() : Error("curve sample cap reached") {}
};

namespace detail {

struct SampleBuf {
    double u0 = 0.0;
    std::vector<double> theta, theta_slope, psi, psi_slope;
};

inline bool needs_split(const SampleBuf& a, const SampleBuf& b, double du, double tol)
{
    for (std::size_t i = 0; i < a.psi.size(); ++i) {
        const double d = wrap(b.psi[i] - a.psi[i]);
        const double est = 0.5 * (a.psi_slope[i] + b.psi_slope[i]) * du;
        if (d > tol || est > tol)
            return true;
    }
    return false;
}

} // namespace detail

/// Phi1: theta_n -> psi_n = theta_n + r(iota_n(u)). Inserts exact samples until
/// neighbouring psi values differ by less than the tolerance. When
/// theta_range is given it receives the lifted range of theta_n per component
/// on the refined samples.
inline PiecewiseGraph apply_phi1(const PiecewiseGraph& g, const ModelParams& params,
                                 const RefineOptions& opt = {},
                                 std::vector<double>* theta_range = nullptr)
{
    if (g.stage != CurveStage::theta)
        throw InvalidArgument("apply_phi1 expects a theta-stage graph");
    const std::size_t n = g.n_components;
    const auto gen = static_cast<std::size_t>(g.generation);
    PiecewiseGraph out;
    out.n_components = n;
    out.generation = g.generation;
    out.stage = CurveStage::psi;
    out.u0_begin = g.u0_begin;
    out.u0_end = g.u0_end;
    out.ctx = g.ctx;
    out.markers = g.markers;
    out.floor_hits = g.floor_hits;
    out.reserve(g.size() * 3);

    std::vector<double> th_range(n, 0.0), th_prev(n, 0.0);
    bool have_prev = false;
    auto emit = [&](const detail::SampleBuf& sb) {
        for (std::size_t i = 0; i < n; ++i) {
            if (have_prev)
                th_range[i] += wrap(sb.theta[i] - th_prev[i]);
            th_prev[i] = sb.theta[i];
        }
        have_prev = true;
        if (out.size() >= opt.max_samples)
            throw SampleCapReached();
        out.push(sb.u0, sb.psi.data(), sb.psi_slope.data());
    };
    auto carried = [&](std::size_t k) {
        detail::SampleBuf sb;
        sb.u0 = g.u0[k];
        sb.theta.assign(g.value.begin() + static_cast<std::ptrdiff_t>(k * n),
                        g.value.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
        sb.theta_slope.assign(g.slope.begin() + static_cast<std::ptrdiff_t>(k * n),
                              g.slope.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
        sb.psi = sb.theta;
        sb.psi_slope = sb.theta_slope;
        detail::add_rotation(g.ctx, params, gen, sb.u0, sb.psi.data(), sb.psi_slope.data());
        return sb;
    };
    auto fresh = [&](double u0v) {
        detail::SampleBuf sb;
        sb.u0 = u0v;
        sb.theta.resize(n);
        sb.theta_slope.resize(n);
        exact_theta(g.ctx, params, u0v, g.generation, sb.theta.data(), sb.theta_slope.data());
        sb.psi = sb.theta;
        sb.psi_slope = sb.theta_slope;
        detail::add_rotation(g.ctx, params, gen, u0v, sb.psi.data(), sb.psi_slope.data());
        return sb;
    };
    const double scale = g.scale();
    // emits everything strictly between a and b
    std::function<void(const detail::SampleBuf&, const detail::SampleBuf&)> refine =
        [&](const detail::SampleBuf& a, const detail::SampleBuf& b) {
            const double du = scale * (b.u0 - a.u0);
            if (!detail::needs_split(a, b, du, opt.tolerance))
                return;
            const double mid = 0.5 * (a.u0 + b.u0);
            if (du <= opt.du_min || mid <= a.u0 || mid >= b.u0) {
                ++out.floor_hits;
                return;
            }
            const detail::SampleBuf m = fresh(mid);
            refine(a, m);
            emit(m);
            refine(m, b);
        };

    detail::SampleBuf cur = carried(0);
    emit(cur);
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        detail::SampleBuf next = carried(k + 1);
        if (!g.is_break(k))
            refine(cur, next);
        emit(next);
        cur = std::move(next);
    }
    if (theta_range)
        *theta_range = th_range;
    return out;
}

struct CrossingCounts {
    std::vector<std::size_t> new_jumps; ///< X_n^i: jumps created in component i
    std::size_t new_markers = 0;
};

namespace detail {

struct PendingCrossing {
    double u0 = 0.0;
    std::size_t component = 0;
    double pole = 0.0;
};

// First double u0 in (lo, hi] on the far side of the pole crossing of psi_j.
// Sides are decided by the same inhibiting-arc test exact_theta uses for tau,
// and the bracket is closed down to adjacent doubles, so any later sample
// evaluated exactly agrees with the marker pair. Interpolation probes first,
// bisection as fallback.
inline double locate_crossing(const CurveContext& ctx, const ModelParams& params, int gen,
                              std::size_t j, double lo, double hi, double psi_lo, double pole,
                              double inc_hi, double u_tol, std::vector<double>& val,
                              std::vector<double>& slp)
{
    const double offset = wrap(pole - psi_lo);
    double f_last = 0.0;
    auto crossed = [&](double u0v) {
        exact_psi(ctx, params, u0v, gen, val.data(), slp.data());
        const double f = wrap(val[j] - psi_lo);
        // rounding can put a point just behind psi_lo; that reads as ~1
        f_last = f > 0.5 * (1.0 + inc_hi) ? 0.0 : f;
        const bool inh = in_inhibiting_arc(val[j]);
        return pole == 0.5 ? inh : !inh;
    };
    const double scale = ctx.scales[static_cast<std::size_t>(gen)];
    double f_lo = 0.0;
    double f_hi = inc_hi;
    bool bisect_next = false;
    for (int iter = 0; iter < 400; ++iter) {
        const double w = hi - lo;
        const double mid = lo + 0.5 * w;
        if (mid <= lo || mid >= hi)
            break;
        if (!bisect_next && f_hi > f_lo && scale * w > u_tol) {
            const double guess = lo + (offset - f_lo) / (f_hi - f_lo) * w;
            const double pad = 0.5 * u_tol / scale;
            // probe a tight bracket around the interpolated root
            const double a = std::max(guess - pad, lo + 0.0625 * w);
            const double b = std::min(guess + pad, hi - 0.0625 * w);
            if (a < b) {
                if (crossed(a)) {
                    hi = a;
                    f_hi = f_last;
                } else {
                    lo = a;
                    f_lo = f_last;
                    if (crossed(b)) {
                        hi = b;
                        f_hi = f_last;
                    } else {
                        lo = b;
                        f_lo = f_last;
                    }
                }
                bisect_next = (hi - lo) > 0.25 * w;
                continue;
            }
        }
        if (crossed(mid)) {
            hi = mid;
            f_hi = f_last;
        } else {
            lo = mid;
            f_lo = f_last;
        }
        bisect_next = false;
    }
    return hi;
}

} // namespace detail

/// Phi2: psi_n -> zeta_n = (g_i^{tau(psi_n)}(psi_n^i))_i. Pole crossings of any
/// component are located and turned into markers first: a kink for the
/// crossing component, a jump in every other component whose direction is
/// sign(tau_R - tau_L) sign(v_i(psi_i)).
inline PiecewiseGraph apply_phi2(const PiecewiseGraph& g, const ModelParams& params,
                                 CrossingCounts* counts = nullptr, double u_tol = 1e-12)
{
    if (g.stage != CurveStage::psi)
        throw InvalidArgument("apply_phi2 expects a psi-stage graph");
    const std::size_t n = g.n_components;
    PiecewiseGraph out;
    out.n_components = n;
    out.generation = g.generation;
    out.stage = CurveStage::zeta;
    out.u0_begin = g.u0_begin;
    out.u0_end = g.u0_end;
    out.ctx = g.ctx;
    out.markers = g.markers;
    out.floor_hits = g.floor_hits;
    out.reserve(g.size() + 16);
    CrossingCounts cc;
    cc.new_jumps.assign(n, 0);

    std::vector<double> val(n), slp(n);
    std::vector<detail::PendingCrossing> pending;
    std::vector<bool> skip_sample(g.size(), false);
    struct Insert {
        std::size_t before; // index of the carried sample the pair precedes
        detail::PendingCrossing c;
    };
    std::vector<Insert> inserts;

    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        if (g.is_break(k))
            continue;
        pending.clear();
        for (std::size_t j = 0; j < n; ++j) {
            const double a = g.v(k, j);
            const double inc = wrap(g.v(k + 1, j) - a);
            for (double pole : {0.0, 0.5}) {
                const double off = wrap(pole - a);
                if (off > 0.0 && off <= inc) {
                    const double u_star = detail::locate_crossing(
                        g.ctx, params, g.generation, j, g.u0[k], g.u0[k + 1], a, pole, inc, u_tol,
                        val, slp);
                    pending.push_back({u_star, j, pole});
                }
            }
        }
        std::sort(pending.begin(), pending.end(),
                  [](const auto& x, const auto& y) { return x.u0 < y.u0; });
        for (const auto& c : pending) {
            inserts.push_back({k + 1, c});
            // a crossing found exactly on an interior sample replaces that sample
            if (c.u0 == g.u0[k + 1] && k + 2 < g.size())
                skip_sample[k + 1] = true;
        }
    }

    auto emit_carried = [&](std::size_t k) {
        std::copy_n(g.value.begin() + static_cast<std::ptrdiff_t>(k * n), n, val.begin());
        std::copy_n(g.slope.begin() + static_cast<std::ptrdiff_t>(k * n), n, slp.begin());
        detail::apply_flow(params, val.data(), slp.data(), g.side_count[k]);
        out.push(g.u0[k], val.data(), slp.data());
    };
    auto emit_marker = [&](const detail::PendingCrossing& c) {
        std::vector<double> pv(n), ps(n);
        exact_psi(g.ctx, params, c.u0, g.generation, pv.data(), ps.data());
        pv[c.component] = c.pole;
        std::size_t base = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != c.component)
                base += in_inhibiting_arc(pv[i]) ? 1 : 0;
        // increasing psi_j: below 1/2 on the left of a 1/2-crossing, inside (1/2,1) left of 0
        const auto left = static_cast<std::int32_t>(base + (c.pole == 0.0 ? 1 : 0));
        const auto right = static_cast<std::int32_t>(base + (c.pole == 0.5 ? 1 : 0));
        CurveMarker m;
        m.u0 = c.u0;
        m.component = c.component;
        m.pole = c.pole;
        m.generation = g.generation;
        m.tags.assign(n, MarkerTag::none);
        const int dtau = right > left ? 1 : -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c.component) {
                m.tags[i] = MarkerTag::kink;
                continue;
            }
            const double vi = params.fibers[i].field(pv[i]);
            const int sv = vi > 0.0 ? 1 : (vi < 0.0 ? -1 : 0);
            if (sv * dtau > 0)
                m.tags[i] = MarkerTag::jump_up;
            else if (sv * dtau < 0)
                m.tags[i] = MarkerTag::jump_down;
            if (m.tags[i] != MarkerTag::none)
                ++cc.new_jumps[i];
        }
        out.markers.push_back(std::move(m));
        ++cc.new_markers;
        for (std::int32_t side : {left, right}) {
            std::vector<double> zv = pv, zs = ps;
            detail::apply_flow(params, zv.data(), zs.data(), side);
            out.push(c.u0, zv.data(), zs.data());
        }
    };

    std::size_t next_insert = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        while (next_insert < inserts.size() && inserts[next_insert].before == k)
            emit_marker(inserts[next_insert++].c);
        if (!skip_sample[k])
            emit_carried(k);
    }
    std::sort(out.markers.begin(), out.markers.end(),
              [](const CurveMarker& a, const CurveMarker& b) { return a.u0 < b.u0; });
    if (counts)
        *counts = std::move(cc);
    return out;
}

/// Phi3: u -> e^lambda u. Values are kept, slopes scale by e^{-lambda}.
inline PiecewiseGraph apply_phi3(PiecewiseGraph g, const ModelParams& params)
{
    if (g.stage != CurveStage::zeta)
        throw InvalidArgument("apply_phi3 expects a zeta-stage graph");
    g.ctx.extend(static_cast<std::size_t>(g.generation + 1), params.anosov);
    for (double& s : g.slope)
        s *= g.ctx.inv_growth;
    std::fill(g.side_count.begin(), g.side_count.end(), -1);
    ++g.generation;
    g.stage = CurveStage::theta;
    return g;
}

// ---------------------------------------------------------------------------
// Monotone lift

struct LiftedGraph {
    std::vector<double> u;
    std::vector<double> values;
    std::vector<std::size_t> jumps; ///< k such that (k, k+1) is a jump with size in (0,1)
    double start() const { return values.front(); }
};

/// Greedy monotone lift of sampled circle values: a duplicated u marks a
/// jump; between samples the smallest non-negative increment is used.
inline LiftedGraph lift_samples(std::span<const double> u, std::span<const double> h)
{
    if (u.size() != h.size() || u.empty())
        throw InvalidArgument("lift needs matching, non-empty sample arrays");
    LiftedGraph l;
    l.u.assign(u.begin(), u.end());
    l.values.resize(h.size());
    l.values[0] = wrap(h[0]);
    for (std::size_t k = 1; k < h.size(); ++k) {
        const double inc = wrap(h[k] - h[k - 1]);
        l.values[k] = l.values[k - 1] + inc;
        if (u[k] == u[k - 1] && inc > 0.0)
            l.jumps.push_back(k - 1);
    }
    return l;
}

inline LiftedGraph lift(const PiecewiseGraph& g, std::size_t component)
{
    std::vector<double> u(g.size()), h(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        u[k] = g.u(k);
        h[k] = g.v(k, component);
    }
    return lift_samples(u, h);
}

inline double range_of(const LiftedGraph& l)
{
    const auto [lo, hi] = std::minmax_element(l.values.begin(), l.values.end());
    return *hi - *lo;
}

/// Range of the lift of one component without materialising it.
inline double lifted_range(const PiecewiseGraph& g, std::size_t component)
{
    double total = 0.0;
    for (std::size_t k = 1; k < g.size(); ++k)
        total += wrap(g.v(k, component) - g.v(k - 1, component));
    return total;
}

// ---------------------------------------------------------------------------
// Statistics on psi-stage graphs

namespace detail {

// Parameter intervals t in [0,1] where h0 + d t lies in (m + lo, m + hi) for some integer m.
inline void band_intervals(double h0, double d, double lo, double hi,
                           std::vector<std::pair<double, double>>& out)
{
    if (d <= 0.0) {
        const double w = wrap(h0);
        for (double m : {-1.0, 0.0, 1.0})
            if (w > m + lo && w < m + hi) {
                out.emplace_back(0.0, 1.0);
                return;
            }
        return;
    }
    const double first = std::floor(h0 - hi);
    const double last = std::floor(h0 + d - lo);
    for (double m = first; m <= last; m += 1.0) {
        const double a = std::max(0.0, (m + lo - h0) / d);
        const double b = std::min(1.0, (m + hi - h0) / d);
        if (b > a)
            out.emplace_back(a, b);
    }
}

inline double union_length(std::vector<std::pair<double, double>>& iv)
{
    if (iv.empty())
        return 0.0;
    std::sort(iv.begin(), iv.end());
    double total = 0.0;
    double a = iv[0].first, b = iv[0].second;
    for (std::size_t k = 1; k < iv.size(); ++k) {
        if (iv[k].first > b) {
            total += b - a;
            a = iv[k].first;
            b = iv[k].second;
        } else {
            b = std::max(b, iv[k].second);
        }
    }
    return total + (b - a);
}

} // namespace detail

/// u-measure where component i lies outside I_i^-, per component; values are
/// interpolated linearly in the lift between neighbouring samples.
inline std::vector<double> outside_contracting_measure(const PiecewiseGraph& g,
                                                       const ModelParams& params)
{
    const std::size_t n = g.n_components;
    std::vector<double> out(n, 0.0);
    std::vector<std::pair<double, double>> iv;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        if (g.is_break(k))
            continue;
        const double du = g.u(k + 1) - g.u(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double dm = params.fibers[i].delta_minus;
            iv.clear();
            detail::band_intervals(g.v(k, i), wrap(g.v(k + 1, i) - g.v(k, i)), dm, 1.0 - dm, iv);
            out[i] += du * detail::union_length(iv);
        }
    }
    return out;
}

/// Fraction of the u-domain with psi_n^i outside I_i^-, per component.
inline std::vector<double> concentration_stats(const PiecewiseGraph& g, const ModelParams& params)
{
    auto m = outside_contracting_measure(g, params);
    for (double& x : m)
        x /= g.domain_length();
    return m;
}

/// u-measure where some component is within xi of a pole.
inline double singular_band_measure(const PiecewiseGraph& g, double xi)
{
    if (!(xi > 0.0))
        return 0.0;
    double total = 0.0;
    std::vector<std::pair<double, double>> iv;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        if (g.is_break(k))
            continue;
        iv.clear();
        for (std::size_t i = 0; i < g.n_components; ++i) {
            const double h0 = g.v(k, i);
            const double d = wrap(g.v(k + 1, i) - h0);
            detail::band_intervals(h0, d, -xi, xi, iv);
            detail::band_intervals(h0, d, 0.5 - xi, 0.5 + xi, iv);
        }
        total += (g.u(k + 1) - g.u(k)) * detail::union_length(iv);
    }
    return total;
}

struct SlopeStats {
    std::vector<double> global_min;  ///< over every sample, per component
    std::vector<double> outside_min; ///< over samples with psi^i outside I_i^- (inf if none)
    std::vector<std::size_t> outside_samples;
};

inline SlopeStats min_slope_off_markers(const PiecewiseGraph& g, const ModelParams& params)
{
    const std::size_t n = g.n_components;
    const double inf = std::numeric_limits<double>::infinity();
    SlopeStats s{std::vector<double>(n, inf), std::vector<double>(n, inf),
                 std::vector<std::size_t>(n, 0)};
    for (std::size_t k = 0; k < g.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const double sl = g.s(k, i);
            s.global_min[i] = std::min(s.global_min[i], sl);
            if (circle_distance(g.v(k, i), 0.0) > params.fibers[i].delta_minus) {
                s.outside_min[i] = std::min(s.outside_min[i], sl);
                ++s.outside_samples[i];
            }
        }
    return s;
}

struct SingularMass {
    double mass = 0.0; ///< Cesaro average of the per-generation fractions
    double c3 = 0.0;   ///< mass / xi
};

/// Cesaro average over generations 0..n-1 of the normalised near-pole measure.
inline SingularMass near_singularity_mass(std::span<const double> per_generation_fraction, double xi)
{
    SingularMass r;
    if (per_generation_fraction.empty() || !(xi > 0.0))
        return r;
    r.mass = std::accumulate(per_generation_fraction.begin(), per_generation_fraction.end(), 0.0) /
             static_cast<double>(per_generation_fraction.size());
    r.c3 = r.mass / xi;
    return r;
}

// ---------------------------------------------------------------------------
// Chunked experiment driver

struct CurveExperimentConfig {
    double a = 1.0;
    double x_anchor = 0.1234567;
    double y_anchor = 0.7654321;
    int max_generations = 8;          ///< generations 0 .. max_generations
    std::size_t sample_cap = 100000000; ///< total samples allowed in one generation
    std::size_t chunks = 64;
    std::size_t threads = 1;
    std::vector<double> xi_ladder{0.1, 0.05, 0.025, 0.0125};
    RefineOptions refine{};
};

struct GenerationStats {
    int n = 0;
    double length = 0.0;
    std::size_t samples = 0;
    std::size_t markers = 0;
    std::size_t floor_hits = 0;
    std::vector<std::size_t> new_jumps;  ///< X_n^i
    std::vector<double> range_theta;     ///< R(theta-hat_n^i)
    std::vector<double> range_psi;       ///< R(psi-hat_n^i)
    std::vector<double> range_zeta;      ///< R(zeta-hat_n^i)
    std::vector<double> outside_measure; ///< u-measure with psi^i outside I^-
    std::vector<double> min_slope;
    std::vector<double> min_slope_outside;
    std::vector<double> singular_measure; ///< per xi in the ladder

    std::vector<double> outside_fraction() const
    {
        std::vector<double> f = outside_measure;
        for (double& x : f)
            x /= length;
        return f;
    }
};

struct CurveExperimentResult {
    std::vector<GenerationStats> generations; ///< complete generations only
    std::vector<double> xi_ladder;
    bool truncated_by_cap = false;
};

/// Snapshot hook: (chunk index, psi-stage graph) for every chunk and generation.
using CurveSnapshotSink = std::function<void(std::size_t, const PiecewiseGraph&)>;

namespace detail {

inline GenerationStats empty_stats(int n, std::size_t units, std::size_t ladder)
{
    GenerationStats s;
    s.n = n;
    const double inf = std::numeric_limits<double>::infinity();
    s.new_jumps.assign(units, 0);
    s.range_theta.assign(units, 0.0);
    s.range_psi.assign(units, 0.0);
    s.range_zeta.assign(units, 0.0);
    s.outside_measure.assign(units, 0.0);
    s.min_slope.assign(units, inf);
    s.min_slope_outside.assign(units, inf);
    s.singular_measure.assign(ladder, 0.0);
    return s;
}

inline void merge_into(GenerationStats& acc, const GenerationStats& part)
{
    acc.length += part.length;
    acc.samples += part.samples;
    acc.markers += part.markers;
    acc.floor_hits += part.floor_hits;
    for (std::size_t i = 0; i < acc.new_jumps.size(); ++i) {
        acc.new_jumps[i] += part.new_jumps[i];
        acc.range_theta[i] += part.range_theta[i];
        acc.range_psi[i] += part.range_psi[i];
        acc.range_zeta[i] += part.range_zeta[i];
        acc.outside_measure[i] += part.outside_measure[i];
        acc.min_slope[i] = std::min(acc.min_slope[i], part.min_slope[i]);
        acc.min_slope_outside[i] = std::min(acc.min_slope_outside[i], part.min_slope_outside[i]);
    }
    for (std::size_t j = 0; j < acc.singular_measure.size(); ++j)
        acc.singular_measure[j] += part.singular_measure[j];
}

inline std::vector<GenerationStats> run_chunk(const ModelParams& params,
                                              const CurveExperimentConfig& cfg, std::size_t chunk,
                                              std::size_t chunk_cap,
                                              const CurveSnapshotSink& sink,
                                              std::atomic<int>& gen_limit)
{
    const double w = cfg.a / static_cast<double>(cfg.chunks);
    const double lo = w * static_cast<double>(chunk);
    const double hi = chunk + 1 == cfg.chunks ? cfg.a : w * static_cast<double>(chunk + 1);
    std::vector<GenerationStats> out;
    PiecewiseGraph theta = init_curve_piece(lo, hi, cfg.x_anchor, cfg.y_anchor, params);
    const std::size_t units = params.n_units;
    RefineOptions refine = cfg.refine;
    refine.max_samples = std::min(refine.max_samples, chunk_cap);
    for (int n = 0; n <= cfg.max_generations; ++n) {
        // a generation is only reported if every chunk completes it
        if (n >= gen_limit.load())
            break;
        GenerationStats st = empty_stats(n, units, cfg.xi_ladder.size());
        std::vector<double> th_range;
        PiecewiseGraph psi;
        try {
            psi = apply_phi1(theta, params, refine, &th_range);
        } catch (const SampleCapReached&) {
            int cur = gen_limit.load();
            while (n < cur && !gen_limit.compare_exchange_weak(cur, n)) {
            }
            break;
        }
        CrossingCounts cc;
        PiecewiseGraph zeta = apply_phi2(psi, params, &cc);
        st.length = psi.domain_length();
        st.samples = psi.size();
        st.markers = zeta.markers.size();
        st.floor_hits = psi.floor_hits;
        st.new_jumps = cc.new_jumps;
        for (std::size_t i = 0; i < units; ++i) {
            st.range_theta[i] = th_range[i];
            st.range_psi[i] = lifted_range(psi, i);
            st.range_zeta[i] = lifted_range(zeta, i);
        }
        st.outside_measure = outside_contracting_measure(psi, params);
        const SlopeStats sl = min_slope_off_markers(psi, params);
        st.min_slope = sl.global_min;
        st.min_slope_outside = sl.outside_min;
        for (std::size_t j = 0; j < cfg.xi_ladder.size(); ++j)
            st.singular_measure[j] = singular_band_measure(psi, cfg.xi_ladder[j]);
        if (sink)
            sink(chunk, psi);
        out.push_back(std::move(st));
        theta = apply_phi3(std::move(zeta), params);
    }
    return out;
}

} // namespace detail

/// Pushes gamma_0 = [0, a] forward generation by generation in independent
/// chunks and aggregates per-generation statistics. Additive quantities
/// (measures, ranges, counts) are summed over chunks: chunk end points are
/// shared samples with identical values, so the lift continues across them.
inline CurveExperimentResult run_curve_experiment(const ModelParams& params,
                                                  const CurveExperimentConfig& cfg,
                                                  const CurveSnapshotSink& sink = {})
{
    if (cfg.chunks == 0)
        throw InvalidArgument("curve experiment needs at least one chunk");
    const std::size_t chunk_cap = std::max<std::size_t>(16, cfg.sample_cap / cfg.chunks);
    std::vector<std::vector<GenerationStats>> per_chunk(cfg.chunks);
    std::atomic<int> gen_limit{cfg.max_generations + 1};
    const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, cfg.chunks));
    if (threads == 1 || sink) {
        for (std::size_t c = 0; c < cfg.chunks; ++c)
            per_chunk[c] = detail::run_chunk(params, cfg, c, chunk_cap, sink, gen_limit);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t c = t; c < cfg.chunks; c += threads)
                        per_chunk[c] = detail::run_chunk(params, cfg, c, chunk_cap, {}, gen_limit);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    std::size_t complete = std::numeric_limits<std::size_t>::max();
    for (const auto& pc : per_chunk)
        complete = std::min(complete, pc.size());
    CurveExperimentResult res;
    res.xi_ladder = cfg.xi_ladder;
    res.truncated_by_cap = complete < static_cast<std::size_t>(cfg.max_generations + 1);
    for (std::size_t n = 0; n < complete; ++n) {
        GenerationStats acc =
            detail::empty_stats(static_cast<int>(n), params.n_units, cfg.xi_ladder.size());
        for (const auto& pc : per_chunk)
            detail::merge_into(acc, pc[n]);
        res.generations.push_back(std::move(acc));
    }
    return res;
}

} // namespace eirnet
