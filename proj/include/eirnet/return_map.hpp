#pragma once

// First-return map H = H2 o H1 on the section Sigma_0 = T^2 x T^N, its tangent
// cocycle and the orbit statistics built on top of it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eirnet/errors.hpp"
#include "eirnet/fiber_flow.hpp"
#include "eirnet/model.hpp"
#include "eirnet/parallel.hpp"
#include "eirnet/rng.hpp"
#include "eirnet/torus.hpp"

namespace eirnet {

struct SectionPoint {
    double x = 0.0;
    double y = 0.0;
    std::vector<double> z;
};

struct Activation {
    std::size_t unit = 0;
    double time = 0.0; ///< offset inside the rotation phase, in [0, b)
};

struct StepRecord {
    SectionPoint next;
    double tau = 0.0;
    std::vector<Activation> activations;
};

inline constexpr double singularity_tolerance = 1e-12;

/// Rotation phase: z_i <- z_i + r_i(x) mod 1; base unchanged.
inline SectionPoint h1(const SectionPoint& p, const ModelParams& params)
{
    SectionPoint q = p;
    for (std::size_t i = 0; i < q.z.size(); ++i)
        q.z[i] = wrap(q.z[i] + params.rotations[i].lift(p.x));
    return q;
}

/// Inhibition phase from Sigma_b: base <- A(x,y), each fiber flows for tau.
inline SectionPoint h2(const SectionPoint& q, const ModelParams& params, double* tau_out = nullptr)
{
    const double tau = return_time(q.z, params);
    SectionPoint p;
    std::tie(p.x, p.y) = params.anosov.apply(q.x, q.y);
    p.z.resize(q.z.size());
    for (std::size_t i = 0; i < q.z.size(); ++i)
        p.z[i] = ns_evolve(params.fibers[i], q.z[i], tau).z_end;
    if (tau_out)
        *tau_out = tau;
    return p;
}

/// Times t in [0,b) where z + (t/b) r passes a half-integer. r > 0.
inline void rotation_crossings(std::size_t unit, double z, double r, double b,
                               std::vector<Activation>& out)
{
    if (!(r > 0.0))
        return;
    // half-integers h with z <= h < z + r
    double h = std::ceil(z - 0.5) + 0.5;
    for (; h < z + r; h += 1.0)
        out.push_back({unit, b * (h - z) / r});
}

inline StepRecord step(const SectionPoint& p, const ModelParams& params)
{
    StepRecord rec;
    for (std::size_t i = 0; i < p.z.size(); ++i)
        rotation_crossings(i, p.z[i], params.rotations[i].lift(p.x), params.b, rec.activations);
    std::sort(rec.activations.begin(), rec.activations.end(),
              [](const Activation& a, const Activation& b) {
                  return a.time < b.time || (a.time == b.time && a.unit < b.unit);
              });
    rec.next = h2(h1(p, params), params, &rec.tau);
    return rec;
}

/// H^{-1}; test-only. The arc (1/2,1) is invariant under the fiber flows, so
/// tau can be read off the image point.
inline SectionPoint step_inverse(const SectionPoint& p, const ModelParams& params)
{
    const double tau = return_time(p.z, params);
    SectionPoint q;
    std::tie(q.x, q.y) = params.anosov.apply_inverse(p.x, p.y);
    q.z.resize(p.z.size());
    for (std::size_t i = 0; i < p.z.size(); ++i) {
        const double back = ns_evolve_backward(params.fibers[i], p.z[i], tau).z_end;
        q.z[i] = wrap(back - params.rotations[i].lift(q.x));
    }
    return q;
}

// ---------------------------------------------------------------------------
// Tangent cocycle

using Matrix = Eigen::MatrixXd;

struct TangentFrame {
    Matrix basis;                 ///< columns are orthonormal tangent vectors
    std::vector<double> log_norms; ///< accumulated log stretch per column

    static TangentFrame identity(std::size_t dim)
    {
        return {Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)),
                std::vector<double>(dim, 0.0)};
    }

    double orthonormality_error() const
    {
        const Matrix g = basis.transpose() * basis;
        return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    }
};

/// Throws OnSingularity when p sits (within tolerance) on the discontinuity
/// set of DH: a rotated fiber coordinate at a pole, or x at a spline knot.
inline void check_regular(const SectionPoint& p, const SectionPoint& rotated,
                          const ModelParams& params)
{
    for (std::size_t i = 0; i < rotated.z.size(); ++i) {
        if (distance_to_poles(rotated.z[i]) < singularity_tolerance)
            throw OnSingularity("fiber " + std::to_string(i) + " at a pole after rotation");
        if (params.rotations[i].distance_to_breakpoint(p.x) < singularity_tolerance)
            throw OnSingularity("x at a rotation-map knot of unit " + std::to_string(i));
    }
}

/// DH at p in coordinates (x, y, z_1..z_N), tau held locally constant.
/// Also returns log (g_i^tau)' per fiber through fiber_log_derivs when given.
inline Matrix differential(const SectionPoint& p, const ModelParams& params,
                           std::vector<double>* fiber_log_derivs = nullptr, StepRecord* rec = nullptr)
{
    const std::size_t n = p.z.size();
    const SectionPoint q = h1(p, params);
    check_regular(p, q, params);
    const double tau = return_time(q.z, params);
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n + 2), static_cast<Eigen::Index>(n + 2));
    m(0, 0) = static_cast<double>(params.anosov.entries[0][0]);
    m(0, 1) = static_cast<double>(params.anosov.entries[0][1]);
    m(1, 0) = static_cast<double>(params.anosov.entries[1][0]);
    m(1, 1) = static_cast<double>(params.anosov.entries[1][1]);
    if (fiber_log_derivs)
        fiber_log_derivs->assign(n, 0.0);
    if (rec) {
        std::tie(rec->next.x, rec->next.y) = params.anosov.apply(q.x, q.y);
        rec->next.z.resize(n);
        rec->tau = tau;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const FlowEvaluation ev = ns_evolve(params.fibers[i], q.z[i], tau);
        const auto r = static_cast<Eigen::Index>(i + 2);
        m(r, 0) = ev.dz * params.rotations[i].slope(p.x);
        m(r, r) = ev.dz;
        if (fiber_log_derivs)
            (*fiber_log_derivs)[i] = std::log(ev.dz);
        if (rec)
            rec->next.z[i] = ev.z_end;
    }
    return m;
}

namespace detail {

// frame.basis <- Q of (m * basis); step_logs[k] = log |R_kk|.
inline void qr_advance(const Matrix& m, TangentFrame& frame, std::vector<double>& step_logs)
{
    const Matrix mb = m * frame.basis;
    Eigen::HouseholderQR<Matrix> qr(mb);
    Matrix q = qr.householderQ() * Matrix::Identity(mb.rows(), mb.cols());
    step_logs.resize(static_cast<std::size_t>(mb.cols()));
    for (Eigen::Index k = 0; k < mb.cols(); ++k) {
        const double rkk = qr.matrixQR()(k, k);
        step_logs[static_cast<std::size_t>(k)] = std::log(std::fabs(rkk));
        if (rkk < 0.0)
            q.col(k) = -q.col(k);
    }
    frame.basis = std::move(q);
}

} // namespace detail

/// One step of the cocycle on a frame followed by QR re-orthonormalisation.
inline void tangent_step(const SectionPoint& p, TangentFrame& frame, const ModelParams& params)
{
    std::vector<double> logs;
    detail::qr_advance(differential(p, params), frame, logs);
    for (std::size_t k = 0; k < logs.size(); ++k)
        frame.log_norms[k] += logs[k];
}

struct LyapunovResult {
    std::vector<double> exponents;       ///< sorted descending
    std::vector<double> std_errors;      ///< batch-means standard errors, same order
    std::vector<double> fiber_exponents; ///< per unit, Birkhoff average of log (g_i^tau)'
    std::vector<double> fiber_std_errors;
    std::size_t iterations = 0;
    std::size_t restarts = 0;
};

namespace detail {

inline void nudge(SectionPoint& p, Rng& rng, double size)
{
    p.x = wrap(p.x + rng.uniform(-size, size));
    p.y = wrap(p.y + rng.uniform(-size, size));
    for (double& zi : p.z)
        zi = wrap(zi + rng.uniform(-size, size));
}

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& batch_means)
{
    const double k = static_cast<double>(batch_means.size());
    double mean = 0.0;
    for (double v : batch_means)
        mean += v;
    mean /= k;
    double var = 0.0;
    for (double v : batch_means)
        var += (v - mean) * (v - mean);
    var /= std::max(1.0, k - 1.0);
    return {mean, std::sqrt(var / k)};
}

} // namespace detail

/// Benettin QR estimate of the full spectrum of H. A point that lands on the
/// singularity set is replaced by a 1e-9 perturbation (counted in restarts).
inline LyapunovResult lyapunov_spectrum(const SectionPoint& p0, std::size_t n_transient,
                                        std::size_t n_iter, const ModelParams& params,
                                        std::uint64_t seed, std::size_t batches = 50)
{
    if (n_iter == 0)
        throw InvalidArgument("lyapunov_spectrum needs at least one iteration");
    batches = std::clamp<std::size_t>(batches, 1, n_iter);
    const std::size_t dim = p0.z.size() + 2;
    const std::size_t n = p0.z.size();
    Rng rng(seed);
    LyapunovResult res;
    SectionPoint p = p0;

    std::vector<double> step_logs;
    auto safe_step = [&](TangentFrame* frame, std::vector<double>* fiber_logs) {
        for (;;) {
            try {
                StepRecord rec;
                const Matrix m = differential(p, params, fiber_logs, &rec);
                if (frame)
                    detail::qr_advance(m, *frame, step_logs);
                p = std::move(rec.next);
                return;
            } catch (const OnSingularity&) {
                ++res.restarts;
                detail::nudge(p, rng, 1e-9);
            }
        }
    };

    for (std::size_t k = 0; k < n_transient; ++k)
        safe_step(nullptr, nullptr);

    TangentFrame frame = TangentFrame::identity(dim);
    std::vector<double> fiber_logs;
    const std::size_t per_batch = n_iter / batches;
    std::vector<std::vector<double>> batch_spec(dim), batch_fiber(n);
    std::vector<double> sum_spec(dim, 0.0), sum_fiber(n, 0.0);
    std::vector<double> acc_spec(dim, 0.0), acc_fiber(n, 0.0);
    std::size_t in_batch = 0;
    for (std::size_t k = 0; k < n_iter; ++k) {
        safe_step(&frame, &fiber_logs);
        for (std::size_t j = 0; j < dim; ++j)
            acc_spec[j] += step_logs[j];
        for (std::size_t j = 0; j < n; ++j)
            acc_fiber[j] += fiber_logs[j];
        if (++in_batch == per_batch && batch_spec[0].size() < batches) {
            for (std::size_t j = 0; j < dim; ++j) {
                batch_spec[j].push_back(acc_spec[j] / static_cast<double>(in_batch));
                sum_spec[j] += acc_spec[j];
                acc_spec[j] = 0.0;
            }
            for (std::size_t j = 0; j < n; ++j) {
                batch_fiber[j].push_back(acc_fiber[j] / static_cast<double>(in_batch));
                sum_fiber[j] += acc_fiber[j];
                acc_fiber[j] = 0.0;
            }
            in_batch = 0;
        }
    }
    // leftover iterations count towards the means but not the batch errors
    for (std::size_t j = 0; j < dim; ++j)
        sum_spec[j] += acc_spec[j];
    for (std::size_t j = 0; j < n; ++j)
        sum_fiber[j] += acc_fiber[j];

    const double total = static_cast<double>(n_iter);
    std::vector<std::pair<double, double>> spec;
    for (std::size_t j = 0; j < dim; ++j)
        spec.emplace_back(sum_spec[j] / total, detail::mean_and_stderr(batch_spec[j]).second);
    std::sort(spec.begin(), spec.end(), [](auto a, auto b) { return a.first > b.first; });
    for (const auto& [e, s] : spec) {
        res.exponents.push_back(e);
        res.std_errors.push_back(s);
    }
    for (std::size_t j = 0; j < n; ++j) {
        res.fiber_exponents.push_back(sum_fiber[j] / total);
        res.fiber_std_errors.push_back(detail::mean_and_stderr(batch_fiber[j]).second);
    }
    res.iterations = n_iter;
    return res;
}

// ---------------------------------------------------------------------------
// Birkhoff averages over a fixed observable catalog

enum class ObservableKind {
    constant,
    cos_fiber,          ///< cos(2 pi z_i)
    in_contracting_arc, ///< 1{z_i in I_i^-}
    in_inhibiting_arc,  ///< 1{z_i in (1/2,1)}
    activation_rate     ///< activations of unit i per step, or per unit time when flow-weighted
};

inline const char* to_string(ObservableKind k) noexcept
{
    switch (k) {
    case ObservableKind::constant: return "constant";
    case ObservableKind::cos_fiber: return "cos_fiber";
    case ObservableKind::in_contracting_arc: return "in_contracting_arc";
    case ObservableKind::in_inhibiting_arc: return "in_inhibiting_arc";
    case ObservableKind::activation_rate: return "activation_rate";
    }
    return "?";
}

struct Observable {
    ObservableKind kind = ObservableKind::constant;
    std::size_t unit = 0;

    std::string name() const
    {
        if (kind == ObservableKind::constant)
            return "constant";
        return std::string(to_string(kind)) + "[" + std::to_string(unit) + "]";
    }
};

/// The four per-unit catalog observables for every unit.
inline std::vector<Observable> observable_catalog(std::size_t n_units)
{
    std::vector<Observable> out;
    for (std::size_t i = 0; i < n_units; ++i)
        for (auto k : {ObservableKind::cos_fiber, ObservableKind::in_contracting_arc,
                       ObservableKind::in_inhibiting_arc, ObservableKind::activation_rate})
            out.push_back({k, i});
    return out;
}

inline double observe(const Observable& obs, const SectionPoint& p, const ModelParams& params)
{
    switch (obs.kind) {
    case ObservableKind::constant: return 1.0;
    case ObservableKind::cos_fiber: return std::cos(2.0 * std::numbers::pi * p.z.at(obs.unit));
    case ObservableKind::in_contracting_arc:
        return circle_distance(p.z.at(obs.unit), 0.0) <= params.fibers.at(obs.unit).delta_minus ? 1.0
                                                                                                : 0.0;
    case ObservableKind::in_inhibiting_arc: return in_inhibiting_arc(p.z.at(obs.unit)) ? 1.0 : 0.0;
    case ObservableKind::activation_rate: return 0.0; // counted from the step record
    }
    return 0.0;
}

/// Time averages along the H-orbit of p0 over n returns. Point observables are
/// evaluated on Sigma_0; flow weighting gives return k the weight b + tau_k.
/// Activation rate is events per step, or events per unit flow time when weighted.
inline std::vector<double> birkhoff_averages(const SectionPoint& p0,
                                             const std::vector<Observable>& observables,
                                             std::size_t n, const ModelParams& params,
                                             bool flow_weighted = true)
{
    std::vector<double> acc(observables.size(), 0.0);
    double weight_total = 0.0;
    SectionPoint p = p0;
    std::vector<std::size_t> counts(p.z.size());
    for (std::size_t k = 0; k < n; ++k) {
        StepRecord rec = step(p, params);
        const double w = flow_weighted ? params.b + rec.tau : 1.0;
        std::fill(counts.begin(), counts.end(), 0);
        for (const auto& a : rec.activations)
            ++counts[a.unit];
        for (std::size_t j = 0; j < observables.size(); ++j) {
            const auto& obs = observables[j];
            if (obs.kind == ObservableKind::activation_rate)
                acc[j] += static_cast<double>(counts.at(obs.unit));
            else
                acc[j] += w * observe(obs, p, params);
        }
        weight_total += w;
        p = std::move(rec.next);
    }
    for (double& a : acc)
        a /= weight_total;
    return acc;
}

inline double birkhoff_average(const SectionPoint& p0, const Observable& obs, std::size_t n,
                               const ModelParams& params, bool flow_weighted = true)
{
    return birkhoff_averages(p0, {obs}, n, params, flow_weighted).front();
}

// ---------------------------------------------------------------------------
// Fiber synchronisation

/// Two orbits over the same base point; entry k is max_i dist(z_a, z_b) after k+1 returns.
inline std::vector<double> sync_test(double x, double y, const std::vector<double>& z_a,
                                     const std::vector<double>& z_b, std::size_t n,
                                     const ModelParams& params)
{
    if (z_a.size() != z_b.size())
        throw InvalidArgument("sync_test needs fiber vectors of equal length");
    SectionPoint a{x, y, z_a};
    SectionPoint b{x, y, z_b};
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        a = step(a, params).next;
        b = step(b, params).next;
        double d = 0.0;
        for (std::size_t i = 0; i < a.z.size(); ++i)
            d = std::max(d, circle_distance(a.z[i], b.z[i]));
        out.push_back(d);
    }
    return out;
}

/// Lebesgue-random point of Sigma_0.
inline SectionPoint random_section_point(std::size_t n_units, Rng& rng)
{
    SectionPoint p;
    p.x = rng.uniform();
    p.y = rng.uniform();
    p.z.resize(n_units);
    for (double& zi : p.z)
        zi = rng.uniform();
    return p;
}

struct SyncTrial {
    std::uint64_t seed = 0;
    bool synchronized = false;
    std::size_t hit_step = 0; ///< first step below threshold, or horizon if never
    double final_distance = 0.0;
};

struct SyncSummary {
    std::size_t trials = 0;
    std::size_t synchronized = 0;
    std::vector<SyncTrial> runs;
    double fraction() const noexcept
    {
        return trials ? static_cast<double>(synchronized) / static_cast<double>(trials) : 0.0;
    }
};

/// Trial k: random base point and two random fiber vectors from trial_seed(master, k).
inline SyncTrial sync_trial(std::size_t k, std::size_t horizon, double threshold,
                            const ModelParams& params, std::uint64_t master_seed)
{
    SyncTrial t;
    t.seed = trial_seed(master_seed, k);
    Rng rng(t.seed);
    const SectionPoint a = random_section_point(params.n_units, rng);
    std::vector<double> zb(params.n_units);
    for (double& zi : zb)
        zi = rng.uniform();
    const auto dist = sync_test(a.x, a.y, a.z, zb, horizon, params);
    t.hit_step = horizon;
    for (std::size_t j = 0; j < dist.size(); ++j)
        if (dist[j] < threshold) {
            t.hit_step = j + 1;
            t.synchronized = true;
            break;
        }
    t.final_distance = dist.empty() ? 0.0 : dist.back();
    return t;
}

inline SyncSummary sync_trials(std::size_t trials, std::size_t horizon, double threshold,
                               const ModelParams& params, std::uint64_t master_seed,
                               std::size_t threads = 1)
{
    SyncSummary s;
    s.trials = trials;
    s.runs.resize(trials);
    parallel_for(trials, threads, [&](std::size_t k) {
        s.runs[k] = sync_trial(k, horizon, threshold, params, master_seed);
    });
    for (const auto& r : s.runs)
        s.synchronized += r.synchronized ? 1 : 0;
    return s;
}

} // namespace eirnet
