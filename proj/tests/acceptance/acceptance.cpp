// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "eirnet/curve_lab.hpp"
#include "eirnet/flow_sim.hpp"
#include "eirnet/io/params_io.hpp"
#include "eirnet/return_map.hpp"
#include "eirnet/validation.hpp"

using namespace eirnet;

namespace {

const std::string config_dir = EIRNET_CONFIG_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t worker_count()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    return sxy / sxx;
}

const ModelParams& n2()
{
    static const ModelParams p = io::load_params(config_dir + "/n2-valid.toml");
    return p;
}

// The curve experiment is shared by criteria 4, 5 and 7.
const CurveExperimentResult& curve_run()
{
    static const CurveExperimentResult r = [] {
        CurveExperimentConfig cfg;
        cfg.a = 1.0;
        cfg.max_generations = 8;
        cfg.sample_cap = 100000000;
        cfg.threads = worker_count();
        const auto t0 = std::chrono::steady_clock::now();
        CurveExperimentResult res = run_curve_experiment(n2(), cfg);
        std::printf("# curve experiment: generations 0..%zu in %.1f s%s\n",
                    res.generations.size() - 1, seconds_since(t0),
                    res.truncated_by_cap ? " (later generations exceed the sample cap)" : "");
        return res;
    }();
    return r;
}

Outcome certification()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams& p = n2();
    const ValidationReport rep = validate_params(p);
    const double secs = seconds_since(t0);
    double worst = std::numeric_limits<double>::infinity();
    bool positive = true;
    std::string first_bad;
    for (const auto& c : rep.checks) {
        const bool assumption = c.name.rfind("A", 0) == 0;
        if (assumption) {
            worst = std::min(worst, c.margin);
            positive = positive && c.margin > 0.0;
        }
        if ((!c.passed || (assumption && !(c.margin > 0.0))) && first_bad.empty())
            first_bad = c.name;
    }
    const double e_lambda = std::exp(p.anosov.lambda);
    const bool ok = rep.all_passed() && positive && e_lambda > 3.0 && secs < 10.0;
    return {ok, format("all checks %s, min (A1)-(A4) margin %.3g, e^lambda = %.4f, %.2f s%s%s",
                       rep.all_passed() ? "passed" : "did not pass", worst, e_lambda, secs,
                       first_bad.empty() ? "" : ", first failing: ", first_bad.c_str())};
}

Outcome lyapunov()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams& p = n2();
    Rng rng(trial_seed(7, 0));
    const LyapunovResult r = lyapunov_spectrum(random_section_point(p.n_units, rng), 1000, 100000, p, 7);
    const double secs = seconds_since(t0);
    const double lambda = p.anosov.lambda;
    const double top_err = std::fabs(r.exponents.front() - lambda) / lambda;
    double neg_err = std::numeric_limits<double>::infinity();
    for (double e : r.exponents)
        neg_err = std::min(neg_err, std::fabs(e + lambda) / lambda);
    const double max_fiber = *std::max_element(r.fiber_exponents.begin(), r.fiber_exponents.end());
    const bool ok = top_err < 0.02 && neg_err < 0.02 && max_fiber < 0.0 && secs < 60.0;
    return {ok, format("top %.6f vs lambda %.6f (rel err %.2e), -lambda rel err %.2e, max fiber "
                       "exponent %.3f, %zu restarts, %.1f s",
                       r.exponents.front(), lambda, top_err, neg_err, max_fiber, r.restarts, secs)};
}

Outcome flow_map_consistency()
{
    const ModelParams& p = n2();
    Rng rng(trial_seed(3, 0));
    const SectionPoint p0 = random_section_point(p.n_units, rng);
    std::vector<SectionPoint> hits;
    FlowState s = FlowState::from_section(p0);
    evolve_in_place(s, 1000.0 * (p.b + p.tau_max()), p, [&](const FlowEvent& e) {
        if (e.kind == FlowEventKind::reached_section_0 && hits.size() < 1000)
            hits.push_back(e.state->section_point());
    });
    double worst = 0.0;
    SectionPoint q = p0;
    for (const SectionPoint& h : hits) {
        q = step(q, p).next;
        worst = std::max({worst, circle_distance(q.x, h.x), circle_distance(q.y, h.y)});
        for (std::size_t i = 0; i < q.z.size(); ++i)
            worst = std::max(worst, circle_distance(q.z[i], h.z[i]));
    }
    const bool ok = hits.size() == 1000 && worst <= 1e-8;
    return {ok, format("%zu returns, max coordinate difference %.3g", hits.size(), worst)};
}

Outcome mass_concentration()
{
    const ModelParams& p = n2();
    const auto& gens = curve_run().generations;
    if (gens.size() < 5)
        return {false, format("only %zu generations fit under the sample cap", gens.size())};
    const double eps = p.assumptions.epsilon;
    const double slope_floor = p.anosov.beta / eps;
    bool ok = true;
    std::string per_unit;
    for (std::size_t i = 0; i < p.n_units; ++i) {
        const double c3 = gens[3].outside_fraction()[i] / eps;
        const double bound = 10.0 * eps * c3;
        double worst_frac = 0.0, worst_slope = std::numeric_limits<double>::infinity();
        for (const auto& g : gens) {
            if (g.n > 3)
                worst_frac = std::max(worst_frac, g.outside_fraction()[i]);
            worst_slope = std::min(worst_slope, g.min_slope_outside[i]);
        }
        // the steep arcs have slope exactly 1/epsilon, so the floor is met with equality
        const bool unit_ok = worst_frac < bound && worst_slope >= slope_floor * (1.0 - 1e-12);
        ok = ok && unit_ok;
        per_unit += format("%sunit %zu: C(3) = %.3g, max fraction n>3 %.4f < %.4f, min slope on "
                           "(I-)^c %.4f vs beta/eps %.4f",
                           i ? "; " : "", i, c3, worst_frac, bound, worst_slope, slope_floor);
    }
    return {ok, format("generations 0..%zu; ", gens.size() - 1) + per_unit};
}

Outcome range_growth()
{
    const ModelParams& p = n2();
    const auto& gens = curve_run().generations;
    const double a = 1.0;
    const double lambda = p.anosov.lambda;
    bool ok = gens.size() >= 3;
    std::string per_unit;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < p.n_units; ++i) {
        const double kappa = p.rotations[i].kappa;
        std::vector<double> ns, logs;
        for (const auto& g : gens) {
            ns.push_back(g.n);
            logs.push_back(std::log(g.range_psi[i]));
            const double rel = 1e-9 * std::max(1.0, g.range_psi[i]);
            if (g.n >= 1 &&
                std::fabs(g.range_theta[i] - gens[static_cast<std::size_t>(g.n - 1)].range_zeta[i]) > rel)
                ++violations;
            if (g.range_psi[i] >
                g.range_theta[i] + kappa * std::exp(lambda * g.n) * a * p.anosov.beta + kappa + rel)
                ++violations;
            if (g.range_zeta[i] > g.range_psi[i] + 1.0 + static_cast<double>(g.new_jumps[i]) + rel)
                ++violations;
        }
        const double slope = fitted_slope(ns, logs);
        ok = ok && slope <= lambda + 0.1;
        per_unit += format("unit %zu slope %.4f; ", i, slope);
    }
    ok = ok && violations == 0;
    return {ok, per_unit + format("limit lambda + 0.1 = %.4f; recursion violations %zu", lambda + 0.1,
                                  violations)};
}

Outcome lift_laws()
{
    Rng rng(trial_seed(6, 0));
    std::size_t failures = 0;
    std::size_t jumps = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        // piecewise-monotone input: increasing segments separated by jumps
        const auto pieces = 1 + rng.bits() % 6;
        std::vector<double> u, h;
        double t = 0.0, lifted = rng.uniform(-5.0, 5.0);
        for (std::uint64_t piece = 0; piece < pieces; ++piece) {
            if (piece) {
                u.push_back(t); // jump: same u, new value
                lifted += rng.uniform(0.01, 0.99);
                h.push_back(wrap(lifted));
            }
            const auto m = 2 + rng.bits() % 30;
            for (std::uint64_t k = 0; k < m; ++k) {
                t += rng.uniform(1e-4, 0.1);
                lifted += rng.uniform(0.0, 0.9);
                u.push_back(t);
                h.push_back(wrap(lifted) + std::floor(rng.uniform(-3.0, 3.0)));
            }
        }
        const LiftedGraph l = lift_samples(u, h);
        bool ok = l.values.front() >= 0.0 && l.values.front() < 1.0;
        for (std::size_t k = 0; k < l.values.size(); ++k) {
            ok = ok && circle_distance(l.values[k], h[k]) < 1e-9;
            if (k)
                ok = ok && l.values[k] >= l.values[k - 1] && l.values[k] - l.values[k - 1] < 1.0;
        }
        for (std::size_t j : l.jumps) {
            const double size = l.values[j + 1] - l.values[j];
            ok = ok && u[j] == u[j + 1] && size > 0.0 && size < 1.0;
        }
        jumps += l.jumps.size();
        failures += ok ? 0 : 1;
    }
    return {failures == 0, format("1000 random inputs, %zu jumps, %zu failures", jumps, failures)};
}

Outcome near_singularity()
{
    const auto& res = curve_run();
    std::vector<double> c3;
    std::string list;
    for (std::size_t j = 0; j < res.xi_ladder.size(); ++j) {
        std::vector<double> fractions;
        for (const auto& g : res.generations)
            fractions.push_back(g.singular_measure[j] / g.length);
        const SingularMass m = near_singularity_mass(fractions, res.xi_ladder[j]);
        c3.push_back(m.c3);
        list += format("%sxi %.4g: %.2f", j ? ", " : "", res.xi_ladder[j], m.c3);
    }
    const auto [lo, hi] = std::minmax_element(c3.begin(), c3.end());
    const double ratio = *hi / *lo;
    return {ratio < 3.0, format("mass/xi %s; max/min %.3f < 3", list.c_str(), ratio)};
}

Outcome fiber_sync()
{
    const SyncSummary s = sync_trials(100, 200, 1e-6, n2(), 8, worker_count());
    return {s.synchronized >= 95, format("%zu of %zu trials below 1e-6 within 200 returns", s.synchronized, s.trials)};
}

Outcome physical_measure()
{
    const ModelParams& p = n2();
    const auto catalog = observable_catalog(p.n_units);
    std::vector<std::vector<double>> avgs(10);
    parallel_for(10, worker_count(), [&](std::size_t k) {
        Rng rng(trial_seed(9, k));
        avgs[k] = birkhoff_averages(random_section_point(p.n_units, rng), catalog, 100000, p);
    });
    double worst = 0.0;
    std::string worst_name;
    for (std::size_t j = 0; j < catalog.size(); ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& a : avgs) {
            lo = std::min(lo, a[j]);
            hi = std::max(hi, a[j]);
        }
        if (hi - lo > worst) {
            worst = hi - lo;
            worst_name = catalog[j].name();
        }
    }
    return {worst <= 5e-2, format("10 starts x 1e5 returns, worst pairwise spread %.3g (%s)", worst,
                                  worst_name.c_str())};
}

bool same_spec(const RotationMapSpec& a, const RotationMapSpec& b)
{
    return a.kappa == b.kappa && a.epsilon == b.epsilon && a.d == b.d &&
           a.slope_floor == b.slope_floor && a.phase == b.phase;
}

Outcome raster_figure()
{
    const ModelParams p = io::load_params(config_dir + "/fig3-like.toml");
    Rng rng(trial_seed(10, 0));
    const FlowState s0 = FlowState::from_section(random_section_point(p.n_units, rng));
    const double t_end = 200.0;
    const auto raster = activation_raster(s0, t_end, p);
    std::vector<std::size_t> counts(p.n_units, 0);
    for (const auto& e : raster)
        ++counts[e.unit];
    const std::size_t silent = static_cast<std::size_t>(std::count(counts.begin(), counts.end(), 0u));
    double same = 0.0, diff = 0.0;
    std::size_t n_same = 0, n_diff = 0;
    for (std::size_t i = 0; i < p.n_units; ++i)
        for (std::size_t j = i + 1; j < p.n_units; ++j) {
            const double c = activation_correlation(raster, i, j, 0.0, t_end, 1.0);
            if (same_spec(p.rotations[i], p.rotations[j])) {
                same += c;
                ++n_same;
            } else {
                diff += c;
                ++n_diff;
            }
        }
    same /= static_cast<double>(n_same);
    diff /= static_cast<double>(n_diff);
    const bool ok = silent == 0 && n_same > 0 && same > diff;
    return {ok, format("%zu activations, %zu silent units; mean correlation same spec %.3f (%zu pairs) "
                       "vs different spec %.3f (%zu pairs)",
                       raster.size(), silent, same, n_same, diff, n_diff)};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"assumption certification", certification},
        {"top Lyapunov exponent", lyapunov},
        {"flow/map consistency", flow_map_consistency},
        {"mass concentration", mass_concentration},
        {"range growth", range_growth},
        {"lift laws", lift_laws},
        {"near-singularity mass", near_singularity},
        {"fiber synchronisation", fiber_sync},
        {"physical-measure averages", physical_measure},
        {"raster figure", raster_figure},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("# %d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
