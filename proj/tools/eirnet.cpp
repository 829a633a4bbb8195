// eirnet: command-line front end. Every command loads a params document,
// validates it (unless --force), writes CSV/JSON artifacts plus manifest.json
// into the output directory and prints a JSON summary on stdout.
//
// Exit codes: 0 ok, 1 validation or domain failure, 2 usage or parse error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eirnet/curve_lab.hpp"
#include "eirnet/errors.hpp"
#include "eirnet/flow_sim.hpp"
#include "eirnet/io/artifacts.hpp"
#include "eirnet/io/params_io.hpp"
#include "eirnet/parallel.hpp"
#include "eirnet/return_map.hpp"
#include "eirnet/rng.hpp"
#include "eirnet/validation.hpp"

using namespace eirnet;
using io::CsvTable;
using io::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_domain = 1;
constexpr int exit_usage = 2;

struct Common {
    std::string config;
    std::string output_dir;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool force = false;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("config", c.config, "params document (TOML or JSON)")->required();
    cmd->add_option("--output-dir", c.output_dir,
                    "artifact directory (default: $EIRNET_OUTPUT_DIR or ./eirnet-out)");
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--threads", c.threads, "worker threads for independent trials")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--force", c.force, "run even if the assumption checks fail");
}

std::string resolve_output_dir(const Common& c)
{
    if (!c.output_dir.empty())
        return c.output_dir;
    if (const char* env = std::getenv("EIRNET_OUTPUT_DIR"); env && *env)
        return env;
    return "eirnet-out";
}

std::vector<std::string> z_columns(std::size_t n, const char* prefix = "z")
{
    std::vector<std::string> cols;
    for (std::size_t i = 0; i < n; ++i)
        cols.push_back(prefix + std::to_string(i));
    return cols;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// Shared run state: params, validation, artifacts, manifest fields.
struct Run {
    Common common;
    std::string command;
    ModelParams params;
    ValidationReport report;
    std::unique_ptr<io::RunArtifacts> out;
    json manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    // Returns false if the command must stop with exit code 1.
    bool open(const std::string& name, const Common& c, bool require_valid = true)
    {
        common = c;
        command = name;
        params = io::load_params(c.config);
        report = validate_params(params);
        for (const auto& w : report.warnings)
            std::cerr << "warning: " << w << "\n";
        if (require_valid && !report.all_passed()) {
            if (!c.force) {
                std::cout << io::report_to_json(report).dump(2) << "\n";
                std::cerr << "error: assumption checks failed; use --force to run anyway\n";
                return false;
            }
            std::cerr << "warning: assumption checks failed, continuing because of --force\n";
        }
        out = std::make_unique<io::RunArtifacts>(resolve_output_dir(c));
        manifest["command"] = name;
        manifest["config"] = c.config;
        manifest["params_hash"] = io::params_hash(params);
        manifest["seed"] = c.seed;
        manifest["threads"] = c.threads;
        manifest["forced"] = c.force && !report.all_passed();
        manifest["assumptions_passed"] = report.all_passed();
        return true;
    }

    void finish(json summary, const std::vector<std::uint64_t>& seeds)
    {
        manifest["seeds"] = seeds;
        manifest["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        out->write("params.json", io::params_to_json(params));
        const json m = out->commit(manifest);
        summary["command"] = command;
        summary["output_dir"] = out->dir().string();
        summary["params_hash"] = m["params_hash"];
        summary["files"] = m["files"].size();
        std::cout << summary.dump(2) << "\n";
    }
};

FlowState random_start(const ModelParams& p, std::uint64_t seed)
{
    Rng rng(trial_seed(seed, 0));
    return FlowState::from_section(random_section_point(p.n_units, rng));
}

CsvTable trajectory_table(const std::vector<TrajectoryRow>& rows, std::size_t n)
{
    CsvTable t(concat({"t", "w"}, z_columns(n)));
    for (const auto& r : rows) {
        t.cell(r.t).cell(r.w);
        for (double z : r.z)
            t.cell(z);
        t.end_row();
    }
    return t;
}

// ---------------------------------------------------------------------------

int cmd_check(const Common& c)
{
    Run run;
    run.open("check", c, false);
    const json rep = io::report_to_json(run.report);
    run.out->write("validation.json", rep);
    run.manifest["seeds"] = json::array();
    run.manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run.started).count();
    run.out->write("params.json", io::params_to_json(run.params));
    run.out->commit(run.manifest);
    std::cout << rep.dump(2) << "\n";
    return run.report.all_passed() ? exit_ok : exit_domain;
}

struct SimOptions {
    double t_end = 20.0;
    double dt_out = 0.01;
};

int cmd_simulate(const Common& c, const SimOptions& o)
{
    Run run;
    if (!run.open("simulate", c))
        return exit_domain;
    const FlowState s0 = random_start(run.params, c.seed);
    const auto rows = sample_trajectory(s0, o.t_end, o.dt_out, run.params);
    run.out->write("trajectory.csv", trajectory_table(rows, run.params.n_units));
    run.manifest["t_end"] = o.t_end;
    run.manifest["dt_out"] = o.dt_out;
    run.finish({{"rows", rows.size()}, {"t_end", o.t_end}}, {trial_seed(c.seed, 0)});
    return exit_ok;
}

int cmd_raster(const Common& c, const SimOptions& o)
{
    Run run;
    if (!run.open("raster", c))
        return exit_domain;
    const FlowState s0 = random_start(run.params, c.seed);
    const auto events = activation_raster(s0, o.t_end, run.params);
    CsvTable r({"t", "unit"});
    std::vector<std::size_t> per_unit(run.params.n_units, 0);
    for (const auto& e : events) {
        r.cell(e.t).cell(e.unit).end_row();
        ++per_unit[e.unit];
    }
    run.out->write("raster.csv", r);
    const auto rows = sample_trajectory(s0, o.t_end, o.dt_out, run.params);
    run.out->write("trajectory.csv", trajectory_table(rows, run.params.n_units));
    const auto silent = static_cast<std::size_t>(std::count(per_unit.begin(), per_unit.end(), 0));
    run.manifest["t_end"] = o.t_end;
    run.manifest["dt_out"] = o.dt_out;
    run.finish({{"events", events.size()}, {"events_per_unit", per_unit}, {"silent_units", silent}},
               {trial_seed(c.seed, 0)});
    return exit_ok;
}

struct LyapOptions {
    std::size_t iters = 100000;
    std::size_t transient = 1000;
    std::size_t orbit_rows = 1000;
    std::size_t batches = 50;
};

int cmd_lyapunov(const Common& c, const LyapOptions& o)
{
    Run run;
    if (!run.open("lyapunov", c))
        return exit_domain;
    const std::size_t n = run.params.n_units;
    const std::uint64_t seed = trial_seed(c.seed, 0);
    Rng rng(seed);
    const SectionPoint p0 = random_section_point(n, rng);
    const LyapunovResult res = lyapunov_spectrum(p0, o.transient, o.iters, run.params, seed, o.batches);

    CsvTable spec({"index", "kind", "exponent", "std_error"});
    for (std::size_t k = 0; k < res.exponents.size(); ++k)
        spec.cell(k).cell(std::string("full")).cell(res.exponents[k]).cell(res.std_errors[k]).end_row();
    for (std::size_t i = 0; i < res.fiber_exponents.size(); ++i)
        spec.cell(i).cell(std::string("fiber")).cell(res.fiber_exponents[i]).cell(res.fiber_std_errors[i]).end_row();
    run.out->write("spectrum.csv", spec);

    // the first orbit_rows returns of the same starting point
    CsvTable orbit(concat(concat({"step", "x", "y"}, z_columns(n)), concat({"tau"}, z_columns(n, "act"))));
    SectionPoint p = p0;
    for (std::size_t k = 0; k < o.orbit_rows; ++k) {
        const StepRecord r = step(p, run.params);
        std::vector<int> acts(n, 0);
        for (const auto& a : r.activations)
            ++acts[a.unit];
        orbit.cell(k).cell(p.x).cell(p.y);
        for (double z : p.z)
            orbit.cell(z);
        orbit.cell(r.tau);
        for (int a : acts)
            orbit.cell(a);
        orbit.end_row();
        p = r.next;
    }
    run.out->write("orbit.csv", orbit);

    json summary;
    summary["exponents"] = res.exponents;
    summary["std_errors"] = res.std_errors;
    summary["fiber_exponents"] = res.fiber_exponents;
    summary["fiber_std_errors"] = res.fiber_std_errors;
    summary["lambda"] = run.params.anosov.lambda;
    summary["iterations"] = res.iterations;
    summary["restarts"] = res.restarts;
    summary["seeds"] = {seed};
    summary["params_hash"] = run.manifest["params_hash"];
    run.out->write("lyapunov.json", summary);
    run.manifest["iters"] = o.iters;
    run.manifest["transient"] = o.transient;
    run.finish(summary, {seed});
    return exit_ok;
}

struct CurveOptions {
    int generations = 8;
    std::size_t chunks = 64;
    double sample_cap = 1e8;
    double a = 1.0;
    int snapshot_max_gen = 3;
    double tolerance = 1e-3;
};

CurveExperimentConfig curve_config(const Common& c, const CurveOptions& o)
{
    CurveExperimentConfig cfg;
    cfg.a = o.a;
    cfg.max_generations = o.generations;
    cfg.chunks = o.chunks;
    cfg.sample_cap = static_cast<std::size_t>(o.sample_cap);
    cfg.threads = c.threads;
    cfg.refine.tolerance = o.tolerance;
    return cfg;
}

std::string marker_label(const CurveMarker& m)
{
    std::string s;
    for (std::size_t i = 0; i < m.tags.size(); ++i)
        s += (i ? "/" : "") + std::string(to_string(m.tags[i]));
    return s;
}

json curve_stats_json(const CurveExperimentResult& res, std::size_t n_units)
{
    json j;
    j["generations"] = json::array();
    double c1 = std::numeric_limits<double>::infinity();
    for (const auto& g : res.generations) {
        json e;
        e["n"] = g.n;
        e["length"] = g.length;
        e["samples"] = g.samples;
        e["markers"] = g.markers;
        e["floor_hits"] = g.floor_hits;
        e["new_jumps"] = g.new_jumps;
        e["range_theta"] = g.range_theta;
        e["range_psi"] = g.range_psi;
        e["range_zeta"] = g.range_zeta;
        e["outside_fraction"] = g.outside_fraction();
        e["min_slope"] = g.min_slope;
        e["min_slope_outside"] = g.min_slope_outside;
        j["generations"].push_back(e);
        for (double s : g.min_slope)
            c1 = std::min(c1, s);
    }
    j["c1"] = c1;
    j["truncated_by_cap"] = res.truncated_by_cap;
    j["near_singularity"] = json::array();
    for (std::size_t x = 0; x < res.xi_ladder.size(); ++x) {
        std::vector<double> frac;
        for (const auto& g : res.generations)
            frac.push_back(g.singular_measure[x] / g.length);
        const SingularMass m = near_singularity_mass(frac, res.xi_ladder[x]);
        j["near_singularity"].push_back({{"xi", res.xi_ladder[x]}, {"mass", m.mass}, {"c3", m.c3}});
    }
    j["n_units"] = n_units;
    return j;
}

CsvTable curve_stats_table(const CurveExperimentResult& res, std::size_t n_units)
{
    CsvTable t({"n", "unit", "length", "samples", "markers", "floor_hits", "new_jumps",
                "range_theta", "range_psi", "range_zeta", "outside_fraction", "min_slope",
                "min_slope_outside"});
    for (const auto& g : res.generations) {
        const auto frac = g.outside_fraction();
        for (std::size_t i = 0; i < n_units; ++i)
            t.cell(g.n).cell(i).cell(g.length).cell(g.samples).cell(g.markers).cell(g.floor_hits)
                .cell(g.new_jumps[i]).cell(g.range_theta[i]).cell(g.range_psi[i])
                .cell(g.range_zeta[i]).cell(frac[i]).cell(g.min_slope[i])
                .cell(g.min_slope_outside[i]).end_row();
    }
    return t;
}

int cmd_curve(const Common& c, const CurveOptions& o)
{
    Run run;
    if (!run.open("curve", c))
        return exit_domain;
    const std::size_t n = run.params.n_units;
    const CurveExperimentConfig cfg = curve_config(c, o);

    // snapshots arrive chunk by chunk; chunks are disjoint and in u-order
    std::map<int, CsvTable> snaps;
    CurveSnapshotSink sink;
    if (o.snapshot_max_gen >= 0)
        sink = [&](std::size_t, const PiecewiseGraph& g) {
            if (g.generation > o.snapshot_max_gen)
                return;
            auto it = snaps.find(g.generation);
            if (it == snaps.end())
                it = snaps.emplace(g.generation, CsvTable(concat(concat({"u"}, z_columns(n)), {"marker"}))).first;
            CsvTable& t = it->second;
            for (std::size_t k = 0; k < g.size(); ++k) {
                std::string tag = "none";
                const bool dup = (k + 1 < g.size() && g.is_break(k)) || (k > 0 && g.is_break(k - 1));
                if (dup) {
                    const auto m = std::lower_bound(g.markers.begin(), g.markers.end(), g.u0[k],
                                                    [](const CurveMarker& a, double u) { return a.u0 < u; });
                    if (m != g.markers.end() && m->u0 == g.u0[k])
                        tag = marker_label(*m);
                }
                t.cell(g.u(k));
                for (std::size_t i = 0; i < n; ++i)
                    t.cell(g.v(k, i));
                t.cell(tag).end_row();
            }
        };
    const CurveExperimentResult res = run_curve_experiment(run.params, cfg, sink);
    for (auto& [gen, table] : snaps)
        if (gen < static_cast<int>(res.generations.size()))
            run.out->write("curve_gen" + std::to_string(gen) + ".csv", table);
    run.out->write("curve_stats.csv", curve_stats_table(res, n));
    CsvTable sing({"n", "xi", "measure", "fraction"});
    for (const auto& g : res.generations)
        for (std::size_t x = 0; x < res.xi_ladder.size(); ++x)
            sing.cell(g.n).cell(res.xi_ladder[x]).cell(g.singular_measure[x])
                .cell(g.singular_measure[x] / g.length).end_row();
    run.out->write("singular_mass.csv", sing);
    json stats = curve_stats_json(res, n);
    run.out->write("curve.json", stats);
    run.manifest["generations"] = o.generations;
    run.manifest["chunks"] = o.chunks;
    run.manifest["sample_cap"] = cfg.sample_cap;
    run.finish({{"generations_computed", res.generations.size()},
                {"truncated_by_cap", res.truncated_by_cap},
                {"c1", stats["c1"]},
                {"near_singularity", stats["near_singularity"]}},
               {});
    return exit_ok;
}

struct ConcentrationOptions {
    std::vector<double> epsilons{0.02, 0.01, 0.005};
    CurveOptions curve{.generations = 4};
};

int cmd_concentration(const Common& c, const ConcentrationOptions& o)
{
    Run run;
    if (!run.open("concentration", c))
        return exit_domain;
    const std::size_t n = run.params.n_units;
    CsvTable t({"epsilon", "n", "unit", "outside_fraction", "fitted_C", "min_slope_outside"});
    json variants = json::array();
    for (double eps : o.epsilons) {
        ModelParams p = run.params;
        p.assumptions.epsilon = eps;
        for (auto& r : p.rotations)
            r = build_rotation_map(r.kappa, eps, r.d, r.slope_floor, r.phase);
        const ValidationReport rep = validate_params(p);
        if (!rep.all_passed() && !c.force) {
            std::cout << io::report_to_json(rep).dump(2) << "\n";
            std::cerr << "error: epsilon=" << eps << " fails the assumption checks\n";
            return exit_domain;
        }
        CurveOptions co = o.curve;
        co.snapshot_max_gen = -1;
        const CurveExperimentResult res = run_curve_experiment(p, curve_config(c, co));
        for (const auto& g : res.generations) {
            const auto frac = g.outside_fraction();
            for (std::size_t i = 0; i < n; ++i)
                t.cell(eps).cell(g.n).cell(i).cell(frac[i]).cell(frac[i] / eps)
                    .cell(g.min_slope_outside[i]).end_row();
        }
        variants.push_back({{"epsilon", eps},
                            {"assumptions_passed", rep.all_passed()},
                            {"params_hash", io::params_hash(p)},
                            {"generations", res.generations.size()}});
    }
    run.out->write("concentration.csv", t);
    run.manifest["variants"] = variants;
    run.finish({{"variants", variants}}, {});
    return exit_ok;
}

struct SyncOptions {
    std::size_t trials = 100;
    std::size_t horizon = 200;
    double threshold = 1e-6;
};

int cmd_sync(const Common& c, const SyncOptions& o)
{
    Run run;
    if (!run.open("sync", c))
        return exit_domain;
    const SyncSummary s = sync_trials(o.trials, o.horizon, o.threshold, run.params, c.seed, c.threads);
    CsvTable t({"trial", "seed", "synchronized", "hit_step", "final_distance"});
    std::vector<std::uint64_t> seeds;
    for (std::size_t k = 0; k < s.runs.size(); ++k) {
        const auto& r = s.runs[k];
        t.cell(k).cell(std::to_string(r.seed)).cell(r.synchronized ? 1 : 0).cell(r.hit_step)
            .cell(r.final_distance).end_row();
        seeds.push_back(r.seed);
    }
    run.out->write("sync.csv", t);
    const json summary = {{"trials", s.trials},
                          {"synchronized", s.synchronized},
                          {"fraction", s.fraction()},
                          {"horizon", o.horizon},
                          {"threshold", o.threshold}};
    run.out->write("sync.json", summary);
    run.finish(summary, seeds);
    return exit_ok;
}

struct BirkhoffOptions {
    std::size_t starts = 10;
    std::size_t returns = 100000;
    bool step_counted = false;
};

int cmd_birkhoff(const Common& c, const BirkhoffOptions& o)
{
    Run run;
    if (!run.open("birkhoff", c))
        return exit_domain;
    const auto catalog = observable_catalog(run.params.n_units);
    std::vector<std::vector<double>> avg(o.starts);
    std::vector<std::uint64_t> seeds(o.starts);
    parallel_for(o.starts, c.threads, [&](std::size_t k) {
        seeds[k] = trial_seed(c.seed, k);
        Rng rng(seeds[k]);
        const SectionPoint p0 = random_section_point(run.params.n_units, rng);
        avg[k] = birkhoff_averages(p0, catalog, o.returns, run.params, !o.step_counted);
    });
    CsvTable t({"start", "seed", "observable", "value"});
    for (std::size_t k = 0; k < o.starts; ++k)
        for (std::size_t j = 0; j < catalog.size(); ++j)
            t.cell(k).cell(std::to_string(seeds[k])).cell(catalog[j].name()).cell(avg[k][j]).end_row();
    run.out->write("birkhoff.csv", t);
    json spread = json::object();
    double worst = 0.0;
    for (std::size_t j = 0; j < catalog.size(); ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& a : avg) {
            lo = std::min(lo, a[j]);
            hi = std::max(hi, a[j]);
        }
        spread[catalog[j].name()] = o.starts ? hi - lo : 0.0;
        worst = std::max(worst, o.starts ? hi - lo : 0.0);
    }
    const json summary = {{"starts", o.starts},
                          {"returns", o.returns},
                          {"weighting", o.step_counted ? "step" : "flow"},
                          {"max_pairwise_spread", worst},
                          {"spread", spread}};
    run.out->write("birkhoff.json", summary);
    run.finish(summary, seeds);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Excitation-inhibition network simulator and ergodic test bench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::tool_version);

    Common common;
    SimOptions sim;
    LyapOptions lyap;
    CurveOptions curve;
    ConcentrationOptions conc;
    SyncOptions sync;
    BirkhoffOptions birk;

    auto* check = app.add_subcommand("check", "validate the assumptions of a params document");
    add_common(check, common);

    auto* simulate = app.add_subcommand("simulate", "continuous-time trajectory");
    add_common(simulate, common);
    simulate->add_option("--t-end", sim.t_end, "end time")->check(CLI::PositiveNumber);
    simulate->add_option("--dt-out", sim.dt_out, "output spacing")->check(CLI::PositiveNumber);

    auto* raster = app.add_subcommand("raster", "activation raster and trajectory");
    add_common(raster, common);
    raster->add_option("--t-end", sim.t_end, "end time")->check(CLI::PositiveNumber);
    raster->add_option("--dt-out", sim.dt_out, "trajectory output spacing")->check(CLI::PositiveNumber);

    auto* lyapunov = app.add_subcommand("lyapunov", "Lyapunov spectrum of the return map");
    add_common(lyapunov, common);
    lyapunov->add_option("--iters", lyap.iters, "iterations")->check(CLI::PositiveNumber);
    lyapunov->add_option("--transient", lyap.transient, "discarded iterations");
    lyapunov->add_option("--orbit-rows", lyap.orbit_rows, "rows written to orbit.csv");
    lyapunov->add_option("--batches", lyap.batches, "batches for standard errors")->check(CLI::Range(2, 100000));

    auto add_curve_opts = [](CLI::App* cmd, CurveOptions& o) {
        cmd->add_option("--generations", o.generations, "last generation")->check(CLI::Range(0, 40));
        cmd->add_option("--chunks", o.chunks, "independent pieces of the initial curve")->check(CLI::PositiveNumber);
        cmd->add_option("--sample-cap", o.sample_cap, "sample cap per generation")->check(CLI::PositiveNumber);
        cmd->add_option("--length", o.a, "initial curve length a")->check(CLI::PositiveNumber);
        cmd->add_option("--tolerance", o.tolerance, "refinement tolerance")->check(CLI::PositiveNumber);
    };
    auto* curvecmd = app.add_subcommand("curve", "curve pushforward statistics");
    add_common(curvecmd, common);
    add_curve_opts(curvecmd, curve);
    curvecmd->add_option("--snapshot-max-gen", curve.snapshot_max_gen,
                         "write curve_genN.csv for N up to this value (-1: none)");

    auto* concentration = app.add_subcommand("concentration", "outside-I- mass against epsilon");
    add_common(concentration, common);
    add_curve_opts(concentration, conc.curve);
    concentration->add_option("--epsilons", conc.epsilons, "rotation steepness values")->delimiter(',');

    auto* synccmd = app.add_subcommand("sync", "fiber synchronisation trials");
    add_common(synccmd, common);
    synccmd->add_option("--trials", sync.trials, "number of trials");
    synccmd->add_option("--horizon", sync.horizon, "returns per trial");
    synccmd->add_option("--threshold", sync.threshold, "distance counted as synchronised");

    auto* birkhoff = app.add_subcommand("birkhoff", "Birkhoff averages from random starts");
    add_common(birkhoff, common);
    birkhoff->add_option("--starts", birk.starts, "number of starting points");
    birkhoff->add_option("--returns", birk.returns, "returns per start")->check(CLI::PositiveNumber);
    birkhoff->add_flag("--step-counted", birk.step_counted, "weight every return equally");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (check->parsed())
            return cmd_check(common);
        if (simulate->parsed())
            return cmd_simulate(common, sim);
        if (raster->parsed())
            return cmd_raster(common, sim);
        if (lyapunov->parsed())
            return cmd_lyapunov(common, lyap);
        if (curvecmd->parsed())
            return cmd_curve(common, curve);
        if (concentration->parsed())
            return cmd_concentration(common, conc);
        if (synccmd->parsed())
            return cmd_sync(common, sync);
        if (birkhoff->parsed())
            return cmd_birkhoff(common, birk);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_domain;
    }
    return exit_usage;
}
