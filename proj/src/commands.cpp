#include "ricci/commands.hpp"

#include "ricci/error.hpp"
#include "ricci/exact.hpp"
#include "ricci/geometry.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <functional>
#include <memory>
#include <ostream>
#include <random>

#ifndef RICCI_LAB_VERSION
#define RICCI_LAB_VERSION "0.0.0"
#endif

namespace ricci {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string version() {
    return RICCI_LAB_VERSION;
}

std::vector<std::string> resolve_checks(const RunConfig& config) {
    const bool is_auto = config.checks.size() == 1 && config.checks.front() == "auto";
    if (!is_auto) return config.checks;
    const HypothesesReport hyp = bounded_hypotheses_report(ExactSolution::parse(config.preset));
    std::vector<std::string> out;
    if (hyp.bounded_R0) {
        out.push_back("lower_bound");
        out.push_back("comparison");
    }
    if (hyp.bounded_u0 && hyp.bounded_R0) {
        for (const char* name : {"decay", "harnack_slope", "curvature_decay", "flatness", "barrier"}) {
            out.emplace_back(name);
        }
    }
    if (config.heat_companion) out.emplace_back("mp1");
    return out;
}

namespace {

json verdict_json(const Verdict& v) {
    return json{{"name", v.name},
                {"passed", v.passed},
                {"value", v.value},
                {"tolerance", v.tolerance},
                {"detail", v.detail}};
}

std::string format_time(double t) {
    return fmt::format("{}", t);
}

fs::path prepare_output(const std::string& dir) {
    const fs::path path(resolve_output_dir(dir));
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", path.string(), ec.message()));
    return path;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
        out << text;
        out.flush();
        if (!out) throw Error(fmt::format("failed writing '{}'", tmp.string()));
    }
    fs::rename(tmp, path);
}

struct Manifest {
    std::string command;
    const RunConfig* config = nullptr;
    std::string termination = "not_started";
    std::string message;
    double wall_seconds = 0.0;
    std::vector<Verdict> verdicts;
    json extra = json::object();
    int exit_code = kExitOk;

    void write(const fs::path& dir) const {
        json doc;
        doc["command"] = command;
        doc["version"] = version();
        if (config != nullptr) {
            doc["config_text"] = config->source_text;
            json values = json::object();
            for (const auto& [key, value] : effective_values(*config)) values[key] = value;
            doc["config"] = values;
        }
        doc["termination"] = termination;
        doc["message"] = message;
        doc["wall_seconds"] = wall_seconds;
        json checks = json::array();
        for (const Verdict& v : verdicts) checks.push_back(verdict_json(v));
        doc["verdicts"] = checks;
        doc["exit_code"] = exit_code;
        for (const auto& [key, value] : extra.items()) doc[key] = value;
        write_text_atomic(dir / "manifest.json", doc.dump(2) + "\n");
    }
};

std::string termination_name(Termination t) {
    return to_string(t);
}

BoundaryCondition make_bc(BoundaryKind kind, const ScalarField& u0) {
    switch (kind) {
        case BoundaryKind::Periodic: return BoundaryCondition::periodic();
        case BoundaryKind::LinearExtrapolate: return BoundaryCondition::extrapolate();
        case BoundaryKind::DirichletFrozen: return BoundaryCondition::frozen(u0);
    }
    throw InvalidArgument("unknown boundary kind");
}

ScalarField random_companion(const GridSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> values(spec.size());
    for (double& v : values) v = dist(rng);
    return ScalarField(spec, std::move(values));
}

std::pair<int, int> source_node(const GridSpec& spec) {
    if (const auto node = spec.node_at(0.0, 0.0)) return *node;
    return {spec.nx / 2, spec.ny / 2};
}

struct Simulation {
    EvolveResult result;
    /// max over the run of sup|u| on the whole grid.
    double sup_abs_u = 0.0;
    ConformalMetric initial;
    std::vector<DensitySnapshot> densities;
    double wall_seconds = 0.0;
};

struct SimulationHooks {
    bool companion = false;
    bool keep_densities = false;
    /// Extra per-row work, run on the same state as the diagnostic row.
    std::function<void(const FlowState&)> on_record;
};

Simulation simulate(const RunConfig& config, const fs::path& dir, const SimulationHooks& extra, std::ostream& log) {
    const ExactSolution sol = ExactSolution::parse(config.preset);
    const GridSpec spec = config.grid();
    ScalarField u0 = sample_to_grid(sol, spec, 0.0);
    const BoundaryCondition bc = make_bc(config.bc, u0);
    FlowState initial(ConformalMetric(std::move(u0), 0.0), bc);

    std::optional<ScalarField> w;
    if (extra.companion) w = random_companion(spec, config.heat_seed);

    Simulation sim{EvolveResult{initial, {}, Termination::Completed, {}}, sup_abs(initial.u(), 0), initial.metric, {},
                   0.0};

    EvolveHooks hooks;
    hooks.record = [&](const FlowState& state) {
        if (extra.on_record) extra.on_record(state);
        return record(state, config.margin, config.lambda, w ? &*w : nullptr);
    };
    hooks.on_step = [&](const FlowState& before, double dt) {
        sim.sup_abs_u = std::max(sim.sup_abs_u, sup_abs(before.u(), 0));
        if (w) w = heat_companion_step(*w, before, dt);
    };
    hooks.on_snapshot = [&](const FlowState& state) {
        write_csv_file((dir / fmt::format("u_t{}.csv", format_time(state.t()))).string(), state.u());
        if (extra.keep_densities) sim.densities.push_back(DensitySnapshot{state.t(), state.metric.density()});
    };

    const auto start = std::chrono::steady_clock::now();
    log << fmt::format("evolving {} on {}x{} nodes, h = {}, bc = {}, scheme = {}, t_end = {}\n", sol.name(), spec.nx,
                       spec.ny, spec.h, to_string(config.bc), to_string(config.scheme), config.t_end);
    sim.result = evolve(initial, config.stepper(), hooks);
    sim.sup_abs_u = std::max(sim.sup_abs_u, sup_abs(sim.result.state.u(), 0));
    sim.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << fmt::format("stopped at t = {} after {} steps ({}), {:.2f} s\n", sim.result.state.t(),
                       sim.result.state.step_count, termination_name(sim.result.termination), sim.wall_seconds);
    return sim;
}

double sup_abs_R(const DiagnosticRow& row) {
    return std::max(std::abs(row.sup_R), std::abs(row.inf_R));
}

Verdict barrier_pair(const Simulation& sim, const RunConfig& config) {
    const double M = sim.sup_abs_u;
    const double eps_pass = std::exp(-2.0 * M) / 4.0 * 0.999;
    const double eps_fail = 2.0 * std::exp(-2.0 * M);
    const GridSpec& spec = sim.initial.spec();
    const ConformalMetric& final_metric = sim.result.state.metric;
    double worst_pass = -std::numeric_limits<double>::infinity();
    double best_fail = -std::numeric_limits<double>::infinity();
    bool pass_ok = true;
    bool fail_ok = false;
    for (const ConformalMetric* m : {&sim.initial, &final_metric}) {
        const Verdict p = barrier_check(barrier_eta(eps_pass, spec), *m, config.tol_barrier);
        const Verdict f = barrier_check(barrier_eta(eps_fail, spec), *m, config.tol_barrier);
        pass_ok = pass_ok && p.passed;
        fail_ok = fail_ok || !f.passed;
        worst_pass = std::max(worst_pass, p.value);
        best_fail = std::max(best_fail, f.value);
    }
    return Verdict{"barrier", pass_ok && fail_ok, worst_pass, config.tol_barrier,
                   fmt::format("M = {:.6g}; eps = {:.6g} gives max Laplacian {:.6g} ({}); control eps = {:.6g} "
                               "gives {:.6g} ({})",
                               M, eps_pass, worst_pass, pass_ok ? "within 1 + tol" : "above 1 + tol", eps_fail,
                               best_fail, fail_ok ? "rejected as expected" : "NOT rejected")};
}

std::vector<Verdict> evaluate_checks(const std::vector<std::string>& checks, const Simulation& sim,
                                     const RunConfig& config) {
    const DiagnosticSeries& series = sim.result.series;
    std::vector<Verdict> out;
    const double k0 = series.empty() ? 0.0 : sup_abs_R(series.front());
    for (const std::string& name : checks) {
        try {
            if (name == "lower_bound") {
                const double margin = lower_bound_margin(series, k0);
                out.push_back(Verdict{name, margin >= -config.tol_lower_bound, margin, config.tol_lower_bound,
                                      fmt::format("min of inf R + k0/(1 + k0 t), k0 = {:.6g}", k0)});
            } else if (name == "comparison") {
                out.push_back(comparison_verify(series, k0, config.tol_lower_bound));
            } else if (name == "decay") {
                for (const auto& [column, p] : config.decay_exponents) {
                    const DecayReport r = decay_envelope(series, column, p, config.tail_fraction);
                    const bool ok = std::isfinite(r.envelope) && r.tail_monotone;
                    out.push_back(Verdict{fmt::format("decay:{}", column), ok, r.envelope, 0.0,
                                          fmt::format("envelope of Q (1+t)^{} is {:.6g}, tail {}", p, r.envelope,
                                                      r.tail_monotone ? "non-increasing" : "increasing")});
                }
            } else if (name == "harnack_slope") {
                const DecayReport r = decay_envelope(series, "sup_H", 1.0, config.tail_fraction);
                const std::vector<double> h = series.column("sup_H");
                const std::size_t tail = std::max<std::size_t>(
                    2, static_cast<std::size_t>(std::ceil(config.tail_fraction * static_cast<double>(h.size()))));
                const bool negligible = std::all_of(h.end() - static_cast<std::ptrdiff_t>(std::min(tail, h.size())),
                                                    h.end(), [](double q) { return std::abs(q) <= 1e-12; });
                if (negligible) {
                    out.push_back(Verdict{name, true, 0.0, config.max_harnack_slope, "sup H vanishes over the tail"});
                } else if (!r.fitted_slope) {
                    out.push_back(Verdict{name, false, std::numeric_limits<double>::quiet_NaN(),
                                          config.max_harnack_slope, "sup H is not positive over the tail"});
                } else {
                    out.push_back(Verdict{name, *r.fitted_slope <= config.max_harnack_slope, *r.fitted_slope,
                                          config.max_harnack_slope, "log-log slope of sup H over the tail"});
                }
            } else if (name == "curvature_decay") {
                const double first = sup_abs_R(series.front());
                const double last = sup_abs_R(series.back());
                const double ratio = first > 0.0 ? last / first : 0.0;
                out.push_back(Verdict{name, last <= config.curvature_decay_ratio * first, ratio,
                                      config.curvature_decay_ratio,
                                      fmt::format("sup|R| went from {:.6g} to {:.6g}", first, last)});
            } else if (name == "flatness") {
                const FlatnessCertificate c =
                    flatness_certificate(sim.result.state, source_node(sim.initial.spec()), config.margin);
                out.push_back(Verdict{name, c.max_violation <= config.tol_flatness, c.max_violation,
                                      config.tol_flatness,
                                      fmt::format("sup|R| = {:.6g}, osc f = {:.6g}, f(x0) = {:.6g}, sup|grad f| = {:.6g}",
                                                  c.sup_abs_R, c.oscillation_f, c.f_at_source, c.sup_grad_f)});
            } else if (name == "barrier") {
                out.push_back(barrier_pair(sim, config));
            } else if (name == "mp1") {
                out.push_back(mp1_verify(series, config.tol_mp1_per_step));
            } else if (name == "aronson_benilan") {
                out.push_back(aronson_benilan_check(sim.densities, config.tol_aronson_benilan, config.margin));
            }
        } catch (const InvalidArgument& e) {
            out.push_back(Verdict{name, false, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what()});
        }
    }
    return out;
}

json run_report(const Simulation& sim, const RunConfig& config) {
    json extra;
    const ExactSolution sol = ExactSolution::parse(config.preset);
    const HypothesesReport hyp = bounded_hypotheses_report(sol);
    extra["hypotheses"] = json{{"bounded_u0", hyp.bounded_u0},
                               {"bounded_R0", hyp.bounded_R0},
                               {"infinite_area", hyp.infinite_area},
                               {"note", hyp.note}};
    extra["steps"] = sim.result.state.step_count;
    extra["t_final"] = sim.result.state.t();
    extra["sup_abs_u"] = sim.sup_abs_u;
    const DiagnosticSeries& series = sim.result.series;
    if (!series.empty()) {
        const double k0 = sup_abs_R(series.front());
        if (k0 > 0.0) {
            extra["shi_window"] = json{{"k0", k0},
                                       {"K1", shi_window_check(series, 1, k0)},
                                       {"K2", shi_window_check(series, 2, k0)}};
        }
    }
    // Diagnostics of the final state on a window twice as deep, to expose boundary influence.
    const int deeper = 2 * config.margin;
    const GridSpec& spec = sim.result.state.metric.spec();
    if (2 * deeper < spec.nx && 2 * deeper < spec.ny) {
        const DiagnosticRow a = record(sim.result.state, config.margin, config.lambda);
        const DiagnosticRow b = record(sim.result.state, deeper, config.lambda);
        json rows = json::object();
        for (std::string_view column : kSeriesColumns) {
            if (column == "t" || column == "area" || column == "sup_w") continue;
            rows[std::string(column)] = json::array({column_value(a, column), column_value(b, column)});
        }
        extra["window_sensitivity"] = json{{"margins", json::array({config.margin, deeper})}, {"final", rows}};
    }
    return extra;
}

int exit_for(const std::vector<Verdict>& verdicts) {
    const bool ok = std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
    return ok ? kExitOk : kExitCheckFailed;
}

void print_verdicts(const std::vector<Verdict>& verdicts, std::ostream& log) {
    for (const Verdict& v : verdicts) {
        log << fmt::format("  {:<22} {}  value = {:.6g}  tol = {:.6g}  {}\n", v.name, v.passed ? "pass" : "FAIL",
                           v.value, v.tolerance, v.detail);
    }
}

/// Shared driver for the evolving commands. `finish` evaluates checks on a completed run.
int run_evolving(const std::string& command, const RunConfig& config, const SimulationHooks& hooks,
                 const std::function<std::vector<Verdict>(const Simulation&, const fs::path&)>& finish,
                 const std::function<void(const Simulation&, json&)>& report, std::ostream& log) {
    Manifest manifest;
    manifest.command = command;
    manifest.config = &config;
    const fs::path dir = prepare_output(config.output_dir);
    try {
        config.validate();
        const Simulation sim = simulate(config, dir, hooks, log);
        manifest.wall_seconds = sim.wall_seconds;
        manifest.termination = termination_name(sim.result.termination);
        manifest.message = sim.result.message;
        write_series_csv_file((dir / "series.csv").string(), sim.result.series);
        manifest.extra = run_report(sim, config);
        if (report) report(sim, manifest.extra);
        if (sim.result.termination != Termination::Completed) {
            write_csv_file((dir / "u_abort.csv").string(), sim.result.state.u());
            log << fmt::format("run aborted: {}\n", sim.result.message);
            manifest.exit_code = kExitNumericalAbort;
        } else {
            manifest.verdicts = finish(sim, dir);
            print_verdicts(manifest.verdicts, log);
            manifest.exit_code = exit_for(manifest.verdicts);
        }
    } catch (const ConfigError& e) {
        manifest.termination = "config_error";
        manifest.message = e.what();
        manifest.exit_code = kExitConfigError;
    } catch (const InvalidArgument& e) {
        manifest.termination = "config_error";
        manifest.message = e.what();
        manifest.exit_code = kExitConfigError;
    } catch (const NumericalError& e) {
        manifest.termination = "numerical_abort";
        manifest.message = e.what();
        manifest.exit_code = kExitNumericalAbort;
    }
    if (manifest.exit_code == kExitConfigError || manifest.termination == "numerical_abort") {
        log << manifest.message << "\n";
    }
    manifest.write(dir);
    log << fmt::format("{}: exit {} ({})\n", command, manifest.exit_code, (dir / "manifest.json").string());
    return manifest.exit_code;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& log) {
    SimulationHooks hooks;
    hooks.companion = config.heat_companion;
    hooks.keep_densities =
        std::find(config.checks.begin(), config.checks.end(), "aronson_benilan") != config.checks.end();
    return run_evolving(
        "run", config, hooks,
        [&](const Simulation& sim, const fs::path&) { return evaluate_checks(resolve_checks(config), sim, config); },
        {}, log);
}

int cmd_mp_lab(const RunConfig& config, std::ostream& log) {
    SimulationHooks hooks;
    hooks.companion = true;
    const std::vector<std::string> checks = {"barrier", "mp1", "comparison"};
    return run_evolving(
        "mp-lab", config, hooks,
        [&](const Simulation& sim, const fs::path& dir) {
            std::vector<Verdict> verdicts = evaluate_checks(checks, sim, config);
            const DiagnosticSeries& series = sim.result.series;
            std::string text = fmt::format("maximum-principle report\npreset {}\nt_end {}\n", config.preset,
                                           sim.result.state.t());
            for (const Verdict& v : verdicts) {
                text += fmt::format("\n[{}]\npassed = {}\nvalue = {:.17g}\ntolerance = {:.17g}\ndetail = {}\n", v.name,
                                    v.passed ? "true" : "false", v.value, v.tolerance, v.detail);
            }
            text += "\n[sup_w]\n";
            for (const DiagnosticRow& row : series.rows()) text += fmt::format("{:.17g} {:.17g}\n", row.t, row.sup_w);
            write_text_atomic(dir / "mp_report.txt", text);
            return verdicts;
        },
        {}, log);
}

int cmd_conjecture(const RunConfig& config, std::ostream& log) {
    double beta = config.hsu_beta;
    const ExactSolution sol = ExactSolution::parse(config.preset);
    if (const auto* p = std::get_if<HsuProfile>(&sol.kind())) beta = p->beta;
    if (const auto* p = std::get_if<HsuSandwich>(&sol.kind())) beta = p->beta;

    struct FitRow {
        double t;
        HsuFit fit;
    };
    auto fits = std::make_shared<std::vector<FitRow>>();
    SimulationHooks hooks;
    hooks.on_record = [&, fits](const FlowState& state) {
        fits->push_back(FitRow{state.t(), hsu_fit(state.metric, beta, config.margin)});
    };
    return run_evolving(
        "conjecture", config, hooks,
        [&, fits](const Simulation&, const fs::path& dir) {
            std::string text = "t,k_fit,residual,mismatch\n";
            for (const FitRow& row : *fits) {
                text += fmt::format("{:.17g},{:.17g},{:.17g},{}\n", row.t, row.fit.k, row.fit.residual,
                                    row.fit.mismatch ? 1 : 0);
            }
            write_text_atomic(dir / "conjecture.csv", text);
            if (!fits->empty()) {
                log << fmt::format("beta = {}: k_fit {:.6g} -> {:.6g}, residual {:.3g} -> {:.3g}{}\n", beta,
                                   fits->front().fit.k, fits->back().fit.k, fits->front().fit.residual,
                                   fits->back().fit.residual,
                                   fits->back().fit.mismatch ? " (profile mismatch)" : "");
            }
            return std::vector<Verdict>{};
        },
        [&, fits](const Simulation&, json& extra) {
            extra["hsu_beta"] = beta;
            if (!fits->empty()) {
                extra["k_fit_initial"] = fits->front().fit.k;
                extra["k_fit_final"] = fits->back().fit.k;
                extra["mismatch_final"] = fits->back().fit.mismatch;
            }
        },
        log);
}

int cmd_verify_exact(const VerifyExactOptions& options, std::ostream& log) {
    const ExactSolution sol = ExactSolution::parse(options.preset);
    if (options.cells.empty()) throw ConfigError("verify-exact needs at least one grid");
    if (!(options.extent > 0.0) || !(options.dt > 0.0) || !(options.time >= options.dt)) {
        throw ConfigError("verify-exact needs extent > 0, dt > 0 and time >= dt");
    }
    std::vector<int> cells = options.cells;
    std::sort(cells.begin(), cells.end());
    std::vector<double> residuals;
    for (int n : cells) {
        if (n < 8) throw ConfigError(fmt::format("grid with {} cells is too coarse", n));
        const GridSpec spec = GridSpec::centered(n + 1, n + 1, 2.0 * options.extent / n);
        residuals.push_back(pde_residual(sol, spec, options.time, options.dt, options.margin));
    }
    const bool exact = std::all_of(residuals.begin(), residuals.end(),
                                   [&](double r) { return r <= options.exact_floor; });
    bool ratios_ok = cells.size() > 1;
    std::string text = "cells,h,residual,ratio\n";
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const double h = 2.0 * options.extent / cells[k];
        std::string ratio_text;
        if (k > 0) {
            const double ratio = residuals[k - 1] / residuals[k];
            ratios_ok = ratios_ok && ratio >= options.ratio_low && ratio <= options.ratio_high;
            ratio_text = fmt::format("{:.17g}", ratio);
        }
        text += fmt::format("{},{:.17g},{:.17g},{}\n", cells[k], h, residuals[k], ratio_text);
        log << fmt::format("  {:>5} cells  h = {:<10.6g} residual = {:.6e}  {}\n", cells[k], h, residuals[k],
                           ratio_text.empty() ? "" : "ratio = " + ratio_text);
    }
    const bool passed = exact || ratios_ok;
    const fs::path dir = prepare_output(options.output_dir);
    write_text_atomic(dir / "verify_exact.csv", text);
    log << fmt::format("{}: {} ({})\n", sol.name(), passed ? "pass" : "FAIL",
                       exact ? "residual at round-off" : "convergence ratios");
    return passed ? kExitOk : kExitCheckFailed;
}

int cmd_aperture(const RunConfig& config, const ApertureOptions& options, std::ostream& log) {
    const ExactSolution sol = ExactSolution::parse(config.preset);
    if (options.time != 0.0 && !sol.time_parametrized()) {
        throw ConfigError(fmt::format("preset {} only defines initial data", sol.name()));
    }
    const GridSpec spec = config.grid();
    const ConformalMetric metric(sample_to_grid(sol, spec, options.time), options.time);
    const std::pair<int, int> source = source_node(spec);

    std::vector<double> radii = config.radii;
    if (radii.empty()) {
        const DistanceField dist = geodesic_distance(metric, source);
        double ring = std::numeric_limits<double>::infinity();
        for (int j = 0; j < spec.ny; ++j) {
            for (int i = 0; i < spec.nx; ++i) {
                if (i == 0 || j == 0 || i == spec.nx - 1 || j == spec.ny - 1) ring = std::min(ring, dist.distance(i, j));
            }
        }
        for (int k = 0; k < 5; ++k) radii.push_back(ring * (0.5 + 0.1 * k));
    }
    const ApertureEstimate estimate = aperture_estimate(metric, radii, source);

    const fs::path dir = prepare_output(config.output_dir);
    std::string text = "r_g,L,L/(2pi r_g)\n";
    for (const ApertureRow& row : estimate.rows) {
        text += fmt::format("{:.17g},{:.17g},{:.17g}\n", row.radius, row.length, row.ratio);
        log << fmt::format("  r = {:<10.6g} L = {:<12.6g} L/(2 pi r) = {:.6g}\n", row.radius, row.length, row.ratio);
    }
    write_text_atomic(dir / "aperture.csv", text);
    log << fmt::format("aperture slope {:.6g}\n", estimate.slope);
    if (options.expect) {
        const auto [lo, hi] = *options.expect;
        const bool ok = estimate.slope >= lo && estimate.slope <= hi;
        log << fmt::format("expected range [{}, {}]: {}\n", lo, hi, ok ? "pass" : "FAIL");
        return ok ? kExitOk : kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_decay_report(const std::string& series_path, const RunConfig& config, std::ostream& log) {
    DiagnosticSeries series;
    try {
        series = read_series_csv_file(series_path);
    } catch (const InvalidArgument& e) {
        throw ConfigError(fmt::format("{}: {}", series_path, e.what()));
    }
    if (series.size() < 2) throw ConfigError(fmt::format("{} holds fewer than two rows", series_path));
    const fs::path dir = prepare_output(config.output_dir);
    std::string text = "quantity,p,envelope_C,tail_monotone,fitted_slope\n";
    bool ok = true;
    for (const auto& [column, p] : config.decay_exponents) {
        DecayReport r;
        try {
            r = decay_envelope(series, column, p, config.tail_fraction);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        ok = ok && r.tail_monotone && std::isfinite(r.envelope);
        const std::string slope = r.fitted_slope ? fmt::format("{:.17g}", *r.fitted_slope) : "";
        text += fmt::format("{},{},{:.17g},{},{}\n", r.quantity, r.exponent, r.envelope, r.tail_monotone ? 1 : 0, slope);
        log << fmt::format("  {:<12} p = {:<3} C = {:<12.6g} tail {:<14} slope {}\n", r.quantity, r.exponent,
                           r.envelope, r.tail_monotone ? "non-increasing" : "INCREASING",
                           slope.empty() ? "-" : slope);
    }
    write_text_atomic(dir / "decay_report.csv", text);
    return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace ricci
