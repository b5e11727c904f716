#include "ricci/flow.hpp"

#include "ricci/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace ricci {

FlowState::FlowState(ConformalMetric m, BoundaryCondition b, BoundaryDriver d)
    : metric(std::move(m)), bc(std::move(b)), driver(std::move(d)) {
    bc.check_compatible(metric.spec());
    if (bc.kind() == BoundaryKind::DirichletFrozen && !driver) {
        bc.frozen_values();  // throws when a frozen condition carries no values
    }
}

std::string to_string(Scheme scheme) {
    return scheme == Scheme::Heun ? "heun" : "euler";
}

Scheme parse_scheme(const std::string& text) {
    if (text == "heun") return Scheme::Heun;
    if (text == "euler") return Scheme::ExplicitEuler;
    throw ConfigError(fmt::format("unknown scheme '{}' (expected heun or euler)", text));
}

std::string to_string(Termination termination) {
    switch (termination) {
        case Termination::Completed: return "completed";
        case Termination::NumericalAbort: return "numerical_abort";
        case Termination::StepGuard: return "step_guard";
        case Termination::WallGuard: return "wall_guard";
    }
    return "unknown";
}

void StepperConfig::validate() const {
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
        throw ConfigError(fmt::format("cfl_safety must lie in (0, 1], got {}", cfl_safety));
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw ConfigError(fmt::format("t_end must be finite and non-negative, got {}", t_end));
    }
    if (dt_override && !(*dt_override > 0.0)) {
        throw ConfigError("dt override must be positive");
    }
    for (double s : snapshot_times) {
        if (!std::isfinite(s) || s < 0.0) throw ConfigError(fmt::format("bad snapshot time {}", s));
    }
}

namespace {

bool updates_ring(BoundaryKind kind) {
    return kind != BoundaryKind::DirichletFrozen;
}

bool on_ring(const GridSpec& s, int i, int j) {
    return i == 0 || j == 0 || i == s.nx - 1 || j == s.ny - 1;
}

// e^{-2u} Δu at every node; zero on the ring under DirichletFrozen.
std::vector<double> flow_rate(const ScalarField& u, BoundaryKind kind) {
    const ScalarField lap = laplacian(u, BoundaryCondition::stencil(kind));
    const auto uu = u.data();
    const auto ll = lap.data();
    std::vector<double> rate(uu.size());
    for (std::size_t k = 0; k < rate.size(); ++k) rate[k] = std::exp(-2.0 * uu[k]) * ll[k];
    return rate;
}

void impose_ring(std::vector<double>& u, const FlowState& state, double t_new) {
    const GridSpec& s = state.metric.spec();
    if (state.driver) {
        for (int j = 0; j < s.ny; ++j) {
            for (int i = 0; i < s.nx; ++i) {
                if (on_ring(s, i, j)) u[s.index(i, j)] = state.driver(s.x(i), s.y(j), t_new);
            }
        }
        return;
    }
    const ScalarField& frozen = state.bc.frozen_values();
    for (int j = 0; j < s.ny; ++j) {
        for (int i = 0; i < s.nx; ++i) {
            if (on_ring(s, i, j)) u[s.index(i, j)] = frozen(i, j);
        }
    }
}

FlowState advance(const FlowState& state, double dt, Scheme scheme, double t_new) {
    const double bound = stable_dt(state, 1.0);
    if (!(dt > 0.0)) throw InvalidArgument(fmt::format("time step must be positive, got {}", dt));
    if (dt > bound * (1.0 + 1e-12)) {
        throw NumericalError(fmt::format("dt = {:.6g} exceeds the explicit stability bound {:.6g} at t = {:.6g}", dt,
                                         bound, state.t()));
    }
    const BoundaryKind kind = state.bc.kind();
    const GridSpec& s = state.metric.spec();
    const auto u0 = state.u().data();
    const std::vector<double> k1 = flow_rate(state.u(), kind);

    std::vector<double> next(u0.begin(), u0.end());
    for (std::size_t k = 0; k < next.size(); ++k) next[k] += dt * k1[k];
    if (!updates_ring(kind)) impose_ring(next, state, t_new);

    if (scheme == Scheme::Heun) {
        const ScalarField predicted(s, next, 0);
        const std::vector<double> k2 = flow_rate(predicted, kind);
        for (std::size_t k = 0; k < next.size(); ++k) next[k] = u0[k] + 0.5 * dt * (k1[k] + k2[k]);
        if (!updates_ring(kind)) impose_ring(next, state, t_new);
    }

    for (std::size_t k = 0; k < next.size(); ++k) {
        if (!std::isfinite(next[k])) {
            throw NumericalError(fmt::format("flow produced a non-finite value at node ({}, {}) stepping from t = {:.6g}",
                                             k % static_cast<std::size_t>(s.nx), k / static_cast<std::size_t>(s.nx),
                                             state.t()));
        }
    }
    FlowState out(ConformalMetric(ScalarField(s, std::move(next)), t_new), state.bc, state.driver);
    out.step_count = state.step_count + 1;
    return out;
}

}  // namespace

double stable_dt(const FlowState& state, double cfl_safety) {
    const ScalarField& u = state.u();
    const GridSpec& s = u.spec();
    const int margin = updates_ring(state.bc.kind()) ? 0 : 1;
    const double min_u = inf_value(u, margin);
    const double max_diffusivity = std::exp(-2.0 * min_u);
    return cfl_safety * s.h * s.h / (4.0 * max_diffusivity);
}

FlowState step(const FlowState& state, double dt, Scheme scheme) {
    return advance(state, dt, scheme, state.t() + dt);
}

ScalarField heat_companion_step(const ScalarField& w, const FlowState& state, double dt) {
    require_same_spec(w, state.u());
    const ScalarField lap = laplacian(w, BoundaryCondition::stencil(state.bc.kind()));
    const auto uu = state.u().data();
    const auto ww = w.data();
    const auto ll = lap.data();
    std::vector<double> out(ww.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = ww[k] + dt * std::exp(-2.0 * uu[k]) * ll[k];
    ScalarField next(w.spec(), std::move(out));
    next.require_finite("heat companion");
    return next;
}

double total_area(const ScalarField& u, BoundaryKind kind) {
    const GridSpec& s = u.spec();
    double area = 0.0;
    for (int j = 0; j < s.ny; ++j) {
        const double wj = (kind != BoundaryKind::Periodic && (j == 0 || j == s.ny - 1)) ? 0.5 : 1.0;
        double row = 0.0;
        for (int i = 0; i < s.nx; ++i) {
            const double wi = (kind != BoundaryKind::Periodic && (i == 0 || i == s.nx - 1)) ? 0.5 : 1.0;
            row += wi * std::exp(2.0 * u(i, j));
        }
        area += wj * row;
    }
    return area * s.h * s.h;
}

EvolveResult evolve(const FlowState& initial, const StepperConfig& config, const EvolveHooks& hooks) {
    config.validate();
    EvolveResult result{initial, {}, Termination::Completed, {}};
    FlowState& state = result.state;

    const double t_start = initial.t();
    const double t_end = std::max(config.t_end, t_start);
    const double interval = config.diagnostic_interval;
    std::vector<double> snapshots;
    for (double s : config.snapshot_times) {
        if (s >= t_start && s <= t_end) snapshots.push_back(s);
    }
    std::sort(snapshots.begin(), snapshots.end());
    snapshots.erase(std::unique(snapshots.begin(), snapshots.end()), snapshots.end());

    std::size_t next_snap = 0;
    std::size_t diag_index = 1;
    double last_recorded = -std::numeric_limits<double>::infinity();
    auto next_diag_time = [&] {
        return interval > 0.0 ? t_start + static_cast<double>(diag_index) * interval
                              : std::numeric_limits<double>::infinity();
    };
    auto record = [&] {
        if (hooks.record && state.t() > last_recorded) {
            DiagnosticRow row = hooks.record(state);
            row.t = state.t();
            row.step = state.step_count;
            result.series.append(row);
            last_recorded = state.t();
        }
    };
    auto fire_snapshots = [&] {
        while (next_snap < snapshots.size() && snapshots[next_snap] <= state.t()) {
            if (hooks.on_snapshot) hooks.on_snapshot(state);
            ++next_snap;
        }
    };

    const auto wall_start = std::chrono::steady_clock::now();
    try {
        record();
        fire_snapshots();
        while (state.t() < t_end) {
            if (state.step_count - initial.step_count >= config.max_steps) {
                result.termination = Termination::StepGuard;
                result.message = fmt::format("step limit {} reached at t = {:.6g}", config.max_steps, state.t());
                break;
            }
            if (config.max_wall_seconds > 0.0) {
                const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - wall_start;
                if (elapsed.count() > config.max_wall_seconds) {
                    result.termination = Termination::WallGuard;
                    result.message = fmt::format("wall-clock limit {} s reached at t = {:.6g}",
                                                 config.max_wall_seconds, state.t());
                    break;
                }
            }
            const double t = state.t();
            double diag_t = next_diag_time();
            if (std::abs(diag_t - t_end) <= 1e-9 * std::max(1.0, t_end)) diag_t = t_end;
            const double snap_t = next_snap < snapshots.size() ? snapshots[next_snap]
                                                               : std::numeric_limits<double>::infinity();
            const double next_event = std::min({t_end, diag_t, snap_t});

            double dt = config.dt_override ? *config.dt_override : stable_dt(state, config.cfl_safety);
            double t_new = t + dt;
            if (t_new >= next_event - 1e-12 * std::max(1.0, std::abs(next_event))) {
                t_new = next_event;
                dt = next_event - t;
            }
            FlowState next = advance(state, dt, config.scheme, t_new);
            if (hooks.on_step) hooks.on_step(state, dt);
            state = std::move(next);

            if (state.t() >= diag_t) {
                record();
                ++diag_index;
            } else if (state.t() >= t_end) {
                record();
            }
            fire_snapshots();
        }
    } catch (const NumericalError& e) {
        result.termination = Termination::NumericalAbort;
        result.message = e.what();
    }
    return result;
}

}  // namespace ricci
