#pragma once

#include "ricci/conformal.hpp"
#include "ricci/grid.hpp"
#include "ricci/series.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ricci {

/// Time-dependent Dirichlet data u(x, y, t), used instead of the frozen ring when set.
using BoundaryDriver = std::function<double(double x, double y, double t)>;

/**
 * Evolving conformal factor under ∂t u = e^{-2u} Δu.
 *
 * Under DirichletFrozen the outer ring keeps the frozen values, or follows
 * `driver` when one is supplied. Periodic and LinearExtrapolate update every node.
 */
struct FlowState {
    ConformalMetric metric;
    BoundaryCondition bc;
    std::size_t step_count = 0;
    BoundaryDriver driver;

    FlowState(ConformalMetric m, BoundaryCondition b, BoundaryDriver d = {});

    double t() const { return metric.t(); }
    const ScalarField& u() const { return metric.u(); }
};

enum class Scheme { ExplicitEuler, Heun };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

struct StepperConfig {
    Scheme scheme = Scheme::Heun;
    double cfl_safety = 0.9;
    double t_end = 1.0;
    std::vector<double> snapshot_times;
    /// Time between diagnostic rows; <= 0 records only the first and last state.
    double diagnostic_interval = 0.1;
    /// Fixed dt replacing the adaptive choice. Still subject to the stability check.
    std::optional<double> dt_override;
    std::size_t max_steps = 50'000'000;
    double max_wall_seconds = 0.0;  // 0 disables the wall-clock guard

    void validate() const;
};

/// cfl · h² / (4 · max e^{-2u}) over the nodes the stepper updates.
double stable_dt(const FlowState& state, double cfl_safety);

/// One step of the given scheme. Rejects dt above the stability bound and non-finite results.
FlowState step(const FlowState& state, double dt, Scheme scheme = Scheme::Heun);

/// w <- w + dt · e^{-2u} Δw using the metric of `state`, on the same boundary kind.
/// Under DirichletFrozen the ring of `w` stays fixed.
ScalarField heat_companion_step(const ScalarField& w, const FlowState& state, double dt);

/// Integrated density Σ e^{2u} h² (trapezoid weights on the outer ring unless periodic).
double total_area(const ScalarField& u, BoundaryKind kind);

enum class Termination { Completed, NumericalAbort, StepGuard, WallGuard };
std::string to_string(Termination termination);

/// Callbacks invoked by `evolve`. All receive read-only snapshots.
struct EvolveHooks {
    /// Builds a diagnostic row at each cadence time (including t = start and t_end).
    std::function<DiagnosticRow(const FlowState&)> record;
    /// Called at each requested snapshot time.
    std::function<void(const FlowState&)> on_snapshot;
    /// Called after every accepted step with the state before the step and the dt used.
    std::function<void(const FlowState& before, double dt)> on_step;
};

struct EvolveResult {
    FlowState state;
    DiagnosticSeries series;
    Termination termination = Termination::Completed;
    std::string message;
};

/// Steps to config.t_end with adaptive dt, landing exactly on diagnostic and snapshot times.
/// Numerical failures end the run with `NumericalAbort` and the last good state; they are not rethrown.
EvolveResult evolve(const FlowState& initial, const StepperConfig& config, const EvolveHooks& hooks);

}  // namespace ricci
