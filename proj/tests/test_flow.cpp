#include "ricci/error.hpp"
#include "ricci/exact.hpp"
#include "ricci/flow.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace ricci;

namespace {

GridSpec square(int cells, double extent) {
    return GridSpec::centered(cells + 1, cells + 1, 2.0 * extent / cells);
}

FlowState frozen_state(const ScalarField& u, double t = 0.0) {
    return FlowState(ConformalMetric(u, t), BoundaryCondition::frozen(u));
}

StepperConfig config_to(double t_end, double interval = 0.1) {
    StepperConfig c;
    c.t_end = t_end;
    c.diagnostic_interval = interval;
    return c;
}

DiagnosticRow empty_row(const FlowState&) {
    return DiagnosticRow{};
}

}  // namespace

TEST_CASE("schemes parse") {
    CHECK(parse_scheme("heun") == Scheme::Heun);
    CHECK(parse_scheme("euler") == Scheme::ExplicitEuler);
    CHECK(parse_scheme(to_string(Scheme::Heun)) == Scheme::Heun);
    CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);
}

TEST_CASE("flow states check their boundary data") {
    const GridSpec s = square(16, 1.0);
    const ScalarField u(s, 0.0);
    CHECK_THROWS_AS(FlowState(ConformalMetric(u), BoundaryCondition::stencil(BoundaryKind::DirichletFrozen)),
                    InvalidArgument);
    CHECK_NOTHROW(FlowState(ConformalMetric(u), BoundaryCondition::stencil(BoundaryKind::DirichletFrozen),
                            [](double, double, double) { return 0.0; }));
    CHECK_THROWS_AS(FlowState(ConformalMetric(u), BoundaryCondition::periodic()), InvalidArgument);
    CHECK_THROWS_AS(FlowState(ConformalMetric(u), BoundaryCondition::frozen(ScalarField(square(18, 1.0), 0.0))),
                    InvalidArgument);
}

TEST_CASE("constant conformal factors are fixed points") {
    const GridSpec s{16, 16, 0.25, 0.0, 0.0};
    for (Scheme scheme : {Scheme::ExplicitEuler, Scheme::Heun}) {
        for (const BoundaryCondition& bc :
             {BoundaryCondition::periodic(), BoundaryCondition::extrapolate(),
              BoundaryCondition::frozen(ScalarField(s, -0.7))}) {
            FlowState state(ConformalMetric(ScalarField(s, -0.7)), bc);
            for (int n = 0; n < 20; ++n) state = step(state, stable_dt(state, 0.9), scheme);
            for (double v : state.u().data()) CHECK(v == -0.7);
            CHECK(state.step_count == 20);
        }
    }
}

TEST_CASE("stable time step") {
    const GridSpec s = square(16, 2.0);
    ScalarField u(s, 0.0);
    u(5, 5) = -0.5;
    u(0, 0) = -3.0;  // ring node, frozen under dirichlet
    const FlowState frozen = frozen_state(u);
    CHECK(stable_dt(frozen, 0.9) == doctest::Approx(0.9 * s.h * s.h / (4.0 * std::exp(1.0))));
    const FlowState ext(ConformalMetric(u), BoundaryCondition::extrapolate());
    CHECK(stable_dt(ext, 1.0) == doctest::Approx(s.h * s.h / (4.0 * std::exp(6.0))));

    const double bound = stable_dt(frozen, 1.0);
    CHECK_THROWS_AS(step(frozen, 1.01 * bound), NumericalError);
    CHECK_NOTHROW(step(frozen, bound));
    CHECK_THROWS_AS(step(frozen, 0.0), InvalidArgument);
}

TEST_CASE("frozen rings stay fixed") {
    const ScalarField u0 = sample_to_grid(ExactSolution(GaussianBump{0.5, 0.6}), square(32, 2.0), 0.0);
    FlowState state = frozen_state(u0);
    for (int n = 0; n < 50; ++n) state = step(state, stable_dt(state, 0.9));
    const GridSpec& s = u0.spec();
    bool ring_fixed = true;
    bool interior_moved = false;
    for (int j = 0; j < s.ny; ++j) {
        for (int i = 0; i < s.nx; ++i) {
            const bool ring = i == 0 || j == 0 || i == s.nx - 1 || j == s.ny - 1;
            if (ring) ring_fixed = ring_fixed && state.u()(i, j) == u0(i, j);
            else interior_moved = interior_moved || state.u()(i, j) != u0(i, j);
        }
    }
    CHECK(ring_fixed);
    CHECK(interior_moved);
}

TEST_CASE("a positive bump decays toward its boundary value") {
    const ScalarField u0 = sample_to_grid(ExactSolution(GaussianBump{0.5, 1.0}), square(64, 4.0), 0.0);
    const EvolveResult r = evolve(frozen_state(u0), config_to(1.0), {});
    CHECK(r.termination == Termination::Completed);
    CHECK(sup_value(r.state.u(), 0) < 0.5);
    CHECK(inf_value(r.state.u(), 0) >= inf_value(u0, 0) - 1e-12);
}

TEST_CASE("periodic area conservation") {
    const GridSpec s = GridSpec::centered(64, 64, 0.25);
    for (const char* preset : {"bump:0.5:1", "bump:-0.5:1"}) {
        const ScalarField u0 = sample_to_grid(ExactSolution::parse(preset), s, 0.0);
        const FlowState initial(ConformalMetric(u0), BoundaryCondition::periodic());
        const double a0 = total_area(u0, BoundaryKind::Periodic);
        const EvolveResult r = evolve(initial, config_to(2.0, 0.5), {});
        const double drift = std::abs(total_area(r.state.u(), BoundaryKind::Periodic) - a0) / a0;
        CAPTURE(preset);
        CHECK(drift <= 1e-6);
    }
}

TEST_CASE("area weights") {
    CHECK(total_area(ScalarField(square(10, 1.0), 0.0), BoundaryKind::DirichletFrozen) == doctest::Approx(4.0));
    const GridSpec p{16, 16, 0.5, 0.0, 0.0};
    CHECK(total_area(ScalarField(p, 0.5 * std::log(2.0)), BoundaryKind::Periodic) == doctest::Approx(2.0 * 64.0));
}

TEST_CASE("the heat companion obeys a discrete maximum principle") {
    const ScalarField u0 = sample_to_grid(ExactSolution(GaussianBump{-0.5, 1.0}), square(48, 3.0), 0.0);
    for (const BoundaryCondition& bc : {BoundaryCondition::frozen(u0), BoundaryCondition::extrapolate()}) {
        FlowState state(ConformalMetric(u0), bc);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> w0(u0.spec().size());
        for (double& v : w0) v = dist(rng);
        ScalarField w(u0.spec(), w0);
        double sup = sup_abs(w, 0);
        for (int n = 0; n < 100; ++n) {
            const double dt = stable_dt(state, 0.9);
            w = heat_companion_step(w, state, dt);
            state = step(state, dt);
            const double next = sup_abs(w, 0);
            CHECK(next <= sup * (1.0 + 1e-14));
            sup = next;
        }
        CHECK(sup < 1.0);
    }
}

TEST_CASE("evolve lands on diagnostic, snapshot and end times") {
    const ScalarField u0 = sample_to_grid(ExactSolution(GaussianBump{0.5, 1.0}), square(32, 3.0), 0.0);
    StepperConfig c = config_to(0.5, 0.1);
    c.snapshot_times = {0.25, 0.05, 0.25, 7.0};
    std::vector<double> snaps;
    std::vector<double> dts;
    EvolveHooks hooks;
    hooks.record = empty_row;
    hooks.on_snapshot = [&](const FlowState& s) { snaps.push_back(s.t()); };
    hooks.on_step = [&](const FlowState&, double dt) { dts.push_back(dt); };
    const EvolveResult r = evolve(frozen_state(u0), c, hooks);
    REQUIRE(r.termination == Termination::Completed);
    const std::vector<double> times = r.series.column("t");
    REQUIRE(times.size() == 6);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(times[k] == doctest::Approx(0.1 * k).epsilon(1e-12));
    CHECK(times.back() == 0.5);
    CHECK(r.state.t() == 0.5);
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0] == doctest::Approx(0.05));
    CHECK(snaps[1] == doctest::Approx(0.25));
    CHECK(dts.size() == r.state.step_count);
    CHECK(r.series.back().step == r.state.step_count);
}

TEST_CASE("evolve with no cadence records the end points only") {
    const ScalarField u0 = sample_to_grid(ExactSolution(GaussianBump{0.5, 1.0}), square(32, 3.0), 0.0);
    EvolveHooks hooks;
    hooks.record = empty_row;
    const EvolveResult r = evolve(frozen_state(u0), config_to(0.3, 0.0), hooks);
    REQUIRE(r.series.size() == 2);
    CHECK(r.series.back().t == 0.3);
}

TEST_CASE("evolve reports aborts and guards instead of throwing") {
    const ScalarField u0 = sample_to_grid(ExactSolution(GaussianBump{0.5, 1.0}), square(32, 3.0), 0.0);
    StepperConfig c = config_to(1.0);
    c.dt_override = 1.0;
    const EvolveResult aborted = evolve(frozen_state(u0), c, {});
    CHECK(aborted.termination == Termination::NumericalAbort);
    CHECK_FALSE(aborted.message.empty());
    CHECK(aborted.state.t() == 0.0);

    StepperConfig guarded = config_to(1.0);
    guarded.max_steps = 5;
    const EvolveResult stopped = evolve(frozen_state(u0), guarded, {});
    CHECK(stopped.termination == Termination::StepGuard);
    CHECK(stopped.state.step_count == 5);

    StepperConfig bad = config_to(1.0);
    bad.cfl_safety = 1.5;
    CHECK_THROWS_AS(evolve(frozen_state(u0), bad, {}), ConfigError);
}

TEST_CASE("evolving cigar data tracks the exact cigar") {
    const ExactSolution cigar(Cigar{});
    const BoundaryDriver exact = [&](double x, double y, double t) { return eval_u(cigar, x, y, t); };
    for (Scheme scheme : {Scheme::ExplicitEuler, Scheme::Heun}) {
        double err[2];
        for (int level = 0; level < 2; ++level) {
            const GridSpec s = square(32 << level, 4.0);
            const FlowState initial(ConformalMetric(sample_to_grid(cigar, s, 0.0)),
                                    BoundaryCondition::stencil(BoundaryKind::DirichletFrozen), exact);
            StepperConfig c = config_to(0.25, 0.0);
            c.scheme = scheme;
            const EvolveResult r = evolve(initial, c, {});
            REQUIRE(r.termination == Termination::Completed);
            err[level] = sup_abs(r.state.u() - sample_to_grid(cigar, s, 0.25), 0);
        }
        CAPTURE(to_string(scheme));
        CHECK(err[1] < 1e-3);
        CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.25));
    }
}
