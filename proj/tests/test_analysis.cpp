#include "ricci/analysis.hpp"
#include "ricci/error.hpp"
#include "ricci/exact.hpp"

#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

using namespace ricci;

namespace {

DiagnosticSeries make_series(const std::vector<double>& times, const std::function<void(DiagnosticRow&)>& fill) {
    DiagnosticSeries s;
    std::size_t step = 0;
    for (double t : times) {
        DiagnosticRow r;
        r.t = t;
        r.step = step;
        step += 10;
        fill(r);
        s.append(r);
    }
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
    return out;
}

GridSpec square(int cells, double extent) {
    return GridSpec::centered(cells + 1, cells + 1, 2.0 * extent / cells);
}

ConformalMetric hsu_metric(double beta, double k, const GridSpec& s) {
    return ConformalMetric(sample_to_grid(ExactSolution(HsuProfile{beta, k}), s, 0.0));
}

}  // namespace

TEST_CASE("lower-bound margin") {
    const double k0 = 1.0;
    const DiagnosticSeries flat = make_series(linspace(0.0, 2.0, 11), [](DiagnosticRow&) {});
    // min over rows of k0/(1 + k0 t), attained at the last row
    CHECK(lower_bound_margin(flat, k0) == doctest::Approx(1.0 / 3.0));
    CHECK(lower_bound_margin(flat, 0.0) == 0.0);

    const DiagnosticSeries equality = make_series(linspace(0.0, 5.0, 21), [&](DiagnosticRow& r) {
        r.inf_R = -k0 / (1.0 + k0 * r.t);
        r.sup_R = 0.5;
    });
    CHECK(std::abs(lower_bound_margin(equality, k0)) < 1e-15);
    CHECK_THROWS_AS(lower_bound_margin(equality, 0.9), InvalidArgument);
    CHECK_THROWS_AS(lower_bound_margin(DiagnosticSeries{}, 1.0), InvalidArgument);
    CHECK(comparison_barrier(2.0, 0.5) == doctest::Approx(-1.0));
}

TEST_CASE("comparison and lower-bound margin agree") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        const DiagnosticSeries s = make_series(linspace(0.0, 3.0, 16), [&](DiagnosticRow& r) {
            r.sup_R = 1.0;
            r.inf_R = -1.0 / (1.0 + r.t) + dist(rng);
        });
        const double k0 = std::max(1.0, std::abs(s.front().inf_R));
        const double margin = lower_bound_margin(s, k0);
        const Verdict v = comparison_verify(s, k0, 1e-3);
        CHECK(v.value == doctest::Approx(margin));
        CHECK(v.passed == (margin >= -1e-3));
        CHECK(v.tolerance == 1e-3);
    }
}

TEST_CASE("decay envelopes") {
    const std::vector<double> times = linspace(0.0, 9.0, 19);
    const DiagnosticSeries decaying = make_series(times, [](DiagnosticRow& r) { r.sup_H = 1.0 / (1.0 + r.t); });
    const DecayReport d = decay_envelope(decaying, "sup_H", 1.0);
    CHECK(d.envelope == doctest::Approx(1.0));
    CHECK(d.tail_monotone);
    REQUIRE(d.fitted_slope.has_value());
    CHECK(*d.fitted_slope == doctest::Approx(-1.0));

    const DiagnosticSeries constant = make_series(times, [](DiagnosticRow& r) { r.sup_H = 1.0; });
    const DecayReport c = decay_envelope(constant, "sup_H", 1.0);
    CHECK(c.envelope == doctest::Approx(10.0));
    CHECK_FALSE(c.tail_monotone);
    CHECK(*c.fitted_slope == doctest::Approx(0.0));

    const DiagnosticSeries zeros = make_series(times, [](DiagnosticRow&) {});
    const DecayReport z = decay_envelope(zeros, "sup_gradR2", 3.0);
    CHECK(z.envelope == 0.0);
    CHECK(z.tail_monotone);
    CHECK_FALSE(z.fitted_slope.has_value());

    CHECK_THROWS_AS(decay_envelope(decaying, "sup_nope", 1.0), InvalidArgument);
    CHECK_THROWS_AS(decay_envelope(make_series({0.0}, [](DiagnosticRow&) {}), "sup_H", 1.0), InvalidArgument);
    CHECK_THROWS_AS(decay_envelope(decaying, "sup_H", 1.0, 0.0), InvalidArgument);
}

TEST_CASE("envelopes dominate every weighted sample") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double p = 1.0 + trial % 4;
        const DiagnosticSeries s = make_series(linspace(0.0, 4.0, 25), [&](DiagnosticRow& r) { r.sup_gradR2 = dist(rng); });
        const DecayReport rep = decay_envelope(s, "sup_gradR2", p);
        for (const DiagnosticRow& r : s.rows()) CHECK(rep.envelope >= r.sup_gradR2 * std::pow(1.0 + r.t, p));
    }
}

TEST_CASE("heat companion verdict") {
    const DiagnosticSeries constant = make_series(linspace(0.0, 1.0, 5), [](DiagnosticRow& r) { r.sup_w = 0.8; });
    const Verdict ok = mp1_verify(constant, 1e-10);
    CHECK(ok.passed);
    CHECK(ok.value == 1.0);

    const DiagnosticSeries decreasing = make_series(linspace(0.0, 1.0, 5), [](DiagnosticRow& r) { r.sup_w = 1.0 - 0.1 * r.t; });
    CHECK(mp1_verify(decreasing, 0.0).passed);

    // rows sit 10 steps apart, so 1e-4 per step allows 1e-3 growth per row
    const DiagnosticSeries growing =
        make_series(linspace(0.0, 1.0, 5), [](DiagnosticRow& r) { r.sup_w = 1.0 + 5e-4 * r.t; });
    CHECK(mp1_verify(growing, 1e-4).passed);
    CHECK_FALSE(mp1_verify(growing, 1e-6).passed);
}

TEST_CASE("barrier function") {
    const GridSpec s = square(128, 4.0);
    const ConformalMetric flat(ScalarField(s, 0.0));
    const ScalarField eta = barrier_eta(0.25, s);
    const auto origin = s.node_at(0, 0);
    CHECK(eta(origin->first, origin->second) == 0.0);
    CHECK(inf_value(eta, 0) == 0.0);

    const Verdict pass = barrier_check(eta, flat, 1e-2);
    CHECK(pass.passed);
    CHECK(pass.value == doctest::Approx(1.0).epsilon(1e-2));
    CHECK_FALSE(barrier_check(barrier_eta(1.0, s), flat, 1e-2).passed);

    const GridSpec offset{32, 32, 0.25, -3.9, -3.9};
    CHECK_THROWS_AS(barrier_eta(0.25, offset), InvalidArgument);
    CHECK_THROWS_AS(barrier_eta(0.0, s), InvalidArgument);
}

TEST_CASE("barrier controls on bounded presets") {
    const GridSpec s = square(128, 6.0);
    for (const char* preset : {"flat", "flat:0.4", "bump:0.5:1", "bump:-0.5:1"}) {
        const ConformalMetric m(sample_to_grid(ExactSolution::parse(preset), s, 0.0));
        const double M = sup_abs(m.u(), 0);
        CAPTURE(preset);
        CHECK(barrier_check(barrier_eta(std::exp(-2 * M) / 4 * 0.999, s), m, 1e-2).passed);
        CHECK_FALSE(barrier_check(barrier_eta(2 * std::exp(-2 * M), s), m, 1e-2).passed);
    }
}

TEST_CASE("time derivative of the density against v/t") {
    const GridSpec s = square(32, 4.0);
    auto snapshots = [&](const ExactSolution& sol) {
        std::vector<DensitySnapshot> out;
        for (double t : {0.5, 0.6, 0.7, 0.8}) out.push_back(DensitySnapshot{t, ConformalMetric(sample_to_grid(sol, s, t)).density()});
        return out;
    };
    CHECK(aronson_benilan_check(snapshots(ExactSolution(Cigar{})), 1e-6).passed);
    CHECK(aronson_benilan_check(snapshots(ExactSolution(Flat{0.3})), 1e-6).passed);

    std::vector<DensitySnapshot> quadratic;
    for (double t : {1.0, 1.1, 1.2}) quadratic.push_back(DensitySnapshot{t, ScalarField(s, t * t)});
    CHECK_FALSE(aronson_benilan_check(quadratic, 1e-6).passed);

    quadratic.pop_back();
    CHECK_THROWS_AS(aronson_benilan_check(quadratic, 1e-6), InvalidArgument);
}

TEST_CASE("early derivative window") {
    const DiagnosticSeries flat = make_series(linspace(0.0, 1.0, 11), [](DiagnosticRow&) {});
    CHECK(shi_window_check(flat, 1, 2.0) == 0.0);
    for (int m : {1, 2}) {
        const DiagnosticSeries synthetic = make_series(linspace(0.0, 1.0, 11), [&](DiagnosticRow& r) {
            if (r.t > 0) {
                r.sup_gradR2 = 1.0 / std::pow(r.t, 1);
                r.sup_hess2R = 1.0 / std::pow(r.t, 2);
            }
        });
        CHECK(shi_window_check(synthetic, m, 2.0) == doctest::Approx(1.0));
    }
    // rows beyond t = 1/k0 are ignored
    const DiagnosticSeries late = make_series(linspace(0.0, 1.0, 11), [](DiagnosticRow& r) {
        r.sup_gradR2 = r.t > 0.5 ? 100.0 : 0.0;
    });
    CHECK(shi_window_check(late, 1, 2.0) == 0.0);
    CHECK_THROWS_AS(shi_window_check(flat, 3, 1.0), InvalidArgument);
}

TEST_CASE("profile fit recovers exact profiles") {
    const GridSpec s = square(64, 4.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> log_range(std::log(0.1), std::log(10.0));
    for (int trial = 0; trial < 25; ++trial) {
        const double beta = std::exp(log_range(rng));
        const double k = std::exp(log_range(rng));
        const HsuFit fit = hsu_fit(hsu_metric(beta, k, s), beta, 2);
        CAPTURE(beta);
        CAPTURE(k);
        CHECK(fit.k == doctest::Approx(k).epsilon(1e-9));
        CHECK(fit.residual < 1e-9);
        CHECK_FALSE(fit.mismatch);
    }
}

TEST_CASE("profile fit under noise and mismatch") {
    const GridSpec s = square(64, 4.0);
    const ConformalMetric exact = hsu_metric(2.0, 3.0, s);
    CHECK(hsu_fit(exact, 2.0, 0).k == doctest::Approx(3.0).epsilon(1e-6));

    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 0.01);
    ScalarField u = exact.u();
    for (double& value : u.data()) value += 0.5 * std::log1p(noise(rng));  // 1% multiplicative noise on v
    const HsuFit noisy = hsu_fit(ConformalMetric(u), 2.0, 0);
    CHECK(noisy.k == doctest::Approx(3.0).epsilon(0.05));

    const HsuFit flat = hsu_fit(ConformalMetric(ScalarField(s, 0.0)), 2.0, 0);
    CHECK(flat.mismatch);
    CHECK_THROWS_AS(hsu_fit(exact, 0.0, 0), InvalidArgument);
    CHECK_THROWS_AS(hsu_fit(exact, 2.0, 40), InvalidArgument);
}

TEST_CASE("flatness certificate") {
    const GridSpec s = square(64, 4.0);
    const ScalarField zero(s, 0.0);
    const FlowState flat(ConformalMetric(zero, 3.0), BoundaryCondition::frozen(zero));
    const FlatnessCertificate c = flatness_certificate(flat, *s.node_at(0, 0), 2);
    CHECK(c.max_violation == 0.0);
    CHECK(c.sup_abs_R == 0.0);
    CHECK(c.oscillation_f == 0.0);

    const ScalarField ramp = ScalarField::from_function(s, [](double x, double) { return 0.05 * x; });
    const FlowState sloped(ConformalMetric(ramp), BoundaryCondition::frozen(ramp));
    const FlatnessCertificate r = flatness_certificate(sloped, *s.node_at(0, 0), 2);
    CHECK(r.max_violation <= 1e-2);
    CHECK(r.oscillation_f == doctest::Approx(2 * 0.05 * 2 * (4.0 - 2 * s.h)));
    CHECK(r.f_at_source == 0.0);
}

TEST_CASE("diagnostic rows") {
    const GridSpec s = square(64, 4.0);
    const ScalarField zero(s, 0.0);
    const DiagnosticRow flat = record(FlowState(ConformalMetric(zero, 1.0), BoundaryCondition::frozen(zero)), 4);
    CHECK(flat.sup_R == 0.0);
    CHECK(flat.inf_R == 0.0);
    CHECK(flat.sup_J == 0.0);
    CHECK(flat.area == doctest::Approx(64.0));
    CHECK(flat.sup_w == 0.0);

    const ScalarField u = sample_to_grid(ExactSolution(Cigar{}), square(256, 8.0), 0.0);
    const ScalarField w(u.spec(), -0.5);
    const DiagnosticRow cigar = record(FlowState(ConformalMetric(u), BoundaryCondition::frozen(u)), 4, 4.0, &w);
    CHECK(cigar.sup_R == doctest::Approx(4.0).epsilon(1e-2));
    const double lowest_u = inf_value(u, 4);
    CHECK(cigar.sup_F == doctest::Approx(4.0 * lowest_u * lowest_u));
    CHECK(cigar.sup_G == 0.0);
    CHECK(cigar.sup_w == 0.5);
}
