#pragma once

#include "ricci/conformal.hpp"
#include "ricci/flow.hpp"
#include "ricci/grid.hpp"
#include "ricci/series.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ricci {

/// Outcome of one check. The tolerance is always part of the verdict.
struct Verdict {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

/// Evaluates every tracked supremum of `state` on the window `margin` nodes in.
/// `companion` fills sup_w as the sup of |w| over the whole grid; otherwise sup_w is 0.
DiagnosticRow record(const FlowState& state, int margin, double lambda = 4.0,
                     const ScalarField* companion = nullptr);

/// min over rows of inf_R(t) + k0/(1 + k0 t). Requires k0 >= sup|R(·,0)|.
double lower_bound_margin(const DiagnosticSeries& series, double k0);

/// θ(t) = -k0/(1 + k0 t).
double comparison_barrier(double k0, double t);

struct DecayReport {
    std::string quantity;
    double exponent = 0.0;
    /// max_t Q(t)(1+t)^p.
    double envelope = 0.0;
    /// Q(t)(1+t)^p is non-increasing over the tail rows.
    bool tail_monotone = false;
    /// Least-squares slope of ln Q against ln(1+t) over the tail; empty when Q <= 0 there.
    std::optional<double> fitted_slope;
};

/// `tail_fraction` of the rows (at least two) form the tail used for monotonicity and the fit.
DecayReport decay_envelope(const DiagnosticSeries& series, const std::string& quantity, double exponent,
                           double tail_fraction = 0.5);

/// sup_w(t) <= sup_w(0) (1 + tol_per_step · steps(t)) for every row.
Verdict mp1_verify(const DiagnosticSeries& series, double tol_per_step);

/// min over rows of S = inf_R - θ(t); passes when >= -tol.
Verdict comparison_verify(const DiagnosticSeries& series, double k0, double tol);

/// η = ε ln(1 + |x|²). The grid must contain the origin as a node.
ScalarField barrier_eta(double eps, const GridSpec& spec);

/// Checks η >= 0, η(origin) = 0 and max Δ_g η <= 1 + tol over interior nodes.
Verdict barrier_check(const ScalarField& eta, const ConformalMetric& m, double tol);

/// A time-stamped density snapshot.
struct DensitySnapshot {
    double t = 0.0;
    ScalarField v;
};

/// max over interior snapshots and window nodes of ∂t v - v/t (centered in time); passes when <= tol.
Verdict aronson_benilan_check(const std::vector<DensitySnapshot>& snapshots, double tol, int margin = 0);

/// K = max over rows with 0 < t <= 1/k0 of sqrt(Q) t^{m/2}, Q = sup|∇R|² (m = 1) or sup|∇²R|² (m = 2).
double shi_window_check(const DiagnosticSeries& series, int order, double k0);

struct HsuFit {
    double k = 0.0;
    /// sup |v - φ_{β,k}| over the window.
    double residual = 0.0;
    /// residual / sup v exceeds `kHsuMismatch`.
    bool mismatch = false;
};

inline constexpr double kHsuMismatch = 0.05;

/// Least-squares k for 1/v = β(|x|² + k)/2 over the window `margin` nodes in.
HsuFit hsu_fit(const ConformalMetric& m, double beta, int margin);

struct FlatnessCertificate {
    /// max over window of |f(x) - f(x0)| - d_t(x, x0) sup|∇f|_g, clamped at 0.
    double max_violation = 0.0;
    double sup_abs_R = 0.0;
    double oscillation_f = 0.0;
    /// f(x0, t), the candidate limiting constant.
    double f_at_source = 0.0;
    double sup_grad_f = 0.0;
};

FlatnessCertificate flatness_certificate(const FlowState& state, std::pair<int, int> source, int margin);

}  // namespace ricci
