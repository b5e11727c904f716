#include "ricci/analysis.hpp"

#include "ricci/error.hpp"
#include "ricci/geometry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ricci {

DiagnosticRow record(const FlowState& state, int margin, double lambda, const ScalarField* companion) {
    const ConformalMetric& m = state.metric;
    const BoundaryCondition bc = BoundaryCondition::stencil(state.bc.kind());
    const CurvatureReport report = curvature_report(m, bc);

    DiagnosticRow row;
    row.t = m.t();
    row.step = state.step_count;
    row.sup_R = sup_value(report.curvature, margin);
    row.inf_R = inf_value(report.curvature, margin);
    row.sup_gradf2 = sup_value(report.grad_f_sq, margin);
    row.sup_H = sup_value(report.harnack, margin);
    row.sup_gradR2 = sup_value(report.grad_R_sq, margin);
    row.sup_hess2R = sup_value(report.hess_R_sq, margin);
    row.sup_F = sup_value(potential_energy(m, report), margin);
    row.sup_G = sup_value(weighted_harnack(m, report), margin);
    row.sup_J = sup_value(curvature_gradient_energy(m, report, lambda), margin);
    row.area = total_area(m.u(), state.bc.kind());
    if (companion != nullptr) {
        require_same_spec(*companion, m.u());
        row.sup_w = sup_abs(*companion, 0);
    }
    return row;
}

double comparison_barrier(double k0, double t) {
    return -k0 / (1.0 + k0 * t);
}

namespace {

void require_k0(const DiagnosticSeries& series, double k0) {
    if (series.empty()) throw InvalidArgument("lower-bound check needs a non-empty series");
    const DiagnosticRow& first = series.front();
    const double sup_abs_R0 = std::max(std::abs(first.sup_R), std::abs(first.inf_R));
    if (!(k0 >= sup_abs_R0 * (1.0 - 1e-12))) {
        throw InvalidArgument(fmt::format("k0 = {} is below sup|R(.,0)| = {}", k0, sup_abs_R0));
    }
}

}  // namespace

double lower_bound_margin(const DiagnosticSeries& series, double k0) {
    require_k0(series, k0);
    double margin = std::numeric_limits<double>::infinity();
    for (const DiagnosticRow& row : series.rows()) {
        margin = std::min(margin, row.inf_R + k0 / (1.0 + k0 * row.t));
    }
    return margin;
}

Verdict comparison_verify(const DiagnosticSeries& series, double k0, double tol) {
    require_k0(series, k0);
    double min_s = std::numeric_limits<double>::infinity();
    double at_t = 0.0;
    for (const DiagnosticRow& row : series.rows()) {
        const double s = row.inf_R - comparison_barrier(k0, row.t);
        if (s < min_s) {
            min_s = s;
            at_t = row.t;
        }
    }
    return Verdict{"comparison", min_s >= -tol, min_s, tol,
                   fmt::format("min of R - theta over the run is {:.6g} at t = {:.6g} (k0 = {:.6g})", min_s, at_t, k0)};
}

DecayReport decay_envelope(const DiagnosticSeries& series, const std::string& quantity, double exponent,
                           double tail_fraction) {
    const std::vector<double> q = series.column(quantity);
    const std::vector<double> t = series.column("t");
    const std::size_t n = q.size();
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw InvalidArgument("tail fraction must lie in (0, 1]");
    }
    const std::size_t tail =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
    if (n < tail || n < 2) {
        throw InvalidArgument(fmt::format("series of {} rows is shorter than the fit window of {}", n, tail));
    }

    DecayReport report;
    report.quantity = quantity;
    report.exponent = exponent;
    std::vector<double> weighted(n);
    for (std::size_t k = 0; k < n; ++k) {
        weighted[k] = q[k] * std::pow(1.0 + t[k], exponent);
        report.envelope = k == 0 ? weighted[k] : std::max(report.envelope, weighted[k]);
    }

    const std::size_t first = n - tail;
    report.tail_monotone = true;
    for (std::size_t k = first + 1; k < n; ++k) {
        const double slack = 1e-9 * std::max(std::abs(weighted[k - 1]), std::numeric_limits<double>::min());
        if (weighted[k] > weighted[k - 1] + slack) {
            report.tail_monotone = false;
            break;
        }
    }

    bool positive = true;
    for (std::size_t k = first; k < n; ++k) positive = positive && q[k] > 0.0;
    if (positive) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t k = first; k < n; ++k) {
            const double x = std::log1p(t[k]);
            const double y = std::log(q[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double m = static_cast<double>(tail);
        const double denom = m * sxx - sx * sx;
        if (denom > 0.0) report.fitted_slope = (m * sxy - sx * sy) / denom;
    }
    return report;
}

Verdict mp1_verify(const DiagnosticSeries& series, double tol_per_step) {
    if (series.empty()) throw InvalidArgument("MP1 check needs a non-empty series");
    const double w0 = series.front().sup_w;
    bool passed = true;
    double worst_ratio = w0 > 0.0 ? 0.0 : 1.0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (const DiagnosticRow& row : series.rows()) {
        const double allowed = w0 * (1.0 + tol_per_step * static_cast<double>(row.step));
        if (row.sup_w > allowed) passed = false;
        worst_excess = std::max(worst_excess, row.sup_w - allowed);
        if (w0 > 0.0) worst_ratio = std::max(worst_ratio, row.sup_w / w0);
    }
    return Verdict{"mp1", passed, worst_ratio, tol_per_step,
                   fmt::format("max sup|w(t)|/sup|w(0)| = {:.17g}, worst excess over allowance {:.3g}", worst_ratio,
                               worst_excess)};
}

ScalarField barrier_eta(double eps, const GridSpec& spec) {
    if (!(eps > 0.0)) throw InvalidArgument("barrier needs eps > 0");
    if (!spec.node_at(0.0, 0.0)) throw InvalidArgument("barrier needs the origin to be a grid node");
    return ScalarField::from_function(spec, [eps](double x, double y) { return eps * std::log1p(x * x + y * y); });
}

Verdict barrier_check(const ScalarField& eta, const ConformalMetric& m, double tol) {
    require_same_spec(eta, m.u());
    const auto origin = eta.spec().node_at(0.0, 0.0);
    if (!origin) throw InvalidArgument("barrier needs the origin to be a grid node");
    const double min_eta = inf_value(eta, 0);
    const double at_origin = eta(origin->first, origin->second);
    const ScalarField lap = metric_laplacian(eta, m, BoundaryCondition::stencil(BoundaryKind::DirichletFrozen));
    const double max_lap = sup_value(lap, 1);
    const bool passed = min_eta >= 0.0 && at_origin == 0.0 && max_lap <= 1.0 + tol;
    return Verdict{"barrier", passed, max_lap, tol,
                   fmt::format("min eta = {:.3g}, eta(origin) = {:.3g}, max Laplacian_g eta = {:.6g}", min_eta,
                               at_origin, max_lap)};
}

Verdict aronson_benilan_check(const std::vector<DensitySnapshot>& snapshots, double tol, int margin) {
    if (snapshots.size() < 3) throw InvalidArgument("time-derivative check needs at least three snapshots");
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        require_same_spec(snapshots[k].v, snapshots[0].v);
        if (!(snapshots[k].t > snapshots[k - 1].t)) throw InvalidArgument("snapshot times must increase");
    }
    double worst = -std::numeric_limits<double>::infinity();
    double at_t = 0.0;
    for (std::size_t k = 1; k + 1 < snapshots.size(); ++k) {
        const DensitySnapshot& prev = snapshots[k - 1];
        const DensitySnapshot& mid = snapshots[k];
        const DensitySnapshot& next = snapshots[k + 1];
        if (!(mid.t > 0.0)) continue;
        const double span = next.t - prev.t;
        std::vector<double> excess(mid.v.spec().size());
        for (std::size_t n = 0; n < excess.size(); ++n) {
            excess[n] = (next.v.data()[n] - prev.v.data()[n]) / span - mid.v.data()[n] / mid.t;
        }
        const double value = sup_value(ScalarField(mid.v.spec(), std::move(excess)), margin);
        if (value > worst) {
            worst = value;
            at_t = mid.t;
        }
    }
    if (!std::isfinite(worst)) throw InvalidArgument("time-derivative check needs snapshots with t > 0");
    return Verdict{"dt_v_le_v_over_t", worst <= tol, worst, tol,
                   fmt::format("max of dv/dt - v/t is {:.6g} at t = {:.6g}", worst, at_t)};
}

double shi_window_check(const DiagnosticSeries& series, int order, double k0) {
    if (order != 1 && order != 2) throw InvalidArgument("derivative window check supports orders 1 and 2");
    const double window = k0 > 0.0 ? 1.0 / k0 : std::numeric_limits<double>::infinity();
    double k = 0.0;
    for (const DiagnosticRow& row : series.rows()) {
        if (!(row.t > 0.0) || row.t > window) continue;
        const double q = order == 1 ? row.sup_gradR2 : row.sup_hess2R;
        k = std::max(k, std::sqrt(std::max(q, 0.0)) * std::pow(row.t, 0.5 * order));
    }
    return k;
}

HsuFit hsu_fit(const ConformalMetric& m, double beta, int margin) {
    if (!(beta > 0.0)) throw InvalidArgument("profile fit needs beta > 0");
    const GridSpec& s = m.spec();
    if (margin < 0 || 2 * margin >= s.nx || 2 * margin >= s.ny) {
        throw InvalidArgument("profile fit window is empty");
    }
    double sum = 0.0;
    double sup_v = 0.0;
    std::size_t count = 0;
    for (int j = margin; j < s.ny - margin; ++j) {
        for (int i = margin; i < s.nx - margin; ++i) {
            const double v = std::exp(2.0 * m.u()(i, j));
            if (!(v > 0.0)) throw InvalidArgument("profile fit needs v > 0 on the window");
            const double r2 = s.x(i) * s.x(i) + s.y(j) * s.y(j);
            sum += 2.0 / (beta * v) - r2;
            sup_v = std::max(sup_v, v);
            ++count;
        }
    }
    HsuFit fit;
    fit.k = sum / static_cast<double>(count);
    for (int j = margin; j < s.ny - margin; ++j) {
        for (int i = margin; i < s.nx - margin; ++i) {
            const double r2 = s.x(i) * s.x(i) + s.y(j) * s.y(j);
            const double denom = r2 + fit.k;
            if (!(denom > 0.0)) {
                fit.residual = std::numeric_limits<double>::infinity();
                fit.mismatch = true;
                return fit;
            }
            const double v = std::exp(2.0 * m.u()(i, j));
            fit.residual = std::max(fit.residual, std::abs(v - 2.0 / (beta * denom)));
        }
    }
    fit.mismatch = fit.residual > kHsuMismatch * sup_v;
    return fit;
}

FlatnessCertificate flatness_certificate(const FlowState& state, std::pair<int, int> source, int margin) {
    const ConformalMetric& m = state.metric;
    const BoundaryCondition bc = BoundaryCondition::stencil(state.bc.kind());
    const ScalarField f = potential_f(m);
    const DistanceField dist = geodesic_distance(m, source);

    FlatnessCertificate cert;
    cert.sup_grad_f = std::sqrt(std::max(sup_value(metric_grad_norm_sq(f, m, bc), margin), 0.0));
    cert.sup_abs_R = sup_abs(scalar_curvature(m, bc), margin);
    cert.oscillation_f = sup_value(f, margin) - inf_value(f, margin);
    cert.f_at_source = f(source.first, source.second);

    const GridSpec& s = m.spec();
    for (int j = margin; j < s.ny - margin; ++j) {
        for (int i = margin; i < s.nx - margin; ++i) {
            const double lhs = std::abs(f(i, j) - cert.f_at_source);
            const double rhs = dist.distance(i, j) * cert.sup_grad_f;
            cert.max_violation = std::max(cert.max_violation, lhs - rhs);
        }
    }
    return cert;
}

}  // namespace ricci
