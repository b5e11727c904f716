#include "ricci/conformal.hpp"

#include "ricci/error.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>

namespace ricci {

namespace {

// Pointwise combination of same-grid fields. The result inherits the widest
// undefined ring of its inputs.
template <typename Fn, typename... Fields>
ScalarField pointwise(Fn fn, const ScalarField& first, const Fields&... rest) {
    (require_same_spec(first, rest), ...);
    const std::size_t n = first.spec().size();
    std::vector<double> out(n);
    const auto a = first.data();
    if constexpr (sizeof...(rest) == 0) {
        for (std::size_t k = 0; k < n; ++k) out[k] = fn(a[k]);
    } else {
        const std::array spans{rest.data()...};
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = [&]<std::size_t... I>(std::index_sequence<I...>) { return fn(a[k], spans[I][k]...); }(
                std::make_index_sequence<sizeof...(rest)>{});
        }
    }
    const int ring = std::max({first.undefined_ring(), rest.undefined_ring()...});
    return ScalarField(first.spec(), std::move(out), ring);
}

}  // namespace

ConformalMetric::ConformalMetric(ScalarField u, double t) : u_(std::move(u)), t_(t) {
    u_.require_finite("conformal factor");
    if (!(t_ >= 0.0) || !std::isfinite(t_)) {
        throw InvalidArgument("metric time must be finite and non-negative");
    }
}

ScalarField ConformalMetric::density() const {
    return pointwise([](double u) { return std::exp(2.0 * u); }, u_);
}

ScalarField scalar_curvature(const ConformalMetric& m, const BoundaryCondition& bc) {
    return pointwise([](double u, double lap) { return -2.0 * std::exp(-2.0 * u) * lap; }, m.u(),
                     laplacian(m.u(), bc));
}

ScalarField potential_f(const ConformalMetric& m) {
    return pointwise([](double u) { return -2.0 * u; }, m.u());
}

ScalarField metric_laplacian(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc) {
    require_same_spec(w, m.u());
    return pointwise([](double u, double lap) { return std::exp(-2.0 * u) * lap; }, m.u(), laplacian(w, bc));
}

ScalarField metric_grad_norm_sq(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc) {
    require_same_spec(w, m.u());
    const VectorField g = gradient(w, bc);
    return pointwise([](double u, double gx, double gy) { return std::exp(-2.0 * u) * (gx * gx + gy * gy); }, m.u(),
                     g.x, g.y);
}

Christoffels christoffels(const ConformalMetric& m, const BoundaryCondition& bc) {
    const VectorField du = gradient(m.u(), bc);
    const ScalarField neg_ux = -1.0 * du.x;
    const ScalarField neg_uy = -1.0 * du.y;
    return Christoffels{du.x, du.y, neg_ux, neg_uy, du.x, du.y};
}

SymTensorField covariant_hessian(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc) {
    require_same_spec(w, m.u());
    const SymTensorField d2 = hessian(w, bc);
    const VectorField dw = gradient(w, bc);
    const VectorField du = gradient(m.u(), bc);
    // Γ^1_11 = u_x, Γ^2_11 = -u_y; Γ^1_12 = u_y, Γ^2_12 = u_x; Γ^1_22 = -u_x, Γ^2_22 = u_y.
    return SymTensorField{
        pointwise([](double wxx, double wx, double wy, double ux, double uy) { return wxx - (ux * wx - uy * wy); },
                  d2.xx, dw.x, dw.y, du.x, du.y),
        pointwise([](double wxy, double wx, double wy, double ux, double uy) { return wxy - (uy * wx + ux * wy); },
                  d2.xy, dw.x, dw.y, du.x, du.y),
        pointwise([](double wyy, double wx, double wy, double ux, double uy) { return wyy - (-ux * wx + uy * wy); },
                  d2.yy, dw.x, dw.y, du.x, du.y),
    };
}

ScalarField traceless_hessian_norm_sq(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc) {
    const SymTensorField d2 = covariant_hessian(w, m, bc);
    // Half the Euclidean trace of D²w equals ½ (Δ_g w) e^{2u}.
    return pointwise(
        [](double u, double xx, double xy, double yy) {
            const double half_trace = 0.5 * (xx + yy);
            const double a = xx - half_trace;
            const double b = yy - half_trace;
            return std::exp(-4.0 * u) * (a * a + 2.0 * xy * xy + b * b);
        },
        m.u(), d2.xx, d2.xy, d2.yy);
}

namespace {

ScalarField hessian_norm_sq(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc) {
    const SymTensorField d2 = covariant_hessian(w, m, bc);
    return pointwise(
        [](double u, double xx, double xy, double yy) {
            return std::exp(-4.0 * u) * (xx * xx + 2.0 * xy * xy + yy * yy);
        },
        m.u(), d2.xx, d2.xy, d2.yy);
}

}  // namespace

ScalarField cov_grad_R_norm_sq(const ConformalMetric& m, const BoundaryCondition& bc) {
    return metric_grad_norm_sq(scalar_curvature(m, bc), m, bc);
}

ScalarField cov_hessian_R_norm_sq(const ConformalMetric& m, const BoundaryCondition& bc) {
    return hessian_norm_sq(scalar_curvature(m, bc), m, bc);
}

CurvatureReport curvature_report(const ConformalMetric& m, const BoundaryCondition& bc) {
    ScalarField curvature = scalar_curvature(m, bc);
    const ScalarField f = potential_f(m);
    ScalarField grad_f_sq = metric_grad_norm_sq(f, m, bc);
    ScalarField harnack = curvature + grad_f_sq;
    ScalarField grad_R_sq = metric_grad_norm_sq(curvature, m, bc);
    ScalarField hess_R_sq = hessian_norm_sq(curvature, m, bc);
    ScalarField traceless = traceless_hessian_norm_sq(f, m, bc);
    return CurvatureReport{std::move(curvature), std::move(grad_f_sq), std::move(harnack),
                           std::move(grad_R_sq), std::move(hess_R_sq), std::move(traceless)};
}

ScalarField potential_energy(const ConformalMetric& m, const CurvatureReport& report) {
    const double t = m.t();
    return pointwise([t](double u, double gf) { return t * gf + 4.0 * u * u; }, m.u(), report.grad_f_sq);
}

ScalarField potential_energy(const ConformalMetric& m, const BoundaryCondition& bc) {
    const double t = m.t();
    const ScalarField gf = metric_grad_norm_sq(potential_f(m), m, bc);
    return pointwise([t](double u, double g) { return t * g + 4.0 * u * u; }, m.u(), gf);
}

ScalarField harnack_quantity(const ConformalMetric& m, const BoundaryCondition& bc) {
    return scalar_curvature(m, bc) + metric_grad_norm_sq(potential_f(m), m, bc);
}

ScalarField weighted_harnack(const ConformalMetric& m, const CurvatureReport& report) {
    const double t = m.t();
    return pointwise([t](double hq, double gf) { return t * (hq + gf); }, report.harnack, report.grad_f_sq);
}

ScalarField weighted_harnack(const ConformalMetric& m, const BoundaryCondition& bc) {
    const double t = m.t();
    const ScalarField gf = metric_grad_norm_sq(potential_f(m), m, bc);
    const ScalarField hq = scalar_curvature(m, bc) + gf;
    return pointwise([t](double a, double b) { return t * (a + b); }, hq, gf);
}

ScalarField curvature_gradient_energy(const ConformalMetric& m, const CurvatureReport& report, double lambda) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument("curvature gradient energy needs lambda > 0");
    }
    const double t = m.t();
    const double t3 = t * t * t;
    const double t4 = t3 * t;
    return pointwise([=](double gr, double r) { return t4 * gr + lambda * t3 * r * r; }, report.grad_R_sq,
                     report.curvature);
}

ScalarField curvature_gradient_energy(const ConformalMetric& m, const BoundaryCondition& bc, double lambda) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument("curvature gradient energy needs lambda > 0");
    }
    const double t = m.t();
    const double t3 = t * t * t;
    const double t4 = t3 * t;
    const ScalarField r = scalar_curvature(m, bc);
    const ScalarField gr = metric_grad_norm_sq(r, m, bc);
    return pointwise([=](double g, double rr) { return t4 * g + lambda * t3 * rr * rr; }, gr, r);
}

}  // namespace ricci
