#pragma once

#include "ricci/grid.hpp"

namespace ricci {

/**
 * Conformal metric g = e^{2u} g_E at time t.
 *
 * Only u is stored. The density v = e^{2u} and the potential f = -2u are
 * derived on demand.
 */
class ConformalMetric {
public:
    explicit ConformalMetric(ScalarField u, double t = 0.0);

    const ScalarField& u() const { return u_; }
    double t() const { return t_; }
    const GridSpec& spec() const { return u_.spec(); }

    /// v = e^{2u}.
    ScalarField density() const;

private:
    ScalarField u_;
    double t_;
};

/// R = -2 e^{-2u} Δu.
ScalarField scalar_curvature(const ConformalMetric& m, const BoundaryCondition& bc);

/// f = -2u.
ScalarField potential_f(const ConformalMetric& m);

/// Δ_g w = e^{-2u} Δw.
ScalarField metric_laplacian(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc);

/// |∇w|²_g = e^{-2u} |∇w|²_E.
ScalarField metric_grad_norm_sq(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc);

/// Levi-Civita symbols of e^{2u} g_E, named gamma<upper>_<lower lower>.
struct Christoffels {
    ScalarField gamma1_11;  // u_x
    ScalarField gamma1_12;  // u_y
    ScalarField gamma1_22;  // -u_x
    ScalarField gamma2_11;  // -u_y
    ScalarField gamma2_12;  // u_x
    ScalarField gamma2_22;  // u_y
};

Christoffels christoffels(const ConformalMetric& m, const BoundaryCondition& bc);

/// D²w_ij = ∂_i∂_j w - Γ^k_ij ∂_k w.
SymTensorField covariant_hessian(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc);

/// |D²w - ½ (Δ_g w) g|²_g, summed over all four index pairs.
ScalarField traceless_hessian_norm_sq(const ScalarField& w, const ConformalMetric& m, const BoundaryCondition& bc);

/// |∇R|²_g.
ScalarField cov_grad_R_norm_sq(const ConformalMetric& m, const BoundaryCondition& bc);
/// |∇²R|²_g = e^{-4u} Σ_ij (D²R_ij)².
ScalarField cov_hessian_R_norm_sq(const ConformalMetric& m, const BoundaryCondition& bc);

/**
 * Every curvature field the decay diagnostics need, evaluated once.
 * `harnack` is R + |∇f|²_g, assembled from the two stored fields.
 */
struct CurvatureReport {
    ScalarField curvature;
    ScalarField grad_f_sq;
    ScalarField harnack;
    ScalarField grad_R_sq;
    ScalarField hess_R_sq;
    ScalarField traceless_hess_f_sq;
};

CurvatureReport curvature_report(const ConformalMetric& m, const BoundaryCondition& bc);

// Time-weighted quantities built on f = -2u. All norms are taken in g.

/// t |∇f|² + f².
ScalarField potential_energy(const ConformalMetric& m, const BoundaryCondition& bc);
ScalarField potential_energy(const ConformalMetric& m, const CurvatureReport& report);

/// R + |∇f|².
ScalarField harnack_quantity(const ConformalMetric& m, const BoundaryCondition& bc);

/// t (H + |∇f|²).
ScalarField weighted_harnack(const ConformalMetric& m, const BoundaryCondition& bc);
ScalarField weighted_harnack(const ConformalMetric& m, const CurvatureReport& report);

/// t⁴ |∇R|² + λ t³ R². Requires λ > 0.
ScalarField curvature_gradient_energy(const ConformalMetric& m, const BoundaryCondition& bc, double lambda);
ScalarField curvature_gradient_energy(const ConformalMetric& m, const CurvatureReport& report, double lambda);

}  // namespace ricci
