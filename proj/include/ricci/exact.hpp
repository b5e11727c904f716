#pragma once

#include "ricci/grid.hpp"

#include <string>
#include <variant>

namespace ricci {

/// Static metric with constant conformal factor u ≡ c.
struct Flat {
    double c = 0.0;
};

/// Cigar soliton u = -½ ln(|x|² + e^{rate·t}). The soliton has rate = 4;
/// other rates are not solutions and serve as negative controls.
struct Cigar {
    double rate = 4.0;
};

/// v = 2 / (β (|x|² + k)), initial data only.
struct HsuProfile {
    double beta = 1.0;
    double k = 1.0;
};

/// Gaussian bump u = A e^{-|x|²/σ²}, initial data only.
struct GaussianBump {
    double amplitude = 0.5;
    double sigma = 1.0;
};

/// v = 2 / (β (|x|² + k(|x|))) with k(r) = k_far + (k_center - k_far)/(1 + r²).
/// Sits between the profiles with k = k_center and k = k_far. Initial data only.
struct HsuSandwich {
    double beta = 2.0;
    double k_center = 2.0;
    double k_far = 4.0;
};

/**
 * Closed-form reference geometry.
 *
 * Preset strings: `flat`, `flat:<c>`, `cigar`, `cigar:<rate>`,
 * `hsu:<beta>:<k>`, `bump:<A>:<sigma>`, `hsu-sandwich:<beta>:<k_center>:<k_far>`.
 */
class ExactSolution {
public:
    using Kind = std::variant<Flat, Cigar, HsuProfile, GaussianBump, HsuSandwich>;

    explicit ExactSolution(Kind kind);
    static ExactSolution parse(const std::string& preset);

    const Kind& kind() const { return kind_; }
    std::string name() const;

    /// Cigar and Flat define u for all t >= 0; the others only at t = 0.
    bool time_parametrized() const;

private:
    Kind kind_;
};

double eval_u(const ExactSolution& sol, double x, double y, double t);
double eval_R(const ExactSolution& sol, double x, double y, double t);

/// Smallest density e^{2u} accepted when sampling.
inline constexpr double kDensityFloor = 1e-300;

/// u-form samples at every node. Throws if e^{2u} underflows anywhere.
ScalarField sample_to_grid(const ExactSolution& sol, const GridSpec& spec, double t);

/**
 * Sup-norm on the interior window of
 *   (v(t+dt) - v(t-dt)) / (2 dt) - Δ_h ln v(t),
 * i.e. the discrete residual of ∂t v = Δ ln v on exact data.
 */
double pde_residual(const ExactSolution& sol, const GridSpec& spec, double t, double dt, int margin = 4);

/// Analytic classification against the bounded-data hypotheses.
struct HypothesesReport {
    bool bounded_u0 = false;
    bool bounded_R0 = false;
    bool infinite_area = false;  // ∫ e^{2u0} dx dy = ∞
    std::string note;
};

HypothesesReport bounded_hypotheses_report(const ExactSolution& sol);

}  // namespace ricci
