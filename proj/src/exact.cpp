#include "ricci/exact.hpp"

#include "ricci/error.hpp"
#include "number_text.hpp"

#include <fmt/format.h>

#include <cmath>
#include <sstream>
#include <vector>

namespace ricci {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

double parse_number(const std::string& preset, const std::string& text) {
    const auto value = detail::parse_double(text);
    if (!value) throw ConfigError(fmt::format("preset '{}': '{}' is not a number", preset, text));
    return *value;
}

void require_initial_time(const ExactSolution& sol, double t) {
    if (t != 0.0 && !sol.time_parametrized()) {
        throw InvalidArgument(fmt::format("{} defines initial data only; t = {} requested", sol.name(), t));
    }
    if (t < 0.0) {
        throw InvalidArgument("exact solutions are defined for t >= 0 only");
    }
}

double sandwich_k(const HsuSandwich& s, double r2) {
    return s.k_far + (s.k_center - s.k_far) / (1.0 + r2);
}

}  // namespace

ExactSolution::ExactSolution(Kind kind) : kind_(std::move(kind)) {
    std::visit(overloaded{
                   [](const Flat&) {},
                   [](const Cigar&) {},
                   [](const HsuProfile& p) {
                       if (!(p.beta > 0.0) || !(p.k > 0.0)) throw InvalidArgument("hsu profile needs beta, k > 0");
                   },
                   [](const GaussianBump& b) {
                       if (!(b.sigma > 0.0)) throw InvalidArgument("bump needs sigma > 0");
                   },
                   [](const HsuSandwich& s) {
                       if (!(s.beta > 0.0) || !(s.k_center > 0.0) || !(s.k_far > 0.0)) {
                           throw InvalidArgument("hsu sandwich needs beta, k_center, k_far > 0");
                       }
                   },
               },
               kind_);
}

ExactSolution ExactSolution::parse(const std::string& preset) {
    const std::vector<std::string> parts = split(preset, ':');
    if (parts.empty()) throw ConfigError("empty preset string");
    const std::string& head = parts[0];
    auto arg = [&](std::size_t i) { return parse_number(preset, parts[i]); };
    auto expect = [&](std::size_t n) {
        if (parts.size() != n) {
            throw ConfigError(fmt::format("preset '{}' expects {} parameter(s)", preset, n - 1));
        }
    };
    try {
        if (head == "flat") {
            if (parts.size() == 1) return ExactSolution(Flat{});
            expect(2);
            return ExactSolution(Flat{arg(1)});
        }
        if (head == "cigar") {
            if (parts.size() == 1) return ExactSolution(Cigar{});
            expect(2);
            return ExactSolution(Cigar{arg(1)});
        }
        if (head == "hsu") {
            expect(3);
            return ExactSolution(HsuProfile{arg(1), arg(2)});
        }
        if (head == "bump") {
            expect(3);
            return ExactSolution(GaussianBump{arg(1), arg(2)});
        }
        if (head == "hsu-sandwich") {
            expect(4);
            return ExactSolution(HsuSandwich{arg(1), arg(2), arg(3)});
        }
    } catch (const InvalidArgument& e) {
        throw ConfigError(fmt::format("preset '{}': {}", preset, e.what()));
    }
    throw ConfigError(fmt::format("unknown preset '{}'", preset));
}

std::string ExactSolution::name() const {
    return std::visit(overloaded{
                          [](const Flat& f) { return f.c == 0.0 ? std::string("flat") : fmt::format("flat:{}", f.c); },
                          [](const Cigar& c) {
                              return c.rate == 4.0 ? std::string("cigar") : fmt::format("cigar:{}", c.rate);
                          },
                          [](const HsuProfile& p) { return fmt::format("hsu:{}:{}", p.beta, p.k); },
                          [](const GaussianBump& b) { return fmt::format("bump:{}:{}", b.amplitude, b.sigma); },
                          [](const HsuSandwich& s) {
                              return fmt::format("hsu-sandwich:{}:{}:{}", s.beta, s.k_center, s.k_far);
                          },
                      },
                      kind_);
}

bool ExactSolution::time_parametrized() const {
    return std::holds_alternative<Flat>(kind_) || std::holds_alternative<Cigar>(kind_);
}

double eval_u(const ExactSolution& sol, double x, double y, double t) {
    require_initial_time(sol, t);
    const double r2 = x * x + y * y;
    return std::visit(overloaded{
                          [](const Flat& f) { return f.c; },
                          [&](const Cigar& c) { return -0.5 * std::log(r2 + std::exp(c.rate * t)); },
                          [&](const HsuProfile& p) {
                              return 0.5 * (std::log(2.0) - std::log(p.beta) - std::log(r2 + p.k));
                          },
                          [&](const GaussianBump& b) { return b.amplitude * std::exp(-r2 / (b.sigma * b.sigma)); },
                          [&](const HsuSandwich& s) {
                              return 0.5 * (std::log(2.0) - std::log(s.beta) - std::log(r2 + sandwich_k(s, r2)));
                          },
                      },
                      sol.kind());
}

double eval_R(const ExactSolution& sol, double x, double y, double t) {
    require_initial_time(sol, t);
    const double r2 = x * x + y * y;
    return std::visit(
        overloaded{
            [](const Flat&) { return 0.0; },
            [&](const Cigar& c) {
                // For u = -½ ln(r² + a): Δu = -2a/(r² + a)², e^{-2u} = r² + a.
                const double a = std::exp(c.rate * t);
                return 4.0 * a / (r2 + a);
            },
            [&](const HsuProfile& p) { return 2.0 * p.beta * p.k / (r2 + p.k); },
            [&](const GaussianBump& b) {
                const double s2 = b.sigma * b.sigma;
                const double u = b.amplitude * std::exp(-r2 / s2);
                const double lap = u * (4.0 * r2 / (s2 * s2) - 4.0 / s2);
                return -2.0 * std::exp(-2.0 * u) * lap;
            },
            [&](const HsuSandwich& s) {
                // q(r) = r² + k(r); R = (β q / 2) Δ ln q with Δ ln q = q''/q - (q'/q)² + (q'/r)/q.
                const double c = s.k_center - s.k_far;
                const double w = 1.0 + r2;
                const double q = r2 + sandwich_k(s, r2);
                const double dq_over_r = 2.0 - 2.0 * c / (w * w);
                const double d2q = 2.0 - 2.0 * c / (w * w) + 8.0 * c * r2 / (w * w * w);
                const double dq2 = dq_over_r * dq_over_r * r2;
                const double lap_log_q = d2q / q - dq2 / (q * q) + dq_over_r / q;
                return 0.5 * s.beta * q * lap_log_q;
            },
        },
        sol.kind());
}

ScalarField sample_to_grid(const ExactSolution& sol, const GridSpec& spec, double t) {
    spec.validate();
    require_initial_time(sol, t);
    const double u_floor = 0.5 * std::log(kDensityFloor);
    std::vector<double> data(spec.size());
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            const double u = eval_u(sol, spec.x(i), spec.y(j), t);
            if (!(u > u_floor)) {
                throw NumericalError(fmt::format("{}: density e^(2u) underflows at node ({}, {})", sol.name(), i, j));
            }
            data[spec.index(i, j)] = u;
        }
    }
    return ScalarField(spec, std::move(data));
}

double pde_residual(const ExactSolution& sol, const GridSpec& spec, double t, double dt, int margin) {
    if (!sol.time_parametrized()) {
        throw InvalidArgument(fmt::format("{} is not time-parametrized", sol.name()));
    }
    if (!(dt > 0.0)) throw InvalidArgument("residual time step must be positive");
    if (t - dt < 0.0) throw InvalidArgument("residual needs t - dt >= 0");
    if (margin < 1) throw InvalidArgument("residual window needs margin >= 1");

    auto density = [&](double time) {
        ScalarField v = sample_to_grid(sol, spec, time);
        for (double& value : v.data()) value = std::exp(2.0 * value);
        return v;
    };
    const ScalarField v_next = density(t + dt);
    const ScalarField v_prev = density(t - dt);
    ScalarField log_v = density(t);
    for (double& value : log_v.data()) value = std::log(value);

    const ScalarField lap = laplacian(log_v, BoundaryCondition::extrapolate());
    std::vector<double> r(spec.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        r[k] = (v_next.data()[k] - v_prev.data()[k]) / (2.0 * dt) - lap.data()[k];
    }
    return sup_abs(ScalarField(spec, std::move(r)), margin);
}

HypothesesReport bounded_hypotheses_report(const ExactSolution& sol) {
    return std::visit(
        overloaded{
            [](const Flat&) { return HypothesesReport{true, true, true, "constant conformal factor"}; },
            [](const Cigar&) {
                return HypothesesReport{false, true, true,
                                        "u0 = -1/2 ln(1+|x|^2) has no lower bound; 0 < R <= 4; area diverges "
                                        "logarithmically"};
            },
            [](const HsuProfile&) {
                return HypothesesReport{false, true, true,
                                        "u0 decays like -ln|x|; R = 2 beta k/(|x|^2+k) is bounded; area diverges "
                                        "logarithmically"};
            },
            [](const GaussianBump&) {
                return HypothesesReport{true, true, true,
                                        "bounded smooth u0 with bounded curvature; e^(2u0) -> 1 so area diverges"};
            },
            [](const HsuSandwich&) {
                return HypothesesReport{false, true, true,
                                        "sandwiched between two hsu profiles: u0 unbounded below, bounded R, "
                                        "area diverges logarithmically"};
            },
        },
        sol.kind());
}

}  // namespace ricci
