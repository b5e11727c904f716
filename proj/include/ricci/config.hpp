#pragma once

#include "ricci/flow.hpp"
#include "ricci/grid.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ricci {

/**
 * Everything a run needs, read from an INI-style file with [grid], [initial],
 * [flow], [analysis] and [output] sections. Every key has a default; see
 * `config_reference()` for the list.
 */
struct RunConfig {
    // [grid]
    int nx = 257;
    int ny = 257;
    double h = 0.078125;
    double center_x = 0.0;
    double center_y = 0.0;

    // [initial]
    std::string preset = "bump:0.5:1";

    // [flow]
    BoundaryKind bc = BoundaryKind::DirichletFrozen;
    Scheme scheme = Scheme::Heun;
    double cfl_safety = 0.9;
    double t_end = 20.0;
    std::vector<double> snapshot_times;
    double diagnostic_interval = 0.1;
    std::optional<double> dt_override;
    std::size_t max_steps = 50'000'000;
    double max_wall_seconds = 0.0;
    bool heat_companion = false;
    std::uint64_t heat_seed = 20090415;

    // [analysis]
    int margin = 8;
    double lambda = 4.0;
    double tail_fraction = 0.5;
    /// "auto" or a comma list of check names.
    std::vector<std::string> checks = {"auto"};
    std::vector<std::pair<std::string, double>> decay_exponents = {
        {"sup_gradf2", 1.0}, {"sup_H", 1.0}, {"sup_gradR2", 3.0}, {"sup_hess2R", 4.0}};
    double tol_lower_bound = 1e-3;
    double tol_mp1_per_step = 1e-10;
    double tol_barrier = 1e-2;
    double tol_flatness = 1e-2;
    double tol_aronson_benilan = 1e-6;
    double max_harnack_slope = -0.8;
    double curvature_decay_ratio = 0.05;
    double hsu_beta = 2.0;
    std::vector<double> radii;

    // [output]
    std::string output_dir = "run";

    /// Text the configuration was parsed from, kept for the manifest.
    std::string source_text;

    GridSpec grid() const;
    StepperConfig stepper() const;
    void validate() const;
};

/// Names accepted in `analysis.checks` besides "auto".
const std::vector<std::string>& known_checks();

/// Parses INI text; unknown sections or keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Applies one `section.key=value` override.
void apply_override(RunConfig& config, const std::string& assignment);

/// Effective values as ordered `section.key -> value` pairs.
std::map<std::string, std::string> effective_values(const RunConfig& config);

/// Human-readable list of every key with its default.
std::string config_reference();

/// Environment variable naming the root that relative output directories resolve against.
inline constexpr const char* kOutputRootEnv = "RICCI_LAB_OUT";

/// `dir` if absolute, else $RICCI_LAB_OUT/dir when that is set, else dir.
std::string resolve_output_dir(const std::string& dir);

}  // namespace ricci
