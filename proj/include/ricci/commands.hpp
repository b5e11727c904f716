#pragma once

#include "ricci/analysis.hpp"
#include "ricci/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ricci {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalAbort = 3;

std::string version();

/// Checks `run` performs for this config; expands "auto" from the preset's hypotheses.
std::vector<std::string> resolve_checks(const RunConfig& config);

/// Evolves the configured preset, writes series.csv, snapshots and manifest.json
/// into the output directory and evaluates the enabled checks.
int cmd_run(const RunConfig& config, std::ostream& log);

struct VerifyExactOptions {
    std::string preset = "cigar";
    /// Cell counts per axis; each grid has cells + 1 nodes on [-extent, extent]².
    std::vector<int> cells = {128, 256};
    double extent = 8.0;
    double time = 1.0;
    double dt = 1e-4;
    int margin = 4;
    double ratio_low = 3.2;
    double ratio_high = 4.8;
    /// Residuals at or below this count as exact.
    double exact_floor = 1e-12;
    std::string output_dir = "verify";
};

int cmd_verify_exact(const VerifyExactOptions& options, std::ostream& log);

/// Evolves with the heat companion on and reports barrier, MP1 and comparison checks.
int cmd_mp_lab(const RunConfig& config, std::ostream& log);

struct ApertureOptions {
    /// Time of the exact slice; non-zero only for time-parametrized presets.
    double time = 0.0;
    /// Exit 1 when the slope falls outside this range.
    std::optional<std::pair<double, double>> expect;
};

int cmd_aperture(const RunConfig& config, const ApertureOptions& options, std::ostream& log);

/// Envelope and fit over a stored series for each (column, exponent) in the config.
int cmd_decay_report(const std::string& series_path, const RunConfig& config, std::ostream& log);

/// Evolves the preset and fits the β-profile at every diagnostic time. Report only.
int cmd_conjecture(const RunConfig& config, std::ostream& log);

}  // namespace ricci
