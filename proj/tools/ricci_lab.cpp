#include "ricci/commands.hpp"
#include "ricci/config.hpp"
#include "ricci/error.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("-c,--config", opts.config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opts.overrides, "override one key, e.g. --set flow.t_end=5 (repeatable)");
    sub->add_option("-o,--out", opts.output_dir, "output directory (same as output.dir)");
}

ricci::RunConfig build_config(const CommonOptions& opts) {
    ricci::RunConfig config = opts.config_path.empty() ? ricci::RunConfig{} : ricci::load_config_file(opts.config_path);
    for (const std::string& item : opts.overrides) ricci::apply_override(config, item);
    if (!opts.output_dir.empty()) config.output_dir = opts.output_dir;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal Ricci flow laboratory on a planar grid"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ricci::version());
    app.footer(fmt::format("Configuration keys (INI sections [grid] [initial] [flow] [analysis] [output]):\n{}\n"
                           "Relative output directories resolve against ${} when set.\n"
                           "Exit codes: 0 ok, 1 check failed, 2 configuration error, 3 numerical abort.",
                           ricci::config_reference(), ricci::kOutputRootEnv));

    CommonOptions common;

    CLI::App* run = app.add_subcommand("run", "evolve a preset and evaluate the enabled checks");
    add_common(run, common);

    CLI::App* mp = app.add_subcommand("mp-lab", "barrier, heat-companion and comparison checks on one run");
    add_common(mp, common);

    CLI::App* conj = app.add_subcommand("conjecture", "track the best-fit profile parameter along a run");
    add_common(conj, common);

    ricci::VerifyExactOptions verify;
    std::string verify_out;
    CLI::App* ver = app.add_subcommand("verify-exact", "spatial convergence of the exact-solution residual");
    ver->add_option("--preset", verify.preset, "exact solution")->capture_default_str();
    ver->add_option("--cells", verify.cells, "cells per axis for each grid")->delimiter(',')->capture_default_str();
    ver->add_option("--extent", verify.extent, "half-width L of [-L, L]^2")->capture_default_str();
    ver->add_option("--time", verify.time, "evaluation time")->capture_default_str();
    ver->add_option("--dt", verify.dt, "time difference step")->capture_default_str();
    ver->add_option("--margin", verify.margin, "window margin in nodes")->capture_default_str();
    ver->add_option("-o,--out", verify_out, "output directory")->default_str(verify.output_dir);

    ricci::ApertureOptions aperture;
    std::optional<double> expect_min;
    std::optional<double> expect_max;
    CLI::App* ap = app.add_subcommand("aperture", "length of geodesic circles against their radius");
    add_common(ap, common);
    ap->add_option("--time", aperture.time, "time of the exact slice")->capture_default_str();
    ap->add_option("--expect-min", expect_min, "fail when the slope is below this");
    ap->add_option("--expect-max", expect_max, "fail when the slope is above this");

    std::string series_path;
    CLI::App* decay = app.add_subcommand("decay-report", "decay envelopes over a stored series.csv");
    add_common(decay, common);
    decay->add_option("series", series_path, "series CSV")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ricci::kExitOk : ricci::kExitConfigError;
    }

    try {
        if (*run) return ricci::cmd_run(build_config(common), std::cout);
        if (*mp) return ricci::cmd_mp_lab(build_config(common), std::cout);
        if (*conj) return ricci::cmd_conjecture(build_config(common), std::cout);
        if (*ver) {
            if (!verify_out.empty()) verify.output_dir = verify_out;
            return ricci::cmd_verify_exact(verify, std::cout);
        }
        if (*ap) {
            if (expect_min || expect_max) {
                aperture.expect = std::make_pair(expect_min.value_or(-1e300), expect_max.value_or(1e300));
            }
            return ricci::cmd_aperture(build_config(common), aperture, std::cout);
        }
        if (*decay) return ricci::cmd_decay_report(series_path, build_config(common), std::cout);
    } catch (const ricci::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return ricci::kExitConfigError;
    } catch (const ricci::InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return ricci::kExitConfigError;
    } catch (const ricci::NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return ricci::kExitNumericalAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ricci::kExitCheckFailed;
    }
    return ricci::kExitConfigError;
}
