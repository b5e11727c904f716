#include "ricci/commands.hpp"
#include "ricci/config.hpp"
#include "ricci/error.hpp"
#include "ricci/series.hpp"

#include "doctest.h"
#include "json.hpp"

#include <fmt/core.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace ricci;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / fmt::format("ricci_cli_{}", getpid()) / name;
    fs::remove_all(dir);
    return dir;
}

// Small, fast bump configuration.
RunConfig small_config(const fs::path& out) {
    RunConfig c = parse_config(
        "[grid]\nnx = 33\nny = 33\nh = 0.25\n"
        "[initial]\npreset = bump:0.5:1\n"
        "[flow]\nt_end = 0.5\ndiagnostic_interval = 0.05\n"
        "[analysis]\nmargin = 4\nchecks = lower_bound, comparison\n");
    c.output_dir = out.string();
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_exe(const std::string& args, const fs::path& log) {
    const std::string cmd = fmt::format("{} {} > {} 2>&1", RICCI_LAB_EXE, args, log.string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("configuration defaults and parsing") {
    const RunConfig d;
    CHECK(d.nx == 257);
    CHECK(d.h == 0.078125);
    CHECK(d.preset == "bump:0.5:1");
    CHECK(d.bc == BoundaryKind::DirichletFrozen);
    CHECK(d.scheme == Scheme::Heun);
    CHECK(d.margin == 8);
    CHECK_NOTHROW(d.validate());

    const std::string text =
        "; comment\n[grid]\nnx = 64\nny = 64\nh = 0.25\n[flow]\nbc = periodic\nscheme = euler\nsnapshots = 0.5, 1\n"
        "dt = 0.001\n[analysis]\ndecay = sup_H:1, sup_gradR2:3\nchecks = mp1\n[output]\ndir = somewhere\n";
    const RunConfig c = parse_config(text);
    CHECK(c.nx == 64);
    CHECK(c.bc == BoundaryKind::Periodic);
    CHECK(c.scheme == Scheme::ExplicitEuler);
    CHECK(c.snapshot_times == std::vector<double>{0.5, 1.0});
    CHECK(*c.dt_override == 0.001);
    REQUIRE(c.decay_exponents.size() == 2);
    CHECK(c.decay_exponents[1].first == "sup_gradR2");
    CHECK(c.decay_exponents[1].second == 3.0);
    CHECK(c.checks == std::vector<std::string>{"mp1"});
    CHECK(c.output_dir == "somewhere");
    CHECK(c.source_text == text);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(parse_config("[grid]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\nnx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nnx = twelve\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nh = inf\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[flow]\nbc = neumann\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[flow]\nheat_companion = maybe\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[analysis]\ndecay = sup_H\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("nx = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid\nnx = 3\n"), ConfigError);

    CHECK_THROWS_AS(parse_config("[grid]\nnx = 4\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\npreset = torus\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[flow]\nbc = periodic\n").validate(), ConfigError);  // 257 is odd
    CHECK_THROWS_AS(parse_config("[flow]\ncfl_safety = 1.5\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[analysis]\nchecks = everything\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[analysis]\ndecay = sup_Q:1\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[analysis]\nmargin = 200\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("[analysis]\nlambda = 0\n").validate(), ConfigError);
}

TEST_CASE("overrides and effective values") {
    RunConfig c;
    apply_override(c, "flow.t_end=5");
    apply_override(c, " initial.preset = cigar ");
    CHECK(c.t_end == 5.0);
    CHECK(c.preset == "cigar");
    CHECK_THROWS_AS(apply_override(c, "flow.t_end"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "flow.nope=1"), ConfigError);

    const auto values = effective_values(c);
    CHECK(values.at("flow.t_end") == "5");
    CHECK(values.at("initial.preset") == "cigar");
    CHECK(values.at("flow.dt") == "auto");

    // every effective value parses back to the same configuration
    std::map<std::string, std::string> sections;
    for (const auto& [key, value] : values) {
        const auto dot = key.find('.');
        sections[key.substr(0, dot)] += key.substr(dot + 1) + " = " + value + "\n";
    }
    std::string text;
    for (const auto& [section, body] : sections) text += "[" + section + "]\n" + body;
    CHECK(effective_values(parse_config(text)) == values);

    const std::string reference = config_reference();
    for (const auto& [key, value] : values) CHECK(reference.find(key) != std::string::npos);
}

TEST_CASE("output directories resolve against the environment root") {
    unsetenv(kOutputRootEnv);
    CHECK(resolve_output_dir("run") == "run");
    setenv(kOutputRootEnv, "/tmp/lab_root", 1);
    CHECK(resolve_output_dir("run") == "/tmp/lab_root/run");
    CHECK(resolve_output_dir("/abs/run") == "/abs/run");
    unsetenv(kOutputRootEnv);
}

TEST_CASE("automatic check selection follows the preset") {
    RunConfig c;
    const auto bump = resolve_checks(c);
    CHECK(std::find(bump.begin(), bump.end(), "flatness") != bump.end());
    CHECK(std::find(bump.begin(), bump.end(), "mp1") == bump.end());
    c.heat_companion = true;
    c.preset = "cigar";
    const auto cigar = resolve_checks(c);
    CHECK(std::find(cigar.begin(), cigar.end(), "barrier") == cigar.end());
    CHECK(std::find(cigar.begin(), cigar.end(), "lower_bound") != cigar.end());
    CHECK(std::find(cigar.begin(), cigar.end(), "mp1") != cigar.end());
    c.checks = {"barrier"};
    CHECK(resolve_checks(c) == std::vector<std::string>{"barrier"});
}

TEST_CASE("run writes series, snapshots and manifest") {
    const fs::path out = scratch("run");
    RunConfig c = small_config(out);
    c.snapshot_times = {0.25};
    std::ostringstream log;
    CHECK(cmd_run(c, log) == kExitOk);
    CHECK(fs::exists(out / "u_t0.25.csv"));
    const DiagnosticSeries s = read_series_csv_file((out / "series.csv").string());
    CHECK(s.size() == 11);
    CHECK(s.back().t == 0.5);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["termination"] == "completed");
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["verdicts"].size() == 2);
    CHECK(manifest["config"]["grid.nx"] == "33");
    CHECK(manifest["version"] == version());
    CHECK_FALSE(fs::exists(out / "manifest.json.tmp"));
}

TEST_CASE("flat run passes every automatic check with zero curvature") {
    const fs::path out = scratch("flat");
    RunConfig c = small_config(out);
    c.preset = "flat";
    c.checks = {"auto"};
    c.t_end = 1.0;
    c.diagnostic_interval = 0.1;
    std::ostringstream log;
    CHECK(cmd_run(c, log) == kExitOk);
    const DiagnosticSeries s = read_series_csv_file((out / "series.csv").string());
    for (const DiagnosticRow& r : s.rows()) {
        CHECK(r.sup_R == 0.0);
        CHECK(r.inf_R == 0.0);
        CHECK(r.sup_H == 0.0);
    }
}

TEST_CASE("run exit codes") {
    std::ostringstream log;
    {
        const fs::path out = scratch("abort");
        RunConfig c = small_config(out);
        c.dt_override = 0.5;
        CHECK(cmd_run(c, log) == kExitNumericalAbort);
        const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
        CHECK(manifest["termination"] == "numerical_abort");
        CHECK(manifest["exit_code"] == 3);
        CHECK(fs::exists(out / "series.csv"));
        CHECK(fs::exists(out / "u_abort.csv"));
    }
    {
        const fs::path out = scratch("failing");
        RunConfig c = small_config(out);
        c.checks = {"curvature_decay"};  // half a time unit is far too short
        CHECK(cmd_run(c, log) == kExitCheckFailed);
    }
    {
        const fs::path out = scratch("badconfig");
        RunConfig c = small_config(out);
        c.preset = "nonsense";
        CHECK(cmd_run(c, log) == kExitConfigError);
        CHECK(nlohmann::json::parse(slurp(out / "manifest.json"))["termination"] == "config_error");
    }
}

TEST_CASE("identical runs give identical series files") {
    std::ostringstream log;
    RunConfig a = small_config(scratch("det_a"));
    a.heat_companion = true;
    RunConfig b = a;
    b.output_dir = scratch("det_b").string();
    REQUIRE(cmd_run(a, log) == kExitOk);
    REQUIRE(cmd_run(b, log) == kExitOk);
    CHECK(slurp(fs::path(a.output_dir) / "series.csv") == slurp(fs::path(b.output_dir) / "series.csv"));
}

TEST_CASE("verify-exact") {
    std::ostringstream log;
    VerifyExactOptions o;
    o.output_dir = scratch("verify").string();
    CHECK(cmd_verify_exact(o, log) == kExitOk);
    CHECK(fs::exists(fs::path(o.output_dir) / "verify_exact.csv"));
    o.preset = "flat";
    CHECK(cmd_verify_exact(o, log) == kExitOk);
    o.preset = "cigar:3";
    CHECK(cmd_verify_exact(o, log) == kExitCheckFailed);
    o.preset = "bump:0.5:1";
    CHECK_THROWS_AS(cmd_verify_exact(o, log), InvalidArgument);
}

TEST_CASE("mp-lab, conjecture, aperture and decay-report") {
    std::ostringstream log;
    RunConfig c = small_config(scratch("mp"));
    CHECK(cmd_mp_lab(c, log) == kExitOk);
    CHECK(fs::exists(fs::path(c.output_dir) / "mp_report.txt"));

    RunConfig hsu = small_config(scratch("conjecture"));
    hsu.preset = "hsu:2:3";
    hsu.margin = 2;
    CHECK(cmd_conjecture(hsu, log) == kExitOk);
    std::ifstream in(fs::path(hsu.output_dir) / "conjecture.csv");
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "t,k_fit,residual,mismatch");
    CHECK(std::stod(first.substr(first.find(',') + 1)) == doctest::Approx(3.0).epsilon(1e-9));

    RunConfig flat = small_config(scratch("conjecture_flat"));
    flat.preset = "flat";
    CHECK(cmd_conjecture(flat, log) == kExitOk);

    RunConfig ap = small_config(scratch("aperture"));
    ap.preset = "flat";
    ApertureOptions ao;
    ao.expect = std::make_pair(0.95, 1.05);
    CHECK(cmd_aperture(ap, ao, log) == kExitOk);
    ao.expect = std::make_pair(0.0, 0.5);
    CHECK(cmd_aperture(ap, ao, log) == kExitCheckFailed);
    ao.time = 1.0;
    ap.preset = "bump:0.5:1";
    CHECK_THROWS_AS(cmd_aperture(ap, ao, log), ConfigError);

    RunConfig dr = small_config(scratch("decay"));
    const fs::path series = fs::path(c.output_dir) / "series.csv";
    dr.decay_exponents = {{"sup_H", 1.0}};
    CHECK(cmd_decay_report(series.string(), dr, log) == kExitOk);
    CHECK(slurp(fs::path(dr.output_dir) / "decay_report.csv").rfind("quantity,p,envelope_C,tail_monotone,fitted_slope\n", 0) == 0);
    dr.decay_exponents = {{"area", 1.0}};  // area does not decay, so the weighted tail grows
    CHECK(cmd_decay_report(series.string(), dr, log) == kExitCheckFailed);
    CHECK_THROWS_AS(cmd_decay_report("/nonexistent/series.csv", dr, log), ConfigError);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("exe");
    fs::create_directories(dir);
    const fs::path log = dir / "log.txt";
    CHECK(run_exe("--help", log) == 0);
    CHECK(slurp(log).find("analysis.tol_barrier") != std::string::npos);
    CHECK(run_exe("", log) == 2);
    CHECK(run_exe("frobnicate", log) == 2);
    CHECK(run_exe("run --set grid.bogus=1", log) == 2);
    CHECK(run_exe("run --config /nonexistent.ini", log) == 2);

    const std::string small = "--set grid.nx=33 --set grid.ny=33 --set grid.h=0.25 --set analysis.margin=4 "
                              "--set flow.t_end=0.2 --set analysis.checks=lower_bound";
    setenv(kOutputRootEnv, dir.c_str(), 1);
    CHECK(run_exe("run " + small + " -o rooted", log) == 0);
    CHECK(fs::exists(dir / "rooted" / "manifest.json"));
    CHECK(run_exe("run " + small + " --set flow.dt=1 -o aborted", log) == 3);
    CHECK(run_exe("run " + small + " --set analysis.checks=curvature_decay -o failing", log) == 1);
    CHECK(run_exe("verify-exact --preset cigar:3", log) == 1);
    CHECK(run_exe("decay-report " + (dir / "rooted" / "series.csv").string() + " --set analysis.decay=sup_H:1 -o dr", log) == 0);
    unsetenv(kOutputRootEnv);
}
