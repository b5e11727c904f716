#include "ricci/config.hpp"

#include "ricci/error.hpp"
#include "ricci/exact.hpp"
#include "number_text.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace ricci {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    const auto value = detail::parse_double(text);
    if (!value) throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, text));
    return *value;
}

long long to_integer(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
    return value;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
    if (text == "false" || text == "no" || text == "0" || text == "off") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) out += ',';
        out += fmt::format("{}", values[k]);
    }
    return out;
}

struct Key {
    const char* name;
    const char* help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        {"grid.nx", "node count along x",
         [](RunConfig& c, const std::string& v) { c.nx = static_cast<int>(to_integer("grid.nx", v)); },
         [](const RunConfig& c) { return fmt::format("{}", c.nx); }},
        {"grid.ny", "node count along y",
         [](RunConfig& c, const std::string& v) { c.ny = static_cast<int>(to_integer("grid.ny", v)); },
         [](const RunConfig& c) { return fmt::format("{}", c.ny); }},
        {"grid.h", "node spacing", [](RunConfig& c, const std::string& v) { c.h = to_double("grid.h", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.h); }},
        {"grid.center_x", "x coordinate of the central node",
         [](RunConfig& c, const std::string& v) { c.center_x = to_double("grid.center_x", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.center_x); }},
        {"grid.center_y", "y coordinate of the central node",
         [](RunConfig& c, const std::string& v) { c.center_y = to_double("grid.center_y", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.center_y); }},
        {"initial.preset", "flat[:c] | cigar[:rate] | hsu:<beta>:<k> | bump:<A>:<sigma> | hsu-sandwich:<beta>:<kc>:<kf>",
         [](RunConfig& c, const std::string& v) { c.preset = v; }, [](const RunConfig& c) { return c.preset; }},
        {"flow.bc", "dirichlet | periodic | extrapolate",
         [](RunConfig& c, const std::string& v) { c.bc = parse_boundary_kind(v); },
         [](const RunConfig& c) { return to_string(c.bc); }},
        {"flow.scheme", "heun | euler", [](RunConfig& c, const std::string& v) { c.scheme = parse_scheme(v); },
         [](const RunConfig& c) { return to_string(c.scheme); }},
        {"flow.cfl_safety", "fraction of the explicit stability bound used as dt",
         [](RunConfig& c, const std::string& v) { c.cfl_safety = to_double("flow.cfl_safety", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.cfl_safety); }},
        {"flow.t_end", "final time", [](RunConfig& c, const std::string& v) { c.t_end = to_double("flow.t_end", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.t_end); }},
        {"flow.snapshots", "comma list of times at which u is dumped",
         [](RunConfig& c, const std::string& v) {
             c.snapshot_times.clear();
             for (const std::string& s : split_list(v)) c.snapshot_times.push_back(to_double("flow.snapshots", s));
         },
         [](const RunConfig& c) { return join_doubles(c.snapshot_times); }},
        {"flow.diagnostic_interval", "time between diagnostic rows",
         [](RunConfig& c, const std::string& v) {
             c.diagnostic_interval = to_double("flow.diagnostic_interval", v);
         },
         [](const RunConfig& c) { return fmt::format("{}", c.diagnostic_interval); }},
        {"flow.dt", "fixed time step (empty = adaptive)",
         [](RunConfig& c, const std::string& v) {
             if (v.empty() || v == "auto") {
                 c.dt_override.reset();
             } else {
                 c.dt_override = to_double("flow.dt", v);
             }
         },
         [](const RunConfig& c) { return c.dt_override ? fmt::format("{}", *c.dt_override) : std::string("auto"); }},
        {"flow.max_steps", "step-count guard",
         [](RunConfig& c, const std::string& v) {
             const long long n = to_integer("flow.max_steps", v);
             if (n <= 0) throw ConfigError("flow.max_steps must be positive");
             c.max_steps = static_cast<std::size_t>(n);
         },
         [](const RunConfig& c) { return fmt::format("{}", c.max_steps); }},
        {"flow.max_wall_seconds", "wall-clock guard in seconds (0 = off)",
         [](RunConfig& c, const std::string& v) { c.max_wall_seconds = to_double("flow.max_wall_seconds", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.max_wall_seconds); }},
        {"flow.heat_companion", "evolve a heat-equation companion w alongside the flow",
         [](RunConfig& c, const std::string& v) { c.heat_companion = to_bool("flow.heat_companion", v); },
         [](const RunConfig& c) { return std::string(c.heat_companion ? "true" : "false"); }},
        {"flow.heat_seed", "seed of the random initial companion data",
         [](RunConfig& c, const std::string& v) {
             c.heat_seed = static_cast<std::uint64_t>(to_integer("flow.heat_seed", v));
         },
         [](const RunConfig& c) { return fmt::format("{}", c.heat_seed); }},
        {"analysis.margin", "interior window margin in nodes",
         [](RunConfig& c, const std::string& v) { c.margin = static_cast<int>(to_integer("analysis.margin", v)); },
         [](const RunConfig& c) { return fmt::format("{}", c.margin); }},
        {"analysis.lambda", "weight of t^3 R^2 in the curvature gradient energy",
         [](RunConfig& c, const std::string& v) { c.lambda = to_double("analysis.lambda", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.lambda); }},
        {"analysis.tail_fraction", "fraction of rows forming the decay tail",
         [](RunConfig& c, const std::string& v) { c.tail_fraction = to_double("analysis.tail_fraction", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.tail_fraction); }},
        {"analysis.checks",
         "auto | comma list of lower_bound, comparison, decay, harnack_slope, curvature_decay, flatness, barrier, mp1, aronson_benilan",
         [](RunConfig& c, const std::string& v) { c.checks = split_list(v); },
         [](const RunConfig& c) {
             std::string out;
             for (std::size_t k = 0; k < c.checks.size(); ++k) out += (k ? "," : "") + c.checks[k];
             return out;
         }},
        {"analysis.decay", "comma list of column:exponent pairs for decay envelopes",
         [](RunConfig& c, const std::string& v) {
             c.decay_exponents.clear();
             for (const std::string& item : split_list(v)) {
                 const auto colon = item.find(':');
                 if (colon == std::string::npos) throw ConfigError(fmt::format("analysis.decay: '{}' lacks ':p'", item));
                 c.decay_exponents.emplace_back(trim(item.substr(0, colon)),
                                                to_double("analysis.decay", trim(item.substr(colon + 1))));
             }
         },
         [](const RunConfig& c) {
             std::string out;
             for (std::size_t k = 0; k < c.decay_exponents.size(); ++k) {
                 out += fmt::format("{}{}:{}", k ? "," : "", c.decay_exponents[k].first, c.decay_exponents[k].second);
             }
             return out;
         }},
        {"analysis.tol_lower_bound", "tolerance of the curvature lower-bound margin",
         [](RunConfig& c, const std::string& v) { c.tol_lower_bound = to_double("analysis.tol_lower_bound", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.tol_lower_bound); }},
        {"analysis.tol_mp1_per_step", "per-step tolerance of the heat-companion maximum principle",
         [](RunConfig& c, const std::string& v) { c.tol_mp1_per_step = to_double("analysis.tol_mp1_per_step", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.tol_mp1_per_step); }},
        {"analysis.tol_barrier", "tolerance on max Laplacian of the barrier",
         [](RunConfig& c, const std::string& v) { c.tol_barrier = to_double("analysis.tol_barrier", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.tol_barrier); }},
        {"analysis.tol_flatness", "tolerance of the flatness certificate",
         [](RunConfig& c, const std::string& v) { c.tol_flatness = to_double("analysis.tol_flatness", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.tol_flatness); }},
        {"analysis.tol_aronson_benilan", "tolerance on dv/dt - v/t over snapshot triples",
         [](RunConfig& c, const std::string& v) {
             c.tol_aronson_benilan = to_double("analysis.tol_aronson_benilan", v);
         },
         [](const RunConfig& c) { return fmt::format("{}", c.tol_aronson_benilan); }},
        {"analysis.max_harnack_slope", "largest accepted log-log slope of sup H over the tail",
         [](RunConfig& c, const std::string& v) { c.max_harnack_slope = to_double("analysis.max_harnack_slope", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.max_harnack_slope); }},
        {"analysis.curvature_decay_ratio", "required sup|R|(t_end) / sup|R|(0) upper bound",
         [](RunConfig& c, const std::string& v) {
             c.curvature_decay_ratio = to_double("analysis.curvature_decay_ratio", v);
         },
         [](const RunConfig& c) { return fmt::format("{}", c.curvature_decay_ratio); }},
        {"analysis.hsu_beta", "beta of the profile fit when the preset does not carry one",
         [](RunConfig& c, const std::string& v) { c.hsu_beta = to_double("analysis.hsu_beta", v); },
         [](const RunConfig& c) { return fmt::format("{}", c.hsu_beta); }},
        {"analysis.radii", "comma list of geodesic radii for the aperture fit (empty = automatic)",
         [](RunConfig& c, const std::string& v) {
             c.radii.clear();
             for (const std::string& s : split_list(v)) c.radii.push_back(to_double("analysis.radii", s));
         },
         [](const RunConfig& c) { return join_doubles(c.radii); }},
        {"output.dir", "output directory (relative paths resolve against $RICCI_LAB_OUT)",
         [](RunConfig& c, const std::string& v) { c.output_dir = v; },
         [](const RunConfig& c) { return c.output_dir; }},
    };
    return table;
}

const Key& find_key(const std::string& name) {
    for (const Key& key : keys()) {
        if (name == key.name) return key;
    }
    throw ConfigError(fmt::format("unknown configuration key '{}'", name));
}

}  // namespace

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names = {"lower_bound", "comparison", "decay",
                                                   "harnack_slope", "curvature_decay", "flatness",
                                                   "barrier", "mp1", "aronson_benilan"};
    return names;
}

GridSpec RunConfig::grid() const {
    try {
        return GridSpec::centered(nx, ny, h, center_x, center_y);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

StepperConfig RunConfig::stepper() const {
    StepperConfig s;
    s.scheme = scheme;
    s.cfl_safety = cfl_safety;
    s.t_end = t_end;
    s.snapshot_times = snapshot_times;
    s.diagnostic_interval = diagnostic_interval;
    s.dt_override = dt_override;
    s.max_steps = max_steps;
    s.max_wall_seconds = max_wall_seconds;
    return s;
}

void RunConfig::validate() const {
    const GridSpec spec = grid();
    stepper().validate();
    ExactSolution::parse(preset);
    if (bc == BoundaryKind::Periodic && (nx % 2 != 0 || ny % 2 != 0)) {
        throw ConfigError("periodic boundaries need even node counts");
    }
    if (margin < 0 || 2 * margin >= spec.nx || 2 * margin >= spec.ny) {
        throw ConfigError(fmt::format("analysis.margin {} leaves no interior window", margin));
    }
    if (bc == BoundaryKind::DirichletFrozen && margin < 2) {
        throw ConfigError("dirichlet runs need analysis.margin >= 2 for curvature derivatives");
    }
    if (!(lambda > 0.0)) throw ConfigError("analysis.lambda must be positive");
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("analysis.tail_fraction must lie in (0, 1]");
    if (!(hsu_beta > 0.0)) throw ConfigError("analysis.hsu_beta must be positive");
    if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
    if (checks.empty()) throw ConfigError("analysis.checks must not be empty");
    const bool is_auto = checks.size() == 1 && checks.front() == "auto";
    for (const std::string& name : checks) {
        if (is_auto) break;
        if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end()) {
            throw ConfigError(fmt::format("unknown check '{}'", name));
        }
    }
    for (const auto& [column, p] : decay_exponents) {
        if (std::find(kSeriesColumns.begin(), kSeriesColumns.end(), column) == kSeriesColumns.end()) {
            throw ConfigError(fmt::format("analysis.decay names unknown column '{}'", column));
        }
    }
}

RunConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config parse error: {}", e.what()));
    }
    RunConfig config;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(fmt::format("config key '{}' must live inside a section", section));
        }
        for (const auto& [key, value] : body) {
            const std::string name = section + "." + key;
            find_key(name).set(config, trim(value.data()));
        }
    }
    config.source_text = text;
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("override '{}' is not section.key=value", assignment));
    find_key(trim(assignment.substr(0, eq))).set(config, trim(assignment.substr(eq + 1)));
}

std::map<std::string, std::string> effective_values(const RunConfig& config) {
    std::map<std::string, std::string> out;
    for (const Key& key : keys()) out[key.name] = key.get(config);
    return out;
}

std::string config_reference() {
    const RunConfig defaults;
    std::string out;
    for (const Key& key : keys()) {
        out += fmt::format("  {:<28} {} (default: {})\n", key.name, key.help, key.get(defaults));
    }
    return out;
}

std::string resolve_output_dir(const std::string& dir) {
    const std::filesystem::path path(dir);
    if (path.is_absolute()) return dir;
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
        return (std::filesystem::path(root) / path).string();
    }
    return dir;
}

}  // namespace ricci
