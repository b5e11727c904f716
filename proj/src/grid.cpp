#include "ricci/grid.hpp"

#include "ricci/error.hpp"
#include "number_text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ricci {

void GridSpec::validate() const {
    if (nx < 8 || ny < 8) {
        throw InvalidArgument(fmt::format("grid needs at least 8x8 nodes, got {}x{}", nx, ny));
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidArgument(fmt::format("grid spacing must be positive and finite, got {}", h));
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) {
        throw InvalidArgument("grid origin must be finite");
    }
}

GridSpec GridSpec::centered(int nx, int ny, double h, double cx, double cy) {
    GridSpec spec{nx, ny, h, cx - (nx / 2) * h, cy - (ny / 2) * h};
    spec.validate();
    return spec;
}

std::optional<std::pair<int, int>> GridSpec::node_at(double px, double py) const {
    const double fi = (px - x0) / h;
    const double fj = (py - y0) / h;
    const double ri = std::round(fi);
    const double rj = std::round(fj);
    if (std::abs(fi - ri) > 1e-9 || std::abs(fj - rj) > 1e-9) {
        return std::nullopt;
    }
    if (ri < 0 || rj < 0 || ri >= nx || rj >= ny) {
        return std::nullopt;
    }
    return std::pair{static_cast<int>(ri), static_cast<int>(rj)};
}

ScalarField::ScalarField(const GridSpec& spec, double fill) : spec_(spec), data_(spec.size(), fill) {
    spec_.validate();
    if (!std::isfinite(fill)) {
        throw NumericalError("ScalarField fill value is not finite");
    }
}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> data, int undefined_ring)
    : spec_(spec), data_(std::move(data)), undefined_ring_(undefined_ring) {
    spec_.validate();
    if (data_.size() != spec_.size()) {
        throw InvalidArgument(fmt::format("ScalarField expects {} values, got {}", spec_.size(), data_.size()));
    }
    require_finite("ScalarField construction");
}

ScalarField ScalarField::from_function(const GridSpec& spec, const std::function<double(double, double)>& fn) {
    spec.validate();
    std::vector<double> data(spec.size());
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            data[spec.index(i, j)] = fn(spec.x(i), spec.y(j));
        }
    }
    return ScalarField(spec, std::move(data));
}

void ScalarField::require_finite(const char* what) const {
    for (std::size_t k = 0; k < data_.size(); ++k) {
        if (!std::isfinite(data_[k])) {
            const int i = static_cast<int>(k % static_cast<std::size_t>(spec_.nx));
            const int j = static_cast<int>(k / static_cast<std::size_t>(spec_.nx));
            throw NumericalError(fmt::format("{}: non-finite value {} at node ({}, {})", what, data_[k], i, j));
        }
    }
}

void require_same_spec(const ScalarField& a, const ScalarField& b) {
    if (!(a.spec() == b.spec())) {
        throw InvalidArgument("scalar fields live on different grids");
    }
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_spec(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    undefined_ring_ = std::max(undefined_ring_, other.undefined_ring_);
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_spec(*this, other);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    undefined_ring_ = std::max(undefined_ring_, other.undefined_ring_);
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& value : data_) value *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

BoundaryCondition BoundaryCondition::frozen(ScalarField values) {
    values.require_finite("frozen boundary values");
    BoundaryCondition bc(BoundaryKind::DirichletFrozen);
    bc.frozen_ = std::move(values);
    return bc;
}

const ScalarField& BoundaryCondition::frozen_values() const {
    if (!frozen_) {
        throw InvalidArgument("boundary condition has no frozen values");
    }
    return *frozen_;
}

void BoundaryCondition::check_compatible(const GridSpec& spec) const {
    if (kind_ == BoundaryKind::Periodic && (spec.nx % 2 != 0 || spec.ny % 2 != 0)) {
        throw InvalidArgument(fmt::format("periodic boundaries need even node counts, got {}x{}", spec.nx, spec.ny));
    }
    if (kind_ == BoundaryKind::DirichletFrozen && frozen_ && !(frozen_->spec() == spec)) {
        throw InvalidArgument("frozen boundary values live on a different grid");
    }
}

std::string to_string(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::DirichletFrozen: return "dirichlet";
        case BoundaryKind::Periodic: return "periodic";
        case BoundaryKind::LinearExtrapolate: return "extrapolate";
    }
    return "unknown";
}

BoundaryKind parse_boundary_kind(const std::string& text) {
    if (text == "dirichlet" || text == "frozen") return BoundaryKind::DirichletFrozen;
    if (text == "periodic") return BoundaryKind::Periodic;
    if (text == "extrapolate") return BoundaryKind::LinearExtrapolate;
    throw ConfigError(fmt::format("unknown boundary kind '{}' (expected dirichlet, periodic or extrapolate)", text));
}

namespace {

// Value at a possibly out-of-range node under the ghost rule of `kind`.
double ghost_value(const ScalarField& f, int i, int j, BoundaryKind kind) {
    const GridSpec& s = f.spec();
    if (kind == BoundaryKind::Periodic) {
        i = ((i % s.nx) + s.nx) % s.nx;
        j = ((j % s.ny) + s.ny) % s.ny;
        return f(i, j);
    }
    if (i < 0) return 2.0 * ghost_value(f, i + 1, j, kind) - ghost_value(f, i + 2, j, kind);
    if (i >= s.nx) return 2.0 * ghost_value(f, i - 1, j, kind) - ghost_value(f, i - 2, j, kind);
    if (j < 0) return 2.0 * ghost_value(f, i, j + 1, kind) - ghost_value(f, i, j + 2, kind);
    if (j >= s.ny) return 2.0 * ghost_value(f, i, j - 1, kind) - ghost_value(f, i, j - 2, kind);
    return f(i, j);
}

// Applies `kernel(get, i, j)` at every node. Interior nodes read the storage
// directly; ring nodes read through the ghost rule, or are left at 0 under
// DirichletFrozen.
template <typename Kernel>
ScalarField apply_stencil(const ScalarField& f, const BoundaryCondition& bc, Kernel kernel) {
    const GridSpec& s = f.spec();
    bc.check_compatible(s);
    f.require_finite("stencil input");
    std::vector<double> out(s.size(), 0.0);
    const double* p = f.data().data();
    const int nx = s.nx;
    for (int j = 1; j < s.ny - 1; ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            auto get = [p, nx](int ii, int jj) { return p[static_cast<std::size_t>(jj) * nx + ii]; };
            out[s.index(i, j)] = kernel(get, i, j);
        }
    }
    int ring = f.undefined_ring() > 0 ? f.undefined_ring() + 1 : 0;
    if (bc.kind() == BoundaryKind::DirichletFrozen) {
        ring = f.undefined_ring() + 1;
    } else {
        const BoundaryKind kind = bc.kind();
        auto get = [&f, kind](int ii, int jj) { return ghost_value(f, ii, jj, kind); };
        for (int j = 0; j < s.ny; ++j) {
            const bool edge_row = (j == 0 || j == s.ny - 1);
            const int step = edge_row ? 1 : nx - 1;
            for (int i = 0; i < nx; i += step) {
                out[s.index(i, j)] = kernel(get, i, j);
            }
        }
    }
    ScalarField result(s, std::move(out), ring);
    return result;
}

}  // namespace

ScalarField laplacian(const ScalarField& f, const BoundaryCondition& bc) {
    const double inv_h2 = 1.0 / (f.spec().h * f.spec().h);
    return apply_stencil(f, bc, [inv_h2](auto get, int i, int j) {
        return (get(i + 1, j) + get(i - 1, j) + get(i, j + 1) + get(i, j - 1) - 4.0 * get(i, j)) * inv_h2;
    });
}

VectorField gradient(const ScalarField& f, const BoundaryCondition& bc) {
    const double inv_2h = 1.0 / (2.0 * f.spec().h);
    return VectorField{
        apply_stencil(f, bc, [inv_2h](auto get, int i, int j) { return (get(i + 1, j) - get(i - 1, j)) * inv_2h; }),
        apply_stencil(f, bc, [inv_2h](auto get, int i, int j) { return (get(i, j + 1) - get(i, j - 1)) * inv_2h; }),
    };
}

SymTensorField hessian(const ScalarField& f, const BoundaryCondition& bc) {
    const double h = f.spec().h;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_4h2 = 1.0 / (4.0 * h * h);
    return SymTensorField{
        apply_stencil(f, bc,
                      [inv_h2](auto get, int i, int j) {
                          return (get(i + 1, j) - 2.0 * get(i, j) + get(i - 1, j)) * inv_h2;
                      }),
        apply_stencil(f, bc,
                      [inv_4h2](auto get, int i, int j) {
                          return (get(i + 1, j + 1) - get(i + 1, j - 1) - get(i - 1, j + 1) + get(i - 1, j - 1)) *
                                 inv_4h2;
                      }),
        apply_stencil(f, bc,
                      [inv_h2](auto get, int i, int j) {
                          return (get(i, j + 1) - 2.0 * get(i, j) + get(i, j - 1)) * inv_h2;
                      }),
    };
}

namespace {

template <typename Reduce>
double window_reduce(const ScalarField& f, int margin, double init, Reduce reduce) {
    const GridSpec& s = f.spec();
    if (margin < 0) {
        throw InvalidArgument("window margin must be non-negative");
    }
    if (margin < f.undefined_ring()) {
        throw InvalidArgument(fmt::format("window margin {} reads the {} undefined boundary ring(s)", margin,
                                          f.undefined_ring()));
    }
    if (2 * margin >= s.nx || 2 * margin >= s.ny) {
        throw InvalidArgument(fmt::format("window with margin {} is empty on a {}x{} grid", margin, s.nx, s.ny));
    }
    double acc = init;
    for (int j = margin; j < s.ny - margin; ++j) {
        for (int i = margin; i < s.nx - margin; ++i) {
            acc = reduce(acc, f(i, j));
        }
    }
    return acc;
}

}  // namespace

double sup_value(const ScalarField& f, int margin) {
    return window_reduce(f, margin, -std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return std::max(a, b); });
}

double inf_value(const ScalarField& f, int margin) {
    return window_reduce(f, margin, std::numeric_limits<double>::infinity(),
                         [](double a, double b) { return std::min(a, b); });
}

double sup_abs(const ScalarField& f, int margin) {
    return window_reduce(f, margin, 0.0, [](double a, double b) { return std::max(a, std::abs(b)); });
}

void write_csv(std::ostream& out, const ScalarField& f) {
    const GridSpec& s = f.spec();
    out << fmt::format("# {},{},{:.17g},{:.17g},{:.17g}\n", s.nx, s.ny, s.h, s.x0, s.y0);
    std::string line;
    for (int j = 0; j < s.ny; ++j) {
        line.clear();
        for (int i = 0; i < s.nx; ++i) {
            if (i > 0) line += ',';
            line += fmt::format("{:.17g}", f(i, j));
        }
        line += '\n';
        out << line;
    }
}

ScalarField read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#') {
        throw ConfigError("field CSV must start with a '# nx,ny,h,x0,y0' header");
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream header(line.substr(1));
    GridSpec spec;
    if (!(header >> spec.nx >> spec.ny >> spec.h >> spec.x0 >> spec.y0)) {
        throw ConfigError("malformed field CSV header");
    }
    spec.validate();
    std::vector<double> data;
    data.reserve(spec.size());
    for (int j = 0; j < spec.ny; ++j) {
        if (!std::getline(in, line)) {
            throw ConfigError(fmt::format("field CSV ends after {} of {} rows", j, spec.ny));
        }
        std::istringstream row(line);
        std::string cell;
        int count = 0;
        while (std::getline(row, cell, ',')) {
            const auto value = detail::parse_double(cell);
            if (!value) throw ConfigError(fmt::format("bad number '{}' in field CSV row {}", cell, j));
            data.push_back(*value);
            ++count;
        }
        if (count != spec.nx) {
            throw ConfigError(fmt::format("field CSV row {} has {} values, expected {}", j, count, spec.nx));
        }
    }
    return ScalarField(spec, std::move(data));
}

void write_csv_file(const std::string& path, const ScalarField& f) {
    std::ofstream out(path);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", path));
    write_csv(out, f);
}

ScalarField read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path));
    return read_csv(in);
}

}  // namespace ricci
