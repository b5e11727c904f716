#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ricci {

/**
 * Uniform Cartesian node grid.
 *
 * Node (i, j) sits at (x0 + i*h, y0 + j*h). Storage order everywhere is
 * row-major by j then i, i.e. index = j*nx + i.
 */
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;

    /// Throws InvalidArgument unless nx, ny >= 8, h > 0 and the origin is finite.
    void validate() const;

    /// Grid with node floor(nx/2), floor(ny/2) placed exactly at (cx, cy).
    static GridSpec centered(int nx, int ny, double h, double cx = 0.0, double cy = 0.0);

    double x(int i) const { return x0 + i * h; }
    double y(int j) const { return y0 + j * h; }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
    }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

    /// Index of the node at exactly (px, py), if there is one.
    std::optional<std::pair<int, int>> node_at(double px, double py) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/**
 * Node-sampled scalar data on a GridSpec.
 *
 * Values are finite on construction. `undefined_ring` records how many outer
 * node rings carry placeholder zeros instead of real values, which happens
 * when a stencil is applied under DirichletFrozen boundaries. Window queries
 * refuse margins that would read those placeholders.
 */
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& spec, double fill = 0.0);
    ScalarField(const GridSpec& spec, std::vector<double> data, int undefined_ring = 0);

    static ScalarField from_function(const GridSpec& spec, const std::function<double(double, double)>& fn);

    const GridSpec& spec() const { return spec_; }
    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    double operator()(int i, int j) const { return data_[spec_.index(i, j)]; }
    double& operator()(int i, int j) { return data_[spec_.index(i, j)]; }

    int undefined_ring() const { return undefined_ring_; }
    void set_undefined_ring(int ring) { undefined_ring_ = ring; }

    /// Throws NumericalError naming `what` if any value is NaN or infinite.
    void require_finite(const char* what) const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    GridSpec spec_;
    std::vector<double> data_;
    int undefined_ring_ = 0;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Throws InvalidArgument unless both fields live on the same grid.
void require_same_spec(const ScalarField& a, const ScalarField& b);

struct VectorField {
    ScalarField x;
    ScalarField y;
};

/// Symmetric 2x2 tensor per node; the off-diagonal is stored once.
struct SymTensorField {
    ScalarField xx;
    ScalarField xy;
    ScalarField yy;
};

enum class BoundaryKind { DirichletFrozen, Periodic, LinearExtrapolate };

/**
 * How stencils treat the outermost node ring.
 *
 * - Periodic: indices wrap. Requires even nx, ny.
 * - LinearExtrapolate: ghost nodes are f[-1] = 2 f[0] - f[1].
 * - DirichletFrozen: the ring is held fixed at stored values during time
 *   stepping; derivative fields are only defined on the interior and are
 *   written as 0 on the ring.
 */
class BoundaryCondition {
public:
    static BoundaryCondition periodic() { return BoundaryCondition(BoundaryKind::Periodic); }
    static BoundaryCondition extrapolate() { return BoundaryCondition(BoundaryKind::LinearExtrapolate); }
    /// Freeze the ring at the ring values of `values`.
    static BoundaryCondition frozen(ScalarField values);
    /// Kind only, without frozen values. Enough for stencils, which never read them.
    static BoundaryCondition stencil(BoundaryKind kind) { return BoundaryCondition(kind); }

    BoundaryKind kind() const { return kind_; }
    /// Frozen values (DirichletFrozen only).
    const ScalarField& frozen_values() const;

    /// Throws InvalidArgument if this condition cannot be used on `spec`.
    void check_compatible(const GridSpec& spec) const;

private:
    explicit BoundaryCondition(BoundaryKind kind) : kind_(kind) {}
    BoundaryKind kind_;
    std::optional<ScalarField> frozen_;
};

std::string to_string(BoundaryKind kind);
BoundaryKind parse_boundary_kind(const std::string& text);

/// 5-point Laplacian.
ScalarField laplacian(const ScalarField& f, const BoundaryCondition& bc);
/// Central first differences.
VectorField gradient(const ScalarField& f, const BoundaryCondition& bc);
/// Second differences; the cross term uses the 4-corner stencil.
SymTensorField hessian(const ScalarField& f, const BoundaryCondition& bc);

/// Max / min over nodes at least `margin` nodes away from the grid edge.
double sup_value(const ScalarField& f, int margin);
double inf_value(const ScalarField& f, int margin);
double sup_abs(const ScalarField& f, int margin);

/// CSV form: a `# nx,ny,h,x0,y0` header line carrying those five values, then one line per j.
void write_csv(std::ostream& out, const ScalarField& f);
ScalarField read_csv(std::istream& in);
void write_csv_file(const std::string& path, const ScalarField& f);
ScalarField read_csv_file(const std::string& path);

}  // namespace ricci
