#pragma once

#include "ricci/conformal.hpp"
#include "ricci/grid.hpp"

#include <utility>
#include <vector>

namespace ricci {

/// Geodesic distance in g = e^{2u} g_E from one source node.
struct DistanceField {
    std::pair<int, int> source;
    ScalarField distance;
};

/**
 * Dijkstra on the 8-neighbour node graph. Edge weight is the Euclidean edge
 * length times e^{(u_a + u_b)/2}. On flat data this overestimates the true
 * distance by at most ~8% off-axis.
 */
DistanceField geodesic_distance(const ConformalMetric& m, std::pair<int, int> source);

/// g-length of the level set {distance = r}, extracted by marching squares.
/// Throws InvalidArgument when the level set reaches the outer node ring.
double ball_boundary_length(const ConformalMetric& m, const DistanceField& dist, double r);

struct ApertureRow {
    double radius = 0.0;
    double length = 0.0;
    /// length / (2π radius).
    double ratio = 0.0;
};

struct ApertureEstimate {
    /// Least-squares slope of L(∂B_r) against 2πr.
    double slope = 0.0;
    std::vector<ApertureRow> rows;
};

/// Needs at least three radii, all level sets inside the grid.
ApertureEstimate aperture_estimate(const ConformalMetric& m, const std::vector<double>& radii,
                                   std::pair<int, int> source);

}  // namespace ricci
