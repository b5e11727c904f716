#include "ricci/geometry.hpp"

#include "ricci/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>

namespace ricci {

DistanceField geodesic_distance(const ConformalMetric& m, std::pair<int, int> source) {
    const GridSpec& s = m.spec();
    const auto [si, sj] = source;
    if (si < 0 || sj < 0 || si >= s.nx || sj >= s.ny) {
        throw InvalidArgument(fmt::format("source node ({}, {}) lies outside the grid", si, sj));
    }
    // e^{(u_a + u_b)/2} = e^{u_a/2} e^{u_b/2}
    std::vector<double> half_factor(s.size());
    const auto u = m.u().data();
    for (std::size_t k = 0; k < u.size(); ++k) half_factor[k] = std::exp(0.5 * u[k]);

    constexpr int kDi[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    constexpr int kDj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const double diag = std::numbers::sqrt2 * s.h;

    std::vector<double> dist(s.size(), std::numeric_limits<double>::infinity());
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    const std::size_t start = s.index(si, sj);
    dist[start] = 0.0;
    queue.emplace(0.0, start);
    while (!queue.empty()) {
        const auto [d, node] = queue.top();
        queue.pop();
        if (d > dist[node]) continue;
        const int i = static_cast<int>(node % static_cast<std::size_t>(s.nx));
        const int j = static_cast<int>(node / static_cast<std::size_t>(s.nx));
        for (int n = 0; n < 8; ++n) {
            const int ni = i + kDi[n];
            const int nj = j + kDj[n];
            if (ni < 0 || nj < 0 || ni >= s.nx || nj >= s.ny) continue;
            const std::size_t other = s.index(ni, nj);
            const double length = n < 4 ? s.h : diag;
            const double candidate = d + length * half_factor[node] * half_factor[other];
            if (candidate < dist[other]) {
                dist[other] = candidate;
                queue.emplace(candidate, other);
            }
        }
    }
    return DistanceField{source, ScalarField(s, std::move(dist))};
}

namespace {

struct Point {
    double x;
    double y;
};

// Bilinear interpolation of u at a point inside cell (i, j).
double interpolate(const ScalarField& u, int i, int j, Point p) {
    const GridSpec& s = u.spec();
    const double a = (p.x - s.x(i)) / s.h;
    const double b = (p.y - s.y(j)) / s.h;
    return (1 - a) * (1 - b) * u(i, j) + a * (1 - b) * u(i + 1, j) + (1 - a) * b * u(i, j + 1) +
           a * b * u(i + 1, j + 1);
}

}  // namespace

double ball_boundary_length(const ConformalMetric& m, const DistanceField& dist, double r) {
    const GridSpec& s = m.spec();
    const ScalarField& d = dist.distance;
    require_same_spec(d, m.u());
    if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
    for (int j = 0; j < s.ny; ++j) {
        for (int i = 0; i < s.nx; ++i) {
            const bool ring = i == 0 || j == 0 || i == s.nx - 1 || j == s.ny - 1;
            if (ring && d(i, j) <= r) {
                throw InvalidArgument(fmt::format("level set at r = {} reaches the grid boundary", r));
            }
        }
    }

    double total = 0.0;
    auto add_segment = [&](int i, int j, Point p, Point q) {
        const Point mid{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
        total += std::hypot(q.x - p.x, q.y - p.y) * std::exp(interpolate(m.u(), i, j, mid));
    };

    for (int j = 0; j + 1 < s.ny; ++j) {
        for (int i = 0; i + 1 < s.nx; ++i) {
            const double d00 = d(i, j), d10 = d(i + 1, j), d11 = d(i + 1, j + 1), d01 = d(i, j + 1);
            const bool in00 = d00 < r, in10 = d10 < r, in11 = d11 < r, in01 = d01 < r;
            const int crossings = (in00 != in10) + (in10 != in11) + (in01 != in11) + (in00 != in01);
            if (crossings == 0) continue;

            const double x0 = s.x(i), x1 = s.x(i + 1), y0 = s.y(j), y1 = s.y(j + 1);
            auto lerp = [r](double a, double b) { return (r - a) / (b - a); };
            const Point bottom{x0 + lerp(d00, d10) * s.h, y0};
            const Point right{x1, y0 + lerp(d10, d11) * s.h};
            const Point top{x0 + lerp(d01, d11) * s.h, y1};
            const Point left{x0, y0 + lerp(d00, d01) * s.h};

            if (crossings == 2) {
                Point ends[2];
                int k = 0;
                if (in00 != in10) ends[k++] = bottom;
                if (in10 != in11) ends[k++] = right;
                if (in01 != in11) ends[k++] = top;
                if (in00 != in01) ends[k++] = left;
                add_segment(i, j, ends[0], ends[1]);
                continue;
            }
            // Saddle: decide by the cell-centre average which diagonal pair is connected.
            const bool centre_in = 0.25 * (d00 + d10 + d11 + d01) < r;
            if (centre_in == in00) {
                add_segment(i, j, bottom, right);
                add_segment(i, j, top, left);
            } else {
                add_segment(i, j, left, bottom);
                add_segment(i, j, right, top);
            }
        }
    }
    return total;
}

ApertureEstimate aperture_estimate(const ConformalMetric& m, const std::vector<double>& radii,
                                   std::pair<int, int> source) {
    if (radii.size() < 3) throw InvalidArgument("aperture fit needs at least three radii");
    const DistanceField dist = geodesic_distance(m, source);
    ApertureEstimate estimate;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double r : radii) {
        const double length = ball_boundary_length(m, dist, r);
        const double circle = 2.0 * std::numbers::pi * r;
        estimate.rows.push_back(ApertureRow{r, length, length / circle});
        sx += circle;
        sy += length;
        sxx += circle * circle;
        sxy += circle * length;
    }
    const double n = static_cast<double>(radii.size());
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0)) throw InvalidArgument("aperture fit needs distinct radii");
    estimate.slope = (n * sxy - sx * sy) / denom;
    return estimate;
}

}  // namespace ricci
