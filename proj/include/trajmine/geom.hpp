#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "trajmine/trajdata.hpp"

namespace trajmine {

using PlanarPoint = std::pair<double, double>;

// Heading samples along a trajectory, defined at interior points
// l = 2..m-1 via the symmetric three-point stencil. `filtered` is
// empty until lowpass() has run.
struct HeadingSeries {
    std::vector<double> raw;
    std::vector<double> filtered;
    double alpha = 1.0;
};

struct TurningConfig {
    double alpha = 0.4;
    double psi_c = 0.025;
};

struct TurningPoint {
    TrackPoint position;
    std::string flight_id;
    std::size_t index = 0;  // 1-based source point index
};

struct Polygon2D {
    std::vector<PlanarPoint> vertices;
};

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

// Shortest signed angular distance a - b, in (-pi, pi].
double angle_diff(double a, double b);

// Removes 2*pi jumps so consecutive samples differ by less than pi.
std::vector<double> unwrap_angles(const std::vector<double>& wrapped);

// psi_l = atan2(y_{l+1} - y_{l-1}, x_{l+1} - x_{l-1}) for l = 2..m-1.
// Coincident stencil neighbours carry the previous heading forward
// (0 when there is none). Requires m >= 3.
HeadingSeries estimate_headings(const Trajectory& traj);

// First-order low-pass on the unwrapped heading sequence, re-wrapped
// to (-pi, pi] on output. alpha must be in (0, 1].
HeadingSeries lowpass(const HeadingSeries& series, double alpha);

// The same recurrence on an already-unwrapped sequence, without the
// final re-wrap. Exposed for the envelope property and for feature
// channels that need the unwrapped signal.
std::vector<double> lowpass_unwrapped(const std::vector<double>& unwrapped, double alpha);

// Turning points of one trajectory: the first track point, plus every
// index where the filtered heading moves by more than cfg.psi_c between
// consecutive samples. Maximal runs of consecutive exceedances collapse
// to their middle element (earlier element on ties).
std::vector<TurningPoint> detect_turning_points(const Trajectory& traj, const TurningConfig& cfg);

// Convex hull (counter-clockwise, no collinear vertices). Throws when
// fewer than 3 distinct points or all points collinear.
Polygon2D convex_hull(const std::vector<PlanarPoint>& points);

// Boundary counts as inside.
bool point_in_polygon(const PlanarPoint& p, const Polygon2D& poly);

double polygon_area(const Polygon2D& poly);

}  // namespace trajmine
