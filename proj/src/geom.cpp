#include "trajmine/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trajmine {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const PlanarPoint& o, const PlanarPoint& a, const PlanarPoint& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
}

}  // namespace

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    if (a > kPi) a -= kTwoPi;
    return a;
}

double angle_diff(double a, double b) {
    return wrap_angle(a - b);
}

std::vector<double> unwrap_angles(const std::vector<double>& wrapped) {
    std::vector<double> out;
    out.reserve(wrapped.size());
    double offset = 0.0;
    for (std::size_t i = 0; i < wrapped.size(); ++i) {
        if (i > 0) {
            double step = wrapped[i] - wrapped[i - 1];
            if (step > kPi) offset -= kTwoPi;
            else if (step <= -kPi) offset += kTwoPi;
        }
        out.push_back(wrapped[i] + offset);
    }
    return out;
}

HeadingSeries estimate_headings(const Trajectory& traj) {
    const auto& pts = traj.points;
    const std::size_t m = pts.size();
    if (m < 3) throw std::invalid_argument("estimate_headings: need at least 3 points");
    HeadingSeries series;
    series.raw.reserve(m - 2);
    double prev = 0.0;
    for (std::size_t l = 1; l + 1 < m; ++l) {
        const double dx = pts[l + 1].x - pts[l - 1].x;
        const double dy = pts[l + 1].y - pts[l - 1].y;
        double psi = (dx == 0.0 && dy == 0.0) ? prev : std::atan2(dy, dx);
        if (psi <= -kPi) psi = kPi;  // atan2 returns -pi for (-x, -0); keep (-pi, pi]
        series.raw.push_back(psi);
        prev = psi;
    }
    return series;
}

std::vector<double> lowpass_unwrapped(const std::vector<double>& unwrapped, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0)
        throw std::invalid_argument("lowpass: alpha must be in (0, 1]");
    if (unwrapped.empty()) throw std::invalid_argument("lowpass: empty input");
    std::vector<double> out;
    out.reserve(unwrapped.size());
    out.push_back(unwrapped.front());
    for (std::size_t i = 1; i < unwrapped.size(); ++i)
        out.push_back(alpha * unwrapped[i] + (1.0 - alpha) * out.back());
    return out;
}

HeadingSeries lowpass(const HeadingSeries& series, double alpha) {
    HeadingSeries out = series;
    out.alpha = alpha;
    out.filtered = lowpass_unwrapped(unwrap_angles(series.raw), alpha);
    for (double& v : out.filtered) v = wrap_angle(v);
    return out;
}

std::vector<TurningPoint> detect_turning_points(const Trajectory& traj,
                                                const TurningConfig& cfg) {
    const HeadingSeries series = lowpass(estimate_headings(traj), cfg.alpha);
    const auto& filt = series.filtered;

    // flagged[i] marks source index i+3: the later index of each
    // consecutive filtered-heading pair whose wrapped difference
    // exceeds the threshold.
    std::vector<std::size_t> flagged;
    for (std::size_t i = 1; i < filt.size(); ++i)
        if (std::abs(angle_diff(filt[i], filt[i - 1])) > cfg.psi_c)
            flagged.push_back(i + 2);  // source index, 1-based

    std::vector<TurningPoint> out;
    auto emit = [&](std::size_t index) {
        out.push_back({traj.points[index - 1], traj.meta.flight_id, index});
    };
    emit(1);

    // Collapse each maximal run of consecutive indices to its middle
    // element, earlier on ties.
    std::size_t i = 0;
    while (i < flagged.size()) {
        std::size_t j = i;
        while (j + 1 < flagged.size() && flagged[j + 1] == flagged[j] + 1) ++j;
        emit(flagged[i + (j - i) / 2]);
        i = j + 1;
    }
    return out;
}

Polygon2D convex_hull(const std::vector<PlanarPoint>& points) {
    std::vector<PlanarPoint> p = points;
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) throw std::invalid_argument("convex_hull: fewer than 3 distinct points");

    const std::size_t n = p.size();
    std::vector<PlanarPoint> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw std::invalid_argument("convex_hull: all points collinear");
    return Polygon2D{std::move(hull)};
}

namespace {

bool on_segment(const PlanarPoint& p, const PlanarPoint& a, const PlanarPoint& b) {
    const double ab_x = b.first - a.first;
    const double ab_y = b.second - a.second;
    const double cr = ab_x * (p.second - a.second) - ab_y * (p.first - a.first);
    const double len = std::hypot(ab_x, ab_y);
    if (len == 0.0) return p == a;
    if (std::abs(cr) > 1e-9 * len) return false;
    const double dot = (p.first - a.first) * ab_x + (p.second - a.second) * ab_y;
    return dot >= 0.0 && dot <= len * len;
}

}  // namespace

bool point_in_polygon(const PlanarPoint& p, const Polygon2D& poly) {
    const auto& v = poly.vertices;
    if (v.size() < 3) throw std::invalid_argument("point_in_polygon: degenerate polygon");
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if (on_segment(p, v[j], v[i])) return true;
        const bool spans = (v[i].second > p.second) != (v[j].second > p.second);
        if (spans) {
            const double x_at = v[j].first + (p.second - v[j].second) /
                                                 (v[i].second - v[j].second) *
                                                 (v[i].first - v[j].first);
            if (p.first < x_at) inside = !inside;
        }
    }
    return inside;
}

double polygon_area(const Polygon2D& poly) {
    const auto& v = poly.vertices;
    if (v.size() < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
        s += v[j].first * v[i].second - v[i].first * v[j].second;
    return std::abs(s) * 0.5;
}

}  // namespace trajmine
