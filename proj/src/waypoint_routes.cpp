#include "trajmine/waypoint_routes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trajmine {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMinHalfR = 250.0;       // meters
constexpr double kMinHalfTheta = 0.5 * kDeg;
constexpr double kMaxHalfTheta = std::numbers::pi / 3.0;
constexpr double kDegenerateHalfWidth = 50.0;  // meters, for collinear hulls

const char* source_to_string(WaypointSource s) {
    return s == WaypointSource::sparse_box ? "sparse_box" : "dense_hull";
}

WaypointSource source_from_string(const std::string& s) {
    if (s == "sparse_box") return WaypointSource::sparse_box;
    if (s == "dense_hull") return WaypointSource::dense_hull;
    throw std::runtime_error("unknown waypoint source: " + s);
}

PlanarPoint from_polar(double r, double theta) {
    return {r * std::cos(theta), r * std::sin(theta)};
}

// Hull of a near-collinear or tiny cluster: a thin rectangle around the
// principal segment, so every waypoint keeps nonzero area.
Polygon2D inflated_segment(const std::vector<PlanarPoint>& pts) {
    PlanarPoint a = pts.front(), b = pts.front();
    double best = -1.0;
    for (const auto& p : pts)
        for (const auto& q : pts) {
            const double d = std::hypot(p.first - q.first, p.second - q.second);
            if (d > best) {
                best = d;
                a = p;
                b = q;
            }
        }
    double ux = b.first - a.first, uy = b.second - a.second;
    const double len = std::hypot(ux, uy);
    if (len == 0.0) {
        ux = 1.0;
        uy = 0.0;
    } else {
        ux /= len;
        uy /= len;
    }
    const double w = kDegenerateHalfWidth;
    // extend endpoints too so a single point still gets a square
    const double ex = ux * w, ey = uy * w;
    const double nx = -uy * w, ny = ux * w;
    return Polygon2D{{{a.first - ex + nx, a.second - ey + ny},
                      {a.first - ex - nx, a.second - ey - ny},
                      {b.first + ex - nx, b.second + ey - ny},
                      {b.first + ex + nx, b.second + ey + ny}}};
}

}  // namespace

std::vector<Waypoint> build_waypoints_sparse(const std::vector<TurningPoint>& tps, std::size_t k,
                                             std::uint64_t seed) {
    if (tps.size() < k)
        throw std::invalid_argument("build_waypoints_sparse: fewer turning points than k");
    std::vector<std::vector<double>> pts;
    pts.reserve(tps.size());
    for (const auto& tp : tps) pts.push_back({tp.position.x, tp.position.y});

    KmeansParams params;
    params.k = k;
    params.restarts = 8;
    params.seed = seed;
    const ClusterResult res = kmeans(pts, params);

    std::vector<Waypoint> out;
    for (std::size_t c = 0; c < k; ++c) {
        double r_sum = 0.0, cos_sum = 0.0, sin_sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (static_cast<std::size_t>(res.labels[i]) != c) continue;
            const double r = std::hypot(pts[i][0], pts[i][1]);
            const double th = std::atan2(pts[i][1], pts[i][0]);
            r_sum += r;
            cos_sum += std::cos(th);
            sin_sum += std::sin(th);
            ++n;
        }
        if (n == 0) continue;
        const double r_m = r_sum / static_cast<double>(n);
        const double theta_m = std::atan2(sin_sum / n, cos_sum / n);

        double var_r = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (static_cast<std::size_t>(res.labels[i]) != c) continue;
            const double r = std::hypot(pts[i][0], pts[i][1]);
            var_r += (r - r_m) * (r - r_m);
        }
        const double std_r = std::sqrt(var_r / static_cast<double>(n));
        // circular standard deviation from the mean resultant length
        const double rbar =
            std::min(1.0, std::hypot(cos_sum / n, sin_sum / n));
        const double std_theta = rbar > 0.0 ? std::sqrt(-2.0 * std::log(rbar))
                                            : std::numbers::pi / 2.0;

        const double half_r = std::max(2.0 * std_r, kMinHalfR);
        const double half_theta =
            std::min(std::max(2.0 * std_theta, kMinHalfTheta), kMaxHalfTheta);

        const PlanarPoint center = from_polar(r_m, theta_m);
        const double r_lo = std::max(0.0, r_m - half_r);
        std::vector<PlanarPoint> corners = {
            from_polar(r_lo, theta_m - half_theta),
            from_polar(r_m + half_r, theta_m - half_theta),
            from_polar(r_m + half_r, theta_m + half_theta),
            from_polar(r_lo, theta_m + half_theta),
        };
        // the hull includes the center so wide angular spans cannot
        // push it outside the straight-edged quadrilateral
        corners.push_back(center);
        Waypoint wp;
        wp.id = static_cast<int>(c);
        wp.center = center;
        wp.source = WaypointSource::sparse_box;
        try {
            wp.shape = convex_hull(corners);
        } catch (const std::invalid_argument&) {
            wp.shape = inflated_segment(corners);
        }
        out.push_back(std::move(wp));
    }
    return out;
}

std::vector<Waypoint> build_waypoints_dense(const std::vector<TurningPoint>& tps,
                                            const DbscanParams& params) {
    if (tps.size() < params.min_pts)
        throw std::invalid_argument("build_waypoints_dense: fewer turning points than min_pts");
    std::vector<std::vector<double>> pts;
    pts.reserve(tps.size());
    for (const auto& tp : tps) pts.push_back({tp.position.x, tp.position.y});

    const ClusterResult res = dbscan(pts, params);
    std::vector<Waypoint> out;
    for (std::size_t c = 0; c < res.n_clusters; ++c) {
        std::vector<PlanarPoint> members;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (static_cast<std::size_t>(res.labels[i]) == c)
                members.emplace_back(pts[i][0], pts[i][1]);
        Waypoint wp;
        wp.id = static_cast<int>(c);
        wp.source = WaypointSource::dense_hull;
        try {
            wp.shape = convex_hull(members);
        } catch (const std::invalid_argument&) {
            wp.shape = inflated_segment(members);
        }
        double cx = 0.0, cy = 0.0;
        for (const auto& m : members) {
            cx += m.first;
            cy += m.second;
        }
        wp.center = {cx / static_cast<double>(members.size()),
                     cy / static_cast<double>(members.size())};
        out.push_back(std::move(wp));
    }
    return out;
}

WaypointSequence trajectory_to_sequence(const Trajectory& traj,
                                        const std::vector<Waypoint>& waypoints) {
    // sorted by id so overlap resolution picks the lowest id first
    std::vector<const Waypoint*> by_id;
    by_id.reserve(waypoints.size());
    for (const auto& wp : waypoints) by_id.push_back(&wp);
    std::sort(by_id.begin(), by_id.end(),
              [](const Waypoint* a, const Waypoint* b) { return a->id < b->id; });

    WaypointSequence seq;
    seq.flight_id = traj.meta.flight_id;
    for (const auto& p : traj.points) {
        const PlanarPoint xy{p.x, p.y};
        for (const Waypoint* wp : by_id) {
            if (!point_in_polygon(xy, wp->shape)) continue;
            if (seq.waypoint_ids.empty() || seq.waypoint_ids.back() != wp->id)
                seq.waypoint_ids.push_back(wp->id);
            break;
        }
    }
    return seq;
}

std::vector<WaypointSequence> filter_sequences(const std::vector<WaypointSequence>& seqs,
                                               std::optional<int> final_turn_wp) {
    std::vector<WaypointSequence> out;
    for (const auto& s : seqs) {
        WaypointSequence t = s;
        if (final_turn_wp && !t.waypoint_ids.empty() && t.waypoint_ids.back() == *final_turn_wp)
            t.waypoint_ids.pop_back();
        if (t.waypoint_ids.size() > 4) out.push_back(std::move(t));
    }
    return out;
}

std::size_t lcs_length(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double sequence_similarity(const WaypointSequence& a, const WaypointSequence& b) {
    const std::size_t longest = std::max(a.waypoint_ids.size(), b.waypoint_ids.size());
    if (longest == 0) return 1.0;
    return static_cast<double>(lcs_length(a.waypoint_ids, b.waypoint_ids)) /
           static_cast<double>(longest);
}

SequenceClusterResult cluster_sequences(const std::vector<WaypointSequence>& seqs,
                                        double sim_threshold, std::size_t min_cluster) {
    const std::size_t n = seqs.size();
    SequenceClusterResult result;
    if (n == 0) return result;

    std::vector<double> sim(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sim[i * n + j] = sim[j * n + i] = sequence_similarity(seqs[i], seqs[j]);

    auto neighbors = [&sim, sim_threshold, n](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j)
            if (sim[i * n + j] >= sim_threshold) out.push_back(j);
        return out;
    };
    const ClusterResult clusters = dbscan_generic(n, neighbors, min_cluster);
    result.labels = clusters.labels;
    result.n_clusters = clusters.n_clusters;

    for (std::size_t c = 0; c < clusters.n_clusters; ++c) {
        double best_total = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<std::size_t>(clusters.labels[i]) != c) continue;
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (static_cast<std::size_t>(clusters.labels[j]) == c) total += sim[i * n + j];
            if (total > best_total ||
                (total == best_total && seqs[i].flight_id < seqs[best_i].flight_id)) {
                best_total = total;
                best_i = i;
            }
        }
        result.representatives.push_back(seqs[best_i]);
    }
    return result;
}

std::string waypoints_to_json(const std::vector<Waypoint>& waypoints, int schema_version,
                              const std::string& config_fingerprint) {
    json doc;
    doc["schema_version"] = schema_version;
    doc["config_fingerprint"] = config_fingerprint;
    json arr = json::array();
    for (const auto& wp : waypoints) {
        json w;
        w["id"] = wp.id;
        w["source"] = source_to_string(wp.source);
        w["center"] = {wp.center.first, wp.center.second};
        json verts = json::array();
        for (const auto& v : wp.shape.vertices) verts.push_back({v.first, v.second});
        w["vertices"] = std::move(verts);
        arr.push_back(std::move(w));
    }
    doc["waypoints"] = std::move(arr);
    return doc.dump(2) + "\n";
}

std::vector<Waypoint> waypoints_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad waypoint json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("waypoints"))
        throw std::runtime_error("bad waypoint json: missing waypoints array");
    std::vector<Waypoint> out;
    try {
        for (const auto& w : doc.at("waypoints")) {
            Waypoint wp;
            wp.id = w.at("id").get<int>();
            wp.source = source_from_string(w.at("source").get<std::string>());
            wp.center = {w.at("center").at(0).get<double>(), w.at("center").at(1).get<double>()};
            for (const auto& v : w.at("vertices"))
                wp.shape.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
            if (wp.shape.vertices.size() < 3)
                throw std::runtime_error("waypoint " + std::to_string(wp.id) +
                                         " has fewer than 3 vertices");
            out.push_back(std::move(wp));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad waypoint json: ") + e.what());
    }
    return out;
}

std::string sequences_to_csv(const std::vector<WaypointSequence>& seqs) {
    std::ostringstream out;
    out << "flight_id,wp_ids\n";
    for (const auto& s : seqs) {
        out << s.flight_id << ',';
        for (std::size_t i = 0; i < s.waypoint_ids.size(); ++i) {
            if (i > 0) out << '|';
            out << s.waypoint_ids[i];
        }
        out << '\n';
    }
    return out.str();
}

std::vector<WaypointSequence> sequences_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) return {};
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "flight_id,wp_ids")
        throw std::runtime_error("bad sequence csv header: " + line);
    std::vector<WaypointSequence> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("sequence csv line " + std::to_string(lineno) +
                                     ": expected 2 fields");
        WaypointSequence s;
        s.flight_id = line.substr(0, comma);
        std::string ids = line.substr(comma + 1);
        std::size_t pos = 0;
        while (pos < ids.size()) {
            auto bar = ids.find('|', pos);
            const std::string tok =
                ids.substr(pos, bar == std::string::npos ? bar : bar - pos);
            pos = bar == std::string::npos ? ids.size() : bar + 1;
            int v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size())
                throw std::runtime_error("sequence csv line " + std::to_string(lineno) +
                                         ": bad waypoint id: " + tok);
            s.waypoint_ids.push_back(v);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace trajmine
