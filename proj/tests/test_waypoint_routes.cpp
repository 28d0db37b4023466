#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "trajmine/waypoint_routes.hpp"

using namespace trajmine;

namespace {

std::vector<TurningPoint> tps_at(const std::vector<PlanarPoint>& pts) {
    std::vector<TurningPoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        out.push_back({{pts[i].first, pts[i].second, 1000.0, static_cast<std::int64_t>(i)},
                       "F" + std::to_string(i), i + 1});
    return out;
}

bool has_vertex_near(const Polygon2D& poly, PlanarPoint p, double tol = 1e-6) {
    for (const auto& v : poly.vertices)
        if (std::hypot(v.first - p.first, v.second - p.second) <= tol) return true;
    return false;
}

WaypointSequence seq(const std::string& id, std::vector<int> ids) {
    return {id, std::move(ids)};
}

Trajectory traj_through(const std::vector<PlanarPoint>& pts) {
    Trajectory t;
    t.meta.flight_id = "T";
    std::int64_t ts = 0;
    for (const auto& [x, y] : pts) t.points.push_back({x, y, 1000.0, ts += 4});
    return t;
}

Waypoint square(int id, double x0, double y0, double side) {
    Waypoint w;
    w.id = id;
    w.center = {x0 + side / 2, y0 + side / 2};
    w.shape.vertices = {{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}};
    return w;
}

}  // namespace

TEST_CASE("sparse waypoint geometry matches the cylindrical-statistics oracle") {
    // One k-means cluster of four points; every number below was
    // computed independently from the documented formulas.
    auto tps = tps_at({{10300, 5100}, {9800, 4800}, {10150, 5350}, {9750, 5150}});
    auto wps = build_waypoints_sparse(tps, 1, 3);
    REQUIRE(wps.size() == 1);
    const Waypoint& w = wps[0];
    CHECK(w.id == 0);
    CHECK(w.source == WaypointSource::sparse_box);
    CHECK(w.center.first == doctest::Approx(10001.25148188734).epsilon(1e-12));
    CHECK(w.center.second == doctest::Approx(5099.972036340724).epsilon(1e-12));

    REQUIRE(w.shape.vertices.size() == 4);
    CHECK(has_vertex_near(w.shape, {9670.313626090834, 4593.682861326302}));
    CHECK(has_vertex_near(w.shape, {10610.78112861677, 5040.432534090965}));
    CHECK(has_vertex_near(w.shape, {10311.01347188821, 5628.289035992405}));
    CHECK(has_vertex_near(w.shape, {9397.115336503513, 5129.435759403906}));
    for (const auto& tp : tps) CHECK(point_in_polygon({tp.position.x, tp.position.y}, w.shape));
}

TEST_CASE("sparse waypoints apply minimum half-extents to degenerate clusters") {
    auto tps = tps_at({{8000, 6000}, {8000, 6000}, {8000, 6000}});
    auto wps = build_waypoints_sparse(tps, 1, 0);
    REQUIRE(wps.size() == 1);
    CHECK(polygon_area(wps[0].shape) > 0.0);
    CHECK(point_in_polygon({8000, 6000}, wps[0].shape));
    // 250 m radial and 0.5 deg angular half-extents put the far corner
    // roughly 250 m beyond the cluster radially.
    const double r = std::hypot(8000.0, 6000.0);
    double max_r = 0.0;
    for (const auto& v : wps[0].shape.vertices)
        max_r = std::max(max_r, std::hypot(v.first, v.second));
    CHECK(max_r == doctest::Approx(r + 250.0).epsilon(1e-9));
}

TEST_CASE("sparse waypoints clamp the angular half-width") {
    // Same radius, angles fanned across half the circle: the circular
    // deviation is huge but the wedge must stay within pi/3 of the mean.
    std::vector<PlanarPoint> pts;
    for (double th : {-1.5, -0.75, 0.0, 0.75, 1.5})
        pts.push_back({9000.0 * std::cos(th), 9000.0 * std::sin(th)});
    auto wps = build_waypoints_sparse(tps_at(pts), 1, 0);
    REQUIRE(wps.size() == 1);
    for (const auto& v : wps[0].shape.vertices) {
        const double th = std::atan2(v.second, v.first);
        CHECK(std::abs(th) <= std::numbers::pi / 3.0 + 1e-9);
    }
}

TEST_CASE("sparse waypoints split well-separated clusters") {
    std::vector<PlanarPoint> pts;
    for (int i = 0; i < 6; ++i) pts.push_back({20000.0 + 100.0 * i, 100.0 * i});
    for (int i = 0; i < 6; ++i) pts.push_back({-15000.0 + 100.0 * i, 30000.0});
    auto wps = build_waypoints_sparse(tps_at(pts), 2, 11);
    REQUIRE(wps.size() == 2);
    CHECK(wps[0].id != wps[1].id);
    for (const auto& p : pts) {
        int containing = 0;
        for (const auto& w : wps)
            if (point_in_polygon(p, w.shape)) ++containing;
        CHECK(containing >= 1);
    }
    CHECK_THROWS_AS((void)build_waypoints_sparse(tps_at({{1, 1}}), 2, 0), std::invalid_argument);
}

TEST_CASE("dense waypoints hull each dbscan cluster and skip outliers") {
    std::vector<PlanarPoint> pts;
    auto blob = [&pts](double cx, double cy) {
        pts.push_back({cx, cy});
        pts.push_back({cx + 200, cy});
        pts.push_back({cx, cy + 200});
        pts.push_back({cx + 200, cy + 200});
        pts.push_back({cx + 100, cy + 100});
    };
    blob(10000, 10000);
    blob(-20000, 5000);
    blob(0, -30000);
    pts.push_back({50000, 50000});  // stray
    pts.push_back({-50000, -50000});

    auto wps = build_waypoints_dense(tps_at(pts), {.eps = 350.0, .min_pts = 4});
    REQUIRE(wps.size() == 3);
    for (const auto& w : wps) {
        CHECK(w.source == WaypointSource::dense_hull);
        CHECK(polygon_area(w.shape) == doctest::Approx(200.0 * 200.0));
    }
    int strays_covered = 0;
    for (const auto& w : wps) {
        if (point_in_polygon({50000, 50000}, w.shape)) ++strays_covered;
        if (point_in_polygon({-50000, -50000}, w.shape)) ++strays_covered;
    }
    CHECK(strays_covered == 0);

    // A collinear cluster falls back to an inflated rectangle.
    std::vector<PlanarPoint> line;
    for (int i = 0; i < 6; ++i) line.push_back({1000.0 * i, 0.0});
    auto thin = build_waypoints_dense(tps_at(line), {.eps = 1200.0, .min_pts = 3});
    REQUIRE(thin.size() == 1);
    CHECK(polygon_area(thin[0].shape) > 0.0);
    for (const auto& p : line) CHECK(point_in_polygon(p, thin[0].shape));

    CHECK_THROWS_AS((void)build_waypoints_dense(tps_at({{1, 1}}), {.eps = 1.0, .min_pts = 5}),
                    std::invalid_argument);
}

TEST_CASE("trajectory_to_sequence collapses repeats and prefers low ids on overlap") {
    std::vector<Waypoint> wps = {square(1, 5, 5, 10), square(0, 0, 0, 10), square(2, 30, 30, 5)};
    auto t = traj_through({{1, 1},    // w0
                           {2, 2},    // w0 again: collapsed
                           {7, 7},    // w0 and w1 overlap: lowest id, still collapsed
                           {12, 12},  // w1
                           {20, 20},  // nowhere
                           {1, 1}});  // w0, new entry
    auto s = trajectory_to_sequence(t, wps);
    CHECK(s.flight_id == "T");
    CHECK(s.waypoint_ids == std::vector<int>{0, 1, 0});
}

TEST_CASE("filter_sequences trims the final turn id and drops short sequences") {
    std::vector<WaypointSequence> seqs = {
        seq("a", {1, 2, 3, 4, 9}),     // trimming 9 leaves 4: dropped
        seq("b", {1, 2, 3, 4, 5, 9}),  // trimming 9 leaves 5: kept
        seq("c", {1, 2, 3, 9, 5}),     // 9 not final: untouched, kept
        seq("d", {1, 2, 3}),           // short
        seq("e", {}),                  // empty
    };
    auto kept = filter_sequences(seqs, 9);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].flight_id == "b");
    CHECK(kept[0].waypoint_ids == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(kept[1].flight_id == "c");
    CHECK(kept[1].waypoint_ids == std::vector<int>{1, 2, 3, 9, 5});

    auto untrimmed = filter_sequences(seqs, std::nullopt);
    REQUIRE(untrimmed.size() == 3);
    CHECK(untrimmed[0].flight_id == "a");
}

TEST_CASE("lcs_length on known pairs") {
    CHECK(lcs_length({1, 2, 3}, {1, 2, 3}) == 3);
    CHECK(lcs_length({1, 2, 3}, {4, 5, 6}) == 0);
    CHECK(lcs_length({1, 2, 3, 4, 5}, {2, 4, 6}) == 2);
    CHECK(lcs_length({}, {1, 2}) == 0);
    CHECK(lcs_length({}, {}) == 0);
    // the classic ABCBDAB / BDCABA
    CHECK(lcs_length({0, 1, 2, 1, 3, 0, 1}, {1, 3, 2, 0, 1, 0}) == 4);
}

TEST_CASE("lcs_length agrees with the recursive oracle") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t la = rng() % 11, lb = rng() % 11;
        std::vector<int> a(la), b(lb);
        std::string sa, sb;
        for (auto& v : a) {
            v = static_cast<int>(rng() % 6);
            sa.push_back(static_cast<char>('a' + v));
        }
        for (auto& v : b) {
            v = static_cast<int>(rng() % 6);
            sb.push_back(static_cast<char>('a' + v));
        }
        CHECK(lcs_length(a, b) == oracles::lcs_reference(sa, sb));
    }
}

TEST_CASE("sequence_similarity normalizes by the longer sequence") {
    CHECK(sequence_similarity(seq("a", {}), seq("b", {})) == doctest::Approx(1.0));
    CHECK(sequence_similarity(seq("a", {1}), seq("b", {})) == doctest::Approx(0.0));
    CHECK(sequence_similarity(seq("a", {1, 2, 3, 4}), seq("b", {1, 2, 4})) ==
          doctest::Approx(0.75));
    auto x = seq("a", {5, 1, 9, 2}), y = seq("b", {1, 2, 7, 7, 7});
    CHECK(sequence_similarity(x, y) == doctest::Approx(sequence_similarity(y, x)));
    CHECK(sequence_similarity(x, x) == doctest::Approx(1.0));
}

TEST_CASE("cluster_sequences groups families and picks medoid representatives") {
    std::vector<WaypointSequence> seqs;
    // three families with one perturbed member each, plus a loner
    for (int f = 0; f < 3; ++f) {
        const int base = 10 * f;
        for (int m = 0; m < 4; ++m)
            seqs.push_back(seq("r" + std::to_string(f) + std::to_string(m),
                               {base, base + 1, base + 2, base + 3, base + 4, base + 5}));
        seqs.push_back(seq("r" + std::to_string(f) + "x",
                           {base, base + 1, base + 7, base + 3, base + 4, base + 5}));
    }
    seqs.push_back(seq("loner", {100, 101, 102, 103, 104}));

    auto res = cluster_sequences(seqs, 0.6, 3);
    CHECK(res.n_clusters == 3);
    REQUIRE(res.labels.size() == seqs.size());
    for (int f = 0; f < 3; ++f) {
        const int first = res.labels[f * 5];
        CHECK(first >= 0);
        for (int m = 1; m < 5; ++m) CHECK(res.labels[f * 5 + m] == first);
        if (f > 0) CHECK(res.labels[f * 5] != res.labels[0]);
    }
    CHECK(res.labels.back() == kOutlier);

    // Each representative is a perfect-match member, not the perturbed
    // one, and ties go to the lowest flight_id.
    REQUIRE(res.representatives.size() == 3);
    for (const auto& rep : res.representatives) {
        CHECK(rep.flight_id.size() == 3);
        CHECK(rep.flight_id.back() == '0');  // r00, r10, r20
    }
}

TEST_CASE("cluster_sequences medoid tie breaks to the lowest flight id") {
    std::vector<WaypointSequence> seqs = {seq("f1", {1, 2, 3, 4, 5}), seq("f0", {1, 2, 3, 4, 5})};
    auto res = cluster_sequences(seqs, 0.6, 2);
    REQUIRE(res.n_clusters == 1);
    REQUIRE(res.representatives.size() == 1);
    CHECK(res.representatives[0].flight_id == "f0");

    CHECK(cluster_sequences({}, 0.6, 2).n_clusters == 0);
}

TEST_CASE("waypoint json round trip is byte identical") {
    auto tps = tps_at({{10300, 5100}, {9800, 4800}, {10150, 5350}, {9750, 5150}, {-20000, 7000},
                       {-20100, 7100}, {-19900, 6900}, {-20050, 7200}});
    auto wps = build_waypoints_sparse(tps, 2, 9);
    const std::string text = waypoints_to_json(wps, 1, "0123456789abcdef");
    auto parsed = waypoints_from_json(text);
    REQUIRE(parsed.size() == wps.size());
    CHECK(waypoints_to_json(parsed, 1, "0123456789abcdef") == text);

    CHECK_THROWS_AS((void)waypoints_from_json("{"), std::runtime_error);
    CHECK_THROWS_AS((void)waypoints_from_json("{}"), std::runtime_error);
    CHECK_THROWS_AS((void)waypoints_from_json(
                        R"({"waypoints":[{"id":0,"source":"dense_hull","center":[0,0],)"
                        R"("vertices":[[0,0],[1,0]]}]})"),
                    std::runtime_error);
    CHECK_THROWS_AS((void)waypoints_from_json(
                        R"({"waypoints":[{"id":0,"source":"round","center":[0,0],)"
                        R"("vertices":[[0,0],[1,0],[1,1]]}]})"),
                    std::runtime_error);
}

TEST_CASE("sequence csv round trip is byte identical") {
    std::vector<WaypointSequence> seqs = {seq("SYN0001", {3, 1, 4, 1, 5}), seq("SYN0002", {}),
                                          seq("SYN0003", {-1, 7})};
    const std::string text = sequences_to_csv(seqs);
    auto parsed = sequences_from_csv(text);
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[0].waypoint_ids == std::vector<int>{3, 1, 4, 1, 5});
    CHECK(parsed[1].waypoint_ids.empty());
    CHECK(parsed[2].waypoint_ids == std::vector<int>{-1, 7});
    CHECK(sequences_to_csv(parsed) == text);

    CHECK_THROWS_AS((void)sequences_from_csv("wrong,header\n"), std::runtime_error);
    CHECK_THROWS_AS((void)sequences_from_csv("flight_id,wp_ids\nrow-without-comma\n"),
                    std::runtime_error);
    CHECK_THROWS_AS((void)sequences_from_csv("flight_id,wp_ids\nf,1|x|3\n"), std::runtime_error);
    CHECK(sequences_from_csv("flight_id,wp_ids\n").empty());
}
