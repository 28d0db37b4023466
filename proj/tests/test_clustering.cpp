#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "trajmine/clustering.hpp"

using namespace trajmine;

namespace {

std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t n, std::size_t d,
                                               double span) {
    std::uniform_real_distribution<double> u(-span, span);
    std::vector<std::vector<double>> pts(n, std::vector<double>(d));
    for (auto& p : pts)
        for (auto& v : p) v = u(rng);
    return pts;
}

// Partition equality restricted to the given index subset.
bool same_partition_on(const std::vector<int>& a, const std::vector<int>& b,
                       const std::vector<std::size_t>& subset) {
    for (std::size_t ii = 0; ii < subset.size(); ++ii)
        for (std::size_t jj = ii + 1; jj < subset.size(); ++jj) {
            const std::size_t i = subset[ii], j = subset[jj];
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("squared_distance") {
    CHECK(squared_distance({0, 0}, {3, 4}) == doctest::Approx(25.0));
    CHECK(squared_distance({1.5}, {1.5}) == doctest::Approx(0.0));
    CHECK(squared_distance({}, {}) == doctest::Approx(0.0));
}

TEST_CASE("kmeans separates the two-pair example exactly") {
    std::vector<std::vector<double>> pts = {{0, 0}, {0, 1}, {4, 0}, {4, 1}};
    auto r = kmeans(pts, {.k = 2, .restarts = 8, .seed = 5});
    CHECK(r.wcss == doctest::Approx(1.0));
    CHECK(r.labels[0] == r.labels[1]);
    CHECK(r.labels[2] == r.labels[3]);
    CHECK(r.labels[0] != r.labels[2]);
    REQUIRE(r.centroids.size() == 2);
    std::vector<std::vector<double>> cs = r.centroids;
    std::sort(cs.begin(), cs.end());
    CHECK(cs[0][0] == doctest::Approx(0.0));
    CHECK(cs[0][1] == doctest::Approx(0.5));
    CHECK(cs[1][0] == doctest::Approx(4.0));
    CHECK(cs[1][1] == doctest::Approx(0.5));
}

TEST_CASE("kmeans degenerate shapes") {
    std::mt19937_64 rng(2);
    auto pts = random_points(rng, 12, 3, 10.0);

    // k = 1: the centroid is the mean and wcss the total scatter.
    auto r1 = kmeans(pts, {.k = 1, .restarts = 1, .seed = 0});
    std::vector<double> mean(3, 0.0);
    for (const auto& p : pts)
        for (std::size_t j = 0; j < 3; ++j) mean[j] += p[j] / pts.size();
    double scatter = 0.0;
    for (const auto& p : pts) scatter += squared_distance(p, mean);
    for (std::size_t j = 0; j < 3; ++j) CHECK(r1.centroids[0][j] == doctest::Approx(mean[j]));
    CHECK(r1.wcss == doctest::Approx(scatter));

    // k = n: every point is its own centroid.
    auto rn = kmeans(pts, {.k = pts.size(), .restarts = 1, .seed = 0});
    CHECK(rn.wcss == doctest::Approx(0.0));

    // Duplicated coordinates still converge (empty clusters re-seed).
    std::vector<std::vector<double>> dup = {{0, 0}, {0, 0}, {10, 10}, {10, 10}};
    auto rd = kmeans(dup, {.k = 3, .restarts = 4, .seed = 1});
    CHECK(rd.wcss == doctest::Approx(0.0));
}

TEST_CASE("kmeans rejects bad parameters") {
    std::vector<std::vector<double>> pts = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS((void)kmeans({}, {.k = 1}), std::invalid_argument);
    CHECK_THROWS_AS((void)kmeans(pts, {.k = 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)kmeans(pts, {.k = 3}), std::invalid_argument);
    CHECK_THROWS_AS((void)kmeans(pts, {.k = 1, .restarts = 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)kmeans({{0, 0}, {1}}, {.k = 1}), std::invalid_argument);
}

TEST_CASE("kmeans structural invariants on random inputs") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 5 + rng() % 40;
        const std::size_t d = 1 + rng() % 4;
        const std::size_t k = 1 + rng() % std::min<std::size_t>(n, 6);
        auto pts = random_points(rng, n, d, 50.0);
        auto r = kmeans(pts, {.k = k, .restarts = 3, .max_iter = 300, .seed = rng()});

        REQUIRE(r.labels.size() == n);
        REQUIRE(r.centroids.size() == k);
        CHECK(r.n_clusters == k);
        std::set<int> used(r.labels.begin(), r.labels.end());
        CHECK(used.size() == k);
        CHECK(*used.begin() == 0);
        CHECK(*used.rbegin() == static_cast<int>(k) - 1);

        for (std::size_t i = 1; i < r.wcss_history.size(); ++i)
            CHECK(r.wcss_history[i] <= r.wcss_history[i - 1] + 1e-9);
        CHECK(r.wcss == doctest::Approx(r.wcss_history.back()));

        // Converged: each centroid is the mean of its members and each
        // point sits with its nearest centroid.
        double recomputed = 0.0;
        std::vector<std::vector<double>> mean(k, std::vector<double>(d, 0.0));
        std::vector<std::size_t> cnt(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(r.labels[i]);
            ++cnt[c];
            for (std::size_t j = 0; j < d; ++j) mean[c][j] += pts[i][j];
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j)
                CHECK(r.centroids[c][j] == doctest::Approx(mean[c][j] / cnt[c]).epsilon(1e-9));
        for (std::size_t i = 0; i < n; ++i) {
            double own = squared_distance(pts[i], r.centroids[r.labels[i]]);
            recomputed += own;
            for (std::size_t c = 0; c < k; ++c)
                CHECK(own <= squared_distance(pts[i], r.centroids[c]) + 1e-9);
        }
        CHECK(r.wcss == doctest::Approx(recomputed).epsilon(1e-9));
    }
}

TEST_CASE("kmeans is deterministic in the seed") {
    std::mt19937_64 rng(77);
    auto pts = random_points(rng, 30, 2, 20.0);
    auto a = kmeans(pts, {.k = 4, .restarts = 5, .seed = 9});
    auto b = kmeans(pts, {.k = 4, .restarts = 5, .seed = 9});
    CHECK(a.labels == b.labels);
    CHECK(a.wcss == b.wcss);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("kmeans with restarts reaches the exhaustive optimum on small inputs") {
    std::mt19937_64 rng(101);
    int hits = 0;
    const int reps = 30;
    for (int rep = 0; rep < reps; ++rep) {
        const std::size_t n = 4 + rng() % 5;  // 4..8
        const std::size_t k = 2 + rng() % 2;  // 2..3
        auto pts = random_points(rng, n, 2, 10.0);
        auto r = kmeans(pts, {.k = k, .restarts = 20, .max_iter = 200, .seed = rng()});
        const double opt = oracles::kmeans_optimum(pts, k);
        CHECK(r.wcss >= opt - 1e-9);
        if (r.wcss <= opt + 1e-6 * std::max(1.0, opt)) ++hits;
    }
    // Lloyd with 20 restarts occasionally sticks in a local minimum;
    // anything below ~90% would signal a real defect.
    CHECK(hits >= 27);
}

TEST_CASE("dbscan labels the two-blob example") {
    std::vector<std::vector<double>> pts = {
        {0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5},      // blob A
        {10, 10}, {10.5, 10}, {10, 10.5}, {10.5, 10.5},  // blob B
        {50, 50},                                    // lone noise
    };
    auto r = dbscan(pts, {.eps = 1.0, .min_pts = 3});
    CHECK(r.n_clusters == 2);
    for (int i : {1, 2, 3}) CHECK(r.labels[i] == r.labels[0]);
    for (int i : {5, 6, 7}) CHECK(r.labels[i] == r.labels[4]);
    CHECK(r.labels[0] != r.labels[4]);
    CHECK(r.labels[8] == kOutlier);
}

TEST_CASE("dbscan border points go to the first claiming cluster") {
    // Two collinear chains, one shared border point in the middle that
    // is reachable from a core on each side but is not core itself.
    std::vector<std::vector<double>> pts = {{-4}, {-3}, {-2}, {-1}, {0},  // chain A
                                            {5},                          // border
                                            {10}, {11}, {12}, {13}, {14}};  // chain B
    auto r = dbscan(pts, {.eps = 5.0, .min_pts = 4});
    CHECK(r.n_clusters == 2);
    CHECK(r.labels[5] == r.labels[4]);   // claimed during chain A's sweep
    CHECK(r.labels[5] != r.labels[6]);
    auto oracle = oracles::dbscan_reference(pts, 5.0, 4);
    CHECK_FALSE(oracle.core[5]);
    CHECK(oracle.core[4]);
    CHECK(oracle.core[6]);
}

TEST_CASE("dbscan matches the reachability oracle") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 20 + rng() % 60;
        const std::size_t d = 1 + rng() % 5;  // exercises grid and linear paths
        auto pts = random_points(rng, n, d, 3.0);
        std::uniform_real_distribution<double> ueps(0.3, 2.0);
        DbscanParams params{.eps = ueps(rng), .min_pts = 2 + rng() % 5};

        auto r = dbscan(pts, params);
        auto oracle = oracles::dbscan_reference(pts, params.eps, params.min_pts);

        std::vector<std::size_t> cores;
        for (std::size_t i = 0; i < n; ++i) {
            if (oracle.core[i]) {
                cores.push_back(i);
                CHECK(r.labels[i] >= 0);
            } else {
                // Border or noise status is unambiguous even though the
                // border's cluster choice is not.
                CHECK((r.labels[i] >= 0) == (oracle.labels[i] >= 0));
            }
        }
        CHECK(same_partition_on(r.labels, oracle.labels, cores));

        // A clustered border point must sit within eps of a core of its
        // own cluster.
        const double eps2 = params.eps * params.eps;
        for (std::size_t i = 0; i < n; ++i) {
            if (oracle.core[i] || r.labels[i] < 0) continue;
            bool reachable = false;
            for (std::size_t c : cores)
                if (r.labels[c] == r.labels[i] &&
                    oracles::sqdist(pts[i], pts[c]) <= eps2)
                    reachable = true;
            CHECK(reachable);
        }
    }
}

TEST_CASE("dbscan core partition is invariant under input permutation") {
    std::mt19937_64 rng(19);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 40;
        auto pts = random_points(rng, n, 2, 3.0);
        DbscanParams params{.eps = 0.9, .min_pts = 3};
        auto base = dbscan(pts, params);
        auto oracle = oracles::dbscan_reference(pts, params.eps, params.min_pts);

        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::vector<double>> shuffled(n);
        for (std::size_t i = 0; i < n; ++i) shuffled[i] = pts[perm[i]];
        auto moved = dbscan(shuffled, params);

        std::vector<int> moved_in_base_order(n);
        for (std::size_t i = 0; i < n; ++i) moved_in_base_order[perm[i]] = moved.labels[i];
        std::vector<std::size_t> cores;
        for (std::size_t i = 0; i < n; ++i) {
            if (oracle.core[i]) cores.push_back(i);
            // noise/clustered status never depends on scan order
            CHECK((base.labels[i] < 0) == (moved_in_base_order[i] < 0));
        }
        CHECK(same_partition_on(base.labels, moved_in_base_order, cores));
    }
}

TEST_CASE("grid index agrees exactly with the linear scan") {
    // Padding a 3-d problem with a constant fourth coordinate leaves
    // every pairwise distance unchanged but forces the linear path, so
    // the label vectors must match element for element.
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        auto pts = random_points(rng, 60, 3, 2.5);
        std::vector<std::vector<double>> padded;
        for (const auto& p : pts) padded.push_back({p[0], p[1], p[2], 7.0});
        DbscanParams params{.eps = 0.8, .min_pts = 3};
        CHECK(dbscan(pts, params).labels == dbscan(padded, params).labels);
    }
}

TEST_CASE("dbscan validates input") {
    CHECK(dbscan({}, {.eps = 1.0, .min_pts = 1}).labels.empty());
    std::vector<std::vector<double>> pts = {{0}, {1}};
    CHECK_THROWS_AS((void)dbscan(pts, {.eps = 0.0, .min_pts = 1}), std::invalid_argument);
    CHECK_THROWS_AS((void)dbscan(pts, {.eps = 1.0, .min_pts = 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)dbscan({{0}, {1, 2}}, {.eps = 1.0, .min_pts = 1}),
                    std::invalid_argument);
}

TEST_CASE("dbscan_generic runs off a caller-supplied neighbourhood") {
    // 6 nodes on a path graph, neighbourhood = self plus adjacent nodes.
    auto neighbors = [](std::size_t i) {
        std::vector<std::size_t> nb{i};
        if (i > 0) nb.push_back(i - 1);
        if (i < 5) nb.push_back(i + 1);
        std::sort(nb.begin(), nb.end());
        return nb;
    };
    auto r = dbscan_generic(6, neighbors, 3);
    CHECK(r.n_clusters == 1);
    for (int l : r.labels) CHECK(l == 0);

    // min_pts = 4 exceeds every neighbourhood: all noise.
    auto none = dbscan_generic(6, neighbors, 4);
    CHECK(none.n_clusters == 0);
    for (int l : none.labels) CHECK(l == kOutlier);
}
