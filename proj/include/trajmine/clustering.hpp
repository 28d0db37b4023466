#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace trajmine {

// Label assigned to points that join no cluster.
inline constexpr int kOutlier = -1;

struct KmeansParams {
    std::size_t k = 1;
    std::size_t restarts = 1;
    std::size_t max_iter = 100;
    double tol = 0.0;  // squared-distance change below which centroids count as converged
    std::uint64_t seed = 0;
};

struct DbscanParams {
    double eps = 0.0;
    std::size_t min_pts = 1;
};

struct ClusterResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;  // k-means only
    double wcss = 0.0;                           // k-means only
    // Per-assignment-step objective of the winning restart. Non-increasing
    // by construction; kmeans() throws if that ever fails.
    std::vector<double> wcss_history;
    std::size_t n_clusters = 0;
};

// Lloyd's algorithm, best of params.restarts runs by final objective
// (restart index breaks ties). Initial centroids are k distinct points
// sampled uniformly from the input. A cluster that empties is re-seeded
// at the point currently farthest from its assigned centroid.
ClusterResult kmeans(const std::vector<std::vector<double>>& points, const KmeansParams& params);

// Classic density clustering over Euclidean distance. A point is core
// when its eps-ball (the point itself included) holds at least min_pts
// points. Uses a grid index in <= 3 dimensions, linear scans otherwise.
ClusterResult dbscan(const std::vector<std::vector<double>>& points, const DbscanParams& params);

// Same expansion logic with a caller-supplied neighbourhood oracle:
// neighbors(i) returns every index j (including i itself) with
// dist(i, j) <= eps. Lets sequence clustering reuse the scan without a
// vector embedding.
ClusterResult dbscan_generic(std::size_t n,
                             const std::function<std::vector<std::size_t>(std::size_t)>& neighbors,
                             std::size_t min_pts);

double squared_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace trajmine
