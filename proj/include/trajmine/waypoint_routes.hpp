#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajmine/clustering.hpp"
#include "trajmine/geom.hpp"
#include "trajmine/trajdata.hpp"

namespace trajmine {

enum class WaypointSource { sparse_box, dense_hull };

struct Waypoint {
    int id = 0;
    Polygon2D shape;
    PlanarPoint center{0.0, 0.0};
    WaypointSource source = WaypointSource::dense_hull;
};

struct WaypointSequence {
    std::string flight_id;
    std::vector<int> waypoint_ids;
};

struct SequenceClusterResult {
    std::vector<int> labels;  // per input sequence; kOutlier for noise
    std::vector<WaypointSequence> representatives;
    std::size_t n_clusters = 0;
};

// k-means over the planar turning-point coordinates; each cluster
// becomes a quadrilateral waypoint in cylindrical coordinates about the
// radar: center (r_m, theta_m), corners (r_m +/- 2*std_r,
// theta_m +/- 2*std_theta). theta_m and std_theta are circular
// statistics. Degenerate clusters get minimum half-extents of 250 m
// radially and 0.5 degrees angularly.
std::vector<Waypoint> build_waypoints_sparse(const std::vector<TurningPoint>& tps, std::size_t k,
                                             std::uint64_t seed = 0);

// DBSCAN over the planar turning-point coordinates; each cluster's
// convex hull becomes a waypoint, outlier turning points produce none.
std::vector<Waypoint> build_waypoints_dense(const std::vector<TurningPoint>& tps,
                                            const DbscanParams& params);

// Walks the trajectory in time order and appends the id of each
// waypoint traversed, collapsing consecutive repeats. Overlapping
// waypoints resolve to the lowest id.
WaypointSequence trajectory_to_sequence(const Trajectory& traj,
                                        const std::vector<Waypoint>& waypoints);

// Drops a trailing final-turn waypoint id when configured, then keeps
// only sequences longer than 4 waypoints.
std::vector<WaypointSequence> filter_sequences(const std::vector<WaypointSequence>& seqs,
                                               std::optional<int> final_turn_wp);

// Length of the longest (not necessarily contiguous) common
// subsequence.
std::size_t lcs_length(const std::vector<int>& a, const std::vector<int>& b);

// Normalized-LCS similarity: lcs / max(|a|, |b|); 1 for two empty
// sequences.
double sequence_similarity(const WaypointSequence& a, const WaypointSequence& b);

// Density clustering of sequences under distance 1 - similarity with
// eps = 1 - sim_threshold. Each cluster is represented by its medoid
// (max total similarity to the cluster, ties to the lowest flight_id).
SequenceClusterResult cluster_sequences(const std::vector<WaypointSequence>& seqs,
                                        double sim_threshold, std::size_t min_cluster);

std::string waypoints_to_json(const std::vector<Waypoint>& waypoints, int schema_version,
                              const std::string& config_fingerprint);
std::vector<Waypoint> waypoints_from_json(const std::string& text);

std::string sequences_to_csv(const std::vector<WaypointSequence>& seqs);
std::vector<WaypointSequence> sequences_from_csv(const std::string& text);

}  // namespace trajmine
