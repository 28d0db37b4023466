#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "trajmine/clustering.hpp"
#include "trajmine/trajdata.hpp"

namespace trajmine {

inline constexpr std::size_t kFeatureSamples = 50;
inline constexpr std::size_t kFeatureDim = 450;

// Feature-group boundaries inside the 450-vector:
// [Px | Py | Pz | R | D | cosTheta | sinTheta | cosPsi | sinPsi],
// 50 components each.
inline constexpr std::size_t kFeatureGroups = 9;

extern const std::array<const char*, kFeatureGroups> kFeatureGroupNames;

struct AugmentConfig {
    double x_ref = -80000.0;
    double y_ref = 80000.0;
    std::size_t n_samples = kFeatureSamples;
};

using FeatureVector = std::vector<double>;

struct NormalizationParams {
    std::array<double, kFeatureGroups> group_min{};
    std::array<double, kFeatureGroups> group_max{};
};

struct PcaModel {
    std::vector<double> mean;                       // dimension-sized
    std::vector<std::vector<double>> components;    // p orthonormal rows
    std::vector<double> explained_variance;         // non-increasing
    bool rank_deficient = false;
};

struct RouteModel {
    PcaModel pca;
    NormalizationParams norm;
    AugmentConfig augment_cfg;
    std::vector<std::string> flight_ids;
    std::vector<int> cluster_labels;                // per training flight
    std::vector<ResampledTrajectory> centroids;     // per cluster mean trajectory
    std::size_t n_clusters = 0;
    DbscanParams dbscan_effective;                  // params after eps auto-fill
};

// Builds the 450-dimensional augmented representation of a 50-point
// resampled trajectory: raw positions, range from the radar, distance
// from the (x_ref, y_ref) corner, and sin/cos of the planar bearing and
// of the filtered heading channel.
FeatureVector augment(const ResampledTrajectory& rt, const AugmentConfig& cfg);

// Per-group min/max over the corpus.
NormalizationParams fit_normalization(const std::vector<FeatureVector>& vectors);

// v -> (v - min) / (max - min) per group; degenerate groups map to 0.5.
FeatureVector normalize(const NormalizationParams& params, const FeatureVector& v);
FeatureVector denormalize(const NormalizationParams& params, const FeatureVector& v);

// Mean-centered eigendecomposition of the sample covariance; keeps the
// top-p directions. When the corpus has rank below p, fewer components
// come back and the model is flagged rank_deficient.
PcaModel fit_pca(const std::vector<FeatureVector>& vectors, std::size_t p);

std::vector<double> project(const PcaModel& model, const FeatureVector& v);

// Full pipeline: augment -> normalize -> PCA -> project -> DBSCAN.
// dbscan_params.eps <= 0 selects 0.05 x the diameter of the projected
// training set. Cluster centroids are means in resampled-trajectory
// space.
RouteModel fit_route_model(const std::vector<ResampledTrajectory>& flights,
                           const DbscanParams& dbscan_params, std::size_t p = 5,
                           const AugmentConfig& cfg = {});

struct OutlierReport {
    struct Row {
        std::string key;
        std::size_t total = 0;
        std::size_t outliers = 0;
        double frequency = 0.0;
    };
    std::vector<Row> by_category;
    std::vector<Row> by_day;
    std::vector<Row> by_hour;
};

// Outlier counts and frequencies grouped by aircraft category, by
// calendar day, and by hour of day (epoch-relative local time).
OutlierReport outlier_report(const RouteModel& model, const std::vector<FlightMetadata>& meta);

std::string outlier_report_to_csv(const OutlierReport& report);

std::string route_model_to_json(const RouteModel& model, int schema_version,
                                const std::string& config_fingerprint);
RouteModel route_model_from_json(const std::string& text);

std::string centroids_to_csv(const RouteModel& model);

}  // namespace trajmine
