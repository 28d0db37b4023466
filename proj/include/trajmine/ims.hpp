#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trajmine/pca_routes.hpp"
#include "trajmine/trajdata.hpp"

namespace trajmine {

inline constexpr std::size_t kFragmentPoints = 5;
inline constexpr std::size_t kFragmentsPerFlight = 10;
inline constexpr std::size_t kFragmentDim = 15;

// One normalized 5-point slice of a trajectory, flattened
// x1 y1 z1 ... x5 y5 z5.
struct Fragment {
    std::array<double, kFragmentDim> values{};
    std::string flight_id;
    std::size_t index = 0;  // 0..9 for training slices
};

struct ImsCluster {
    std::array<double, kFragmentDim> lo{};
    std::array<double, kFragmentDim> hi{};
    std::size_t count = 0;
};

struct ImsKnowledgeBase {
    std::vector<ImsCluster> clusters;
    NormalizationParams norm;
    std::size_t trained_fragments = 0;
    std::string fingerprint;  // content hash, verified on load
};

// Splits a 50-point resampled trajectory into 10 contiguous 5-point
// windows and normalizes each against the position groups of `norm`.
std::vector<Fragment> fragment_trajectory(const ResampledTrajectory& rt,
                                          const NormalizationParams& norm);

// Normalizes an arbitrary 5-point window (monitoring path).
Fragment make_fragment(const std::vector<TrackPoint>& five_points, const std::string& flight_id,
                       const NormalizationParams& norm);

// k-means over the fragments, a min/max box per cluster, then greedy
// merging of any two boxes whose inter-box gap is at most merge_eps.
// Every training fragment ends up inside some box. `norm` is the
// normalization the fragments were built with; it is persisted so
// monitoring windows can be normalized identically.
ImsKnowledgeBase train_ims(const std::vector<Fragment>& fragments, std::size_t initial_k,
                           double merge_eps, const NormalizationParams& norm,
                           std::uint64_t seed = 0);

// Default cluster count for n fragments: max(16, ceil(sqrt(n))),
// clamped to n.
std::size_t default_ims_k(std::size_t n_fragments);

// Euclidean distance from the fragment to the nearest cluster box;
// 0 when some box contains it.
double ims_score(const ImsKnowledgeBase& kb, const Fragment& f);

enum class Conformance { conforming, anomalous };

Conformance ims_classify(const ImsKnowledgeBase& kb, const Fragment& f, double tau);

std::string ims_kb_to_json(const ImsKnowledgeBase& kb, int schema_version,
                           const std::string& config_fingerprint);
ImsKnowledgeBase ims_kb_from_json(const std::string& text);

}  // namespace trajmine
