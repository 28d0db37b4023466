#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trajmine/trajdata.hpp"

namespace trajmine {

// One nominal route template: a corner polyline flown start to end.
// Corner coordinates are TRACON-frame meters.
struct RouteTemplate {
    std::string name;
    std::vector<std::pair<double, double>> corners;
    std::string destination = "SFO";
    OpType op_type = OpType::arrival;
    int count = 0;                  // nominal flights drawn from this template
    double speed_mps = 100.0;       // along-track ground speed
    double lateral_sigma_m = 300.0; // per-flight constant cross-track offset
    double jitter_sigma_m = 30.0;   // per-point isotropic noise
    double entry_jitter = 0.2;      // start fraction drawn from U(0, entry_jitter)
    double exit_jitter = 0.0;       // end truncation fraction drawn from U(0, exit_jitter)
    double alt_start_m = 3500.0;
    double alt_end_m = 300.0;
};

enum class AnomalyKind { holding, vectoring, direct };

AnomalyKind anomaly_kind_from_string(const std::string& s);
const char* to_string(AnomalyKind k);

// Anomalous flights are derived from a named route template and then
// perturbed: a holding loop inserted mid-route, an off-course vectoring
// excursion, or a straight chord that skips the interior corners.
struct AnomalySpec {
    std::string name;
    AnomalyKind kind = AnomalyKind::holding;
    std::string route;  // template the anomaly deviates from
    int count = 0;
    double magnitude = 1.0;  // kind-specific scale, 1.0 = defaults
};

struct CorpusSpec {
    std::vector<RouteTemplate> routes;
    std::vector<AnomalySpec> anomalies;
    std::int64_t t0 = 1700000000;     // corpus epoch, unix seconds
    std::int64_t spacing_s = 90;      // mean inter-departure gap
    std::int64_t dt_s = 4;            // radar hit period
    int category_mix_pct_jet = 70;    // remainder split regional/business/turboprop
};

struct SyntheticCorpus {
    std::vector<Trajectory> flights;  // ordered by start time
};

// Parses [route.<name>], [anomaly.<name>], and [corpus] sections from
// INI text; [run] and top-level keys are ignored so a corpus spec can
// share a file with a run config. Throws std::runtime_error on unknown
// keys, malformed corner lists, or an anomaly referencing a missing
// route.
CorpusSpec parse_corpus_spec(const std::string& ini_text);

// Deterministic for a fixed (spec, seed): flight ids, timing, and every
// noise draw come from one mt19937_64 stream.
SyntheticCorpus generate_synthetic(const CorpusSpec& spec, std::uint64_t seed);

}  // namespace trajmine
