#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajmine/ims.hpp"
#include "trajmine/trajdata.hpp"

namespace trajmine {

enum class AircraftStatus { NOMINAL_SFO, OUTLIER_SFO, CLEAR_OTHER, INTERFERING_OTHER, WARMUP };

const char* to_string(AircraftStatus s);

struct MonitorConfig {
    std::string monitored_airport = "SFO";
    double tau = 0.02;
    std::int64_t window_s = 80;
    std::int64_t min_warmup_s = 40;
    std::int64_t expiry_s = 120;
    std::int64_t tick_s = 15;
    std::int64_t history_s = 600;
};

struct AircraftState {
    std::string flight_id;
    std::string destination;
    std::deque<TrackPoint> recent_hits;  // time-ordered, last window_s seconds
    std::int64_t last_seen = 0;

    std::int64_t window_span() const {
        return recent_hits.empty() ? 0 : recent_hits.back().t - recent_hits.front().t;
    }
};

struct AircraftReading {
    std::string flight_id;
    AircraftStatus status = AircraftStatus::WARMUP;
    std::optional<double> score;
    std::size_t window_len = 0;
};

struct AirspaceSnapshot {
    std::int64_t t = 0;
    std::vector<AircraftReading> aircraft;  // sorted by flight_id
    std::size_t n_sfo = 0;
    std::size_t n_not_sfo = 0;
    std::size_t n_ok_sfo = 0;
    std::size_t n_not_ok_sfo = 0;
    std::size_t n_ok_not_sfo = 0;
    std::size_t n_not_ok_not_sfo = 0;
};

struct ComplexityReading {
    std::int64_t t = 0;
    double i_sfo = 0.0;
    double i_not_sfo = 0.0;
    double c = 0.0;
};

// Event-driven replay state. Hits are applied in timestamp order; a
// snapshot and complexity reading come out every tick_s of simulated
// time. Aircraft below min_warmup_s of window coverage are listed but
// excluded from every count.
class ReplayEngine {
public:
    ReplayEngine(const ImsKnowledgeBase& kb, MonitorConfig cfg);

    // Appends a hit for one flight. Hits older than hit.t - window_s are
    // evicted from that flight's window; an out-of-order hit is rejected
    // and counted as a warning.
    void ingest_hit(const std::string& flight_id, const TrackPoint& hit,
                    const FlightMetadata& meta);

    // Classifies every tracked aircraft at time t and emits the snapshot
    // plus its complexity reading. Aircraft silent longer than expiry_s
    // are dropped first.
    std::pair<AirspaceSnapshot, ComplexityReading> tick(std::int64_t t);

    const std::deque<ComplexityReading>& history() const { return history_; }
    std::size_t warnings() const { return warnings_; }

private:
    const ImsKnowledgeBase& kb_;
    MonitorConfig cfg_;
    std::map<std::string, AircraftState> aircraft_;
    std::map<std::string, FlightMetadata> meta_;
    std::deque<ComplexityReading> history_;
    std::size_t warnings_ = 0;
};

// Resamples the aircraft's window to 5 points and normalizes it so it
// is directly comparable with training fragments. Throws when the
// window is still warming up.
Fragment window_features(const AircraftState& a, const NormalizationParams& norm,
                         std::int64_t min_warmup_s);

AircraftStatus classify_aircraft(const AircraftState& a, const ImsKnowledgeBase& kb,
                                 const MonitorConfig& cfg);

// Shannon entropy of the conforming/outlier split, base-2. Outliers
// count as mutually distinct states: for a group of n aircraft with
// n_ok conforming, I = -(n_ok/n) log2(n_ok/n) - (n - n_ok)/n log2(1/n),
// with 0 log 0 = 0 and I = 0 for an empty group.
double group_entropy(std::size_t n_group, std::size_t n_ok);

ComplexityReading complexity(const AirspaceSnapshot& snapshot);

struct ReplayOutput {
    std::vector<std::pair<AirspaceSnapshot, ComplexityReading>> ticks;
    std::size_t warnings = 0;
};

// Replays recorded flights through the engine in global time order,
// ticking every cfg.tick_s seconds from the first hit through the last.
ReplayOutput run_replay(const std::vector<Trajectory>& flights, const ImsKnowledgeBase& kb,
                        const MonitorConfig& cfg);

std::string snapshot_to_json_line(const AirspaceSnapshot& snap, const ComplexityReading& reading);
std::string complexity_history_to_csv(const std::vector<ComplexityReading>& readings);

}  // namespace trajmine
