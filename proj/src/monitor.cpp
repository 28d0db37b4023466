#include "trajmine/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trajmine {

using nlohmann::json;

const char* to_string(AircraftStatus s) {
    switch (s) {
        case AircraftStatus::NOMINAL_SFO: return "NOMINAL_SFO";
        case AircraftStatus::OUTLIER_SFO: return "OUTLIER_SFO";
        case AircraftStatus::CLEAR_OTHER: return "CLEAR_OTHER";
        case AircraftStatus::INTERFERING_OTHER: return "INTERFERING_OTHER";
        case AircraftStatus::WARMUP: return "WARMUP";
    }
    return "WARMUP";
}

Fragment window_features(const AircraftState& a, const NormalizationParams& norm,
                         std::int64_t min_warmup_s) {
    if (a.recent_hits.size() < 2 || a.window_span() < min_warmup_s)
        throw std::invalid_argument("window_features: aircraft " + a.flight_id +
                                    " is still warming up");
    Trajectory window;
    window.meta.flight_id = a.flight_id;
    window.points.assign(a.recent_hits.begin(), a.recent_hits.end());
    const ResampledTrajectory rt = resample(window, kFragmentPoints);
    return make_fragment(rt.points, a.flight_id, norm);
}

AircraftStatus classify_aircraft(const AircraftState& a, const ImsKnowledgeBase& kb,
                                 const MonitorConfig& cfg) {
    const Fragment f = window_features(a, kb.norm, cfg.min_warmup_s);
    const bool conforms = ims_score(kb, f) <= cfg.tau;
    if (a.destination == cfg.monitored_airport)
        return conforms ? AircraftStatus::NOMINAL_SFO : AircraftStatus::OUTLIER_SFO;
    // a non-monitored aircraft matching the landing pattern is the one
    // that interferes with it
    return conforms ? AircraftStatus::INTERFERING_OTHER : AircraftStatus::CLEAR_OTHER;
}

double group_entropy(std::size_t n_group, std::size_t n_ok) {
    if (n_group == 0) return 0.0;
    const double n = static_cast<double>(n_group);
    const double p_ok = static_cast<double>(n_ok) / n;
    double i = 0.0;
    if (n_ok > 0 && n_ok < n_group) i -= p_ok * std::log2(p_ok);
    if (n_ok < n_group) i += (n - static_cast<double>(n_ok)) / n * std::log2(n);
    return i;
}

ComplexityReading complexity(const AirspaceSnapshot& snapshot) {
    ComplexityReading r;
    r.t = snapshot.t;
    r.i_sfo = group_entropy(snapshot.n_sfo, snapshot.n_ok_sfo);
    r.i_not_sfo = group_entropy(snapshot.n_not_sfo, snapshot.n_ok_not_sfo);
    r.c = r.i_sfo + r.i_not_sfo;
    return r;
}

ReplayEngine::ReplayEngine(const ImsKnowledgeBase& kb, MonitorConfig cfg)
    : kb_(kb), cfg_(std::move(cfg)) {
    if (cfg_.window_s <= 0 || cfg_.tick_s <= 0)
        throw std::invalid_argument("ReplayEngine: window_s and tick_s must be positive");
}

void ReplayEngine::ingest_hit(const std::string& flight_id, const TrackPoint& hit,
                              const FlightMetadata& meta) {
    auto [it, created] = aircraft_.try_emplace(flight_id);
    AircraftState& a = it->second;
    if (created) {
        a.flight_id = flight_id;
        a.destination = meta.destination;
        meta_[flight_id] = meta;
    } else if (!a.recent_hits.empty() && hit.t < a.recent_hits.back().t) {
        ++warnings_;
        return;
    }
    if (!a.recent_hits.empty() && hit.t == a.recent_hits.back().t)
        a.recent_hits.back() = hit;  // radar re-report replaces the hit
    else
        a.recent_hits.push_back(hit);
    while (!a.recent_hits.empty() && a.recent_hits.front().t < hit.t - cfg_.window_s)
        a.recent_hits.pop_front();
    a.last_seen = hit.t;

    for (auto sweep = aircraft_.begin(); sweep != aircraft_.end();) {
        if (sweep->second.last_seen < hit.t - cfg_.expiry_s) {
            meta_.erase(sweep->first);
            sweep = aircraft_.erase(sweep);
        } else {
            ++sweep;
        }
    }
}

std::pair<AirspaceSnapshot, ComplexityReading> ReplayEngine::tick(std::int64_t t) {
    for (auto it = aircraft_.begin(); it != aircraft_.end();) {
        if (it->second.last_seen < t - cfg_.expiry_s) {
            meta_.erase(it->first);
            it = aircraft_.erase(it);
        } else {
            ++it;
        }
    }

    AirspaceSnapshot snap;
    snap.t = t;
    for (const auto& [id, a] : aircraft_) {
        AircraftReading reading;
        reading.flight_id = id;
        reading.window_len = a.recent_hits.size();
        if (a.recent_hits.size() < 2 || a.window_span() < cfg_.min_warmup_s) {
            reading.status = AircraftStatus::WARMUP;
        } else {
            const Fragment f = window_features(a, kb_.norm, cfg_.min_warmup_s);
            const double score = ims_score(kb_, f);
            reading.score = score;
            const bool conforms = score <= cfg_.tau;
            if (a.destination == cfg_.monitored_airport) {
                reading.status =
                    conforms ? AircraftStatus::NOMINAL_SFO : AircraftStatus::OUTLIER_SFO;
                ++snap.n_sfo;
                if (conforms) ++snap.n_ok_sfo;
                else ++snap.n_not_ok_sfo;
            } else {
                reading.status =
                    conforms ? AircraftStatus::INTERFERING_OTHER : AircraftStatus::CLEAR_OTHER;
                ++snap.n_not_sfo;
                // for the non-monitored group, "OK" means staying clear
                if (conforms) ++snap.n_not_ok_not_sfo;
                else ++snap.n_ok_not_sfo;
            }
        }
        snap.aircraft.push_back(std::move(reading));
    }

    const ComplexityReading reading = complexity(snap);
    history_.push_back(reading);
    while (!history_.empty() && history_.front().t < t - cfg_.history_s) history_.pop_front();
    return {snap, reading};
}

ReplayOutput run_replay(const std::vector<Trajectory>& flights, const ImsKnowledgeBase& kb,
                        const MonitorConfig& cfg) {
    ReplayOutput out;
    struct Event {
        std::int64_t t;
        std::size_t flight;
        std::size_t point;
    };
    std::vector<Event> events;
    for (std::size_t i = 0; i < flights.size(); ++i)
        for (std::size_t j = 0; j < flights[i].points.size(); ++j)
            events.push_back({flights[i].points[j].t, i, j});
    if (events.empty()) return out;
    std::sort(events.begin(), events.end(), [&flights](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        return flights[a.flight].meta.flight_id < flights[b.flight].meta.flight_id;
    });

    ReplayEngine engine(kb, cfg);
    const std::int64_t t0 = events.front().t;
    const std::int64_t t_end = events.back().t;
    std::size_t next_event = 0;
    for (std::int64_t t = t0; t <= t_end; t += cfg.tick_s) {
        while (next_event < events.size() && events[next_event].t <= t) {
            const Event& e = events[next_event++];
            engine.ingest_hit(flights[e.flight].meta.flight_id, flights[e.flight].points[e.point],
                              flights[e.flight].meta);
        }
        out.ticks.push_back(engine.tick(t));
    }
    out.warnings = engine.warnings();
    return out;
}

std::string snapshot_to_json_line(const AirspaceSnapshot& snap, const ComplexityReading& reading) {
    json doc;
    doc["t"] = snap.t;
    json aircraft = json::array();
    for (const auto& a : snap.aircraft) {
        json ja;
        ja["flight_id"] = a.flight_id;
        ja["status"] = to_string(a.status);
        if (a.score) ja["score"] = *a.score;
        else ja["score"] = nullptr;
        ja["window_len"] = a.window_len;
        aircraft.push_back(std::move(ja));
    }
    doc["aircraft"] = std::move(aircraft);
    doc["counts"] = {{"n_sfo", snap.n_sfo},
                     {"n_not_sfo", snap.n_not_sfo},
                     {"n_ok_sfo", snap.n_ok_sfo},
                     {"n_not_ok_sfo", snap.n_not_ok_sfo},
                     {"n_ok_not_sfo", snap.n_ok_not_sfo},
                     {"n_not_ok_not_sfo", snap.n_not_ok_not_sfo}};
    doc["i_sfo"] = reading.i_sfo;
    doc["i_not_sfo"] = reading.i_not_sfo;
    doc["c"] = reading.c;
    return doc.dump();
}

std::string complexity_history_to_csv(const std::vector<ComplexityReading>& readings) {
    std::ostringstream out;
    out << "t,i_sfo,i_not_sfo,c\n";
    for (const auto& r : readings)
        out << r.t << ',' << format_double(r.i_sfo) << ',' << format_double(r.i_not_sfo) << ','
            << format_double(r.c) << '\n';
    return out.str();
}

}  // namespace trajmine
