#include "trajmine/trajdata.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "json.hpp"
#include "trajmine/geom.hpp"

namespace trajmine {

using nlohmann::json;

const char* to_string(OpType v) {
    return v == OpType::departure ? "departure" : "arrival";
}

const char* to_string(AircraftCategory v) {
    switch (v) {
        case AircraftCategory::jet: return "jet";
        case AircraftCategory::regional: return "regional";
        case AircraftCategory::business: return "business";
        case AircraftCategory::turboprop: return "turboprop";
        case AircraftCategory::helicopter: return "helicopter";
        case AircraftCategory::other: return "other";
    }
    return "other";
}

const char* to_string(FlightRules v) {
    return v == FlightRules::IFR ? "IFR" : "VFR";
}

OpType op_type_from_string(const std::string& s) {
    if (s == "departure") return OpType::departure;
    if (s == "arrival") return OpType::arrival;
    throw ParseError("unknown op_type: " + s);
}

AircraftCategory category_from_string(const std::string& s) {
    if (s == "jet") return AircraftCategory::jet;
    if (s == "regional") return AircraftCategory::regional;
    if (s == "business") return AircraftCategory::business;
    if (s == "turboprop") return AircraftCategory::turboprop;
    if (s == "helicopter") return AircraftCategory::helicopter;
    if (s == "other") return AircraftCategory::other;
    throw ParseError("unknown category: " + s);
}

FlightRules flight_rules_from_string(const std::string& s) {
    if (s == "IFR") return FlightRules::IFR;
    if (s == "VFR") return FlightRules::VFR;
    throw ParseError("unknown flight_rules: " + s);
}

ParseError::ParseError(std::string message, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                              : std::move(message)),
      line_(line) {}

namespace {

constexpr double kMaxXY = 80000.0;
constexpr double kMaxZ = 6000.0;
constexpr std::int64_t kMaxGapS = 30;

double parse_field_double(std::string_view field, std::size_t line, const char* name) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
        throw ParseError(std::string("bad ") + name + " value: " + std::string(field), line);
    return v;
}

std::int64_t parse_field_int(std::string_view field, std::size_t line, const char* name) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(std::string("bad ") + name + " value: " + std::string(field), line);
    return v;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

FlightMetadata metadata_from_json(const json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError("metadata entry is not an object", line);
    FlightMetadata m;
    try {
        m.flight_id = j.at("flight_id").get<std::string>();
        m.op_type = op_type_from_string(j.at("op_type").get<std::string>());
        m.origin = j.at("origin").get<std::string>();
        m.destination = j.at("destination").get<std::string>();
        m.category = category_from_string(j.at("category").get<std::string>());
        m.flight_rules = flight_rules_from_string(j.at("flight_rules").get<std::string>());
        m.start_time = j.at("start_time").get<std::int64_t>();
        m.n_points = j.at("n_points").get<std::size_t>();
        if (j.contains("synth_template")) m.synth_template = j.at("synth_template").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad metadata entry: ") + e.what(), line);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line);
    }
    if (m.flight_id.empty()) throw ParseError("empty flight_id", line);
    return m;
}

}  // namespace

std::vector<Trajectory> parse_tracks(std::istream& track_stream, std::istream& meta_stream) {
    std::string line;
    std::size_t lineno = 0;

    // Track CSV. Points accumulate per flight in file order; order of
    // first appearance fixes the output order.
    std::map<std::string, std::vector<TrackPoint>> points;
    std::vector<std::string> order;

    if (!std::getline(track_stream, line)) return {};
    ++lineno;
    strip_cr(line);
    if (line != "flight_id,t,x_m,y_m,z_m")
        throw ParseError("bad track header: " + line, lineno);

    while (std::getline(track_stream, line)) {
        ++lineno;
        strip_cr(line);
        std::array<std::string_view, 5> fields;
        std::string_view rest = line;
        for (int f = 0; f < 5; ++f) {
            auto comma = rest.find(',');
            if (f < 4) {
                if (comma == std::string_view::npos)
                    throw ParseError("expected 5 fields: " + line, lineno);
                fields[f] = rest.substr(0, comma);
                rest.remove_prefix(comma + 1);
            } else {
                if (comma != std::string_view::npos)
                    throw ParseError("expected 5 fields: " + line, lineno);
                fields[f] = rest;
            }
        }
        if (fields[0].empty()) throw ParseError("empty flight_id", lineno);
        TrackPoint p;
        p.t = parse_field_int(fields[1], lineno, "t");
        p.x = parse_field_double(fields[2], lineno, "x_m");
        p.y = parse_field_double(fields[3], lineno, "y_m");
        p.z = parse_field_double(fields[4], lineno, "z_m");
        if (std::abs(p.x) > kMaxXY || std::abs(p.y) > kMaxXY)
            throw ParseError("point outside TRACON bounds (|x|,|y| <= 80000)", lineno);
        if (p.z < 0.0 || p.z > kMaxZ)
            throw ParseError("altitude outside [0, 6000]", lineno);

        std::string id(fields[0]);
        auto [it, inserted] = points.try_emplace(id);
        if (inserted) order.push_back(id);
        auto& pts = it->second;
        if (!pts.empty()) {
            std::int64_t prev = pts.back().t;
            if (p.t == prev)
                throw ParseError("duplicate timestamp for flight " + id, lineno);
            if (p.t < prev)
                throw ParseError("non-monotonic timestamp for flight " + id, lineno);
            if (p.t - prev > kMaxGapS)
                throw ParseError("gap exceeds 30 s for flight " + id, lineno);
        }
        pts.push_back(p);
    }

    // Metadata JSON lines.
    std::map<std::string, FlightMetadata> meta;
    lineno = 0;
    while (std::getline(meta_stream, line)) {
        ++lineno;
        strip_cr(line);
        if (line.empty()) throw ParseError("empty metadata line", lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad metadata json: ") + e.what(), lineno);
        }
        FlightMetadata m = metadata_from_json(j, lineno);
        if (!meta.emplace(m.flight_id, m).second)
            throw ParseError("duplicate metadata for flight " + m.flight_id, lineno);
    }

    std::vector<Trajectory> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        auto mit = meta.find(id);
        if (mit == meta.end()) continue;  // track-only flight: dropped
        Trajectory traj;
        traj.meta = mit->second;
        traj.points = std::move(points[id]);
        if (traj.points.size() < 2)
            throw ParseError("flight " + id + " has fewer than 2 points");
        if (traj.meta.n_points != traj.points.size())
            throw ParseError("flight " + id + ": metadata n_points " +
                             std::to_string(traj.meta.n_points) + " != track rows " +
                             std::to_string(traj.points.size()));
        out.push_back(std::move(traj));
    }
    return out;
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr - buf);
}

void serialize_tracks(const std::vector<Trajectory>& flights, std::ostream& track_out) {
    track_out << "flight_id,t,x_m,y_m,z_m\n";
    for (const auto& f : flights)
        for (const auto& p : f.points)
            track_out << f.meta.flight_id << ',' << p.t << ',' << format_double(p.x) << ','
                      << format_double(p.y) << ',' << format_double(p.z) << '\n';
}

void serialize_metadata(const std::vector<Trajectory>& flights, std::ostream& meta_out) {
    for (const auto& f : flights) {
        const FlightMetadata& m = f.meta;
        json j;
        j["flight_id"] = m.flight_id;
        j["op_type"] = to_string(m.op_type);
        j["origin"] = m.origin;
        j["destination"] = m.destination;
        j["category"] = to_string(m.category);
        j["flight_rules"] = to_string(m.flight_rules);
        j["start_time"] = m.start_time;
        j["n_points"] = m.n_points;
        if (!m.synth_template.empty()) j["synth_template"] = m.synth_template;
        meta_out << j.dump() << '\n';
    }
}

std::vector<Trajectory> filter_flights(const std::vector<Trajectory>& flights,
                                       const std::string& dest, OpType op,
                                       std::size_t min_points) {
    std::vector<Trajectory> out;
    for (const auto& f : flights) {
        if (f.meta.flight_rules != FlightRules::IFR) continue;
        if (f.meta.destination != dest) continue;
        if (f.meta.op_type != op) continue;
        if (f.points.size() < min_points) continue;
        out.push_back(f);
    }
    return out;
}

std::vector<std::size_t> resample_indices(std::size_t m, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 1; k <= n; ++k) {
        auto l = static_cast<std::size_t>(std::llround(
            static_cast<double>(k) * static_cast<double>(m) / static_cast<double>(n)));
        idx[k - 1] = std::clamp<std::size_t>(l, 1, m);
    }
    return idx;
}

ResampledTrajectory resample(const Trajectory& traj, std::size_t n, double alpha) {
    const std::size_t m = traj.points.size();
    if (m < 2) throw std::invalid_argument("resample: trajectory has fewer than 2 points");
    if (n < 2) throw std::invalid_argument("resample: n must be >= 2");

    ResampledTrajectory out;
    out.meta = traj.meta;
    const auto idx = resample_indices(m, n);
    out.points.reserve(n);
    for (std::size_t l : idx) out.points.push_back(traj.points[l - 1]);

    if (m >= 3) {
        const HeadingSeries series = estimate_headings(traj);
        const std::vector<double> filtered = lowpass_unwrapped(unwrap_angles(series.raw), alpha);
        // filtered[i] is the heading at source index i+2 (1-based); the
        // endpoints reuse their nearest interior heading.
        out.headings.reserve(n);
        for (std::size_t l : idx) {
            std::size_t interior = std::clamp<std::size_t>(l, 2, m - 1);
            out.headings.push_back(filtered[interior - 2]);
        }
    }
    return out;
}

}  // namespace trajmine
