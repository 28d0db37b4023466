#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace trajmine {

// All positions are meters in the radar frame: x east, y north, z up,
// radar at the origin. Timestamps are integer seconds.
struct TrackPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::int64_t t = 0;
};

enum class OpType { departure, arrival };
enum class AircraftCategory { jet, regional, business, turboprop, helicopter, other };
enum class FlightRules { IFR, VFR };

const char* to_string(OpType v);
const char* to_string(AircraftCategory v);
const char* to_string(FlightRules v);
OpType op_type_from_string(const std::string& s);
AircraftCategory category_from_string(const std::string& s);
FlightRules flight_rules_from_string(const std::string& s);

struct FlightMetadata {
    std::string flight_id;
    OpType op_type = OpType::arrival;
    std::string origin;
    std::string destination;
    AircraftCategory category = AircraftCategory::jet;
    FlightRules flight_rules = FlightRules::IFR;
    std::int64_t start_time = 0;
    std::size_t n_points = 0;
    // Ground-truth template label written by the synthetic generator.
    // Pipelines never read it; tests use it to grade cluster recovery.
    std::string synth_template;
};

struct Trajectory {
    FlightMetadata meta;
    std::vector<TrackPoint> points;
};

// Fixed-length (n_samples) selection of a source trajectory's points.
// `headings` caches the low-pass-filtered heading of the *source*
// trajectory sampled at the same indices as `points`; empty when the
// source was too short to estimate headings.
struct ResampledTrajectory {
    FlightMetadata meta;
    std::vector<TrackPoint> points;
    std::vector<double> headings;
};

// Thrown by the ingestion parsers; carries the 1-based line number of
// the offending row when one is known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line = 0);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Reads the track CSV (`flight_id,t,x_m,y_m,z_m`) and the metadata
// JSON-lines stream and pairs them up into trajectories. Flights seen
// in only one of the two streams are dropped. Per flight, rows must
// appear in strictly increasing t with gaps of at most 30 s, and every
// point must lie inside the TRACON cylinder (|x|,|y| <= 80 km,
// 0 <= z <= 6 km). Violations raise ParseError with the line number.
std::vector<Trajectory> parse_tracks(std::istream& track_stream, std::istream& meta_stream);

void serialize_tracks(const std::vector<Trajectory>& flights, std::ostream& track_out);
void serialize_metadata(const std::vector<Trajectory>& flights, std::ostream& meta_out);

std::string format_double(double v);

// Keeps IFR flights bound for `dest` with the requested operation type
// and at least `min_points` track points.
std::vector<Trajectory> filter_flights(const std::vector<Trajectory>& flights,
                                       const std::string& dest, OpType op,
                                       std::size_t min_points);

// Index-selection resampling: source indices round(k*m/n), k = 1..n,
// clamped to [1, m]. Duplicated indices are kept when m < n, so the
// output always has exactly n points and ends at the source's last
// point. `alpha` is the heading low-pass constant used to fill the
// cached heading channel (skipped when m < 3).
ResampledTrajectory resample(const Trajectory& traj, std::size_t n = 50, double alpha = 0.4);

// The raw 1-based index selection behind resample().
std::vector<std::size_t> resample_indices(std::size_t m, std::size_t n);

}  // namespace trajmine
