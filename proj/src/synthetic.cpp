#include "trajmine/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "trajmine/config.hpp"
#include "trajmine/geom.hpp"

namespace trajmine {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDeg = std::numbers::pi / 180.0;

// All randomness flows through this wrapper so the corpus is identical
// across standard libraries, not just across runs.
struct Rand {
    std::mt19937_64 eng;

    explicit Rand(std::uint64_t seed) : eng(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double sigma) {
        const double u1 = (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
        const double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t r = eng();
        while (r >= limit) r = eng();
        return r % n;
    }
};

struct Polyline {
    std::vector<PlanarPoint> pts;
    std::vector<double> cum;  // cum[i] = arc length up to pts[i]

    explicit Polyline(std::vector<PlanarPoint> p) : pts(std::move(p)) {
        cum.resize(pts.size(), 0.0);
        for (std::size_t i = 1; i < pts.size(); ++i)
            cum[i] = cum[i - 1] + std::hypot(pts[i].first - pts[i - 1].first,
                                             pts[i].second - pts[i - 1].second);
    }

    double length() const { return cum.back(); }

    // Position and unit tangent at arc length s (clamped to [0, L]).
    std::pair<PlanarPoint, PlanarPoint> eval(double s) const {
        s = std::clamp(s, 0.0, length());
        std::size_t i = 1;
        while (i + 1 < pts.size() && cum[i] < s) ++i;
        const double seg = cum[i] - cum[i - 1];
        const double f = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
        const PlanarPoint& a = pts[i - 1];
        const PlanarPoint& b = pts[i];
        PlanarPoint pos{a.first + f * (b.first - a.first), a.second + f * (b.second - a.second)};
        PlanarPoint tan{0.0, 0.0};
        if (seg > 0.0) tan = {(b.first - a.first) / seg, (b.second - a.second) / seg};
        return {pos, tan};
    }

    // Corner indices with cum strictly inside (s_from, s_to).
    std::vector<std::size_t> corners_between(double s_from, double s_to) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (cum[i] > s_from && cum[i] < s_to) out.push_back(i);
        return out;
    }
};

std::vector<PlanarPoint> parse_corners(const std::string& raw, const std::string& route) {
    std::vector<PlanarPoint> corners;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        auto semi = raw.find(';', pos);
        std::string pair = raw.substr(pos, semi == std::string::npos ? semi : semi - pos);
        pos = semi == std::string::npos ? raw.size() : semi + 1;
        auto comma = pair.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("route " + route + ": corner needs x,y: " + pair);
        try {
            std::size_t used = 0;
            double x = std::stod(pair.substr(0, comma), &used);
            double y = std::stod(pair.substr(comma + 1), &used);
            corners.emplace_back(x, y);
        } catch (const std::exception&) {
            throw std::runtime_error("route " + route + ": bad corner: " + pair);
        }
    }
    if (corners.size() < 2)
        throw std::runtime_error("route " + route + ": needs at least 2 corners");
    for (const auto& [x, y] : corners)
        if (std::abs(x) > 80000.0 || std::abs(y) > 80000.0)
            throw std::runtime_error("route " + route + ": corner outside TRACON bounds");
    return corners;
}

const std::set<std::string> kRouteKeys = {
    "corners",      "destination",   "op_type",     "count",       "speed_mps",
    "lateral_sigma_m", "jitter_sigma_m", "entry_jitter", "exit_jitter", "alt_start_m",
    "alt_end_m",
};
const std::set<std::string> kAnomalyKeys = {"kind", "route", "count", "magnitude"};
const std::set<std::string> kCorpusKeys = {"t0", "spacing_s", "dt_s", "category_mix_pct_jet"};

}  // namespace

AnomalyKind anomaly_kind_from_string(const std::string& s) {
    if (s == "holding") return AnomalyKind::holding;
    if (s == "vectoring") return AnomalyKind::vectoring;
    if (s == "direct") return AnomalyKind::direct;
    throw std::runtime_error("unknown anomaly kind: " + s);
}

const char* to_string(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::holding: return "holding";
        case AnomalyKind::vectoring: return "vectoring";
        case AnomalyKind::direct: return "direct";
    }
    return "holding";
}

CorpusSpec parse_corpus_spec(const std::string& ini_text) {
    const IniDoc doc = parse_ini(ini_text);
    CorpusSpec spec;

    for (const auto& [section, keys] : doc.sections) {
        if (section == "run" || section.empty()) continue;  // shared config file
        if (section == "corpus") {
            for (const auto& [k, v] : keys) {
                (void)v;
                if (!kCorpusKeys.count(k))
                    throw std::runtime_error("unknown key in [corpus]: " + k);
            }
            spec.t0 = ini_int(doc, "corpus", "t0", spec.t0);
            spec.spacing_s = ini_int(doc, "corpus", "spacing_s", spec.spacing_s);
            spec.dt_s = ini_int(doc, "corpus", "dt_s", spec.dt_s);
            spec.category_mix_pct_jet = static_cast<int>(
                ini_int(doc, "corpus", "category_mix_pct_jet", spec.category_mix_pct_jet));
            continue;
        }
        if (section.rfind("route.", 0) == 0) {
            RouteTemplate r;
            r.name = section.substr(6);
            if (r.name.empty()) throw std::runtime_error("empty route name");
            for (const auto& [k, v] : keys) {
                (void)v;
                if (!kRouteKeys.count(k))
                    throw std::runtime_error("unknown key in [" + section + "]: " + k);
            }
            r.corners = parse_corners(doc.get(section, "corners"), r.name);
            r.destination = ini_string(doc, section, "destination", r.destination);
            r.op_type = op_type_from_string(ini_string(doc, section, "op_type", "arrival"));
            r.count = static_cast<int>(ini_int(doc, section, "count", 0));
            r.speed_mps = ini_double(doc, section, "speed_mps", r.speed_mps);
            r.lateral_sigma_m = ini_double(doc, section, "lateral_sigma_m", r.lateral_sigma_m);
            r.jitter_sigma_m = ini_double(doc, section, "jitter_sigma_m", r.jitter_sigma_m);
            r.entry_jitter = ini_double(doc, section, "entry_jitter", r.entry_jitter);
            r.exit_jitter = ini_double(doc, section, "exit_jitter", r.exit_jitter);
            r.alt_start_m = ini_double(doc, section, "alt_start_m", r.alt_start_m);
            r.alt_end_m = ini_double(doc, section, "alt_end_m", r.alt_end_m);
            if (r.speed_mps <= 0.0)
                throw std::runtime_error("route " + r.name + ": speed_mps must be positive");
            if (r.entry_jitter < 0.0 || r.entry_jitter > 0.9)
                throw std::runtime_error("route " + r.name + ": entry_jitter must be in [0, 0.9]");
            if (r.exit_jitter < 0.0 || r.exit_jitter > 0.9)
                throw std::runtime_error("route " + r.name + ": exit_jitter must be in [0, 0.9]");
            spec.routes.push_back(std::move(r));
            continue;
        }
        if (section.rfind("anomaly.", 0) == 0) {
            AnomalySpec a;
            a.name = section.substr(8);
            if (a.name.empty()) throw std::runtime_error("empty anomaly name");
            for (const auto& [k, v] : keys) {
                (void)v;
                if (!kAnomalyKeys.count(k))
                    throw std::runtime_error("unknown key in [" + section + "]: " + k);
            }
            a.kind = anomaly_kind_from_string(doc.get(section, "kind"));
            a.route = doc.get(section, "route");
            a.count = static_cast<int>(ini_int(doc, section, "count", 0));
            a.magnitude = ini_double(doc, section, "magnitude", a.magnitude);
            if (a.magnitude <= 0.0)
                throw std::runtime_error("anomaly " + a.name + ": magnitude must be positive");
            spec.anomalies.push_back(std::move(a));
            continue;
        }
        throw std::runtime_error("unknown section [" + section + "]");
    }

    if (spec.dt_s < 1 || spec.dt_s > 30)
        throw std::runtime_error("dt_s must be in [1, 30]");
    if (spec.spacing_s < 1) throw std::runtime_error("spacing_s must be positive");
    for (const auto& a : spec.anomalies) {
        const bool known = std::any_of(spec.routes.begin(), spec.routes.end(),
                                       [&a](const RouteTemplate& r) { return r.name == a.route; });
        if (!known)
            throw std::runtime_error("anomaly " + a.name + " references unknown route " + a.route);
    }
    return spec;
}

namespace {

struct FlightPlan {
    const RouteTemplate* route;
    const AnomalySpec* anomaly;  // nullptr for nominal flights
};

// Flown corner chain for one flight, starting at arc s0 of the route.
std::vector<PlanarPoint> flown_corners(const Polyline& base, double s0, const AnomalySpec* anomaly,
                                       double speed_mps, Rand& rng) {
    const double L = base.length();
    std::vector<PlanarPoint> out;
    out.push_back(base.eval(s0).first);

    if (anomaly == nullptr) {
        for (std::size_t i : base.corners_between(s0, L)) out.push_back(base.pts[i]);
        out.push_back(base.pts.back());
        return out;
    }

    switch (anomaly->kind) {
        case AnomalyKind::direct: {
            out.push_back(base.pts.back());
            return out;
        }
        case AnomalyKind::holding: {
            double s_h = L * rng.uniform(0.35, 0.65);
            if (s_h < s0 + 2000.0) s_h = s0 + 0.3 * (L - s0);
            for (std::size_t i : base.corners_between(s0, s_h)) out.push_back(base.pts[i]);
            const auto [p, tan] = base.eval(s_h);
            const double r = 2500.0 * anomaly->magnitude;
            const PlanarPoint center{p.first - tan.second * r, p.second + tan.first * r};
            const double theta0 = std::atan2(p.second - center.second, p.first - center.first);
            for (int j = 1; j <= 36; ++j) {  // one full left-hand loop
                const double th = theta0 + kTwoPi * j / 36.0;
                out.emplace_back(center.first + r * std::cos(th),
                                 center.second + r * std::sin(th));
            }
            for (std::size_t i : base.corners_between(s_h, L)) out.push_back(base.pts[i]);
            out.push_back(base.pts.back());
            return out;
        }
        case AnomalyKind::vectoring: {
            double s_v = L * rng.uniform(0.3, 0.6);
            if (s_v < s0 + 2000.0) s_v = s0 + 0.3 * (L - s0);
            for (std::size_t i : base.corners_between(s0, s_v)) out.push_back(base.pts[i]);
            const auto [p, tan] = base.eval(s_v);
            const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
            const double off = sign * (50.0 + 20.0 * rng.uniform()) * kDeg;
            const double dur = std::max(60.0, 90.0 * anomaly->magnitude);
            const double dlen = dur * speed_mps;
            const double psi = std::atan2(tan.second, tan.first) + off;
            out.push_back(p);
            out.emplace_back(p.first + dlen * std::cos(psi), p.second + dlen * std::sin(psi));
            const double s_rejoin = std::min(L, s_v + 1.5 * dlen);
            out.push_back(base.eval(s_rejoin).first);
            for (std::size_t i : base.corners_between(s_rejoin, L)) out.push_back(base.pts[i]);
            out.push_back(base.pts.back());
            return out;
        }
    }
    return out;
}

const char* kOrigins[] = {"LAX", "SEA", "DEN", "PHX", "LAS", "PDX", "SLC"};

}  // namespace

SyntheticCorpus generate_synthetic(const CorpusSpec& spec, std::uint64_t seed) {
    if (spec.routes.empty()) throw std::runtime_error("corpus spec has zero routes");

    Rand rng(seed);
    std::vector<FlightPlan> plans;
    for (const auto& r : spec.routes)
        for (int i = 0; i < r.count; ++i) plans.push_back({&r, nullptr});
    for (const auto& a : spec.anomalies) {
        const auto* route = &*std::find_if(spec.routes.begin(), spec.routes.end(),
                                           [&a](const RouteTemplate& r) { return r.name == a.route; });
        for (int i = 0; i < a.count; ++i) plans.push_back({route, &a});
    }
    if (plans.empty()) throw std::runtime_error("corpus spec has zero flights");

    for (std::size_t i = plans.size(); i > 1; --i)  // schedule shuffle
        std::swap(plans[i - 1], plans[rng.below(i)]);

    SyntheticCorpus corpus;
    std::int64_t start = spec.t0;
    int flight_no = 0;

    for (const FlightPlan& plan : plans) {
        const RouteTemplate& route = *plan.route;
        const Polyline base(route.corners);

        const double offset = rng.normal(route.lateral_sigma_m);
        const double speed = route.speed_mps * rng.uniform(0.9, 1.1);
        const double s0 = base.length() * route.entry_jitter * rng.uniform();
        const double exit_cut = route.exit_jitter * rng.uniform();
        const std::string origin = kOrigins[rng.below(std::size(kOrigins))];
        const std::uint64_t cat_draw = rng.below(100);
        const double z_offset = rng.normal(60.0);

        const Polyline flown(flown_corners(base, s0, plan.anomaly, route.speed_mps, rng));
        const double lf = flown.length();
        const double step = speed * static_cast<double>(spec.dt_s);
        const auto n_steps = static_cast<std::size_t>(std::floor(lf * (1.0 - exit_cut) / step));
        if (n_steps < 1)
            throw std::runtime_error("route " + route.name + ": shorter than one radar interval");

        Trajectory traj;
        traj.points.reserve(n_steps + 1);
        for (std::size_t k = 0; k <= n_steps; ++k) {
            const double s = static_cast<double>(k) * step;
            const auto [pos, tan] = flown.eval(s);
            const double jx = rng.normal(route.jitter_sigma_m);
            const double jy = rng.normal(route.jitter_sigma_m);
            TrackPoint p;
            p.x = pos.first - tan.second * offset + jx;
            p.y = pos.second + tan.first * offset + jy;
            p.z = route.alt_start_m + (route.alt_end_m - route.alt_start_m) * s / lf + z_offset;
            p.x = std::clamp(p.x, -80000.0, 80000.0);
            p.y = std::clamp(p.y, -80000.0, 80000.0);
            p.z = std::clamp(p.z, 0.0, 6000.0);
            p.t = start + static_cast<std::int64_t>(k) * spec.dt_s;
            traj.points.push_back(p);
        }

        ++flight_no;
        char id[16];
        std::snprintf(id, sizeof(id), "SYN%04d", flight_no);
        FlightMetadata& m = traj.meta;
        m.flight_id = id;
        m.op_type = route.op_type;
        m.origin = route.op_type == OpType::arrival ? origin : route.destination;
        m.destination = route.op_type == OpType::arrival ? route.destination : origin;
        m.category = cat_draw < static_cast<std::uint64_t>(spec.category_mix_pct_jet)
                         ? AircraftCategory::jet
                         : (cat_draw % 3 == 0 ? AircraftCategory::regional
                                              : (cat_draw % 3 == 1 ? AircraftCategory::business
                                                                   : AircraftCategory::turboprop));
        m.flight_rules = FlightRules::IFR;
        m.start_time = start;
        m.n_points = traj.points.size();
        m.synth_template = plan.anomaly ? "anomaly." + plan.anomaly->name : "route." + route.name;

        corpus.flights.push_back(std::move(traj));
        start += static_cast<std::int64_t>(
            std::llround(static_cast<double>(spec.spacing_s) * rng.uniform(0.5, 1.5)));
    }
    return corpus;
}

}  // namespace trajmine
