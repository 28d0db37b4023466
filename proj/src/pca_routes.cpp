#include "trajmine/pca_routes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "json.hpp"
#include "trajmine/geom.hpp"

namespace trajmine {

using nlohmann::json;

const std::array<const char*, kFeatureGroups> kFeatureGroupNames = {
    "p_x", "p_y", "p_z", "r", "d", "cos_theta", "sin_theta", "cos_psi", "sin_psi"};

namespace {

constexpr std::size_t kGroupLen = kFeatureSamples;

std::size_t group_of(std::size_t component) { return component / kGroupLen; }

}  // namespace

FeatureVector augment(const ResampledTrajectory& rt, const AugmentConfig& cfg) {
    if (rt.points.size() != cfg.n_samples)
        throw std::invalid_argument("augment: expected " + std::to_string(cfg.n_samples) +
                                    " points, got " + std::to_string(rt.points.size()));
    const std::size_t n = cfg.n_samples;
    FeatureVector v;
    v.reserve(9 * n);

    for (const auto& p : rt.points) v.push_back(p.x);
    for (const auto& p : rt.points) v.push_back(p.y);
    for (const auto& p : rt.points) v.push_back(p.z);
    for (const auto& p : rt.points) v.push_back(std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z));
    for (const auto& p : rt.points) {
        const double dx = p.x - cfg.x_ref;
        const double dy = p.y - cfg.y_ref;
        v.push_back(std::sqrt(dx * dx + dy * dy + p.z * p.z));
    }

    // Theta: planar bearing about the radar; a point at the origin
    // carries the previous bearing forward (0 for the first point).
    std::vector<double> theta(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = rt.points[i];
        if (p.x == 0.0 && p.y == 0.0)
            theta[i] = i > 0 ? theta[i - 1] : 0.0;
        else
            theta[i] = std::atan2(p.y, p.x);
    }
    for (double t : theta) v.push_back(std::cos(t));
    for (double t : theta) v.push_back(std::sin(t));

    // Psi: the filtered source-heading channel cached by resample();
    // recomputed from the sampled points when the cache is absent.
    std::vector<double> psi;
    if (rt.headings.size() == n) {
        psi = rt.headings;
    } else {
        Trajectory tmp;
        tmp.meta = rt.meta;
        tmp.points = rt.points;
        const HeadingSeries series = lowpass(estimate_headings(tmp), 0.4);
        psi.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t interior = std::clamp<std::size_t>(i + 1, 2, n - 1);
            psi[i] = series.filtered[interior - 2];
        }
    }
    for (double p : psi) v.push_back(std::cos(p));
    for (double p : psi) v.push_back(std::sin(p));
    return v;
}

NormalizationParams fit_normalization(const std::vector<FeatureVector>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("fit_normalization: empty input");
    NormalizationParams params;
    params.group_min.fill(std::numeric_limits<double>::infinity());
    params.group_max.fill(-std::numeric_limits<double>::infinity());
    for (const auto& v : vectors) {
        if (v.size() != kFeatureDim)
            throw std::invalid_argument("fit_normalization: vector dimension != 450");
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::size_t g = group_of(i);
            params.group_min[g] = std::min(params.group_min[g], v[i]);
            params.group_max[g] = std::max(params.group_max[g], v[i]);
        }
    }
    return params;
}

FeatureVector normalize(const NormalizationParams& params, const FeatureVector& v) {
    FeatureVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t g = group_of(i);
        const double span = params.group_max[g] - params.group_min[g];
        out[i] = span > 0.0 ? (v[i] - params.group_min[g]) / span : 0.5;
    }
    return out;
}

FeatureVector denormalize(const NormalizationParams& params, const FeatureVector& v) {
    FeatureVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t g = group_of(i);
        const double span = params.group_max[g] - params.group_min[g];
        out[i] = span > 0.0 ? params.group_min[g] + v[i] * span
                            : params.group_min[g];
    }
    return out;
}

PcaModel fit_pca(const std::vector<FeatureVector>& vectors, std::size_t p) {
    const std::size_t n = vectors.size();
    if (n < p + 1) throw std::invalid_argument("fit_pca: need at least p+1 vectors");
    const std::size_t d = vectors[0].size();

    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
        if (vectors[i].size() != d) throw std::invalid_argument("fit_pca: mixed dimensions");
        for (std::size_t j = 0; j < d; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vectors[i][j];
    }
    const Eigen::RowVectorXd mean = m.colwise().mean();
    m.rowwise() -= mean;
    const Eigen::MatrixXd cov = (m.transpose() * m) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fit_pca: eigendecomposition failed");
    const Eigen::VectorXd evals = solver.eigenvalues();    // ascending
    const Eigen::MatrixXd evecs = solver.eigenvectors();

    const double max_eval = std::max(evals(evals.size() - 1), 0.0);
    const double rank_tol = std::max(1e-12, 1e-9 * max_eval);

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);
    for (std::size_t c = 0; c < p; ++c) {
        const Eigen::Index idx = static_cast<Eigen::Index>(d - 1 - c);
        if (idx < 0 || evals(idx) <= rank_tol) {
            model.rank_deficient = true;
            break;
        }
        model.explained_variance.push_back(evals(idx));
        std::vector<double> comp(d);
        for (std::size_t j = 0; j < d; ++j) comp[j] = evecs(static_cast<Eigen::Index>(j), idx);
        // fix the sign so serialized models are stable: largest-magnitude
        // entry positive
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(comp[j]) > std::abs(comp[arg])) arg = j;
        if (comp[arg] < 0.0)
            for (double& x : comp) x = -x;
        model.components.push_back(std::move(comp));
    }
    return model;
}

std::vector<double> project(const PcaModel& model, const FeatureVector& v) {
    if (v.size() != model.mean.size())
        throw std::invalid_argument("project: dimension mismatch");
    std::vector<double> out;
    out.reserve(model.components.size());
    for (const auto& comp : model.components) {
        double dot = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) dot += (v[i] - model.mean[i]) * comp[i];
        out.push_back(dot);
    }
    return out;
}

RouteModel fit_route_model(const std::vector<ResampledTrajectory>& flights,
                           const DbscanParams& dbscan_params, std::size_t p,
                           const AugmentConfig& cfg) {
    if (flights.size() < dbscan_params.min_pts)
        throw std::invalid_argument("fit_route_model: fewer flights than min_pts");

    std::vector<FeatureVector> raw;
    raw.reserve(flights.size());
    for (const auto& f : flights) raw.push_back(augment(f, cfg));

    RouteModel model;
    model.augment_cfg = cfg;
    model.norm = fit_normalization(raw);
    std::vector<FeatureVector> normed;
    normed.reserve(raw.size());
    for (const auto& v : raw) normed.push_back(normalize(model.norm, v));

    model.pca = fit_pca(normed, p);

    std::vector<std::vector<double>> projected;
    projected.reserve(normed.size());
    for (const auto& v : normed) projected.push_back(project(model.pca, v));

    DbscanParams eff = dbscan_params;
    if (eff.eps <= 0.0) {
        double diam2 = 0.0;
        for (std::size_t i = 0; i < projected.size(); ++i)
            for (std::size_t j = i + 1; j < projected.size(); ++j)
                diam2 = std::max(diam2, squared_distance(projected[i], projected[j]));
        eff.eps = 0.05 * std::sqrt(diam2);
        if (eff.eps <= 0.0) eff.eps = 1e-9;  // all projections identical
    }
    model.dbscan_effective = eff;

    const ClusterResult clusters = dbscan(projected, eff);
    model.cluster_labels = clusters.labels;
    model.n_clusters = clusters.n_clusters;
    for (const auto& f : flights) model.flight_ids.push_back(f.meta.flight_id);

    for (std::size_t c = 0; c < clusters.n_clusters; ++c) {
        ResampledTrajectory centroid;
        centroid.meta.flight_id = "centroid_" + std::to_string(c);
        centroid.points.assign(cfg.n_samples, TrackPoint{});
        std::size_t count = 0;
        for (std::size_t i = 0; i < flights.size(); ++i) {
            if (static_cast<std::size_t>(clusters.labels[i]) != c) continue;
            ++count;
            for (std::size_t l = 0; l < cfg.n_samples; ++l) {
                centroid.points[l].x += flights[i].points[l].x;
                centroid.points[l].y += flights[i].points[l].y;
                centroid.points[l].z += flights[i].points[l].z;
            }
        }
        for (std::size_t l = 0; l < cfg.n_samples; ++l) {
            centroid.points[l].x /= static_cast<double>(count);
            centroid.points[l].y /= static_cast<double>(count);
            centroid.points[l].z /= static_cast<double>(count);
            centroid.points[l].t = static_cast<std::int64_t>(l);
        }
        centroid.meta.n_points = cfg.n_samples;
        model.centroids.push_back(std::move(centroid));
    }
    return model;
}

namespace {

OutlierReport::Row& row_for(std::vector<OutlierReport::Row>& rows, const std::string& key) {
    for (auto& r : rows)
        if (r.key == key) return r;
    rows.push_back({key, 0, 0, 0.0});
    return rows.back();
}

void finish(std::vector<OutlierReport::Row>& rows) {
    std::sort(rows.begin(), rows.end(),
              [](const OutlierReport::Row& a, const OutlierReport::Row& b) { return a.key < b.key; });
    for (auto& r : rows)
        r.frequency = r.total > 0 ? static_cast<double>(r.outliers) / static_cast<double>(r.total)
                                  : 0.0;
}

}  // namespace

OutlierReport outlier_report(const RouteModel& model, const std::vector<FlightMetadata>& meta) {
    std::map<std::string, const FlightMetadata*> by_id;
    for (const auto& m : meta) by_id[m.flight_id] = &m;

    OutlierReport report;
    for (std::size_t i = 0; i < model.flight_ids.size(); ++i) {
        auto it = by_id.find(model.flight_ids[i]);
        if (it == by_id.end()) continue;
        const FlightMetadata& m = *it->second;
        const bool outlier = model.cluster_labels[i] == kOutlier;

        const std::int64_t day = m.start_time / 86400;
        const std::int64_t hour = (m.start_time % 86400) / 3600;
        char day_key[32], hour_key[8];
        std::snprintf(day_key, sizeof(day_key), "day_%lld", static_cast<long long>(day));
        std::snprintf(hour_key, sizeof(hour_key), "%02lld", static_cast<long long>(hour));

        auto& cat = row_for(report.by_category, to_string(m.category));
        auto& d = row_for(report.by_day, day_key);
        auto& h = row_for(report.by_hour, hour_key);
        for (auto* r : {&cat, &d, &h}) {
            ++r->total;
            if (outlier) ++r->outliers;
        }
    }
    finish(report.by_category);
    finish(report.by_day);
    finish(report.by_hour);
    return report;
}

std::string outlier_report_to_csv(const OutlierReport& report) {
    std::ostringstream out;
    out << "group,key,total,outliers,frequency\n";
    auto dump = [&out](const char* group, const std::vector<OutlierReport::Row>& rows) {
        for (const auto& r : rows)
            out << group << ',' << r.key << ',' << r.total << ',' << r.outliers << ','
                << format_double(r.frequency) << '\n';
    };
    dump("category", report.by_category);
    dump("day", report.by_day);
    dump("hour", report.by_hour);
    return out.str();
}

namespace {

json points_to_json(const std::vector<TrackPoint>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y, p.z, p.t});
    return arr;
}

std::vector<TrackPoint> points_from_json(const json& arr) {
    std::vector<TrackPoint> out;
    for (const auto& p : arr)
        out.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>(),
                       p.at(3).get<std::int64_t>()});
    return out;
}

}  // namespace

std::string route_model_to_json(const RouteModel& model, int schema_version,
                                const std::string& config_fingerprint) {
    json doc;
    doc["schema_version"] = schema_version;
    doc["config_fingerprint"] = config_fingerprint;
    doc["augment"] = {{"x_ref", model.augment_cfg.x_ref},
                      {"y_ref", model.augment_cfg.y_ref},
                      {"n_samples", model.augment_cfg.n_samples}};
    doc["norm"] = {{"group_min", model.norm.group_min}, {"group_max", model.norm.group_max}};
    doc["pca"] = {{"mean", model.pca.mean},
                  {"components", model.pca.components},
                  {"explained_variance", model.pca.explained_variance},
                  {"rank_deficient", model.pca.rank_deficient}};
    doc["flight_ids"] = model.flight_ids;
    doc["cluster_labels"] = model.cluster_labels;
    doc["n_clusters"] = model.n_clusters;
    doc["dbscan"] = {{"eps", model.dbscan_effective.eps},
                     {"min_pts", model.dbscan_effective.min_pts}};
    json cents = json::array();
    for (const auto& c : model.centroids) cents.push_back(points_to_json(c.points));
    doc["centroids"] = std::move(cents);
    return doc.dump(2) + "\n";
}

RouteModel route_model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad route model json: ") + e.what());
    }
    RouteModel model;
    try {
        const auto& aug = doc.at("augment");
        model.augment_cfg.x_ref = aug.at("x_ref").get<double>();
        model.augment_cfg.y_ref = aug.at("y_ref").get<double>();
        model.augment_cfg.n_samples = aug.at("n_samples").get<std::size_t>();
        const auto& norm = doc.at("norm");
        for (std::size_t g = 0; g < kFeatureGroups; ++g) {
            model.norm.group_min[g] = norm.at("group_min").at(g).get<double>();
            model.norm.group_max[g] = norm.at("group_max").at(g).get<double>();
        }
        const auto& pca = doc.at("pca");
        model.pca.mean = pca.at("mean").get<std::vector<double>>();
        model.pca.components = pca.at("components").get<std::vector<std::vector<double>>>();
        model.pca.explained_variance = pca.at("explained_variance").get<std::vector<double>>();
        model.pca.rank_deficient = pca.at("rank_deficient").get<bool>();
        model.flight_ids = doc.at("flight_ids").get<std::vector<std::string>>();
        model.cluster_labels = doc.at("cluster_labels").get<std::vector<int>>();
        model.n_clusters = doc.at("n_clusters").get<std::size_t>();
        model.dbscan_effective.eps = doc.at("dbscan").at("eps").get<double>();
        model.dbscan_effective.min_pts = doc.at("dbscan").at("min_pts").get<std::size_t>();
        for (const auto& c : doc.at("centroids")) {
            ResampledTrajectory rt;
            rt.points = points_from_json(c);
            rt.meta.flight_id = "centroid_" + std::to_string(model.centroids.size());
            rt.meta.n_points = rt.points.size();
            model.centroids.push_back(std::move(rt));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad route model json: ") + e.what());
    }
    if (model.cluster_labels.size() != model.flight_ids.size())
        throw std::runtime_error("bad route model json: labels/ids length mismatch");
    return model;
}

std::string centroids_to_csv(const RouteModel& model) {
    std::ostringstream out;
    std::vector<Trajectory> flights;
    for (const auto& c : model.centroids) {
        Trajectory t;
        t.meta = c.meta;
        t.points = c.points;
        flights.push_back(std::move(t));
    }
    serialize_tracks(flights, out);
    return out.str();
}

}  // namespace trajmine
