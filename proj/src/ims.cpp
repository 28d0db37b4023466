#include "trajmine/ims.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "trajmine/config.hpp"

namespace trajmine {

using nlohmann::json;

namespace {

double norm_component(const NormalizationParams& norm, std::size_t group, double v) {
    const double span = norm.group_max[group] - norm.group_min[group];
    return span > 0.0 ? (v - norm.group_min[group]) / span : 0.5;
}

void fill_values(Fragment& f, const TrackPoint* pts, const NormalizationParams& norm) {
    for (std::size_t i = 0; i < kFragmentPoints; ++i) {
        f.values[3 * i] = norm_component(norm, 0, pts[i].x);
        f.values[3 * i + 1] = norm_component(norm, 1, pts[i].y);
        f.values[3 * i + 2] = norm_component(norm, 2, pts[i].z);
    }
}

double box_gap(const ImsCluster& a, const ImsCluster& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kFragmentDim; ++i) {
        const double g = std::max({0.0, b.lo[i] - a.hi[i], a.lo[i] - b.hi[i]});
        s += g * g;
    }
    return std::sqrt(s);
}

std::string kb_canonical(const ImsKnowledgeBase& kb) {
    std::ostringstream out;
    out << "trained_fragments=" << kb.trained_fragments << '\n';
    for (std::size_t g = 0; g < kFeatureGroups; ++g)
        out << "norm[" << g << "]=" << format_double(kb.norm.group_min[g]) << ','
            << format_double(kb.norm.group_max[g]) << '\n';
    for (const auto& c : kb.clusters) {
        out << "cluster count=" << c.count << " lo=";
        for (double v : c.lo) out << format_double(v) << ',';
        out << " hi=";
        for (double v : c.hi) out << format_double(v) << ',';
        out << '\n';
    }
    return out.str();
}

std::string kb_fingerprint(const ImsKnowledgeBase& kb) {
    std::uint64_t h = fnv1a64(kb_canonical(kb));
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    return std::string(buf, 16);
}

}  // namespace

std::vector<Fragment> fragment_trajectory(const ResampledTrajectory& rt,
                                          const NormalizationParams& norm) {
    if (rt.points.size() != kFragmentPoints * kFragmentsPerFlight)
        throw std::invalid_argument("fragment_trajectory: expected 50 points, got " +
                                    std::to_string(rt.points.size()));
    std::vector<Fragment> out(kFragmentsPerFlight);
    for (std::size_t f = 0; f < kFragmentsPerFlight; ++f) {
        out[f].flight_id = rt.meta.flight_id;
        out[f].index = f;
        fill_values(out[f], rt.points.data() + f * kFragmentPoints, norm);
    }
    return out;
}

Fragment make_fragment(const std::vector<TrackPoint>& five_points, const std::string& flight_id,
                       const NormalizationParams& norm) {
    if (five_points.size() != kFragmentPoints)
        throw std::invalid_argument("make_fragment: expected 5 points, got " +
                                    std::to_string(five_points.size()));
    Fragment f;
    f.flight_id = flight_id;
    fill_values(f, five_points.data(), norm);
    return f;
}

std::size_t default_ims_k(std::size_t n_fragments) {
    if (n_fragments == 0) return 0;
    const auto root = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(n_fragments))));
    return std::min(n_fragments, std::max<std::size_t>(16, root));
}

ImsKnowledgeBase train_ims(const std::vector<Fragment>& fragments, std::size_t initial_k,
                           double merge_eps, const NormalizationParams& norm,
                           std::uint64_t seed) {
    if (fragments.empty()) throw std::invalid_argument("train_ims: empty input");
    if (initial_k < 1 || initial_k > fragments.size())
        throw std::invalid_argument("train_ims: initial_k must be in [1, |fragments|]");
    if (merge_eps < 0.0) throw std::invalid_argument("train_ims: merge_eps must be >= 0");

    std::vector<std::vector<double>> pts;
    pts.reserve(fragments.size());
    for (const auto& f : fragments) pts.emplace_back(f.values.begin(), f.values.end());

    KmeansParams params;
    params.k = initial_k;
    params.restarts = 4;
    params.seed = seed;
    const ClusterResult res = kmeans(pts, params);

    ImsKnowledgeBase kb;
    kb.norm = norm;
    for (std::size_t c = 0; c < initial_k; ++c) {
        ImsCluster box;
        box.lo.fill(std::numeric_limits<double>::infinity());
        box.hi.fill(-std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (static_cast<std::size_t>(res.labels[i]) != c) continue;
            ++box.count;
            for (std::size_t j = 0; j < kFragmentDim; ++j) {
                box.lo[j] = std::min(box.lo[j], pts[i][j]);
                box.hi[j] = std::max(box.hi[j], pts[i][j]);
            }
        }
        if (box.count > 0) kb.clusters.push_back(box);
    }

    // closest pair first, until every remaining gap exceeds merge_eps
    while (kb.clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 0;
        for (std::size_t a = 0; a < kb.clusters.size(); ++a)
            for (std::size_t b = a + 1; b < kb.clusters.size(); ++b) {
                const double g = box_gap(kb.clusters[a], kb.clusters[b]);
                if (g < best) {
                    best = g;
                    ba = a;
                    bb = b;
                }
            }
        if (best > merge_eps) break;
        ImsCluster& keep = kb.clusters[ba];
        const ImsCluster& drop = kb.clusters[bb];
        for (std::size_t j = 0; j < kFragmentDim; ++j) {
            keep.lo[j] = std::min(keep.lo[j], drop.lo[j]);
            keep.hi[j] = std::max(keep.hi[j], drop.hi[j]);
        }
        keep.count += drop.count;
        kb.clusters.erase(kb.clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }

    kb.trained_fragments = fragments.size();
    for (const auto& f : fragments)
        if (ims_score(kb, f) > 0.0)
            throw std::logic_error("train_ims: training fragment escaped every box");
    kb.fingerprint = kb_fingerprint(kb);
    return kb;
}

double ims_score(const ImsKnowledgeBase& kb, const Fragment& f) {
    if (kb.clusters.empty()) throw std::invalid_argument("ims_score: empty knowledge base");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : kb.clusters) {
        double s = 0.0;
        for (std::size_t i = 0; i < kFragmentDim; ++i) {
            const double g = std::max({0.0, c.lo[i] - f.values[i], f.values[i] - c.hi[i]});
            s += g * g;
        }
        best = std::min(best, s);
        if (best == 0.0) return 0.0;
    }
    return std::sqrt(best);
}

Conformance ims_classify(const ImsKnowledgeBase& kb, const Fragment& f, double tau) {
    if (tau < 0.0) throw std::invalid_argument("ims_classify: tau must be >= 0");
    return ims_score(kb, f) <= tau ? Conformance::conforming : Conformance::anomalous;
}

std::string ims_kb_to_json(const ImsKnowledgeBase& kb, int schema_version,
                           const std::string& config_fingerprint) {
    json doc;
    doc["schema_version"] = schema_version;
    doc["config_fingerprint"] = config_fingerprint;
    doc["kb_fingerprint"] = kb.fingerprint.empty() ? kb_fingerprint(kb) : kb.fingerprint;
    doc["trained_fragments"] = kb.trained_fragments;
    doc["norm"] = {{"group_min", kb.norm.group_min}, {"group_max", kb.norm.group_max}};
    json arr = json::array();
    for (const auto& c : kb.clusters) {
        json jc;
        jc["lo"] = c.lo;
        jc["hi"] = c.hi;
        jc["count"] = c.count;
        arr.push_back(std::move(jc));
    }
    doc["clusters"] = std::move(arr);
    return doc.dump(2) + "\n";
}

ImsKnowledgeBase ims_kb_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad knowledge base json: ") + e.what());
    }
    ImsKnowledgeBase kb;
    std::string stored;
    try {
        stored = doc.at("kb_fingerprint").get<std::string>();
        kb.trained_fragments = doc.at("trained_fragments").get<std::size_t>();
        for (std::size_t g = 0; g < kFeatureGroups; ++g) {
            kb.norm.group_min[g] = doc.at("norm").at("group_min").at(g).get<double>();
            kb.norm.group_max[g] = doc.at("norm").at("group_max").at(g).get<double>();
        }
        for (const auto& jc : doc.at("clusters")) {
            ImsCluster c;
            for (std::size_t i = 0; i < kFragmentDim; ++i) {
                c.lo[i] = jc.at("lo").at(i).get<double>();
                c.hi[i] = jc.at("hi").at(i).get<double>();
                if (c.lo[i] > c.hi[i])
                    throw std::runtime_error("bad knowledge base json: lo > hi");
            }
            c.count = jc.at("count").get<std::size_t>();
            kb.clusters.push_back(c);
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("bad knowledge base json: ") + e.what());
    }
    kb.fingerprint = kb_fingerprint(kb);
    if (kb.fingerprint != stored)
        throw std::runtime_error("knowledge base fingerprint mismatch: file says " + stored +
                                 ", contents hash to " + kb.fingerprint);
    return kb;
}

}  // namespace trajmine
