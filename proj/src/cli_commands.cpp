#include "trajmine/cli_commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "trajmine/geom.hpp"
#include "trajmine/ims.hpp"
#include "trajmine/monitor.hpp"
#include "trajmine/pca_routes.hpp"
#include "trajmine/synthetic.hpp"
#include "trajmine/waypoint_routes.hpp"

namespace trajmine::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kSchemaVersion = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

fs::path prepare_out_dir(const GlobalOptions& g) {
    fs::path dir(g.out_dir);
    fs::create_directories(dir);
    return dir;
}

// Ingest + destination/op/length filter, shared by the pipeline
// commands.
std::vector<Trajectory> load_filtered(const std::string& tracks_csv,
                                      const std::string& metadata_jsonl, const RunConfig& cfg) {
    std::ifstream tracks(tracks_csv, std::ios::binary);
    if (!tracks) throw std::runtime_error("cannot open file: " + tracks_csv);
    std::ifstream meta(metadata_jsonl, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot open file: " + metadata_jsonl);
    const auto flights = parse_tracks(tracks, meta);
    auto filtered = filter_flights(flights, cfg.airport, op_type_from_string(cfg.op_type),
                                   static_cast<std::size_t>(cfg.min_track_points));
    if (filtered.empty())
        throw std::runtime_error("no " + cfg.op_type + " flights for " + cfg.airport +
                                 " with at least " + std::to_string(cfg.min_track_points) +
                                 " points");
    return filtered;
}

int fail(int code, const std::string& command, const std::exception& e) {
    std::cerr << "trajmine " << command << ": " << e.what() << '\n';
    return code;
}

}  // namespace

RunConfig GlobalOptions::load() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config_file(config_path);
    if (seed) cfg.seed = *seed;
    return cfg;
}

void write_manifest(const std::string& out_dir, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& artifacts) {
    json doc;
    doc["command"] = command;
    doc["schema_version"] = kSchemaVersion;
    doc["config_fingerprint"] = run_config_fingerprint(cfg);
    json arts = json::object();
    for (const auto& [name, file] : artifacts) arts[name] = file;
    doc["artifacts"] = std::move(arts);
    write_file(fs::path(out_dir) / "manifest.json", doc.dump(2) + "\n");
}

int cmd_generate(const GlobalOptions& g, const std::string& corpus_config) {
    RunConfig cfg;
    CorpusSpec spec;
    try {
        cfg = g.load();
        spec = parse_corpus_spec(read_file(corpus_config));
    } catch (const std::exception& e) {
        return fail(kExitConfig, "generate", e);
    }
    try {
        const SyntheticCorpus corpus = generate_synthetic(spec, cfg.seed);
        const fs::path dir = prepare_out_dir(g);
        std::ostringstream tracks, meta;
        serialize_tracks(corpus.flights, tracks);
        serialize_metadata(corpus.flights, meta);
        write_file(dir / "tracks.csv", tracks.str());
        write_file(dir / "metadata.jsonl", meta.str());
        write_manifest(g.out_dir, "generate", cfg,
                       {{"tracks", "tracks.csv"}, {"metadata", "metadata.jsonl"}});
        std::cout << "generated " << corpus.flights.size() << " flights\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(kExitData, "generate", e);
    }
}

int cmd_cluster_waypoints(const GlobalOptions& g, const std::string& tracks_csv,
                          const std::string& metadata_jsonl, bool dense) {
    RunConfig cfg;
    try {
        cfg = g.load();
    } catch (const std::exception& e) {
        return fail(kExitConfig, "cluster-waypoints", e);
    }
    try {
        const auto flights = load_filtered(tracks_csv, metadata_jsonl, cfg);

        std::vector<TurningPoint> tps;
        const TurningConfig tc{cfg.alpha, cfg.psi_c};
        for (const auto& f : flights) {
            const auto flight_tps = detect_turning_points(f, tc);
            tps.insert(tps.end(), flight_tps.begin(), flight_tps.end());
        }

        std::vector<Waypoint> waypoints;
        if (dense) {
            waypoints = build_waypoints_dense(
                tps, DbscanParams{cfg.tp_dbscan_eps,
                                  static_cast<std::size_t>(cfg.tp_dbscan_min_pts)});
            if (waypoints.empty())
                throw std::runtime_error(
                    "no dense waypoint clusters found; lower tp_dbscan_min_pts or raise "
                    "tp_dbscan_eps");
        } else {
            waypoints = build_waypoints_sparse(tps, static_cast<std::size_t>(cfg.sparse_k),
                                               cfg.seed);
        }

        std::vector<WaypointSequence> seqs;
        seqs.reserve(flights.size());
        for (const auto& f : flights) seqs.push_back(trajectory_to_sequence(f, waypoints));

        std::optional<int> final_turn;
        if (cfg.final_turn_wp >= 0) final_turn = cfg.final_turn_wp;
        const auto usable = filter_sequences(seqs, final_turn);
        const SequenceClusterResult clusters =
            cluster_sequences(usable, cfg.lcs_sim_threshold,
                              static_cast<std::size_t>(cfg.min_route_flights));

        std::ostringstream report;
        report << "flight_id,cluster,is_representative\n";
        for (std::size_t i = 0; i < usable.size(); ++i) {
            const int label = clusters.labels[i];
            bool rep = false;
            if (label != kOutlier)
                rep = clusters.representatives[static_cast<std::size_t>(label)].flight_id ==
                      usable[i].flight_id;
            report << usable[i].flight_id << ',' << label << ',' << (rep ? 1 : 0) << '\n';
        }

        const fs::path dir = prepare_out_dir(g);
        const std::string fp = run_config_fingerprint(cfg);
        write_file(dir / "waypoints.json", waypoints_to_json(waypoints, kSchemaVersion, fp));
        write_file(dir / "sequences.csv", sequences_to_csv(seqs));
        write_file(dir / "sequence_clusters.csv", report.str());
        write_manifest(g.out_dir, "cluster-waypoints", cfg,
                       {{"waypoints", "waypoints.json"},
                        {"sequences", "sequences.csv"},
                        {"clusters", "sequence_clusters.csv"}});
        std::cout << "built " << waypoints.size() << " waypoints, " << clusters.n_clusters
                  << " route clusters from " << usable.size() << " sequences\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(kExitData, "cluster-waypoints", e);
    }
}

int cmd_cluster_pca(const GlobalOptions& g, const std::string& tracks_csv,
                    const std::string& metadata_jsonl) {
    RunConfig cfg;
    try {
        cfg = g.load();
    } catch (const std::exception& e) {
        return fail(kExitConfig, "cluster-pca", e);
    }
    try {
        const auto flights = load_filtered(tracks_csv, metadata_jsonl, cfg);
        std::vector<ResampledTrajectory> rts;
        rts.reserve(flights.size());
        for (const auto& f : flights)
            rts.push_back(resample(f, static_cast<std::size_t>(cfg.resample_n), cfg.alpha));

        const DbscanParams db{cfg.traj_dbscan_eps,
                              static_cast<std::size_t>(cfg.traj_dbscan_min_pts)};
        const RouteModel model =
            fit_route_model(rts, db, static_cast<std::size_t>(cfg.pca_components));

        std::vector<FlightMetadata> metas;
        metas.reserve(flights.size());
        for (const auto& f : flights) metas.push_back(f.meta);
        const OutlierReport report = outlier_report(model, metas);

        const fs::path dir = prepare_out_dir(g);
        const std::string fp = run_config_fingerprint(cfg);
        write_file(dir / "route_model.json", route_model_to_json(model, kSchemaVersion, fp));
        write_file(dir / "centroids.csv", centroids_to_csv(model));
        write_file(dir / "outlier_report.csv", outlier_report_to_csv(report));
        write_manifest(g.out_dir, "cluster-pca", cfg,
                       {{"route_model", "route_model.json"},
                        {"centroids", "centroids.csv"},
                        {"outlier_report", "outlier_report.csv"}});

        std::size_t outliers = 0;
        for (int l : model.cluster_labels)
            if (l == kOutlier) ++outliers;
        std::cout << "fitted " << model.n_clusters << " route clusters over "
                  << model.flight_ids.size() << " flights (" << outliers << " outliers)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(kExitData, "cluster-pca", e);
    }
}

int cmd_train_ims(const GlobalOptions& g, const std::string& tracks_csv,
                  const std::string& metadata_jsonl, const std::string& route_model_json) {
    RunConfig cfg;
    try {
        cfg = g.load();
    } catch (const std::exception& e) {
        return fail(kExitConfig, "train-ims", e);
    }
    try {
        const auto flights = load_filtered(tracks_csv, metadata_jsonl, cfg);
        const RouteModel model = route_model_from_json(read_file(route_model_json));

        std::map<std::string, int> label_of;
        for (std::size_t i = 0; i < model.flight_ids.size(); ++i)
            label_of[model.flight_ids[i]] = model.cluster_labels[i];

        std::vector<Fragment> fragments;
        std::size_t nominal = 0;
        for (const auto& f : flights) {
            auto it = label_of.find(f.meta.flight_id);
            if (it == label_of.end() || it->second == kOutlier) continue;
            ++nominal;
            const auto rt = resample(f, kFragmentPoints * kFragmentsPerFlight, cfg.alpha);
            const auto fr = fragment_trajectory(rt, model.norm);
            fragments.insert(fragments.end(), fr.begin(), fr.end());
        }
        if (fragments.empty())
            throw std::runtime_error("route model labels no flight as nominal; nothing to train on");

        const std::size_t k = cfg.ims_initial_k > 0
                                  ? std::min<std::size_t>(
                                        static_cast<std::size_t>(cfg.ims_initial_k),
                                        fragments.size())
                                  : default_ims_k(fragments.size());
        const ImsKnowledgeBase kb =
            train_ims(fragments, k, cfg.ims_merge_eps, model.norm, cfg.seed);

        const fs::path dir = prepare_out_dir(g);
        write_file(dir / "ims_kb.json",
                   ims_kb_to_json(kb, kSchemaVersion, run_config_fingerprint(cfg)));
        write_manifest(g.out_dir, "train-ims", cfg, {{"knowledge_base", "ims_kb.json"}});
        std::cout << "trained " << kb.clusters.size() << " boxes from " << fragments.size()
                  << " fragments of " << nominal << " nominal flights\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(kExitData, "train-ims", e);
    }
}

int cmd_monitor(const GlobalOptions& g, const std::string& tracks_csv,
                const std::string& metadata_jsonl, const std::string& kb_json, double speed) {
    RunConfig cfg;
    try {
        cfg = g.load();
    } catch (const std::exception& e) {
        return fail(kExitConfig, "monitor", e);
    }
    try {
        std::ifstream tracks(tracks_csv, std::ios::binary);
        if (!tracks) throw std::runtime_error("cannot open file: " + tracks_csv);
        std::ifstream meta(metadata_jsonl, std::ios::binary);
        if (!meta) throw std::runtime_error("cannot open file: " + metadata_jsonl);
        const auto flights = parse_tracks(tracks, meta);
        if (flights.empty()) throw std::runtime_error("replay input contains no flights");

        const ImsKnowledgeBase kb = ims_kb_from_json(read_file(kb_json));
        MonitorConfig mc;
        mc.monitored_airport = cfg.airport;
        mc.tau = cfg.ims_tau;
        mc.window_s = cfg.window_s;
        mc.tick_s = cfg.tick_s;
        mc.min_warmup_s = cfg.min_warmup_s;
        mc.expiry_s = cfg.expiry_s;

        const ReplayOutput out = run_replay(flights, kb, mc);

        std::ostringstream snaps;
        std::vector<ComplexityReading> readings;
        for (const auto& [snap, reading] : out.ticks) {
            const std::string line = snapshot_to_json_line(snap, reading);
            if (speed > 0.0) {
                std::this_thread::sleep_for(
                    std::chrono::duration<double>(static_cast<double>(mc.tick_s) / speed));
                std::cout << line << '\n';
            }
            snaps << line << '\n';
            readings.push_back(reading);
        }

        const fs::path dir = prepare_out_dir(g);
        write_file(dir / "snapshots.jsonl", snaps.str());
        write_file(dir / "complexity.csv", complexity_history_to_csv(readings));
        write_manifest(g.out_dir, "monitor", cfg,
                       {{"snapshots", "snapshots.jsonl"}, {"complexity", "complexity.csv"}});
        if (out.warnings > 0)
            std::cerr << "monitor: " << out.warnings << " out-of-order hits rejected\n";
        std::cout << "replayed " << out.ticks.size() << " ticks over " << flights.size()
                  << " flights\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(kExitData, "monitor", e);
    }
}

int cmd_report_outliers(const GlobalOptions& g, const std::string& route_model_json,
                        const std::string& tracks_csv, const std::string& metadata_jsonl) {
    RunConfig cfg;
    try {
        cfg = g.load();
    } catch (const std::exception& e) {
        return fail(kExitConfig, "report-outliers", e);
    }
    try {
        const auto flights = load_filtered(tracks_csv, metadata_jsonl, cfg);
        const RouteModel model = route_model_from_json(read_file(route_model_json));
        std::vector<FlightMetadata> metas;
        metas.reserve(flights.size());
        for (const auto& f : flights) metas.push_back(f.meta);

        const fs::path dir = prepare_out_dir(g);
        write_file(dir / "outlier_report.csv", outlier_report_to_csv(outlier_report(model, metas)));
        write_manifest(g.out_dir, "report-outliers", cfg,
                       {{"outlier_report", "outlier_report.csv"}});
        return kExitOk;
    } catch (const std::exception& e) {
        return fail(kExitData, "report-outliers", e);
    }
}

}  // namespace trajmine::cli
