#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "trajmine/cli_commands.hpp"

namespace {

// "max" disables pacing; any positive number is simulated seconds per
// wall second.
double parse_speed(const std::string& s) {
    if (s == "max") return 0.0;
    std::size_t consumed = 0;
    const double v = std::stod(s, &consumed);
    if (consumed != s.size() || !(v > 0.0))
        throw CLI::ValidationError("--speed", "expected 'max' or a positive number");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radar trajectory mining and airspace monitoring toolchain"};
    app.require_subcommand(1);

    trajmine::cli::GlobalOptions g;
    std::uint64_t seed_value = 0;
    auto* seed_opt =
        app.add_option("--seed", seed_value, "Override the run seed from the config file");
    app.add_option("--config", g.config_path, "Run configuration INI file");
    app.add_option("--out", g.out_dir, "Output directory (created if missing)")
        ->capture_default_str();

    std::string corpus_config;
    auto* gen = app.add_subcommand("generate", "Generate a synthetic radar corpus");
    gen->add_option("corpus", corpus_config, "Corpus description INI file")->required();

    std::string tracks_csv;
    std::string metadata_jsonl;
    std::string mode = "dense";
    auto* cw = app.add_subcommand("cluster-waypoints",
                                  "Cluster turning points into waypoints and route families");
    cw->add_option("tracks", tracks_csv, "Track CSV file")->required();
    cw->add_option("metadata", metadata_jsonl, "Flight metadata JSONL file")->required();
    cw->add_option("--mode", mode, "Waypoint extraction mode")
        ->check(CLI::IsMember({"sparse", "dense"}))
        ->capture_default_str();

    auto* cp = app.add_subcommand("cluster-pca",
                                  "Cluster resampled trajectories in principal-component space");
    cp->add_option("tracks", tracks_csv, "Track CSV file")->required();
    cp->add_option("metadata", metadata_jsonl, "Flight metadata JSONL file")->required();

    std::string model_json;
    auto* ti = app.add_subcommand("train-ims", "Train the conformance knowledge base");
    ti->add_option("tracks", tracks_csv, "Track CSV file")->required();
    ti->add_option("metadata", metadata_jsonl, "Flight metadata JSONL file")->required();
    ti->add_option("model", model_json, "Route model JSON from cluster-pca")->required();

    std::string kb_json;
    std::string speed_str = "max";
    auto* mon = app.add_subcommand("monitor", "Replay recorded traffic against a knowledge base");
    mon->add_option("tracks", tracks_csv, "Track CSV file")->required();
    mon->add_option("metadata", metadata_jsonl, "Flight metadata JSONL file")->required();
    mon->add_option("kb", kb_json, "Knowledge base JSON from train-ims")->required();
    mon->add_option("--speed", speed_str, "Replay speed: 'max' or simulated seconds per second")
        ->capture_default_str();

    auto* ro = app.add_subcommand("report-outliers",
                                  "Summarize outlier frequencies from a fitted route model");
    ro->add_option("model", model_json, "Route model JSON from cluster-pca")->required();
    ro->add_option("tracks", tracks_csv, "Track CSV file")->required();
    ro->add_option("metadata", metadata_jsonl, "Flight metadata JSONL file")->required();

    double speed = 0.0;
    try {
        app.parse(argc, argv);
        if (mon->parsed()) speed = parse_speed(speed_str);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "trajmine: " << e.what() << '\n';
        return 1;
    }
    if (*seed_opt) g.seed = seed_value;

    if (gen->parsed()) return trajmine::cli::cmd_generate(g, corpus_config);
    if (cw->parsed())
        return trajmine::cli::cmd_cluster_waypoints(g, tracks_csv, metadata_jsonl,
                                                    mode == "dense");
    if (cp->parsed()) return trajmine::cli::cmd_cluster_pca(g, tracks_csv, metadata_jsonl);
    if (ti->parsed())
        return trajmine::cli::cmd_train_ims(g, tracks_csv, metadata_jsonl, model_json);
    if (mon->parsed())
        return trajmine::cli::cmd_monitor(g, tracks_csv, metadata_jsonl, kb_json, speed);
    if (ro->parsed())
        return trajmine::cli::cmd_report_outliers(g, model_json, tracks_csv, metadata_jsonl);
    return 1;
}
