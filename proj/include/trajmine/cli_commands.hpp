#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trajmine/config.hpp"

namespace trajmine::cli {

// Shared flags resolved by the top-level parser. config_path and seed
// are optional overrides; out_dir defaults to the current directory.
struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;

    RunConfig load() const;  // file + seed override applied
};

// Each command returns a process exit code: 0 success, 1 usage or
// config error, 2 data error. They throw nothing; errors are printed
// to stderr.
int cmd_generate(const GlobalOptions& g, const std::string& corpus_config);
int cmd_cluster_waypoints(const GlobalOptions& g, const std::string& tracks_csv,
                          const std::string& metadata_jsonl, bool dense);
int cmd_cluster_pca(const GlobalOptions& g, const std::string& tracks_csv,
                    const std::string& metadata_jsonl);
// Trains only on flights the route model labeled non-outlier.
int cmd_train_ims(const GlobalOptions& g, const std::string& tracks_csv,
                  const std::string& metadata_jsonl, const std::string& route_model_json);
// speed: simulated seconds per wall second; <= 0 replays unpaced.
int cmd_monitor(const GlobalOptions& g, const std::string& tracks_csv,
                const std::string& metadata_jsonl, const std::string& kb_json, double speed);
int cmd_report_outliers(const GlobalOptions& g, const std::string& route_model_json,
                        const std::string& tracks_csv, const std::string& metadata_jsonl);

// Writes manifest.json describing one command run: inputs, outputs,
// schema versions, config fingerprint. No timestamps.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& artifacts);

}  // namespace trajmine::cli
