#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trajmine {

// Flat INI document: section -> key -> raw value string. Keys outside
// any [section] land in the "" section. Duplicate keys within a section
// are an error; section names may repeat and are merged.
struct IniDoc {
    std::map<std::string, std::map<std::string, std::string>> sections;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
};

// '#' starts a comment anywhere on a line; ';' only at line head, so
// values may hold semicolon-separated lists. Duplicate keys within a
// section are an error; repeated section headers merge.
IniDoc parse_ini(const std::string& text);

double ini_double(const IniDoc& doc, const std::string& section, const std::string& key,
                  double fallback);
std::int64_t ini_int(const IniDoc& doc, const std::string& section, const std::string& key,
                     std::int64_t fallback);
std::string ini_string(const IniDoc& doc, const std::string& section, const std::string& key,
                       const std::string& fallback);

// Every tunable the pipelines read, with library defaults. CLI flags
// override file values; file values override defaults.
struct RunConfig {
    // ingestion
    std::string airport = "SFO";
    std::string op_type = "arrival";
    int min_track_points = 10;

    // heading filter / turning points
    double alpha = 0.4;
    double psi_c = 0.025;

    // sparse waypoint construction
    int sparse_k = 10;
    int kmeans_restarts = 8;
    int kmeans_max_iter = 100;

    // dense waypoint construction
    double tp_dbscan_eps = 350.0;
    int tp_dbscan_min_pts = 10;

    // sequence clustering
    double lcs_sim_threshold = 0.6;
    int min_route_flights = 5;
    int final_turn_wp = -1;  // waypoint id to trim off sequence tails; <0 disables

    // resampling / PCA
    int resample_n = 50;
    int pca_components = 5;
    double traj_dbscan_eps = 0.0;  // 0 = auto (5% of projected diameter)
    int traj_dbscan_min_pts = 5;

    // IMS
    int ims_initial_k = 0;  // 0 = max(16, ceil(sqrt(n))) clamped to n
    double ims_merge_eps = 0.01;
    double ims_tau = 0.02;

    // monitor
    std::int64_t window_s = 80;
    std::int64_t tick_s = 15;
    std::int64_t min_warmup_s = 40;
    std::int64_t expiry_s = 120;

    std::uint64_t seed = 17;
};

// Reads the [run] section; unknown keys in [run] throw, other sections
// are ignored so one file can carry both a corpus and a run config.
RunConfig load_run_config(const std::string& ini_text);
RunConfig load_run_config_file(const std::string& path);

// Canonical key=value listing, one per line, alphabetical. The
// fingerprint is FNV-1a 64 over this listing, so two configs match iff
// every effective value matches.
std::string run_config_canonical(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);
std::string run_config_fingerprint(const RunConfig& cfg);  // 16 hex digits

}  // namespace trajmine
