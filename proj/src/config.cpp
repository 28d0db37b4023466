#include "trajmine/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace trajmine {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

bool IniDoc::has(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    return it != sections.end() && it->second.count(key) > 0;
}

std::string IniDoc::get(const std::string& section, const std::string& key) const {
    auto it = sections.find(section);
    if (it == sections.end())
        throw std::runtime_error("missing ini section [" + section + "]");
    auto kit = it->second.find(key);
    if (kit == it->second.end())
        throw std::runtime_error("missing ini key " + key + " in [" + section + "]");
    return kit->second;
}

std::string IniDoc::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

IniDoc parse_ini(const std::string& text) {
    IniDoc doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // ';' only starts a comment at line head so that values may
        // carry semicolon-separated lists.
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty() || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("ini line " + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw std::runtime_error("ini line " + std::to_string(lineno) +
                                         ": empty section name");
            doc.sections[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("ini line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("ini line " + std::to_string(lineno) + ": empty key");
        auto [it, inserted] = doc.sections[section].emplace(key, value);
        (void)it;
        if (!inserted)
            throw std::runtime_error("ini line " + std::to_string(lineno) + ": duplicate key " +
                                     key + " in [" + section + "]");
    }
    return doc;
}

double ini_double(const IniDoc& doc, const std::string& section, const std::string& key,
                  double fallback) {
    if (!doc.has(section, key)) return fallback;
    const std::string raw = doc.get(section, key);
    try {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("ini key " + key + " in [" + section + "]: not a number: " + raw);
    }
}

std::int64_t ini_int(const IniDoc& doc, const std::string& section, const std::string& key,
                     std::int64_t fallback) {
    if (!doc.has(section, key)) return fallback;
    const std::string raw = doc.get(section, key);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc{} || ptr != raw.data() + raw.size())
        throw std::runtime_error("ini key " + key + " in [" + section + "]: not an integer: " + raw);
    return v;
}

std::string ini_string(const IniDoc& doc, const std::string& section, const std::string& key,
                       const std::string& fallback) {
    return doc.get_or(section, key, fallback);
}

namespace {

const std::set<std::string> kRunKeys = {
    "airport",        "op_type",          "min_track_points", "alpha",
    "psi_c",          "sparse_k",         "kmeans_restarts",  "kmeans_max_iter",
    "tp_dbscan_eps",  "tp_dbscan_min_pts", "lcs_sim_threshold", "min_route_flights",
    "final_turn_wp",  "resample_n",       "pca_components",   "traj_dbscan_eps",
    "traj_dbscan_min_pts", "ims_initial_k", "ims_merge_eps",   "ims_tau",
    "window_s",       "tick_s",           "min_warmup_s",     "expiry_s",
    "seed",
};

}  // namespace

RunConfig load_run_config(const std::string& ini_text) {
    IniDoc doc = parse_ini(ini_text);
    RunConfig cfg;
    auto run = doc.sections.find("run");
    if (run != doc.sections.end()) {
        for (const auto& [key, value] : run->second) {
            (void)value;
            if (!kRunKeys.count(key))
                throw std::runtime_error("unknown key in [run]: " + key);
        }
    }
    cfg.airport = ini_string(doc, "run", "airport", cfg.airport);
    cfg.op_type = ini_string(doc, "run", "op_type", cfg.op_type);
    cfg.min_track_points = static_cast<int>(ini_int(doc, "run", "min_track_points", cfg.min_track_points));
    cfg.alpha = ini_double(doc, "run", "alpha", cfg.alpha);
    cfg.psi_c = ini_double(doc, "run", "psi_c", cfg.psi_c);
    cfg.sparse_k = static_cast<int>(ini_int(doc, "run", "sparse_k", cfg.sparse_k));
    cfg.kmeans_restarts = static_cast<int>(ini_int(doc, "run", "kmeans_restarts", cfg.kmeans_restarts));
    cfg.kmeans_max_iter = static_cast<int>(ini_int(doc, "run", "kmeans_max_iter", cfg.kmeans_max_iter));
    cfg.tp_dbscan_eps = ini_double(doc, "run", "tp_dbscan_eps", cfg.tp_dbscan_eps);
    cfg.tp_dbscan_min_pts = static_cast<int>(ini_int(doc, "run", "tp_dbscan_min_pts", cfg.tp_dbscan_min_pts));
    cfg.lcs_sim_threshold = ini_double(doc, "run", "lcs_sim_threshold", cfg.lcs_sim_threshold);
    cfg.min_route_flights = static_cast<int>(ini_int(doc, "run", "min_route_flights", cfg.min_route_flights));
    cfg.final_turn_wp = static_cast<int>(ini_int(doc, "run", "final_turn_wp", cfg.final_turn_wp));
    cfg.resample_n = static_cast<int>(ini_int(doc, "run", "resample_n", cfg.resample_n));
    cfg.pca_components = static_cast<int>(ini_int(doc, "run", "pca_components", cfg.pca_components));
    cfg.traj_dbscan_eps = ini_double(doc, "run", "traj_dbscan_eps", cfg.traj_dbscan_eps);
    cfg.traj_dbscan_min_pts = static_cast<int>(ini_int(doc, "run", "traj_dbscan_min_pts", cfg.traj_dbscan_min_pts));
    cfg.ims_initial_k = static_cast<int>(ini_int(doc, "run", "ims_initial_k", cfg.ims_initial_k));
    cfg.ims_merge_eps = ini_double(doc, "run", "ims_merge_eps", cfg.ims_merge_eps);
    cfg.ims_tau = ini_double(doc, "run", "ims_tau", cfg.ims_tau);
    cfg.window_s = ini_int(doc, "run", "window_s", cfg.window_s);
    cfg.tick_s = ini_int(doc, "run", "tick_s", cfg.tick_s);
    cfg.min_warmup_s = ini_int(doc, "run", "min_warmup_s", cfg.min_warmup_s);
    cfg.expiry_s = ini_int(doc, "run", "expiry_s", cfg.expiry_s);
    cfg.seed = static_cast<std::uint64_t>(ini_int(doc, "run", "seed", static_cast<std::int64_t>(cfg.seed)));

    if (cfg.alpha <= 0.0 || cfg.alpha > 1.0)
        throw std::runtime_error("alpha must be in (0, 1]");
    if (cfg.psi_c < 0.0) throw std::runtime_error("psi_c must be >= 0");
    if (cfg.resample_n < 2) throw std::runtime_error("resample_n must be >= 2");
    if (cfg.pca_components < 1) throw std::runtime_error("pca_components must be >= 1");
    if (cfg.window_s <= 0 || cfg.tick_s <= 0)
        throw std::runtime_error("window_s and tick_s must be positive");
    return cfg;
}

RunConfig load_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_run_config(buf.str());
}

std::string run_config_canonical(const RunConfig& cfg) {
    std::ostringstream out;
    auto put_d = [&out](const char* k, double v) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        out << k << '=' << std::string_view(buf, p - buf) << '\n';
    };
    out << "airport=" << cfg.airport << '\n';
    put_d("alpha", cfg.alpha);
    out << "expiry_s=" << cfg.expiry_s << '\n';
    out << "final_turn_wp=" << cfg.final_turn_wp << '\n';
    out << "ims_initial_k=" << cfg.ims_initial_k << '\n';
    put_d("ims_merge_eps", cfg.ims_merge_eps);
    put_d("ims_tau", cfg.ims_tau);
    out << "kmeans_max_iter=" << cfg.kmeans_max_iter << '\n';
    out << "kmeans_restarts=" << cfg.kmeans_restarts << '\n';
    put_d("lcs_sim_threshold", cfg.lcs_sim_threshold);
    out << "min_route_flights=" << cfg.min_route_flights << '\n';
    out << "min_track_points=" << cfg.min_track_points << '\n';
    out << "min_warmup_s=" << cfg.min_warmup_s << '\n';
    out << "op_type=" << cfg.op_type << '\n';
    out << "pca_components=" << cfg.pca_components << '\n';
    put_d("psi_c", cfg.psi_c);
    out << "resample_n=" << cfg.resample_n << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "sparse_k=" << cfg.sparse_k << '\n';
    out << "tick_s=" << cfg.tick_s << '\n';
    put_d("tp_dbscan_eps", cfg.tp_dbscan_eps);
    out << "tp_dbscan_min_pts=" << cfg.tp_dbscan_min_pts << '\n';
    put_d("traj_dbscan_eps", cfg.traj_dbscan_eps);
    out << "traj_dbscan_min_pts=" << cfg.traj_dbscan_min_pts << '\n';
    out << "window_s=" << cfg.window_s << '\n';
    return out.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string run_config_fingerprint(const RunConfig& cfg) {
    std::uint64_t h = fnv1a64(run_config_canonical(cfg));
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace trajmine
