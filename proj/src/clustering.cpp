#include "trajmine/clustering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace trajmine {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform draw from [0, n) by rejection; unlike the std distributions
// this is identical across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % n;
}

struct LloydRun {
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;
    std::vector<double> wcss_history;
};

double assign_step(const std::vector<std::vector<double>>& points,
                   const std::vector<std::vector<double>>& centroids, std::vector<int>& labels) {
    double wcss = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            const double d = squared_distance(points[i], centroids[c]);
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        labels[i] = best_c;
        wcss += best;
    }
    return wcss;
}

LloydRun lloyd(const std::vector<std::vector<double>>& points, const KmeansParams& params,
               std::uint64_t seed) {
    const std::size_t n = points.size();
    const std::size_t d = points[0].size();
    std::mt19937_64 rng(seed);

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < params.k; ++i)
        std::swap(idx[i], idx[i + bounded(rng, n - i)]);

    LloydRun run;
    run.centroids.reserve(params.k);
    for (std::size_t c = 0; c < params.k; ++c) run.centroids.push_back(points[idx[c]]);
    run.labels.assign(n, 0);

    auto push_wcss = [&run](double wcss) {
        if (!run.wcss_history.empty()) {
            const double prev = run.wcss_history.back();
            if (wcss > prev + 1e-9 * std::max(1.0, prev))
                throw std::logic_error("kmeans: objective increased between iterations");
        }
        run.wcss_history.push_back(wcss);
    };

    push_wcss(assign_step(points, run.centroids, run.labels));

    std::vector<int> prev_labels(n);
    std::vector<std::size_t> counts(params.k);
    for (std::size_t iter = 1; iter < params.max_iter + 1; ++iter) {
        prev_labels = run.labels;

        std::vector<std::vector<double>> next(params.k, std::vector<double>(d, 0.0));
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(run.labels[i]);
            ++counts[c];
            for (std::size_t j = 0; j < d; ++j) next[c][j] += points[i][j];
        }
        for (std::size_t c = 0; c < params.k; ++c)
            if (counts[c] > 0)
                for (std::size_t j = 0; j < d; ++j) next[c][j] /= static_cast<double>(counts[c]);

        // Re-seed each emptied cluster at the point farthest from its
        // own centroid; one point can rescue only one cluster.
        std::vector<char> taken(n, 0);
        for (std::size_t c = 0; c < params.k; ++c) {
            if (counts[c] > 0) continue;
            double farthest = -1.0;
            std::size_t pick = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                const auto ci = static_cast<std::size_t>(run.labels[i]);
                const double dist = squared_distance(points[i], next[ci]);
                if (dist > farthest) {
                    farthest = dist;
                    pick = i;
                }
            }
            next[c] = points[pick];
            taken[pick] = 1;
        }

        double movement = 0.0;
        for (std::size_t c = 0; c < params.k; ++c)
            movement = std::max(movement, squared_distance(next[c], run.centroids[c]));
        run.centroids = std::move(next);

        push_wcss(assign_step(points, run.centroids, run.labels));
        if (run.labels == prev_labels) break;
        if (params.tol > 0.0 && movement <= params.tol) break;
    }
    return run;
}

}  // namespace

ClusterResult kmeans(const std::vector<std::vector<double>>& points, const KmeansParams& params) {
    if (points.empty()) throw std::invalid_argument("kmeans: empty input");
    const std::size_t d = points[0].size();
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("kmeans: mixed dimensions");
    if (params.k < 1 || params.k > points.size())
        throw std::invalid_argument("kmeans: k must be in [1, |points|]");
    if (params.restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");

    LloydRun best;
    double best_wcss = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < params.restarts; ++r) {
        LloydRun run = lloyd(points, params, splitmix64(params.seed + r));
        if (run.wcss_history.back() < best_wcss) {
            best_wcss = run.wcss_history.back();
            best = std::move(run);
        }
    }

    ClusterResult result;
    result.labels = std::move(best.labels);
    result.centroids = std::move(best.centroids);
    result.wcss = best_wcss;
    result.wcss_history = std::move(best.wcss_history);
    result.n_clusters = params.k;
    return result;
}

ClusterResult dbscan_generic(std::size_t n,
                             const std::function<std::vector<std::size_t>(std::size_t)>& neighbors,
                             std::size_t min_pts) {
    constexpr int kUnvisited = -2;
    ClusterResult result;
    result.labels.assign(n, kUnvisited);
    int next_cluster = 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (result.labels[i] != kUnvisited) continue;
        std::vector<std::size_t> nb = neighbors(i);
        if (nb.size() < min_pts) {
            result.labels[i] = kOutlier;  // may be claimed as border later
            continue;
        }
        const int cluster = next_cluster++;
        result.labels[i] = cluster;
        std::deque<std::size_t> queue(nb.begin(), nb.end());
        while (!queue.empty()) {
            const std::size_t j = queue.front();
            queue.pop_front();
            if (result.labels[j] == kOutlier) {
                result.labels[j] = cluster;  // border point, first claimer wins
                continue;
            }
            if (result.labels[j] != kUnvisited) continue;
            result.labels[j] = cluster;
            std::vector<std::size_t> nb2 = neighbors(j);
            if (nb2.size() >= min_pts)
                queue.insert(queue.end(), nb2.begin(), nb2.end());
        }
    }
    result.n_clusters = static_cast<std::size_t>(next_cluster);
    return result;
}

namespace {

// Uniform grid with cell side eps: all neighbors of a point lie in the
// 3^d cells around its own. Cells are keyed by their coordinate triple,
// so the hash affects bucket placement only, never which cell matches.
class GridIndex {
public:
    using Cell = std::array<std::int64_t, 3>;

    GridIndex(const std::vector<std::vector<double>>& points, double eps)
        : points_(points), eps_(eps), dim_(points.empty() ? 0 : points[0].size()) {
        for (std::size_t i = 0; i < points_.size(); ++i)
            cells_[cell_of(points_[i])].push_back(i);
    }

    std::vector<std::size_t> neighbors(std::size_t i) const {
        const auto& p = points_[i];
        const Cell base = cell_of(p);
        std::vector<std::size_t> out;
        Cell probe = {0, 0, 0};
        const std::int64_t lo = -1, hi = 1;
        const double eps2 = eps_ * eps_;
        for (std::int64_t dx = lo; dx <= hi; ++dx) {
            probe[0] = base[0] + dx;
            for (std::int64_t dy = (dim_ > 1 ? lo : 0); dy <= (dim_ > 1 ? hi : 0); ++dy) {
                probe[1] = base[1] + dy;
                for (std::int64_t dz = (dim_ > 2 ? lo : 0); dz <= (dim_ > 2 ? hi : 0); ++dz) {
                    probe[2] = base[2] + dz;
                    auto it = cells_.find(probe);
                    if (it == cells_.end()) continue;
                    for (std::size_t j : it->second)
                        if (squared_distance(p, points_[j]) <= eps2) out.push_back(j);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    struct CellHash {
        std::size_t operator()(const Cell& c) const {
            std::uint64_t h = 0;
            for (std::int64_t v : c) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
            return static_cast<std::size_t>(h);
        }
    };

    Cell cell_of(const std::vector<double>& p) const {
        Cell c = {0, 0, 0};
        for (std::size_t j = 0; j < dim_; ++j)
            c[j] = static_cast<std::int64_t>(std::floor(p[j] / eps_));
        return c;
    }

    const std::vector<std::vector<double>>& points_;
    double eps_;
    std::size_t dim_;
    std::unordered_map<Cell, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace

ClusterResult dbscan(const std::vector<std::vector<double>>& points, const DbscanParams& params) {
    if (points.empty()) return {};
    const std::size_t d = points[0].size();
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("dbscan: mixed dimensions");
    if (params.eps <= 0.0) throw std::invalid_argument("dbscan: eps must be positive");
    if (params.min_pts < 1) throw std::invalid_argument("dbscan: min_pts must be >= 1");

    if (d <= 3) {
        GridIndex index(points, params.eps);
        return dbscan_generic(
            points.size(), [&index](std::size_t i) { return index.neighbors(i); },
            params.min_pts);
    }
    const double eps2 = params.eps * params.eps;
    auto linear = [&points, eps2](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < points.size(); ++j)
            if (squared_distance(points[i], points[j]) <= eps2) out.push_back(j);
        return out;
    };
    return dbscan_generic(points.size(), linear, params.min_pts);
}

}  // namespace trajmine
