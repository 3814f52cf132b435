#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bdmbc/bagging.hpp"
#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/graph.hpp"
#include "bdmbc/knn.hpp"
#include "bdmbc/plls.hpp"

namespace bdmbc {

/// Hyperparameters of one clustering run. The subsample size is either
/// given explicitly or derived as ceil(rho * n).
struct BdmbcConfig {
    std::size_t rounds = 10;                    // B
    double rho = 0.1;                           // used when subsample_size is unset
    std::optional<std::size_t> subsample_size;  // s
    std::size_t k_D = 0;
    std::size_t k_L = 0;
    std::size_t k_G = 15;
    double lambda = 0.5;
    std::optional<std::size_t> min_cluster_size; // defaults to 2 k_G
    std::uint64_t seed = 0;

    std::size_t resolved_subsample(std::size_t n) const {
        if (subsample_size) return *subsample_size;
        // the tolerance keeps e.g. 0.9 * 2000 from rounding up to 1801
        const double raw = rho * static_cast<double>(n);
        return static_cast<std::size_t>(std::max(1.0, std::ceil(raw - 1e-9 * std::max(1.0, raw))));
    }
    std::size_t resolved_min_cluster_size() const { return min_cluster_size ? *min_cluster_size : 2 * k_G; }
};

inline void validate_config(const BdmbcConfig& c, std::size_t n) {
    if (c.rounds < 1) throw ParameterError("B", "B must be at least 1");
    if (!c.subsample_size && !(c.rho > 0.0 && c.rho <= 1.0)) throw ParameterError("rho", "rho must lie in (0, 1]");
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) throw ParameterError("lambda", "lambda must lie in [0, 1]");
    if (n == 1) return; // single point: one trivial cluster regardless of neighbor counts
    const std::size_t s = c.resolved_subsample(n);
    if (s < 1 || s > n)
        throw ParameterError("s", "subsample size s = " + std::to_string(s) + " must lie in [1, n = " +
                                      std::to_string(n) + "]");
    if (c.k_D < 1) throw ParameterError("k_D", "k_D must be at least 1");
    if (c.k_D >= s)
        throw ParameterError("k_D", "k_D must be smaller than subsample size (k_D = " + std::to_string(c.k_D) +
                                        ", s = " + std::to_string(s) + ")");
    if (c.k_L < 1 || c.k_L > n - 1)
        throw ParameterError("k_L", "k_L = " + std::to_string(c.k_L) + " must lie in [1, n - 1 = " +
                                        std::to_string(n - 1) + "]");
    if (c.k_G < 1 || c.k_G > n - 1)
        throw ParameterError("k_G", "k_G = " + std::to_string(c.k_G) + " must lie in [1, n - 1 = " +
                                        std::to_string(n - 1) + "]");
    if (c.resolved_min_cluster_size() < 1)
        throw ParameterError("min_cluster_size", "min_cluster_size must be at least 1");
}

/// Wall-clock seconds per pipeline stage.
struct StageTimings {
    double index = 0.0;             // full k-d tree build
    double bagged_k_distance = 0.0; // subsampling and per-round k_D searches
    double neighbors = 0.0;         // one max(k_L, k_G)-NN pass over the full data
    double plls = 0.0;              // level-set comparisons
    double graph = 0.0;
    double components = 0.0;        // core selection, union-find, dissolution
    double backfill = 0.0;          // 1-NN labeling of non-core points

    /// Cost of producing the PLLS scores from the data: the bagged
    /// k-distance plus the comparisons. Neighbor search over the full data
    /// is shared with graph construction and is reported separately.
    double plls_phase() const noexcept { return bagged_k_distance + plls; }
    double total() const noexcept { return index + bagged_k_distance + neighbors + plls + graph + components + backfill; }
};

struct ClusterResult {
    std::vector<int> labels;
    std::vector<std::uint8_t> core_mask;
    std::vector<std::size_t> modes; // score-1 points that remain core after dissolution
    std::size_t num_clusters = 0;
    std::vector<double> plls;
    BdmbcConfig config;
    StageTimings timings;
};

/// Final labeling after component extraction.
struct FinalLabels {
    std::vector<int> labels;
    std::vector<std::uint8_t> core_mask;
    std::size_t num_clusters = 0;
};

/// Dissolves components smaller than `min_cluster_size` (their points become
/// non-core), gives every non-core point the label of its nearest core point,
/// and renumbers clusters by descending size, ties by smallest member index.
/// Without any surviving core point everything becomes cluster 0.
inline FinalLabels finalize(const Dataset& ds, const Components& provisional, std::size_t min_cluster_size) {
    const std::size_t n = ds.size();
    if (provisional.labels.size() != n) throw ParameterError("labels", "provisional label count does not match dataset");
    std::vector<std::size_t> comp_size(provisional.count, 0);
    for (int l : provisional.labels)
        if (l >= 0) ++comp_size[static_cast<std::size_t>(l)];

    FinalLabels out{std::vector<int>(n, -1), std::vector<std::uint8_t>(n, 0), 0};
    std::vector<std::size_t> core_rows;
    for (std::size_t i = 0; i < n; ++i) {
        const int l = provisional.labels[i];
        if (l >= 0 && comp_size[static_cast<std::size_t>(l)] >= min_cluster_size) {
            out.core_mask[i] = 1;
            out.labels[i] = l;
            core_rows.push_back(i);
        }
    }
    if (core_rows.empty()) {
        std::fill(out.labels.begin(), out.labels.end(), 0);
        out.num_clusters = 1;
        return out;
    }
    if (core_rows.size() < n) {
        const SpatialIndex cores(ds, core_rows);
        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < n; ++i)
            if (!out.core_mask[i]) pending.push_back(i);
        parallel_for(pending.size(), [&](std::size_t begin, std::size_t end) {
            NeighborList buf;
            for (std::size_t p = begin; p < end; ++p) {
                const std::size_t i = pending[p];
                cores.search(ds.point(i), 1, std::nullopt, nullptr, buf);
                out.labels[i] = out.labels[buf.front().index];
            }
        }, 256);
    }

    // renumber: descending final size, then smallest member index
    std::vector<std::size_t> size(provisional.count, 0), first(provisional.count, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto l = static_cast<std::size_t>(out.labels[i]);
        ++size[l];
        first[l] = std::min(first[l], i);
    }
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < provisional.count; ++c)
        if (size[c] > 0) order.push_back(c);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
    });
    std::vector<int> remap(provisional.count, -1);
    for (std::size_t r = 0; r < order.size(); ++r) remap[order[r]] = static_cast<int>(r);
    for (auto& l : out.labels) l = remap[static_cast<std::size_t>(l)];
    out.num_clusters = order.size();
    return out;
}

namespace detail {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - start_).count();
        start_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline ClusterResult single_point_result(const BdmbcConfig& config) {
    ClusterResult r;
    r.labels = {0};
    r.core_mask = {1};
    r.modes = {0};
    r.num_clusters = 1;
    r.plls = {1.0};
    r.config = config;
    return r;
}

} // namespace detail

/// Runs the clustering pipeline over one dataset, caching every stage so
/// that parameter sweeps only recompute what changed: the full index and
/// neighbor table are shared by all runs, bagged distances are keyed by
/// (B, s, k_D, seed), scores additionally by k_L, and graphs by k_G.
class FitSession {
public:
    explicit FitSession(const Dataset& ds) : ds_(&ds) {}

    /// Pre-sizes the shared neighbor table for a sweep up to this k.
    void reserve_neighbors(std::size_t k) { reserve_ = std::max(reserve_, k); }

    ClusterResult fit(const BdmbcConfig& config) {
        const Dataset& ds = *ds_;
        const std::size_t n = ds.size();
        validate_config(config, n);
        if (n == 1) return detail::single_point_result(config);

        ClusterResult result;
        result.config = config;
        StageTimings& t = result.timings;
        detail::Stopwatch clock;

        if (!index_) index_.emplace(ds);
        t.index = clock.lap();

        const std::size_t s = config.resolved_subsample(n);
        const BaggingKey bkey{config.rounds, s, config.k_D, config.rounds == 1 && s == n ? 0 : config.seed};
        auto bit = bagged_.find(bkey);
        if (bit == bagged_.end())
            bit = bagged_.emplace(bkey, bagged_k_distance(ds, {config.rounds, s, config.k_D, config.seed}, &*index_)).first;
        t.bagged_k_distance = clock.lap();

        const std::size_t k_needed = std::max(config.k_L, config.k_G);
        if (!table_ || table_->k < k_needed) table_ = all_knn(*index_, std::min(n - 1, std::max(k_needed, reserve_)));
        t.neighbors = clock.lap();

        const PllsKey pkey{bkey, config.k_L};
        auto pit = plls_.find(pkey);
        if (pit == plls_.end()) pit = plls_.emplace(pkey, empirical_plls(*table_, bit->second, config.k_L)).first;
        const PllsScores& scores = pit->second;
        t.plls = clock.lap();

        auto git = graphs_.find(config.k_G);
        if (git == graphs_.end()) git = graphs_.emplace(config.k_G, build_kg_graph(*table_, config.k_G)).first;
        t.graph = clock.lap();

        const auto sub = core_subgraph(git->second, scores, config.lambda);
        const auto comps = connected_components(sub);
        t.components = clock.lap();

        auto final = finalize(ds, comps, config.resolved_min_cluster_size());
        t.backfill = clock.lap();

        result.labels = std::move(final.labels);
        result.core_mask = std::move(final.core_mask);
        result.num_clusters = final.num_clusters;
        result.plls = scores.values;
        for (std::size_t i = 0; i < n; ++i)
            if (scores.is_mode(i) && result.core_mask[i]) result.modes.push_back(i);
        return result;
    }

    /// Scores for a configuration (computed or cached).
    const PllsScores& scores(const BdmbcConfig& config) {
        fit(config);
        const std::size_t s = config.resolved_subsample(ds_->size());
        const BaggingKey bkey{config.rounds, s, config.k_D, config.rounds == 1 && s == ds_->size() ? 0 : config.seed};
        return plls_.at({bkey, config.k_L});
    }

private:
    using BaggingKey = std::tuple<std::size_t, std::size_t, std::size_t, std::uint64_t>;
    using PllsKey = std::tuple<BaggingKey, std::size_t>;

    const Dataset* ds_;
    std::size_t reserve_ = 0;
    std::optional<SpatialIndex> index_;
    std::optional<NeighborTable> table_;
    std::map<BaggingKey, BaggedDistances> bagged_;
    std::map<PllsKey, PllsScores> plls_;
    std::map<std::size_t, NeighborGraph> graphs_;
};

/// Bagged k-distance mode-based clustering of `ds`.
inline ClusterResult bdmbc_fit(const Dataset& ds, const BdmbcConfig& config) {
    FitSession session(ds);
    return session.fit(config);
}

/// The non-bagged pipeline written out directly over plain k-distances.
inline ClusterResult dmbc_fit(const Dataset& ds, std::size_t k_D, std::size_t k_L, std::size_t k_G, double lambda,
                              std::optional<std::size_t> min_cluster_size = std::nullopt) {
    BdmbcConfig config;
    config.rounds = 1;
    config.rho = 1.0;
    config.subsample_size = ds.size();
    config.k_D = k_D;
    config.k_L = k_L;
    config.k_G = k_G;
    config.lambda = lambda;
    config.min_cluster_size = min_cluster_size;
    validate_config(config, ds.size());
    if (ds.size() == 1) return detail::single_point_result(config);

    const SpatialIndex index(ds);
    const PllsScores scores = dmbc_plls(ds, index, k_D, k_L);
    const NeighborGraph graph = build_kg_graph(index, k_G);
    const auto comps = connected_components(core_subgraph(graph, scores, lambda));
    auto final = finalize(ds, comps, config.resolved_min_cluster_size());

    ClusterResult result;
    result.config = config;
    result.labels = std::move(final.labels);
    result.core_mask = std::move(final.core_mask);
    result.num_clusters = final.num_clusters;
    result.plls = scores.values;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (scores.is_mode(i) && result.core_mask[i]) result.modes.push_back(i);
    return result;
}

} // namespace bdmbc
