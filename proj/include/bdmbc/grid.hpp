#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "bdmbc/cluster.hpp"
#include "bdmbc/csv.hpp"
#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/metrics.hpp"

namespace bdmbc {

enum class SelectionMetric { ari, nmi, f1, acc };

inline SelectionMetric parse_metric(const std::string& name) {
    if (name == "ari") return SelectionMetric::ari;
    if (name == "nmi") return SelectionMetric::nmi;
    if (name == "f1") return SelectionMetric::f1;
    if (name == "acc") return SelectionMetric::acc;
    throw ParameterError("metric", "unknown metric '" + name + "' (expected ari, nmi, f1 or acc)");
}

inline double metric_value(const MetricReport& m, SelectionMetric which) {
    switch (which) {
    case SelectionMetric::ari: return m.ari;
    case SelectionMetric::nmi: return m.nmi;
    case SelectionMetric::f1: return m.f1;
    case SelectionMetric::acc: return m.acc;
    }
    return m.ari;
}

struct GridSpec {
    std::vector<std::size_t> b{10};
    std::vector<double> rho{0.1};
    std::vector<std::size_t> kd;
    std::vector<std::size_t> kl;
    std::vector<std::size_t> kg{15};
    std::vector<double> lambda{0.5};
    SelectionMetric metric = SelectionMetric::ari;
    std::uint64_t seed = 0;
    std::optional<std::size_t> min_cluster_size;

    std::size_t cells() const { return b.size() * rho.size() * kd.size() * kl.size() * kg.size() * lambda.size(); }
};

namespace detail {

template <class T>
std::vector<T> grid_list(const nlohmann::json& j, const char* key, std::vector<T> fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    std::vector<T> out;
    if (v.is_array())
        out = v.get<std::vector<T>>();
    else
        out.push_back(v.get<T>());
    if (out.empty()) throw ParameterError(key, std::string("grid list '") + key + "' is empty");
    return out;
}

} // namespace detail

/// Keys: b, rho, kd, kl, kg, lambda (scalar or list), metric, seed,
/// min_cluster_size. kd and kl are required.
inline GridSpec parse_grid_spec(const nlohmann::json& j) {
    GridSpec g;
    try {
        if (!j.is_object()) throw ParameterError("grid", "grid spec must be a JSON object");
        for (const char* key : {"kd", "kl"})
            if (!j.contains(key)) throw ParameterError(key, std::string("grid spec needs '") + key + "'");
        g.b = detail::grid_list<std::size_t>(j, "b", g.b);
        g.rho = detail::grid_list<double>(j, "rho", g.rho);
        g.kd = detail::grid_list<std::size_t>(j, "kd", {});
        g.kl = detail::grid_list<std::size_t>(j, "kl", {});
        g.kg = detail::grid_list<std::size_t>(j, "kg", g.kg);
        g.lambda = detail::grid_list<double>(j, "lambda", g.lambda);
        if (j.contains("metric")) g.metric = parse_metric(j.at("metric").get<std::string>());
        if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("min_cluster_size")) g.min_cluster_size = j.at("min_cluster_size").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError("grid", std::string("malformed grid spec: ") + e.what());
    }
    return g;
}

struct GridRow {
    BdmbcConfig config;
    MetricReport metrics;
    std::size_t num_clusters = 0;
};

struct GridOutcome {
    std::vector<GridRow> rows; // best first
    std::size_t skipped = 0;   // cells whose parameters are invalid for this dataset
};

/// Evaluates every cell of the grid against the dataset's labels and sorts
/// rows by the selection metric, descending. Equal scores fall back to the
/// parameter tuple (b, rho, kd, kl, kg, lambda) in ascending order.
inline GridOutcome run_grid(const Dataset& ds, const GridSpec& spec) {
    if (!ds.has_labels()) throw ParameterError("labels", "grid search needs ground-truth labels");
    const auto& truth = ds.labels();
    FitSession session(ds);
    std::size_t k_max = 0;
    for (auto k : spec.kl) k_max = std::max(k_max, k);
    for (auto k : spec.kg) k_max = std::max(k_max, k);
    session.reserve_neighbors(k_max);

    GridOutcome out;
    for (auto b : spec.b)
        for (auto rho : spec.rho)
            for (auto kd : spec.kd)
                for (auto kl : spec.kl)
                    for (auto kg : spec.kg)
                        for (auto lambda : spec.lambda) {
                            BdmbcConfig c;
                            c.rounds = b;
                            c.rho = rho;
                            c.k_D = kd;
                            c.k_L = kl;
                            c.k_G = kg;
                            c.lambda = lambda;
                            c.seed = spec.seed;
                            c.min_cluster_size = spec.min_cluster_size;
                            try {
                                validate_config(c, ds.size());
                            } catch (const ParameterError&) {
                                ++out.skipped;
                                continue;
                            }
                            const auto r = session.fit(c);
                            out.rows.push_back({c, evaluate(truth, r.labels), r.num_clusters});
                        }
    auto key = [](const BdmbcConfig& c) { return std::tie(c.rounds, c.rho, c.k_D, c.k_L, c.k_G, c.lambda); };
    std::stable_sort(out.rows.begin(), out.rows.end(), [&](const GridRow& a, const GridRow& b) {
        const double va = metric_value(a.metrics, spec.metric), vb = metric_value(b.metrics, spec.metric);
        if (va != vb) return va > vb;
        return key(a.config) < key(b.config);
    });
    return out;
}

inline std::string grid_csv(const GridOutcome& g) {
    std::string text = "b,rho,kd,kl,kg,lambda,ari,nmi,f1,acc,num_clusters\n";
    for (const auto& r : g.rows) {
        const auto& c = r.config;
        text += std::to_string(c.rounds) + ',' + format_real(c.rho) + ',' + std::to_string(c.k_D) + ',' +
                std::to_string(c.k_L) + ',' + std::to_string(c.k_G) + ',' + format_real(c.lambda) + ',' +
                format_real(r.metrics.ari) + ',' + format_real(r.metrics.nmi) + ',' + format_real(r.metrics.f1) + ',' +
                format_real(r.metrics.acc) + ',' + std::to_string(r.num_clusters) + '\n';
    }
    return text;
}

} // namespace bdmbc
