#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "json.hpp"

#include "bdmbc/cluster.hpp"
#include "bdmbc/csv.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/metrics.hpp"

namespace bdmbc {

using ordered_json = nlohmann::ordered_json;

/// Config echo with the subsample size and cluster floor resolved for `n`.
inline ordered_json config_json(const BdmbcConfig& c, std::size_t n) {
    ordered_json j;
    j["b"] = c.rounds;
    j["rho"] = c.rho;
    j["s"] = n == 1 ? std::size_t{1} : c.resolved_subsample(n);
    j["kd"] = c.k_D;
    j["kl"] = c.k_L;
    j["kg"] = c.k_G;
    j["lambda"] = c.lambda;
    j["min_cluster_size"] = c.resolved_min_cluster_size();
    j["seed"] = c.seed;
    return j;
}

/// Everything in the result except timings, so equal inputs give equal bytes.
inline ordered_json result_json(const ClusterResult& r) {
    ordered_json j;
    j["labels"] = r.labels;
    j["modes"] = r.modes;
    auto core = ordered_json::array();
    for (auto c : r.core_mask) core.push_back(c != 0);
    j["core"] = std::move(core);
    j["num_clusters"] = r.num_clusters;
    j["plls"] = r.plls;
    j["config"] = config_json(r.config, r.labels.size());
    return j;
}

inline ordered_json timings_json(const StageTimings& t) {
    ordered_json j;
    j["index"] = t.index;
    j["bagged_k_distance"] = t.bagged_k_distance;
    j["neighbors"] = t.neighbors;
    j["plls"] = t.plls;
    j["graph"] = t.graph;
    j["components"] = t.components;
    j["backfill"] = t.backfill;
    j["plls_phase"] = t.plls_phase();
    j["total"] = t.total();
    return j;
}

inline ordered_json metrics_json(const MetricReport& m) {
    ordered_json j;
    j["ari"] = m.ari;
    j["nmi"] = m.nmi;
    j["f1"] = m.f1;
    j["acc"] = m.acc;
    return j;
}

/// Aligned two-line table: header then values, in ARI NMI F1 ACC order.
inline std::string metrics_table(const MetricReport& m, const std::string& row_name = "") {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-12s %8s %8s %8s %8s\n", "", "ARI", "NMI", "F1", "ACC");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-12s %8.4f %8.4f %8.4f %8.4f\n", row_name.c_str(), m.ari, m.nmi, m.f1, m.acc);
    out += buf;
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write failure on '" + path + "'");
}

inline void write_json(const std::string& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

/// `index,label,core,plls` per point.
inline void write_result_csv(const std::string& path, const ClusterResult& r) {
    std::string text = "index,label,core,plls\n";
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        text += std::to_string(i) + ',' + std::to_string(r.labels[i]) + ',' + (r.core_mask[i] ? "1" : "0") + ',' +
                format_real(r.plls[i]) + '\n';
    }
    write_text(path, text);
}

} // namespace bdmbc
