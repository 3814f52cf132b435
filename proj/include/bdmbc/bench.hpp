#pragma once

#include <cstdio>
#include <optional>
#include <string>

#include "bdmbc/cluster.hpp"
#include "bdmbc/io.hpp"
#include "bdmbc/metrics.hpp"

namespace bdmbc {

struct BenchArm {
    std::string name;
    ClusterResult result;
    std::optional<MetricReport> metrics; // present when the dataset is labeled
};

struct BenchReport {
    BenchArm a, b;

    /// PLLS-phase time of arm a divided by that of arm b.
    double plls_speedup() const {
        const double tb = b.result.timings.plls_phase();
        return tb > 0.0 ? a.result.timings.plls_phase() / tb : 0.0;
    }
};

/// Fits both configurations from scratch (no shared caches) and scores them.
inline BenchReport run_bench(const Dataset& ds, const BdmbcConfig& a, const BdmbcConfig& b,
                             std::string name_a = "A", std::string name_b = "B") {
    auto arm = [&](const BdmbcConfig& c, std::string name) {
        BenchArm out{std::move(name), bdmbc_fit(ds, c), std::nullopt};
        if (ds.has_labels()) out.metrics = evaluate(ds.labels(), out.result.labels);
        return out;
    };
    BenchReport r;
    r.a = arm(a, std::move(name_a));
    r.b = arm(b, std::move(name_b));
    return r;
}

inline ordered_json bench_json(const BenchReport& r, std::size_t n) {
    auto arm = [n](const BenchArm& x) {
        ordered_json j;
        j["name"] = x.name;
        j["config"] = config_json(x.result.config, n);
        j["num_clusters"] = x.result.num_clusters;
        j["timings"] = timings_json(x.result.timings);
        if (x.metrics) j["metrics"] = metrics_json(*x.metrics);
        return j;
    };
    ordered_json j;
    j["arms"] = ordered_json::array({arm(r.a), arm(r.b)});
    j["plls_speedup"] = r.plls_speedup();
    if (r.a.metrics && r.b.metrics) j["ari_difference"] = r.b.metrics->ari - r.a.metrics->ari;
    return j;
}

/// One row per arm: stage seconds, then quality.
inline std::string bench_table(const BenchReport& r) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-10s %9s %9s %9s %9s %9s %9s %9s %9s %8s %8s %8s %8s %5s\n", "arm", "index",
                  "bagged", "knn", "plls", "graph", "comps", "backfill", "plls_ph", "ARI", "NMI", "F1", "ACC", "k");
    out += buf;
    for (const BenchArm* x : {&r.a, &r.b}) {
        const auto& t = x->result.timings;
        const MetricReport m = x->metrics.value_or(MetricReport{});
        std::snprintf(buf, sizeof buf, "%-10s %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f %9.4f %8.4f %8.4f %8.4f %8.4f %5zu\n",
                      x->name.c_str(), t.index, t.bagged_k_distance, t.neighbors, t.plls, t.graph, t.components,
                      t.backfill, t.plls_phase(), m.ari, m.nmi, m.f1, m.acc, x->result.num_clusters);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "plls-phase speedup (%s / %s): %.2fx\n", r.a.name.c_str(), r.b.name.c_str(),
                  r.plls_speedup());
    out += buf;
    return out;
}

} // namespace bdmbc
