#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bdmbc/error.hpp"
#include "bdmbc/knn.hpp"
#include "bdmbc/plls.hpp"

namespace bdmbc {

/// Undirected graph in compressed adjacency form; each adjacency list is
/// sorted ascending and free of duplicates and self-loops.
struct NeighborGraph {
    std::vector<std::size_t> offsets; // size n + 1
    std::vector<std::size_t> adjacency;

    std::size_t size() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::span<const std::size_t> neighbors(std::size_t i) const {
        return {adjacency.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }
    std::size_t edge_count() const noexcept { return adjacency.size() / 2; }

    static NeighborGraph from_edges(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) {
        std::vector<std::pair<std::size_t, std::size_t>> directed;
        directed.reserve(edges.size() * 2);
        for (auto [a, b] : edges) {
            if (a == b) continue;
            directed.emplace_back(a, b);
            directed.emplace_back(b, a);
        }
        std::sort(directed.begin(), directed.end());
        directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
        NeighborGraph g;
        g.offsets.assign(n + 1, 0);
        for (auto [a, b] : directed) ++g.offsets[a + 1];
        std::partial_sum(g.offsets.begin(), g.offsets.end(), g.offsets.begin());
        g.adjacency.reserve(directed.size());
        for (auto [a, b] : directed) g.adjacency.push_back(b);
        return g;
    }
};

/// Union-symmetrized k_G-NN graph: i ~ j when either lists the other among
/// its k_G nearest. `table` rows must hold at least k_G neighbors.
inline NeighborGraph build_kg_graph(const NeighborTable& table, std::size_t k_G) {
    if (k_G < 1 || k_G > table.k)
        throw ParameterError("k_G", "k_G = " + std::to_string(k_G) + " must lie in [1, " + std::to_string(table.k) + "]");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(table.n * k_G);
    for (std::size_t i = 0; i < table.n; ++i)
        for (std::size_t j : table.neighbors(i, k_G)) edges.emplace_back(i, j);
    return NeighborGraph::from_edges(table.n, std::move(edges));
}

inline NeighborGraph build_kg_graph(const SpatialIndex& idx, std::size_t k_G) {
    const std::size_t n = idx.dataset().size();
    if (k_G < 1 || k_G + 1 > n)
        throw ParameterError("k_G", "k_G = " + std::to_string(k_G) + " must lie in [1, n - 1 = " +
                                        std::to_string(n - 1) + "]");
    return build_kg_graph(all_knn(idx, k_G), k_G);
}

/// Node-induced subgraph on the level set {i : score(i) >= lambda}. Node ids
/// are kept; non-core nodes are isolated and flagged in `core`.
struct CoreSubgraph {
    std::vector<std::uint8_t> core;
    NeighborGraph graph;
};

inline CoreSubgraph core_subgraph(const NeighborGraph& g, const PllsScores& scores, double lambda) {
    const std::size_t n = g.size();
    if (scores.values.size() != n) throw ParameterError("scores", "score count does not match graph size");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda", "lambda must lie in [0, 1]");
    CoreSubgraph sub;
    sub.core.resize(n);
    for (std::size_t i = 0; i < n; ++i) sub.core[i] = scores.values[i] >= lambda ? 1 : 0;
    sub.graph.offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (sub.core[i])
            for (std::size_t j : g.neighbors(i))
                if (sub.core[j]) sub.graph.adjacency.push_back(j);
        sub.graph.offsets[i + 1] = sub.graph.adjacency.size();
    }
    return sub;
}

struct Components {
    std::vector<int> labels; // -1 for non-core nodes
    std::size_t count = 0;
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
};

/// Connected components of the core nodes, numbered 0..m-1 in order of each
/// component's smallest node index.
inline Components connected_components(const CoreSubgraph& sub) {
    const std::size_t n = sub.core.size();
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : sub.graph.neighbors(i))
            if (j > i) uf.unite(i, j);
    Components out{std::vector<int>(n, -1), 0};
    std::vector<int> root_label(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!sub.core[i]) continue;
        const std::size_t r = uf.find(i);
        if (root_label[r] < 0) root_label[r] = static_cast<int>(out.count++);
        out.labels[i] = root_label[r];
    }
    return out;
}

} // namespace bdmbc
