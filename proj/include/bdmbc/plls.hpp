#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "bdmbc/bagging.hpp"
#include "bdmbc/csv.hpp"
#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/knn.hpp"
#include "bdmbc/parallel.hpp"

namespace bdmbc {

/// Empirical probability of localized level sets. values[i] is
/// counts[i] / k_L; a score of exactly 1 is stored as k_L / k_L.
struct PllsScores {
    std::vector<double> values;
    std::vector<std::uint32_t> counts;
    std::size_t k_L = 0;
    std::vector<double> distances; // the bagged k-distances the scores were derived from

    bool is_mode(std::size_t i) const noexcept { return counts[i] == k_L; }
};

/// Scores from a precomputed neighbor table (whose rows must hold at least
/// k_L neighbors). A neighbor counts when its bagged distance is >= the
/// point's own, so ties count in the point's favour.
inline PllsScores empirical_plls(const NeighborTable& neighbors, const BaggedDistances& bagged, std::size_t k_L) {
    const std::size_t n = neighbors.n;
    if (bagged.values.size() != n)
        throw ParameterError("bagged", "bagged distance count " + std::to_string(bagged.values.size()) +
                                           " does not match point count " + std::to_string(n));
    if (k_L < 1 || k_L > neighbors.k)
        throw ParameterError("k_L", "k_L = " + std::to_string(k_L) + " must lie in [1, " +
                                        std::to_string(neighbors.k) + "]");
    PllsScores out{std::vector<double>(n), std::vector<std::uint32_t>(n), k_L, bagged.values};
    const auto& r = bagged.values;
    const double denom = static_cast<double>(k_L);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::uint32_t count = 0;
            for (std::size_t j : neighbors.neighbors(i, k_L)) count += r[j] >= r[i] ? 1u : 0u;
            out.counts[i] = count;
            out.values[i] = static_cast<double>(count) / denom;
        }
    }, 1024);
    return out;
}

inline PllsScores empirical_plls(const Dataset& ds, const SpatialIndex& idx, const BaggedDistances& bagged,
                                 std::size_t k_L) {
    const std::size_t n = ds.size();
    if (bagged.values.size() != n)
        throw ParameterError("bagged", "bagged distance count does not match point count");
    if (k_L < 1 || k_L + 1 > n)
        throw ParameterError("k_L", "k_L = " + std::to_string(k_L) + " must lie in [1, n - 1 = " +
                                        std::to_string(n - 1) + "]");
    return empirical_plls(all_knn(idx, k_L), bagged, k_L);
}

/// Indices whose score is exactly 1, ascending.
inline std::vector<std::size_t> mode_set(const PllsScores& scores) {
    std::vector<std::size_t> modes;
    for (std::size_t i = 0; i < scores.counts.size(); ++i)
        if (scores.is_mode(i)) modes.push_back(i);
    return modes;
}

/// Plain k-distance per point (no subsampling).
inline BaggedDistances plain_k_distances(const Dataset& ds, const SpatialIndex& idx, std::size_t k_D) {
    const std::size_t n = ds.size();
    if (k_D < 1 || k_D + 1 > n)
        throw ParameterError("k_D", "k_D = " + std::to_string(k_D) + " must lie in [1, n - 1 = " +
                                        std::to_string(n - 1) + "]");
    std::vector<double> r(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        NeighborList buf;
        for (std::size_t i = begin; i < end; ++i) {
            idx.search(ds.point(i), k_D, i, nullptr, buf);
            r[i] = buf.back().distance;
        }
    }, 64);
    return {std::move(r)};
}

/// The non-bagged special case: PLLS over plain k_D-distances.
inline PllsScores dmbc_plls(const Dataset& ds, const SpatialIndex& idx, std::size_t k_D, std::size_t k_L) {
    return empirical_plls(ds, idx, plain_k_distances(ds, idx, k_D), k_L);
}

/// `index,plls` per line.
inline void write_plls_csv(const std::string& path, const PllsScores& scores) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "index,plls\n";
    for (std::size_t i = 0; i < scores.values.size(); ++i) out << i << ',' << format_real(scores.values[i]) << '\n';
    if (!out) throw IoError("write failure on '" + path + "'");
}

} // namespace bdmbc
