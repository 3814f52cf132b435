#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bdmbc/csv.hpp"
#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/knn.hpp"
#include "bdmbc/parallel.hpp"
#include "bdmbc/random.hpp"

namespace bdmbc {

struct BaggingPlan {
    std::size_t rounds = 1;
    std::size_t subsample_size = 1;
    std::size_t k = 1;
    std::uint64_t seed = 0;
};

/// How a bagging round finds neighbors inside its subsample. A tree built
/// over the subsample is faster at every ratio below 0.9 on uniform and
/// clustered data in 2 to 10 dimensions (see bdmbc_crossover_bench), and
/// about even at 0.9.
enum class RoundSearch {
    subset_index,   // build a k-d tree over the subsample
    filtered_index, // query the full tree, skipping non-members
};

struct BaggedDistances {
    std::vector<double> values;
};

inline void validate_plan(const BaggingPlan& plan, std::size_t n) {
    if (plan.rounds < 1) throw ParameterError("B", "B must be at least 1");
    if (plan.subsample_size < 1 || plan.subsample_size > n)
        throw ParameterError("s", "subsample size s = " + std::to_string(plan.subsample_size) +
                                      " must lie in [1, n = " + std::to_string(n) + "]");
    if (plan.k < 1) throw ParameterError("k_D", "k_D must be at least 1");
    if (plan.k >= plan.subsample_size)
        throw ParameterError("k_D", "k_D must be smaller than subsample size (k_D = " + std::to_string(plan.k) +
                                        ", s = " + std::to_string(plan.subsample_size) + ")");
}

/// s distinct indices from [0, n), uniformly over all s-subsets, sorted
/// ascending. Uses s steps of a partial Fisher-Yates shuffle.
inline std::vector<std::size_t> subsample(std::size_t n, std::size_t s, Rng& rng) {
    if (s < 1 || s > n)
        throw ParameterError("s", "subsample size " + std::to_string(s) + " must lie in [1, " + std::to_string(n) + "]");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(s);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/// Average over B subsamples of each point's k-distance inside the
/// subsample. Round b draws from stream (seed, b). A point that belongs to
/// the subsample is left out of its own neighbor list. Rounds run in index
/// order and each point's sum is accumulated in that order, so the result is
/// independent of the worker count.
inline BaggedDistances bagged_k_distance(const Dataset& ds, const BaggingPlan& plan,
                                         const SpatialIndex* full_index = nullptr,
                                         RoundSearch search = RoundSearch::subset_index) {
    const std::size_t n = ds.size();
    validate_plan(plan, n);
    std::optional<SpatialIndex> own_full;
    auto full = [&]() -> const SpatialIndex& {
        if (full_index) return *full_index;
        if (!own_full) own_full.emplace(ds);
        return *own_full;
    };

    std::vector<double> sum(n, 0.0);
    std::vector<std::uint8_t> member(n, 0);
    for (std::size_t b = 0; b < plan.rounds; ++b) {
        Rng rng(plan.seed, b);
        const auto rows = subsample(n, plan.subsample_size, rng);
        const bool everyone = rows.size() == n;
        const bool filtered = everyone || search == RoundSearch::filtered_index;
        std::optional<SpatialIndex> sub;
        const std::vector<std::uint8_t>* accept = nullptr;
        if (filtered && !everyone) {
            std::fill(member.begin(), member.end(), std::uint8_t{0});
            for (std::size_t r : rows) member[r] = 1;
            accept = &member;
        } else if (!filtered) {
            sub.emplace(ds, rows);
        }
        const SpatialIndex& index = filtered ? full() : *sub;
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            NeighborList buf;
            for (std::size_t i = begin; i < end; ++i) {
                index.search(ds.point(i), plan.k, i, accept, buf);
                sum[i] += buf.back().distance;
            }
        }, 64);
    }
    const auto rounds = static_cast<double>(plan.rounds);
    for (auto& v : sum) v /= rounds;
    return {std::move(sum)};
}

/// Probability that the i-th nearest of n candidates is the k-th nearest
/// within a uniform s-subset: C(i-1, k-1) C(n-i, s-k) / C(n, s), returned as
/// p[i - 1]. Log-binomials come from lgamma; the normalizer is the log-sum-exp
/// of the support terms, which equals log C(n, s) exactly in real arithmetic.
inline std::vector<double> bagging_weights(std::size_t n, std::size_t s, std::size_t k) {
    if (!(1 <= k && k <= s && s <= n))
        throw ParameterError("k", "bagging weights need 1 <= k <= s <= n (got n = " + std::to_string(n) +
                                      ", s = " + std::to_string(s) + ", k = " + std::to_string(k) + ")");
    std::vector<double> log_fact(n + 1);
    for (std::size_t m = 0; m <= n; ++m) log_fact[m] = std::lgamma(static_cast<double>(m) + 1.0);
    auto log_choose = [&](std::size_t a, std::size_t b) { return log_fact[a] - log_fact[b] - log_fact[a - b]; };

    const std::size_t first = k, last = n - s + k; // 1-based ranks with non-zero weight
    std::vector<double> logs(last - first + 1);
    double peak = -INFINITY;
    for (std::size_t i = first; i <= last; ++i) {
        const double v = log_choose(i - 1, k - 1) + log_choose(n - i, s - k);
        logs[i - first] = v;
        peak = std::max(peak, v);
    }
    double total = 0.0;
    for (double v : logs) total += std::exp(v - peak);
    const double log_norm = peak + std::log(total);

    std::vector<double> p(n, 0.0);
    for (std::size_t i = first; i <= last; ++i) p[i - 1] = std::exp(logs[i - first] - log_norm);
    return p;
}

namespace detail {

inline std::vector<double> weighted_rank_distance(const Dataset& ds, const std::vector<double>& weights) {
    const std::size_t n = ds.size();
    std::size_t support_end = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0) support_end = i + 1;
    SpatialIndex index(ds);
    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        NeighborList buf;
        for (std::size_t i = begin; i < end; ++i) {
            index.search(ds.point(i), support_end, i, nullptr, buf);
            double v = 0.0;
            for (std::size_t r = 0; r < support_end; ++r) v += weights[r] * buf[r].distance;
            out[i] = v;
        }
    }, 16);
    return out;
}

} // namespace detail

/// Infinite-bagging limit of the bagged k-distance taken over the n - 1
/// other points: sum_i p_i R_i(x) with p from bagging_weights(n - 1,
/// min(s, n - 1), k) and R_i the distance to the i-th nearest other point.
inline std::vector<double> infinite_bagged_k_distance(const Dataset& ds, std::size_t s, std::size_t k) {
    const std::size_t n = ds.size();
    if (n < 2) throw ParameterError("n", "need at least two points");
    const std::size_t population = n - 1, sample = std::min(s, population);
    if (!(1 <= k && k <= sample))
        throw ParameterError("k", "need 1 <= k <= min(s, n - 1)");
    return detail::weighted_rank_distance(ds, bagging_weights(population, sample, k));
}

/// Exact expectation of one bagged_k_distance round. With probability s/n
/// the point is in the subsample and its k-th neighbor is ranked among s - 1
/// others, otherwise among s others; both drawn from the n - 1 other points.
inline std::vector<double> expected_bagged_k_distance(const Dataset& ds, std::size_t s, std::size_t k) {
    const std::size_t n = ds.size();
    if (n < 2) throw ParameterError("n", "need at least two points");
    if (!(1 <= k && k < s && s <= n)) throw ParameterError("k", "need 1 <= k < s <= n");
    const double in = static_cast<double>(s) / static_cast<double>(n);
    std::vector<double> q = bagging_weights(n - 1, s - 1, k);
    for (auto& v : q) v *= in;
    if (s < n) {
        const auto out = bagging_weights(n - 1, s, k);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += (1.0 - in) * out[i];
    }
    return detail::weighted_rank_distance(ds, q);
}

/// Volume of the unit Euclidean ball in d dimensions.
inline double unit_ball_volume(std::size_t d) {
    const double h = static_cast<double>(d) / 2.0;
    return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0));
}

/// Density implied by bagged k-distances:
///   f(x) = (sum_i p_i (i/n')^(1/d))^d / (V_d R(x)^d),
/// with p from bagging_weights(n', min(s, n'), k) and n' = n - 1.
inline std::vector<double> hypothetical_density(const Dataset& ds, std::size_t s, std::size_t k,
                                                const BaggedDistances& bagged) {
    const std::size_t n = ds.size(), d = ds.dim();
    if (bagged.values.size() != n) throw ParameterError("bagged", "bagged distance count does not match dataset");
    if (n < 2) throw ParameterError("n", "need at least two points");
    const std::size_t population = n - 1, sample = std::min(s, population);
    if (!(1 <= k && k <= sample)) throw ParameterError("k", "need 1 <= k <= min(s, n - 1)");
    const auto p = bagging_weights(population, sample, k);
    const double inv_d = 1.0 / static_cast<double>(d);
    double scale = 0.0;
    for (std::size_t i = 0; i < population; ++i)
        if (p[i] > 0.0)
            scale += p[i] * std::pow(static_cast<double>(i + 1) / static_cast<double>(population), inv_d);
    const double volume = unit_ball_volume(d);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = bagged.values[i];
        if (!(r > 0.0))
            throw DegenerateDataError(i, "bagged k-distance of point " + std::to_string(i) +
                                             " is zero; coincident points make the density unbounded");
        f[i] = std::pow(scale / r, static_cast<double>(d)) / volume;
    }
    return f;
}

/// Diagnostic dump: `index,bagged_distance` per line.
inline void write_bagged_csv(const std::string& path, const BaggedDistances& bagged) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "index,bagged_distance\n";
    for (std::size_t i = 0; i < bagged.values.size(); ++i) out << i << ',' << format_real(bagged.values[i]) << '\n';
    if (!out) throw IoError("write failure on '" + path + "'");
}

} // namespace bdmbc
