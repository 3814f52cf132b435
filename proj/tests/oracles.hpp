#pragma once

// Reference implementations used only by the tests. Each one follows the
// textbook definition directly and shares no code with the library beyond
// the Dataset container and squared_distance (the tie rule is defined on
// that value).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bdmbc/dataset.hpp"
#include "bdmbc/random.hpp"

namespace oracle {

using bdmbc::Dataset;

/// All other points of `ds` sorted by (squared distance, index) from point q.
inline std::vector<std::pair<double, std::size_t>> ranked_others(const Dataset& ds, std::size_t q) {
    std::vector<std::pair<double, std::size_t>> out;
    for (std::size_t j = 0; j < ds.size(); ++j)
        if (j != q) out.emplace_back(bdmbc::squared_distance(ds.point(q), ds.point(j)), j);
    std::sort(out.begin(), out.end());
    return out;
}

/// k nearest among `rows` (excluding q itself) to point q, by (sq, index).
inline std::vector<std::pair<double, std::size_t>> knn_among(const Dataset& ds, std::size_t q,
                                                             const std::vector<std::size_t>& rows, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> c;
    for (std::size_t j : rows)
        if (j != q) c.emplace_back(bdmbc::squared_distance(ds.point(q), ds.point(j)), j);
    std::sort(c.begin(), c.end());
    c.resize(std::min(k, c.size()));
    return c;
}

inline double k_distance(const Dataset& ds, std::size_t q, std::size_t k) {
    return std::sqrt(ranked_others(ds, q)[k - 1].first);
}

/// Double loop: fraction of q's k_L nearest others whose distance value is
/// at least q's own.
inline std::vector<double> plls(const Dataset& ds, const std::vector<double>& r, std::size_t k_L) {
    std::vector<double> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto nb = ranked_others(ds, i);
        std::size_t count = 0;
        for (std::size_t t = 0; t < k_L; ++t)
            if (r[nb[t].second] >= r[i]) ++count;
        out[i] = static_cast<double>(count) / static_cast<double>(k_L);
    }
    return out;
}

/// Edge set of the union-symmetrized k-NN graph as ordered pairs (a < b).
inline std::set<std::pair<std::size_t, std::size_t>> knn_graph_edges(const Dataset& ds, std::size_t k) {
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto nb = ranked_others(ds, i);
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t j = nb[t].second;
            edges.emplace(std::min(i, j), std::max(i, j));
        }
    }
    return edges;
}

/// Breadth-first component labels over nodes with mask[i] set; components
/// numbered by first discovery in index order, -1 elsewhere.
inline std::vector<int> bfs_components(std::size_t n, const std::vector<std::vector<std::size_t>>& adj,
                                       const std::vector<std::uint8_t>& mask) {
    std::vector<int> label(n, -1);
    int next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!mask[s] || label[s] >= 0) continue;
        std::queue<std::size_t> q;
        q.push(s);
        label[s] = next;
        while (!q.empty()) {
            const auto u = q.front();
            q.pop();
            for (auto v : adj[u])
                if (mask[v] && label[v] < 0) {
                    label[v] = next;
                    q.push(v);
                }
        }
        ++next;
    }
    return label;
}

/// Binomial coefficients C(a, b) for 0 <= b <= a <= n as exact integers.
class Pascal {
public:
    using Int = boost::multiprecision::cpp_int;

    explicit Pascal(std::size_t n) : n_(n), rows_(n + 1) {
        for (std::size_t a = 0; a <= n; ++a) {
            rows_[a].resize(a + 1);
            rows_[a][0] = rows_[a][a] = 1;
            for (std::size_t b = 1; b < a; ++b) rows_[a][b] = rows_[a - 1][b - 1] + rows_[a - 1][b];
        }
        approx_.resize(n + 1);
        for (std::size_t a = 0; a <= n; ++a)
            for (const auto& v : rows_[a]) approx_[a].push_back(v.convert_to<long double>());
    }

    const Int& exact(std::size_t a, std::size_t b) const { return rows_[a][b]; }
    /// Exact integer rounded once to extended precision (64-bit mantissa).
    long double rounded(std::size_t a, std::size_t b) const { return approx_[a][b]; }

private:
    std::size_t n_;
    std::vector<std::vector<Int>> rows_;
    std::vector<std::vector<long double>> approx_;
};

/// C(i-1, k-1) C(n-i, s-k) / C(n, s) from exact binomials, evaluated in
/// extended precision (relative error around 1e-18).
inline std::vector<long double> bagging_weights(const Pascal& pascal, std::size_t n, std::size_t s, std::size_t k) {
    std::vector<long double> p(n, 0.0L);
    const long double denom = pascal.rounded(n, s);
    for (std::size_t i = k; i <= n - s + k; ++i)
        p[i - 1] = pascal.rounded(i - 1, k - 1) * pascal.rounded(n - i, s - k) / denom;
    return p;
}

/// Pair-counting Rand-based ARI: enumerates all point pairs, then applies
/// the Hubert-Arabie adjustment to the raw agreement counts.
inline double ari_pairs(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    double both = 0, only_a = 0, only_b = 0, neither = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j], sb = b[i] == b[j];
            if (sa && sb) ++both;
            else if (sa) ++only_a;
            else if (sb) ++only_b;
            else ++neither;
        }
    const double pairs = both + only_a + only_b + neither;
    const double expected = (both + only_a) * (both + only_b) / pairs;
    const double maximum = ((both + only_a) + (both + only_b)) / 2.0;
    if (maximum == expected) return 1.0;
    return (both - expected) / (maximum - expected);
}

/// RI = (agreeing pairs) / C(n, 2).
inline double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    double agree = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            ++pairs;
            if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
        }
    return agree / pairs;
}

/// Mutual information and entropies from joint and marginal frequencies
/// accumulated point by point.
inline double nmi_entropy(const std::vector<int>& a, const std::vector<int>& b) {
    const double n = static_cast<double>(a.size());
    std::map<int, double> pa, pb;
    std::map<std::pair<int, int>, double> pab;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0 / n;
        pb[b[i]] += 1.0 / n;
        pab[{a[i], b[i]}] += 1.0 / n;
    }
    if (pa.size() == 1 && pb.size() == 1) return 1.0;
    if (pa.size() == 1 || pb.size() == 1) return 0.0;
    double ha = 0, hb = 0, mi = 0;
    for (auto [k, p] : pa) ha -= p * std::log(p);
    for (auto [k, p] : pb) hb -= p * std::log(p);
    for (auto [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
    return mi / std::sqrt(ha * hb);
}

/// Every set partition of n labeled items as restricted-growth strings.
inline std::vector<std::vector<int>> all_partitions(std::size_t n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_label) {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (int l = 0; l <= max_label + 1; ++l) {
            cur[i] = l;
            rec(i + 1, std::max(max_label, l));
        }
    };
    if (n == 0) return {{}};
    cur[0] = 0;
    rec(1, 0);
    return out;
}

/// Minimum total over every injective map from the smaller side to the
/// larger side. Also returns the lexicographically first minimizer as a
/// map from rows to columns (-1 when rows > cols and the row is unmatched).
struct BruteAssignment {
    double total;
    std::vector<int> row_to_col;
};

inline BruteAssignment brute_assignment(const std::vector<std::vector<double>>& c) {
    const std::size_t r = c.size(), k = c.front().size();
    const bool rows_small = r <= k;
    const std::size_t small = rows_small ? r : k, large = rows_small ? k : r;
    auto cost = [&](std::size_t s, std::size_t l) { return rows_small ? c[s][l] : c[l][s]; };
    std::vector<std::size_t> perm(large);
    std::iota(perm.begin(), perm.end(), 0);
    BruteAssignment best{INFINITY, {}};
    std::vector<std::size_t> best_map;
    // every ordered choice of `small` distinct columns appears as a prefix of some permutation
    std::set<std::vector<std::size_t>> seen;
    do {
        std::vector<std::size_t> prefix(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(small));
        if (!seen.insert(prefix).second) continue;
        double t = 0;
        for (std::size_t s = 0; s < small; ++s) t += cost(s, prefix[s]);
        if (t < best.total - 1e-12 || (std::abs(t - best.total) <= 1e-12 && prefix < best_map)) {
            best.total = t;
            best_map = prefix;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    best.row_to_col.assign(r, -1);
    for (std::size_t s = 0; s < small; ++s) {
        if (rows_small)
            best.row_to_col[s] = static_cast<int>(best_map[s]);
        else
            best.row_to_col[best_map[s]] = static_cast<int>(s);
    }
    return best;
}

inline Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double grid = 0.0) {
    bdmbc::Rng rng(seed, 99);
    std::vector<double> x(n * d);
    for (auto& v : x) {
        v = rng.uniform();
        if (grid > 0.0) v = std::round(v / grid) * grid; // forces many exact ties
    }
    return Dataset(n, d, std::move(x));
}

} // namespace oracle
