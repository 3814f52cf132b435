#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bdmbc/error.hpp"

namespace bdmbc {

/// Class-by-cluster counts. Rows follow the sorted distinct true labels,
/// columns the sorted distinct predicted labels.
struct ContingencyTable {
    std::size_t rows = 0, cols = 0;
    std::vector<std::size_t> counts; // rows x cols, row-major
    std::vector<std::size_t> row_sums, col_sums;
    std::vector<int> row_labels, col_labels;
    std::size_t total = 0;

    std::size_t operator()(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

namespace detail {

inline void check_lengths(std::span<const int> a, std::span<const int> b, std::size_t min_len) {
    if (a.size() != b.size())
        throw ParameterError("labels", "label vectors differ in length (" + std::to_string(a.size()) + " vs " +
                                           std::to_string(b.size()) + ")");
    if (a.size() < min_len)
        throw ParameterError("labels", "need at least " + std::to_string(min_len) + " labels");
}

inline double choose2(std::size_t m) { return static_cast<double>(m) * static_cast<double>(m - (m > 0)) / 2.0; }

} // namespace detail

inline ContingencyTable contingency(std::span<const int> truth, std::span<const int> pred) {
    detail::check_lengths(truth, pred, 1);
    std::map<int, std::size_t> rmap, cmap;
    for (int l : truth) rmap.emplace(l, 0);
    for (int l : pred) cmap.emplace(l, 0);
    ContingencyTable t;
    for (auto& [label, slot] : rmap) {
        slot = t.row_labels.size();
        t.row_labels.push_back(label);
    }
    for (auto& [label, slot] : cmap) {
        slot = t.col_labels.size();
        t.col_labels.push_back(label);
    }
    t.rows = rmap.size();
    t.cols = cmap.size();
    t.counts.assign(t.rows * t.cols, 0);
    t.row_sums.assign(t.rows, 0);
    t.col_sums.assign(t.cols, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const std::size_t r = rmap[truth[i]], c = cmap[pred[i]];
        ++t.counts[r * t.cols + c];
        ++t.row_sums[r];
        ++t.col_sums[c];
    }
    t.total = truth.size();
    return t;
}

/// Adjusted Rand index. Both partitions trivial in the same way (one
/// cluster each, or all singletons) makes the formula 0/0; that case is 1.
inline double ari(std::span<const int> truth, std::span<const int> pred) {
    detail::check_lengths(truth, pred, 2);
    const auto t = contingency(truth, pred);
    double index = 0.0, a = 0.0, b = 0.0;
    for (auto c : t.counts) index += detail::choose2(c);
    for (auto r : t.row_sums) a += detail::choose2(r);
    for (auto c : t.col_sums) b += detail::choose2(c);
    const double expected = a * b / detail::choose2(t.total);
    const double max_index = 0.5 * (a + b);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

/// Normalized mutual information with geometric-mean normalization.
/// Both partitions single-cluster gives 1; exactly one gives 0.
inline double nmi(std::span<const int> truth, std::span<const int> pred) {
    detail::check_lengths(truth, pred, 1);
    const auto t = contingency(truth, pred);
    if (t.rows == 1 && t.cols == 1) return 1.0;
    if (t.rows == 1 || t.cols == 1) return 0.0;
    const double n = static_cast<double>(t.total);
    auto entropy = [n](const std::vector<std::size_t>& sums) {
        double h = 0.0;
        for (auto s : sums)
            if (s > 0) {
                const double p = static_cast<double>(s) / n;
                h -= p * std::log(p);
            }
        return h;
    };
    double mi = 0.0;
    for (std::size_t i = 0; i < t.rows; ++i)
        for (std::size_t j = 0; j < t.cols; ++j) {
            const auto c = t(i, j);
            if (c == 0) continue;
            const double cij = static_cast<double>(c);
            mi += cij / n * std::log(cij * n / (static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j])));
        }
    const double denom = std::sqrt(entropy(t.row_sums) * entropy(t.col_sums));
    return std::clamp(mi / denom, 0.0, 1.0);
}

/// Optimal assignment result. row_to_col[i] is -1 for unassigned rows (only
/// possible when rows > cols), and symmetrically for col_to_row.
struct Assignment {
    std::vector<int> row_to_col;
    std::vector<int> col_to_row;
    double total = 0.0;
};

namespace detail {

/// Shortest-augmenting-path Hungarian method for rows <= cols. Returns the
/// column of each row plus the dual potentials (u for rows, v for columns).
struct HungarianSolution {
    std::vector<std::size_t> row_to_col;
    std::vector<double> u, v;
    double total = 0.0;
};

inline HungarianSolution hungarian(std::span<const double> cost, std::size_t rows, std::size_t cols,
                                   std::span<const std::uint8_t> row_active, std::span<const std::uint8_t> col_active) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based arrays as in the classical formulation; p[j] = row matched to column j
    std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
    std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
    for (std::size_t i = 1; i <= rows; ++i) {
        if (!row_active[i - 1]) continue;
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<std::uint8_t> used(cols + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= cols; ++j) {
                if (used[j] || !col_active[j - 1]) continue;
                const double cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    HungarianSolution sol;
    sol.row_to_col.assign(rows, static_cast<std::size_t>(-1));
    for (std::size_t j = 1; j <= cols; ++j)
        if (p[j] != 0) {
            sol.row_to_col[p[j] - 1] = j - 1;
            sol.total += cost[(p[j] - 1) * cols + (j - 1)];
        }
    sol.u.assign(u.begin() + 1, u.end());
    sol.v.assign(v.begin() + 1, v.end());
    return sol;
}

/// Lexicographically smallest optimal assignment for rows <= cols: each row
/// in turn takes the smallest column that still admits an optimal
/// completion. Candidates are restricted to edges that are tight under the
/// optimal duals, since every optimal assignment uses only tight edges.
inline std::vector<std::size_t> lex_min_assignment(std::span<const double> cost, std::size_t rows, std::size_t cols,
                                                   double& total) {
    std::vector<std::uint8_t> row_active(rows, 1), col_active(cols, 1);
    auto best = hungarian(cost, rows, cols, row_active, col_active);
    total = best.total;
    double scale = 1.0;
    for (double c : cost) scale = std::max(scale, std::abs(c));
    const double tol = 1e-9 * scale * static_cast<double>(rows + 1);

    std::vector<std::size_t> result(rows);
    double fixed = 0.0;
    auto current = best.row_to_col;
    for (std::size_t i = 0; i < rows; ++i) {
        row_active[i] = 0;
        std::vector<std::size_t> candidates;
        for (std::size_t j = 0; j < cols; ++j) {
            if (!col_active[j]) continue;
            const double slack = cost[i * cols + j] - best.u[i] - best.v[j];
            if (std::abs(slack) <= tol || j == current[i]) candidates.push_back(j);
        }
        bool placed = false;
        for (std::size_t j : candidates) {
            if (j == current[i]) {
                placed = true;
            } else {
                col_active[j] = 0;
                auto rest = hungarian(cost, rows, cols, row_active, col_active);
                col_active[j] = 1;
                if (fixed + cost[i * cols + j] + rest.total <= total + tol) {
                    for (std::size_t r = i + 1; r < rows; ++r) current[r] = rest.row_to_col[r];
                    current[i] = j;
                    placed = true;
                }
            }
            if (placed) {
                result[i] = j;
                fixed += cost[i * cols + j];
                col_active[j] = 0;
                break;
            }
        }
    }
    return result;
}

} // namespace detail

/// Minimum-cost assignment on a rows x cols matrix (row-major). The smaller
/// side is matched completely; among optimal assignments the one whose
/// smaller-side mapping is lexicographically smallest is returned.
inline Assignment kuhn_munkres(std::span<const double> cost, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw ParameterError("cost", "cost matrix is empty");
    if (cost.size() != rows * cols) throw ParameterError("cost", "cost buffer size does not equal rows * cols");
    for (double c : cost)
        if (!std::isfinite(c)) throw ParameterError("cost", "cost entries must be finite");
    Assignment a{std::vector<int>(rows, -1), std::vector<int>(cols, -1), 0.0};
    if (rows <= cols) {
        const auto m = detail::lex_min_assignment(cost, rows, cols, a.total);
        for (std::size_t i = 0; i < rows; ++i) {
            a.row_to_col[i] = static_cast<int>(m[i]);
            a.col_to_row[m[i]] = static_cast<int>(i);
        }
    } else {
        std::vector<double> transposed(cost.size());
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) transposed[j * rows + i] = cost[i * cols + j];
        const auto m = detail::lex_min_assignment(transposed, cols, rows, a.total);
        for (std::size_t j = 0; j < cols; ++j) {
            a.col_to_row[j] = static_cast<int>(m[j]);
            a.row_to_col[m[j]] = static_cast<int>(j);
        }
    }
    // recompute in a fixed order so the reported total does not depend on solver path
    a.total = 0.0;
    for (std::size_t i = 0; i < rows; ++i)
        if (a.row_to_col[i] >= 0) a.total += cost[i * cols + static_cast<std::size_t>(a.row_to_col[i])];
    return a;
}

inline Assignment kuhn_munkres(const std::vector<std::vector<double>>& cost) {
    if (cost.empty() || cost.front().empty()) throw ParameterError("cost", "cost matrix is empty");
    const std::size_t rows = cost.size(), cols = cost.front().size();
    std::vector<double> flat;
    flat.reserve(rows * cols);
    for (const auto& r : cost) {
        if (r.size() != cols) throw ParameterError("cost", "cost matrix rows differ in length");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return kuhn_munkres(flat, rows, cols);
}

struct MatchedScores {
    double f1 = 0.0;
    double accuracy = 0.0;
};

/// Clusters are matched one-to-one to classes so as to maximize the number
/// of agreeing points. Accuracy is that number over n; F1 is the unweighted
/// mean over classes of the matched pair's F1 (0 for unmatched classes).
/// Among matchings with the same agreement count the one with the largest
/// F1 sum wins, so neither score depends on how clusters are named.
inline MatchedScores matched_f1_accuracy(std::span<const int> truth, std::span<const int> pred) {
    detail::check_lengths(truth, pred, 1);
    const auto t = contingency(truth, pred);
    auto pair_f1 = [&](std::size_t i, std::size_t j) {
        const double tp = static_cast<double>(t(i, j));
        return 2.0 * tp / static_cast<double>(t.row_sums[i] + t.col_sums[j]);
    };
    // the F1 term sums to less than 1 over any matching, so it only separates equal counts
    const double tie_scale = 1.0 / static_cast<double>(std::min(t.rows, t.cols) + 1);
    std::vector<double> cost(t.rows * t.cols);
    for (std::size_t i = 0; i < t.rows; ++i)
        for (std::size_t j = 0; j < t.cols; ++j)
            cost[i * t.cols + j] = -(static_cast<double>(t(i, j)) + tie_scale * pair_f1(i, j));
    const auto match = kuhn_munkres(cost, t.rows, t.cols);
    MatchedScores out;
    std::size_t correct = 0;
    double f1_sum = 0.0;
    for (std::size_t i = 0; i < t.rows; ++i) {
        const int j = match.row_to_col[i];
        if (j < 0) continue;
        const std::size_t tp = t(i, static_cast<std::size_t>(j));
        correct += tp;
        f1_sum += pair_f1(i, static_cast<std::size_t>(j));
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(t.total);
    out.f1 = f1_sum / static_cast<double>(t.rows);
    return out;
}

struct MetricReport {
    double ari = 0.0, nmi = 0.0, f1 = 0.0, acc = 0.0;
};

inline MetricReport evaluate(std::span<const int> truth, std::span<const int> pred) {
    detail::check_lengths(truth, pred, 1);
    MetricReport r;
    r.ari = truth.size() >= 2 ? ari(truth, pred) : 1.0;
    r.nmi = nmi(truth, pred);
    const auto m = matched_f1_accuracy(truth, pred);
    r.f1 = m.f1;
    r.acc = m.accuracy;
    return r;
}

} // namespace bdmbc
