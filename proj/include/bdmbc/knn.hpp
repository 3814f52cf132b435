#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/parallel.hpp"

namespace bdmbc {

struct Neighbor {
    std::size_t index;
    double distance;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ascending by (distance, index).
using NeighborList = std::vector<Neighbor>;

/// k nearest other points for every dataset member, stored row-major.
struct NeighborTable {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::size_t> indices;
    std::vector<double> distances;

    std::span<const std::size_t> neighbors(std::size_t i, std::size_t count) const {
        return {indices.data() + i * k, count};
    }
    std::span<const std::size_t> neighbors(std::size_t i) const { return neighbors(i, k); }
    std::span<const double> neighbor_distances(std::size_t i) const { return {distances.data() + i * k, k}; }
};

/// Exact k-d tree over a dataset or a subset of its rows.
///
/// Neighbors are ranked by the key (squared distance, original row index),
/// which reproduces a brute-force scan exactly, ties included. Subtrees are
/// pruned only when their bounding box is strictly farther than the current
/// k-th candidate, so equal-distance points with smaller indices are never
/// skipped. The indexed dataset must outlive the index.
class SpatialIndex {
public:
    explicit SpatialIndex(const Dataset& ds, std::size_t leaf_size = 32) : ds_(&ds), leaf_size_(leaf_size) {
        std::vector<std::size_t> all(ds.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        full_ = true;
        build(std::move(all));
    }

    /// Index over the rows in `subset` (original row indices are reported).
    SpatialIndex(const Dataset& ds, std::span<const std::size_t> subset, std::size_t leaf_size = 32)
        : ds_(&ds), leaf_size_(leaf_size) {
        if (subset.empty()) throw ParameterError("subset", "cannot index an empty subset");
        std::vector<std::size_t> rows(subset.begin(), subset.end());
        members_ = rows;
        std::sort(members_.begin(), members_.end());
        build(std::move(rows));
    }

    const Dataset& dataset() const noexcept { return *ds_; }
    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t dim() const noexcept { return d_; }

    bool contains(std::size_t row) const {
        if (full_) return row < ds_->size();
        return std::binary_search(members_.begin(), members_.end(), row);
    }

    /// k nearest indexed points to x. `exclude` drops one row (normally the
    /// query point itself); `accept`, when given, restricts results to rows
    /// with accept[row] != 0. Writes into `out` to allow buffer reuse.
    void search(std::span<const double> x, std::size_t k, std::optional<std::size_t> exclude,
                const std::vector<std::uint8_t>* accept, NeighborList& out) const {
        thread_local std::vector<Candidate> heap;
        heap.clear();
        SearchState st{x, k, exclude ? *exclude : npos, accept, heap};
        if (k > 0) visit(0, st);
        std::sort_heap(heap.begin(), heap.end());
        out.resize(heap.size());
        for (std::size_t i = 0; i < heap.size(); ++i) out[i] = {heap[i].id, std::sqrt(heap[i].sq)};
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    struct Node {
        std::size_t begin, end;
        std::size_t left = npos, right = npos;
    };

    struct Candidate {
        double sq;
        std::size_t id;
        friend bool operator<(const Candidate& a, const Candidate& b) {
            return a.sq < b.sq || (a.sq == b.sq && a.id < b.id);
        }
    };

    struct SearchState {
        std::span<const double> q;
        std::size_t k;
        std::size_t exclude;
        const std::vector<std::uint8_t>* accept;
        std::vector<Candidate>& heap; // max-heap on (sq, id)
    };

    void build(std::vector<std::size_t> rows) {
        d_ = ds_->dim();
        const std::size_t m = rows.size();
        ids_.resize(m);
        pts_.resize(m * d_);
        nodes_.reserve(2 * (m / std::max<std::size_t>(leaf_size_, 1)) + 2);
        build_node(rows, 0, m);
        for (std::size_t i = 0; i < m; ++i) ids_[i] = rows[i];
        // leaf blocks are stored column-major so distances vectorize across points
        for (const Node& node : nodes_) {
            if (node.left != npos) continue;
            const std::size_t width = node.end - node.begin;
            double* block = pts_.data() + node.begin * d_;
            for (std::size_t i = 0; i < width; ++i) {
                auto p = ds_->point(rows[node.begin + i]);
                for (std::size_t j = 0; j < d_; ++j) block[j * width + i] = p[j];
            }
        }
    }

    std::size_t build_node(std::vector<std::size_t>& rows, std::size_t begin, std::size_t end) {
        const std::size_t id = nodes_.size();
        nodes_.push_back({begin, end});
        lo_.resize((id + 1) * d_);
        hi_.resize((id + 1) * d_);
        for (std::size_t j = 0; j < d_; ++j) {
            double a = (*ds_)(rows[begin], j), b = a;
            for (std::size_t i = begin + 1; i < end; ++i) {
                a = std::min(a, (*ds_)(rows[i], j));
                b = std::max(b, (*ds_)(rows[i], j));
            }
            lo_[id * d_ + j] = a;
            hi_[id * d_ + j] = b;
        }
        if (end - begin <= leaf_size_) return id;
        std::size_t axis = 0;
        double widest = -1.0;
        for (std::size_t j = 0; j < d_; ++j) {
            const double w = hi_[id * d_ + j] - lo_[id * d_ + j];
            if (w > widest) {
                widest = w;
                axis = j;
            }
        }
        if (widest <= 0.0) return id; // all points coincide
        const std::size_t mid = begin + (end - begin) / 2;
        const Dataset& ds = *ds_;
        std::nth_element(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                         rows.begin() + static_cast<std::ptrdiff_t>(mid),
                         rows.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) {
                             const double va = ds(a, axis), vb = ds(b, axis);
                             return va < vb || (va == vb && a < b);
                         });
        const std::size_t left = build_node(rows, begin, mid);
        const std::size_t right = build_node(rows, mid, end);
        nodes_[id].left = left;
        nodes_[id].right = right;
        return id;
    }

    // Summed in dimension order with the same per-term rounding as
    // squared_distance, hence never larger than the computed distance of
    // any point inside the box.
    double box_distance(std::size_t node, std::span<const double> q) const {
        const double* lo = lo_.data() + node * d_;
        const double* hi = hi_.data() + node * d_;
        double sum = 0.0;
        for (std::size_t j = 0; j < d_; ++j) {
            double diff = 0.0;
            if (q[j] < lo[j])
                diff = lo[j] - q[j];
            else if (q[j] > hi[j])
                diff = q[j] - hi[j];
            sum += diff * diff;
        }
        return sum;
    }

    void visit(std::size_t node_id, SearchState& st) const {
        const Node& node = nodes_[node_id];
        if (node.left == npos) {
            const std::size_t width = node.end - node.begin;
            const double* block = pts_.data() + node.begin * d_;
            thread_local std::vector<double> scratch;
            scratch.assign(width, 0.0);
            double* __restrict sq = scratch.data();
            // per point the terms are added in dimension order, as in squared_distance
            for (std::size_t j = 0; j < d_; ++j) {
                const double qj = st.q[j];
                const double* __restrict col = block + j * width;
                for (std::size_t i = 0; i < width; ++i) {
                    const double diff = col[i] - qj;
                    sq[i] += diff * diff;
                }
            }
            for (std::size_t i = 0; i < width; ++i) {
                const std::size_t id = ids_[node.begin + i];
                if (id == st.exclude) continue;
                if (st.accept && !(*st.accept)[id]) continue;
                const Candidate c{sq[i], id};
                if (st.heap.size() < st.k) {
                    st.heap.push_back(c);
                    std::push_heap(st.heap.begin(), st.heap.end());
                } else if (c < st.heap.front()) {
                    std::pop_heap(st.heap.begin(), st.heap.end());
                    st.heap.back() = c;
                    std::push_heap(st.heap.begin(), st.heap.end());
                }
            }
            return;
        }
        const double dl = box_distance(node.left, st.q);
        const double dr = box_distance(node.right, st.q);
        const bool left_first = dl <= dr;
        const std::size_t first = left_first ? node.left : node.right;
        const std::size_t second = left_first ? node.right : node.left;
        const double d_first = left_first ? dl : dr;
        const double d_second = left_first ? dr : dl;
        if (st.heap.size() < st.k || d_first <= st.heap.front().sq) visit(first, st);
        if (st.heap.size() < st.k || d_second <= st.heap.front().sq) visit(second, st);
    }

    const Dataset* ds_;
    std::size_t leaf_size_;
    std::size_t d_ = 0;
    bool full_ = false;
    std::vector<std::size_t> members_;
    std::vector<std::size_t> ids_;
    std::vector<double> pts_;
    std::vector<Node> nodes_;
    std::vector<double> lo_, hi_;
};

inline SpatialIndex build_index(const Dataset& ds) { return SpatialIndex(ds); }

/// k nearest neighbors of x. With `self` set, that row is left out of the
/// answer (the usual case when x is a dataset member).
inline NeighborList knn_query(const SpatialIndex& idx, std::span<const double> x, std::size_t k,
                              std::optional<std::size_t> self = std::nullopt) {
    if (x.size() != idx.dim())
        throw ParameterError("x", "query dimension " + std::to_string(x.size()) + " does not match index dimension " +
                                      std::to_string(idx.dim()));
    const std::size_t available = idx.size() - (self && idx.contains(*self) ? 1 : 0);
    if (k < 1 || k > available)
        throw ParameterError("k", "k = " + std::to_string(k) + " must lie in [1, " + std::to_string(available) + "]");
    NeighborList out;
    idx.search(x, k, self, nullptr, out);
    return out;
}

/// Distance from row `point` to its k-th nearest other indexed point.
inline double k_distance(const SpatialIndex& idx, std::size_t point, std::size_t k) {
    if (point >= idx.dataset().size())
        throw ParameterError("point_index", "point index " + std::to_string(point) + " out of range");
    return knn_query(idx, idx.dataset().point(point), k, point).back().distance;
}

/// k nearest other points of every row of the indexed dataset.
inline NeighborTable all_knn(const SpatialIndex& idx, std::size_t k) {
    const Dataset& ds = idx.dataset();
    const std::size_t n = ds.size();
    if (k < 1 || k + 1 > idx.size())
        throw ParameterError("k", "k = " + std::to_string(k) + " must lie in [1, " +
                                      std::to_string(idx.size() == 0 ? 0 : idx.size() - 1) + "]");
    NeighborTable table{n, k, std::vector<std::size_t>(n * k), std::vector<double>(n * k)};
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        NeighborList buf;
        for (std::size_t i = begin; i < end; ++i) {
            idx.search(ds.point(i), k, i, nullptr, buf);
            for (std::size_t r = 0; r < k; ++r) {
                table.indices[i * k + r] = buf[r].index;
                table.distances[i * k + r] = buf[r].distance;
            }
        }
    }, 64);
    return table;
}

} // namespace bdmbc
