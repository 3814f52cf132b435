#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bdmbc/error.hpp"

namespace bdmbc {

using Label = int;

/// n x d point matrix stored row-major, with optional ground-truth labels.
/// Immutable after construction.
class Dataset {
public:
    Dataset(std::size_t n, std::size_t d, std::vector<double> coords,
            std::optional<std::vector<Label>> labels = std::nullopt)
        : n_(n), d_(d), coords_(std::move(coords)), labels_(std::move(labels)) {
        if (n_ == 0) throw ParameterError("n", "dataset must contain at least one point");
        if (d_ == 0) throw ParameterError("d", "dataset must have at least one dimension");
        if (coords_.size() != n_ * d_)
            throw ParameterError("coords", "coordinate buffer size does not equal n * d");
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (!std::isfinite(coords_[i]))
                throw ParameterError("coords", "non-finite coordinate at row " +
                                                   std::to_string(i / d_) + ", column " +
                                                   std::to_string(i % d_));
        }
        if (labels_) {
            if (labels_->size() != n_)
                throw ParameterError("labels", "label count does not equal point count");
            if (std::any_of(labels_->begin(), labels_->end(), [](Label l) { return l < 0; }))
                throw ParameterError("labels", "labels must be non-negative");
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {coords_.data() + i * d_, d_};
    }
    double operator()(std::size_t i, std::size_t j) const noexcept { return coords_[i * d_ + j]; }

    const std::vector<double>& coords() const noexcept { return coords_; }

    bool has_labels() const noexcept { return labels_.has_value(); }
    const std::vector<Label>& labels() const {
        if (!labels_) throw ParameterError("labels", "dataset has no labels");
        return *labels_;
    }
    const std::optional<std::vector<Label>>& maybe_labels() const noexcept { return labels_; }

    Dataset with_labels(std::optional<std::vector<Label>> labels) const {
        return Dataset(n_, d_, coords_, std::move(labels));
    }

    /// Rows in the given order; labels follow their rows.
    Dataset permuted(std::span<const std::size_t> order) const {
        std::vector<double> c;
        c.reserve(order.size() * d_);
        std::optional<std::vector<Label>> l;
        if (labels_) l.emplace();
        for (std::size_t i : order) {
            auto p = point(i);
            c.insert(c.end(), p.begin(), p.end());
            if (labels_) l->push_back((*labels_)[i]);
        }
        return Dataset(order.size(), d_, std::move(c), std::move(l));
    }

private:
    std::size_t n_;
    std::size_t d_;
    std::vector<double> coords_;
    std::optional<std::vector<Label>> labels_;
};

/// Squared Euclidean distance, summed over dimensions in index order.
/// Every neighbor comparison in the library uses this summation order, so
/// the (distance, index) tie rule is applied to one consistent value.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return sum;
}

/// Affinely maps every dimension onto [0, 1]. Constant dimensions map to 0.
inline Dataset scale_minmax(const Dataset& ds) {
    const std::size_t n = ds.size(), d = ds.dim();
    std::vector<double> lo(d), hi(d);
    for (std::size_t j = 0; j < d; ++j) lo[j] = hi[j] = ds(0, j);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], ds(i, j));
            hi[j] = std::max(hi[j], ds(i, j));
        }
    }
    std::vector<double> c(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double range = hi[j] - lo[j];
            // min maps to exactly 0 and max to exactly 1, which makes the map idempotent
            double v = range > 0.0 ? (ds(i, j) - lo[j]) / range : 0.0;
            if (ds(i, j) == hi[j] && range > 0.0) v = 1.0;
            c[i * d + j] = v;
        }
    }
    return Dataset(n, d, std::move(c), ds.maybe_labels());
}

} // namespace bdmbc
