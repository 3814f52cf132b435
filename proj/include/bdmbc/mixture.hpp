#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/random.hpp"

namespace bdmbc {

struct GaussianComponent {
    std::vector<double> mean;
    std::vector<double> covariance; // d x d, row-major
    double weight = 1.0;
};

namespace detail {

/// Lower-triangular Cholesky factor of a row-major SPD matrix.
inline std::vector<double> cholesky(std::span<const double> a, std::size_t d, std::size_t which) {
    std::vector<double> l(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (a[i * d + j] != a[j * d + i])
                throw ParameterError("covariance", "covariance of component " + std::to_string(which) +
                                                       " is not symmetric");
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        double diag = a[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= l[j * d + k] * l[j * d + k];
        if (!(diag > 0.0))
            throw ParameterError("covariance", "covariance of component " + std::to_string(which) +
                                                   " is not positive definite");
        l[j * d + j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = a[i * d + j];
            for (std::size_t k = 0; k < j; ++k) v -= l[i * d + k] * l[j * d + k];
            l[i * d + j] = v / l[j * d + j];
        }
    }
    return l;
}

} // namespace detail

/// Finite Gaussian mixture with validated, pre-factored covariances.
class GaussianMixture {
public:
    explicit GaussianMixture(std::vector<GaussianComponent> components)
        : components_(std::move(components)) {
        if (components_.empty()) throw ParameterError("components", "mixture needs at least one component");
        dim_ = components_.front().mean.size();
        if (dim_ == 0) throw ParameterError("mean", "component mean is empty");
        double total = 0.0;
        for (std::size_t c = 0; c < components_.size(); ++c) {
            const auto& comp = components_[c];
            if (comp.mean.size() != dim_)
                throw ParameterError("mean", "component " + std::to_string(c) + " has wrong dimension");
            if (comp.covariance.size() != dim_ * dim_)
                throw ParameterError("covariance", "component " + std::to_string(c) +
                                                       " covariance must be d x d");
            if (!(comp.weight > 0.0))
                throw ParameterError("weight", "component weights must be positive");
            total += comp.weight;
            auto l = detail::cholesky(comp.covariance, dim_, c);
            double log_det = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) log_det += 2.0 * std::log(l[j * dim_ + j]);
            factors_.push_back(std::move(l));
            log_norm_.push_back(-0.5 * (static_cast<double>(dim_) * std::log(2.0 * std::numbers::pi) + log_det));
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ParameterError("weight", "component weights must sum to 1");
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return components_.size(); }
    const std::vector<GaussianComponent>& components() const noexcept { return components_; }
    /// Cholesky factor of component `c`'s covariance.
    std::span<const double> factor(std::size_t c) const noexcept { return factors_[c]; }

    /// Squared Mahalanobis distance of x from component c's mean.
    double mahalanobis2(std::size_t c, std::span<const double> x) const {
        check_dim(x);
        const auto& l = factors_[c];
        const auto& mu = components_[c].mean;
        std::vector<double> y(dim_);
        double q = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            double v = x[i] - mu[i];
            for (std::size_t k = 0; k < i; ++k) v -= l[i * dim_ + k] * y[k];
            y[i] = v / l[i * dim_ + i];
            q += y[i] * y[i];
        }
        return q;
    }

    /// log N(x; mean_c, cov_c), unweighted.
    double log_component_density(std::size_t c, std::span<const double> x) const {
        return log_norm_[c] - 0.5 * mahalanobis2(c, x);
    }

    /// Index of the component with the highest weighted density at x; ties
    /// go to the lowest index.
    std::size_t most_likely_component(std::span<const double> x) const {
        std::size_t best = 0;
        double best_score = -INFINITY;
        for (std::size_t c = 0; c < components_.size(); ++c) {
            const double score = std::log(components_[c].weight) + log_component_density(c, x);
            if (score > best_score) {
                best_score = score;
                best = c;
            }
        }
        return best;
    }

    void check_dim(std::span<const double> x) const {
        if (x.size() != dim_)
            throw ParameterError("x", "point has dimension " + std::to_string(x.size()) +
                                          ", mixture has " + std::to_string(dim_));
    }

private:
    std::vector<GaussianComponent> components_;
    std::vector<std::vector<double>> factors_;
    std::vector<double> log_norm_;
    std::size_t dim_ = 0;
};

inline double mixture_pdf(const GaussianMixture& mix, std::span<const double> x) {
    mix.check_dim(x);
    double total = 0.0;
    for (std::size_t c = 0; c < mix.size(); ++c)
        total += mix.components()[c].weight * std::exp(mix.log_component_density(c, x));
    return total;
}

/// n i.i.d. draws. Each draw picks a component by inverse-CDF on one uniform,
/// then maps d standard normals through the Cholesky factor. The label is the
/// most likely component at the drawn point, not the one it was drawn from.
inline Dataset gen_mixture(const GaussianMixture& mix, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ParameterError("n", "n must be at least 1");
    const std::size_t d = mix.dim();
    Rng rng(seed);
    std::vector<double> coords(n * d);
    std::vector<Label> labels(n);
    std::vector<double> z(d);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        std::size_t c = 0;
        double acc = mix.components()[0].weight;
        while (c + 1 < mix.size() && u >= acc) acc += mix.components()[++c].weight;
        for (auto& v : z) v = rng.normal();
        const auto l = mix.factor(c);
        const auto& mu = mix.components()[c].mean;
        auto* x = coords.data() + i * d;
        for (std::size_t r = 0; r < d; ++r) {
            double v = mu[r];
            for (std::size_t k = 0; k <= r; ++k) v += l[r * d + k] * z[k];
            x[r] = v;
        }
        labels[i] = static_cast<Label>(mix.most_likely_component({x, d}));
    }
    return Dataset(n, d, std::move(coords), std::move(labels));
}

/// One-dimensional trimodal mixture N(0.20, 0.001), N(0.32, 0.002),
/// N(0.65, 0.007) with equal weights (second parameter is the variance).
inline GaussianMixture three_mix() {
    const double w = 1.0 / 3.0;
    return GaussianMixture({{{0.20}, {0.001}, w}, {{0.32}, {0.002}, w}, {{0.65}, {0.007}, w}});
}

/// Two-dimensional mixture of five equally weighted components whose
/// covariances differ by up to a factor of ~12 in determinant.
inline GaussianMixture five_mix() {
    return GaussianMixture({
        {{0.0, 0.0}, {0.16, 0.0, 0.0, 0.16}, 0.2},
        {{3.2, 0.4}, {0.80, 0.25, 0.25, 0.50}, 0.2},
        {{0.4, 3.4}, {0.36, -0.10, -0.10, 0.49}, 0.2},
        {{4.0, 4.2}, {1.10, 0.0, 0.0, 0.70}, 0.2},
        {{-2.8, 2.2}, {0.50, 0.20, 0.20, 0.90}, 0.2},
    });
}

} // namespace bdmbc
