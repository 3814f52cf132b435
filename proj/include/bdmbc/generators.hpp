#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bdmbc/dataset.hpp"
#include "bdmbc/error.hpp"
#include "bdmbc/mixture.hpp"
#include "bdmbc/random.hpp"

namespace bdmbc {

enum class ShapeKind { moons, circles, blobs, anisotropic };

inline ShapeKind parse_shape_kind(std::string_view name) {
    if (name == "moons") return ShapeKind::moons;
    if (name == "circles") return ShapeKind::circles;
    if (name == "blobs") return ShapeKind::blobs;
    if (name == "anisotropic") return ShapeKind::anisotropic;
    throw ParameterError("kind", "unknown generator kind '" + std::string(name) + "'");
}

inline std::size_t shape_classes(ShapeKind kind) {
    return kind == ShapeKind::moons || kind == ShapeKind::circles ? 2 : 3;
}

/// Labeled 2-D benchmark shapes. Points are allocated round-robin across
/// classes (class j receives n/c points, plus one if j < n % c) and emitted
/// class by class. `noise` is the standard deviation of isotropic Gaussian
/// jitter added to every point.
///
///   moons        outer arc (cos t, sin t) and inner arc (1 - cos t, 0.5 - sin t),
///                t evenly spaced over [0, pi] including both ends
///   circles      radii 1 and 0.5, angles evenly spaced over [0, 2 pi)
///   blobs        unit-variance Gaussians at (-4, 0), (4, 0), (0, 6)
///   anisotropic  blobs at (-3, -3), (3, -2), (0, 4) sheared by [[0.6, -0.6], [-0.4, 0.8]]
inline Dataset gen_shape(ShapeKind kind, std::size_t n, double noise, std::uint64_t seed) {
    if (n < 2) throw ParameterError("n", "shape generators need n >= 2");
    if (!(noise >= 0.0)) throw ParameterError("noise", "noise must be non-negative");
    const std::size_t classes = shape_classes(kind);
    Rng rng(seed);
    std::vector<double> coords;
    coords.reserve(2 * n);
    std::vector<Label> labels;
    labels.reserve(n);

    for (std::size_t c = 0; c < classes; ++c) {
        const std::size_t m = n / classes + (c < n % classes ? 1 : 0);
        for (std::size_t i = 0; i < m; ++i) {
            double x = 0.0, y = 0.0;
            switch (kind) {
            case ShapeKind::moons: {
                const double t = m > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(m - 1) : 0.0;
                if (c == 0) {
                    x = std::cos(t);
                    y = std::sin(t);
                } else {
                    x = 1.0 - std::cos(t);
                    y = 0.5 - std::sin(t);
                }
                break;
            }
            case ShapeKind::circles: {
                const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
                const double r = c == 0 ? 1.0 : 0.5;
                x = r * std::cos(t);
                y = r * std::sin(t);
                break;
            }
            case ShapeKind::blobs: {
                static constexpr double centers[3][2] = {{-4.0, 0.0}, {4.0, 0.0}, {0.0, 6.0}};
                x = centers[c][0] + rng.normal();
                y = centers[c][1] + rng.normal();
                break;
            }
            case ShapeKind::anisotropic: {
                static constexpr double centers[3][2] = {{-3.0, -3.0}, {3.0, -2.0}, {0.0, 4.0}};
                const double bx = centers[c][0] + rng.normal();
                const double by = centers[c][1] + rng.normal();
                x = 0.6 * bx - 0.4 * by;
                y = -0.6 * bx + 0.8 * by;
                break;
            }
            }
            if (noise > 0.0) {
                x += noise * rng.normal();
                y += noise * rng.normal();
            }
            coords.push_back(x);
            coords.push_back(y);
            labels.push_back(static_cast<Label>(c));
        }
    }
    return Dataset(n, 2, std::move(coords), std::move(labels));
}

/// Isotropic Gaussian clusters in `dim` dimensions. Centers are uniform in
/// [0, 10]^dim (stream 1); cluster j has standard deviation 0.5 + 0.5 u_j.
/// Point i belongs to cluster i % clusters and is drawn from stream 2.
inline Dataset gen_multiblobs(std::size_t n, std::size_t dim, std::size_t clusters, std::uint64_t seed) {
    if (n == 0) throw ParameterError("n", "n must be at least 1");
    if (dim == 0) throw ParameterError("dim", "dim must be at least 1");
    if (clusters == 0) throw ParameterError("clusters", "clusters must be at least 1");
    Rng layout(seed, 1);
    std::vector<double> centers(clusters * dim);
    for (auto& v : centers) v = 10.0 * layout.uniform();
    std::vector<double> spread(clusters);
    for (auto& s : spread) s = 0.5 + 0.5 * layout.uniform();

    Rng rng(seed, 2);
    std::vector<double> coords(n * dim);
    std::vector<Label> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % clusters;
        for (std::size_t j = 0; j < dim; ++j)
            coords[i * dim + j] = centers[c * dim + j] + spread[c] * rng.normal();
        labels[i] = static_cast<Label>(c);
    }
    return Dataset(n, dim, std::move(coords), std::move(labels));
}

namespace detail {

inline GaussianMixture mixture_from_json(const nlohmann::json& components) {
    if (!components.is_array() || components.empty())
        throw ParameterError("components", "'components' must be a non-empty array");
    std::vector<GaussianComponent> out;
    for (const auto& c : components) {
        GaussianComponent comp;
        comp.mean = c.at("mean").get<std::vector<double>>();
        const auto& cov = c.at("cov");
        if (cov.is_number()) {
            // scalar: isotropic variance
            const std::size_t d = comp.mean.size();
            comp.covariance.assign(d * d, 0.0);
            for (std::size_t j = 0; j < d; ++j) comp.covariance[j * d + j] = cov.get<double>();
        } else {
            for (const auto& row : cov) {
                if (row.is_number())
                    comp.covariance.push_back(row.get<double>());
                else
                    for (const auto& v : row) comp.covariance.push_back(v.get<double>());
            }
        }
        comp.weight = c.value("weight", 1.0 / static_cast<double>(components.size()));
        out.push_back(std::move(comp));
    }
    return GaussianMixture(std::move(out));
}

} // namespace detail

/// Builds a dataset from a generator document:
///   {"kind": "moons"|"circles"|"blobs"|"anisotropic", "n", "seed", "noise"}
///   {"kind": "3mix"|"5mix", "n", "seed"}
///   {"kind": "mixture", "n", "seed", "components": [{"mean", "cov", "weight"}]}
///   {"kind": "multiblobs", "n", "seed", "dim", "clusters"}
inline Dataset generate_from_spec(const nlohmann::json& spec) {
    try {
        if (!spec.is_object()) throw ParameterError("spec", "generator spec must be a JSON object");
        const auto kind = spec.at("kind").get<std::string>();
        const auto n_signed = spec.at("n").get<long long>();
        if (n_signed < 1) throw ParameterError("n", "n must be at least 1");
        const auto n = static_cast<std::size_t>(n_signed);
        const auto seed = spec.value("seed", std::uint64_t{0});
        if (kind == "3mix") return gen_mixture(three_mix(), n, seed);
        if (kind == "5mix") return gen_mixture(five_mix(), n, seed);
        if (kind == "mixture") return gen_mixture(detail::mixture_from_json(spec.at("components")), n, seed);
        if (kind == "multiblobs")
            return gen_multiblobs(n, spec.value("dim", std::size_t{10}), spec.value("clusters", std::size_t{10}), seed);
        return gen_shape(parse_shape_kind(kind), n, spec.value("noise", 0.05), seed);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError("spec", std::string("malformed generator spec: ") + e.what());
    }
}

} // namespace bdmbc
