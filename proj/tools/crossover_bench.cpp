// Times one bagging round with a per-subsample tree against a filtered
// query of the full tree, across subsample ratios.

#include <chrono>
#include <cstdio>
#include <vector>

#include "bdmbc.hpp"

namespace {

double seconds(const bdmbc::Dataset& ds, const bdmbc::SpatialIndex& full, std::size_t s, std::size_t k,
               bdmbc::RoundSearch mode) {
    const auto start = std::chrono::steady_clock::now();
    bdmbc::bagged_k_distance(ds, {1, s, k, 7}, &full, mode);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bdmbc::Dataset uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
    bdmbc::Rng rng(seed);
    std::vector<double> x(n * d);
    for (auto& v : x) v = rng.uniform();
    return bdmbc::Dataset(n, d, std::move(x));
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 20000;
    const std::size_t k = argc > 2 ? std::stoul(argv[2]) : 10;
    std::printf("%-8s %3s %6s %10s %10s %8s\n", "data", "d", "ratio", "subset_s", "filter_s", "winner");
    for (std::size_t d : {2, 5, 10}) {
        for (int kind = 0; kind < 2; ++kind) {
            const auto ds = kind == 0 ? uniform(n, d, 3) : bdmbc::gen_multiblobs(n, d, 10, 3);
            const bdmbc::SpatialIndex full(ds);
            for (double ratio : {0.1, 0.3, 0.5, 0.6, 0.7, 0.8, 0.9}) {
                const auto s = static_cast<std::size_t>(ratio * static_cast<double>(n));
                const double a = seconds(ds, full, s, k, bdmbc::RoundSearch::subset_index);
                const double b = seconds(ds, full, s, k, bdmbc::RoundSearch::filtered_index);
                std::printf("%-8s %3zu %6.2f %10.4f %10.4f %8s\n", kind == 0 ? "uniform" : "blobs", d, ratio, a, b,
                            a < b ? "subset" : "filter");
            }
        }
    }
}
