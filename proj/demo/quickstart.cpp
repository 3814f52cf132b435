// Clusters a five-component Gaussian mixture and prints the modes found.

#include <cstdio>

#include "bdmbc.hpp"

int main() {
    const auto mix = bdmbc::five_mix();
    const auto ds = bdmbc::gen_mixture(mix, 3000, 1);

    bdmbc::BdmbcConfig config;
    config.rounds = 10;
    config.rho = 0.3;
    config.k_D = 10;
    config.k_L = 100;
    config.k_G = 15;
    config.lambda = 0.3;
    const auto result = bdmbc::bdmbc_fit(ds, config);

    std::printf("%zu points, %zu clusters, %zu modes\n", ds.size(), result.num_clusters, result.modes.size());
    for (auto m : result.modes)
        std::printf("  mode %5zu at (%6.3f, %6.3f) in cluster %d, nearest component %zu\n", m, ds(m, 0), ds(m, 1),
                    result.labels[m], mix.most_likely_component(ds.point(m)));

    const auto scores = bdmbc::evaluate(ds.labels(), result.labels);
    std::fputs(bdmbc::metrics_table(scores, "five_mix").c_str(), stdout);
    std::printf("fit took %.3f s\n", result.timings.total());
}
