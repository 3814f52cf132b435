#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>

#include "bdmbc/bagging.hpp"
#include "bdmbc/mixture.hpp"
#include "oracles.hpp"

using namespace bdmbc;

namespace {

Dataset line(std::vector<double> xs) {
    const std::size_t n = xs.size();
    return Dataset(n, 1, std::move(xs));
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / b[i]);
    return worst;
}

class ThreadsEnv {
public:
    explicit ThreadsEnv(const char* value) {
        if (const char* old = std::getenv("BDMBC_THREADS")) saved_ = old;
        ::setenv("BDMBC_THREADS", value, 1);
    }
    ~ThreadsEnv() {
        if (saved_)
            ::setenv("BDMBC_THREADS", saved_->c_str(), 1);
        else
            ::unsetenv("BDMBC_THREADS");
    }

private:
    std::optional<std::string> saved_;
};

} // namespace

TEST(Subsample, FullSizeIsIdentity) {
    Rng rng(1);
    const auto rows = subsample(10, 10, rng);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(rows[i], i);
}

TEST(Subsample, DistinctSortedAndDeterministic) {
    Rng a(5, 3), b(5, 3);
    const auto ra = subsample(1000, 137, a);
    EXPECT_EQ(ra, subsample(1000, 137, b));
    EXPECT_EQ(ra.size(), 137u);
    EXPECT_TRUE(std::is_sorted(ra.begin(), ra.end()));
    EXPECT_EQ(std::adjacent_find(ra.begin(), ra.end()), ra.end());
    EXPECT_LT(ra.back(), 1000u);
}

TEST(Subsample, SingleDrawFromPairIsFair) {
    std::size_t zero = 0;
    const std::size_t draws = 100000;
    for (std::size_t t = 0; t < draws; ++t) {
        Rng rng(42, t);
        zero += subsample(2, 1, rng)[0] == 0;
    }
    EXPECT_NEAR(static_cast<double>(zero) / draws, 0.5, 0.01);
}

TEST(Subsample, EveryPairEquallyLikely) {
    // all C(5,2) = 10 subsets should appear with frequency near 1/10
    std::map<std::vector<std::size_t>, int> freq;
    const int draws = 50000;
    Rng rng(8);
    for (int t = 0; t < draws; ++t) ++freq[subsample(5, 2, rng)];
    ASSERT_EQ(freq.size(), 10u);
    for (auto& [subset, count] : freq) EXPECT_NEAR(count / static_cast<double>(draws), 0.1, 0.006);
}

TEST(Subsample, OutOfRangeRejected) {
    Rng rng(0);
    EXPECT_THROW(subsample(5, 0, rng), ParameterError);
    EXPECT_THROW(subsample(5, 6, rng), ParameterError);
}

TEST(BaggingWeights, FullSampleConcentratesOnK) {
    const auto p = bagging_weights(5, 5, 2);
    EXPECT_EQ(p, (std::vector<double>{0, 1, 0, 0, 0}));
}

TEST(BaggingWeights, HandEvaluatedSmallCase) {
    const auto p = bagging_weights(3, 2, 1);
    EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
    EXPECT_EQ(p[2], 0.0);
}

TEST(BaggingWeights, OrderViolationsRejected) {
    EXPECT_THROW(bagging_weights(5, 6, 1), ParameterError);
    EXPECT_THROW(bagging_weights(5, 3, 4), ParameterError);
    EXPECT_THROW(bagging_weights(5, 3, 0), ParameterError);
}

TEST(BaggingWeights, MatchExactBinomialsForAllSmallArguments) {
    const oracle::Pascal pascal(200);
    for (std::size_t n = 1; n <= 200; n += (n < 40 ? 1 : 7)) {
        for (std::size_t s = 1; s <= n; ++s) {
            for (std::size_t k = 1; k <= s; ++k) {
                const auto p = bagging_weights(n, s, k);
                const auto want = oracle::bagging_weights(pascal, n, s, k);
                double sum = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    sum += p[i];
                    if (want[i] == 0.0L) {
                        ASSERT_EQ(p[i], 0.0) << n << ' ' << s << ' ' << k << ' ' << i;
                    } else {
                        ASSERT_GT(p[i], 0.0);
                        const long double rel = std::abs((static_cast<long double>(p[i]) - want[i]) / want[i]);
                        ASSERT_LE(rel, 1e-10L) << n << ' ' << s << ' ' << k << ' ' << i;
                    }
                }
                ASSERT_NEAR(sum, 1.0, 1e-12);
            }
        }
    }
}

TEST(BaggingWeights, SupportIsExactlyKToNMinusSPlusK) {
    const auto p = bagging_weights(50, 20, 4);
    for (std::size_t i = 1; i <= 50; ++i) {
        if (i < 4 || i > 50 - 20 + 4)
            EXPECT_EQ(p[i - 1], 0.0);
        else
            EXPECT_GT(p[i - 1], 0.0);
    }
}

TEST(BaggingWeights, MillionPointsStayNormalized) {
    const auto p = bagging_weights(1000000, 1000, 10);
    double sum = 0.0;
    for (double v : p) {
        ASSERT_TRUE(std::isfinite(v));
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    // the k-th of 1000 draws sits near rank k n / s = 10^4
    const auto peak = std::max_element(p.begin(), p.end()) - p.begin();
    EXPECT_NEAR(static_cast<double>(peak), 9000.0, 1000.0);
}

TEST(BaggedDistance, SingleFullRoundEqualsPlainKDistance) {
    const auto ds = oracle::random_dataset(300, 3, 9, 0.1);
    const SpatialIndex idx(ds);
    for (std::size_t k : {1u, 4u, 17u}) {
        const auto bagged = bagged_k_distance(ds, {1, ds.size(), k, 123});
        for (std::size_t i = 0; i < ds.size(); ++i) ASSERT_EQ(bagged.values[i], k_distance(idx, i, k));
    }
}

TEST(BaggedDistance, IdenticalPairIsZero) {
    const Dataset ds(2, 2, {1.0, 1.0, 1.0, 1.0});
    for (std::size_t b : {1u, 5u}) {
        const auto bagged = bagged_k_distance(ds, {b, 2, 1, 0});
        EXPECT_EQ(bagged.values, (std::vector<double>{0.0, 0.0}));
    }
}

TEST(BaggedDistance, MatchesPerRoundOracle) {
    const auto ds = oracle::random_dataset(120, 2, 4, 0.05);
    const BaggingPlan plan{7, 40, 3, 99};
    std::vector<double> want(ds.size(), 0.0);
    for (std::size_t b = 0; b < plan.rounds; ++b) {
        Rng rng(plan.seed, b);
        const auto rows = subsample(ds.size(), plan.subsample_size, rng);
        for (std::size_t i = 0; i < ds.size(); ++i)
            want[i] += std::sqrt(oracle::knn_among(ds, i, rows, plan.k).back().first);
    }
    for (auto& v : want) v /= static_cast<double>(plan.rounds);
    for (auto mode : {RoundSearch::subset_index, RoundSearch::filtered_index}) {
        const auto got = bagged_k_distance(ds, plan, nullptr, mode);
        for (std::size_t i = 0; i < ds.size(); ++i) ASSERT_EQ(got.values[i], want[i]);
    }
}

TEST(BaggedDistance, InvalidPlansRejected) {
    const auto ds = oracle::random_dataset(20, 2, 1);
    EXPECT_THROW(bagged_k_distance(ds, {0, 10, 2, 0}), ParameterError);
    EXPECT_THROW(bagged_k_distance(ds, {1, 21, 2, 0}), ParameterError);
    EXPECT_THROW(bagged_k_distance(ds, {1, 10, 0, 0}), ParameterError);
    try {
        bagged_k_distance(ds, {1, 5, 5, 0});
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("k_D must be smaller than subsample size"), std::string::npos);
    }
}

TEST(BaggedDistance, IndependentOfWorkerCount) {
    const auto ds = oracle::random_dataset(3000, 3, 77);
    const BaggingPlan plan{6, 900, 5, 2024};
    std::vector<double> one, many;
    {
        ThreadsEnv env("1");
        one = bagged_k_distance(ds, plan).values;
    }
    {
        ThreadsEnv env("8");
        many = bagged_k_distance(ds, plan).values;
    }
    EXPECT_EQ(one, many);
}

TEST(BaggedDistance, ScaleEquivariant) {
    const auto ds = oracle::random_dataset(200, 2, 31);
    std::vector<double> c = ds.coords();
    for (auto& v : c) v *= 4.0; // power of two keeps the scaling exact
    const Dataset scaled(ds.size(), ds.dim(), std::move(c));
    const BaggingPlan plan{5, 80, 4, 6};
    const auto a = bagged_k_distance(ds, plan), b = bagged_k_distance(scaled, plan);
    for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_DOUBLE_EQ(b.values[i], 4.0 * a.values[i]);
    const auto fa = hypothetical_density(ds, 80, 4, a), fb = hypothetical_density(scaled, 80, 4, b);
    for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_NEAR(fb[i], fa[i] / 16.0, 1e-12 * fa[i]);
}

TEST(InfiniteBagging, FullOtherSampleEqualsPlainKDistance) {
    const auto ds = oracle::random_dataset(80, 2, 12, 0.1);
    const SpatialIndex idx(ds);
    for (std::size_t k : {1u, 3u, 10u}) {
        const auto v = infinite_bagged_k_distance(ds, ds.size() - 1, k);
        for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(v[i], k_distance(idx, i, k));
    }
}

TEST(InfiniteBagging, ThreePointHandCase) {
    const auto ds = line({0.0, 1.0, 3.0});
    const auto v = infinite_bagged_k_distance(ds, 2, 1);
    EXPECT_EQ(v[0], 1.0);
}

TEST(InfiniteBagging, ExpectedRoundEqualsEnumeratedAverage) {
    // every s-subset of n = 8 points, each equally likely
    const auto ds = oracle::random_dataset(8, 2, 3);
    const std::size_t n = 8, s = 4, k = 2;
    std::vector<double> want(n, 0.0);
    double subsets = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != static_cast<int>(s)) continue;
        ++subsets;
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) rows.push_back(i);
        for (std::size_t i = 0; i < n; ++i) want[i] += std::sqrt(oracle::knn_among(ds, i, rows, k).back().first);
    }
    const auto got = expected_bagged_k_distance(ds, s, k);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(got[i], want[i] / subsets, 1e-12);
}

TEST(InfiniteBagging, MonteCarloAgreesWithinTwoPercent) {
    Rng rng(2718);
    std::vector<double> x(200);
    for (auto& v : x) v = rng.uniform();
    const auto ds = line(std::move(x));
    const auto limit = infinite_bagged_k_distance(ds, 100, 5);
    const auto exact = expected_bagged_k_distance(ds, 100, 5);
    const auto mc = bagged_k_distance(ds, {20000, 100, 5, 1}).values;
    EXPECT_LE(max_relative_error(mc, limit), 0.02);
    EXPECT_LE(max_relative_error(mc, exact), 0.02);
}

TEST(InfiniteBagging, DeviationShrinksWithRounds) {
    Rng rng(31);
    std::vector<double> x(100);
    for (auto& v : x) v = rng.uniform();
    const auto ds = line(std::move(x));
    const auto exact = expected_bagged_k_distance(ds, 50, 3);
    std::vector<double> mean_dev;
    for (std::size_t b : {10u, 100u, 1000u, 10000u}) {
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto mc = bagged_k_distance(ds, {b, 50, 3, seed}).values;
            double dev = 0.0;
            for (std::size_t i = 0; i < mc.size(); ++i) dev = std::max(dev, std::abs(mc[i] - exact[i]));
            total += dev;
        }
        mean_dev.push_back(total / 10.0);
    }
    for (std::size_t t = 1; t < mean_dev.size(); ++t) EXPECT_LE(mean_dev[t], mean_dev[t - 1]);
}

TEST(HypotheticalDensity, UnitBallVolumes) {
    EXPECT_DOUBLE_EQ(unit_ball_volume(1), 2.0);
    EXPECT_DOUBLE_EQ(unit_ball_volume(2), std::numbers::pi);
    EXPECT_NEAR(unit_ball_volume(3), 4.0 / 3.0 * std::numbers::pi, 1e-14);
}

TEST(HypotheticalDensity, SingleFullRoundIsPlainKnnDensity) {
    const auto ds = oracle::random_dataset(150, 2, 14);
    const std::size_t n = ds.size(), k = 6;
    const auto r = bagged_k_distance(ds, {1, n, k, 0});
    const auto f = hypothetical_density(ds, n, k, r);
    const double frac = static_cast<double>(k) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        EXPECT_NEAR(f[i], frac / (std::numbers::pi * r.values[i] * r.values[i]), 1e-12 * f[i]);
}

TEST(HypotheticalDensity, UniformLineIntegratesToAboutOne) {
    Rng rng(6);
    std::vector<double> x(10000);
    for (auto& v : x) v = rng.uniform();
    const auto ds = line(x);
    const auto r = bagged_k_distance(ds, {1, ds.size(), 50, 0});
    const auto f = hypothetical_density(ds, ds.size(), 50, r);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (x[i] > 0.05 && x[i] < 0.95) {
            sum += f[i];
            ++count;
        }
    const double mean = sum / static_cast<double>(count);
    EXPECT_GE(mean, 0.9);
    EXPECT_LE(mean, 1.1);
}

TEST(HypotheticalDensity, InverselyOrderedWithDistance) {
    const auto ds = gen_mixture(three_mix(), 400, 2);
    const auto r = bagged_k_distance(ds, {8, 200, 10, 3});
    const auto f = hypothetical_density(ds, 200, 10, r);
    for (std::size_t i = 0; i < ds.size(); i += 3)
        for (std::size_t j = 0; j < ds.size(); j += 5) EXPECT_EQ(f[i] > f[j], r.values[i] < r.values[j]);
}

TEST(HypotheticalDensity, ZeroDistanceNamesThePoint) {
    const Dataset ds(4, 1, {0.0, 0.0, 1.0, 2.0});
    const auto r = bagged_k_distance(ds, {1, 4, 1, 0});
    try {
        hypothetical_density(ds, 4, 1, r);
        FAIL();
    } catch (const DegenerateDataError& e) {
        EXPECT_EQ(e.point(), 0u);
    }
}
