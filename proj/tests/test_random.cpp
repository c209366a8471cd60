#include "sae/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace
{

using sae::random::Engine;

TEST(Random, UniformUsesTop53Bits)
{
    Engine a{1};
    Engine b{1};
    for (int i = 0; i < 1000; ++i) {
        const double u = sae::random::uniform01(a);
        EXPECT_EQ(u, static_cast<double>(b() >> 11) * 0x1.0p-53);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Random, NormalMoments)
{
    Engine rng{3};
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    double cross = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto [x, y] = sae::random::normal_pair(rng);
        sum += x + y;
        sum_sq += x * x + y * y;
        cross += x * y;
    }
    EXPECT_NEAR(sum / (2 * n), 0.0, 0.01);
    EXPECT_NEAR(sum_sq / (2 * n), 1.0, 0.01);
    EXPECT_NEAR(cross / n, 0.0, 0.01);
}

class PoissonMoments : public ::testing::TestWithParam<double>
{
};

TEST_P(PoissonMoments, MeanAndVariance)
{
    const double mean = GetParam();
    Engine rng{static_cast<std::uint64_t>(mean * 1000) + 1};
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto v = static_cast<double>(sae::random::poisson(rng, mean));
        ASSERT_GE(v, 0.0);
        sum += v;
        sum_sq += v * v;
    }
    const double m = sum / n;
    const double var = sum_sq / n - m * m;
    // five standard errors of the sample mean and (roughly) of the sample variance
    EXPECT_NEAR(m, mean, 5.0 * std::sqrt(mean / n) + 1e-12);
    EXPECT_NEAR(var, mean, 5.0 * std::sqrt((2.0 * mean * mean + mean) / n) + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Regimes, PoissonMoments, ::testing::Values(0.0, 0.05, 1.0, 4.5, 9.99, 10.0, 37.0, 1e3, 1e6));

TEST(Random, PoissonSmallMeanPmf)
{
    Engine rng{9};
    const double mean = 2.5;
    const int n = 400000;
    std::vector<int> hist(30, 0);
    for (int i = 0; i < n; ++i) {
        const auto v = sae::random::poisson(rng, mean);
        if (v < 30) {
            ++hist[static_cast<std::size_t>(v)];
        }
    }
    for (int j = 0; j < 10; ++j) {
        const double p = std::exp(j * std::log(mean) - mean - std::lgamma(j + 1.0));
        EXPECT_NEAR(hist[static_cast<std::size_t>(j)] / static_cast<double>(n), p, 5.0 * std::sqrt(p * (1 - p) / n));
    }
}

class GammaMoments : public ::testing::TestWithParam<double>
{
};

TEST_P(GammaMoments, MeanAndVariance)
{
    const double shape = GetParam();
    const double scale = 0.7;
    Engine rng{static_cast<std::uint64_t>(shape * 100) + 5};
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = sae::random::gamma(rng, shape, scale);
        ASSERT_GE(v, 0.0);
        sum += v;
        sum_sq += v * v;
    }
    const double m = sum / n;
    const double var = sum_sq / n - m * m;
    const double want_var = shape * scale * scale;
    EXPECT_NEAR(m, shape * scale, 5.0 * std::sqrt(want_var / n));
    // variance of the sample variance: (kurtosis excess 6 / shape + 2) var^2 / n
    EXPECT_NEAR(var, want_var, 5.0 * want_var * std::sqrt((6.0 / shape + 2.0) / n));
}

INSTANTIATE_TEST_SUITE_P(Shapes, GammaMoments, ::testing::Values(0.3, 1.0, 2.0, 15.0));

TEST(Random, MixSeedIsDeterministicAndSpreads)
{
    EXPECT_EQ(sae::random::mix_seed(7), sae::random::mix_seed(7));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        seen.insert(sae::random::mix_seed(s));
    }
    EXPECT_EQ(seen.size(), 1000u);
    // SplitMix64 reference value for input 0 (first output of a generator seeded with 0).
    EXPECT_EQ(sae::random::mix_seed(0), 0xE220A8397B1DCDAFULL);
}

} // namespace
