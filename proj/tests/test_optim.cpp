#include "sae/errors.hpp"
#include "sae/optim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace
{

using namespace sae::optim;
using sae::Mat3;
using sae::Vec3;

double rosenbrock3(const Vec3& x)
{
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < 3; ++i) {
        total += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
    }
    return total;
}

TEST(NelderMead, ConvexQuadratic)
{
    auto f = [](const Vec3& x) { return std::pow(x[0] - 1, 2) + std::pow(x[1] - 1, 2) + std::pow(x[2] - 1, 2); };
    const auto result = nelder_mead<3>(f, {0.0, 0.0, 0.0});
    EXPECT_TRUE(result.converged);
    for (double v : result.argmin) {
        EXPECT_NEAR(v, 1.0, 1e-5);
    }
    EXPECT_LT(result.diameter, 1e-8);
}

TEST(NelderMead, Rosenbrock)
{
    NelderMeadOptions options;
    options.max_iter = 5000;
    const auto result = nelder_mead<3>(rosenbrock3, {-1.2, 1.0, 1.0}, options);
    for (double v : result.argmin) {
        EXPECT_NEAR(v, 1.0, 1e-3);
    }
    EXPECT_NEAR(rosenbrock3(result.argmin), result.value, 0.0);
    EXPECT_LT(result.value, 1e-8);
}

TEST(NelderMead, ConstantObjectiveStaysAtStart)
{
    const Vec3 start{0.3, -2.0, 5.0};
    const auto result = nelder_mead<3>([](const Vec3&) { return 4.0; }, start);
    EXPECT_TRUE(result.converged);
    EXPECT_EQ(result.argmin, start);
    EXPECT_EQ(result.value, 4.0);
}

TEST(NelderMead, NonFiniteStartThrows)
{
    auto f = [](const Vec3& x) { return x[0] > -1.0 ? std::nan("") : 0.0; };
    EXPECT_THROW(nelder_mead<3>(f, {0.0, 0.0, 0.0}), sae::NumericError);
}

TEST(NelderMead, NonFiniteRegionsAreAvoided)
{
    // log barrier: undefined for x <= 0
    auto f = [](const sae::Vector<2>& x) {
        if (x[0] <= 0.0 || x[1] <= 0.0) {
            return std::nan("");
        }
        return x[0] - std::log(x[0]) + x[1] - 2.0 * std::log(x[1]);
    };
    const auto result = nelder_mead<2>(f, {0.1, 0.1});
    EXPECT_NEAR(result.argmin[0], 1.0, 1e-4);
    EXPECT_NEAR(result.argmin[1], 2.0, 1e-4);
}

TEST(NelderMead, RespectsIterationCap)
{
    NelderMeadOptions options;
    options.max_iter = 10;
    const auto result = nelder_mead<3>(rosenbrock3, {-1.2, 1.0, 1.0}, options);
    EXPECT_FALSE(result.converged);
    EXPECT_LE(result.iterations, 10);
}

// Never worse than the start, on random smooth and rough objectives.
TEST(NelderMead, NeverWorseThanStart)
{
    std::mt19937 rng(31);
    std::normal_distribution<double> normal(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 start{normal(rng), normal(rng), normal(rng)};
        const double freq = 1.0 + trial % 5;
        auto f = [freq](const Vec3& x) {
            return std::sin(freq * x[0]) * std::cos(x[1]) + 0.1 * x[2] * x[2] + std::abs(x[0] - x[2]);
        };
        NelderMeadOptions options;
        options.max_iter = 50 + trial * 10;
        const auto result = nelder_mead<3>(f, start, options);
        EXPECT_LE(result.value, f(start));
        EXPECT_EQ(result.value, f(result.argmin));
    }
}

TEST(Transform, RoundTrip)
{
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> log_pos(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> logit_p(logit(1e-9), logit(1.0 - 1e-9));
    for (int trial = 0; trial < 2000; ++trial) {
        const NaturalParams in{std::exp(log_pos(rng)), std::exp(log_pos(rng)), logistic(logit_p(rng))};
        const auto out = from_transformed(to_transformed(in));
        EXPECT_NEAR(out.a, in.a, 1e-12 * in.a);
        EXPECT_NEAR(out.s, in.s, 1e-12 * in.s);
        EXPECT_NEAR(out.p, in.p, 1e-12 * in.p);
    }
    for (double p : {1e-9, 1.0 - 1e-9}) {
        EXPECT_NEAR(from_transformed(to_transformed({1.0, 1.0, p})).p, p, 1e-12 * p);
    }
}

TEST(Transform, ClampsTheLogit)
{
    EXPECT_EQ(to_transformed({1.0, 1.0, 0.0})[2], -kLogitClamp);
    EXPECT_EQ(to_transformed({1.0, 1.0, 1.0})[2], kLogitClamp);
    EXPECT_NEAR(from_transformed({0.0, 0.0, 1e3}).p, logistic(kLogitClamp), 0.0);
    EXPECT_THROW(to_transformed({0.0, 1.0, 0.5}), sae::DomainError);
    EXPECT_THROW(to_transformed({1.0, 1.0, 1.5}), sae::DomainError);
}

TEST(NumericHessian, DiagonalQuadratic)
{
    auto f = [](const Vec3& x) { return 0.5 * (2 * x[0] * x[0] + 4 * x[1] * x[1] + 6 * x[2] * x[2]); };
    const Mat3 h = numeric_hessian<3>(f, {0.3, -1.0, 2.0});
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            EXPECT_NEAR(h[i][j], i == j ? 2.0 * (i + 1) : 0.0, 1e-6);
        }
    }
}

TEST(NumericHessian, Bilinear)
{
    auto f = [](const Vec3& x) { return x[0] * x[1]; };
    const Mat3 h = numeric_hessian<3>(f, {1.0, 2.0, 3.0});
    EXPECT_NEAR(h[0][1], 1.0, 1e-6);
    EXPECT_NEAR(h[1][0], 1.0, 1e-6);
    EXPECT_NEAR(h[0][0], 0.0, 1e-6);
    EXPECT_NEAR(h[2][2], 0.0, 1e-6);
}

TEST(NumericHessian, RandomQuadraticsAreExactAndSymmetric)
{
    std::mt19937 rng(13);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Mat3 a{};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                a[i][j] = a[j][i] = normal(rng) * 5.0;
            }
        }
        const Vec3 b{normal(rng), normal(rng), normal(rng)};
        auto f = [&](const Vec3& x) {
            double v = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                v += b[i] * x[i];
                for (std::size_t j = 0; j < 3; ++j) {
                    v += 0.5 * a[i][j] * x[i] * x[j];
                }
            }
            return v;
        };
        const Vec3 point{normal(rng), normal(rng), normal(rng)};
        const Mat3 h = numeric_hessian<3>(f, point);
        EXPECT_EQ(h, sae::transpose(h));
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                EXPECT_NEAR(h[i][j], a[i][j], 1e-6 * std::max(1.0, std::abs(a[i][j])));
            }
        }
    }
}

TEST(NumericHessian, NonFiniteStencilThrows)
{
    auto f = [](const Vec3& x) { return x[0] < 0.0 ? std::nan("") : x[0] * x[0]; };
    EXPECT_THROW(numeric_hessian<3>(f, {0.0, 0.0, 0.0}), sae::NumericError);
}

TEST(InvertSpd, Examples)
{
    const Mat3 eye = sae::identity<3>();
    ASSERT_TRUE(invert_3x3_spd(eye).has_value());
    EXPECT_EQ(*invert_3x3_spd(eye), eye);

    const Mat3 diag{{{2, 0, 0}, {0, 4, 0}, {0, 0, 8}}};
    const auto inv = invert_3x3_spd(diag);
    ASSERT_TRUE(inv.has_value());
    EXPECT_NEAR((*inv)[0][0], 0.5, 1e-15);
    EXPECT_NEAR((*inv)[1][1], 0.25, 1e-15);
    EXPECT_NEAR((*inv)[2][2], 0.125, 1e-15);

    const Mat3 indefinite{{{1, 0, 0}, {0, -2, 0}, {0, 0, 3}}};
    EXPECT_FALSE(invert_3x3_spd(indefinite).has_value());
    const Mat3 singular{{{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}};
    EXPECT_FALSE(invert_3x3_spd(singular).has_value());
}

TEST(InvertSpd, RandomSpdTimesInverseIsIdentity)
{
    std::mt19937 rng(19);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Mat3 b{};
        for (auto& row : b) {
            for (auto& v : row) {
                v = normal(rng);
            }
        }
        Mat3 m{};
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                m[i][j] = (i == j ? 0.1 : 0.0);
                for (std::size_t k = 0; k < 3; ++k) {
                    m[i][j] += b[i][k] * b[j][k];
                }
            }
        }
        const auto inv = invert_3x3_spd(m);
        ASSERT_TRUE(inv.has_value());
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                double v = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    v += m[i][k] * (*inv)[k][j];
                }
                EXPECT_NEAR(v, i == j ? 1.0 : 0.0, 1e-9);
            }
        }
    }
}

} // namespace
