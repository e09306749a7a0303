#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>

#include "mvar/risk.hpp"
#include "support.hpp"

namespace mvar {
namespace {

MixtureNormal1D single(double mu, double sd) {
    return {Vector::Ones(1), Vector::Constant(1, mu), Vector::Constant(1, sd), 1, 0};
}

MixtureNormal1D reference_return_mixture() {
    return {(Vector(2) << 0.7242, 0.2758).finished(), (Vector(2) << 0.2642, -0.6939).finished(),
            (Vector(2) << 1.2235, 1.3025).finished(), 1, 498};
}

MixtureNormal1D random_mixture(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> gd(1, 5);
    std::uniform_real_distribution<double> wd(0.05, 1.0), md(-3.0, 3.0), sd(0.05, 3.0);
    const int g = gd(rng);
    MixtureNormal1D mix{Vector(g), Vector(g), Vector(g), 1, 0};
    for (int j = 0; j < g; ++j) {
        mix.weights[j] = wd(rng);
        mix.means[j] = md(rng);
        mix.sds[j] = sd(rng);
    }
    mix.weights /= mix.weights.sum();
    return mix;
}

std::vector<double> sample(const MixtureNormal1D& mix, long n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> pick(mix.weights.begin(), mix.weights.end());
    std::normal_distribution<double> nd;
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& x : out) {
        const int j = pick(rng);
        x = mix.means[j] + mix.sds[j] * nd(rng);
    }
    return out;
}

TEST(NormalCdf, TailAccuracy) {
    const boost::math::normal n01;
    // Relative error ~1e-15 near the centre; in the far tail the condition
    // number of Phi (about x^2) dominates any implementation.
    for (double x : {-37.0, -20.0, -8.0, -1.0, 0.0, 0.5, 3.0})
        EXPECT_NEAR(normal_cdf(x) / boost::math::cdf(n01, x), 1.0, 4e-16 * std::max(4.0, x * x)) << x;
    EXPECT_NEAR(normal_pdf(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-16);
}

TEST(MixtureCdf, Examples) {
    EXPECT_DOUBLE_EQ(mixture_cdf(single(0, 1), 0.0), 0.5);
    const MixtureNormal1D mix = reference_return_mixture();
    EXPECT_LT(mixture_cdf(mix, mix.means.minCoeff() - 20 * mix.sds.maxCoeff()), 1e-12);
    EXPECT_NEAR(mixture_cdf(mix, -2.2039), 0.0498, 1e-4);
}

TEST(MixtureCdf, MonotoneWithLimits) {
    std::mt19937_64 rng(1);
    const MixtureNormal1D mix = random_mixture(rng);
    double prev = 0.0;
    for (double x = -40; x <= 40; x += 0.25) {
        const double f = mixture_cdf(mix, x);
        ASSERT_GE(f, prev);
        prev = f;
    }
    EXPECT_NEAR(prev, 1.0, 1e-15);
}

TEST(MixtureQuantile, NormalQuantile) {
    EXPECT_NEAR(mixture_quantile(single(0.3, 2.0), 0.975), 0.3 + 1.959964 * 2.0, 1e-6);
    EXPECT_THROW(mixture_quantile(single(0, 1), 1.0), ParameterError);
    EXPECT_THROW(mixture_quantile(single(0, 1), 0.0), ParameterError);
}

TEST(MixtureQuantile, RoundTrip) {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 50; ++rep) {
        const MixtureNormal1D mix = random_mixture(rng);
        for (int i = 1; i <= 99; ++i) {
            const double q = i / 100.0;
            EXPECT_NEAR(mixture_cdf(mix, mixture_quantile(mix, q)), q, 1e-9);
        }
    }
}

TEST(MixtureQuantile, ExtremeLevels) {
    std::mt19937_64 rng(3);
    const MixtureNormal1D mix = random_mixture(rng);
    for (double q : {1e-12, 1e-6, 1 - 1e-6}) EXPECT_NEAR(mixture_cdf(mix, mixture_quantile(mix, q)) / q, 1.0, 1e-6);
}

TEST(VarEs, StandardNormal) {
    const RiskReport r = var_es(single(0, 1), 0.95);
    EXPECT_NEAR(r.var, -1.6449, 1e-3);
    EXPECT_NEAR(r.es, -2.0627, 1e-3);
    EXPECT_NEAR(r.es, -normal_pdf(1.6448536269514722) / 0.05, 1e-9);
}

TEST(VarEs, ReferenceMixtureAgainstIndependentSolver) {
    // Bisection on boost's normal CDF, independent of the library path.
    const MixtureNormal1D mix = reference_return_mixture();
    const boost::math::normal n01;
    auto F = [&](double x) {
        double f = 0;
        for (int j = 0; j < 2; ++j) f += mix.weights[j] * boost::math::cdf(n01, (x - mix.means[j]) / mix.sds[j]);
        return f;
    };
    double lo = -10, hi = 10;
    for (int i = 0; i < 200; ++i) (F(0.5 * (lo + hi)) < 0.05 ? lo : hi) = 0.5 * (lo + hi);
    const RiskReport r = var_es(mix, 0.95);
    EXPECT_NEAR(r.var, lo, 1e-10);
    EXPECT_NEAR(r.es, -2.7912, 2e-2);
    EXPECT_LE(r.es, r.var);
}

TEST(VarEs, EsMatchesConditionalSampleMean) {
    const MixtureNormal1D mix = reference_return_mixture();
    const RiskReport r = var_es(mix, 0.95);
    const auto x = sample(mix, 1000000, 4);
    double sum = 0, sum2 = 0;
    long n = 0;
    for (double v : x)
        if (v <= r.var) {
            sum += v;
            sum2 += v * v;
            ++n;
        }
    const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - r.es), 3 * se);
}

TEST(VarEs, CoherentOnRandomMixtures) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 200; ++rep) {
        const MixtureNormal1D mix = random_mixture(rng);
        for (double a : {0.9, 0.95, 0.99}) {
            const RiskReport r = var_es(mix, a);
            EXPECT_LE(r.es, r.var);
        }
    }
}

TEST(Crps, StandardNormalAtMean) {
    const double exact = (std::sqrt(2.0) - 1.0) / std::sqrt(std::numbers::pi);  // 0.2336950
    EXPECT_NEAR(crps_mixture(single(0, 1), 0.0), exact, 1e-12);
    EXPECT_NEAR(test::crps_quadrature(single(0, 1), 0.0), exact, 1e-12);
    EXPECT_NEAR(crps_mixture(single(0, 1), 0.0), 0.23370, 1e-5);  // printed to 5 decimals
}

TEST(Crps, SharpForecastAtObservation) {
    EXPECT_LT(crps_mixture(single(1.5, 1e-8), 1.5), 1e-6);
}

TEST(Crps, MatchesQuadrature) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> xd(-6, 6);
    for (int rep = 0; rep < 200; ++rep) {
        const MixtureNormal1D mix = random_mixture(rng);
        const double x = xd(rng);
        const double c = crps_mixture(mix, x);
        EXPECT_GE(c, 0.0);
        EXPECT_NEAR(c, test::crps_quadrature(mix, x), 1e-7);
    }
}

TEST(Crps, TranslationEquivariance) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        MixtureNormal1D mix = random_mixture(rng);
        const RiskReport r0 = var_es(mix, 0.95);
        const double c0 = crps_mixture(mix, 0.4);
        mix.means.array() += 2.75;
        const RiskReport r1 = var_es(mix, 0.95);
        EXPECT_NEAR(r1.var, r0.var + 2.75, 1e-9);
        EXPECT_NEAR(r1.es, r0.es + 2.75, 1e-9);
        EXPECT_NEAR(crps_mixture(mix, 0.4 + 2.75), c0, 1e-12);
    }
}

TEST(Crps, MinimizedAtCentreOfSymmetricMixture) {
    const MixtureNormal1D mix{Vector::Constant(2, 0.5), (Vector(2) << -1, 1).finished(), Vector::Constant(2, 0.7), 1, 0};
    const double c0 = crps_mixture(mix, 0.0);
    for (double d : {-0.5, -0.1, 0.1, 0.5}) EXPECT_GT(crps_mixture(mix, d), c0);
}

TEST(Crps, ProperOnAverage) {
    const MixtureNormal1D truth{(Vector(2) << 0.7, 0.3).finished(), (Vector(2) << 0.2, -1.0).finished(),
                                (Vector(2) << 0.8, 1.5).finished(), 1, 0};
    const MixtureNormal1D wrong[] = {single(0.0, 1.0),
                                     {(Vector(2) << 0.5, 0.5).finished(), (Vector(2) << 0.2, -1.0).finished(),
                                      (Vector(2) << 0.8, 1.5).finished(), 1, 0}};
    const auto x = sample(truth, 100000, 8);
    for (const auto& w : wrong) {
        double sum = 0, sum2 = 0;
        for (double v : x) {
            const double d = crps_mixture(w, v) - crps_mixture(truth, v);
            sum += d;
            sum2 += d * d;
        }
        const double n = static_cast<double>(x.size()), mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
        EXPECT_GT(mean, 3 * se);
    }
}

}  // namespace
}  // namespace mvar
