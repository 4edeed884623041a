#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "intel/mixture.hpp"

namespace intel {
namespace {

using PD = PredictiveDistribution<double>;

Hyperparameters<double> tmpl() { return {{KernelKind::Matern52, 2.0, 5.0}, 0.3}; }

void expect_on_simplex(const std::vector<double>& w) {
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    for (double x : w) EXPECT_GE(x, kWeightFloor);
}

TEST(BuildModelSet, SingleSignalVariant) {
    VariantFactors f;
    f.signal = {1.0, 0.2};
    const auto set = build_model_set(tmpl(), f, MeanFunction<double>{0.5});
    ASSERT_EQ(set.size(), 2u);
    EXPECT_EQ(set.models[0], tmpl());
    EXPECT_DOUBLE_EQ(set.models[1].kernel.signal_scale, 0.4);
    EXPECT_EQ(set.models[1].kernel.length_scale, 5.0);
    EXPECT_EQ(set.models[1].noise_scale, 0.3);
    EXPECT_EQ(set.shared_mean.constant, 0.5);
}

TEST(BuildModelSet, FullSpreadHasEightModels) {
    const auto set = build_model_set(tmpl(), VariantFactors::spread(0.2, 0.2, 5.0), MeanFunction<double>{});
    ASSERT_EQ(set.size(), 8u);
    EXPECT_EQ(set.models[0], tmpl());
    for (double w : set.weights) EXPECT_EQ(w, 0.125);
    // Every combination appears once.
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = i + 1; j < set.size(); ++j) EXPECT_FALSE(set.models[i] == set.models[j]);
    }
}

TEST(BuildModelSet, TemplateIsFirstEvenIfListedLast) {
    VariantFactors f;
    f.length = {0.2, 5.0, 1.0};
    const auto set = build_model_set(tmpl(), f, MeanFunction<double>{});
    ASSERT_EQ(set.size(), 3u);
    EXPECT_EQ(set.models[0], tmpl());
}

TEST(BuildModelSet, SingletonIsTemplate) {
    const auto set = build_model_set(tmpl(), VariantFactors::singleton(), MeanFunction<double>{});
    ASSERT_EQ(set.size(), 1u);
    EXPECT_EQ(set.models[0], tmpl());
    EXPECT_EQ(set.weights[0], 1.0);
}

TEST(BuildModelSet, RejectsFactorListsWithoutOne) {
    VariantFactors f;
    f.noise = {5.0};
    EXPECT_THROW(build_model_set(tmpl(), f, MeanFunction<double>{}), std::invalid_argument);
    f.noise = {1.0, -2.0};
    EXPECT_THROW(build_model_set(tmpl(), f, MeanFunction<double>{}), std::invalid_argument);
}

TEST(PredictiveWeights, UniformStaysUniform) {
    const std::vector<double> w(4, 0.25);
    for (double a : {0.1, 0.5, 0.9}) {
        for (double x : predictive_weights<double>(w, a)) EXPECT_NEAR(x, 0.25, 1e-15);
    }
}

TEST(PredictiveWeights, AlphaOneIsIdentity) {
    const std::vector<double> w{0.7, 0.2, 0.1};
    EXPECT_EQ(predictive_weights<double>(w, 1.0), w);
}

TEST(PredictiveWeights, PowerAndNormalize) {
    const std::vector<double> w{0.9, 0.1};
    const auto out = predictive_weights<double>(w, 0.9);
    // 0.9^0.9 / (0.9^0.9 + 0.1^0.9), 40-digit reference
    EXPECT_NEAR(out[0], 0.8784146346456502992688, 1e-15);
    EXPECT_NEAR(out[1], 0.1215853653543497007312, 1e-15);
}

TEST(PredictiveWeights, RejectsBadAlpha) {
    const std::vector<double> w{0.5, 0.5};
    EXPECT_THROW(predictive_weights<double>(w, 0.0), std::invalid_argument);
    EXPECT_THROW(predictive_weights<double>(w, 1.5), std::invalid_argument);
}

TEST(PredictiveWeights, ForgettingContractsRatio) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> w(5);
        for (double& x : w) x = std::pow(u(rng), 6) + 1e-9;
        const double s = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= s;
        const double alpha = 0.05 + 0.9 * u(rng);
        const auto p = predictive_weights<double>(w, alpha);
        const auto [wmin, wmax] = std::minmax_element(w.begin(), w.end());
        const auto [pmin, pmax] = std::minmax_element(p.begin(), p.end());
        EXPECT_LE(*pmax / *pmin, std::pow(*wmax / *wmin, alpha) * (1 + 1e-12));
    }
}

TEST(UpdateWeights, FlatEvidenceKeepsWeights) {
    const std::vector<double> w{0.6, 0.3, 0.1};
    const std::vector<double> lik{0.4, 0.4, 0.4};
    const auto out = update_weights<double>(w, lik);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(out[i], w[i], 1e-15);
}

TEST(UpdateWeights, BayesRule) {
    const std::vector<double> w{0.5, 0.5};
    const std::vector<double> lik{0.2, 0.6};
    const auto out = update_weights<double>(w, lik);
    EXPECT_NEAR(out[0], 0.25, 1e-15);
    EXPECT_NEAR(out[1], 0.75, 1e-15);
}

TEST(UpdateWeights, DegenerateEvidenceHitsFloor) {
    const std::vector<double> w{0.5, 0.5};
    const std::vector<double> lik{1.0, 0.0};
    const auto out = update_weights<double>(w, lik);
    EXPECT_EQ(out[1], kWeightFloor);
    EXPECT_NEAR(out[0], 1.0, 1e-9);
    expect_on_simplex(out);
}

TEST(UpdateWeights, AllZeroLikelihoodKeepsPredictiveWeights) {
    const std::vector<double> w{0.3, 0.7};
    const std::vector<double> lik{0.0, 0.0};
    EXPECT_EQ(update_weights<double>(w, lik), w);
    const std::vector<double> logs{-INFINITY, -INFINITY};
    EXPECT_EQ(update_weights_log<double>(w, logs), w);
}

TEST(UpdateWeights, LogSpaceSurvivesUnderflow) {
    const std::vector<double> w{0.5, 0.5};
    // exp(-2000) underflows, the ratio e^-10 does not
    const std::vector<double> logs{-2000.0, -2010.0};
    const auto out = update_weights_log<double>(w, logs);
    EXPECT_NEAR(out[0], 1.0 / (1.0 + std::exp(-10.0)), 1e-14);
}

TEST(UpdateWeights, SimplexPreservedOverManyCycles) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(8, 0.125);
    for (int cycle = 0; cycle < 10000; ++cycle) {
        const auto p = predictive_weights<double>(w, 0.9);
        std::vector<double> logs(w.size());
        for (double& l : logs) l = -200.0 * u(rng) * u(rng);
        w = update_weights_log<double>(p, logs);
        ASSERT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
        for (double x : w) ASSERT_GE(x, kWeightFloor);
    }
}

TEST(ModelLikelihood, NormalizationAndSymmetry) {
    EXPECT_NEAR(model_likelihood(PD{3.0, 1.0 / (2.0 * std::numbers::pi)}, 3.0), 1.0, 1e-15);
    const PD p{1.5, 0.7};
    for (double d : {0.1, 1.0, 4.0}) EXPECT_DOUBLE_EQ(model_likelihood(p, 1.5 + d), model_likelihood(p, 1.5 - d));
    EXPECT_NEAR(model_likelihood(PD{0.0, 1.0}, 1.0), 0.2419707245191433497978, 1e-16);
}

TEST(FusePoe, OneHotReproducesModel) {
    const std::vector<PD> models{{0.3, 2.0}, {-1.0, 0.5}, {4.0, 9.0}};
    for (std::size_t j = 0; j < models.size(); ++j) {
        std::vector<double> w(models.size(), 0.0);
        w[j] = 1.0;
        const auto f = fuse_poe<double>(models, w);
        EXPECT_NEAR(f.mean, models[j].mean, 1e-12);
        EXPECT_NEAR(f.variance, models[j].variance, 1e-12);
    }
}

TEST(FusePoe, IdenticalInputsAreIdempotent) {
    const std::vector<PD> models(4, PD{0.37, 1.9});
    const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    const auto f = fuse_poe<double>(models, w);
    EXPECT_NEAR(f.mean, 0.37, 1e-12);
    EXPECT_NEAR(f.variance, 1.9, 1e-12);
}

TEST(FusePoe, TwoModelWorkedExample) {
    const std::vector<PD> models{{0.0, 1.0}, {2.0, 1.0}};
    const std::vector<double> w{0.5, 0.5};
    const auto f = fuse_poe<double>(models, w);
    EXPECT_EQ(f.mean, 1.0);
    EXPECT_EQ(f.variance, 1.0);
}

TEST(FusePoe, MeanWithinRangeAndOrderInvariant) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 7;
        std::vector<PD> models(n);
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) {
            models[i] = {10.0 * (u(rng) - 0.5), 0.01 + 3.0 * u(rng)};
            w[i] = u(rng) + 1e-3;
        }
        const double s = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& x : w) x /= s;
        const auto f = fuse_poe<double>(models, w);
        const auto [lo, hi] = std::minmax_element(models.begin(), models.end(),
                                                  [](const PD& a, const PD& b) { return a.mean < b.mean; });
        EXPECT_GE(f.mean, lo->mean - 1e-12);
        EXPECT_LE(f.mean, hi->mean + 1e-12);
        EXPECT_GT(f.variance, 0.0);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<PD> pm(n);
        std::vector<double> pw(n);
        for (std::size_t i = 0; i < n; ++i) {
            pm[i] = models[perm[i]];
            pw[i] = w[perm[i]];
        }
        const auto g = fuse_poe<double>(pm, pw);
        EXPECT_NEAR(g.mean, f.mean, 1e-12);
        EXPECT_NEAR(g.variance, f.variance, 1e-12);
    }
}

TEST(FuseUnweightedPoe, PrecisionsAdd) {
    const std::vector<PD> one{{1.2, 0.4}};
    const auto s = fuse_unweighted_poe<double>(one);
    EXPECT_EQ(s.mean, 1.2);
    EXPECT_EQ(s.variance, 0.4);

    const std::vector<PD> two{{0.0, 1.0}, {0.0, 1.0}};
    EXPECT_DOUBLE_EQ(fuse_unweighted_poe<double>(two).variance, 0.5);
}

TEST(FuseUnweightedPoe, RelatesToUniformWeightedFusion) {
    // Uniform weights 1/(M+1) scale every precision by the same factor, so the
    // unweighted variance is the weighted one divided by M+1.
    const std::vector<PD> models{{0.1, 0.5}, {1.4, 2.0}, {-0.7, 1.1}, {0.0, 0.3}};
    const std::vector<double> w(4, 0.25);
    const auto u = fuse_unweighted_poe<double>(models);
    const auto f = fuse_poe<double>(models, w);
    EXPECT_NEAR(u.variance * 4.0, f.variance, 1e-14);
    EXPECT_NEAR(u.mean, f.mean, 1e-14);
}

TEST(FusePoe, VarianceFloor) {
    const std::vector<PD> models{{0.0, 1e-30}};
    const std::vector<double> w{1.0};
    EXPECT_EQ(fuse_poe<double>(models, w).variance, kVarFloor);
}

TEST(Mixture, LongDoubleInstantiation) {
    using L = long double;
    const std::vector<L> w{0.7L, 0.3L};
    const auto p = predictive_weights<L>(w, 0.5L);
    EXPECT_NEAR(static_cast<double>(p[0] + p[1]), 1.0, 1e-18);
    const std::vector<L> logs{-1.0L, -2.0L};
    const auto u = update_weights_log<L>(p, logs);
    EXPECT_GT(u[0], p[0]);
    const std::vector<PredictiveDistribution<L>> m{{0.0L, 1.0L}, {2.0L, 1.0L}};
    const std::vector<L> half{0.5L, 0.5L};
    EXPECT_EQ(fuse_poe<L>(m, half).mean, 1.0L);
}

}  // namespace
}  // namespace intel
