#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "intel/hyperopt.hpp"
#include "oracles.hpp"

namespace intel {
namespace {

using testing::iota_times;
using testing::sample_gp;

Eigen::Map<const Eigen::VectorXd> as_vec(const std::vector<double>& v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

const Hyperparameters<double> kTruth{{KernelKind::Matern52, 1.0, 3.0}, 0.1};

TEST(FitTemplate, RecoversGenerativeHyperparameters) {
    std::mt19937_64 rng(1001);
    const auto ts = iota_times(200);
    const auto ys = sample_gp(kTruth, 0.0, 200, rng);
    FitOptions opt;
    opt.seed = 3;
    const auto fit = fit_template(ts, ys, 0.0, opt);
    const Eigen::Vector3d err = fit.hyper.log_params() - kTruth.log_params();
    EXPECT_LT(err.cwiseAbs().maxCoeff(), 0.5) << err.transpose();
}

TEST(FitTemplate, ReportedLmlMatchesHyperparameters) {
    std::mt19937_64 rng(5);
    const auto ts = iota_times(60);
    const auto ys = sample_gp(kTruth, 0.4, 60, rng);
    const auto fit = fit_template(ts, ys, 0.4);
    const double lml = log_marginal_likelihood<double>(fit.hyper, MeanFunction<double>{0.4}, as_vec(ts), as_vec(ys));
    EXPECT_NEAR(fit.lml, lml, 1e-10);
}

TEST(FitTemplate, ConvergedImpliesStationaryPoint) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 4; ++trial) {
        const auto ts = iota_times(80);
        const auto ys = sample_gp(kTruth, 0.0, 80, rng);
        FitOptions opt;
        opt.seed = static_cast<std::uint64_t>(trial);
        const auto fit = fit_template(ts, ys, 0.0, opt);
        if (!fit.converged) continue;
        const auto g = lml_gradient<double>(fit.hyper, MeanFunction<double>{0.0}, as_vec(ts), as_vec(ys));
        EXPECT_LT(g.norm(), 1e-4);
    }
}

TEST(FitTemplate, ConstantDataShrinksScalesMonotonically) {
    const auto ts = iota_times(30);
    const std::vector<double> ys(30, 2.5);
    FitOptions opt;
    opt.starts = 1;
    const auto fit = fit_template(ts, ys, 2.5, opt);
    // Heuristic start for a constant series is sf = 1e-3, sn = 1e-4.
    EXPECT_LT(fit.hyper.kernel.signal_scale, 1e-3);
    EXPECT_LT(fit.hyper.noise_scale, 1e-4);
    ASSERT_GE(fit.trace.size(), 2u);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) EXPECT_GT(fit.trace[i], fit.trace[i - 1]);
}

TEST(FitTemplate, NeverWorseThanAnyStartPoint) {
    std::mt19937_64 rng(9);
    const auto ts = iota_times(50);
    const auto ys = sample_gp(kTruth, 0.0, 50, rng);
    FitOptions opt;
    const auto best = fit_template(ts, ys, 0.0, opt);
    const auto at_truth = maximize_lml(ts, ys, 0.0, kTruth, opt);
    const double lml_truth = log_marginal_likelihood<double>(kTruth, MeanFunction<double>{}, as_vec(ts), as_vec(ys));
    EXPECT_GE(at_truth.lml, lml_truth);
    const auto start = heuristic_start(ts, ys, KernelKind::Matern52);
    const double lml_start = log_marginal_likelihood<double>(start, MeanFunction<double>{}, as_vec(ts), as_vec(ys));
    EXPECT_GE(best.lml, lml_start);
}

TEST(FitTemplate, AcceptedValuesAreNonDecreasing) {
    std::mt19937_64 rng(31);
    const auto ts = iota_times(100);
    const auto ys = sample_gp(kTruth, 0.0, 100, rng);
    FitOptions opt;
    opt.starts = 1;
    const auto fit = fit_template(ts, ys, 0.0, opt);
    for (std::size_t i = 1; i < fit.trace.size(); ++i) EXPECT_GE(fit.trace[i], fit.trace[i - 1]);
    EXPECT_LE(fit.iterations, opt.max_iterations);
}

TEST(FitTemplate, DeterministicForFixedSeed) {
    std::mt19937_64 rng(12);
    const auto ts = iota_times(70);
    const auto ys = sample_gp(kTruth, 0.0, 70, rng);
    FitOptions opt;
    opt.seed = 123;
    const auto a = fit_template(ts, ys, 0.0, opt);
    const auto b = fit_template(ts, ys, 0.0, opt);
    EXPECT_EQ(a.hyper, b.hyper);
    EXPECT_EQ(a.lml, b.lml);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(FitTemplate, RejectsTooFewPoints) {
    const auto ts = iota_times(7);
    const std::vector<double> ys(7, 0.0);
    EXPECT_THROW(fit_template(ts, ys, 0.0), std::invalid_argument);
    FitOptions opt;
    opt.starts = 0;
    const auto ts8 = iota_times(8);
    const std::vector<double> ys8{0, 1, 0, 1, 0, 1, 0, 1};
    EXPECT_THROW(fit_template(ts8, ys8, 0.0, opt), std::invalid_argument);
}

TEST(HeuristicStart, ScaleAware) {
    const auto ts = iota_times(101);
    std::vector<double> ys(101);
    for (int i = 0; i < 101; ++i) ys[i] = (i % 2) ? 1.0 : -1.0;
    const auto h = heuristic_start(ts, ys, KernelKind::Matern52);
    EXPECT_NEAR(h.kernel.signal_scale, std::sqrt(101.0 / 100.0 * (1.0 - 1.0 / (101.0 * 101.0))), 1e-9);
    EXPECT_DOUBLE_EQ(h.kernel.length_scale, 10.0);
    EXPECT_NEAR(h.noise_scale, 0.1 * h.kernel.signal_scale, 1e-15);
}

}  // namespace
}  // namespace intel
