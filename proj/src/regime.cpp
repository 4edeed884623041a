#include "intel/regime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace intel {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Inlier: return "inlier";
        case Verdict::Outlier: return "outlier";
        case Verdict::ChangePoint: return "changepoint";
    }
    return "inlier";
}

Verdict verdict_from_string(std::string_view name) {
    if (name == "inlier") return Verdict::Inlier;
    if (name == "outlier") return Verdict::Outlier;
    if (name == "changepoint") return Verdict::ChangePoint;
    throw std::invalid_argument("unknown verdict: " + std::string(name));
}

void TrainingWindow::trim_before(double oldest) {
    const auto first_kept = std::find_if(times.begin(), times.end(), [&](double t) { return t >= oldest; });
    const auto drop = std::distance(times.begin(), first_kept);
    times.erase(times.begin(), first_kept);
    values.erase(values.begin(), values.begin() + drop);
}

FusedPrediction<double> predict_next(const EngineState& state) {
    const auto& set = state.model_set;
    const double t_star = static_cast<double>(state.current_t + 1);
    const Eigen::Map<const Eigen::VectorXd> ts(state.window.times.data(),
                                               static_cast<Eigen::Index>(state.window.size()));
    const Eigen::Map<const Eigen::VectorXd> ys(state.window.values.data(),
                                               static_cast<Eigen::Index>(state.window.size()));

    FusedPrediction<double> out;
    out.per_model.reserve(set.size());
    for (const auto& hyper : set.models) {
        out.per_model.push_back(gp_predict<double>(ts, ys, set.shared_mean, hyper, t_star));
    }
    out.predictive_weights = predictive_weights<double>(set.weights, state.alpha);
    out.fused = fuse_poe<double>(out.per_model, out.predictive_weights);
    return out;
}

Classification classify(const PredictiveDistribution<double>& pred, double y) {
    const double band = 3.0 * pred.stddev();
    return (y < pred.mean + band && y > pred.mean - band) ? Classification::Inlier
                                                          : Classification::OutlierCandidate;
}

MeanFunction<double> refresh_mean_periodic(const EngineState& state) {
    const auto n = std::min<std::size_t>(state.recent_inliers.size(), static_cast<std::size_t>(state.mean_period));
    if (n == 0) return state.model_set.shared_mean;
    const double sum = std::accumulate(state.recent_inliers.end() - static_cast<std::ptrdiff_t>(n),
                                       state.recent_inliers.end(), 0.0);
    return {sum / static_cast<double>(n)};
}

StepOutput step(EngineState& state, double y_next) {
    if (!std::isfinite(y_next)) throw std::invalid_argument("step: observation must be finite");

    const FusedPrediction<double> pred = predict_next(state);
    const std::int64_t t = state.current_t + 1;
    const double t_d = static_cast<double>(t);

    StepOutput out;
    out.t = t;
    out.observation = y_next;
    out.fused = pred.fused;
    out.per_model = pred.per_model;

    if (classify(pred.fused, y_next) == Classification::Inlier) {
        out.verdict = Verdict::Inlier;
        state.window.push(t_d, y_next);
        state.bucket.clear();
        state.recent_inliers.push_back(y_next);
        while (state.recent_inliers.size() > static_cast<std::size_t>(state.mean_period)) {
            state.recent_inliers.pop_front();
        }
        if (++state.inliers_since_refresh >= state.mean_period) {
            state.model_set.shared_mean = refresh_mean_periodic(state);
            state.inliers_since_refresh = 0;
        }
    } else {
        state.bucket.times.push_back(t_d);
        state.bucket.values.push_back(y_next);
        if (state.bucket.size() >= static_cast<std::size_t>(state.bucket.threshold)) {
            out.verdict = Verdict::ChangePoint;
            out.regime_start = static_cast<std::int64_t>(state.bucket.times.front());
            const double sum = std::accumulate(state.bucket.values.begin(), state.bucket.values.end(), 0.0);
            state.model_set.shared_mean.constant = sum / static_cast<double>(state.bucket.size());
            state.window.times = std::move(state.bucket.times);
            state.window.values = std::move(state.bucket.values);
            state.bucket.clear();
            state.inliers_since_refresh = 0;
            state.recent_inliers.clear();
        } else {
            out.verdict = Verdict::Outlier;
        }
    }

    std::vector<double> log_lik(pred.per_model.size());
    for (std::size_t i = 0; i < log_lik.size(); ++i) log_lik[i] = model_log_likelihood(pred.per_model[i], y_next);
    state.model_set.weights = update_weights_log<double>(pred.predictive_weights, log_lik);

    state.current_t = t;
    state.window.trim_before(static_cast<double>(t + 1 - state.window.tau));

    out.weights_after = state.model_set.weights;
    out.mean_const = state.model_set.shared_mean.constant;
    return out;
}

EngineState initialize_with(std::span<const double> history_t, std::span<const double> history_y,
                            const Hyperparameters<double>& tmpl, const EngineConfig& config) {
    config.validate();
    if (history_t.size() != history_y.size()) throw std::invalid_argument("initialize: history length mismatch");
    if (history_y.empty()) throw std::invalid_argument("initialize: empty history");

    EngineState state;
    state.alpha = config.alpha;
    state.mean_period = config.mean_period;
    state.window.tau = config.tau;
    state.bucket.threshold = config.n_outliers;

    const double c = std::accumulate(history_y.begin(), history_y.end(), 0.0) / static_cast<double>(history_y.size());
    state.model_set = build_model_set<double>(tmpl, config.effective_factors(), MeanFunction<double>{c});

    const std::size_t seed_count = std::min<std::size_t>(static_cast<std::size_t>(config.tau), history_y.size());
    for (std::size_t i = history_y.size() - seed_count; i < history_y.size(); ++i) {
        state.window.push(history_t[i], history_y[i]);
    }
    state.current_t = static_cast<std::int64_t>(std::llround(history_t.back()));
    state.fit.hyper = tmpl;
    return state;
}

EngineState initialize(std::span<const double> history_t, std::span<const double> history_y,
                       const EngineConfig& config) {
    config.validate();
    if (history_y.size() < 8) throw std::invalid_argument("initialize: need at least 8 history points");
    const double c = std::accumulate(history_y.begin(), history_y.end(), 0.0) / static_cast<double>(history_y.size());

    FitOptions options;
    options.kernel = config.kernel_kind;
    options.starts = config.fit_starts;
    options.max_iterations = config.fit_max_iterations;
    options.seed = config.seed;

    FitResult fit;
    bool fallback = false;
    try {
        fit = fit_template(history_t, history_y, c, options);
    } catch (const FitFailure&) {
        fit.hyper = heuristic_start(history_t, history_y, config.kernel_kind);
        fit.converged = false;
        fallback = true;
    }
    EngineState state = initialize_with(history_t, history_y, fit.hyper, config);
    state.fit = std::move(fit);
    state.fit_fallback = fallback;
    return state;
}

}  // namespace intel
