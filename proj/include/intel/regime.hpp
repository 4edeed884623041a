#ifndef INTEL_REGIME_HPP
#define INTEL_REGIME_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "intel/config.hpp"
#include "intel/gp.hpp"
#include "intel/hyperopt.hpp"
#include "intel/mixture.hpp"

namespace intel {

enum class Verdict { Inlier, Outlier, ChangePoint };
enum class Classification { Inlier, OutlierCandidate };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view name);

/// Adaptive training set. Times are integer time indices stored as doubles so
/// they can be handed to the GP without conversion.
struct TrainingWindow {
    std::vector<double> times;
    std::vector<double> values;
    int tau = 20;

    std::size_t size() const { return times.size(); }
    void push(double t, double y) {
        times.push_back(t);
        values.push_back(y);
    }
    /// Drops every entry older than `oldest`.
    void trim_before(double oldest);
};

/// Potential change-point bucket: the current run of consecutive outliers.
struct ChangeBucket {
    std::vector<double> times;
    std::vector<double> values;
    int threshold = 3;

    std::size_t size() const { return times.size(); }
    void clear() {
        times.clear();
        values.clear();
    }
};

struct EngineState {
    TrainingWindow window;
    ChangeBucket bucket;
    ModelSet<double> model_set;
    double alpha = 0.9;
    int mean_period = 10;
    int inliers_since_refresh = 0;
    /// Last `mean_period` values appended to the window since the last change point.
    std::deque<double> recent_inliers;
    /// Time index of the most recent observation consumed.
    std::int64_t current_t = -1;
    FitResult fit;
    bool fit_fallback = false;
};

struct StepOutput {
    std::int64_t t = 0;
    double observation = 0.0;
    PredictiveDistribution<double> fused;
    Verdict verdict = Verdict::Inlier;
    std::vector<double> weights_after;
    double mean_const = 0.0;
    std::vector<PredictiveDistribution<double>> per_model;
    /// First time index of the streak that produced a change point.
    std::optional<std::int64_t> regime_start;
};

/// Per-model GP predictions for t+1 fused with the forgetting-adjusted weights. Does not mutate state.
FusedPrediction<double> predict_next(const EngineState& state);

/// Inlier iff y lies strictly inside (m - 3 sd, m + 3 sd).
Classification classify(const PredictiveDistribution<double>& pred, double y);

/// Consumes the next observation (time index current_t + 1) and advances the state.
StepOutput step(EngineState& state, double y_next);

/// Mean of the last `mean_period` values appended to the window.
MeanFunction<double> refresh_mean_periodic(const EngineState& state);

/// Fits the template on the history, builds the model set and seeds the window
/// with the last min(tau, |history|) history points.
EngineState initialize(std::span<const double> history_t, std::span<const double> history_y,
                       const EngineConfig& config);

/// Builds a state from known template hyperparameters (no fitting).
EngineState initialize_with(std::span<const double> history_t, std::span<const double> history_y,
                            const Hyperparameters<double>& tmpl, const EngineConfig& config);

}  // namespace intel

#endif  // INTEL_REGIME_HPP
