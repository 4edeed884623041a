#ifndef INTEL_MIXTURE_HPP
#define INTEL_MIXTURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "intel/gp.hpp"

namespace intel {

inline constexpr double kWeightFloor = 1e-10;

/// Multipliers applied to the template's (signal, length, noise) scales.
/// Each list must contain 1 so that the template itself is part of the product.
struct VariantFactors {
    std::vector<double> signal{1.0};
    std::vector<double> length{1.0};
    std::vector<double> noise{1.0};

    static VariantFactors singleton() { return {}; }

    /// {1, rf} x {1, rl} x {1, rn}; a factor equal to 1 collapses its axis.
    static VariantFactors spread(double rf, double rl, double rn) {
        auto axis = [](double r) { return r == 1.0 ? std::vector<double>{1.0} : std::vector<double>{1.0, r}; };
        return {axis(rf), axis(rl), axis(rn)};
    }

    void validate() const {
        for (const auto* list : {&signal, &length, &noise}) {
            if (list->empty() || std::find(list->begin(), list->end(), 1.0) == list->end()) {
                throw std::invalid_argument("variant factor list must contain 1");
            }
            for (double f : *list) {
                if (!(f > 0.0) || !std::isfinite(f)) throw std::invalid_argument("variant factors must be positive");
            }
        }
    }

    std::size_t model_count() const { return signal.size() * length.size() * noise.size(); }
};

/// Template model (index 0) plus its variants, with DMA weights and a shared mean.
template <typename Scalar = double>
struct ModelSet {
    std::vector<Hyperparameters<Scalar>> models;
    std::vector<Scalar> weights;
    MeanFunction<Scalar> shared_mean;

    std::size_t size() const { return models.size(); }
};

template <typename Scalar = double>
struct FusedPrediction {
    PredictiveDistribution<Scalar> fused;
    std::vector<PredictiveDistribution<Scalar>> per_model;
    std::vector<Scalar> predictive_weights;
};

/// Cartesian product of the factor lists applied to the template. Model 0 is
/// the (1, 1, 1) combination; weights start uniform.
template <typename Scalar>
ModelSet<Scalar> build_model_set(const Hyperparameters<Scalar>& tmpl, const VariantFactors& factors,
                                 const MeanFunction<Scalar>& mean) {
    factors.validate();
    // Put factor 1 first on each axis so index 0 is the template.
    auto ones_first = [](std::vector<double> v) {
        std::stable_partition(v.begin(), v.end(), [](double f) { return f == 1.0; });
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };
    const auto fs = ones_first(factors.signal);
    const auto ls = ones_first(factors.length);
    const auto ns = ones_first(factors.noise);

    ModelSet<Scalar> set;
    set.shared_mean = mean;
    for (double ff : fs) {
        for (double fl : ls) {
            for (double fn : ns) {
                Hyperparameters<Scalar> h = tmpl;
                h.kernel.signal_scale *= Scalar(ff);
                h.kernel.length_scale *= Scalar(fl);
                h.noise_scale *= Scalar(fn);
                set.models.push_back(h);
            }
        }
    }
    set.weights.assign(set.models.size(), Scalar(1) / Scalar(set.models.size()));
    return set;
}

/// Raises every weight below kWeightFloor to the floor and rescales the rest so
/// the vector still sums to one.
template <typename Scalar>
void apply_weight_floor(std::vector<Scalar>& w) {
    const Scalar floor = Scalar(kWeightFloor);
    for (std::size_t pass = 0; pass < w.size(); ++pass) {
        Scalar floored_mass = 0;
        Scalar free_mass = 0;
        std::size_t n_floored = 0;
        for (Scalar x : w) {
            if (x <= floor) {
                floored_mass += floor;
                ++n_floored;
            } else {
                free_mass += x;
            }
        }
        if (n_floored == 0) return;
        const Scalar scale = (Scalar(1) - floored_mass) / free_mass;
        bool stable = true;
        for (Scalar& x : w) {
            if (x <= floor) {
                x = floor;
            } else {
                x *= scale;
                if (x <= floor) stable = false;
            }
        }
        if (stable) return;
    }
}

/// w_i^alpha / sum_j w_j^alpha, evaluated in log space. alpha == 1 returns the input.
template <typename Scalar>
std::vector<Scalar> predictive_weights(std::span<const Scalar> weights, Scalar alpha) {
    using std::exp;
    using std::log;
    if (!(alpha > Scalar(0) && alpha <= Scalar(1))) throw std::invalid_argument("alpha must lie in (0, 1]");
    std::vector<Scalar> out(weights.begin(), weights.end());
    if (alpha == Scalar(1)) return out;
    Scalar max_log = -std::numeric_limits<Scalar>::infinity();
    for (Scalar& x : out) {
        x = alpha * log(x);
        max_log = std::max(max_log, x);
    }
    Scalar sum = 0;
    for (Scalar& x : out) {
        x = exp(x - max_log);
        sum += x;
    }
    for (Scalar& x : out) x /= sum;
    apply_weight_floor(out);
    return out;
}

/// Bayes update from log-likelihoods: w_i ~ pw_i exp(ll_i), shifted by the max
/// log-likelihood before exponentiating. If every term vanishes the predictive
/// weights are returned unchanged.
template <typename Scalar>
std::vector<Scalar> update_weights_log(std::span<const Scalar> pred_weights, std::span<const Scalar> log_likelihoods) {
    using std::exp;
    if (pred_weights.size() != log_likelihoods.size()) {
        throw std::invalid_argument("update_weights: size mismatch");
    }
    std::vector<Scalar> out(pred_weights.begin(), pred_weights.end());
    Scalar max_ll = -std::numeric_limits<Scalar>::infinity();
    for (Scalar ll : log_likelihoods) {
        if (!std::isnan(ll)) max_ll = std::max(max_ll, ll);
    }
    if (!std::isfinite(max_ll)) return out;
    Scalar sum = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Scalar ll = log_likelihoods[i];
        out[i] = std::isnan(ll) ? Scalar(0) : pred_weights[i] * exp(ll - max_ll);
        sum += out[i];
    }
    if (!(sum > Scalar(0)) || !std::isfinite(sum)) return {pred_weights.begin(), pred_weights.end()};
    for (Scalar& x : out) x /= sum;
    apply_weight_floor(out);
    return out;
}

template <typename Scalar>
std::vector<Scalar> update_weights(std::span<const Scalar> pred_weights, std::span<const Scalar> likelihoods) {
    using std::log;
    std::vector<Scalar> logs(likelihoods.size());
    for (std::size_t i = 0; i < likelihoods.size(); ++i) {
        if (likelihoods[i] < Scalar(0)) throw std::invalid_argument("likelihoods must be non-negative");
        logs[i] = likelihoods[i] > Scalar(0) ? log(likelihoods[i]) : -std::numeric_limits<Scalar>::infinity();
    }
    return update_weights_log(pred_weights, std::span<const Scalar>(logs));
}

template <typename Scalar>
Scalar model_log_likelihood(const PredictiveDistribution<Scalar>& pred, Scalar y) {
    using std::log;
    const Scalar d = y - pred.mean;
    return Scalar(-0.5) * (d * d / pred.variance + log(Scalar(2) * std::numbers::pi_v<Scalar> * pred.variance));
}

/// Gaussian density N(y; mean, variance).
template <typename Scalar>
Scalar model_likelihood(const PredictiveDistribution<Scalar>& pred, Scalar y) {
    using std::exp;
    return exp(model_log_likelihood(pred, y));
}

/**
 * Weighted product of Gaussian experts. Each expert's density is raised to its
 * predictive weight, so precisions combine as sum_i w_i / var_i and the mean is
 * the precision-weighted average of expert means.
 */
template <typename Scalar>
PredictiveDistribution<Scalar> fuse_poe(std::span<const PredictiveDistribution<Scalar>> per_model,
                                        std::span<const Scalar> pred_weights) {
    if (per_model.size() != pred_weights.size() || per_model.empty()) {
        throw std::invalid_argument("fuse_poe: need equally sized non-empty inputs");
    }
    Scalar precision = 0;
    Scalar weighted_mean = 0;
    for (std::size_t i = 0; i < per_model.size(); ++i) {
        const Scalar p = pred_weights[i] / per_model[i].variance;
        precision += p;
        weighted_mean += p * per_model[i].mean;
    }
    PredictiveDistribution<Scalar> out{weighted_mean / precision, Scalar(1) / precision};
    if (!(out.variance > Scalar(kVarFloor))) out.variance = Scalar(kVarFloor);
    return out;
}

/// Plain product of experts (every weight 1).
template <typename Scalar>
PredictiveDistribution<Scalar> fuse_unweighted_poe(std::span<const PredictiveDistribution<Scalar>> per_model) {
    std::vector<Scalar> ones(per_model.size(), Scalar(1));
    return fuse_poe(per_model, std::span<const Scalar>(ones));
}

}  // namespace intel

#endif  // INTEL_MIXTURE_HPP
