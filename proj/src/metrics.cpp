#include "intel/metrics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace intel {

std::vector<double> NormalizationStats::apply(std::span<const double> ys) const {
    std::vector<double> out;
    out.reserve(ys.size());
    for (double y : ys) out.push_back(apply(y));
    return out;
}

NormalizationStats compute_stats(std::span<const double> ys) {
    if (ys.size() < 2) throw DegenerateInput("normalization needs at least two points");
    const double n = static_cast<double>(ys.size());
    const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double ss = 0.0;
    for (double y : ys) ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DegenerateInput("normalization of a constant series");
    return {mean, sd};
}

RunMetrics evaluate(std::span<const StepOutput> outputs, std::span<const double> actuals) {
    if (outputs.size() != actuals.size()) throw std::invalid_argument("evaluate: outputs and actuals differ in length");
    RunMetrics m;
    m.n_evaluated = outputs.size();
    if (outputs.empty()) return m;
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const auto& f = outputs[i].fused;
        const double d = actuals[i] - f.mean;
        m.nll += 0.5 * (d * d / f.variance + std::log(f.variance) + log_2pi);
        m.mae += std::abs(d);
        m.mse += d * d;
    }
    const double n = static_cast<double>(outputs.size());
    m.nll /= n;
    m.mae /= n;
    m.mse /= n;
    return m;
}

}  // namespace intel
