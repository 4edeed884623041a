#ifndef INTEL_METRICS_HPP
#define INTEL_METRICS_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "intel/regime.hpp"

namespace intel {

class DegenerateInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct NormalizationStats {
    double mean = 0.0;
    double std = 1.0;

    double apply(double y) const { return (y - mean) / std; }
    double invert(double z) const { return z * std + mean; }
    std::vector<double> apply(std::span<const double> ys) const;
};

struct RunMetrics {
    double nll = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    std::size_t n_evaluated = 0;
};

/// Sample mean and standard deviation (n - 1 divisor). Throws DegenerateInput on
/// fewer than two points or a constant series.
NormalizationStats compute_stats(std::span<const double> ys);

/// Mean negative log predictive density, mean absolute error and mean squared
/// error of the fused predictions against `actuals`.
RunMetrics evaluate(std::span<const StepOutput> outputs, std::span<const double> actuals);

}  // namespace intel

#endif  // INTEL_METRICS_HPP
