#ifndef INTEL_HYPEROPT_HPP
#define INTEL_HYPEROPT_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "intel/gp.hpp"

namespace intel {

/// Raised when every optimizer start fails numerically.
class FitFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitOptions {
    KernelKind kernel = KernelKind::Matern52;
    int starts = 5;
    int max_iterations = 200;
    std::uint64_t seed = 0;
    double gradient_tolerance = 1e-5;
    double improvement_tolerance = 1e-9;
    /// Log-parameters are confined to [-bound, bound].
    double log_bound = 15.0;
};

struct FitResult {
    Hyperparameters<double> hyper;
    double lml = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Accepted LML values of the winning start, in order.
    std::vector<double> trace;
};

/// Scale-aware first start: sf = std(ys), sl = span(ts)/10, sn = 0.1 std(ys).
Hyperparameters<double> heuristic_start(std::span<const double> ts, std::span<const double> ys, KernelKind kind);

/// BFGS ascent on the log marginal likelihood from a single start point in log space.
FitResult maximize_lml(std::span<const double> ts, std::span<const double> ys, double mean_const,
                       const Hyperparameters<double>& start, const FitOptions& options);

/// Multi-start fit of the template hyperparameters; returns the start with the highest LML.
FitResult fit_template(std::span<const double> ts, std::span<const double> ys, double mean_const,
                       const FitOptions& options = {});

}  // namespace intel

#endif  // INTEL_HYPEROPT_HPP
