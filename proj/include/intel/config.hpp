#ifndef INTEL_CONFIG_HPP
#define INTEL_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "intel/kernel.hpp"
#include "intel/mixture.hpp"

namespace intel {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Mode { Intel, SIntel };

inline std::string_view to_string(Mode mode) { return mode == Mode::Intel ? "intel" : "sintel"; }

inline Mode mode_from_string(std::string_view name) {
    if (name == "intel") return Mode::Intel;
    if (name == "sintel" || name == "s-intel") return Mode::SIntel;
    throw ConfigError("unknown mode: " + std::string(name));
}

struct EngineConfig {
    int tau = 20;
    double alpha = 0.9;
    /// consecutive outliers that make a change point
    int n_outliers = 3;
    /// inliers between periodic mean refreshes
    int mean_period = 10;
    /// First row of the initialization segment.
    int init_start = 0;
    int init_count = 200;
    VariantFactors factors = VariantFactors::spread(0.2, 0.2, 5.0);
    Mode mode = Mode::Intel;
    KernelKind kernel_kind = KernelKind::Matern52;
    std::uint64_t seed = 0;
    int fit_starts = 5;
    int fit_max_iterations = 200;

    /// Factors actually used: S-INTEL always runs the template alone.
    VariantFactors effective_factors() const {
        return mode == Mode::SIntel ? VariantFactors::singleton() : factors;
    }

    void validate() const {
        if (tau < 1) throw ConfigError("tau must be >= 1");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
        if (n_outliers < 1) throw ConfigError("n-outliers must be >= 1");
        if (mean_period < 1) throw ConfigError("mean-period must be >= 1");
        if (init_start < 0) throw ConfigError("init-start must be >= 0");
        if (init_count < 8) throw ConfigError("init-count must be >= 8");
        if (fit_starts < 1) throw ConfigError("fit starts must be >= 1");
        if (fit_max_iterations < 1) throw ConfigError("fit iterations must be >= 1");
        try {
            factors.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
};

}  // namespace intel

#endif  // INTEL_CONFIG_HPP
