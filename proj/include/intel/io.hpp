#ifndef INTEL_IO_HPP
#define INTEL_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "intel/config.hpp"
#include "intel/metrics.hpp"
#include "intel/regime.hpp"

namespace intel {

/// Missing file, missing column or malformed row.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads one numeric column of a CSV file with a header row. Row order defines
/// the time index 0, 1, 2, ...
std::vector<double> load_csv(const std::filesystem::path& path, const std::string& column);
std::vector<double> parse_csv(std::istream& in, const std::string& column, const std::string& source = "<stream>");

/// Serialized StepOutput.
struct StepRecord {
    std::int64_t t = 0;
    double y = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    Verdict verdict = Verdict::Inlier;
    std::vector<double> weights;
    double mean_const = 0.0;
    std::optional<std::int64_t> regime_start;

    static StepRecord from(const StepOutput& out);
    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

void to_json(nlohmann::json& j, const StepRecord& r);
void from_json(const nlohmann::json& j, StepRecord& r);

/// "f=0.2,l=0.2,n=5" -> {1,0.2} x {1,0.2} x {1,5}. Keys may repeat to add factors.
VariantFactors parse_factors(const std::string& text);
std::string format_factors(const VariantFactors& factors);

/// Overlays keys present in `j` onto `config`.
void apply_config(const nlohmann::json& j, EngineConfig& config);
nlohmann::json config_to_json(const EngineConfig& config);

struct RunResult {
    std::vector<StepRecord> records;
    RunMetrics metrics;
    NormalizationStats normalization;
    FitResult fit;
    bool fit_fallback = false;
    std::size_t n_models = 0;
    std::size_t outliers = 0;
    std::size_t change_points = 0;
    double wall_seconds = 0.0;
    double init_seconds = 0.0;
};

/// Normalizes the series with statistics of the initialization segment, fits the
/// engine on that segment and streams every later observation through it.
RunResult run(const EngineConfig& config, const std::vector<double>& series);

nlohmann::json metrics_document(const EngineConfig& config, const RunResult& result);
nlohmann::json summary_document(const EngineConfig& config, const RunResult& result);

/// Writes steps.jsonl, metrics.json and summary.json into `out_dir`.
void write_run(const std::filesystem::path& out_dir, const EngineConfig& config, const RunResult& result);
std::vector<StepRecord> read_steps(const std::filesystem::path& path);

struct BenchRow {
    std::string dataset;
    Mode mode = Mode::Intel;
    RunMetrics metrics;
    std::size_t outliers = 0;
    std::size_t change_points = 0;
    double wall_seconds = 0.0;
};

struct BenchTable {
    std::vector<BenchRow> rows;
    /// (dataset, reason) for entries that could not be run.
    std::vector<std::pair<std::string, std::string>> skipped;
};

/**
 * Runs INTEL and S-INTEL on every dataset described by `bench_config`:
 *
 *   { "defaults": { <engine keys> },
 *     "datasets": [ { "name": ..., "file": ..., "column": ..., <engine keys> } ] }
 *
 * Without a "datasets" list every *.csv in `dataset_dir` is run with column
 * "value". Failures are recorded in `skipped`; remaining datasets still run.
 */
BenchTable bench(const nlohmann::json& bench_config, const std::filesystem::path& dataset_dir);

nlohmann::json bench_to_json(const BenchTable& table);
std::string format_bench_table(const BenchTable& table);

}  // namespace intel

#endif  // INTEL_IO_HPP
