// Command-line front end: `intel run` streams one CSV column through the
// engine, `intel bench` runs INTEL and S-INTEL over a dataset directory.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "intel/io.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitConfig = 4;

void configure_logging() {
    const char* env = std::getenv("INTEL_LOG");
    const std::string level = env ? env : "info";
    if (level == "off") spdlog::set_level(spdlog::level::off);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::set_level(spdlog::level::info);
    spdlog::set_pattern("[%l] %v");
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw intel::ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw intel::ConfigError("config file " + path + ": " + e.what());
    }
}

struct RunFlags {
    std::string input;
    std::string column = "value";
    std::string out = "out";
    std::string config_file;
    std::optional<int> init_count, init_start, tau, n_outliers, mean_period;
    std::optional<double> alpha;
    std::optional<std::string> mode, factors, kernel;
    std::optional<std::uint64_t> seed;
};

int do_run(const RunFlags& f) {
    intel::EngineConfig config;
    if (!f.config_file.empty()) intel::apply_config(read_json_file(f.config_file), config);
    nlohmann::json overrides = nlohmann::json::object();
    if (f.init_count) overrides["init_count"] = *f.init_count;
    if (f.init_start) overrides["init_start"] = *f.init_start;
    if (f.tau) overrides["tau"] = *f.tau;
    if (f.n_outliers) overrides["n_outliers"] = *f.n_outliers;
    if (f.mean_period) overrides["mean_period"] = *f.mean_period;
    if (f.alpha) overrides["alpha"] = *f.alpha;
    if (f.mode) overrides["mode"] = *f.mode;
    if (f.factors) overrides["factors"] = *f.factors;
    if (f.kernel) overrides["kernel"] = *f.kernel;
    if (f.seed) overrides["seed"] = *f.seed;
    intel::apply_config(overrides, config);
    config.validate();

    const auto series = intel::load_csv(f.input, f.column);
    spdlog::info("loaded {} rows from {}", series.size(), f.input);
    const auto result = intel::run(config, series);
    const auto& h = result.fit.hyper;
    spdlog::info("template: sf={:.4g} sl={:.4g} sn={:.4g} lml={:.4f} converged={}", h.kernel.signal_scale,
                 h.kernel.length_scale, h.noise_scale, result.fit.lml, result.fit.converged);
    intel::write_run(f.out, config, result);
    std::cout << intel::summary_document(config, result).dump(2) << '\n';
    return 0;
}

int do_bench(const std::string& datasets, const std::string& config_file, const std::string& out) {
    nlohmann::json cfg = config_file.empty() ? nlohmann::json::object() : read_json_file(config_file);
    const auto table = intel::bench(cfg, datasets);
    std::filesystem::create_directories(out);
    std::ofstream(std::filesystem::path(out) / "table.json") << intel::bench_to_json(table).dump(2) << '\n';
    const std::string text = intel::format_bench_table(table);
    std::ofstream(std::filesystem::path(out) / "table.txt") << text;
    std::cout << text;
    for (const auto& [name, reason] : table.skipped) spdlog::warn("skipped {}: {}", name, reason);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Streaming one-step-ahead prediction with outlier and change-point handling"};
    app.require_subcommand(1);

    RunFlags rf;
    auto* run_cmd = app.add_subcommand("run", "stream a CSV column through the engine");
    run_cmd->add_option("--input", rf.input, "CSV file with a header row")->required();
    run_cmd->add_option("--column", rf.column, "value column name");
    run_cmd->add_option("--init-count", rf.init_count, "rows used for initialization");
    run_cmd->add_option("--init-start", rf.init_start, "first initialization row");
    run_cmd->add_option("--tau", rf.tau, "maximum training window length");
    run_cmd->add_option("--alpha", rf.alpha, "forgetting exponent in (0, 1]");
    run_cmd->add_option("--n-outliers", rf.n_outliers, "consecutive outliers that declare a change point");
    run_cmd->add_option("--mean-period", rf.mean_period, "inliers between mean refreshes");
    run_cmd->add_option("--mode", rf.mode, "intel | sintel");
    run_cmd->add_option("--factors", rf.factors, "variant factors, e.g. f=0.2,l=0.2,n=5");
    run_cmd->add_option("--kernel", rf.kernel, "matern52 | se");
    run_cmd->add_option("--seed", rf.seed, "seed for optimizer restarts");
    run_cmd->add_option("--config", rf.config_file, "keyed JSON config file");
    run_cmd->add_option("--out", rf.out, "output directory");

    std::string datasets, bench_config, bench_out = "bench_out";
    auto* bench_cmd = app.add_subcommand("bench", "run INTEL and S-INTEL on every configured dataset");
    bench_cmd->add_option("--datasets", datasets, "dataset directory")->required();
    bench_cmd->add_option("--config", bench_config, "bench config file");
    bench_cmd->add_option("--out", bench_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) return do_run(rf);
        return do_bench(datasets, bench_config, bench_out);
    } catch (const intel::ConfigError& e) {
        spdlog::error("config error: {}", e.what());
        return kExitConfig;
    } catch (const intel::InputError& e) {
        spdlog::error("input error: {}", e.what());
        return kExitInput;
    } catch (const intel::NumericalFailure& e) {
        spdlog::error("numerical failure: {}", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitInput;
    }
}
