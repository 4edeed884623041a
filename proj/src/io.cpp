#include "intel/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace intel {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == ',' && !quoted) {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    cells.push_back(trim(line.substr(start)));
    return cells;
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
    return v;
}

json factors_json(const VariantFactors& f) {
    return json{{"signal", f.signal}, {"length", f.length}, {"noise", f.noise}};
}

}  // namespace

std::vector<double> parse_csv(std::istream& in, const std::string& column, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw InputError(source + ": empty file, header row required");
    const auto header = split_row(line);
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw InputError(source + ": missing column '" + column + "'");
    const auto col = static_cast<std::size_t>(std::distance(header.begin(), it));

    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            // A trailing blank line at end of file is tolerated.
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw InputError(source + ": line " + std::to_string(line_no) + ": blank row");
        }
        const auto cells = split_row(line);
        if (col >= cells.size()) {
            throw InputError(source + ": line " + std::to_string(line_no) + ": missing value for '" + column + "'");
        }
        const auto v = parse_number(cells[col]);
        if (!v) {
            throw InputError(source + ": line " + std::to_string(line_no) + ": cannot parse '" +
                             std::string(cells[col]) + "' as a number");
        }
        values.push_back(*v);
    }
    return values;
}

std::vector<double> load_csv(const std::filesystem::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return parse_csv(in, column, path.string());
}

StepRecord StepRecord::from(const StepOutput& out) {
    StepRecord r;
    r.t = out.t;
    r.y = out.observation;
    r.mean = out.fused.mean;
    r.variance = out.fused.variance;
    r.verdict = out.verdict;
    r.weights = out.weights_after;
    r.mean_const = out.mean_const;
    r.regime_start = out.regime_start;
    return r;
}

void to_json(json& j, const StepRecord& r) {
    j = json{{"t", r.t},
             {"y", r.y},
             {"mean", r.mean},
             {"variance", r.variance},
             {"verdict", std::string(to_string(r.verdict))},
             {"weights", r.weights},
             {"mean_const", r.mean_const}};
    if (r.regime_start) j["regime_start"] = *r.regime_start;
}

void from_json(const json& j, StepRecord& r) {
    j.at("t").get_to(r.t);
    j.at("y").get_to(r.y);
    j.at("mean").get_to(r.mean);
    j.at("variance").get_to(r.variance);
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    j.at("weights").get_to(r.weights);
    j.at("mean_const").get_to(r.mean_const);
    if (j.contains("regime_start")) {
        r.regime_start = j.at("regime_start").get<std::int64_t>();
    } else {
        r.regime_start.reset();
    }
}

VariantFactors parse_factors(const std::string& text) {
    VariantFactors f;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto entry = trim(item);
        if (entry.empty()) continue;
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) throw ConfigError("factor entry '" + std::string(entry) + "' lacks '='");
        const auto key = trim(entry.substr(0, eq));
        const auto value = parse_number(trim(entry.substr(eq + 1)));
        if (!value || *value <= 0.0) throw ConfigError("factor entry '" + std::string(entry) + "' has a bad value");
        std::vector<double>* axis = nullptr;
        if (key == "f" || key == "signal") axis = &f.signal;
        else if (key == "l" || key == "length") axis = &f.length;
        else if (key == "n" || key == "noise") axis = &f.noise;
        else throw ConfigError("unknown factor key '" + std::string(key) + "' (expected f, l or n)");
        if (std::find(axis->begin(), axis->end(), *value) == axis->end()) axis->push_back(*value);
    }
    return f;
}

std::string format_factors(const VariantFactors& factors) {
    std::ostringstream os;
    bool first = true;
    auto emit = [&](char key, const std::vector<double>& axis) {
        for (double v : axis) {
            if (v == 1.0) continue;
            os << (first ? "" : ",") << key << '=' << v;
            first = false;
        }
    };
    emit('f', factors.signal);
    emit('l', factors.length);
    emit('n', factors.noise);
    return os.str();
}

void apply_config(const json& j, EngineConfig& config) {
    if (!j.is_object()) throw ConfigError("config must be a keyed object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "tau") config.tau = value.get<int>();
            else if (key == "alpha") config.alpha = value.get<double>();
            else if (key == "n_outliers") config.n_outliers = value.get<int>();
            else if (key == "mean_period") config.mean_period = value.get<int>();
            else if (key == "init_start") config.init_start = value.get<int>();
            else if (key == "init_count") config.init_count = value.get<int>();
            else if (key == "mode") config.mode = mode_from_string(value.get<std::string>());
            else if (key == "kernel") config.kernel_kind = kernel_kind_from_string(value.get<std::string>());
            else if (key == "seed") config.seed = value.get<std::uint64_t>();
            else if (key == "fit_starts") config.fit_starts = value.get<int>();
            else if (key == "fit_max_iterations") config.fit_max_iterations = value.get<int>();
            else if (key == "factors") {
                if (value.is_string()) {
                    config.factors = parse_factors(value.get<std::string>());
                } else {
                    VariantFactors f;
                    if (value.contains("signal")) value.at("signal").get_to(f.signal);
                    if (value.contains("length")) value.at("length").get_to(f.length);
                    if (value.contains("noise")) value.at("noise").get_to(f.noise);
                    config.factors = f;
                }
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

json config_to_json(const EngineConfig& c) {
    return json{{"tau", c.tau},
                {"alpha", c.alpha},
                {"n_outliers", c.n_outliers},
                {"mean_period", c.mean_period},
                {"init_start", c.init_start},
                {"init_count", c.init_count},
                {"mode", std::string(to_string(c.mode))},
                {"kernel", std::string(to_string(c.kernel_kind))},
                {"seed", c.seed},
                {"fit_starts", c.fit_starts},
                {"fit_max_iterations", c.fit_max_iterations},
                {"factors", factors_json(c.factors)}};
}

RunResult run(const EngineConfig& config, const std::vector<double>& series) {
    config.validate();
    const auto init_end = static_cast<std::size_t>(config.init_start) + static_cast<std::size_t>(config.init_count);
    if (series.size() <= init_end) {
        throw InputError("series has " + std::to_string(series.size()) + " rows; need more than " +
                         std::to_string(init_end) + " for initialization plus streaming");
    }
    const auto clock_start = std::chrono::steady_clock::now();

    RunResult result;
    const std::span<const double> all(series);
    const auto history_raw = all.subspan(static_cast<std::size_t>(config.init_start),
                                         static_cast<std::size_t>(config.init_count));
    try {
        result.normalization = compute_stats(history_raw);
    } catch (const DegenerateInput& e) {
        throw InputError(std::string("initialization segment: ") + e.what());
    }
    const std::vector<double> normalized = result.normalization.apply(all);

    std::vector<double> history_t(history_raw.size());
    for (std::size_t i = 0; i < history_t.size(); ++i) history_t[i] = static_cast<double>(config.init_start + i);
    const std::span<const double> history_y(normalized.data() + config.init_start, history_raw.size());

    EngineState state = initialize(history_t, history_y, config);
    result.fit = state.fit;
    result.fit_fallback = state.fit_fallback;
    result.n_models = state.model_set.size();
    result.init_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();

    std::vector<StepOutput> outputs;
    outputs.reserve(series.size() - init_end);
    for (std::size_t i = init_end; i < series.size(); ++i) {
        try {
            outputs.push_back(step(state, normalized[i]));
        } catch (const NumericalFailure& e) {
            throw NumericalFailure("at row " + std::to_string(i) + ": " + e.what());
        }
        const auto& out = outputs.back();
        if (out.verdict == Verdict::Outlier) ++result.outliers;
        if (out.verdict == Verdict::ChangePoint) ++result.change_points;
        result.records.push_back(StepRecord::from(out));
    }
    result.metrics = evaluate(outputs, std::span<const double>(normalized).subspan(init_end));
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    return result;
}

json metrics_document(const EngineConfig& config, const RunResult& r) {
    const auto& h = r.fit.hyper;
    return json{{"config", config_to_json(config)},
                {"metrics",
                 {{"nll", r.metrics.nll}, {"mae", r.metrics.mae}, {"mse", r.metrics.mse},
                  {"n_evaluated", r.metrics.n_evaluated}}},
                {"counts", {{"outliers", r.outliers}, {"change_points", r.change_points}}},
                {"normalization", {{"mean", r.normalization.mean}, {"std", r.normalization.std}}},
                {"fit",
                 {{"signal_scale", h.kernel.signal_scale},
                  {"length_scale", h.kernel.length_scale},
                  {"noise_scale", h.noise_scale},
                  {"lml", r.fit.lml},
                  {"iterations", r.fit.iterations},
                  {"converged", r.fit.converged},
                  {"fallback", r.fit_fallback}}},
                {"n_models", r.n_models}};
}

json summary_document(const EngineConfig& config, const RunResult& r) {
    json j = metrics_document(config, r);
    j["timing"] = {{"wall_seconds", r.wall_seconds},
                   {"init_seconds", r.init_seconds},
                   {"per_step_ms", r.records.empty() ? 0.0
                                                     : 1e3 * (r.wall_seconds - r.init_seconds) /
                                                           static_cast<double>(r.records.size())}};
    return j;
}

void write_run(const std::filesystem::path& out_dir, const EngineConfig& config, const RunResult& result) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream steps(out_dir / "steps.jsonl");
        for (const auto& rec : result.records) steps << json(rec).dump() << '\n';
    }
    std::ofstream(out_dir / "metrics.json") << metrics_document(config, result).dump(2) << '\n';
    std::ofstream(out_dir / "summary.json") << summary_document(config, result).dump(2) << '\n';
}

std::vector<StepRecord> read_steps(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<StepRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(json::parse(line).get<StepRecord>());
        } catch (const std::exception& e) {
            throw InputError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

BenchTable bench(const json& bench_config, const std::filesystem::path& dataset_dir) {
    BenchTable table;
    EngineConfig defaults;
    if (bench_config.contains("defaults")) apply_config(bench_config.at("defaults"), defaults);

    struct Entry {
        std::string name;
        std::filesystem::path file;
        std::string column = "value";
        json overrides = json::object();
    };
    std::vector<Entry> entries;
    if (bench_config.contains("datasets")) {
        for (const auto& d : bench_config.at("datasets")) {
            Entry e;
            json overrides = d;
            e.name = overrides.value("name", overrides.value("file", std::string("?")));
            e.file = dataset_dir / overrides.value("file", e.name + ".csv");
            e.column = overrides.value("column", std::string("value"));
            for (const char* k : {"name", "file", "column"}) overrides.erase(k);
            e.overrides = std::move(overrides);
            entries.push_back(std::move(e));
        }
    } else if (std::filesystem::is_directory(dataset_dir)) {
        for (const auto& f : std::filesystem::directory_iterator(dataset_dir)) {
            if (f.path().extension() == ".csv") entries.push_back({f.path().stem().string(), f.path()});
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.name < b.name; });
    }

    for (const auto& e : entries) {
        try {
            EngineConfig cfg = defaults;
            apply_config(e.overrides, cfg);
            if (!std::filesystem::exists(e.file)) throw InputError("dataset file not found: " + e.file.string());
            const auto series = load_csv(e.file, e.column);
            std::vector<BenchRow> rows;
            for (Mode mode : {Mode::Intel, Mode::SIntel}) {
                cfg.mode = mode;
                const RunResult r = run(cfg, series);
                rows.push_back({e.name, mode, r.metrics, r.outliers, r.change_points, r.wall_seconds});
            }
            table.rows.insert(table.rows.end(), rows.begin(), rows.end());
        } catch (const std::exception& ex) {
            table.skipped.emplace_back(e.name, ex.what());
        }
    }
    return table;
}

json bench_to_json(const BenchTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"dataset", r.dataset},
                        {"mode", std::string(to_string(r.mode))},
                        {"nll", r.metrics.nll},
                        {"mae", r.metrics.mae},
                        {"mse", r.metrics.mse},
                        {"n_evaluated", r.metrics.n_evaluated},
                        {"outliers", r.outliers},
                        {"change_points", r.change_points},
                        {"wall_seconds", r.wall_seconds}});
    }
    json skipped = json::array();
    for (const auto& [name, reason] : table.skipped) skipped.push_back({{"dataset", name}, {"reason", reason}});
    return json{{"rows", rows}, {"skipped", skipped}};
}

std::string format_bench_table(const BenchTable& table) {
    std::ostringstream os;
    os << std::left << std::setw(20) << "dataset" << std::setw(8) << "mode" << std::right << std::setw(12) << "NLL"
       << std::setw(12) << "MAE" << std::setw(12) << "MSE" << std::setw(8) << "n" << std::setw(6) << "out"
       << std::setw(6) << "cp" << '\n';
    os << std::fixed << std::setprecision(4);
    for (const auto& r : table.rows) {
        os << std::left << std::setw(20) << r.dataset << std::setw(8) << to_string(r.mode) << std::right
           << std::setw(12) << r.metrics.nll << std::setw(12) << r.metrics.mae << std::setw(12) << r.metrics.mse
           << std::setw(8) << r.metrics.n_evaluated << std::setw(6) << r.outliers << std::setw(6)
           << r.change_points << '\n';
    }
    for (const auto& [name, reason] : table.skipped) os << "skipped " << name << ": " << reason << '\n';
    return os.str();
}

}  // namespace intel
