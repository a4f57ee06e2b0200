#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spade4/benchmarks.hpp"
#include "spade4/embedding.hpp"
#include "spade4/errors.hpp"
#include "spade4/intervals.hpp"
#include "spade4/ode.hpp"
#include "spade4/presets.hpp"
#include "spade4/random.hpp"
#include "spade4/rfm.hpp"
#include "spade4/spade4.hpp"
#include "spade4/timeseries.hpp"
#include "spade4/version.hpp"

namespace spade4 {

// One config fully determines one experiment. Parsed from a flat
// "key = value" file; a named preset supplies defaults that later keys
// override.
struct ExperimentConfig {
    std::string preset;
    std::string dataset;  // CSV path, filename under data_dir, or "synthetic"
    std::string data_dir = "data";
    std::optional<std::pair<long, long>> window;
    std::vector<int> train_sizes;
    std::vector<Method> methods{Method::spade4};
    int horizon = 7;

    double population = 1.0;
    double scale_fraction = 1.0;
    bool seven_day_avg = false;
    double noise_eta = 0.0;  // synthetic data only

    EmbeddingConfig embed{};

    int features_per_sample = 50;
    int fixed_features = 0;
    long max_features = 0;
    std::vector<double> lambda_grid = default_lambda_grid();
    double lasso_tol = 1e-7;      // pipeline solver budget, see RfmConfig
    long lasso_max_iter = 200;
    bool lasso_half_n = false;

    TargetKind target = TargetKind::active;
    int restarts = 100;
    std::vector<double> e0_multipliers = {0, 1, 5, 10, 15, 20, 25, 50, 80};
    std::vector<int> q_grid = {1, 2, 3, 4, 5, 6};
    int nm_max_iter = 2000;
    double nm_tol = 1e-10;
    double fit_step = 0.2;
    double predict_step = 0.01;

    int synth_days = 180;
    double synth_step = 0.01;

    int m1 = 0;
    int m2 = 0;
    int stability_runs = 100;
    std::vector<int> p_values = {5, 7, 9, 11, 14};

    std::string out_dir = "out";
    std::uint64_t master_seed = 0;

    double population_norm() const { return population * scale_fraction; }

    RfmConfig rfm_config() const {
        RfmConfig r;
        r.features_per_sample = features_per_sample;
        r.fixed_features = fixed_features;
        r.max_features = max_features;
        r.lambda_grid = lambda_grid;
        r.lasso.tol = lasso_tol;
        r.lasso.max_iter = lasso_max_iter;
        r.lasso.half_n_scaling = lasso_half_n;
        return r;
    }

    FitSpec fit_spec(ModelKind kind) const {
        FitSpec f;
        f.model_kind = kind;
        f.target_kind = target;
        f.restarts = restarts;
        f.e0_multipliers = e0_multipliers;
        f.q_grid = q_grid;
        f.nm.max_iter = nm_max_iter;
        f.nm.tol = nm_tol;
        f.fit_step = fit_step;
        f.predict_step = predict_step;
        return f;
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double require_double(const std::string& key, const std::string& value) {
    double v = 0;
    if (!parse_double(value, v)) throw ParseError("config key " + key + ": expected a number");
    return v;
}

inline long require_long(const std::string& key, const std::string& value) {
    long v = 0;
    if (!parse_long(value, v)) throw ParseError("config key " + key + ": expected an integer");
    return v;
}

inline bool require_bool(const std::string& key, const std::string& value) {
    const std::string v = lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ParseError("config key " + key + ": expected true/false");
}

inline std::vector<double> require_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const std::string& item : split_list(value)) out.push_back(require_double(key, item));
    if (out.empty()) throw ParseError("config key " + key + ": empty list");
    return out;
}

inline std::vector<int> require_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const std::string& item : split_list(value))
        out.push_back(static_cast<int>(require_long(key, item)));
    if (out.empty()) throw ParseError("config key " + key + ": empty list");
    return out;
}

}  // namespace detail

inline void apply_preset(ExperimentConfig& cfg, const std::string& name) {
    const DatasetPreset* p = find_preset(name);
    if (!p) throw ValidationError("unknown preset \"" + name + "\"");
    cfg.preset = p->name;
    cfg.dataset = p->dataset;
    cfg.window = p->window;
    cfg.train_sizes = p->train_sizes;
    cfg.methods = p->methods;
    cfg.population = p->population;
    cfg.scale_fraction = p->scale_fraction;
    cfg.seven_day_avg = p->seven_day_average;
    cfg.embed.smooth_s = p->smooth_s;
    cfg.target = p->target;
    cfg.e0_multipliers = p->e0_multipliers;
    cfg.m1 = p->m1;
    cfg.m2 = p->m2;
    cfg.horizon = p->horizon;
}

inline void apply_config_key(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
    using detail::require_bool;
    using detail::require_double;
    using detail::require_double_list;
    using detail::require_int_list;
    using detail::require_long;

    if (key == "preset") return;  // handled in a first pass
    if (key == "dataset") cfg.dataset = value;
    else if (key == "data_dir") cfg.data_dir = value;
    else if (key == "window_start") {
        cfg.window = {require_long(key, value), cfg.window ? cfg.window->second : 0};
    } else if (key == "window_end") {
        cfg.window = {cfg.window ? cfg.window->first : 0, require_long(key, value)};
    } else if (key == "train_sizes") cfg.train_sizes = require_int_list(key, value);
    else if (key == "methods") {
        cfg.methods.clear();
        for (const std::string& name : detail::split_list(value))
            cfg.methods.push_back(method_from_name(name));
        if (cfg.methods.empty()) throw ParseError("config key methods: empty list");
    } else if (key == "horizon") cfg.horizon = static_cast<int>(require_long(key, value));
    else if (key == "population") cfg.population = require_double(key, value);
    else if (key == "norm_scale") cfg.scale_fraction = require_double(key, value);
    else if (key == "seven_day_average") cfg.seven_day_avg = require_bool(key, value);
    else if (key == "noise_eta") cfg.noise_eta = require_double(key, value);
    else if (key == "embed_p") cfg.embed.p = static_cast<int>(require_long(key, value));
    else if (key == "embed_tau") cfg.embed.tau = static_cast<int>(require_long(key, value));
    else if (key == "smooth_s") cfg.embed.smooth_s = static_cast<int>(require_long(key, value));
    else if (key == "smooth_window") {
        const std::string v = detail::lower(value);
        if (v == "shifted") cfg.embed.smooth_window = SmoothWindow::shifted;
        else if (v == "centered") cfg.embed.smooth_window = SmoothWindow::centered;
        else throw ParseError("config key smooth_window: expected shifted or centered");
    } else if (key == "features_per_sample")
        cfg.features_per_sample = static_cast<int>(require_long(key, value));
    else if (key == "fixed_features") cfg.fixed_features = static_cast<int>(require_long(key, value));
    else if (key == "max_features") cfg.max_features = require_long(key, value);
    else if (key == "lambda_grid") cfg.lambda_grid = require_double_list(key, value);
    else if (key == "lasso_tol") cfg.lasso_tol = require_double(key, value);
    else if (key == "lasso_max_iter") cfg.lasso_max_iter = require_long(key, value);
    else if (key == "lasso_half_n") cfg.lasso_half_n = require_bool(key, value);
    else if (key == "target") {
        const std::string v = detail::lower(value);
        if (v == "active") cfg.target = TargetKind::active;
        else if (v == "cumulative") cfg.target = TargetKind::cumulative;
        else throw ParseError("config key target: expected active or cumulative");
    } else if (key == "restarts") cfg.restarts = static_cast<int>(require_long(key, value));
    else if (key == "e0_multipliers") cfg.e0_multipliers = require_double_list(key, value);
    else if (key == "q_grid") cfg.q_grid = require_int_list(key, value);
    else if (key == "nm_max_iter") cfg.nm_max_iter = static_cast<int>(require_long(key, value));
    else if (key == "nm_tol") cfg.nm_tol = require_double(key, value);
    else if (key == "fit_step") cfg.fit_step = require_double(key, value);
    else if (key == "predict_step") cfg.predict_step = require_double(key, value);
    else if (key == "synth_days") cfg.synth_days = static_cast<int>(require_long(key, value));
    else if (key == "synth_step") cfg.synth_step = require_double(key, value);
    else if (key == "m1") cfg.m1 = static_cast<int>(require_long(key, value));
    else if (key == "m2") cfg.m2 = static_cast<int>(require_long(key, value));
    else if (key == "stability_runs") cfg.stability_runs = static_cast<int>(require_long(key, value));
    else if (key == "p_values") cfg.p_values = require_int_list(key, value);
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "seed") cfg.master_seed = static_cast<std::uint64_t>(require_long(key, value));
    else throw ParseError("unknown config key \"" + key + "\"");
}

// Grammar: one "key = value" per line, '#' starts a comment, blank lines
// ignored. A "preset = NAME" line is applied first wherever it appears.
inline ExperimentConfig parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        entries.emplace_back(key, value);
    }

    ExperimentConfig cfg;
    for (const auto& [key, value] : entries)
        if (key == "preset") apply_preset(cfg, value);
    for (const auto& [key, value] : entries) apply_config_key(cfg, key, value);
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_value(v[i]);
    }
    return out;
}

inline std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace detail

// Canonical serialization of the effective config; hashed into the manifest.
inline std::string canonical_config_text(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "dataset = " << cfg.dataset << '\n';
    out << "data_dir = " << cfg.data_dir << '\n';
    if (cfg.window)
        out << "window_start = " << cfg.window->first << "\nwindow_end = " << cfg.window->second
            << '\n';
    out << "train_sizes = " << detail::join_ints(cfg.train_sizes) << '\n';
    out << "methods = ";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
        out << (i ? "," : "") << method_name(cfg.methods[i]);
    out << '\n';
    out << "horizon = " << cfg.horizon << '\n';
    out << "population = " << detail::format_value(cfg.population) << '\n';
    out << "norm_scale = " << detail::format_value(cfg.scale_fraction) << '\n';
    out << "seven_day_average = " << (cfg.seven_day_avg ? "true" : "false") << '\n';
    out << "noise_eta = " << detail::format_value(cfg.noise_eta) << '\n';
    out << "embed_p = " << cfg.embed.p << '\n';
    out << "embed_tau = " << cfg.embed.tau << '\n';
    out << "smooth_s = " << cfg.embed.smooth_s << '\n';
    out << "smooth_window = "
        << (cfg.embed.smooth_window == SmoothWindow::shifted ? "shifted" : "centered") << '\n';
    out << "features_per_sample = " << cfg.features_per_sample << '\n';
    out << "fixed_features = " << cfg.fixed_features << '\n';
    out << "max_features = " << cfg.max_features << '\n';
    out << "lambda_grid = " << detail::join_doubles(cfg.lambda_grid) << '\n';
    out << "lasso_tol = " << detail::format_value(cfg.lasso_tol) << '\n';
    out << "lasso_max_iter = " << cfg.lasso_max_iter << '\n';
    out << "lasso_half_n = " << (cfg.lasso_half_n ? "true" : "false") << '\n';
    out << "target = " << (cfg.target == TargetKind::active ? "active" : "cumulative") << '\n';
    out << "restarts = " << cfg.restarts << '\n';
    out << "e0_multipliers = " << detail::join_doubles(cfg.e0_multipliers) << '\n';
    out << "q_grid = " << detail::join_ints(cfg.q_grid) << '\n';
    out << "nm_max_iter = " << cfg.nm_max_iter << '\n';
    out << "nm_tol = " << detail::format_value(cfg.nm_tol) << '\n';
    out << "fit_step = " << detail::format_value(cfg.fit_step) << '\n';
    out << "predict_step = " << detail::format_value(cfg.predict_step) << '\n';
    out << "synth_days = " << cfg.synth_days << '\n';
    out << "synth_step = " << detail::format_value(cfg.synth_step) << '\n';
    out << "m1 = " << cfg.m1 << '\n';
    out << "m2 = " << cfg.m2 << '\n';
    out << "stability_runs = " << cfg.stability_runs << '\n';
    out << "p_values = " << detail::join_ints(cfg.p_values) << '\n';
    out << "seed = " << cfg.master_seed << '\n';
    return out.str();
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace detail {

// Atomic write: stage next to the target, then rename into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

struct CsvBuilder {
    std::ostringstream out;
    explicit CsvBuilder(const std::string& header) { out << header << '\n'; }
    std::string str() const { return out.str(); }
};

}  // namespace detail

// Seed streams, one tag per purpose.
namespace seed_stream {
inline constexpr std::uint64_t noise = 1;
inline constexpr std::uint64_t basis = 2;
inline constexpr std::uint64_t bench = 3;
inline constexpr std::uint64_t interval = 4;
}  // namespace seed_stream

inline std::uint64_t method_stream_id(Method m) {
    switch (m) {
        case Method::spade4: return 1;
        case Method::seir: return 2;
        case Method::sueir: return 3;
        case Method::seir_beta_t: return 4;
    }
    return 0;
}

inline std::filesystem::path resolve_dataset_path(const ExperimentConfig& cfg) {
    std::filesystem::path p(cfg.dataset);
    if (p.is_absolute() || std::filesystem::exists(p)) return p;
    return std::filesystem::path(cfg.data_dir) / p;
}

// Assembles the working series: load or simulate, inject noise, average,
// normalize, window. The noise seed derives from the master seed.
inline TimeSeries prepare_series(const ExperimentConfig& cfg) {
    TimeSeries s;
    if (cfg.dataset == "synthetic") {
        s = simulate_sueir_observable(synthetic_sueir_params(), synthetic_initial_state(),
                                      cfg.synth_days, cfg.synth_step);
        if (cfg.noise_eta > 0.0)
            s = inject_noise(s, {cfg.noise_eta, derive_seed(cfg.master_seed, {seed_stream::noise})});
    } else {
        if (cfg.dataset.empty()) throw ValidationError("no dataset configured");
        if (cfg.noise_eta > 0.0)
            throw ValidationError("noise injection applies to synthetic data only");
        s = load_csv(resolve_dataset_path(cfg));
    }
    if (cfg.seven_day_avg) s = seven_day_average(s);
    s = normalize(s, {cfg.population, cfg.scale_fraction});
    if (cfg.window) s = extract_window(s, cfg.window->first, cfg.window->second);
    return s;
}

// Forecast for one (method, training size) cell. `repetition` feeds the seed
// derivation so stability runs stay independent.
inline ForecastResult run_method_cell(const TimeSeries& series, Method method, int m,
                                      const ExperimentConfig& cfg, std::uint64_t repetition = 0) {
    const TimeSeries train = head(series, static_cast<std::size_t>(m));
    if (method == Method::spade4) {
        RfmConfig rfm = cfg.rfm_config();
        rfm.seed = derive_seed(cfg.master_seed,
                               {seed_stream::basis, method_stream_id(method),
                                static_cast<std::uint64_t>(m), repetition});
        return forecast(train, cfg.embed, rfm, cfg.horizon);
    }
    ModelKind kind = ModelKind::seir;
    if (method == Method::sueir) kind = ModelKind::sueir;
    if (method == Method::seir_beta_t) kind = ModelKind::seir_beta_t;
    FitSpec spec = cfg.fit_spec(kind);
    spec.seed = derive_seed(cfg.master_seed,
                            {seed_stream::bench, method_stream_id(method),
                             static_cast<std::uint64_t>(m), repetition});
    const BenchmarkFit fit = fit_benchmark(train, spec, cfg.population_norm());
    return predict_benchmark(fit, train, cfg.population_norm(), cfg.horizon, cfg.predict_step);
}

namespace detail {

inline void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
    std::ostringstream out;
    out << "command = " << command << '\n';
    out << "config_hash = " << fnv1a64(canonical_config_text(cfg)) << '\n';
    out << "seed = " << cfg.master_seed << '\n';
    out << "version = " << kVersion << '\n';
    write_file_atomic(std::filesystem::path(cfg.out_dir) / (command + "_manifest.txt"),
                      out.str());
}

inline void ensure_out_dir(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
}

inline std::string series_csv(const TimeSeries& s) {
    CsvBuilder csv("day,value");
    for (std::size_t k = 0; k < s.size(); ++k)
        csv.out << format_day(s.day(k)) << ',' << format_value(s.values[k]) << '\n';
    return csv.str();
}

inline std::string forecast_csv(const ForecastResult& f) {
    CsvBuilder csv("day,value");
    for (std::size_t k = 0; k < f.values.size(); ++k)
        csv.out << format_day(f.first_day + static_cast<double>(k) * f.dt) << ','
                << format_value(f.values[k]) << '\n';
    return csv.str();
}

}  // namespace detail

// simulate: writes the daily normalized synthetic observable (optionally
// noised) as a standard series CSV.
inline std::filesystem::path run_simulate(const ExperimentConfig& cfg) {
    if (cfg.dataset != "synthetic")
        throw ValidationError("simulate requires dataset = synthetic");
    TimeSeries s = simulate_sueir_observable(synthetic_sueir_params(), synthetic_initial_state(),
                                             cfg.synth_days, cfg.synth_step);
    if (cfg.noise_eta > 0.0)
        s = inject_noise(s, {cfg.noise_eta, derive_seed(cfg.master_seed, {seed_stream::noise})});
    detail::ensure_out_dir(cfg);
    const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "series.csv";
    detail::write_file_atomic(path, detail::series_csv(s));
    detail::write_manifest(cfg, "simulate");
    return path;
}

// forecast: one CSV per (method, m), plus a combined file with the truth
// column whenever held-out data exists.
inline std::vector<std::filesystem::path> run_forecast(const ExperimentConfig& cfg) {
    const TimeSeries series = prepare_series(cfg);
    if (cfg.train_sizes.empty()) throw ValidationError("no train_sizes configured");
    detail::ensure_out_dir(cfg);
    std::vector<std::filesystem::path> written;

    for (int m : cfg.train_sizes) {
        std::vector<ForecastResult> results;
        for (Method method : cfg.methods) {
            const ForecastResult fc = run_method_cell(series, method, m, cfg);
            const std::filesystem::path path =
                std::filesystem::path(cfg.out_dir) /
                ("forecast_" + method_name(method) + "_m" + std::to_string(m) + ".csv");
            detail::write_file_atomic(path, detail::forecast_csv(fc));
            written.push_back(path);
            results.push_back(fc);
        }
        const bool have_truth =
            static_cast<long>(series.size()) >= static_cast<long>(m) + cfg.horizon;
        if (have_truth) {
            std::string header = "day,truth";
            for (Method method : cfg.methods) header += "," + method_name(method);
            detail::CsvBuilder csv(header);
            for (int k = 0; k < cfg.horizon; ++k) {
                csv.out << detail::format_day(series.day(static_cast<std::size_t>(m + k)));
                csv.out << ',' << detail::format_value(series.values[static_cast<std::size_t>(m + k)]);
                for (const ForecastResult& fc : results)
                    csv.out << ',' << detail::format_value(fc.values[static_cast<std::size_t>(k)]);
                csv.out << '\n';
            }
            const std::filesystem::path path =
                std::filesystem::path(cfg.out_dir) / ("combined_m" + std::to_string(m) + ".csv");
            detail::write_file_atomic(path, csv.str());
            written.push_back(path);
        }
    }
    detail::write_manifest(cfg, "forecast");
    return written;
}

struct EvaluationRow {
    Method method;
    int m = 0;
    double error = 0.0;
};

inline std::vector<EvaluationRow> evaluate_cells(const TimeSeries& series,
                                                 const ExperimentConfig& cfg) {
    std::vector<EvaluationRow> rows;
    for (Method method : cfg.methods) {
        for (int m : cfg.train_sizes) {
            if (static_cast<long>(series.size()) < static_cast<long>(m) + cfg.horizon)
                throw InsufficientDataError("evaluate: no held-out data for m = " +
                                            std::to_string(m));
            const ForecastResult fc = run_method_cell(series, method, m, cfg);
            const std::span<const double> truth(series.values.data() + m,
                                                static_cast<std::size_t>(cfg.horizon));
            rows.push_back({method, m, relative_error(truth, fc.values)});
        }
    }
    return rows;
}

// evaluate: relative 7-day (horizon) errors per method and training size.
inline std::filesystem::path run_evaluate(const ExperimentConfig& cfg) {
    const TimeSeries series = prepare_series(cfg);
    if (cfg.train_sizes.empty()) throw ValidationError("no train_sizes configured");
    const std::vector<EvaluationRow> rows = evaluate_cells(series, cfg);
    detail::CsvBuilder csv("method,m,relative_error");
    for (const EvaluationRow& r : rows)
        csv.out << method_name(r.method) << ',' << r.m << ',' << detail::format_value(r.error)
                << '\n';
    detail::ensure_out_dir(cfg);
    const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "errors.csv";
    detail::write_file_atomic(path, csv.str());
    detail::write_manifest(cfg, "evaluate");
    return path;
}

// interval: 95% prediction band for the final horizon days.
inline std::filesystem::path run_interval(const ExperimentConfig& cfg) {
    const TimeSeries series = prepare_series(cfg);
    if (cfg.m1 <= 0 || cfg.m2 <= 0)
        throw ValidationError("interval requires m1 and m2 (preset or config)");
    RfmConfig rfm = cfg.rfm_config();
    rfm.seed = derive_seed(cfg.master_seed, {seed_stream::interval});
    const IntervalResult iv =
        interval_forecast(series, cfg.m1, cfg.m2, cfg.horizon, cfg.embed, rfm);
    detail::CsvBuilder csv("day,point,lo95,hi95");
    for (int k = 0; k < cfg.horizon; ++k) {
        csv.out << detail::format_day(iv.point.first_day + k * iv.point.dt) << ','
                << detail::format_value(iv.point.values[static_cast<std::size_t>(k)]) << ','
                << detail::format_value(iv.lo[static_cast<std::size_t>(k)]) << ','
                << detail::format_value(iv.hi[static_cast<std::size_t>(k)]) << '\n';
    }
    detail::ensure_out_dir(cfg);
    const std::filesystem::path path =
        std::filesystem::path(cfg.out_dir) / ("interval_m" + std::to_string(cfg.m2) + ".csv");
    detail::write_file_atomic(path, csv.str());
    detail::write_manifest(cfg, "interval");
    return path;
}

// stability: per-day min/median/max of repeated forecasts over fresh bases.
inline std::vector<std::filesystem::path> run_stability(const ExperimentConfig& cfg, int runs) {
    if (runs < 1) throw ValidationError("stability needs runs >= 1");
    const TimeSeries series = prepare_series(cfg);
    if (cfg.train_sizes.empty()) throw ValidationError("no train_sizes configured");
    detail::ensure_out_dir(cfg);
    std::vector<std::filesystem::path> written;
    for (int m : cfg.train_sizes) {
        std::vector<std::vector<double>> forecasts;
        forecasts.reserve(static_cast<std::size_t>(runs));
        for (int rep = 0; rep < runs; ++rep)
            forecasts.push_back(
                run_method_cell(series, Method::spade4, m, cfg, static_cast<std::uint64_t>(rep))
                    .values);
        detail::CsvBuilder csv("day,min,median,max");
        std::vector<double> column(static_cast<std::size_t>(runs));
        for (int k = 0; k < cfg.horizon; ++k) {
            for (int rep = 0; rep < runs; ++rep)
                column[static_cast<std::size_t>(rep)] =
                    forecasts[static_cast<std::size_t>(rep)][static_cast<std::size_t>(k)];
            std::sort(column.begin(), column.end());
            const double lo = column.front();
            const double hi = column.back();
            const double med = runs % 2 ? column[static_cast<std::size_t>(runs / 2)]
                                        : 0.5 * (column[static_cast<std::size_t>(runs / 2 - 1)] +
                                                 column[static_cast<std::size_t>(runs / 2)]);
            const double day = series.day(static_cast<std::size_t>(m + k));
            csv.out << detail::format_day(day) << ',' << detail::format_value(lo) << ','
                    << detail::format_value(med) << ',' << detail::format_value(hi) << '\n';
        }
        const std::filesystem::path path =
            std::filesystem::path(cfg.out_dir) / ("stability_m" + std::to_string(m) + ".csv");
        detail::write_file_atomic(path, csv.str());
        written.push_back(path);
    }
    detail::write_manifest(cfg, "stability");
    return written;
}

// embed-sweep: SPADE4 errors across embedding dimensions; infeasible cells
// are marked unavailable and the run continues.
inline std::filesystem::path run_embedding_sweep(const ExperimentConfig& cfg,
                                                 const std::vector<int>& p_values) {
    const TimeSeries series = prepare_series(cfg);
    if (cfg.train_sizes.empty()) throw ValidationError("no train_sizes configured");
    if (p_values.empty()) throw ValidationError("embed-sweep needs at least one p value");
    detail::CsvBuilder csv("p,m,relative_error");
    for (int p : p_values) {
        for (int m : cfg.train_sizes) {
            ExperimentConfig cell = cfg;
            cell.embed.p = p;
            std::string field = "unavailable";
            if (static_cast<long>(series.size()) >= static_cast<long>(m) + cfg.horizon &&
                m >= p + 1) {
                try {
                    const ForecastResult fc = run_method_cell(series, Method::spade4, m, cell);
                    const std::span<const double> truth(series.values.data() + m,
                                                        static_cast<std::size_t>(cfg.horizon));
                    field = detail::format_value(relative_error(truth, fc.values));
                } catch (const InsufficientDataError&) {
                    field = "unavailable";
                }
            }
            csv.out << p << ',' << m << ',' << field << '\n';
        }
    }
    detail::ensure_out_dir(cfg);
    const std::filesystem::path path = std::filesystem::path(cfg.out_dir) / "embed_sweep.csv";
    detail::write_file_atomic(path, csv.str());
    detail::write_manifest(cfg, "embed-sweep");
    return path;
}

}  // namespace spade4
