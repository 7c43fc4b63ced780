// gridfreq: command-line front end for the pattern-based grid-frequency
// forecasting library. Subcommands: synth, ingest, stats, forecast, evaluate,
// sweep, tune-beta. Every run writes a run_manifest.txt with the effective
// configuration, input digests and the library version; all numeric output is
// printed with 9 significant digits so identical configs produce identical
// files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridfreq/gridfreq.hpp"

namespace fs = std::filesystem;
using namespace gridfreq;

namespace {

std::uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read input file: " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Collects what a run saw and writes run_manifest.txt. No wall-clock data:
/// reruns of the same config must be byte-identical.
class Manifest {
public:
    Manifest(std::string subcommand, CLI::App* sub) : subcommand_(std::move(subcommand)), sub_(sub) {}

    void add_input(const std::string& role, const fs::path& path) {
        inputs_.emplace_back(role, path);
    }
    void add_note(const std::string& key, const std::string& value) {
        notes_.emplace_back(key, value);
    }

    void write(const fs::path& dir) const {
        fs::create_directories(dir);
        const fs::path p = dir / "run_manifest.txt";
        std::ofstream out(p);
        if (!out) throw Error("cannot write manifest: " + p.string());
        out << "gridfreq run manifest\n";
        out << "version=" << kVersion << "\n";
        out << "subcommand=" << subcommand_ << "\n";
        for (const auto& [role, path] : inputs_) {
            out << "input." << role << ".path=" << path.string() << "\n";
            out << "input." << role << ".fnv1a64=" << hex64(fnv1a64_file(path)) << "\n";
        }
        for (const auto& [k, v] : notes_) out << k << "=" << v << "\n";
        out << "config:\n";
        std::istringstream cfg(sub_->config_to_str(true, false));
        std::string line;
        while (std::getline(cfg, line)) out << "  " << line << "\n";
    }

private:
    std::string subcommand_;
    CLI::App* sub_;
    std::vector<std::pair<std::string, fs::path>> inputs_;
    std::vector<std::pair<std::string, std::string>> notes_;
};

FrequencySeries load_frequency(const fs::path& path, double nominal_hz) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read input file: " + path.string());
    auto [series, report] = parse_frequency_csv(in, nominal_hz);
    (void)report;
    return std::move(series);
}

RawFeatureSeries load_feature(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read feature file: " + path.string());
    auto [feature, report] = parse_feature_csv(in);
    (void)report;
    return std::move(feature);
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write output file: " + path.string());
    return out;
}

FeatureAlignment parse_alignment(const std::string& s) {
    if (s == "past") return FeatureAlignment::past_hour;
    if (s == "forecast") return FeatureAlignment::forecast_hour;
    throw ConfigError("alignment must be 'past' or 'forecast'");
}

SplitSpec parse_split(const std::vector<double>& f) {
    if (f.size() != 3) throw ConfigError("--split needs three fractions");
    SplitSpec s{f[0], f[1], f[2]};
    validate(s);
    return s;
}

void write_cell(std::ostream& os, double v) {
    if (std::isfinite(v)) os << format_number(v);
    // undefined values stay empty, like gaps in the series CSV
}

// ---------------------------------------------------------------------------
// subcommand option bags

struct SynthArgs {
    SynthSpec spec;
    std::string out;
    std::string feature_out;
    double coupling = 1.0;
};

struct IngestArgs {
    std::string input, out;
    double nominal = 50.0;
    double threshold = 2.0;
};

struct StatsArgs {
    std::string input, outdir = ".";
    double nominal = 50.0;
    std::int64_t acf_max_lag = 2 * kSecondsPerDay;
    std::int64_t acf_stride = 60;
    std::vector<std::int64_t> taus = {1, 10};
    std::size_t bins = 101;
};

struct ForecastArgs {
    std::string input, outdir = ".", at;
    double nominal = 50.0;
    std::size_t k = 10;
    std::string predictor = "wnn";
    std::string feature;
    double beta = 1.0;
    std::string alignment = "forecast";
};

struct EvaluateArgs {
    std::string input, outdir = ".";
    double nominal = 50.0;
    std::vector<double> split = {0.70, 0.15, 0.15};
    int k_max = 50;
    int threads = 1;
    std::string scope = "per-hour";
    std::string feature;
    double beta = 1.0;
    std::string alignment = "forecast";
};

struct SweepArgs {
    std::string input, outdir = ".";
    double nominal = 50.0;
    std::vector<int> intervals = {7, 14, 28, 56};
    int k_max = 50;
    int threads = 1;
};

struct TuneBetaArgs {
    std::string input, feature, outdir = ".";
    double nominal = 50.0;
    std::vector<double> split = {0.70, 0.15, 0.15};
    std::vector<double> grid;
    int k_max = 50;
    int threads = 1;
    std::string scope = "per-hour";
    std::string alignment = "forecast";
};

EvalOptions make_eval_options(const std::vector<double>& split, int k_max, int threads,
                              const std::string& scope) {
    EvalOptions opts;
    opts.split = parse_split(split);
    opts.k_max = k_max;
    opts.threads = threads;
    if (scope == "per-hour")
        opts.scope = AdaptiveScope::per_hour;
    else if (scope == "global")
        opts.scope = AdaptiveScope::global;
    else
        throw ConfigError("adaptive scope must be 'per-hour' or 'global'");
    return opts;
}

// ---------------------------------------------------------------------------

int run_synth(const SynthArgs& a, Manifest& manifest) {
    const FrequencySeries series = generate(a.spec);
    {
        auto out = open_output(a.out);
        write_frequency_csv(out, series);
    }
    if (!a.feature_out.empty()) {
        const RawFeatureSeries feature = generate_feature(a.spec, a.coupling);
        auto out = open_output(a.feature_out);
        write_feature_csv(out, feature);
    }
    manifest.write(fs::path(a.out).has_parent_path() ? fs::path(a.out).parent_path()
                                                     : fs::path("."));
    std::cout << "synth: wrote " << series.size() << " samples to " << a.out << "\n";
    return 0;
}

int run_ingest(const IngestArgs& a, Manifest& manifest) {
    std::ifstream in(a.input);
    if (!in) throw Error("cannot read input file: " + a.input);
    auto [series, report] = parse_frequency_csv(in, a.nominal);
    auto [masked, n_masked] = mask_outliers(series, a.threshold);
    report.outliers_masked = n_masked;
    {
        auto out = open_output(a.out);
        write_frequency_csv(out, masked);
    }
    manifest.add_input("frequency", a.input);
    manifest.add_note("report.rows_read", std::to_string(report.rows_read));
    manifest.add_note("report.gaps_inserted", std::to_string(report.gaps_inserted));
    manifest.add_note("report.outliers_masked", std::to_string(report.outliers_masked));
    manifest.add_note("report.duplicates_dropped", std::to_string(report.duplicates_dropped));
    manifest.write(fs::path(a.out).has_parent_path() ? fs::path(a.out).parent_path()
                                                     : fs::path("."));
    std::cout << "ingest: rows_read=" << report.rows_read
              << " gaps_inserted=" << report.gaps_inserted
              << " outliers_masked=" << report.outliers_masked
              << " duplicates_dropped=" << report.duplicates_dropped << "\n";
    return 0;
}

int run_stats(const StatsArgs& a, Manifest& manifest) {
    const FrequencySeries series = load_frequency(a.input, a.nominal);
    const fs::path dir(a.outdir);
    fs::create_directories(dir);

    const DailyCurve profile = daily_profile(series);
    const DailyCurve spread = daily_std(series);
    {
        auto out = open_output(dir / "daily_profile.csv");
        out << "second_of_day,mean_hz,std_hz,count\n";
        for (std::size_t sec = 0; sec < static_cast<std::size_t>(kSecondsPerDay); ++sec) {
            out << sec << ',';
            write_cell(out, profile.values[sec]);
            out << ',';
            write_cell(out, spread.values[sec]);
            out << ',' << profile.counts[sec] << '\n';
        }
    }
    {
        const auto acf = autocorrelation(series, a.acf_max_lag, a.acf_stride);
        auto out = open_output(dir / "acf.csv");
        out << "lag_s,acf\n";
        for (const auto& p : acf) {
            out << p.lag_s << ',';
            if (p.defined) out << format_number(p.acf);
            out << '\n';
        }
    }
    for (const std::int64_t tau : a.taus) {
        const IncrementHistogram h = increment_histogram(series, tau, a.bins);
        auto out = open_output(dir / ("increments_tau" + std::to_string(tau) + ".csv"));
        out << "bin_center_sigma,density\n";
        for (std::size_t b = 0; b < h.densities.size(); ++b) {
            const double center = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
            out << format_number(center) << ',' << format_number(h.densities[b]) << '\n';
        }
        std::cout << "stats: tau=" << tau << " excess_kurtosis="
                  << format_number(h.excess_kurtosis) << " n=" << h.n_increments << "\n";
    }
    manifest.add_input("frequency", a.input);
    manifest.write(dir);
    return 0;
}

int run_forecast(const ForecastArgs& a, Manifest& manifest) {
    const FrequencySeries series = load_frequency(a.input, a.nominal);
    const std::int64_t at = parse_timestamp(a.at);
    if (pos_mod(at, kSecondsPerHour) != 0)
        throw ConfigError("forecast hour must start on an hour boundary");
    const std::int64_t wstart = at - kSecondsPerHour - series.start_epoch;
    if (wstart < 0 || at > series.end_epoch())
        throw InsufficientDataError("forecast hour has no preceding-hour window in the data");
    const Window window = slice_window(series, wstart, kSecondsPerHour);
    if (window.any_gap)
        throw InsufficientDataError("preceding-hour window contains gaps");

    Pattern query;
    query.hour_of_day = static_cast<int>(pos_mod(at, kSecondsPerDay) / kSecondsPerHour);
    query.day_index = floor_div(at, kSecondsPerDay);
    query.window_start_epoch = at - kSecondsPerHour;
    query.window = window.values;

    const auto lib_end = static_cast<std::size_t>(at - kSecondsPerHour - series.start_epoch) +
                         kPatternLength;
    const PatternLibrary library = build_library(series, 0, std::min(lib_end, series.size()));

    ForecastTrajectory traj;
    if (a.predictor == "constant") {
        traj = predict_constant(series.nominal_hz, at);
    } else if (a.predictor == "daily-profile") {
        traj = predict_daily_profile(library, query.hour_of_day, at);
    } else if (a.predictor == "wnn") {
        if (!a.feature.empty()) {
            const RawFeatureSeries raw = load_feature(a.feature);
            const std::int64_t train_span = at - raw.start_epoch;
            const std::size_t train_samples =
                train_span <= 0 ? 0
                                : std::min<std::size_t>(raw.size(),
                                                        static_cast<std::size_t>(train_span /
                                                                                 raw.lambda_s));
            const FeatureSeries feature = minmax_scale(raw, train_samples);
            const FeatureAlignment align = parse_alignment(a.alignment);
            const auto qf = feature_window(feature, at, align);
            if (!qf) throw NoCandidatesError("no gap-free feature window for the forecast hour");
            traj = predict_wnn_extended(library, feature, query, *qf, a.beta, a.k);
            manifest.add_input("feature", a.feature);
        } else {
            traj = predict_wnn(library, query, a.k);
        }
    } else {
        throw ConfigError("predictor must be one of: wnn, daily-profile, constant");
    }

    const fs::path dir(a.outdir);
    {
        auto out = open_output(dir / "forecast.csv");
        out << "delta_t_s,predicted_hz\n";
        for (std::size_t t = 0; t < traj.values.size(); ++t)
            out << (t + 1) << ',' << format_number(traj.values[t]) << '\n';
    }
    manifest.add_input("frequency", a.input);
    manifest.write(dir);
    std::cout << "forecast: " << traj.predictor_id << " for hour starting " << at << "\n";
    return 0;
}

void write_rmse_tables(const fs::path& dir, const EvaluationReport& report) {
    const auto find = [&](const char* id) -> const PredictorCurves* {
        for (const auto& pc : report.predictors)
            if (pc.id == id) return &pc;
        return nullptr;
    };
    const PredictorCurves* cols[] = {find("constant"), find("daily_profile"), find("wnn"),
                                     find("wnn_extended")};
    {
        auto out = open_output(dir / "rmse_per_dt.csv");
        out << "delta_t_s,rmse_constant_hz,rmse_daily_profile_hz,rmse_wnn_hz";
        if (cols[3]) out << ",rmse_wnn_extended_hz";
        out << '\n';
        for (std::size_t t = 0; t < kPatternLength; ++t) {
            out << (t + 1);
            for (const auto* pc : cols) {
                if (!pc) continue;
                out << ',';
                write_cell(out, pc->rmse_per_dt[t]);
            }
            out << '\n';
        }
    }
    {
        auto out = open_output(dir / "rmse_per_minute.csv");
        out << "minute_of_hour,rmse_constant_hz,rmse_daily_profile_hz,rmse_wnn_hz";
        if (cols[3]) out << ",rmse_wnn_extended_hz";
        out << '\n';
        for (std::size_t m = 0; m < 60; ++m) {
            out << (m + 1);
            for (const auto* pc : cols) {
                if (!pc) continue;
                out << ',';
                write_cell(out, pc->rmse_per_minute[m]);
            }
            out << '\n';
        }
    }
}

int run_evaluate(const EvaluateArgs& a, Manifest& manifest) {
    const FrequencySeries series = load_frequency(a.input, a.nominal);
    const EvalOptions opts = make_eval_options(a.split, a.k_max, a.threads, a.scope);

    std::optional<FeatureConfig> fc;
    if (!a.feature.empty()) {
        fc = FeatureConfig{load_feature(a.feature), a.beta, parse_alignment(a.alignment)};
        manifest.add_input("feature", a.feature);
    }
    const EvaluationReport report = evaluate(series, opts, fc ? &*fc : nullptr);
    if (report.leakage_violations != 0)
        throw Error("leakage guard tripped: " + std::to_string(report.leakage_violations) +
                    " neighbours at or past the query split");

    const fs::path dir(a.outdir);
    fs::create_directories(dir);
    write_rmse_tables(dir, report);
    manifest.add_input("frequency", a.input);
    manifest.add_note("report.forecast_count", std::to_string(report.forecast_count));
    manifest.add_note("report.skipped_queries", std::to_string(report.skipped_queries));
    manifest.add_note("report.leakage_violations", std::to_string(report.leakage_violations));
    manifest.write(dir);
    for (const auto& pc : report.predictors)
        std::cout << "evaluate: " << pc.id << " overall_rmse_hz="
                  << format_number(pc.overall_rmse) << "\n";
    std::cout << "evaluate: forecasts=" << report.forecast_count
              << " skipped=" << report.skipped_queries
              << " leakage_violations=" << report.leakage_violations << "\n";
    return 0;
}

int run_sweep(const SweepArgs& a, Manifest& manifest) {
    const FrequencySeries series = load_frequency(a.input, a.nominal);
    EvalOptions opts = make_eval_options({0.7, 0.15, 0.15}, a.k_max, a.threads, "global");
    const SweepResult result = training_size_sweep(series, a.intervals, opts);

    const fs::path dir(a.outdir);
    {
        auto out = open_output(dir / "sweep.csv");
        out << "interval_days,predictor,mean_rmse_hz\n";
        for (const auto& row : result.rows)
            out << row.interval_days << ',' << row.predictor << ','
                << format_number(row.mean_rmse) << '\n';
    }
    manifest.add_input("frequency", a.input);
    manifest.write(dir);
    for (const auto& note : result.notes) std::cout << "sweep: " << note << "\n";
    std::cout << "sweep: wrote " << result.rows.size() << " rows\n";
    return 0;
}

int run_tune_beta(const TuneBetaArgs& a, Manifest& manifest) {
    const FrequencySeries series = load_frequency(a.input, a.nominal);
    const RawFeatureSeries raw = load_feature(a.feature);
    const EvalOptions opts = make_eval_options(a.split, a.k_max, a.threads, a.scope);
    const std::vector<double> grid = a.grid.empty() ? default_beta_grid() : a.grid;
    const BetaGridResult result =
        beta_grid_search(series, raw, grid, opts, parse_alignment(a.alignment));

    const fs::path dir(a.outdir);
    {
        auto out = open_output(dir / "beta_curve.csv");
        out << "beta,mean_rmse_hz\n";
        for (const auto& [beta, rmse] : result.curve)
            out << format_number(beta) << ',' << format_number(rmse) << '\n';
    }
    manifest.add_input("frequency", a.input);
    manifest.add_input("feature", a.feature);
    manifest.add_note("result.best_beta", format_number(result.best_beta));
    manifest.write(dir);
    std::cout << "tune-beta: best_beta=" << format_number(result.best_beta)
              << " plain_wnn_rmse_hz=" << format_number(result.plain_wnn_rmse) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pattern-based next-hour grid frequency forecasting"};
    app.set_config("--config", "", "key=value file with option defaults; flags override");
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic frequency data set");
    synth_cmd->add_option("--days", synth_args.spec.days, "days to generate")->capture_default_str();
    synth_cmd->add_option("--seed", synth_args.spec.seed, "RNG seed")->capture_default_str();
    synth_cmd->add_option("--out", synth_args.out, "output frequency CSV")->required();
    synth_cmd->add_option("--feature-out", synth_args.feature_out, "optional feature CSV");
    synth_cmd->add_option("--coupling", synth_args.coupling, "feature/jump coupling in [0,1]")
        ->capture_default_str();
    synth_cmd->add_option("--nominal", synth_args.spec.nominal_hz, "nominal frequency Hz")
        ->capture_default_str();
    synth_cmd->add_option("--decay-time", synth_args.spec.decay_time_s, "jump decay time s")
        ->capture_default_str();
    synth_cmd->add_option("--noise-amplitude", synth_args.spec.noise_amplitude, "shock scale Hz/sqrt(s)")
        ->capture_default_str();
    synth_cmd->add_option("--noise-reversion-rate", synth_args.spec.noise_reversion_rate,
                          "mean reversion rate 1/s")
        ->capture_default_str();
    synth_cmd->add_option("--weekend-scale", synth_args.spec.weekend_scale,
                          "jump multiplier on days 5-6 of each week")
        ->capture_default_str();
    synth_cmd->add_option("--start-epoch", synth_args.spec.start_epoch, "UTC start (midnight-aligned)")
        ->capture_default_str();

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand("ingest", "regularize a raw CSV and mask outliers");
    ingest_cmd->add_option("--input", ingest_args.input, "raw frequency CSV")->required();
    ingest_cmd->add_option("--out", ingest_args.out, "normalized CSV")->required();
    ingest_cmd->add_option("--nominal", ingest_args.nominal, "nominal frequency Hz")
        ->capture_default_str();
    ingest_cmd->add_option("--outlier-threshold", ingest_args.threshold,
                           "mask samples with |f - nominal| above this (Hz)")
        ->capture_default_str();

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "daily profile, ACF and increment statistics");
    stats_cmd->add_option("--input", stats_args.input, "frequency CSV")->required();
    stats_cmd->add_option("--outdir", stats_args.outdir, "output directory")->capture_default_str();
    stats_cmd->add_option("--nominal", stats_args.nominal, "nominal frequency Hz")
        ->capture_default_str();
    stats_cmd->add_option("--acf-max-lag", stats_args.acf_max_lag, "largest ACF lag (s)")
        ->capture_default_str();
    stats_cmd->add_option("--acf-stride", stats_args.acf_stride, "ACF lag stride (s)")
        ->capture_default_str();
    stats_cmd->add_option("--tau", stats_args.taus, "increment delays (s)")
        ->delimiter(',')
        ->capture_default_str();
    stats_cmd->add_option("--bins", stats_args.bins, "histogram bin count")->capture_default_str();

    ForecastArgs forecast_args;
    auto* forecast_cmd = app.add_subcommand("forecast", "forecast one hour from history");
    forecast_cmd->add_option("--input", forecast_args.input, "frequency CSV")->required();
    forecast_cmd->add_option("--at", forecast_args.at,
                             "forecast hour start (epoch seconds or RFC 3339)")
        ->required();
    forecast_cmd->add_option("--outdir", forecast_args.outdir, "output directory")
        ->capture_default_str();
    forecast_cmd->add_option("--nominal", forecast_args.nominal, "nominal frequency Hz")
        ->capture_default_str();
    forecast_cmd->add_option("--k", forecast_args.k, "neighbour count")->capture_default_str();
    forecast_cmd->add_option("--predictor", forecast_args.predictor,
                             "wnn | daily-profile | constant")
        ->capture_default_str();
    forecast_cmd->add_option("--feature", forecast_args.feature, "optional feature CSV");
    forecast_cmd->add_option("--beta", forecast_args.beta, "feature distance weight")
        ->capture_default_str();
    forecast_cmd->add_option("--alignment", forecast_args.alignment, "past | forecast")
        ->capture_default_str();

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "70/15/15 backtest of all predictors");
    eval_cmd->add_option("--input", eval_args.input, "frequency CSV")->required();
    eval_cmd->add_option("--outdir", eval_args.outdir, "output directory")->capture_default_str();
    eval_cmd->add_option("--nominal", eval_args.nominal, "nominal frequency Hz")
        ->capture_default_str();
    eval_cmd->add_option("--split", eval_args.split, "train,validation,test fractions")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    eval_cmd->add_option("--k-max", eval_args.k_max, "largest adaptive-k candidate")
        ->capture_default_str();
    eval_cmd->add_option("--threads", eval_args.threads, "worker threads")->capture_default_str();
    eval_cmd->add_option("--adaptive-scope", eval_args.scope, "per-hour | global")
        ->capture_default_str();
    eval_cmd->add_option("--feature", eval_args.feature, "optional feature CSV");
    eval_cmd->add_option("--beta", eval_args.beta, "feature distance weight")
        ->capture_default_str();
    eval_cmd->add_option("--alignment", eval_args.alignment, "past | forecast")
        ->capture_default_str();

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "validation RMSE vs training-history length");
    sweep_cmd->add_option("--input", sweep_args.input, "frequency CSV")->required();
    sweep_cmd->add_option("--outdir", sweep_args.outdir, "output directory")->capture_default_str();
    sweep_cmd->add_option("--nominal", sweep_args.nominal, "nominal frequency Hz")
        ->capture_default_str();
    sweep_cmd->add_option("--intervals", sweep_args.intervals, "history lengths in days")
        ->delimiter(',')
        ->capture_default_str();
    sweep_cmd->add_option("--k-max", sweep_args.k_max, "largest adaptive-k candidate")
        ->capture_default_str();
    sweep_cmd->add_option("--threads", sweep_args.threads, "worker threads")->capture_default_str();

    TuneBetaArgs tune_args;
    auto* tune_cmd = app.add_subcommand("tune-beta", "grid search for the feature weight");
    tune_cmd->add_option("--input", tune_args.input, "frequency CSV")->required();
    tune_cmd->add_option("--feature", tune_args.feature, "feature CSV")->required();
    tune_cmd->add_option("--outdir", tune_args.outdir, "output directory")->capture_default_str();
    tune_cmd->add_option("--nominal", tune_args.nominal, "nominal frequency Hz")
        ->capture_default_str();
    tune_cmd->add_option("--split", tune_args.split, "train,validation,test fractions")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    tune_cmd->add_option("--beta-grid", tune_args.grid, "beta values (default 0.1..1.5)")
        ->delimiter(',');
    tune_cmd->add_option("--k-max", tune_args.k_max, "largest adaptive-k candidate")
        ->capture_default_str();
    tune_cmd->add_option("--threads", tune_args.threads, "worker threads")->capture_default_str();
    tune_cmd->add_option("--adaptive-scope", tune_args.scope, "per-hour | global")
        ->capture_default_str();
    tune_cmd->add_option("--alignment", tune_args.alignment, "past | forecast")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth_cmd->parsed()) {
            Manifest m("synth", synth_cmd);
            return run_synth(synth_args, m);
        }
        if (ingest_cmd->parsed()) {
            Manifest m("ingest", ingest_cmd);
            return run_ingest(ingest_args, m);
        }
        if (stats_cmd->parsed()) {
            Manifest m("stats", stats_cmd);
            return run_stats(stats_args, m);
        }
        if (forecast_cmd->parsed()) {
            Manifest m("forecast", forecast_cmd);
            return run_forecast(forecast_args, m);
        }
        if (eval_cmd->parsed()) {
            Manifest m("evaluate", eval_cmd);
            return run_evaluate(eval_args, m);
        }
        if (sweep_cmd->parsed()) {
            Manifest m("sweep", sweep_cmd);
            return run_sweep(sweep_args, m);
        }
        if (tune_cmd->parsed()) {
            Manifest m("tune-beta", tune_cmd);
            return run_tune_beta(tune_args, m);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
