#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridfreq/detail/parallel.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/features.hpp"
#include "gridfreq/pattern.hpp"
#include "gridfreq/predictor.hpp"
#include "gridfreq/series.hpp"

namespace gridfreq {

/// Chronological split fractions; train is earliest.
struct SplitSpec {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

inline void validate(const SplitSpec& s) {
    for (const double f : {s.train, s.validation, s.test})
        if (!(f > 0.0 && f < 1.0)) throw ConfigError("split fractions must lie in (0,1)");
    if (std::abs(s.train + s.validation + s.test - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1");
}

inline std::int64_t floor_to_midnight(std::int64_t epoch) {
    return floor_div(epoch, kSecondsPerDay) * kSecondsPerDay;
}

/// Sample indices of the two split boundaries, snapped down to midnight UTC.
struct SplitIndices {
    std::size_t train_end = 0;
    std::size_t validation_end = 0;
};

inline SplitIndices chronological_split_indices(const FrequencySeries& s, const SplitSpec& spec) {
    validate(spec);
    const auto len = static_cast<double>(s.size());
    const std::int64_t m1 =
        floor_to_midnight(s.start_epoch + static_cast<std::int64_t>(spec.train * len));
    const std::int64_t m2 = floor_to_midnight(
        s.start_epoch + static_cast<std::int64_t>((spec.train + spec.validation) * len));
    const std::int64_t i1 = m1 - s.start_epoch;
    const std::int64_t i2 = m2 - s.start_epoch;
    if (i1 < 2 * kSecondsPerDay)
        throw InsufficientDataError("insufficient data: training split spans less than 2 days");
    if (i2 - i1 < kSecondsPerDay)
        throw InsufficientDataError("insufficient data: validation split spans less than 1 day");
    if (static_cast<std::int64_t>(s.size()) - i2 < kSecondsPerDay)
        throw InsufficientDataError("insufficient data: test split spans less than 1 day");
    return {static_cast<std::size_t>(i1), static_cast<std::size_t>(i2)};
}

namespace detail {

inline FrequencySeries copy_range(const FrequencySeries& s, std::size_t lo, std::size_t hi) {
    FrequencySeries out;
    out.start_epoch = s.epoch_at(lo);
    out.nominal_hz = s.nominal_hz;
    out.values.assign(s.values.begin() + lo, s.values.begin() + hi);
    out.gap_mask.assign(s.gap_mask.begin() + lo, s.gap_mask.begin() + hi);
    return out;
}

}  // namespace detail

/// Three contiguous series in time order, boundaries snapped to midnight.
inline std::array<FrequencySeries, 3> chronological_split(const FrequencySeries& s,
                                                          const SplitSpec& spec) {
    const SplitIndices idx = chronological_split_indices(s, spec);
    return {detail::copy_range(s, 0, idx.train_end),
            detail::copy_range(s, idx.train_end, idx.validation_end),
            detail::copy_range(s, idx.validation_end, s.size())};
}

enum class AdaptiveScope { per_hour, global };

struct EvalOptions {
    SplitSpec split{};
    int k_max = 50;  ///< candidates are 1..min(k_max, bucket size)
    AdaptiveScope scope = AdaptiveScope::per_hour;
    int threads = 1;
};

/// Extended-predictor configuration: raw feature plus distance weight.
struct FeatureConfig {
    RawFeatureSeries raw;
    double beta = 0.0;
    FeatureAlignment alignment = FeatureAlignment::forecast_hour;
};

struct PredictorCurves {
    std::string id;
    std::vector<double> rmse_per_dt;      ///< 3600 entries, NaN where undefined
    std::vector<double> rmse_per_minute;  ///< 60 entries, pooled within each minute
    double overall_rmse = 0.0;            ///< pooled over every valid pair
};

struct EvaluationReport {
    std::vector<PredictorCurves> predictors;
    std::size_t forecast_count = 0;
    std::size_t skipped_queries = 0;       ///< gapped window / missing feature / empty bucket
    std::size_t leakage_violations = 0;    ///< selected neighbours at or past the query's split
    std::vector<std::int64_t> pairs_per_dt;  ///< valid (forecast, truth) pairs per offset
    std::size_t feature_clipped = 0;       ///< scaled feature samples clipped outside [0,1]
};

/// RMSE per forecast offset over a set of (prediction, truth) trajectories;
/// offsets with a gapped truth are excluded pairwise.
inline std::vector<double> rmse_per_dt(std::span<const ForecastTrajectory> forecasts,
                                       std::span<const std::span<const double>> truths,
                                       std::span<const std::span<const std::uint8_t>> truth_gaps) {
    if (forecasts.empty()) throw InsufficientDataError("rmse_per_dt: no forecasts");
    if (forecasts.size() != truths.size())
        throw ShapeError("rmse_per_dt: forecast/truth count mismatch");
    std::vector<double> acc(kPatternLength, 0.0);
    std::vector<std::int64_t> count(kPatternLength, 0);
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const auto& pred = forecasts[i].values;
        const auto truth = truths[i];
        const auto gaps = truth_gaps.empty() ? std::span<const std::uint8_t>() : truth_gaps[i];
        for (std::size_t t = 0; t < kPatternLength; ++t) {
            if (!gaps.empty() && gaps[t] != 0) continue;
            const double e = pred[t] - truth[t];
            acc[t] += e * e;
            ++count[t];
        }
    }
    std::vector<double> out(kPatternLength, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < kPatternLength; ++t)
        if (count[t] > 0) out[t] = std::sqrt(acc[t] / static_cast<double>(count[t]));
    return out;
}

namespace detail {

struct EvalQuery {
    Pattern query;
    std::span<const double> truth;
    std::span<const std::uint8_t> truth_gaps;
};

/// Usable forecast hours inside [seg_begin, seg_end): hour-aligned, preceding
/// hour inside the series and gap-free, truth hour fully inside the segment.
/// Queries whose hour bucket is empty, or (with a feature) without a gap-free
/// feature window, are skipped and counted.
inline std::vector<EvalQuery> collect_queries(const FrequencySeries& s, const GapIndex& gaps,
                                              const PatternLibrary& library,
                                              std::int64_t seg_begin, std::int64_t seg_end,
                                              const FeatureSeries* feature,
                                              FeatureAlignment alignment,
                                              std::size_t& skipped) {
    std::vector<EvalQuery> out;
    std::int64_t first = std::max(seg_begin, s.start_epoch + kSecondsPerHour);
    first = floor_div(first + kSecondsPerHour - 1, kSecondsPerHour) * kSecondsPerHour;
    for (std::int64_t h = first; h + kSecondsPerHour <= seg_end; h += kSecondsPerHour) {
        const auto w = static_cast<std::size_t>(h - kSecondsPerHour - s.start_epoch);
        const auto tr = w + kPatternLength;
        if (gaps.any(w, w + kPatternLength)) {
            ++skipped;
            continue;
        }
        const int hour = static_cast<int>(pos_mod(h, kSecondsPerDay) / kSecondsPerHour);
        if (library.bucket(hour).empty()) {
            ++skipped;
            continue;
        }
        if (feature && !feature_window(*feature, h, alignment)) {
            ++skipped;
            continue;
        }
        EvalQuery q;
        q.query.hour_of_day = hour;
        q.query.day_index = floor_div(h, kSecondsPerDay);
        q.query.window_start_epoch = h - kSecondsPerHour;
        q.query.window = std::span<const double>(s.values.data() + w, kPatternLength);
        q.truth = std::span<const double>(s.values.data() + tr, kPatternLength);
        q.truth_gaps = std::span<const std::uint8_t>(s.gap_mask.data() + tr, kPatternLength);
        out.push_back(q);
    }
    return out;
}

inline std::vector<ValidationQuery> to_validation(std::span<const EvalQuery> qs) {
    std::vector<ValidationQuery> out;
    out.reserve(qs.size());
    for (const auto& q : qs) out.push_back({q.query, q.truth, q.truth_gaps});
    return out;
}

inline std::vector<int> k_candidate_range(int k_max, std::size_t bucket_size) {
    const int hi = std::max(1, std::min<int>(k_max, static_cast<int>(bucket_size)));
    std::vector<int> c(static_cast<std::size_t>(hi));
    for (int i = 0; i < hi; ++i) c[static_cast<std::size_t>(i)] = i + 1;
    return c;
}

/// Counts selected neighbours whose pattern reaches the query's split (or
/// later): pattern end epoch must stay at or before split_begin.
inline std::size_t leakage_count(const NeighbourSet& nb, const std::vector<Pattern>& bucket,
                                 std::int64_t split_begin) {
    std::size_t bad = 0;
    for (const std::size_t idx : nb.indices) {
        const std::int64_t pattern_end =
            bucket[idx].forecast_start_epoch() + kSecondsPerHour;
        if (pattern_end > split_begin) ++bad;
    }
    return bad;
}

struct RangeSpec {
    std::size_t lib_begin = 0, lib_end = 0;   ///< library sample range
    std::int64_t fit_begin = 0, fit_end = 0;  ///< adaptive-k fit segment (epochs)
    std::int64_t eval_begin = 0, eval_end = 0;  ///< scored segment (epochs)
    bool extended_only = false;  ///< score only the extended predictor
};

/// Shared engine behind evaluate / training_size_sweep / beta_grid_search.
inline EvaluationReport evaluate_range(const FrequencySeries& s, const RangeSpec& range,
                                       const EvalOptions& opts, const FeatureConfig* fc) {
    if (opts.k_max < 1) throw ConfigError("k_max must be >= 1");
    const PatternLibrary library = build_library(s, range.lib_begin, range.lib_end);
    const GapIndex gaps(s);

    std::optional<FeatureSeries> feature;
    EvaluationReport report;
    if (fc) {
        const std::int64_t train_end_epoch = s.epoch_at(range.lib_begin) +
                                             static_cast<std::int64_t>(range.lib_end -
                                                                       range.lib_begin);
        const std::int64_t train_span = train_end_epoch - fc->raw.start_epoch;
        const std::size_t train_samples =
            train_span <= 0 ? 0
                            : std::min<std::size_t>(fc->raw.size(),
                                                    static_cast<std::size_t>(
                                                        train_span / fc->raw.lambda_s));
        feature = minmax_scale(fc->raw, train_samples);
        report.feature_clipped = feature->clipped_count;
    }
    const FeatureSeries* feat = feature ? &*feature : nullptr;
    const FeatureAlignment align = fc ? fc->alignment : FeatureAlignment::forecast_hour;

    std::vector<EvalQuery> fit_queries = collect_queries(
        s, gaps, library, range.fit_begin, range.fit_end, feat, align, report.skipped_queries);
    const bool same_segment =
        range.fit_begin == range.eval_begin && range.fit_end == range.eval_end;
    std::vector<EvalQuery> eval_storage;
    if (!same_segment)
        eval_storage = collect_queries(s, gaps, library, range.eval_begin, range.eval_end, feat,
                                       align, report.skipped_queries);
    const std::vector<EvalQuery>& eval_queries = same_segment ? fit_queries : eval_storage;
    if (fit_queries.empty())
        throw InsufficientDataError("no usable validation hours for adaptive k");
    if (eval_queries.empty()) throw InsufficientDataError("no usable forecast hours to score");

    const std::vector<ValidationQuery> fit_val = to_validation(fit_queries);

    // Adaptive-k vectors, per hour-of-day with a global fallback.
    std::array<std::optional<AdaptiveK>, 24> ak_plain, ak_ext;
    std::optional<AdaptiveK> global_plain, global_ext;
    const auto global_candidates = [&] {
        std::size_t biggest = 0;
        for (int h = 0; h < 24; ++h) biggest = std::max(biggest, library.bucket(h).size());
        return k_candidate_range(opts.k_max, biggest);
    }();
    std::array<std::vector<ValidationQuery>, 24> fit_by_hour;
    for (const auto& q : fit_val)
        fit_by_hour[static_cast<std::size_t>(q.query.hour_of_day)].push_back(q);

    const bool want_plain = !range.extended_only;
    const auto fit_for_hour = [&](int hour, bool extended) -> const AdaptiveK& {
        auto& slot = extended ? ak_ext[static_cast<std::size_t>(hour)]
                              : ak_plain[static_cast<std::size_t>(hour)];
        if (slot) return *slot;
        const auto& hq = fit_by_hour[static_cast<std::size_t>(hour)];
        if (opts.scope == AdaptiveScope::per_hour && !hq.empty()) {
            const auto cands = k_candidate_range(opts.k_max, library.bucket(hour).size());
            slot = extended
                       ? fit_adaptive_k_extended(library, *feat, align, fc->beta, hq, cands,
                                                 opts.threads)
                             .adaptive
                       : fit_adaptive_k(library, hq, cands, opts.threads).adaptive;
            return *slot;
        }
        auto& global = extended ? global_ext : global_plain;
        if (!global)
            global = extended ? fit_adaptive_k_extended(library, *feat, align, fc->beta, fit_val,
                                                        global_candidates, opts.threads)
                                    .adaptive
                              : fit_adaptive_k(library, fit_val, global_candidates, opts.threads)
                                    .adaptive;
        slot = *global;
        return *slot;
    };
    // Fit every needed hour up front (each fit is internally parallel); the
    // scoring loop below then only reads these tables.
    {
        std::array<bool, 24> needed{};
        for (const auto& q : eval_queries) needed[static_cast<std::size_t>(q.query.hour_of_day)] = true;
        for (int h = 0; h < 24; ++h) {
            if (!needed[static_cast<std::size_t>(h)]) continue;
            if (want_plain) fit_for_hour(h, false);
            if (fc) fit_for_hour(h, true);
        }
    }

    // Leakage audit over the adaptive fit queries (their split starts at
    // fit_begin).
    for (const auto& q : fit_queries) {
        const auto& cands = opts.scope == AdaptiveScope::per_hour
                                ? k_candidate_range(opts.k_max,
                                                    library.bucket(q.query.hour_of_day).size())
                                : global_candidates;
        const auto k_max = static_cast<std::size_t>(cands.back());
        const NeighbourSet nb = find_neighbours(library, q.query, k_max, q.query.day_index);
        report.leakage_violations +=
            leakage_count(nb, library.bucket(q.query.hour_of_day), range.fit_begin);
    }

    // Predictor set: constant, daily profile, wnn, and optionally extended.
    std::vector<std::string> ids;
    if (want_plain) ids = {"constant", "daily_profile", "wnn"};
    if (fc) ids.emplace_back("wnn_extended");
    const std::size_t n_pred = ids.size();
    const std::size_t nq = eval_queries.size();

    struct QuerySlab {
        std::vector<double> err_sq;  // n_pred * 3600; NaN at gapped offsets
        std::size_t leaked = 0;
        bool used = false;
    };
    std::vector<QuerySlab> slabs(nq);
    for (auto& sl : slabs) sl.err_sq.assign(n_pred * kPatternLength, 0.0);

    parallel_for(nq, opts.threads, [&](std::size_t qi) {
        const EvalQuery& q = eval_queries[qi];
        QuerySlab& slab = slabs[qi];
        const int hour = q.query.hour_of_day;
        const auto& bucket = library.bucket(hour);
        try {
            std::vector<ForecastTrajectory> preds;
            preds.reserve(n_pred);
            std::size_t k_used_max = 0;
            if (want_plain) {
                preds.push_back(predict_constant(s.nominal_hz, q.query.forecast_start_epoch()));
                preds.push_back(
                    predict_daily_profile(library, hour, q.query.forecast_start_epoch()));
                const AdaptiveK& ak = *ak_plain[static_cast<std::size_t>(hour)];
                preds.push_back(predict_wnn(library, q.query, ak));
                k_used_max = static_cast<std::size_t>(
                    *std::max_element(ak.k_per_dt.begin(), ak.k_per_dt.end()));
            }
            if (fc) {
                const AdaptiveK& ak = *ak_ext[static_cast<std::size_t>(hour)];
                const auto qf = feature_window(*feat, q.query.forecast_start_epoch(), align);
                preds.push_back(
                    predict_wnn_extended(library, *feat, q.query, *qf, fc->beta, ak));
                const auto k_ext = static_cast<std::size_t>(
                    *std::max_element(ak.k_per_dt.begin(), ak.k_per_dt.end()));
                const NeighbourSet nb_ext = find_neighbours_extended(library, *feat, q.query, *qf,
                                                                     fc->beta, k_ext);
                slab.leaked += leakage_count(nb_ext, bucket, range.eval_begin);
            }
            if (want_plain && k_used_max > 0) {
                const NeighbourSet nb =
                    find_neighbours(library, q.query, k_used_max, q.query.day_index);
                slab.leaked += leakage_count(nb, bucket, range.eval_begin);
            }
            for (std::size_t p = 0; p < n_pred; ++p) {
                double* row = slab.err_sq.data() + p * kPatternLength;
                for (std::size_t t = 0; t < kPatternLength; ++t) {
                    if (q.truth_gaps[t] != 0) {
                        row[t] = std::numeric_limits<double>::quiet_NaN();
                        continue;
                    }
                    const double e = preds[p].values[t] - q.truth[t];
                    row[t] = e * e;
                }
            }
            slab.used = true;
        } catch (const NoCandidatesError&) {
            slab.used = false;  // counted as skipped below
        }
    });

    // Ordered reduction: identical totals for any thread count.
    std::vector<double> acc(n_pred * kPatternLength, 0.0);
    std::vector<std::int64_t> count(kPatternLength, 0);
    for (std::size_t qi = 0; qi < nq; ++qi) {
        const QuerySlab& slab = slabs[qi];
        if (!slab.used) {
            ++report.skipped_queries;
            continue;
        }
        ++report.forecast_count;
        report.leakage_violations += slab.leaked;
        for (std::size_t t = 0; t < kPatternLength; ++t) {
            if (std::isnan(slab.err_sq[t])) continue;
            ++count[t];
            for (std::size_t p = 0; p < n_pred; ++p)
                acc[p * kPatternLength + t] += slab.err_sq[p * kPatternLength + t];
        }
    }
    if (report.forecast_count == 0)
        throw InsufficientDataError("every candidate forecast hour was skipped");

    report.pairs_per_dt.assign(count.begin(), count.end());
    for (std::size_t p = 0; p < n_pred; ++p) {
        PredictorCurves pc;
        pc.id = ids[p];
        pc.rmse_per_dt.assign(kPatternLength, std::numeric_limits<double>::quiet_NaN());
        double total = 0.0;
        std::int64_t total_n = 0;
        for (std::size_t t = 0; t < kPatternLength; ++t) {
            if (count[t] > 0)
                pc.rmse_per_dt[t] =
                    std::sqrt(acc[p * kPatternLength + t] / static_cast<double>(count[t]));
            total += acc[p * kPatternLength + t];
            total_n += count[t];
        }
        pc.rmse_per_minute.assign(60, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t m = 0; m < 60; ++m) {
            double a = 0.0;
            std::int64_t c = 0;
            for (std::size_t t = m * 60; t < (m + 1) * 60; ++t) {
                a += acc[p * kPatternLength + t];
                c += count[t];
            }
            if (c > 0) pc.rmse_per_minute[m] = std::sqrt(a / static_cast<double>(c));
        }
        pc.overall_rmse = total_n > 0 ? std::sqrt(total / static_cast<double>(total_n)) : 0.0;
        report.predictors.push_back(std::move(pc));
    }
    return report;
}

}  // namespace detail

/// Full chronological backtest: patterns from the training split, adaptive-k
/// from the validation split, scores from the test split.
inline EvaluationReport evaluate(const FrequencySeries& s, const EvalOptions& opts,
                                 const FeatureConfig* feature = nullptr) {
    const SplitIndices idx = chronological_split_indices(s, opts.split);
    detail::RangeSpec range;
    range.lib_begin = 0;
    range.lib_end = idx.train_end;
    range.fit_begin = s.epoch_at(idx.train_end);
    range.fit_end = s.epoch_at(idx.validation_end);
    range.eval_begin = s.epoch_at(idx.validation_end);
    range.eval_end = s.end_epoch();
    return detail::evaluate_range(s, range, opts, feature);
}

struct SweepRow {
    int interval_days = 0;
    std::string predictor;
    double mean_rmse = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> notes;  ///< one line per skipped interval
    std::size_t leakage_violations = 0;
};

/// Validation RMSE as a function of history length: for each interval the
/// most recent window of that length is split 80/20 (train/validation,
/// midnight-snapped) and the validation RMSE of each predictor is reported.
/// Short windows leave only one or two validation hours per clock-hour
/// bucket, so the sweep always fits one global adaptive-k vector per
/// interval.
inline SweepResult training_size_sweep(const FrequencySeries& s,
                                       std::span<const int> intervals_days,
                                       const EvalOptions& options) {
    EvalOptions opts = options;
    opts.scope = AdaptiveScope::global;
    SweepResult result;
    for (const int days : intervals_days) {
        if (static_cast<std::int64_t>(days) * kSecondsPerDay >
            static_cast<std::int64_t>(s.size()))
            throw ConfigError("sweep interval of " + std::to_string(days) +
                              " days exceeds the series span");
    }
    for (const int days : intervals_days) {
        if (days < 2) {
            result.notes.push_back("interval " + std::to_string(days) +
                                   " d skipped: shorter than 2 days");
            continue;
        }
        const auto window_len =
            static_cast<std::size_t>(static_cast<std::int64_t>(days) * kSecondsPerDay);
        const std::size_t w_begin = s.size() - window_len;
        const std::int64_t w_begin_epoch = s.epoch_at(w_begin);
        const std::int64_t boundary = floor_to_midnight(
            w_begin_epoch + static_cast<std::int64_t>(0.8 * static_cast<double>(window_len)));
        const std::int64_t train_span = boundary - w_begin_epoch;
        const std::int64_t val_span = s.end_epoch() - boundary;
        if (train_span < 2 * kSecondsPerDay || val_span < kSecondsPerDay) {
            result.notes.push_back("interval " + std::to_string(days) +
                                   " d skipped: 80/20 split leaves too little data");
            continue;
        }
        detail::RangeSpec range;
        range.lib_begin = w_begin;
        range.lib_end = static_cast<std::size_t>(boundary - s.start_epoch);
        range.fit_begin = boundary;
        range.fit_end = s.end_epoch();
        range.eval_begin = boundary;
        range.eval_end = s.end_epoch();
        const EvaluationReport rep = detail::evaluate_range(s, range, opts, nullptr);
        result.leakage_violations += rep.leakage_violations;
        for (const auto& pc : rep.predictors)
            result.rows.push_back({days, pc.id, pc.overall_rmse});
    }
    return result;
}

/// The paper-style grid 0.1, 0.2, ..., 1.5.
inline std::vector<double> default_beta_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 15; ++i) g.push_back(static_cast<double>(i) / 10.0);
    return g;
}

struct BetaGridResult {
    double best_beta = 0.0;
    std::vector<std::pair<double, double>> curve;  ///< (beta, extended WNN validation RMSE)
    double plain_wnn_rmse = 0.0;  ///< same protocol, no feature
    std::size_t leakage_violations = 0;
};

/// Grid search for the feature weight: each beta is scored by the extended
/// predictor's validation RMSE (adaptive-k refit per beta); ties go to the
/// smaller beta.
inline BetaGridResult beta_grid_search(const FrequencySeries& s, const RawFeatureSeries& raw,
                                       std::span<const double> beta_grid, const EvalOptions& opts,
                                       FeatureAlignment alignment = FeatureAlignment::forecast_hour) {
    if (beta_grid.empty()) throw ConfigError("beta grid must not be empty");
    const SplitIndices idx = chronological_split_indices(s, opts.split);
    detail::RangeSpec range;
    range.lib_begin = 0;
    range.lib_end = idx.train_end;
    range.fit_begin = s.epoch_at(idx.train_end);
    range.fit_end = s.epoch_at(idx.validation_end);
    range.eval_begin = range.fit_begin;
    range.eval_end = range.fit_end;

    BetaGridResult out;
    {
        const EvaluationReport plain = detail::evaluate_range(s, range, opts, nullptr);
        out.leakage_violations += plain.leakage_violations;
        for (const auto& pc : plain.predictors)
            if (pc.id == "wnn") out.plain_wnn_rmse = pc.overall_rmse;
    }
    detail::RangeSpec ext_range = range;
    ext_range.extended_only = true;
    for (const double beta : beta_grid) {
        FeatureConfig fc{raw, beta, alignment};
        const EvaluationReport rep = detail::evaluate_range(s, ext_range, opts, &fc);
        out.leakage_violations += rep.leakage_violations;
        double rmse = std::numeric_limits<double>::quiet_NaN();
        for (const auto& pc : rep.predictors)
            if (pc.id == "wnn_extended") rmse = pc.overall_rmse;
        out.curve.emplace_back(beta, rmse);
    }
    out.best_beta = out.curve.front().first;
    double best = out.curve.front().second;
    for (const auto& [b, r] : out.curve) {
        if (r < best) {  // strict: ties keep the smaller (earlier) beta
            best = r;
            out.best_beta = b;
        }
    }
    return out;
}

}  // namespace gridfreq
