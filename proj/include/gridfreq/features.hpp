#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridfreq/errors.hpp"
#include "gridfreq/ingest.hpp"
#include "gridfreq/pattern.hpp"
#include "gridfreq/predictor.hpp"

namespace gridfreq {

/// Which hour a feature window describes. past_hour mirrors the frequency
/// window; forecast_hour uses the actual feature values of the hour being
/// forecast (future information the paper-style setup deliberately allows).
enum class FeatureAlignment { past_hour, forecast_hour };

inline const char* to_string(FeatureAlignment a) {
    return a == FeatureAlignment::past_hour ? "past" : "forecast";
}

/// Min-max scaled exogenous series. Extrema come from the training portion
/// only; later samples falling outside [0,1] are clipped and counted.
struct FeatureSeries {
    std::int64_t start_epoch = 0;
    std::int64_t lambda_s = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> gap_mask;
    double a_min = 0.0;  ///< training minimum, original units
    double a_max = 0.0;  ///< training maximum, original units
    std::size_t clipped_count = 0;

    std::size_t size() const { return values.size(); }
    bool is_gap(std::size_t i) const { return gap_mask[i] != 0; }
    std::int64_t end_epoch() const {
        return start_epoch + static_cast<std::int64_t>(size()) * lambda_s;
    }
    /// Samples per hour window (eta); lambda divides 3600 by construction.
    std::size_t window_length() const {
        return static_cast<std::size_t>(kSecondsPerHour / lambda_s);
    }
};

struct FeaturePattern {
    std::span<const double> window;  ///< eta samples
    FeatureAlignment alignment = FeatureAlignment::forecast_hour;
};

/// a = (a_origin - a_min)/(a_max - a_min), extrema over the first
/// train_samples entries (everything when train_samples >= size). Values
/// outside [0,1] are clipped and counted. A constant training portion has no
/// scale and is rejected.
inline FeatureSeries minmax_scale(const RawFeatureSeries& raw,
                                  std::size_t train_samples = std::size_t(-1)) {
    if (raw.lambda_s <= 0 || kSecondsPerHour % raw.lambda_s != 0)
        throw ConfigError("feature resolution must divide 3600 s");
    const std::size_t limit = std::min(train_samples, raw.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t seen = 0;
    for (std::size_t i = 0; i < limit; ++i) {
        if (raw.is_gap(i)) continue;
        lo = std::min(lo, raw.values[i]);
        hi = std::max(hi, raw.values[i]);
        ++seen;
    }
    if (seen < 2 || !(hi > lo))
        throw DegenerateSeriesError("min-max scaling needs two distinct training values");

    FeatureSeries out;
    out.start_epoch = raw.start_epoch;
    out.lambda_s = raw.lambda_s;
    out.a_min = lo;
    out.a_max = hi;
    out.gap_mask = raw.gap_mask;
    out.values.assign(raw.size(), 0.0);
    const double span = hi - lo;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw.is_gap(i)) continue;
        double v = (raw.values[i] - lo) / span;
        if (v < 0.0 || v > 1.0) {
            v = std::clamp(v, 0.0, 1.0);
            ++out.clipped_count;
        }
        out.values[i] = v;
    }
    return out;
}

/// Block-averages a finer regular series onto target_lambda. A block with any
/// gap becomes a gap; no values are invented.
inline RawFeatureSeries block_average(const RawFeatureSeries& raw, std::int64_t target_lambda_s) {
    if (target_lambda_s <= 0 || kSecondsPerHour % target_lambda_s != 0)
        throw ConfigError("target feature resolution must divide 3600 s");
    if (target_lambda_s % raw.lambda_s != 0)
        throw ConfigError("target resolution must be a multiple of the native resolution");
    const auto factor = static_cast<std::size_t>(target_lambda_s / raw.lambda_s);
    if (factor == 1) return raw;
    if (pos_mod(raw.start_epoch, target_lambda_s) != 0)
        throw ConfigError("feature start is not aligned to the target resolution");
    RawFeatureSeries out;
    out.start_epoch = raw.start_epoch;
    out.lambda_s = target_lambda_s;
    const std::size_t n = raw.size() / factor;
    out.values.assign(n, 0.0);
    out.gap_mask.assign(n, 0);
    for (std::size_t b = 0; b < n; ++b) {
        double sum = 0.0;
        bool gap = false;
        for (std::size_t j = 0; j < factor; ++j) {
            const std::size_t i = b * factor + j;
            if (raw.is_gap(i)) {
                gap = true;
                break;
            }
            sum += raw.values[i];
        }
        if (gap)
            out.gap_mask[b] = 1;
        else
            out.values[b] = sum / static_cast<double>(factor);
    }
    return out;
}

/// The eta-sample window for the hour starting at forecast_hour_start
/// (forecast_hour alignment) or the hour before it (past_hour). Returns
/// nullopt when the window leaves the series or touches a gap.
inline std::optional<FeaturePattern> feature_window(const FeatureSeries& f,
                                                    std::int64_t forecast_hour_start,
                                                    FeatureAlignment alignment) {
    const std::int64_t hour_start = alignment == FeatureAlignment::forecast_hour
                                        ? forecast_hour_start
                                        : forecast_hour_start - kSecondsPerHour;
    if (pos_mod(hour_start, f.lambda_s) != 0) return std::nullopt;
    const std::int64_t first = hour_start - f.start_epoch;
    if (first < 0 || first % f.lambda_s != 0) return std::nullopt;
    const auto begin = static_cast<std::size_t>(first / f.lambda_s);
    const std::size_t eta = f.window_length();
    if (begin + eta > f.size()) return std::nullopt;
    for (std::size_t i = begin; i < begin + eta; ++i)
        if (f.is_gap(i)) return std::nullopt;
    return FeaturePattern{std::span<const double>(f.values.data() + begin, eta), alignment};
}

/// d = ||F_n - F_0|| + beta * ||A_n - A_0||.
inline double extended_distance(std::span<const double> freq_query,
                                std::span<const double> freq_candidate,
                                const FeaturePattern& feat_query,
                                const FeaturePattern& feat_candidate, double beta) {
    if (beta < 0.0) throw ConfigError("beta must be >= 0");
    if (feat_query.alignment != feat_candidate.alignment)
        throw ConfigError("feature windows use different alignments");
    return pattern_distance(freq_query, freq_candidate) +
           beta * pattern_distance(feat_query.window, feat_candidate.window);
}

namespace detail {

/// Candidates of the query's hour bucket ranked by the extended distance.
/// Bucket entries without a gap-free feature window are excluded.
inline std::vector<RankedCandidate> extended_candidates(const PatternLibrary& library,
                                                        const FeatureSeries& feature,
                                                        const Pattern& query,
                                                        const FeaturePattern& query_feature,
                                                        double beta) {
    const auto& bucket = library.bucket(query.hour_of_day);
    std::vector<RankedCandidate> cands;
    cands.reserve(bucket.size());
    for (std::size_t i = 0; i < bucket.size(); ++i) {
        const Pattern& p = bucket[i];
        if (p.day_index == query.day_index) continue;
        const auto fw = feature_window(feature, p.forecast_start_epoch(), query_feature.alignment);
        if (!fw) continue;
        cands.push_back(
            {extended_distance(query.window, p.window, query_feature, *fw, beta), p.day_index, i});
    }
    return cands;
}

}  // namespace detail

/// find_neighbours under the beta-weighted extended distance.
inline NeighbourSet find_neighbours_extended(const PatternLibrary& library,
                                             const FeatureSeries& feature, const Pattern& query,
                                             const FeaturePattern& query_feature, double beta,
                                             std::size_t k) {
    if (k < 1) throw ConfigError("find_neighbours_extended: k must be >= 1");
    auto cands = detail::extended_candidates(library, feature, query, query_feature, beta);
    if (cands.empty())
        throw NoCandidatesError("no candidate pattern has a matching feature window");
    return detail::select_neighbours(cands, k);
}

/// predict_wnn with the extended distance: same weighting and averaging, the
/// ranking and alpha weights just come from d(G) instead of d(F).
inline ForecastTrajectory predict_wnn_extended(const PatternLibrary& library,
                                               const FeatureSeries& feature, const Pattern& query,
                                               const FeaturePattern& query_feature, double beta,
                                               std::size_t k) {
    const NeighbourSet nb =
        find_neighbours_extended(library, feature, query, query_feature, beta, k);
    const std::vector<double> w = wnn_weights(nb.distances);
    ForecastTrajectory out;
    out.hour_start_epoch = query.forecast_start_epoch();
    out.predictor_id = "wnn_extended";
    out.values.resize(kPatternLength);
    detail::weighted_next_hour_average(library.bucket(query.hour_of_day), nb, w, out.values);
    return out;
}

/// fit_adaptive_k under the extended distance. Queries must all have a
/// gap-free feature window in the requested alignment.
inline AdaptiveKFit fit_adaptive_k_extended(const PatternLibrary& library,
                                            const FeatureSeries& feature,
                                            FeatureAlignment alignment, double beta,
                                            std::span<const ValidationQuery> queries,
                                            std::span<const int> k_candidates, int threads = 1) {
    return detail::fit_adaptive_k_core(
        library, queries, k_candidates, threads, [&](const ValidationQuery& vq, std::size_t k_max) {
            const auto qf = feature_window(feature, vq.query.forecast_start_epoch(), alignment);
            if (!qf) throw NoCandidatesError("validation query has no feature window");
            return find_neighbours_extended(library, feature, vq.query, *qf, beta, k_max);
        });
}

/// Adaptive-k variant of the extended predictor.
inline ForecastTrajectory predict_wnn_extended(const PatternLibrary& library,
                                               const FeatureSeries& feature, const Pattern& query,
                                               const FeaturePattern& query_feature, double beta,
                                               const AdaptiveK& adaptive) {
    if (adaptive.k_per_dt.size() != kPatternLength)
        throw ShapeError("adaptive k vector must have 3600 entries");
    const int k_max = *std::max_element(adaptive.k_per_dt.begin(), adaptive.k_per_dt.end());
    const NeighbourSet nb = find_neighbours_extended(library, feature, query, query_feature, beta,
                                                     static_cast<std::size_t>(k_max));
    const auto& bucket = library.bucket(query.hour_of_day);
    std::vector<std::vector<double>> weights_by_k(nb.size() + 1);
    std::vector<double> wsum_by_k(nb.size() + 1, 0.0);
    ForecastTrajectory out;
    out.hour_start_epoch = query.forecast_start_epoch();
    out.predictor_id = "wnn_extended_adaptive";
    out.values.assign(kPatternLength, 0.0);
    for (std::size_t t = 0; t < kPatternLength; ++t) {
        const auto k =
            std::min<std::size_t>(static_cast<std::size_t>(adaptive.k_per_dt[t]), nb.size());
        auto& w = weights_by_k[k];
        if (w.empty()) {
            w = wnn_weights(std::span<const double>(nb.distances.data(), k));
            double s = 0.0;
            for (const double x : w) s += x;
            wsum_by_k[k] = s;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) acc += w[j] * bucket[nb.indices[j]].next_hour[t];
        out.values[t] = acc / wsum_by_k[k];
    }
    return out;
}

}  // namespace gridfreq
