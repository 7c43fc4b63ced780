#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridfreq/detail/parallel.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/pattern.hpp"

namespace gridfreq {

/// One predicted hour: values[i] forecasts hour_start_epoch + i.
struct ForecastTrajectory {
    std::int64_t hour_start_epoch = 0;
    std::vector<double> values;
    std::string predictor_id;
};

/// Per-offset neighbour count, smoothed over a centered one-minute window.
struct AdaptiveK {
    std::vector<int> k_per_dt;  ///< 3600 entries, all >= 1
    int smoothing_window_s = 61;
};

struct AdaptiveKFit {
    AdaptiveK adaptive;
    std::vector<int> pre_smoothing;  ///< per-offset argmin before smoothing
};

struct ValidationQuery {
    Pattern query;                             ///< gap-free window, empty next_hour
    std::span<const double> truth;             ///< 3600 samples
    std::span<const std::uint8_t> truth_gaps;  ///< optional; empty = all valid
};

/// Triangular distance weights: w_j = (d_k - d_j)/(d_k - d_1). When all
/// distances coincide (including k = 1) the 0/0 limit is taken as uniform
/// weights. Callers normalize by the sum when averaging.
inline std::vector<double> wnn_weights(std::span<const double> distances) {
    if (distances.empty()) throw ShapeError("wnn_weights: need at least one distance");
    const std::size_t k = distances.size();
    std::vector<double> w(k, 1.0);
    const double spread = distances[k - 1] - distances[0];
    if (spread > 0.0) {
        for (std::size_t j = 0; j < k; ++j) w[j] = (distances[k - 1] - distances[j]) / spread;
    }
    return w;
}

namespace detail {

/// Weighted, sum-normalized average of the neighbours' next hours.
inline void weighted_next_hour_average(const std::vector<Pattern>& bucket,
                                       const NeighbourSet& neighbours,
                                       std::span<const double> weights,
                                       std::span<double> out) {
    double wsum = 0.0;
    for (const double w : weights) wsum += w;
    const std::size_t k = weights.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const double w = weights[j];
        const std::span<const double> next = bucket[neighbours.indices[j]].next_hour;
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * next[t];
    }
    for (std::size_t t = 0; t < out.size(); ++t) out[t] /= wsum;
}

}  // namespace detail

/// Weighted nearest-neighbour forecast with a fixed neighbour count. The
/// query's own day never enters the candidate set; when fewer than k
/// candidates exist, all of them are used.
inline ForecastTrajectory predict_wnn(const PatternLibrary& library, const Pattern& query,
                                      std::size_t k) {
    const NeighbourSet nb = find_neighbours(library, query, k, query.day_index);
    const std::vector<double> w = wnn_weights(nb.distances);
    ForecastTrajectory out;
    out.hour_start_epoch = query.forecast_start_epoch();
    out.predictor_id = "wnn";
    out.values.resize(kPatternLength);
    detail::weighted_next_hour_average(library.bucket(query.hour_of_day), nb, w, out.values);
    return out;
}

/// Adaptive-k variant: neighbours are ranked once from the full-window
/// distance; each offset averages over the prefix of size k_per_dt[t].
inline ForecastTrajectory predict_wnn(const PatternLibrary& library, const Pattern& query,
                                      const AdaptiveK& adaptive) {
    if (adaptive.k_per_dt.size() != kPatternLength)
        throw ShapeError("adaptive k vector must have 3600 entries");
    const int k_max = *std::max_element(adaptive.k_per_dt.begin(), adaptive.k_per_dt.end());
    if (k_max < 1) throw ConfigError("adaptive k entries must be >= 1");
    const NeighbourSet nb =
        find_neighbours(library, query, static_cast<std::size_t>(k_max), query.day_index);
    const auto& bucket = library.bucket(query.hour_of_day);

    // Weight vectors per distinct prefix size, built on first use.
    std::vector<std::vector<double>> weights_by_k(nb.size() + 1);
    std::vector<double> wsum_by_k(nb.size() + 1, 0.0);
    ForecastTrajectory out;
    out.hour_start_epoch = query.forecast_start_epoch();
    out.predictor_id = "wnn_adaptive";
    out.values.assign(kPatternLength, 0.0);
    for (std::size_t t = 0; t < kPatternLength; ++t) {
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(adaptive.k_per_dt[t]),
                                             nb.size());
        auto& w = weights_by_k[k];
        if (w.empty()) {
            w = wnn_weights(std::span<const double>(nb.distances.data(), k));
            double s = 0.0;
            for (const double x : w) s += x;
            wsum_by_k[k] = s;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            acc += w[j] * bucket[nb.indices[j]].next_hour[t];
        out.values[t] = acc / wsum_by_k[k];
    }
    return out;
}

/// Unweighted mean over every pattern in the hour bucket (the k = infinity
/// benchmark).
inline ForecastTrajectory predict_daily_profile(const PatternLibrary& library, int hour_of_day,
                                                std::int64_t hour_start_epoch = 0) {
    const auto& bucket = library.bucket(hour_of_day);
    if (bucket.empty()) throw NoCandidatesError("daily profile: empty hour bucket");
    ForecastTrajectory out;
    out.hour_start_epoch = hour_start_epoch;
    out.predictor_id = "daily_profile";
    out.values.assign(kPatternLength, 0.0);
    for (const Pattern& p : bucket)
        for (std::size_t t = 0; t < kPatternLength; ++t) out.values[t] += p.next_hour[t];
    const double n = static_cast<double>(bucket.size());
    for (double& v : out.values) v /= n;
    return out;
}

inline ForecastTrajectory predict_constant(double nominal_hz, std::int64_t hour_start_epoch = 0) {
    ForecastTrajectory out;
    out.hour_start_epoch = hour_start_epoch;
    out.predictor_id = "constant";
    out.values.assign(kPatternLength, nominal_hz);
    return out;
}

namespace detail {

/// Squared-error slab for one query: err_sq[k_idx * 3600 + t]. Offsets with a
/// gapped truth are marked NaN and skipped during reduction.
inline void adaptive_k_query_errors(const std::vector<Pattern>& bucket, const NeighbourSet& nb,
                                    const ValidationQuery& vq, std::span<const int> candidates,
                                    std::vector<double>& slab) {
    std::vector<double> pred(kPatternLength);
    for (std::size_t ki = 0; ki < candidates.size(); ++ki) {
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(candidates[ki]), nb.size());
        const std::vector<double> w =
            wnn_weights(std::span<const double>(nb.distances.data(), k));
        NeighbourSet prefix;
        prefix.indices.assign(nb.indices.begin(), nb.indices.begin() + static_cast<std::ptrdiff_t>(k));
        prefix.distances.assign(nb.distances.begin(),
                                nb.distances.begin() + static_cast<std::ptrdiff_t>(k));
        weighted_next_hour_average(bucket, prefix, w, pred);
        double* row = slab.data() + ki * kPatternLength;
        for (std::size_t t = 0; t < kPatternLength; ++t) {
            const bool valid = vq.truth_gaps.empty() || vq.truth_gaps[t] == 0;
            if (!valid) {
                row[t] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const double e = pred[t] - vq.truth[t];
            row[t] = e * e;
        }
    }
}

inline int nearest_candidate(double value, std::span<const int> sorted_candidates) {
    int best = sorted_candidates[0];
    double best_gap = std::abs(value - static_cast<double>(best));
    for (const int c : sorted_candidates) {
        const double gap = std::abs(value - static_cast<double>(c));
        if (gap < best_gap) {  // ties keep the smaller candidate
            best_gap = gap;
            best = c;
        }
    }
    return best;
}

/// Shared adaptive-k machinery; find_fn(query, k_max) supplies the ranking
/// (plain or extended distance). Blocks of queries run in parallel but the
/// reduction stays in query order, so results do not depend on thread count.
template <typename FindFn>
AdaptiveKFit fit_adaptive_k_core(const PatternLibrary& library,
                                 std::span<const ValidationQuery> queries,
                                 std::span<const int> k_candidates, int threads,
                                 FindFn&& find_fn) {
    if (queries.empty()) throw InsufficientDataError("adaptive k: no validation data");
    if (k_candidates.empty()) throw ConfigError("adaptive k: empty candidate list");
    std::vector<int> cands(k_candidates.begin(), k_candidates.end());
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    if (cands.front() < 1) throw ConfigError("adaptive k: candidates must be >= 1");
    const std::size_t n_k = cands.size();
    const auto k_max = static_cast<std::size_t>(cands.back());

    std::vector<double> acc(n_k * kPatternLength, 0.0);
    std::vector<std::int64_t> count(kPatternLength, 0);

    constexpr std::size_t kBlock = 16;
    std::vector<std::vector<double>> slabs(std::min(kBlock, queries.size()));
    for (auto& s : slabs) s.resize(n_k * kPatternLength);
    for (std::size_t base = 0; base < queries.size(); base += kBlock) {
        const std::size_t m = std::min(kBlock, queries.size() - base);
        parallel_for(m, threads, [&](std::size_t i) {
            const ValidationQuery& vq = queries[base + i];
            const NeighbourSet nb = find_fn(vq, k_max);
            adaptive_k_query_errors(library.bucket(vq.query.hour_of_day), nb, vq,
                                    std::span<const int>(cands), slabs[i]);
        });
        for (std::size_t i = 0; i < m; ++i) {
            const auto& slab = slabs[i];
            for (std::size_t t = 0; t < kPatternLength; ++t) {
                if (std::isnan(slab[t])) continue;  // truth gap: same for every k
                ++count[t];
                for (std::size_t ki = 0; ki < n_k; ++ki)
                    acc[ki * kPatternLength + t] += slab[ki * kPatternLength + t];
            }
        }
    }

    AdaptiveKFit fit;
    fit.pre_smoothing.resize(kPatternLength);
    for (std::size_t t = 0; t < kPatternLength; ++t) {
        std::size_t best = 0;
        for (std::size_t ki = 1; ki < n_k; ++ki) {
            if (acc[ki * kPatternLength + t] < acc[best * kPatternLength + t]) best = ki;
        }
        // Offsets with no valid truth anywhere fall back to the smallest k.
        fit.pre_smoothing[t] = count[t] > 0 ? cands[best] : cands.front();
    }

    fit.adaptive.smoothing_window_s = 61;
    fit.adaptive.k_per_dt.resize(kPatternLength);
    const std::ptrdiff_t half = 30;
    for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(kPatternLength); ++t) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, t - half);
        const std::ptrdiff_t hi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(kPatternLength) - 1, t + half);
        double sum = 0.0;
        for (std::ptrdiff_t u = lo; u <= hi; ++u)
            sum += static_cast<double>(fit.pre_smoothing[static_cast<std::size_t>(u)]);
        const double mean = sum / static_cast<double>(hi - lo + 1);
        fit.adaptive.k_per_dt[static_cast<std::size_t>(t)] =
            nearest_candidate(mean, std::span<const int>(cands));
    }
    return fit;
}

}  // namespace detail

/// Per-offset neighbour-count selection: for each offset the candidate with
/// the lowest validation MSE wins (ties to the smaller k); the resulting
/// vector is smoothed with a centered, edge-truncated 61 s moving average and
/// rounded back to the nearest candidate.
inline AdaptiveKFit fit_adaptive_k(const PatternLibrary& library,
                                   std::span<const ValidationQuery> queries,
                                   std::span<const int> k_candidates, int threads = 1) {
    return detail::fit_adaptive_k_core(
        library, queries, k_candidates, threads, [&](const ValidationQuery& vq, std::size_t k_max) {
            return find_neighbours(library, vq.query, k_max, vq.query.day_index);
        });
}

}  // namespace gridfreq
