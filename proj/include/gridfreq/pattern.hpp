#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gridfreq/errors.hpp"
#include "gridfreq/series.hpp"

namespace gridfreq {

/// Samples per pattern: one hour at 1 s resolution.
inline constexpr std::size_t kPatternLength = 3600;

/// One library entry: the hour preceding a forecast hour plus that forecast
/// hour itself. Spans point into the owning PatternLibrary and stay valid for
/// its lifetime. A query pattern carries an empty next_hour.
struct Pattern {
    int hour_of_day = 0;                 ///< clock hour (0-23) of the forecast hour
    std::int64_t day_index = 0;          ///< forecast hour start epoch / 86400
    std::int64_t window_start_epoch = 0; ///< forecast hour start - 3600
    std::span<const double> window;      ///< 3600 samples, gap-free
    std::span<const double> next_hour;   ///< 3600 samples; empty for queries

    std::int64_t forecast_start_epoch() const { return window_start_epoch + kSecondsPerHour; }
};

struct NeighbourSet {
    std::vector<std::size_t> indices;  ///< positions in the hour bucket
    std::vector<double> distances;     ///< matching, non-decreasing
    bool reduced_k = false;            ///< fewer candidates than requested

    std::size_t size() const { return indices.size(); }
};

/// Hour-of-day indexed pattern collection. Immutable after build; concurrent
/// read-only queries are safe.
class PatternLibrary {
public:
    const std::vector<Pattern>& bucket(int hour_of_day) const {
        return buckets_[static_cast<std::size_t>(hour_of_day)];
    }
    std::size_t total_patterns() const {
        std::size_t n = 0;
        for (const auto& b : buckets_) n += b.size();
        return n;
    }
    /// Epoch one past the last sample the library was built from.
    std::int64_t data_end_epoch() const { return data_end_epoch_; }

private:
    std::array<std::vector<Pattern>, 24> buckets_;
    std::shared_ptr<const std::vector<double>> backing_;
    std::int64_t data_end_epoch_ = 0;

    friend PatternLibrary build_library(const FrequencySeries&, std::size_t, std::size_t);
};

/// Builds the library from series samples [begin_index, end_index): for every
/// clock hour fully covered together with its preceding hour, and free of
/// gaps in both, one pattern enters the bucket of that hour. Entries in a
/// bucket are 24 h apart by construction, so they never overlap.
inline PatternLibrary build_library(const FrequencySeries& series, std::size_t begin_index,
                                    std::size_t end_index) {
    if (end_index > series.size() || begin_index > end_index)
        throw ConfigError("build_library: bad sample range");
    const std::int64_t span = static_cast<std::int64_t>(end_index - begin_index);
    if (span < 2 * kSecondsPerDay)
        throw InsufficientDataError("pattern library needs at least 2 full days of data");

    PatternLibrary lib;
    auto backing = std::make_shared<std::vector<double>>(series.values.begin() + begin_index,
                                                         series.values.begin() + end_index);
    lib.backing_ = backing;
    const std::int64_t base_epoch = series.epoch_at(begin_index);
    lib.data_end_epoch_ = base_epoch + span;

    GapIndex gaps(series);
    // First candidate forecast hour must leave room for its preceding hour.
    std::int64_t h = floor_div(base_epoch + 2 * kSecondsPerHour - 1, kSecondsPerHour) *
                     kSecondsPerHour;
    for (; h + kSecondsPerHour <= lib.data_end_epoch_; h += kSecondsPerHour) {
        const std::int64_t w = h - kSecondsPerHour - base_epoch;  // window offset in backing
        if (w < 0) continue;
        const std::size_t abs_w = begin_index + static_cast<std::size_t>(w);
        if (gaps.any(abs_w, abs_w + 2 * kPatternLength)) continue;
        Pattern p;
        p.hour_of_day = static_cast<int>(pos_mod(h, kSecondsPerDay) / kSecondsPerHour);
        p.day_index = floor_div(h, kSecondsPerDay);
        p.window_start_epoch = h - kSecondsPerHour;
        p.window = std::span<const double>(backing->data() + w, kPatternLength);
        p.next_hour = std::span<const double>(backing->data() + w + kPatternLength, kPatternLength);
        lib.buckets_[static_cast<std::size_t>(p.hour_of_day)].push_back(p);
    }
    return lib;
}

inline PatternLibrary build_library(const FrequencySeries& series) {
    return build_library(series, 0, series.size());
}

/// Euclidean distance between two equal-length sample windows. Dense, branch
/// free inner loop; four accumulators keep the FLOPs flowing on wide cores.
inline double pattern_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("pattern_distance: length mismatch");
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double d0 = a[i] - b[i];
        const double d1 = a[i + 1] - b[i + 1];
        const double d2 = a[i + 2] - b[i + 2];
        const double d3 = a[i + 3] - b[i + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
    }
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s0 += d * d;
    }
    return std::sqrt((s0 + s1) + (s2 + s3));
}

namespace detail {

struct RankedCandidate {
    double distance;
    std::int64_t day_index;
    std::size_t index;
};

/// Deterministic neighbour order: distance ascending, then more recent day,
/// then lower bucket index.
inline bool rank_less(const RankedCandidate& a, const RankedCandidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.day_index != b.day_index) return a.day_index > b.day_index;
    return a.index < b.index;
}

/// Sorts candidates and keeps the best k (all of them when fewer exist).
inline NeighbourSet select_neighbours(std::vector<RankedCandidate>& cands, std::size_t k) {
    if (cands.empty()) throw NoCandidatesError("no candidate patterns in this hour bucket");
    NeighbourSet out;
    if (cands.size() > k) {
        std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         cands.end(), rank_less);
        cands.resize(k);
    } else if (cands.size() < k) {
        out.reduced_k = true;
    }
    std::sort(cands.begin(), cands.end(), rank_less);
    out.indices.reserve(cands.size());
    out.distances.reserve(cands.size());
    for (const auto& c : cands) {
        out.indices.push_back(c.index);
        out.distances.push_back(c.distance);
    }
    return out;
}

}  // namespace detail

/// The k nearest patterns to the query within its hour bucket, excluding any
/// pattern from exclude_day. With fewer than k candidates the full sorted
/// candidate list is returned and reduced_k is set.
inline NeighbourSet find_neighbours(const PatternLibrary& library, const Pattern& query,
                                    std::size_t k,
                                    std::optional<std::int64_t> exclude_day = std::nullopt) {
    if (k < 1) throw ConfigError("find_neighbours: k must be >= 1");
    const auto& bucket = library.bucket(query.hour_of_day);
    std::vector<detail::RankedCandidate> cands;
    cands.reserve(bucket.size());
    for (std::size_t i = 0; i < bucket.size(); ++i) {
        const Pattern& p = bucket[i];
        if (exclude_day && p.day_index == *exclude_day) continue;
        cands.push_back({pattern_distance(p.window, query.window), p.day_index, i});
    }
    return detail::select_neighbours(cands, k);
}

}  // namespace gridfreq
