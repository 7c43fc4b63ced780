#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gridfreq/errors.hpp"

namespace gridfreq {

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

/// floor division for signed epochs (rounds toward -inf).
inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// positive remainder in [0, b).
inline std::int64_t pos_mod(std::int64_t a, std::int64_t b) {
    return a - floor_div(a, b) * b;
}

/// Frequency record on a strict 1 s UTC grid. Missing or invalid seconds stay
/// in place and are flagged in gap_mask, so index i always means
/// start_epoch + i. All types in this header are immutable by convention once
/// built; every operation is a pure function.
struct FrequencySeries {
    std::int64_t start_epoch = 0;        ///< UTC seconds of values[0]
    std::vector<double> values;          ///< Hz
    std::vector<std::uint8_t> gap_mask;  ///< 1 = missing/invalid
    double nominal_hz = 50.0;

    std::size_t size() const { return values.size(); }
    bool is_gap(std::size_t i) const { return gap_mask[i] != 0; }
    std::int64_t epoch_at(std::size_t i) const {
        return start_epoch + static_cast<std::int64_t>(i);
    }
    std::int64_t end_epoch() const { return epoch_at(0) + static_cast<std::int64_t>(size()); }
    std::int64_t span_seconds() const { return static_cast<std::int64_t>(size()); }
    std::int64_t second_of_day(std::size_t i) const { return pos_mod(epoch_at(i), kSecondsPerDay); }
};

/// Checks the structural invariants; throws on violation.
inline void validate(const FrequencySeries& s) {
    if (s.values.empty()) throw EmptyInputError("frequency series has no samples");
    if (s.values.size() != s.gap_mask.size())
        throw ShapeError("values and gap_mask lengths differ");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!s.is_gap(i) && !std::isfinite(s.values[i]))
            throw FormatError("non-gap sample is not finite");
    }
}

struct SeriesStats {
    double mean_hz = 0.0;
    double std_hz = 0.0;       ///< population standard deviation over non-gap samples
    double gap_fraction = 0.0;
};

struct Window {
    std::span<const double> values;
    bool any_gap = false;
};

/// Contiguous view of length samples starting at start_offset.
/// Throws std::out_of_range if the window leaves the series.
inline Window slice_window(const FrequencySeries& s, std::int64_t start_offset,
                           std::int64_t length) {
    if (start_offset < 0 || length < 0 ||
        start_offset + length > static_cast<std::int64_t>(s.size()))
        throw std::out_of_range("slice_window: window outside series");
    const auto lo = static_cast<std::size_t>(start_offset);
    const auto n = static_cast<std::size_t>(length);
    bool any_gap = false;
    for (std::size_t i = lo; i < lo + n; ++i) {
        if (s.is_gap(i)) {
            any_gap = true;
            break;
        }
    }
    return {std::span<const double>(s.values.data() + lo, n), any_gap};
}

/// Mean and population std over non-gap samples; gap_fraction = gaps/length.
/// Throws EmptyInputError when every sample is a gap.
inline SeriesStats compute_stats(const FrequencySeries& s) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.is_gap(i)) {
            sum += s.values[i];
            ++n;
        }
    }
    if (n == 0) throw EmptyInputError("compute_stats: series is all gaps");
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.is_gap(i)) {
            const double d = s.values[i] - mean;
            ss += d * d;
        }
    }
    SeriesStats out;
    out.mean_hz = mean;
    out.std_hz = std::sqrt(ss / static_cast<double>(n));
    out.gap_fraction =
        static_cast<double>(s.size() - n) / static_cast<double>(s.size());
    return out;
}

/// Prefix-sum index over the gap mask; answers "any gap in [lo, hi)?" in O(1).
class GapIndex {
public:
    explicit GapIndex(const FrequencySeries& s) : prefix_(s.size() + 1, 0) {
        for (std::size_t i = 0; i < s.size(); ++i)
            prefix_[i + 1] = prefix_[i] + (s.is_gap(i) ? 1 : 0);
    }

    std::int64_t count(std::size_t lo, std::size_t hi) const {
        return prefix_[hi] - prefix_[lo];
    }
    bool any(std::size_t lo, std::size_t hi) const { return count(lo, hi) > 0; }

private:
    std::vector<std::int64_t> prefix_;
};

}  // namespace gridfreq
