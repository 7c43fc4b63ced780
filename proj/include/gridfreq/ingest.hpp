#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gridfreq/csv.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/series.hpp"

namespace gridfreq {

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t gaps_inserted = 0;     ///< gap positions in the produced series
    std::size_t outliers_masked = 0;   ///< filled by mask_outliers
    std::size_t duplicates_dropped = 0;
};

/// Raw (unscaled) exogenous series on a regular lambda-second grid.
struct RawFeatureSeries {
    std::int64_t start_epoch = 0;
    std::int64_t lambda_s = 0;  ///< resolution; must divide 3600
    std::vector<double> values;
    std::vector<std::uint8_t> gap_mask;

    std::size_t size() const { return values.size(); }
    bool is_gap(std::size_t i) const { return gap_mask[i] != 0; }
    std::int64_t epoch_at(std::size_t i) const {
        return start_epoch + static_cast<std::int64_t>(i) * lambda_s;
    }
};

namespace detail {

struct RawRow {
    std::int64_t ts;
    double value;
    bool valid;
};

/// Shared row reader for both CSV shapes (`timestamp,frequency_hz` and
/// `timestamp,value`). The header line is optional; rows must be sorted
/// non-decreasing; for duplicate timestamps the first row wins.
inline std::pair<std::vector<RawRow>, IngestReport> read_rows(std::istream& in) {
    std::vector<RawRow> rows;
    IngestReport report;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto fields = split_fields(sv);
        if (first_content) {
            first_content = false;
            // Header detection: first field not parsable as a timestamp.
            try {
                (void)parse_timestamp(fields[0]);
            } catch (const FormatError&) {
                continue;
            }
        }
        if (fields.size() < 2)
            throw FormatError("line " + std::to_string(lineno) + ": expected two columns");
        std::int64_t ts;
        try {
            ts = parse_timestamp(fields[0]);
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
        ++report.rows_read;
        if (!rows.empty()) {
            if (ts < rows.back().ts)
                throw OrderingError("line " + std::to_string(lineno) +
                                    ": timestamps must be non-decreasing");
            if (ts == rows.back().ts) {
                ++report.duplicates_dropped;
                continue;
            }
        }
        double v = 0.0;
        const bool valid = parse_sample(fields[1], v);
        rows.push_back({ts, v, valid});
    }
    if (rows.empty()) throw EmptyInputError("no parsable rows in input");
    return {std::move(rows), report};
}

}  // namespace detail

/// Parses `timestamp,frequency_hz` rows onto the 1 s grid spanning
/// [first, last] timestamp. Absent seconds and unparsable values become gaps.
inline std::pair<FrequencySeries, IngestReport> parse_frequency_csv(std::istream& in,
                                                                    double nominal_hz = 50.0) {
    auto [rows, report] = detail::read_rows(in);
    FrequencySeries s;
    s.start_epoch = rows.front().ts;
    s.nominal_hz = nominal_hz;
    const std::int64_t n = rows.back().ts - rows.front().ts + 1;
    s.values.assign(static_cast<std::size_t>(n), 0.0);
    s.gap_mask.assign(static_cast<std::size_t>(n), 1);
    for (const auto& r : rows) {
        const auto i = static_cast<std::size_t>(r.ts - s.start_epoch);
        if (r.valid) {
            s.values[i] = r.value;
            s.gap_mask[i] = 0;
        }
    }
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.is_gap(i)) ++report.gaps_inserted;
    return {std::move(s), report};
}

/// Parses `timestamp,value` rows at a regular resolution lambda inferred as
/// the GCD of the timestamp deltas. lambda must divide 3600 and the grid must
/// be phase-aligned with clock hours, otherwise hour windows could never
/// match frequency patterns.
inline std::pair<RawFeatureSeries, IngestReport> parse_feature_csv(std::istream& in) {
    auto [rows, report] = detail::read_rows(in);
    if (rows.size() < 2)
        throw InsufficientDataError("feature input needs at least two rows to fix the resolution");
    std::int64_t lambda = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        lambda = std::gcd(lambda, rows[i].ts - rows[i - 1].ts);
    if (lambda <= 0) throw FormatError("could not infer a feature resolution");
    if (kSecondsPerHour % lambda != 0)
        throw FormatError("feature resolution " + std::to_string(lambda) +
                          " s does not divide 3600 s");
    if (pos_mod(rows.front().ts, lambda) != 0)
        throw FormatError("feature timestamps are not aligned to their own grid");

    RawFeatureSeries f;
    f.start_epoch = rows.front().ts;
    f.lambda_s = lambda;
    const std::int64_t n = (rows.back().ts - rows.front().ts) / lambda + 1;
    f.values.assign(static_cast<std::size_t>(n), 0.0);
    f.gap_mask.assign(static_cast<std::size_t>(n), 1);
    for (const auto& r : rows) {
        const auto i = static_cast<std::size_t>((r.ts - f.start_epoch) / lambda);
        if (r.valid) {
            f.values[i] = r.value;
            f.gap_mask[i] = 0;
        }
    }
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.is_gap(i)) ++report.gaps_inserted;
    return {std::move(f), report};
}

/// Masks every sample with |f - nominal| above the threshold. Never unmasks a
/// gap and never changes a retained value.
inline std::pair<FrequencySeries, std::size_t> mask_outliers(const FrequencySeries& in,
                                                             double max_abs_deviation_hz) {
    if (!(max_abs_deviation_hz > 0.0))
        throw ConfigError("outlier threshold must be positive");
    FrequencySeries out = in;
    std::size_t masked = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.is_gap(i)) continue;
        if (std::abs(out.values[i] - out.nominal_hz) > max_abs_deviation_hz) {
            out.gap_mask[i] = 1;
            ++masked;
        }
    }
    return {std::move(out), masked};
}

inline void write_feature_csv(std::ostream& os, const RawFeatureSeries& f) {
    os << "timestamp,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        os << f.epoch_at(i) << ',';
        if (!f.is_gap(i)) os << format_roundtrip(f.values[i]);
        os << '\n';
    }
}

}  // namespace gridfreq
