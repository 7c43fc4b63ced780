#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gridfreq/errors.hpp"
#include "gridfreq/series.hpp"

namespace gridfreq {

/// All report output goes through this: 9 significant digits, so identical
/// configs reproduce identical files.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Data-file serialization keeps full precision: a written series re-parses
/// to the exact same doubles.
inline std::string format_roundtrip(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t' || v.front() == '\r'))
        v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r'))
        v.remove_suffix(1);
    return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(pos)));
            break;
        }
        out.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

/// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = floor_div(y, 400);
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline bool parse_uint(std::string_view s, unsigned& out) {
    unsigned v = 0;
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}

}  // namespace detail

/// Parses a timestamp field: either integer UNIX seconds or an RFC 3339
/// date-time ("YYYY-MM-DDTHH:MM:SS" with optional "Z" / "+hh:mm" / "-hh:mm"
/// offset; a space may replace the 'T'). Sub-second timestamps are rejected,
/// not rounded.
inline std::int64_t parse_timestamp(std::string_view field) {
    field = detail::trim(field);
    if (field.empty()) throw FormatError("empty timestamp");

    // Integer UNIX seconds.
    const bool has_digit_only = [&] {
        std::size_t i = (field[0] == '-' || field[0] == '+') ? 1 : 0;
        if (i >= field.size()) return false;
        for (; i < field.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(field[i]))) return false;
        return true;
    }();
    if (has_digit_only) {
        std::int64_t v = 0;
        const auto* first = field.data() + ((field[0] == '+') ? 1 : 0);
        const auto res = std::from_chars(first, field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size())
            throw FormatError("unparsable timestamp: " + std::string(field));
        return v;
    }
    if (field.find('.') != std::string_view::npos && field.find('-') == std::string_view::npos)
        throw FormatError("sub-second timestamps are not supported: " + std::string(field));

    // RFC 3339: YYYY-MM-DD[T ]HH:MM:SS[Z|+hh:mm|-hh:mm]
    if (field.size() < 19 || field[4] != '-' || field[7] != '-' ||
        (field[10] != 'T' && field[10] != 't' && field[10] != ' ') ||
        field[13] != ':' || field[16] != ':')
        throw FormatError("unparsable timestamp: " + std::string(field));
    unsigned yy, mo, dd, hh, mi, ss;
    if (!detail::parse_uint(field.substr(0, 4), yy) ||
        !detail::parse_uint(field.substr(5, 2), mo) ||
        !detail::parse_uint(field.substr(8, 2), dd) ||
        !detail::parse_uint(field.substr(11, 2), hh) ||
        !detail::parse_uint(field.substr(14, 2), mi) ||
        !detail::parse_uint(field.substr(17, 2), ss))
        throw FormatError("unparsable timestamp: " + std::string(field));
    if (mo < 1 || mo > 12 || dd < 1 || dd > 31 || hh > 23 || mi > 59 || ss > 60)
        throw FormatError("timestamp field out of range: " + std::string(field));

    std::string_view rest = field.substr(19);
    if (!rest.empty() && rest[0] == '.')
        throw FormatError("sub-second timestamps are not supported: " + std::string(field));
    std::int64_t offset_s = 0;
    if (!rest.empty() && rest != "Z" && rest != "z") {
        if (rest.size() != 6 || (rest[0] != '+' && rest[0] != '-') || rest[3] != ':')
            throw FormatError("unparsable timestamp offset: " + std::string(field));
        unsigned oh, om;
        if (!detail::parse_uint(rest.substr(1, 2), oh) || !detail::parse_uint(rest.substr(4, 2), om))
            throw FormatError("unparsable timestamp offset: " + std::string(field));
        offset_s = static_cast<std::int64_t>(oh) * 3600 + static_cast<std::int64_t>(om) * 60;
        if (rest[0] == '-') offset_s = -offset_s;
    }
    const std::int64_t days = detail::days_from_civil(yy, mo, dd);
    return days * kSecondsPerDay + hh * 3600 + mi * 60 + ss - offset_s;
}

/// Parses a numeric sample field. Returns false for empty or non-numeric
/// fields (the caller records a gap); non-finite values also count as invalid.
inline bool parse_sample(std::string_view field, double& out) {
    field = detail::trim(field);
    if (field.empty()) return false;
    std::string tmp(field);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

/// Writes `timestamp,frequency_hz` rows; gaps become empty value fields, so a
/// parse -> write -> parse round trip reproduces the series exactly.
inline void write_frequency_csv(std::ostream& os, const FrequencySeries& s) {
    os << "timestamp,frequency_hz\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << s.epoch_at(i) << ',';
        if (!s.is_gap(i)) os << format_roundtrip(s.values[i]);
        os << '\n';
    }
}

}  // namespace gridfreq
