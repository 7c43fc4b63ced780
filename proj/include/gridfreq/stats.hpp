#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <fftw3.h>

#include "gridfreq/errors.hpp"
#include "gridfreq/series.hpp"

namespace gridfreq {

/// One value per second-of-day plus the number of samples behind it.
/// Undefined seconds hold NaN.
struct DailyCurve {
    std::vector<double> values;        ///< 86400 entries, Hz
    std::vector<std::int64_t> counts;  ///< 86400 entries
};

struct AcfPoint {
    std::int64_t lag_s = 0;
    double acf = 0.0;
    bool defined = false;
};

struct IncrementHistogram {
    std::int64_t tau_s = 0;
    std::vector<double> bin_edges;  ///< in units of the series sigma
    std::vector<double> densities;  ///< sum(density * width) == 1
    double excess_kurtosis = 0.0;
    std::size_t n_increments = 0;
};

namespace detail {

/// Per-second-of-day means; a second pass over the deviations keeps the
/// standard deviation accurate for values far from zero.
inline DailyCurve daily_curve(const FrequencySeries& s, bool want_std) {
    if (s.size() < static_cast<std::size_t>(kSecondsPerDay))
        throw InsufficientDataError("daily curve needs at least one full day of data");
    std::vector<double> sum(kSecondsPerDay, 0.0);
    DailyCurve out;
    out.counts.assign(kSecondsPerDay, 0);
    out.values.assign(kSecondsPerDay, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.is_gap(i)) continue;
        const auto sod = static_cast<std::size_t>(s.second_of_day(i));
        sum[sod] += s.values[i];
        ++out.counts[sod];
    }
    std::vector<double> mean(kSecondsPerDay, 0.0);
    for (std::size_t sod = 0; sod < static_cast<std::size_t>(kSecondsPerDay); ++sod)
        if (out.counts[sod] >= 1) mean[sod] = sum[sod] / static_cast<double>(out.counts[sod]);
    if (!want_std) {
        for (std::size_t sod = 0; sod < static_cast<std::size_t>(kSecondsPerDay); ++sod)
            if (out.counts[sod] >= 1) out.values[sod] = mean[sod];
        return out;
    }
    std::vector<double> ss(kSecondsPerDay, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.is_gap(i)) continue;
        const auto sod = static_cast<std::size_t>(s.second_of_day(i));
        const double d = s.values[i] - mean[sod];
        ss[sod] += d * d;
    }
    for (std::size_t sod = 0; sod < static_cast<std::size_t>(kSecondsPerDay); ++sod)
        if (out.counts[sod] >= 2)
            out.values[sod] = std::sqrt(ss[sod] / static_cast<double>(out.counts[sod]));
    return out;
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Linear autocorrelation sums r[l] = sum_t x[t] x[t+l], l = 0..max_lag,
/// via FFTW (power spectrum round trip). Not thread-safe: FFTW plan
/// creation is serialized by the caller being single-threaded.
inline std::vector<double> autocorr_sums(const std::vector<double>& x, std::size_t max_lag) {
    const std::size_t n = x.size();
    const std::size_t len = next_pow2(n + max_lag + 1);
    double* buf = fftw_alloc_real(len);
    fftw_complex* spec = fftw_alloc_complex(len / 2 + 1);
    std::copy(x.begin(), x.end(), buf);
    std::fill(buf + n, buf + len, 0.0);

    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(len), buf, spec, FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    for (std::size_t i = 0; i < len / 2 + 1; ++i) {
        spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
        spec[i][1] = 0.0;
    }
    fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec, buf, FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);

    std::vector<double> sums(max_lag + 1);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t l = 0; l <= max_lag; ++l) sums[l] = buf[l] * scale;
    fftw_free(buf);
    fftw_free(spec);
    return sums;
}

}  // namespace detail

/// Mean frequency for each second of the day, over all non-gap samples.
inline DailyCurve daily_profile(const FrequencySeries& s) {
    return detail::daily_curve(s, false);
}

/// Population standard deviation for each second of the day; undefined where
/// fewer than two samples exist.
inline DailyCurve daily_std(const FrequencySeries& s) {
    return detail::daily_curve(s, true);
}

/// Pairwise-complete autocorrelation: acf(l) = C(l)/C(0) with
/// C(l) = mean over valid pairs of (f(t)-mu)(f(t+l)-mu), mu the global
/// non-gap mean. Reported at lags {0, stride, 2*stride, ..., max_lag}; a lag
/// with no valid pair (or a zero-variance series) is reported undefined.
inline std::vector<AcfPoint> autocorrelation(const FrequencySeries& s, std::int64_t max_lag_s,
                                             std::int64_t lag_stride_s = 60) {
    if (lag_stride_s < 1) throw ConfigError("acf lag stride must be >= 1");
    if (max_lag_s < 0 || max_lag_s >= static_cast<std::int64_t>(s.size()))
        throw ConfigError("acf max lag must be shorter than the series");
    const auto stats = compute_stats(s);
    const std::size_t n = s.size();
    const auto max_lag = static_cast<std::size_t>(max_lag_s);

    std::vector<double> dev(n, 0.0), mask(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.is_gap(i)) {
            dev[i] = s.values[i] - stats.mean_hz;
            mask[i] = 1.0;
        }
    }
    const std::vector<double> num = detail::autocorr_sums(dev, max_lag);
    const std::vector<double> cnt = detail::autocorr_sums(mask, max_lag);

    std::vector<AcfPoint> out;
    const double c0_count = std::round(cnt[0]);
    const double c0 = c0_count > 0 ? num[0] / c0_count : 0.0;
    for (std::int64_t lag = 0; lag <= max_lag_s; lag += lag_stride_s) {
        AcfPoint p;
        p.lag_s = lag;
        const double pairs = std::round(cnt[static_cast<std::size_t>(lag)]);
        if (pairs >= 1.0 && c0 > 0.0) {
            const double cl = num[static_cast<std::size_t>(lag)] / pairs;
            p.acf = cl / c0;
            p.defined = true;
        }
        out.push_back(p);
    }
    return out;
}

/// Raw increments f(t+tau) - f(t) over every t where both ends are non-gap.
inline std::vector<double> increment_samples(const FrequencySeries& s, std::int64_t tau_s) {
    if (tau_s < 1) throw ConfigError("increment delay must be >= 1 s");
    std::vector<double> out;
    if (static_cast<std::size_t>(tau_s) >= s.size()) return out;
    const auto tau = static_cast<std::size_t>(tau_s);
    out.reserve(s.size() - tau);
    for (std::size_t t = 0; t + tau < s.size(); ++t) {
        if (!s.is_gap(t) && !s.is_gap(t + tau)) out.push_back(s.values[t + tau] - s.values[t]);
    }
    return out;
}

/// Histogram of increments normalized by the series sigma: 101 uniform bins
/// over [-10 sigma, 10 sigma] by default, overflow clipped into the end bins.
/// Also reports the excess kurtosis of the normalized increments.
inline IncrementHistogram increment_histogram(const FrequencySeries& s, std::int64_t tau_s,
                                              std::size_t bins = 101,
                                              double range_sigma = 10.0) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    const auto stats = compute_stats(s);
    if (!(stats.std_hz > 0.0))
        throw DegenerateSeriesError("increment histogram: series standard deviation is zero");
    const std::vector<double> raw = increment_samples(s, tau_s);
    if (raw.size() < 2)
        throw InsufficientDataError("increment histogram: need at least two increment pairs");

    IncrementHistogram h;
    h.tau_s = tau_s;
    h.n_increments = raw.size();
    h.bin_edges.resize(bins + 1);
    const double lo = -range_sigma, hi = range_sigma;
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i)
        h.bin_edges[i] = lo + width * static_cast<double>(i);

    std::vector<std::size_t> count(bins, 0);
    double mean = 0.0;
    for (const double r : raw) mean += r / stats.std_hz;
    mean /= static_cast<double>(raw.size());
    double m2 = 0.0, m4 = 0.0;
    for (const double r : raw) {
        const double x = r / stats.std_hz;
        auto b = static_cast<std::int64_t>(std::floor((x - lo) / width));
        b = std::clamp<std::int64_t>(b, 0, static_cast<std::int64_t>(bins) - 1);
        ++count[static_cast<std::size_t>(b)];
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(raw.size());
    m4 /= static_cast<double>(raw.size());
    h.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0
                                 : std::numeric_limits<double>::quiet_NaN();
    h.densities.resize(bins);
    for (std::size_t b = 0; b < bins; ++b)
        h.densities[b] = static_cast<double>(count[b]) /
                         (static_cast<double>(raw.size()) * width);
    return h;
}

}  // namespace gridfreq
