#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gridfreq/features.hpp"
#include "gridfreq/synth.hpp"
#include "testutil.hpp"

using namespace gridfreq;
using Catch::Approx;

namespace {

RawFeatureSeries make_raw(std::vector<double> values, std::int64_t lambda = 600,
                          std::int64_t start = 0) {
    RawFeatureSeries f;
    f.start_epoch = start;
    f.lambda_s = lambda;
    f.gap_mask.assign(values.size(), 0);
    f.values = std::move(values);
    return f;
}

RawFeatureSeries random_raw(std::size_t n, unsigned seed, std::int64_t lambda = 600) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(100.0, 900.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return make_raw(std::move(v), lambda);
}

Pattern query_at(const FrequencySeries& s, std::int64_t forecast_start) {
    Pattern q;
    q.hour_of_day = static_cast<int>(pos_mod(forecast_start, 86400) / 3600);
    q.day_index = floor_div(forecast_start, 86400);
    q.window_start_epoch = forecast_start - 3600;
    q.window = std::span<const double>(
        s.values.data() + (forecast_start - 3600 - s.start_epoch), kPatternLength);
    return q;
}

}  // namespace

TEST_CASE("minmax_scale maps extrema to the unit interval") {
    const auto f = minmax_scale(make_raw({2.0, 4.0, 6.0}));
    REQUIRE(f.values == std::vector<double>{0.0, 0.5, 1.0});
    REQUIRE(f.a_min == 2.0);
    REQUIRE(f.a_max == 6.0);
    REQUIRE(f.clipped_count == 0);
}

TEST_CASE("minmax_scale rejects a constant series") {
    REQUIRE_THROWS_AS(minmax_scale(make_raw({3.0, 3.0, 3.0})), DegenerateSeriesError);
}

TEST_CASE("minmax_scale matches the direct formula on random data") {
    const auto raw = random_raw(500, 91);
    const auto f = minmax_scale(raw);
    double lo = raw.values[0], hi = raw.values[0];
    for (const double v : raw.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (std::size_t i = 0; i < raw.size(); ++i)
        REQUIRE(f.values[i] == (raw.values[i] - lo) / (hi - lo));
}

TEST_CASE("minmax_scale uses training extrema only and clips the rest") {
    const auto f = minmax_scale(make_raw({10.0, 20.0, 5.0, 25.0}), 2);
    REQUIRE(f.a_min == 10.0);
    REQUIRE(f.a_max == 20.0);
    REQUIRE(f.values[0] == 0.0);
    REQUIRE(f.values[1] == 1.0);
    REQUIRE(f.values[2] == 0.0);  // clipped from below
    REQUIRE(f.values[3] == 1.0);  // clipped from above
    REQUIRE(f.clipped_count == 2);
}

TEST_CASE("positive affine maps leave the scaled training values unchanged") {
    const auto raw = random_raw(300, 92);
    const auto base = minmax_scale(raw);

    auto doubled = raw;  // power-of-two scale: exact in floating point
    for (double& v : doubled.values) v *= 2.0;
    const auto f2 = minmax_scale(doubled);
    for (std::size_t i = 0; i < raw.size(); ++i) REQUIRE(f2.values[i] == base.values[i]);

    auto affine = raw;
    for (double& v : affine.values) v = 1.7 * v + 3.1;
    const auto f3 = minmax_scale(affine);
    for (std::size_t i = 0; i < raw.size(); ++i)
        REQUIRE(f3.values[i] == Approx(base.values[i]).margin(1e-12));
}

TEST_CASE("block_average pools fine samples and strictly propagates gaps") {
    auto raw = random_raw(12, 93, 300);
    raw.gap_mask[5] = 1;
    const auto coarse = block_average(raw, 600);
    REQUIRE(coarse.lambda_s == 600);
    REQUIRE(coarse.size() == 6);
    REQUIRE(coarse.values[0] == (raw.values[0] + raw.values[1]) / 2.0);
    REQUIRE(coarse.is_gap(2));  // contains the masked fine sample
    REQUIRE_FALSE(coarse.is_gap(3));
    REQUIRE_THROWS_AS(block_average(raw, 700), ConfigError);
}

TEST_CASE("feature_window finds hour-aligned windows and honours gaps") {
    auto raw = random_raw(24, 94, 600);  // 4 hours at 600 s
    raw.gap_mask[8] = 1;                 // second hour, index 8 -> epoch 4800
    const auto f = minmax_scale(raw);
    const auto w0 = feature_window(f, 3600, FeatureAlignment::past_hour);
    REQUIRE(w0);
    REQUIRE(w0->window.size() == 6);
    REQUIRE(w0->window[0] == f.values[0]);
    REQUIRE_FALSE(feature_window(f, 3600, FeatureAlignment::forecast_hour));  // gap at 4800
    REQUIRE_FALSE(feature_window(f, 0, FeatureAlignment::past_hour));         // out of range
    const auto w3 = feature_window(f, 3 * 3600, FeatureAlignment::forecast_hour);
    REQUIRE(w3);
    REQUIRE(w3->window[0] == f.values[18]);
}

TEST_CASE("extended_distance reduces to the frequency distance") {
    std::vector<double> fq(kPatternLength, 50.0), fc(kPatternLength, 50.01);
    std::vector<double> aq = {0.2, 0.4}, ac = {0.5, 0.7};
    const FeaturePattern pq{aq, FeatureAlignment::forecast_hour};
    const FeaturePattern pc{ac, FeatureAlignment::forecast_hour};

    const double base = pattern_distance(fq, fc);
    REQUIRE(extended_distance(fq, fc, pq, pc, 0.0) == base);

    const FeaturePattern same{aq, FeatureAlignment::forecast_hour};
    REQUIRE(extended_distance(fq, fc, pq, same, 1.3) == base);

    // both feature samples differ by exactly 0.3
    REQUIRE(extended_distance(fq, fc, pq, pc, 1.0) ==
            Approx(base + 0.3 * std::sqrt(2.0)).epsilon(1e-12));

    const FeaturePattern other{ac, FeatureAlignment::past_hour};
    REQUIRE_THROWS_AS(extended_distance(fq, fc, pq, other, 1.0), ConfigError);
}

TEST_CASE("extended_distance is monotone in beta when features differ") {
    std::vector<double> fq(kPatternLength, 50.0), fc(kPatternLength, 50.02);
    std::vector<double> aq = {0.1, 0.9, 0.4}, ac = {0.3, 0.2, 0.8};
    const FeaturePattern pq{aq, FeatureAlignment::forecast_hour};
    const FeaturePattern pc{ac, FeatureAlignment::forecast_hour};
    double prev = extended_distance(fq, fc, pq, pc, 0.0);
    for (double beta = 0.1; beta < 2.01; beta += 0.1) {
        const double d = extended_distance(fq, fc, pq, pc, beta);
        REQUIRE(d > prev);
        prev = d;
    }
}

namespace {

/// Synthetic frequency plus a feature that covers the whole span.
struct ExtendedFixture {
    FrequencySeries series;
    FeatureSeries feature;

    explicit ExtendedFixture(unsigned seed, int days = 6, double coupling = 1.0) {
        SynthSpec spec;
        spec.days = days;
        spec.seed = seed;
        series = generate(spec);
        feature = minmax_scale(generate_feature(spec, coupling));
    }
};

}  // namespace

TEST_CASE("predict_wnn_extended with beta=0 is bit-identical to predict_wnn") {
    const ExtendedFixture fx(95);
    const PatternLibrary lib = build_library(fx.series);
    for (const int hour : {2, 13, 23}) {
        const Pattern q = lib.bucket(hour)[1];
        const auto qf = feature_window(fx.feature, q.forecast_start_epoch(),
                                       FeatureAlignment::forecast_hour);
        REQUIRE(qf);
        const ForecastTrajectory plain = predict_wnn(lib, q, 3);
        const ForecastTrajectory ext = predict_wnn_extended(lib, fx.feature, q, *qf, 0.0, 3);
        REQUIRE(std::equal(plain.values.begin(), plain.values.end(), ext.values.begin()));
    }
}

TEST_CASE("candidate ranking at beta=0 equals the frequency-only ranking") {
    const ExtendedFixture fx(96);
    const PatternLibrary lib = build_library(fx.series);
    const Pattern q = lib.bucket(9)[2];
    const auto qf =
        feature_window(fx.feature, q.forecast_start_epoch(), FeatureAlignment::forecast_hour);
    const NeighbourSet plain = find_neighbours(lib, q, 6, q.day_index);
    const NeighbourSet ext = find_neighbours_extended(lib, fx.feature, q, *qf, 0.0, 6);
    REQUIRE(plain.indices == ext.indices);
    REQUIRE(plain.distances == ext.distances);
}

TEST_CASE("identical feature windows leave the extended prediction unchanged") {
    // daily-periodic feature: every candidate shares the same window
    std::vector<double> vals(6 * 144);
    for (std::size_t i = 0; i < vals.size(); ++i)
        vals[i] = 100.0 + static_cast<double>(i % 144);
    const auto feature = minmax_scale(make_raw(std::move(vals)));
    auto series = testutil::random_series(6 * 86400, 97);
    const PatternLibrary lib = build_library(series);
    const Pattern q = lib.bucket(14)[3];
    const auto qf =
        feature_window(feature, q.forecast_start_epoch(), FeatureAlignment::forecast_hour);
    const ForecastTrajectory plain = predict_wnn(lib, q, 4);
    for (const double beta : {0.3, 0.9, 1.5}) {
        const ForecastTrajectory ext = predict_wnn_extended(lib, feature, q, *qf, beta, 4);
        REQUIRE(std::equal(plain.values.begin(), plain.values.end(), ext.values.begin()));
    }
}

TEST_CASE("predict_wnn_extended matches an end-to-end oracle") {
    const ExtendedFixture fx(98);
    const PatternLibrary lib = build_library(fx.series);
    const double beta = 0.5;
    std::mt19937 rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const int hour = static_cast<int>(rng() % 24);
        const auto& bucket = lib.bucket(hour);
        const Pattern q = bucket[rng() % bucket.size()];
        const auto qf = feature_window(fx.feature, q.forecast_start_epoch(),
                                       FeatureAlignment::forecast_hour);
        REQUIRE(qf);

        // independent re-implementation of the extended pipeline
        struct Row {
            double d;
            std::int64_t day;
            std::size_t idx;
        };
        std::vector<Row> rows;
        for (std::size_t i = 0; i < bucket.size(); ++i) {
            if (bucket[i].day_index == q.day_index) continue;
            const auto cf = feature_window(fx.feature, bucket[i].forecast_start_epoch(),
                                           FeatureAlignment::forecast_hour);
            if (!cf) continue;
            double freq_acc = 0.0;
            for (std::size_t t = 0; t < kPatternLength; ++t) {
                const double d = q.window[t] - bucket[i].window[t];
                freq_acc += d * d;
            }
            double feat_acc = 0.0;
            for (std::size_t t = 0; t < qf->window.size(); ++t) {
                const double d = qf->window[t] - cf->window[t];
                feat_acc += d * d;
            }
            rows.push_back(
                {std::sqrt(freq_acc) + beta * std::sqrt(feat_acc), bucket[i].day_index, i});
        }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            if (a.d != b.d) return a.d < b.d;
            if (a.day != b.day) return a.day > b.day;
            return a.idx < b.idx;
        });
        const std::size_t k = std::min<std::size_t>(3, rows.size());
        std::vector<double> w(k, 1.0);
        const double spread = rows[k - 1].d - rows[0].d;
        if (spread > 0.0)
            for (std::size_t j = 0; j < k; ++j) w[j] = (rows[k - 1].d - rows[j].d) / spread;
        double wsum = 0.0;
        for (double x : w) wsum += x;
        std::vector<double> expect(kPatternLength, 0.0);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t t = 0; t < kPatternLength; ++t)
                expect[t] += w[j] * bucket[rows[j].idx].next_hour[t];
        for (double& v : expect) v /= wsum;

        const ForecastTrajectory got = predict_wnn_extended(lib, fx.feature, q, *qf, beta, 3);
        for (std::size_t t = 0; t < kPatternLength; t += 17)
            REQUIRE(got.values[t] == Approx(expect[t]).epsilon(1e-12));
    }
}

TEST_CASE("candidates without feature coverage are excluded") {
    auto series = testutil::random_series(6 * 86400, 100);
    // feature present only from day 2 onward
    auto raw = random_raw(4 * 144, 101);
    raw.start_epoch = 2 * 86400;
    const auto feature = minmax_scale(raw);
    const PatternLibrary lib = build_library(series);
    const auto& bucket = lib.bucket(12);
    const Pattern q = bucket.back();
    const auto qf =
        feature_window(feature, q.forecast_start_epoch(), FeatureAlignment::forecast_hour);
    REQUIRE(qf);
    const NeighbourSet nb =
        find_neighbours_extended(lib, feature, q, *qf, 0.5, bucket.size());
    REQUIRE(nb.reduced_k);
    for (const std::size_t idx : nb.indices) REQUIRE(bucket[idx].day_index >= 2);
}
