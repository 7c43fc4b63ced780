#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "gridfreq/pattern.hpp"
#include "testutil.hpp"

using namespace gridfreq;
using Catch::Approx;

namespace {

// Exhaustive window-validity scan: counts (day, hour) pairs whose preceding
// hour and forecast hour both lie inside the series and contain no gap.
std::size_t count_valid_patterns(const FrequencySeries& s, int hour_of_day = -1) {
    std::size_t n = 0;
    for (std::int64_t h = s.start_epoch - 86400 * 2; h < s.end_epoch() + 86400; h += 3600) {
        if (h % 3600 != 0) continue;
        const std::int64_t w0 = h - 3600;
        if (w0 < s.start_epoch || h + 3600 > s.end_epoch()) continue;
        const int hod = static_cast<int>(pos_mod(h, 86400) / 3600);
        if (hour_of_day >= 0 && hod != hour_of_day) continue;
        bool clean = true;
        for (std::int64_t t = w0; t < h + 3600 && clean; ++t)
            if (s.is_gap(static_cast<std::size_t>(t - s.start_epoch))) clean = false;
        if (clean) ++n;
    }
    return n;
}

double naive_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

Pattern make_query(const FrequencySeries& s, std::int64_t forecast_start) {
    Pattern q;
    q.hour_of_day = static_cast<int>(pos_mod(forecast_start, 86400) / 3600);
    q.day_index = floor_div(forecast_start, 86400);
    q.window_start_epoch = forecast_start - 3600;
    q.window = std::span<const double>(
        s.values.data() + (forecast_start - 3600 - s.start_epoch), kPatternLength);
    return q;
}

}  // namespace

TEST_CASE("build_library covers every valid (day, hour) pair") {
    auto s = testutil::random_series(3 * 86400, 51);
    const PatternLibrary lib = build_library(s);
    REQUIRE(lib.total_patterns() == 71);  // 3*24 minus the uncovered first hour
    REQUIRE(lib.total_patterns() == count_valid_patterns(s));
    REQUIRE(lib.bucket(0).size() == 2);
    REQUIRE(lib.bucket(13).size() == 3);
    for (int h = 0; h < 24; ++h)
        REQUIRE(lib.bucket(h).size() == count_valid_patterns(s, h));
}

TEST_CASE("build_library matches the exhaustive scan on gapped series") {
    auto s = testutil::random_series(5 * 86400, 52, 0.001);
    const PatternLibrary lib = build_library(s);
    REQUIRE(lib.total_patterns() == count_valid_patterns(s));
    for (int h = 0; h < 24; ++h) {
        REQUIRE(lib.bucket(h).size() == count_valid_patterns(s, h));
        for (const Pattern& p : lib.bucket(h)) {
            REQUIRE(p.hour_of_day == h);
            REQUIRE(p.window.size() == kPatternLength);
            REQUIRE(p.next_hour.size() == kPatternLength);
        }
    }
}

TEST_CASE("a gap removes exactly the patterns whose windows overlap it") {
    auto s = testutil::random_series(3 * 86400, 53);
    // 90 minutes of missing data starting 09:30 on day 1
    const std::size_t gap_start = 86400 + 9 * 3600 + 1800;
    for (std::size_t i = gap_start; i < gap_start + 5400; ++i) s.gap_mask[i] = 1;
    const PatternLibrary lib = build_library(s);

    const auto day1_present = [&](int hour) {
        for (const Pattern& p : lib.bucket(hour))
            if (p.day_index == 1) return true;
        return false;
    };
    REQUIRE_FALSE(day1_present(9));   // forecast hour 09 overlaps via its target
    REQUIRE_FALSE(day1_present(10));
    REQUIRE_FALSE(day1_present(11));  // window 10:00-11:00 overlaps the gap
    REQUIRE(day1_present(8));
    REQUIRE(day1_present(12));
    REQUIRE(lib.total_patterns() == count_valid_patterns(s));
}

TEST_CASE("build_library needs two full days") {
    auto s = testutil::random_series(86400 + 7200, 54);
    REQUIRE_THROWS_AS(build_library(s), InsufficientDataError);
}

TEST_CASE("constant series yields identical windows") {
    auto s = testutil::make_series(std::vector<double>(2 * 86400, 50.0));
    const PatternLibrary lib = build_library(s);
    const auto& bucket = lib.bucket(5);
    REQUIRE(bucket.size() == 2);
    REQUIRE(pattern_distance(bucket[0].window, bucket[1].window) == 0.0);
}

TEST_CASE("pattern_distance basics") {
    std::vector<double> a(kPatternLength, 0.0), b(kPatternLength, 0.001);
    REQUIRE(pattern_distance(a, a) == 0.0);
    REQUIRE(pattern_distance(a, b) == Approx(0.06).epsilon(1e-12));
    std::vector<double> short_vec(10, 0.0);
    REQUIRE_THROWS_AS(pattern_distance(a, short_vec), ShapeError);
}

TEST_CASE("pattern_distance agrees with the naive loop") {
    std::mt19937 rng(55);
    std::normal_distribution<double> g(50.0, 0.1);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(kPatternLength), b(kPatternLength);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        const double fast = pattern_distance(a, b);
        const double slow = naive_distance(a, b);
        REQUIRE(fast == Approx(slow).epsilon(1e-12));
    }
}

TEST_CASE("pattern_distance satisfies the triangle inequality on sampled triples") {
    std::mt19937 rng(56);
    std::normal_distribution<double> g(50.0, 0.05);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(kPatternLength), b(kPatternLength), c(kPatternLength);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        for (auto& v : c) v = g(rng);
        REQUIRE(pattern_distance(a, c) <=
                pattern_distance(a, b) + pattern_distance(b, c) + 1e-9);
    }
}

TEST_CASE("find_neighbours: exact stored pattern comes back at distance zero") {
    auto s = testutil::random_series(4 * 86400, 57);
    const PatternLibrary lib = build_library(s);
    const auto& bucket = lib.bucket(7);
    Pattern query = bucket[1];  // same window; a different day id avoids self-exclusion
    query.day_index = 9999;
    const NeighbourSet nb = find_neighbours(lib, query, 1);
    REQUIRE(nb.size() == 1);
    REQUIRE(nb.indices[0] == 1);
    REQUIRE(nb.distances[0] == 0.0);
    REQUIRE_FALSE(nb.reduced_k);
}

TEST_CASE("find_neighbours: k equal to bucket size returns everything sorted") {
    auto s = testutil::random_series(5 * 86400, 58);
    const PatternLibrary lib = build_library(s);
    const auto& bucket = lib.bucket(3);
    Pattern query = bucket[0];
    query.day_index = 9999;
    const NeighbourSet nb = find_neighbours(lib, query, bucket.size());
    REQUIRE(nb.size() == bucket.size());
    REQUIRE(std::is_sorted(nb.distances.begin(), nb.distances.end()));
}

TEST_CASE("find_neighbours matches an exhaustive sort oracle") {
    auto s = testutil::random_series(10 * 86400, 59);
    const PatternLibrary lib = build_library(s);
    std::mt19937 rng(60);
    for (int trial = 0; trial < 10; ++trial) {
        const int hour = static_cast<int>(rng() % 24);
        const auto& bucket = lib.bucket(hour);
        Pattern query = bucket[rng() % bucket.size()];
        const std::int64_t excluded = query.day_index;
        query.day_index = 9999;

        // oracle: full sort of all candidate distances with the same tie rule
        struct Row {
            double d;
            std::int64_t day;
            std::size_t idx;
        };
        std::vector<Row> rows;
        for (std::size_t i = 0; i < bucket.size(); ++i) {
            if (bucket[i].day_index == excluded) continue;
            rows.push_back({naive_distance(bucket[i].window, query.window),
                            bucket[i].day_index, i});
        }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            if (a.d != b.d) return a.d < b.d;
            if (a.day != b.day) return a.day > b.day;
            return a.idx < b.idx;
        });

        const NeighbourSet nb = find_neighbours(lib, query, 5, excluded);
        REQUIRE(nb.size() == std::min<std::size_t>(5, rows.size()));
        for (std::size_t j = 0; j < nb.size(); ++j) {
            REQUIRE(nb.indices[j] == rows[j].idx);
            REQUIRE(nb.distances[j] == Approx(rows[j].d).epsilon(1e-12));
        }
        // the head of the list is the global minimum
        REQUIRE(nb.distances[0] == Approx(rows[0].d).epsilon(1e-12));
    }
}

TEST_CASE("find_neighbours degrades to all candidates with a flag") {
    auto s = testutil::random_series(3 * 86400, 61);
    const PatternLibrary lib = build_library(s);
    const auto& bucket = lib.bucket(2);
    Pattern query = bucket[0];
    query.day_index = 9999;
    const NeighbourSet nb = find_neighbours(lib, query, 50);
    REQUIRE(nb.reduced_k);
    REQUIRE(nb.size() == bucket.size());
}

TEST_CASE("find_neighbours excludes the requested day") {
    auto s = testutil::random_series(4 * 86400, 62);
    const PatternLibrary lib = build_library(s);
    const auto& bucket = lib.bucket(6);
    Pattern query = bucket[0];
    const NeighbourSet nb = find_neighbours(lib, query, bucket.size(), bucket[0].day_index);
    REQUIRE(nb.size() == bucket.size() - 1);
    for (const std::size_t idx : nb.indices) REQUIRE(bucket[idx].day_index != bucket[0].day_index);
}

TEST_CASE("equal distances break ties toward the more recent day") {
    auto s = testutil::make_series(std::vector<double>(4 * 86400, 50.0));
    const PatternLibrary lib = build_library(s);
    const auto& bucket = lib.bucket(10);
    Pattern query = bucket[0];
    query.day_index = 9999;
    const NeighbourSet nb = find_neighbours(lib, query, bucket.size());
    for (std::size_t j = 1; j < nb.size(); ++j) {
        REQUIRE(nb.distances[j] == 0.0);
        REQUIRE(bucket[nb.indices[j - 1]].day_index > bucket[nb.indices[j]].day_index);
    }
}

TEST_CASE("a far-away pattern never disturbs the neighbour set") {
    auto base = testutil::random_series(5 * 86400, 63);
    auto extended = base;
    extended.values.resize(6 * 86400);
    extended.gap_mask.resize(6 * 86400, 0);
    for (std::size_t i = 5 * 86400; i < extended.size(); ++i)
        extended.values[i] = 58.0;  // day 5 is far from every query in pattern space

    const PatternLibrary lib_a = build_library(base);
    const PatternLibrary lib_b = build_library(extended);
    const auto& bucket_a = lib_a.bucket(4);
    Pattern query = bucket_a[1];
    query.day_index = 9999;

    const NeighbourSet a = find_neighbours(lib_a, query, 3);
    const NeighbourSet b = find_neighbours(lib_b, query, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        REQUIRE(lib_a.bucket(4)[a.indices[j]].day_index == lib_b.bucket(4)[b.indices[j]].day_index);
        REQUIRE(a.distances[j] == b.distances[j]);
    }
}
