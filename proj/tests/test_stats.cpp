#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "gridfreq/stats.hpp"
#include "testutil.hpp"

using namespace gridfreq;
using Catch::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Brute-force grouping oracle: mean and population std per second-of-day.
struct GroupedOracle {
    std::map<std::int64_t, std::vector<double>> groups;

    explicit GroupedOracle(const FrequencySeries& s) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (!s.is_gap(i)) groups[s.second_of_day(i)].push_back(s.values[i]);
    }
    double mean(std::int64_t sod) const {
        const auto& g = groups.at(sod);
        double sum = 0.0;
        for (double v : g) sum += v;
        return sum / static_cast<double>(g.size());
    }
    double stddev(std::int64_t sod) const {
        const auto& g = groups.at(sod);
        const double m = mean(sod);
        double ss = 0.0;
        for (double v : g) ss += (v - m) * (v - m);
        return std::sqrt(ss / static_cast<double>(g.size()));
    }
};

// Naive O(N*L) pairwise-complete autocorrelation.
double acf_naive(const FrequencySeries& s, std::int64_t lag) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!s.is_gap(i)) {
            sum += s.values[i];
            ++n;
        }
    const double mu = sum / static_cast<double>(n);
    const auto c_at = [&](std::int64_t l) {
        double acc = 0.0;
        std::int64_t pairs = 0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(l) < s.size(); ++t) {
            const std::size_t u = t + static_cast<std::size_t>(l);
            if (s.is_gap(t) || s.is_gap(u)) continue;
            acc += (s.values[t] - mu) * (s.values[u] - mu);
            ++pairs;
        }
        return acc / static_cast<double>(pairs);
    };
    return c_at(lag) / c_at(0);
}

}  // namespace

TEST_CASE("daily_profile: constant series over two days") {
    auto s = testutil::make_series(std::vector<double>(2 * 86400, 50.0));
    const DailyCurve c = daily_profile(s);
    REQUIRE(c.values.size() == 86400);
    for (std::size_t i = 0; i < 86400; i += 7919) {
        REQUIRE(c.values[i] == 50.0);
        REQUIRE(c.counts[i] == 2);
    }
}

TEST_CASE("daily_profile: two-day two-level series averages to the midpoint") {
    std::vector<double> v(2 * 86400, 50.0);
    for (std::size_t i = 86400; i < v.size(); ++i) v[i] = 51.0;
    const DailyCurve c = daily_profile(testutil::make_series(std::move(v)));
    for (std::size_t i = 0; i < 86400; i += 4999) REQUIRE(c.values[i] == Approx(50.5).margin(0.0));
}

TEST_CASE("daily_profile and daily_std match the grouping oracle on gapped data") {
    auto s = testutil::random_series(3 * 86400 + 12345, 41, 0.10, 7200);
    // sawtooth on top of the noise so the profile is structured
    for (std::size_t i = 0; i < s.size(); ++i)
        s.values[i] += 0.05 * static_cast<double>(s.second_of_day(i) % 600) / 600.0;

    const GroupedOracle oracle(s);
    const DailyCurve mean = daily_profile(s);
    const DailyCurve spread = daily_std(s);
    for (std::int64_t sod = 0; sod < 86400; sod += 997) {
        const auto it = oracle.groups.find(sod);
        const std::int64_t n = it == oracle.groups.end() ? 0 : static_cast<std::int64_t>(it->second.size());
        REQUIRE(mean.counts[static_cast<std::size_t>(sod)] == n);
        if (n >= 1)
            REQUIRE(mean.values[static_cast<std::size_t>(sod)] ==
                    Approx(oracle.mean(sod)).epsilon(1e-12));
        else
            REQUIRE(std::isnan(mean.values[static_cast<std::size_t>(sod)]));
        if (n >= 2)
            REQUIRE(spread.values[static_cast<std::size_t>(sod)] ==
                    Approx(oracle.stddev(sod)).margin(1e-12));
        else
            REQUIRE(std::isnan(spread.values[static_cast<std::size_t>(sod)]));
    }
}

TEST_CASE("daily_std: constant series has zero spread, two-level day 0.1") {
    std::vector<double> v(2 * 86400, 49.9);
    for (std::size_t i = 86400; i < v.size(); ++i) v[i] = 50.1;
    const DailyCurve c = daily_std(testutil::make_series(std::move(v)));
    for (std::size_t i = 0; i < 86400; i += 8191) REQUIRE(c.values[i] == Approx(0.1).margin(1e-12));

    const DailyCurve z = daily_std(testutil::make_series(std::vector<double>(2 * 86400, 50.0)));
    for (std::size_t i = 0; i < 86400; i += 8191) REQUIRE(z.values[i] == 0.0);
}

TEST_CASE("autocorrelation of a 24 h cosine peaks at one day") {
    std::vector<double> v(4 * 86400);
    for (std::size_t t = 0; t < v.size(); ++t)
        v[t] = 50.0 + 0.05 * std::cos(2.0 * kPi * static_cast<double>(t) / 86400.0);
    const auto acf = autocorrelation(testutil::make_series(std::move(v)), 2 * 86400, 43200);
    REQUIRE(acf.size() == 5);
    REQUIRE(acf[0].lag_s == 0);
    REQUIRE(acf[0].acf == 1.0);
    REQUIRE(acf[1].defined);  // 12 h
    REQUIRE(acf[1].acf == Approx(-1.0).margin(1e-6));
    REQUIRE(acf[2].acf == Approx(1.0).margin(1e-6));   // 24 h
    REQUIRE(acf[4].acf == Approx(1.0).margin(1e-6));   // 48 h
}

TEST_CASE("autocorrelation of white noise stays inside the statistical band") {
    std::mt19937 rng(4242);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(100000);
    for (double& x : v) x = 50.0 + 0.03 * g(rng);
    const auto acf = autocorrelation(testutil::make_series(std::move(v)), 100, 1);
    for (const auto& p : acf) {
        REQUIRE(p.defined);
        if (p.lag_s > 0) REQUIRE(std::abs(p.acf) < 0.02);
    }
}

TEST_CASE("autocorrelation matches the naive double loop on gapped data") {
    auto s = testutil::random_series(2000, 43, 0.12);
    for (std::size_t i = 0; i < s.size(); ++i)
        s.values[i] += 0.02 * std::sin(2.0 * kPi * static_cast<double>(i) / 120.0);
    const auto acf = autocorrelation(s, 50, 7);
    for (const auto& p : acf) {
        REQUIRE(p.defined);
        REQUIRE(p.acf == Approx(acf_naive(s, p.lag_s)).margin(1e-12));
    }
}

TEST_CASE("autocorrelation rejects an out-of-range lag") {
    auto s = testutil::random_series(1000, 44);
    REQUIRE_THROWS_AS(autocorrelation(s, 1000, 1), ConfigError);
    REQUIRE_THROWS_AS(autocorrelation(s, 100, 0), ConfigError);
}

TEST_CASE("increment_histogram: constant series is degenerate") {
    auto s = testutil::make_series(std::vector<double>(100, 50.0));
    REQUIRE_THROWS_AS(increment_histogram(s, 1), DegenerateSeriesError);
}

TEST_CASE("increments of a linear ramp are exactly c*tau") {
    const double c = 0.001;
    std::vector<double> v(500);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 50.0 + c * static_cast<double>(i);
    const auto s = testutil::make_series(std::move(v));
    for (const std::int64_t tau : {1, 10}) {
        const auto inc = increment_samples(s, tau);
        REQUIRE(inc.size() == s.size() - static_cast<std::size_t>(tau));
        for (const double d : inc)
            REQUIRE(d == Approx(c * static_cast<double>(tau)).epsilon(1e-9));
    }
}

TEST_CASE("increment_histogram kurtosis matches a direct moment oracle") {
    auto s = testutil::random_series(100000, 45);
    const IncrementHistogram h = increment_histogram(s, 1);

    const double sigma = compute_stats(s).std_hz;
    const auto inc = increment_samples(s, 1);
    double mean = 0.0;
    for (double d : inc) mean += d / sigma;
    mean /= static_cast<double>(inc.size());
    double m2 = 0.0, m4 = 0.0;
    for (double d : inc) {
        const double x = d / sigma - mean;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    m2 /= static_cast<double>(inc.size());
    m4 /= static_cast<double>(inc.size());
    const double oracle = m4 / (m2 * m2) - 3.0;

    REQUIRE(h.excess_kurtosis == Approx(oracle).margin(1e-9));
    REQUIRE(std::abs(h.excess_kurtosis) < 0.15);  // i.i.d. Gaussian source
}

TEST_CASE("increment_histogram densities integrate to one and mirror under negation") {
    auto s = testutil::random_series(50000, 46, 0.03);
    const IncrementHistogram h = increment_histogram(s, 10);
    double integral = 0.0;
    for (std::size_t b = 0; b < h.densities.size(); ++b)
        integral += h.densities[b] * (h.bin_edges[b + 1] - h.bin_edges[b]);
    REQUIRE(integral == Approx(1.0).margin(1e-9));

    auto neg = s;
    for (double& v : neg.values) v = -v;
    const IncrementHistogram hn = increment_histogram(neg, 10);
    REQUIRE(hn.densities.size() == h.densities.size());
    for (std::size_t b = 0; b < h.densities.size(); ++b)
        REQUIRE(hn.densities[b] == Approx(h.densities[h.densities.size() - 1 - b]).margin(1e-12));
}
