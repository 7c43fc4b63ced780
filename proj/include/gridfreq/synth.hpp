#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gridfreq/detail/rng.hpp"
#include "gridfreq/errors.hpp"
#include "gridfreq/ingest.hpp"
#include "gridfreq/series.hpp"

namespace gridfreq {

/// Deterministic per-hour dispatch jumps: magnitudes sweep 20-60 mHz over the
/// day (small overnight, large midday), alternating sign hour to hour.
inline std::array<double, 24> default_jump_profile() {
    std::array<double, 24> j{};
    for (int h = 0; h < 24; ++h) {
        const double mag =
            0.02 + 0.04 * std::sqrt(std::sin(3.14159265358979323846 * h / 24.0));
        j[static_cast<std::size_t>(h)] = (h % 2 == 0) ? mag : -mag;
    }
    return j;
}

/// Synthetic grid-frequency generator: hourly dispatch steps that decay
/// exponentially, plus mean-reverting (Ornstein-Uhlenbeck) noise driven by
/// SplitMix64/Box-Muller Gaussian shocks. Identical specs give bit-identical
/// series on every run.
struct SynthSpec {
    int days = 90;
    double nominal_hz = 50.0;
    std::array<double, 24> jump_profile = default_jump_profile();  ///< Hz
    double decay_time_s = 300.0;
    double noise_reversion_rate = 1.0 / 300.0;  ///< 1/s
    /// Hz/sqrt(s); default keeps the stationary noise std at 30 mHz.
    double noise_amplitude = 0.03 * 0.0816496580927726;  // 0.03 * sqrt(2/300)
    double weekend_scale = 0.0;  ///< jump multiplier on days 5-6 of each week
    std::uint64_t seed = 1;
    std::int64_t start_epoch = 0;  ///< must be midnight-aligned
};

inline void validate(const SynthSpec& spec) {
    if (spec.days < 1) throw ConfigError("synth: days must be >= 1");
    if (!(spec.decay_time_s > 0.0)) throw ConfigError("synth: decay time must be positive");
    if (!(spec.noise_reversion_rate > 0.0))
        throw ConfigError("synth: noise reversion rate must be positive");
    if (spec.noise_amplitude < 0.0) throw ConfigError("synth: noise amplitude must be >= 0");
    if (pos_mod(spec.start_epoch, kSecondsPerDay) != 0)
        throw ConfigError("synth: start epoch must be midnight-aligned");
}

namespace detail {

inline double jump_at(const SynthSpec& spec, std::int64_t day_of_series, int hour) {
    const double scale = (day_of_series % 7 == 5 || day_of_series % 7 == 6)
                             ? spec.weekend_scale
                             : 1.0;
    return spec.jump_profile[static_cast<std::size_t>(hour)] * scale;
}

}  // namespace detail

/// f(t) = nominal + sum of decaying hourly steps + OU noise. The noise uses
/// the exact one-step OU update x' = rho x + a sqrt((1-rho^2)/(2 theta)) g,
/// rho = exp(-theta), whose stationary variance is a^2/(2 theta); the state
/// starts from a stationary draw.
inline FrequencySeries generate(const SynthSpec& spec) {
    validate(spec);
    const std::size_t n = static_cast<std::size_t>(spec.days) * kSecondsPerDay;
    FrequencySeries s;
    s.start_epoch = spec.start_epoch;
    s.nominal_hz = spec.nominal_hz;
    s.values.resize(n);
    s.gap_mask.assign(n, 0);

    const double rho_jump = std::exp(-1.0 / spec.decay_time_s);
    const double theta = spec.noise_reversion_rate;
    const double rho_noise = std::exp(-theta);
    const double stationary_std = spec.noise_amplitude / std::sqrt(2.0 * theta);
    const double shock = spec.noise_amplitude * std::sqrt((1.0 - rho_noise * rho_noise) /
                                                          (2.0 * theta));
    const bool noisy = spec.noise_amplitude > 0.0;

    detail::GaussianSource gauss(spec.seed);
    double det = 0.0;
    double noise = noisy ? stationary_std * gauss.next() : 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            det *= rho_jump;
            if (noisy) noise = rho_noise * noise + shock * gauss.next();
        }
        if (t % static_cast<std::size_t>(kSecondsPerHour) == 0) {
            const auto day = static_cast<std::int64_t>(t / kSecondsPerDay);
            const int hour = static_cast<int>((t / kSecondsPerHour) % 24);
            det += detail::jump_at(spec, day, hour);
        }
        s.values[t] = spec.nominal_hz + det + noise;
    }
    return s;
}

/// Deterministic component alone (used to cross-check zero-noise output).
inline std::vector<double> deterministic_component(const SynthSpec& spec) {
    SynthSpec quiet = spec;
    quiet.noise_amplitude = 0.0;
    FrequencySeries s = generate(quiet);
    for (double& v : s.values) v -= spec.nominal_hz;
    return std::move(s.values);
}

/// Coarse (600 s) feature series tied to the effective hourly jump:
/// value = coupling * jump + feature noise, with the noise scale set to twice
/// the frequency-noise amplitude so a zero-noise spec gives an exact function
/// of the jump profile. Uses an independent seeded stream.
inline RawFeatureSeries generate_feature(const SynthSpec& spec, double coupling) {
    validate(spec);
    constexpr std::int64_t lambda = 600;
    RawFeatureSeries f;
    f.start_epoch = spec.start_epoch;
    f.lambda_s = lambda;
    const std::size_t n =
        static_cast<std::size_t>(spec.days) * static_cast<std::size_t>(kSecondsPerDay / lambda);
    f.values.resize(n);
    f.gap_mask.assign(n, 0);

    detail::GaussianSource gauss(spec.seed ^ 0x5851f42d4c957f2dull);
    const double noise_sd = 2.0 * spec.noise_amplitude;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t second = static_cast<std::int64_t>(i) * lambda;
        const std::int64_t day = second / kSecondsPerDay;
        const int hour = static_cast<int>((second / kSecondsPerHour) % 24);
        f.values[i] = coupling * detail::jump_at(spec, day, hour) + noise_sd * gauss.next();
    }
    return f;
}

}  // namespace gridfreq
