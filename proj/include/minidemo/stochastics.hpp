#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace minidemo {

enum class StepKind : std::uint8_t { hourly, daily, weekly, monthly, custom };

/// Fixed simulation step: how many steps make up one year.
class ClockSpec {
public:
    /// Daily clock.
    constexpr ClockSpec() = default;

    static constexpr ClockSpec hourly() { return {StepKind::hourly, 8760}; }
    static constexpr ClockSpec daily() { return {StepKind::daily, 365}; }
    static constexpr ClockSpec weekly() { return {StepKind::weekly, 52}; }
    static constexpr ClockSpec monthly() { return {StepKind::monthly, 12}; }
    static ClockSpec custom(int steps_per_year);

    /// Accepts "hourly", "daily", "weekly", "monthly" or "custom:N".
    static ClockSpec parse(std::string_view text);
    std::string to_string() const;

    constexpr StepKind kind() const { return kind_; }
    constexpr int steps_per_year() const { return steps_per_year_; }

    constexpr double years(std::int64_t steps) const {
        return static_cast<double>(steps) / steps_per_year_;
    }

    friend constexpr bool operator==(const ClockSpec&, const ClockSpec&) = default;

private:
    constexpr ClockSpec(StepKind kind, int n) : kind_(kind), steps_per_year_(n) {}

    StepKind kind_ = StepKind::daily;
    int steps_per_year_ = 365;
};

/// Seeded pseudorandom source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; every transform on top of it is
/// implemented here so that draws are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal deviate (Marsaglia polar method, no cached spare).
    double standard_normal();

private:
    std::mt19937_64 engine_;
};

/// Per-step probability from a yearly probability: -ln(1 - p) / N.
/// Inputs are clamped to 1 - 1e-9 before the logarithm.
double instantaneous_probability(double p_yearly, const ClockSpec& clock);

bool bernoulli(Rng& rng, double p);

/// Index i drawn with probability weights[i] / sum(weights).
std::size_t weighted_index(Rng& rng, std::span<const double> weights);

template <class T>
const T& weighted_sample(Rng& rng, std::span<const T> items, std::span<const double> weights) {
    if (items.size() != weights.size())
        throw std::invalid_argument("weighted_sample: items and weights differ in length");
    return items[weighted_index(rng, weights)];
}

/// Fisher-Yates shuffle driven by rng.
template <class T>
void shuffle(Rng& rng, std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_index(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

/// Moves a uniform sample of k elements (without replacement) to the front.
template <class T>
void partial_shuffle(Rng& rng, std::span<T> items, std::size_t k) {
    const std::size_t n = items.size();
    if (k > n)
        k = n;
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        using std::swap;
        swap(items[i], items[j]);
    }
}

/// Initial age in steps: |floor(g)| with g ~ Normal(0, 25 * N) measured in
/// steps, redrawn while the result reaches max_years.
std::int64_t sample_half_normal_age_steps(Rng& rng, const ClockSpec& clock,
                                          double max_years = 110.0);

inline double sample_half_normal_age(Rng& rng, const ClockSpec& clock, double max_years = 110.0) {
    return clock.years(sample_half_normal_age_steps(rng, clock, max_years));
}

} // namespace minidemo
