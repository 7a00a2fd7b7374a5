#include "minidemo/stochastics.hpp"

#include <charconv>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace minidemo {

ClockSpec ClockSpec::custom(int steps_per_year) {
    if (steps_per_year < 1)
        throw std::invalid_argument("custom clock needs at least one step per year");
    return {StepKind::custom, steps_per_year};
}

ClockSpec ClockSpec::parse(std::string_view text) {
    if (text == "hourly")
        return hourly();
    if (text == "daily")
        return daily();
    if (text == "weekly")
        return weekly();
    if (text == "monthly")
        return monthly();
    constexpr std::string_view prefix = "custom:";
    if (text.starts_with(prefix)) {
        const auto digits = text.substr(prefix.size());
        int n = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty())
            return custom(n);
    }
    throw std::invalid_argument("unknown clock '" + std::string(text) +
                                "' (expected hourly|daily|weekly|monthly|custom:N)");
}

std::string ClockSpec::to_string() const {
    switch (kind_) {
    case StepKind::hourly: return "hourly";
    case StepKind::daily: return "daily";
    case StepKind::weekly: return "weekly";
    case StepKind::monthly: return "monthly";
    case StepKind::custom: break;
    }
    return "custom:" + std::to_string(steps_per_year_);
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0)
        throw std::invalid_argument("uniform_index: empty range");
    // Rejection on the top of the range keeps the modulo unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit)
        x = engine_();
    return x % n;
}

double Rng::standard_normal() {
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

double instantaneous_probability(double p_yearly, const ClockSpec& clock) {
    if (!(p_yearly >= 0.0 && p_yearly <= 1.0))
        throw std::domain_error("yearly probability outside [0, 1]");
    const double p = std::min(p_yearly, 1.0 - 1e-9);
    const double per_step = -std::log1p(-p) / clock.steps_per_year();
    return std::clamp(per_step, 0.0, 1.0);
}

bool bernoulli(Rng& rng, double p) {
    if (p <= 0.0)
        return false;
    if (p >= 1.0)
        return true;
    return rng.uniform01() < p;
}

std::size_t weighted_index(Rng& rng, std::span<const double> weights) {
    if (weights.empty())
        throw std::invalid_argument("weighted sample from an empty sequence");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw std::invalid_argument("weighted sample with a negative weight");
        total += w;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("weighted sample with all-zero weights");

    const double target = rng.uniform01() * total;
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0)
            continue;
        cumulative += weights[i];
        last_positive = i;
        if (target < cumulative)
            return i;
    }
    // Rounding can leave target just above the accumulated total.
    return last_positive;
}

std::int64_t sample_half_normal_age_steps(Rng& rng, const ClockSpec& clock, double max_years) {
    const double sigma = 25.0 * clock.steps_per_year();
    const double cap = max_years * clock.steps_per_year();
    for (;;) {
        const double g = rng.standard_normal() * sigma;
        const auto steps = static_cast<std::int64_t>(std::abs(std::floor(g)));
        if (static_cast<double>(steps) < cap)
            return steps;
    }
}

} // namespace minidemo
