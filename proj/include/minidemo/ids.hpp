#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace minidemo {

/// Identifier of a simulated person. Assigned in strictly increasing order
/// and never reused, so it doubles as the person's index in the store.
struct PersonId {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(PersonId, PersonId) = default;
};

/// Index of a town cell in the 12x8 grid (row-major, 0-based).
struct TownId {
    std::uint16_t value = 0;

    friend constexpr auto operator<=>(TownId, TownId) = default;
};

/// Reference to a house, or one of two distinguished non-house locations:
/// the grave (dead persons) and "unhoused" (only during initialization).
class HouseRef {
public:
    constexpr HouseRef() = default;
    constexpr explicit HouseRef(std::uint32_t index) : value_(index) {}

    static constexpr HouseRef grave() { return HouseRef(kGraveValue); }
    static constexpr HouseRef none() { return HouseRef(kNoneValue); }

    constexpr bool is_grave() const { return value_ == kGraveValue; }
    constexpr bool is_none() const { return value_ == kNoneValue; }
    constexpr bool is_house() const { return value_ < kGraveValue; }
    constexpr std::uint32_t index() const { return value_; }

    friend constexpr auto operator<=>(HouseRef, HouseRef) = default;

private:
    static constexpr std::uint32_t kGraveValue = std::numeric_limits<std::uint32_t>::max() - 1;
    static constexpr std::uint32_t kNoneValue = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t value_ = kNoneValue;
};

/// Raised when a mutator's precondition does not hold.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace minidemo

template <>
struct std::hash<minidemo::PersonId> {
    std::size_t operator()(minidemo::PersonId id) const noexcept { return id.value; }
};
